#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "idmc/metrics.hpp"
#include "idmc/rng.hpp"

using namespace idmc;

TEST_CASE("psnr formula") {
    // MSE = MAX^2 -> 0 dB.
    CHECK(psnr_from_mse(255.0 * 255.0) == doctest::Approx(0.0).epsilon(1e-12));
    // 8-bit, MSE = 1 -> 10 log10(65025).
    CHECK(psnr_from_mse(1.0) == doctest::Approx(10.0 * std::log10(65025.0)).epsilon(1e-12));
    CHECK(std::isinf(psnr_from_mse(0.0)));

    Eigen::MatrixXd x = Eigen::MatrixXd::Constant(3, 2, 0.5);
    CHECK(std::isinf(psnr(x, x)));
    CHECK_THROWS_AS(psnr(x, Eigen::MatrixXd::Zero(2, 2)), std::invalid_argument);
}

TEST_CASE("psnr decreases as mse increases") {
    double prev = psnr_from_mse(0.01);
    for (double mse = 0.1; mse < 1000.0; mse *= 2.0) {
        const double p = psnr_from_mse(mse);
        CHECK(p < prev);
        prev = p;
    }
}

TEST_CASE("symbol histogram: point mass occupies a single bin") {
    const ComplexVec samples(100, cplx(0.25, -0.5));
    const SymbolHistogram h = symbol_histogram(samples, 7);
    CHECK(h.total() == 100);
    int nonzero = 0;
    for (auto c : h.counts) {
        if (c > 0) ++nonzero;
    }
    CHECK(nonzero == 1);
}

TEST_CASE("symbol histogram: Gaussian marginals peak centrally and decay") {
    Rng rng(21, 0);
    const ComplexVec samples = sample_complex_gaussian(rng, 1'000'000, 1.0);
    const SymbolHistogram h = symbol_histogram(samples, 21);
    CHECK(h.total() == samples.size());

    auto check_marginal = [](const std::vector<std::size_t>& m) {
        const std::size_t peak =
            static_cast<std::size_t>(std::max_element(m.begin(), m.end()) - m.begin());
        // Peak near the middle, monotone decay over at least 3 bins each side.
        CHECK(peak >= m.size() / 2 - 2);
        CHECK(peak <= m.size() / 2 + 2);
        for (std::size_t i = peak; i < peak + 3; ++i) CHECK(m[i + 1] <= m[i]);
        for (std::size_t i = peak; i > peak - 3; --i) CHECK(m[i - 1] <= m[i]);
    };
    check_marginal(h.marginal_i);
    check_marginal(h.marginal_q);
}

TEST_CASE("distribution export writes joint and marginal CSVs") {
    Rng rng(22, 0);
    const ComplexVec samples = sample_complex_gaussian(rng, 1000, 1.0);
    const auto dir = std::filesystem::temp_directory_path();
    const auto path = dir / "idmc_dist_test.csv";
    export_symbol_distribution(path, samples, 9);

    std::ifstream joint(path);
    std::string header;
    std::getline(joint, header);
    CHECK(header == "bin_i,bin_q,count");
    int lines = 0;
    for (std::string line; std::getline(joint, line);) ++lines;
    CHECK(lines == 81);

    for (const char* suffix : {"_i.csv", "_q.csv"}) {
        std::ifstream marginal(dir / ("idmc_dist_test" + std::string(suffix)));
        CHECK(marginal.good());
        std::getline(marginal, header);
        CHECK(header == "bin,center,count");
        std::filesystem::remove(dir / ("idmc_dist_test" + std::string(suffix)));
    }
    std::filesystem::remove(path);
}

TEST_CASE("sweep csv schema and inf serialization") {
    std::vector<SweepRow> rows;
    rows.push_back({10.0, std::numeric_limits<double>::infinity(), 0.0, "analog", 0,
                    1.0 / 24.0, 7});
    const std::string csv = sweep_csv(rows);
    CHECK(csv.rfind("snr_db,psnr_db,mse,mode,order,cbr,seed\n", 0) == 0);
    CHECK(csv.find(",inf,") != std::string::npos);
}
