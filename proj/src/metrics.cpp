#include "idmc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "idmc/io.hpp"

namespace idmc {

double psnr_from_mse(double mse, int bitdepth) {
    if (mse < 0.0) throw std::invalid_argument("psnr_from_mse: negative MSE");
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    const double max_val = std::pow(2.0, bitdepth) - 1.0;
    return 10.0 * std::log10(max_val * max_val / mse);
}

double psnr(const Eigen::MatrixXd& x, const Eigen::MatrixXd& x_hat, int bitdepth) {
    if (x.rows() != x_hat.rows() || x.cols() != x_hat.cols()) {
        throw std::invalid_argument("psnr: shape mismatch");
    }
    const double max_val = std::pow(2.0, bitdepth) - 1.0;
    const double mse = ((x - x_hat) * max_val).squaredNorm() /
                       static_cast<double>(x.rows() * x.cols());
    return psnr_from_mse(mse, bitdepth);
}

double modulation_error_rms(const ComplexVec& y, const ComplexVec& z) {
    if (y.size() != z.size()) throw std::invalid_argument("modulation_error_rms: length mismatch");
    if (y.empty()) throw std::invalid_argument("modulation_error_rms: empty input");
    double acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) acc += std::norm(y[i] - z[i]);
    return std::sqrt(acc / static_cast<double>(y.size()));
}

std::size_t SymbolHistogram::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

SymbolHistogram symbol_histogram(const ComplexVec& samples, int bins) {
    if (samples.empty()) throw std::invalid_argument("symbol_histogram: empty samples");
    if (bins < 1) throw std::invalid_argument("symbol_histogram: bins must be >= 1");

    SymbolHistogram h;
    h.bins = bins;
    h.lo_i = h.hi_i = samples[0].real();
    h.lo_q = h.hi_q = samples[0].imag();
    for (const cplx& s : samples) {
        h.lo_i = std::min(h.lo_i, s.real());
        h.hi_i = std::max(h.hi_i, s.real());
        h.lo_q = std::min(h.lo_q, s.imag());
        h.hi_q = std::max(h.hi_q, s.imag());
    }
    // Degenerate (point-mass) axes get a unit-width box around the value.
    if (h.hi_i <= h.lo_i) h.hi_i = h.lo_i + 1.0;
    if (h.hi_q <= h.lo_q) h.hi_q = h.lo_q + 1.0;

    h.counts.assign(static_cast<std::size_t>(bins) * static_cast<std::size_t>(bins), 0);
    h.marginal_i.assign(static_cast<std::size_t>(bins), 0);
    h.marginal_q.assign(static_cast<std::size_t>(bins), 0);

    const double wi = (h.hi_i - h.lo_i) / bins;
    const double wq = (h.hi_q - h.lo_q) / bins;
    for (const cplx& s : samples) {
        int bi = static_cast<int>((s.real() - h.lo_i) / wi);
        int bq = static_cast<int>((s.imag() - h.lo_q) / wq);
        bi = std::clamp(bi, 0, bins - 1);
        bq = std::clamp(bq, 0, bins - 1);
        ++h.counts[static_cast<std::size_t>(bi) * static_cast<std::size_t>(bins) +
                   static_cast<std::size_t>(bq)];
        ++h.marginal_i[static_cast<std::size_t>(bi)];
        ++h.marginal_q[static_cast<std::size_t>(bq)];
    }
    return h;
}

void export_symbol_distribution(const std::filesystem::path& path,
                                const ComplexVec& samples, int bins) {
    const SymbolHistogram h = symbol_histogram(samples, bins);

    std::ostringstream main_out;
    main_out << "bin_i,bin_q,count\n";
    for (int bi = 0; bi < h.bins; ++bi) {
        for (int bq = 0; bq < h.bins; ++bq) {
            main_out << bi << "," << bq << "," << h.at(bi, bq) << "\n";
        }
    }
    atomic_write(path, main_out.str());

    auto write_marginal = [&](const std::vector<std::size_t>& counts, double lo, double hi,
                              const char* suffix) {
        std::ostringstream out;
        out << "bin,center,count\n";
        const double w = (hi - lo) / h.bins;
        for (int b = 0; b < h.bins; ++b) {
            out << b << "," << format_double(lo + (b + 0.5) * w) << ","
                << counts[static_cast<std::size_t>(b)] << "\n";
        }
        std::filesystem::path p = path;
        p.replace_extension();
        atomic_write(p.string() + suffix, out.str());
    };
    write_marginal(h.marginal_i, h.lo_i, h.hi_i, "_i.csv");
    write_marginal(h.marginal_q, h.lo_q, h.hi_q, "_q.csv");
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << "snr_db,psnr_db,mse,mode,order,cbr,seed\n";
    for (const SweepRow& r : rows) {
        out << format_double(r.snr_db) << "," << format_double(r.psnr_db) << ","
            << format_double(r.mse) << "," << r.mode << "," << r.order << ","
            << format_double(r.cbr) << "," << r.seed << "\n";
    }
    return out.str();
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
    atomic_write(path, sweep_csv(rows));
}

}  // namespace idmc
