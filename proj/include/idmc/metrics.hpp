#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

#include "idmc/complex_vec.hpp"

namespace idmc {

// PSNR from a mean squared error measured at integer pixel scale:
// 10 * log10(MAX^2 / MSE) with MAX = 2^bitdepth - 1. Zero MSE returns +inf.
double psnr_from_mse(double mse, int bitdepth = 8);

// PSNR between two same-shape pixel arrays in [0, 1]; both are denormalized
// to the given bit depth before the squared error is taken.
double psnr(const Eigen::MatrixXd& x, const Eigen::MatrixXd& x_hat, int bitdepth = 8);

// RMS modulation error sqrt((1/k) * sum |y_i - z_i|^2).
double modulation_error_rms(const ComplexVec& y, const ComplexVec& z);

// 2-D histogram over (I, Q) with square bins spanning the sample bounding
// box, plus marginal axis counts.
struct SymbolHistogram {
    int bins = 0;
    double lo_i = 0.0, hi_i = 0.0, lo_q = 0.0, hi_q = 0.0;
    std::vector<std::size_t> counts;       // bins x bins, row = I bin
    std::vector<std::size_t> marginal_i;   // per I bin
    std::vector<std::size_t> marginal_q;   // per Q bin

    std::size_t at(int bi, int bq) const {
        return counts[static_cast<std::size_t>(bi) * static_cast<std::size_t>(bins) +
                      static_cast<std::size_t>(bq)];
    }
    std::size_t total() const;
};

SymbolHistogram symbol_histogram(const ComplexVec& samples, int bins);

// Writes "bin_i,bin_q,count" to `path`, and one "bin,center,count" file per
// marginal next to it (suffixes _i.csv / _q.csv replacing the extension).
void export_symbol_distribution(const std::filesystem::path& path,
                                const ComplexVec& samples, int bins);

struct SweepRow {
    double snr_db = 0.0;
    double psnr_db = 0.0;
    double mse = 0.0;  // integer-pixel-scale MSE
    std::string mode;
    int order = 0;
    double cbr = 0.0;
    std::uint64_t seed = 0;
};

struct EvalReport {
    std::vector<SweepRow> rows;
    double modulation_error_rms = 0.0;
    std::vector<std::size_t> constellation_usage;  // per constellation index
};

// Header "snr_db,psnr_db,mse,mode,order,cbr,seed"; +inf PSNR serializes as
// "inf".
std::string sweep_csv(const std::vector<SweepRow>& rows);
void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows);

}  // namespace idmc
