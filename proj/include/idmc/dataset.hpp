#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>

namespace idmc {

// Flattened image collections: one column per image, pixels in [0, 1],
// row-major (row, column, channel) flattening, 8-bit depth metadata implied.
struct Dataset {
    int h = 0, w = 0, c = 0;
    Eigen::MatrixXd train;
    Eigen::MatrixXd test;

    int n() const { return h * w * c; }
};

// Low-rank correlated Gaussian source squashed to [0, 1] through a logistic
// map. A fixed factor loading matrix of rank max(1, n/8) is drawn once from
// the seed; train and test images come from separate streams.
Dataset make_synthetic(int h, int w, int c, int train_count, int test_count,
                       std::uint64_t seed);

// Reads every .pgm/.ppm (binary P5/P6, maxval < 256) file in the directory in
// sorted filename order; the first train_count images become the training
// split, the next test_count the test split. All images must share one shape.
Dataset load_image_directory(const std::filesystem::path& dir, int train_count,
                             int test_count);

// Single-image binary PGM (c = 1) / PPM (c = 3) round trip, values in [0, 1].
Eigen::VectorXd read_pnm(const std::filesystem::path& path, int& h, int& w, int& c);
void write_pnm(const std::filesystem::path& path, const Eigen::VectorXd& pixels, int h,
               int w, int c);

}  // namespace idmc
