#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace idmc {

// Misconfiguration; the CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ExperimentMode { analog, idmc_r, idmc_i, ste_baseline };

const char* to_string(ExperimentMode mode);
ExperimentMode parse_experiment_mode(const std::string& text);

// Flat key = value experiment configuration. Unknown keys are rejected.
struct ExperimentConfig {
    ExperimentMode mode = ExperimentMode::analog;
    int order = 16;
    double cbr = 1.0 / 24.0;
    double snr_train_low_db = 0.0;
    double snr_train_high_db = 20.0;
    std::vector<double> snr_eval_grid_db = {0.0, 5.0, 10.0, 15.0, 20.0};
    int epochs_phase1 = 50;
    int epochs_finetune = 25;
    int batch_size = 64;
    double lr = 2e-4;
    double lr_d_scale = 1.0;
    std::uint64_t seed = 1;
    std::string dataset = "synthetic";  // or an image directory path
    int image_h = 8, image_w = 8, image_c = 1;
    int train_size = 2048;
    int test_size = 512;
    int cluster_sample_images = 50;
    int cluster_max_iters = 300;
    bool kmeans_pp = false;
    int hidden_layers = 2;
    int hidden_width_mult = 4;  // hidden width = mult * n
    int histogram_bins = 41;
    std::string out_dir = "out";

    int n() const { return image_h * image_w * image_c; }
    // k = round(cbr * n), at least 1.
    int k() const;

    // Throws ConfigError on any inconsistent setting.
    void validate() const;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::filesystem::path& path);

}  // namespace idmc
