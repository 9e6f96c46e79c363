#include "idmc/config.hpp"

#include <cmath>
#include <sstream>

#include "idmc/io.hpp"
#include "idmc/quantizer.hpp"

namespace idmc {

const char* to_string(ExperimentMode mode) {
    switch (mode) {
        case ExperimentMode::analog: return "analog";
        case ExperimentMode::idmc_r: return "idmc_r";
        case ExperimentMode::idmc_i: return "idmc_i";
        case ExperimentMode::ste_baseline: return "ste_baseline";
    }
    return "unknown";
}

ExperimentMode parse_experiment_mode(const std::string& text) {
    if (text == "analog") return ExperimentMode::analog;
    if (text == "idmc_r") return ExperimentMode::idmc_r;
    if (text == "idmc_i") return ExperimentMode::idmc_i;
    if (text == "ste_baseline") return ExperimentMode::ste_baseline;
    throw ConfigError("unknown mode: " + text);
}

int ExperimentConfig::k() const {
    return std::max(1, static_cast<int>(std::lround(cbr * n())));
}

void ExperimentConfig::validate() const {
    if (image_h < 1 || image_w < 1 || image_c < 1) throw ConfigError("bad image shape");
    if (!(cbr > 0.0 && cbr <= 1.0)) throw ConfigError("cbr must be in (0, 1]");
    if (snr_train_low_db > snr_train_high_db) throw ConfigError("snr_train range inverted");
    if (snr_eval_grid_db.empty()) throw ConfigError("snr_eval_grid is empty");
    if (epochs_phase1 < 0 || epochs_finetune < 0) throw ConfigError("negative epoch count");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (lr <= 0.0 || lr_d_scale <= 0.0) throw ConfigError("learning rates must be positive");
    if (train_size < 1 || test_size < 1) throw ConfigError("empty dataset split");
    if (cluster_sample_images < 1) throw ConfigError("cluster_sample_images must be >= 1");
    if (cluster_max_iters < 1) throw ConfigError("cluster_max_iters must be >= 1");
    if (hidden_layers < 0 || hidden_width_mult < 1) throw ConfigError("bad hidden layout");
    if (histogram_bins < 3) throw ConfigError("histogram_bins must be >= 3");
    if (mode == ExperimentMode::idmc_i) {
        if (order < 2) throw ConfigError("order must be >= 2 for idmc_i");
    } else if (mode != ExperimentMode::analog) {
        // Square-QAM grids only; grid_for_order throws ConfigError-equivalent
        // diagnostics for non-square orders.
        try {
            grid_for_order(order);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
}

namespace {

std::vector<double> parse_double_list(const std::string& text, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("bad value in " + key + ": " + item);
        }
    }
    return out;
}

template <typename T, typename Parser>
T parse_typed(const std::string& value, const std::string& key, Parser parse) {
    try {
        std::size_t pos = 0;
        T result = parse(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return result;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError("bad value for " + key + ": " + value);
    }
}

int parse_int(const std::string& v, const std::string& key) {
    return parse_typed<int>(v, key, [](const std::string& s, std::size_t* pos) {
        return std::stoi(s, pos);
    });
}

double parse_dbl(const std::string& v, const std::string& key) {
    return parse_typed<double>(v, key, [](const std::string& s, std::size_t* pos) {
        return std::stod(s, pos);
    });
}

std::uint64_t parse_u64(const std::string& v, const std::string& key) {
    return parse_typed<std::uint64_t>(v, key, [](const std::string& s, std::size_t* pos) {
        return std::stoull(s, pos);
    });
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("bad value for " + key + ": " + v);
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (value.empty()) throw ConfigError("empty value for " + key);

        if (key == "mode") cfg.mode = parse_experiment_mode(value);
        else if (key == "order") cfg.order = parse_int(value, key);
        else if (key == "cbr") cfg.cbr = parse_dbl(value, key);
        else if (key == "snr_train_low_db") cfg.snr_train_low_db = parse_dbl(value, key);
        else if (key == "snr_train_high_db") cfg.snr_train_high_db = parse_dbl(value, key);
        else if (key == "snr_eval_grid_db") cfg.snr_eval_grid_db = parse_double_list(value, key);
        else if (key == "epochs_phase1") cfg.epochs_phase1 = parse_int(value, key);
        else if (key == "epochs_finetune") cfg.epochs_finetune = parse_int(value, key);
        else if (key == "batch_size") cfg.batch_size = parse_int(value, key);
        else if (key == "lr") cfg.lr = parse_dbl(value, key);
        else if (key == "lr_d_scale") cfg.lr_d_scale = parse_dbl(value, key);
        else if (key == "seed") cfg.seed = parse_u64(value, key);
        else if (key == "dataset") cfg.dataset = value;
        else if (key == "image_h") cfg.image_h = parse_int(value, key);
        else if (key == "image_w") cfg.image_w = parse_int(value, key);
        else if (key == "image_c") cfg.image_c = parse_int(value, key);
        else if (key == "train_size") cfg.train_size = parse_int(value, key);
        else if (key == "test_size") cfg.test_size = parse_int(value, key);
        else if (key == "cluster_sample_images") cfg.cluster_sample_images = parse_int(value, key);
        else if (key == "cluster_max_iters") cfg.cluster_max_iters = parse_int(value, key);
        else if (key == "kmeans_pp") cfg.kmeans_pp = parse_bool(value, key);
        else if (key == "hidden_layers") cfg.hidden_layers = parse_int(value, key);
        else if (key == "hidden_width_mult") cfg.hidden_width_mult = parse_int(value, key);
        else if (key == "histogram_bins") cfg.histogram_bins = parse_int(value, key);
        else if (key == "out_dir") cfg.out_dir = value;
        else throw ConfigError("unknown key: " + key);
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
    try {
        return parse_config_text(read_file(path));
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("cannot read config: ") + e.what());
    }
}

}  // namespace idmc
