#include "idmc/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace idmc {

namespace {

std::vector<int> permutation(int count, Rng& rng) {
    std::vector<int> perm(static_cast<std::size_t>(count));
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = count - 1; i > 0; --i) {
        const auto j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(i) + 1));
        std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    }
    return perm;
}

Eigen::MatrixXd gather(const Eigen::MatrixXd& data, const std::vector<int>& idx,
                       std::size_t begin, std::size_t end) {
    Eigen::MatrixXd out(data.rows(), static_cast<Eigen::Index>(end - begin));
    for (std::size_t i = begin; i < end; ++i) {
        out.col(static_cast<Eigen::Index>(i - begin)) = data.col(idx[i]);
    }
    return out;
}

}  // namespace

Experiment::Experiment(ExperimentConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    if (cfg_.dataset == "synthetic") {
        data_ = make_synthetic(cfg_.image_h, cfg_.image_w, cfg_.image_c, cfg_.train_size,
                               cfg_.test_size, cfg_.seed);
    } else {
        data_ = load_image_directory(cfg_.dataset, cfg_.train_size, cfg_.test_size);
        if (data_.n() != cfg_.n()) {
            throw ConfigError("dataset image shape disagrees with config");
        }
    }
}

CodecShape Experiment::shape() const {
    CodecShape s;
    s.n = cfg_.n();
    s.k = cfg_.k();
    s.hidden.assign(static_cast<std::size_t>(cfg_.hidden_layers),
                    cfg_.hidden_width_mult * cfg_.n());
    return s;
}

SystemMode Experiment::system_mode() const {
    switch (cfg_.mode) {
        case ExperimentMode::analog: return SystemMode::analog;
        case ExperimentMode::idmc_r:
        case ExperimentMode::ste_baseline: return SystemMode::regular;
        case ExperimentMode::idmc_i: return SystemMode::irregular;
    }
    return SystemMode::analog;
}

PhaseResult Experiment::train(SystemMode mode, CodecParams params,
                              const Constellation* constellation, int epochs, int phase,
                              bool update_d) {
    if (mode == SystemMode::irregular && constellation == nullptr) {
        throw ConfigError("irregular training requires a constellation");
    }
    const std::uint64_t off = streams::phase_stride * static_cast<std::uint64_t>(phase);
    Rng shuffle_rng(cfg_.seed, streams::shuffle + off);
    Rng snr_rng(cfg_.seed, streams::snr + off);
    Rng noise_rng(cfg_.seed, streams::noise + off);

    CodecGrads grads = make_grads(params);
    AdamState adam = AdamState::for_params(params);
    UniformQuantizer grid;
    if (mode == SystemMode::regular) grid = grid_for_order(cfg_.order);

    PhaseResult result;
    const int train_count = static_cast<int>(data_.train.cols());
    const int lr_drop_epoch = (epochs * 4 + 4) / 5;  // 80% of the schedule

    for (int epoch = 0; epoch < epochs; ++epoch) {
        AdamOptions opts;
        opts.lr = cfg_.lr * (epoch >= lr_drop_epoch ? 0.1 : 1.0);
        opts.lr_d_scale = cfg_.lr_d_scale;
        opts.update_d = update_d;

        const std::vector<int> perm = permutation(train_count, shuffle_rng);
        double loss_acc = 0.0;
        for (std::size_t begin = 0; begin < perm.size();
             begin += static_cast<std::size_t>(cfg_.batch_size)) {
            const std::size_t end =
                std::min(perm.size(), begin + static_cast<std::size_t>(cfg_.batch_size));
            const Eigen::MatrixXd batch = gather(data_.train, perm, begin, end);
            const double mu = cfg_.snr_train_low_db +
                              snr_rng.next_uniform() *
                                  (cfg_.snr_train_high_db - cfg_.snr_train_low_db);

            grads.zero();
            net::Graph g;
            const int y = encode_graph(g, batch, mu, params, &grads);
            const int y_norm = g.power_normalize(y);

            net::ChannelSpec spec;
            spec.mode = mode;
            if (mode == SystemMode::regular) {
                grid.d = params.d;
                spec.quantizer = grid;
                spec.d_grad = &grads.d;
            }
            spec.constellation = constellation;
            spec.config = ChannelConfig::from_snr_db(mu);
            spec.rng = &noise_rng;
            const int y_hat = g.channel(y_norm, spec);

            const int x_hat = decode_graph(g, y_hat, mu, params, &grads);
            const int loss = g.mse_loss(x_hat, batch);
            g.backward(loss);
            adam_step(params, grads, adam, opts);

            loss_acc += g.value(loss)(0, 0) * static_cast<double>(end - begin);
        }
        result.epoch_losses.push_back(loss_acc / static_cast<double>(train_count));
        if (log) {
            std::ostringstream msg;
            msg << "phase " << phase << " epoch " << epoch + 1 << "/" << epochs
                << " loss " << result.epoch_losses.back();
            if (update_d) msg << " d " << params.d;
            log(msg.str());
        }
    }
    result.params = std::move(params);
    return result;
}

PhaseResult Experiment::run_phase1_analog() {
    Rng init_rng(cfg_.seed, streams::init);
    CodecParams params = init_codec(shape(), init_rng);
    return train(SystemMode::analog, std::move(params), nullptr, cfg_.epochs_phase1,
                 /*phase=*/1, /*update_d=*/false);
}

ComplexVec Experiment::pool_symbols(const CodecParams& params, int image_count) {
    const int train_count = static_cast<int>(data_.train.cols());
    if (image_count > train_count) {
        throw std::invalid_argument("pool_symbols: more images requested than available");
    }
    Rng pick_rng(cfg_.seed, streams::cluster_pick);
    Rng snr_rng(cfg_.seed, streams::cluster_snr);
    std::vector<int> perm = permutation(train_count, pick_rng);
    perm.resize(static_cast<std::size_t>(image_count));

    ComplexVec symbols;
    symbols.reserve(static_cast<std::size_t>(image_count) *
                    static_cast<std::size_t>(cfg_.k()));
    CodecParams working = params;  // graph keeps layer pointers, not copies
    for (std::size_t begin = 0; begin < perm.size();
         begin += static_cast<std::size_t>(cfg_.batch_size)) {
        const std::size_t end =
            std::min(perm.size(), begin + static_cast<std::size_t>(cfg_.batch_size));
        const Eigen::MatrixXd batch = gather(data_.train, perm, begin, end);
        const double mu =
            cfg_.snr_train_low_db +
            snr_rng.next_uniform() * (cfg_.snr_train_high_db - cfg_.snr_train_low_db);
        net::Graph g;
        const int y_norm = g.power_normalize(encode_graph(g, batch, mu, working));
        const Eigen::MatrixXd& y = g.value(y_norm);
        for (Eigen::Index j = 0; j < y.cols(); ++j) {
            for (Eigen::Index i = 0; i < y.rows(); i += 2) {
                symbols.emplace_back(y(i, j), y(i + 1, j));
            }
        }
    }
    return symbols;
}

Constellation Experiment::run_phase2_cluster(const CodecParams& pretrained) {
    if (cfg_.mode != ExperimentMode::idmc_i) {
        throw ConfigError("run_phase2_cluster requires mode = idmc_i");
    }
    const ComplexVec symbols = pool_symbols(pretrained, cfg_.cluster_sample_images);
    Rng init_rng(cfg_.seed, streams::cluster_init);
    const FitResult fit_result =
        fit(symbols, cfg_.order, init_rng, cfg_.cluster_max_iters, cfg_.kmeans_pp);
    if (log) {
        std::ostringstream msg;
        msg << "phase 2 clustering: " << fit_result.iterations << " iterations, objective "
            << fit_result.objective << (fit_result.converged ? "" : " (not converged)");
        log(msg.str());
    }
    return fit_result.constellation;
}

double Experiment::calibrate_step(const CodecParams& params) {
    const int batch_cols =
        std::min(cfg_.batch_size, static_cast<int>(data_.train.cols()));
    const Eigen::MatrixXd batch = data_.train.leftCols(batch_cols);
    const double mu = 0.5 * (cfg_.snr_train_low_db + cfg_.snr_train_high_db);
    CodecParams working = params;
    net::Graph g;
    const int y_norm = g.power_normalize(encode_graph(g, batch, mu, working));
    const double mean_abs = g.value(y_norm).array().abs().mean();
    const UniformQuantizer grid = grid_for_order(cfg_.order);
    return 2.0 * mean_abs / std::sqrt(static_cast<double>(std::max(grid.b_p, 1)));
}

PhaseResult Experiment::run_phase3_finetune(const Checkpoint& pretrained,
                                            const Constellation* constellation) {
    if (pretrained.mode != SystemMode::analog) {
        throw ConfigError("finetune requires an analog (phase 1) checkpoint");
    }
    if (!(pretrained.params.shape == shape())) {
        throw ConfigError("checkpoint shape does not match config");
    }
    CodecParams params = pretrained.params;
    switch (cfg_.mode) {
        case ExperimentMode::idmc_r: {
            params.d = calibrate_step(params);
            if (log) log("phase 3 calibrated d = " + std::to_string(params.d));
            return train(SystemMode::regular, std::move(params), nullptr,
                         cfg_.epochs_finetune, /*phase=*/3, /*update_d=*/true);
        }
        case ExperimentMode::idmc_i: {
            if (constellation == nullptr) {
                throw ConfigError("idmc_i finetune requires a constellation file");
            }
            if (constellation->order() != cfg_.order) {
                throw ConfigError("constellation order does not match config");
            }
            return train(SystemMode::irregular, std::move(params), constellation,
                         cfg_.epochs_finetune, /*phase=*/3, /*update_d=*/false);
        }
        default:
            throw ConfigError("finetune requires mode idmc_r or idmc_i");
    }
}

PhaseResult Experiment::run_ste_baseline() {
    if (cfg_.mode != ExperimentMode::ste_baseline) {
        throw ConfigError("run_ste_baseline requires mode = ste_baseline");
    }
    Rng init_rng(cfg_.seed, streams::init);
    CodecParams params = init_codec(shape(), init_rng);
    params.d = 1.0;
    return train(SystemMode::regular, std::move(params), nullptr,
                 cfg_.epochs_phase1 + cfg_.epochs_finetune, /*phase=*/4,
                 /*update_d=*/false);
}

EvalReport Experiment::evaluate_sweep(const CodecParams& params,
                                      const Constellation* constellation) {
    const SystemMode mode = system_mode();
    if (mode == SystemMode::irregular && constellation == nullptr) {
        throw ConfigError("evaluate_sweep: irregular mode needs a constellation");
    }
    if (cfg_.snr_eval_grid_db.empty()) throw ConfigError("evaluate_sweep: empty grid");

    Modem modem;
    if (mode == SystemMode::regular) {
        UniformQuantizer grid = grid_for_order(cfg_.order);
        grid.d = params.d;
        modem = Modem::regular(grid);
    } else if (mode == SystemMode::irregular) {
        modem = Modem::irregular(*constellation);
    }

    EvalReport report;
    const int usage_size = mode == SystemMode::irregular
                               ? constellation->order()
                               : (mode == SystemMode::regular ? cfg_.order : 0);
    report.constellation_usage.assign(static_cast<std::size_t>(usage_size), 0);
    double mod_err_acc = 0.0;
    std::size_t symbol_count = 0;

    CodecParams working = params;
    const int test_count = static_cast<int>(data_.test.cols());
    const double max_val = 255.0;

    for (std::size_t snr_idx = 0; snr_idx < cfg_.snr_eval_grid_db.size(); ++snr_idx) {
        const double snr_db = cfg_.snr_eval_grid_db[snr_idx];
        Rng noise_rng(cfg_.seed, streams::eval_noise_base + snr_idx);
        double sq_err = 0.0;

        for (int begin = 0; begin < test_count; begin += cfg_.batch_size) {
            const int cols = std::min(cfg_.batch_size, test_count - begin);
            const Eigen::MatrixXd batch = data_.test.middleCols(begin, cols);
            net::Graph g;
            const int y_norm =
                g.power_normalize(encode_graph(g, batch, snr_db, working));

            net::ChannelSpec spec;
            spec.mode = mode;
            if (mode == SystemMode::regular) spec.quantizer = modem.quantizer;
            spec.constellation = constellation;
            spec.config = ChannelConfig::from_snr_db(snr_db);
            spec.rng = &noise_rng;
            const int y_hat = g.channel(y_norm, spec);
            const int x_hat = decode_graph(g, y_hat, snr_db, working);

            const Eigen::MatrixXd recon =
                g.value(x_hat).array().min(1.0).max(0.0).matrix();
            sq_err += ((batch - recon) * max_val).squaredNorm();

            if (mode != SystemMode::analog) {
                const Eigen::MatrixXd& y = g.value(y_norm);
                for (Eigen::Index j = 0; j < y.cols(); ++j) {
                    for (Eigen::Index i = 0; i < y.rows(); i += 2) {
                        const cplx s(y(i, j), y(i + 1, j));
                        const cplx z = modem.map_symbol(s);
                        mod_err_acc += std::norm(s - z);
                        ++symbol_count;
                        std::size_t idx;
                        if (mode == SystemMode::irregular) {
                            idx = assign(s, *constellation);
                        } else {
                            const int levels = modem.quantizer.b_p - modem.quantizer.b_n + 1;
                            const long ci = std::lround(z.real() / modem.quantizer.d) -
                                            modem.quantizer.b_n;
                            const long cq = std::lround(z.imag() / modem.quantizer.d) -
                                            modem.quantizer.b_n;
                            idx = static_cast<std::size_t>(ci * levels + cq);
                        }
                        ++report.constellation_usage[idx];
                    }
                }
            }
        }

        SweepRow row;
        row.snr_db = snr_db;
        row.mse = sq_err / (static_cast<double>(cfg_.n()) * test_count);
        row.psnr_db = psnr_from_mse(row.mse);
        row.mode = to_string(cfg_.mode);
        row.order = mode == SystemMode::analog ? 0 : cfg_.order;
        row.cbr = cfg_.cbr;
        row.seed = cfg_.seed;
        report.rows.push_back(row);
    }

    report.modulation_error_rms =
        symbol_count > 0 ? std::sqrt(mod_err_acc / static_cast<double>(symbol_count)) : 0.0;
    return report;
}

}  // namespace idmc
