#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <optional>

#include "idmc/clustering.hpp"
#include "idmc/config.hpp"
#include "idmc/io.hpp"
#include "idmc/metrics.hpp"
#include "idmc/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> order;
    std::optional<double> snr;
    std::string out;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_snr = false) {
    cmd->add_option("--config", args.config_path, "experiment config file")->required();
    cmd->add_option("--seed", args.seed, "override config seed");
    cmd->add_option("--order", args.order, "override modulation order");
    if (with_snr) cmd->add_option("--snr", args.snr, "evaluate at a single SNR (dB)");
    cmd->add_option("--out", args.out, "output path (defaults under out_dir)");
}

idmc::ExperimentConfig load_config(const CommonArgs& args) {
    idmc::ExperimentConfig cfg = idmc::parse_config_file(args.config_path);
    if (args.seed) cfg.seed = *args.seed;
    if (args.order) cfg.order = *args.order;
    if (args.snr) cfg.snr_eval_grid_db = {*args.snr};
    cfg.validate();
    return cfg;
}

idmc::Experiment make_experiment(const idmc::ExperimentConfig& cfg) {
    idmc::Experiment exp(cfg);
    exp.log = [](const std::string& msg) { std::cerr << msg << "\n"; };
    fs::create_directories(cfg.out_dir);
    return exp;
}

fs::path out_path(const CommonArgs& args, const idmc::ExperimentConfig& cfg,
                  const char* fallback) {
    return args.out.empty() ? fs::path(cfg.out_dir) / fallback : fs::path(args.out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Digital wireless image transmission with distribution-matched modulation"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string checkpoint_path;
    std::string constellation_path;

    auto* train_analog = app.add_subcommand("train-analog", "phase 1: analog pretraining");
    add_common(train_analog, args);

    auto* fit_cmd = app.add_subcommand("fit-constellation",
                                       "phase 2: K-means constellation from a checkpoint");
    add_common(fit_cmd, args);
    fit_cmd->add_option("--checkpoint", checkpoint_path, "analog checkpoint")->required();

    auto* finetune = app.add_subcommand("finetune", "phase 3: digital fine-tuning");
    add_common(finetune, args);
    finetune->add_option("--checkpoint", checkpoint_path, "analog checkpoint")->required();
    finetune->add_option("--constellation", constellation_path,
                         "constellation file (idmc_i)");

    auto* train_ste = app.add_subcommand("train-ste", "STE baseline from scratch");
    add_common(train_ste, args);

    auto* evaluate = app.add_subcommand("evaluate", "PSNR sweep over the eval SNR grid");
    add_common(evaluate, args, /*with_snr=*/true);
    evaluate->add_option("--checkpoint", checkpoint_path, "checkpoint to evaluate")
        ->required();
    evaluate->add_option("--constellation", constellation_path,
                         "constellation file (idmc_i)");

    auto* export_dist =
        app.add_subcommand("export-distribution", "encoder-output symbol histogram");
    add_common(export_dist, args);
    export_dist->add_option("--checkpoint", checkpoint_path, "checkpoint to sample")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (train_analog->parsed()) {
            const auto cfg = load_config(args);
            auto exp = make_experiment(cfg);
            const auto result = exp.run_phase1_analog();
            const auto path = out_path(args, cfg, "analog.ckpt");
            idmc::save_checkpoint(path, result.params, idmc::SystemMode::analog);
            std::cout << "wrote " << path.string() << "\n";
        } else if (fit_cmd->parsed()) {
            const auto cfg = load_config(args);
            auto exp = make_experiment(cfg);
            const auto ckpt = idmc::load_checkpoint(checkpoint_path);
            const auto constellation = exp.run_phase2_cluster(ckpt.params);
            const auto path = out_path(args, cfg, "constellation.csv");
            idmc::save_constellation(path, constellation);
            std::cout << "wrote " << path.string() << "\n";
        } else if (finetune->parsed()) {
            const auto cfg = load_config(args);
            auto exp = make_experiment(cfg);
            const auto ckpt = idmc::load_checkpoint(checkpoint_path);
            std::optional<idmc::Constellation> constellation;
            if (cfg.mode == idmc::ExperimentMode::idmc_i) {
                if (constellation_path.empty()) {
                    throw idmc::ConfigError("idmc_i finetune requires --constellation");
                }
                constellation = idmc::load_constellation(constellation_path);
            }
            const auto result = exp.run_phase3_finetune(
                ckpt, constellation ? &*constellation : nullptr);
            const auto path = out_path(args, cfg, "finetuned.ckpt");
            idmc::save_checkpoint(path, result.params,
                                  cfg.mode == idmc::ExperimentMode::idmc_i
                                      ? idmc::SystemMode::irregular
                                      : idmc::SystemMode::regular);
            std::cout << "wrote " << path.string() << "\n";
        } else if (train_ste->parsed()) {
            const auto cfg = load_config(args);
            auto exp = make_experiment(cfg);
            const auto result = exp.run_ste_baseline();
            const auto path = out_path(args, cfg, "ste.ckpt");
            idmc::save_checkpoint(path, result.params, idmc::SystemMode::regular);
            std::cout << "wrote " << path.string() << "\n";
        } else if (evaluate->parsed()) {
            const auto cfg = load_config(args);
            auto exp = make_experiment(cfg);
            const auto ckpt = idmc::load_checkpoint(checkpoint_path);
            std::optional<idmc::Constellation> constellation;
            if (cfg.mode == idmc::ExperimentMode::idmc_i) {
                if (constellation_path.empty()) {
                    throw idmc::ConfigError("idmc_i evaluation requires --constellation");
                }
                constellation = idmc::load_constellation(constellation_path);
            }
            const auto report = exp.evaluate_sweep(
                ckpt.params, constellation ? &*constellation : nullptr);
            const auto path = out_path(args, cfg, "sweep.csv");
            idmc::write_sweep_csv(path, report.rows);
            std::cout << idmc::sweep_csv(report.rows);
            std::cout << "wrote " << path.string() << "\n";
        } else if (export_dist->parsed()) {
            const auto cfg = load_config(args);
            auto exp = make_experiment(cfg);
            const auto ckpt = idmc::load_checkpoint(checkpoint_path);
            const auto symbols =
                exp.pool_symbols(ckpt.params, cfg.cluster_sample_images);
            const auto path = out_path(args, cfg, "distribution.csv");
            idmc::export_symbol_distribution(path, symbols, cfg.histogram_bins);
            std::cout << "wrote " << path.string() << "\n";
        }
    } catch (const idmc::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
