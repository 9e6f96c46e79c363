#pragma once

#include <functional>
#include <string>

#include "idmc/adam.hpp"
#include "idmc/codec.hpp"
#include "idmc/config.hpp"
#include "idmc/dataset.hpp"
#include "idmc/metrics.hpp"

namespace idmc {

// RNG stream ids. Dataset generation owns 100-102; evaluation noise uses
// eval_noise_base + grid index; training streams are offset by 16 * phase so
// the phases never share a sequence.
namespace streams {
constexpr std::uint64_t init = 1;
constexpr std::uint64_t shuffle = 2;
constexpr std::uint64_t snr = 3;
constexpr std::uint64_t noise = 4;
constexpr std::uint64_t cluster_pick = 5;
constexpr std::uint64_t cluster_snr = 6;
constexpr std::uint64_t cluster_init = 7;
constexpr std::uint64_t phase_stride = 16;
constexpr std::uint64_t eval_noise_base = 1000;
}  // namespace streams

struct PhaseResult {
    CodecParams params;
    std::vector<double> epoch_losses;  // mean training loss per epoch
};

// One experiment: a config, its dataset, and the three-phase schedule plus
// evaluation. All entry points are deterministic in (config, seed).
class Experiment {
public:
    explicit Experiment(ExperimentConfig cfg);

    const ExperimentConfig& config() const { return cfg_; }
    const Dataset& dataset() const { return data_; }
    CodecShape shape() const;

    // Phase 1: analog pretraining, modem bypassed, noise on normalized y.
    PhaseResult run_phase1_analog();

    // Phase 2 (idmc_i): pool encoder outputs from sampled training images and
    // fit the irregular constellation.
    Constellation run_phase2_cluster(const CodecParams& pretrained);

    // Phase 3: fine-tune through the discrete chain with STE. Requires an
    // analog checkpoint of matching shape; idmc_i additionally needs the
    // fitted constellation. In idmc_r mode d is calibrated here and trained.
    PhaseResult run_phase3_finetune(const Checkpoint& pretrained,
                                    const Constellation* constellation);

    // "STE" benchmark: the digital system trained from scratch with a fixed
    // unit-step grid, budgeted phase1 + finetune epochs.
    PhaseResult run_ste_baseline();

    // PSNR/MSE per eval-grid SNR over the test split, plus modulation error
    // and constellation usage in digital modes.
    EvalReport evaluate_sweep(const CodecParams& params,
                              const Constellation* constellation = nullptr);

    // Normalized encoder-output symbols pooled over `image_count` sampled
    // training images (the clustering input and the distribution export).
    ComplexVec pool_symbols(const CodecParams& params, int image_count);

    // Step-size calibration for idmc_r fine-tuning: d0 = 2 E|s| / sqrt(Bp)
    // over one batch of normalized encoder outputs (Bp floored at 1).
    double calibrate_step(const CodecParams& params);

    std::function<void(const std::string&)> log;

private:
    PhaseResult train(SystemMode mode, CodecParams params,
                      const Constellation* constellation, int epochs, int phase,
                      bool update_d);
    SystemMode system_mode() const;

    ExperimentConfig cfg_;
    Dataset data_;
};

}  // namespace idmc
