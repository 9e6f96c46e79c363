#pragma once

#include "idmc/codec.hpp"

namespace idmc {

// Adam with beta1 = 0.9, beta2 = 0.999, eps = 1e-8. The quantizer step d has
// its own moment pair and a learning-rate scale factor.
struct AdamState {
    std::vector<net::DenseLayer> m_enc, v_enc, m_dec, v_dec;
    double m_d = 0.0, v_d = 0.0;
    long step = 0;

    static AdamState for_params(const CodecParams& params);
};

struct AdamOptions {
    double lr = 2e-4;
    double lr_d_scale = 1.0;
    bool update_d = false;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// One update in place. Throws on non-finite gradients, leaving parameters
// untouched.
void adam_step(CodecParams& params, const CodecGrads& grads, AdamState& state,
               const AdamOptions& opts);

}  // namespace idmc
