#include "idmc/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace idmc {

namespace {

std::vector<net::DenseLayer> zeros_like(const std::vector<net::DenseLayer>& layers) {
    std::vector<net::DenseLayer> out;
    for (const auto& l : layers) {
        out.push_back({Eigen::MatrixXd::Zero(l.w.rows(), l.w.cols()),
                       Eigen::VectorXd::Zero(l.b.size())});
    }
    return out;
}

void update_stack(std::vector<net::DenseLayer>& params,
                  const std::vector<net::DenseLayer>& grads,
                  std::vector<net::DenseLayer>& m, std::vector<net::DenseLayer>& v,
                  double lr, double bc1, double bc2, const AdamOptions& o) {
    for (std::size_t i = 0; i < params.size(); ++i) {
        m[i].w = o.beta1 * m[i].w + (1.0 - o.beta1) * grads[i].w;
        v[i].w = o.beta2 * v[i].w.array().matrix() +
                 (1.0 - o.beta2) * grads[i].w.array().square().matrix();
        params[i].w.array() -= lr * (m[i].w.array() / bc1) /
                               ((v[i].w.array() / bc2).sqrt() + o.eps);

        m[i].b = o.beta1 * m[i].b + (1.0 - o.beta1) * grads[i].b;
        v[i].b = o.beta2 * v[i].b.array().matrix() +
                 (1.0 - o.beta2) * grads[i].b.array().square().matrix();
        params[i].b.array() -= lr * (m[i].b.array() / bc1) /
                               ((v[i].b.array() / bc2).sqrt() + o.eps);
    }
}

}  // namespace

AdamState AdamState::for_params(const CodecParams& params) {
    AdamState s;
    s.m_enc = zeros_like(params.encoder);
    s.v_enc = zeros_like(params.encoder);
    s.m_dec = zeros_like(params.decoder);
    s.v_dec = zeros_like(params.decoder);
    return s;
}

void adam_step(CodecParams& params, const CodecGrads& grads, AdamState& state,
               const AdamOptions& opts) {
    if (!grads.all_finite()) {
        throw std::runtime_error("adam_step: non-finite gradient, step aborted");
    }
    ++state.step;
    const double bc1 = 1.0 - std::pow(opts.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(opts.beta2, static_cast<double>(state.step));

    update_stack(params.encoder, grads.encoder, state.m_enc, state.v_enc, opts.lr, bc1,
                 bc2, opts);
    update_stack(params.decoder, grads.decoder, state.m_dec, state.v_dec, opts.lr, bc1,
                 bc2, opts);

    if (opts.update_d) {
        state.m_d = opts.beta1 * state.m_d + (1.0 - opts.beta1) * grads.d;
        state.v_d = opts.beta2 * state.v_d + (1.0 - opts.beta2) * grads.d * grads.d;
        params.d -= opts.lr * opts.lr_d_scale * (state.m_d / bc1) /
                    (std::sqrt(state.v_d / bc2) + opts.eps);
        // The quantizer needs a strictly positive step.
        if (params.d < 1e-6) params.d = 1e-6;
    }
    if (!params.all_finite()) {
        throw std::runtime_error("adam_step: parameters became non-finite");
    }
}

}  // namespace idmc
