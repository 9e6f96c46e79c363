#pragma once

#include <Eigen/Dense>
#include <vector>

#include "idmc/modem.hpp"
#include "idmc/quantizer.hpp"
#include "idmc/rng.hpp"

namespace idmc::net {

struct DenseLayer {
    Eigen::MatrixXd w;
    Eigen::VectorXd b;
};

// Channel node behavior. In regular mode the closed-form step-size
// derivative is accumulated into *d_grad during backward (both quantizer
// applications, per the straight-through surrogate); all other gradients
// pass straight through.
struct ChannelSpec {
    SystemMode mode = SystemMode::analog;
    UniformQuantizer quantizer;             // regular mode
    const Constellation* constellation = nullptr;  // irregular mode
    ChannelConfig config;
    double* d_grad = nullptr;
    Rng* rng = nullptr;  // noise source; required unless noiseless
};

// Minimal reverse-mode tape over batched matrices (rows = features, columns
// = batch elements). Forward values are computed eagerly at node creation;
// backward walks nodes in reverse creation order.
class Graph {
public:
    int input(Eigen::MatrixXd value);

    // w * x + b per column. Parameter gradients accumulate into *grad when
    // non-null.
    int affine(int x, const DenseLayer& layer, DenseLayer* grad = nullptr);

    int tanh_act(int x);

    // Appends one constant row (SNR conditioning).
    int append_row(int x, double value);

    // Per-column scaling to unit average complex power; rows hold interleaved
    // (re, im) pairs, so a column of 2k reals is k complex symbols.
    int power_normalize(int x);

    // modulate -> AWGN -> demodulate with straight-through backward. Analog
    // mode is additive noise only (exact identity Jacobian).
    int channel(int x, const ChannelSpec& spec);

    // Outputs `forced`, backpropagates to x unchanged. The bare
    // straight-through primitive; also the surrogate-injection hook used by
    // the equivalence tests.
    int substitute(int x, Eigen::MatrixXd forced);

    // Batch-mean per-pixel squared error; value is 1x1.
    int mse_loss(int pred, Eigen::MatrixXd target);

    const Eigen::MatrixXd& value(int id) const { return nodes_[static_cast<std::size_t>(id)].value; }
    const Eigen::MatrixXd& grad(int id) const { return nodes_[static_cast<std::size_t>(id)].grad; }

    void backward(int id);

private:
    enum class Kind { input, affine, tanh, append_row, power_normalize, channel, substitute, mse };

    struct Node {
        Kind kind;
        int a = -1;
        Eigen::MatrixXd value;
        Eigen::MatrixXd grad;
        const DenseLayer* layer = nullptr;
        DenseLayer* layer_grad = nullptr;
        ChannelSpec chan;
        Eigen::MatrixXd aux;     // channel: noisy pre-demodulation symbols
        Eigen::MatrixXd target;  // mse
        Eigen::RowVectorXd scale;  // power_normalize: per-column factor
        double row_value = 0.0;    // append_row
    };

    int push(Node node);

    std::vector<Node> nodes_;
};

}  // namespace idmc::net
