#pragma once

#include <filesystem>
#include <vector>

#include "idmc/net.hpp"

namespace idmc {

// Fully-connected encoder/decoder pair with SNR conditioning. The encoder
// maps n pixels plus the normalized SNR scalar to 2k reals (k complex
// symbols, interleaved (re0, im0, re1, im1, ...)); the decoder maps 2k reals
// plus SNR back to n pixels.
struct CodecShape {
    int n = 0;
    int k = 0;
    std::vector<int> hidden;  // shared hidden widths for encoder and decoder

    // Two hidden layers of width 4n.
    static CodecShape standard(int n, int k) { return {n, k, {4 * n, 4 * n}}; }

    bool operator==(const CodecShape&) const = default;
};

struct CodecParams {
    CodecShape shape;
    std::vector<net::DenseLayer> encoder;
    std::vector<net::DenseLayer> decoder;
    double d = 1.0;  // quantizer step, regular mode only

    bool all_finite() const;
};

// Gradient buffers mirroring CodecParams.
struct CodecGrads {
    std::vector<net::DenseLayer> encoder;
    std::vector<net::DenseLayer> decoder;
    double d = 0.0;

    void zero();
    bool all_finite() const;
};

// Xavier-uniform weights, zero biases; draw order is fixed (encoder then
// decoder, per layer w row-major then b).
CodecParams init_codec(const CodecShape& shape, Rng& rng);

CodecGrads make_grads(const CodecParams& params);

// Builds the encoder subgraph on x (n x B) conditioned on mu_db; returns the
// node id of the raw 2k x B output.
int encode_graph(net::Graph& g, const Eigen::MatrixXd& x, double mu_db,
                 CodecParams& params, CodecGrads* grads = nullptr);

// Builds the decoder subgraph on a 2k x B node; returns the n x B
// reconstruction node (unclamped).
int decode_graph(net::Graph& g, int y_hat, double mu_db, CodecParams& params,
                 CodecGrads* grads = nullptr);

// Binary little-endian checkpoint: magic "IDMC", u32 version, u32 mode,
// layer shape table, float32 parameter payload in declaration order, f64 d
// footer in regular mode. See docs in README.
void save_checkpoint(const std::filesystem::path& path, const CodecParams& params,
                     SystemMode mode);

struct Checkpoint {
    CodecParams params;
    SystemMode mode = SystemMode::analog;
};

Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace idmc
