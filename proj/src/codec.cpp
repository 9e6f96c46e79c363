#include "idmc/codec.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace idmc {

namespace {

bool layers_finite(const std::vector<net::DenseLayer>& layers) {
    for (const auto& l : layers) {
        if (!l.w.allFinite() || !l.b.allFinite()) return false;
    }
    return true;
}

std::vector<int> encoder_dims(const CodecShape& s) {
    std::vector<int> dims{s.n + 1};
    dims.insert(dims.end(), s.hidden.begin(), s.hidden.end());
    dims.push_back(2 * s.k);
    return dims;
}

std::vector<int> decoder_dims(const CodecShape& s) {
    std::vector<int> dims{2 * s.k + 1};
    dims.insert(dims.end(), s.hidden.begin(), s.hidden.end());
    dims.push_back(s.n);
    return dims;
}

net::DenseLayer init_layer(int out, int in, Rng& rng) {
    net::DenseLayer layer;
    layer.w.resize(out, in);
    const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
    for (int r = 0; r < out; ++r) {
        for (int c = 0; c < in; ++c) {
            layer.w(r, c) = bound * (2.0 * rng.next_uniform() - 1.0);
        }
    }
    layer.b = Eigen::VectorXd::Zero(out);
    return layer;
}

std::vector<net::DenseLayer> init_stack(const std::vector<int>& dims, Rng& rng) {
    std::vector<net::DenseLayer> layers;
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
        layers.push_back(init_layer(dims[i + 1], dims[i], rng));
    }
    return layers;
}

int stack_graph(net::Graph& g, int node, std::vector<net::DenseLayer>& layers,
                std::vector<net::DenseLayer>* grads) {
    for (std::size_t i = 0; i < layers.size(); ++i) {
        net::DenseLayer* lg = grads != nullptr ? &(*grads)[i] : nullptr;
        node = g.affine(node, layers[i], lg);
        if (i + 1 < layers.size()) node = g.tanh_act(node);
    }
    return node;
}

}  // namespace

bool CodecParams::all_finite() const {
    return layers_finite(encoder) && layers_finite(decoder) && std::isfinite(d);
}

void CodecGrads::zero() {
    for (auto& l : encoder) {
        l.w.setZero();
        l.b.setZero();
    }
    for (auto& l : decoder) {
        l.w.setZero();
        l.b.setZero();
    }
    d = 0.0;
}

bool CodecGrads::all_finite() const {
    return layers_finite(encoder) && layers_finite(decoder) && std::isfinite(d);
}

CodecParams init_codec(const CodecShape& shape, Rng& rng) {
    if (shape.n < 1 || shape.k < 1) throw std::invalid_argument("init_codec: bad shape");
    CodecParams p;
    p.shape = shape;
    p.encoder = init_stack(encoder_dims(shape), rng);
    p.decoder = init_stack(decoder_dims(shape), rng);
    return p;
}

CodecGrads make_grads(const CodecParams& params) {
    CodecGrads g;
    for (const auto& l : params.encoder) {
        g.encoder.push_back({Eigen::MatrixXd::Zero(l.w.rows(), l.w.cols()),
                             Eigen::VectorXd::Zero(l.b.size())});
    }
    for (const auto& l : params.decoder) {
        g.decoder.push_back({Eigen::MatrixXd::Zero(l.w.rows(), l.w.cols()),
                             Eigen::VectorXd::Zero(l.b.size())});
    }
    return g;
}

int encode_graph(net::Graph& g, const Eigen::MatrixXd& x, double mu_db,
                 CodecParams& params, CodecGrads* grads) {
    if (x.rows() != params.shape.n) throw std::invalid_argument("encode_graph: bad input size");
    int node = g.input(x);
    node = g.append_row(node, mu_db / 20.0);
    return stack_graph(g, node, params.encoder, grads != nullptr ? &grads->encoder : nullptr);
}

int decode_graph(net::Graph& g, int y_hat, double mu_db, CodecParams& params,
                 CodecGrads* grads) {
    if (g.value(y_hat).rows() != 2 * params.shape.k) {
        throw std::invalid_argument("decode_graph: bad input size");
    }
    int node = g.append_row(y_hat, mu_db / 20.0);
    return stack_graph(g, node, params.decoder, grads != nullptr ? &grads->decoder : nullptr);
}

namespace {

constexpr char kMagic[4] = {'I', 'D', 'M', 'C'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t read_u32(std::istream& in) {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}

void write_layers(std::ostream& out, const std::vector<net::DenseLayer>& layers) {
    for (const auto& l : layers) {
        for (Eigen::Index r = 0; r < l.w.rows(); ++r) {
            for (Eigen::Index c = 0; c < l.w.cols(); ++c) {
                const float f = static_cast<float>(l.w(r, c));
                out.write(reinterpret_cast<const char*>(&f), sizeof(f));
            }
        }
        for (Eigen::Index r = 0; r < l.b.size(); ++r) {
            const float f = static_cast<float>(l.b(r));
            out.write(reinterpret_cast<const char*>(&f), sizeof(f));
        }
    }
}

void read_layers(std::istream& in, std::vector<net::DenseLayer>& layers) {
    for (auto& l : layers) {
        for (Eigen::Index r = 0; r < l.w.rows(); ++r) {
            for (Eigen::Index c = 0; c < l.w.cols(); ++c) {
                float f = 0.0f;
                in.read(reinterpret_cast<char*>(&f), sizeof(f));
                l.w(r, c) = static_cast<double>(f);
            }
        }
        for (Eigen::Index r = 0; r < l.b.size(); ++r) {
            float f = 0.0f;
            in.read(reinterpret_cast<char*>(&f), sizeof(f));
            l.b(r) = static_cast<double>(f);
        }
    }
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const CodecParams& params,
                     SystemMode mode) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("save_checkpoint: cannot open " + tmp.string());
        out.write(kMagic, sizeof(kMagic));
        write_u32(out, kVersion);
        write_u32(out, static_cast<std::uint32_t>(mode));
        write_u32(out, static_cast<std::uint32_t>(params.shape.n));
        write_u32(out, static_cast<std::uint32_t>(params.shape.k));
        write_u32(out, static_cast<std::uint32_t>(params.encoder.size()));
        for (const auto& l : params.encoder) {
            write_u32(out, static_cast<std::uint32_t>(l.w.rows()));
            write_u32(out, static_cast<std::uint32_t>(l.w.cols()));
        }
        write_u32(out, static_cast<std::uint32_t>(params.decoder.size()));
        for (const auto& l : params.decoder) {
            write_u32(out, static_cast<std::uint32_t>(l.w.rows()));
            write_u32(out, static_cast<std::uint32_t>(l.w.cols()));
        }
        write_layers(out, params.encoder);
        write_layers(out, params.decoder);
        if (mode == SystemMode::regular) {
            out.write(reinterpret_cast<const char*>(&params.d), sizeof(params.d));
        }
        if (!out) throw std::runtime_error("save_checkpoint: write failed");
    }
    std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path.string());
    char magic[4];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw std::runtime_error("load_checkpoint: bad magic in " + path.string());
    }
    if (read_u32(in) != kVersion) throw std::runtime_error("load_checkpoint: unsupported version");

    Checkpoint ckpt;
    ckpt.mode = static_cast<SystemMode>(read_u32(in));
    ckpt.params.shape.n = static_cast<int>(read_u32(in));
    ckpt.params.shape.k = static_cast<int>(read_u32(in));

    auto read_shapes = [&](std::vector<net::DenseLayer>& layers) {
        const std::uint32_t count = read_u32(in);
        layers.resize(count);
        for (auto& l : layers) {
            const std::uint32_t rows = read_u32(in);
            const std::uint32_t cols = read_u32(in);
            l.w = Eigen::MatrixXd::Zero(rows, cols);
            l.b = Eigen::VectorXd::Zero(rows);
        }
    };
    read_shapes(ckpt.params.encoder);
    read_shapes(ckpt.params.decoder);
    read_layers(in, ckpt.params.encoder);
    read_layers(in, ckpt.params.decoder);
    if (ckpt.mode == SystemMode::regular) {
        in.read(reinterpret_cast<char*>(&ckpt.params.d), sizeof(ckpt.params.d));
    }
    if (!in) throw std::runtime_error("load_checkpoint: truncated file " + path.string());

    // Recover hidden widths from the stored shape table.
    for (std::size_t i = 0; i + 1 < ckpt.params.encoder.size(); ++i) {
        ckpt.params.shape.hidden.push_back(static_cast<int>(ckpt.params.encoder[i].w.rows()));
    }
    return ckpt;
}

}  // namespace idmc
