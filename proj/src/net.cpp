#include "idmc/net.hpp"

#include <cmath>
#include <stdexcept>

namespace idmc::net {

int Graph::push(Node node) {
    node.grad = Eigen::MatrixXd::Zero(node.value.rows(), node.value.cols());
    nodes_.push_back(std::move(node));
    return static_cast<int>(nodes_.size()) - 1;
}

int Graph::input(Eigen::MatrixXd value) {
    Node n;
    n.kind = Kind::input;
    n.value = std::move(value);
    return push(std::move(n));
}

int Graph::affine(int x, const DenseLayer& layer, DenseLayer* grad) {
    const Eigen::MatrixXd& in = value(x);
    if (layer.w.cols() != in.rows()) throw std::invalid_argument("affine: dimension mismatch");
    Node n;
    n.kind = Kind::affine;
    n.a = x;
    n.layer = &layer;
    n.layer_grad = grad;
    n.value = (layer.w * in).colwise() + layer.b;
    return push(std::move(n));
}

int Graph::tanh_act(int x) {
    Node n;
    n.kind = Kind::tanh;
    n.a = x;
    n.value = value(x).array().tanh();
    return push(std::move(n));
}

int Graph::append_row(int x, double v) {
    const Eigen::MatrixXd& in = value(x);
    Node n;
    n.kind = Kind::append_row;
    n.a = x;
    n.row_value = v;
    n.value.resize(in.rows() + 1, in.cols());
    n.value.topRows(in.rows()) = in;
    n.value.bottomRows(1).setConstant(v);
    return push(std::move(n));
}

int Graph::power_normalize(int x) {
    const Eigen::MatrixXd& in = value(x);
    if (in.rows() % 2 != 0) throw std::invalid_argument("power_normalize: odd row count");
    const double k = static_cast<double>(in.rows()) / 2.0;
    Node n;
    n.kind = Kind::power_normalize;
    n.a = x;
    n.scale.resize(in.cols());
    for (Eigen::Index j = 0; j < in.cols(); ++j) {
        const double norm = in.col(j).norm();
        if (norm <= 0.0) throw std::invalid_argument("power_normalize: all-zero column");
        n.scale(j) = std::sqrt(k) / norm;
    }
    n.value = in * n.scale.asDiagonal();
    return push(std::move(n));
}

int Graph::channel(int x, const ChannelSpec& spec) {
    const Eigen::MatrixXd& in = value(x);
    if (in.rows() % 2 != 0) throw std::invalid_argument("channel: odd row count");
    const double variance = spec.config.noise_variance();
    if (!spec.config.noiseless && spec.rng == nullptr) {
        throw std::invalid_argument("channel: rng required for noisy transmission");
    }

    Node n;
    n.kind = Kind::channel;
    n.a = x;
    n.chan = spec;

    // Modulate.
    Eigen::MatrixXd z;
    switch (spec.mode) {
        case SystemMode::analog:
            z = in;
            break;
        case SystemMode::regular:
            z = in.unaryExpr([&](double s) { return quantize(s, spec.quantizer); });
            break;
        case SystemMode::irregular: {
            if (spec.constellation == nullptr) {
                throw std::invalid_argument("channel: irregular mode needs a constellation");
            }
            z.resize(in.rows(), in.cols());
            for (Eigen::Index j = 0; j < in.cols(); ++j) {
                for (Eigen::Index i = 0; i < in.rows(); i += 2) {
                    const cplx p = spec.constellation->points[assign(
                        cplx(in(i, j), in(i + 1, j)), *spec.constellation)];
                    z(i, j) = p.real();
                    z(i + 1, j) = p.imag();
                }
            }
            break;
        }
    }

    // AWGN: per complex symbol, real/imag draws in sequence, columns first.
    Eigen::MatrixXd z_hat = z;
    if (!spec.config.noiseless && variance > 0.0) {
        const double scale = std::sqrt(variance / 2.0);
        for (Eigen::Index j = 0; j < z.cols(); ++j) {
            for (Eigen::Index i = 0; i < z.rows(); i += 2) {
                z_hat(i, j) += scale * spec.rng->next_normal();
                z_hat(i + 1, j) += scale * spec.rng->next_normal();
            }
        }
    }
    n.aux = z_hat;

    // Demodulate with the identical rule.
    switch (spec.mode) {
        case SystemMode::analog:
            n.value = z_hat;
            break;
        case SystemMode::regular:
            n.value = z_hat.unaryExpr([&](double s) { return quantize(s, spec.quantizer); });
            break;
        case SystemMode::irregular: {
            n.value.resize(z_hat.rows(), z_hat.cols());
            for (Eigen::Index j = 0; j < z_hat.cols(); ++j) {
                for (Eigen::Index i = 0; i < z_hat.rows(); i += 2) {
                    const cplx p = spec.constellation->points[assign(
                        cplx(z_hat(i, j), z_hat(i + 1, j)), *spec.constellation)];
                    n.value(i, j) = p.real();
                    n.value(i + 1, j) = p.imag();
                }
            }
            break;
        }
    }
    return push(std::move(n));
}

int Graph::substitute(int x, Eigen::MatrixXd forced) {
    if (forced.rows() != value(x).rows() || forced.cols() != value(x).cols()) {
        throw std::invalid_argument("substitute: shape mismatch");
    }
    Node n;
    n.kind = Kind::substitute;
    n.a = x;
    n.value = std::move(forced);
    return push(std::move(n));
}

int Graph::mse_loss(int pred, Eigen::MatrixXd target) {
    const Eigen::MatrixXd& p = value(pred);
    if (p.rows() != target.rows() || p.cols() != target.cols()) {
        throw std::invalid_argument("mse_loss: shape mismatch");
    }
    Node n;
    n.kind = Kind::mse;
    n.a = pred;
    n.target = std::move(target);
    n.value.resize(1, 1);
    n.value(0, 0) =
        (p - n.target).squaredNorm() / static_cast<double>(p.rows() * p.cols());
    return push(std::move(n));
}

void Graph::backward(int id) {
    auto& seed = nodes_[static_cast<std::size_t>(id)];
    seed.grad.setOnes();

    for (int i = id; i >= 0; --i) {
        Node& n = nodes_[static_cast<std::size_t>(i)];
        if (n.grad.isZero(0.0) && i != id) continue;
        const Eigen::MatrixXd& g = n.grad;
        switch (n.kind) {
            case Kind::input:
                break;
            case Kind::affine: {
                Node& in = nodes_[static_cast<std::size_t>(n.a)];
                if (n.layer_grad != nullptr) {
                    n.layer_grad->w += g * in.value.transpose();
                    n.layer_grad->b += g.rowwise().sum();
                }
                in.grad += n.layer->w.transpose() * g;
                break;
            }
            case Kind::tanh: {
                Node& in = nodes_[static_cast<std::size_t>(n.a)];
                in.grad.array() += g.array() * (1.0 - n.value.array().square());
                break;
            }
            case Kind::append_row: {
                Node& in = nodes_[static_cast<std::size_t>(n.a)];
                in.grad += g.topRows(in.value.rows());
                break;
            }
            case Kind::power_normalize: {
                Node& in = nodes_[static_cast<std::size_t>(n.a)];
                for (Eigen::Index j = 0; j < g.cols(); ++j) {
                    const auto x = in.value.col(j);
                    const auto gj = g.col(j);
                    const double inv_sq = 1.0 / x.squaredNorm();
                    in.grad.col(j) +=
                        n.scale(j) * (gj - x * (x.dot(gj) * inv_sq));
                }
                break;
            }
            case Kind::channel: {
                Node& in = nodes_[static_cast<std::size_t>(n.a)];
                in.grad += g;
                if (n.chan.mode == SystemMode::regular && n.chan.d_grad != nullptr) {
                    double acc = 0.0;
                    for (Eigen::Index j = 0; j < g.cols(); ++j) {
                        for (Eigen::Index i2 = 0; i2 < g.rows(); ++i2) {
                            acc += g(i2, j) *
                                   (grad_wrt_distance(in.value(i2, j), n.chan.quantizer) +
                                    grad_wrt_distance(n.aux(i2, j), n.chan.quantizer));
                        }
                    }
                    *n.chan.d_grad += acc;
                }
                break;
            }
            case Kind::substitute: {
                Node& in = nodes_[static_cast<std::size_t>(n.a)];
                in.grad += g;
                break;
            }
            case Kind::mse: {
                Node& in = nodes_[static_cast<std::size_t>(n.a)];
                const double scale =
                    2.0 / static_cast<double>(in.value.rows() * in.value.cols());
                in.grad += g(0, 0) * scale * (in.value - n.target);
                break;
            }
        }
    }
}

}  // namespace idmc::net
