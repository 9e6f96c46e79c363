#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>

#include "idmc/adam.hpp"
#include "idmc/codec.hpp"
#include "idmc/net.hpp"

using namespace idmc;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng,
                              double scale = 1.0) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            m(i, j) = scale * (2.0 * rng.next_uniform() - 1.0);
        }
    }
    return m;
}

// Central finite difference of a scalar-valued rebuild at *entry.
double central_diff(double* entry, const std::function<double()>& eval, double h = 1e-6) {
    const double saved = *entry;
    *entry = saved + h;
    const double up = eval();
    *entry = saved - h;
    const double down = eval();
    *entry = saved;
    return (up - down) / (2.0 * h);
}

void check_close(double analytic, double numeric, double tol = 1e-5) {
    const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
    CHECK(std::abs(analytic - numeric) / denom < tol);
}

}  // namespace

TEST_CASE("finite differences: affine, tanh, append_row, power_normalize, mse") {
    Rng rng(11, 0);
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::Index in_dim = 2 + static_cast<Eigen::Index>(rng.next_below(5));
        const Eigen::Index mid_dim = 2 * (1 + static_cast<Eigen::Index>(rng.next_below(3)));
        const Eigen::Index batch = 1 + static_cast<Eigen::Index>(rng.next_below(4));

        Eigen::MatrixXd x = random_matrix(in_dim, batch, rng);
        net::DenseLayer l1{random_matrix(mid_dim, in_dim, rng, 0.7),
                           random_matrix(mid_dim, 1, rng, 0.3).col(0)};
        net::DenseLayer l2{random_matrix(mid_dim, mid_dim + 1, rng, 0.7),
                           random_matrix(mid_dim, 1, rng, 0.3).col(0)};
        const Eigen::MatrixXd target = random_matrix(mid_dim, batch, rng);

        net::DenseLayer g1{Eigen::MatrixXd::Zero(mid_dim, in_dim),
                           Eigen::VectorXd::Zero(mid_dim)};
        net::DenseLayer g2{Eigen::MatrixXd::Zero(mid_dim, mid_dim + 1),
                           Eigen::VectorXd::Zero(mid_dim)};

        auto build = [&](net::Graph& g, net::DenseLayer* gr1, net::DenseLayer* gr2) {
            const int xin = g.input(x);
            const int a1 = g.affine(xin, l1, gr1);
            const int t1 = g.tanh_act(a1);
            const int ar = g.append_row(t1, 0.4);
            const int a2 = g.affine(ar, l2, gr2);
            const int nrm = g.power_normalize(a2);
            const int loss = g.mse_loss(nrm, target);
            return std::pair{xin, loss};
        };
        auto eval = [&]() {
            net::Graph g;
            return g.value(build(g, nullptr, nullptr).second)(0, 0);
        };

        net::Graph g;
        auto [xin, loss] = build(g, &g1, &g2);
        g.backward(loss);

        // Sampled entries from every gradient surface.
        for (int probe = 0; probe < 4; ++probe) {
            const Eigen::Index r = static_cast<Eigen::Index>(rng.next_below(mid_dim));
            const Eigen::Index c = static_cast<Eigen::Index>(rng.next_below(in_dim));
            check_close(g1.w(r, c), central_diff(&l1.w(r, c), eval));
            check_close(g1.b(r), central_diff(&l1.b(r), eval));
            const Eigen::Index c2 = static_cast<Eigen::Index>(rng.next_below(mid_dim + 1));
            check_close(g2.w(r, c2), central_diff(&l2.w(r, c2), eval));
            const Eigen::Index xr = static_cast<Eigen::Index>(rng.next_below(in_dim));
            const Eigen::Index xc = static_cast<Eigen::Index>(rng.next_below(batch));
            check_close(g.grad(xin)(xr, xc), central_diff(&x(xr, xc), eval));
        }
    }
}

TEST_CASE("channel backward is identity pass-through in irregular mode") {
    const double r = 1.0 / std::sqrt(2.0);
    const Constellation qpsk{{{r, r}, {r, -r}, {-r, r}, {-r, -r}}};
    net::Graph g;
    Rng rng(12, 0);
    const int x = g.input(random_matrix(6, 3, rng));
    net::ChannelSpec spec;
    spec.mode = SystemMode::irregular;
    spec.constellation = &qpsk;
    spec.config = ChannelConfig::noiseless_channel();
    const int y = g.channel(x, spec);
    // Seeding backward with ones differentiates the elementwise sum.
    g.backward(y);
    CHECK(g.grad(x).isOnes(0.0));
}

TEST_CASE("channel d-gradient matches the hand-evaluated single-symbol case") {
    net::Graph g;
    Eigen::MatrixXd s(2, 1);
    s << 0.26, 0.5;  // one symbol, quadrature part already on the grid
    const int x = g.input(s);
    double d_grad = 0.0;
    net::ChannelSpec spec;
    spec.mode = SystemMode::regular;
    spec.quantizer = {0.5, -2, 2};
    spec.config = ChannelConfig::noiseless_channel();
    spec.d_grad = &d_grad;
    const int y = g.channel(x, spec);
    CHECK(g.value(y)(0, 0) == 0.5);
    g.backward(y);
    CHECK(d_grad == doctest::Approx(0.48).epsilon(1e-12));
    CHECK(g.grad(x).isOnes(0.0));
}

TEST_CASE("STE surrogate equivalence: digital gradients equal injected-analog gradients") {
    Rng rng(13, 0);
    const CodecShape shape{8, 2, {12}};
    Rng init_rng(13, 1);
    CodecParams params = init_codec(shape, init_rng);
    params.d = 0.4;
    const Eigen::MatrixXd batch = random_matrix(8, 5, rng, 0.5).array() + 0.5;

    auto run = [&](bool digital, const Eigen::MatrixXd* inject, CodecGrads& grads,
                   Eigen::MatrixXd* y_hat_out) {
        net::Graph g;
        const int y = encode_graph(g, batch, 10.0, params, &grads);
        const int y_norm = g.power_normalize(y);
        int top;
        if (digital) {
            net::ChannelSpec spec;
            spec.mode = SystemMode::regular;
            UniformQuantizer q = grid_for_order(16);
            q.d = params.d;
            spec.quantizer = q;
            spec.config = ChannelConfig::noiseless_channel();
            top = g.channel(y_norm, spec);
        } else {
            top = g.substitute(y_norm, *inject);
        }
        if (y_hat_out) *y_hat_out = g.value(top);
        const int x_hat = decode_graph(g, top, 10.0, params, &grads);
        const int loss = g.mse_loss(x_hat, batch);
        g.backward(loss);
        return g.value(loss)(0, 0);
    };

    CodecGrads digital_grads = make_grads(params);
    Eigen::MatrixXd y_hat;
    const double digital_loss = run(true, nullptr, digital_grads, &y_hat);

    CodecGrads analog_grads = make_grads(params);
    const double analog_loss = run(false, &y_hat, analog_grads, nullptr);

    CHECK(digital_loss == doctest::Approx(analog_loss).epsilon(1e-12));
    for (std::size_t l = 0; l < digital_grads.encoder.size(); ++l) {
        CHECK((digital_grads.encoder[l].w - analog_grads.encoder[l].w).cwiseAbs().maxCoeff() <
              1e-12);
        CHECK((digital_grads.encoder[l].b - analog_grads.encoder[l].b).cwiseAbs().maxCoeff() <
              1e-12);
    }
    for (std::size_t l = 0; l < digital_grads.decoder.size(); ++l) {
        CHECK((digital_grads.decoder[l].w - analog_grads.decoder[l].w).cwiseAbs().maxCoeff() <
              1e-12);
    }
}

TEST_CASE("identity-configured single-layer codec round trips") {
    const int n = 6;
    const CodecShape shape{n, n / 2, {}};
    CodecParams params;
    params.shape = shape;
    // Encoder: n x (n+1) identity block, zero SNR column; decoder mirrors it.
    net::DenseLayer enc{Eigen::MatrixXd::Zero(n, n + 1), Eigen::VectorXd::Zero(n)};
    enc.w.leftCols(n).setIdentity();
    net::DenseLayer dec{Eigen::MatrixXd::Zero(n, n + 1), Eigen::VectorXd::Zero(n)};
    dec.w.leftCols(n).setIdentity();
    params.encoder.push_back(enc);
    params.decoder.push_back(dec);

    Rng rng(14, 0);
    const Eigen::MatrixXd x = random_matrix(n, 4, rng);
    net::Graph g;
    const int y = encode_graph(g, x, 10.0, params);
    CHECK((g.value(y) - x).cwiseAbs().maxCoeff() == 0.0);
    const int x_hat = decode_graph(g, y, 10.0, params);
    CHECK((g.value(x_hat) - x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("zero-weight codec maps everything to zero") {
    const CodecShape shape{4, 2, {}};
    CodecParams params;
    params.shape = shape;
    params.encoder.push_back(
        {Eigen::MatrixXd::Zero(4, 5), Eigen::VectorXd::Zero(4)});
    params.decoder.push_back(
        {Eigen::MatrixXd::Zero(4, 5), Eigen::VectorXd::Zero(4)});
    Rng rng(15, 0);
    net::Graph g;
    const int y = encode_graph(g, random_matrix(4, 3, rng), 5.0, params);
    CHECK(g.value(y).isZero(0.0));
    const int x_hat = decode_graph(g, y, 5.0, params);
    CHECK(g.value(x_hat).isZero(0.0));
}

TEST_CASE("mse loss examples") {
    net::Graph g;
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(4, 2);
    const int pred = g.input(x);
    CHECK(g.value(g.mse_loss(pred, x))(0, 0) == 0.0);
    CHECK(g.value(g.mse_loss(pred, Eigen::MatrixXd::Ones(4, 2)))(0, 0) == 1.0);
    // Per-image MSEs 0.0 and 0.5 average to 0.25.
    Eigen::MatrixXd target = Eigen::MatrixXd::Zero(4, 2);
    target.col(1) << std::sqrt(0.5), std::sqrt(0.5), std::sqrt(0.5), std::sqrt(0.5);
    CHECK(g.value(g.mse_loss(pred, target))(0, 0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK_THROWS_AS(g.mse_loss(pred, Eigen::MatrixXd::Zero(3, 2)), std::invalid_argument);
}

namespace {

CodecParams scalar_params(double value) {
    CodecParams p;
    p.shape = {1, 1, {}};
    p.encoder.push_back({Eigen::MatrixXd::Constant(1, 1, value),
                         Eigen::VectorXd::Zero(1)});
    p.decoder.push_back({Eigen::MatrixXd::Constant(1, 1, value),
                         Eigen::VectorXd::Zero(1)});
    return p;
}

CodecGrads scalar_grads(double g) {
    CodecGrads grads;
    grads.encoder.push_back({Eigen::MatrixXd::Constant(1, 1, g), Eigen::VectorXd::Zero(1)});
    grads.decoder.push_back({Eigen::MatrixXd::Constant(1, 1, g), Eigen::VectorXd::Zero(1)});
    return grads;
}

}  // namespace

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
    CodecParams p = scalar_params(1.5);
    AdamState state = AdamState::for_params(p);
    adam_step(p, scalar_grads(0.0), state, {});
    CHECK(p.encoder[0].w(0, 0) == 1.5);
}

TEST_CASE("adam: first bias-corrected step has magnitude ~ lr") {
    CodecParams p = scalar_params(0.0);
    AdamState state = AdamState::for_params(p);
    AdamOptions opts;
    opts.lr = 2e-4;
    adam_step(p, scalar_grads(1.0), state, opts);
    CHECK(p.encoder[0].w(0, 0) == doctest::Approx(-2e-4).epsilon(1e-6));
}

TEST_CASE("adam: constant gradient approaches per-step magnitude lr") {
    CodecParams p = scalar_params(0.0);
    AdamState state = AdamState::for_params(p);
    AdamOptions opts;
    opts.lr = 1e-3;
    double prev = 0.0;
    for (int i = 0; i < 5000; ++i) {
        prev = p.encoder[0].w(0, 0);
        adam_step(p, scalar_grads(1.0), state, opts);
    }
    CHECK(std::abs(prev - p.encoder[0].w(0, 0)) ==
          doctest::Approx(opts.lr).epsilon(0.01));
}

TEST_CASE("adam: non-finite gradient aborts the step") {
    CodecParams p = scalar_params(1.0);
    AdamState state = AdamState::for_params(p);
    CHECK_THROWS_AS(
        adam_step(p, scalar_grads(std::numeric_limits<double>::quiet_NaN()), state, {}),
        std::runtime_error);
    CHECK(p.encoder[0].w(0, 0) == 1.0);
}

TEST_CASE("checkpoint round trip") {
    Rng rng(16, 0);
    CodecParams p = init_codec({6, 2, {10}}, rng);
    p.d = 0.325;
    const auto path = std::filesystem::temp_directory_path() / "idmc_ckpt_test.bin";
    save_checkpoint(path, p, SystemMode::regular);
    const Checkpoint loaded = load_checkpoint(path);
    CHECK(loaded.mode == SystemMode::regular);
    CHECK(loaded.params.shape == p.shape);
    CHECK(loaded.params.d == 0.325);  // footer is stored at full precision
    // Payload is float32.
    CHECK((loaded.params.encoder[0].w.cast<float>().cast<double>() -
           loaded.params.encoder[0].w)
              .cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK((loaded.params.encoder[0].w - p.encoder[0].w).cwiseAbs().maxCoeff() < 1e-6);
    std::filesystem::remove(path);
}
