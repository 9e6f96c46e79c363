#pragma once

#include <cmath>
#include <filesystem>

#include "idmc/clustering.hpp"
#include "idmc/complex_vec.hpp"
#include "idmc/quantizer.hpp"
#include "idmc/rng.hpp"

namespace idmc {

// Transmission chain flavor: analog passes continuous symbols straight
// through the channel; regular/irregular insert the matching modem.
enum class SystemMode { analog, regular, irregular };

const char* to_string(SystemMode mode);

// AWGN channel configuration. Under the unit-average-power convention the
// total complex noise variance is 10^(-snr_db/10). Noiseless transmission is
// an explicit flag, not infinite snr_db arithmetic.
struct ChannelConfig {
    double snr_db = 10.0;
    bool noiseless = false;

    static ChannelConfig from_snr_db(double snr_db) { return {snr_db, false}; }
    static ChannelConfig noiseless_channel() { return {0.0, true}; }

    double noise_variance() const {
        return noiseless ? 0.0 : std::pow(10.0, -snr_db / 10.0);
    }
};

// Modulator/demodulator sharing one constellation. Regular mode quantizes the
// in-phase and quadrature components independently on the uniform grid;
// irregular mode searches an explicit constellation point list.
struct Modem {
    enum class Mode { regular, irregular };

    Mode mode = Mode::regular;
    UniformQuantizer quantizer;
    Constellation constellation;

    static Modem regular(UniformQuantizer q) { return {Mode::regular, q, {}}; }
    static Modem irregular(Constellation c) { return {Mode::irregular, {}, std::move(c)}; }

    cplx map_symbol(cplx s) const;

    // Smallest distance between distinct constellation points, for
    // decision-region reasoning.
    double min_distance() const;
};

// y / sqrt(average_power(y)); output average power is 1. Throws on all-zero
// input.
ComplexVec normalize_power(const ComplexVec& y);

// Nearest-constellation mapping, elementwise.
ComplexVec modulate(const ComplexVec& y, const Modem& m);

// z + n, n ~ CN(0, noise_variance * I). Deterministic given rng.
ComplexVec transmit(const ComplexVec& z, const ChannelConfig& ch, Rng& rng);

// Identical rule and identical constellation as modulate.
ComplexVec demodulate(const ComplexVec& z_hat, const Modem& m);

// Debug trace: one "index,y_re,y_im,z_re,z_im,zhat_re,zhat_im,yhat_re,yhat_im"
// line per symbol.
void write_trace_csv(const std::filesystem::path& path, const ComplexVec& y,
                     const ComplexVec& z, const ComplexVec& z_hat,
                     const ComplexVec& y_hat);

}  // namespace idmc
