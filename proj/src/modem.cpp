#include "idmc/modem.hpp"

#include <sstream>
#include <stdexcept>

#include "idmc/io.hpp"

namespace idmc {

const char* to_string(SystemMode mode) {
    switch (mode) {
        case SystemMode::analog: return "analog";
        case SystemMode::regular: return "regular";
        case SystemMode::irregular: return "irregular";
    }
    return "unknown";
}

cplx Modem::map_symbol(cplx s) const {
    if (mode == Mode::regular) {
        return cplx(quantize(s.real(), quantizer), quantize(s.imag(), quantizer));
    }
    return constellation.points[assign(s, constellation)];
}

double Modem::min_distance() const {
    if (mode == Mode::regular) return quantizer.d;
    return min_pairwise_distance(constellation);
}

ComplexVec normalize_power(const ComplexVec& y) {
    const double power = average_power(y);
    if (power <= 0.0) throw std::invalid_argument("normalize_power: all-zero input");
    const double scale = 1.0 / std::sqrt(power);
    ComplexVec out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] * scale;
    return out;
}

ComplexVec modulate(const ComplexVec& y, const Modem& m) {
    ComplexVec out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = m.map_symbol(y[i]);
    return out;
}

ComplexVec transmit(const ComplexVec& z, const ChannelConfig& ch, Rng& rng) {
    if (ch.noiseless) return z;
    const ComplexVec noise = sample_complex_gaussian(rng, z.size(), ch.noise_variance());
    ComplexVec out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] + noise[i];
    return out;
}

ComplexVec demodulate(const ComplexVec& z_hat, const Modem& m) {
    return modulate(z_hat, m);
}

void write_trace_csv(const std::filesystem::path& path, const ComplexVec& y,
                     const ComplexVec& z, const ComplexVec& z_hat,
                     const ComplexVec& y_hat) {
    if (y.size() != z.size() || z.size() != z_hat.size() || z_hat.size() != y_hat.size()) {
        throw std::invalid_argument("write_trace_csv: length mismatch");
    }
    std::ostringstream out;
    out << "index,y_re,y_im,z_re,z_im,zhat_re,zhat_im,yhat_re,yhat_im\n";
    for (std::size_t i = 0; i < y.size(); ++i) {
        out << i << "," << format_double(y[i].real()) << "," << format_double(y[i].imag())
            << "," << format_double(z[i].real()) << "," << format_double(z[i].imag()) << ","
            << format_double(z_hat[i].real()) << "," << format_double(z_hat[i].imag()) << ","
            << format_double(y_hat[i].real()) << "," << format_double(y_hat[i].imag())
            << "\n";
    }
    atomic_write(path, out.str());
}

}  // namespace idmc
