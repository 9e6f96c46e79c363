#include "idmc/complex_vec.hpp"

#include <cmath>
#include <stdexcept>

namespace idmc {

double average_power(const ComplexVec& v) {
    if (v.empty()) throw std::invalid_argument("average_power: empty vector");
    double acc = 0.0;
    for (const cplx& x : v) acc += std::norm(x);
    return acc / static_cast<double>(v.size());
}

ComplexVec sample_complex_gaussian(Rng& rng, std::size_t k, double variance) {
    if (variance < 0.0) {
        throw std::invalid_argument("sample_complex_gaussian: negative variance");
    }
    const double scale = std::sqrt(variance / 2.0);
    ComplexVec out(k);
    for (cplx& x : out) {
        x = cplx(scale * rng.next_normal(), scale * rng.next_normal());
    }
    return out;
}

}  // namespace idmc
