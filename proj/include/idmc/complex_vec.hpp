#pragma once

#include <complex>
#include <vector>

#include "idmc/rng.hpp"

namespace idmc {

using cplx = std::complex<double>;
using ComplexVec = std::vector<cplx>;

// (1/k) * sum |v_i|^2, accumulated in double. Throws on empty input.
double average_power(const ComplexVec& v);

// Circularly symmetric complex Gaussian CN(0, variance * I): real and
// imaginary parts are independent N(0, variance / 2). Throws on negative
// variance.
ComplexVec sample_complex_gaussian(Rng& rng, std::size_t k, double variance);

}  // namespace idmc
