#pragma once

namespace idmc {

// Uniform grid quantizer with a trainable step size d. The per-axis code set
// is the consecutive integers {b_n, ..., b_p}, scaled by d.
struct UniformQuantizer {
    double d = 1.0;
    int b_n = -1;
    int b_p = 0;

    bool valid() const { return d > 0.0 && b_n < b_p; }
};

// clip(s/d, b_n, b_p), rounded to the nearest integer (ties away from zero),
// times d. Throws if s is not finite.
double quantize(double s, const UniformQuantizer& q);

// Exact derivative of the quantizer output with respect to d:
//   round(s/d) - s/d   if b_n < s/d < b_p,
//   clip(s/d, b_n, b_p) otherwise.
double grad_wrt_distance(double s, const UniformQuantizer& q);

// Straight-through input factor: 1 inside [b_n, b_p] (boundary inclusive),
// 0 strictly outside.
double grad_wrt_input(double s, const UniformQuantizer& q);

// Per-axis code bounds for square QAM of order M: L = sqrt(M) levels,
// b_n = -floor(L/2), b_p = ceil(L/2) - 1. Throws unless M is a perfect
// square >= 4.
UniformQuantizer grid_for_order(int order);

}  // namespace idmc
