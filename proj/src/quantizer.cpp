#include "idmc/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace idmc {

namespace {

double clip_code(double u, const UniformQuantizer& q) {
    return std::clamp(u, static_cast<double>(q.b_n), static_cast<double>(q.b_p));
}

}  // namespace

double quantize(double s, const UniformQuantizer& q) {
    if (!std::isfinite(s)) throw std::invalid_argument("quantize: non-finite input");
    // std::round ties away from zero, the documented tie-break rule.
    return std::round(clip_code(s / q.d, q)) * q.d;
}

double grad_wrt_distance(double s, const UniformQuantizer& q) {
    const double u = s / q.d;
    if (u > q.b_n && u < q.b_p) return std::round(u) - u;
    return clip_code(u, q);
}

double grad_wrt_input(double s, const UniformQuantizer& q) {
    const double u = s / q.d;
    return (u >= q.b_n && u <= q.b_p) ? 1.0 : 0.0;
}

UniformQuantizer grid_for_order(int order) {
    if (order < 4) throw std::invalid_argument("grid_for_order: order must be >= 4");
    const int levels = static_cast<int>(std::lround(std::sqrt(static_cast<double>(order))));
    if (levels * levels != order) {
        throw std::invalid_argument("grid_for_order: order must be a perfect square");
    }
    UniformQuantizer q;
    q.d = 1.0;
    q.b_n = -(levels / 2);
    q.b_p = (levels + 1) / 2 - 1;
    return q;
}

}  // namespace idmc
