#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "idmc/complex_vec.hpp"
#include "idmc/rng.hpp"

namespace idmc {

// Finite constellation set shared by modulator and demodulator. Index order
// is stable; serialization round-trips preserve it.
struct Constellation {
    ComplexVec points;

    int order() const { return static_cast<int>(points.size()); }
};

// Index of the nearest constellation point by squared Euclidean distance,
// ties broken by lowest index.
std::size_t assign(cplx s, const Constellation& c);

// Smallest pairwise distance between constellation points.
double min_pairwise_distance(const Constellation& c);

struct FitResult {
    Constellation constellation;
    bool converged = false;
    int iterations = 0;
    // Within-cluster sum of squared distances at the returned state.
    double objective = 0.0;
};

// Lloyd iteration over 2-D complex samples. Initialization draws `order`
// distinct sample points uniformly without replacement (k-means++ optional).
// An emptied cluster is reseated at the sample farthest from its centroid.
// Deterministic given rng. Throws when fewer than `order` distinct samples
// exist; non-convergence within max_iters returns converged = false.
FitResult fit(const ComplexVec& samples, int order, Rng& rng, int max_iters = 300,
              bool kmeans_pp = false);

// Lloyd iteration from explicit initial centroids.
FitResult fit_from(const ComplexVec& samples, ComplexVec initial_centroids,
                   int max_iters = 300);

// Text file: header "M=<order>", then one "index,re,im" line per point with
// round-trip decimal precision.
void save_constellation(const std::filesystem::path& path, const Constellation& c);
Constellation load_constellation(const std::filesystem::path& path);

}  // namespace idmc
