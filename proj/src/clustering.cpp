#include "idmc/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "idmc/io.hpp"

namespace idmc {

std::size_t assign(cplx s, const Constellation& c) {
    if (c.points.empty()) throw std::invalid_argument("assign: empty constellation");
    std::size_t best = 0;
    double best_dist = std::norm(c.points[0] - s);
    for (std::size_t j = 1; j < c.points.size(); ++j) {
        const double dist = std::norm(c.points[j] - s);
        if (dist < best_dist) {
            best_dist = dist;
            best = j;
        }
    }
    return best;
}

double min_pairwise_distance(const Constellation& c) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < c.points.size(); ++i) {
        for (std::size_t j = i + 1; j < c.points.size(); ++j) {
            best = std::min(best, std::abs(c.points[i] - c.points[j]));
        }
    }
    return best;
}

namespace {

ComplexVec init_uniform(const ComplexVec& samples, int order, Rng& rng) {
    // Uniform without replacement over sample indices, skipping points equal
    // to one already chosen so centroids start distinct.
    std::vector<std::size_t> pool(samples.size());
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
    ComplexVec centroids;
    centroids.reserve(static_cast<std::size_t>(order));
    while (static_cast<int>(centroids.size()) < order && !pool.empty()) {
        const std::size_t pick = rng.next_below(pool.size());
        const cplx candidate = samples[pool[pick]];
        pool[pick] = pool.back();
        pool.pop_back();
        if (std::find(centroids.begin(), centroids.end(), candidate) == centroids.end()) {
            centroids.push_back(candidate);
        }
    }
    if (static_cast<int>(centroids.size()) < order) {
        throw std::invalid_argument("fit: fewer distinct samples than requested order");
    }
    return centroids;
}

ComplexVec init_kmeans_pp(const ComplexVec& samples, int order, Rng& rng) {
    ComplexVec centroids;
    centroids.push_back(samples[rng.next_below(samples.size())]);
    std::vector<double> dist(samples.size());
    while (static_cast<int>(centroids.size()) < order) {
        double total = 0.0;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const cplx& c : centroids) best = std::min(best, std::norm(samples[i] - c));
            dist[i] = best;
            total += best;
        }
        if (total <= 0.0) {
            throw std::invalid_argument("fit: fewer distinct samples than requested order");
        }
        double target = rng.next_uniform() * total;
        std::size_t pick = samples.size() - 1;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            target -= dist[i];
            if (target <= 0.0) {
                pick = i;
                break;
            }
        }
        centroids.push_back(samples[pick]);
    }
    return centroids;
}

}  // namespace

FitResult fit(const ComplexVec& samples, int order, Rng& rng, int max_iters,
              bool kmeans_pp) {
    if (order < 2) throw std::invalid_argument("fit: order must be >= 2");
    if (samples.size() < static_cast<std::size_t>(order)) {
        throw std::invalid_argument("fit: need at least `order` samples");
    }
    for (const cplx& s : samples) {
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
            throw std::invalid_argument("fit: non-finite sample");
        }
    }

    ComplexVec centroids =
        kmeans_pp ? init_kmeans_pp(samples, order, rng) : init_uniform(samples, order, rng);
    return fit_from(samples, std::move(centroids), max_iters);
}

FitResult fit_from(const ComplexVec& samples, ComplexVec initial_centroids, int max_iters) {
    Constellation current{std::move(initial_centroids)};
    std::vector<std::size_t> labels(samples.size());
    double prev_objective = std::numeric_limits<double>::infinity();

    FitResult result;
    for (int iter = 0; iter < max_iters; ++iter) {
        double objective = 0.0;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            labels[i] = assign(samples[i], current);
            objective += std::norm(current.points[labels[i]] - samples[i]);
        }
        // Lloyd's iteration never increases the objective; a rise would mean
        // a broken update step.
        if (objective > prev_objective + 1e-9 * std::max(1.0, prev_objective)) {
            throw std::runtime_error("fit: objective increased");
        }
        prev_objective = objective;
        result.objective = objective;
        result.iterations = iter + 1;

        // Centroid update: mean of assigned samples.
        ComplexVec sums(current.points.size(), cplx(0.0, 0.0));
        std::vector<std::size_t> counts(current.points.size(), 0);
        for (std::size_t i = 0; i < samples.size(); ++i) {
            sums[labels[i]] += samples[i];
            ++counts[labels[i]];
        }
        ComplexVec next(current.points.size());
        for (std::size_t j = 0; j < next.size(); ++j) {
            if (counts[j] > 0) {
                next[j] = sums[j] / static_cast<double>(counts[j]);
            } else {
                // Reseat an emptied cluster at the sample farthest from its
                // current centroid.
                std::size_t far_idx = 0;
                double far_dist = -1.0;
                for (std::size_t i = 0; i < samples.size(); ++i) {
                    const double dist = std::norm(samples[i] - current.points[j]);
                    if (dist > far_dist) {
                        far_dist = dist;
                        far_idx = i;
                    }
                }
                next[j] = samples[far_idx];
            }
        }

        bool stable = true;
        Constellation updated{next};
        for (std::size_t i = 0; i < samples.size(); ++i) {
            if (assign(samples[i], updated) != labels[i]) {
                stable = false;
                break;
            }
        }
        current = updated;
        if (stable) {
            // Recompute the objective at the converged state.
            double final_objective = 0.0;
            for (std::size_t i = 0; i < samples.size(); ++i) {
                final_objective += std::norm(current.points[assign(samples[i], current)] - samples[i]);
            }
            result.objective = final_objective;
            result.converged = true;
            break;
        }
    }
    result.constellation = current;
    return result;
}

void save_constellation(const std::filesystem::path& path, const Constellation& c) {
    std::ostringstream out;
    out << "M=" << c.order() << "\n";
    for (std::size_t j = 0; j < c.points.size(); ++j) {
        out << j << "," << format_double(c.points[j].real()) << ","
            << format_double(c.points[j].imag()) << "\n";
    }
    atomic_write(path, out.str());
}

Constellation load_constellation(const std::filesystem::path& path) {
    std::istringstream in(read_file(path));
    std::string line;
    if (!std::getline(in, line) || line.rfind("M=", 0) != 0) {
        throw std::runtime_error("load_constellation: missing M= header in " + path.string());
    }
    const int order = std::stoi(line.substr(2));
    Constellation c;
    c.points.resize(static_cast<std::size_t>(order));
    int seen = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::size_t p1 = line.find(',');
        std::size_t p2 = line.find(',', p1 + 1);
        if (p1 == std::string::npos || p2 == std::string::npos) {
            throw std::runtime_error("load_constellation: malformed line: " + line);
        }
        const std::size_t idx = std::stoul(line.substr(0, p1));
        if (idx >= c.points.size()) {
            throw std::runtime_error("load_constellation: index out of range: " + line);
        }
        c.points[idx] = cplx(std::stod(line.substr(p1 + 1, p2 - p1 - 1)),
                             std::stod(line.substr(p2 + 1)));
        ++seen;
    }
    if (seen != order) throw std::runtime_error("load_constellation: point count mismatch");
    return c;
}

}  // namespace idmc
