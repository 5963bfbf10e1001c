#include "floorloc/kmeans.hpp"

#include <algorithm>
#include <cstring>
#include <limits>
#include <string_view>
#include <unordered_map>

#include "floorloc/detail/dist.hpp"
#include "floorloc/rng.hpp"

namespace floorloc {
namespace {

// Bitwise view of a row, usable as a hash key.
std::string_view row_bytes(const DenseMatrix& m, std::size_t i) {
    return std::string_view(reinterpret_cast<const char*>(m.row(i).data()),
                            m.cols * sizeof(double));
}

// Maps each row to the index of its first bitwise-identical occurrence.
std::vector<std::size_t> first_occurrence(const DenseMatrix& points) {
    std::unordered_map<std::string_view, std::size_t> seen;
    seen.reserve(points.rows);
    std::vector<std::size_t> rep(points.rows);
    for (std::size_t i = 0; i < points.rows; ++i) {
        auto [it, inserted] = seen.emplace(row_bytes(points, i), i);
        rep[i] = it->second;
    }
    return rep;
}

// Assignment step: nearest centroid per point (ties to the lower index).
// Returns the summed min distances, the per-point best distance, and the
// per-cluster sizes.
double assign_points(const DenseMatrix& points, const DenseMatrix& centroids,
                     std::vector<std::size_t>& assignment, std::vector<double>& best_dist,
                     std::vector<std::size_t>& sizes) {
    const std::size_t n = points.rows;
    const std::size_t k = centroids.rows;
    const std::size_t dim = points.cols;
    assignment.resize(n);
    best_dist.resize(n);
    sizes.assign(k, 0);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double* p = points.row(i).data();
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_k = 0;
        for (std::size_t c = 0; c < k; ++c) {
            const double d = detail::sq_dist(p, centroids.row(c).data(), dim);
            if (d < best) {
                best = d;
                best_k = c;
            }
        }
        assignment[i] = best_k;
        best_dist[i] = best;
        ++sizes[best_k];
        total += best;
    }
    return total;
}

// Give every empty cluster the point currently farthest from its own
// centroid, never draining a cluster below one member. Keeps k exact.
void repair_empty_clusters(std::vector<std::size_t>& assignment, std::vector<double>& best_dist,
                           std::vector<std::size_t>& sizes) {
    for (std::size_t e = 0; e < sizes.size(); ++e) {
        if (sizes[e] != 0) continue;
        double far = -1.0;
        std::size_t victim = assignment.size();
        for (std::size_t i = 0; i < assignment.size(); ++i) {
            if (sizes[assignment[i]] < 2) continue;
            if (best_dist[i] > far) {
                far = best_dist[i];
                victim = i;
            }
        }
        if (victim == assignment.size()) continue;  // k > n cannot reach here
        --sizes[assignment[victim]];
        assignment[victim] = e;
        sizes[e] = 1;
        best_dist[victim] = 0.0;  // now defines its own cluster
    }
}

// Centroid update: per-cluster means accumulated in point-index order.
void update_centroids(const DenseMatrix& points, const std::vector<std::size_t>& assignment,
                      const std::vector<std::size_t>& sizes, DenseMatrix& centroids) {
    std::fill(centroids.data.begin(), centroids.data.end(), 0.0);
    const std::size_t dim = points.cols;
    for (std::size_t i = 0; i < points.rows; ++i) {
        const double* p = points.row(i).data();
        double* c = centroids.row(assignment[i]).data();
        for (std::size_t d = 0; d < dim; ++d) c[d] += p[d];
    }
    for (std::size_t c = 0; c < centroids.rows; ++c) {
        const double inv = 1.0 / static_cast<double>(sizes[c]);
        double* row = centroids.row(c).data();
        for (std::size_t d = 0; d < dim; ++d) row[d] *= inv;
    }
}

DenseMatrix init_kmeanspp(const DenseMatrix& points, std::size_t k, Rng& rng) {
    const std::size_t n = points.rows;
    const std::size_t dim = points.cols;
    DenseMatrix centroids = DenseMatrix::zeros(k, dim);
    std::vector<double> d2(n);

    std::size_t pick = static_cast<std::size_t>(rng.below(n));
    std::copy_n(points.row(pick).data(), dim, centroids.row(0).data());
    for (std::size_t i = 0; i < n; ++i) {
        d2[i] = detail::sq_dist(points.row(i).data(), centroids.row(0).data(), dim);
    }

    for (std::size_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (double v : d2) total += v;
        if (total > 0.0) {
            const double r = rng.uniform() * total;
            double acc = 0.0;
            pick = n;  // falls through to the last positive-mass point below
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc > r) {
                    pick = i;
                    break;
                }
            }
            if (pick == n) {
                for (std::size_t i = n; i-- > 0;) {
                    if (d2[i] > 0.0) {
                        pick = i;
                        break;
                    }
                }
            }
        } else {
            pick = static_cast<std::size_t>(rng.below(n));
        }
        std::copy_n(points.row(pick).data(), dim, centroids.row(c).data());
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], detail::sq_dist(points.row(i).data(),
                                                    centroids.row(c).data(), dim));
        }
    }
    return centroids;
}

DenseMatrix init_random_points(const DenseMatrix& points, std::size_t k, Rng& rng) {
    const std::size_t n = points.rows;
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(order[i], order[j]);
    }
    DenseMatrix centroids = DenseMatrix::zeros(k, points.cols);
    for (std::size_t c = 0; c < k; ++c) {
        std::copy_n(points.row(order[c]).data(), points.cols, centroids.row(c).data());
    }
    return centroids;
}

KmeansResult saturated_result(const DenseMatrix& points) {
    const auto rep = first_occurrence(points);
    KmeansResult res;
    res.saturated = true;
    std::vector<std::size_t> distinct_index(points.rows, points.rows);
    std::size_t n_distinct = 0;
    for (std::size_t i = 0; i < points.rows; ++i) {
        if (rep[i] == i) distinct_index[i] = n_distinct++;
    }
    res.centroids = DenseMatrix::zeros(n_distinct, points.cols);
    res.assignment.resize(points.rows);
    std::size_t c = 0;
    for (std::size_t i = 0; i < points.rows; ++i) {
        if (rep[i] == i) {
            std::copy_n(points.row(i).data(), points.cols, res.centroids.row(c).data());
            ++c;
        }
        res.assignment[i] = distinct_index[rep[i]];
    }
    res.objective = 0.0;
    res.iters_run = 0;
    return res;
}

}  // namespace

double wcss(const DenseMatrix& points, const std::vector<std::size_t>& assignment,
            const DenseMatrix& centroids) {
    if (assignment.size() != points.rows) throw LengthMismatch("assignment length != point count");
    double total = 0.0;
    for (std::size_t i = 0; i < points.rows; ++i) {
        total += detail::sq_dist(points.row(i).data(), centroids.row(assignment[i]).data(),
                                 points.cols);
    }
    return total;
}

std::size_t distinct_rows(const DenseMatrix& points) {
    const auto rep = first_occurrence(points);
    std::size_t n = 0;
    for (std::size_t i = 0; i < rep.size(); ++i) {
        if (rep[i] == i) ++n;
    }
    return n;
}

KmeansResult lloyd_from(const DenseMatrix& points, const DenseMatrix& init_centroids,
                        const KmeansConfig& cfg) {
    if (init_centroids.cols != points.cols) throw LengthMismatch("centroid dim != point dim");
    if (init_centroids.rows == 0 || init_centroids.rows > points.rows) {
        throw KTooLarge("k=" + std::to_string(init_centroids.rows) + " for " +
                        std::to_string(points.rows) + " points");
    }

    KmeansResult res;
    res.centroids = init_centroids;
    std::vector<double> best_dist;
    std::vector<std::size_t> sizes;
    std::vector<std::size_t> prev_assignment;
    double prev_obj = std::numeric_limits<double>::infinity();

    for (std::size_t iter = 1; iter <= cfg.max_iters; ++iter) {
        const double obj = assign_points(points, res.centroids, res.assignment, best_dist, sizes);
        res.objective_trace.push_back(obj);
        res.iters_run = iter;
        repair_empty_clusters(res.assignment, best_dist, sizes);
        update_centroids(points, res.assignment, sizes, res.centroids);
        if (obj == 0.0) break;
        if (res.assignment == prev_assignment) break;
        if (iter > 1 && prev_obj - obj <= cfg.rel_tol * prev_obj) break;
        prev_obj = obj;
        prev_assignment = res.assignment;
    }
    res.objective = wcss(points, res.assignment, res.centroids);
    return res;
}

KmeansResult kmeans(const DenseMatrix& points, const KmeansConfig& cfg) {
    if (points.rows == 0) throw Error("kmeans: no points");
    if (cfg.k == 0) throw ConfigError("kmeans: k must be >= 1");
    if (cfg.k > points.rows) {
        throw KTooLarge("k=" + std::to_string(cfg.k) + " for " + std::to_string(points.rows) +
                        " points");
    }
    if (cfg.k >= distinct_rows(points)) {
        return saturated_result(points);
    }

    KmeansResult best;
    bool have = false;
    const std::size_t restarts = std::max<std::size_t>(1, cfg.n_restarts);
    for (std::size_t r = 0; r < restarts; ++r) {
        Rng rng(cfg.seed + r);
        DenseMatrix init = cfg.init == KmeansInit::KmeansPlusPlus
                               ? init_kmeanspp(points, cfg.k, rng)
                               : init_random_points(points, cfg.k, rng);
        KmeansResult res = lloyd_from(points, init, cfg);
        if (!have || res.objective < best.objective) {
            best = std::move(res);
            have = true;
        }
    }
    return best;
}

}  // namespace floorloc
