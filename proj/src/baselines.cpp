#include "hotspot/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace hotspot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double dist2(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        d += diff * diff;
    }
    return d;
}

} // namespace

SampleDistribution SampleDistribution::from_counts(int sample_id, const Location& loc,
                                                   std::vector<long long> counts) {
    long long total = 0;
    for (long long c : counts) {
        if (c < 0) throw std::invalid_argument("sample counts must be nonnegative");
        total += c;
    }
    if (total == 0) throw std::invalid_argument("sample with all-zero counts");
    SampleDistribution s;
    s.sample_id = sample_id;
    s.location = loc;
    s.rel_abundance.resize(counts.size());
    for (std::size_t v = 0; v < counts.size(); ++v)
        s.rel_abundance[v] = static_cast<double>(counts[v]) / static_cast<double>(total);
    s.counts = std::move(counts);
    return s;
}

std::optional<std::vector<double>> masked_abundance(const SampleDistribution& s, int v_star) {
    if (v_star < 0 || v_star >= s.num_classes())
        throw std::invalid_argument("taxon id out of range");
    double rest = 0.0;
    for (int v = 0; v < s.num_classes(); ++v)
        if (v != v_star) rest += s.rel_abundance[v];
    if (rest <= 0.0) return std::nullopt;
    std::vector<double> out(static_cast<std::size_t>(s.num_classes() - 1));
    for (int v = 0, j = 0; v < s.num_classes(); ++v)
        if (v != v_star) out[j++] = s.rel_abundance[v] / rest;
    return out;
}

double masked_distance(const SampleDistribution& a, const SampleDistribution& b, int v_star) {
    if (a.num_classes() != b.num_classes())
        throw std::invalid_argument("masked_distance: class count mismatch");
    const auto ma = masked_abundance(a, v_star);
    const auto mb = masked_abundance(b, v_star);
    if (!ma || !mb) return kInf;
    return std::sqrt(dist2(*ma, *mb));
}

namespace {

// Nearest training sample by masked squared distance; ties by earliest
// time, then lowest index. Shared by the single and batch entry points.
std::size_t nearest_train(const std::vector<SampleDistribution>& train,
                          const std::vector<std::optional<std::vector<double>>>& masked_train,
                          const std::optional<std::vector<double>>& masked_test) {
    std::size_t best = 0;
    double best_d2 = kInf;
    double best_time = kInf;
    bool found = false;
    for (std::size_t j = 0; j < train.size(); ++j) {
        const double d2 =
            (masked_test && masked_train[j]) ? dist2(*masked_test, *masked_train[j]) : kInf;
        const double t = train[j].location.time_s;
        if (!found || d2 < best_d2 || (d2 == best_d2 && t < best_time)) {
            best = j;
            best_d2 = d2;
            best_time = t;
            found = true;
        }
    }
    return best;
}

std::vector<std::optional<std::vector<double>>>
mask_all(const std::vector<SampleDistribution>& samples, int v_star) {
    std::vector<std::optional<std::vector<double>>> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(masked_abundance(s, v_star));
    return out;
}

} // namespace

double nn_predict(const std::vector<SampleDistribution>& train, const SampleDistribution& test,
                  int v_star) {
    if (train.empty()) throw std::invalid_argument("nn_predict: empty training set");
    const auto masked_train = mask_all(train, v_star);
    const std::size_t j = nearest_train(train, masked_train, masked_abundance(test, v_star));
    return train[j].rel_abundance[v_star];
}

namespace {

std::vector<double> nn_batch_impl(const std::vector<SampleDistribution>& train,
                                  const std::vector<SampleDistribution>& test, int v_star,
                                  bool parallel) {
    if (train.empty()) throw std::invalid_argument("nn_predict: empty training set");
    const auto masked_train = mask_all(train, v_star);
    const auto masked_test = mask_all(test, v_star);
    std::vector<double> out(test.size());
#pragma omp parallel for schedule(static) if (parallel)
    for (std::size_t i = 0; i < test.size(); ++i) {
        const std::size_t j = nearest_train(train, masked_train, masked_test[i]);
        out[i] = train[j].rel_abundance[v_star];
    }
    return out;
}

} // namespace

std::vector<double> nn_predict_batch(const std::vector<SampleDistribution>& train,
                                     const std::vector<SampleDistribution>& test, int v_star) {
    return nn_batch_impl(train, test, v_star, true);
}

std::vector<double> nn_predict_batch_serial(const std::vector<SampleDistribution>& train,
                                            const std::vector<SampleDistribution>& test,
                                            int v_star) {
    return nn_batch_impl(train, test, v_star, false);
}

CentroidSet centroids_at_points(const std::vector<SampleDistribution>& train, int v_star) {
    CentroidSet cs;
    cs.v_star = v_star;
    for (const auto& s : train) {
        auto masked = masked_abundance(s, v_star);
        if (!masked) continue;
        cs.coords.push_back(std::move(*masked));
        cs.target_abundance.push_back(s.rel_abundance[v_star]);
    }
    return cs;
}

namespace {

struct Assignment {
    std::vector<int> cluster;
    std::vector<double> d2;
    double sse = 0.0;
};

Assignment assign_points(const std::vector<std::vector<double>>& points,
                         const std::vector<std::vector<double>>& centroids, bool parallel) {
    Assignment a;
    a.cluster.resize(points.size());
    a.d2.resize(points.size());
#pragma omp parallel for schedule(static) if (parallel)
    for (std::size_t i = 0; i < points.size(); ++i) {
        int best = 0;
        double best_d2 = kInf;
        for (std::size_t j = 0; j < centroids.size(); ++j) {
            const double d = dist2(points[i], centroids[j]);
            if (d < best_d2) {
                best_d2 = d;
                best = static_cast<int>(j);
            }
        }
        a.cluster[i] = best;
        a.d2[i] = best_d2;
    }
    // Serial sum keeps the result independent of the thread count.
    for (double d : a.d2) a.sse += d;
    return a;
}

std::vector<std::vector<double>> kmeanspp_seed(const std::vector<std::vector<double>>& points,
                                               int k, Rng& rng) {
    std::vector<std::vector<double>> centroids;
    centroids.reserve(static_cast<std::size_t>(k));
    std::uniform_int_distribution<std::size_t> first(0, points.size() - 1);
    centroids.push_back(points[first(rng)]);
    std::vector<double> d2(points.size());
    while (static_cast<int>(centroids.size()) < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            double best = kInf;
            for (const auto& c : centroids) best = std::min(best, dist2(points[i], c));
            d2[i] = best;
            total += best;
        }
        std::size_t pick;
        if (total > 0.0) {
            pick = static_cast<std::size_t>(sample_discrete(d2, rng));
        } else {
            // All remaining mass on duplicates of chosen centroids.
            pick = first(rng);
        }
        centroids.push_back(points[pick]);
    }
    return centroids;
}

} // namespace

KMeansResult kmeans_fit_detailed(const std::vector<SampleDistribution>& train, int k, int v_star,
                                 Rng& rng, int n_restarts, bool parallel) {
    if (k < 1) throw std::invalid_argument("kmeans_fit: k must be >= 1");
    if (n_restarts < 1) throw std::invalid_argument("kmeans_fit: n_restarts must be >= 1");

    std::vector<std::vector<double>> points;
    std::vector<std::size_t> origin; // index into train
    for (std::size_t i = 0; i < train.size(); ++i) {
        auto masked = masked_abundance(train[i], v_star);
        if (!masked) continue;
        points.push_back(std::move(*masked));
        origin.push_back(i);
    }
    if (static_cast<std::size_t>(k) > points.size())
        throw std::invalid_argument("kmeans_fit: k exceeds usable training samples");

    constexpr int kMaxIterations = 300;
    KMeansResult best;
    bool have_best = false;

    for (int restart = 0; restart < n_restarts; ++restart) {
        auto centroids = kmeanspp_seed(points, k, rng);
        std::vector<int> prev;
        std::vector<double> trace;
        Assignment a;
        int iter = 0;
        for (; iter < kMaxIterations; ++iter) {
            a = assign_points(points, centroids, parallel);
            trace.push_back(a.sse);
            if (a.cluster == prev) break;
            prev = a.cluster;

            std::vector<std::vector<double>> sums(
                static_cast<std::size_t>(k),
                std::vector<double>(points.front().size(), 0.0));
            std::vector<long long> members(static_cast<std::size_t>(k), 0);
            for (std::size_t i = 0; i < points.size(); ++i) {
                members[a.cluster[i]]++;
                auto& s = sums[a.cluster[i]];
                for (std::size_t d = 0; d < s.size(); ++d) s[d] += points[i][d];
            }
            std::vector<bool> claimed(points.size(), false);
            for (int j = 0; j < k; ++j) {
                if (members[j] > 0) {
                    for (std::size_t d = 0; d < sums[j].size(); ++d)
                        centroids[j][d] = sums[j][d] / static_cast<double>(members[j]);
                } else {
                    // Reseed an empty cluster from the farthest point.
                    std::size_t far = 0;
                    double far_d2 = -1.0;
                    for (std::size_t i = 0; i < points.size(); ++i) {
                        if (claimed[i]) continue;
                        if (a.d2[i] > far_d2) {
                            far_d2 = a.d2[i];
                            far = i;
                        }
                    }
                    claimed[far] = true;
                    centroids[j] = points[far];
                }
            }
        }

        if (!have_best || a.sse < best.sse) {
            have_best = true;
            best.sse = a.sse;
            best.sse_trace = std::move(trace);
            best.iterations = iter;
            best.centroids.v_star = v_star;
            best.centroids.coords = std::move(centroids);
            best.centroids.target_abundance.assign(static_cast<std::size_t>(k), 0.0);
            std::vector<long long> members(static_cast<std::size_t>(k), 0);
            for (std::size_t i = 0; i < points.size(); ++i) {
                members[a.cluster[i]]++;
                best.centroids.target_abundance[a.cluster[i]] +=
                    train[origin[i]].rel_abundance[v_star];
            }
            for (int j = 0; j < k; ++j)
                if (members[j] > 0)
                    best.centroids.target_abundance[j] /= static_cast<double>(members[j]);
        }
    }
    return best;
}

CentroidSet kmeans_fit(const std::vector<SampleDistribution>& train, int k, int v_star, Rng& rng,
                       int n_restarts) {
    return kmeans_fit_detailed(train, k, v_star, rng, n_restarts, true).centroids;
}

double kmeans_predict(const CentroidSet& cs, const SampleDistribution& test, int v_star) {
    if (cs.coords.empty()) throw std::invalid_argument("kmeans_predict: empty centroid set");
    if (cs.v_star != v_star)
        throw std::invalid_argument("kmeans_predict: centroid set built for a different target");
    const auto masked = masked_abundance(test, v_star);
    std::size_t best = 0;
    double best_d2 = kInf;
    bool found = false;
    for (std::size_t j = 0; j < cs.coords.size(); ++j) {
        const double d2 = masked ? dist2(*masked, cs.coords[j]) : kInf;
        if (!found || d2 < best_d2) {
            best = j;
            best_d2 = d2;
            found = true;
        }
    }
    return cs.target_abundance[best];
}

std::vector<double> kmeans_predict_batch(const CentroidSet& cs,
                                         const std::vector<SampleDistribution>& test, int v_star) {
    std::vector<double> out(test.size());
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < test.size(); ++i) out[i] = kmeans_predict(cs, test[i], v_star);
    return out;
}

} // namespace hotspot
