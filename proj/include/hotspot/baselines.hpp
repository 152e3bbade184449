#pragma once

#include "hotspot/grid.hpp"
#include "hotspot/random.hpp"

#include <optional>
#include <vector>

namespace hotspot {

// One sample location's taxon counts and their normalization.
struct SampleDistribution {
    int sample_id = 0;
    Location location;
    std::vector<long long> counts;
    std::vector<double> rel_abundance;

    // Rejects all-zero or negative counts.
    static SampleDistribution from_counts(int sample_id, const Location& loc,
                                          std::vector<long long> counts);
    int num_classes() const { return static_cast<int>(counts.size()); }
};

// Relative abundances with index v_star removed and the rest renormalized
// to sum 1. Empty when the sample contained only v_star.
std::optional<std::vector<double>> masked_abundance(const SampleDistribution& s, int v_star);

// Euclidean distance between the two masked, renormalized abundance
// vectors; +inf when either sample contained only v_star.
double masked_distance(const SampleDistribution& a, const SampleDistribution& b, int v_star);

// Target abundance of the masked-distance-nearest training sample. Ties go
// to the earliest sample time, then lowest index.
double nn_predict(const std::vector<SampleDistribution>& train, const SampleDistribution& test,
                  int v_star);

// Batch form, parallel over test samples; identical per-sample results.
std::vector<double> nn_predict_batch(const std::vector<SampleDistribution>& train,
                                     const std::vector<SampleDistribution>& test, int v_star);
std::vector<double> nn_predict_batch_serial(const std::vector<SampleDistribution>& train,
                                            const std::vector<SampleDistribution>& test,
                                            int v_star);

// Centroids over the masked V-1 dimensional simplex, each carrying the mean
// target abundance of its assigned training samples.
struct CentroidSet {
    int v_star = 0;
    std::vector<std::vector<double>> coords;
    std::vector<double> target_abundance;

    int size() const { return static_cast<int>(coords.size()); }
};

// One centroid per training sample, in order (the K = N limit; no Lloyd
// iterations). Samples containing only v_star are skipped. Assumes train is
// time-ordered.
CentroidSet centroids_at_points(const std::vector<SampleDistribution>& train, int v_star);

struct KMeansResult {
    CentroidSet centroids;
    double sse = 0.0;
    std::vector<double> sse_trace; // per Lloyd assignment, best restart
    int iterations = 0;
};

// Lloyd's algorithm with k-means++ seeding over the masked vectors, best of
// n_restarts by SSE. Stops when assignments repeat or after 300 iterations;
// an emptied cluster is reseeded from the farthest point.
KMeansResult kmeans_fit_detailed(const std::vector<SampleDistribution>& train, int k, int v_star,
                                 Rng& rng, int n_restarts, bool parallel);

CentroidSet kmeans_fit(const std::vector<SampleDistribution>& train, int k, int v_star, Rng& rng,
                       int n_restarts = 10);

// Stored target abundance of the nearest centroid; ties go to the lowest
// centroid index.
double kmeans_predict(const CentroidSet& cs, const SampleDistribution& test, int v_star);

std::vector<double> kmeans_predict_batch(const CentroidSet& cs,
                                         const std::vector<SampleDistribution>& test, int v_star);

} // namespace hotspot
