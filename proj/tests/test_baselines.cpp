#include "hotspot/baselines.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numeric>
#include <random>

using namespace hotspot;

namespace {

SampleDistribution sample(int id, double time, std::vector<long long> counts) {
    return SampleDistribution::from_counts(id, {time, time * 100.0, 0.0}, std::move(counts));
}

// Random samples with strictly increasing times and at least one non-target
// count each.
std::vector<SampleDistribution> random_samples(Rng& rng, int n, int vocab, int v_star) {
    std::vector<SampleDistribution> out;
    std::uniform_int_distribution<long long> count(0, 20);
    std::uniform_int_distribution<int> other(0, vocab - 1);
    for (int i = 0; i < n; ++i) {
        std::vector<long long> counts(vocab);
        for (auto& c : counts) c = count(rng);
        counts[v_star] = count(rng);
        int fallback = other(rng);
        if (fallback == v_star) fallback = (fallback + 1) % vocab;
        long long rest = 0;
        for (int v = 0; v < vocab; ++v)
            if (v != v_star) rest += counts[v];
        if (rest == 0) counts[fallback] = 1;
        out.push_back(sample(i, static_cast<double>(i), std::move(counts)));
    }
    return out;
}

} // namespace

TEST_CASE("SampleDistribution rejects degenerate counts") {
    CHECK_THROWS_AS(sample(0, 0.0, {0, 0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(sample(0, 0.0, {1, -1, 0}), std::invalid_argument);
    const auto s = sample(0, 0.0, {1, 3, 0});
    CHECK(s.rel_abundance[0] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(s.rel_abundance[1] == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("masked_distance examples") {
    const auto a = sample(0, 0.0, {1, 1, 5});
    const auto b = sample(1, 1.0, {2, 2, 0});
    CHECK(masked_distance(a, a, 2) == 0.0);
    CHECK(masked_distance(a, b, 2) == 0.0); // target column masked out

    const auto e0 = sample(0, 0.0, {1, 0, 3});
    const auto e1 = sample(1, 1.0, {0, 1, 7});
    CHECK(masked_distance(e0, e1, 2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

    const auto only_target = sample(2, 2.0, {0, 0, 4});
    CHECK(std::isinf(masked_distance(a, only_target, 2)));
}

TEST_CASE("masked_distance is a pseudometric") {
    Rng rng(8);
    const auto xs = random_samples(rng, 30, 6, 2);
    for (int trial = 0; trial < 100; ++trial) {
        std::uniform_int_distribution<std::size_t> pick(0, xs.size() - 1);
        const auto& a = xs[pick(rng)];
        const auto& b = xs[pick(rng)];
        const auto& c = xs[pick(rng)];
        const double ab = masked_distance(a, b, 2);
        CHECK(ab == masked_distance(b, a, 2));
        CHECK(masked_distance(a, a, 2) == 0.0);
        CHECK(ab <= masked_distance(a, c, 2) + masked_distance(c, b, 2) + 1e-12);
    }
}

TEST_CASE("nn_predict basics") {
    std::vector<SampleDistribution> train{sample(0, 0.0, {4, 4, 2}), sample(1, 1.0, {1, 8, 1})};
    CHECK(nn_predict(train, train[1], 2) == doctest::Approx(0.1).epsilon(1e-12));

    // Equidistant neighbors: the earlier sample wins.
    std::vector<SampleDistribution> tied{sample(5, 10.0, {1, 0, 7}), sample(4, 2.0, {0, 1, 3})};
    const auto probe = sample(9, 99.0, {1, 1, 0});
    CHECK(nn_predict(tied, probe, 2) == doctest::Approx(0.75).epsilon(1e-12));

    CHECK_THROWS_AS(nn_predict({}, probe, 2), std::invalid_argument);
}

TEST_CASE("nn_predict matches the brute-force scan") {
    Rng rng(12);
    const auto train = random_samples(rng, 50, 7, 3);
    const auto tests = random_samples(rng, 10, 7, 3);
    const auto batch = nn_predict_batch(train, tests, 3);
    const auto batch_serial = nn_predict_batch_serial(train, tests, 3);
    for (std::size_t i = 0; i < tests.size(); ++i) {
        const double expected = oracle::brute_nn(train, tests[i], 3);
        CHECK(nn_predict(train, tests[i], 3) == expected);
        CHECK(batch[i] == expected);
        CHECK(batch_serial[i] == expected);
    }
}

TEST_CASE("kmeans_fit with one cluster is the masked mean") {
    Rng rng(13);
    const auto train = random_samples(rng, 25, 5, 1);
    Rng fit_rng(1);
    const auto cs = kmeans_fit(train, 1, 1, fit_rng, 3);
    REQUIRE(cs.size() == 1);

    std::vector<double> mean(4, 0.0);
    double target_mean = 0.0;
    for (const auto& s : train) {
        const auto masked = masked_abundance(s, 1);
        for (std::size_t d = 0; d < mean.size(); ++d) mean[d] += (*masked)[d];
        target_mean += s.rel_abundance[1];
    }
    for (std::size_t d = 0; d < mean.size(); ++d) {
        mean[d] /= static_cast<double>(train.size());
        CHECK(cs.coords[0][d] == doctest::Approx(mean[d]).epsilon(1e-9));
    }
    CHECK(cs.target_abundance[0] ==
          doctest::Approx(target_mean / static_cast<double>(train.size())).epsilon(1e-9));
}

TEST_CASE("kmeans_fit degenerate k equals the point set") {
    Rng rng(14);
    const auto train = random_samples(rng, 12, 5, 0);
    Rng fit_rng(2);
    const auto result = kmeans_fit_detailed(train, 12, 0, fit_rng, 2, true);
    CHECK(result.sse == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS(kmeans_fit(train, 13, 0, fit_rng, 1), std::invalid_argument);
}

TEST_CASE("kmeans SSE trace never increases") {
    Rng rng(15);
    const auto train = random_samples(rng, 120, 8, 2);
    for (int k : {2, 4, 7}) {
        Rng fit_rng(20 + k);
        const auto result = kmeans_fit_detailed(train, k, 2, fit_rng, 4, true);
        for (std::size_t i = 1; i < result.sse_trace.size(); ++i)
            CHECK(result.sse_trace[i] <= result.sse_trace[i - 1] + 1e-12);
        for (const auto& c : result.centroids.coords)
            CHECK(std::abs(std::accumulate(c.begin(), c.end(), 0.0) - 1.0) < 1e-9);
        for (double a : result.centroids.target_abundance) {
            CHECK(a >= 0.0);
            CHECK(a <= 1.0);
        }
    }
}

TEST_CASE("kmeans parallel assignment equals the serial path") {
    Rng rng(16);
    const auto train = random_samples(rng, 150, 6, 1);
    Rng ra(5), rb(5);
    const auto serial = kmeans_fit_detailed(train, 5, 1, ra, 3, false);
    const auto parallel = kmeans_fit_detailed(train, 5, 1, rb, 3, true);
    CHECK(serial.sse == parallel.sse);
    CHECK(serial.centroids.coords == parallel.centroids.coords);
    CHECK(serial.centroids.target_abundance == parallel.centroids.target_abundance);
}

TEST_CASE("kmeans_predict basics") {
    CentroidSet cs;
    cs.v_star = 1;
    cs.coords = {{0.5, 0.5}};
    cs.target_abundance = {0.33};
    const auto probe = sample(0, 0.0, {9, 1, 1});
    CHECK(kmeans_predict(cs, probe, 1) == doctest::Approx(0.33).epsilon(1e-12));
    CHECK_THROWS_AS(kmeans_predict(cs, probe, 0), std::invalid_argument);
    CHECK_THROWS_AS(kmeans_predict(CentroidSet{}, probe, 0), std::invalid_argument);

    // A test point sitting on a centroid picks it.
    CentroidSet two;
    two.v_star = 2;
    two.coords = {{1.0, 0.0}, {0.25, 0.75}};
    two.target_abundance = {0.9, 0.1};
    const auto at_centroid = sample(1, 0.0, {1, 3, 4});
    CHECK(kmeans_predict(two, at_centroid, 2) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("K equal to N reduces kmeans to exhaustive search") {
    Rng rng(17);
    const auto train = random_samples(rng, 60, 9, 4);
    const auto cs = centroids_at_points(train, 4);
    const auto tests = random_samples(rng, 200, 9, 4);
    for (const auto& t : tests) CHECK(kmeans_predict(cs, t, 4) == nn_predict(train, t, 4));
}

TEST_CASE("baseline outputs stay in [0,1]") {
    Rng rng(18);
    const auto train = random_samples(rng, 40, 6, 2);
    const auto tests = random_samples(rng, 40, 6, 2);
    Rng fit_rng(6);
    const auto cs = kmeans_fit(train, 4, 2, fit_rng, 3);
    for (const auto& t : tests) {
        const double nn = nn_predict(train, t, 2);
        const double km = kmeans_predict(cs, t, 2);
        CHECK(nn >= 0.0);
        CHECK(nn <= 1.0);
        CHECK(km >= 0.0);
        CHECK(km <= 1.0);
    }
}
