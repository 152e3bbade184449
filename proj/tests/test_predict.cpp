#include "hotspot/predict.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numeric>
#include <random>

using namespace hotspot;

namespace {

const GridConfig kGrid{5000.0, 0.0, 1};

TopicState state_with_counts(int vocab, std::vector<std::vector<long long>> counts) {
    TopicState st(vocab);
    st.topic_taxon_counts = std::move(counts);
    for (std::size_t k = 0; k < st.topic_taxon_counts.size(); ++k) {
        st.topic_ids.push_back(static_cast<int>(k));
        st.topic_totals.push_back(std::accumulate(st.topic_taxon_counts[k].begin(),
                                                  st.topic_taxon_counts[k].end(), 0LL));
    }
    return st;
}

ScalarField random_field(Rng& rng, int n_cells, int span) {
    ScalarField f;
    std::uniform_int_distribution<int> coord(-span, span);
    std::uniform_real_distribution<double> value(0.0, 1.0);
    while (static_cast<int>(f.values.size()) < n_cells)
        f.values.insert_or_assign({0, coord(rng), coord(rng)}, value(rng));
    return f;
}

} // namespace

TEST_CASE("heldout_phi drops the target class") {
    Hyperparameters h{0.1, 1.0, 1e-5};
    auto st = state_with_counts(3, {{4, 5, 1}});
    auto held = heldout_phi(st, h, 2);
    CHECK(held.phi[0][0] == doctest::Approx(5.0 / 11).epsilon(1e-12));
    CHECK(held.phi[0][1] == doctest::Approx(6.0 / 11).epsilon(1e-12));

    auto zero = state_with_counts(4, {{0, 0, 0, 0}});
    auto held_zero = heldout_phi(zero, h, 1);
    for (double p : held_zero.phi[0]) CHECK(p == doctest::Approx(1.0 / 3).epsilon(1e-12));

    // The target class's own counts cancel out exactly.
    auto st_big = state_with_counts(3, {{4, 5, 100}});
    auto held_big = heldout_phi(st_big, h, 2);
    CHECK(held_big.phi[0] == held.phi[0]);

    TopicState tiny(1);
    CHECK_THROWS_AS(heldout_phi(tiny, h, 0), std::invalid_argument);
}

TEST_CASE("heldout_phi normalizes and ignores the target row for random counts") {
    Rng rng(21);
    std::uniform_int_distribution<long long> count(0, 100);
    std::uniform_int_distribution<int> vocab_pick(2, 15);
    Hyperparameters h{0.1, 0.07, 1e-5};
    for (int trial = 0; trial < 100; ++trial) {
        const int vocab = vocab_pick(rng);
        const int v_star = std::uniform_int_distribution<int>(0, vocab - 1)(rng);
        std::vector<std::vector<long long>> counts(3, std::vector<long long>(vocab));
        for (auto& row : counts)
            for (auto& c : row) c = count(rng);
        auto held = heldout_phi(state_with_counts(vocab, counts), h, v_star);
        for (const auto& row : held.phi)
            CHECK(std::abs(std::accumulate(row.begin(), row.end(), 0.0) - 1.0) < 1e-12);

        auto perturbed = counts;
        for (auto& row : perturbed) row[v_star] = count(rng) + 977;
        auto held2 = heldout_phi(state_with_counts(vocab, perturbed), h, v_star);
        CHECK(held.phi == held2.phi);
    }
}

TEST_CASE("assign_test_topics with a single community") {
    Model model;
    model.grid = kGrid;
    model.hyper = {0.1, 0.5, 1e-5};
    model.state = state_with_counts(4, {{5, 3, 2, 1}});

    Rng rng(3);
    std::vector<ObservationRecord> test{{0, 0.0, 50000.0, 0.0, 0},
                                        {1, 0.0, 50000.0, 0.0, 0},
                                        {2, 0.0, 90000.0, 0.0, 1}};
    const auto theta = assign_test_topics(model, test, 3, rng, 5);
    CHECK(theta.theta.size() == 2);
    for (const auto& [cell, vec] : theta.theta) {
        REQUIRE(vec.size() == 1);
        CHECK(vec[0] == doctest::Approx(1.0).epsilon(1e-12));
    }

    CHECK(assign_test_topics(model, {}, 3, rng, 5).theta.empty());
    std::vector<ObservationRecord> bad{{3, 0.0, 0.0, 0.0, 0}};
    CHECK_THROWS_AS(assign_test_topics(model, bad, 3, rng, 5), std::invalid_argument);
}

TEST_CASE("assign_test_topics separates disjoint community supports") {
    // Community 0 emits taxa 0..4, community 1 emits taxa 5..9; taxon 10 is
    // the held-out target.
    std::vector<std::vector<long long>> counts(2, std::vector<long long>(11, 0));
    for (int v = 0; v < 5; ++v) counts[0][v] = 40;
    for (int v = 5; v < 10; ++v) counts[1][v] = 40;
    Model model;
    model.grid = kGrid;
    model.hyper = {0.1, 0.1, 1e-5};
    model.state = state_with_counts(11, counts);
    model.state.cell_topic_counts[{0, 0, 0}] = {200, 0};
    model.state.cell_topic_counts[{0, 10, 0}] = {0, 200};

    Rng rng(9);
    std::vector<ObservationRecord> test;
    for (int i = 0; i < 30; ++i) test.push_back({i % 5, 0.0, 100000.0, 0.0, 7});
    const auto theta = assign_test_topics(model, test, 10, rng, 10);
    CHECK(theta.theta.at({0, 20, 0})[0] >= 0.95);
}

TEST_CASE("predict_target_field is a per-cell dot product") {
    CommunityMatrix phi;
    phi.phi = {{0.8, 0.2}, {0.6, 0.4}};
    CellTopicField theta;
    theta.theta[{0, 0, 0}] = {0.5, 0.5};
    theta.theta[{0, 1, 0}] = {0.0, 1.0};

    const auto field = predict_target_field(theta, phi, 1);
    CHECK(field.values.at({0, 0, 0}) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(field.values.at({0, 1, 0}) == doctest::Approx(0.4).epsilon(1e-12));

    CellTopicField bad;
    bad.theta[{0, 0, 0}] = {1.0};
    CHECK_THROWS_AS(predict_target_field(bad, phi, 1), std::invalid_argument);
    CHECK_THROWS_AS(predict_target_field(theta, phi, 5), std::invalid_argument);
}

TEST_CASE("predicted values stay inside (0,1) for posterior matrices") {
    Rng rng(33);
    auto st = state_with_counts(6, {{9, 0, 0, 1, 0, 0}, {0, 0, 7, 0, 0, 2}});
    Hyperparameters h{0.1, 0.05, 1e-5};
    const auto phi = phi_posterior(st, h);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const double a = unit(rng);
        CellTopicField theta;
        theta.theta[{0, 0, 0}] = {a, 1.0 - a};
        for (int v = 0; v < 6; ++v) {
            const double p = predict_target_field(theta, phi, v).values.at({0, 0, 0});
            CHECK(p > 0.0);
            CHECK(p < 1.0);
        }
    }
}

TEST_CASE("median_smooth examples") {
    GridConfig cfg{5000.0, 0.0, 1};

    ScalarField nine;
    for (int e = 0; e < 3; ++e)
        for (int n = 0; n < 3; ++n)
            nine.values[{0, e, n}] = (1 + e * 3 + n) / 10.0;
    const auto smoothed = median_smooth(nine, 10000.0, cfg);
    CHECK(smoothed.values.at({0, 1, 1}) == doctest::Approx(0.5).epsilon(1e-12));

    ScalarField sparse;
    sparse.values[{0, 0, 0}] = 0.2;
    sparse.values[{0, 1, 0}] = 0.1;
    sparse.values[{0, 0, 1}] = 1.0;
    const auto s2 = median_smooth(sparse, 10000.0, cfg);
    CHECK(s2.values.at({0, 0, 0}) == doctest::Approx(0.2).epsilon(1e-12));

    const auto identity = median_smooth(sparse, 0.0, cfg);
    CHECK(identity.values == sparse.values);
    const auto sub_cell = median_smooth(sparse, 4999.0, cfg);
    CHECK(sub_cell.values == sparse.values);
}

TEST_CASE("median_smooth is idempotent on constant fields") {
    Rng rng(44);
    ScalarField f = random_field(rng, 60, 6);
    for (auto& [cell, value] : f.values) value = 0.42;
    const auto once = median_smooth(f, 25000.0, kGrid);
    CHECK(once.values == f.values);
}

TEST_CASE("median_smooth matches the collect-and-sort oracle") {
    Rng rng(55);
    std::uniform_real_distribution<double> sigma(0.0, 40000.0);
    for (int trial = 0; trial < 30; ++trial) {
        const ScalarField f = random_field(rng, 80, 8);
        const double s = sigma(rng);
        const auto fast = median_smooth(f, s, kGrid);
        const auto serial = median_smooth_serial(f, s, kGrid);
        const auto brute = oracle::brute_median(f, s, kGrid);
        CHECK(fast.values == brute.values);
        CHECK(serial.values == brute.values);
    }
}

TEST_CASE("median_smooth output values come from the input multiset or midpoints") {
    Rng rng(66);
    const ScalarField f = random_field(rng, 50, 5);
    std::vector<double> inputs;
    for (const auto& [cell, value] : f.values) inputs.push_back(value);
    const auto smoothed = median_smooth(f, 25000.0, kGrid);
    for (const auto& [cell, value] : smoothed.values) {
        bool ok = false;
        for (std::size_t a = 0; a < inputs.size() && !ok; ++a) {
            if (inputs[a] == value) ok = true;
            for (std::size_t b = a; b < inputs.size() && !ok; ++b)
                if ((inputs[a] + inputs[b]) / 2.0 == value) ok = true;
        }
        CHECK(ok);
    }
}

TEST_CASE("extract_hotspots uses a strict threshold") {
    ScalarField f;
    f.values[{0, 0, 0}] = 0.6;
    f.values[{0, 1, 0}] = 0.4;
    CHECK(extract_hotspots(f, 0.5) == std::set<CellKey>{{0, 0, 0}});
    CHECK(extract_hotspots(f, 0.6).empty());
    CHECK(extract_hotspots(f, 0.7).empty());

    Rng rng(77);
    const ScalarField field = random_field(rng, 40, 5);
    std::uniform_real_distribution<double> tau(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        double t1 = tau(rng), t2 = tau(rng);
        if (t1 > t2) std::swap(t1, t2);
        const auto low = extract_hotspots(field, t1);
        for (const CellKey& c : extract_hotspots(field, t2)) CHECK(low.count(c) == 1);
    }
}
