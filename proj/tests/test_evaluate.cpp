#include "hotspot/evaluate.hpp"
#include "hotspot/synthetic.hpp"

#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <random>

using namespace hotspot;

namespace {

SampleDistribution sample(int id, double time, std::vector<long long> counts) {
    return SampleDistribution::from_counts(id, {time, time * 100.0, 0.0}, std::move(counts));
}

std::vector<SampleDistribution> numbered(int n) {
    std::vector<SampleDistribution> out;
    for (int i = 0; i < n; ++i) out.push_back(sample(i, static_cast<double>(i), {1, 1}));
    return out;
}

PRPoint point(double recall, double precision) {
    PRPoint p;
    p.recall = recall;
    p.precision = precision;
    return p;
}

} // namespace

TEST_CASE("split_samples regimes") {
    const auto six = numbered(6);
    auto [train, test] = split_samples(six, SplitRegime::interleaved);
    CHECK(train.size() == 3);
    CHECK(train[0].sample_id == 0);
    CHECK(train[1].sample_id == 2);
    CHECK(train[2].sample_id == 4);
    CHECK(test[0].sample_id == 1);
    CHECK(test[2].sample_id == 5);

    auto [h_train, h_test] = split_samples(six, SplitRegime::halves);
    CHECK(h_train.size() == 3);
    CHECK(h_train[2].sample_id == 2);
    CHECK(h_test[0].sample_id == 3);

    const auto five = numbered(5);
    auto [o_train, o_test] = split_samples(five, SplitRegime::halves);
    CHECK(o_train.size() == 3); // ceil rule favors training
    CHECK(o_test.size() == 2);

    CHECK_THROWS_AS(split_samples(numbered(1), SplitRegime::halves), std::invalid_argument);
}

TEST_CASE("ground_truth_hotspots") {
    std::vector<SampleDistribution> test{sample(10, 0.0, {9, 1}), sample(11, 1.0, {5, 5}),
                                         sample(12, 2.0, {7, 3})};
    CHECK(ground_truth_hotspots(test, 1, 2) == std::set<int>{11, 12});
    CHECK(ground_truth_hotspots(test, 1, 50) == std::set<int>{10, 11, 12});

    // Tie at the cutoff: the earlier-time sample is included.
    std::vector<SampleDistribution> tied{sample(20, 5.0, {7, 3}), sample(21, 1.0, {7, 3}),
                                         sample(22, 0.0, {2, 8})};
    CHECK(ground_truth_hotspots(tied, 1, 2) == std::set<int>{21, 22});
}

TEST_CASE("score_predictions arithmetic") {
    std::map<int, double> scores;
    for (int id : {1, 2, 3, 6}) scores[id] = 0.9;
    for (int id : {4, 5, 7}) scores[id] = 0.1;
    const std::set<int> truth{1, 2, 3, 4, 5};

    const auto points = score_predictions(scores, truth, {-1.0, 0.5, 2.0});
    REQUIRE(points.size() == 3);

    CHECK(points[1].tp == 3);
    CHECK(points[1].fp == 1);
    CHECK(points[1].fn == 2);
    CHECK(points[1].tn == 1);
    CHECK(points[1].precision == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(points[1].recall == doctest::Approx(0.6).epsilon(1e-12));

    CHECK(points[2].tp == 0);
    CHECK(points[2].fp == 0);
    CHECK(points[2].precision == 1.0); // nothing predicted
    CHECK(points[2].recall == 0.0);

    CHECK(points[0].recall == 1.0);
    CHECK(points[0].precision == doctest::Approx(5.0 / 7.0).epsilon(1e-12));

    CHECK_THROWS_AS(score_predictions(scores, {99}, {0.5}), std::invalid_argument);
}

TEST_CASE("aggregate_pr micro-averages counts") {
    PRPoint a;
    a.tau = 0.5;
    a.tp = 1;
    a.fp = 1;
    a.fn = 1;
    auto fill = [](PRPoint p) {
        p.precision = p.tp + p.fp ? double(p.tp) / double(p.tp + p.fp) : 1.0;
        p.recall = p.tp + p.fn ? double(p.tp) / double(p.tp + p.fn) : 0.0;
        return p;
    };
    const std::vector<PRPoint> curve{fill(a)};
    const auto agg = aggregate_pr({curve, curve});
    CHECK(agg[0].tp == 2);
    CHECK(agg[0].precision == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(agg[0].recall == doctest::Approx(0.5).epsilon(1e-12));

    const auto identity = aggregate_pr({curve});
    CHECK(identity[0].tp == curve[0].tp);
    CHECK(identity[0].precision == curve[0].precision);

    PRPoint zero;
    zero.tau = 0.5;
    const auto with_zero = aggregate_pr({curve, {zero}});
    CHECK(with_zero[0].tp == curve[0].tp);
    CHECK(with_zero[0].precision == curve[0].precision);
    CHECK(with_zero[0].recall == curve[0].recall);

    PRPoint other_tau;
    other_tau.tau = 0.25;
    CHECK_THROWS_AS(aggregate_pr({curve, {other_tau}}), std::invalid_argument);
    CHECK_THROWS_AS(aggregate_pr({curve, {}}), std::invalid_argument);
}

TEST_CASE("auc_pr fixtures") {
    CHECK(auc_pr({point(0.0, 1.0), point(1.0, 1.0)}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(auc_pr({point(0.0, 1.0), point(0.5, 0.5), point(1.0, 1.0 / 3.0)}) ==
          doctest::Approx(7.0 / 12.0).epsilon(1e-9));
    CHECK(auc_pr({point(0.0, 0.4), point(0.3, 0.4), point(1.0, 0.4)}) ==
          doctest::Approx(0.4).epsilon(1e-12));
    CHECK(auc_pr({point(0.5, 0.7)}) == 0.0);
    CHECK(auc_pr({point(0.5, 0.7), point(0.5, 0.2)}) == 0.0);

    // Duplicate points change nothing.
    const std::vector<PRPoint> base{point(0.0, 1.0), point(0.5, 0.5), point(1.0, 1.0 / 3.0)};
    auto dup = base;
    dup.push_back(point(0.5, 0.5));
    dup.push_back(point(0.0, 1.0));
    CHECK(auc_pr(dup) == auc_pr(base));
}

TEST_CASE("PR invariants on random score sets") {
    Rng rng(29);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 40;
        std::map<int, double> scores;
        for (int id = 0; id < n; ++id) scores[id] = unit(rng);
        std::set<int> truth;
        while (truth.size() < 10) truth.insert(std::uniform_int_distribution<int>(0, n - 1)(rng));

        std::set<double> distinct;
        for (const auto& [id, s] : scores) distinct.insert(s);
        std::vector<double> thresholds{-1.0};
        thresholds.insert(thresholds.end(), distinct.begin(), distinct.end());

        const auto points = score_predictions(scores, truth, thresholds);
        for (std::size_t i = 0; i < points.size(); ++i) {
            const auto& p = points[i];
            CHECK(p.tp + p.fn == static_cast<long long>(truth.size()));
            long long predicted = 0;
            for (const auto& [id, s] : scores) predicted += s > p.tau;
            CHECK(p.tp + p.fp == predicted);
            CHECK(p.tp + p.fp + p.fn + p.tn == n);
            if (i > 0) CHECK(p.recall <= points[i - 1].recall); // tau ascending
        }
        const double auc = auc_pr(points);
        CHECK(auc >= 0.0);
        CHECK(auc <= 1.0);
    }
}

TEST_CASE("random scores recover the base rate") {
    Rng rng(31);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int n = 400;
    const int n_truth = 120;
    const int trials = 100;
    std::vector<double> aucs;
    for (int trial = 0; trial < trials; ++trial) {
        std::map<int, double> scores;
        for (int id = 0; id < n; ++id) scores[id] = unit(rng);
        std::set<int> truth;
        while (static_cast<int>(truth.size()) < n_truth)
            truth.insert(std::uniform_int_distribution<int>(0, n - 1)(rng));
        std::set<double> distinct;
        for (const auto& [id, s] : scores) distinct.insert(s);
        std::vector<double> thresholds{-1.0};
        thresholds.insert(thresholds.end(), distinct.begin(), distinct.end());
        aucs.push_back(auc_pr(score_predictions(scores, truth, thresholds)));
    }
    double mean = 0.0;
    for (double a : aucs) mean += a;
    mean /= trials;
    double var = 0.0;
    for (double a : aucs) var += (a - mean) * (a - mean);
    var /= trials - 1;
    const double base = static_cast<double>(n_truth) / n;
    INFO("mean=" << mean << " base=" << base << " sd=" << std::sqrt(var));
    CHECK(std::abs(mean - base) <= 3.0 * std::sqrt(var));
    // Trapezoidal PR area carries a small positive finite-sample bias;
    // frozen from measurement at this size.
    CHECK(std::abs(mean - base) <= 0.02);
}

TEST_CASE("evaluate_strategy runs every strategy on synthetic data") {
    SynthSpec spec;
    spec.n_communities = 3;
    spec.vocab_size = 10;
    spec.n_cells = 40;
    spec.obs_per_cell = 40;
    spec.theta_concentration = 0.2;
    spec.seed = 3;
    const auto data = generate_synthetic(spec);
    const auto targets = most_frequent_taxa(data.dataset, 3);
    const GridConfig grid{5000.0, 0.0, 1};

    StrategyParams params;
    params.hyper = {0.1, 0.1, 0.01};
    params.sigma_m = 15000.0;
    params.train_sweeps = 15;
    params.test_sweeps = 5;

    for (Strategy strategy : {Strategy::topic, Strategy::nn}) {
        const auto eval =
            evaluate_strategy(data.dataset, SplitRegime::halves, strategy, params, targets, 8,
                              grid, 11);
        CHECK(eval.auc >= 0.0);
        CHECK(eval.auc <= 1.0);
        CHECK(eval.per_taxon.size() == targets.size());
    }

    CHECK_THROWS_AS(evaluate_strategy(data.dataset, SplitRegime::halves, Strategy::kmeans, params,
                                      targets, 8, grid, 11),
                    std::invalid_argument);
    params.kmeans_k = 3;
    const auto km = evaluate_strategy(data.dataset, SplitRegime::halves, Strategy::kmeans, params,
                                      targets, 8, grid, 11);
    CHECK(km.k_learned == 3);

    // Same seed, same answer.
    const auto again = evaluate_strategy(data.dataset, SplitRegime::halves, Strategy::kmeans,
                                         params, targets, 8, grid, 11);
    CHECK(km.auc == again.auc);
}

TEST_CASE("default sweep grids contain the cruise reference optima") {
    const SweepConfig defaults;
    auto contains = [](const std::vector<double>& xs, double x) {
        return std::find(xs.begin(), xs.end(), x) != xs.end();
    };
    for (const auto& ref : {kCruiseBestInterleaved, kCruiseBestSplit}) {
        CHECK(contains(defaults.alphas, ref.alpha));
        CHECK(contains(defaults.betas, ref.beta));
        CHECK(contains(defaults.gammas, ref.gamma));
        CHECK(contains(defaults.sigmas, ref.sigma_m));
    }
    CHECK(kCruiseBestInterleaved.k_learned == 9);
    CHECK(kCruiseBestSplit.k_learned == 6);
}

TEST_CASE("run_sweep singleton grid and budget") {
    SynthSpec spec;
    spec.n_communities = 2;
    spec.vocab_size = 8;
    spec.n_cells = 30;
    spec.obs_per_cell = 30;
    spec.theta_concentration = 0.2;
    spec.seed = 4;
    const auto data = generate_synthetic(spec);
    const GridConfig grid{5000.0, 0.0, 1};

    SweepConfig sweep;
    sweep.alphas = {0.1};
    sweep.betas = {0.5};
    sweep.gammas = {0.01};
    sweep.sigmas = {15000.0};
    sweep.n_hotspots = 5;
    sweep.target_taxa = most_frequent_taxa(data.dataset, 2);

    const auto report = run_sweep(data.dataset, SplitRegime::halves, sweep, true, grid, 7, 0, 10, 4);
    REQUIRE(report.per_config.size() == 1);
    CHECK(report.best.alpha == 0.1);
    CHECK(report.best.auc == report.per_config[0].auc);
    CHECK(report.kmeans_k >= 1);
    CHECK(report.nn_configs.size() == 1);

    const auto again =
        run_sweep(data.dataset, SplitRegime::halves, sweep, true, grid, 7, 0, 10, 4);
    CHECK(report.best.auc == again.best.auc);

    SweepConfig wide = sweep;
    wide.alphas = {0.05, 0.1, 0.5};
    wide.betas = {0.1, 0.5};
    const auto capped =
        run_sweep(data.dataset, SplitRegime::halves, wide, false, grid, 7, 3, 10, 4);
    CHECK(capped.per_config.size() == 3);
}
