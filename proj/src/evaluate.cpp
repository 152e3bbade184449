#include "hotspot/evaluate.hpp"

#include "hotspot/io_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace hotspot {

SplitRegime parse_regime(const std::string& name) {
    if (name == "interleaved") return SplitRegime::interleaved;
    if (name == "halves") return SplitRegime::halves;
    throw std::invalid_argument("unknown regime '" + name + "' (expected interleaved|halves)");
}

std::string regime_name(SplitRegime regime) {
    return regime == SplitRegime::interleaved ? "interleaved" : "halves";
}

Strategy parse_strategy(const std::string& name) {
    if (name == "topic") return Strategy::topic;
    if (name == "nn") return Strategy::nn;
    if (name == "kmeans") return Strategy::kmeans;
    throw std::invalid_argument("unknown strategy '" + name + "' (expected topic|nn|kmeans)");
}

std::string strategy_name(Strategy strategy) {
    switch (strategy) {
    case Strategy::topic: return "topic";
    case Strategy::nn: return "nn";
    default: return "kmeans";
    }
}

void SweepConfig::validate() const {
    auto positive = [](const std::vector<double>& xs) {
        return !xs.empty() && std::all_of(xs.begin(), xs.end(), [](double x) { return x > 0.0; });
    };
    if (!positive(alphas) || !positive(betas) || !positive(gammas))
        throw std::invalid_argument("sweep grids must be nonempty and positive");
    if (sigmas.empty() || std::any_of(sigmas.begin(), sigmas.end(), [](double s) { return s < 0.0; }))
        throw std::invalid_argument("sweep sigmas must be nonempty and nonnegative");
    if (n_hotspots < 1) throw std::invalid_argument("n_hotspots must be >= 1");
    if (target_taxa.empty()) throw std::invalid_argument("sweep target taxa must be nonempty");
}

std::pair<std::vector<SampleDistribution>, std::vector<SampleDistribution>>
split_samples(const std::vector<SampleDistribution>& samples, SplitRegime regime) {
    if (samples.size() < 2) throw std::invalid_argument("split_samples: need at least 2 samples");
    std::vector<SampleDistribution> train;
    std::vector<SampleDistribution> test;
    if (regime == SplitRegime::interleaved) {
        for (std::size_t i = 0; i < samples.size(); ++i)
            (i % 2 == 0 ? train : test).push_back(samples[i]);
    } else {
        const std::size_t cut = (samples.size() + 1) / 2;
        train.assign(samples.begin(), samples.begin() + cut);
        test.assign(samples.begin() + cut, samples.end());
    }
    return {std::move(train), std::move(test)};
}

std::set<int> ground_truth_hotspots(const std::vector<SampleDistribution>& test, int v_star,
                                    int n) {
    if (n < 1) throw std::invalid_argument("ground_truth_hotspots: n must be >= 1");
    std::vector<std::size_t> order(test.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double ra = test[a].rel_abundance[v_star];
        const double rb = test[b].rel_abundance[v_star];
        if (ra != rb) return ra > rb;
        return test[a].location.time_s < test[b].location.time_s;
    });
    std::set<int> out;
    for (std::size_t i = 0; i < order.size() && i < static_cast<std::size_t>(n); ++i)
        out.insert(test[order[i]].sample_id);
    return out;
}

std::vector<PRPoint> score_predictions(const std::map<int, double>& scores,
                                       const std::set<int>& truth,
                                       const std::vector<double>& thresholds) {
    for (int id : truth)
        if (!scores.count(id))
            throw std::invalid_argument("score_predictions: truth id without a score");
    std::vector<PRPoint> out;
    out.reserve(thresholds.size());
    const long long n = static_cast<long long>(scores.size());
    for (double tau : thresholds) {
        PRPoint p;
        p.tau = tau;
        for (const auto& [id, score] : scores) {
            const bool predicted = score > tau;
            const bool real = truth.count(id) > 0;
            p.tp += predicted && real;
            p.fp += predicted && !real;
        }
        p.fn = static_cast<long long>(truth.size()) - p.tp;
        p.tn = n - p.tp - p.fp - p.fn;
        p.precision = (p.tp + p.fp) == 0
                          ? 1.0
                          : static_cast<double>(p.tp) / static_cast<double>(p.tp + p.fp);
        p.recall = truth.empty() ? 0.0
                                 : static_cast<double>(p.tp) / static_cast<double>(truth.size());
        out.push_back(p);
    }
    return out;
}

std::vector<PRPoint> aggregate_pr(const std::vector<std::vector<PRPoint>>& per_taxon) {
    if (per_taxon.empty()) throw std::invalid_argument("aggregate_pr: no curves");
    const std::size_t n_points = per_taxon.front().size();
    for (const auto& curve : per_taxon)
        if (curve.size() != n_points)
            throw std::invalid_argument("aggregate_pr: misaligned threshold grids");
    std::vector<PRPoint> out(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
        PRPoint& p = out[i];
        p.tau = per_taxon.front()[i].tau;
        for (const auto& curve : per_taxon) {
            if (curve[i].tau != p.tau)
                throw std::invalid_argument("aggregate_pr: misaligned threshold grids");
            p.tp += curve[i].tp;
            p.fp += curve[i].fp;
            p.fn += curve[i].fn;
            p.tn += curve[i].tn;
        }
        p.precision = (p.tp + p.fp) == 0
                          ? 1.0
                          : static_cast<double>(p.tp) / static_cast<double>(p.tp + p.fp);
        p.recall = (p.tp + p.fn) == 0
                       ? 0.0
                       : static_cast<double>(p.tp) / static_cast<double>(p.tp + p.fn);
    }
    return out;
}

double auc_pr(std::vector<PRPoint> points) {
    std::stable_sort(points.begin(), points.end(),
                     [](const PRPoint& a, const PRPoint& b) { return a.recall < b.recall; });
    // Best achievable precision per distinct recall.
    std::vector<std::pair<double, double>> curve; // (recall, precision)
    for (const PRPoint& p : points) {
        if (!curve.empty() && curve.back().first == p.recall)
            curve.back().second = std::max(curve.back().second, p.precision);
        else
            curve.emplace_back(p.recall, p.precision);
    }
    if (curve.size() < 2) return 0.0;
    double area = 0.0;
    for (std::size_t i = 1; i < curve.size(); ++i)
        area += (curve[i].first - curve[i - 1].first) *
                (curve[i].second + curve[i - 1].second) / 2.0;
    return area;
}

namespace {

// Per-cell field from per-sample predictions; samples sharing a cell
// contribute their mean.
ScalarField field_from_sample_scores(const std::vector<SampleDistribution>& samples,
                                     const std::vector<double>& predictions,
                                     const GridConfig& grid) {
    std::map<CellKey, std::pair<double, long long>> acc;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        auto& slot = acc[cell_of(samples[i].location, grid)];
        slot.first += predictions[i];
        slot.second++;
    }
    ScalarField field;
    for (const auto& [cell, slot] : acc)
        field.values.emplace(cell, slot.first / static_cast<double>(slot.second));
    return field;
}

// Each test sample takes its cell's smoothed value; samples outside the
// field's coverage score 0.
std::map<int, double> sample_scores_from_field(const ScalarField& smoothed,
                                               const std::vector<SampleDistribution>& test,
                                               const GridConfig& grid) {
    std::map<int, double> scores;
    for (const SampleDistribution& s : test) {
        auto it = smoothed.values.find(cell_of(s.location, grid));
        scores[s.sample_id] = it == smoothed.values.end() ? 0.0 : it->second;
    }
    return scores;
}

// Every achievable operating point: all distinct scores plus a value below
// them all so the everything-predicted point appears.
std::vector<double> shared_thresholds(const std::map<int, std::map<int, double>>& scores_by_taxon) {
    std::set<double> distinct;
    for (const auto& [taxon, scores] : scores_by_taxon)
        for (const auto& [id, score] : scores) distinct.insert(score);
    std::vector<double> thresholds;
    thresholds.reserve(distinct.size() + 1);
    thresholds.push_back(-1.0);
    thresholds.insert(thresholds.end(), distinct.begin(), distinct.end());
    return thresholds;
}

StrategyEvaluation finish_evaluation(const std::map<int, std::map<int, double>>& scores_by_taxon,
                                     const std::vector<SampleDistribution>& test, int n_hotspots,
                                     int k_learned) {
    StrategyEvaluation eval;
    eval.k_learned = k_learned;
    const auto thresholds = shared_thresholds(scores_by_taxon);
    std::vector<std::vector<PRPoint>> curves;
    for (const auto& [v_star, scores] : scores_by_taxon) {
        auto truth = ground_truth_hotspots(test, v_star, n_hotspots);
        auto points = score_predictions(scores, truth, thresholds);
        eval.per_taxon_auc[v_star] = auc_pr(points);
        curves.push_back(points);
        eval.per_taxon.emplace(v_star, std::move(points));
    }
    eval.aggregated = aggregate_pr(curves);
    eval.auc = auc_pr(eval.aggregated);
    return eval;
}

std::vector<ObservationRecord> records_without_taxon(const std::vector<SampleDistribution>& samples,
                                                     int v_star) {
    std::vector<ObservationRecord> records = expand_records(samples);
    std::erase_if(records, [v_star](const ObservationRecord& r) { return r.taxon == v_star; });
    return records;
}

struct TopicFields {
    int k_learned = 0;
    CommunityMatrix phi;
    std::map<int, ScalarField> raw_by_taxon; // unsmoothed target fields
};

// Trains once on the training records and produces the raw (pre-smoothing)
// per-cell target field for every held-out taxon.
TopicFields topic_fields(const std::vector<SampleDistribution>& train,
                         const std::vector<SampleDistribution>& test, int vocab_size,
                         const Hyperparameters& hyper, const GridConfig& grid,
                         const std::vector<int>& targets, int train_sweeps, int test_sweeps,
                         std::uint64_t seed) {
    Rng rng(seed);
    auto trained = batch_train(expand_records(train), vocab_size, hyper, grid, rng, train_sweeps);
    TopicFields out;
    out.k_learned = trained.state.num_topics();
    out.phi = trained.phi;
    Model model;
    model.grid = grid;
    model.hyper = hyper;
    model.n_observations = static_cast<long long>(trained.state.size());
    model.state = std::move(trained.state);

    for (int v_star : targets) {
        Rng taxon_rng(derive_seed(seed, 1000 + static_cast<std::uint64_t>(v_star)));
        const auto test_records = records_without_taxon(test, v_star);
        const auto theta_star =
            assign_test_topics(model, test_records, v_star, taxon_rng, test_sweeps);
        out.raw_by_taxon.emplace(v_star, predict_target_field(theta_star, out.phi, v_star));
    }
    return out;
}

std::map<int, ScalarField> nn_fields(const std::vector<SampleDistribution>& train,
                                     const std::vector<SampleDistribution>& test,
                                     const std::vector<int>& targets, const GridConfig& grid) {
    std::map<int, ScalarField> out;
    for (int v_star : targets)
        out.emplace(v_star,
                    field_from_sample_scores(test, nn_predict_batch(train, test, v_star), grid));
    return out;
}

std::map<int, ScalarField> kmeans_fields(const std::vector<SampleDistribution>& train,
                                         const std::vector<SampleDistribution>& test,
                                         const std::vector<int>& targets, int k, int restarts,
                                         const GridConfig& grid, std::uint64_t seed) {
    std::map<int, ScalarField> out;
    for (int v_star : targets) {
        Rng rng(derive_seed(seed, 2000 + static_cast<std::uint64_t>(v_star)));
        const CentroidSet cs = kmeans_fit(train, k, v_star, rng, restarts);
        out.emplace(v_star,
                    field_from_sample_scores(test, kmeans_predict_batch(cs, test, v_star), grid));
    }
    return out;
}

std::map<int, std::map<int, double>> smooth_and_score(const std::map<int, ScalarField>& raw,
                                                      double sigma_m, const GridConfig& grid,
                                                      const std::vector<SampleDistribution>& test) {
    std::map<int, std::map<int, double>> scores;
    for (const auto& [v_star, field] : raw)
        scores.emplace(v_star,
                       sample_scores_from_field(median_smooth(field, sigma_m, grid), test, grid));
    return scores;
}

void validate_targets(const std::vector<int>& targets, int vocab_size) {
    if (targets.empty()) throw std::invalid_argument("no target taxa");
    for (int v : targets)
        if (v < 0 || v >= vocab_size) throw std::invalid_argument("taxon id out of range");
}

} // namespace

StrategyEvaluation evaluate_strategy(const SurveyDataset& dataset, SplitRegime regime,
                                     Strategy strategy, const StrategyParams& params,
                                     const std::vector<int>& targets, int n_hotspots,
                                     const GridConfig& grid, std::uint64_t seed) {
    grid.validate();
    validate_targets(targets, dataset.vocab_size());
    if (n_hotspots < 1) throw std::invalid_argument("n_hotspots must be >= 1");
    auto [train, test] = split_samples(dataset.samples, regime);

    std::map<int, ScalarField> raw;
    int k_learned = 0;
    switch (strategy) {
    case Strategy::topic: {
        params.hyper.validate();
        auto fields = topic_fields(train, test, dataset.vocab_size(), params.hyper, grid, targets,
                                   params.train_sweeps, params.test_sweeps, seed);
        k_learned = fields.k_learned;
        raw = std::move(fields.raw_by_taxon);
        break;
    }
    case Strategy::nn:
        raw = nn_fields(train, test, targets, grid);
        break;
    case Strategy::kmeans:
        if (params.kmeans_k < 1)
            throw std::invalid_argument("kmeans strategy requires a centroid count >= 1");
        raw = kmeans_fields(train, test, targets, params.kmeans_k, params.kmeans_restarts, grid,
                            seed);
        k_learned = params.kmeans_k;
        break;
    }
    const auto scores = smooth_and_score(raw, params.sigma_m, grid, test);
    return finish_evaluation(scores, test, n_hotspots, k_learned);
}

SweepReport run_sweep(const SurveyDataset& dataset, SplitRegime regime, const SweepConfig& sweep,
                      bool with_baselines, const GridConfig& grid, std::uint64_t seed,
                      std::size_t budget, int train_sweeps, int test_sweeps) {
    sweep.validate();
    grid.validate();
    validate_targets(sweep.target_taxa, dataset.vocab_size());
    auto [train, test] = split_samples(dataset.samples, regime);

    struct Group {
        double alpha, beta, gamma;
        std::vector<double> sigmas;
        std::uint64_t flat_index; // of the first retained combination
    };
    const std::size_t n_sigma = sweep.sigmas.size();
    const std::size_t total =
        sweep.alphas.size() * sweep.betas.size() * sweep.gammas.size() * n_sigma;
    const std::size_t keep = (budget > 0 && budget < total) ? budget : total;

    std::vector<Group> groups;
    std::size_t next = 0;
    for (std::size_t j = 0; j < keep; ++j) {
        // Evenly spaced, deterministic subsample of the flat enumeration.
        const std::size_t flat = j * total / keep;
        if (flat < next) continue;
        next = flat + 1;
        const std::size_t is = flat % n_sigma;
        const std::size_t rest = flat / n_sigma;
        const std::size_t ig = rest % sweep.gammas.size();
        const std::size_t rest2 = rest / sweep.gammas.size();
        const std::size_t ib = rest2 % sweep.betas.size();
        const std::size_t ia = rest2 / sweep.betas.size();
        if (!groups.empty() && groups.back().alpha == sweep.alphas[ia] &&
            groups.back().beta == sweep.betas[ib] && groups.back().gamma == sweep.gammas[ig]) {
            groups.back().sigmas.push_back(sweep.sigmas[is]);
        } else {
            groups.push_back({sweep.alphas[ia], sweep.betas[ib], sweep.gammas[ig],
                              {sweep.sigmas[is]}, flat});
        }
    }

    std::vector<std::vector<SweepEntry>> by_group(groups.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const Group& grp = groups[g];
        Hyperparameters hyper{grp.alpha, grp.beta, grp.gamma};
        const auto fields =
            topic_fields(train, test, dataset.vocab_size(), hyper, grid, sweep.target_taxa,
                         train_sweeps, test_sweeps, derive_seed(seed, grp.flat_index));
        for (double sigma : grp.sigmas) {
            const auto scores = smooth_and_score(fields.raw_by_taxon, sigma, grid, test);
            const auto eval = finish_evaluation(scores, test, sweep.n_hotspots, fields.k_learned);
            SweepEntry entry{grp.alpha, grp.beta,  grp.gamma,          sigma,
                             eval.k_learned, eval.auc, eval.per_taxon_auc};
            by_group[g].push_back(std::move(entry));
        }
    }

    SweepReport report;
    report.regime = regime;
    for (auto& entries : by_group)
        for (auto& e : entries) report.per_config.push_back(std::move(e));
    if (report.per_config.empty()) throw std::invalid_argument("sweep produced no configurations");
    report.best = *std::max_element(
        report.per_config.begin(), report.per_config.end(),
        [](const SweepEntry& a, const SweepEntry& b) { return a.auc < b.auc; });

    if (with_baselines) {
        report.with_baselines = true;
        report.kmeans_k = std::clamp(report.best.k_learned, 1, static_cast<int>(train.size()));
        const auto nn_raw = nn_fields(train, test, sweep.target_taxa, grid);
        const auto km_raw = kmeans_fields(train, test, sweep.target_taxa, report.kmeans_k, 10,
                                          grid, derive_seed(seed, 0x6b6dULL));
        for (double sigma : sweep.sigmas) {
            const auto nn_eval = finish_evaluation(
                smooth_and_score(nn_raw, sigma, grid, test), test, sweep.n_hotspots, 0);
            report.nn_configs.push_back({sigma, nn_eval.auc, nn_eval.per_taxon_auc});
            const auto km_eval = finish_evaluation(
                smooth_and_score(km_raw, sigma, grid, test), test, sweep.n_hotspots,
                report.kmeans_k);
            report.kmeans_configs.push_back({sigma, km_eval.auc, km_eval.per_taxon_auc});
        }
        auto by_auc = [](const BaselineEntry& a, const BaselineEntry& b) { return a.auc < b.auc; };
        report.nn_best =
            *std::max_element(report.nn_configs.begin(), report.nn_configs.end(), by_auc);
        report.kmeans_best =
            *std::max_element(report.kmeans_configs.begin(), report.kmeans_configs.end(), by_auc);
    }
    return report;
}

namespace {

using nlohmann::json;

json taxon_auc_json(const std::map<int, double>& per_taxon_auc) {
    json out = json::object();
    for (const auto& [taxon, auc] : per_taxon_auc) out[std::to_string(taxon)] = auc;
    return out;
}

json entry_json(const SweepEntry& e) {
    return {{"alpha", e.alpha},     {"beta", e.beta},
            {"gamma", e.gamma},     {"sigma", e.sigma},
            {"K_learned", e.k_learned}, {"auc", e.auc},
            {"per_taxon_auc", taxon_auc_json(e.per_taxon_auc)}};
}

json baseline_json(const BaselineEntry& e) {
    return {{"sigma", e.sigma}, {"auc", e.auc}, {"per_taxon_auc", taxon_auc_json(e.per_taxon_auc)}};
}

} // namespace

void write_sweep_json(const std::string& path, const SweepReport& report) {
    json j;
    j["regime"] = regime_name(report.regime);
    j["per_config"] = json::array();
    for (const SweepEntry& e : report.per_config) j["per_config"].push_back(entry_json(e));
    j["best"] = entry_json(report.best);
    if (report.with_baselines) {
        j["nn"] = {{"per_config", json::array()}, {"best", baseline_json(report.nn_best)}};
        for (const BaselineEntry& e : report.nn_configs) j["nn"]["per_config"].push_back(baseline_json(e));
        j["kmeans"] = {{"k", report.kmeans_k},
                       {"per_config", json::array()},
                       {"best", baseline_json(report.kmeans_best)}};
        for (const BaselineEntry& e : report.kmeans_configs)
            j["kmeans"]["per_config"].push_back(baseline_json(e));
    }
    write_text_atomic(path, j.dump(2) + "\n");
}

void write_pr_csv(const std::string& path, const std::string& strategy,
                  const StrategyEvaluation& eval) {
    std::ostringstream ss;
    ss << "strategy,taxon,tau,tp,fp,fn,tn,precision,recall\n";
    auto emit = [&](const std::string& taxon, const std::vector<PRPoint>& points) {
        for (const PRPoint& p : points)
            ss << strategy << ',' << taxon << ',' << format_double(p.tau) << ',' << p.tp << ','
               << p.fp << ',' << p.fn << ',' << p.tn << ',' << format_double(p.precision) << ','
               << format_double(p.recall) << '\n';
    };
    for (const auto& [taxon, points] : eval.per_taxon) emit(std::to_string(taxon), points);
    emit("all", eval.aggregated);
    write_text_atomic(path, ss.str());
}

} // namespace hotspot
