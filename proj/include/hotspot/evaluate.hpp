#pragma once

#include "hotspot/dataset.hpp"
#include "hotspot/predict.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace hotspot {

enum class SplitRegime { interleaved, halves };

SplitRegime parse_regime(const std::string& name);
std::string regime_name(SplitRegime regime);

// Interleaved: even indices train, odd test. Halves: first ceil(N/2) train.
std::pair<std::vector<SampleDistribution>, std::vector<SampleDistribution>>
split_samples(const std::vector<SampleDistribution>& samples, SplitRegime regime);

// The n test samples with the highest relative abundance of v_star; ties at
// the cutoff go to the earlier time.
std::set<int> ground_truth_hotspots(const std::vector<SampleDistribution>& test, int v_star,
                                    int n);

struct PRPoint {
    double tau = 0.0;
    long long tp = 0;
    long long fp = 0;
    long long fn = 0;
    long long tn = 0;
    double precision = 0.0; // tp/(tp+fp); 1 when nothing is predicted
    double recall = 0.0;    // tp/(tp+fn); 0 when truth is empty
};

// One PRPoint per threshold, predicting ids whose score strictly exceeds it.
std::vector<PRPoint> score_predictions(const std::map<int, double>& scores,
                                       const std::set<int>& truth,
                                       const std::vector<double>& thresholds);

// Micro-average: sums the confusion counts per threshold across taxa, then
// recomputes precision and recall. Threshold grids must be aligned.
std::vector<PRPoint> aggregate_pr(const std::vector<std::vector<PRPoint>>& per_taxon);

// Trapezoidal area of precision over recall on the recall-sorted sequence,
// keeping the best precision per distinct recall. 0 with fewer than two
// distinct recall values.
double auc_pr(std::vector<PRPoint> points);

struct SweepConfig {
    std::vector<double> alphas{0.001, 0.01, 0.1, 0.5, 1.0};
    std::vector<double> betas{0.001, 0.01, 0.1, 0.5, 1.0};
    std::vector<double> gammas{1e-6, 1e-5, 1e-4};
    std::vector<double> sigmas{15000.0, 25000.0, 35000.0};
    int n_hotspots = 50;
    std::vector<int> target_taxa;

    void validate() const;
};

// Best configurations previously selected on the Pisces 14-05 cruise data;
// kept as reference points for the optional real-data regression check. The
// default SweepConfig grids contain both.
inline constexpr struct {
    double alpha, beta, gamma, sigma_m;
    int k_learned;
} kCruiseBestInterleaved{0.1, 0.1, 1e-5, 25000.0, 9}, kCruiseBestSplit{0.1, 1.0, 1e-5, 35000.0, 6};

enum class Strategy { topic, nn, kmeans };

Strategy parse_strategy(const std::string& name);
std::string strategy_name(Strategy strategy);

struct StrategyParams {
    Hyperparameters hyper;
    double sigma_m = 25000.0;
    int train_sweeps = 50;
    int test_sweeps = 10;
    int kmeans_k = 0; // required for Strategy::kmeans
    int kmeans_restarts = 10;
};

struct StrategyEvaluation {
    std::map<int, std::vector<PRPoint>> per_taxon;
    std::vector<PRPoint> aggregated;
    double auc = 0.0;
    std::map<int, double> per_taxon_auc;
    int k_learned = 0;
};

// Full pipeline for one strategy: split, per-taxon held-out prediction,
// per-cell field, median smoothing, sample-level PR scoring against the
// top-n ground truth, micro-aggregation. Deterministic under seed.
StrategyEvaluation evaluate_strategy(const SurveyDataset& dataset, SplitRegime regime,
                                     Strategy strategy, const StrategyParams& params,
                                     const std::vector<int>& targets, int n_hotspots,
                                     const GridConfig& grid, std::uint64_t seed);

struct SweepEntry {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double sigma = 0.0;
    int k_learned = 0;
    double auc = 0.0;
    std::map<int, double> per_taxon_auc;
};

struct BaselineEntry {
    double sigma = 0.0;
    double auc = 0.0;
    std::map<int, double> per_taxon_auc;
};

struct SweepReport {
    SplitRegime regime = SplitRegime::interleaved;
    std::vector<SweepEntry> per_config;
    SweepEntry best;
    bool with_baselines = false;
    int kmeans_k = 0;
    std::vector<BaselineEntry> nn_configs;
    BaselineEntry nn_best;
    std::vector<BaselineEntry> kmeans_configs;
    BaselineEntry kmeans_best;
};

// Trains one topic model per (alpha, beta, gamma), scores every sigma on it,
// and selects the configuration with the highest micro-aggregated AUC.
// Baselines sweep sigma with the k-means centroid count taken from the best
// topic configuration. budget > 0 caps the number of (alpha,beta,gamma,sigma)
// combinations by deterministic, evenly spaced subsampling. Configurations
// run in parallel with independent derived seeds.
SweepReport run_sweep(const SurveyDataset& dataset, SplitRegime regime, const SweepConfig& sweep,
                      bool with_baselines, const GridConfig& grid, std::uint64_t seed,
                      std::size_t budget, int train_sweeps = 50, int test_sweeps = 10);

void write_sweep_json(const std::string& path, const SweepReport& report);

// Rows: strategy,taxon,tau,tp,fp,fn,tn,precision,recall. Per-taxon curves in
// target order, then the aggregated curve with taxon "all".
void write_pr_csv(const std::string& path, const std::string& strategy,
                  const StrategyEvaluation& eval);

} // namespace hotspot
