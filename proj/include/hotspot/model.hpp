#pragma once

#include "hotspot/grid.hpp"
#include "hotspot/random.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace hotspot {

struct ObservationRecord {
    int taxon = 0;
    double time_s = 0.0;
    double easting_m = 0.0;
    double northing_m = 0.0;
    int sample_id = 0;

    Location location() const { return {time_s, easting_m, northing_m}; }
};

struct Hyperparameters {
    double alpha = 0.1;  // pseudo-count for known communities
    double beta = 0.1;   // symmetric Dirichlet concentration over taxa
    double gamma = 1e-5; // mass reserved for an unseen community

    void validate() const;
};

// Collapsed Gibbs state: per-observation community labels plus the count
// matrices they imply. Community ids are stable across pruning; dense row k
// of every count structure corresponds to topic_ids[k], kept sorted
// ascending. A pruned id is the first one reused when a new community opens.
//
// All mutating calls for one state must come from a single logical actor;
// the same GridConfig must be used for every call against a given state.
struct TopicState {
    int vocab_size = 0;
    std::vector<int> obs_taxon;
    std::vector<CellKey> obs_cell;
    std::vector<int> labels; // community id per observation, -1 = unassigned
    std::vector<int> topic_ids;
    std::vector<std::vector<long long>> topic_taxon_counts; // K x V
    std::vector<long long> topic_totals;                    // K
    std::map<CellKey, std::vector<long long>> cell_topic_counts;
    std::uint64_t rng_seed = 0;

    TopicState() = default;
    explicit TopicState(int vocab);

    int num_topics() const { return static_cast<int>(topic_ids.size()); }
    std::size_t size() const { return labels.size(); }
    long long labeled_count() const;

    // Dense row of a community id, -1 if the id is not live.
    int dense_index(int community_id) const;

    // Appends an unlabeled observation; call resample() on the returned
    // index to assign it.
    std::size_t add_observation(const ObservationRecord& rec, const GridConfig& cfg);

    // One collapsed Gibbs step for observation i: remove its counts, draw a
    // community from the full conditional (existing communities weighted by
    // neighborhood count + alpha times their taxon posterior, a fresh
    // community weighted by gamma times the uniform prior), then restore
    // counts and drop any community left empty.
    void resample(std::size_t i, const Hyperparameters& h, const GridConfig& cfg, Rng& rng);

  private:
    int open_community();
    void prune_empty();
    void increment(std::size_t i, int dense);
    void decrement(std::size_t i);
};

// Sum of per-cell community counts over the Von Neumann neighborhood of c.
// Cells without observations contribute zero.
std::vector<long long> neighborhood_topic_counts(const TopicState& state, const CellKey& c,
                                                 const GridConfig& cfg);

// Unnormalized CRP weights over the K live communities plus one slot for a
// new community: counts[k] + alpha, then gamma.
std::vector<double> topic_proposal_weights(const std::vector<long long>& neighborhood_counts,
                                           const Hyperparameters& h);

// Per-community taxon distributions, one row per live community.
struct CommunityMatrix {
    std::vector<std::vector<double>> phi; // K x V

    int num_topics() const { return static_cast<int>(phi.size()); }
    int num_classes() const { return phi.empty() ? 0 : static_cast<int>(phi.front().size()); }
};

struct CellTopicField {
    std::map<CellKey, std::vector<double>> theta;
};

// Dirichlet-smoothed taxon posterior: phi[k][v] = (N_k^v + beta) / (N_k + V beta).
CommunityMatrix phi_posterior(const TopicState& state, const Hyperparameters& h);

// Per-cell community mixture with additive alpha smoothing:
// theta[c][k] = (count + alpha) / (total + K alpha).
CellTopicField theta_field(const TopicState& state, const Hyperparameters& h);

// Streams a batch: one incremental Gibbs assignment per new observation,
// then refine_budget extra resamples of uniformly chosen past observations.
void online_step(TopicState& state, const std::vector<ObservationRecord>& batch,
                 const Hyperparameters& h, const GridConfig& cfg, Rng& rng,
                 long long refine_budget);

// Default budget: one refinement per new observation.
void online_step(TopicState& state, const std::vector<ObservationRecord>& batch,
                 const Hyperparameters& h, const GridConfig& cfg, Rng& rng);

struct TrainResult {
    TopicState state;
    CommunityMatrix phi;
    CellTopicField theta;
};

// One sequential incremental pass to initialize labels, then n_sweeps full
// Gibbs sweeps over all observations.
TrainResult batch_train(const std::vector<ObservationRecord>& records, int vocab_size,
                        const Hyperparameters& h, const GridConfig& cfg, Rng& rng, int n_sweeps);

// Convergence diagnostic: sum over observations of the log unnormalized
// full-conditional mass of their current label, with leave-one-out counts.
double log_joint(const TopicState& state, const Hyperparameters& h, const GridConfig& cfg);

// Empty string when every count invariant holds, else a description of the
// first violation found.
std::string check_state(const TopicState& state);

// A trained model frozen for prediction. Loaded snapshots carry counts but
// not per-observation labels.
struct Model {
    GridConfig grid;
    Hyperparameters hyper;
    std::vector<std::string> vocab_names;
    TopicState state;
    long long n_observations = 0;
};

} // namespace hotspot
