#include "hotspot/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hotspot {

void Hyperparameters::validate() const {
    if (!(alpha > 0.0) || !(beta > 0.0) || !(gamma > 0.0))
        throw std::invalid_argument("hyperparameters alpha, beta, gamma must be > 0");
}

TopicState::TopicState(int vocab) : vocab_size(vocab) {
    if (vocab < 1) throw std::invalid_argument("vocab_size must be >= 1");
}

long long TopicState::labeled_count() const {
    return static_cast<long long>(
        std::count_if(labels.begin(), labels.end(), [](int z) { return z >= 0; }));
}

int TopicState::dense_index(int community_id) const {
    auto it = std::lower_bound(topic_ids.begin(), topic_ids.end(), community_id);
    if (it == topic_ids.end() || *it != community_id) return -1;
    return static_cast<int>(it - topic_ids.begin());
}

std::size_t TopicState::add_observation(const ObservationRecord& rec, const GridConfig& cfg) {
    if (rec.taxon < 0 || rec.taxon >= vocab_size)
        throw std::invalid_argument("taxon id out of range");
    obs_taxon.push_back(rec.taxon);
    obs_cell.push_back(cell_of(rec.location(), cfg));
    labels.push_back(-1);
    return labels.size() - 1;
}

int TopicState::open_community() {
    // Smallest unused id; topic_ids stays sorted, so the insert position
    // equals the id's rank.
    int id = 0;
    int pos = 0;
    for (int t : topic_ids) {
        if (t != id) break;
        ++id;
        ++pos;
    }
    topic_ids.insert(topic_ids.begin() + pos, id);
    topic_taxon_counts.insert(topic_taxon_counts.begin() + pos,
                              std::vector<long long>(static_cast<std::size_t>(vocab_size), 0));
    topic_totals.insert(topic_totals.begin() + pos, 0);
    for (auto& [cell, vec] : cell_topic_counts) vec.insert(vec.begin() + pos, 0);
    return pos;
}

void TopicState::prune_empty() {
    for (int k = num_topics() - 1; k >= 0; --k) {
        if (topic_totals[k] != 0) continue;
        topic_ids.erase(topic_ids.begin() + k);
        topic_taxon_counts.erase(topic_taxon_counts.begin() + k);
        topic_totals.erase(topic_totals.begin() + k);
        for (auto& [cell, vec] : cell_topic_counts) vec.erase(vec.begin() + k);
    }
}

void TopicState::increment(std::size_t i, int dense) {
    topic_taxon_counts[dense][static_cast<std::size_t>(obs_taxon[i])]++;
    topic_totals[dense]++;
    auto it = cell_topic_counts.find(obs_cell[i]);
    if (it == cell_topic_counts.end())
        it = cell_topic_counts
                 .emplace(obs_cell[i],
                          std::vector<long long>(static_cast<std::size_t>(num_topics()), 0))
                 .first;
    it->second[dense]++;
}

void TopicState::decrement(std::size_t i) {
    const int dense = dense_index(labels[i]);
    if (dense < 0) throw std::logic_error("decrement: label not live");
    topic_taxon_counts[dense][static_cast<std::size_t>(obs_taxon[i])]--;
    topic_totals[dense]--;
    auto it = cell_topic_counts.find(obs_cell[i]);
    auto& vec = it->second;
    vec[dense]--;
    if (std::all_of(vec.begin(), vec.end(), [](long long c) { return c == 0; }))
        cell_topic_counts.erase(it);
    labels[i] = -1;
}

void TopicState::resample(std::size_t i, const Hyperparameters& h, const GridConfig& cfg,
                          Rng& rng) {
    if (i >= labels.size()) throw std::invalid_argument("resample: index out of range");
    if (labels[i] >= 0) decrement(i);

    const int v = obs_taxon[i];
    const auto crp = topic_proposal_weights(neighborhood_topic_counts(*this, obs_cell[i], cfg), h);
    const int k_live = num_topics();
    const double beta_total = static_cast<double>(vocab_size) * h.beta;

    std::vector<double> weights(static_cast<std::size_t>(k_live) + 1);
    for (int k = 0; k < k_live; ++k) {
        const double phi_term = (static_cast<double>(topic_taxon_counts[k][v]) + h.beta) /
                                (static_cast<double>(topic_totals[k]) + beta_total);
        weights[k] = crp[k] * phi_term;
    }
    weights[k_live] = crp[k_live] / static_cast<double>(vocab_size);

    int pick = sample_discrete(weights, rng);
    if (pick == k_live) pick = open_community();
    labels[i] = topic_ids[pick];
    increment(i, pick);
    prune_empty();
}

std::vector<long long> neighborhood_topic_counts(const TopicState& state, const CellKey& c,
                                                 const GridConfig& cfg) {
    std::vector<long long> out(static_cast<std::size_t>(state.num_topics()), 0);
    for (const CellKey& cc : neighborhood(c, cfg)) {
        auto it = state.cell_topic_counts.find(cc);
        if (it == state.cell_topic_counts.end()) continue;
        for (std::size_t k = 0; k < out.size(); ++k) out[k] += it->second[k];
    }
    return out;
}

std::vector<double> topic_proposal_weights(const std::vector<long long>& neighborhood_counts,
                                           const Hyperparameters& h) {
    std::vector<double> w(neighborhood_counts.size() + 1);
    for (std::size_t k = 0; k < neighborhood_counts.size(); ++k)
        w[k] = static_cast<double>(neighborhood_counts[k]) + h.alpha;
    w.back() = h.gamma;
    return w;
}

CommunityMatrix phi_posterior(const TopicState& state, const Hyperparameters& h) {
    CommunityMatrix out;
    const double beta_total = static_cast<double>(state.vocab_size) * h.beta;
    out.phi.reserve(state.topic_ids.size());
    for (int k = 0; k < state.num_topics(); ++k) {
        std::vector<double> row(static_cast<std::size_t>(state.vocab_size));
        const double denom = static_cast<double>(state.topic_totals[k]) + beta_total;
        for (int v = 0; v < state.vocab_size; ++v)
            row[v] = (static_cast<double>(state.topic_taxon_counts[k][v]) + h.beta) / denom;
        out.phi.push_back(std::move(row));
    }
    return out;
}

CellTopicField theta_field(const TopicState& state, const Hyperparameters& h) {
    CellTopicField out;
    const int k_live = state.num_topics();
    for (const auto& [cell, counts] : state.cell_topic_counts) {
        const long long total = std::accumulate(counts.begin(), counts.end(), 0LL);
        std::vector<double> theta(static_cast<std::size_t>(k_live));
        const double denom = static_cast<double>(total) + static_cast<double>(k_live) * h.alpha;
        for (int k = 0; k < k_live; ++k)
            theta[k] = (static_cast<double>(counts[k]) + h.alpha) / denom;
        out.theta.emplace(cell, std::move(theta));
    }
    return out;
}

void online_step(TopicState& state, const std::vector<ObservationRecord>& batch,
                 const Hyperparameters& h, const GridConfig& cfg, Rng& rng,
                 long long refine_budget) {
    if (refine_budget < 0) throw std::invalid_argument("refine_budget must be >= 0");
    for (const ObservationRecord& rec : batch) {
        const std::size_t i = state.add_observation(rec, cfg);
        state.resample(i, h, cfg, rng);
    }
    if (state.size() == 0) return;
    std::uniform_int_distribution<std::size_t> pick(0, state.size() - 1);
    for (long long r = 0; r < refine_budget; ++r) state.resample(pick(rng), h, cfg, rng);
}

void online_step(TopicState& state, const std::vector<ObservationRecord>& batch,
                 const Hyperparameters& h, const GridConfig& cfg, Rng& rng) {
    online_step(state, batch, h, cfg, rng, static_cast<long long>(batch.size()));
}

TrainResult batch_train(const std::vector<ObservationRecord>& records, int vocab_size,
                        const Hyperparameters& h, const GridConfig& cfg, Rng& rng, int n_sweeps) {
    if (records.empty()) throw std::invalid_argument("batch_train: empty record list");
    if (n_sweeps < 1) throw std::invalid_argument("batch_train: n_sweeps must be >= 1");
    h.validate();
    cfg.validate();

    TopicState state(vocab_size);
    for (const ObservationRecord& rec : records) {
        const std::size_t i = state.add_observation(rec, cfg);
        state.resample(i, h, cfg, rng);
    }
    for (int s = 0; s < n_sweeps; ++s)
        for (std::size_t i = 0; i < state.size(); ++i) state.resample(i, h, cfg, rng);

    TrainResult out;
    out.phi = phi_posterior(state, h);
    out.theta = theta_field(state, h);
    out.state = std::move(state);
    return out;
}

double log_joint(const TopicState& state, const Hyperparameters& h, const GridConfig& cfg) {
    // Leave-one-out counts are formed arithmetically: the observation's own
    // cell is always inside its neighborhood, so subtracting one from the
    // label's entries is exact.
    double total = 0.0;
    const double beta_total = static_cast<double>(state.vocab_size) * h.beta;
    for (std::size_t i = 0; i < state.size(); ++i) {
        if (state.labels[i] < 0) continue;
        const int k = state.dense_index(state.labels[i]);
        const int v = state.obs_taxon[i];
        const auto nbhd = neighborhood_topic_counts(state, state.obs_cell[i], cfg);
        const double crp_term = static_cast<double>(nbhd[k] - 1) + h.alpha;
        const double phi_term =
            (static_cast<double>(state.topic_taxon_counts[k][v] - 1) + h.beta) /
            (static_cast<double>(state.topic_totals[k] - 1) + beta_total);
        total += std::log(crp_term * phi_term);
    }
    return total;
}

std::string check_state(const TopicState& state) {
    const int k_live = state.num_topics();
    if (!std::is_sorted(state.topic_ids.begin(), state.topic_ids.end()))
        return "topic ids not sorted";
    if (static_cast<int>(state.topic_taxon_counts.size()) != k_live ||
        static_cast<int>(state.topic_totals.size()) != k_live)
        return "count structure sizes disagree";

    long long grand_total = 0;
    for (int k = 0; k < k_live; ++k) {
        const auto& row = state.topic_taxon_counts[k];
        if (static_cast<int>(row.size()) != state.vocab_size) return "row width != vocab_size";
        const long long row_sum = std::accumulate(row.begin(), row.end(), 0LL);
        if (row_sum != state.topic_totals[k]) return "row sum != topic total";
        if (state.topic_totals[k] <= 0) return "live community with nonpositive total";
        grand_total += state.topic_totals[k];
    }
    if (grand_total != state.labeled_count()) return "topic totals != labeled observation count";

    std::map<CellKey, long long> cell_obs;
    for (std::size_t i = 0; i < state.size(); ++i) {
        if (state.labels[i] < 0) continue;
        if (state.dense_index(state.labels[i]) < 0) return "label references dead community";
        cell_obs[state.obs_cell[i]]++;
    }
    if (cell_obs.size() != state.cell_topic_counts.size()) return "cell map covers wrong cells";
    for (const auto& [cell, counts] : state.cell_topic_counts) {
        if (static_cast<int>(counts.size()) != k_live) return "cell vector width != K";
        const long long cell_sum = std::accumulate(counts.begin(), counts.end(), 0LL);
        auto it = cell_obs.find(cell);
        if (it == cell_obs.end() || it->second != cell_sum)
            return "cell count sum != observations in cell";
        for (long long c : counts)
            if (c < 0) return "negative cell count";
    }
    return {};
}

} // namespace hotspot
