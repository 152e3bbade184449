#include "hotspot/predict.hpp"

#include "hotspot/io_util.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace hotspot {

void HotspotConfig::validate() const {
    if (!(sigma_m >= 0.0)) throw std::invalid_argument("sigma_m must be >= 0");
    if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("tau must be in [0,1]");
    if (target_taxon < 0) throw std::invalid_argument("taxon id out of range");
}

CommunityMatrix heldout_phi(const TopicState& state, const Hyperparameters& h, int v_star) {
    const int v_total = state.vocab_size;
    if (v_total < 2) throw std::invalid_argument("heldout_phi: needs at least two classes");
    if (v_star < 0 || v_star >= v_total) throw std::invalid_argument("taxon id out of range");

    CommunityMatrix out;
    const double beta_total = static_cast<double>(v_total - 1) * h.beta;
    out.phi.reserve(state.topic_ids.size());
    for (int k = 0; k < state.num_topics(); ++k) {
        const long long rest = state.topic_totals[k] - state.topic_taxon_counts[k][v_star];
        const double denom = static_cast<double>(rest) + beta_total;
        std::vector<double> row(static_cast<std::size_t>(v_total - 1));
        for (int v = 0; v < v_total; ++v) {
            if (v == v_star) continue;
            const int col = v < v_star ? v : v - 1;
            row[col] = (static_cast<double>(state.topic_taxon_counts[k][v]) + h.beta) / denom;
        }
        out.phi.push_back(std::move(row));
    }
    return out;
}

CellTopicField assign_test_topics(const Model& model,
                                  const std::vector<ObservationRecord>& test_records, int v_star,
                                  Rng& rng, int n_sweeps) {
    const TopicState& trained = model.state;
    const int k_live = trained.num_topics();
    const int v_total = trained.vocab_size;
    if (k_live < 1) throw std::invalid_argument("assign_test_topics: model has no communities");
    if (n_sweeps < 0) throw std::invalid_argument("n_sweeps must be >= 0");
    const CommunityMatrix hphi = heldout_phi(trained, model.hyper, v_star);

    std::vector<int> taxa;
    std::vector<CellKey> cells;
    taxa.reserve(test_records.size());
    cells.reserve(test_records.size());
    for (const ObservationRecord& rec : test_records) {
        if (rec.taxon == v_star)
            throw std::invalid_argument("assign_test_topics: test record contains held-out taxon");
        if (rec.taxon < 0 || rec.taxon >= v_total)
            throw std::invalid_argument("taxon id out of range");
        taxa.push_back(rec.taxon);
        cells.push_back(cell_of(rec.location(), model.grid));
    }
    if (test_records.empty()) return {};

    std::vector<int> test_labels(test_records.size(), -1); // dense indices
    std::map<CellKey, std::vector<long long>> test_counts;

    auto neighborhood_total = [&](const CellKey& c) {
        std::vector<long long> out(static_cast<std::size_t>(k_live), 0);
        for (const CellKey& cc : neighborhood(c, model.grid)) {
            if (auto it = trained.cell_topic_counts.find(cc); it != trained.cell_topic_counts.end())
                for (int k = 0; k < k_live; ++k) out[k] += it->second[k];
            if (auto it = test_counts.find(cc); it != test_counts.end())
                for (int k = 0; k < k_live; ++k) out[k] += it->second[k];
        }
        return out;
    };

    auto resample_one = [&](std::size_t i) {
        if (test_labels[i] >= 0) {
            auto it = test_counts.find(cells[i]);
            auto& vec = it->second;
            vec[test_labels[i]]--;
            if (std::all_of(vec.begin(), vec.end(), [](long long c) { return c == 0; }))
                test_counts.erase(it);
            test_labels[i] = -1;
        }
        const auto nbhd = neighborhood_total(cells[i]);
        const int col = taxa[i] < v_star ? taxa[i] : taxa[i] - 1;
        std::vector<double> w(static_cast<std::size_t>(k_live));
        for (int k = 0; k < k_live; ++k)
            w[k] = (static_cast<double>(nbhd[k]) + model.hyper.alpha) * hphi.phi[k][col];
        const int pick = sample_discrete(w, rng);
        test_labels[i] = pick;
        auto it = test_counts.find(cells[i]);
        if (it == test_counts.end())
            it = test_counts
                     .emplace(cells[i], std::vector<long long>(static_cast<std::size_t>(k_live), 0))
                     .first;
        it->second[pick]++;
    };

    for (std::size_t i = 0; i < test_records.size(); ++i) resample_one(i);
    for (int s = 0; s < n_sweeps; ++s)
        for (std::size_t i = 0; i < test_records.size(); ++i) resample_one(i);

    CellTopicField out;
    for (const auto& [cell, counts] : test_counts) {
        const long long total = std::accumulate(counts.begin(), counts.end(), 0LL);
        const double denom =
            static_cast<double>(total) + static_cast<double>(k_live) * model.hyper.alpha;
        std::vector<double> theta(static_cast<std::size_t>(k_live));
        for (int k = 0; k < k_live; ++k)
            theta[k] = (static_cast<double>(counts[k]) + model.hyper.alpha) / denom;
        out.theta.emplace(cell, std::move(theta));
    }
    return out;
}

ScalarField predict_target_field(const CellTopicField& theta_star, const CommunityMatrix& phi_full,
                                 int v_star) {
    const int k_live = phi_full.num_topics();
    if (v_star < 0 || v_star >= phi_full.num_classes())
        throw std::invalid_argument("taxon id out of range");
    ScalarField out;
    for (const auto& [cell, theta] : theta_star.theta) {
        if (static_cast<int>(theta.size()) != k_live)
            throw std::invalid_argument("predict_target_field: community count mismatch");
        double p = 0.0;
        for (int k = 0; k < k_live; ++k) p += theta[k] * phi_full.phi[k][v_star];
        out.values.emplace(cell, p);
    }
    return out;
}

namespace {

double window_median(const ScalarField& field, const CellKey& center, long long radius) {
    std::vector<double> window;
    for (long long de = -radius; de <= radius; ++de)
        for (long long dn = -radius; dn <= radius; ++dn) {
            auto it = field.values.find({center.t_idx, center.e_idx + de, center.n_idx + dn});
            if (it != field.values.end()) window.push_back(it->second);
        }
    const std::size_t mid = window.size() / 2;
    std::nth_element(window.begin(), window.begin() + mid, window.end());
    double median = window[mid];
    if (window.size() % 2 == 0) {
        std::nth_element(window.begin(), window.begin() + (mid - 1), window.end());
        median = (median + window[mid - 1]) / 2.0;
    }
    return median;
}

ScalarField median_smooth_impl(const ScalarField& field, double sigma_m, const GridConfig& cfg,
                               bool parallel) {
    cfg.validate();
    if (!(sigma_m >= 0.0)) throw std::invalid_argument("sigma_m must be >= 0");
    // Window membership is by cell-center containment in the sigma square.
    const long long radius = static_cast<long long>(std::floor(sigma_m / (2.0 * cfg.cell_size_m)));
    if (radius <= 0) return field;

    std::vector<const std::map<CellKey, double>::value_type*> cells;
    cells.reserve(field.values.size());
    for (const auto& kv : field.values) cells.push_back(&kv);
    std::vector<double> smoothed(cells.size());

#pragma omp parallel for schedule(dynamic, 16) if (parallel)
    for (std::size_t i = 0; i < cells.size(); ++i)
        smoothed[i] = window_median(field, cells[i]->first, radius);

    ScalarField out;
    for (std::size_t i = 0; i < cells.size(); ++i) out.values.emplace(cells[i]->first, smoothed[i]);
    return out;
}

} // namespace

ScalarField median_smooth(const ScalarField& field, double sigma_m, const GridConfig& cfg) {
    return median_smooth_impl(field, sigma_m, cfg, true);
}

ScalarField median_smooth_serial(const ScalarField& field, double sigma_m, const GridConfig& cfg) {
    return median_smooth_impl(field, sigma_m, cfg, false);
}

std::set<CellKey> extract_hotspots(const ScalarField& field, double tau) {
    std::set<CellKey> out;
    for (const auto& [cell, value] : field.values)
        if (value > tau) out.insert(cell);
    return out;
}

void write_field_csv(const std::string& path, const ScalarField& field) {
    std::ostringstream ss;
    ss << "t_idx,e_idx,n_idx,value\n";
    for (const auto& [cell, value] : field.values)
        ss << cell.t_idx << ',' << cell.e_idx << ',' << cell.n_idx << ','
           << format_double(value) << '\n';
    write_text_atomic(path, ss.str());
}

void write_hotspots_csv(const std::string& path, const std::set<CellKey>& cells) {
    std::ostringstream ss;
    ss << "t_idx,e_idx,n_idx\n";
    for (const CellKey& cell : cells)
        ss << cell.t_idx << ',' << cell.e_idx << ',' << cell.n_idx << '\n';
    write_text_atomic(path, ss.str());
}

} // namespace hotspot
