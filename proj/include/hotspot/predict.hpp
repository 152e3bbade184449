#pragma once

#include "hotspot/model.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace hotspot {

// Per-cell scalar values (e.g. predicted probability of a target taxon).
// Only covered cells are stored; there is no prediction elsewhere.
struct ScalarField {
    std::map<CellKey, double> values;
};

struct HotspotConfig {
    double sigma_m = 25000.0;
    double tau = 0.5;
    int target_taxon = 0;

    void validate() const;
};

// Taxon posterior with class v_star removed: columns cover the remaining
// V-1 classes in original order (column j is taxon j, shifted past v_star),
// each row renormalized over them. The result is unaffected by v_star's own
// counts.
CommunityMatrix heldout_phi(const TopicState& state, const Hyperparameters& h, int v_star);

// Gibbs assignment of test observations against a frozen model. Training
// counts never change; the taxon term is heldout_phi of the training counts,
// and the neighborhood term sums training-cell and test-cell counts. No new
// communities open at test time. Returns alpha-smoothed per-test-cell
// mixtures over the model's communities.
CellTopicField assign_test_topics(const Model& model,
                                  const std::vector<ObservationRecord>& test_records, int v_star,
                                  Rng& rng, int n_sweeps);

// P(target taxon | cell) = theta_c . phi[:, v_star].
ScalarField predict_target_field(const CellTopicField& theta_star,
                                 const CommunityMatrix& phi_full, int v_star);

// Spatial median filter over covered cells: each cell takes the median of
// covered-cell values whose centers lie inside the axis-aligned square of
// side sigma_m centered on it (within the same temporal slice). Missing
// cells are skipped; even windows take the mean of the two middle values.
// A sigma smaller than one cell width is the identity.
ScalarField median_smooth(const ScalarField& field, double sigma_m, const GridConfig& cfg);

// Single-threaded reference for median_smooth; same results.
ScalarField median_smooth_serial(const ScalarField& field, double sigma_m, const GridConfig& cfg);

// Cells whose value strictly exceeds tau.
std::set<CellKey> extract_hotspots(const ScalarField& field, double tau);

// CSV export, one row per covered cell, keys sorted. Header:
// t_idx,e_idx,n_idx,value (value column omitted for hotspot sets).
void write_field_csv(const std::string& path, const ScalarField& field);
void write_hotspots_csv(const std::string& path, const std::set<CellKey>& cells);

} // namespace hotspot
