#pragma once

#include "hotspot/dataset.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hotspot {

// Generative recipe for synthetic survey data: communities drawn from a
// symmetric Dirichlet over taxa, one sample per cell along a 1D track of
// 5 km steps, per-cell community mixtures blended with their track
// neighbors.
struct SynthSpec {
    int n_communities = 5;
    int vocab_size = 20;
    int n_cells = 200;
    int obs_per_cell = 100;
    double phi_concentration = 0.1;
    double theta_concentration = 0.5;
    double spatial_smoothness = 0.5; // blending weight of a cell's mixture with its neighbors'
    std::uint64_t seed = 0;

    void validate() const;
};

struct SyntheticData {
    SurveyDataset dataset;
    std::vector<std::vector<double>> phi_true;   // K x V
    std::vector<std::vector<double>> theta_true; // per cell, K
};

SyntheticData generate_synthetic(const SynthSpec& spec);

// Variant with a different mixture concentration for the second half of the
// track; communities are shared across the whole track. Useful for datasets
// whose two halves exhibit different mixing regimes. duplicate_span > 1
// draws one mixture per span of consecutive cells, giving the track the
// near-duplicate-neighbor character of densely sampled surveys.
SyntheticData generate_synthetic_two_regime(const SynthSpec& spec,
                                            double theta_concentration_second_half,
                                            int duplicate_span = 1);

// Counts-CSV text of a dataset (the load_counts_csv layout).
std::string dataset_to_csv(const SurveyDataset& dataset);

} // namespace hotspot
