#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace hotspot {

using Rng = std::mt19937_64;

// Draws an index with probability proportional to w[i]. Weights must be
// nonnegative with a positive total.
int sample_discrete(const std::vector<double>& w, Rng& rng);

// Symmetric Dirichlet draw of the given dimension.
std::vector<double> dirichlet_symmetric(int dim, double concentration, Rng& rng);

// Dirichlet draw with per-coordinate concentrations.
std::vector<double> dirichlet(const std::vector<double>& concentration, Rng& rng);

// Derives an independent stream seed from a base seed (splitmix64 mix).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

} // namespace hotspot
