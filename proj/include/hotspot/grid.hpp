#pragma once

#include <compare>
#include <cstdint>
#include <vector>

namespace hotspot {

// Spatio-temporal discretization. cell_size_s == 0 collapses the temporal
// axis into a single global cell.
struct GridConfig {
    double cell_size_m = 5000.0;
    double cell_size_s = 0.0;
    int neighborhood_depth = 1;

    void validate() const;
};

struct CellKey {
    std::int64_t t_idx = 0;
    std::int64_t e_idx = 0;
    std::int64_t n_idx = 0;

    auto operator<=>(const CellKey&) const = default;
};

struct Location {
    double time_s = 0.0;
    double easting_m = 0.0;
    double northing_m = 0.0;
};

// Floor-divided cell indices of a location. t_idx is 0 when the temporal
// axis is disabled.
CellKey cell_of(const Location& loc, const GridConfig& cfg);

// Von Neumann neighborhood of c: every cell within Manhattan distance
// cfg.neighborhood_depth over the active axes, including c itself. The
// temporal axis participates only when cell_size_s > 0. Cells are distinct.
std::vector<CellKey> neighborhood(const CellKey& c, const GridConfig& cfg);

} // namespace hotspot
