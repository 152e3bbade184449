#include "hotspot/grid.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace hotspot {

void GridConfig::validate() const {
    if (!(cell_size_m > 0.0)) throw std::invalid_argument("cell_size_m must be > 0");
    if (!(cell_size_s >= 0.0)) throw std::invalid_argument("cell_size_s must be >= 0");
    if (neighborhood_depth < 0) throw std::invalid_argument("neighborhood_depth must be >= 0");
}

CellKey cell_of(const Location& loc, const GridConfig& cfg) {
    cfg.validate();
    if (!std::isfinite(loc.time_s) || !std::isfinite(loc.easting_m) || !std::isfinite(loc.northing_m))
        throw std::invalid_argument("cell_of: non-finite coordinate");
    CellKey key;
    key.t_idx = cfg.cell_size_s > 0.0
                    ? static_cast<std::int64_t>(std::floor(loc.time_s / cfg.cell_size_s))
                    : 0;
    key.e_idx = static_cast<std::int64_t>(std::floor(loc.easting_m / cfg.cell_size_m));
    key.n_idx = static_cast<std::int64_t>(std::floor(loc.northing_m / cfg.cell_size_m));
    return key;
}

std::vector<CellKey> neighborhood(const CellKey& c, const GridConfig& cfg) {
    cfg.validate();
    const int d = cfg.neighborhood_depth;
    const int dt_max = cfg.cell_size_s > 0.0 ? d : 0;
    std::vector<CellKey> out;
    for (int dt = -dt_max; dt <= dt_max; ++dt) {
        const int rem_e = d - std::abs(dt);
        for (int de = -rem_e; de <= rem_e; ++de) {
            const int rem_n = rem_e - std::abs(de);
            for (int dn = -rem_n; dn <= rem_n; ++dn)
                out.push_back({c.t_idx + dt, c.e_idx + de, c.n_idx + dn});
        }
    }
    return out;
}

} // namespace hotspot
