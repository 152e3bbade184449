#pragma once

#include "hotspot/baselines.hpp"
#include "hotspot/model.hpp"

#include <string>
#include <vector>

namespace hotspot {

struct SurveyDataset {
    std::vector<std::string> vocab_names;
    std::vector<SampleDistribution> samples;  // time-ordered
    std::vector<ObservationRecord> records;   // one record per counted detection
    std::size_t dropped_zero_rows = 0;

    int vocab_size() const { return static_cast<int>(vocab_names.size()); }
};

// Expands per-sample counts into individual observation records, taxa in
// ascending order within each sample.
std::vector<ObservationRecord> expand_records(const std::vector<SampleDistribution>& samples);

// Wide count table: header sample_id,time_s,easting_m,northing_m,<taxa...>.
// All-zero rows are dropped and counted in dropped_zero_rows. Parse errors
// name the offending line.
SurveyDataset load_counts_csv(const std::string& path);

// Geographic variant: header sample_id,time_s,lat_deg,lon_deg,<taxa...>.
// Coordinates are projected to meters about the first data row with an
// equirectangular projection scaled at ref_lat_deg (NaN = first row's
// latitude).
SurveyDataset load_latlon_csv(const std::string& path, double ref_lat_deg);

struct GeoReference {
    double lat0_deg = 0.0;
    double lon0_deg = 0.0;
    double ref_lat_deg = 0.0;
};

// Equirectangular projection: easting = R dlon cos(ref_lat), northing = R dlat.
Location geo_project(const GeoReference& ref, double lat_deg, double lon_deg, double time_s);
std::pair<double, double> geo_unproject(const GeoReference& ref, double easting_m,
                                        double northing_m);

// Taxon ids sorted by total count descending (ties to the lower id).
std::vector<int> most_frequent_taxa(const SurveyDataset& dataset, int n);

} // namespace hotspot
