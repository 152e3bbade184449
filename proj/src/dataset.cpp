#include "hotspot/dataset.hpp"

#include "hotspot/io_util.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace hotspot {

namespace {

constexpr double kEarthRadiusM = 6371000.0;

[[noreturn]] void parse_fail(const std::string& path, std::size_t line_no,
                             const std::string& what) {
    std::ostringstream ss;
    ss << path << ": line " << line_no << ": " << what;
    throw std::runtime_error(ss.str());
}

double parse_double(const std::string& field, const std::string& path, std::size_t line_no) {
    double value = 0.0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), value);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size())
        parse_fail(path, line_no, "non-numeric field '" + field + "'");
    return value;
}

long long parse_count(const std::string& field, const std::string& path, std::size_t line_no) {
    long long value = 0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), value);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size())
        parse_fail(path, line_no, "non-numeric field '" + field + "'");
    if (value < 0) parse_fail(path, line_no, "negative count");
    return value;
}

struct RawRow {
    std::size_t line_no = 0;
    int sample_id = 0;
    double time_s = 0.0;
    double a = 0.0; // easting or latitude
    double b = 0.0; // northing or longitude
    std::vector<long long> counts;
};

// Shared parse path for both CSV layouts; only the meaning of the two
// coordinate columns differs.
std::pair<std::vector<std::string>, std::vector<RawRow>>
read_table(const std::string& path, const std::vector<std::string>& fixed_header) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    const auto header = split_csv_line(line);
    if (header.size() < fixed_header.size() + 1)
        parse_fail(path, 1, "malformed header: expected at least one taxon column");
    for (std::size_t i = 0; i < fixed_header.size(); ++i)
        if (header[i] != fixed_header[i])
            parse_fail(path, 1, "malformed header: expected column '" + fixed_header[i] +
                                    "', found '" + header[i] + "'");
    std::vector<std::string> vocab(header.begin() + fixed_header.size(), header.end());

    std::vector<RawRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != vocab.size() + fixed_header.size()) {
            std::ostringstream ss;
            ss << "expected " << vocab.size() + fixed_header.size() << " fields, found "
               << fields.size();
            parse_fail(path, line_no, ss.str());
        }
        RawRow row;
        row.line_no = line_no;
        row.sample_id = static_cast<int>(parse_count(fields[0], path, line_no));
        row.time_s = parse_double(fields[1], path, line_no);
        row.a = parse_double(fields[2], path, line_no);
        row.b = parse_double(fields[3], path, line_no);
        if (!std::isfinite(row.time_s) || !std::isfinite(row.a) || !std::isfinite(row.b))
            parse_fail(path, line_no, "non-finite coordinate");
        row.counts.reserve(vocab.size());
        for (std::size_t v = 0; v < vocab.size(); ++v)
            row.counts.push_back(parse_count(fields[fixed_header.size() + v], path, line_no));
        rows.push_back(std::move(row));
    }
    return {std::move(vocab), std::move(rows)};
}

SurveyDataset assemble(const std::string& path, std::vector<std::string> vocab,
                       std::vector<RawRow>& rows,
                       const std::function<Location(const RawRow&)>& to_location) {
    SurveyDataset ds;
    ds.vocab_names = std::move(vocab);
    std::set<int> seen_ids;
    for (RawRow& row : rows) {
        const long long total =
            std::accumulate(row.counts.begin(), row.counts.end(), 0LL);
        if (total == 0) {
            ds.dropped_zero_rows++;
            continue;
        }
        if (!seen_ids.insert(row.sample_id).second)
            parse_fail(path, row.line_no, "duplicate sample_id");
        ds.samples.push_back(
            SampleDistribution::from_counts(row.sample_id, to_location(row), std::move(row.counts)));
    }
    if (ds.samples.empty()) throw std::invalid_argument(path + ": no samples");
    std::stable_sort(ds.samples.begin(), ds.samples.end(),
                     [](const SampleDistribution& x, const SampleDistribution& y) {
                         return x.location.time_s < y.location.time_s;
                     });
    ds.records = expand_records(ds.samples);
    return ds;
}

} // namespace

std::vector<ObservationRecord> expand_records(const std::vector<SampleDistribution>& samples) {
    std::vector<ObservationRecord> records;
    for (const SampleDistribution& s : samples)
        for (int v = 0; v < s.num_classes(); ++v)
            for (long long c = 0; c < s.counts[v]; ++c)
                records.push_back({v, s.location.time_s, s.location.easting_m,
                                   s.location.northing_m, s.sample_id});
    return records;
}

SurveyDataset load_counts_csv(const std::string& path) {
    auto [vocab, rows] =
        read_table(path, {"sample_id", "time_s", "easting_m", "northing_m"});
    return assemble(path, std::move(vocab), rows, [](const RawRow& r) {
        return Location{r.time_s, r.a, r.b};
    });
}

SurveyDataset load_latlon_csv(const std::string& path, double ref_lat_deg) {
    auto [vocab, rows] = read_table(path, {"sample_id", "time_s", "lat_deg", "lon_deg"});
    for (const RawRow& r : rows) {
        if (std::abs(r.a) > 90.0) parse_fail(path, r.line_no, "latitude out of range");
        if (std::abs(r.b) > 180.0) parse_fail(path, r.line_no, "longitude out of range");
    }
    if (rows.empty()) throw std::invalid_argument(path + ": no samples");
    GeoReference ref;
    ref.lat0_deg = rows.front().a;
    ref.lon0_deg = rows.front().b;
    ref.ref_lat_deg = std::isnan(ref_lat_deg) ? ref.lat0_deg : ref_lat_deg;
    return assemble(path, std::move(vocab), rows, [&ref](const RawRow& r) {
        return geo_project(ref, r.a, r.b, r.time_s);
    });
}

Location geo_project(const GeoReference& ref, double lat_deg, double lon_deg, double time_s) {
    constexpr double deg = std::numbers::pi / 180.0;
    Location loc;
    loc.time_s = time_s;
    loc.easting_m = kEarthRadiusM * (lon_deg - ref.lon0_deg) * deg * std::cos(ref.ref_lat_deg * deg);
    loc.northing_m = kEarthRadiusM * (lat_deg - ref.lat0_deg) * deg;
    return loc;
}

std::pair<double, double> geo_unproject(const GeoReference& ref, double easting_m,
                                        double northing_m) {
    constexpr double deg = std::numbers::pi / 180.0;
    const double lat = ref.lat0_deg + northing_m / (kEarthRadiusM * deg);
    const double lon =
        ref.lon0_deg + easting_m / (kEarthRadiusM * deg * std::cos(ref.ref_lat_deg * deg));
    return {lat, lon};
}

std::vector<int> most_frequent_taxa(const SurveyDataset& dataset, int n) {
    std::vector<long long> totals(static_cast<std::size_t>(dataset.vocab_size()), 0);
    for (const SampleDistribution& s : dataset.samples)
        for (int v = 0; v < s.num_classes(); ++v) totals[v] += s.counts[v];
    std::vector<int> order(totals.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return totals[a] > totals[b]; });
    order.resize(std::min<std::size_t>(order.size(), static_cast<std::size_t>(std::max(n, 0))));
    return order;
}

} // namespace hotspot
