#include "hotspot/synthetic.hpp"

#include "hotspot/io_util.hpp"

#include <sstream>
#include <stdexcept>

namespace hotspot {

void SynthSpec::validate() const {
    if (n_communities < 1 || vocab_size < 1 || n_cells < 1 || obs_per_cell < 1)
        throw std::invalid_argument("synth spec: sizes must be >= 1");
    if (!(phi_concentration > 0.0) || !(theta_concentration > 0.0))
        throw std::invalid_argument("synth spec: concentrations must be > 0");
    if (!(spatial_smoothness >= 0.0 && spatial_smoothness <= 1.0))
        throw std::invalid_argument("synth spec: spatial_smoothness must be in [0,1]");
}

namespace {

constexpr double kTrackStepM = 5000.0;
constexpr double kTrackStepS = 60.0;

SyntheticData generate(const SynthSpec& spec, double theta_conc_first, double theta_conc_second,
                       int duplicate_span) {
    spec.validate();
    if (!(theta_conc_first > 0.0) || !(theta_conc_second > 0.0))
        throw std::invalid_argument("synth spec: concentrations must be > 0");
    if (duplicate_span < 1) throw std::invalid_argument("synth spec: duplicate_span must be >= 1");
    Rng rng(spec.seed);

    SyntheticData out;
    out.phi_true.reserve(static_cast<std::size_t>(spec.n_communities));
    for (int k = 0; k < spec.n_communities; ++k)
        out.phi_true.push_back(dirichlet_symmetric(spec.vocab_size, spec.phi_concentration, rng));

    std::vector<std::vector<double>> raw;
    raw.reserve(static_cast<std::size_t>(spec.n_cells));
    for (int i = 0; i < spec.n_cells; ++i) {
        if (i % duplicate_span != 0) {
            raw.push_back(raw.back());
            continue;
        }
        const double conc = i < spec.n_cells / 2 ? theta_conc_first : theta_conc_second;
        raw.push_back(dirichlet_symmetric(spec.n_communities, conc, rng));
    }

    // Blend each cell's raw mixture with the mean of its track neighbors;
    // convex weights keep the result normalized.
    const double s = spec.spatial_smoothness;
    out.theta_true.resize(raw.size());
    for (int i = 0; i < spec.n_cells; ++i) {
        std::vector<double> theta(static_cast<std::size_t>(spec.n_communities), 0.0);
        std::vector<const std::vector<double>*> nbrs;
        if (i > 0) nbrs.push_back(&raw[i - 1]);
        if (i + 1 < spec.n_cells) nbrs.push_back(&raw[i + 1]);
        for (int k = 0; k < spec.n_communities; ++k) {
            double nb = 0.0;
            for (const auto* v : nbrs) nb += (*v)[k];
            if (!nbrs.empty()) nb /= static_cast<double>(nbrs.size());
            theta[k] = nbrs.empty() ? raw[i][k] : (1.0 - s) * raw[i][k] + s * nb;
        }
        out.theta_true[i] = std::move(theta);
    }

    out.dataset.vocab_names.reserve(static_cast<std::size_t>(spec.vocab_size));
    for (int v = 0; v < spec.vocab_size; ++v)
        out.dataset.vocab_names.push_back("taxon_" + std::to_string(v));

    for (int i = 0; i < spec.n_cells; ++i) {
        std::vector<long long> counts(static_cast<std::size_t>(spec.vocab_size), 0);
        for (int o = 0; o < spec.obs_per_cell; ++o) {
            const int k = sample_discrete(out.theta_true[i], rng);
            const int v = sample_discrete(out.phi_true[k], rng);
            counts[v]++;
        }
        const Location loc{static_cast<double>(i) * kTrackStepS,
                           static_cast<double>(i) * kTrackStepM, 0.0};
        out.dataset.samples.push_back(SampleDistribution::from_counts(i, loc, std::move(counts)));
    }
    out.dataset.records = expand_records(out.dataset.samples);
    return out;
}

} // namespace

SyntheticData generate_synthetic(const SynthSpec& spec) {
    return generate(spec, spec.theta_concentration, spec.theta_concentration, 1);
}

SyntheticData generate_synthetic_two_regime(const SynthSpec& spec,
                                            double theta_concentration_second_half,
                                            int duplicate_span) {
    return generate(spec, spec.theta_concentration, theta_concentration_second_half,
                    duplicate_span);
}

std::string dataset_to_csv(const SurveyDataset& dataset) {
    std::ostringstream ss;
    ss << "sample_id,time_s,easting_m,northing_m";
    for (const std::string& name : dataset.vocab_names) ss << ',' << name;
    ss << '\n';
    for (const SampleDistribution& s : dataset.samples) {
        ss << s.sample_id << ',' << format_double(s.location.time_s) << ','
           << format_double(s.location.easting_m) << ',' << format_double(s.location.northing_m);
        for (long long c : s.counts) ss << ',' << c;
        ss << '\n';
    }
    return ss.str();
}

} // namespace hotspot
