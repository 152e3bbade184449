#include "hotspot/cli.hpp"

#include "hotspot/evaluate.hpp"
#include "hotspot/io_util.hpp"
#include "hotspot/model_io.hpp"
#include "hotspot/synthetic.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

namespace hotspot {

namespace {

using nlohmann::json;

std::uint64_t default_seed() {
    const char* env = std::getenv("HOTSPOT_SEED");
    if (!env) return 0;
    std::uint64_t seed = 0;
    const std::string s(env);
    auto res = std::from_chars(s.data(), s.data() + s.size(), seed);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw std::invalid_argument("HOTSPOT_SEED is not an unsigned integer");
    return seed;
}

// Header sniffing: both ingestion formats share the first two columns.
SurveyDataset load_dataset(const std::string& path, double ref_lat) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string header;
    std::getline(in, header);
    in.close();
    const auto fields = split_csv_line(header);
    if (fields.size() >= 4 && fields[2] == "lat_deg" && fields[3] == "lon_deg")
        return load_latlon_csv(path, ref_lat);
    return load_counts_csv(path);
}

void report_dropped(const SurveyDataset& ds) {
    if (ds.dropped_zero_rows > 0)
        std::cerr << "warning: dropped " << ds.dropped_zero_rows << " all-zero sample row(s)\n";
}

// "top8" style or an explicit comma-separated id list.
std::vector<int> parse_targets(const std::string& spec, const SurveyDataset& ds) {
    if (spec.rfind("top", 0) == 0) {
        int n = 0;
        const std::string rest = spec.substr(3);
        auto res = std::from_chars(rest.data(), rest.data() + rest.size(), n);
        if (res.ec != std::errc{} || res.ptr != rest.data() + rest.size() || n < 1)
            throw std::invalid_argument("bad --targets value '" + spec + "'");
        return most_frequent_taxa(ds, n);
    }
    std::vector<int> out;
    std::size_t begin = 0;
    while (begin <= spec.size()) {
        const std::size_t end = std::min(spec.find(',', begin), spec.size());
        int v = 0;
        auto res = std::from_chars(spec.data() + begin, spec.data() + end, v);
        if (res.ec != std::errc{} || res.ptr != spec.data() + end)
            throw std::invalid_argument("bad --targets value '" + spec + "'");
        out.push_back(v);
        begin = end + 1;
    }
    for (int v : out)
        if (v < 0 || v >= ds.vocab_size()) throw std::invalid_argument("taxon id out of range");
    return out;
}

std::vector<SampleDistribution> regime_train_samples(const SurveyDataset& ds,
                                                     const std::string& regime) {
    if (regime == "all") return ds.samples;
    return split_samples(ds.samples, parse_regime(regime)).first;
}

struct TrainArgs {
    std::string input;
    std::string regime = "all";
    double alpha = 0.1, beta = 0.1, gamma = 1e-5;
    double cell_size = 5000.0, cell_size_t = 0.0;
    int depth = 1;
    int sweeps = 50;
    std::uint64_t seed = 0;
    double ref_lat = std::numeric_limits<double>::quiet_NaN();
    std::string out_model;
};

int cmd_train(const TrainArgs& a) {
    SurveyDataset ds = load_dataset(a.input, a.ref_lat);
    report_dropped(ds);
    const auto train = regime_train_samples(ds, a.regime);
    GridConfig grid{a.cell_size, a.cell_size_t, a.depth};
    Hyperparameters hyper{a.alpha, a.beta, a.gamma};
    hyper.validate();
    Rng rng(a.seed);
    auto result = batch_train(expand_records(train), ds.vocab_size(), hyper, grid, rng, a.sweeps);

    Model model;
    model.grid = grid;
    model.hyper = hyper;
    model.vocab_names = ds.vocab_names;
    model.n_observations = static_cast<long long>(result.state.size());
    model.state = std::move(result.state);
    model.state.rng_seed = a.seed;
    save_model(model, a.out_model);
    std::cout << "trained on " << train.size() << " samples (" << model.n_observations
              << " observations), K=" << model.state.num_topics() << ", log_joint="
              << format_double(log_joint(model.state, hyper, grid)) << "\nmodel written to "
              << a.out_model << "\n";
    return 0;
}

struct PredictArgs {
    std::string model_path;
    std::string input;
    int target_taxon = 0;
    double sigma = 25000.0;
    double tau = 0.5;
    int sweeps = 10;
    std::uint64_t seed = 0;
    double ref_lat = std::numeric_limits<double>::quiet_NaN();
    std::string out_field;
    std::string out_hotspots;
};

int cmd_predict(const PredictArgs& a) {
    const Model model = load_model(a.model_path);
    SurveyDataset ds = load_dataset(a.input, a.ref_lat);
    report_dropped(ds);
    if (ds.vocab_size() != model.state.vocab_size)
        throw std::invalid_argument("input taxa count does not match the model vocabulary");
    if (a.target_taxon < 0 || a.target_taxon >= model.state.vocab_size)
        throw std::invalid_argument("taxon id out of range");
    HotspotConfig hotspot{a.sigma, a.tau, a.target_taxon};
    hotspot.validate();

    std::vector<ObservationRecord> records = ds.records;
    const std::size_t before = records.size();
    std::erase_if(records,
                  [&](const ObservationRecord& r) { return r.taxon == a.target_taxon; });
    if (before != records.size())
        std::cerr << "note: excluded " << before - records.size()
                  << " direct observation(s) of the target taxon\n";

    Rng rng(a.seed);
    const auto theta_star = assign_test_topics(model, records, a.target_taxon, rng, a.sweeps);
    const auto phi = phi_posterior(model.state, model.hyper);
    const auto field = predict_target_field(theta_star, phi, a.target_taxon);
    const auto smoothed = median_smooth(field, a.sigma, model.grid);
    if (!a.out_field.empty()) write_field_csv(a.out_field, smoothed);
    const auto hotspots = extract_hotspots(smoothed, a.tau);
    if (!a.out_hotspots.empty()) write_hotspots_csv(a.out_hotspots, hotspots);
    std::cout << "predicted " << smoothed.values.size() << " cells, " << hotspots.size()
              << " hotspot(s) above tau=" << format_double(a.tau) << "\n";
    return 0;
}

struct EvaluateArgs {
    std::string input;
    std::string regime = "halves";
    std::string strategy = "topic";
    std::string targets = "top8";
    int n_hotspots = 50;
    double alpha = 0.1, beta = 0.1, gamma = 1e-5;
    double sigma = 25000.0;
    double cell_size = 5000.0;
    int depth = 1;
    int sweeps = 50;
    int test_sweeps = 10;
    int kmeans_k = 0;
    std::string model_path;
    std::uint64_t seed = 0;
    double ref_lat = std::numeric_limits<double>::quiet_NaN();
    std::string out_pr;
};

int cmd_evaluate(const EvaluateArgs& a) {
    SurveyDataset ds = load_dataset(a.input, a.ref_lat);
    report_dropped(ds);
    const Strategy strategy = parse_strategy(a.strategy);
    const SplitRegime regime = parse_regime(a.regime);
    const auto targets = parse_targets(a.targets, ds);

    GridConfig grid{a.cell_size, 0.0, a.depth};
    StrategyParams params;
    params.hyper = {a.alpha, a.beta, a.gamma};
    params.sigma_m = a.sigma;
    params.train_sweeps = a.sweeps;
    params.test_sweeps = a.test_sweeps;

    if (strategy == Strategy::kmeans) {
        if (!a.model_path.empty()) {
            const Model model = load_model(a.model_path);
            params.kmeans_k = model.state.num_topics();
            std::cout << "kmeans: K=" << params.kmeans_k << " (from model file " << a.model_path
                      << ")\n";
        } else if (a.kmeans_k > 0) {
            params.kmeans_k = a.kmeans_k;
            std::cout << "kmeans: K=" << params.kmeans_k << " (from --kmeans-k)\n";
        } else {
            params.hyper.validate();
            StrategyParams probe = params;
            auto topic_eval = evaluate_strategy(ds, regime, Strategy::topic, probe, targets,
                                                a.n_hotspots, grid, a.seed);
            params.kmeans_k = std::max(topic_eval.k_learned, 1);
            std::cout << "kmeans: K=" << params.kmeans_k << " (learned by the topic model)\n";
        }
    }

    const auto eval =
        evaluate_strategy(ds, regime, strategy, params, targets, a.n_hotspots, grid, a.seed);
    if (!a.out_pr.empty()) write_pr_csv(a.out_pr, strategy_name(strategy), eval);
    std::cout << a.strategy << " aggregated AUC-PR = " << format_double(eval.auc) << "\n";
    for (const auto& [taxon, auc] : eval.per_taxon_auc)
        std::cout << "  taxon " << taxon << ": AUC-PR = " << format_double(auc) << "\n";
    return 0;
}

struct SweepArgs {
    std::string input;
    std::string regime = "halves";
    std::string grid_file;
    std::size_t budget = 0;
    double cell_size = 5000.0;
    int depth = 1;
    int sweeps = 50;
    int test_sweeps = 10;
    std::uint64_t seed = 0;
    double ref_lat = std::numeric_limits<double>::quiet_NaN();
    std::string out_report;
};

int cmd_sweep(const SweepArgs& a) {
    SurveyDataset ds = load_dataset(a.input, a.ref_lat);
    report_dropped(ds);
    SweepConfig sweep;
    std::string targets_spec = "top8";
    if (!a.grid_file.empty()) {
        json j;
        try {
            j = json::parse(read_text(a.grid_file));
        } catch (const json::exception& e) {
            throw std::runtime_error(a.grid_file + ": invalid JSON: " + e.what());
        }
        if (j.contains("alphas")) sweep.alphas = j["alphas"].get<std::vector<double>>();
        if (j.contains("betas")) sweep.betas = j["betas"].get<std::vector<double>>();
        if (j.contains("gammas")) sweep.gammas = j["gammas"].get<std::vector<double>>();
        if (j.contains("sigmas")) sweep.sigmas = j["sigmas"].get<std::vector<double>>();
        if (j.contains("n_hotspots")) sweep.n_hotspots = j["n_hotspots"].get<int>();
        if (j.contains("targets")) {
            if (j["targets"].is_string())
                targets_spec = j["targets"].get<std::string>();
            else {
                sweep.target_taxa = j["targets"].get<std::vector<int>>();
                targets_spec.clear();
            }
        }
    }
    if (sweep.target_taxa.empty()) sweep.target_taxa = parse_targets(targets_spec, ds);

    GridConfig grid{a.cell_size, 0.0, a.depth};
    const auto report = run_sweep(ds, parse_regime(a.regime), sweep, true, grid, a.seed, a.budget,
                                  a.sweeps, a.test_sweeps);
    write_sweep_json(a.out_report, report);
    std::cout << report.per_config.size() << " configuration(s) evaluated\n"
              << "best topic config: alpha=" << format_double(report.best.alpha)
              << " beta=" << format_double(report.best.beta)
              << " gamma=" << format_double(report.best.gamma)
              << " sigma=" << format_double(report.best.sigma) << " K=" << report.best.k_learned
              << " AUC=" << format_double(report.best.auc) << "\n"
              << "nn best AUC=" << format_double(report.nn_best.auc)
              << " (sigma=" << format_double(report.nn_best.sigma) << ")\n"
              << "kmeans (K=" << report.kmeans_k
              << ") best AUC=" << format_double(report.kmeans_best.auc)
              << " (sigma=" << format_double(report.kmeans_best.sigma) << ")\n"
              << "report written to " << a.out_report << "\n";
    return 0;
}

struct SynthArgs {
    std::string spec_file;
    std::string out_csv;
    std::string out_truth;
};

int cmd_synth(const SynthArgs& a) {
    json j;
    try {
        j = json::parse(read_text(a.spec_file));
    } catch (const json::exception& e) {
        throw std::runtime_error(a.spec_file + ": invalid JSON: " + e.what());
    }
    SynthSpec spec;
    try {
        if (j.contains("n_communities")) spec.n_communities = j["n_communities"].get<int>();
        if (j.contains("vocab_size")) spec.vocab_size = j["vocab_size"].get<int>();
        if (j.contains("n_cells")) spec.n_cells = j["n_cells"].get<int>();
        if (j.contains("obs_per_cell")) spec.obs_per_cell = j["obs_per_cell"].get<int>();
        if (j.contains("phi_concentration"))
            spec.phi_concentration = j["phi_concentration"].get<double>();
        if (j.contains("theta_concentration"))
            spec.theta_concentration = j["theta_concentration"].get<double>();
        if (j.contains("spatial_smoothness"))
            spec.spatial_smoothness = j["spatial_smoothness"].get<double>();
        if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
        const int span = j.contains("duplicate_span") ? j["duplicate_span"].get<int>() : 1;
        const auto data =
            j.contains("theta_concentration_second_half") || span > 1
                ? generate_synthetic_two_regime(
                      spec,
                      j.contains("theta_concentration_second_half")
                          ? j["theta_concentration_second_half"].get<double>()
                          : spec.theta_concentration,
                      span)
                : generate_synthetic(spec);
        write_text_atomic(a.out_csv, dataset_to_csv(data.dataset));
        if (!a.out_truth.empty()) {
            json truth;
            truth["phi_true"] = data.phi_true;
            truth["theta_true"] = data.theta_true;
            write_text_atomic(a.out_truth, truth.dump(2) + "\n");
        }
        std::cout << "wrote " << data.dataset.samples.size() << " samples ("
                  << data.dataset.records.size() << " observations) to " << a.out_csv << "\n";
    } catch (const json::exception& e) {
        throw std::runtime_error(a.spec_file + ": bad spec: " + e.what());
    }
    return 0;
}

void add_common_seed(CLI::App* cmd, std::uint64_t& seed) {
    cmd->add_option("--seed", seed, "RNG seed (default: $HOTSPOT_SEED or 0)");
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Spatio-temporal plankton community model: learns taxon co-occurrence "
                 "communities from survey counts and predicts hotspots of a target taxon "
                 "without direct observations of it"};
    app.require_subcommand(1);

    std::uint64_t seed_default = 0;
    try {
        seed_default = default_seed();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    TrainArgs train;
    train.seed = seed_default;
    auto* t = app.add_subcommand("train", "Learn a community model from survey counts");
    t->add_option("--input", train.input, "input CSV")->required();
    t->add_option("--regime", train.regime, "interleaved|halves|all (default all)");
    t->add_option("--alpha", train.alpha, "community pseudo-count");
    t->add_option("--beta", train.beta, "taxon Dirichlet concentration");
    t->add_option("--gamma", train.gamma, "new-community mass");
    t->add_option("--cell-size", train.cell_size, "spatial cell edge, meters");
    t->add_option("--cell-size-t", train.cell_size_t, "temporal cell size, seconds (0 = off)");
    t->add_option("--depth", train.depth, "neighborhood depth");
    t->add_option("--sweeps", train.sweeps, "Gibbs sweeps");
    t->add_option("--ref-lat", train.ref_lat, "reference latitude for lat/lon input");
    add_common_seed(t, train.seed);
    t->add_option("--out-model", train.out_model, "output model JSON")->required();

    PredictArgs predict;
    predict.seed = seed_default;
    auto* p = app.add_subcommand("predict", "Predict a target taxon's hotspot cells");
    p->add_option("--model", predict.model_path, "model JSON")->required();
    p->add_option("--input", predict.input, "input CSV")->required();
    p->add_option("--target-taxon", predict.target_taxon, "target class id")->required();
    p->add_option("--sigma", predict.sigma, "median filter side length, meters");
    p->add_option("--tau", predict.tau, "hotspot threshold");
    p->add_option("--sweeps", predict.sweeps, "test assignment sweeps");
    p->add_option("--ref-lat", predict.ref_lat, "reference latitude for lat/lon input");
    add_common_seed(p, predict.seed);
    p->add_option("--out-field", predict.out_field, "smoothed probability field CSV");
    p->add_option("--out-hotspots", predict.out_hotspots, "hotspot cells CSV");

    EvaluateArgs evaluate;
    evaluate.seed = seed_default;
    auto* e = app.add_subcommand("evaluate", "Score a strategy's hotspot predictions");
    e->add_option("--input", evaluate.input, "input CSV")->required();
    e->add_option("--regime", evaluate.regime, "interleaved|halves");
    e->add_option("--strategy", evaluate.strategy, "topic|nn|kmeans");
    e->add_option("--targets", evaluate.targets, "comma-separated ids or topN (default top8)");
    e->add_option("--n-hotspots", evaluate.n_hotspots, "ground-truth hotspot count");
    e->add_option("--alpha", evaluate.alpha, "community pseudo-count");
    e->add_option("--beta", evaluate.beta, "taxon Dirichlet concentration");
    e->add_option("--gamma", evaluate.gamma, "new-community mass");
    e->add_option("--sigma", evaluate.sigma, "median filter side length, meters");
    e->add_option("--cell-size", evaluate.cell_size, "spatial cell edge, meters");
    e->add_option("--depth", evaluate.depth, "neighborhood depth");
    e->add_option("--sweeps", evaluate.sweeps, "training Gibbs sweeps");
    e->add_option("--test-sweeps", evaluate.test_sweeps, "test assignment sweeps");
    e->add_option("--kmeans-k", evaluate.kmeans_k, "centroid count for the kmeans strategy");
    e->add_option("--model", evaluate.model_path, "model JSON supplying K for kmeans");
    e->add_option("--ref-lat", evaluate.ref_lat, "reference latitude for lat/lon input");
    add_common_seed(e, evaluate.seed);
    e->add_option("--out-pr", evaluate.out_pr, "precision-recall CSV");

    SweepArgs sweep;
    sweep.seed = seed_default;
    auto* s = app.add_subcommand("sweep", "Hyperparameter sweep with baseline comparison");
    s->add_option("--input", sweep.input, "input CSV")->required();
    s->add_option("--regime", sweep.regime, "interleaved|halves");
    s->add_option("--grid-file", sweep.grid_file, "JSON grid spec");
    s->add_option("--budget", sweep.budget, "max configurations (0 = full grid)");
    s->add_option("--cell-size", sweep.cell_size, "spatial cell edge, meters");
    s->add_option("--depth", sweep.depth, "neighborhood depth");
    s->add_option("--sweeps", sweep.sweeps, "training Gibbs sweeps");
    s->add_option("--test-sweeps", sweep.test_sweeps, "test assignment sweeps");
    s->add_option("--ref-lat", sweep.ref_lat, "reference latitude for lat/lon input");
    add_common_seed(s, sweep.seed);
    s->add_option("--out-report", sweep.out_report, "output report JSON")->required();

    SynthArgs synth;
    auto* y = app.add_subcommand("synth", "Generate a synthetic survey dataset");
    y->add_option("--spec-file", synth.spec_file, "JSON generator spec")->required();
    y->add_option("--out-csv", synth.out_csv, "output counts CSV")->required();
    y->add_option("--out-truth", synth.out_truth, "ground-truth mixtures JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (t->parsed()) return cmd_train(train);
        if (p->parsed()) return cmd_predict(predict);
        if (e->parsed()) return cmd_evaluate(evaluate);
        if (s->parsed()) return cmd_sweep(sweep);
        if (y->parsed()) return cmd_synth(synth);
        return 1;
    } catch (const std::invalid_argument& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    } catch (const std::runtime_error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    } catch (const std::exception& err) {
        std::cerr << "internal error: " << err.what() << "\n";
        return 2;
    }
}

} // namespace hotspot
