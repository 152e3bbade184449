#include "hotspot/model_io.hpp"

#include "hotspot/io_util.hpp"

#include <json.hpp>

#include <charconv>
#include <numeric>
#include <stdexcept>

namespace hotspot {

namespace {

using nlohmann::json;

constexpr int kSnapshotVersion = 1;

std::string cell_key_string(const CellKey& c) {
    return std::to_string(c.t_idx) + "," + std::to_string(c.e_idx) + "," +
           std::to_string(c.n_idx);
}

CellKey parse_cell_key(const std::string& s) {
    CellKey c;
    std::int64_t* parts[3] = {&c.t_idx, &c.e_idx, &c.n_idx};
    std::size_t begin = 0;
    for (int i = 0; i < 3; ++i) {
        const std::size_t end = i < 2 ? s.find(',', begin) : s.size();
        if (end == std::string::npos) throw std::runtime_error("model load: bad cell key '" + s + "'");
        auto res = std::from_chars(s.data() + begin, s.data() + end, *parts[i]);
        if (res.ec != std::errc{} || res.ptr != s.data() + end)
            throw std::runtime_error("model load: bad cell key '" + s + "'");
        begin = end + 1;
    }
    return c;
}

} // namespace

std::string model_to_json(const Model& model) {
    json j;
    j["version"] = kSnapshotVersion;
    j["grid_config"] = {{"cell_size_m", model.grid.cell_size_m},
                        {"cell_size_s", model.grid.cell_size_s},
                        {"neighborhood_depth", model.grid.neighborhood_depth}};
    j["hyperparameters"] = {{"alpha", model.hyper.alpha},
                            {"beta", model.hyper.beta},
                            {"gamma", model.hyper.gamma}};
    j["vocab_size"] = model.state.vocab_size;
    j["vocab_names"] = model.vocab_names;
    j["topic_taxon_counts"] = model.state.topic_taxon_counts;
    json cells = json::object();
    for (const auto& [cell, counts] : model.state.cell_topic_counts)
        cells[cell_key_string(cell)] = counts;
    j["cell_topic_counts"] = std::move(cells);
    j["rng_seed"] = model.state.rng_seed;
    j["n_observations"] = model.n_observations;
    return j.dump(2) + "\n";
}

Model model_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("model load: invalid JSON: ") + e.what());
    }
    try {
        if (!j.contains("version")) throw std::runtime_error("model load: unversioned snapshot");
        if (j.at("version").get<int>() != kSnapshotVersion)
            throw std::runtime_error("model load: unsupported snapshot version");

        Model m;
        const json& g = j.at("grid_config");
        m.grid.cell_size_m = g.at("cell_size_m").get<double>();
        m.grid.cell_size_s = g.at("cell_size_s").get<double>();
        m.grid.neighborhood_depth = g.at("neighborhood_depth").get<int>();
        m.grid.validate();
        const json& h = j.at("hyperparameters");
        m.hyper.alpha = h.at("alpha").get<double>();
        m.hyper.beta = h.at("beta").get<double>();
        m.hyper.gamma = h.at("gamma").get<double>();
        m.hyper.validate();

        m.state.vocab_size = j.at("vocab_size").get<int>();
        m.vocab_names = j.at("vocab_names").get<std::vector<std::string>>();
        if (static_cast<int>(m.vocab_names.size()) != m.state.vocab_size)
            throw std::runtime_error("model load: vocab_names size != vocab_size");

        m.state.topic_taxon_counts =
            j.at("topic_taxon_counts").get<std::vector<std::vector<long long>>>();
        const int k_live = static_cast<int>(m.state.topic_taxon_counts.size());
        m.state.topic_ids.resize(static_cast<std::size_t>(k_live));
        std::iota(m.state.topic_ids.begin(), m.state.topic_ids.end(), 0);
        m.state.topic_totals.clear();
        for (const auto& row : m.state.topic_taxon_counts) {
            if (static_cast<int>(row.size()) != m.state.vocab_size)
                throw std::runtime_error("model load: count row width != vocab_size");
            long long total = 0;
            for (long long c : row) {
                if (c < 0) throw std::runtime_error("model load: negative count");
                total += c;
            }
            m.state.topic_totals.push_back(total);
        }

        for (const auto& [key, value] : j.at("cell_topic_counts").items()) {
            auto counts = value.get<std::vector<long long>>();
            if (static_cast<int>(counts.size()) != k_live)
                throw std::runtime_error("model load: cell vector width != community count");
            m.state.cell_topic_counts.emplace(parse_cell_key(key), std::move(counts));
        }

        m.state.rng_seed = j.at("rng_seed").get<std::uint64_t>();
        m.n_observations = j.at("n_observations").get<long long>();
        return m;
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("model load: bad snapshot: ") + e.what());
    }
}

void save_model(const Model& model, const std::string& path) {
    write_text_atomic(path, model_to_json(model));
}

Model load_model(const std::string& path) { return model_from_json(read_text(path)); }

} // namespace hotspot
