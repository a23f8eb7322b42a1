#include "qmoo/analysis.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "qmoo/pareto.hpp"

namespace qmoo {

namespace {

constexpr int kFrontFormatVersion = 1;

struct DisjointSet {
    explicit DisjointSet(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), std::size_t{0});
    }
    std::size_t find(std::size_t a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
    std::vector<std::size_t> parent;
};

}  // namespace

ExactFront exact_front(const RmnkLandscape& landscape, ObjectiveVector reference) {
    const int n = landscape.n_vars();
    if (n > kMaxExhaustiveVars)
        throw ResourceError("exact_front requires n_vars <= " + std::to_string(kMaxExhaustiveVars));
    if (reference.empty()) reference = default_reference(landscape.n_objectives());

    // Streaming build through an archive (no reference: plain non-dominated
    // filtering); the hypervolume is one batch computation at the end.
    ParetoArchive archive;
    const Bits count = Bits{1} << n;
    for (Bits x = 0; x < count; ++x) {
        archive.insert(x, landscape.evaluate(x));
    }

    ExactFront front;
    front.instance_hash = landscape.content_hash();
    front.n_vars = n;
    front.reference = reference;
    std::vector<ParetoArchive::Entry> entries = archive.entries();
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.bits < b.bits; });
    front.pareto_set.reserve(entries.size());
    front.pareto_front.reserve(entries.size());
    for (auto& e : entries) {
        front.pareto_set.push_back(e.bits);
        front.pareto_front.push_back(std::move(e.objectives));
    }
    front.n_pf = static_cast<int>(front.pareto_set.size());
    front.hv_ideal = hypervolume(front.pareto_front, reference);
    return front;
}

int bitflip_components(const std::vector<Bits>& members, int n_bits) {
    if (members.empty()) throw InputError("component count of an empty set");
    std::unordered_map<Bits, std::size_t> id;
    id.reserve(members.size());
    for (std::size_t i = 0; i < members.size(); ++i) id.emplace(members[i], i);

    DisjointSet dsu(members.size());
    for (std::size_t i = 0; i < members.size(); ++i) {
        for (int b = 0; b < n_bits; ++b) {
            const Bits neighbor = members[i] ^ (Bits{1} << b);
            const auto it = id.find(neighbor);
            if (it != id.end()) dsu.unite(i, it->second);
        }
    }
    int components = 0;
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (dsu.find(i) == i) ++components;
    }
    return components;
}

double lower_median(std::vector<double> values) {
    if (values.empty()) throw InputError("median of an empty list");
    std::sort(values.begin(), values.end());
    return values[(values.size() - 1) / 2];
}

std::vector<ConnectivityCell> connectivity_sweep(const std::vector<RmnkConfig>& grid,
                                                 const std::vector<std::uint64_t>& seeds) {
    std::vector<ConnectivityCell> table;
    table.reserve(grid.size());
    for (const RmnkConfig& cell : grid) {
        std::vector<double> counts;
        counts.reserve(seeds.size());
        for (std::uint64_t seed : seeds) {
            RmnkConfig config = cell;
            config.seed = seed;
            const auto landscape = RmnkLandscape::generate(config);
            const auto front = exact_front(landscape);
            counts.push_back(bitflip_components(front.pareto_set, config.n_vars));
        }
        table.push_back({cell.n_vars, cell.n_objectives, cell.epistasis, cell.rho,
                         static_cast<int>(seeds.size()), lower_median(std::move(counts))});
    }
    return table;
}

void normalize_trace(RunTrace& trace, const ExactFront& front) {
    if (trace.instance_hash != front.instance_hash)
        throw InputError("trace and exact front belong to different instances");
    trace.hv_ideal = front.hv_ideal;
}

ThresholdStats threshold_crossing(const RunTrace& trace, double theta) {
    if (trace.hv_ideal <= 0.0) throw InputError("trace has no hv_ideal; normalize it first");
    for (const auto& rec : trace.records) {
        if (rec.hv / trace.hv_ideal >= theta) return {true, rec.iteration, rec.fevals};
    }
    return {false, -1, -1};
}

void ExactFront::save(const std::filesystem::path& path) const {
    nlohmann::json j;
    j["format_version"] = kFrontFormatVersion;
    j["instance_hash"] = hex64(instance_hash);
    j["n_vars"] = n_vars;
    j["reference"] = reference;
    j["pareto_set"] = pareto_set;
    j["pareto_front"] = pareto_front;
    j["hv_ideal"] = hv_ideal;
    j["n_pf"] = n_pf;
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << j.dump(1) << '\n';
}

ExactFront ExactFront::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("front cache parse error: ") + e.what());
    }
    try {
        if (j.at("format_version").get<int>() != kFrontFormatVersion)
            throw FormatError("unsupported front cache format_version");
        ExactFront front;
        front.instance_hash = std::stoull(j.at("instance_hash").get<std::string>(), nullptr, 16);
        front.n_vars = j.at("n_vars").get<int>();
        front.reference = j.at("reference").get<ObjectiveVector>();
        front.pareto_set = j.at("pareto_set").get<std::vector<Bits>>();
        front.pareto_front = j.at("pareto_front").get<std::vector<ObjectiveVector>>();
        front.hv_ideal = j.at("hv_ideal").get<double>();
        front.n_pf = j.at("n_pf").get<int>();
        return front;
    } catch (const FormatError&) {
        throw;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("front cache parse error: ") + e.what());
    }
}

}  // namespace qmoo
