#pragma once

// JSON and CSV serialization for ground-truth registries and sparsity maps.
// Requires nlohmann/json on the include path.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "emvl/equilibrium.hpp"
#include "emvl/metrics.hpp"

namespace emvl {

using Json = nlohmann::json;

/// Shortest text that round-trips the double.
inline std::string format_real(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, r.ptr};
}

inline std::string format_optional(const std::optional<double>& v) {
    return v ? format_real(*v) : std::string("unreachable");
}

inline Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path.string() + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ValidationError("malformed JSON in '" + path.string() + "': " + e.what());
    }
}

inline void write_json_file(const std::filesystem::path& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Ground-truth registry: {"<instance_id>": {"e_gs": int, "provenance": {...}}}

using Registry = std::map<std::string, GroundTruth>;

inline Json to_json(const Provenance& p) {
    if (p.kind == Provenance::Kind::Exhaustive) return {{"kind", "exhaustive"}};
    return {{"kind", "best_known"},
            {"algorithms", p.algorithms},
            {"trials", p.trials},
            {"t_fin", p.t_fin},
            {"seed", p.seed}};
}

inline Provenance provenance_from_json(const Json& j) {
    Provenance p;
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "exhaustive") return p;
    if (kind != "best_known") throw ValidationError("unknown provenance kind '" + kind + "'");
    p.kind = Provenance::Kind::BestKnown;
    p.algorithms = j.at("algorithms").get<std::vector<std::string>>();
    p.trials = j.at("trials").get<std::size_t>();
    p.t_fin = j.at("t_fin").get<std::size_t>();
    p.seed = j.at("seed").get<std::uint64_t>();
    return p;
}

inline Json registry_to_json(const Registry& r) {
    Json j = Json::object();
    for (const auto& [id, gt] : r) j[id] = {{"e_gs", gt.e_gs}, {"provenance", to_json(gt.provenance)}};
    return j;
}

inline Registry registry_from_json(const Json& j) {
    if (!j.is_object()) throw ValidationError("registry must be a JSON object");
    Registry r;
    try {
        for (const auto& [id, v] : j.items())
            r[id] = GroundTruth{id, v.at("e_gs").get<Energy>(), provenance_from_json(v.at("provenance"))};
    } catch (const Json::exception& e) {
        throw ValidationError(std::string("malformed registry entry: ") + e.what());
    }
    return r;
}

inline Registry load_registry(const std::filesystem::path& path) { return registry_from_json(read_json_file(path)); }

inline void save_registry(const std::filesystem::path& path, const Registry& r) {
    write_json_file(path, registry_to_json(r));
}

/// Keeps the lower energy; an exact result always wins a tie.
inline bool merge_ground_truth(Registry& r, const GroundTruth& gt) {
    auto it = r.find(gt.instance_id);
    if (it == r.end()) {
        r.emplace(gt.instance_id, gt);
        return true;
    }
    auto& cur = it->second;
    const bool exact = gt.provenance.kind == Provenance::Kind::Exhaustive;
    if (gt.e_gs < cur.e_gs || (gt.e_gs == cur.e_gs && exact && cur.provenance.kind != gt.provenance.kind)) {
        cur = gt;
        return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Sparsity-temperature map

inline Json map_to_json(const SparsityTemperatureMap& m) {
    Json pts = Json::array();
    for (const auto& p : m.points)
        pts.push_back({{"p_s", p.p_s},
                       {"T", p.temperature},
                       {"ks_distance", p.ks_distance},
                       {"mean_energy", p.mean_energy},
                       {"std_energy", p.std_energy},
                       {"unreliable", p.unreliable}});
    return {{"distribution", std::string(to_string(m.distribution))},
            {"n", m.n},
            {"instance_id", m.instance_id},
            {"linear_cutoff", kLinearRegimeMaxSparsity},
            {"t_at_zero", m.t_at_zero},
            {"slope", m.slope},
            {"points", pts}};
}

/// Re-validates the loaded points, so a hand-edited file obeys the same invariants.
inline SparsityTemperatureMap map_from_json(const Json& j) {
    try {
        std::vector<MapPoint> pts;
        for (const auto& p : j.at("points"))
            pts.push_back({p.at("p_s").get<double>(), p.at("T").get<double>(), p.value("ks_distance", 0.0),
                           p.value("mean_energy", 0.0), p.value("std_energy", 0.0), p.value("unreliable", false)});
        return finalize_map(std::move(pts), parse_distribution(j.at("distribution").get<std::string>()),
                            j.at("n").get<std::size_t>(), j.value("instance_id", std::string{}));
    } catch (const Json::exception& e) {
        throw ValidationError(std::string("malformed sparsity map: ") + e.what());
    }
}

inline SparsityTemperatureMap load_map(const std::filesystem::path& path) { return map_from_json(read_json_file(path)); }

}  // namespace emvl
