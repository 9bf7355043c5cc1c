#pragma once

// Uniform front end over the four engines, used by the oracle, the
// benchmark driver and the CLI.

#include <string>
#include <string_view>

#include "emvl/emvl.hpp"
#include "emvl/gatesim.hpp"
#include "emvl/sa.hpp"

namespace emvl {

enum class Engine { Emvl, EmvlBits, SaConventional, SaOptimized };

inline std::string_view to_string(Engine e) {
    switch (e) {
        case Engine::Emvl: return "emvl";
        case Engine::EmvlBits: return "emvl-bits";
        case Engine::SaConventional: return "sa-conventional";
        case Engine::SaOptimized: return "sa-optimized";
    }
    return "emvl";
}

inline Engine parse_engine(std::string_view s) {
    if (s == "emvl") return Engine::Emvl;
    if (s == "emvl-bits") return Engine::EmvlBits;
    if (s == "sa-conventional") return Engine::SaConventional;
    if (s == "sa-optimized") return Engine::SaOptimized;
    throw ContractError("unknown algorithm '" + std::string(s) + "'");
}

inline bool is_emvl(Engine e) { return e == Engine::Emvl || e == Engine::EmvlBits; }

/// An engine plus its schedule shape; t_fin is supplied per run.
struct AlgorithmSpec {
    Engine engine = Engine::Emvl;
    double ps_init = 0.3;
    double ps_fin = 0.0;
    TemperatureSchedule::Kind temp_kind = TemperatureSchedule::Kind::BetaLinear;
    double temp_start = 0.01;
    double temp_end = 10.0;
    std::string label;

    static AlgorithmSpec emvl(double ps_init, double ps_fin = 0.0, std::string label = {}) {
        AlgorithmSpec a;
        a.engine = Engine::Emvl;
        a.ps_init = ps_init;
        a.ps_fin = ps_fin;
        a.label = label.empty() ? "emvl" : std::move(label);
        return a;
    }

    static AlgorithmSpec sa(Engine engine, TemperatureSchedule::Kind kind, double start, double end,
                            std::string label = {}) {
        AlgorithmSpec a;
        a.engine = engine;
        a.temp_kind = kind;
        a.temp_start = start;
        a.temp_end = end;
        a.label = label.empty() ? std::string(to_string(engine)) : std::move(label);
        return a;
    }

    SparsitySchedule sparsity(std::size_t t_fin) const { return {ps_init, ps_fin, t_fin}; }
    TemperatureSchedule temperature(std::size_t t_fin) const { return {temp_kind, temp_start, temp_end, t_fin}; }

    /// Name of the trace control column.
    std::string_view control_name() const { return is_emvl(engine) ? "p_s" : "temperature"; }

    std::string describe() const {
        if (is_emvl(engine))
            return std::string(to_string(engine)) + " linear(" + std::to_string(ps_init) + "->" +
                   std::to_string(ps_fin) + ")";
        return std::string(to_string(engine)) + " " + temperature(1).describe();
    }

    RunResult run(const IsingModel& model, std::size_t t_fin, std::uint64_t seed,
                  const RunOptions& opts = {}) const {
        switch (engine) {
            case Engine::Emvl: return run_emvl(model, sparsity(t_fin), seed, opts);
            case Engine::EmvlBits: return run_emvl_bits(model, sparsity(t_fin), seed, opts);
            case Engine::SaConventional:
                return run_sa(model, temperature(t_fin), seed, SaVariant::Conventional, opts);
            case Engine::SaOptimized:
                return run_sa(model, temperature(t_fin), seed, SaVariant::Optimized, opts);
        }
        throw ContractError("unknown engine");
    }
};

}  // namespace emvl
