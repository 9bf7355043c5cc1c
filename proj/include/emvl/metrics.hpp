#pragma once

// Ground-truth providers and iteration-count benchmark metrics.
//
// R99(p, t_fin) = t_fin * ln(0.01) / ln(1 - p), clamped to t_fin for p >= 0.99,
// undefined for p = 0. STT uses the target E <= floor(0.99 * e_gs) on the
// integer energy lattice; STS requires E == e_gs. Success is judged on the
// best energy seen during a run. Metric values are the mean of per-instance
// R99 and become unreachable if any instance has p = 0.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "emvl/error.hpp"
#include "emvl/model.hpp"
#include "emvl/parallel.hpp"
#include "emvl/rng.hpp"
#include "emvl/solver.hpp"

namespace emvl {

inline constexpr std::size_t kExhaustiveCap = 24;

struct Provenance {
    enum class Kind { Exhaustive, BestKnown };
    Kind kind = Kind::Exhaustive;
    std::vector<std::string> algorithms;  // BestKnown only
    std::size_t trials = 0;
    std::size_t t_fin = 0;
    std::uint64_t seed = 0;

    friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct GroundTruth {
    std::string instance_id;
    Energy e_gs = 0;
    Provenance provenance;

    friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

struct ExhaustiveResult {
    Energy e_gs;
    SpinState state;
};

/// Exact minimum by Gray-code enumeration with incremental local fields.
/// With zero field the last spin is pinned to +1 (inversion symmetry), halving the work.
inline ExhaustiveResult exhaustive_ground_state(const IsingModel& m, std::size_t cap = kExhaustiveCap) {
    const std::size_t n = m.size();
    if (n > cap)
        throw ContractError("exhaustive enumeration refused for n = " + std::to_string(n) + " (cap " +
                            std::to_string(cap) + "); use best_known_energy instead");
    const std::size_t free_spins = m.zero_field() ? n - 1 : n;
    SpinState s(n);
    std::vector<Energy> field(n);
    for (std::size_t i = 0; i < n; ++i) field[i] = local_field_unchecked(m, s, i);
    Energy e = energy(m, s);
    Energy best = e;
    std::uint64_t best_code = 0;

    const std::uint64_t total = std::uint64_t{1} << free_spins;
    for (std::uint64_t g = 1; g < total; ++g) {
        const auto k = static_cast<std::size_t>(std::countr_zero(g));
        const Energy sk = s[k];
        e += 2 * sk * field[k];
        const auto row = m.row(k);
        for (std::size_t j = 0; j < n; ++j) field[j] -= 2 * static_cast<Energy>(row[j]) * sk;
        s.flip(k);
        if (e < best) {
            best = e;
            best_code = g ^ (g >> 1);
        }
    }
    SpinState arg(n);
    for (std::size_t k = 0; k < free_spins; ++k)
        if ((best_code >> k) & 1u) arg.flip(k);
    return {best, std::move(arg)};
}

struct SearchBudget {
    std::vector<AlgorithmSpec> algorithms;
    std::size_t trials = 0;
    std::size_t t_fin = 0;
};

/// Default multi-solver budget: E-MVL at the three recommended initial sparsities.
inline SearchBudget default_budget(std::size_t trials = 64, std::size_t t_fin = 2000) {
    return {{AlgorithmSpec::emvl(0.2, 0.0, "emvl-0.2"), AlgorithmSpec::emvl(0.3, 0.0, "emvl-0.3"),
             AlgorithmSpec::emvl(0.4, 0.0, "emvl-0.4")},
            trials,
            t_fin};
}

/// Lowest energy over every (algorithm, trial) run in the budget. Trial k of algorithm a
/// always uses the same stream, so a larger budget is a superset and never raises e_gs.
inline GroundTruth best_known_energy(const IsingModel& m, const SearchBudget& budget, std::uint64_t seed,
                                     unsigned jobs = 1) {
    require(!budget.algorithms.empty() && budget.trials > 0 && budget.t_fin > 0, "search budget is empty");
    const std::size_t tasks = budget.algorithms.size() * budget.trials;
    std::vector<Energy> best(tasks);
    RunOptions opts;
    opts.track_best_state = false;
    parallel_for(tasks, jobs, [&](std::size_t k) {
        const std::size_t a = k / budget.trials;
        const std::size_t trial = k % budget.trials;
        const auto s = stream_seed(splitmix64(seed ^ a), m.instance_id(), trial);
        best[k] = budget.algorithms[a].run(m, budget.t_fin, s, opts).best_energy;
    });
    GroundTruth gt;
    gt.instance_id = m.instance_id();
    gt.e_gs = *std::min_element(best.begin(), best.end());
    gt.provenance.kind = Provenance::Kind::BestKnown;
    for (const auto& a : budget.algorithms) gt.provenance.algorithms.push_back(a.label.empty() ? a.describe() : a.label);
    gt.provenance.trials = budget.trials;
    gt.provenance.t_fin = budget.t_fin;
    gt.provenance.seed = seed;
    return gt;
}

inline GroundTruth ground_truth(const IsingModel& m, std::size_t cap, const SearchBudget& budget,
                                std::uint64_t seed, unsigned jobs = 1) {
    if (m.size() <= cap) return {m.instance_id(), exhaustive_ground_state(m, cap).e_gs, {}};
    return best_known_energy(m, budget, seed, jobs);
}

// ---------------------------------------------------------------------------
// Success predicates and R99

inline constexpr Energy floor_div(Energy a, Energy b) noexcept {
    const Energy q = a / b;
    return (a % b != 0 && ((a < 0) != (b < 0))) ? q - 1 : q;
}

/// Least-magnitude integer E with E <= 0.99 * e_gs (e_gs <= 0).
inline constexpr Energy stt_target(Energy e_gs) noexcept { return floor_div(99 * e_gs, 100); }

enum class Metric { Stt, Sts };

inline bool meets(Metric metric, Energy e, Energy e_gs) noexcept {
    return metric == Metric::Stt ? e <= stt_target(e_gs) : e <= e_gs;
}

template <class Pred>
double success_probability(std::span<const Energy> best_energies, Pred&& pred) {
    require(!best_energies.empty(), "success probability needs at least one trial");
    const auto hits = std::count_if(best_energies.begin(), best_energies.end(), pred);
    return static_cast<double>(hits) / static_cast<double>(best_energies.size());
}

inline double success_probability(std::span<const Energy> best_energies, Metric metric, Energy e_gs) {
    return success_probability(best_energies, [&](Energy e) { return meets(metric, e, e_gs); });
}

/// Iterations to succeed with 99% probability; nullopt when p = 0.
inline std::optional<double> r99(double p_hat, std::size_t t_fin) {
    require(p_hat >= 0.0 && p_hat <= 1.0, "success probability must lie in [0, 1]");
    if (p_hat <= 0.0) return std::nullopt;
    if (p_hat >= 0.99) return static_cast<double>(t_fin);
    return static_cast<double>(t_fin) * std::log(0.01) / std::log1p(-p_hat);
}

/// Mean of per-instance R99; unreachable if any instance never succeeded.
inline std::optional<double> mean_r99(std::span<const double> p_hats, std::size_t t_fin) {
    require(!p_hats.empty(), "metric needs at least one instance");
    double sum = 0.0;
    for (double p : p_hats) {
        const auto r = r99(p, t_fin);
        if (!r) return std::nullopt;
        sum += *r;
    }
    return sum / static_cast<double>(p_hats.size());
}

inline std::optional<double> stt(std::span<const double> p_hats, std::size_t t_fin) { return mean_r99(p_hats, t_fin); }
inline std::optional<double> sts(std::span<const double> p_hats, std::size_t t_fin) { return mean_r99(p_hats, t_fin); }

struct RunMetrics {
    std::string algorithm;
    std::string schedule;
    std::size_t t_fin = 0;
    std::size_t trials = 0;
    std::vector<double> p_hat_stt;  // per instance
    std::vector<double> p_hat_sts;
    std::optional<double> stt;
    std::optional<double> sts;

    double p_hat_mean(Metric m) const {
        const auto& v = m == Metric::Stt ? p_hat_stt : p_hat_sts;
        double s = 0.0;
        for (double p : v) s += p;
        return v.empty() ? 0.0 : s / static_cast<double>(v.size());
    }
    std::optional<double> value(Metric m) const { return m == Metric::Stt ? stt : sts; }
};

/// Runs `trials` independent trials per instance at one t_fin and scores both predicates.
/// Each instance may carry its own algorithm (e.g. a per-size mapped schedule).
inline RunMetrics evaluate(std::span<const IsingModel> instances, std::span<const Energy> e_gs,
                           std::span<const AlgorithmSpec> algorithm_per_instance, std::size_t t_fin,
                           std::size_t trials, std::uint64_t seed, unsigned jobs = 1) {
    require(instances.size() == e_gs.size() && instances.size() == algorithm_per_instance.size(),
            "one ground truth and one algorithm per instance");
    require(trials > 0, "need at least one trial");
    const std::size_t ni = instances.size();
    std::vector<Energy> best(ni * trials);
    RunOptions opts;
    opts.track_best_state = false;
    parallel_for(best.size(), jobs, [&](std::size_t k) {
        const std::size_t i = k / trials;
        const std::size_t trial = k % trials;
        const auto s = stream_seed(seed, instances[i].instance_id(), trial);
        best[k] = algorithm_per_instance[i].run(instances[i], t_fin, s, opts).best_energy;
    });
    RunMetrics out;
    out.algorithm = algorithm_per_instance.empty() ? "" : algorithm_per_instance[0].label;
    out.schedule = algorithm_per_instance.empty() ? "" : algorithm_per_instance[0].describe();
    out.t_fin = t_fin;
    out.trials = trials;
    for (std::size_t i = 0; i < ni; ++i) {
        const std::span<const Energy> runs(best.data() + i * trials, trials);
        out.p_hat_stt.push_back(success_probability(runs, Metric::Stt, e_gs[i]));
        out.p_hat_sts.push_back(success_probability(runs, Metric::Sts, e_gs[i]));
    }
    out.stt = stt(out.p_hat_stt, t_fin);
    out.sts = sts(out.p_hat_sts, t_fin);
    return out;
}

struct TfinOptimum {
    std::optional<std::size_t> t_fin;  // nullopt when every grid point is unreachable
    std::optional<double> value;
    std::vector<RunMetrics> table;
};

/// Evaluates the metric at every grid point and returns the argmin; ties go to the smaller t_fin.
inline TfinOptimum optimize_tfin(const std::function<RunMetrics(std::size_t)>& evaluate_at,
                                 std::vector<std::size_t> grid, Metric metric) {
    require(!grid.empty(), "t_fin grid must not be empty");
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    TfinOptimum out;
    for (std::size_t t_fin : grid) {
        out.table.push_back(evaluate_at(t_fin));
        const auto v = out.table.back().value(metric);
        if (v && (!out.value || *v < *out.value)) {
            out.value = v;
            out.t_fin = t_fin;
        }
    }
    return out;
}

}  // namespace emvl
