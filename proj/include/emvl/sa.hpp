#pragma once

// Single-spin-flip Metropolis simulated annealing.
//
// Both variants draw from the RNG in the same order: n coins for the initial
// state, n-1 draws per sweep for the visiting order, and one uniform per
// uphill proposal (downhill and zero-cost proposals never draw). They differ
// only in how the local field is obtained, so their trajectories are identical.

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "emvl/error.hpp"
#include "emvl/model.hpp"
#include "emvl/rng.hpp"
#include "emvl/run.hpp"

namespace emvl {

class TemperatureSchedule {
public:
    enum class Kind { BetaLinear, TempLinear };

    TemperatureSchedule(Kind kind, double start, double end, std::size_t t_fin)
        : kind_(kind), start_(start), end_(end), t_fin_(t_fin) {
        if (t_fin < 1) throw ContractError("temperature schedule needs t_fin >= 1");
        if (kind == Kind::BetaLinear && !(start > 0.0 && start <= end))
            throw ContractError("beta schedule needs 0 < beta_start <= beta_end");
        if (kind == Kind::TempLinear && !(end > 0.0 && start >= end))
            throw ContractError("temperature schedule needs t_start >= t_end > 0");
    }

    static TemperatureSchedule beta_linear(double beta_start, double beta_end, std::size_t t_fin) {
        return {Kind::BetaLinear, beta_start, beta_end, t_fin};
    }
    static TemperatureSchedule temp_linear(double t_start, double t_end, std::size_t t_fin) {
        return {Kind::TempLinear, t_start, t_end, t_fin};
    }
    /// Conventional ramp, beta 0.01 -> 10 (T = 100 -> 0.1).
    static TemperatureSchedule conventional(std::size_t t_fin) { return beta_linear(0.01, 10.0, t_fin); }
    static TemperatureSchedule constant(double T, std::size_t t_fin) { return temp_linear(T, T, t_fin); }

    Kind kind() const noexcept { return kind_; }
    double start() const noexcept { return start_; }
    double end() const noexcept { return end_; }
    std::size_t t_fin() const noexcept { return t_fin_; }

    double at(std::size_t t) const {
        if (t >= t_fin_) throw ContractError("temperature schedule queried past t_fin");
        const double frac = t_fin_ == 1 ? 0.0 : static_cast<double>(t) / static_cast<double>(t_fin_ - 1);
        const double v = t + 1 == t_fin_ && t_fin_ > 1 ? end_ : start_ + (end_ - start_) * frac;
        return kind_ == Kind::BetaLinear ? 1.0 / v : v;
    }

    std::string describe() const {
        return (kind_ == Kind::BetaLinear ? "beta_linear(" : "temp_linear(") + std::to_string(start_) + "->" +
               std::to_string(end_) + ")";
    }

private:
    Kind kind_;
    double start_;
    double end_;
    std::size_t t_fin_;
};

inline double temperature_at(const TemperatureSchedule& s, std::size_t t) { return s.at(t); }

/// Uphill acceptance probability exp(-dE/T). Both SA variants route through this expression.
inline double boltzmann_factor(Energy delta_e, double temperature) noexcept {
    return std::exp(-static_cast<double>(delta_e) / temperature);
}

/// True with probability min(1, exp(-dE/T)). Draws one uniform only when dE > 0.
inline bool metropolis_accept(Energy delta_e, double temperature, Rng& rng) {
    require(temperature > 0.0, "temperature must be positive");
    if (delta_e <= 0) return true;
    return rng.uniform() < boltzmann_factor(delta_e, temperature);
}

enum class SaVariant { Conventional, Optimized };

namespace detail {

/// exp(-dE/T) for dE = 2, 4, ..., 2*max_half, rebuilt lazily when T changes.
/// Only used for bimodal zero-field models, where every dE is an even integer of bounded size.
class AcceptanceTable {
public:
    explicit AcceptanceTable(std::size_t max_half) : table_(max_half + 1, 0.0) {}

    void set_temperature(double T) {
        if (T == temp_) return;
        temp_ = T;
        for (std::size_t k = 1; k < table_.size(); ++k) table_[k] = boltzmann_factor(2 * static_cast<Energy>(k), T);
    }

    double operator()(Energy delta_e) const noexcept { return table_[static_cast<std::size_t>(delta_e / 2)]; }

private:
    std::vector<double> table_;
    double temp_ = -1.0;
};

}  // namespace detail

template <class Observer = NoObserver>
RunResult run_sa(const IsingModel& model, const TemperatureSchedule& schedule, std::uint64_t seed,
                 SaVariant variant = SaVariant::Optimized, const RunOptions& opts = {},
                 Observer&& observe = {}) {
    const std::size_t n = model.size();
    Rng rng(seed);
    SpinState state = SpinState::random(n, rng);
    Energy e = energy(model, state);
    detail::BestTracker best(e, state, opts.track_best_state);

    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);

    const bool optimized = variant == SaVariant::Optimized;
    std::vector<Energy> cache;
    if (optimized) {
        cache.resize(n);
        for (std::size_t i = 0; i < n; ++i) cache[i] = local_field_unchecked(model, state, i);
    }
    const bool tabulate = optimized && model.distribution() == Distribution::Bimodal && model.zero_field();
    detail::AcceptanceTable table(tabulate ? n : 0);

    RunResult out;
    if (opts.trace) out.trace.reserve(schedule.t_fin());

    for (std::size_t t = 0; t < schedule.t_fin(); ++t) {
        const double T = schedule.at(t);
        if (tabulate) table.set_temperature(T);
        shuffle(order, rng);
        for (std::size_t step = 0; step < n; ++step) {
            const std::size_t i = order[step];
            const Energy field = optimized ? cache[i] : local_field_unchecked(model, state, i);
            const Energy dE = 2 * static_cast<Energy>(state[i]) * field;
            const Energy before = e;
            const bool accept =
                dE <= 0 || rng.uniform() < (tabulate ? table(dE) : boltzmann_factor(dE, T));
            if (accept) {
                if (optimized) {
                    // s_i -> -s_i shifts every other field by -2 J_ji s_i(old)
                    const auto row = model.row(i);
                    const Energy s_old = state[i];
                    for (std::size_t j = 0; j < n; ++j) cache[j] -= 2 * static_cast<Energy>(row[j]) * s_old;
                }
                state.flip(i);
                e += dE;
                best.offer(e, state);
            }
            observe(UpdateEvent{t, step, i, before, e, state, cache});
        }
        if (opts.trace) out.trace.push_back({t, e, T, best.best});
    }

    out.final_energy = e;
    out.best_energy = best.best;
    out.best_state = opts.track_best_state ? std::move(best.best_state) : SpinState{};
    out.final_state = std::move(state);
    out.iterations = schedule.t_fin();
    return out;
}

}  // namespace emvl
