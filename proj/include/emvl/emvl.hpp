#pragma once

// Extraction-type majority voting logic (E-MVL).
//
// Each sweep visits all spins in a fresh random order. For spin i, a random
// subset of n_i = max(1, floor((1 - p_s) * L_i)) slots out of L_i = n is
// extracted; slot i stands for the spin's own field term. The spin takes the
// sign of the partial local field over the extracted slots, with a fair coin
// on ties. Updates are sequential and in place.
//
// RNG consumption per run, shared verbatim with the bit-level engine:
//   1. n coin draws for the initial configuration;
//   2. per sweep, n-1 draws for the Fisher-Yates visiting order;
//   3. per update, n_i draws for the partial Fisher-Yates subset
//      (none when n_i == L_i, the full set);
//   4. one coin draw when the signal is exactly zero.

#include <cassert>
#include <cmath>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "emvl/error.hpp"
#include "emvl/model.hpp"
#include "emvl/rng.hpp"
#include "emvl/run.hpp"

namespace emvl {

class SparsitySchedule {
public:
    enum class Shape { Linear };

    SparsitySchedule(double p_init, double p_fin, std::size_t t_fin, Shape shape = Shape::Linear)
        : p_init_(p_init), p_fin_(p_fin), t_fin_(t_fin), shape_(shape) {
        if (!(p_fin >= 0.0 && p_fin <= p_init && p_init <= 1.0))
            throw ContractError("sparsity schedule needs 0 <= p_fin <= p_init <= 1");
        if (t_fin < 1) throw ContractError("sparsity schedule needs t_fin >= 1");
    }

    static SparsitySchedule constant(double p, std::size_t t_fin) { return {p, p, t_fin}; }

    double p_init() const noexcept { return p_init_; }
    double p_fin() const noexcept { return p_fin_; }
    std::size_t t_fin() const noexcept { return t_fin_; }
    Shape shape() const noexcept { return shape_; }

    double at(std::size_t t) const {
        if (t >= t_fin_) throw ContractError("sparsity schedule queried past t_fin");
        if (t_fin_ == 1) return p_init_;
        if (t == t_fin_ - 1) return p_fin_;
        return p_init_ + (p_fin_ - p_init_) * static_cast<double>(t) / static_cast<double>(t_fin_ - 1);
    }

private:
    double p_init_;
    double p_fin_;
    std::size_t t_fin_;
    Shape shape_;
};

inline double sparsity_at(const SparsitySchedule& s, std::size_t t) { return s.at(t); }

/// max(1, floor((1 - p_s) * L)).
inline std::size_t n_extract(double p_s, std::size_t slots) {
    require(p_s >= 0.0 && p_s <= 1.0, "sparsity must lie in [0, 1]");
    require(slots >= 1, "slot count must be positive");
    const auto k = static_cast<std::size_t>(std::floor((1.0 - p_s) * static_cast<double>(slots)));
    return std::clamp<std::size_t>(k, 1, slots);
}

struct ExtractionSet {
    std::size_t owner = 0;
    std::vector<std::uint32_t> members;
};

/// Draws uniform n_i-subsets of {0..L-1} by partial Fisher-Yates over a reusable buffer.
/// The buffer is never reset; any permutation is a valid starting point for the shuffle.
class ExtractionSampler {
public:
    explicit ExtractionSampler(std::size_t slots) : buf_(slots) {
        std::iota(buf_.begin(), buf_.end(), 0u);
    }

    std::size_t slots() const noexcept { return buf_.size(); }

    std::span<const std::uint32_t> sample(Rng& rng, std::size_t count) {
        const auto L = static_cast<std::uint32_t>(buf_.size());
        if (count >= L) return buf_;
        for (std::uint32_t k = 0; k < count; ++k) {
            const std::uint32_t j = k + rng.below(L - k);
            std::swap(buf_[k], buf_[j]);
        }
        return {buf_.data(), count};
    }

private:
    std::vector<std::uint32_t> buf_;
};

inline ExtractionSet sample_extraction_set(Rng& rng, std::size_t owner, std::size_t slots,
                                           std::size_t count) {
    require(count >= 1 && count <= slots, "extraction count must lie in [1, L_i]");
    require(owner < slots, "owner index must be a valid slot");
    ExtractionSampler sampler(slots);
    const auto m = sampler.sample(rng, count);
    return {owner, {m.begin(), m.end()}};
}

inline Energy internal_signal_unchecked(const IsingModel& m, const SpinState& s, std::size_t owner,
                                        std::span<const std::uint32_t> members) noexcept {
    const auto row = m.row(owner);
    Energy acc = 0;
    for (std::uint32_t k : members) {
        if (k == owner)
            acc += m.field(owner);
        else
            acc += static_cast<Energy>(row[k]) * s[k];
    }
    return acc;
}

/// Partial local field over the extracted slots; h_i is included iff i is a member.
inline Energy internal_signal(const IsingModel& m, const SpinState& s, const ExtractionSet& set) {
    check_state(m, s);
    check_index(m, set.owner);
    for (auto k : set.members) check_index(m, k);
    return internal_signal_unchecked(m, s, set.owner, set.members);
}

inline Spin decide_spin(Energy signal, Rng& rng) noexcept {
    if (signal > 0) return 1;
    if (signal < 0) return -1;
    return static_cast<Spin>(rng.coin());
}

/// Full E-MVL run. The observer sees every single-spin update.
template <class Observer = NoObserver>
RunResult run_emvl(const IsingModel& model, const SparsitySchedule& schedule, std::uint64_t seed,
                   const RunOptions& opts = {}, Observer&& observe = {}) {
    const std::size_t n = model.size();
    Rng rng(seed);
    SpinState state = SpinState::random(n, rng);
    Energy e = energy(model, state);
    detail::BestTracker best(e, state, opts.track_best_state);

    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    ExtractionSampler sampler(n);

    RunResult out;
    if (opts.trace) out.trace.reserve(schedule.t_fin());

    for (std::size_t t = 0; t < schedule.t_fin(); ++t) {
        const double p = schedule.at(t);
        const std::size_t count = n_extract(p, n);
        shuffle(order, rng);
        for (std::size_t step = 0; step < n; ++step) {
            const std::size_t i = order[step];
            const bool full = count >= n;
            const Energy signal = full ? local_field_unchecked(model, state, i)
                                       : internal_signal_unchecked(model, state, i, sampler.sample(rng, count));
            const Spin next = decide_spin(signal, rng);
            const Energy before = e;
            if (next != state[i]) {
                const Energy field = full ? signal : local_field_unchecked(model, state, i);
                e += 2 * static_cast<Energy>(state[i]) * field;
                state.flip(i);
                best.offer(e, state);
            }
            assert(!full || e <= before);
            observe(UpdateEvent{t, step, i, before, e, state});
        }
        if (opts.trace) out.trace.push_back({t, e, p, best.best});
    }

    out.final_energy = e;
    out.best_energy = best.best;
    out.best_state = opts.track_best_state ? std::move(best.best_state) : SpinState{};
    out.final_state = std::move(state);
    out.iterations = schedule.t_fin();
    return out;
}

}  // namespace emvl
