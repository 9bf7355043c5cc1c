#pragma once

// Bit-level E-MVL for bimodal, zero-field models.
//
// Spins and couplings are packed into 64-bit words (bit = (value + 1) / 2).
// The per-neighbour contribution J_ij s_j is XNOR(s_j, J_ij): bit 1 means +1.
// Extraction sets become masks; the vote tally is a popcount, so the internal
// signal is 2 * popcount(xnor & mask) - |mask|. The self slot carries h_i = 0
// and is never part of the mask.
//
// RNG consumption follows run_emvl exactly (see emvl.hpp), which makes the two
// engines produce identical trajectories from the same seed.

#include <bit>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "emvl/emvl.hpp"
#include "emvl/error.hpp"
#include "emvl/model.hpp"
#include "emvl/rng.hpp"
#include "emvl/run.hpp"

namespace emvl {

using Word = std::uint64_t;

inline constexpr std::size_t words_for(std::size_t n) noexcept { return (n + 63) / 64; }

class BitSpinWord {
public:
    BitSpinWord() = default;
    explicit BitSpinWord(std::size_t n) : n_(n), words_(words_for(n), 0) {}

    static BitSpinWord from_state(const SpinState& s) {
        BitSpinWord w(s.size());
        for (std::size_t i = 0; i < s.size(); ++i)
            if (s[i] > 0) w.words_[i >> 6] |= Word{1} << (i & 63);
        return w;
    }

    SpinState to_state() const {
        std::vector<Spin> out(n_);
        for (std::size_t i = 0; i < n_; ++i) out[i] = bit(i) ? 1 : -1;
        return SpinState(std::move(out));
    }

    std::size_t size() const noexcept { return n_; }
    bool bit(std::size_t i) const noexcept { return (words_[i >> 6] >> (i & 63)) & 1u; }
    void flip(std::size_t i) noexcept { words_[i >> 6] ^= Word{1} << (i & 63); }
    std::span<const Word> words() const noexcept { return words_; }

    friend bool operator==(const BitSpinWord&, const BitSpinWord&) = default;

private:
    std::size_t n_ = 0;
    std::vector<Word> words_;
};

/// XNOR gate: 1 encodes contribution +1 (spin aligned with the coupling sign), 0 encodes -1.
inline constexpr unsigned xnor_contrib(unsigned sigma_bit, unsigned j_bit) noexcept {
    return (~(sigma_bit ^ j_bit)) & 1u;
}

/// 2 * popcount(contrib) - count. `contrib` must already be masked to the extracted members.
inline Energy majority_signal(std::span<const Word> contrib, std::size_t count) noexcept {
    std::size_t ones = 0;
    for (Word w : contrib) ones += static_cast<std::size_t>(std::popcount(w));
    return 2 * static_cast<Energy>(ones) - static_cast<Energy>(count);
}

inline Energy majority_signal(Word contrib, std::size_t count) noexcept {
    return majority_signal(std::span<const Word>(&contrib, 1), count);
}

inline bool supports_bit_engine(const IsingModel& m) {
    if (!m.zero_field()) return false;
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = i + 1; j < m.size(); ++j)
            if (const auto c = m.coupling(i, j); c != 1 && c != -1) return false;
    return true;
}

/// Packed coupling rows plus per-row "everyone but me" masks.
class BitCouplings {
public:
    explicit BitCouplings(const IsingModel& m) : n_(m.size()), nw_(words_for(m.size())) {
        if (!supports_bit_engine(m))
            throw UnsupportedModel("bit engine needs +-1 couplings and zero fields (instance '" +
                                   m.instance_id() + "')");
        rows_.assign(n_ * nw_, 0);
        others_.assign(n_ * nw_, 0);
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) {
                const Word b = Word{1} << (j & 63);
                if (j != i) others_[i * nw_ + (j >> 6)] |= b;
                if (m.coupling(i, j) > 0) rows_[i * nw_ + (j >> 6)] |= b;
            }
        }
    }

    std::size_t size() const noexcept { return n_; }
    std::size_t word_count() const noexcept { return nw_; }
    std::span<const Word> row(std::size_t i) const noexcept { return {rows_.data() + i * nw_, nw_}; }
    std::span<const Word> others(std::size_t i) const noexcept { return {others_.data() + i * nw_, nw_}; }

    /// Full local field of spin i: 2 * popcount(xnor(s, J_i) & others_i) - (n - 1).
    Energy field(const BitSpinWord& s, std::size_t i) const noexcept {
        const auto sw = s.words();
        const auto jw = row(i);
        const auto ow = others(i);
        std::size_t ones = 0;
        for (std::size_t w = 0; w < nw_; ++w) ones += std::popcount(~(sw[w] ^ jw[w]) & ow[w]);
        return 2 * static_cast<Energy>(ones) - static_cast<Energy>(n_ - 1);
    }

    /// Partial field over an explicit mask (self bit must be clear).
    Energy masked_field(const BitSpinWord& s, std::size_t i, std::span<const Word> mask,
                        std::size_t count) const noexcept {
        const auto sw = s.words();
        const auto jw = row(i);
        std::size_t ones = 0;
        for (std::size_t w = 0; w < nw_; ++w) ones += std::popcount(~(sw[w] ^ jw[w]) & mask[w]);
        return 2 * static_cast<Energy>(ones) - static_cast<Energy>(count);
    }

    /// E = -1/2 sum_i s_i * field_i.
    Energy energy(const BitSpinWord& s) const noexcept {
        Energy twice = 0;
        for (std::size_t i = 0; i < n_; ++i) twice += (s.bit(i) ? 1 : -1) * field(s, i);
        return -twice / 2;
    }

private:
    std::size_t n_;
    std::size_t nw_;
    std::vector<Word> rows_;
    std::vector<Word> others_;
};

template <class Observer = NoObserver>
RunResult run_emvl_bits(const IsingModel& model, const SparsitySchedule& schedule, std::uint64_t seed,
                        const RunOptions& opts = {}, Observer&& observe = {}) {
    const BitCouplings jb(model);
    const std::size_t n = model.size();
    const std::size_t nw = jb.word_count();

    Rng rng(seed);
    SpinState mirror = SpinState::random(n, rng);
    BitSpinWord bits = BitSpinWord::from_state(mirror);
    Energy e = jb.energy(bits);
    detail::BestTracker best(e, mirror, opts.track_best_state);

    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    ExtractionSampler sampler(n);
    std::vector<Word> mask(nw, 0);

    RunResult out;
    if (opts.trace) out.trace.reserve(schedule.t_fin());

    for (std::size_t t = 0; t < schedule.t_fin(); ++t) {
        const double p = schedule.at(t);
        const std::size_t count = n_extract(p, n);
        shuffle(order, rng);
        for (std::size_t step = 0; step < n; ++step) {
            const std::size_t i = order[step];
            const bool full = count >= n;
            Energy signal;
            if (full) {
                signal = jb.field(bits, i);
            } else {
                std::fill(mask.begin(), mask.end(), Word{0});
                std::size_t voters = 0;
                for (std::uint32_t k : sampler.sample(rng, count)) {
                    if (k == i) continue;
                    mask[k >> 6] |= Word{1} << (k & 63);
                    ++voters;
                }
                signal = jb.masked_field(bits, i, mask, voters);
            }
            const Spin next = decide_spin(signal, rng);
            const Energy before = e;
            if (next != mirror[i]) {
                const Energy field = full ? signal : jb.field(bits, i);
                e += 2 * static_cast<Energy>(mirror[i]) * field;
                bits.flip(i);
                mirror.flip(i);
                best.offer(e, mirror);
            }
            observe(UpdateEvent{t, step, i, before, e, mirror});
        }
        if (opts.trace) out.trace.push_back({t, e, p, best.best});
    }

    out.final_energy = e;
    out.best_energy = best.best;
    out.best_state = opts.track_best_state ? std::move(best.best_state) : SpinState{};
    out.final_state = bits.to_state();
    out.iterations = schedule.t_fin();
    return out;
}

}  // namespace emvl
