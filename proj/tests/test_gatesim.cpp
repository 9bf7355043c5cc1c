#include <gtest/gtest.h>

#include "emvl/gatesim.hpp"
#include "oracles.hpp"

using namespace emvl;

TEST(BitSpinWord, RoundTripsSpinStates) {
    Rng r(1);
    for (std::size_t n : {1u, 7u, 63u, 64u, 65u, 130u}) {
        for (int k = 0; k < 10; ++k) {
            const auto s = SpinState::random(n, r);
            const auto w = BitSpinWord::from_state(s);
            ASSERT_EQ(w.to_state(), s);
            for (std::size_t i = 0; i < n; ++i) ASSERT_EQ(w.bit(i), s[i] > 0);
        }
    }
}

TEST(Xnor, TruthTableMatchesProduct) {
    EXPECT_EQ(xnor_contrib(1, 1), 1u);
    EXPECT_EQ(xnor_contrib(0, 1), 0u);
    for (unsigned s = 0; s < 2; ++s)
        for (unsigned j = 0; j < 2; ++j)
            EXPECT_EQ(2 * int(xnor_contrib(s, j)) - 1, (2 * int(s) - 1) * (2 * int(j) - 1));
}

TEST(MajoritySignal, SmallCases) {
    EXPECT_EQ(majority_signal(Word{0b111}, 3), 3);
    EXPECT_EQ(majority_signal(Word{0b01}, 2), 0);
    EXPECT_EQ(majority_signal(Word{0}, 4), -4);
}

TEST(MajoritySignal, AgreesWithArithmeticSignalOnRandomMasks) {
    Rng r(2);
    for (std::size_t n : {5u, 40u, 64u, 100u}) {
        const auto m = gen_sk_bimodal(n, n);
        const BitCouplings jb(m);
        for (int trial = 0; trial < 200; ++trial) {
            const auto s = SpinState::random(n, r);
            const auto bits = BitSpinWord::from_state(s);
            const std::size_t i = r.below(static_cast<std::uint32_t>(n));
            const auto set = sample_extraction_set(r, i, n, 1 + r.below(static_cast<std::uint32_t>(n)));
            std::vector<Word> mask(words_for(n), 0), contrib(words_for(n), 0);
            std::size_t voters = 0;
            for (auto k : set.members) {
                if (k == i) continue;
                mask[k >> 6] |= Word{1} << (k & 63);
                ++voters;
            }
            for (std::size_t w = 0; w < mask.size(); ++w)
                contrib[w] = ~(bits.words()[w] ^ jb.row(i)[w]) & mask[w];
            const Energy sig = majority_signal(contrib, voters);
            ASSERT_EQ(sig, internal_signal(m, s, set));
            ASSERT_EQ((sig - Energy(voters)) % 2, 0);
        }
    }
}

TEST(BitCouplings, FieldAndEnergyMatchArithmetic) {
    Rng r(3);
    const auto m = gen_sk_bimodal(77, 4);
    const BitCouplings jb(m);
    for (int k = 0; k < 10; ++k) {
        const auto s = SpinState::random(77, r);
        const auto b = BitSpinWord::from_state(s);
        EXPECT_EQ(jb.energy(b), oracle::direct_energy(m, s));
        for (std::size_t i = 0; i < 77; i += 5) EXPECT_EQ(jb.field(b, i), local_field(m, s, i));
    }
}

TEST(RunEmvlBits, TrajectoryIdenticalToArithmeticEngine) {
    Rng pick(4);
    RunOptions opts;
    opts.trace = true;
    for (int inst = 0; inst < 12; ++inst) {
        const std::size_t n = 4 + pick.below(61);
        const auto m = gen_sk_bimodal(n, 500 + inst);
        const double p0 = pick.uniform();
        const double p1 = p0 * pick.uniform();
        const SparsitySchedule sched(p0, inst % 3 ? 0.0 : p1, 20 + pick.below(80));
        const auto a = run_emvl(m, sched, inst, opts);
        const auto b = run_emvl_bits(m, sched, inst, opts);
        ASSERT_EQ(a.final_state, b.final_state) << "n=" << n;
        ASSERT_EQ(a.best_state, b.best_state);
        ASSERT_EQ(a.best_energy, b.best_energy);
        EXPECT_EQ(energy(m, b.best_state), a.best_energy);
        for (std::size_t t = 0; t < a.trace.size(); ++t) ASSERT_EQ(a.trace[t].energy, b.trace[t].energy);
    }
}

TEST(RunEmvlBits, TrivialModel) {
    IsingModel one(1, {0}, {0}, Distribution::Bimodal);
    const auto a = run_emvl(one, SparsitySchedule(0.5, 0.0, 4), 9);
    const auto b = run_emvl_bits(one, SparsitySchedule(0.5, 0.0, 4), 9);
    EXPECT_EQ(a.final_state, b.final_state);
    EXPECT_EQ(b.best_energy, 0);
}

TEST(RunEmvlBits, RejectsUnsupportedModels) {
    EXPECT_THROW(run_emvl_bits(gen_sk_gaussian(8, 1), SparsitySchedule(0.3, 0.0, 5), 1), UnsupportedModel);
    IsingModel field(2, {0, 1, 1, 0}, {1, 0});
    EXPECT_THROW(run_emvl_bits(field, SparsitySchedule(0.3, 0.0, 5), 1), UnsupportedModel);
}
