#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "emvl/metrics.hpp"
#include "oracles.hpp"

using namespace emvl;

TEST(Exhaustive, TinyModels) {
    EXPECT_EQ(exhaustive_ground_state(IsingModel(2, {0, 1, 1, 0}, {0, 0})).e_gs, -1);
    // antiferromagnetic triangle: 8 states, energies +3 (aligned) or -1 (one frustrated bond)
    IsingModel tri(3, {0, -1, -1, -1, 0, -1, -1, -1, 0}, {0, 0, 0});
    EXPECT_EQ(exhaustive_ground_state(tri).e_gs, -1);
}

TEST(Exhaustive, MatchesReversedOrderEnumeration) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const auto m = seed % 2 ? gen_sk_bimodal(16, seed) : gen_sk_gaussian(16, seed);
        const auto r = exhaustive_ground_state(m);
        EXPECT_EQ(r.e_gs, oracle::brute_force_ground(m));
        EXPECT_EQ(energy(m, r.state), r.e_gs);
        EXPECT_EQ(energy(m, r.state.inverted()), r.e_gs);
    }
}

TEST(Exhaustive, HandlesFields) {
    IsingModel m(4, {0, 1, -2, 0, 1, 0, 3, -1, -2, 3, 0, 2, 0, -1, 2, 0}, {1, -2, 0, 3});
    EXPECT_EQ(exhaustive_ground_state(m).e_gs, oracle::brute_force_ground(m));
}

TEST(Exhaustive, InvariantUnderRelabeling) {
    const auto m = gen_sk_gaussian(12, 8);
    std::vector<std::size_t> perm(12);
    std::iota(perm.begin(), perm.end(), 0);
    Rng r(3);
    shuffle(perm, r);
    std::vector<Coupling> j(144);
    for (std::size_t a = 0; a < 12; ++a)
        for (std::size_t b = 0; b < 12; ++b) j[perm[a] * 12 + perm[b]] = m.coupling(a, b);
    IsingModel relabeled(12, j, std::vector<Coupling>(12, 0));
    EXPECT_EQ(exhaustive_ground_state(relabeled).e_gs, exhaustive_ground_state(m).e_gs);
}

TEST(Exhaustive, RefusesAboveCap) {
    EXPECT_THROW(exhaustive_ground_state(gen_sk_bimodal(30, 1)), ContractError);
    EXPECT_THROW(exhaustive_ground_state(gen_sk_bimodal(12, 1), 10), ContractError);
}

TEST(BestKnown, BoundedByExhaustiveAndMonotone) {
    const auto m = gen_sk_gaussian(18, 4);
    const Energy exact = exhaustive_ground_state(m).e_gs;
    const auto small = best_known_energy(m, default_budget(4, 100), 9);
    const auto large = best_known_energy(m, default_budget(8, 100), 9);
    EXPECT_GE(small.e_gs, exact);
    EXPECT_LE(large.e_gs, small.e_gs);
    EXPECT_EQ(large.provenance.kind, Provenance::Kind::BestKnown);
    EXPECT_EQ(large.provenance.trials, 8u);
    EXPECT_EQ(large.provenance.algorithms.size(), 3u);
    EXPECT_EQ(best_known_energy(m, default_budget(16, 500), 9).e_gs, exact);
}

TEST(Targets, SttTargetRoundsTowardGroundState) {
    EXPECT_EQ(stt_target(-150), -149);  // 0.99 * -150 = -148.5
    EXPECT_EQ(stt_target(-100), -99);
    EXPECT_EQ(stt_target(-1), -1);
    EXPECT_EQ(stt_target(0), 0);
    EXPECT_TRUE(meets(Metric::Stt, -149, -150));
    EXPECT_FALSE(meets(Metric::Stt, -148, -150));
    EXPECT_TRUE(meets(Metric::Sts, -150, -150));
    EXPECT_FALSE(meets(Metric::Sts, -149, -150));
}

TEST(SuccessProbability, Counting) {
    std::vector<Energy> all(10, -5), none(10, -1), mixed(100, -1);
    for (int k = 0; k < 37; ++k) mixed[k] = -5;
    EXPECT_DOUBLE_EQ(success_probability(all, Metric::Sts, -5), 1.0);
    EXPECT_DOUBLE_EQ(success_probability(none, Metric::Sts, -5), 0.0);
    EXPECT_DOUBLE_EQ(success_probability(mixed, Metric::Sts, -5), 0.37);
    EXPECT_THROW(success_probability(std::vector<Energy>{}, Metric::Sts, -5), ContractError);
}

TEST(R99, ClosedForms) {
    EXPECT_DOUBLE_EQ(*r99(0.99, 1000), 1000.0);
    EXPECT_DOUBLE_EQ(*r99(1.0, 1000), 1000.0);
    EXPECT_NEAR(*r99(0.5, 1000), 6643.856189774724, 1e-6);
    EXPECT_NEAR(*r99(0.9, 2000), 4000.0, 1e-9);
    EXPECT_FALSE(r99(0.0, 1000).has_value());
}

TEST(R99, MonotoneInPAndLinearInTfin) {
    double prev = INFINITY;
    for (double p = 0.01; p <= 1.0; p += 0.01) {
        const double v = *r99(p, 100);
        EXPECT_LE(v, prev + 1e-9);
        prev = v;
        EXPECT_NEAR(*r99(p, 300), 3 * v, 1e-9 * v);
    }
}

TEST(SttSts, UnreachablePropagation) {
    std::vector<double> ps(20, 0.8);
    EXPECT_TRUE(stt(ps, 100).has_value());
    ps[7] = 0.0;
    EXPECT_FALSE(stt(ps, 100).has_value());
    EXPECT_FALSE(sts(ps, 100).has_value());
    EXPECT_DOUBLE_EQ(*sts(std::vector<double>(3, 1.0), 250), 250.0);
}

TEST(OptimizeTfin, ReturnsArgminWithSmallTies) {
    // Synthetic table with a single good grid point.
    auto synth = [](std::size_t t) {
        RunMetrics m;
        m.t_fin = t;
        const double p = t == 400 ? 0.95 : 0.5;
        m.p_hat_stt = {p};
        m.stt = stt(m.p_hat_stt, t);
        m.p_hat_sts = {p};
        m.sts = m.stt;
        return m;
    };
    const auto best = optimize_tfin(synth, {100, 200, 400, 800}, Metric::Stt);
    // R99 values: 100 -> 664.4, 200 -> 1328.8, 400 -> 614.9, 800 -> 5315.1
    EXPECT_EQ(*best.t_fin, 400u);
    EXPECT_EQ(best.table.size(), 4u);

    const auto single = optimize_tfin(synth, {100}, Metric::Stt);
    EXPECT_EQ(*single.t_fin, 100u);

    auto tie = [](std::size_t t) {
        RunMetrics m;
        m.t_fin = t;
        m.p_hat_sts = {1.0};
        m.sts = static_cast<double>(t <= 200 ? 200 : t);
        return m;
    };
    EXPECT_EQ(*optimize_tfin(tie, {200, 100, 400}, Metric::Sts).t_fin, 100u);

    auto never = [](std::size_t t) {
        RunMetrics m;
        m.t_fin = t;
        return m;
    };
    const auto none = optimize_tfin(never, {10, 20}, Metric::Sts);
    EXPECT_FALSE(none.t_fin.has_value());
    EXPECT_EQ(none.table.size(), 2u);
    EXPECT_THROW(optimize_tfin(never, {}, Metric::Sts), ContractError);
}

TEST(OptimizeTfin, FullSuccessPointEqualsTfin) {
    const auto m = gen_sk_bimodal(10, 3);
    const std::vector<IsingModel> inst{m};
    const std::vector<Energy> gs{exhaustive_ground_state(m).e_gs};
    const std::vector<AlgorithmSpec> alg{AlgorithmSpec::emvl(0.3)};
    const auto r = evaluate(inst, gs, alg, 200, 20, 1);
    EXPECT_DOUBLE_EQ(r.p_hat_sts[0], 1.0);
    EXPECT_DOUBLE_EQ(*r.sts, 200.0);
    EXPECT_DOUBLE_EQ(*r.stt, 200.0);
    EXPECT_GE(r.p_hat_stt[0], r.p_hat_sts[0]);
}

TEST(Evaluate, SttSuccessDominatesStsSuccess) {
    std::vector<IsingModel> inst;
    std::vector<Energy> gs;
    std::vector<AlgorithmSpec> alg;
    for (std::uint64_t k = 0; k < 3; ++k) {
        inst.push_back(gen_sk_gaussian(14, k));
        gs.push_back(exhaustive_ground_state(inst.back()).e_gs);
        alg.push_back(AlgorithmSpec::sa(Engine::SaOptimized, TemperatureSchedule::Kind::BetaLinear, 0.01, 10));
    }
    const auto r = evaluate(inst, gs, alg, 20, 50, 4, 2);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_GE(r.p_hat_stt[i], r.p_hat_sts[i]);
    EXPECT_EQ(evaluate(inst, gs, alg, 20, 50, 4, 1).p_hat_sts, r.p_hat_sts);
}
