#include <gtest/gtest.h>

#include <cmath>

#include "emvl/sa.hpp"
#include "oracles.hpp"

using namespace emvl;

TEST(TemperatureSchedule, ConventionalEndpoints) {
    const auto s = TemperatureSchedule::conventional(1000);
    EXPECT_DOUBLE_EQ(temperature_at(s, 0), 100.0);
    EXPECT_DOUBLE_EQ(temperature_at(s, 999), 0.1);
    EXPECT_THROW(temperature_at(s, 1000), ContractError);
}

TEST(TemperatureSchedule, TempLinearMidpoint) {
    const auto s = TemperatureSchedule::temp_linear(890, 215, 3);
    EXPECT_DOUBLE_EQ(s.at(1), 552.5);
    EXPECT_DOUBLE_EQ(s.at(2), 215.0);
}

TEST(TemperatureSchedule, NonIncreasingAndValidated) {
    for (const auto& s : {TemperatureSchedule::conventional(77), TemperatureSchedule::temp_linear(40, 3, 77),
                          TemperatureSchedule::beta_linear(0.1, 3, 1)}) {
        for (std::size_t t = 0; t < s.t_fin(); ++t) {
            EXPECT_GT(s.at(t), 0.0);
            if (t) { EXPECT_LE(s.at(t), s.at(t - 1)); }
        }
    }
    EXPECT_THROW(TemperatureSchedule::beta_linear(0.0, 1, 10), ContractError);
    EXPECT_THROW(TemperatureSchedule::beta_linear(2, 1, 10), ContractError);
    EXPECT_THROW(TemperatureSchedule::temp_linear(1, 2, 10), ContractError);
    EXPECT_THROW(TemperatureSchedule::temp_linear(1, 0, 10), ContractError);
}

TEST(Metropolis, DownhillAndFrozen) {
    Rng r(1);
    for (int k = 0; k < 1000; ++k) EXPECT_TRUE(metropolis_accept(-4, 0.3, r));
    for (int k = 0; k < 10000; ++k) EXPECT_FALSE(metropolis_accept(1000, 0.1, r));
    EXPECT_THROW(metropolis_accept(1, 0.0, r), ContractError);
}

TEST(Metropolis, AcceptanceRateMatchesBoltzmannFactor) {
    Rng r(2);
    const int draws = 100000;
    int acc = 0;
    for (int k = 0; k < draws; ++k) acc += metropolis_accept(2, 2.0, r);
    EXPECT_NEAR(acc / double(draws), std::exp(-1.0), 0.01);
}

TEST(RunSa, SingleSpinAlignsWithField) {
    IsingModel m(1, {0}, {5});
    for (auto v : {SaVariant::Conventional, SaVariant::Optimized}) {
        const auto res = run_sa(m, TemperatureSchedule::conventional(200), 4, v);
        EXPECT_EQ(res.final_state[0], 1);
        EXPECT_EQ(res.final_energy, -5);
    }
}

TEST(RunSa, FindsGroundStateOnSmallBimodal) {
    const auto m = gen_sk_bimodal(16, 2024);
    const Energy gs = oracle::brute_force_ground(m);
    int hits = 0;
    for (std::uint64_t k = 0; k < 200; ++k) {
        const auto res = run_sa(m, TemperatureSchedule::conventional(500), stream_seed(2, m.instance_id(), k));
        ASSERT_GE(res.best_energy, gs);
        hits += res.best_energy == gs;
    }
    EXPECT_GE(hits, 180);
}

TEST(RunSa, VariantsShareTrajectories) {
    RunOptions opts;
    opts.trace = true;
    for (const auto& m : {gen_sk_bimodal(33, 1), gen_sk_gaussian(33, 2), gen_sk_bimodal(70, 3)}) {
        for (const auto& sched : {TemperatureSchedule::conventional(150), TemperatureSchedule::temp_linear(900, 200, 150),
                                  TemperatureSchedule::temp_linear(20, 3, 150)}) {
            const auto a = run_sa(m, sched, 11, SaVariant::Conventional, opts);
            const auto b = run_sa(m, sched, 11, SaVariant::Optimized, opts);
            ASSERT_EQ(a.final_state, b.final_state);
            ASSERT_EQ(a.best_energy, b.best_energy);
            for (std::size_t t = 0; t < a.trace.size(); ++t) ASSERT_EQ(a.trace[t].energy, b.trace[t].energy);
        }
    }
}

TEST(RunSa, FieldCacheStaysCoherent) {
    const auto m = gen_sk_gaussian(10, 5);
    std::size_t checks = 0;
    run_sa(m, TemperatureSchedule::temp_linear(2000, 50, 60), 3, SaVariant::Optimized, {},
           [&](const UpdateEvent& ev) {
               if (ev.step + 1 != m.size()) return;
               ASSERT_EQ(ev.cached_fields.size(), m.size());
               const auto ints = oracle::to_ints(ev.state);
               for (std::size_t i = 0; i < m.size(); ++i)
                   ASSERT_EQ(ev.cached_fields[i], oracle::direct_field(m, ints, i));
               ASSERT_EQ(ev.energy_after, oracle::direct_energy(m, ev.state));
               ++checks;
           });
    EXPECT_EQ(checks, 60u);
}

TEST(RunSa, DetailedBalanceAgainstExactBoltzmann) {
    // One long constant-T chain; one energy sample per sweep.
    for (auto [m, T] : {std::pair{gen_sk_bimodal(6, 10), 2.0}, std::pair{gen_sk_gaussian(7, 10), 300.0}}) {
        RunOptions opts;
        opts.trace = true;
        const auto res = run_sa(m, TemperatureSchedule::constant(T, 200000), 5, SaVariant::Optimized, opts);
        std::vector<Energy> sample;
        for (std::size_t t = 100; t < res.trace.size(); ++t) sample.push_back(res.trace[t].energy);
        EXPECT_LT(oracle::total_variation(sample, oracle::boltzmann_levels(m, T)), 0.02);
    }
}
