#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "emvl/model.hpp"
#include "oracles.hpp"

using namespace emvl;

namespace {

IsingModel pair_model(Coupling j12, Coupling h1 = 0, Coupling h2 = 0) {
    return IsingModel(2, {0, j12, j12, 0}, {h1, h2});
}

IsingModel random_custom(std::size_t n, std::uint64_t seed, int jmax = 5, int hmax = 3) {
    Rng r(seed);
    std::vector<Coupling> j(n * n, 0), h(n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            j[a * n + b] = j[b * n + a] = static_cast<Coupling>(r.below(2 * jmax + 1)) - jmax;
    for (auto& v : h) v = static_cast<Coupling>(r.below(2 * hmax + 1)) - hmax;
    return IsingModel(n, std::move(j), std::move(h));
}

}  // namespace

TEST(Energy, AlignedPair) { EXPECT_EQ(energy(pair_model(1), SpinState(2)), -1); }

TEST(Energy, AlignedTriangle) {
    IsingModel m(3, {0, 1, 1, 1, 0, 1, 1, 1, 0}, {0, 0, 0});
    EXPECT_EQ(energy(m, SpinState(3)), -3);
}

TEST(Energy, MatchesDirectSummation) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto m = random_custom(10, seed);
        Rng r(seed + 100);
        const auto s = SpinState::random(10, r);
        EXPECT_EQ(energy(m, s), oracle::direct_energy(m, s));
    }
}

TEST(Energy, LengthMismatchIsContractError) {
    EXPECT_THROW(energy(pair_model(1), SpinState(3)), ContractError);
}

TEST(Energy, GlobalInversionSymmetryWithZeroField) {
    const auto m = gen_sk_gaussian(30, 4);
    Rng r(9);
    for (int k = 0; k < 20; ++k) {
        const auto s = SpinState::random(30, r);
        EXPECT_EQ(energy(m, s), energy(m, s.inverted()));
    }
}

TEST(LocalField, Basics) {
    EXPECT_EQ(local_field(pair_model(1), SpinState(2), 0), 1);
    IsingModel zero(4, std::vector<Coupling>(16, 0), std::vector<Coupling>(4, 0));
    EXPECT_EQ(local_field(zero, SpinState(4), 2), 0);
    EXPECT_THROW(local_field(zero, SpinState(4), 4), ContractError);
}

TEST(LocalField, MatchesDirectSummation) {
    const auto m = random_custom(12, 77);
    Rng r(5);
    const auto s = SpinState::random(12, r);
    for (std::size_t i = 0; i < 12; ++i) EXPECT_EQ(local_field(m, s, i), oracle::direct_field(m, oracle::to_ints(s), i));
}

TEST(DeltaEnergy, Basics) {
    EXPECT_EQ(delta_energy(pair_model(1), SpinState(2), 0), 2);
    EXPECT_EQ(delta_energy(pair_model(1), SpinState(2), 1), 2);
    IsingModel zero(3, std::vector<Coupling>(9, 0), std::vector<Coupling>(3, 0));
    EXPECT_EQ(delta_energy(zero, SpinState(3), 1), 0);
    EXPECT_THROW(delta_energy(zero, SpinState(3), 7), ContractError);
}

TEST(DeltaEnergy, ExhaustiveAgainstRecomputeForSmallN) {
    for (std::size_t n : {2u, 5u, 8u, 12u}) {
        const auto m = random_custom(n, 1000 + n);
        for (std::uint64_t code = 0; code < (1u << n); ++code) {
            const auto ints = oracle::decode_reversed(code, n);
            const SpinState s(std::vector<Spin>(ints.begin(), ints.end()));
            const Energy e0 = oracle::direct_energy(m, ints);
            for (std::size_t i = 0; i < n; ++i) {
                auto flipped = ints;
                flipped[i] = -flipped[i];
                ASSERT_EQ(delta_energy(m, s, i), oracle::direct_energy(m, flipped) - e0);
            }
        }
    }
}

TEST(DeltaEnergy, RandomizedLargerN) {
    const auto m = gen_sk_gaussian(14, 3);
    Rng r(8);
    for (int trial = 0; trial < 30; ++trial) {
        auto s = SpinState::random(14, r);
        for (std::size_t i = 0; i < 14; ++i) {
            auto f = s;
            f.flip(i);
            EXPECT_EQ(delta_energy(m, s, i), oracle::direct_energy(m, f) - oracle::direct_energy(m, s));
        }
    }
    const auto big = gen_sk_bimodal(200, 3);
    auto s = SpinState::random(200, r);
    for (std::size_t i = 0; i < 200; i += 17) {
        auto f = s;
        f.flip(i);
        EXPECT_EQ(delta_energy(big, s, i), energy(big, f) - energy(big, s));
    }
}

TEST(Generators, BimodalValuesAndBalance) {
    const auto m = gen_sk_bimodal(100, 42);
    EXPECT_EQ(m.distribution(), Distribution::Bimodal);
    EXPECT_TRUE(m.zero_field());
    std::size_t plus = 0, pairs = 0;
    for (std::size_t i = 0; i < 100; ++i)
        for (std::size_t j = i + 1; j < 100; ++j) {
            const auto c = m.coupling(i, j);
            ASSERT_TRUE(c == 1 || c == -1);
            plus += c == 1;
            ++pairs;
        }
    // 4950 pairs: sd of the fraction is 0.0071, so [0.45, 0.55] is a 7-sigma band
    const double frac = double(plus) / double(pairs);
    EXPECT_GE(frac, 0.45);
    EXPECT_LE(frac, 0.55);
}

TEST(Generators, GaussianRangeAndScale) {
    const auto m = gen_sk_gaussian(200, 42);
    double sum = 0, sq = 0, k = 0;
    for (std::size_t i = 0; i < 200; ++i)
        for (std::size_t j = i + 1; j < 200; ++j) {
            const double c = m.coupling(i, j);
            ASSERT_GE(c, -512);
            ASSERT_LE(c, 511);
            sum += c;
            sq += c * c;
            k += 1;
        }
    const double sd = std::sqrt(sq / k - (sum / k) * (sum / k));
    EXPECT_GE(sd, 120.0);
    EXPECT_LE(sd, 136.0);
}

TEST(Generators, Deterministic) {
    EXPECT_EQ(gen_sk_bimodal(40, 5), gen_sk_bimodal(40, 5));
    EXPECT_EQ(gen_sk_gaussian(40, 5), gen_sk_gaussian(40, 5));
    EXPECT_NE(gen_sk_gaussian(40, 5), gen_sk_gaussian(40, 6));
}

TEST(Generators, RejectTinyN) {
    EXPECT_THROW(gen_sk_bimodal(1, 0), ContractError);
    EXPECT_THROW(gen_sk_gaussian(0, 0), ContractError);
}

TEST(Validation, RejectsBrokenInvariants) {
    EXPECT_THROW(IsingModel(2, {0, 1, -1, 0}, {0, 0}), ValidationError);
    EXPECT_THROW(IsingModel(2, {1, 1, 1, 0}, {0, 0}), ValidationError);
    EXPECT_THROW(IsingModel(2, {0, 2, 2, 0}, {0, 0}, Distribution::Bimodal), ValidationError);
    EXPECT_THROW(IsingModel(2, {0, 700, 700, 0}, {0, 0}, Distribution::GaussianQ10), ValidationError);
}

TEST(InstanceFile, RoundTrip) {
    const auto dir = std::filesystem::temp_directory_path() / "emvl_model_test";
    std::filesystem::create_directories(dir);
    for (const auto& m : {gen_sk_bimodal(8, 11), gen_sk_gaussian(9, 12)}) {
        const auto path = dir / (m.instance_id() + ".ising");
        save_instance(m, path);
        EXPECT_EQ(load_instance(path), m);
    }
    IsingModel with_field(3, {0, 2, -1, 2, 0, 4, -1, 4, 0}, {0, -3, 5}, Distribution::Custom, "tri", 99);
    std::stringstream ss;
    write_instance(ss, with_field);
    EXPECT_EQ(read_instance(ss), with_field);
}

TEST(InstanceFile, FormatIsLineOriented) {
    std::stringstream ss;
    write_instance(ss, IsingModel(3, {0, 1, 0, 1, 0, -1, 0, -1, 0}, {0, 2, 0}, Distribution::Custom, "x", 5));
    EXPECT_EQ(ss.str(), "# id: x\nising 3 custom 5\nh 1 2\nJ 0 1 1\nJ 0 2 0\nJ 1 2 -1\n");
}

TEST(InstanceFile, Errors) {
    auto parse = [](const std::string& text) {
        std::istringstream is(text);
        return read_instance(is);
    };
    EXPECT_THROW(parse("ising 2 custom 0\nJ 0 1 1\nJ 1 0 -1\n"), ValidationError);
    EXPECT_THROW(parse("ising 2 gaussian_q10 0\nJ 0 1 700\n"), ValidationError);
    try {
        parse("ising 3 bimodal 0\nJ 0 1 1\nJ 0 x 1\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
    EXPECT_THROW(parse("J 0 1 1\n"), ParseError);
    EXPECT_THROW(parse("ising 2 weird 0\n"), ParseError);
    EXPECT_THROW(parse("ising 2 custom 0\nJ 0 5 1\n"), ParseError);
    EXPECT_NO_THROW(parse("# comment\nising 2 custom 0 # trailing\nJ 0 1 3\n"));
}
