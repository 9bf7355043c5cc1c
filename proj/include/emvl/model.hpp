#pragma once

// Ising problem instances, spin configurations and exact integer energy
// bookkeeping. Energy convention: one term per unordered pair,
//   E(s) = -sum_{i<j} J_ij s_i s_j - sum_i h_i s_i.

#include <algorithm>
#include <cctype>
#include <climits>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "emvl/error.hpp"
#include "emvl/rng.hpp"

namespace emvl {

using Energy = std::int64_t;
using Coupling = std::int32_t;
using Spin = std::int8_t;

enum class Distribution { Bimodal, GaussianQ10, Custom };

inline constexpr Coupling kQ10Min = -512;
inline constexpr Coupling kQ10Max = 511;
/// Pre-quantization multiplier for SK-Gaussian couplings (about 4 sigma spans the 10-bit range).
inline constexpr double kGaussianScale = 128.0;

inline std::string_view to_string(Distribution d) {
    switch (d) {
        case Distribution::Bimodal: return "bimodal";
        case Distribution::GaussianQ10: return "gaussian_q10";
        case Distribution::Custom: return "custom";
    }
    return "custom";
}

inline Distribution parse_distribution(std::string_view s) {
    if (s == "bimodal") return Distribution::Bimodal;
    if (s == "gaussian_q10" || s == "gaussian") return Distribution::GaussianQ10;
    if (s == "custom") return Distribution::Custom;
    throw ContractError("unknown distribution tag '" + std::string(s) + "'");
}

class SpinState {
public:
    SpinState() = default;

    /// All spins +1.
    explicit SpinState(std::size_t n) : spins_(n, Spin{1}) {}

    explicit SpinState(std::vector<Spin> spins) : spins_(std::move(spins)) {
        for (Spin s : spins_)
            if (s != 1 && s != -1) throw ContractError("spin values must be -1 or +1");
    }

    static SpinState random(std::size_t n, Rng& rng) {
        SpinState st;
        st.spins_.resize(n);
        for (auto& s : st.spins_) s = static_cast<Spin>(rng.coin());
        return st;
    }

    std::size_t size() const noexcept { return spins_.size(); }
    Spin operator[](std::size_t i) const noexcept { return spins_[i]; }
    void set(std::size_t i, Spin v) noexcept { spins_[i] = v; }
    void flip(std::size_t i) noexcept { spins_[i] = static_cast<Spin>(-spins_[i]); }
    std::span<const Spin> spins() const noexcept { return spins_; }

    SpinState inverted() const {
        SpinState out = *this;
        for (auto& s : out.spins_) s = static_cast<Spin>(-s);
        return out;
    }

    friend bool operator==(const SpinState&, const SpinState&) = default;

private:
    std::vector<Spin> spins_;
};

/// Immutable fully materialized symmetric instance. Safe to share across threads.
class IsingModel {
public:
    IsingModel() = default;

    /// couplings: dense row-major n*n matrix. Throws ValidationError on any invariant breach.
    IsingModel(std::size_t n, std::vector<Coupling> couplings, std::vector<Coupling> fields,
               Distribution tag = Distribution::Custom, std::string instance_id = {},
               std::uint64_t seed = 0)
        : n_(n), j_(std::move(couplings)), h_(std::move(fields)), tag_(tag),
          id_(std::move(instance_id)), seed_(seed) {
        validate();
    }

    std::size_t size() const noexcept { return n_; }
    Coupling coupling(std::size_t i, std::size_t j) const noexcept { return j_[i * n_ + j]; }
    std::span<const Coupling> row(std::size_t i) const noexcept { return {j_.data() + i * n_, n_}; }
    Coupling field(std::size_t i) const noexcept { return h_[i]; }
    std::span<const Coupling> fields() const noexcept { return h_; }
    Distribution distribution() const noexcept { return tag_; }
    const std::string& instance_id() const noexcept { return id_; }
    std::uint64_t seed() const noexcept { return seed_; }

    bool zero_field() const noexcept {
        return std::all_of(h_.begin(), h_.end(), [](Coupling h) { return h == 0; });
    }

    /// Largest |J_ij|, or 0 for an uncoupled model.
    Coupling max_abs_coupling() const noexcept {
        Coupling m = 0;
        for (Coupling c : j_) m = std::max<Coupling>(m, c < 0 ? -c : c);
        return m;
    }

    friend bool operator==(const IsingModel&, const IsingModel&) = default;

private:
    void validate() const {
        if (n_ == 0) throw ValidationError("model must have at least one spin");
        if (j_.size() != n_ * n_) throw ValidationError("coupling matrix must be n*n");
        if (h_.size() != n_) throw ValidationError("field vector must have length n");
        for (std::size_t i = 0; i < n_; ++i) {
            if (j_[i * n_ + i] != 0)
                throw ValidationError("diagonal coupling J_" + std::to_string(i) + std::to_string(i) +
                                      " must be zero");
            for (std::size_t j = i + 1; j < n_; ++j) {
                const Coupling a = j_[i * n_ + j];
                if (a != j_[j * n_ + i])
                    throw ValidationError("asymmetric couplings at (" + std::to_string(i) + "," +
                                          std::to_string(j) + ")");
                if (tag_ == Distribution::Bimodal && a != 1 && a != -1)
                    throw ValidationError("bimodal coupling at (" + std::to_string(i) + "," +
                                          std::to_string(j) + ") must be -1 or +1");
                if (tag_ == Distribution::GaussianQ10 && (a < kQ10Min || a > kQ10Max))
                    throw ValidationError("gaussian_q10 coupling at (" + std::to_string(i) + "," +
                                          std::to_string(j) + ") = " + std::to_string(a) +
                                          " outside [-512, 511]");
            }
        }
    }

    std::size_t n_ = 0;
    std::vector<Coupling> j_;
    std::vector<Coupling> h_;
    Distribution tag_ = Distribution::Custom;
    std::string id_;
    std::uint64_t seed_ = 0;
};

inline void check_state(const IsingModel& m, const SpinState& s) {
    if (s.size() != m.size())
        throw ContractError("spin state length " + std::to_string(s.size()) +
                            " does not match model size " + std::to_string(m.size()));
}

inline void check_index(const IsingModel& m, std::size_t i) {
    if (i >= m.size())
        throw ContractError("spin index " + std::to_string(i) + " out of range [0, " +
                            std::to_string(m.size()) + ")");
}

inline Energy energy(const IsingModel& m, const SpinState& s) {
    check_state(m, s);
    const std::size_t n = m.size();
    Energy pair_sum = 0;
    Energy field_sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = m.row(i);
        Energy acc = 0;
        for (std::size_t j = i + 1; j < n; ++j) acc += static_cast<Energy>(row[j]) * s[j];
        pair_sum += acc * s[i];
        field_sum += static_cast<Energy>(m.field(i)) * s[i];
    }
    return -pair_sum - field_sum;
}

/// h_i + sum_{j != i} J_ij s_j, without bounds checks. Used by the solver inner loops.
inline Energy local_field_unchecked(const IsingModel& m, const SpinState& s, std::size_t i) noexcept {
    const auto row = m.row(i);
    const auto spins = s.spins();
    Energy acc = m.field(i);
    for (std::size_t j = 0; j < row.size(); ++j) acc += static_cast<Energy>(row[j]) * spins[j];
    return acc;  // J_ii == 0, so the j == i term vanishes
}

inline Energy local_field(const IsingModel& m, const SpinState& s, std::size_t i) {
    check_state(m, s);
    check_index(m, i);
    return local_field_unchecked(m, s, i);
}

/// energy(flip_i(s)) - energy(s).
inline Energy delta_energy(const IsingModel& m, const SpinState& s, std::size_t i) {
    return 2 * static_cast<Energy>(s[i]) * local_field(m, s, i);
}

inline std::string default_instance_id(Distribution d, std::size_t n, std::uint64_t seed) {
    return "sk-" + std::string(to_string(d)) + "-n" + std::to_string(n) + "-s" + std::to_string(seed);
}

namespace detail {

template <class Draw>
IsingModel generate_sk(std::size_t n, std::uint64_t seed, Distribution tag, Draw&& draw) {
    if (n < 2) throw ContractError("SK instances need n >= 2");
    std::vector<Coupling> j(n * n, 0);
    Rng rng(seed);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) {
            const Coupling c = draw(rng);
            j[a * n + b] = c;
            j[b * n + a] = c;
        }
    return IsingModel(n, std::move(j), std::vector<Coupling>(n, 0), tag,
                      default_instance_id(tag, n, seed), seed);
}

}  // namespace detail

/// Fully connected SK instance with J_ij = ±1 equiprobable, h = 0.
inline IsingModel gen_sk_bimodal(std::size_t n, std::uint64_t seed) {
    return detail::generate_sk(n, seed, Distribution::Bimodal,
                               [](Rng& r) { return (r() >> 63) ? Coupling{1} : Coupling{-1}; });
}

/// Fully connected SK instance with J_ij = clamp(round(scale * N(0,1)), -512, 511), h = 0.
inline IsingModel gen_sk_gaussian(std::size_t n, std::uint64_t seed, double scale = kGaussianScale) {
    return detail::generate_sk(n, seed, Distribution::GaussianQ10, [scale](Rng& r) {
        const double q = std::round(r.normal() * scale);
        return static_cast<Coupling>(std::clamp(q, double(kQ10Min), double(kQ10Max)));
    });
}

inline IsingModel generate(Distribution d, std::size_t n, std::uint64_t seed) {
    switch (d) {
        case Distribution::Bimodal: return gen_sk_bimodal(n, seed);
        case Distribution::GaussianQ10: return gen_sk_gaussian(n, seed);
        case Distribution::Custom: break;
    }
    throw ContractError("custom instances cannot be generated");
}

// ---------------------------------------------------------------------------
// Instance text format
//
//   # id: <instance_id>          (optional; otherwise the file stem is used)
//   ising <n> <distribution_tag> <seed>
//   h <i> <value>                (nonzero fields only)
//   J <i> <j> <value>            (one line per unordered pair, i < j)
//
// Indices are 0-based; '#' starts a comment.

inline void write_instance(std::ostream& os, const IsingModel& m) {
    if (!m.instance_id().empty()) os << "# id: " << m.instance_id() << '\n';
    os << "ising " << m.size() << ' ' << to_string(m.distribution()) << ' ' << m.seed() << '\n';
    for (std::size_t i = 0; i < m.size(); ++i)
        if (m.field(i) != 0) os << "h " << i << ' ' << m.field(i) << '\n';
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = i + 1; j < m.size(); ++j)
            os << "J " << i << ' ' << j << ' ' << m.coupling(i, j) << '\n';
}

inline IsingModel read_instance(std::istream& is, std::string fallback_id = {}) {
    std::string line;
    std::size_t lineno = 0;
    std::string id = std::move(fallback_id);
    bool have_header = false;
    std::size_t n = 0;
    Distribution tag = Distribution::Custom;
    std::uint64_t seed = 0;
    std::vector<Coupling> j;
    std::vector<bool> seen;
    std::vector<Coupling> h;

    auto parse_index = [&](std::istringstream& ss, const char* field) {
        long long v;
        if (!(ss >> v)) throw ParseError(std::string("expected integer ") + field, lineno);
        if (v < 0 || static_cast<std::size_t>(v) >= n)
            throw ParseError(std::string(field) + " index " + std::to_string(v) + " out of range", lineno);
        return static_cast<std::size_t>(v);
    };
    auto parse_value = [&](std::istringstream& ss) {
        long long v;
        if (!(ss >> v)) throw ParseError("expected integer value", lineno);
        if (v < INT_MIN || v > INT_MAX) throw ParseError("value out of 32-bit range", lineno);
        return static_cast<Coupling>(v);
    };
    auto expect_end = [&](std::istringstream& ss) {
        std::string rest;
        if (ss >> rest) throw ParseError("unexpected trailing token '" + rest + "'", lineno);
    };

    while (std::getline(is, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            const std::string_view comment = std::string_view(line).substr(hash + 1);
            constexpr std::string_view key = " id: ";
            if (comment.substr(0, key.size()) == key) {
                id = std::string(comment.substr(key.size()));
                while (!id.empty() && std::isspace(static_cast<unsigned char>(id.back()))) id.pop_back();
            }
            line.erase(hash);
        }
        std::istringstream ss(line);
        std::string kind;
        if (!(ss >> kind)) continue;
        if (kind == "ising") {
            if (have_header) throw ParseError("duplicate header", lineno);
            long long nn;
            std::string tag_s;
            if (!(ss >> nn) || nn <= 0) throw ParseError("header: expected positive spin count", lineno);
            if (!(ss >> tag_s)) throw ParseError("header: expected distribution tag", lineno);
            try {
                tag = parse_distribution(tag_s);
            } catch (const ContractError& e) {
                throw ParseError(std::string("header: ") + e.what(), lineno);
            }
            if (!(ss >> seed)) throw ParseError("header: expected seed", lineno);
            expect_end(ss);
            n = static_cast<std::size_t>(nn);
            j.assign(n * n, 0);
            seen.assign(n * n, false);
            h.assign(n, 0);
            have_header = true;
        } else if (!have_header) {
            throw ParseError("expected 'ising <n> <tag> <seed>' header before data", lineno);
        } else if (kind == "h") {
            const auto i = parse_index(ss, "h");
            h[i] = parse_value(ss);
            expect_end(ss);
        } else if (kind == "J") {
            const auto a = parse_index(ss, "J row");
            const auto b = parse_index(ss, "J column");
            const Coupling v = parse_value(ss);
            expect_end(ss);
            if (a == b) {
                if (v != 0) throw ValidationError("line " + std::to_string(lineno) + ": nonzero diagonal coupling");
                continue;
            }
            for (auto [r, c] : {std::pair{a, b}, std::pair{b, a}}) {
                if (seen[r * n + c] && j[r * n + c] != v)
                    throw ValidationError("line " + std::to_string(lineno) + ": asymmetric coupling J_" +
                                          std::to_string(a) + "," + std::to_string(b));
            }
            j[a * n + b] = v;
            j[b * n + a] = v;
            seen[a * n + b] = seen[b * n + a] = true;
        } else {
            throw ParseError("unknown record '" + kind + "'", lineno);
        }
    }
    if (!have_header) throw ParseError("missing 'ising' header", lineno);
    return IsingModel(n, std::move(j), std::move(h), tag, std::move(id), seed);
}

inline void save_instance(const IsingModel& m, const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_instance(os, m);
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

inline IsingModel load_instance(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    return read_instance(is, path.stem().string());
}

}  // namespace emvl
