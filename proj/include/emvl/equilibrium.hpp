#pragma once

// Fixed-control equilibrium sampling and the sparsity -> temperature map.
//
// A fixed-sparsity E-MVL sample and a fixed-temperature Metropolis sample are
// matched by mean energy (bisection in log T); the two-sample
// Kolmogorov-Smirnov distance at the fitted T is reported as a diagnostic.
// The map is a list of fitted (p_s, T) points plus a least-squares line
// through the points with p_s <= 0.6, whose intercept gives T at p_s = 0.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "emvl/emvl.hpp"
#include "emvl/error.hpp"
#include "emvl/model.hpp"
#include "emvl/parallel.hpp"
#include "emvl/rng.hpp"
#include "emvl/sa.hpp"

namespace emvl {

inline constexpr double kLinearRegimeMaxSparsity = 0.6;

struct Histogram {
    std::vector<double> edges;         // counts.size() + 1 entries
    std::vector<std::size_t> counts;
};

/// Freedman-Diaconis binning: width = 2 IQR / cbrt(N). Degenerate samples get one bin.
inline Histogram freedman_diaconis(std::span<const Energy> values, std::size_t max_bins = 512) {
    Histogram h;
    if (values.empty()) return h;
    std::vector<Energy> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    const auto lo = static_cast<double>(v.front());
    const auto hi = static_cast<double>(v.back());
    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(v.size() - 1);
        const auto k = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(k);
        const double a = static_cast<double>(v[k]);
        const double b = static_cast<double>(v[std::min(k + 1, v.size() - 1)]);
        return a + (b - a) * frac;
    };
    const double iqr = quantile(0.75) - quantile(0.25);
    std::size_t bins = 1;
    if (hi > lo && iqr > 0.0) {
        const double width = 2.0 * iqr / std::cbrt(static_cast<double>(v.size()));
        bins = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil((hi - lo) / width)), 1, max_bins);
    }
    const double width = hi > lo ? (hi - lo) / static_cast<double>(bins) : 1.0;
    for (std::size_t b = 0; b <= bins; ++b) h.edges.push_back(lo + width * static_cast<double>(b));
    h.counts.assign(bins, 0);
    for (Energy e : v) {
        auto b = static_cast<std::size_t>((static_cast<double>(e) - lo) / width);
        h.counts[std::min(b, bins - 1)]++;
    }
    return h;
}

struct EquilibriumSample {
    enum class Control { FixedSparsity, FixedTemperature };

    Control control = Control::FixedSparsity;
    double value = 0.0;  // p_s or T
    std::size_t trials = 0;
    std::vector<Energy> energies;
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation (n - 1)
    Histogram histogram;

    double std_error() const { return trials > 0 ? stddev / std::sqrt(static_cast<double>(trials)) : 0.0; }

    static EquilibriumSample from_energies(Control c, double value, std::vector<Energy> energies) {
        if (energies.empty()) throw ContractError("equilibrium sample needs at least one trial");
        EquilibriumSample s;
        s.control = c;
        s.value = value;
        s.trials = energies.size();
        double sum = 0.0;
        for (Energy e : energies) {
            sum += static_cast<double>(e);
        }
        const auto n = static_cast<double>(energies.size());
        s.mean = sum / n;
        double var = 0.0;
        if (energies.size() > 1) {
            for (Energy e : energies) var += (static_cast<double>(e) - s.mean) * (static_cast<double>(e) - s.mean);
            var /= n - 1.0;
        }
        s.stddev = std::sqrt(var);
        s.histogram = freedman_diaconis(energies);
        s.energies = std::move(energies);
        return s;
    }
};

struct SamplingParams {
    std::size_t trials = 10000;
    std::size_t burn_in = 1000;
    unsigned jobs = 1;
};

inline EquilibriumSample sample_emvl_equilibrium(const IsingModel& m, double p_s, const SamplingParams& params,
                                                 std::uint64_t seed) {
    if (!(p_s > 0.0 && p_s <= 1.0))
        throw ContractError("fixed sparsity must lie in (0, 1]; p_s = 0 converges to a local minimum "
                            "and never equilibrates");
    if (params.trials == 0) throw ContractError("equilibrium sample needs at least one trial");
    require(params.burn_in >= 1, "burn-in must be at least one sweep");
    const auto schedule = SparsitySchedule::constant(p_s, params.burn_in);
    std::vector<Energy> finals(params.trials);
    RunOptions opts;
    opts.track_best_state = false;
    parallel_for(params.trials, params.jobs, [&](std::size_t k) {
        finals[k] = run_emvl(m, schedule, stream_seed(seed, m.instance_id(), k), opts).final_energy;
    });
    return EquilibriumSample::from_energies(EquilibriumSample::Control::FixedSparsity, p_s, std::move(finals));
}

inline EquilibriumSample sample_mcmc_equilibrium(const IsingModel& m, double T, const SamplingParams& params,
                                                 std::uint64_t seed) {
    require(T > 0.0, "temperature must be positive");
    if (params.trials == 0) throw ContractError("equilibrium sample needs at least one trial");
    require(params.burn_in >= 1, "burn-in must be at least one sweep");
    const auto schedule = TemperatureSchedule::constant(T, params.burn_in);
    std::vector<Energy> finals(params.trials);
    RunOptions opts;
    opts.track_best_state = false;
    parallel_for(params.trials, params.jobs, [&](std::size_t k) {
        finals[k] = run_sa(m, schedule, stream_seed(seed, m.instance_id(), k), SaVariant::Optimized, opts)
                        .final_energy;
    });
    return EquilibriumSample::from_energies(EquilibriumSample::Control::FixedTemperature, T, std::move(finals));
}

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b| over the empirical CDFs.
inline double ks_distance(std::span<const Energy> a, std::span<const Energy> b) {
    require(!a.empty() && !b.empty(), "KS distance needs two non-empty samples");
    std::vector<Energy> x(a.begin(), a.end()), y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    const auto nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
    while (i < x.size() && j < y.size()) {
        const Energy v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] == v) ++i;
        while (j < y.size() && y[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
    }
    return d;
}

struct TemperatureFit {
    double temperature = 0.0;
    double mean_at_fit = 0.0;
    double ks_distance = 0.0;
    std::size_t evaluations = 0;
};

/// Bisection on log T until the Metropolis mean matches target.mean within `tolerance`.
/// Every evaluation reuses the same per-trial streams, so mean(T) is a deterministic function.
inline TemperatureFit fit_temperature(const IsingModel& m, const EquilibriumSample& target, double t_lo,
                                      double t_hi, double tolerance, const SamplingParams& mcmc,
                                      std::uint64_t seed) {
    require(t_lo > 0.0 && t_hi > t_lo, "temperature bracket needs 0 < T_lo < T_hi");
    require(tolerance > 0.0, "fit tolerance must be positive");
    TemperatureFit fit;
    auto sample_at = [&](double T) {
        ++fit.evaluations;
        return sample_mcmc_equilibrium(m, T, mcmc, seed);
    };
    auto lo = sample_at(t_lo);
    auto hi = sample_at(t_hi);
    if (!(lo.mean <= target.mean && target.mean <= hi.mean))
        throw ValidationError("temperature bracket [" + std::to_string(t_lo) + ", " + std::to_string(t_hi) +
                              "] does not enclose the target mean energy " + std::to_string(target.mean) +
                              " (bracket means " + std::to_string(lo.mean) + ", " + std::to_string(hi.mean) +
                              "); widen [T_lo, T_hi]");
    auto finish = [&](const EquilibriumSample& s) {
        fit.temperature = s.value;
        fit.mean_at_fit = s.mean;
        fit.ks_distance = ks_distance(s.energies, target.energies);
        return fit;
    };
    if (std::abs(lo.mean - target.mean) <= tolerance) return finish(lo);
    if (std::abs(hi.mean - target.mean) <= tolerance) return finish(hi);
    for (int iter = 0; iter < 60; ++iter) {
        const double mid = std::sqrt(t_lo * t_hi);
        auto s = sample_at(mid);
        if (std::abs(s.mean - target.mean) <= tolerance || t_hi / t_lo < 1.0 + 1e-6) return finish(s);
        if (s.mean < target.mean)
            t_lo = mid;
        else
            t_hi = mid;
    }
    return finish(sample_at(std::sqrt(t_lo * t_hi)));
}

/// Expands a geometric bracket around `guess` until the Metropolis means enclose the target.
/// Below some temperature a finite burn-in no longer equilibrates and the mean rises again;
/// a target beneath that minimum cannot be bracketed.
inline std::pair<double, double> find_bracket(const IsingModel& m, const EquilibriumSample& target, double guess,
                                              const SamplingParams& mcmc, std::uint64_t seed) {
    require(guess > 0.0, "bracket guess must be positive");
    double lo = guess / 2.0, hi = guess * 2.0;
    double prev = sample_mcmc_equilibrium(m, lo, mcmc, seed).mean;
    for (int k = 0; prev > target.mean; ++k) {
        if (k == 40) throw ValidationError("no temperature bracket found below T = " + std::to_string(lo));
        const double mean = sample_mcmc_equilibrium(m, lo / 2.0, mcmc, seed).mean;
        if (mean >= prev)
            throw ValidationError("target mean energy " + std::to_string(target.mean) +
                                  " lies below the lowest Metropolis mean " + std::to_string(prev) + " (T = " +
                                  std::to_string(lo) + "); increase MCMC burn-in");
        lo /= 2.0;
        prev = mean;
    }
    for (int k = 0; sample_mcmc_equilibrium(m, hi, mcmc, seed).mean < target.mean; ++k) {
        if (k == 40) throw ValidationError("no temperature bracket found above T = " + std::to_string(hi));
        hi *= 2.0;
    }
    return {lo, hi};
}

struct MapPoint {
    double p_s = 0.0;
    double temperature = 0.0;
    double ks_distance = 0.0;
    double mean_energy = 0.0;
    double std_energy = 0.0;
    bool unreliable = false;  // p_s == 1: nearly random updates, the fit is ill-conditioned
};

struct SparsityTemperatureMap {
    std::vector<MapPoint> points;  // sorted by p_s
    double t_at_zero = 0.0;        // linear extrapolation of the p_s <= 0.6 points
    double slope = 0.0;
    Distribution distribution = Distribution::Custom;
    std::size_t n = 0;
    std::string instance_id;

    double max_sparsity() const { return points.empty() ? 0.0 : points.back().p_s; }

    /// Piecewise-linear interpolation over (0, t_at_zero) followed by the fitted points.
    double temperature_at(double p_s) const {
        if (points.empty()) throw ValidationError("sparsity map has no points");
        if (p_s < 0.0 || p_s > max_sparsity())
            throw ContractError("p_s = " + std::to_string(p_s) + " outside the map range [0, " +
                                std::to_string(max_sparsity()) + "]");
        double x0 = 0.0, y0 = t_at_zero;
        for (const auto& pt : points) {
            if (p_s == pt.p_s) return pt.temperature;
            if (p_s < pt.p_s) return y0 + (pt.temperature - y0) * (p_s - x0) / (pt.p_s - x0);
            x0 = pt.p_s;
            y0 = pt.temperature;
        }
        return y0;
    }
};

/// Least-squares line T = a + b p over points with p <= cutoff. Returns {a, b}.
inline std::pair<double, double> fit_linear_regime(std::span<const MapPoint> pts,
                                                   double cutoff = kLinearRegimeMaxSparsity) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0, k = 0;
    for (const auto& p : pts) {
        if (p.p_s > cutoff + 1e-12) continue;
        sx += p.p_s;
        sy += p.temperature;
        sxx += p.p_s * p.p_s;
        sxy += p.p_s * p.temperature;
        k += 1;
    }
    if (k < 3) throw ContractError("linear extrapolation needs at least 3 points with p_s <= 0.6");
    const double denom = k * sxx - sx * sx;
    if (denom <= 0) throw ValidationError("degenerate sparsity grid for linear extrapolation");
    const double b = (k * sxy - sx * sy) / denom;
    return {(sy - b * sx) / k, b};
}

/// Validates points and fills in the extrapolated endpoint.
inline SparsityTemperatureMap finalize_map(std::vector<MapPoint> points, Distribution d, std::size_t n,
                                           std::string instance_id) {
    std::sort(points.begin(), points.end(), [](const MapPoint& a, const MapPoint& b) { return a.p_s < b.p_s; });
    for (std::size_t k = 1; k < points.size(); ++k)
        if (!(points[k].temperature > points[k - 1].temperature))
            throw ValidationError("fitted temperatures are not strictly increasing in p_s (p_s = " +
                                  std::to_string(points[k - 1].p_s) + ", " + std::to_string(points[k].p_s) +
                                  "); increase trials or burn-in");
    const auto [a, b] = fit_linear_regime(points);
    if (!(a > 0.0))
        throw ValidationError("linear extrapolation to p_s = 0 gives non-positive T = " + std::to_string(a) +
                              "; refine the sparsity grid or increase sampling");
    SparsityTemperatureMap map;
    map.points = std::move(points);
    map.t_at_zero = a;
    map.slope = b;
    map.distribution = d;
    map.n = n;
    map.instance_id = std::move(instance_id);
    return map;
}

struct MapParams {
    SamplingParams emvl{2000, 1000, 1};
    SamplingParams mcmc{500, 1000, 1};
    /// Fit tolerance as a multiple of the target's standard error.
    double tolerance_se = 0.25;
};

inline SparsityTemperatureMap build_sparsity_map(const IsingModel& m, std::vector<double> grid,
                                                 const MapParams& params, std::uint64_t seed) {
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    for (double p : grid) require(p > 0.0 && p <= 1.0, "sparsity grid must lie in (0, 1]");
    const auto linear = std::count_if(grid.begin(), grid.end(), [](double p) { return p <= kLinearRegimeMaxSparsity; });
    if (linear < 3) throw ContractError("sparsity grid needs at least 3 points in (0, 0.6]");

    // initial guess scale: rms coupling times sqrt(n)
    double sq = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i)
        for (double c : m.row(i)) sq += c * c;
    const double rms = std::sqrt(sq / std::max<double>(1.0, double(m.size()) * double(m.size() - 1)));
    double guess = std::max(1e-3, rms * std::sqrt(double(m.size())));

    std::vector<MapPoint> points;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const double p = grid[g];
        const auto target = sample_emvl_equilibrium(m, p, params.emvl, splitmix64(seed ^ (0x100 + g)));
        const std::uint64_t mseed = splitmix64(seed ^ 0x5eed);
        const auto [lo, hi] = find_bracket(m, target, guess, params.mcmc, mseed);
        const double tol = std::max(params.tolerance_se * target.std_error(), 1e-9);
        const auto fit = fit_temperature(m, target, lo, hi, tol, params.mcmc, mseed);
        points.push_back({p, fit.temperature, fit.ks_distance, target.mean, target.stddev, p >= 1.0});
        guess = fit.temperature * 1.5;
    }
    return finalize_map(std::move(points), m.distribution(), m.size(), m.instance_id());
}

/// Linear sparsity ramp p_init -> 0 becomes a linear temperature ramp T(p_init) -> T(0).
inline TemperatureSchedule map_to_sa_schedule(const SparsityTemperatureMap& map, const SparsitySchedule& ramp) {
    require(ramp.shape() == SparsitySchedule::Shape::Linear, "only linear sparsity schedules can be mapped");
    require(ramp.p_fin() == 0.0, "mapped schedules require p_fin = 0");
    const double t_start = map.temperature_at(ramp.p_init());
    return TemperatureSchedule::temp_linear(t_start, map.t_at_zero, ramp.t_fin());
}

struct NormalizedPoint {
    double p_s;
    double ratio;      // mean E / e_gs
    double std_ratio;  // std E / |e_gs|
};

inline std::vector<NormalizedPoint> normalized_energy_curve(std::span<const EquilibriumSample> samples,
                                                            Energy e_gs) {
    if (e_gs >= 0) throw ContractError("normalization needs a negative reference ground energy");
    std::vector<NormalizedPoint> out;
    for (const auto& s : samples)
        out.push_back({s.value, s.mean / static_cast<double>(e_gs), s.stddev / std::abs(static_cast<double>(e_gs))});
    std::sort(out.begin(), out.end(), [](auto& a, auto& b) { return a.p_s < b.p_s; });
    return out;
}

}  // namespace emvl
