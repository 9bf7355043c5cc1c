#include "commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>

#include <CLI11.hpp>

#include "emvl/io.hpp"
#include "emvl/solver.hpp"

namespace emvl::cli {
namespace {

namespace fs = std::filesystem;

struct Globals {
    std::uint64_t seed = 1;
    unsigned jobs = 1;
    std::string out_dir = ".";
};

/// Signals that only unreachable metrics were produced.
struct AllUnreachable {};

fs::path out_path(const Globals& g, const std::string& name) {
    const fs::path p(name);
    return p.is_absolute() ? p : fs::path(g.out_dir) / p;
}

std::ofstream open_out(const fs::path& p) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream os(p);
    if (!os) throw ValidationError("cannot write '" + p.string() + "'");
    return os;
}

/// Expands directories to their sorted *.ising files.
std::vector<fs::path> instance_files(const std::vector<std::string>& inputs, const fs::path& base = {}) {
    std::vector<fs::path> files;
    for (const auto& in : inputs) {
        fs::path p(in);
        if (p.is_relative() && !base.empty()) p = base / p;
        if (fs::is_directory(p)) {
            std::vector<fs::path> found;
            for (const auto& e : fs::directory_iterator(p))
                if (e.is_regular_file() && e.path().extension() == ".ising") found.push_back(e.path());
            std::sort(found.begin(), found.end());
            files.insert(files.end(), found.begin(), found.end());
        } else if (fs::exists(p)) {
            files.push_back(p);
        } else {
            throw ValidationError("no such instance file or directory '" + p.string() + "'");
        }
    }
    if (files.empty()) throw ValidationError("no instance files found");
    return files;
}

IsingModel load(const fs::path& p) {
    if (!fs::is_regular_file(p)) throw ValidationError("no such instance file '" + p.string() + "'");
    try {
        return load_instance(p);
    } catch (const ParseError& e) {
        throw ValidationError(p.string() + ": " + e.what());
    } catch (const ContractError& e) {
        throw ValidationError(p.string() + ": " + e.what());
    }
}

void write_trace(const fs::path& path, const RunResult& r, std::string_view control) {
    auto os = open_out(path);
    os << "t,energy," << control << '\n';
    for (const auto& row : r.trace) os << row.t << ',' << row.energy << ',' << format_real(row.control) << '\n';
}

// ---------------------------------------------------------------------------
// gen

struct GenArgs {
    std::vector<std::size_t> n;
    std::string dist;
    std::size_t count = 1;
};

void cmd_gen(const Globals& g, const GenArgs& a, std::ostream& out) {
    const auto d = parse_distribution(a.dist);
    if (d == Distribution::Custom) throw ContractError("--dist must be bimodal or gaussian");
    fs::create_directories(g.out_dir);
    for (std::size_t n : a.n) {
        for (std::size_t k = 0; k < a.count; ++k) {
            const auto seed = stream_seed(g.seed, "gen:" + std::string(to_string(d)) + ":" + std::to_string(n), k);
            const auto m = generate(d, n, seed);
            const auto path = out_path(g, m.instance_id() + ".ising");
            save_instance(m, path);
            out << path.string() << '\n';
        }
    }
}

// ---------------------------------------------------------------------------
// solve

struct SolveArgs {
    std::string instance;
    std::string alg = "emvl";
    std::string engine = "arith";
    std::optional<double> ps_init;
    double ps_fin = 0.0;
    std::size_t t_fin = 0;
    std::size_t trials = 1;
    std::optional<double> beta_start, beta_end, t_start, t_end;
    std::string map;
    std::string output;
    std::string trace;
};

AlgorithmSpec solve_spec(const SolveArgs& a) {
    Engine e = parse_engine(a.alg);
    if (a.engine == "bits") {
        if (!is_emvl(e)) throw ContractError("--engine bits applies only to --alg emvl");
        e = Engine::EmvlBits;
    } else if (a.engine != "arith") {
        throw ContractError("--engine must be 'arith' or 'bits'");
    }
    if (is_emvl(e)) {
        if (!a.ps_init) throw ContractError("--alg emvl requires --ps-init");
        auto spec = AlgorithmSpec::emvl(*a.ps_init, a.ps_fin, std::string(to_string(e)));
        spec.engine = e;
        return spec;
    }
    const bool beta = a.beta_start || a.beta_end;
    const bool temp = a.t_start || a.t_end;
    const bool mapped = !a.map.empty();
    if (int(beta) + int(temp) + int(mapped) > 1)
        throw ContractError("choose one of --beta-start/--beta-end, --t-start/--t-end or --map");
    if (mapped) {
        if (!a.ps_init) throw ContractError("--map requires --ps-init");
        const auto sched = map_to_sa_schedule(load_map(a.map), SparsitySchedule(*a.ps_init, 0.0, std::max<std::size_t>(a.t_fin, 1)));
        return AlgorithmSpec::sa(e, TemperatureSchedule::Kind::TempLinear, sched.start(), sched.end());
    }
    if (temp) {
        if (!(a.t_start && a.t_end)) throw ContractError("--t-start and --t-end go together");
        return AlgorithmSpec::sa(e, TemperatureSchedule::Kind::TempLinear, *a.t_start, *a.t_end);
    }
    if (beta && !(a.beta_start && a.beta_end)) throw ContractError("--beta-start and --beta-end go together");
    return AlgorithmSpec::sa(e, TemperatureSchedule::Kind::BetaLinear, a.beta_start.value_or(0.01),
                             a.beta_end.value_or(10.0));
}

void cmd_solve(const Globals& g, const SolveArgs& a, std::ostream& out) {
    const auto m = load(a.instance);
    const auto spec = solve_spec(a);
    if (spec.engine == Engine::EmvlBits && !supports_bit_engine(m))
        throw UnsupportedModel("--engine bits needs a bimodal zero-field instance; '" + m.instance_id() +
                               "' is " + std::string(to_string(m.distribution())));
    require(a.trials > 0, "--trials must be positive");

    std::vector<RunResult> results(a.trials);
    std::vector<std::uint64_t> seeds(a.trials);
    parallel_for(a.trials, g.jobs, [&](std::size_t k) {
        seeds[k] = stream_seed(g.seed, m.instance_id(), k);
        RunOptions opts;
        opts.trace = k == 0 && !a.trace.empty();
        opts.track_best_state = false;
        results[k] = spec.run(m, a.t_fin, seeds[k], opts);
    });

    const auto path = out_path(g, a.output.empty() ? m.instance_id() + "." + a.alg + ".csv" : a.output);
    auto os = open_out(path);
    os << "trial,seed,final_energy,best_energy,iterations\n";
    Energy best = results[0].best_energy;
    for (std::size_t k = 0; k < a.trials; ++k) {
        const auto& r = results[k];
        os << k << ',' << seeds[k] << ',' << r.final_energy << ',' << r.best_energy << ',' << r.iterations << '\n';
        best = std::min(best, r.best_energy);
    }
    if (!a.trace.empty()) write_trace(out_path(g, a.trace), results[0], spec.control_name());
    out << spec.describe() << ": best energy " << best << " over " << a.trials << " trials -> " << path.string()
        << '\n';
}

// ---------------------------------------------------------------------------
// equilibrium

struct EquilibriumArgs {
    std::string instance;
    std::vector<double> fixed_ps;
    std::vector<double> fixed_t;
    std::size_t trials = 10000;
    std::size_t burn_in = 1000;
    std::string output = "equilibrium.csv";
    std::string histogram;
    std::string registry;
    std::string normalized;
};

void cmd_equilibrium(const Globals& g, const EquilibriumArgs& a, std::ostream& out) {
    const auto m = load(a.instance);
    const bool sparse = !a.fixed_ps.empty();
    if (sparse == !a.fixed_t.empty()) throw ContractError("give exactly one of --fixed-ps or --fixed-t");
    if (!a.normalized.empty() && (!sparse || a.registry.empty()))
        throw ContractError("--normalized needs --fixed-ps and --registry");
    const SamplingParams sp{a.trials, a.burn_in, g.jobs};
    std::vector<EquilibriumSample> samples;
    const auto& grid = sparse ? a.fixed_ps : a.fixed_t;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto seed = stream_seed(g.seed, "equilibrium", k);
        samples.push_back(sparse ? sample_emvl_equilibrium(m, grid[k], sp, seed)
                                 : sample_mcmc_equilibrium(m, grid[k], sp, seed));
    }
    const std::string control = sparse ? "p_s" : "T";
    {
        auto os = open_out(out_path(g, a.output));
        os << control << ",mean,std,trials\n";
        for (const auto& s : samples)
            os << format_real(s.value) << ',' << format_real(s.mean) << ',' << format_real(s.stddev) << ','
               << s.trials << '\n';
    }
    if (!a.histogram.empty()) {
        auto os = open_out(out_path(g, a.histogram));
        os << control << ",bin_lo,bin_hi,count\n";
        for (const auto& s : samples)
            for (std::size_t b = 0; b < s.histogram.counts.size(); ++b)
                os << format_real(s.value) << ',' << format_real(s.histogram.edges[b]) << ','
                   << format_real(s.histogram.edges[b + 1]) << ',' << s.histogram.counts[b] << '\n';
    }
    if (!a.normalized.empty()) {
        const auto reg = load_registry(a.registry);
        const auto it = reg.find(m.instance_id());
        if (it == reg.end())
            throw ValidationError("registry has no ground truth for '" + m.instance_id() + "'; run 'oracle' first");
        auto os = open_out(out_path(g, a.normalized));
        os << "p_s,ratio,std_ratio\n";
        for (const auto& p : normalized_energy_curve(samples, it->second.e_gs))
            os << format_real(p.p_s) << ',' << format_real(p.ratio) << ',' << format_real(p.std_ratio) << '\n';
    }
    out << samples.size() << " " << control << " points -> " << out_path(g, a.output).string() << '\n';
}

// ---------------------------------------------------------------------------
// map-schedule

struct MapArgs {
    std::string instance;
    std::string from_map;
    std::vector<double> grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
    std::size_t trials = 2000;
    std::size_t burn_in = 1000;
    std::size_t mcmc_trials = 500;
    std::size_t mcmc_burn_in = 1000;
    double tolerance_se = 0.25;
    double ps_init = 0.4;
    std::size_t t_fin = 2000;
    std::string map_out = "map.json";
    std::string csv_out = "map.csv";
    std::string schedule_out = "schedule.csv";
};

void cmd_map_schedule(const Globals& g, const MapArgs& a, std::ostream& out) {
    if (a.instance.empty() == a.from_map.empty()) throw ContractError("give exactly one of --instance or --from-map");
    SparsityTemperatureMap map;
    if (!a.from_map.empty()) {
        map = load_map(a.from_map);
    } else {
        const auto m = load(a.instance);
        MapParams params;
        params.emvl = {a.trials, a.burn_in, g.jobs};
        params.mcmc = {a.mcmc_trials, a.mcmc_burn_in, g.jobs};
        params.tolerance_se = a.tolerance_se;
        map = build_sparsity_map(m, a.grid, params, g.seed);
        fs::create_directories(g.out_dir);
        write_json_file(out_path(g, a.map_out), map_to_json(map));
    }
    {
        auto os = open_out(out_path(g, a.csv_out));
        os << "p_s,T_fit,ks_distance,unreliable\n";
        for (const auto& p : map.points)
            os << format_real(p.p_s) << ',' << format_real(p.temperature) << ',' << format_real(p.ks_distance)
               << ',' << (p.unreliable ? 1 : 0) << '\n';
    }
    const auto sched = map_to_sa_schedule(map, SparsitySchedule(a.ps_init, 0.0, a.t_fin));
    {
        auto os = open_out(out_path(g, a.schedule_out));
        os << "p_init,t_start,t_end,t_fin\n";
        os << format_real(a.ps_init) << ',' << format_real(sched.start()) << ',' << format_real(sched.end()) << ','
           << sched.t_fin() << '\n';
    }
    out << "T(p_s=0) = " << format_real(map.t_at_zero) << "; schedule " << sched.describe() << '\n';
}

// ---------------------------------------------------------------------------
// oracle

struct OracleArgs {
    std::vector<std::string> instances;
    std::string registry = "registry.json";
    std::size_t cap = kExhaustiveCap;
    std::size_t trials = 64;
    std::size_t t_fin = 2000;
};

void cmd_oracle(const Globals& g, const OracleArgs& a, std::ostream& out) {
    require(a.cap <= 40, "--cap above 40 is not supported");
    const auto path = out_path(g, a.registry);
    Registry reg = fs::exists(path) ? load_registry(path) : Registry{};
    const auto budget = default_budget(a.trials, a.t_fin);
    for (const auto& f : instance_files(a.instances)) {
        const auto m = load(f);
        const auto gt = ground_truth(m, a.cap, budget, g.seed, g.jobs);
        const bool changed = merge_ground_truth(reg, gt);
        const auto& cur = reg.at(m.instance_id());
        out << m.instance_id() << ' ' << cur.e_gs << ' '
            << (cur.provenance.kind == Provenance::Kind::Exhaustive ? "exhaustive" : "best_known")
            << (changed ? "" : " (kept)") << '\n';
    }
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    save_registry(path, reg);
}

// ---------------------------------------------------------------------------
// bench

struct BenchAlgorithm {
    AlgorithmSpec base;
    std::vector<SparsityTemperatureMap> maps;  // non-empty for mapped SA
    double map_ps_init = 0.4;

    /// Per-instance spec; mapped SA picks the map built for the same (n, distribution).
    AlgorithmSpec for_instance(const IsingModel& m) const {
        if (maps.empty()) return base;
        for (const auto& map : maps)
            if (map.n == m.size() && map.distribution == m.distribution()) {
                const auto s = map_to_sa_schedule(map, SparsitySchedule(map_ps_init, 0.0, 2));
                auto spec = base;
                spec.temp_kind = TemperatureSchedule::Kind::TempLinear;
                spec.temp_start = s.start();
                spec.temp_end = s.end();
                return spec;
            }
        throw ValidationError("algorithm '" + base.label + "' has no map for n = " + std::to_string(m.size()) +
                              ", " + std::string(to_string(m.distribution())));
    }
};

BenchAlgorithm parse_bench_algorithm(const Json& j, const fs::path& base) {
    BenchAlgorithm b;
    const auto engine = parse_engine(j.at("engine").get<std::string>());
    const auto label = j.value("label", std::string(to_string(engine)));
    if (is_emvl(engine)) {
        b.base = AlgorithmSpec::emvl(j.at("ps_init").get<double>(), j.value("ps_fin", 0.0), label);
        b.base.engine = engine;
        return b;
    }
    if (j.contains("maps")) {
        b.base = AlgorithmSpec::sa(engine, TemperatureSchedule::Kind::TempLinear, 1.0, 1.0, label);
        b.map_ps_init = j.value("ps_init", 0.4);
        for (const auto& p : j.at("maps")) {
            fs::path mp(p.get<std::string>());
            b.maps.push_back(load_map(mp.is_relative() ? base / mp : mp));
        }
    } else if (j.contains("t_start")) {
        b.base = AlgorithmSpec::sa(engine, TemperatureSchedule::Kind::TempLinear, j.at("t_start").get<double>(),
                                   j.at("t_end").get<double>(), label);
    } else {
        b.base = AlgorithmSpec::sa(engine, TemperatureSchedule::Kind::BetaLinear, j.value("beta_start", 0.01),
                                   j.value("beta_end", 10.0), label);
    }
    return b;
}

struct BenchArgs {
    std::string config;
};

void cmd_bench(const Globals& g, const BenchArgs& a, std::ostream& out) {
    const auto cfg = read_json_file(a.config);
    const fs::path base = fs::path(a.config).parent_path();
    std::vector<BenchAlgorithm> algorithms;
    std::vector<std::size_t> grid;
    std::size_t trials = 0;
    std::uint64_t seed = g.seed;
    std::vector<std::string> inputs;
    fs::path registry_path;
    std::string output, optimum_output;
    try {
        if (cfg.at("instances").is_string())
            inputs.push_back(cfg.at("instances").get<std::string>());
        else
            inputs = cfg.at("instances").get<std::vector<std::string>>();
        registry_path = cfg.at("registry").get<std::string>();
        if (registry_path.is_relative()) registry_path = base / registry_path;
        for (const auto& j : cfg.at("algorithms")) algorithms.push_back(parse_bench_algorithm(j, base));
        grid = cfg.at("tfin_grid").get<std::vector<std::size_t>>();
        trials = cfg.at("trials").get<std::size_t>();
        seed = cfg.value("seed", g.seed);
        output = cfg.value("output", std::string("bench.csv"));
        optimum_output = cfg.value("optimum_output", std::string("bench-optimum.csv"));
    } catch (const Json::exception& e) {
        throw ValidationError(std::string("malformed bench config: ") + e.what());
    }
    if (algorithms.empty() || grid.empty() || trials == 0)
        throw ValidationError("bench config needs algorithms, a non-empty tfin_grid and trials > 0");
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    const auto registry = load_registry(registry_path);
    std::map<std::pair<std::string, std::size_t>, std::vector<IsingModel>> groups;
    std::vector<std::string> missing;
    for (const auto& f : instance_files(inputs, base)) {
        auto m = load(f);
        if (!registry.count(m.instance_id())) missing.push_back(m.instance_id());
        groups[{std::string(to_string(m.distribution())), m.size()}].push_back(std::move(m));
    }
    if (!missing.empty()) {
        std::string list;
        for (const auto& id : missing) list += "\n  " + id;
        throw ValidationError("no ground truth for these instances; run 'oracle' first:" + list);
    }

    auto os = open_out(out_path(g, output));
    auto opt = open_out(out_path(g, optimum_output));
    os << "algorithm,n,distribution,t_fin,p_hat_mean,stt,sts\n";
    opt << "algorithm,n,distribution,metric,t_fin,value\n";
    bool any_reachable = false;
    for (const auto& alg : algorithms) {
        for (const auto& [key, models] : groups) {
            std::vector<Energy> e_gs;
            std::vector<AlgorithmSpec> specs;
            for (const auto& m : models) {
                e_gs.push_back(registry.at(m.instance_id()).e_gs);
                specs.push_back(alg.for_instance(m));
            }
            const auto run_seed = stream_seed(seed, "bench:" + alg.base.label, 0);
            std::map<std::size_t, RunMetrics> table;
            for (std::size_t t : grid) table[t] = evaluate(models, e_gs, specs, t, trials, run_seed, g.jobs);
            for (const auto& [t, r] : table) {
                os << alg.base.label << ',' << key.second << ',' << key.first << ',' << t << ','
                   << format_real(r.p_hat_mean(Metric::Stt)) << ',' << format_optional(r.stt) << ','
                   << format_optional(r.sts) << '\n';
                any_reachable = any_reachable || r.stt || r.sts;
            }
            for (auto metric : {Metric::Stt, Metric::Sts}) {
                const auto best = optimize_tfin([&](std::size_t t) { return table.at(t); }, grid, metric);
                opt << alg.base.label << ',' << key.second << ',' << key.first << ','
                    << (metric == Metric::Stt ? "stt" : "sts") << ','
                    << (best.t_fin ? std::to_string(*best.t_fin) : std::string("unreachable")) << ','
                    << format_optional(best.value) << '\n';
            }
        }
    }
    out << "bench table -> " << out_path(g, output).string() << '\n';
    if (!any_reachable) throw AllUnreachable{};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"E-MVL Ising solver and benchmark driver"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
    app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::Range(1u, 1024u))->capture_default_str();
    app.add_option("--out-dir", g.out_dir, "Directory for output files")->capture_default_str();

    GenArgs gen;
    auto* c_gen = app.add_subcommand("gen", "Generate SK instances");
    c_gen->add_option("--n", gen.n, "Spin counts")->required()->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20));
    c_gen->add_option("--dist", gen.dist, "bimodal or gaussian")->required();
    c_gen->add_option("--count", gen.count, "Instances per size")->capture_default_str();

    SolveArgs solve;
    auto* c_solve = app.add_subcommand("solve", "Run a solver on one instance");
    c_solve->add_option("--instance", solve.instance, "Instance file")->required();
    c_solve->add_option("--alg", solve.alg, "emvl, emvl-bits, sa-conventional or sa-optimized")->capture_default_str();
    c_solve->add_option("--engine", solve.engine, "arith or bits (E-MVL only)")->capture_default_str();
    c_solve->add_option("--ps-init", solve.ps_init, "Initial sparsity");
    c_solve->add_option("--ps-fin", solve.ps_fin, "Final sparsity")->capture_default_str();
    c_solve->add_option("--tfin", solve.t_fin, "Iterations (sweeps)")->required()->check(CLI::PositiveNumber);
    c_solve->add_option("--trials", solve.trials, "Independent trials")->capture_default_str();
    c_solve->add_option("--beta-start", solve.beta_start, "Initial inverse temperature");
    c_solve->add_option("--beta-end", solve.beta_end, "Final inverse temperature");
    c_solve->add_option("--t-start", solve.t_start, "Initial temperature");
    c_solve->add_option("--t-end", solve.t_end, "Final temperature");
    c_solve->add_option("--map", solve.map, "Sparsity map JSON for a mapped SA schedule");
    c_solve->add_option("--output", solve.output, "Result CSV name");
    c_solve->add_option("--trace", solve.trace, "Per-iteration trace CSV of trial 0");

    EquilibriumArgs eq;
    auto* c_eq = app.add_subcommand("equilibrium", "Fixed-sparsity or fixed-temperature sampling");
    c_eq->add_option("--instance", eq.instance, "Instance file")->required();
    auto* o_ps = c_eq->add_option("--fixed-ps", eq.fixed_ps, "Sparsity grid");
    auto* o_t = c_eq->add_option("--fixed-t", eq.fixed_t, "Temperature grid");
    o_ps->excludes(o_t);
    c_eq->add_option("--trials", eq.trials, "Trials per point")->capture_default_str();
    c_eq->add_option("--burn-in", eq.burn_in, "Sweeps per trial")->capture_default_str();
    c_eq->add_option("--output", eq.output, "Sample CSV name")->capture_default_str();
    c_eq->add_option("--histogram", eq.histogram, "Histogram CSV name");
    c_eq->add_option("--registry", eq.registry, "Ground-truth registry");
    c_eq->add_option("--normalized", eq.normalized, "Normalized-energy CSV name");

    MapArgs mp;
    auto* c_map = app.add_subcommand("map-schedule", "Fit T(p_s) and derive a mapped SA schedule");
    c_map->add_option("--instance", mp.instance, "Instance file");
    c_map->add_option("--from-map", mp.from_map, "Reuse a saved map JSON");
    c_map->add_option("--grid", mp.grid, "Sparsity grid")->capture_default_str();
    c_map->add_option("--trials", mp.trials, "E-MVL trials per point")->capture_default_str();
    c_map->add_option("--burn-in", mp.burn_in, "E-MVL sweeps per trial")->capture_default_str();
    c_map->add_option("--mcmc-trials", mp.mcmc_trials, "Metropolis trials per evaluation")->capture_default_str();
    c_map->add_option("--mcmc-burn-in", mp.mcmc_burn_in, "Metropolis sweeps per trial")->capture_default_str();
    c_map->add_option("--tolerance-se", mp.tolerance_se, "Fit tolerance in standard errors")->capture_default_str();
    c_map->add_option("--ps-init", mp.ps_init, "Initial sparsity of the ramp to map")->capture_default_str();
    c_map->add_option("--tfin", mp.t_fin, "Schedule length")->capture_default_str()->check(CLI::PositiveNumber);
    c_map->add_option("--map-out", mp.map_out, "Map JSON name")->capture_default_str();
    c_map->add_option("--csv-out", mp.csv_out, "Map CSV name")->capture_default_str();
    c_map->add_option("--schedule-out", mp.schedule_out, "Schedule CSV name")->capture_default_str();

    BenchArgs bench;
    auto* c_bench = app.add_subcommand("bench", "STT/STS grid from a JSON config");
    c_bench->add_option("config", bench.config, "Experiment config JSON")->required();

    OracleArgs oracle;
    auto* c_oracle = app.add_subcommand("oracle", "Fill the ground-truth registry");
    c_oracle->add_option("--instances", oracle.instances, "Instance files or directories")->required();
    c_oracle->add_option("--registry", oracle.registry, "Registry JSON name")->capture_default_str();
    c_oracle->add_option("--cap", oracle.cap, "Largest n solved exhaustively")->capture_default_str();
    c_oracle->add_option("--trials", oracle.trials, "best-known trials per algorithm")->capture_default_str();
    c_oracle->add_option("--tfin", oracle.t_fin, "best-known iterations per run")->capture_default_str();

    for (auto* sub : {c_gen, c_solve, c_eq, c_map, c_bench, c_oracle}) sub->fallthrough();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kOk : kUsage;
    }

    try {
        if (*c_gen) cmd_gen(g, gen, out);
        if (*c_solve) cmd_solve(g, solve, out);
        if (*c_eq) cmd_equilibrium(g, eq, out);
        if (*c_map) cmd_map_schedule(g, mp, out);
        if (*c_bench) cmd_bench(g, bench, out);
        if (*c_oracle) cmd_oracle(g, oracle, out);
    } catch (const AllUnreachable&) {
        err << "every metric is unreachable\n";
        return kUnreachable;
    } catch (const ContractError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kInvalid;
    } catch (const UnsupportedModel& e) {
        err << "error: " << e.what() << '\n';
        return kInvalid;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kOk;
}

}  // namespace emvl::cli
