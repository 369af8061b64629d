// p2h: harmonic-aware scheduling of electrolyzer plants.

#include "p2h/feasible_region.hpp"
#include "p2h/reporting.hpp"
#include "p2h/scenario.hpp"
#include "p2h/scheduler.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace p2h;

namespace {

enum ExitCode { kOk = 0, kInvalidInput = 2, kInfeasible = 3, kTimeout = 4, kInternal = 5 };

struct Config {
    std::string scenario;
    std::string out = "out";
    std::string strategy = "PM";
    std::optional<double> resolution;
    std::optional<double> gap;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> backend;
    std::optional<double> time_limit;
    std::optional<std::string> thresholds;
    std::vector<int> orders;
    double sweep_step = 100.0;
};

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
    }
    out << content;
    std::cout << "wrote " << path.string() << "\n";
}

Scenario load(const Config& cfg) {
    ScenarioOverrides o;
    o.seed = cfg.seed;
    o.region_resolution = cfg.resolution;
    o.relative_gap = cfg.gap;
    o.backend = cfg.backend;
    o.time_limit = cfg.time_limit;
    return load_scenario(cfg.scenario, o);
}

fs::path prepare_out(const Config& cfg) {
    fs::path out(cfg.out);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec || !fs::is_directory(out)) {
        throw ScenarioError(fmt::format("cannot create output directory '{}'", out.string()), "--out");
    }
    return out;
}

RegionThresholds region_for(const Scenario& s, const Config& cfg) {
    if (cfg.thresholds) {
        return load_thresholds(*cfg.thresholds);
    }
    return derive_region(s);
}

int cmd_analyze(const Config& cfg) {
    const auto s = load(cfg);
    const auto out = prepare_out(cfg);
    std::vector<double> currents;
    for (double i = s.elz.i_min; i <= s.elz.i_max + 1e-9; i += cfg.sweep_step) {
        currents.push_back(std::min(i, s.elz.i_max));
    }
    const std::vector<int> orders{1, 23, 25, 47, 49};
    write_file(out / "operating_points.csv", export_operating_points(s.elz, currents));
    write_file(out / "phasor_sweep.csv", export_phasor_sweep(s.elz, orders, currents));
    return kOk;
}

int cmd_region(const Config& cfg) {
    const auto s = load(cfg);
    const auto out = prepare_out(cfg);
    const auto orders = cfg.orders.empty() ? s.limited_orders : cfg.orders;
    RegionOptions opt;
    opt.resolution = s.region_resolution;
    opt.verification_points = s.verification_points;
    RegionThresholds r;
    for (int h : orders) {
        const double limit = s.plant_limit(h);
        const double pair_limit = 2.0 * limit / s.n_elz;
        const auto grid = sweep_pair(s.elz, h, pair_limit, s.region_resolution);
        write_file(out / fmt::format("pair_grid_h{}.csv", h), pair_grid_csv(grid));
        OrderThresholds t;
        try {
            t = derive_order_thresholds(s.elz, h, limit, s.n_elz, opt);
        } catch (const RegionFitError& e) {
            std::cerr << "fit failed: " << e.what() << "\n";
            return kInternal;
        }
        const auto rep = verify_rules(s.elz, t, s.verification_points);
        std::cout << fmt::format(
            "order {}: pair limit {:.4f} A, medium [{:.1f}, {:.1f}] A (low {}, high {}), delta {:.1f} A, "
            "N-bar {}, symmetric {}, infeasible grid points {}\n",
            h, pair_limit, t.medium.lo, t.medium.hi, t.low.enabled ? "on" : "off", t.high.enabled ? "on" : "off",
            t.delta_i_m, t.n_bar, grid.symmetric() ? "yes" : "no", grid.infeasible_count());
        std::cout << fmt::format("  verification {}x{}: {} infeasible, {} admitted, {} false-feasible\n",
                                 s.verification_points, s.verification_points, rep.infeasible, rep.admitted,
                                 rep.false_feasible);
        r.orders.push_back(t);
    }
    write_file(out / "thresholds.json", thresholds_to_json(r));
    return kOk;
}

void write_strategy_outputs(const fs::path& out, const Schedule& sched, const Scenario& s) {
    const std::string tag(to_string(sched.strategy));
    write_file(out / fmt::format("schedule_{}.csv", tag), schedule_csv(sched));
    write_file(out / fmt::format("compliance_{}.csv", tag), compliance_csv(validate_schedule(sched, s)));
    write_file(out / fmt::format("kpi_{}.json", tag), kpi_json(kpi(sched, s)));
}

int cmd_schedule(const Config& cfg) {
    const auto strategy = parse_strategy(cfg.strategy);
    const auto s = load(cfg);
    const auto out = prepare_out(cfg);
    std::optional<RegionThresholds> rules;
    if (strategy != Strategy::CM1) {
        rules = region_for(s, cfg);
    }
    StrategyContext ctx;
    ctx.rules = rules ? &*rules : nullptr;
    const auto sched = run_strategy(s, strategy, ctx);
    write_strategy_outputs(out, sched, s);
    const auto k = kpi(sched, s);
    std::cout << fmt::format("{}: revenue {:.2f} {}, H2 {:.1f} kg, grid {:.1f} kWh, compliant {}\n", k.strategy,
                             k.revenue, k.currency, k.hydrogen_kg, k.grid_purchase_kwh, k.compliant ? "yes" : "no");
    return kOk;
}

int cmd_compare(const Config& cfg) {
    const auto s = load(cfg);
    const auto out = prepare_out(cfg);
    const auto rules = region_for(s, cfg);
    const auto c = compare_strategies(s, &rules);
    for (const auto& sched : c.schedules) {
        if (sched) {
            write_strategy_outputs(out, *sched, s);
        }
    }
    write_file(out / "comparison.json", comparison_json(c));
    write_file(out / "comparison.csv", comparison_csv(c));
    int code = kOk;
    for (const auto& r : c.rows) {
        if (!r.error.empty()) {
            std::cerr << r.strategy << " failed: " << r.error << "\n";
            code = kInternal;
            continue;
        }
        std::cout << fmt::format("{:>3}: revenue {:10.2f} {}  H2 {:9.1f} kg  grid {:9.1f} kWh  compliant {}\n",
                                 r.strategy, r.revenue, r.currency, r.hydrogen_kg, r.grid_purchase_kwh,
                                 r.compliant ? "yes" : "no");
    }
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Harmonic-aware scheduling of thyristor-rectifier electrolyzer plants"};
    app.require_subcommand(1);
    Config cfg;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--scenario", cfg.scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", cfg.out, "Output directory");
        sub->add_option("--resolution", cfg.resolution, "Pair sweep resolution in A")->check(CLI::Range(1.0, 100.0));
        sub->add_option("--gap", cfg.gap, "Relative MILP gap")->check(CLI::Range(0.0, 1.0));
        sub->add_option("--seed", cfg.seed, "Seed of a synthetic renewable profile");
        sub->add_option("--backend", cfg.backend, "MILP backend: auto, bundled or highs")
            ->check(CLI::IsMember({"auto", "bundled", "highs"}));
        sub->add_option("--time-limit", cfg.time_limit, "Solver time limit in s")->check(CLI::PositiveNumber);
    };

    auto* analyze = app.add_subcommand("analyze", "Operating-point and harmonic phasor sweeps");
    common(analyze);
    analyze->add_option("--step", cfg.sweep_step, "Current step of the sweep in A")->check(CLI::Range(1.0, 1000.0));

    auto* region = app.add_subcommand("region", "Pair feasibility heatmap and fitted thresholds");
    common(region);
    region->add_option("--order", cfg.orders, "Harmonic order(s); default: the limited orders");

    auto* schedule = app.add_subcommand("schedule", "Solve one strategy");
    common(schedule);
    schedule->add_option("--strategy", cfg.strategy, "CM1, CM2 or PM");
    schedule->add_option("--thresholds", cfg.thresholds, "Reuse a thresholds file")->check(CLI::ExistingFile);

    auto* compare = app.add_subcommand("compare", "Run CM1, CM2 and PM and tabulate KPIs");
    common(compare);
    compare->add_option("--thresholds", cfg.thresholds, "Reuse a thresholds file")->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kInvalidInput;
    }

    try {
        if (*analyze) {
            return cmd_analyze(cfg);
        }
        if (*region) {
            return cmd_region(cfg);
        }
        if (*schedule) {
            return cmd_schedule(cfg);
        }
        if (*compare) {
            return cmd_compare(cfg);
        }
    } catch (const ScenarioError& e) {
        std::cerr << "invalid scenario: " << e.what() << "\n";
        return kInvalidInput;
    } catch (const NoOperatingPointError& e) {
        std::cerr << fmt::format("no operating point at I = {} A: {}\n", e.current(), e.what());
        return kInvalidInput;
    } catch (const InfeasibleModelError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        for (const auto& h : e.hints()) {
            std::cerr << "  involves: " << h << "\n";
        }
        return kInfeasible;
    } catch (const NoCompliantLoadError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kInfeasible;
    } catch (const SolverTimeoutError& e) {
        std::cerr << "solver timeout: " << e.what() << "\n";
        return kTimeout;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kInvalidInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInternal;
    }
    return kInternal;
}
