#include "p2h/scheduler.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace p2h {

std::string_view to_string(Strategy s) {
    switch (s) {
        case Strategy::CM1:
            return "CM1";
        case Strategy::CM2:
            return "CM2";
        case Strategy::PM:
            return "PM";
    }
    return "?";
}

Strategy parse_strategy(std::string_view text) {
    std::string key(text);
    std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::toupper(c); });
    if (key == "CM1") {
        return Strategy::CM1;
    }
    if (key == "CM2") {
        return Strategy::CM2;
    }
    if (key == "PM") {
        return Strategy::PM;
    }
    throw std::invalid_argument(fmt::format("unknown strategy '{}' (CM1, CM2 or PM)", text));
}

double PwlTable::slope(std::size_t k) const {
    return (power[k + 1] - power[k]) / (current[k + 1] - current[k]);
}

double PwlTable::eval(double i) const {
    if (i <= current.front()) {
        return power.front() + slope(0) * (i - current.front());
    }
    for (std::size_t k = 0; k + 1 < current.size(); ++k) {
        if (i <= current[k + 1]) {
            return power[k] + slope(k) * (i - current[k]);
        }
    }
    const std::size_t last = segments() - 1;
    return power[last] + slope(last) * (i - current[last]);
}

double PwlTable::max_relative_error(const PolarizationCurve& curve, double reference) const {
    double worst = 0.0;
    const int n = 4000;
    for (int k = 0; k <= n; ++k) {
        const double i = current.front() + (current.back() - current.front()) * k / n;
        worst = std::max(worst, std::abs(eval(i) - stack_power(curve, i)));
    }
    return worst / reference;
}

PwlTable piecewise_linearize(const PolarizationCurve& curve, int n_segments, double i_min, double i_max) {
    if (n_segments < 1) {
        throw std::invalid_argument("piecewise_linearize: need at least one segment");
    }
    if (!(i_max > i_min) || i_min < 0.0) {
        throw std::invalid_argument("piecewise_linearize: invalid current range");
    }
    PwlTable t;
    for (int k = 0; k <= n_segments; ++k) {
        const double i = k == n_segments ? i_max : i_min + (i_max - i_min) * k / n_segments;
        t.current.push_back(i);
        t.power.push_back(stack_power(curve, i));
    }
    return t;
}

namespace {

bool active(UnitState s) { return s != UnitState::Idle; }

double initial_x(const Scenario& s, int n) { return active(s.initial_state[n]) ? 1.0 : 0.0; }

// Excluded current ranges of the soft-exclusion settings, merged.
std::vector<CurrentInterval> excluded_ranges(const Scenario& s) {
    std::vector<CurrentInterval> all;
    for (const auto& x : s.soft_exclusions) {
        auto r = high_harmonic_intervals(s.elz, x.order, x.threshold);
        all.insert(all.end(), r.begin(), r.end());
    }
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.lo < b.lo; });
    std::vector<CurrentInterval> merged;
    for (const auto& r : all) {
        if (!merged.empty() && r.lo <= merged.back().hi) {
            merged.back().hi = std::max(merged.back().hi, r.hi);
        } else {
            merged.push_back(r);
        }
    }
    return merged;
}

// Allowed operating segments of [i_min, i_max] after exclusions.
std::vector<CurrentInterval> allowed_segments(const Scenario& s) {
    const auto ex = excluded_ranges(s);
    std::vector<CurrentInterval> out;
    double lo = s.elz.i_min;
    for (const auto& r : ex) {
        if (r.lo > lo) {
            out.push_back({lo, std::min(r.lo, s.elz.i_max), true});
        }
        lo = std::max(lo, r.hi);
    }
    if (lo < s.elz.i_max) {
        out.push_back({lo, s.elz.i_max, true});
    }
    if (out.empty()) {
        throw std::invalid_argument("soft exclusions leave no operating current");
    }
    return out;
}

}  // namespace

BuiltModel build_model(const Scenario& scenario, Strategy strategy, const RegionThresholds* rules) {
    scenario.validate();
    if (strategy == Strategy::CM2) {
        throw std::invalid_argument("CM2 is a post-processing strategy, not a MILP");
    }
    if ((strategy == Strategy::PM) != (rules != nullptr)) {
        throw std::invalid_argument("harmonic rules must be given for PM and only for PM");
    }
    if (static_cast<int>(scenario.renewable.size()) != scenario.horizon ||
        static_cast<int>(scenario.initial_state.size()) != scenario.n_elz) {
        throw std::invalid_argument("dimension mismatch between horizon, profile and unit count");
    }

    BuiltModel b;
    b.strategy = strategy;
    auto& m = b.model;
    auto& L = b.layout;
    const int N = scenario.n_elz;
    const int T = scenario.horizon;
    const double dt = scenario.step_hours;
    const auto& e = scenario.elz;
    L.n_elz = N;
    L.horizon = T;
    L.pwl = piecewise_linearize(e.curve, scenario.solver.pwl_segments, e.i_min, e.i_max);

    const double ka = 1.0 / L.amps_per_unit;
    const double mw = 1.0 / L.watts_per_unit;
    const double i_min = e.i_min * ka;
    const double aux = e.aux_power * mw;
    const double p_min = L.pwl.power.front() * mw;
    const double kg_per_unit_h = hydrogen_mass_rate(e.curve, e.eta_faraday, L.amps_per_unit);
    const std::size_t S = L.pwl.segments();

    std::vector<CurrentInterval> segments;
    if (!scenario.soft_exclusions.empty()) {
        segments = allowed_segments(scenario);
    }

    L.on.resize(N * T);
    L.standby.resize(N * T);
    L.startup.resize(N * T);
    L.delta.resize(N * T);
    L.segment_select.resize(N * T);
    if (scenario.solver.pwl_ordering_binaries) {
        L.fill_order.resize(N * T);
    }
    std::vector<LinearExpr> current(N * T), power(N * T);

    LinearExpr objective;
    for (int t = 0; t < T; ++t) {
        for (int n = 0; n < N; ++n) {
            const int k = L.idx(t, n);
            const std::string id = fmt::format("{},{}", t, n);
            L.on[k] = m.add_binary(fmt::format("on[{}]", id));
            L.standby[k] = m.add_binary(fmt::format("by[{}]", id));
            // Minimized through its cost, so integral whenever the states are.
            L.startup[k] = m.add_variable(fmt::format("su[{}]", id), 0.0, 1.0);
            current[k].add(L.on[k], i_min);
            power[k].add(L.on[k], p_min + aux).add(L.standby[k], aux);
            for (std::size_t s = 0; s < S; ++s) {
                const double len = (L.pwl.current[s + 1] - L.pwl.current[s]) * ka;
                const int d = m.add_variable(fmt::format("d[{},{}]", id, s), 0.0, len);
                L.delta[k].push_back(d);
                current[k].add(d);
                power[k].add(d, L.pwl.slope(s) * L.amps_per_unit * mw);
                m.add_le(fmt::format("seg[{},{}]", id, s), LinearExpr().add(d).add(L.on[k], -len), 0.0);
            }
            if (scenario.solver.pwl_ordering_binaries) {
                for (std::size_t s = 0; s + 1 < S; ++s) {
                    const double len = (L.pwl.current[s + 1] - L.pwl.current[s]) * ka;
                    const double next = (L.pwl.current[s + 2] - L.pwl.current[s + 1]) * ka;
                    const int w = m.add_binary(fmt::format("w[{},{}]", id, s));
                    L.fill_order[k].push_back(w);
                    m.add_ge(fmt::format("fill[{},{}]", id, s), LinearExpr().add(L.delta[k][s]).add(w, -len), 0.0);
                    m.add_le(fmt::format("fill_next[{},{}]", id, s),
                             LinearExpr().add(L.delta[k][s + 1]).add(w, -next), 0.0);
                }
            }
            m.add_le(fmt::format("state[{}]", id), LinearExpr().add(L.on[k]).add(L.standby[k]), 1.0);

            if (!segments.empty()) {
                LinearExpr pick, lo, hi;
                for (std::size_t g = 0; g < segments.size(); ++g) {
                    const int y = m.add_binary(fmt::format("allow[{},{}]", id, g));
                    L.segment_select[k].push_back(y);
                    pick.add(y);
                    lo.add(y, segments[g].lo * ka);
                    hi.add(y, segments[g].hi * ka);
                }
                m.add_eq(fmt::format("allow_one[{}]", id), LinearExpr(pick).add(L.on[k], -1.0), 0.0);
                m.add_ge(fmt::format("allow_lo[{}]", id), LinearExpr(current[k]).add(lo, -1.0), 0.0);
                m.add_le(fmt::format("allow_hi[{}]", id), LinearExpr(current[k]).add(hi, -1.0), 0.0);
            }

            auto x_at = [&](int tt, LinearExpr& expr, double sign) {
                if (tt < 0) {
                    expr.add_constant(sign * initial_x(scenario, n));
                } else {
                    const int kk = L.idx(tt, n);
                    expr.add(L.on[kk], sign).add(L.standby[kk], sign);
                }
            };
            // Startup when leaving idle.
            LinearExpr su;
            su.add(L.startup[k]);
            x_at(t, su, -1.0);
            x_at(t - 1, su, 1.0);
            m.add_ge(fmt::format("startup[{}]", id), su, 0.0);
            // idle[t-2] + idle[t] - idle[t-1] >= 0, written with x = 1 - idle.
            LinearExpr dip;
            x_at(t - 2, dip, -1.0);
            x_at(t, dip, -1.0);
            x_at(t - 1, dip, 1.0);
            m.add_ge(fmt::format("min_idle[{}]", id), dip, -1.0);

            objective.add(current[k], scenario.prices.hydrogen_per_kg * kg_per_unit_h * dt);
            objective.add(L.startup[k], -scenario.prices.startup * dt);
        }
    }

    const double p_max = (L.pwl.power.back() + e.aux_power) * mw * N;
    L.grid.resize(T);
    for (int t = 0; t < T; ++t) {
        L.grid[t] = m.add_variable(fmt::format("grid[{}]", t), 0.0, p_max);
        LinearExpr balance;
        for (int n = 0; n < N; ++n) {
            balance.add(power[L.idx(t, n)]);
        }
        balance.add(L.grid[t], -1.0);
        m.add_le(fmt::format("balance[{}]", t), balance, scenario.renewable[t] * mw);
        // grid_per_kWh * (MW -> kW)
        objective.add(L.grid[t], -scenario.prices.grid_per_kwh * 1e3 * L.watts_per_unit * 1e-6 * dt);
    }

    if (strategy == Strategy::PM) {
        for (int h : scenario.limited_orders) {
            const auto* th = rules->find(h);
            if (!th) {
                throw std::invalid_argument(fmt::format("no fitted rules for limited order {}", h));
            }
            for (int t = 0; t < T; ++t) {
                std::vector<RuleUnit> units;
                for (int n = 0; n < N; ++n) {
                    units.push_back({L.on[L.idx(t, n)], current[L.idx(t, n)]});
                }
                L.rules.push_back(emit_milp_rules(m, *th, units, L.amps_per_unit, fmt::format("t{}", t)));
            }
        }
    }

    m.set_objective(objective);
    m.validate();
    return b;
}

void restrict_current_grid(BuiltModel& built, const Scenario& scenario, double step) {
    if (!(step > 0.0)) {
        throw std::invalid_argument("restrict_current_grid: step must be positive");
    }
    auto& L = built.layout;
    auto& m = built.model;
    const int levels = static_cast<int>(std::floor((scenario.elz.i_max - scenario.elz.i_min) / step + 1e-9));
    const double ka = step / L.amps_per_unit;
    for (int t = 0; t < L.horizon; ++t) {
        for (int n = 0; n < L.n_elz; ++n) {
            const int k = L.idx(t, n);
            const std::string id = fmt::format("{},{}", t, n);
            const int level = m.add_variable(fmt::format("level[{}]", id), 0.0, levels, VarType::Integer);
            LinearExpr above;
            for (int d : L.delta[k]) {
                above.add(d);
            }
            above.add(level, -ka);
            m.add_eq(fmt::format("level_def[{}]", id), above, 0.0);
            m.add_le(fmt::format("level_on[{}]", id), LinearExpr().add(level).add(L.on[k], -levels), 0.0);
        }
    }
}

Schedule solve(const BuiltModel& built, const Scenario& scenario, MilpBackend& backend,
               const SolveOptions& options) {
    const auto& L = built.layout;
    const auto& e = scenario.elz;
    const int N = L.n_elz;
    const int T = L.horizon;
    MilpSolution sol = backend.solve(built.model, options);
    std::vector<double> x = sol.values;

    const double ka = 1.0 / L.amps_per_unit;
    const double mw = 1.0 / L.watts_per_unit;
    Schedule s;
    s.strategy = built.strategy;
    s.n_elz = N;
    s.horizon = T;
    s.step_hours = scenario.step_hours;
    s.units.resize(N * T);
    s.grid_purchase.resize(T);
    s.renewable = scenario.renewable;

    for (int t = 0; t < T; ++t) {
        double demand = 0.0;  // MW
        for (int n = 0; n < N; ++n) {
            const int k = L.idx(t, n);
            const bool on = x[L.on[k]] > 0.5;
            const bool by = !on && x[L.standby[k]] > 0.5;
            double i = 0.0;
            for (int d : L.delta[k]) {
                i += x[d];
            }
            i = on ? std::clamp(e.i_min * ka + i, e.i_min * ka, e.i_max * ka) : 0.0;
            // Fill segments in order.
            double rest = on ? i - e.i_min * ka : 0.0;
            for (std::size_t seg = 0; seg < L.delta[k].size(); ++seg) {
                const double len = (L.pwl.current[seg + 1] - L.pwl.current[seg]) * ka;
                const double v = std::min(len, std::max(rest, 0.0));
                x[L.delta[k][seg]] = v;
                rest -= v;
            }
            const bool was = t == 0 ? initial_x(scenario, n) > 0.5
                                    : x[L.on[L.idx(t - 1, n)]] + x[L.standby[L.idx(t - 1, n)]] > 0.5;
            const bool startup = (on || by) && !was;
            x[L.startup[k]] = startup ? 1.0 : 0.0;
            x[L.on[k]] = on ? 1.0 : 0.0;
            x[L.standby[k]] = by ? 1.0 : 0.0;

            auto& u = s.at(t, n);
            u.state = on ? UnitState::On : (by ? UnitState::Standby : UnitState::Idle);
            u.startup = startup;
            u.current = i * L.amps_per_unit;
            u.stack_power = on ? L.pwl.eval(u.current) : 0.0;
            u.total_power = u.stack_power + ((on || by) ? e.aux_power : 0.0);
            u.hydrogen_kg = on ? hydrogen_mass_rate(e.curve, e.eta_faraday, u.current) * scenario.step_hours : 0.0;
            demand += u.total_power * mw;
        }
        const double purchase = std::max(0.0, demand - scenario.renewable[t] * mw);
        x[L.grid[t]] = purchase;
        s.grid_purchase[t] = purchase * L.watts_per_unit;
    }
    // Ordering binaries follow the refilled segments.
    for (std::size_t k = 0; k < L.fill_order.size(); ++k) {
        for (std::size_t seg = 0; seg < L.fill_order[k].size(); ++seg) {
            x[L.fill_order[k][seg]] = x[L.delta[k][seg + 1]] > 0.0 ? 1.0 : 0.0;
        }
    }

    std::string where;
    const double viol = built.model.max_violation(x, &where);
    if (viol > 1e-5) {
        throw std::runtime_error(
            fmt::format("normalized solution violates '{}' by {:.3g}; solver tolerance problem", where, viol));
    }
    s.model_objective = built.model.objective_value(x);
    s.solver = std::move(sol);
    return s;
}

RegionThresholds derive_region(const Scenario& scenario) {
    RegionThresholds r;
    RegionOptions opt;
    opt.resolution = scenario.region_resolution;
    opt.verification_points = scenario.verification_points;
    for (int h : scenario.limited_orders) {
        r.orders.push_back(
            derive_order_thresholds(scenario.elz, h, scenario.plant_limit(h), scenario.n_elz, opt));
    }
    return r;
}

namespace {

SolveOptions solve_options(const Scenario& s) {
    SolveOptions o;
    o.relative_gap = s.solver.relative_gap;
    o.time_limit = s.solver.time_limit;
    o.seed = static_cast<int>(s.seed % 1000003);
    return o;
}

void finish_step(Schedule& s, const Scenario& scenario, int t) {
    double demand = 0.0;
    for (int n = 0; n < s.n_elz; ++n) {
        demand += s.at(t, n).total_power;
    }
    s.grid_purchase[t] = std::max(0.0, demand - scenario.renewable[t]);
}

Schedule run_cm2(const Scenario& scenario, const Schedule& cm1, const RegionThresholds& rules) {
    Schedule s = cm1;
    s.strategy = Strategy::CM2;
    s.model_objective.reset();
    s.solver.reset();
    const auto& e = scenario.elz;
    const auto pwl = piecewise_linearize(e.curve, scenario.solver.pwl_segments, e.i_min, e.i_max);
    const auto excluded = excluded_ranges(scenario);

    for (int t = 0; t < s.horizon; ++t) {
        std::vector<int> on;
        double mean = 0.0;
        for (int n = 0; n < s.n_elz; ++n) {
            if (s.at(t, n).state == UnitState::On) {
                on.push_back(n);
                mean += s.at(t, n).current;
            }
        }
        if (on.empty()) {
            finish_step(s, scenario, t);
            continue;
        }
        mean /= static_cast<double>(on.size());
        const int k = static_cast<int>(on.size());
        bool pair_both_on = false;
        for (int p = 0; p + 1 < s.n_elz; p += 2) {
            pair_both_on = pair_both_on ||
                           (s.at(t, p).state == UnitState::On && s.at(t, p + 1).state == UnitState::On);
        }

        auto acceptable = [&](double c) {
            for (const auto& r : excluded) {
                if (c > r.lo && c < r.hi) {
                    return false;
                }
            }
            for (int h : scenario.limited_orders) {
                const double mag = k * harmonic_at_current(e, c, h).magnitude();
                if (mag > scenario.plant_limit(h) * (1.0 + 1e-9)) {
                    return false;
                }
                // Stay inside the rule set so the result is also a PM candidate.
                const auto* th = rules.find(h);
                if (th && k > th->n_bar && pair_both_on && !th->admits(c, c)) {
                    return false;
                }
            }
            return true;
        };

        std::vector<double> candidates{std::clamp(mean, e.i_min, e.i_max)};
        for (double c = e.i_min; c <= e.i_max + 1e-9; c += 1.0) {
            candidates.push_back(std::min(c, e.i_max));
        }
        std::stable_sort(candidates.begin(), candidates.end(), [&](double a, double b) {
            const double da = std::abs(a - mean);
            const double db = std::abs(b - mean);
            return da != db ? da < db : a > b;
        });
        const auto it = std::find_if(candidates.begin(), candidates.end(), acceptable);
        if (it == candidates.end()) {
            throw NoCompliantLoadError(
                t, fmt::format("CM2: no common current is compliant at step {} with {} units on", t + 1, k));
        }
        for (int n : on) {
            auto& u = s.at(t, n);
            u.current = *it;
            u.stack_power = pwl.eval(*it);
            u.total_power = u.stack_power + e.aux_power;
            u.hydrogen_kg = hydrogen_mass_rate(e.curve, e.eta_faraday, *it) * scenario.step_hours;
        }
        finish_step(s, scenario, t);
    }
    return s;
}

}  // namespace

Schedule run_strategy(const Scenario& scenario, Strategy strategy, const StrategyContext& context) {
    std::optional<RegionThresholds> derived;
    auto rules = [&]() -> const RegionThresholds& {
        if (context.rules) {
            return *context.rules;
        }
        if (!derived) {
            derived = derive_region(scenario);
        }
        return *derived;
    };
    switch (strategy) {
        case Strategy::CM1: {
            const auto built = build_model(scenario, Strategy::CM1);
            auto backend = make_backend(scenario.solver.backend);
            return solve(built, scenario, *backend, solve_options(scenario));
        }
        case Strategy::PM: {
            const auto built = build_model(scenario, Strategy::PM, &rules());
            auto backend = make_backend(scenario.solver.backend);
            return solve(built, scenario, *backend, solve_options(scenario));
        }
        case Strategy::CM2: {
            if (context.cm1) {
                return run_cm2(scenario, *context.cm1, rules());
            }
            const auto cm1 = run_strategy(scenario, Strategy::CM1, context);
            return run_cm2(scenario, cm1, rules());
        }
    }
    throw std::invalid_argument("unknown strategy");
}

HarmonicPhasor step_phasor(const Schedule& schedule, const Scenario& scenario, int t, int h) {
    HarmonicPhasor sum{h, {}};
    for (int n = 0; n < schedule.n_elz; ++n) {
        const auto& u = schedule.at(t, n);
        if (u.state == UnitState::On) {
            sum.value += harmonic_at_current(scenario.elz, u.current, h).value;
        }
    }
    return sum;
}

std::vector<ComplianceReport> validate_schedule(const Schedule& schedule, const Scenario& scenario) {
    std::set<int> orders{1};
    orders.insert(scenario.limited_orders.begin(), scenario.limited_orders.end());
    orders.insert(scenario.reported_orders.begin(), scenario.reported_orders.end());
    std::vector<ComplianceReport> out;
    for (int t = 0; t < schedule.horizon; ++t) {
        std::vector<HarmonicPhasor> agg;
        for (int h : orders) {
            agg.push_back(step_phasor(schedule, scenario, t, h));
        }
        out.push_back(check_compliance(agg, scenario.pcc, scenario.limits));
    }
    return out;
}

double schedule_revenue(const Schedule& schedule, const Scenario& scenario) {
    const auto& p = scenario.prices;
    double revenue = 0.0;
    for (int t = 0; t < schedule.horizon; ++t) {
        double step = 0.0;
        for (int n = 0; n < schedule.n_elz; ++n) {
            const auto& u = schedule.at(t, n);
            step += p.hydrogen_per_kg * u.hydrogen_kg;
            step -= p.startup * (u.startup ? 1.0 : 0.0) * schedule.step_hours;
        }
        step -= p.grid_per_kwh * schedule.grid_purchase[t] / 1e3 * schedule.step_hours;
        revenue += step;
    }
    return revenue;
}

std::vector<std::string> check_schedule_invariants(const Schedule& s, const Scenario& scenario) {
    std::vector<std::string> bad;
    const auto& e = scenario.elz;
    const double tol = 1e-6;
    auto idle = [&](int t, int n) {
        if (t < 0) {
            return scenario.initial_state[n] == UnitState::Idle ? 1 : 0;
        }
        return s.at(t, n).state == UnitState::Idle ? 1 : 0;
    };
    for (int t = 0; t < s.horizon; ++t) {
        double demand = 0.0;
        for (int n = 0; n < s.n_elz; ++n) {
            const auto& u = s.at(t, n);
            const std::string at = fmt::format("step {} unit {}", t + 1, n + 1);
            const bool on = u.state == UnitState::On;
            if (on && (u.current < e.i_min - tol || u.current > e.i_max + tol)) {
                bad.push_back(fmt::format("{}: on with current {} A outside the stack range", at, u.current));
            }
            if (!on && (u.current != 0.0 || u.stack_power != 0.0 || u.hydrogen_kg != 0.0)) {
                bad.push_back(fmt::format("{}: not on but draws current or produces hydrogen", at));
            }
            const double expected_total = u.stack_power + (u.state != UnitState::Idle ? e.aux_power : 0.0);
            if (std::abs(u.total_power - expected_total) > 1e-6 * (1.0 + expected_total)) {
                bad.push_back(fmt::format("{}: total power is not stack plus auxiliaries", at));
            }
            const bool starts = idle(t - 1, n) == 1 && idle(t, n) == 0;
            if (u.startup != starts) {
                bad.push_back(fmt::format("{}: startup flag {} but the state transition says {}", at, u.startup,
                                          starts));
            }
            if (idle(t - 2, n) + idle(t, n) - idle(t - 1, n) < 0) {
                bad.push_back(fmt::format("{}: single-step idle dip", at));
            }
            const double h2 = on ? hydrogen_mass_rate(e.curve, e.eta_faraday, u.current) * s.step_hours : 0.0;
            if (std::abs(u.hydrogen_kg - h2) > 1e-9 * (1.0 + h2)) {
                bad.push_back(fmt::format("{}: hydrogen output does not follow Faraday's law", at));
            }
            if (on && std::abs(u.stack_power - stack_power(e.curve, u.current)) > 0.005 * e.rectifier.rated_stack_power) {
                bad.push_back(fmt::format("{}: piecewise-linear stack power off by more than 0.5%", at));
            }
            demand += u.total_power;
        }
        if (s.grid_purchase[t] < 0.0) {
            bad.push_back(fmt::format("step {}: negative grid purchase", t + 1));
        }
        if (demand - s.grid_purchase[t] > s.renewable[t] + 1e-6 * (1.0 + demand)) {
            bad.push_back(fmt::format("step {}: demand exceeds renewable plus grid purchase", t + 1));
        }
    }
    return bad;
}

std::string schedule_csv(const Schedule& s) {
    std::string out = "step,elz_id,state,current_A,stack_power_W,h2_kg,grid_purchase_W\n";
    for (int t = 0; t < s.horizon; ++t) {
        for (int n = 0; n < s.n_elz; ++n) {
            const auto& u = s.at(t, n);
            out += fmt::format("{},{},{},{:.6f},{:.3f},{:.6f},{:.3f}\n", t + 1, n + 1, to_string(u.state), u.current,
                               u.stack_power, u.hydrogen_kg, s.grid_purchase[t]);
        }
    }
    return out;
}

}  // namespace p2h
