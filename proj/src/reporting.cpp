#include "p2h/reporting.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <cmath>
#include <numbers>

namespace p2h {

KpiReport kpi(const Schedule& schedule, const Scenario& scenario) {
    KpiReport k;
    k.strategy = std::string(to_string(schedule.strategy));
    k.currency = scenario.prices.currency;
    k.revenue = schedule_revenue(schedule, scenario);
    for (int t = 0; t < schedule.horizon; ++t) {
        for (int n = 0; n < schedule.n_elz; ++n) {
            k.hydrogen_kg += schedule.at(t, n).hydrogen_kg;
            k.startups += schedule.at(t, n).startup ? 1 : 0;
        }
        k.grid_purchase_kwh += schedule.grid_purchase[t] / 1e3 * schedule.step_hours;
    }
    const auto steps = validate_schedule(schedule, scenario);
    for (int h : scenario.reported_orders) {
        k.avg_harmonic[h] = 0.0;
    }
    for (const auto& r : steps) {
        k.compliant = k.compliant && r.compliant;
        k.violating_steps += r.compliant ? 0 : 1;
        for (int h : scenario.reported_orders) {
            if (const auto* o = r.find(h)) {
                k.avg_harmonic[h] += o->magnitude;
            }
        }
    }
    for (auto& [h, v] : k.avg_harmonic) {
        v /= static_cast<double>(std::max<std::size_t>(steps.size(), 1));
    }
    k.model_objective = schedule.model_objective;
    if (schedule.solver) {
        k.gap = schedule.solver->gap;
        k.solve_seconds = schedule.solver->seconds;
        k.backend = schedule.solver->backend;
    }
    return k;
}

Comparison compare_strategies(const Scenario& scenario, const RegionThresholds* rules) {
    std::optional<RegionThresholds> derived;
    if (!rules) {
        derived = derive_region(scenario);
        rules = &*derived;
    }
    Comparison c;
    auto failed = [&](Strategy s, const std::exception& e) {
        KpiReport k;
        k.strategy = std::string(to_string(s));
        k.currency = scenario.prices.currency;
        k.compliant = false;
        k.error = e.what();
        c.rows.push_back(k);
        c.schedules.emplace_back();
    };

    std::optional<Schedule> cm1;
    try {
        cm1 = run_strategy(scenario, Strategy::CM1);
        c.rows.push_back(kpi(*cm1, scenario));
        c.schedules.push_back(cm1);
    } catch (const std::exception& e) {
        failed(Strategy::CM1, e);
    }
    try {
        if (!cm1) {
            throw std::runtime_error("CM1 failed, so CM2 has no commitment to follow");
        }
        StrategyContext ctx{rules, &*cm1};
        auto s = run_strategy(scenario, Strategy::CM2, ctx);
        c.rows.push_back(kpi(s, scenario));
        c.schedules.push_back(std::move(s));
    } catch (const std::exception& e) {
        failed(Strategy::CM2, e);
    }
    try {
        StrategyContext ctx{rules, nullptr};
        auto s = run_strategy(scenario, Strategy::PM, ctx);
        c.rows.push_back(kpi(s, scenario));
        c.schedules.push_back(std::move(s));
    } catch (const std::exception& e) {
        failed(Strategy::PM, e);
    }
    return c;
}

namespace {

nlohmann::json kpi_to_json(const KpiReport& k) {
    nlohmann::json j;
    j["strategy"] = k.strategy;
    if (!k.error.empty()) {
        j["error"] = k.error;
        return j;
    }
    j["currency"] = k.currency;
    j["revenue"] = k.revenue;
    j["hydrogen_kg"] = k.hydrogen_kg;
    j["grid_purchase_kWh"] = k.grid_purchase_kwh;
    j["startups"] = k.startups;
    j["compliant"] = k.compliant;
    j["violating_steps"] = k.violating_steps;
    nlohmann::json avg = nlohmann::json::object();
    for (const auto& [h, v] : k.avg_harmonic) {
        avg[std::to_string(h)] = v;
    }
    j["avg_harmonic_A"] = avg;
    if (k.model_objective) {
        j["model_objective"] = *k.model_objective;
    }
    if (k.gap) {
        j["mip_gap"] = *k.gap;
        j["solve_seconds"] = k.solve_seconds;
        j["backend"] = k.backend;
    }
    return j;
}

}  // namespace

std::string kpi_json(const KpiReport& k) { return kpi_to_json(k).dump(2) + "\n"; }

std::string comparison_json(const Comparison& c) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : c.rows) {
        j.push_back(kpi_to_json(r));
    }
    return j.dump(2) + "\n";
}

std::string comparison_csv(const Comparison& c) {
    std::string out = "strategy,revenue,hydrogen_kg,grid_purchase_kWh,compliant,avg_h23_A,avg_h25_A,avg_h47_A,avg_h49_A\n";
    for (const auto& r : c.rows) {
        if (!r.error.empty()) {
            out += fmt::format("{},,,,,,,,\n", r.strategy);
            continue;
        }
        auto avg = [&](int h) {
            const auto it = r.avg_harmonic.find(h);
            return it == r.avg_harmonic.end() ? std::string() : fmt::format("{:.6f}", it->second);
        };
        out += fmt::format("{},{:.4f},{:.4f},{:.4f},{},{},{},{},{}\n", r.strategy, r.revenue, r.hydrogen_kg,
                           r.grid_purchase_kwh, r.compliant ? 1 : 0, avg(23), avg(25), avg(47), avg(49));
    }
    return out;
}

std::string compliance_csv(const std::vector<ComplianceReport>& steps) {
    std::string out = "step,order,magnitude_A,limit_A,compliant,thd\n";
    for (std::size_t t = 0; t < steps.size(); ++t) {
        for (const auto& o : steps[t].orders) {
            out += fmt::format("{},{},{:.6f},{},{},{:.6f}\n", t + 1, o.order, o.magnitude,
                               o.limited ? fmt::format("{:.6f}", o.limit) : std::string("inf"), o.compliant ? 1 : 0,
                               steps[t].thd);
        }
    }
    return out;
}

std::string export_phasor_sweep(const ElectrolyzerSpec& spec, std::span<const int> orders,
                                std::span<const double> currents) {
    for (int h : orders) {
        if (h != 1 && !is_characteristic_order(h, spec.rectifier.pulse_number)) {
            throw UnsupportedOrderError(fmt::format("order {} is not a characteristic harmonic", h));
        }
    }
    std::string out = "I_A,order,magnitude_A,phase_deg\n";
    for (double i : currents) {
        for (int h : orders) {
            const auto p = harmonic_at_current(spec, i, h);
            out += fmt::format("{},{},{:.9g},{:.6f}\n", i, h, p.magnitude(), p.phase() * 180.0 / std::numbers::pi);
        }
    }
    return out;
}

std::string export_operating_points(const ElectrolyzerSpec& spec, std::span<const double> currents) {
    std::string out = "I_A,alpha_deg,gamma_deg,u_stack_V,i_fund_A\n";
    const double deg = 180.0 / std::numbers::pi;
    for (double i : currents) {
        const auto op = solve_operating_point(spec.rectifier, spec.curve, i);
        out += fmt::format("{},{:.9g},{:.9g},{:.9g},{:.9g}\n", i, op.alpha * deg, op.gamma * deg, op.u_stack, op.i_fund);
    }
    return out;
}

std::string waveform_csv(const Waveform& w) {
    std::string out = "sample_index,current_A\n";
    for (std::size_t k = 0; k < w.samples.size(); ++k) {
        out += fmt::format("{},{:.9g}\n", k, w.samples[k]);
    }
    return out;
}

}  // namespace p2h
