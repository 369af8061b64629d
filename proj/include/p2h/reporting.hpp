#pragma once

#include "p2h/scheduler.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace p2h {

struct KpiReport {
    std::string strategy;
    std::string currency = "CNY";
    double revenue = 0.0;
    double hydrogen_kg = 0.0;
    double grid_purchase_kwh = 0.0;
    int startups = 0;
    bool compliant = true;
    int violating_steps = 0;
    std::map<int, double> avg_harmonic;  // A, averaged over every step
    std::optional<double> model_objective;
    std::optional<double> gap;
    double solve_seconds = 0.0;
    std::string backend;
    std::string error;  // set when the strategy failed; other fields are then empty
};

KpiReport kpi(const Schedule& schedule, const Scenario& scenario);

struct Comparison {
    std::vector<KpiReport> rows;  // CM1, CM2, PM
    std::vector<std::optional<Schedule>> schedules;
};

/// Runs CM1, CM2 and PM. A failing strategy yields a row with `error` set.
Comparison compare_strategies(const Scenario& scenario, const RegionThresholds* rules = nullptr);

std::string kpi_json(const KpiReport& k);
std::string comparison_json(const Comparison& c);
std::string comparison_csv(const Comparison& c);

std::string compliance_csv(const std::vector<ComplianceReport>& steps);

/// Rows (I, order, magnitude, phase) for every current and order.
std::string export_phasor_sweep(const ElectrolyzerSpec& spec, std::span<const int> orders,
                                std::span<const double> currents);

std::string export_operating_points(const ElectrolyzerSpec& spec, std::span<const double> currents);

std::string waveform_csv(const Waveform& w);

}  // namespace p2h
