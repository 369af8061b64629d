#pragma once

// Day-ahead unit commitment and current dispatch of an electrolyzer plant.

#include "p2h/feasible_region.hpp"
#include "p2h/grid_codes.hpp"
#include "p2h/milp.hpp"
#include "p2h/scenario.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace p2h {

enum class Strategy { CM1, CM2, PM };

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view text);

/// Piecewise-linear interpolant of P_stack(I) = U_stack(I) I. Because P is
/// convex the secants lie above the curve: the interpolant overestimates.
struct PwlTable {
    std::vector<double> current;  // A, breakpoints
    std::vector<double> power;    // W at the breakpoints

    std::size_t segments() const { return current.size() - 1; }
    double slope(std::size_t k) const;  // W/A
    double eval(double i) const;
    /// Largest |PWL - exact| over a fine grid, divided by `reference` power.
    double max_relative_error(const PolarizationCurve& curve, double reference) const;
};

PwlTable piecewise_linearize(const PolarizationCurve& curve, int n_segments, double i_min, double i_max);

/// Variable indices of a built model. Model units: kA, MW, hours.
struct ModelLayout {
    int n_elz = 0;
    int horizon = 0;
    std::vector<int> on, standby, startup;  // [t * n_elz + n]
    std::vector<std::vector<int>> delta;    // [t * n_elz + n][segment]
    std::vector<std::vector<int>> segment_select;  // soft-exclusion segments, may be empty
    std::vector<std::vector<int>> fill_order;      // optional segment ordering binaries
    std::vector<int> grid;                  // [t]
    std::vector<RuleBlock> rules;           // PM only
    PwlTable pwl;
    double amps_per_unit = 1e3;
    double watts_per_unit = 1e6;

    int idx(int t, int n) const { return t * n_elz + n; }
};

struct BuiltModel {
    MilpModel model;
    ModelLayout layout;
    Strategy strategy = Strategy::CM1;
};

/// CM1 and PM models; `rules` must be given for PM and only for PM.
BuiltModel build_model(const Scenario& scenario, Strategy strategy, const RegionThresholds* rules = nullptr);

struct UnitStep {
    UnitState state = UnitState::Idle;
    bool startup = false;
    double current = 0.0;       // A
    double stack_power = 0.0;   // W (piecewise-linear model)
    double total_power = 0.0;   // W, stack + auxiliaries
    double hydrogen_kg = 0.0;   // over the step
};

struct Schedule {
    Strategy strategy = Strategy::CM1;
    int n_elz = 0;
    int horizon = 0;
    double step_hours = 1.0;
    std::vector<UnitStep> units;   // [t * n_elz + n]
    std::vector<double> grid_purchase;  // W per step
    std::vector<double> renewable;      // W per step
    // Objective of the model at the returned schedule (MILP strategies only).
    std::optional<double> model_objective;
    std::optional<MilpSolution> solver;

    const UnitStep& at(int t, int n) const { return units[static_cast<std::size_t>(t * n_elz + n)]; }
    UnitStep& at(int t, int n) { return units[static_cast<std::size_t>(t * n_elz + n)]; }
};

/// Restricts every running unit to the currents i_min + k * step (k integer).
void restrict_current_grid(BuiltModel& built, const Scenario& scenario, double step);

/// Solves a built model and extracts its schedule. The LP solution is
/// normalized (segments filled in order, minimal startups and grid purchase)
/// before extraction; this never lowers the objective.
Schedule solve(const BuiltModel& built, const Scenario& scenario, MilpBackend& backend,
               const SolveOptions& options);

class NoCompliantLoadError : public std::runtime_error {
public:
    NoCompliantLoadError(int step, const std::string& what) : std::runtime_error(what), step_(step) {}
    int step() const { return step_; }

private:
    int step_;
};

/// Fitted rules for every limited order of the scenario.
RegionThresholds derive_region(const Scenario& scenario);

struct StrategyContext {
    const RegionThresholds* rules = nullptr;  // derived on demand when null
    const Schedule* cm1 = nullptr;            // CM2 reuses it when given
};

Schedule run_strategy(const Scenario& scenario, Strategy strategy, const StrategyContext& context = {});

/// Per-step compliance of the exact (not linearized) phasor model. Every
/// reported and limited order plus the fundamental is evaluated.
std::vector<ComplianceReport> validate_schedule(const Schedule& schedule, const Scenario& scenario);

/// Plant phasors of one step for the given order.
HarmonicPhasor step_phasor(const Schedule& schedule, const Scenario& scenario, int t, int h);

/// Revenue of a schedule from first principles.
double schedule_revenue(const Schedule& schedule, const Scenario& scenario);

/// Checks state exclusivity, startup detection, minimum idle duration, current
/// bounds and power balance. Returns human-readable violations (empty if none).
std::vector<std::string> check_schedule_invariants(const Schedule& schedule, const Scenario& scenario);

std::string schedule_csv(const Schedule& schedule);

}  // namespace p2h
