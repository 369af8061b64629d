#pragma once

// Pairwise harmonic-feasible current region, its interval/offset rule fit and
// the mixed-integer rules that enforce it.

#include "p2h/milp.hpp"
#include "p2h/rectifier.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace p2h {

struct CurrentInterval {
    double lo = 0.0;  // A
    double hi = 0.0;
    bool enabled = true;
};

struct OrderThresholds {
    int order = 23;
    double pair_limit = 0.0;  // A, bound on |phasor(I1) + phasor(I2)|
    double i_min = 2000.0;
    double i_max = 7000.0;
    CurrentInterval low, medium, high;
    double delta_i_m = 0.0;  // A
    int n_bar = 0;
    bool vacuous = false;    // no infeasible pair in range
    double resolution = 50.0;

    /// Would the rules (with mitigation active) admit both units at these currents?
    bool admits(double i1, double i2) const;
};

struct RegionThresholds {
    std::vector<OrderThresholds> orders;

    const OrderThresholds* find(int h) const;
};

struct PairGrid {
    int order = 23;
    double pair_limit = 0.0;
    std::vector<double> axis;        // A
    std::vector<double> magnitude;   // row-major, axis.size()^2
    std::vector<std::uint8_t> feasible;

    std::size_t size() const { return axis.size(); }
    double mag(std::size_t i, std::size_t j) const { return magnitude[i * axis.size() + j]; }
    bool is_feasible(std::size_t i, std::size_t j) const { return feasible[i * axis.size() + j] != 0; }
    bool symmetric() const;
    std::size_t infeasible_count() const;
};

class RegionFitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

PairGrid sweep_pair(const ElectrolyzerSpec& spec, int h, double pair_limit, double resolution = 50.0);

/// Interval/offset thresholds whose rules exclude every infeasible grid point.
OrderThresholds fit_hexagon_thresholds(const PairGrid& grid);

/// max over I in [i_min, i_max] of |I_h(I)| for one unit.
double max_harmonic_magnitude(const ElectrolyzerSpec& spec, int h);

int compute_auto_comply_count(const ElectrolyzerSpec& spec, int h, double limit);

struct VerificationReport {
    std::size_t points = 0;
    std::size_t infeasible = 0;
    std::size_t admitted = 0;
    std::size_t false_feasible = 0;
};

/// Re-checks the rules against the exact phasor model on an n x n grid.
VerificationReport verify_rules(const ElectrolyzerSpec& spec, const OrderThresholds& t,
                                std::size_t n_points = 100);

struct RegionOptions {
    double resolution = 50.0;
    std::size_t verification_points = 100;
    std::size_t fine_verification_points = 401;
};

/// Sweep, fit, verify (widening the margins until no false-feasible point
/// remains) and attach N-bar. `plant_limit` is the PCC limit for order h.
OrderThresholds derive_order_thresholds(const ElectrolyzerSpec& spec, int h, double plant_limit, int n_elz,
                                        const RegionOptions& options = {});

/// Current ranges where a single unit exceeds `threshold` amperes at order h.
std::vector<CurrentInterval> high_harmonic_intervals(const ElectrolyzerSpec& spec, int h, double threshold,
                                                     double resolution = 10.0);

struct RuleUnit {
    int on = -1;           // on-state binary
    LinearExpr current;    // in model units
};

struct RuleBlock {
    int z = -1;  // mitigation-needed indicator, -1 when the order needs no rules
    std::vector<int> interval_binaries;  // per unit: L, M, H
    std::vector<int> both_medium;        // per pair
    std::vector<int> ordering;           // per pair
};

/// Adds the interval-membership, both-in-medium, mitigation-gating and offset
/// rules for one order and one time step. Units are paired (0,1), (2,3), ...
/// `amps_per_unit` converts model current units to amperes.
RuleBlock emit_milp_rules(MilpModel& model, const OrderThresholds& t, std::span<const RuleUnit> units,
                          double amps_per_unit, const std::string& tag);

std::string thresholds_to_json(const RegionThresholds& r);
RegionThresholds thresholds_from_json(const std::string& text);
void save_thresholds(const RegionThresholds& r, const std::filesystem::path& path);
RegionThresholds load_thresholds(const std::filesystem::path& path);

std::string pair_grid_csv(const PairGrid& g);

}  // namespace p2h
