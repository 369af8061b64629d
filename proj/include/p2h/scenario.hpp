#pragma once

#include "p2h/grid_codes.hpp"
#include "p2h/rectifier.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace p2h {

enum class UnitState { Idle, Standby, On };

std::string_view to_string(UnitState s);

struct Prices {
    std::string currency = "CNY";
    double hydrogen_per_kg = 26.0;
    double grid_per_kwh = 0.6;
    double startup = 1000.0;
};

/// Current range a unit may not operate in (e.g. where its 47th harmonic is large).
struct SoftExclusion {
    int order = 47;
    double threshold = 0.0;  // A per unit
};

struct SolverSettings {
    std::string backend = "auto";
    double relative_gap = 1e-3;
    double time_limit = 600.0;  // s
    int pwl_segments = 6;
    bool pwl_ordering_binaries = false;
};

struct Scenario {
    std::string name = "scenario";
    int n_elz = 2;
    int horizon = 24;
    double step_hours = 1.0;
    std::vector<double> renewable;  // W per step
    Prices prices;
    PccSpec pcc;
    HarmonicLimitTable limits;
    ElectrolyzerSpec elz;
    std::vector<UnitState> initial_state;  // per unit, state before the first step
    std::vector<int> limited_orders{23, 25};
    std::vector<int> reported_orders{23, 25, 47, 49};
    std::vector<SoftExclusion> soft_exclusions;
    double region_resolution = 50.0;
    std::size_t verification_points = 100;
    SolverSettings solver;
    std::uint64_t seed = 0;

    void validate() const;
    /// Plant-level limit for order h at this PCC.
    double plant_limit(int h) const { return harmonic_limit(pcc, limits, h); }
};

/// Invalid scenario input. `field` is a JSON pointer such as /prices/startup;
/// `line` is set for syntax errors.
class ScenarioError : public std::invalid_argument {
public:
    ScenarioError(const std::string& what, std::string field, int line = 0)
        : std::invalid_argument(what), field_(std::move(field)), line_(line) {}
    const std::string& field() const { return field_; }
    int line() const { return line_; }

private:
    std::string field_;
    int line_;
};

struct ScenarioOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<double> region_resolution;
    std::optional<double> relative_gap;
    std::optional<std::string> backend;
    std::optional<double> time_limit;
};

/// Relative paths inside the document (limit table, profile file) resolve
/// against `base_dir`.
Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir,
                        const ScenarioOverrides& overrides = {});
Scenario load_scenario(const std::filesystem::path& path, const ScenarioOverrides& overrides = {});

/// Reads a renewable profile: one value per line (W), or CSV whose last
/// column holds the value; a non-numeric first line is treated as a header.
std::vector<double> load_profile(const std::filesystem::path& path);

/// Multiplies `base` by independent factors 1 + noise * N(0,1) (clipped at 0).
std::vector<double> synthetic_profile(const std::vector<double>& base, double noise, std::uint64_t seed);

}  // namespace p2h
