#pragma once

#include "p2h/rectifier.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace p2h {

enum class GridCodeMode { GBT14549, IEEE519 };

std::string_view to_string(GridCodeMode mode);
GridCodeMode parse_grid_code_mode(std::string_view text);

struct PccSpec {
    double rated_voltage = 10e3;  // V
    double s_sc = 200e6;          // short-circuit capacity at the PCC, VA
    double s_gb = 100e6;          // base short-circuit capacity of the limit table, VA
    GridCodeMode mode = GridCodeMode::GBT14549;
    double max_demand_current = 0.0;  // IEEE 519 I_L, A

    void validate() const;
};

/// Per-order limits. GBT mode: amperes at the base capacity. IEEE mode:
/// percent of the maximum demand current.
struct HarmonicLimitTable {
    GridCodeMode mode = GridCodeMode::GBT14549;
    std::map<int, double> base_limits;
    // Advisory caps for orders the standard leaves unconstrained (e.g. 47, 49).
    // They are reported but never affect the compliance flag.
    std::map<int, double> soft_caps;
    std::optional<double> base_capacity;  // VA, when the file states it
    std::string source;

    bool has(int h) const { return base_limits.contains(h); }
    void validate() const;
};

class MissingLimitError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

class MixedOrderError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class LimitTableError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

double harmonic_limit(const PccSpec& pcc, const HarmonicLimitTable& table, int h);
double soft_limit(const PccSpec& pcc, const HarmonicLimitTable& table, int h);

HarmonicPhasor aggregate_phasors(std::span<const HarmonicPhasor> phasors);

struct OrderCompliance {
    int order = 0;
    double magnitude = 0.0;
    double limit = 0.0;  // +inf for unconstrained orders
    bool limited = false;
    bool compliant = true;
    bool soft_exceeded = false;
};

struct ComplianceReport {
    std::vector<OrderCompliance> orders;
    bool compliant = true;
    double fundamental = 0.0;
    double thd = 0.0;

    const OrderCompliance* find(int h) const;
};

/// `aggregates` holds one plant-level phasor per order; order 1, when present,
/// is the fundamental used for THD.
ComplianceReport check_compliance(std::span<const HarmonicPhasor> aggregates, const PccSpec& pcc,
                                  const HarmonicLimitTable& table);

HarmonicLimitTable parse_limit_table(std::string_view text, std::string source = "<memory>");
HarmonicLimitTable load_limit_table(const std::filesystem::path& path);
std::string format_limit_table(const HarmonicLimitTable& table);

/// IEEE 519-2014 current distortion limits (percent of I_L) for systems rated
/// 120 V through 69 kV, for the characteristic orders 23, 25, 47 and 49.
HarmonicLimitTable ieee519_limit_table(double isc_over_il);

}  // namespace p2h
