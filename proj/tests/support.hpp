#pragma once

#include "p2h/scenario.hpp"

#include <string>
#include <vector>

namespace p2h::testing {

inline std::string data_path(const std::string& rel) { return std::string(P2H_DATA_DIR) + "/" + rel; }

/// Programmatic 10 kV plant with the shipped limit table and the bundled solver.
inline Scenario small_plant(int n_elz, std::vector<double> renewable_w) {
    Scenario s;
    s.name = "test";
    s.n_elz = n_elz;
    s.horizon = static_cast<int>(renewable_w.size());
    s.renewable = std::move(renewable_w);
    s.limits = load_limit_table(data_path("limits/gbt14549_10kV.txt"));
    s.pcc.rated_voltage = 10e3;
    s.pcc.s_sc = 200e6;
    s.pcc.s_gb = *s.limits.base_capacity;
    s.initial_state.assign(static_cast<std::size_t>(n_elz), UnitState::Idle);
    s.solver.backend = "bundled";
    s.solver.relative_gap = 1e-6;
    s.solver.time_limit = 120.0;
    s.validate();
    return s;
}

}  // namespace p2h::testing
