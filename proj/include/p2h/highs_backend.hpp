#pragma once

#include "p2h/milp.hpp"

namespace p2h {

/// Adapter for the HiGHS MILP solver (single thread, fixed seed).
class HighsBackend : public MilpBackend {
public:
    std::string name() const override { return "highs"; }
    MilpSolution solve(const MilpModel& model, const SolveOptions& options) override;
};

}  // namespace p2h
