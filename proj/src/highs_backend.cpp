#include "p2h/highs_backend.hpp"

#include <Highs.h>
#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>

namespace p2h {

MilpSolution HighsBackend::solve(const MilpModel& model, const SolveOptions& options) {
    model.validate();
    const auto start = std::chrono::steady_clock::now();
    const int n = static_cast<int>(model.num_variables());
    const int m = static_cast<int>(model.num_constraints());

    HighsLp lp;
    lp.num_col_ = n;
    lp.num_row_ = m;
    lp.sense_ = ObjSense::kMaximize;
    lp.offset_ = model.objective_offset();
    lp.col_cost_ = model.objective();
    lp.col_lower_.resize(n);
    lp.col_upper_.resize(n);
    lp.integrality_.resize(n);
    for (int j = 0; j < n; ++j) {
        const auto& v = model.variables()[j];
        lp.col_lower_[j] = std::isfinite(v.lb) ? v.lb : -kHighsInf;
        lp.col_upper_[j] = std::isfinite(v.ub) ? v.ub : kHighsInf;
        lp.integrality_[j] = v.is_integer() ? HighsVarType::kInteger : HighsVarType::kContinuous;
    }
    lp.row_lower_.resize(m);
    lp.row_upper_.resize(m);
    lp.a_matrix_.format_ = MatrixFormat::kRowwise;
    lp.a_matrix_.num_col_ = n;
    lp.a_matrix_.num_row_ = m;
    lp.a_matrix_.start_.assign(1, 0);
    for (int i = 0; i < m; ++i) {
        const auto& c = model.constraints()[i];
        lp.row_lower_[i] = std::isfinite(c.lo) ? c.lo : -kHighsInf;
        lp.row_upper_[i] = std::isfinite(c.hi) ? c.hi : kHighsInf;
        for (const auto& t : c.terms) {
            lp.a_matrix_.index_.push_back(t.var);
            lp.a_matrix_.value_.push_back(t.coef);
        }
        lp.a_matrix_.start_.push_back(static_cast<HighsInt>(lp.a_matrix_.index_.size()));
    }

    Highs highs;
    highs.setOptionValue("output_flag", options.verbose);
    highs.setOptionValue("threads", 1);
    highs.setOptionValue("random_seed", options.seed);
    highs.setOptionValue("mip_rel_gap", options.relative_gap);
    highs.setOptionValue("time_limit", options.time_limit);
    if (highs.passModel(lp) == HighsStatus::kError) {
        throw std::runtime_error("HiGHS rejected the model");
    }
    highs.run();

    const auto status = highs.getModelStatus();
    const auto& info = highs.getInfo();
    if (status == HighsModelStatus::kInfeasible || status == HighsModelStatus::kUnboundedOrInfeasible) {
        throw InfeasibleModelError("model is infeasible (reported by HiGHS)",
                                   {highs.modelStatusToString(status)});
    }
    const bool has_solution = info.primal_solution_status == kSolutionStatusFeasible;
    if (status == HighsModelStatus::kTimeLimit) {
        throw SolverTimeoutError(
            has_solution ? fmt::format("time limit of {} s reached with gap {:.3g}", options.time_limit,
                                       info.mip_gap)
                         : fmt::format("time limit of {} s reached before any integer solution",
                                       options.time_limit));
    }
    if (status != HighsModelStatus::kOptimal || !has_solution) {
        throw std::runtime_error(fmt::format("HiGHS stopped with status '{}'", highs.modelStatusToString(status)));
    }

    MilpSolution out;
    out.backend = name();
    out.status = SolveStatus::Optimal;
    out.values = highs.getSolution().col_value;
    for (int j = 0; j < n; ++j) {
        const auto& v = model.variables()[j];
        if (v.is_integer()) {
            out.values[j] = std::round(out.values[j]);
        }
        out.values[j] = std::clamp(out.values[j], v.lb, v.ub);
    }
    out.objective = model.objective_value(out.values);
    out.bound = std::max(info.mip_dual_bound, out.objective);
    out.gap = (out.bound - out.objective) / std::max(1.0, std::abs(out.objective));
    out.nodes = static_cast<long>(info.mip_node_count);
    out.lp_iterations = static_cast<long>(info.simplex_iteration_count);
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

}  // namespace p2h
