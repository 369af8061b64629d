#pragma once

// Self-contained exact MILP backend: bounded dual simplex on a dense tableau
// plus depth-first/best-bound branch and bound. Sized for desk-scale models
// (a few thousand rows and columns).

#include "p2h/milp.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace p2h {

struct LpResult {
    enum class Status { Optimal, Infeasible };
    Status status = Status::Infeasible;
    double objective = 0.0;
    std::vector<double> x;  // structural values
    long iterations = 0;
    std::vector<std::string> conflict;  // names involved in the failing row
};

/// LP relaxation of a MilpModel with mutable column bounds. The basis is kept
/// between calls, so re-solving after bound changes is a warm start.
class DualSimplex {
public:
    explicit DualSimplex(const MilpModel& model);

    void set_column_bounds(int var, double lb, double ub);
    double column_lower(int var) const { return lower_[var]; }
    double column_upper(int var) const { return upper_[var]; }

    LpResult solve(long max_iterations = 200000);

private:
    double nonbasic_value(int col) const;
    void refactor();
    void sync_nonbasic_flags();
    void recompute_basic_values();
    double primal_residual() const;
    std::string var_name(int var) const;

    const MilpModel& model_;
    int n_ = 0;  // structural columns
    int m_ = 0;  // rows (one logical per row)
    Eigen::MatrixXd a_;  // dense constraint matrix, m x n
    Eigen::MatrixXd t_;  // basic = t_ * nonbasic
    Eigen::VectorXd d_;  // reduced costs of nonbasic columns
    Eigen::VectorXd xb_;
    std::vector<double> cost_;  // over all n + m variables
    std::vector<double> lower_, upper_;
    std::vector<int> head_;     // basic variable of each row
    std::vector<int> nonbasic_; // variable of each tableau column
    std::vector<char> at_upper_;
    long pivots_since_refactor_ = 0;
};

class BundledBackend : public MilpBackend {
public:
    std::string name() const override { return "bundled"; }
    MilpSolution solve(const MilpModel& model, const SolveOptions& options) override;
};

}  // namespace p2h
