#pragma once

// Solver-neutral mixed-integer linear model and the backend contract.

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace p2h {

enum class VarType { Continuous, Binary, Integer };

struct Variable {
    std::string name;
    double lb = 0.0;
    double ub = 0.0;
    VarType type = VarType::Continuous;

    bool is_integer() const { return type != VarType::Continuous; }
};

struct LinearTerm {
    int var = -1;
    double coef = 0.0;
};

class LinearExpr {
public:
    LinearExpr() = default;
    explicit LinearExpr(double constant) : constant_(constant) {}

    LinearExpr& add(int var, double coef = 1.0);
    LinearExpr& add(const LinearExpr& other, double scale = 1.0);
    LinearExpr& add_constant(double c) {
        constant_ += c;
        return *this;
    }

    const std::vector<LinearTerm>& terms() const { return terms_; }
    double constant() const { return constant_; }

private:
    std::vector<LinearTerm> terms_;
    double constant_ = 0.0;
};

/// lo <= sum(terms) <= hi
struct Constraint {
    std::string name;
    std::vector<LinearTerm> terms;
    double lo = 0.0;
    double hi = 0.0;
};

class MilpModel {
public:
    int add_variable(std::string name, double lb, double ub, VarType type = VarType::Continuous);
    int add_binary(std::string name) { return add_variable(std::move(name), 0.0, 1.0, VarType::Binary); }

    /// Adds lo <= expr <= hi; the expression constant is moved to the bounds.
    int add_constraint(std::string name, const LinearExpr& expr, double lo, double hi);
    int add_le(std::string name, const LinearExpr& expr, double rhs);
    int add_ge(std::string name, const LinearExpr& expr, double rhs);
    int add_eq(std::string name, const LinearExpr& expr, double rhs);

    /// The model is always maximized.
    void set_objective(const LinearExpr& expr);

    void set_bounds(int var, double lb, double ub);

    const std::vector<Variable>& variables() const { return variables_; }
    const std::vector<Constraint>& constraints() const { return constraints_; }
    const std::vector<double>& objective() const { return objective_; }
    double objective_offset() const { return objective_offset_; }

    std::size_t num_variables() const { return variables_.size(); }
    std::size_t num_constraints() const { return constraints_.size(); }
    std::size_t num_integer() const;

    double evaluate(const LinearExpr& expr, const std::vector<double>& x) const;
    double objective_value(const std::vector<double>& x) const;

    /// Largest bound/row/integrality violation of `x`; `where` names it.
    double max_violation(const std::vector<double>& x, std::string* where = nullptr) const;

    /// Throws std::invalid_argument on dangling references or non-finite data.
    void validate() const;

private:
    std::vector<Variable> variables_;
    std::vector<Constraint> constraints_;
    std::vector<double> objective_;
    double objective_offset_ = 0.0;
};

enum class SolveStatus { Optimal, Infeasible, TimeLimit };

struct MilpSolution {
    SolveStatus status = SolveStatus::Infeasible;
    std::vector<double> values;
    double objective = 0.0;
    double bound = 0.0;  // proven upper bound on the optimum
    double gap = 0.0;    // relative, (bound - objective) / max(1, |objective|)
    long nodes = 0;
    long lp_iterations = 0;
    double seconds = 0.0;
    std::string backend;
};

struct SolveOptions {
    double relative_gap = 1e-3;
    double time_limit = 600.0;  // s
    int seed = 0;
    bool verbose = false;
};

class InfeasibleModelError : public std::runtime_error {
public:
    InfeasibleModelError(const std::string& what, std::vector<std::string> hints)
        : std::runtime_error(what), hints_(std::move(hints)) {}
    const std::vector<std::string>& hints() const { return hints_; }

private:
    std::vector<std::string> hints_;
};

class SolverTimeoutError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MilpBackend {
public:
    virtual ~MilpBackend() = default;
    virtual std::string name() const = 0;
    /// Returns an Optimal solution within options.relative_gap, or throws
    /// InfeasibleModelError / SolverTimeoutError.
    virtual MilpSolution solve(const MilpModel& model, const SolveOptions& options) = 0;
};

/// "bundled", "highs" or "auto" (HiGHS when compiled in, else bundled).
std::unique_ptr<MilpBackend> make_backend(std::string_view name);
bool highs_available();

}  // namespace p2h
