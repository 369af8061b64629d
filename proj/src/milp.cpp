#include "p2h/milp.hpp"

#include "p2h/bundled_solver.hpp"
#ifdef P2H_HAVE_HIGHS
#include "p2h/highs_backend.hpp"
#endif

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace p2h {

LinearExpr& LinearExpr::add(int var, double coef) {
    if (coef != 0.0) {
        terms_.push_back({var, coef});
    }
    return *this;
}

LinearExpr& LinearExpr::add(const LinearExpr& other, double scale) {
    for (const auto& t : other.terms_) {
        add(t.var, t.coef * scale);
    }
    constant_ += other.constant_ * scale;
    return *this;
}

int MilpModel::add_variable(std::string name, double lb, double ub, VarType type) {
    if (type == VarType::Binary) {
        lb = std::max(lb, 0.0);
        ub = std::min(ub, 1.0);
    }
    variables_.push_back({std::move(name), lb, ub, type});
    objective_.push_back(0.0);
    return static_cast<int>(variables_.size() - 1);
}

int MilpModel::add_constraint(std::string name, const LinearExpr& expr, double lo, double hi) {
    Constraint c;
    c.name = std::move(name);
    // Merge duplicate references so backends see one coefficient per column.
    std::vector<LinearTerm> terms = expr.terms();
    std::sort(terms.begin(), terms.end(),
              [](const LinearTerm& a, const LinearTerm& b) { return a.var < b.var; });
    for (const auto& t : terms) {
        if (!c.terms.empty() && c.terms.back().var == t.var) {
            c.terms.back().coef += t.coef;
        } else {
            c.terms.push_back(t);
        }
    }
    std::erase_if(c.terms, [](const LinearTerm& t) { return t.coef == 0.0; });
    c.lo = lo - expr.constant();
    c.hi = hi - expr.constant();
    constraints_.push_back(std::move(c));
    return static_cast<int>(constraints_.size() - 1);
}

int MilpModel::add_le(std::string name, const LinearExpr& expr, double rhs) {
    return add_constraint(std::move(name), expr, -std::numeric_limits<double>::infinity(), rhs);
}

int MilpModel::add_ge(std::string name, const LinearExpr& expr, double rhs) {
    return add_constraint(std::move(name), expr, rhs, std::numeric_limits<double>::infinity());
}

int MilpModel::add_eq(std::string name, const LinearExpr& expr, double rhs) {
    return add_constraint(std::move(name), expr, rhs, rhs);
}

void MilpModel::set_objective(const LinearExpr& expr) {
    std::fill(objective_.begin(), objective_.end(), 0.0);
    for (const auto& t : expr.terms()) {
        if (t.var < 0 || t.var >= static_cast<int>(objective_.size())) {
            throw std::invalid_argument(fmt::format("objective references unknown variable {}", t.var));
        }
        objective_[t.var] += t.coef;
    }
    objective_offset_ = expr.constant();
}

void MilpModel::set_bounds(int var, double lb, double ub) {
    variables_.at(var).lb = lb;
    variables_.at(var).ub = ub;
}

std::size_t MilpModel::num_integer() const {
    return static_cast<std::size_t>(
        std::count_if(variables_.begin(), variables_.end(), [](const Variable& v) { return v.is_integer(); }));
}

double MilpModel::evaluate(const LinearExpr& expr, const std::vector<double>& x) const {
    double s = expr.constant();
    for (const auto& t : expr.terms()) {
        s += t.coef * x.at(t.var);
    }
    return s;
}

double MilpModel::objective_value(const std::vector<double>& x) const {
    double s = objective_offset_;
    for (std::size_t j = 0; j < objective_.size(); ++j) {
        s += objective_[j] * x.at(j);
    }
    return s;
}

double MilpModel::max_violation(const std::vector<double>& x, std::string* where) const {
    double worst = 0.0;
    auto note = [&](double v, const std::string& what) {
        if (v > worst) {
            worst = v;
            if (where) {
                *where = what;
            }
        }
    };
    for (std::size_t j = 0; j < variables_.size(); ++j) {
        const auto& v = variables_[j];
        note(v.lb - x.at(j), v.name);
        note(x.at(j) - v.ub, v.name);
        if (v.is_integer()) {
            note(std::abs(x.at(j) - std::round(x.at(j))), v.name);
        }
    }
    for (const auto& c : constraints_) {
        double s = 0.0;
        for (const auto& t : c.terms) {
            s += t.coef * x.at(t.var);
        }
        note(c.lo - s, c.name);
        note(s - c.hi, c.name);
    }
    return worst;
}

void MilpModel::validate() const {
    const int n = static_cast<int>(variables_.size());
    for (const auto& v : variables_) {
        if (std::isnan(v.lb) || std::isnan(v.ub) || v.lb > v.ub) {
            throw std::invalid_argument(fmt::format("variable '{}' has invalid bounds", v.name));
        }
    }
    for (const auto& c : constraints_) {
        for (const auto& t : c.terms) {
            if (t.var < 0 || t.var >= n) {
                throw std::invalid_argument(
                    fmt::format("constraint '{}' references undeclared variable {}", c.name, t.var));
            }
            if (!std::isfinite(t.coef)) {
                throw std::invalid_argument(fmt::format("constraint '{}' has a non-finite coefficient", c.name));
            }
        }
        if (std::isnan(c.lo) || std::isnan(c.hi)) {
            throw std::invalid_argument(fmt::format("constraint '{}' has NaN bounds", c.name));
        }
    }
    for (double c : objective_) {
        if (!std::isfinite(c)) {
            throw std::invalid_argument("objective has a non-finite coefficient");
        }
    }
    if (!std::isfinite(objective_offset_)) {
        throw std::invalid_argument("objective offset is not finite");
    }
}

bool highs_available() {
#ifdef P2H_HAVE_HIGHS
    return true;
#else
    return false;
#endif
}

std::unique_ptr<MilpBackend> make_backend(std::string_view name) {
    if (name == "bundled") {
        return std::make_unique<BundledBackend>();
    }
    if (name == "highs" || name == "auto") {
#ifdef P2H_HAVE_HIGHS
        return std::make_unique<HighsBackend>();
#else
        if (name == "auto") {
            return std::make_unique<BundledBackend>();
        }
        throw std::invalid_argument("the HiGHS backend was not compiled in");
#endif
    }
    throw std::invalid_argument(fmt::format("unknown solver backend '{}'", name));
}

}  // namespace p2h
