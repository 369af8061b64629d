#include "p2h/bundled_solver.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <cstdio>

namespace p2h {

namespace {

constexpr double kPrimalTol = 1e-7;
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr double kIntegralityTol = 1e-6;
constexpr long kRefactorInterval = 400;

}  // namespace

DualSimplex::DualSimplex(const MilpModel& model) : model_(model) {
    n_ = static_cast<int>(model.num_variables());
    m_ = static_cast<int>(model.num_constraints());
    a_ = Eigen::MatrixXd::Zero(m_, n_);
    for (int i = 0; i < m_; ++i) {
        for (const auto& t : model.constraints()[i].terms) {
            a_(i, t.var) += t.coef;
        }
    }

    double cmax = 0.0;
    for (double c : model.objective()) {
        cmax = std::max(cmax, std::abs(c));
    }
    const double cscale = cmax > 0.0 ? 1.0 / cmax : 1.0;

    cost_.assign(n_ + m_, 0.0);
    lower_.resize(n_ + m_);
    upper_.resize(n_ + m_);
    for (int j = 0; j < n_; ++j) {
        const auto& v = model.variables()[j];
        if (!std::isfinite(v.lb) || !std::isfinite(v.ub)) {
            throw std::invalid_argument(
                fmt::format("bundled solver needs finite bounds; variable '{}' is unbounded", v.name));
        }
        lower_[j] = v.lb;
        upper_[j] = v.ub;
        cost_[j] = model.objective()[j] * cscale;
    }
    for (int i = 0; i < m_; ++i) {
        lower_[n_ + i] = model.constraints()[i].lo;
        upper_[n_ + i] = model.constraints()[i].hi;
    }

    head_.resize(m_);
    for (int i = 0; i < m_; ++i) {
        head_[i] = n_ + i;
    }
    nonbasic_.resize(n_);
    at_upper_.assign(n_, 0);
    for (int j = 0; j < n_; ++j) {
        nonbasic_[j] = j;
        at_upper_[j] = cost_[j] > 0.0;
    }
    t_ = a_;
    d_.resize(n_);
    for (int j = 0; j < n_; ++j) {
        d_[j] = cost_[j];
    }
    xb_.resize(m_);
}

void DualSimplex::set_column_bounds(int var, double lb, double ub) {
    lower_[var] = lb;
    upper_[var] = ub;
}

double DualSimplex::nonbasic_value(int col) const {
    const int v = nonbasic_[col];
    return at_upper_[col] ? upper_[v] : lower_[v];
}

std::string DualSimplex::var_name(int var) const {
    if (var < n_) {
        return model_.variables()[var].name;
    }
    return "row " + model_.constraints()[var - n_].name;
}

void DualSimplex::refactor() {
    if (m_ > 0) {
        Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m_, m_);
        Eigen::MatrixXd nmat = Eigen::MatrixXd::Zero(m_, n_);
        auto fill = [&](Eigen::Ref<Eigen::VectorXd> col, int var) {
            if (var < n_) {
                col = a_.col(var);
            } else {
                col.setZero();
                col[var - n_] = -1.0;
            }
        };
        for (int i = 0; i < m_; ++i) {
            fill(b.col(i), head_[i]);
        }
        for (int j = 0; j < n_; ++j) {
            fill(nmat.col(j), nonbasic_[j]);
        }
        t_ = -b.partialPivLu().solve(nmat);
    }
    Eigen::VectorXd cb(m_);
    for (int i = 0; i < m_; ++i) {
        cb[i] = cost_[head_[i]];
    }
    for (int j = 0; j < n_; ++j) {
        d_[j] = cost_[nonbasic_[j]];
    }
    if (m_ > 0) {
        d_.noalias() += t_.transpose() * cb;
    }
    pivots_since_refactor_ = 0;
}

void DualSimplex::sync_nonbasic_flags() {
    for (int j = 0; j < n_; ++j) {
        if (d_[j] > kDualTol) {
            at_upper_[j] = 1;
        } else if (d_[j] < -kDualTol) {
            at_upper_[j] = 0;
        }
        const int v = nonbasic_[j];
        // A logical can only rest at a finite bound.
        if (at_upper_[j] && !std::isfinite(upper_[v])) {
            at_upper_[j] = 0;
        } else if (!at_upper_[j] && !std::isfinite(lower_[v])) {
            at_upper_[j] = 1;
        }
    }
}

void DualSimplex::recompute_basic_values() {
    Eigen::VectorXd xn(n_);
    for (int j = 0; j < n_; ++j) {
        xn[j] = nonbasic_value(j);
    }
    xb_.noalias() = t_ * xn;
}

double DualSimplex::primal_residual() const {
    std::vector<double> y(n_ + m_, 0.0);
    for (int j = 0; j < n_; ++j) {
        y[nonbasic_[j]] = nonbasic_value(j);
    }
    for (int i = 0; i < m_; ++i) {
        y[head_[i]] = xb_[i];
    }
    double worst = 0.0;
    for (int i = 0; i < m_; ++i) {
        double s = 0.0;
        for (const auto& t : model_.constraints()[i].terms) {
            s += t.coef * y[t.var];
        }
        worst = std::max(worst, std::abs(s - y[n_ + i]) / (1.0 + std::abs(s)));
    }
    return worst;
}

LpResult DualSimplex::solve(long max_iterations) {
    LpResult result;
    sync_nonbasic_flags();
    recompute_basic_values();

    bool refactored_for_accuracy = false;
    for (;;) {
        // Leaving row: largest bound violation, lowest row on ties.
        int r = -1;
        double worst = 0.0;
        bool to_lower = false;
        for (int i = 0; i < m_; ++i) {
            const int v = head_[i];
            const double lo_gap = lower_[v] - xb_[i];
            const double hi_gap = xb_[i] - upper_[v];
            const double tol = kPrimalTol * (1.0 + std::abs(xb_[i]));
            if (lo_gap > tol && lo_gap > worst) {
                worst = lo_gap;
                r = i;
                to_lower = true;
            } else if (hi_gap > tol && hi_gap > worst) {
                worst = hi_gap;
                r = i;
                to_lower = false;
            }
        }
        if (r < 0) {
            if (!refactored_for_accuracy && primal_residual() > 1e-9) {
                refactor();
                recompute_basic_values();
                refactored_for_accuracy = true;
                continue;
            }
            break;
        }
        if (result.iterations >= max_iterations) {
            throw std::runtime_error(
                fmt::format("dual simplex stalled after {} iterations", result.iterations));
        }

        // Entering column by a two-pass (Harris) ratio test.
        const double dir = to_lower ? 1.0 : -1.0;  // required sign of the change of x_B[r]
        double theta_max = std::numeric_limits<double>::infinity();
        for (int j = 0; j < n_; ++j) {
            const int v = nonbasic_[j];
            if (lower_[v] == upper_[v]) {
                continue;
            }
            const double alpha = dir * t_(r, j);
            double dj;
            if (!at_upper_[j] && alpha > kPivotTol) {
                dj = std::max(0.0, -d_[j]);
            } else if (at_upper_[j] && alpha < -kPivotTol) {
                dj = std::max(0.0, d_[j]);
            } else {
                continue;
            }
            theta_max = std::min(theta_max, (dj + kDualTol) / std::abs(alpha));
        }
        if (!std::isfinite(theta_max)) {
            result.status = LpResult::Status::Infeasible;
            result.conflict.push_back(var_name(head_[r]));
            for (int j = 0; j < n_ && result.conflict.size() < 12; ++j) {
                if (std::abs(t_(r, j)) > kPivotTol) {
                    result.conflict.push_back(var_name(nonbasic_[j]));
                }
            }
            return result;
        }
        int q = -1;
        double best_alpha = 0.0;
        for (int j = 0; j < n_; ++j) {
            const int v = nonbasic_[j];
            if (lower_[v] == upper_[v]) {
                continue;
            }
            const double alpha = dir * t_(r, j);
            double dj;
            if (!at_upper_[j] && alpha > kPivotTol) {
                dj = std::max(0.0, -d_[j]);
            } else if (at_upper_[j] && alpha < -kPivotTol) {
                dj = std::max(0.0, d_[j]);
            } else {
                continue;
            }
            if (dj / std::abs(alpha) <= theta_max && std::abs(alpha) > best_alpha) {
                best_alpha = std::abs(alpha);
                q = j;
            }
        }

        const int leaving = head_[r];
        const int entering = nonbasic_[q];
        const double target = to_lower ? lower_[leaving] : upper_[leaving];
        const double p = t_(r, q);
        const double step = (target - xb_[r]) / p;
        const double entering_value = nonbasic_value(q) + step;

        xb_.noalias() += step * t_.col(q);

        const Eigen::VectorXd col = t_.col(q);
        const Eigen::RowVectorXd row = t_.row(r);
        t_.noalias() -= col * (row / p);
        t_.col(q) = col / p;
        t_.row(r) = -row / p;
        t_(r, q) = 1.0 / p;

        const double dq = d_[q];
        d_ -= (dq / p) * row.transpose();
        d_[q] = dq / p;

        head_[r] = entering;
        xb_[r] = entering_value;
        nonbasic_[q] = leaving;
        at_upper_[q] = to_lower ? 0 : 1;

        ++result.iterations;
        if (++pivots_since_refactor_ >= kRefactorInterval) {
            refactor();
            recompute_basic_values();
        }
    }

    result.status = LpResult::Status::Optimal;
    std::vector<double> y(n_ + m_, 0.0);
    for (int j = 0; j < n_; ++j) {
        y[nonbasic_[j]] = nonbasic_value(j);
    }
    for (int i = 0; i < m_; ++i) {
        y[head_[i]] = xb_[i];
    }
    result.x.assign(y.begin(), y.begin() + n_);
    for (int j = 0; j < n_; ++j) {
        result.x[j] = std::clamp(result.x[j], lower_[j], upper_[j]);
    }
    result.objective = model_.objective_value(result.x);
    return result;
}

namespace {

struct BoundChange {
    int var;
    double lb;
    double ub;
};

struct Node {
    std::vector<BoundChange> changes;
    double bound = 0.0;
    long id = 0;
};

struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
        if (a.bound != b.bound) {
            return a.bound < b.bound;
        }
        return a.id > b.id;
    }
};

}  // namespace

MilpSolution BundledBackend::solve(const MilpModel& model, const SolveOptions& options) {
    model.validate();
    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };

    const int n = static_cast<int>(model.num_variables());
    for (const auto& c : model.constraints()) {
        if (c.terms.empty() && (c.lo > 1e-9 || c.hi < -1e-9)) {
            throw InfeasibleModelError(fmt::format("constraint '{}' is empty but unsatisfiable", c.name),
                                       {c.name});
        }
    }

    DualSimplex lp(model);
    std::vector<double> root_lb(n), root_ub(n);
    for (int j = 0; j < n; ++j) {
        root_lb[j] = model.variables()[j].lb;
        root_ub[j] = model.variables()[j].ub;
    }

    MilpSolution best;
    best.backend = name();
    bool have_incumbent = false;
    double incumbent = -std::numeric_limits<double>::infinity();
    auto prune_level = [&] {
        return incumbent + options.relative_gap * std::max(1.0, std::abs(incumbent));
    };

    // Depth-first until the first incumbent, best bound afterwards.
    std::vector<Node> open;
    auto best_open = [&]() -> std::size_t {
        std::size_t k = 0;
        for (std::size_t i = 1; i < open.size(); ++i) {
            if (NodeOrder{}(open[k], open[i])) {
                k = i;
            }
        }
        return k;
    };
    auto open_bound = [&] {
        double b = -std::numeric_limits<double>::infinity();
        for (const auto& nd : open) {
            b = std::max(b, nd.bound);
        }
        return b;
    };
    long next_id = 1;
    Node current;
    current.bound = std::numeric_limits<double>::infinity();
    bool have_current = true;
    double root_bound = std::numeric_limits<double>::infinity();

    for (;;) {
        if (!have_current) {
            if (open.empty()) {
                break;
            }
            if (have_incumbent && open_bound() <= prune_level()) {
                break;
            }
            const std::size_t pick = have_incumbent ? best_open() : open.size() - 1;
            current = std::move(open[pick]);
            open.erase(open.begin() + static_cast<std::ptrdiff_t>(pick));
        }
        have_current = false;

        if (elapsed() > options.time_limit) {
            const double bound = std::max(open.empty() ? incumbent : open_bound(), current.bound);
            if (have_incumbent) {
                const double gap = (bound - incumbent) / std::max(1.0, std::abs(incumbent));
                throw SolverTimeoutError(fmt::format(
                    "time limit of {} s reached with gap {:.3g} above the requested {:.3g}",
                    options.time_limit, gap, options.relative_gap));
            }
            throw SolverTimeoutError(
                fmt::format("time limit of {} s reached before any integer solution", options.time_limit));
        }

        for (int j = 0; j < n; ++j) {
            lp.set_column_bounds(j, root_lb[j], root_ub[j]);
        }
        for (const auto& c : current.changes) {
            lp.set_column_bounds(c.var, c.lb, c.ub);
        }
        const LpResult res = lp.solve();
        best.lp_iterations += res.iterations;
        ++best.nodes;
        if (options.verbose && best.nodes % 200 == 0) {
            fmt::print(stderr, "nodes {:7d}  open {:6d}  depth {:4d}  lp {:12.4f}  incumbent {:12.4f}  iters {}  {:.1f} s\n",
                       best.nodes, open.size(), current.changes.size(),
                       res.status == LpResult::Status::Optimal ? res.objective : -1.0, incumbent,
                       best.lp_iterations, elapsed());
        }

        if (res.status == LpResult::Status::Infeasible) {
            if (current.changes.empty()) {
                throw InfeasibleModelError("model is infeasible (LP relaxation has no solution)",
                                           res.conflict);
            }
            continue;
        }
        if (current.changes.empty()) {
            root_bound = res.objective;
        }
        if (have_incumbent && res.objective <= prune_level()) {
            continue;
        }

        int branch_var = -1;
        double best_frac = 0.0;
        for (int j = 0; j < n; ++j) {
            if (!model.variables()[j].is_integer()) {
                continue;
            }
            const double f = res.x[j] - std::floor(res.x[j]);
            const double dist = std::min(f, 1.0 - f);
            if (dist > kIntegralityTol && dist > best_frac + 1e-12) {
                best_frac = dist;
                branch_var = j;
            }
        }

        if (branch_var < 0) {
            if (res.objective > incumbent) {
                incumbent = res.objective;
                have_incumbent = true;
                best.values = res.x;
                for (int j = 0; j < n; ++j) {
                    if (model.variables()[j].is_integer()) {
                        best.values[j] = std::round(best.values[j]);
                    }
                }
            }
            continue;
        }

        const double value = res.x[branch_var];
        const double lb = lp.column_lower(branch_var);
        const double ub = lp.column_upper(branch_var);
        Node down{current.changes, res.objective, next_id++};
        down.changes.push_back({branch_var, lb, std::floor(value)});
        Node up{current.changes, res.objective, next_id++};
        up.changes.push_back({branch_var, std::ceil(value), ub});
        if (value - std::floor(value) >= 0.5) {
            open.push_back(std::move(down));
            current = std::move(up);
        } else {
            open.push_back(std::move(up));
            current = std::move(down);
        }
        have_current = true;
    }

    if (!have_incumbent) {
        throw InfeasibleModelError("model has no integer-feasible solution",
                                   {"the LP relaxation is feasible but every branch was infeasible"});
    }
    best.status = SolveStatus::Optimal;
    best.objective = model.objective_value(best.values);
    const double remaining = open.empty() ? incumbent : std::max(open_bound(), incumbent);
    best.bound = std::min(remaining, root_bound);
    best.bound = std::max(best.bound, best.objective);
    best.gap = (best.bound - best.objective) / std::max(1.0, std::abs(best.objective));
    best.seconds = elapsed();
    return best;
}

}  // namespace p2h
