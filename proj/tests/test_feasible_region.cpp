#include "p2h/bundled_solver.hpp"
#include "p2h/feasible_region.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace p2h;
using p2h::oracles::rules_admit;

namespace {

const ElectrolyzerSpec kSpec{};
// 2-unit plant at 10 kV / 200 MVA: plant limits 9.0 A (h23), 8.2 A (h25).
constexpr double kLimit23 = 9.0;
constexpr double kLimit25 = 8.2;

double pair_sum(int h, double i1, double i2) {
    return std::abs(harmonic_at_current(kSpec, i1, h).value + harmonic_at_current(kSpec, i2, h).value);
}

const OrderThresholds& fitted(int h) {
    static const OrderThresholds t23 = derive_order_thresholds(kSpec, 23, kLimit23, 2);
    static const OrderThresholds t25 = derive_order_thresholds(kSpec, 25, kLimit25, 2);
    return h == 23 ? t23 : t25;
}

}  // namespace

TEST_CASE("pair grid") {
    const auto inf = sweep_pair(kSpec, 23, std::numeric_limits<double>::infinity(), 100.0);
    CHECK(inf.infeasible_count() == 0);
    CHECK(inf.axis.front() == doctest::Approx(2000.0));
    CHECK(inf.axis.back() == doctest::Approx(7000.0));

    const auto g = sweep_pair(kSpec, 23, kLimit23, 50.0);
    CHECK(g.symmetric());
    CHECK(g.infeasible_count() > 0);
    for (std::size_t i = 0; i < g.size(); i += 7) {
        for (std::size_t j = 0; j < g.size(); j += 5) {
            const double m = pair_sum(23, g.axis[i], g.axis[j]);
            CHECK(g.mag(i, j) == doctest::Approx(m).epsilon(1e-12));
            CHECK(g.is_feasible(i, j) == (m <= kLimit23));
        }
    }
}

TEST_CASE("infeasible set is connected") {
    const auto g = sweep_pair(kSpec, 23, kLimit23, 50.0);
    const auto n = g.size();
    std::vector<char> seen(n * n, 0);
    std::size_t start = n * n;
    for (std::size_t k = 0; k < n * n && start == n * n; ++k) {
        if (!g.feasible[k]) {
            start = k;
        }
    }
    REQUIRE(start < n * n);
    std::vector<std::size_t> stack{start};
    seen[start] = 1;
    std::size_t reached = 0;
    while (!stack.empty()) {
        const auto k = stack.back();
        stack.pop_back();
        ++reached;
        const long i = static_cast<long>(k / n), j = static_cast<long>(k % n);
        for (auto [di, dj] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
            const long a = i + di, b = j + dj;
            if (a < 0 || b < 0 || a >= static_cast<long>(n) || b >= static_cast<long>(n)) {
                continue;
            }
            const auto kk = static_cast<std::size_t>(a) * n + static_cast<std::size_t>(b);
            if (!g.feasible[kk] && !seen[kk]) {
                seen[kk] = 1;
                stack.push_back(kk);
            }
        }
    }
    CHECK(reached == g.infeasible_count());
}

TEST_CASE("cancellation pair is feasible at small limits") {
    const double single = std::max(harmonic_at_current(kSpec, 3000.0, 23).magnitude(),
                                   harmonic_at_current(kSpec, 4900.0, 23).magnitude());
    const auto g = sweep_pair(kSpec, 23, 0.05 * single, 100.0);
    const auto i = static_cast<std::size_t>((3000.0 - 2000.0) / 100.0);
    const auto j = static_cast<std::size_t>((4900.0 - 2000.0) / 100.0);
    CHECK(g.is_feasible(i, j));
    CHECK(g.is_feasible(j, i));
}

TEST_CASE("vacuous fit") {
    const auto g = sweep_pair(kSpec, 23, 1e6, 100.0);
    const auto t = fit_hexagon_thresholds(g);
    CHECK(t.vacuous);
    CHECK(t.delta_i_m == 0.0);
    CHECK(rules_admit(t, 4000.0, 4000.0));
}

TEST_CASE("fitted rules are sound") {
    for (int h : {23, 25}) {
        const auto& t = fitted(h);
        const double limit = h == 23 ? kLimit23 : kLimit25;
        CHECK_FALSE(t.vacuous);
        CHECK(t.delta_i_m > 0.0);
        CHECK(t.medium.lo >= t.i_min);
        CHECK(t.medium.hi <= t.i_max);
        CHECK(t.medium.lo < t.medium.hi);
        CHECK(t.pair_limit == doctest::Approx(limit));
        const int n = 100;
        std::size_t false_feasible = 0, admitted = 0;
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                const double i1 = 2000.0 + 5000.0 * a / (n - 1);
                const double i2 = 2000.0 + 5000.0 * b / (n - 1);
                if (rules_admit(t, i1, i2)) {
                    ++admitted;
                    CHECK(t.admits(i1, i2));
                    if (pair_sum(h, i1, i2) > limit) {
                        ++false_feasible;
                    }
                }
            }
        }
        CHECK(false_feasible == 0);
        CHECK(admitted > n * n / 2);
        const auto rep = verify_rules(kSpec, t, 100);
        CHECK(rep.false_feasible == 0);
        CHECK(rep.points == 10000);
    }
}

TEST_CASE("auto-comply count") {
    const double peak = max_harmonic_magnitude(kSpec, 23);
    double scan = 0.0;
    for (double i = 2000.0; i <= 7000.0; i += 1.0) {
        scan = std::max(scan, harmonic_at_current(kSpec, i, 23).magnitude());
    }
    CHECK(peak >= scan - 1e-9);
    CHECK(peak <= scan * (1.0 + 1e-6));
    CHECK(compute_auto_comply_count(kSpec, 23, 0.0) == 0);
    CHECK(compute_auto_comply_count(kSpec, 23, peak) == 1);
    CHECK(compute_auto_comply_count(kSpec, 23, 0.999 * peak) == 0);
    int prev = 0;
    for (double limit = 0.5; limit < 200.0; limit *= 1.3) {
        const int n = compute_auto_comply_count(kSpec, 23, limit);
        CHECK(n == static_cast<int>(std::floor(limit / peak)));
        CHECK(n >= prev);
        CHECK(compute_auto_comply_count(kSpec, 23, 2.0 * limit) >= 2 * n);
        prev = n;
    }
    CHECK(fitted(23).n_bar == static_cast<int>(std::floor(kLimit23 / peak)));
}

TEST_CASE("single unit above the pair limit cannot be fitted") {
    CHECK_THROWS_AS(derive_order_thresholds(kSpec, 23, 1.0, 2), RegionFitError);
}

TEST_CASE("high-harmonic intervals") {
    const double peak = max_harmonic_magnitude(kSpec, 47);
    const auto ranges = high_harmonic_intervals(kSpec, 47, 0.8 * peak, 10.0);
    REQUIRE_FALSE(ranges.empty());
    for (const auto& r : ranges) {
        const double mid = 0.5 * (r.lo + r.hi);
        CHECK(harmonic_at_current(kSpec, mid, 47).magnitude() > 0.8 * peak);
    }
    CHECK(high_harmonic_intervals(kSpec, 47, 2.0 * peak, 10.0).empty());
}

namespace {

struct Probe {
    MilpModel model;
    std::vector<int> on, cur;
    RuleBlock block;
};

// Units with fixed states and currents in A (0 means off); the model works in kA.
Probe probe(const OrderThresholds& t, const std::vector<double>& currents) {
    Probe p;
    std::vector<RuleUnit> units;
    LinearExpr total;
    for (std::size_t n = 0; n < currents.size(); ++n) {
        const auto id = std::to_string(n);
        const bool on = currents[n] > 0.0;
        p.on.push_back(p.model.add_binary("on" + id));
        p.cur.push_back(p.model.add_variable("i" + id, 0.0, 7.0));
        p.model.add_le("max" + id, LinearExpr().add(p.cur[n]).add(p.on[n], -7.0), 0.0);
        p.model.add_ge("min" + id, LinearExpr().add(p.cur[n]).add(p.on[n], -2.0), 0.0);
        p.model.set_bounds(p.on[n], on ? 1.0 : 0.0, on ? 1.0 : 0.0);
        if (on) {
            p.model.set_bounds(p.cur[n], currents[n] / 1e3, currents[n] / 1e3);
        }
        units.push_back({p.on[n], LinearExpr().add(p.cur[n])});
        total.add(p.cur[n]);
    }
    p.block = emit_milp_rules(p.model, t, units, 1e3, "probe");
    p.model.set_objective(total);
    return p;
}

bool feasible(const MilpModel& m, std::vector<double>* x = nullptr) {
    BundledBackend solver;
    try {
        const auto sol = solver.solve(m, SolveOptions{});
        if (x) {
            *x = sol.values;
        }
        return true;
    } catch (const InfeasibleModelError&) {
        return false;
    }
}

}  // namespace

TEST_CASE("emitted rules match the interval/offset rules") {
    const auto& t = fitted(23);
    REQUIRE(t.n_bar < 2);
    for (double i1 = 2007.0; i1 <= 7000.0; i1 += 413.0) {
        for (double i2 = 2011.0; i2 <= 7000.0; i2 += 397.0) {
            const auto p = probe(t, {i1, i2});
            CHECK_MESSAGE(feasible(p.model) == rules_admit(t, i1, i2), "I1 = " << i1 << ", I2 = " << i2);
        }
    }
}

TEST_CASE("offset holds inside the medium interval") {
    const auto& t = fitted(25);
    const double mid = 0.5 * (t.medium.lo + t.medium.hi);
    CHECK_FALSE(feasible(probe(t, {mid, mid + 0.5 * t.delta_i_m}).model));
    if (mid + t.delta_i_m + 1.0 < t.medium.hi) {
        CHECK(feasible(probe(t, {mid, mid + t.delta_i_m + 1.0}).model));
    }
}

TEST_CASE("mitigation is gated by the auto-comply count") {
    auto t = fitted(23);
    t.n_bar = 2;
    const double mid = 0.5 * (t.medium.lo + t.medium.hi);
    const double low = t.low.enabled ? t.i_min : mid + t.delta_i_m;
    const auto gated = probe(t, {mid, mid, 0.0, 0.0});
    std::vector<double> x;
    REQUIRE(gated.block.z >= 0);
    REQUIRE(feasible(gated.model, &x));
    CHECK(x[gated.block.z] == doctest::Approx(0.0));
    const auto active = probe(t, {mid, mid, low, 0.0});
    CHECK_FALSE(feasible(active.model));
    const auto spread = probe(t, {mid, mid + t.delta_i_m + 1.0, low, 0.0});
    if (mid + t.delta_i_m + 1.0 < t.medium.hi) {
        REQUIRE(feasible(spread.model, &x));
        CHECK(x[spread.block.z] == doctest::Approx(1.0));
    }
    t.n_bar = 4;
    CHECK(probe(t, {mid, mid, mid, mid}).block.z == -1);
}

TEST_CASE("an idle unit has no current and no interval") {
    const auto& t = fitted(23);
    const double mid = 0.5 * (t.medium.lo + t.medium.hi);
    const auto p = probe(t, {mid, 0.0});
    std::vector<double> x;
    REQUIRE(feasible(p.model, &x));
    CHECK(x[p.cur[1]] == doctest::Approx(0.0));
    REQUIRE(p.block.interval_binaries.size() == 6);
    double first = 0.0, second = 0.0;
    for (int k = 0; k < 3; ++k) {
        first += x[p.block.interval_binaries[k]];
        second += x[p.block.interval_binaries[3 + k]];
    }
    CHECK(first == doctest::Approx(1.0));
    CHECK(second == doctest::Approx(0.0));
}

TEST_CASE("thresholds round-trip") {
    RegionThresholds r;
    r.orders = {fitted(23), fitted(25)};
    const auto back = thresholds_from_json(thresholds_to_json(r));
    REQUIRE(back.orders.size() == 2);
    for (std::size_t k = 0; k < 2; ++k) {
        const auto& a = r.orders[k];
        const auto& b = back.orders[k];
        CHECK(a.order == b.order);
        CHECK(a.medium.lo == b.medium.lo);
        CHECK(a.medium.hi == b.medium.hi);
        CHECK(a.low.enabled == b.low.enabled);
        CHECK(a.high.enabled == b.high.enabled);
        CHECK(a.delta_i_m == b.delta_i_m);
        CHECK(a.n_bar == b.n_bar);
        CHECK(a.pair_limit == b.pair_limit);
    }
    CHECK(thresholds_to_json(back) == thresholds_to_json(r));
    CHECK_THROWS(thresholds_from_json("{\"format\": \"other\"}"));
}

TEST_CASE("pair grid csv") {
    const auto g = sweep_pair(kSpec, 25, kLimit25, 100.0);
    const auto csv = pair_grid_csv(g);
    const auto lines = std::count(csv.begin(), csv.end(), '\n');
    CHECK(lines == static_cast<long>(g.size() * g.size() + 1));
}
