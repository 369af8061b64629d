#include "p2h/feasible_region.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace p2h {

namespace {

std::vector<double> current_axis(double lo, double hi, double step) {
    std::vector<double> axis;
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
    for (std::size_t k = 0; k <= n; ++k) {
        axis.push_back(lo + static_cast<double>(k) * step);
    }
    if (hi - axis.back() > 1e-9) {
        axis.push_back(hi);
    }
    return axis;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k) {
        v[k] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    }
    return v;
}

std::vector<std::complex<double>> phasors_on(const ElectrolyzerSpec& spec, int h, const std::vector<double>& axis) {
    std::vector<std::complex<double>> p(axis.size());
    for (std::size_t k = 0; k < axis.size(); ++k) {
        p[k] = harmonic_at_current(spec, axis[k], h).value;
    }
    return p;
}

void widen(OrderThresholds& t, double step) {
    t.medium.lo -= step;
    if (t.medium.lo <= t.i_min) {
        t.medium.lo = t.i_min;
        t.low.enabled = false;
    }
    t.medium.hi += step;
    if (t.medium.hi >= t.i_max) {
        t.medium.hi = t.i_max;
        t.high.enabled = false;
    }
    t.low = {t.i_min, t.medium.lo, t.low.enabled};
    t.high = {t.medium.hi, t.i_max, t.high.enabled};
    t.delta_i_m += step;
}

VerificationReport verify_on(const std::vector<double>& axis, const std::vector<std::complex<double>>& p,
                             const OrderThresholds& t) {
    VerificationReport rep;
    for (std::size_t i = 0; i < axis.size(); ++i) {
        for (std::size_t j = 0; j < axis.size(); ++j) {
            ++rep.points;
            const bool feasible = std::abs(p[i] + p[j]) <= t.pair_limit;
            const bool admitted = t.admits(axis[i], axis[j]);
            rep.infeasible += feasible ? 0 : 1;
            rep.admitted += admitted ? 1 : 0;
            rep.false_feasible += (admitted && !feasible) ? 1 : 0;
        }
    }
    return rep;
}

}  // namespace

bool OrderThresholds::admits(double i1, double i2) const {
    if (vacuous) {
        return true;
    }
    auto forced_medium = [&](double i) {
        const bool above = !low.enabled || i > medium.lo;
        const bool below = !high.enabled || i < medium.hi;
        return above && below;
    };
    return !(forced_medium(i1) && forced_medium(i2) && std::abs(i1 - i2) < delta_i_m);
}

const OrderThresholds* RegionThresholds::find(int h) const {
    for (const auto& o : orders) {
        if (o.order == h) {
            return &o;
        }
    }
    return nullptr;
}

bool PairGrid::symmetric() const {
    const auto n = axis.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (is_feasible(i, j) != is_feasible(j, i)) {
                return false;
            }
        }
    }
    return true;
}

std::size_t PairGrid::infeasible_count() const {
    return static_cast<std::size_t>(std::count(feasible.begin(), feasible.end(), std::uint8_t{0}));
}

PairGrid sweep_pair(const ElectrolyzerSpec& spec, int h, double pair_limit, double resolution) {
    if (!(pair_limit > 0.0)) {
        throw std::invalid_argument("sweep_pair: pair_limit must be positive");
    }
    if (!(resolution > 0.0) || resolution > 100.0) {
        throw std::invalid_argument("sweep_pair: resolution must lie in (0, 100] A");
    }
    PairGrid g;
    g.order = h;
    g.pair_limit = pair_limit;
    g.axis = current_axis(spec.i_min, spec.i_max, resolution);
    const auto p = phasors_on(spec, h, g.axis);
    const auto n = g.axis.size();
    g.magnitude.resize(n * n);
    g.feasible.resize(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            // Same operands in the same order for (i,j) and (j,i): exact symmetry.
            const auto sum = i <= j ? p[i] + p[j] : p[j] + p[i];
            const double m = std::abs(sum);
            g.magnitude[i * n + j] = m;
            g.feasible[i * n + j] = m <= pair_limit ? 1 : 0;
        }
    }
    return g;
}

OrderThresholds fit_hexagon_thresholds(const PairGrid& grid) {
    if (grid.axis.size() < 2) {
        throw RegionFitError("fit_hexagon_thresholds: degenerate grid");
    }
    OrderThresholds t;
    t.order = grid.order;
    t.pair_limit = grid.pair_limit;
    t.i_min = grid.axis.front();
    t.i_max = grid.axis.back();
    t.resolution = grid.axis[1] - grid.axis[0];

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    double spread = 0.0;
    const auto n = grid.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (grid.is_feasible(i, j)) {
                continue;
            }
            lo = std::min({lo, grid.axis[i], grid.axis[j]});
            hi = std::max({hi, grid.axis[i], grid.axis[j]});
            spread = std::max(spread, std::abs(grid.axis[i] - grid.axis[j]));
        }
    }
    if (!std::isfinite(lo)) {
        t.vacuous = true;
        t.low = {t.i_min, t.i_min, false};
        t.medium = {t.i_min, t.i_max, true};
        t.high = {t.i_max, t.i_max, false};
        t.delta_i_m = 0.0;
        return t;
    }
    // One grid step of margin on every side keeps the rules sound between
    // grid points.
    t.medium = {lo, hi, true};
    t.low.enabled = true;
    t.high.enabled = true;
    t.delta_i_m = spread;
    widen(t, t.resolution);
    return t;
}

double max_harmonic_magnitude(const ElectrolyzerSpec& spec, int h) {
    const auto axis = current_axis(spec.i_min, spec.i_max, 1.0);
    double best = 0.0;
    double arg = spec.i_min;
    for (double i : axis) {
        const double m = harmonic_at_current(spec, i, h).magnitude();
        if (m > best) {
            best = m;
            arg = i;
        }
    }
    // Golden-section polish inside the bracketing samples.
    double a = std::max(spec.i_min, arg - 1.0);
    double b = std::min(spec.i_max, arg + 1.0);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int k = 0; k < 40; ++k) {
        const double c = b - g * (b - a);
        const double d = a + g * (b - a);
        if (harmonic_at_current(spec, c, h).magnitude() > harmonic_at_current(spec, d, h).magnitude()) {
            b = d;
        } else {
            a = c;
        }
    }
    return std::max(best, harmonic_at_current(spec, 0.5 * (a + b), h).magnitude());
}

int compute_auto_comply_count(const ElectrolyzerSpec& spec, int h, double limit) {
    if (!(limit > 0.0)) {
        return 0;
    }
    const double m = max_harmonic_magnitude(spec, h);
    if (m <= 0.0) {
        return std::numeric_limits<int>::max();
    }
    const double n = std::floor(limit / m);
    return n >= static_cast<double>(std::numeric_limits<int>::max()) ? std::numeric_limits<int>::max()
                                                                       : static_cast<int>(n);
}

VerificationReport verify_rules(const ElectrolyzerSpec& spec, const OrderThresholds& t, std::size_t n_points) {
    const auto axis = linspace(spec.i_min, spec.i_max, n_points);
    return verify_on(axis, phasors_on(spec, t.order, axis), t);
}

OrderThresholds derive_order_thresholds(const ElectrolyzerSpec& spec, int h, double plant_limit, int n_elz,
                                        const RegionOptions& options) {
    if (n_elz < 2 || n_elz % 2 != 0) {
        throw std::invalid_argument("derive_order_thresholds: the unit count must be even and at least 2");
    }
    const double pair_limit = 2.0 * plant_limit / n_elz;
    const double single = max_harmonic_magnitude(spec, h);
    if (single > pair_limit) {
        throw RegionFitError(fmt::format(
            "order {}: one unit alone reaches {:.3f} A, above the pair limit {:.3f} A; pair rules cannot "
            "represent the region",
            h, single, pair_limit));
    }
    const auto grid = sweep_pair(spec, h, pair_limit, options.resolution);
    auto t = fit_hexagon_thresholds(grid);

    const auto coarse = linspace(spec.i_min, spec.i_max, options.verification_points);
    const auto fine = linspace(spec.i_min, spec.i_max, options.fine_verification_points);
    const auto pc = phasors_on(spec, h, coarse);
    const auto pf = phasors_on(spec, h, fine);
    int widened = 0;
    while (!t.vacuous && (verify_on(coarse, pc, t).false_feasible > 0 || verify_on(fine, pf, t).false_feasible > 0)) {
        if (++widened > 40) {
            throw RegionFitError(fmt::format("order {}: could not reach a sound rule set", h));
        }
        widen(t, 0.5 * options.resolution);
    }
    t.n_bar = compute_auto_comply_count(spec, h, plant_limit);
    return t;
}

std::vector<CurrentInterval> high_harmonic_intervals(const ElectrolyzerSpec& spec, int h, double threshold,
                                                     double resolution) {
    const auto axis = current_axis(spec.i_min, spec.i_max, resolution);
    std::vector<CurrentInterval> out;
    bool inside = false;
    for (std::size_t k = 0; k < axis.size(); ++k) {
        const bool over = harmonic_at_current(spec, axis[k], h).magnitude() > threshold;
        if (over && !inside) {
            out.push_back({k == 0 ? axis[0] : axis[k - 1], axis[k], true});
            inside = true;
        } else if (over) {
            out.back().hi = axis[k];
        } else if (inside) {
            out.back().hi = axis[k];
            inside = false;
        }
    }
    return out;
}

RuleBlock emit_milp_rules(MilpModel& model, const OrderThresholds& t, std::span<const RuleUnit> units,
                          double amps_per_unit, const std::string& tag) {
    if (units.size() % 2 != 0) {
        throw std::invalid_argument("emit_milp_rules: units must come in pairs");
    }
    RuleBlock block;
    const int n = static_cast<int>(units.size());
    if (t.vacuous || t.n_bar >= n || n == 0) {
        return block;
    }
    const double s = 1.0 / amps_per_unit;
    const double i_min = t.i_min * s;
    const double i_max = t.i_max * s;
    const double m_lo = t.medium.lo * s;
    const double m_hi = t.medium.hi * s;
    const double delta = t.delta_i_m * s;
    const double big_m = delta + i_max;

    // z = 1 exactly when more than n_bar units are on.
    block.z = model.add_binary(fmt::format("z[{},{}]", t.order, tag));
    LinearExpr count;
    for (const auto& u : units) {
        count.add(u.on);
    }
    model.add_le(fmt::format("gate_hi[{},{}]", t.order, tag), LinearExpr(count).add(block.z, -(n - t.n_bar)),
                 t.n_bar);
    model.add_ge(fmt::format("gate_lo[{},{}]", t.order, tag), LinearExpr(count).add(block.z, -(t.n_bar + 1.0)),
                 0.0);

    for (int k = 0; k < n; ++k) {
        const auto& u = units[k];
        const std::string id = fmt::format("{},{},{}", t.order, tag, k);
        const int bl = model.add_binary(fmt::format("bL[{}]", id));
        const int bm = model.add_binary(fmt::format("bM[{}]", id));
        const int bh = model.add_binary(fmt::format("bH[{}]", id));
        if (!t.low.enabled) {
            model.set_bounds(bl, 0.0, 0.0);
        }
        if (!t.high.enabled) {
            model.set_bounds(bh, 0.0, 0.0);
        }
        block.interval_binaries.insert(block.interval_binaries.end(), {bl, bm, bh});
        model.add_eq(fmt::format("interval[{}]", id), LinearExpr().add(bl).add(bm).add(bh).add(u.on, -1.0), 0.0);
        model.add_le(fmt::format("interval_hi[{}]", id),
                     LinearExpr(u.current).add(bl, -m_lo).add(bm, -m_hi).add(bh, -i_max), 0.0);
        model.add_ge(fmt::format("interval_lo[{}]", id),
                     LinearExpr(u.current).add(bl, -i_min).add(bm, -m_lo).add(bh, -m_hi), 0.0);
    }

    for (int p = 0; p < n / 2; ++p) {
        const int a = 2 * p;
        const int b = 2 * p + 1;
        const std::string id = fmt::format("{},{},{}", t.order, tag, p);
        const int bm1 = block.interval_binaries[3 * a + 1];
        const int bm2 = block.interval_binaries[3 * b + 1];
        const int omega = model.add_binary(fmt::format("omega[{}]", id));
        const int order = model.add_binary(fmt::format("ord[{}]", id));
        block.both_medium.push_back(omega);
        block.ordering.push_back(order);
        model.add_ge(fmt::format("omega_and[{}]", id), LinearExpr().add(omega).add(bm1, -1.0).add(bm2, -1.0), -1.0);
        model.add_le(fmt::format("omega_1[{}]", id), LinearExpr().add(omega).add(bm1, -1.0), 0.0);
        model.add_le(fmt::format("omega_2[{}]", id), LinearExpr().add(omega).add(bm2, -1.0), 0.0);

        LinearExpr diff(units[a].current);
        diff.add(units[b].current, -1.0);
        // I1 - I2 >= delta - M(1 - omega) - M(1 - z) - M*ord
        model.add_ge(fmt::format("offset_pos[{}]", id),
                     LinearExpr(diff).add(omega, -big_m).add(block.z, -big_m).add(order, big_m), delta - 2.0 * big_m);
        // I2 - I1 >= delta - M(1 - omega) - M(1 - z) - M(1 - ord)
        model.add_ge(fmt::format("offset_neg[{}]", id),
                     LinearExpr().add(diff, -1.0).add(omega, -big_m).add(block.z, -big_m).add(order, -big_m),
                     delta - 3.0 * big_m);
    }
    return block;
}

namespace {

nlohmann::json interval_json(const CurrentInterval& c) {
    return {{"lo_A", c.lo}, {"hi_A", c.hi}, {"enabled", c.enabled}};
}

CurrentInterval interval_from(const nlohmann::json& j) {
    return {j.at("lo_A").get<double>(), j.at("hi_A").get<double>(), j.at("enabled").get<bool>()};
}

}  // namespace

std::string thresholds_to_json(const RegionThresholds& r) {
    nlohmann::json out;
    out["format"] = "p2h-region-thresholds/1";
    out["orders"] = nlohmann::json::array();
    for (const auto& t : r.orders) {
        out["orders"].push_back({{"order", t.order},
                                 {"pair_limit_A", t.pair_limit},
                                 {"i_min_A", t.i_min},
                                 {"i_max_A", t.i_max},
                                 {"low", interval_json(t.low)},
                                 {"medium", interval_json(t.medium)},
                                 {"high", interval_json(t.high)},
                                 {"delta_i_m_A", t.delta_i_m},
                                 {"n_bar", t.n_bar},
                                 {"vacuous", t.vacuous},
                                 {"resolution_A", t.resolution}});
    }
    // max_digits10 output keeps the round trip bit-exact.
    return out.dump(2) + "\n";
}

RegionThresholds thresholds_from_json(const std::string& text) {
    RegionThresholds r;
    try {
        const auto j = nlohmann::json::parse(text);
        for (const auto& o : j.at("orders")) {
            OrderThresholds t;
            t.order = o.at("order").get<int>();
            t.pair_limit = o.at("pair_limit_A").get<double>();
            t.i_min = o.at("i_min_A").get<double>();
            t.i_max = o.at("i_max_A").get<double>();
            t.low = interval_from(o.at("low"));
            t.medium = interval_from(o.at("medium"));
            t.high = interval_from(o.at("high"));
            t.delta_i_m = o.at("delta_i_m_A").get<double>();
            t.n_bar = o.at("n_bar").get<int>();
            t.vacuous = o.at("vacuous").get<bool>();
            t.resolution = o.at("resolution_A").get<double>();
            r.orders.push_back(t);
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(fmt::format("thresholds file: {}", e.what()));
    }
    return r;
}

void save_thresholds(const RegionThresholds& r, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
    }
    out << thresholds_to_json(r);
}

RegionThresholds load_thresholds(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error(fmt::format("cannot open '{}'", path.string()));
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return thresholds_from_json(buffer.str());
}

std::string pair_grid_csv(const PairGrid& g) {
    std::string out = "I1_A,I2_A,magnitude_A,feasible\n";
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::size_t j = 0; j < g.size(); ++j) {
            out += fmt::format("{},{},{:.9g},{}\n", g.axis[i], g.axis[j], g.mag(i, j), g.is_feasible(i, j) ? 1 : 0);
        }
    }
    return out;
}

}  // namespace p2h
