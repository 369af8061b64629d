#include "p2h/scenario.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace p2h {

using nlohmann::json;

std::string_view to_string(UnitState s) {
    switch (s) {
        case UnitState::Idle:
            return "idle";
        case UnitState::Standby:
            return "standby";
        case UnitState::On:
            return "on";
    }
    return "?";
}

namespace {

UnitState parse_state(const std::string& s, const std::string& field) {
    if (s == "idle") {
        return UnitState::Idle;
    }
    if (s == "standby") {
        return UnitState::Standby;
    }
    if (s == "on") {
        return UnitState::On;
    }
    throw ScenarioError(fmt::format("{}: unknown state '{}' (idle, standby or on)", field, s), field);
}

// Typed access to one JSON object with pointer-style error locations.
class Node {
public:
    Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) {
            fail(path_, "expected an object");
        }
    }

    [[noreturn]] static void fail(const std::string& field, const std::string& what) {
        throw ScenarioError(fmt::format("{}: {}", field.empty() ? "/" : field, what), field.empty() ? "/" : field);
    }

    std::string at(const std::string& key) const { return path_ + "/" + key; }
    bool has(const std::string& key) const { return j_.contains(key); }

    void allow(std::initializer_list<const char*> keys) const {
        std::set<std::string> ok(keys.begin(), keys.end());
        for (const auto& [k, v] : j_.items()) {
            if (!ok.contains(k)) {
                fail(at(k), "unknown field");
            }
        }
    }

    Node child(const std::string& key) const {
        if (!has(key)) {
            fail(at(key), "missing required object");
        }
        return Node(j_.at(key), at(key));
    }

    const json& raw(const std::string& key) const { return j_.at(key); }

    double number(const std::string& key, std::optional<double> fallback = std::nullopt) const {
        if (!has(key)) {
            if (fallback) {
                return *fallback;
            }
            fail(at(key), "missing required number");
        }
        const auto& v = j_.at(key);
        if (!v.is_number()) {
            fail(at(key), "expected a number");
        }
        return v.get<double>();
    }

    double positive(const std::string& key, std::optional<double> fallback = std::nullopt) const {
        const double v = number(key, fallback);
        if (!(v > 0.0)) {
            fail(at(key), "must be positive");
        }
        return v;
    }

    double non_negative(const std::string& key, std::optional<double> fallback = std::nullopt) const {
        const double v = number(key, fallback);
        if (!(v >= 0.0)) {
            fail(at(key), "must be non-negative");
        }
        return v;
    }

    int integer(const std::string& key, std::optional<int> fallback = std::nullopt) const {
        if (!has(key)) {
            if (fallback) {
                return *fallback;
            }
            fail(at(key), "missing required integer");
        }
        const auto& v = j_.at(key);
        if (!v.is_number_integer()) {
            fail(at(key), "expected an integer");
        }
        return v.get<int>();
    }

    std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt) const {
        if (!has(key)) {
            if (fallback) {
                return *fallback;
            }
            fail(at(key), "missing required string");
        }
        const auto& v = j_.at(key);
        if (!v.is_string()) {
            fail(at(key), "expected a string");
        }
        return v.get<std::string>();
    }

    bool boolean(const std::string& key, bool fallback) const {
        if (!has(key)) {
            return fallback;
        }
        const auto& v = j_.at(key);
        if (!v.is_boolean()) {
            fail(at(key), "expected true or false");
        }
        return v.get<bool>();
    }

    std::vector<double> numbers(const std::string& key) const {
        const auto& v = j_.at(key);
        if (!v.is_array()) {
            fail(at(key), "expected an array of numbers");
        }
        std::vector<double> out;
        for (std::size_t k = 0; k < v.size(); ++k) {
            if (!v[k].is_number()) {
                fail(fmt::format("{}/{}", at(key), k), "expected a number");
            }
            out.push_back(v[k].get<double>());
        }
        return out;
    }

    std::vector<int> orders(const std::string& key, std::vector<int> fallback) const {
        if (!has(key)) {
            return fallback;
        }
        const auto& v = j_.at(key);
        if (!v.is_array()) {
            fail(at(key), "expected an array of harmonic orders");
        }
        std::vector<int> out;
        for (std::size_t k = 0; k < v.size(); ++k) {
            if (!v[k].is_number_integer() || !is_characteristic_order(v[k].get<int>()) || v[k].get<int>() == 1) {
                fail(fmt::format("{}/{}", at(key), k), "expected a characteristic harmonic order (24k +/- 1)");
            }
            out.push_back(v[k].get<int>());
        }
        return out;
    }

private:
    const json& j_;
    std::string path_;
};

int line_of_offset(const std::string& text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

std::map<int, double> order_map(const Node& n, const std::string& key) {
    std::map<int, double> out;
    if (!n.has(key)) {
        return out;
    }
    const auto& obj = n.raw(key);
    if (!obj.is_object()) {
        Node::fail(n.at(key), "expected an object mapping order to amperes");
    }
    for (const auto& [k, v] : obj.items()) {
        const std::string field = n.at(key) + "/" + k;
        int h = 0;
        const auto [ptr, ec] = std::from_chars(k.data(), k.data() + k.size(), h);
        if (ec != std::errc{} || ptr != k.data() + k.size() || h < 2) {
            Node::fail(field, "keys must be harmonic orders");
        }
        if (!v.is_number() || !(v.get<double>() > 0.0)) {
            Node::fail(field, "limit must be a positive number");
        }
        out[h] = v.get<double>();
    }
    return out;
}

}  // namespace

void Scenario::validate() const {
    auto fail = [](const std::string& field, const std::string& what) {
        throw ScenarioError(fmt::format("{}: {}", field, what), field);
    };
    if (n_elz < 2 || n_elz % 2 != 0) {
        fail("/plant/n_elz", "must be even and at least 2");
    }
    if (horizon < 1) {
        fail("/plant/horizon", "must be at least 1");
    }
    if (!(step_hours > 0.0)) {
        fail("/plant/step_hours", "must be positive");
    }
    if (static_cast<int>(renewable.size()) != horizon) {
        fail("/renewable", fmt::format("profile has {} values but the horizon is {}", renewable.size(), horizon));
    }
    for (std::size_t t = 0; t < renewable.size(); ++t) {
        if (!(renewable[t] >= 0.0)) {
            fail(fmt::format("/renewable/{}", t), "power must be non-negative");
        }
    }
    if (!(prices.hydrogen_per_kg >= 0.0) || !(prices.grid_per_kwh >= 0.0) || !(prices.startup >= 0.0)) {
        fail("/prices", "prices must be non-negative");
    }
    if (static_cast<int>(initial_state.size()) != n_elz) {
        fail("/plant/initial_state", "needs one state per unit");
    }
    if (solver.pwl_segments < 1) {
        fail("/solver/pwl_segments", "must be at least 1");
    }
    for (int h : limited_orders) {
        if (!limits.has(h)) {
            fail("/harmonics/limited_orders", fmt::format("order {} has no entry in the limit table", h));
        }
    }
    try {
        pcc.validate();
    } catch (const std::invalid_argument& e) {
        fail("/pcc", e.what());
    }
    try {
        elz.validate();
    } catch (const std::exception& e) {
        fail("/electrolyzer", e.what());
    }
}

std::vector<double> load_profile(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ScenarioError(fmt::format("cannot open profile file '{}'", path.string()), "/renewable/profile_file");
    }
    std::vector<double> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto comma = line.find_last_of(',');
        std::string cell = comma == std::string::npos ? line : line.substr(comma + 1);
        cell.erase(0, cell.find_first_not_of(" \t"));
        cell.erase(cell.find_last_not_of(" \t") + 1);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
            if (out.empty() && line_no == 1) {
                continue;  // header
            }
            throw ScenarioError(fmt::format("{}:{}: '{}' is not a number", path.string(), line_no, cell),
                                "/renewable/profile_file", line_no);
        }
        out.push_back(v);
    }
    return out;
}

std::vector<double> synthetic_profile(const std::vector<double>& base, double noise, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> out(base.size());
    for (std::size_t t = 0; t < base.size(); ++t) {
        out[t] = std::max(0.0, base[t] * (1.0 + noise * gauss(rng)));
    }
    return out;
}

Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir,
                        const ScenarioOverrides& overrides) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const int line = line_of_offset(text, e.byte);
        throw ScenarioError(fmt::format("line {}: malformed JSON ({})", line, e.what()), "", line);
    }

    Scenario s;
    const Node root(doc, "");
    root.allow({"name", "plant", "electrolyzer", "prices", "pcc", "limits", "harmonics", "region", "solver",
                "renewable"});
    s.name = root.string("name", "scenario");

    const auto plant = root.child("plant");
    plant.allow({"n_elz", "horizon", "step_hours", "initial_state"});
    s.n_elz = plant.integer("n_elz");
    if (s.n_elz < 2 || s.n_elz % 2 != 0) {
        Node::fail(plant.at("n_elz"), "must be even and at least 2");
    }
    s.horizon = plant.integer("horizon");
    if (s.horizon < 1) {
        Node::fail(plant.at("horizon"), "must be at least 1");
    }
    s.step_hours = plant.positive("step_hours", 1.0);
    s.initial_state.assign(s.n_elz, UnitState::Idle);
    if (plant.has("initial_state")) {
        const auto& v = plant.raw("initial_state");
        const auto field = plant.at("initial_state");
        if (v.is_string()) {
            s.initial_state.assign(s.n_elz, parse_state(v.get<std::string>(), field));
        } else if (v.is_array() && static_cast<int>(v.size()) == s.n_elz) {
            for (int n = 0; n < s.n_elz; ++n) {
                if (!v[n].is_string()) {
                    Node::fail(fmt::format("{}/{}", field, n), "expected a state name");
                }
                s.initial_state[n] = parse_state(v[n].get<std::string>(), fmt::format("{}/{}", field, n));
            }
        } else {
            Node::fail(field, "expected a state name or one state per unit");
        }
    }

    const auto e = root.child("electrolyzer");
    e.allow({"u_ac_V", "turn_ratio", "x_c_ohm", "rated_stack_power_W", "aux_power_W", "i_min_A", "i_max_A",
             "eta_faraday", "curve"});
    s.elz.rectifier.u_ac = e.positive("u_ac_V", s.elz.rectifier.u_ac);
    s.elz.rectifier.turn_ratio = e.positive("turn_ratio", s.elz.rectifier.turn_ratio);
    s.elz.rectifier.x_c = e.non_negative("x_c_ohm", s.elz.rectifier.x_c);
    s.elz.rectifier.rated_stack_power = e.positive("rated_stack_power_W", s.elz.rectifier.rated_stack_power);
    s.elz.aux_power = e.non_negative("aux_power_W", s.elz.aux_power);
    s.elz.i_min = e.positive("i_min_A", s.elz.i_min);
    s.elz.i_max = e.positive("i_max_A", s.elz.i_max);
    if (!(s.elz.i_max > s.elz.i_min)) {
        Node::fail(e.at("i_max_A"), "must exceed i_min_A");
    }
    s.elz.eta_faraday = e.positive("eta_faraday", s.elz.eta_faraday);
    if (s.elz.eta_faraday > 1.0) {
        Node::fail(e.at("eta_faraday"), "must not exceed 1");
    }
    if (e.has("curve")) {
        const auto c = e.child("curve");
        c.allow({"n_cell", "u_rev_V", "r_ohm", "s_act_V", "t_act_per_A"});
        s.elz.curve.n_cell = c.integer("n_cell", s.elz.curve.n_cell);
        if (s.elz.curve.n_cell < 1) {
            Node::fail(c.at("n_cell"), "must be at least 1");
        }
        s.elz.curve.u_rev = c.positive("u_rev_V", s.elz.curve.u_rev);
        s.elz.curve.r_ohm = c.non_negative("r_ohm", s.elz.curve.r_ohm);
        s.elz.curve.s_act = c.non_negative("s_act_V", s.elz.curve.s_act);
        s.elz.curve.t_act = c.non_negative("t_act_per_A", s.elz.curve.t_act);
    }

    if (root.has("prices")) {
        const auto p = root.child("prices");
        p.allow({"currency", "hydrogen_per_kg", "grid_per_kWh", "startup"});
        s.prices.currency = p.string("currency", s.prices.currency);
        s.prices.hydrogen_per_kg = p.non_negative("hydrogen_per_kg", s.prices.hydrogen_per_kg);
        s.prices.grid_per_kwh = p.non_negative("grid_per_kWh", s.prices.grid_per_kwh);
        s.prices.startup = p.non_negative("startup", s.prices.startup);
    }

    const auto lim = root.child("limits");
    lim.allow({"table", "mode", "base_capacity_VA", "orders", "soft_caps"});
    if (lim.has("table")) {
        auto path = std::filesystem::path(lim.string("table"));
        if (path.is_relative()) {
            path = base_dir / path;
        }
        try {
            s.limits = load_limit_table(path);
        } catch (const LimitTableError& err) {
            Node::fail(lim.at("table"), err.what());
        }
    } else {
        s.limits.source = "scenario";
        s.limits.base_limits = order_map(lim, "orders");
        if (s.limits.base_limits.empty()) {
            Node::fail(lim.at("orders"), "give either 'table' or a non-empty 'orders' map");
        }
    }
    if (lim.has("mode")) {
        try {
            s.limits.mode = parse_grid_code_mode(lim.string("mode"));
        } catch (const std::invalid_argument& err) {
            Node::fail(lim.at("mode"), err.what());
        }
    }
    if (lim.has("base_capacity_VA")) {
        s.limits.base_capacity = lim.positive("base_capacity_VA");
    }
    for (const auto& [h, v] : order_map(lim, "soft_caps")) {
        s.limits.soft_caps[h] = v;
    }

    const auto pcc = root.child("pcc");
    pcc.allow({"rated_voltage_V", "s_sc_VA", "s_gb_VA", "mode", "max_demand_current_A"});
    s.pcc.rated_voltage = pcc.positive("rated_voltage_V");
    s.pcc.s_sc = pcc.positive("s_sc_VA");
    if (pcc.has("s_gb_VA")) {
        s.pcc.s_gb = pcc.positive("s_gb_VA");
    } else if (s.limits.base_capacity) {
        s.pcc.s_gb = *s.limits.base_capacity;
    } else {
        Node::fail(pcc.at("s_gb_VA"), "missing, and the limit table states no base capacity");
    }
    s.pcc.mode = s.limits.mode;
    if (pcc.has("mode")) {
        try {
            s.pcc.mode = parse_grid_code_mode(pcc.string("mode"));
        } catch (const std::invalid_argument& err) {
            Node::fail(pcc.at("mode"), err.what());
        }
        if (s.pcc.mode != s.limits.mode) {
            Node::fail(pcc.at("mode"), "differs from the limit table mode");
        }
    }
    s.pcc.max_demand_current = pcc.non_negative("max_demand_current_A", 0.0);

    if (root.has("harmonics")) {
        const auto h = root.child("harmonics");
        h.allow({"limited_orders", "reported_orders", "soft_exclusions"});
        s.limited_orders = h.orders("limited_orders", s.limited_orders);
        s.reported_orders = h.orders("reported_orders", s.reported_orders);
        if (h.has("soft_exclusions")) {
            const auto& arr = h.raw("soft_exclusions");
            if (!arr.is_array()) {
                Node::fail(h.at("soft_exclusions"), "expected an array");
            }
            for (std::size_t k = 0; k < arr.size(); ++k) {
                const Node x(arr[k], fmt::format("{}/{}", h.at("soft_exclusions"), k));
                x.allow({"order", "threshold_A"});
                s.soft_exclusions.push_back({x.integer("order"), x.positive("threshold_A")});
            }
        }
    }

    if (root.has("region")) {
        const auto r = root.child("region");
        r.allow({"resolution_A", "verification_points"});
        s.region_resolution = r.positive("resolution_A", s.region_resolution);
        if (s.region_resolution > 100.0) {
            Node::fail(r.at("resolution_A"), "must not exceed 100 A");
        }
        const int vp = r.integer("verification_points", static_cast<int>(s.verification_points));
        if (vp < 2) {
            Node::fail(r.at("verification_points"), "must be at least 2");
        }
        s.verification_points = static_cast<std::size_t>(vp);
    }

    if (root.has("solver")) {
        const auto so = root.child("solver");
        so.allow({"backend", "relative_gap", "time_limit_s", "pwl_segments", "pwl_ordering_binaries"});
        s.solver.backend = so.string("backend", s.solver.backend);
        if (s.solver.backend != "auto" && s.solver.backend != "bundled" && s.solver.backend != "highs") {
            Node::fail(so.at("backend"), "expected auto, bundled or highs");
        }
        s.solver.relative_gap = so.non_negative("relative_gap", s.solver.relative_gap);
        s.solver.time_limit = so.positive("time_limit_s", s.solver.time_limit);
        s.solver.pwl_segments = so.integer("pwl_segments", s.solver.pwl_segments);
        if (s.solver.pwl_segments < 1) {
            Node::fail(so.at("pwl_segments"), "must be at least 1");
        }
        s.solver.pwl_ordering_binaries = so.boolean("pwl_ordering_binaries", false);
    }

    const auto ren = root.child("renewable");
    ren.allow({"profile_W", "profile_file", "synthetic"});
    const int sources = (ren.has("profile_W") ? 1 : 0) + (ren.has("profile_file") ? 1 : 0) +
                        (ren.has("synthetic") ? 1 : 0);
    if (sources != 1) {
        Node::fail("/renewable", "give exactly one of profile_W, profile_file or synthetic");
    }
    if (ren.has("profile_W")) {
        s.renewable = ren.numbers("profile_W");
    } else if (ren.has("profile_file")) {
        auto path = std::filesystem::path(ren.string("profile_file"));
        if (path.is_relative()) {
            path = base_dir / path;
        }
        s.renewable = load_profile(path);
    } else {
        const auto syn = ren.child("synthetic");
        syn.allow({"base_W", "noise", "seed"});
        const auto base = syn.numbers("base_W");
        const double noise = syn.non_negative("noise", 0.0);
        const int seed = syn.integer("seed", 0);
        if (seed < 0) {
            Node::fail(syn.at("seed"), "must be non-negative");
        }
        s.seed = overrides.seed.value_or(static_cast<std::uint64_t>(seed));
        s.renewable = synthetic_profile(base, noise, s.seed);
    }

    if (overrides.region_resolution) {
        s.region_resolution = *overrides.region_resolution;
    }
    if (overrides.relative_gap) {
        s.solver.relative_gap = *overrides.relative_gap;
    }
    if (overrides.backend) {
        s.solver.backend = *overrides.backend;
    }
    if (overrides.time_limit) {
        s.solver.time_limit = *overrides.time_limit;
    }
    s.validate();
    return s;
}

Scenario load_scenario(const std::filesystem::path& path, const ScenarioOverrides& overrides) {
    std::ifstream in(path);
    if (!in) {
        throw ScenarioError(fmt::format("cannot open scenario file '{}'", path.string()), "");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str(), path.parent_path(), overrides);
}

}  // namespace p2h
