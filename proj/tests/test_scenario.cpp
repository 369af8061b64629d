#include "p2h/scenario.hpp"

#include "support.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>

using namespace p2h;
using nlohmann::json;

namespace {

const std::filesystem::path kScenarioDir = testing::data_path("scenarios");

json minimal() {
    return json::parse(R"({
      "plant": {"n_elz": 2, "horizon": 3},
      "electrolyzer": {},
      "pcc": {"rated_voltage_V": 10000, "s_sc_VA": 2e8},
      "limits": {"table": "../limits/gbt14549_10kV.txt"},
      "renewable": {"profile_W": [1e6, 2e6, 3e6]}
    })");
}

Scenario parse(const json& j, const ScenarioOverrides& o = {}) { return parse_scenario(j.dump(2), kScenarioDir, o); }

std::string field_of(const json& j) {
    try {
        parse(j);
    } catch (const ScenarioError& e) {
        return e.field();
    }
    return "<accepted>";
}

}  // namespace

TEST_CASE("shipped scenarios load") {
    const auto two = load_scenario(kScenarioDir / "two_elz.json");
    CHECK(two.n_elz == 2);
    CHECK(two.horizon == 24);
    CHECK(two.renewable.size() == 24);
    CHECK(two.plant_limit(23) == doctest::Approx(9.0));
    CHECK(two.plant_limit(25) == doctest::Approx(8.2));
    CHECK(two.prices.hydrogen_per_kg == doctest::Approx(26.0));

    const auto twenty = load_scenario(kScenarioDir / "twenty_elz.json");
    CHECK(twenty.n_elz == 20);
    CHECK(twenty.pcc.s_sc == doctest::Approx(3900e6));
    CHECK(twenty.elz.rectifier.u_ac == doctest::Approx(220e3));
    CHECK(twenty.renewable.size() == static_cast<std::size_t>(twenty.horizon));
}

TEST_CASE("defaults") {
    const auto s = parse(minimal());
    CHECK(s.step_hours == 1.0);
    CHECK(s.pcc.s_gb == doctest::Approx(100e6));
    CHECK(s.limited_orders == std::vector<int>{23, 25});
    CHECK(s.initial_state == std::vector<UnitState>{UnitState::Idle, UnitState::Idle});
    CHECK(s.elz.curve.n_cell == 350);
}

TEST_CASE("diagnostics name the field") {
    auto j = minimal();
    j["plant"]["n_elz"] = 3;
    CHECK(field_of(j) == "/plant/n_elz");

    j = minimal();
    j["prices"] = {{"startup", -1}};
    CHECK(field_of(j) == "/prices/startup");

    j = minimal();
    j["electrolyzer"]["colour"] = "red";
    CHECK(field_of(j) == "/electrolyzer/colour");

    j = minimal();
    j["renewable"]["profile_W"] = {1e6, 2e6};
    CHECK(field_of(j) == "/renewable");

    j = minimal();
    j["renewable"]["profile_W"][1] = "x";
    CHECK(field_of(j) == "/renewable/profile_W/1");

    j = minimal();
    j["renewable"]["profile_W"][1] = -5.0;
    CHECK(field_of(j) == "/renewable/1");

    j = minimal();
    j["renewable"]["synthetic"] = {{"base_W", {1, 2, 3}}};
    CHECK(field_of(j) == "/renewable");

    j = minimal();
    j["plant"]["initial_state"] = "sleeping";
    CHECK(field_of(j) == "/plant/initial_state");

    j = minimal();
    j["harmonics"] = {{"limited_orders", {23, 26}}};
    CHECK(field_of(j) == "/harmonics/limited_orders/1");

    j = minimal();
    j["harmonics"] = {{"limited_orders", {47}}};
    CHECK(field_of(j) == "/harmonics/limited_orders");

    j = minimal();
    j["limits"] = {{"table", "missing.txt"}};
    CHECK(field_of(j) == "/limits/table");

    j = minimal();
    j["solver"] = {{"backend", "gurobi"}};
    CHECK(field_of(j) == "/solver/backend");

    j = minimal();
    j.erase("pcc");
    CHECK(field_of(j) == "/pcc");
}

TEST_CASE("syntax errors carry a line number") {
    const std::string text = "{\n  \"plant\": {\n    \"n_elz\": 2,,\n  }\n}\n";
    try {
        parse_scenario(text, kScenarioDir);
        FAIL("expected a syntax error");
    } catch (const ScenarioError& e) {
        CHECK(e.line() == 3);
    }
}

TEST_CASE("inline limit orders") {
    auto j = minimal();
    j["limits"] = {{"orders", {{"23", 4.5}, {"25", 4.1}}}, {"base_capacity_VA", 1e8}};
    const auto s = parse(j);
    CHECK(s.plant_limit(23) == doctest::Approx(9.0));
    j["limits"]["orders"]["23"] = -1;
    CHECK(field_of(j) == "/limits/orders/23");
}

TEST_CASE("profile file") {
    const auto dir = std::filesystem::temp_directory_path() / "p2h_test_profile";
    std::filesystem::create_directories(dir);
    {
        std::ofstream f(dir / "p.csv");
        f << "hour,power_W\n0,1000000\n1,2000000\n# note\n2,3000000\n";
    }
    CHECK(load_profile(dir / "p.csv") == std::vector<double>{1e6, 2e6, 3e6});
    {
        std::ofstream f(dir / "bad.csv");
        f << "1e6\n2e6\nabc\n";
    }
    try {
        load_profile(dir / "bad.csv");
        FAIL("expected a bad value");
    } catch (const ScenarioError& e) {
        CHECK(e.line() == 3);
    }
    auto j = minimal();
    j["renewable"] = {{"profile_file", (dir / "p.csv").string()}};
    CHECK(parse(j).renewable.size() == 3);
}

TEST_CASE("synthetic profile is seeded") {
    const std::vector<double> base{1e6, 2e6, 3e6, 4e6};
    CHECK(synthetic_profile(base, 0.1, 5) == synthetic_profile(base, 0.1, 5));
    CHECK(synthetic_profile(base, 0.1, 5) != synthetic_profile(base, 0.1, 6));
    CHECK(synthetic_profile(base, 0.0, 9) == base);
    for (double v : synthetic_profile(base, 5.0, 1)) {
        CHECK(v >= 0.0);
    }
    auto j = minimal();
    j["renewable"] = {{"synthetic", {{"base_W", base}, {"noise", 0.1}, {"seed", 5}}}};
    j["plant"]["horizon"] = 4;
    CHECK(parse(j).renewable == synthetic_profile(base, 0.1, 5));
    ScenarioOverrides o;
    o.seed = 6;
    CHECK(parse(j, o).renewable == synthetic_profile(base, 0.1, 6));
}

TEST_CASE("overrides") {
    ScenarioOverrides o;
    o.relative_gap = 0.05;
    o.backend = "bundled";
    o.region_resolution = 25.0;
    o.time_limit = 9.0;
    const auto s = parse(minimal(), o);
    CHECK(s.solver.relative_gap == 0.05);
    CHECK(s.solver.backend == "bundled");
    CHECK(s.region_resolution == 25.0);
    CHECK(s.solver.time_limit == 9.0);
}
