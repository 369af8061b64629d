#include "p2h/feasible_region.hpp"

#include "support.hpp"

#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using p2h::testing::data_path;

namespace {

const fs::path kWork = fs::temp_directory_path() / "p2h_cli_test";

int p2h_cli(const std::string& args, const std::string& log = "log.txt") {
    fs::create_directories(kWork);
    const std::string cmd =
        std::string(P2H_CLI_PATH) + " " + args + " > " + (kWork / log).string() + " 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> csv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(slurp(p));
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            cells.push_back(cell);
        }
        rows.push_back(cells);
    }
    return rows;
}

const std::string kTwo = "--scenario " + data_path("scenarios/two_elz.json");

}  // namespace

TEST_CASE("analyze") {
    const auto out = kWork / "analyze";
    REQUIRE(p2h_cli("analyze " + kTwo + " --out " + out.string()) == 0);
    CHECK(fs::exists(out / "phasor_sweep.csv"));
    const auto ops = csv(out / "operating_points.csv");
    REQUIRE(ops.size() > 10);
    CHECK(ops[0][1] == "alpha_deg");
    for (std::size_t r = 2; r < ops.size(); ++r) {
        CHECK(std::stod(ops[r][1]) < std::stod(ops[r - 1][1]));
    }
}

TEST_CASE("region") {
    const auto out = kWork / "region";
    REQUIRE(p2h_cli("region " + kTwo + " --out " + out.string(), "region.txt") == 0);
    const auto log = slurp(kWork / "region.txt");
    CHECK(log.find("0 false-feasible") != std::string::npos);
    CHECK(log.find("1 false-feasible") == std::string::npos);

    const auto text = slurp(out / "thresholds.json");
    const auto parsed = p2h::thresholds_from_json(text);
    CHECK(parsed.orders.size() == 2);
    CHECK(p2h::thresholds_to_json(parsed) == text);

    for (int h : {23, 25}) {
        const auto rows = csv(out / ("pair_grid_h" + std::to_string(h) + ".csv"));
        std::map<std::pair<std::string, std::string>, std::string> cell;
        for (std::size_t r = 1; r < rows.size(); ++r) {
            cell[{rows[r][0], rows[r][1]}] = rows[r][3];
        }
        std::size_t asymmetric = 0;
        for (const auto& [k, v] : cell) {
            asymmetric += cell.at({k.second, k.first}) != v ? 1 : 0;
        }
        CHECK(asymmetric == 0);
    }
}

TEST_CASE("schedule and compare on the 2-ELZ day") {
    const auto out = kWork / "compare";
    REQUIRE(p2h_cli("compare " + kTwo + " --out " + out.string()) == 0);
    const auto table = nlohmann::json::parse(slurp(out / "comparison.json"));
    REQUIRE(table.size() == 3);
    CHECK(table[0]["compliant"] == false);
    CHECK(table[1]["compliant"] == true);
    CHECK(table[2]["compliant"] == true);
    for (const char* s : {"CM1", "CM2", "PM"}) {
        CHECK(fs::exists(out / (std::string("schedule_") + s + ".csv")));
        CHECK(fs::exists(out / (std::string("kpi_") + s + ".json")));
    }
    const auto pm = csv(out / "compliance_PM.csv");
    REQUIRE(pm.size() > 1);
    for (std::size_t r = 1; r < pm.size(); ++r) {
        CHECK(pm[r][4] == "1");
    }

    const auto a = kWork / "cm1_a";
    const auto b = kWork / "cm1_b";
    REQUIRE(p2h_cli("schedule --strategy CM1 " + kTwo + " --out " + a.string()) == 0);
    REQUIRE(p2h_cli("schedule --strategy CM1 " + kTwo + " --out " + b.string()) == 0);
    CHECK(slurp(a / "schedule_CM1.csv") == slurp(b / "schedule_CM1.csv"));
}

TEST_CASE("exit codes") {
    CHECK(p2h_cli("analyze --scenario /nonexistent.json") == 2);
    CHECK(p2h_cli("frobnicate") == 2);
    CHECK(p2h_cli("schedule --strategy CM9 " + kTwo + " --out " + (kWork / "x").string()) == 2);

    const auto bad = kWork / "bad.json";
    std::ofstream(bad) << "{\n  \"plant\": {\"n_elz\": 3, \"horizon\": 1},\n}\n";
    CHECK(p2h_cli("analyze --scenario " + bad.string(), "bad.txt") == 2);
    CHECK(slurp(kWork / "bad.txt").find("line") != std::string::npos);

    auto j = nlohmann::json::parse(slurp(data_path("scenarios/two_elz.json")));
    j["plant"]["horizon"] = 1;
    j["renewable"]["profile_W"] = {8e6};
    j["limits"]["table"] = data_path("limits/gbt14549_10kV.txt");
    j["pcc"]["s_sc_VA"] = 20e6;
    const auto tight = kWork / "tight.json";
    std::ofstream(tight) << j.dump(2);
    const auto thresholds = kWork / "region" / "thresholds.json";
    REQUIRE(fs::exists(thresholds));
    CHECK(p2h_cli("schedule --strategy CM2 --scenario " + tight.string() + " --thresholds " + thresholds.string() +
                  " --out " + (kWork / "tight").string()) == 3);

    CHECK(p2h_cli("schedule --strategy PM " + kTwo + " --backend bundled --time-limit 0.01 --out " +
                  (kWork / "slow").string()) == 4);
}
