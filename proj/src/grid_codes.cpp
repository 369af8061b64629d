#include "p2h/grid_codes.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace p2h {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

double parse_number(const std::string& text, const std::string& where) {
    double value = 0.0;
    const auto* begin = text.data();
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        throw LimitTableError(fmt::format("{}: '{}' is not a number", where, text));
    }
    return value;
}

int parse_order(const std::string& key, const std::string& where) {
    std::string digits = key;
    if (!digits.empty() && digits.front() == 'h') {
        digits.erase(0, 1);
    }
    int h = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), h);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || h < 2) {
        throw LimitTableError(fmt::format("{}: unknown key '{}'", where, key));
    }
    return h;
}

}  // namespace

std::string_view to_string(GridCodeMode mode) {
    return mode == GridCodeMode::GBT14549 ? "gbt14549" : "ieee519";
}

GridCodeMode parse_grid_code_mode(std::string_view text) {
    const auto key = lower(std::string(text));
    if (key == "gbt14549" || key == "gb/t14549" || key == "gbt") {
        return GridCodeMode::GBT14549;
    }
    if (key == "ieee519" || key == "ieee") {
        return GridCodeMode::IEEE519;
    }
    throw std::invalid_argument(fmt::format("unknown grid code mode '{}'", text));
}

void PccSpec::validate() const {
    if (!(s_sc > 0.0)) {
        throw std::invalid_argument("pcc: s_sc must be positive");
    }
    if (!(s_gb > 0.0)) {
        throw std::invalid_argument("pcc: s_gb must be positive");
    }
    if (!(rated_voltage > 0.0)) {
        throw std::invalid_argument("pcc: rated_voltage must be positive");
    }
    if (mode == GridCodeMode::IEEE519 && !(max_demand_current > 0.0)) {
        throw std::invalid_argument("pcc: IEEE 519 mode needs max_demand_current > 0");
    }
}

void HarmonicLimitTable::validate() const {
    for (const auto& [h, v] : base_limits) {
        if (!(v > 0.0)) {
            throw LimitTableError(fmt::format("{}: limit for order {} must be positive", source, h));
        }
    }
    for (const auto& [h, v] : soft_caps) {
        if (!(v > 0.0)) {
            throw LimitTableError(fmt::format("{}: soft cap for order {} must be positive", source, h));
        }
    }
}

double harmonic_limit(const PccSpec& pcc, const HarmonicLimitTable& table, int h) {
    const auto it = table.base_limits.find(h);
    if (it == table.base_limits.end()) {
        throw MissingLimitError(fmt::format("no limit for harmonic order {}", h));
    }
    if (table.mode == GridCodeMode::GBT14549) {
        return pcc.s_sc / pcc.s_gb * it->second;
    }
    return it->second / 100.0 * pcc.max_demand_current;
}

double soft_limit(const PccSpec& pcc, const HarmonicLimitTable& table, int h) {
    const auto it = table.soft_caps.find(h);
    if (it == table.soft_caps.end()) {
        return std::numeric_limits<double>::infinity();
    }
    if (table.mode == GridCodeMode::GBT14549) {
        return pcc.s_sc / pcc.s_gb * it->second;
    }
    return it->second / 100.0 * pcc.max_demand_current;
}

HarmonicPhasor aggregate_phasors(std::span<const HarmonicPhasor> phasors) {
    if (phasors.empty()) {
        throw std::invalid_argument("aggregate_phasors: empty phasor list");
    }
    HarmonicPhasor sum{phasors.front().order, {}};
    for (const auto& p : phasors) {
        if (p.order != sum.order) {
            throw MixedOrderError(
                fmt::format("aggregate_phasors: mixed orders {} and {}", sum.order, p.order));
        }
        sum.value += p.value;
    }
    return sum;
}

const OrderCompliance* ComplianceReport::find(int h) const {
    const auto it = std::find_if(orders.begin(), orders.end(),
                                 [h](const OrderCompliance& o) { return o.order == h; });
    return it == orders.end() ? nullptr : &*it;
}

ComplianceReport check_compliance(std::span<const HarmonicPhasor> aggregates, const PccSpec& pcc,
                                  const HarmonicLimitTable& table) {
    ComplianceReport report;
    double harmonic_sq = 0.0;
    for (const auto& a : aggregates) {
        const double mag = a.magnitude();
        if (a.order == 1) {
            report.fundamental = mag;
            continue;
        }
        harmonic_sq += mag * mag;
        OrderCompliance oc;
        oc.order = a.order;
        oc.magnitude = mag;
        if (table.has(a.order)) {
            oc.limited = true;
            oc.limit = harmonic_limit(pcc, table, a.order);
            // Relative slack absorbs round-off only.
            oc.compliant = mag <= oc.limit * (1.0 + 1e-9);
        } else {
            oc.limit = std::numeric_limits<double>::infinity();
        }
        oc.soft_exceeded = mag > soft_limit(pcc, table, a.order);
        report.compliant = report.compliant && oc.compliant;
        report.orders.push_back(oc);
    }
    report.thd = report.fundamental > 0.0 ? std::sqrt(harmonic_sq) / report.fundamental : 0.0;
    return report;
}

HarmonicLimitTable parse_limit_table(std::string_view text, std::string source) {
    HarmonicLimitTable table;
    table.source = source;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        const auto content = trim(line);
        if (content.empty()) {
            continue;
        }
        const std::string where = fmt::format("{}:{}", source, line_no);
        const auto eq = content.find('=');
        if (eq == std::string::npos) {
            throw LimitTableError(fmt::format("{}: expected 'key = value'", where));
        }
        const auto key = lower(trim(std::string_view(content).substr(0, eq)));
        const auto value = trim(std::string_view(content).substr(eq + 1));
        if (key == "mode") {
            try {
                table.mode = parse_grid_code_mode(value);
            } catch (const std::invalid_argument& e) {
                throw LimitTableError(fmt::format("{}: {}", where, e.what()));
            }
        } else if (key == "base_capacity_mva") {
            table.base_capacity = parse_number(value, where) * 1e6;
        } else if (key == "voltage_kv" || key == "standard") {
            // informational
        } else if (key.starts_with("soft.")) {
            table.soft_caps[parse_order(key.substr(5), where)] = parse_number(value, where);
        } else {
            table.base_limits[parse_order(key, where)] = parse_number(value, where);
        }
    }
    table.validate();
    return table;
}

HarmonicLimitTable load_limit_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw LimitTableError(fmt::format("cannot open limit table '{}'", path.string()));
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_limit_table(buffer.str(), path.string());
}

std::string format_limit_table(const HarmonicLimitTable& table) {
    std::string out = fmt::format("mode = {}\n", to_string(table.mode));
    if (table.base_capacity) {
        out += fmt::format("base_capacity_mva = {}\n", *table.base_capacity / 1e6);
    }
    for (const auto& [h, v] : table.base_limits) {
        out += fmt::format("h{} = {}\n", h, v);
    }
    for (const auto& [h, v] : table.soft_caps) {
        out += fmt::format("soft.h{} = {}\n", h, v);
    }
    return out;
}

HarmonicLimitTable ieee519_limit_table(double isc_over_il) {
    if (!(isc_over_il > 0.0)) {
        throw std::invalid_argument("ieee519_limit_table: Isc/IL must be positive");
    }
    // Columns: 23 <= h < 35, 35 <= h <= 50.
    struct Row {
        double ratio_below;
        double mid;
        double high;
    };
    static constexpr Row rows[] = {
        {20.0, 0.6, 0.3},
        {50.0, 1.0, 0.5},
        {100.0, 1.5, 0.7},
        {1000.0, 2.0, 1.0},
        {std::numeric_limits<double>::infinity(), 2.5, 1.4},
    };
    const Row* row = &rows[0];
    for (const auto& r : rows) {
        row = &r;
        if (isc_over_il < r.ratio_below) {
            break;
        }
    }
    HarmonicLimitTable table;
    table.mode = GridCodeMode::IEEE519;
    table.source = fmt::format("IEEE 519-2014, Isc/IL = {}", isc_over_il);
    table.base_limits = {{23, row->mid}, {25, row->mid}, {47, row->high}, {49, row->high}};
    return table;
}

}  // namespace p2h
