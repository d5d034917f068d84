#pragma once

// JSON and CSV projections of certificates and reports. JSON is canonical.

#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "bec/certifier.hpp"
#include "bec/constants.hpp"
#include "bec/empirical.hpp"

namespace bec {

using json = nlohmann::ordered_json;

/// Rounds to `digits` significant decimal digits.
inline double round_sig(double x, int digits = 12) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return std::strtod(buf, nullptr);
}

inline json to_json(const NMode& m) {
    return json{{"kind", m.is_uniform() ? "uniform" : "finite"}, {"n", m.n}};
}

inline json to_json(const Certificate& c) {
    return json{{"k", c.k},         {"epsilon", c.epsilon},       {"n_mode", to_json(c.n_mode)},
                {"t0", c.t0},       {"T", c.T},                   {"terms", c.terms},
                {"quad_error", c.quad_error}, {"D", c.D},         {"C", c.C},
                {"valid", c.valid}};
}

inline json to_json(const SweepCell& c) {
    return json{{"eps_lo", c.eps_lo}, {"eps_hi", c.eps_hi}, {"c_hi", c.c_hi},
                {"bracket", c.bracket}, {"depth", c.depth}, {"pass", c.pass}};
}

inline json to_json(const SweepReport& r) {
    json cells = json::array();
    for (const auto& c : r.cells) cells.push_back(to_json(c));
    json extremal = json::array();
    for (const auto& c : r.extremal_points) extremal.push_back(to_json(c));
    json failing = json::array();
    for (const auto& c : r.failing_cells()) failing.push_back(to_json(c));
    return json{{"k", r.k},           {"target", r.target},      {"mode", r.mode},
                {"cells", cells},     {"global_max", r.global_max}, {"extremal_points", extremal},
                {"failing_cells", failing}, {"pass", r.pass}};
}

inline json to_json(const TheoremReport& r) {
    json spots = json::array();
    for (const auto& s : r.spots) {
        spots.push_back(
            json{{"label", s.label}, {"target", s.target}, {"pass", s.pass}, {"certificate", to_json(s.certificate)}});
    }
    json regimes = json::array();
    for (const auto& g : r.regimes) {
        regimes.push_back(json{{"label", g.label}, {"value", g.value}, {"limit", g.limit}, {"holds", g.holds}});
    }
    json out{{"theorem", r.theorem}, {"mode", r.mode},     {"k", r.k},
             {"target", r.target},   {"spots", spots},     {"regimes", regimes}};
    out["sweep"] = r.sweep ? to_json(*r.sweep) : json(nullptr);
    out["valid"] = r.valid;
    out["pass"] = r.pass;
    return out;
}

inline json to_json(const VerificationRow& row) {
    return json{{"n", row.n}, {"distance", row.distance}, {"bound", row.bound}, {"margin", row.margin},
                {"pass", row.pass}};
}

inline json constants_json() {
    const UniversalConstants& u = universal_constants();
    return json{{"theta0", round_sig(u.theta0)},
                {"kappa", round_sig(u.kappa)},
                {"esseen_lower", round_sig(u.esseen_lower)},
                {"bhattacharya_bound", round_sig(u.bhattacharya_bound)},
                {"tolerances", json{{"root", 1e-12}, {"optimizer", 1e-12}, {"digits", 12}}}};
}

/// Minimal CSV writer with a fixed header; doubles use 17 significant digits.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    CsvTable& row() {
        rows_.emplace_back();
        return *this;
    }
    CsvTable& cell(const std::string& s) {
        rows_.back().push_back(s);
        return *this;
    }
    CsvTable& cell(const char* s) { return cell(std::string(s)); }
    CsvTable& cell(double x) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return cell(std::string(buf));
    }
    CsvTable& cell(std::int64_t x) { return cell(std::to_string(x)); }
    CsvTable& cell(int x) { return cell(std::to_string(x)); }
    CsvTable& cell(bool b) { return cell(std::string(b ? "true" : "false")); }

    std::string str() const {
        std::ostringstream os;
        write_line(os, header_);
        for (const auto& r : rows_) write_line(os, r);
        return os.str();
    }

private:
    static void write_line(std::ostringstream& os, const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) os << ',';
            const bool quote = cells[i].find_first_of(",\"\n") != std::string::npos;
            if (!quote) {
                os << cells[i];
                continue;
            }
            os << '"';
            for (char ch : cells[i]) {
                if (ch == '"') os << '"';
                os << ch;
            }
            os << '"';
        }
        os << '\n';
    }

    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

}  // namespace bec
