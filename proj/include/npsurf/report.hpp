#pragma once
// Report assembly: machine-readable JSON plus the ASCII Betti diagram.
//
// The diagram follows the usual Betti-table layout: columns are the
// homological index i, rows are the internal shift q, the (q, i) entry is
// beta_{i, i+q}. Zero prints as "." and a size-guard refusal as "?", so a
// refused cell can never be mistaken for a verified zero.

#include <algorithm>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

#include "engine.hpp"

namespace npsurf {

using nlohmann::json;

inline std::string ascii_betti(const BettiResult& b) {
    const u64 ncols = b.i_max + 1;
    std::vector<u64> width(ncols, 1);
    for (const auto& row : b.cells)
        for (u64 i = 0; i < ncols; ++i) {
            const auto& c = row[i];
            const u64 w = c.ok ? std::to_string(c.dim).size() : 1;
            width[i] = std::max(width[i], w);
        }
    std::ostringstream os;
    std::string qlabel = std::to_string(b.q_max) + ":";
    const u64 lw = qlabel.size() + 1;
    os << std::setw(static_cast<int>(lw)) << "";
    for (u64 i = 0; i < ncols; ++i)
        os << "  " << std::setw(static_cast<int>(width[i])) << i;
    os << '\n';
    for (i64 q = 0; q <= b.q_max; ++q) {
        os << std::setw(static_cast<int>(lw)) << (std::to_string(q) + ":");
        for (u64 i = 0; i < ncols; ++i) {
            const auto& c = b.cells[static_cast<size_t>(q)][i];
            std::string s = !c.ok ? "?" : (c.dim == 0 ? "." : std::to_string(c.dim));
            os << "  " << std::setw(static_cast<int>(width[i])) << s;
        }
        os << '\n';
    }
    return os.str();
}

// Grid rendering for a list of individually evaluated cells, as produced by
// the N_p check. Cells the check never touched (the free linear strand)
// print as "-"; refused cells as "?"; computed zeros as ".".
inline std::string ascii_cells(const std::vector<CellResult>& cells, u64 i_max,
                               i64 q_max) {
    std::map<std::pair<i64, u64>, const CellResult*> at;
    for (const auto& c : cells)
        if (!c.twisted) at[{c.q, c.p}] = &c;
    auto text = [&](i64 q, u64 i) -> std::string {
        auto it = at.find({q, i});
        if (it == at.end()) return "-";
        if (!it->second->ok()) return "?";
        return it->second->dim == 0 ? "." : std::to_string(it->second->dim);
    };
    std::vector<u64> width(i_max + 1, 1);
    for (i64 q = 0; q <= q_max; ++q)
        for (u64 i = 0; i <= i_max; ++i)
            width[i] = std::max(width[i], static_cast<u64>(text(q, i).size()));
    std::ostringstream os;
    const u64 lw = std::to_string(q_max).size() + 2;
    os << std::setw(static_cast<int>(lw)) << "";
    for (u64 i = 0; i <= i_max; ++i)
        os << "  " << std::setw(static_cast<int>(width[i])) << i;
    os << '\n';
    for (i64 q = 0; q <= q_max; ++q) {
        os << std::setw(static_cast<int>(lw)) << (std::to_string(q) + ":");
        for (u64 i = 0; i <= i_max; ++i)
            os << "  " << std::setw(static_cast<int>(width[i])) << text(q, i);
        os << '\n';
    }
    return os.str();
}

inline json json_of(const NpBound& b) {
    return json{{"sigma", b.sigma},
                {"d", b.d},
                {"p", b.p},
                {"t_min", b.t_min},
                {"binding_term", binding_term_name(b.binding)}};
}

inline json json_of(const CellResult& c) {
    json j{{"i", c.p},
           {"q", c.q},
           {"twist", c.twisted ? "canonical" : "none"},
           {"status", c.ok() ? "ok" : "refused"},
           {"top_rows", c.top_shape.rows},
           {"top_cols", c.top_shape.cols},
           {"side_rows", c.side_shape.rows},
           {"side_cols", c.side_shape.cols},
           {"ms", c.ms}};
    if (c.ok()) {
        j["dim"] = c.dim;
        j["rank_top"] = c.rank_top;
        j["rank_side"] = c.rank_side;
    } else {
        j["note"] = c.note;
    }
    return j;
}

inline json json_of(const CheckLine& l) {
    return json{{"name", l.name}, {"pass", l.pass}, {"detail", l.detail}};
}

inline json json_of(const InstanceSummary& s) {
    json j{{"s", s.s},          {"d", s.d},
           {"degZ", s.degz},    {"sigma", s.sigma},
           {"n_star", s.n_star}, {"t", s.t},
           {"dim_W", s.n_w},    {"N", s.big_n},
           {"N_lower_bound", s.ambient_lower},
           {"very_ample", s.very_ample},
           {"h0_K_plus_D", s.h0_kd}};
    if (s.rr_predicted) {
        j["riemann_roch_predicted"] = *s.rr_predicted;
        j["riemann_roch_direct"] = *s.rr_direct;
    }
    return j;
}

inline json json_of(const NpVerification& v) {
    json cells = json::array();
    for (const auto& c : v.cells) cells.push_back(json_of(c));
    json checks = json::array();
    for (const auto& c : v.checks) checks.push_back(json_of(c));
    return json{{"p", v.p},
                {"bound", json_of(v.bound)},
                {"theorem_applies", v.theorem_applies},
                {"instance", json_of(v.summary)},
                {"cells", cells},
                {"checks", checks},
                {"refused", v.refused},
                {"pass", v.pass}};
}

inline json json_of(const BettiResult& b) {
    json rows = json::array();
    for (i64 q = 0; q <= b.q_max; ++q) {
        json row = json::array();
        for (u64 i = 0; i <= b.i_max; ++i) {
            const auto& c = b.cells[static_cast<size_t>(q)][i];
            if (c.ok)
                row.push_back(c.dim);
            else
                row.push_back(nullptr);
        }
        rows.push_back(row);
    }
    return json{{"i_max", b.i_max}, {"q_max", b.q_max}, {"rows", rows},
                {"ascii", ascii_betti(b)}};
}

inline json json_of(const DualityResult& d) {
    return json{{"p", d.p},
                {"partner_index", d.partner},
                {"lhs", json_of(d.lhs)},
                {"rhs", json_of(d.rhs)},
                {"comparable", d.comparable},
                {"equal", d.equal}};
}

inline const char* scan_status_name(ScanStatus s) {
    switch (s) {
        case ScanStatus::kNotVeryAmple: return "not_very_ample";
        case ScanStatus::kPass: return "pass";
        case ScanStatus::kFail: return "fail";
        case ScanStatus::kRefused: return "refused";
    }
    return "?";
}

inline json json_of(const ScanResult& s) {
    json rows = json::array();
    for (const auto& r : s.rows)
        rows.push_back(json{{"t", r.t}, {"status", scan_status_name(r.status)}});
    json j{{"bound", json_of(s.bound)},
           {"rows", rows},
           {"any_refused", s.any_refused},
           {"predicted_all_pass", s.predicted_all_pass}};
    if (s.first_pass) j["first_pass"] = *s.first_pass;
    return j;
}

} // namespace npsurf
