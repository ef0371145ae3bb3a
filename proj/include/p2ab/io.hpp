#pragma once

// JSON and CSV serialization. Big integers always travel as decimal strings.

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "p2ab/analytics.hpp"
#include "p2ab/construct.hpp"
#include "p2ab/represent.hpp"

namespace p2ab {

using json = nlohmann::ordered_json;

namespace detail {

inline json big_array(const std::vector<BigNat>& v) {
    json a = json::array();
    for (const auto& x : v) a.push_back(dec(x));
    return a;
}

inline std::vector<BigNat> big_vector(const json& a) {
    std::vector<BigNat> v;
    for (const auto& x : a) v.push_back(parse_big(x.get<std::string>()));
    return v;
}

inline json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// long double as a JSON number when it fits a double, else as a decimal string.
inline json wide_json(long double v) {
    if (!std::isfinite(v)) return nullptr;
    if (std::fabs(v) <= static_cast<long double>(std::numeric_limits<double>::max())) return static_cast<double>(v);
    return format_wide(v);
}

inline long double wide_from_json(const json& j) {
    if (!j.is_string()) return j.get<long double>();
    try {
        return std::stold(j.get<std::string>());
    } catch (const std::logic_error&) {
        throw DomainError("not a number: '" + j.get<std::string>() + "'");
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

inline json to_json(const ConstructionParams& p) {
    json j;
    j["mode"] = p.mode == ParamMode::derived ? "derived" : "explicit";
    j["x"] = p.x.describe();
    j["K"] = p.K;
    j["L"] = p.L;
    j["u"] = detail::finite_or_null(static_cast<double>(p.u()));
    j["log_log_u"] = detail::wide_json(p.log_log_u);
    j["m"] = detail::wide_json(p.m);
    j["K_prime"] = p.K_prime;
    if (p.precision_limited) j["precision_limited"] = true;
    return j;
}

inline ConstructionParams params_from_json(const json& j) {
    ConstructionParams p;
    const std::string mode = j.value("mode", "explicit");
    if (mode != "explicit" && mode != "derived") throw DomainError("params: unknown mode '" + mode + "'");
    p.mode = mode == "derived" ? ParamMode::derived : ParamMode::explicit_;
    p.x = parse_scale(j.at("x").is_string() ? j.at("x").get<std::string>() : j.at("x").dump());
    p.K = j.at("K").get<unsigned>();
    p.L = j.at("L").get<double>();
    if (j.contains("log_log_u")) {
        p.log_log_u = detail::wide_from_json(j.at("log_log_u"));
    } else {
        const double u = j.at("u").get<double>();
        if (!(u > 1.0)) throw DomainError("params: u must exceed 1");
        p.log_log_u = std::log(std::log(static_cast<long double>(u)));
    }
    p.m = detail::wide_from_json(j.at("m"));
    p.K_prime = j.at("K_prime").get<unsigned>();
    p.precision_limited = j.value("precision_limited", false);
    validate(p);
    return p;
}

inline json to_json(const PrimeBlock& b) {
    json j;
    j["index"] = b.index;
    json primes = json::array();
    for (auto p : b.primes) primes.push_back(std::to_string(p));
    j["primes"] = primes;
    j["reciprocal_sum"] = b.reciprocal_sum;
    j["companions"] = detail::big_array(b.companions);
    j["block_modulus"] = dec(b.block_modulus);
    return j;
}

inline PrimeBlock block_from_json(const json& j) {
    PrimeBlock b;
    b.index = j.at("index").get<unsigned>();
    for (const auto& p : j.at("primes")) b.primes.push_back(to_u64(parse_big(p.get<std::string>())));
    b.reciprocal_sum = j.at("reciprocal_sum").get<double>();
    b.companions = detail::big_vector(j.at("companions"));
    b.block_modulus = parse_big(j.at("block_modulus").get<std::string>());
    return b;
}

inline json to_json(const Construction& c) {
    json j;
    j["params"] = to_json(c.params);
    json blocks = json::array();
    for (const auto& b : c.blocks) blocks.push_back(to_json(b));
    j["blocks"] = blocks;
    j["gammas"] = detail::big_array(c.gammas);
    j["W1"] = dec(c.W1);
    j["W2"] = dec(c.W2);
    j["W"] = dec(c.W);
    j["beta"] = dec(c.beta);
    return j;
}

inline Construction construction_from_json(const json& j) {
    try {
        Construction c;
        c.params = params_from_json(j.at("params"));
        for (const auto& b : j.at("blocks")) c.blocks.push_back(block_from_json(b));
        c.gammas = detail::big_vector(j.at("gammas"));
        c.W1 = parse_big(j.at("W1").get<std::string>());
        c.W2 = parse_big(j.at("W2").get<std::string>());
        c.W = parse_big(j.at("W").get<std::string>());
        c.beta = parse_big(j.at("beta").get<std::string>());
        return c;
    } catch (const json::exception& e) {
        throw DomainError(std::string("construction document: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline json to_json(const RepWitness& w) {
    json j;
    j["p"] = std::to_string(w.p);
    j["alpha"] = w.alpha;
    j["a"] = w.a ? json(*w.a) : json(nullptr);
    j["b"] = w.b;
    j["c"] = w.c;
    return j;
}

inline json to_json(const DensityReport& r) {
    json j;
    j["range_lo"] = r.range_lo;
    j["range_hi"] = r.range_hi;
    j["form"] = form_name(r.form);
    j["c"] = r.c;
    j["scanned"] = r.scanned;
    j["representable"] = r.representable;
    j["non_representable"] = r.non_representable;
    j["smallest_non_representable"] = r.smallest_non_representable;
    return j;
}

inline json to_json(const ErdosReport& r) {
    json j;
    j["residue"] = kErdosResidue;
    j["modulus"] = kErdosModulus;
    j["limit"] = r.limit;
    j["checked"] = r.checked;
    json v = json::array();
    for (const auto& [n, w] : r.violations) v.push_back({{"n", n}, {"witness", to_json(w)}});
    j["violations"] = v;
    return j;
}

inline json to_json(const CrockerSweep& s) {
    json j;
    j["max_b"] = s.max_b;
    j["checked"] = s.checked;
    json f = json::array();
    for (const auto& [a, b] : s.failures) f.push_back({a, b});
    j["failures"] = f;
    return j;
}

inline json to_json(const ProgressionReport& r) {
    json j;
    j["x"] = r.x;
    j["members"] = r.members;
    j["pairs_checked"] = r.pairs_checked;
    j["gamma_forced"] = r.gamma_forced;
    j["q_forced"] = r.q_forced;
    j["unforced"] = r.unforced;
    j["forced_failures"] = r.failures.size();
    j["T1"] = r.t1;
    j["T2"] = r.t2;
    j["non_representable_count"] = r.non_representable.size();
    j["non_representable"] = r.non_representable;
    json f = json::array();
    for (const auto& e : r.failures) f.push_back({{"n", e.n}, {"a", e.a}, {"b", e.b}, {"forced_prime", e.forced_prime}});
    j["failures"] = f;
    return j;
}

inline json to_json(const MagnitudeReport& r) {
    json j;
    j["informational"] = r.informational;
    json links = json::array();
    for (const auto& l : r.links)
        links.push_back({{"link", l.name},
                         {"lhs", detail::wide_json(l.lhs)},
                         {"rhs", detail::wide_json(l.rhs)},
                         {"scale", l.scale},
                         {"holds", l.holds}});
    j["links"] = links;
    return j;
}

// ---------------------------------------------------------------------------
// Tables (one row per evaluation point) for the analytics commands
// ---------------------------------------------------------------------------

struct Table {
    std::vector<std::string> columns;
    std::vector<json> rows;  // each row holds one value per column

    json to_json() const {
        json a = json::array();
        for (const auto& row : rows) {
            json obj;
            for (std::size_t i = 0; i < columns.size(); ++i) obj[columns[i]] = row[i];
            a.push_back(obj);
        }
        return a;
    }

    std::string to_csv() const {
        std::ostringstream out;
        for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
        out << '\n';
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) out << ',';
                if (row[i].is_string()) out << row[i].get<std::string>();
                else if (row[i].is_array()) {
                    for (std::size_t k = 0; k < row[i].size(); ++k) out << (k ? ";" : "") << row[i][k].dump();
                } else out << row[i].dump();
            }
            out << '\n';
        }
        return out.str();
    }
};

inline Table mertens_table(const std::vector<MertensPoint>& pts) {
    Table t{{"u", "sum", "residual"}, {}};
    for (const auto& p : pts) t.rows.push_back(json::array({p.u, p.sum, p.residual}));
    return t;
}

inline Table prime_sum_table(const std::vector<PrimeSumPoint>& pts) {
    Table t{{"u", "sum", "ratio"}, {}};
    for (const auto& p : pts) t.rows.push_back(json::array({p.u, dec(p.sum), p.ratio}));
    return t;
}

inline Table series_table(const std::vector<SeriesReport>& pts) {
    Table t{{"limit", "partial_sum", "terms", "incomplete_terms", "incomplete_indices"}, {}};
    for (const auto& p : pts)
        t.rows.push_back(json::array({p.limit, static_cast<double>(p.partial_sum), p.terms, p.incomplete_terms, p.incomplete_indices}));
    return t;
}

inline Table sieve_ratio_table(const std::vector<SieveRatio>& pts) {
    Table t{{"x", "count", "bound_shape", "implied_constant"}, {}};
    for (const auto& p : pts) t.rows.push_back(json::array({p.x, p.count, p.bound_shape, p.implied_constant}));
    return t;
}

inline Table prime_power_table(const std::vector<PrimePowerCount>& pts) {
    Table t{{"x", "count", "normalized"}, {}};
    for (const auto& p : pts) t.rows.push_back(json::array({p.x, p.count, detail::finite_or_null(p.normalized)}));
    return t;
}

inline std::string density_csv(const DensityReport& r) {
    Table t{{"range_lo", "range_hi", "form", "c", "scanned", "representable", "non_representable",
             "smallest_non_representable"},
            {}};
    t.rows.push_back(json::array({r.range_lo, r.range_hi, std::string(form_name(r.form)), r.c, r.scanned,
                                  r.representable, r.non_representable, r.smallest_non_representable}));
    return t.to_csv();
}

}  // namespace p2ab
