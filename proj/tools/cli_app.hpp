#pragma once

// Command-line front end. Subcommands: construct, verify, scan, covers, series.
//
// Exit status: 0 success, 2 usage or invalid input, 3 feasibility / budget /
// regime, 4 correctness failure (audit, forced divisibility, covering violation).
// Errors are reported on stderr as a single JSON object.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "p2ab/analytics.hpp"
#include "p2ab/construct.hpp"
#include "p2ab/io.hpp"
#include "p2ab/represent.hpp"

namespace p2ab::cli {

enum Exit : int { kOk = 0, kUsage = 2, kBudget = 3, kCorrectness = 4 };

struct Budgets {
    std::uint64_t scan = 1'000'000'000;
    Effort effort;
    unsigned fermat_k = 8;
};

inline std::uint64_t parse_u64(std::string s) {
    // accepts 1000000, 1e6, 10^6
    auto digits = [](const std::string& t) {
        if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos)
            throw DomainError("not a natural number: '" + t + "'");
        return std::stoull(t);
    };
    std::size_t pos = s.find_first_of("eE");
    std::uint64_t base = 10;
    if (pos == std::string::npos && (pos = s.find('^')) != std::string::npos) {
        base = digits(s.substr(0, pos));
        s = "1" + s.substr(pos);
        pos = 1;
    }
    if (pos == std::string::npos) return digits(s);
    std::uint64_t v = digits(s.substr(0, pos));
    const std::uint64_t e = digits(s.substr(pos + 1));
    for (std::uint64_t i = 0; i < e; ++i) {
        if (v > UINT64_MAX / base) throw DomainError("number too large: '" + s + "'");
        v *= base;
    }
    return v;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, sep);)
        if (!item.empty()) out.push_back(item);
    return out;
}

inline Effort parse_effort(const std::string& s) {
    const auto parts = split(s, ':');
    if (parts.size() != 2) throw DomainError("effort must be TRIAL_BOUND:RHO_ITERATIONS");
    return Effort{.trial_bound = parse_u64(parts[0]), .rho_iterations = parse_u64(parts[1])};
}

// P2AB_BUDGET="scan=1e9,trial=1048576,rho=5e7,fermat_k=8"
inline Budgets budgets_from_env() {
    Budgets b;
    const char* env = std::getenv("P2AB_BUDGET");
    if (!env) return b;
    for (const auto& kv : split(env, ',')) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw DomainError("P2AB_BUDGET: expected key=value, got '" + kv + "'");
        const std::string key = kv.substr(0, eq);
        const std::uint64_t v = parse_u64(kv.substr(eq + 1));
        if (v == 0) throw DomainError("P2AB_BUDGET: budgets must be positive");
        if (key == "scan") b.scan = v;
        else if (key == "trial") b.effort.trial_bound = v;
        else if (key == "rho") b.effort.rho_iterations = v;
        else if (key == "fermat_k") b.fermat_k = static_cast<unsigned>(v);
        else throw DomainError("P2AB_BUDGET: unknown key '" + key + "'");
    }
    return b;
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw DomainError(path + ": " + e.what());
    }
}

struct Context {
    std::ostream& out;
    std::ostream& err;
    std::string out_path;

    void emit(const std::string& text) const {
        if (out_path.empty()) {
            out << text;
            return;
        }
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw DomainError("cannot write " + out_path);
        f << text;
    }
    void emit(const json& j) const { emit(j.dump(2) + "\n"); }
    // human-facing summary: stdout when the document went to a file
    std::ostream& note() const { return out_path.empty() ? err : out; }
};

inline std::string members_in_range(const Construction& c, const BigNat& x) {
    if (c.beta > x) return "0";
    return dec((x - c.beta) / c.period() + 1);
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"p2ab: odd integers versus p + 2^a + 2^b"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    std::string out_path, format = "json", effort_str;
    unsigned workers = 1;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", out_path, "Output file (default stdout)");
        sub->add_option("--effort", effort_str, "Factoring effort TRIAL_BOUND:RHO_ITERATIONS");
    };

    // construct
    auto* construct = app.add_subcommand("construct", "Build beta mod 2W from explicit or derived parameters");
    std::string x_str, params_file;
    construct->add_option("--x", x_str, "Target x for derived mode (decimal or e^e^e^V)");
    construct->add_option("--params-file", params_file, "JSON parameters (explicit or derived mode)");
    add_common(construct);

    // verify
    auto* verify = app.add_subcommand("verify", "Audit a construction and verify the forced cases over S ∩ [1, x]");
    std::string construction_file, verify_x;
    verify->add_option("--construction", construction_file, "Construction JSON")->required();
    verify->add_option("--x", verify_x, "Upper end of the scanned progression")->required();
    verify->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    add_common(verify);

    // scan
    auto* scan = app.add_subcommand("scan", "Count representable odd integers over a range");
    std::string range_str, form_str = "p+2^a+2^b";
    std::uint64_t c_mult = 1;
    scan->add_option("--range", range_str, "LO:HI")->required();
    scan->add_option("--form", form_str, "p+2^b | p+2^a+2^b | p+c(2^a+2^b) | p^alpha+2^a+2^b");
    scan->add_option("--c", c_mult, "Multiplier c for p+c(2^a+2^b)")->check(CLI::PositiveNumber);
    scan->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    scan->add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
    add_common(scan);

    // covers
    auto* covers = app.add_subcommand("covers", "Check the 7629217 mod 11184810 progression and the 2^(2^s)+1 identity");
    std::string limit_str = "100000000";
    unsigned max_b = 64;
    covers->add_option("--limit", limit_str, "Check progression members up to this bound");
    covers->add_option("--max-b", max_b, "Sweep 0 <= a < b <= MAX_B");
    add_common(covers);

    // series
    auto* series = app.add_subcommand("series", "Analytics tables, one row per point");
    std::string which, limits_str, primes_str, modulus_str = "1", residue_str = "1";
    double gamma = 0.0, mertens_b = kMertensB;
    series->add_option("which", which, "mertens | primesum | c3 | fls | l1 | l2 | ppow")
        ->required()
        ->check(CLI::IsMember({"mertens", "primesum", "c3", "fls", "l1", "l2", "ppow"}));
    series->add_option("--limit", limits_str, "Comma-separated evaluation points (u, limit or x)")->required();
    series->add_option("--gamma", gamma, "Exponent for fls (must be < 1/2)");
    series->add_option("--B", mertens_b, "Mertens constant for residuals");
    series->add_option("--modulus", modulus_str, "W for l1");
    series->add_option("--residue", residue_str, "beta for l1");
    series->add_option("--primes", primes_str, "Comma-separated primes for l2");
    series->add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
    add_common(series);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    Context ctx{out, err, out_path};
    auto fail = [&](const char* kind, const std::string& message, json extra, int code) {
        json j{{"error", kind}, {"message", message}};
        for (auto& [k, v] : extra.items()) j[k] = v;
        err << j.dump() << "\n";
        return code;
    };

    try {
        Budgets budgets = budgets_from_env();
        if (!effort_str.empty()) budgets.effort = parse_effort(effort_str);
        const FermatOptions fermat{.max_k = budgets.fermat_k};

        if (*construct) {
            if (x_str.empty() == params_file.empty())
                return fail("usage", "construct needs exactly one of --x or --params-file", json::object(), kUsage);
            json pj = params_file.empty() ? json{{"mode", "derived"}, {"x", x_str}} : read_json_file(params_file);
            ConstructionParams params;
            if (pj.value("mode", "explicit") == "derived") {
                SieveConstants consts = pj.contains("constants") ? SieveConstants{} : default_sieve_constants(budgets.effort);
                if (pj.contains("constants")) {
                    const auto& cj = pj["constants"];
                    consts.C1 = cj.value("C1", 1.0);
                    consts.C2 = cj.value("C2", 1.0);
                    consts.C3 = cj.contains("C3")
                                    ? cj["C3"].get<double>()
                                    : static_cast<double>(c3_partial(kDefaultC3Limit, budgets.effort).partial_sum);
                    consts.B = cj.value("B", kMertensB);
                }
                const json& xj = pj.at("x");
                params = derive_params(parse_scale(xj.is_string() ? xj.get<std::string>() : xj.dump()), consts);
                try {
                    params.m_count();
                } catch (const ResourceError& e) {
                    return fail("budget", e.what(),
                                {{"params", to_json(params)}, {"magnitude_chain", to_json(check_magnitude_chain(params))}},
                                kBudget);
                }
            } else {
                params = params_from_json(pj);
            }
            std::optional<std::vector<std::vector<std::uint64_t>>> blocks;
            if (pj.contains("blocks")) blocks = pj["blocks"].get<std::vector<std::vector<std::uint64_t>>>();
            const Construction c = build_construction(params, blocks, budgets.effort, fermat);
            json doc = to_json(c);
            ctx.emit(doc);
            std::ostream& note = ctx.note();
            note << "W = " << dec(c.W) << "\n";
            note << "beta = " << dec(c.beta) << "\n";
            if (c.params.x.exact_value())
                note << "|S ∩ [1, x]| = " << members_in_range(c, *c.params.x.exact_value()) << "\n";
            return kOk;
        }

        if (*verify) {
            const Construction c = construction_from_json(read_json_file(construction_file));
            const auto problems = audit(c, budgets.effort);
            if (!problems.empty()) return fail("audit", "construction failed its invariant audit", {{"problems", problems}}, kCorrectness);
            const std::uint64_t x = parse_u64(verify_x);
            const ProgressionReport rep =
                verify_progression(c, x, VerifyOptions{.max_x = budgets.scan, .workers = workers});
            json doc;
            doc["W"] = dec(c.W);
            doc["beta"] = dec(c.beta);
            doc["audit"] = "ok";
            doc["progression"] = to_json(rep);
            doc["magnitude_chain"] = to_json(check_magnitude_chain(c.params, &c));
            const double prod = companion_product(c);
            const double bound = std::exp(2.0 * default_sieve_constants(budgets.effort).C3);
            doc["companion_product"] = {{"value", prod}, {"bound_e^(2C3)", bound}, {"holds", prod <= bound}};
            ctx.emit(doc);
            if (!rep.clean())
                return fail("correctness", std::to_string(rep.failures.size()) + " forced-case divisibility failures",
                            json::object(), kCorrectness);
            return kOk;
        }

        if (*scan) {
            auto bounds = split(range_str, ':');
            if (bounds.size() != 2) bounds = split(range_str, ',');
            if (bounds.size() != 2) return fail("usage", "--range must be LO:HI", json::object(), kUsage);
            const Form form = parse_form(form_str);
            const DensityReport rep = scan_density(parse_u64(bounds[0]), parse_u64(bounds[1]), form, c_mult,
                                                   ScanOptions{.max_hi = budgets.scan, .workers = workers});
            ctx.emit(format == "csv" ? density_csv(rep) : to_json(rep).dump(2) + "\n");
            return kOk;
        }

        if (*covers) {
            const std::uint64_t limit = parse_u64(limit_str);
            if (limit < kErdosResidue) err << "warning: limit below 7629217, no progression members checked\n";
            const ErdosReport erdos = verify_erdos_progression(limit);
            const CrockerSweep crocker = crocker_sweep(max_b);
            ctx.emit(json{{"erdos", to_json(erdos)}, {"crocker", to_json(crocker)}});
            if (!erdos.violations.empty() || !crocker.failures.empty())
                return fail("correctness", "covering violation found", json::object(), kCorrectness);
            return kOk;
        }

        if (*series) {
            std::vector<std::uint64_t> points;
            for (const auto& s : split(limits_str, ',')) points.push_back(parse_u64(s));
            Table table;
            if (which == "mertens") {
                std::vector<MertensPoint> pts;
                for (auto u : points) pts.push_back(mertens_sum(u, mertens_b));
                table = mertens_table(pts);
            } else if (which == "primesum") {
                std::vector<PrimeSumPoint> pts;
                for (auto u : points) pts.push_back(prime_sum(u));
                table = prime_sum_table(pts);
            } else if (which == "c3" || which == "fls") {
                std::vector<SeriesReport> pts;
                for (auto l : points)
                    pts.push_back(which == "c3" ? c3_partial(l, budgets.effort) : fls_partial(l, gamma, budgets.effort));
                table = series_table(pts);
            } else if (which == "l1") {
                std::vector<SieveRatio> pts;
                for (auto x : points) {
                    if (x > budgets.scan) throw ResourceError("l1: x exceeds scan budget");
                    pts.push_back(sieve_ratio_l1(parse_big(modulus_str), parse_big(residue_str), x, budgets.effort));
                }
                table = sieve_ratio_table(pts);
            } else if (which == "l2") {
                std::vector<std::uint64_t> primes;
                for (const auto& s : split(primes_str, ',')) primes.push_back(parse_u64(s));
                std::vector<SieveRatio> pts;
                for (auto x : points) {
                    if (x > budgets.scan) throw ResourceError("l2: x exceeds scan budget");
                    pts.push_back(sieve_ratio_l2(x, primes));
                }
                table = sieve_ratio_table(pts);
            } else {
                std::vector<PrimePowerCount> pts;
                for (auto x : points) {
                    if (x > budgets.scan) throw ResourceError("ppow: x exceeds scan budget");
                    pts.push_back(prime_power_rep_count(x));
                }
                table = prime_power_table(pts);
            }
            ctx.emit(format == "csv" ? table.to_csv() : table.to_json().dump(2) + "\n");
            return kOk;
        }
    } catch (const RegimeError& e) {
        return fail("regime", e.what(), json::object(), kBudget);
    } catch (const FeasibilityError& e) {
        return fail("feasibility", e.what(), json::object(), kBudget);
    } catch (const ResourceError& e) {
        return fail("budget", e.what(), json::object(), kBudget);
    } catch (const ConsistencyError& e) {
        return fail("correctness", e.what(), json::object(), kCorrectness);
    } catch (const DomainError& e) {
        return fail("usage", e.what(), json::object(), kUsage);
    } catch (const json::exception& e) {
        return fail("usage", e.what(), json::object(), kUsage);
    }
    return kUsage;
}

}  // namespace p2ab::cli
