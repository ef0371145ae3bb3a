#pragma once

// Brute-force representability of odd integers as
//   p + 2^b,   p + c(2^a + 2^b),   p^alpha + 2^a + 2^b
// together with range scanners and the two classical covering checks
// (the 7629217 mod 11184810 progression and 2^a + 2^b = 0 mod 2^(2^s) + 1).
//
// Integers here are 64-bit: every range this module scans is bounded by a
// budget far below 2^62.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "p2ab/arith.hpp"
#include "p2ab/parallel.hpp"

namespace p2ab {

enum class Form {
    p_2b,         // p + 2^b
    p_2a_2b,      // p + c(2^a + 2^b); c = 1 is the plain form
    ppow_2a_2b,   // p^alpha + 2^a + 2^b
};

inline std::string_view form_name(Form f) {
    switch (f) {
        case Form::p_2b: return "p+2^b";
        case Form::p_2a_2b: return "p+c(2^a+2^b)";
        case Form::ppow_2a_2b: return "p^alpha+2^a+2^b";
    }
    return "?";
}

inline Form parse_form(std::string_view s) {
    if (s == "p+2^b" || s == "p2b") return Form::p_2b;
    if (s == "p+2^a+2^b" || s == "p+c(2^a+2^b)" || s == "p2a2b") return Form::p_2a_2b;
    if (s == "p^alpha+2^a+2^b" || s == "p^k+2^a+2^b" || s == "ppow2a2b") return Form::ppow_2a_2b;
    throw DomainError("unknown form '" + std::string(s) + "'");
}

// n = p^alpha + c(2^a + 2^b). `a` is empty for the single-power form p + 2^b.
struct RepWitness {
    std::uint64_t p = 0;
    unsigned alpha = 1;
    std::optional<unsigned> a;
    unsigned b = 0;
    std::uint64_t c = 1;

    u128 recompose() const {
        u128 pk = 1;
        for (unsigned i = 0; i < alpha; ++i) pk *= p;
        const u128 powers = (a ? (u128{1} << *a) : u128{0}) + (u128{1} << b);
        return pk + static_cast<u128>(c) * powers;
    }

    friend bool operator==(const RepWitness&, const RepWitness&) = default;
};

namespace detail {

inline void require_odd(std::uint64_t n, const char* op) {
    if (n % 2 == 0) throw DomainError(std::string(op) + ": n must be odd, got " + std::to_string(n));
}

// Largest r with r^k <= n.
inline std::uint64_t iroot(std::uint64_t n, unsigned k) {
    if (k == 1 || n < 2) return n;
    auto pow_le = [&](std::uint64_t r) {  // r^k <= n without overflow
        u128 acc = 1;
        for (unsigned i = 0; i < k; ++i) {
            acc *= r;
            if (acc > n) return false;
        }
        return true;
    };
    std::uint64_t r = static_cast<std::uint64_t>(std::pow(static_cast<double>(n), 1.0 / k));
    while (r > 0 && !pow_le(r)) --r;
    while (pow_le(r + 1)) ++r;
    return r;
}

// (p, alpha) with p^alpha == n, p prime; empty if n is not a prime power.
inline std::optional<std::pair<std::uint64_t, unsigned>> prime_power(std::uint64_t n) {
    if (n < 2) return std::nullopt;
    if (is_prime(n)) return std::pair{n, 1U};
    for (unsigned k = 2; (std::uint64_t{1} << k) <= n && k < 64; ++k) {
        const std::uint64_t r = iroot(n, k);
        u128 acc = 1;
        for (unsigned i = 0; i < k; ++i) acc *= r;
        if (acc == n && is_prime(r)) return std::pair{r, k};
    }
    return std::nullopt;
}

}  // namespace detail

// Smallest b with n - 2^b prime.
inline std::optional<RepWitness> find_rep_p2b(std::uint64_t n) {
    detail::require_odd(n, "find_rep_p2b");
    for (unsigned b = 0; b < 64 && (std::uint64_t{1} << b) < n; ++b) {
        const std::uint64_t p = n - (std::uint64_t{1} << b);
        if (is_prime(p)) return RepWitness{.p = p, .alpha = 1, .a = std::nullopt, .b = b, .c = 1};
    }
    return std::nullopt;
}

// Lexicographically smallest (a, b) with a <= b and n - c(2^a + 2^b) prime.
inline std::optional<RepWitness> find_rep_p2a2b(std::uint64_t n, std::uint64_t c = 1) {
    detail::require_odd(n, "find_rep_p2a2b");
    if (c < 1) throw DomainError("find_rep_p2a2b: c must be >= 1");
    for (unsigned a = 0; a < 64 && static_cast<u128>(c) << (a + 1) < n; ++a) {
        for (unsigned b = a; b < 64; ++b) {
            const u128 v = static_cast<u128>(c) * ((u128{1} << a) + (u128{1} << b));
            if (v >= n) break;
            const std::uint64_t p = n - static_cast<std::uint64_t>(v);
            if (is_prime(p)) return RepWitness{.p = p, .alpha = 1, .a = a, .b = b, .c = c};
        }
    }
    return std::nullopt;
}

// Same search with prime powers allowed. For fixed (a, b) the remainder is a
// prime power in at most one way, so ordering by (a, b) settles the tie-break.
inline std::optional<RepWitness> find_rep_ppow2a2b(std::uint64_t n) {
    detail::require_odd(n, "find_rep_ppow2a2b");
    for (unsigned a = 0; a < 63 && (std::uint64_t{1} << (a + 1)) < n; ++a) {
        for (unsigned b = a; b < 63; ++b) {
            const u128 v = (u128{1} << a) + (u128{1} << b);
            if (v >= n) break;
            if (auto pp = detail::prime_power(n - static_cast<std::uint64_t>(v)))
                return RepWitness{.p = pp->first, .alpha = pp->second, .a = a, .b = b, .c = 1};
        }
    }
    return std::nullopt;
}

inline std::optional<RepWitness> find_rep(Form form, std::uint64_t n, std::uint64_t c = 1) {
    switch (form) {
        case Form::p_2b: return find_rep_p2b(n);
        case Form::p_2a_2b: return find_rep_p2a2b(n, c);
        case Form::ppow_2a_2b: return find_rep_ppow2a2b(n);
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Density scans
// ---------------------------------------------------------------------------

struct ScanOptions {
    std::uint64_t max_hi = 1'000'000'000;   // scan budget
    unsigned workers = 1;
    std::size_t list_cap = 100;
};

struct DensityReport {
    std::uint64_t range_lo = 0;
    std::uint64_t range_hi = 0;
    Form form = Form::p_2a_2b;
    std::uint64_t c = 1;
    std::uint64_t scanned = 0;
    std::uint64_t representable = 0;
    std::uint64_t non_representable = 0;
    std::vector<std::uint64_t> smallest_non_representable;  // ascending, at most list_cap
};

inline std::uint64_t count_odd(std::uint64_t lo, std::uint64_t hi) {
    if (lo > hi) return 0;
    return (hi + 1) / 2 - lo / 2;
}

// Applies the form's finder to every odd n in [lo, hi]. Work is split into
// fixed chunks of odd numbers; chunk results merge by range start, so the
// report is identical for any worker count.
inline DensityReport scan_density(std::uint64_t lo, std::uint64_t hi, Form form, std::uint64_t c = 1,
                                  const ScanOptions& opt = {}) {
    if (lo < 1 || lo > hi) throw DomainError("scan_density: need 1 <= lo <= hi");
    if (hi > opt.max_hi)
        throw ResourceError("scan_density: range end " + std::to_string(hi) + " exceeds scan budget " +
                            std::to_string(opt.max_hi));
    if (c < 1) throw DomainError("scan_density: c must be >= 1");
    if (c != 1 && form != Form::p_2a_2b) throw DomainError("scan_density: c applies only to p+c(2^a+2^b)");

    DensityReport rep{.range_lo = lo, .range_hi = hi, .form = form, .c = c};
    const std::uint64_t first = lo | 1U;
    const std::uint64_t odd_count = count_odd(lo, hi);
    constexpr std::uint64_t kChunk = 1U << 14;
    const std::size_t chunks = static_cast<std::size_t>((odd_count + kChunk - 1) / kChunk);

    struct Partial {
        std::uint64_t representable = 0;
        std::vector<std::uint64_t> missing;
        std::uint64_t missing_total = 0;
    };
    std::vector<Partial> parts(chunks);
    for_each_chunk(chunks, opt.workers, [&](std::size_t ci) {
        Partial& part = parts[ci];
        const std::uint64_t begin = ci * kChunk;
        const std::uint64_t end = std::min<std::uint64_t>(odd_count, begin + kChunk);
        for (std::uint64_t k = begin; k < end; ++k) {
            const std::uint64_t n = first + 2 * k;
            if (find_rep(form, n, c)) {
                ++part.representable;
            } else {
                ++part.missing_total;
                if (part.missing.size() < opt.list_cap) part.missing.push_back(n);
            }
        }
    });

    rep.scanned = odd_count;
    for (const auto& part : parts) {
        rep.representable += part.representable;
        rep.non_representable += part.missing_total;
        for (std::uint64_t n : part.missing)
            if (rep.smallest_non_representable.size() < opt.list_cap) rep.smallest_non_representable.push_back(n);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Covering checks
// ---------------------------------------------------------------------------

inline constexpr std::uint64_t kErdosResidue = 7629217;
inline constexpr std::uint64_t kErdosModulus = 11184810;  // 2*3*5*7*13*17*241

struct ErdosReport {
    std::uint64_t limit = 0;
    std::uint64_t checked = 0;
    std::vector<std::pair<std::uint64_t, RepWitness>> violations;
};

// Every n = 7629217 (mod 11184810), n <= limit, must have no p + 2^b form.
inline ErdosReport verify_erdos_progression(std::uint64_t limit) {
    ErdosReport rep{.limit = limit};
    for (std::uint64_t n = kErdosResidue; n <= limit; n += kErdosModulus) {
        ++rep.checked;
        if (auto w = find_rep_p2b(n)) rep.violations.emplace_back(n, *w);
    }
    return rep;
}

struct CrockerResult {
    unsigned s = 0;
    BigNat modulus;  // 2^(2^s) + 1
    bool divides = false;
};

// If b - a = 2^s t with t odd then 2^(2^s) + 1 divides 2^a + 2^b.
inline CrockerResult crocker_divisibility(unsigned a, unsigned b) {
    if (a >= b) throw DomainError("crocker_divisibility: need a < b");
    CrockerResult r;
    r.s = v2(b - a);
    r.modulus = pow2(std::uint64_t{1} << r.s) + 1;
    const BigNat sum = pow2(a) + pow2(b);
    r.divides = mpz_divisible_p(sum.get_mpz_t(), r.modulus.get_mpz_t()) != 0;
    return r;
}

struct CrockerSweep {
    unsigned max_b = 0;
    std::uint64_t checked = 0;
    std::vector<std::pair<unsigned, unsigned>> failures;
};

inline CrockerSweep crocker_sweep(unsigned max_b = 64) {
    CrockerSweep sw{.max_b = max_b};
    for (unsigned b = 1; b <= max_b; ++b)
        for (unsigned a = 0; a < b; ++a) {
            ++sw.checked;
            if (!crocker_divisibility(a, b).divides) sw.failures.emplace_back(a, b);
        }
    return sw;
}

}  // namespace p2ab
