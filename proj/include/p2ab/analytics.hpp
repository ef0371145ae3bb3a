#pragma once

// Numerical companions to the construction: prime reciprocal sums, sums of
// primes, the series over 1/P(2^n - 1), and count-vs-bound ratios for the two
// upper-bound sieve estimates the argument relies on.

#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <vector>

#include "p2ab/arith.hpp"

namespace p2ab {

inline constexpr double kMertensB = 0.2614972;

struct MertensPoint {
    std::uint64_t u = 0;
    double sum = 0.0;       // sum of 1/p over primes p <= u
    double residual = 0.0;  // sum - log log u - B
};

inline MertensPoint mertens_sum(std::uint64_t u, double B = kMertensB, SieveBudget budget = {}) {
    if (u < 3) throw DomainError("mertens_sum: u must be >= 3");
    MertensPoint pt{.u = u};
    // ascending primes, summed in reverse so small terms accumulate first
    const auto primes = sieve_primes(u, budget);
    for (auto it = primes.rbegin(); it != primes.rend(); ++it) pt.sum += 1.0 / static_cast<double>(*it);
    pt.residual = pt.sum - std::log(std::log(static_cast<double>(u))) - B;
    return pt;
}

struct PrimeSumPoint {
    std::uint64_t u = 0;
    BigNat sum;
    double ratio = 0.0;  // sum / (u^2 / (2 log u))
};

inline PrimeSumPoint prime_sum(std::uint64_t u, SieveBudget budget = {}) {
    if (u < 3) throw DomainError("prime_sum: u must be >= 3");
    PrimeSumPoint pt{.u = u, .sum = 0};
    u128 acc = 0;
    for (std::uint64_t p : sieve_primes(u, budget)) acc += p;
    pt.sum = big(static_cast<std::uint64_t>(acc >> 64)) * pow2(64) + big(static_cast<std::uint64_t>(acc));
    const double ud = static_cast<double>(u);
    pt.ratio = pt.sum.get_d() / (ud * ud / (2.0 * std::log(ud)));
    return pt;
}

// ---------------------------------------------------------------------------
// Largest prime factor of 2^n - 1 for arbitrary n
// ---------------------------------------------------------------------------

struct LargestFactor {
    BigNat value;          // P(2^n - 1), or the best lower bound found
    bool complete = true;  // false: `value` is only the largest prime found
};

namespace detail {

inline int mobius(std::uint64_t n) {
    int mu = 1;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        n /= p;
        if (n % p == 0) return 0;
        mu = -mu;
    }
    return n > 1 ? -mu : mu;
}

inline std::vector<std::uint64_t> divisors(std::uint64_t n) {
    std::vector<std::uint64_t> lo, hi;
    for (std::uint64_t d = 1; d * d <= n; ++d)
        if (n % d == 0) {
            lo.push_back(d);
            if (d != n / d) hi.push_back(n / d);
        }
    lo.insert(lo.end(), hi.rbegin(), hi.rend());
    return lo;
}

struct LargestFactorCache {
    std::shared_mutex mu;
    std::map<std::pair<std::uint64_t, std::pair<std::uint64_t, std::uint64_t>>, LargestFactor> entries;
};

inline LargestFactorCache& largest_factor_cache() {
    static LargestFactorCache cache;
    return cache;
}

}  // namespace detail

// Phi_n(2), the n-th cyclotomic polynomial evaluated at 2.
inline BigNat cyclotomic_at_two(std::uint64_t n) {
    if (n == 0) throw DomainError("cyclotomic_at_two: n must be >= 1");
    BigNat num = 1, den = 1;
    for (std::uint64_t d : detail::divisors(n)) {
        const int mu = detail::mobius(n / d);
        if (mu > 0) num *= pow2(d) - 1;
        if (mu < 0) den *= pow2(d) - 1;
    }
    return num / den;
}

// P(2^n - 1) = max over d | n of P(Phi_d(2)). Prime n goes through the
// Mersenne-specific search; memoized.
inline LargestFactor largest_factor_2n_minus_1(std::uint64_t n, const Effort& effort = {}) {
    if (n < 2) throw DomainError("largest_factor_2n_minus_1: n must be >= 2");
    auto& cache = detail::largest_factor_cache();
    const auto key = std::make_pair(n, std::make_pair(effort.trial_bound, effort.rho_iterations));
    {
        std::shared_lock lock(cache.mu);
        if (auto it = cache.entries.find(key); it != cache.entries.end()) return it->second;
    }
    LargestFactor out{.value = 0, .complete = true};
    for (std::uint64_t d : detail::divisors(n)) {
        if (d == 1) continue;
        const FactorList fl = is_prime(d) ? cached_mersenne(d, effort) : factorize(cyclotomic_at_two(d), effort);
        if (!fl.complete) {
            out.complete = false;
            // every unfound prime factor exceeds the trial bound
            out.value = std::max(out.value, big(effort.trial_bound));
        }
        if (auto p = fl.largest_prime()) out.value = std::max(out.value, *p);
    }
    std::unique_lock lock(cache.mu);
    return cache.entries.emplace(key, out).first->second;
}

// ---------------------------------------------------------------------------
// Series
// ---------------------------------------------------------------------------

struct SeriesReport {
    std::uint64_t limit = 0;
    long double partial_sum = 0.0L;  // extended precision keeps tiny terms visible
    std::uint64_t terms = 0;
    std::uint64_t incomplete_terms = 0;
    std::vector<std::uint64_t> incomplete_indices;  // n (or p) whose term used the surrogate
};

// Sum over primes p <= limit of 1/P(2^p - 1). A term whose Mersenne number
// resists factoring contributes 1/(largest prime found), an upper bound, and
// is listed in incomplete_indices.
inline SeriesReport c3_partial(std::uint64_t limit, const Effort& effort = {}) {
    if (limit < 2) throw DomainError("c3_partial: limit must be >= 2");
    SeriesReport rep{.limit = limit};
    for (std::uint64_t p : sieve_primes(limit)) {
        const LargestFactor lf = largest_factor_2n_minus_1(p, effort);
        rep.partial_sum += 1.0L / static_cast<long double>(lf.value.get_d());
        ++rep.terms;
        if (!lf.complete) {
            ++rep.incomplete_terms;
            rep.incomplete_indices.push_back(p);
        }
    }
    return rep;
}

// Sum over 2 <= n <= limit of (log n)^gamma / P(2^n - 1), defined for gamma < 1/2.
inline SeriesReport fls_partial(std::uint64_t limit, double gamma, const Effort& effort = {}) {
    if (!(gamma < 0.5)) throw DomainError("fls_partial: gamma must be < 1/2");
    if (limit < 2) throw DomainError("fls_partial: limit must be >= 2");
    SeriesReport rep{.limit = limit};
    for (std::uint64_t n = 2; n <= limit; ++n) {
        const LargestFactor lf = largest_factor_2n_minus_1(n, effort);
        rep.partial_sum += static_cast<long double>(std::pow(std::log(static_cast<double>(n)), gamma)) /
                           static_cast<long double>(lf.value.get_d());
        ++rep.terms;
        if (!lf.complete) {
            ++rep.incomplete_terms;
            rep.incomplete_indices.push_back(n);
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Sieve bound ratios
// ---------------------------------------------------------------------------

struct SieveRatio {
    std::uint64_t x = 0;
    std::uint64_t count = 0;
    double bound_shape = 0.0;
    double implied_constant = 0.0;  // count / bound_shape
};

// #{1 <= n <= x : W n + beta prime} against (x / log x) prod_{p | W} (1 - 1/p)^-1.
inline SieveRatio sieve_ratio_l1(const BigNat& W, const BigNat& beta, std::uint64_t x, const Effort& effort = {}) {
    if (W < 1) throw DomainError("sieve_ratio_l1: W must be >= 1");
    if (x < 2) throw DomainError("sieve_ratio_l1: x must be >= 2");
    if (gcd(beta, W) != 1) throw DomainError("sieve_ratio_l1: gcd(beta, W) = " + dec(gcd(beta, W)) + " != 1");
    SieveRatio r{.x = x};
    const FactorList fl = factorize(W, effort);
    if (!fl.complete) throw IncompleteFactorization("sieve_ratio_l1: cannot factor W", dec(fl.cofactor));
    double euler = 1.0;
    for (const auto& f : fl.factors) euler /= 1.0 - 1.0 / f.prime.get_d();
    const double xd = static_cast<double>(x);
    r.bound_shape = xd / std::log(xd) * euler;

    BigNat v = W + beta;
    for (std::uint64_t n = 1; n <= x; ++n, v += W)
        if (is_prime(v)) ++r.count;
    r.implied_constant = static_cast<double>(r.count) / r.bound_shape;
    return r;
}

// #{1 <= n <= x : no p_j divides n} against x prod (1 - 1/p_j), with every
// p_j a distinct prime below x^(1/8).
inline SieveRatio sieve_ratio_l2(std::uint64_t x, const std::vector<std::uint64_t>& primes) {
    if (x < 1) throw DomainError("sieve_ratio_l2: x must be >= 1");
    for (std::size_t i = 0; i < primes.size(); ++i) {
        const std::uint64_t p = primes[i];
        if (!is_prime(p)) throw DomainError("sieve_ratio_l2: " + std::to_string(p) + " is not prime");
        for (std::size_t j = 0; j < i; ++j)
            if (primes[j] == p) throw DomainError("sieve_ratio_l2: duplicate prime " + std::to_string(p));
        u128 p8 = 1;
        for (int k = 0; k < 8; ++k) p8 *= p;
        if (p8 >= x) throw DomainError("sieve_ratio_l2: prime " + std::to_string(p) + " is not below x^(1/8)");
    }
    SieveRatio r{.x = x};
    r.bound_shape = static_cast<double>(x);
    for (std::uint64_t p : primes) r.bound_shape *= 1.0 - 1.0 / static_cast<double>(p);

    // mark multiples block by block
    constexpr std::uint64_t kBlock = std::uint64_t{1} << 20;
    std::vector<std::uint8_t> hit(kBlock);
    for (std::uint64_t lo = 1; lo <= x; lo += kBlock) {
        const std::uint64_t len = std::min(kBlock, x - lo + 1);
        std::fill(hit.begin(), hit.begin() + static_cast<std::ptrdiff_t>(len), 0);
        for (std::uint64_t p : primes)
            for (std::uint64_t m = (lo + p - 1) / p * p; m < lo + len; m += p) hit[m - lo] = 1;
        for (std::uint64_t i = 0; i < len; ++i) r.count += hit[i] == 0;
    }
    r.implied_constant = static_cast<double>(r.count) / r.bound_shape;
    return r;
}

struct PrimePowerCount {
    std::uint64_t x = 0;
    std::uint64_t count = 0;
    double normalized = 0.0;  // count / (sqrt(x) (log x)^3); NaN for x < 2
};

// Number of n <= x of the form p^alpha + 2^a + 2^b with alpha >= 2.
inline PrimePowerCount prime_power_rep_count(std::uint64_t x, SieveBudget budget = {}) {
    PrimePowerCount out{.x = x};
    if (x < 2) {
        out.normalized = std::nan("");
        return out;
    }
    if (x > budget.max_bytes) throw ResourceError("prime_power_rep_count: x exceeds memory budget");
    std::vector<bool> seen(x + 1, false);
    std::uint64_t root = 2;
    while ((root + 1) * (root + 1) <= x) ++root;
    for (std::uint64_t p : sieve_primes(std::max<std::uint64_t>(root, 2), budget)) {
        for (u128 pk = static_cast<u128>(p) * p; pk + 2 <= x; pk *= p) {
            for (unsigned a = 0; pk + (u128{2} << a) <= x; ++a)
                for (unsigned b = a; pk + (u128{1} << a) + (u128{1} << b) <= x; ++b)
                    seen[static_cast<std::uint64_t>(pk + (u128{1} << a) + (u128{1} << b))] = true;
        }
    }
    for (std::uint64_t n = 1; n <= x; ++n) out.count += seen[n];
    const double xd = static_cast<double>(x);
    out.normalized = static_cast<double>(out.count) / (std::sqrt(xd) * std::pow(std::log(xd), 3));
    return out;
}

}  // namespace p2ab
