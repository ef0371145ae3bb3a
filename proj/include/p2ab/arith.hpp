#pragma once

// Integer arithmetic used throughout the construction: primality, sieving,
// modular exponentiation, Pollard-rho factoring, Mersenne/Fermat factor
// searches and Chinese remaindering.
//
// Big naturals are GMP integers. Anything known to fit in 64 bits takes a
// native path (128-bit intermediate products) first.

#include <gmpxx.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "p2ab/errors.hpp"

namespace p2ab {

using BigNat = mpz_class;
using u128 = unsigned __int128;

inline bool fits_u64(const BigNat& n) { return sgn(n) >= 0 && mpz_fits_ulong_p(n.get_mpz_t()); }

inline std::uint64_t to_u64(const BigNat& n) {
    if (!fits_u64(n)) throw DomainError("value " + n.get_str() + " does not fit in 64 bits");
    return mpz_get_ui(n.get_mpz_t());
}

inline BigNat big(std::uint64_t v) { return BigNat(static_cast<unsigned long>(v)); }

inline std::string dec(const BigNat& n) { return n.get_str(10); }

inline BigNat parse_big(const std::string& s) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw DomainError("not a decimal natural: '" + s + "'");
    return BigNat(s, 10);
}

inline BigNat pow2(std::uint64_t e) {
    BigNat r;
    mpz_ui_pow_ui(r.get_mpz_t(), 2, e);
    return r;
}

// Natural log of a positive big integer, without overflowing a double.
inline double ln_big(const BigNat& n) {
    if (sgn(n) <= 0) throw DomainError("ln of non-positive value");
    long exp2 = 0;
    const double mant = mpz_get_d_2exp(&exp2, n.get_mpz_t());
    return std::log(mant) + static_cast<double>(exp2) * std::log(2.0);
}

// ---------------------------------------------------------------------------
// Modular arithmetic
// ---------------------------------------------------------------------------

inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

inline std::uint64_t mod_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t modulus) {
    if (modulus < 2) throw DomainError("mod_pow: modulus must be >= 2");
    std::uint64_t result = 1;
    base %= modulus;
    while (exp != 0) {
        if (exp & 1U) result = mul_mod(result, base, modulus);
        base = mul_mod(base, base, modulus);
        exp >>= 1U;
    }
    return result;
}

inline BigNat mod_pow(const BigNat& base, const BigNat& exp, const BigNat& modulus) {
    if (modulus < 2) throw DomainError("mod_pow: modulus must be >= 2");
    if (sgn(exp) < 0) throw DomainError("mod_pow: negative exponent");
    BigNat r;
    mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), modulus.get_mpz_t());
    return r;
}

// 2-adic valuation; v2(0) is undefined.
inline unsigned v2(std::uint64_t n) {
    if (n == 0) throw DomainError("v2(0) is undefined");
    return static_cast<unsigned>(std::countr_zero(n));
}

// ---------------------------------------------------------------------------
// Primality
// ---------------------------------------------------------------------------

namespace detail {

inline constexpr std::uint32_t kSmallPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37,
                                                 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};

inline bool strong_probable_prime(std::uint64_t n, std::uint64_t base) {
    std::uint64_t d = n - 1;
    const unsigned s = static_cast<unsigned>(std::countr_zero(d));
    d >>= s;
    std::uint64_t x = mod_pow(base % n, d, n);
    if (x == 1 || x == n - 1) return true;
    for (unsigned r = 1; r < s; ++r) {
        x = mul_mod(x, x, n);
        if (x == n - 1) return true;
    }
    return false;
}

inline bool strong_probable_prime(const BigNat& n, unsigned long base) {
    const BigNat n1 = n - 1;
    const mp_bitcnt_t s = mpz_scan1(n1.get_mpz_t(), 0);
    BigNat d;
    mpz_tdiv_q_2exp(d.get_mpz_t(), n1.get_mpz_t(), s);
    BigNat x;
    const BigNat b(base);
    mpz_powm(x.get_mpz_t(), b.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
    if (x == 1 || x == n1) return true;
    for (mp_bitcnt_t r = 1; r < s; ++r) {
        x = x * x % n;
        if (x == n1) return true;
    }
    return false;
}

inline void halve_mod(BigNat& v, const BigNat& n) {
    if (mpz_odd_p(v.get_mpz_t())) v += n;
    mpz_tdiv_q_2exp(v.get_mpz_t(), v.get_mpz_t(), 1);
}

inline void reduce(BigNat& v, const BigNat& n) {
    mpz_mod(v.get_mpz_t(), v.get_mpz_t(), n.get_mpz_t());
}

// Strong Lucas probable-prime test with Selfridge's parameter choice (method A).
// n must be odd, > 97 and not a perfect square.
inline bool strong_lucas_probable_prime(const BigNat& n) {
    long d_val = 5;
    for (;;) {
        const BigNat d_big(d_val);
        const int j = mpz_jacobi(d_big.get_mpz_t(), n.get_mpz_t());
        if (j == -1) break;
        if (j == 0) {
            BigNat g = gcd(BigNat(std::labs(d_val)), n);
            if (g != n) return false;
        }
        d_val = d_val > 0 ? -(d_val + 2) : -(d_val - 2);
    }
    const BigNat D(d_val);
    const BigNat P(1);
    BigNat Q((1 - d_val) / 4);
    reduce(Q, n);

    BigNat d = n + 1;
    const mp_bitcnt_t s = mpz_scan1(d.get_mpz_t(), 0);
    mpz_tdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);

    BigNat U(1), V(P), Qk(Q);
    const std::size_t bits = mpz_sizeinbase(d.get_mpz_t(), 2);
    BigNat tmp;
    for (std::size_t i = bits - 1; i-- > 0;) {
        U = U * V;
        reduce(U, n);
        V = V * V - 2 * Qk;
        reduce(V, n);
        Qk = Qk * Qk;
        reduce(Qk, n);
        if (mpz_tstbit(d.get_mpz_t(), i)) {
            tmp = P * U + V;
            V = D * U + P * V;
            U = tmp;
            reduce(U, n);
            reduce(V, n);
            halve_mod(U, n);
            halve_mod(V, n);
            Qk = Qk * Q;
            reduce(Qk, n);
        }
    }
    if (sgn(U) == 0 || sgn(V) == 0) return true;
    for (mp_bitcnt_t r = 1; r < s; ++r) {
        V = V * V - 2 * Qk;
        reduce(V, n);
        if (sgn(V) == 0) return true;
        Qk = Qk * Qk;
        reduce(Qk, n);
    }
    return false;
}

}  // namespace detail

// Deterministic for every 64-bit n: the first twelve prime bases are a
// complete witness set below 3.3e24.
inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint32_t p : detail::kSmallPrimes) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    if (n < 97ULL * 97ULL) return true;
    for (std::uint64_t base : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37})
        if (!detail::strong_probable_prime(n, base)) return false;
    return true;
}

// Above 64 bits: Baillie-PSW (strong base-2 test plus strong Lucas test).
inline bool is_prime(const BigNat& n) {
    if (sgn(n) < 0) return false;
    if (fits_u64(n)) return is_prime(to_u64(n));
    for (std::uint32_t p : detail::kSmallPrimes)
        if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return false;
    if (!detail::strong_probable_prime(n, 2)) return false;
    if (mpz_perfect_square_p(n.get_mpz_t())) return false;
    return detail::strong_lucas_probable_prime(n);
}

// ---------------------------------------------------------------------------
// Sieve
// ---------------------------------------------------------------------------

struct SieveBudget {
    std::size_t max_bytes = std::size_t{1} << 30;
};

// Odd-only segmented sieve of Eratosthenes. Returns every prime <= limit.
inline std::vector<std::uint64_t> sieve_primes(std::uint64_t limit, SieveBudget budget = {}) {
    if (limit < 2) throw DomainError("sieve_primes: limit must be >= 2");
    const double estimate = limit < 17 ? 8.0 : 1.3 * static_cast<double>(limit) / std::log(static_cast<double>(limit));
    constexpr std::size_t kSegment = std::size_t{1} << 18;
    const double bytes = estimate * sizeof(std::uint64_t) + kSegment;
    if (bytes > static_cast<double>(budget.max_bytes))
        throw ResourceError("sieve_primes: limit " + std::to_string(limit) + " needs ~" +
                            std::to_string(static_cast<std::uint64_t>(bytes)) + " bytes, budget is " +
                            std::to_string(budget.max_bytes));

    std::vector<std::uint64_t> primes{2};
    if (limit < 3) return primes;
    primes.reserve(static_cast<std::size_t>(estimate));

    std::uint64_t root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(limit)));
    while (root * root > limit) --root;
    while ((root + 1) * (root + 1) <= limit) ++root;

    // base primes up to sqrt(limit), plain sieve over odd numbers
    std::vector<std::uint64_t> base;
    {
        std::vector<bool> comp(root / 2 + 1, false);
        for (std::uint64_t i = 3; i <= root; i += 2) {
            if (comp[i / 2]) continue;
            base.push_back(i);
            for (std::uint64_t j = i * i; j <= root; j += 2 * i) comp[j / 2] = true;
        }
    }

    // segment index k covers the odd numbers 2k+1 in [lo, hi)
    std::vector<std::uint8_t> seg(kSegment);
    for (std::uint64_t lo = 3; lo <= limit; lo += 2 * kSegment) {
        const std::uint64_t hi = std::min<std::uint64_t>(limit + 1, lo + 2 * kSegment);
        std::fill(seg.begin(), seg.end(), 1);
        for (std::uint64_t p : base) {
            if (p * p >= hi) break;
            std::uint64_t start = std::max(p * p, (lo + p - 1) / p * p);
            if (start % 2 == 0) start += p;
            for (std::uint64_t j = start; j < hi; j += 2 * p) seg[(j - lo) / 2] = 0;
        }
        for (std::uint64_t n = lo; n < hi; n += 2)
            if (seg[(n - lo) / 2]) primes.push_back(n);
    }
    return primes;
}

// ---------------------------------------------------------------------------
// Factorization
// ---------------------------------------------------------------------------

// Factoring effort: trial division bound, then a cap on Pollard-rho iterations
// (polynomial evaluations) shared by the whole call.
struct Effort {
    std::uint64_t trial_bound = std::uint64_t{1} << 20;
    std::uint64_t rho_iterations = 50'000'000;

    friend bool operator==(const Effort&, const Effort&) = default;
};

struct PrimePower {
    BigNat prime;
    unsigned exponent = 1;
};

// Complete-or-partial factorization: n = prod(prime^exponent) * cofactor.
struct FactorList {
    BigNat n;
    std::vector<PrimePower> factors;  // strictly increasing primes
    BigNat cofactor = 1;              // unfactored part, 1 when complete
    bool complete = true;

    BigNat recompose() const {
        BigNat r = cofactor;
        for (const auto& f : factors) {
            BigNat pk;
            mpz_pow_ui(pk.get_mpz_t(), f.prime.get_mpz_t(), f.exponent);
            r *= pk;
        }
        return r;
    }

    std::optional<BigNat> largest_prime() const {
        if (factors.empty()) return std::nullopt;
        return factors.back().prime;
    }
};

namespace detail {

// Brent's cycle finding on x -> x^2 + c mod n, starting at 2, with products
// of differences accumulated over runs of 128 steps between gcds.
// Returns a nontrivial divisor or 0 when this c fails or the budget runs out.
inline std::uint64_t rho_brent(std::uint64_t n, std::uint64_t c, std::uint64_t& budget) {
    constexpr std::uint64_t kBatch = 128;
    auto f = [&](std::uint64_t v) { return static_cast<std::uint64_t>((static_cast<u128>(v) * v + c) % n); };
    std::uint64_t y = 2 % n, x = y, ys = y, q = 1, g = 1;
    for (std::uint64_t r = 1; g == 1; r <<= 1U) {
        x = y;
        for (std::uint64_t i = 0; i < r; ++i) y = f(y);
        if (budget < r) return 0;
        budget -= r;
        for (std::uint64_t k = 0; k < r && g == 1; k += kBatch) {
            ys = y;
            const std::uint64_t steps = std::min(kBatch, r - k);
            if (budget < steps) return 0;
            budget -= steps;
            for (std::uint64_t i = 0; i < steps; ++i) {
                y = f(y);
                q = mul_mod(q, x > y ? x - y : y - x, n);
            }
            g = std::gcd(q, n);
        }
    }
    if (g == n) {
        do {
            if (budget == 0) return 0;
            --budget;
            ys = f(ys);
            g = std::gcd(x > ys ? x - ys : ys - x, n);
        } while (g == 1);
    }
    return g == n ? 0 : g;
}

inline BigNat rho_brent(const BigNat& n, unsigned long c, std::uint64_t& budget) {
    constexpr std::uint64_t kBatch = 128;
    BigNat y = 2, x, ys, q = 1, g = 1, diff;
    auto step = [&](BigNat& v) {
        mpz_mul(v.get_mpz_t(), v.get_mpz_t(), v.get_mpz_t());
        mpz_add_ui(v.get_mpz_t(), v.get_mpz_t(), c);
        mpz_mod(v.get_mpz_t(), v.get_mpz_t(), n.get_mpz_t());
    };
    for (std::uint64_t r = 1; g == 1; r <<= 1U) {
        x = y;
        if (budget < r) return 0;
        budget -= r;
        for (std::uint64_t i = 0; i < r; ++i) step(y);
        for (std::uint64_t k = 0; k < r && g == 1; k += kBatch) {
            ys = y;
            const std::uint64_t steps = std::min(kBatch, r - k);
            if (budget < steps) return 0;
            budget -= steps;
            for (std::uint64_t i = 0; i < steps; ++i) {
                step(y);
                mpz_sub(diff.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
                mpz_mul(q.get_mpz_t(), q.get_mpz_t(), diff.get_mpz_t());
                mpz_mod(q.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
            }
            mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
        }
    }
    if (g == n) {
        do {
            if (budget == 0) return 0;
            --budget;
            step(ys);
            mpz_sub(diff.get_mpz_t(), x.get_mpz_t(), ys.get_mpz_t());
            mpz_gcd(g.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
        } while (g == 1);
    }
    return g == n ? BigNat(0) : g;
}

// Tries c = 1, 2, 3, ... until a split is found or the budget is spent.
inline std::optional<BigNat> split_composite(const BigNat& n, std::uint64_t& budget) {
    if (mpz_even_p(n.get_mpz_t())) return BigNat(2);
    if (mpz_perfect_power_p(n.get_mpz_t())) {
        for (unsigned long k = 2;; ++k) {
            BigNat root;
            if (mpz_root(root.get_mpz_t(), n.get_mpz_t(), k) != 0) return root;
        }
    }
    for (unsigned long c = 1; budget > 0; ++c) {
        if (fits_u64(n)) {
            const std::uint64_t d = rho_brent(to_u64(n), c, budget);
            if (d != 0) return big(d);
        } else {
            BigNat d = rho_brent(n, c, budget);
            if (sgn(d) != 0) return d;
        }
    }
    return std::nullopt;
}

inline void add_prime(std::map<BigNat, unsigned>& acc, const BigNat& p, unsigned e = 1) { acc[p] += e; }

// Splits `n` completely into `primes` if the budget allows; leftover composites go to `stuck`.
inline void split_recursive(const BigNat& n, std::uint64_t& budget, std::map<BigNat, unsigned>& primes,
                            std::vector<BigNat>& stuck) {
    if (n == 1) return;
    if (is_prime(n)) {
        add_prime(primes, n);
        return;
    }
    auto d = split_composite(n, budget);
    if (!d) {
        stuck.push_back(n);
        return;
    }
    BigNat other = n / *d;
    split_recursive(*d, budget, primes, stuck);
    split_recursive(other, budget, primes, stuck);
}

inline FactorList finish(const BigNat& n, std::map<BigNat, unsigned> primes, BigNat cofactor,
                         std::uint64_t& budget) {
    std::vector<BigNat> stuck;
    split_recursive(cofactor, budget, primes, stuck);
    FactorList out;
    out.n = n;
    out.cofactor = 1;
    for (const auto& s : stuck) out.cofactor *= s;
    out.complete = stuck.empty();
    for (auto& [p, e] : primes) out.factors.push_back({p, e});
    return out;
}

}  // namespace detail

// Trial division up to effort.trial_bound, then Pollard-rho (Brent) on what is
// left. Deterministic: identical inputs always give identical outputs.
inline FactorList factorize(const BigNat& n, const Effort& effort = {}) {
    if (n < 1) throw DomainError("factorize: n must be >= 1");
    std::map<BigNat, unsigned> primes;
    BigNat rest = n;
    std::uint64_t budget = effort.rho_iterations;
    for (std::uint64_t d = 2; d <= effort.trial_bound; d += (d == 2 ? 1 : 2)) {
        if (rest == 1) break;
        if (BigNat(static_cast<unsigned long>(d)) * d > rest) {
            detail::add_prime(primes, rest);
            rest = 1;
            break;
        }
        unsigned e = 0;
        while (mpz_divisible_ui_p(rest.get_mpz_t(), d)) {
            mpz_divexact_ui(rest.get_mpz_t(), rest.get_mpz_t(), d);
            ++e;
        }
        if (e) detail::add_prime(primes, big(d), e);
    }
    return detail::finish(n, std::move(primes), rest, budget);
}

// ---------------------------------------------------------------------------
// Mersenne and Fermat factor searches
// ---------------------------------------------------------------------------

// Factorization of 2^p - 1 for prime p. Trial candidates are restricted to
// q = 2kp + 1, the only possible prime divisors when p is an odd prime.
inline FactorList factorize_mersenne(std::uint64_t p, const Effort& effort = {}) {
    if (!is_prime(p)) throw DomainError("factorize_mersenne: exponent " + std::to_string(p) + " is not prime");
    const BigNat n = pow2(p) - 1;
    std::map<BigNat, unsigned> primes;
    std::uint64_t budget = effort.rho_iterations;
    if (p == 2 || is_prime(n)) {
        FactorList out;
        out.n = n;
        out.factors.push_back({n, 1});
        return out;
    }
    BigNat rest = n;
    const std::uint64_t step = 2 * p;
    for (std::uint64_t q = step + 1; q <= effort.trial_bound; q += step) {
        if (BigNat(static_cast<unsigned long>(q)) * q > rest) break;
        if (mod_pow(2, p, q) != 1) continue;
        // every smaller prime divisor is already gone, so q itself is prime
        while (mpz_divisible_ui_p(rest.get_mpz_t(), q)) {
            mpz_divexact_ui(rest.get_mpz_t(), rest.get_mpz_t(), q);
            detail::add_prime(primes, big(q));
        }
        if (rest == 1) break;
    }
    return detail::finish(n, std::move(primes), rest, budget);
}

namespace detail {

struct MersenneCache {
    std::shared_mutex mu;
    std::map<std::pair<std::uint64_t, std::pair<std::uint64_t, std::uint64_t>>, FactorList> entries;
};

inline MersenneCache& mersenne_cache() {
    static MersenneCache cache;
    return cache;
}

}  // namespace detail

// Memoized factorize_mersenne; safe for concurrent use.
inline FactorList cached_mersenne(std::uint64_t p, const Effort& effort = {}) {
    auto& cache = detail::mersenne_cache();
    const auto key = std::make_pair(p, std::make_pair(effort.trial_bound, effort.rho_iterations));
    {
        std::shared_lock lock(cache.mu);
        if (auto it = cache.entries.find(key); it != cache.entries.end()) return it->second;
    }
    FactorList fl = factorize_mersenne(p, effort);
    std::unique_lock lock(cache.mu);
    return cache.entries.emplace(key, std::move(fl)).first->second;
}

// P(2^p - 1). Throws IncompleteFactorization if the effort does not suffice
// to prove which prime factor is largest.
inline BigNat mersenne_largest_prime_factor(std::uint64_t p, const Effort& effort = {}) {
    const FactorList fl = cached_mersenne(p, effort);
    if (!fl.complete)
        throw IncompleteFactorization("2^" + std::to_string(p) + "-1 not completely factored", dec(fl.cofactor));
    return *fl.largest_prime();
}

struct FermatOptions {
    unsigned max_k = 8;
    std::uint64_t trial_bound = std::uint64_t{1} << 32;
    std::uint64_t rho_iterations = 2'000'000'000;
};

// Smallest prime factor of 2^(2^k) + 1. For k >= 2 every prime factor is
// 1 mod 2^(k+2), so the first candidate of that shape that divides is prime.
inline BigNat fermat_smallest_prime_factor(unsigned k, const FermatOptions& opt = {}) {
    if (k > opt.max_k)
        throw ResourceError("fermat_smallest_prime_factor: k=" + std::to_string(k) + " exceeds feasibility bound " +
                            std::to_string(opt.max_k));
    const BigNat n = pow2(std::uint64_t{1} << k) + 1;
    if (k < 2) return n;  // 3 and 5
    const std::uint64_t step = std::uint64_t{1} << (k + 2);
    for (std::uint64_t q = step + 1; q <= opt.trial_bound; q += step) {
        if (BigNat(static_cast<unsigned long>(q)) * q > n) return n;
        if (mpz_divisible_ui_p(n.get_mpz_t(), q)) return big(q);
    }
    FactorList fl = factorize(n, Effort{.trial_bound = 2, .rho_iterations = opt.rho_iterations});
    if (!fl.complete)
        throw IncompleteFactorization("2^(2^" + std::to_string(k) + ")+1 not completely factored", dec(fl.cofactor));
    return fl.factors.front().prime;
}

// ---------------------------------------------------------------------------
// Chinese remaindering
// ---------------------------------------------------------------------------

struct ResidueClass {
    BigNat residue = 0;
    BigNat modulus = 1;

    ResidueClass() = default;
    ResidueClass(BigNat r, BigNat m) : residue(std::move(r)), modulus(std::move(m)) {
        if (modulus < 1) throw DomainError("ResidueClass: modulus must be >= 1");
        if (sgn(residue) < 0 || residue >= modulus)
            throw DomainError("ResidueClass: residue " + dec(residue) + " not in [0, " + dec(modulus) + ")");
    }

    // Builds the class of an arbitrary integer value, reducing it first.
    static ResidueClass of(const BigNat& value, const BigNat& modulus) {
        if (modulus < 1) throw DomainError("ResidueClass: modulus must be >= 1");
        BigNat r;
        mpz_mod(r.get_mpz_t(), value.get_mpz_t(), modulus.get_mpz_t());
        return {r, modulus};
    }

    friend bool operator==(const ResidueClass& a, const ResidueClass& b) {
        return a.residue == b.residue && a.modulus == b.modulus;
    }
};

// Combines classes with pairwise coprime moduli into one class modulo their
// product. Throws DomainError naming the first offending pair otherwise.
inline ResidueClass crt(std::span<const ResidueClass> classes) {
    for (std::size_t i = 0; i < classes.size(); ++i)
        for (std::size_t j = i + 1; j < classes.size(); ++j) {
            const BigNat g = gcd(classes[i].modulus, classes[j].modulus);
            if (g != 1)
                throw DomainError("crt: moduli #" + std::to_string(i) + " (" + dec(classes[i].modulus) + ") and #" +
                                  std::to_string(j) + " (" + dec(classes[j].modulus) + ") share factor " + dec(g));
        }
    BigNat r = 0, m = 1;
    for (const auto& c : classes) {
        // r + m*t = c.residue (mod c.modulus)
        BigNat inv;
        if (c.modulus == 1) continue;
        mpz_invert(inv.get_mpz_t(), BigNat(m % c.modulus).get_mpz_t(), c.modulus.get_mpz_t());
        BigNat t = (c.residue - r) * inv;
        mpz_mod(t.get_mpz_t(), t.get_mpz_t(), c.modulus.get_mpz_t());
        r += m * t;
        m *= c.modulus;
    }
    return {r, m};
}

inline ResidueClass crt(std::initializer_list<ResidueClass> classes) {
    return crt(std::span<const ResidueClass>(classes.begin(), classes.size()));
}

// ---------------------------------------------------------------------------
// Orders
// ---------------------------------------------------------------------------

// Multiplicative order of 2 modulo an odd prime q, given the factorization of q - 1.
inline BigNat order_of_two(const BigNat& q, const Effort& effort = {}) {
    if (q < 3 || mpz_even_p(q.get_mpz_t())) throw DomainError("order_of_two: modulus must be an odd prime");
    const FactorList fl = factorize(q - 1, effort);
    if (!fl.complete) throw IncompleteFactorization("order_of_two: cannot factor q-1", dec(fl.cofactor));
    BigNat ord = q - 1;
    for (const auto& f : fl.factors)
        for (unsigned e = 0; e < f.exponent; ++e) {
            if (mod_pow(BigNat(2), ord / f.prime, q) != 1) break;
            ord /= f.prime;
        }
    return ord;
}

}  // namespace p2ab
