#pragma once

// Builds an arithmetic progression beta mod 2W whose members resist the form
// p + 2^a + 2^b, and checks the case analysis that forces p to be a divisor
// of W for most exponent pairs (a, b).
//
//   W1,i  product of q_{i,j} = P(2^p_{i,j} - 1) over the primes of block i
//   W2    product of gamma_k, the smallest prime factor of 2^(2^k) + 1, k < m
//   beta  = 2^(2^m (i-1)) + 1  (mod W1,i)  for i <= K'
//         = 1                  (mod W1,i)  for K' < i <= K
//         = 0                  (mod gamma_k)
//         = 1                  (mod 2)
//
// Two parameter modes exist. Derived mode evaluates the asymptotic formulas
// for K, L, u, m, K' from x; it only yields K >= 2 for x far beyond anything
// that can be instantiated, so it is evaluated in log space. Explicit mode
// takes the parameters directly and is what actually gets built.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <tuple>
#include <string>
#include <vector>

#include "p2ab/analytics.hpp"
#include "p2ab/arith.hpp"
#include "p2ab/parallel.hpp"

namespace p2ab {

// Decimal text for long doubles beyond double range (derived-mode m, ln ln x).
inline std::string format_wide(long double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10Lg", v);
    return buf;
}

// A target bound x, either an exact integer or a tower e^e^e^v given by its
// triple logarithm v.
class Scale {
public:
    static Scale exact(BigNat x) {
        if (x < 1) throw DomainError("Scale: x must be >= 1");
        Scale s;
        s.exact_ = std::move(x);
        return s;
    }
    static Scale tower(long double lnlnln) {
        Scale s;
        s.lnlnln_ = lnlnln;
        return s;
    }

    const std::optional<BigNat>& exact_value() const { return exact_; }
    long double tower_top() const { return lnlnln_; }

    long double ln() const { return exact_ ? static_cast<long double>(ln_big(*exact_)) : std::exp(lnln()); }
    long double lnln() const { return exact_ ? std::log(ln()) : std::exp(lnlnln_); }
    long double lnlnln() const { return exact_ ? std::log(lnln()) : lnlnln_; }

    std::string describe() const {
        return exact_ ? dec(*exact_) : "e^e^e^" + format_wide(lnlnln_);
    }

private:
    std::optional<BigNat> exact_;
    long double lnlnln_ = 0.0L;
};

// Parses "1000000" or "e^e^e^1500".
inline Scale parse_scale(const std::string& s) {
    constexpr std::string_view kTower = "e^e^e^";
    if (s.rfind(kTower, 0) == 0) {
        try {
            return Scale::tower(std::stold(s.substr(kTower.size())));
        } catch (const std::logic_error&) {
            throw DomainError("bad tower value in '" + s + "'");
        }
    }
    return Scale::exact(parse_big(s));
}

struct SieveConstants {
    double C1 = 1.0;
    double C2 = 1.0;
    double C3 = 0.0;
    double B = kMertensB;
};

inline constexpr std::uint64_t kDefaultC3Limit = 101;

// C1 = C2 = 1 placeholders; C3 from the partial sum over primes <= 101.
inline SieveConstants default_sieve_constants(const Effort& effort = {}) {
    return SieveConstants{.C3 = static_cast<double>(c3_partial(kDefaultC3Limit, effort).partial_sum)};
}

enum class ParamMode { derived, explicit_ };

struct ConstructionParams {
    ParamMode mode = ParamMode::explicit_;
    Scale x = Scale::exact(1);
    unsigned K = 1;
    double L = 0.0;
    long double log_log_u = 0.0L;  // u = exp(exp(log_log_u))
    long double m = 0.0L;          // an integer; only exact below 2^63
    unsigned K_prime = 1;
    bool precision_limited = false;  // derived m too large for K' to be resolved exactly

    long double u() const { return std::exp(std::exp(log_log_u)); }

    // m as a usable count; fails for astronomically large derived values.
    unsigned m_count() const {
        if (!(m >= 0.0L) || m > 64.0L || m != std::floor(m))
            throw ResourceError("m = " + format_wide(m) + " cannot be instantiated");
        return static_cast<unsigned>(m);
    }
};

inline void validate(const ConstructionParams& p) {
    if (p.K < 1) throw DomainError("params: K must be >= 1");
    if (p.K_prime < 1) throw DomainError("params: K' must be >= 1");
    if (p.K_prime > p.K)
        throw DomainError("params: K' = " + std::to_string(p.K_prime) + " exceeds K = " + std::to_string(p.K));
    if (!(p.L > 0.0)) throw DomainError("params: L must be positive");
    if (!(p.m >= 0.0L) || p.m != std::floor(p.m)) throw DomainError("params: m must be a natural number");
    if (std::isnan(p.log_log_u)) throw DomainError("params: u must exceed 1");
}

inline ConstructionParams explicit_params(BigNat x, unsigned K, double L, double u, unsigned m, unsigned K_prime) {
    if (!(u > 1.0)) throw DomainError("params: u must exceed 1");
    ConstructionParams p{.mode = ParamMode::explicit_,
                         .x = Scale::exact(std::move(x)),
                         .K = K,
                         .L = L,
                         .log_log_u = std::log(std::log(static_cast<long double>(u))),
                         .m = static_cast<long double>(m),
                         .K_prime = K_prime};
    validate(p);
    return p;
}

// K, L, u, m, K' from x by the asymptotic formulas:
//   K  = floor(lnlnln x / (100 lnlnlnln x))
//   L  = log(2^9 C1 C2 K) + 2 C3
//   u  = e^e^(K(L+1))
//   m  = floor(log2 log2 x^(2/(K-1)))
//   K' = 1 + floor(2^-m log2 x)
inline ConstructionParams derive_params(const Scale& x, const SieveConstants& c) {
    const long double l3 = x.lnlnln();
    if (!(l3 > 1.0L))
        throw RegimeError("derive_params: lnlnln x = " + format_wide(l3) +
                          " leaves K undefined; x = " + x.describe() + " is too small, use explicit mode");
    const long double k_real = l3 / (100.0L * std::log(l3));
    if (k_real < 1.0L)
        throw RegimeError("derive_params: K = floor(" + format_wide(k_real) +
                          ") = 0 for x = " + x.describe() + "; use explicit mode");
    if (k_real < 2.0L)
        throw RegimeError("derive_params: K = 1 makes m = log2 log2 x^(2/(K-1)) undefined for x = " + x.describe() +
                          "; use explicit mode");
    if (k_real > 1e6L || !std::isfinite(x.lnln()))
        throw RegimeError("derive_params: x = " + x.describe() + " beyond the long double range of ln ln x");

    ConstructionParams p;
    p.mode = ParamMode::derived;
    p.x = x;
    p.K = static_cast<unsigned>(std::floor(k_real));
    p.L = std::log(512.0 * c.C1 * c.C2 * p.K) + 2.0 * c.C3;
    p.log_log_u = static_cast<long double>(p.K) * (p.L + 1.0);

    const long double ln2 = std::log(2.0L);
    const long double log2log2x = (x.lnln() - std::log(ln2)) / ln2;
    const long double shift = std::log2(2.0L / static_cast<long double>(p.K - 1));
    const long double f = log2log2x + shift;
    p.m = std::floor(f);
    p.precision_limited = std::fabs(f) >= 9.2e18L;  // beyond 2^63 the fractional part is gone
    // log2log2x - m = frac(f) - shift, kept small to avoid cancellation
    const long double kp = 1.0L + std::floor(std::exp2((f - p.m) - shift));
    if (!std::isfinite(kp) || kp > 1e9L) throw ConsistencyError("derive_params: K' not finite");
    p.K_prime = static_cast<unsigned>(kp);
    validate(p);
    return p;
}

// ---------------------------------------------------------------------------
// Prime blocks
// ---------------------------------------------------------------------------

// Odd primes below u, assigned greedily in ascending order: block 1 until its
// reciprocal sum reaches L, then block 2, and so on.
inline std::vector<std::vector<std::uint64_t>> select_prime_blocks(double u, unsigned K, double L,
                                                                   SieveBudget budget = {}) {
    if (K < 1) throw DomainError("select_prime_blocks: K must be >= 1");
    if (!(L > 0.0)) throw DomainError("select_prime_blocks: L must be positive, every block needs a prime");
    if (!(u > 3.0)) throw FeasibilityError("select_prime_blocks: no odd primes below u");
    if (!std::isfinite(u) || u > 1e12) throw ResourceError("select_prime_blocks: u too large to enumerate primes");

    std::uint64_t top = static_cast<std::uint64_t>(std::ceil(u)) - 1;  // primes p < u
    std::vector<std::uint64_t> odd;
    for (std::uint64_t p : sieve_primes(std::max<std::uint64_t>(top, 2), budget))
        if (p != 2 && static_cast<double>(p) < u) odd.push_back(p);

    double total = 0.0;
    for (std::uint64_t p : odd) total += 1.0 / static_cast<double>(p);
    auto infeasible = [&] {
        return FeasibilityError("select_prime_blocks: odd primes below u = " + std::to_string(u) +
                                " give sum 1/p = " + std::to_string(total) + ", need " + std::to_string(K) +
                                " blocks each reaching L = " + std::to_string(L));
    };
    if (total < K * L) throw infeasible();

    std::vector<std::vector<std::uint64_t>> blocks;
    std::vector<std::uint64_t> cur;
    double sum = 0.0;
    for (std::uint64_t p : odd) {
        if (blocks.size() == K) break;
        cur.push_back(p);
        sum += 1.0 / static_cast<double>(p);
        if (sum >= L) {
            blocks.push_back(std::move(cur));
            cur.clear();
            sum = 0.0;
        }
    }
    if (blocks.size() < K) throw infeasible();
    return blocks;
}

struct PrimeBlock {
    unsigned index = 1;  // 1-based
    std::vector<std::uint64_t> primes;
    double reciprocal_sum = 0.0;
    std::vector<BigNat> companions;  // q_j = P(2^p_j - 1)
    BigNat block_modulus = 1;        // product of companions
};

inline std::vector<PrimeBlock> attach_companions(const std::vector<std::vector<std::uint64_t>>& blocks,
                                                 const Effort& effort = {}) {
    std::vector<PrimeBlock> out;
    std::vector<BigNat> seen;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        PrimeBlock blk{.index = static_cast<unsigned>(i + 1), .primes = blocks[i]};
        if (blk.primes.empty()) throw DomainError("attach_companions: block " + std::to_string(i + 1) + " is empty");
        for (std::uint64_t p : blk.primes) {
            if (p < 3 || !is_prime(p)) throw DomainError("attach_companions: " + std::to_string(p) + " is not an odd prime");
            BigNat q = mersenne_largest_prime_factor(p, effort);
            if (std::find(seen.begin(), seen.end(), q) != seen.end())
                throw ConsistencyError("attach_companions: companion " + dec(q) + " repeats");
            seen.push_back(q);
            blk.reciprocal_sum += 1.0 / static_cast<double>(p);
            blk.block_modulus *= q;
            blk.companions.push_back(std::move(q));
        }
        out.push_back(std::move(blk));
    }
    return out;
}

inline std::vector<BigNat> fermat_factors(unsigned m, const FermatOptions& opt = {}) {
    std::vector<BigNat> g;
    for (unsigned k = 0; k < m; ++k) g.push_back(fermat_smallest_prime_factor(k, opt));
    return g;
}

// ---------------------------------------------------------------------------
// Assembly
// ---------------------------------------------------------------------------

struct Construction {
    ConstructionParams params;
    std::vector<PrimeBlock> blocks;
    std::vector<BigNat> gammas;
    BigNat W1 = 1, W2 = 1, W = 1;
    BigNat beta = 1;

    BigNat period() const { return 2 * W; }
};

// Residue beta must have modulo W1,i.
inline BigNat declared_block_residue(const ConstructionParams& params, const PrimeBlock& blk) {
    if (blk.block_modulus == 1) return 0;
    if (blk.index > params.K_prime) return 1;
    const BigNat e = pow2(params.m_count()) * (blk.index - 1);
    BigNat r = mod_pow(BigNat(2), e, blk.block_modulus) + 1;
    mpz_mod(r.get_mpz_t(), r.get_mpz_t(), blk.block_modulus.get_mpz_t());
    return r;
}

// Every congruence beta is declared to satisfy, in the order W1,1..W1,K, gamma_0..gamma_{m-1}, 2.
inline std::vector<ResidueClass> declared_classes(const ConstructionParams& params, const std::vector<PrimeBlock>& blocks,
                                                  const std::vector<BigNat>& gammas) {
    std::vector<ResidueClass> cls;
    for (const auto& blk : blocks) cls.emplace_back(declared_block_residue(params, blk), blk.block_modulus);
    for (const auto& g : gammas) cls.emplace_back(BigNat(0), g);
    cls.emplace_back(BigNat(1), BigNat(2));
    return cls;
}

inline Construction assemble(const ConstructionParams& params, std::vector<PrimeBlock> blocks,
                             std::vector<BigNat> gammas) {
    validate(params);
    if (blocks.size() != params.K)
        throw DomainError("assemble: expected " + std::to_string(params.K) + " blocks, got " + std::to_string(blocks.size()));
    if (gammas.size() != params.m_count())
        throw DomainError("assemble: expected " + std::to_string(params.m_count()) + " Fermat factors, got " +
                          std::to_string(gammas.size()));
    Construction c{.params = params, .blocks = std::move(blocks), .gammas = std::move(gammas)};
    for (const auto& blk : c.blocks) c.W1 *= blk.block_modulus;
    for (const auto& g : c.gammas) c.W2 *= g;
    c.W = c.W1 * c.W2;
    if (gcd(c.W1, c.W2) != 1) throw ConsistencyError("assemble: gcd(W1, W2) != 1");
    try {
        const auto classes = declared_classes(c.params, c.blocks, c.gammas);
        const ResidueClass sol = crt(classes);
        if (sol.modulus != c.period()) throw ConsistencyError("assemble: CRT modulus differs from 2W");
        c.beta = sol.residue;
    } catch (const DomainError& e) {
        throw ConsistencyError(std::string("assemble: ") + e.what());
    }
    return c;
}

// Full pipeline from explicit or derived parameters. `blocks` overrides the
// greedy selection when given.
inline Construction build_construction(const ConstructionParams& params,
                                       std::optional<std::vector<std::vector<std::uint64_t>>> blocks = std::nullopt,
                                       const Effort& effort = {}, const FermatOptions& fermat = {}) {
    validate(params);
    const unsigned m = params.m_count();
    auto chosen = blocks ? std::move(*blocks)
                         : select_prime_blocks(static_cast<double>(params.u()), params.K, params.L);
    return assemble(params, attach_companions(chosen, effort), fermat_factors(m, fermat));
}

// Independent re-check of a (possibly deserialized) construction.
inline std::vector<std::string> audit(const Construction& c, const Effort& effort = {}) {
    std::vector<std::string> bad;
    try {
        validate(c.params);
        if (c.blocks.size() != c.params.K) bad.push_back("block count differs from K");
        if (c.gammas.size() != c.params.m_count()) bad.push_back("gamma count differs from m");
    } catch (const Error& e) {
        bad.push_back(e.what());
        return bad;
    }
    BigNat w1 = 1, w2 = 1;
    for (const auto& blk : c.blocks) {
        BigNat prod = 1;
        if (blk.primes.size() != blk.companions.size()) bad.push_back("block " + std::to_string(blk.index) + ": size mismatch");
        for (std::size_t j = 0; j < blk.companions.size() && j < blk.primes.size(); ++j) {
            const BigNat& q = blk.companions[j];
            const std::uint64_t p = blk.primes[j];
            prod *= q;
            if (!is_prime(q) || mod_pow(BigNat(2), big(p), q) != 1)
                bad.push_back("companion " + dec(q) + " does not divide 2^" + std::to_string(p) + "-1");
            else if (effort.rho_iterations > 0 && q != mersenne_largest_prime_factor(p, effort))
                bad.push_back("companion " + dec(q) + " is not the largest prime factor of 2^" + std::to_string(p) + "-1");
        }
        if (prod != blk.block_modulus) bad.push_back("block " + std::to_string(blk.index) + ": modulus mismatch");
        w1 *= blk.block_modulus;
    }
    for (std::size_t k = 0; k < c.gammas.size(); ++k) {
        const BigNat f = pow2(std::uint64_t{1} << k) + 1;
        if (!is_prime(c.gammas[k]) || !mpz_divisible_p(f.get_mpz_t(), c.gammas[k].get_mpz_t()))
            bad.push_back("gamma_" + std::to_string(k) + " = " + dec(c.gammas[k]) + " is not a prime factor of F_" +
                          std::to_string(k));
        w2 *= c.gammas[k];
    }
    if (w1 != c.W1) bad.push_back("W1 mismatch");
    if (w2 != c.W2) bad.push_back("W2 mismatch");
    if (c.W != c.W1 * c.W2) bad.push_back("W != W1 W2");
    if (gcd(c.W1, c.W2) != 1) bad.push_back("gcd(W1, W2) != 1");
    if (sgn(c.beta) < 0 || c.beta >= c.period()) bad.push_back("beta outside [0, 2W)");
    if (mpz_even_p(c.beta.get_mpz_t())) bad.push_back("beta is even");
    if (!bad.empty()) return bad;
    for (const auto& cls : declared_classes(c.params, c.blocks, c.gammas)) {
        BigNat r;
        mpz_mod(r.get_mpz_t(), c.beta.get_mpz_t(), cls.modulus.get_mpz_t());
        if (r != cls.residue)
            bad.push_back("beta mod " + dec(cls.modulus) + " = " + dec(r) + ", declared " + dec(cls.residue));
    }
    return bad;
}

// ---------------------------------------------------------------------------
// Case analysis
// ---------------------------------------------------------------------------

enum class CaseKind { gamma_forced, q_forced, unforced };

struct Classification {
    BigNat n;
    unsigned a = 0, b = 0;
    CaseKind kind = CaseKind::unforced;
    unsigned s = 0;  // gamma_forced
    unsigned t = 0;  // q_forced, 1-based block
    unsigned j = 0;  // q_forced, 1-based prime within block
    std::optional<BigNat> forced_prime;
};

namespace detail {

// Case split for a pair a <= b, independent of n.
inline Classification classify_pair(unsigned a, unsigned b, const Construction& c, unsigned m) {
    Classification out{.a = a, .b = b};
    const std::uint64_t diff = b - a;
    const bool aligned = m >= 64 ? diff == 0 : (diff & ((std::uint64_t{1} << m) - 1)) == 0;
    if (!aligned) {
        out.kind = CaseKind::gamma_forced;
        out.s = v2(diff);
        out.forced_prime = c.gammas.at(out.s);
        return out;
    }
    const std::uint64_t t = (m >= 64 ? 0 : diff >> m) + 1;
    if (t <= c.params.K_prime) {
        const PrimeBlock& blk = c.blocks.at(t - 1);
        for (std::size_t j = 0; j < blk.primes.size(); ++j)
            if (a % blk.primes[j] == 0) {
                out.kind = CaseKind::q_forced;
                out.t = static_cast<unsigned>(t);
                out.j = static_cast<unsigned>(j + 1);
                out.forced_prime = blk.companions[j];
                return out;
            }
    }
    return out;
}

}  // namespace detail

// For n = beta (mod 2W) and 2^a + 2^b < n: if a != b (mod 2^m) then
// gamma_s | n - 2^a - 2^b with s = v2(b - a); otherwise with t = (b-a)/2^m + 1,
// if t <= K' and p_{t,j} | a then q_{t,j} | n - 2^a - 2^b.
inline Classification classify(const BigNat& n, unsigned a, unsigned b, const Construction& c) {
    if (a > b) throw DomainError("classify: need a <= b");
    BigNat r;
    mpz_mod(r.get_mpz_t(), n.get_mpz_t(), c.period().get_mpz_t());
    if (r != c.beta) throw DomainError("classify: n = " + dec(n) + " is not beta mod 2W");
    if (pow2(a) + pow2(b) >= n) throw DomainError("classify: 2^a + 2^b must be below n");
    Classification out = detail::classify_pair(a, b, c, c.params.m_count());
    out.n = n;
    return out;
}

// ---------------------------------------------------------------------------
// Progression verification
// ---------------------------------------------------------------------------

struct ForcedFailure {
    std::uint64_t n = 0;
    unsigned a = 0, b = 0;
    std::string forced_prime;
};

struct ProgressionReport {
    std::uint64_t x = 0;
    std::uint64_t members = 0;      // |S ∩ [1, x]|
    std::uint64_t pairs_checked = 0;
    std::uint64_t gamma_forced = 0;
    std::uint64_t q_forced = 0;
    std::uint64_t unforced = 0;
    std::uint64_t t1 = 0;           // representable with p | W
    std::uint64_t t2 = 0;           // representable only with p coprime to W
    std::vector<std::uint64_t> non_representable;
    std::vector<ForcedFailure> failures;

    bool clean() const { return failures.empty(); }
};

struct VerifyOptions {
    std::uint64_t max_x = 1'000'000'000;
    unsigned workers = 1;
};

// Walks S ∩ [1, x], enumerating every (a, b) with a <= b and 2^a + 2^b < n.
// Each forced case is checked for divisibility; each member is sorted into
// T1, T2 or non-representable.
inline ProgressionReport verify_progression(const Construction& c, std::uint64_t x, const VerifyOptions& opt = {}) {
    if (x > opt.max_x)
        throw ResourceError("verify_progression: x = " + std::to_string(x) + " exceeds scan budget " +
                            std::to_string(opt.max_x));
    ProgressionReport rep{.x = x};
    if (c.beta > x) return rep;
    const unsigned m = c.params.m_count();
    const std::uint64_t beta = to_u64(c.beta);
    const BigNat period_big = c.period();
    const std::uint64_t period = fits_u64(period_big) ? to_u64(period_big) : 0;  // 0: only beta fits below x
    rep.members = period == 0 ? 1 : (x - beta) / period + 1;

    // case split and forced prime per (a, b), shared by every member
    struct Pair {
        unsigned a, b;
        CaseKind kind;
        std::optional<std::uint64_t> prime;  // empty when the forced prime exceeds 64 bits
    };
    std::vector<Pair> pairs;
    for (unsigned b = 0; b < 64 && (std::uint64_t{1} << b) < x; ++b)
        for (unsigned a = 0; a <= b; ++a) {
            const Classification cl = detail::classify_pair(a, b, c, m);
            std::optional<std::uint64_t> prime;
            if (cl.forced_prime && fits_u64(*cl.forced_prime)) prime = to_u64(*cl.forced_prime);
            pairs.push_back({a, b, cl.kind, prime});
        }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& l, const Pair& r) { return std::tie(l.a, l.b) < std::tie(r.a, r.b); });

    constexpr std::uint64_t kChunk = 256;
    const std::size_t chunks = static_cast<std::size_t>((rep.members + kChunk - 1) / kChunk);
    std::vector<ProgressionReport> parts(chunks);
    for_each_chunk(chunks, opt.workers, [&](std::size_t ci) {
        ProgressionReport& part = parts[ci];
        const std::uint64_t end = std::min<std::uint64_t>(rep.members, (ci + 1) * kChunk);
        for (std::uint64_t k = ci * kChunk; k < end; ++k) {
            const std::uint64_t n = beta + k * period;
            bool in_t1 = false, representable = false;
            for (const Pair& pr : pairs) {
                const u128 v = (u128{1} << pr.a) + (u128{1} << pr.b);
                if (v >= n) continue;
                const std::uint64_t rest = n - static_cast<std::uint64_t>(v);
                ++part.pairs_checked;
                if (pr.kind == CaseKind::unforced) {
                    ++part.unforced;
                } else {
                    ++(pr.kind == CaseKind::gamma_forced ? part.gamma_forced : part.q_forced);
                    if (!pr.prime || rest % *pr.prime != 0) {
                        const Classification cl = detail::classify_pair(pr.a, pr.b, c, m);
                        part.failures.push_back({n, pr.a, pr.b, dec(*cl.forced_prime)});
                    }
                }
                if (is_prime(rest)) {
                    representable = true;
                    if (mpz_divisible_ui_p(c.W.get_mpz_t(), rest)) in_t1 = true;
                }
            }
            if (in_t1) ++part.t1;
            else if (representable) ++part.t2;
            else part.non_representable.push_back(n);
        }
    });
    for (auto& part : parts) {
        rep.pairs_checked += part.pairs_checked;
        rep.gamma_forced += part.gamma_forced;
        rep.q_forced += part.q_forced;
        rep.unforced += part.unforced;
        rep.t1 += part.t1;
        rep.t2 += part.t2;
        rep.non_representable.insert(rep.non_representable.end(), part.non_representable.begin(),
                                     part.non_representable.end());
        rep.failures.insert(rep.failures.end(), part.failures.begin(), part.failures.end());
    }
    return rep;
}

// Forced-case divisibility for the first `count` members of S, however large.
// Useful when 2W dwarfs any scannable x.
inline std::vector<ForcedFailure> check_forced_members(const Construction& c, std::uint64_t count,
                                                       std::uint64_t* pairs_checked = nullptr) {
    std::vector<ForcedFailure> failures;
    const unsigned m = c.params.m_count();
    BigNat n = c.beta, rest;
    for (std::uint64_t k = 0; k < count; ++k, n += c.period()) {
        const std::size_t bits = mpz_sizeinbase(n.get_mpz_t(), 2);
        for (unsigned b = 0; b < bits; ++b)
            for (unsigned a = 0; a <= b; ++a) {
                rest = n - pow2(a) - pow2(b);
                if (sgn(rest) <= 0) continue;
                if (pairs_checked) ++*pairs_checked;
                const Classification cl = detail::classify_pair(a, b, c, m);
                if (cl.forced_prime && !mpz_divisible_p(rest.get_mpz_t(), cl.forced_prime->get_mpz_t()))
                    failures.push_back({n.fits_ulong_p() ? n.get_ui() : 0, a, b, dec(*cl.forced_prime)});
            }
    }
    return failures;
}

// prod over all companions of (1 + 2/q), reported against e^(2 C3).
inline double companion_product(const Construction& c) {
    double prod = 1.0;
    for (const auto& blk : c.blocks)
        for (const auto& q : blk.companions) prod *= 1.0 + 2.0 / q.get_d();
    return prod;
}

// ---------------------------------------------------------------------------
// Magnitude chain
// ---------------------------------------------------------------------------

struct MagnitudeLink {
    std::string name;
    long double lhs = 0.0L;  // both sides in the same (log) scale, see `scale`
    long double rhs = 0.0L;
    std::string scale;
    bool holds = false;
};

struct MagnitudeReport {
    bool informational = false;  // explicit-mode: links are reported, not required
    std::vector<MagnitudeLink> links;

    bool all_hold() const {
        return std::all_of(links.begin(), links.end(), [](const MagnitudeLink& l) { return l.holds; });
    }
};

namespace detail {

inline long double log_add_exp(long double a, long double b) {
    const long double hi = std::max(a, b), lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

}  // namespace detail

// Derived mode: the chain W1 <= x^(1/K), W <= x^(3/(K-1)), u < (log2 x)^(1/8),
// K' <= K, each from the upper bounds W1 <= 2^(u^2 / ln u), W <= W1 (2^(2^m) - 1), in log-log space.
// Explicit mode: the same links with the actual W1 and W of `cons`.
inline MagnitudeReport check_magnitude_chain(const ConstructionParams& p, const Construction* cons = nullptr) {
    MagnitudeReport rep;
    const long double ln2 = std::log(2.0L);
    const long double K = p.K;
    auto link = [&](std::string name, long double lhs, long double rhs, std::string scale, bool strict) {
        const bool holds = strict ? lhs < rhs : lhs <= rhs;
        rep.links.push_back({std::move(name), lhs, rhs, std::move(scale), holds});
    };

    if (p.mode == ParamMode::derived) {
        const long double lnln_x = p.x.lnln();
        const long double ln_u = std::exp(p.log_log_u);
        // W1 <= 2^(u^2 / ln u)
        const long double lnln_w1 = std::log(ln2) + 2.0L * ln_u - p.log_log_u;
        link("W1 <= x^(1/K)", lnln_w1, lnln_x - std::log(K), "ln ln", false);
        // W <= W1 (2^(2^m) - 1), measured relative to ln ln x: the two sides
        // agree to hundreds of digits, so compare ln ln W - ln ln x directly.
        // m ln 2 + ln ln 2 = ln ln x + ln(2/(K-1)) - frac(f) ln 2.
        const long double shift = std::log2(2.0L / (K - 1.0L));
        const long double f = (lnln_x - std::log(ln2)) / ln2 + shift;
        const long double frac = p.precision_limited ? 0.0L : std::max(0.0L, f - p.m);  // 0 is the worst case
        const long double rel_w = detail::log_add_exp(lnln_w1 - lnln_x, std::log(2.0L / (K - 1.0L)) - frac * ln2);
        link("W <= x^(3/(K-1))", rel_w, std::log(3.0L / (K - 1.0L)), "ln ln - ln ln x", false);
        link("u < (log2 x)^(1/8)", p.log_log_u, std::log(lnln_x - std::log(ln2)) - std::log(8.0L), "ln ln", true);
    } else {
        rep.informational = true;
        const long double ln_x = p.x.ln();
        if (cons) {
            link("W1 <= x^(1/K)", ln_big(cons->W1), ln_x / K, "ln", false);
            const long double rhs_w = p.K > 1 ? 3.0L * ln_x / (K - 1.0L) : std::numeric_limits<long double>::infinity();
            link("W <= x^(3/(K-1))", ln_big(cons->W), rhs_w, "ln", false);
        }
        link("u < (log2 x)^(1/8)", p.log_log_u, std::log((std::log(ln_x / ln2)) / 8.0L), "ln ln", true);
    }
    link("K' <= K", p.K_prime, K, "linear", false);
    return rep;
}

}  // namespace p2ab
