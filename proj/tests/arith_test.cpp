#include <gtest/gtest.h>

#include <random>
#include <thread>

#include "oracles.hpp"
#include "p2ab/arith.hpp"

using namespace p2ab;

TEST(IsPrime, KnownValues) {
    EXPECT_TRUE(is_prime(std::uint64_t{2}));
    EXPECT_TRUE(is_prime(std::uint64_t{127}));
    EXPECT_FALSE(is_prime(std::uint64_t{2047}));  // 23 * 89
    EXPECT_FALSE(is_prime(std::uint64_t{0}));
    EXPECT_FALSE(is_prime(std::uint64_t{1}));
}

TEST(IsPrime, AgreesWithTrialDivisionBelowOneMillion) {
    for (std::uint64_t n = 0; n < 1'000'000; ++n) ASSERT_EQ(is_prime(n), oracle::is_prime(n)) << n;
}

TEST(IsPrime, RandomSixtyFourBitAgainstTrialDivision) {
    std::mt19937_64 rng(20240901);
    std::uniform_int_distribution<std::uint64_t> dist(1'000'000, 1'000'000'000'000ULL);
    for (int i = 0; i < 2000; ++i) {
        const std::uint64_t n = dist(rng) | 1U;
        ASSERT_EQ(is_prime(n), oracle::is_prime(n)) << n;
    }
}

TEST(IsPrime, StrongPseudoprimesRejected) {
    // strong pseudoprimes to several small bases
    for (std::uint64_t n : {2047ULL, 1373653ULL, 25326001ULL, 3215031751ULL, 2152302898747ULL, 3474749660383ULL,
                            341550071728321ULL, 3825123056546413051ULL})
        EXPECT_FALSE(is_prime(n)) << n;
    EXPECT_TRUE(is_prime(18446744073709551557ULL));  // largest 64-bit prime
    EXPECT_FALSE(is_prime(18446744073709551615ULL));
}

TEST(IsPrime, BigAgainstGmp) {
    // Mersenne primes and composites above 64 bits
    EXPECT_TRUE(is_prime(pow2(89) - 1));
    EXPECT_TRUE(is_prime(pow2(107) - 1));
    EXPECT_TRUE(is_prime(pow2(127) - 1));
    EXPECT_FALSE(is_prime(pow2(101) - 1));
    EXPECT_FALSE(is_prime(pow2(128) + 1));
    gmp_randclass rng(gmp_randinit_default);
    rng.seed(7);
    for (int i = 0; i < 300; ++i) {
        BigNat n = rng.get_z_bits(70 + i % 150) | 1;
        ASSERT_EQ(is_prime(n), mpz_probab_prime_p(n.get_mpz_t(), 40) != 0) << dec(n);
    }
    // products of two primes just above 2^64
    BigNat p = pow2(64), q = pow2(65);
    mpz_nextprime(p.get_mpz_t(), p.get_mpz_t());
    mpz_nextprime(q.get_mpz_t(), q.get_mpz_t());
    EXPECT_TRUE(is_prime(p));
    EXPECT_FALSE(is_prime(p * q));
    EXPECT_FALSE(is_prime(p * p));
}

TEST(Sieve, SmallLimits) {
    EXPECT_EQ(sieve_primes(10), (std::vector<std::uint64_t>{2, 3, 5, 7}));
    EXPECT_EQ(sieve_primes(2), (std::vector<std::uint64_t>{2}));
    const auto hundred = sieve_primes(100);
    EXPECT_EQ(hundred.size(), 25U);
    EXPECT_EQ(hundred.back(), 97U);
    EXPECT_THROW(sieve_primes(1), DomainError);
}

TEST(Sieve, MatchesTrialDivisionAcrossSegments) {
    // crosses several 2^19-wide segments
    const std::uint64_t limit = 3'000'007;
    const auto primes = sieve_primes(limit);
    std::size_t idx = 0;
    for (std::uint64_t n = 0; n <= limit; ++n) {
        if (oracle::is_prime(n)) {
            ASSERT_LT(idx, primes.size());
            ASSERT_EQ(primes[idx++], n);
        }
    }
    EXPECT_EQ(idx, primes.size());
}

TEST(Sieve, MemoryBudget) {
    EXPECT_THROW(sieve_primes(1'000'000'000, SieveBudget{.max_bytes = 1 << 20}), ResourceError);
}

TEST(ModPow, Examples) {
    EXPECT_EQ(mod_pow(2, 0, 7), 1U);
    EXPECT_EQ(mod_pow(2, 11, 89), 1U);
    EXPECT_EQ(mod_pow(2, 32, 641), 640U);
    EXPECT_EQ(mod_pow(BigNat(2), BigNat(32), BigNat(641)), 640);
    EXPECT_THROW(mod_pow(2, 3, 1), DomainError);
    EXPECT_THROW(mod_pow(BigNat(2), BigNat(3), BigNat(0)), DomainError);
}

TEST(ModPow, MatchesRepeatedMultiplication) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        const std::uint64_t m = rng() % 100000 + 2, b = rng() % 1000, e = rng() % 300;
        std::uint64_t acc = 1 % m;
        for (std::uint64_t k = 0; k < e; ++k) acc = acc * (b % m) % m;
        ASSERT_EQ(mod_pow(b, e, m), acc);
    }
}

TEST(Factorize, Examples) {
    const FactorList one = factorize(1);
    EXPECT_TRUE(one.complete);
    EXPECT_TRUE(one.factors.empty());

    const FactorList f = factorize(8194);
    ASSERT_EQ(f.factors.size(), 3U);
    EXPECT_EQ(f.factors[0].prime, 2);
    EXPECT_EQ(f.factors[1].prime, 17);
    EXPECT_EQ(f.factors[2].prime, 241);
    EXPECT_TRUE(f.complete);

    EXPECT_THROW(factorize(0), DomainError);
}

TEST(Factorize, TinyBudgetLeavesPartialResult) {
    const BigNat n = pow2(101) - 1;
    const FactorList f = factorize(n, Effort{.trial_bound = 100, .rho_iterations = 10});
    EXPECT_FALSE(f.complete);
    EXPECT_GT(f.cofactor, 1);
    EXPECT_EQ(f.recompose(), n);
}

TEST(Factorize, RecompositionProperty) {
    // random products of primes of mixed sizes, including above 64 bits
    std::mt19937_64 rng(99);
    for (int i = 0; i < 60; ++i) {
        BigNat n = 1;
        const int parts = 1 + static_cast<int>(rng() % 4);
        for (int k = 0; k < parts; ++k) {
            BigNat p = big(rng() % (std::uint64_t{1} << (10 + rng() % 30)) + 2);
            mpz_nextprime(p.get_mpz_t(), p.get_mpz_t());
            n *= p;
        }
        const FactorList f = factorize(n);
        ASSERT_TRUE(f.complete) << dec(n);
        ASSERT_EQ(f.recompose(), n);
        for (std::size_t k = 0; k < f.factors.size(); ++k) {
            ASSERT_TRUE(is_prime(f.factors[k].prime));
            if (k) {
                ASSERT_LT(f.factors[k - 1].prime, f.factors[k].prime);
            }
        }
    }
}

TEST(Factorize, AgreesWithTrialDivision) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 500; ++i) {
        const std::uint64_t n = rng() % 10'000'000'000ULL + 1;
        const FactorList f = factorize(big(n), Effort{.trial_bound = 50, .rho_iterations = 10'000'000});
        const auto expect = oracle::factor(n);
        ASSERT_EQ(f.factors.size(), expect.size()) << n;
        auto it = expect.begin();
        for (const auto& pp : f.factors) {
            ASSERT_EQ(pp.prime, big(it->first));
            ASSERT_EQ(pp.exponent, it->second);
            ++it;
        }
    }
}

TEST(Factorize, PrimePowersAndSquares) {
    const BigNat p = pow2(89) - 1;
    const FactorList f = factorize(p * p * 3, Effort{.trial_bound = 10});
    ASSERT_TRUE(f.complete);
    ASSERT_EQ(f.factors.size(), 2U);
    EXPECT_EQ(f.factors[1].prime, p);
    EXPECT_EQ(f.factors[1].exponent, 2U);
}

TEST(Factorize, Deterministic) {
    const BigNat n = pow2(97) - 1;
    const FactorList a = factorize(n), b = factorize(n);
    ASSERT_EQ(a.factors.size(), b.factors.size());
    for (std::size_t i = 0; i < a.factors.size(); ++i) EXPECT_EQ(a.factors[i].prime, b.factors[i].prime);
}

TEST(Mersenne, LargestPrimeFactorExamples) {
    EXPECT_EQ(mersenne_largest_prime_factor(2), 3);
    EXPECT_EQ(mersenne_largest_prime_factor(11), 89);
    EXPECT_EQ(mersenne_largest_prime_factor(23), oracle::mersenne_largest(23));
    EXPECT_EQ(mersenne_largest_prime_factor(23), 178481);
    EXPECT_THROW(mersenne_largest_prime_factor(15), DomainError);
}

TEST(Mersenne, IncompleteFactorizationNamesCofactor) {
    try {
        (void)mersenne_largest_prime_factor(101, Effort{.trial_bound = 1000, .rho_iterations = 100});
        FAIL() << "expected IncompleteFactorization";
    } catch (const IncompleteFactorization& e) {
        EXPECT_EQ(e.cofactor(), dec(pow2(101) - 1));
    }
}

TEST(Mersenne, EveryPrimeExponentUpTo101FactorsAtDefaultEffort) {
    for (std::uint64_t p : sieve_primes(101)) {
        const FactorList f = factorize_mersenne(p);
        ASSERT_TRUE(f.complete) << p;
        ASSERT_EQ(f.recompose(), pow2(p) - 1) << p;
        for (const auto& pp : f.factors) {
            ASSERT_TRUE(is_prime(pp.prime));
            if (p > 2) {
                ASSERT_EQ(BigNat(pp.prime % (2 * p)), 1) << p;
            }
        }
    }
}

TEST(Mersenne, CompanionOrderProperty) {
    for (std::uint64_t p : sieve_primes(61)) {
        if (p == 2) continue;
        const BigNat q = mersenne_largest_prime_factor(p);
        ASSERT_EQ(q, big(oracle::mersenne_largest(static_cast<unsigned>(p))));
        EXPECT_EQ(order_of_two(q), big(p));
        EXPECT_EQ(mod_pow(BigNat(2), big(p), q), 1);
        EXPECT_EQ(BigNat(q % (2 * p)), 1);
    }
}

TEST(Mersenne, CacheIsSafeUnderConcurrency) {
    std::vector<BigNat> got(8);
    {
        std::vector<std::jthread> pool;
        for (int t = 0; t < 8; ++t) pool.emplace_back([&, t] { got[t] = mersenne_largest_prime_factor(67); });
    }
    for (const auto& g : got) EXPECT_EQ(g, BigNat("761838257287"));
}

TEST(Fermat, SmallestPrimeFactors) {
    const std::uint64_t expected[] = {3, 5, 17, 257, 65537, 641, 274177};
    for (unsigned k = 0; k <= 6; ++k) {
        const BigNat g = fermat_smallest_prime_factor(k);
        EXPECT_EQ(g, big(expected[k])) << k;
        EXPECT_EQ(g, big(oracle::fermat_smallest(k))) << k;
        // gamma_k = 1 mod 2^(k+1) and gamma_k > 2^(k+1)
        EXPECT_EQ(BigNat(g % pow2(k + 1)), 1);
        EXPECT_GT(g, pow2(k + 1));
    }
}

TEST(Fermat, FeasibilityBound) {
    EXPECT_THROW(fermat_smallest_prime_factor(9), ResourceError);
    EXPECT_THROW(fermat_smallest_prime_factor(6, FermatOptions{.max_k = 5}), ResourceError);
}

TEST(Crt, Examples) {
    EXPECT_EQ(crt({ResidueClass(2, 3), ResidueClass(3, 5)}), ResidueClass(8, 15));
    EXPECT_EQ(crt({ResidueClass(4, 9)}), ResidueClass(4, 9));
    EXPECT_EQ(crt({ResidueClass(0, 3), ResidueClass(0, 5), ResidueClass(1, 2)}), ResidueClass(15, 30));
    EXPECT_EQ(crt(std::span<const ResidueClass>{}), ResidueClass(0, 1));
}

TEST(Crt, RejectsSharedFactorNamingPair) {
    try {
        (void)crt({ResidueClass(1, 7), ResidueClass(1, 4), ResidueClass(1, 6)});
        FAIL();
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("#1 (4) and #2 (6)"), std::string::npos) << e.what();
    }
}

TEST(Crt, RoundTripProperty) {
    std::mt19937_64 rng(3);
    const auto primes = sieve_primes(2000);
    for (int i = 0; i < 200; ++i) {
        std::vector<ResidueClass> cls;
        std::vector<std::uint64_t> used;
        const int k = 1 + static_cast<int>(rng() % 6);
        while (static_cast<int>(cls.size()) < k) {
            const std::uint64_t p = primes[rng() % primes.size()];
            if (std::find(used.begin(), used.end(), p) != used.end()) continue;
            used.push_back(p);
            const BigNat mod = big(p) * (rng() % 2 ? big(p) : BigNat(1));
            cls.push_back(ResidueClass::of(big(rng()), mod));
        }
        const ResidueClass r = crt(cls);
        for (const auto& c : cls) ASSERT_EQ(BigNat(r.residue % c.modulus), c.residue);
        ASSERT_LT(r.residue, r.modulus);
    }
}

TEST(ResidueClassTest, Invariants) {
    EXPECT_THROW(ResidueClass(5, 5), DomainError);
    EXPECT_THROW(ResidueClass(0, 0), DomainError);
    EXPECT_EQ(ResidueClass::of(-1, 7), ResidueClass(6, 7));
}

TEST(Valuation, TwoAdic) {
    EXPECT_EQ(v2(12), 2U);
    EXPECT_EQ(v2(1), 0U);
    EXPECT_THROW(v2(0), DomainError);
}
