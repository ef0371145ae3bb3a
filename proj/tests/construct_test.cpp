#include <gtest/gtest.h>

#include "oracles.hpp"
#include "p2ab/construct.hpp"
#include "p2ab/io.hpp"
#include "p2ab/represent.hpp"

using namespace p2ab;

namespace {

// m = 1, one block [3]: q = 7, gamma_0 = 3, W = 21, period 42.
Construction toy_m1() {
    return build_construction(explicit_params(BigNat(2000), 1, 0.3, 4.0, 1, 1), std::vector<std::vector<std::uint64_t>>{{3}});
}

// m = 2, blocks [3], [5]: q = 7, 31, gammas 3, 5, W = 3255.
Construction toy_m2() {
    return build_construction(explicit_params(BigNat(1'000'000), 2, 0.2, 6.0, 2, 2),
                              std::vector<std::vector<std::uint64_t>>{{3}, {5}});
}

struct BruteCounts {
    std::uint64_t members = 0;
    std::uint64_t forced_ok = 0;
    std::uint64_t forced_bad = 0;
    std::vector<std::uint64_t> non_representable;
};

// Direct walk of beta + 2Wk using only the construction's numbers.
BruteCounts brute(const Construction& c, std::uint64_t x) {
    BruteCounts out;
    const std::uint64_t beta = c.beta.get_ui(), period = c.period().get_ui();
    const unsigned m = c.params.m_count();
    const auto rep = oracle::mark_p2a2b(x);
    for (std::uint64_t n = beta; n <= x; n += period) {
        ++out.members;
        if (!rep[n]) out.non_representable.push_back(n);
        for (unsigned b = 0; (1ULL << b) < n; ++b)
            for (unsigned a = 0; a <= b; ++a) {
                const std::uint64_t v = (1ULL << a) + (1ULL << b);
                if (v >= n) continue;
                std::uint64_t forced = 0;
                if ((b - a) % (1U << m) != 0) {
                    unsigned s = 0;
                    while (((b - a) >> s & 1U) == 0) ++s;
                    forced = c.gammas[s].get_ui();
                } else {
                    const unsigned t = (b - a) / (1U << m) + 1;
                    if (t <= c.params.K_prime)
                        for (std::size_t j = 0; j < c.blocks[t - 1].primes.size(); ++j)
                            if (a % c.blocks[t - 1].primes[j] == 0) {
                                forced = c.blocks[t - 1].companions[j].get_ui();
                                break;
                            }
                }
                if (forced == 0) continue;
                ((n - v) % forced == 0 ? out.forced_ok : out.forced_bad)++;
            }
    }
    return out;
}

}  // namespace

TEST(Scale, ParseAndLogs) {
    const Scale s = parse_scale("1000000");
    EXPECT_NEAR(static_cast<double>(s.ln()), std::log(1e6), 1e-12);
    EXPECT_NEAR(static_cast<double>(s.lnlnln()), std::log(std::log(std::log(1e6))), 1e-12);
    const Scale t = parse_scale("e^e^e^1500");
    EXPECT_DOUBLE_EQ(static_cast<double>(t.lnlnln()), 1500.0);
    EXPECT_THROW(parse_scale("e^e^e^abc"), DomainError);
    EXPECT_THROW(parse_scale("12x"), DomainError);
}

TEST(DeriveParams, SmallXIsOutOfRegime) {
    const SieveConstants c{.C3 = 0.5};
    EXPECT_THROW(derive_params(parse_scale("1000000"), c), RegimeError);
    EXPECT_THROW(derive_params(parse_scale("e^e^e^20"), c), RegimeError);
    EXPECT_THROW(derive_params(parse_scale("e^e^e^800"), c), RegimeError);  // K = 1
}

TEST(DeriveParams, FirstUsableTower) {
    const SieveConstants c = default_sieve_constants();
    const ConstructionParams p = derive_params(parse_scale("e^e^e^1500"), c);
    EXPECT_EQ(p.K, 2U);
    EXPECT_NEAR(p.L, std::log(1024.0) + 2.0 * c.C3, 1e-12);
    EXPECT_GE(p.K_prime, 1U);
    EXPECT_LE(p.K_prime, p.K);
    EXPECT_THROW(p.m_count(), ResourceError);

    const MagnitudeReport chain = check_magnitude_chain(p);
    EXPECT_FALSE(chain.informational);
    for (const auto& l : chain.links) EXPECT_TRUE(l.holds) << l.name << ": " << l.lhs << " vs " << l.rhs;
}

TEST(DeriveParams, KPrimeStaysInRange) {
    const SieveConstants c = default_sieve_constants();
    for (double v = 1500; v < 11000; v *= 1.17) {
        const ConstructionParams p = derive_params(Scale::tower(v), c);
        EXPECT_GE(p.K, 2U);
        EXPECT_LE(p.K_prime, p.K) << v;
        EXPECT_GE(p.K_prime, 1U) << v;
    }
    EXPECT_THROW(derive_params(Scale::tower(20000), c), RegimeError);
}

TEST(ExplicitParams, Validation) {
    EXPECT_THROW(explicit_params(BigNat(100), 2, 0.5, 50, 2, 3), DomainError);
    EXPECT_THROW(explicit_params(BigNat(100), 2, 0.0, 50, 2, 1), DomainError);
    EXPECT_THROW(explicit_params(BigNat(100), 2, 0.5, 1.0, 2, 1), DomainError);
    EXPECT_THROW(explicit_params(BigNat(100), 0, 0.5, 50, 2, 1), DomainError);
    EXPECT_NO_THROW(explicit_params(BigNat(100), 2, 0.5, 50, 2, 2));
}

TEST(SelectPrimeBlocks, Greedy) {
    using V = std::vector<std::vector<std::uint64_t>>;
    EXPECT_EQ(select_prime_blocks(20, 1, 0.8), (V{{3, 5, 7, 11, 13}}));
    EXPECT_EQ(select_prime_blocks(50, 2, 0.5), (V{{3, 5}, {7, 11, 13, 17, 19, 23, 29}}));
    EXPECT_THROW(select_prime_blocks(10, 2, 0.5), FeasibilityError);
    EXPECT_THROW(select_prime_blocks(20, 1, 0.0), DomainError);
}

TEST(SelectPrimeBlocks, BlocksReachL) {
    const auto blocks = select_prime_blocks(20000, 3, 0.6);
    ASSERT_EQ(blocks.size(), 3U);
    std::uint64_t prev = 2;
    for (const auto& blk : blocks) {
        double sum = 0;
        for (auto p : blk) {
            EXPECT_TRUE(oracle::is_prime(p));
            EXPECT_GT(p, prev);
            prev = p;
            sum += 1.0 / static_cast<double>(p);
        }
        EXPECT_GE(sum, 0.6);
        EXPECT_LT(sum - 1.0 / static_cast<double>(blk.back()), 0.6);
    }
}

TEST(Companions, KnownValues) {
    const auto one = attach_companions({{3}});
    EXPECT_EQ(one[0].companions, (std::vector<BigNat>{7}));
    EXPECT_EQ(attach_companions({{11}})[0].companions, (std::vector<BigNat>{89}));
    const auto two = attach_companions({{3}, {5}});
    EXPECT_EQ(two[0].companions[0], 7);
    EXPECT_EQ(two[1].companions[0], 31);
    EXPECT_EQ(two[1].index, 2U);

    const auto big = attach_companions({{3, 5}, {7, 11, 13, 17, 19, 23, 29}});
    for (const auto& blk : big)
        for (std::size_t j = 0; j < blk.primes.size(); ++j) {
            const std::uint64_t p = blk.primes[j];
            EXPECT_EQ(blk.companions[j].get_ui(), oracle::mersenne_largest(static_cast<unsigned>(p)));
            EXPECT_EQ(oracle::order_of_two(blk.companions[j].get_ui(), 100), p);
        }
}

TEST(Assemble, MZeroAndToy) {
    const Construction m0 = build_construction(explicit_params(BigNat(100), 1, 0.3, 4.0, 0, 1),
                                               std::vector<std::vector<std::uint64_t>>{{3}});
    EXPECT_EQ(m0.W, 7);
    EXPECT_EQ(m0.beta, 9);
    EXPECT_TRUE(m0.gammas.empty());

    const Construction c = toy_m1();
    EXPECT_EQ(c.W1, 7);
    EXPECT_EQ(c.W2, 3);
    EXPECT_EQ(c.W, 21);
    EXPECT_EQ(c.beta, 9);
    EXPECT_TRUE(audit(c).empty());

    const Construction d = toy_m2();
    EXPECT_EQ(d.W, 3255);
    EXPECT_TRUE(audit(d).empty());
    // block 1: 2^0 + 1 mod 7; block 2: 2^(2^2) + 1 mod 31
    EXPECT_EQ(d.beta % 7, 2);
    EXPECT_EQ(d.beta % 31, 17);
    EXPECT_EQ(d.beta % 15, 0);
    EXPECT_EQ(d.beta % 2, 1);
}

TEST(Assemble, ResidueInvariants) {
    const ConstructionParams p = explicit_params(BigNat(1'000'000), 2, 0.5, 50, 2, 1);
    const Construction c = build_construction(p);
    EXPECT_TRUE(audit(c).empty());
    EXPECT_EQ(c.W, c.W1 * c.W2);
    EXPECT_GE(c.beta, 0);
    EXPECT_LT(c.beta, c.period());
    EXPECT_EQ(c.beta % 2, 1);
    for (const auto& g : c.gammas) EXPECT_EQ(c.beta % g, 0);
    for (const auto& blk : c.blocks)
        for (const auto& q : blk.companions) {
            const BigNat want = blk.index <= p.K_prime ? BigNat((mod_pow(BigNat(2), pow2(2) * (blk.index - 1), q) + 1) % q)
                                                       : BigNat(1);
            EXPECT_EQ(c.beta % q, want);
        }
}

TEST(Assemble, MismatchedInputs) {
    const ConstructionParams p = explicit_params(BigNat(100), 2, 0.3, 4.0, 1, 1);
    EXPECT_THROW(assemble(p, attach_companions({{3}}), {BigNat(3)}), DomainError);
    // a companion colliding with a Fermat factor breaks coprimality
    EXPECT_THROW(assemble(explicit_params(BigNat(100), 1, 0.3, 4.0, 1, 1), attach_companions({{3}}), {BigNat(7)}),
                 ConsistencyError);
}

TEST(Audit, DetectsTampering) {
    Construction c = toy_m1();
    c.beta += 2;
    EXPECT_FALSE(audit(c).empty());
    Construction d = toy_m1();
    d.blocks[0].companions[0] = 5;
    EXPECT_FALSE(audit(d).empty());
}

TEST(Classify, Cases) {
    const Construction c = toy_m1();
    const Classification g = classify(BigNat(51), 0, 1, c);
    EXPECT_EQ(g.kind, CaseKind::gamma_forced);
    EXPECT_EQ(g.s, 0U);
    EXPECT_EQ(*g.forced_prime, 3);

    const Classification q = classify(BigNat(51), 3, 3, c);
    EXPECT_EQ(q.kind, CaseKind::q_forced);
    EXPECT_EQ(q.t, 1U);
    EXPECT_EQ(q.j, 1U);
    EXPECT_EQ(*q.forced_prime, 7);

    const Classification u = classify(BigNat(51), 1, 3, c);
    EXPECT_EQ(u.kind, CaseKind::unforced);
    EXPECT_FALSE(u.forced_prime.has_value());

    EXPECT_THROW(classify(BigNat(51), 3, 1, c), DomainError);
    EXPECT_THROW(classify(BigNat(53), 0, 1, c), DomainError);
    EXPECT_THROW(classify(BigNat(51), 5, 5, c), DomainError);
}

TEST(VerifyProgression, MatchesBruteForce) {
    for (const Construction& c : {toy_m1(), toy_m2()}) {
        constexpr std::uint64_t kX = 200000;
        const ProgressionReport r = verify_progression(c, kX);
        const BruteCounts b = brute(c, kX);
        EXPECT_EQ(r.members, b.members);
        EXPECT_EQ(r.gamma_forced + r.q_forced, b.forced_ok + b.forced_bad);
        EXPECT_EQ(b.forced_bad, 0U);
        EXPECT_TRUE(r.clean());
        EXPECT_EQ(r.non_representable, b.non_representable);
        EXPECT_EQ(r.t1 + r.t2 + r.non_representable.size(), r.members);
    }
}

TEST(VerifyProgression, CountsAndEdges) {
    const Construction c = toy_m1();
    EXPECT_EQ(verify_progression(c, 8).members, 0U);
    EXPECT_EQ(verify_progression(c, 9).members, 1U);
    EXPECT_EQ(verify_progression(c, 50).members, 1U);
    EXPECT_EQ(verify_progression(c, 51).members, 2U);
    EXPECT_EQ(verify_progression(c, 1'000'000).members, (1'000'000 - 9) / 42 + 1);
    EXPECT_THROW(verify_progression(c, 2000, VerifyOptions{.max_x = 1000}), ResourceError);
}

TEST(VerifyProgression, WorkerIndependence) {
    const Construction c = toy_m2();
    const ProgressionReport a = verify_progression(c, 1'000'000, VerifyOptions{.workers = 1});
    const ProgressionReport b = verify_progression(c, 1'000'000, VerifyOptions{.workers = 8});
    EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
}

TEST(VerifyProgression, NonRepresentablesAgreeWithFinder) {
    const ProgressionReport r = verify_progression(toy_m1(), 300000);
    for (std::uint64_t n : r.non_representable) EXPECT_FALSE(find_rep_p2a2b(n).has_value()) << n;
}

TEST(CheckForcedMembers, LargeModulus) {
    const ConstructionParams p = explicit_params(BigNat(1'000'000), 2, 0.5, 50, 2, 2);
    const Construction c = build_construction(p);
    EXPECT_EQ(verify_progression(c, 1'000'000).members, 0U);
    std::uint64_t pairs = 0;
    EXPECT_TRUE(check_forced_members(c, 20, &pairs).empty());
    EXPECT_GT(pairs, 0U);
}

TEST(MagnitudeChain, ExplicitIsInformational) {
    const Construction c = toy_m1();
    const MagnitudeReport r = check_magnitude_chain(c.params, &c);
    EXPECT_TRUE(r.informational);
    EXPECT_EQ(r.links.size(), 4U);
}

TEST(CompanionProduct, SmallToy) {
    EXPECT_NEAR(companion_product(toy_m2()), (1.0 + 2.0 / 7) * (1.0 + 2.0 / 31), 1e-15);
    EXPECT_LE(companion_product(toy_m2()), std::exp(2.0 * default_sieve_constants().C3));
}

TEST(Io, WideParamsRoundTrip) {
    const ConstructionParams p = derive_params(parse_scale("e^e^e^1500"), default_sieve_constants());
    const json j = to_json(p);
    EXPECT_TRUE(j["m"].is_string());
    const ConstructionParams back = params_from_json(j);
    EXPECT_NEAR(static_cast<double>(back.m / p.m), 1.0, 1e-9);
    EXPECT_EQ(back.K, p.K);
    EXPECT_EQ(back.mode, ParamMode::derived);
}

TEST(Io, ConstructionRoundTrip) {
    const Construction c = toy_m2();
    const json j = to_json(c);
    const Construction back = construction_from_json(j);
    EXPECT_EQ(back.beta, c.beta);
    EXPECT_EQ(back.W, c.W);
    EXPECT_EQ(back.blocks.size(), c.blocks.size());
    EXPECT_EQ(to_json(back).dump(), j.dump());
    EXPECT_TRUE(audit(back).empty());
    EXPECT_THROW(construction_from_json(json::parse(R"({"params": 3})")), DomainError);
}
