#include "support.hpp"

#include <gtest/gtest.h>

#include <functional>
#include <set>

using namespace sopkit;
using namespace sopkit::testing;

namespace {

EmbeddingCertificate certificate_for(const std::string &name, int n)
{
    auto w = pattern_witness(name, n, n + 4);
    Budget b;
    return find_min_embedding(*w.T, w.theta, w.wf, {}, b);
}

} // namespace

TEST(BranchType, CountsChainsBelowTheBranch)
{
    auto w = pattern_witness("incomparable-tops", 2, 6);
    for (const Node &nu : nodes_upto(4)) {
        const PartialType p = branch_type(w.theta, w.wf, nu);
        EXPECT_EQ(p.size(), chains_of(nu, 3).size()) << nu.str();
        for (const auto &inst : p)
            EXPECT_EQ(static_cast<int>(inst.params.size()), 3);
    }
}

TEST(FindMinEmbedding, Examples)
{
    const auto two = certificate_for("incomparable-tops", 1);
    EXPECT_EQ(two.upsilon.size(), 2u);
    EXPECT_EQ(two.branches.size(), 2u);
    EXPECT_EQ(two.embed_depth, 3);
    EXPECT_EQ(two.branch_depth, 4);
    EXPECT_GT(two.l_star, two.k_star);

    const auto three = certificate_for("three-incomparable-tops", 2);
    EXPECT_EQ(three.upsilon.size(), 3u);
}

TEST(FindMinEmbedding, FourTopsUseEveryLeaf)
{
    const auto four = certificate_for("four-incomparable-tops", 2);
    // ^2 2 has four leaves; all of them are needed.
    EXPECT_EQ(four.upsilon.size(), 4u);
    std::set<std::vector<int>> leaves(four.upsilon.begin(), four.upsilon.end());
    EXPECT_EQ(leaves, (std::set<std::vector<int>>{{0, 0}, {0, 1}, {1, 0}, {1, 1}}));
}

TEST(FindMinEmbedding, SingleLeafIsNotInXi)
{
    auto w = pattern_witness("incomparable-tops", 1, 5);
    EmbeddingOptions opt;
    opt.m = 1;
    Budget b;
    try {
        find_min_embedding(*w.T, w.theta, w.wf, opt, b);
        FAIL() << "expected NotInXi";
    } catch (const TransformError &e) {
        EXPECT_EQ(e.kind(), TransformError::Kind::NotInXi);
    }
}

TEST(FindMinEmbedding, CertificateIsConsistentWithItself)
{
    for (const auto &pat : tree_patterns()) {
        if (pat.name == "four-incomparable-tops")
            continue;
        const auto c = certificate_for(pat.name, pat.n);
        ASSERT_EQ(c.h.size(), c.domain.size());
        for (std::size_t i = 0; i < c.upsilon.size(); ++i) {
            const auto pos = std::find(c.domain.begin(), c.domain.end(), c.upsilon[i]) - c.domain.begin();
            EXPECT_TRUE(c.h[pos].initial_of(c.branches[i]));
            EXPECT_EQ(c.branches[i].len, c.branch_depth);
        }
        EXPECT_TRUE(inconsistent_by_rule(pat.name, pat.n, c.branches)) << pat.name;
        // k* is the longest meet among the branches.
        int best = -1;
        for (std::size_t i = 0; i < c.branches.size(); ++i)
            for (std::size_t j = i + 1; j < c.branches.size(); ++j)
                best = std::max(best, static_cast<int>(meet(c.branches[i], c.branches[j]).len));
        EXPECT_EQ(c.k_star, best);
        // ℓ* is the first cut length at which the branches already clash.
        Nodes cut;
        for (const Node &b : c.branches)
            cut.push_back(b.prefix(c.l_star));
        EXPECT_TRUE(inconsistent_by_rule(pat.name, pat.n, cut));
        if (c.l_star > c.n) {
            Nodes shorter;
            for (const Node &b : c.branches)
                shorter.push_back(b.prefix(c.l_star - 1));
            EXPECT_FALSE(inconsistent_by_rule(pat.name, pat.n, shorter));
        }
    }
}

TEST(FindMinEmbedding, MinimalityAgainstIndependentScan)
{
    for (const auto &pat : tree_patterns()) {
        if (pat.name == "four-incomparable-tops")
            continue; // covered by FourTopsUseEveryLeaf; the scan is slow there
        const auto c = certificate_for(pat.name, pat.n);
        EXPECT_EQ(static_cast<int>(c.upsilon.size()),
                  min_upsilon(pat.name, pat.n, c.m, c.embed_depth, c.branch_depth))
            << pat.name << " n=" << pat.n;
    }
}

TEST(Varsigma, AgainstDirectFormula)
{
    for (int ks = 0; ks <= 3; ++ks)
        for (int ls = ks + 1; ls <= ks + 3; ++ls)
            for (const Node &nu : nodes_upto(7)) {
                if (nu.len < ls)
                    continue;
                for (const Node &eta : nodes_upto(ls)) {
                    const Node s = varsigma(eta, ks, ls, nu);
                    if (eta.len <= ks) {
                        EXPECT_EQ(s, eta);
                        continue;
                    }
                    // Same distance below ν's end as η is below ℓ*.
                    EXPECT_EQ(nu.len - s.len, ls - eta.len);
                    EXPECT_EQ(s.str(), nu.str().substr(0, s.len));
                }
            }
}

TEST(Varsigma, SegmentsLandOnTheirImages)
{
    for (const auto &name : {"incomparable-tops", "incomparable-middles", "split-below-root"}) {
        const int n = std::string(name) == "incomparable-tops" ? 1 : 2;
        const auto c = certificate_for(name, n);
        const Node &b0 = c.branches[c.eta0], &b1 = c.branches[c.eta1];
        EXPECT_EQ(meet(b0, b1).len, c.k_star);
        for (const Node &rho : nodes_upto(3)) {
            const Node nu = nu_of(c, rho);
            EXPECT_EQ(nu.len, c.k_star + rho.len * (c.l_star - c.k_star));
            if (rho.len == 0)
                continue;
            const Node &bj = rho.at(rho.len - 1) ? b1 : b0;
            for (int l = c.k_star + 1; l <= c.l_star; ++l) {
                const Node s = varsigma(bj.prefix(l), c.k_star, c.l_star, nu);
                // The last l - k* bits of ς(η) copy ν*_{η_j}↾[k*, l).
                EXPECT_EQ(segment(s, s.len - (l - c.k_star), s.len), segment(bj, c.k_star, l)) << name;
            }
        }
    }
}

TEST(NuOf, PreservesTreeOrder)
{
    const auto c = certificate_for("incomparable-tops", 1);
    const auto nodes = nodes_upto(3);
    for (const Node &a : nodes)
        for (const Node &b : nodes) {
            const Node na = nu_of(c, a), nb = nu_of(c, b);
            EXPECT_EQ(a.strict_initial_of(b), na.strict_initial_of(nb));
            EXPECT_EQ(apart(a, b), apart(na, nb));
            EXPECT_EQ(a == b, na == nb);
        }
}

TEST(Transform, CorpusEndToEnd)
{
    for (const auto &pat : tree_patterns()) {
        if (pat.name == "four-incomparable-tops")
            continue;
        auto w = pattern_witness(pat.name, pat.n, pat.n + 4);
        Budget b;
        const TransformResult r = transform_sop2pp_to_sop2(*w.T, w.theta, w.wf, {}, 2, b);
        EXPECT_TRUE(r.verification.ok()) << pat.name << " n=" << pat.n << "\n" << r.verification.to_json().dump();
        EXPECT_EQ(r.theta_k->param_arity(), r.k * (pat.n + 1));
        // Every output node uses the same number of conjuncts: the fixed chains
        // plus the chains inside the window below ν.
        for (const auto &[node, chains] : r.conjuncts) {
            EXPECT_EQ(static_cast<int>(chains.size()), r.k) << node;
            EXPECT_EQ(std::set<Chain>(chains.begin(), chains.end()).size(), chains.size()) << node;
            const Node nu = nu_of(r.certificate, concat(Node::parse("0"), Node::parse(node)));
            const std::set<Chain> fixed(r.fixed_chains.begin(), r.fixed_chains.end());
            for (const Chain &ch : chains)
                EXPECT_TRUE(fixed.count(ch) || ch.back().initial_of(nu)) << node;
        }
        long long window = 1; // C(ℓ* + 1, n + 1)
        for (int i = 1; i <= pat.n + 1; ++i)
            window = window * (r.certificate.l_star + 2 - i) / i;
        EXPECT_EQ(r.k, static_cast<int>(r.fixed_chains.size() + window));
    }
}

TEST(Transform, JsonShape)
{
    auto w = pattern_witness("incomparable-tops", 1, 5);
    Budget b;
    const auto j = transform_sop2pp_to_sop2(*w.T, w.theta, w.wf, {}, 1, b).to_json();
    EXPECT_EQ(j["schema"], kWitnessSchema);
    EXPECT_EQ(j["certificate"]["upsilon"].size(), 2u);
    EXPECT_TRUE(j["verification"]["holds"].is_string() || j["verification"]["holds"].is_boolean());
    const TreeFamily f = family_from_json(j["family"], w.T->signature());
    EXPECT_EQ(f.depth, 1);
}

TEST(Transform, DyadicRoundTrip)
{
    auto T = make_plugin("dlo");
    auto interval = parse_formula("y0 < x0 & x0 < y1 ; vars x0 | y0 y1", T->signature());
    const WitnessFamily wf = sop2_implies_sop2pp(dlo_dyadic_family(5));
    Budget b;
    EXPECT_TRUE(verify_sop2pp_witness(*T, interval, wf, {}, b).ok());
    const TransformResult r = transform_sop2pp_to_sop2(*T, interval, wf, {}, 1, b);
    EXPECT_TRUE(r.verification.ok()) << r.verification.to_json().dump();
}

TEST(Transform, ShallowFamilyIsRejected)
{
    auto T = make_plugin("dlo");
    auto interval = parse_formula("y0 < x0 & x0 < y1 ; vars x0 | y0 y1", T->signature());
    const WitnessFamily wf = sop2_implies_sop2pp(dlo_dyadic_family(2));
    Budget b;
    try {
        transform_sop2pp_to_sop2(*T, interval, wf, {}, 2, b);
        FAIL() << "expected TooShallow";
    } catch (const TransformError &e) {
        EXPECT_EQ(e.kind(), TransformError::Kind::TooShallow);
    }
}

TEST(Sop2ImpliesSop2pp, ChainsReadTheirTop)
{
    const TreeFamily f = dlo_dyadic_family(3);
    const WitnessFamily wf = sop2_implies_sop2pp(f);
    EXPECT_EQ(wf.n, 1);
    for (const auto &[chain, tuple] : wf.tuples) {
        ASSERT_EQ(chain.size(), 2u);
        EXPECT_TRUE(chain[0].strict_initial_of(chain[1]));
        EXPECT_EQ(tuple, f.at(chain[1]));
    }
    // One chain per (top, shorter prefix) pair: sum over lengths l of 2^l * l.
    std::size_t expected = 0;
    for (int l = 0; l <= 3; ++l)
        expected += (std::size_t{1} << l) * static_cast<std::size_t>(l);
    EXPECT_EQ(wf.tuples.size(), expected);
}
