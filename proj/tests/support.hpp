// Shared helpers for the test binaries: random rank instances, pattern
// families and the oracles restated independently of the library, and random
// T_feq models and amalgamation problems.
#pragma once

#include "sopkit/feq.hpp"
#include "sopkit/parser.hpp"
#include "sopkit/patterns.hpp"
#include "sopkit/rank.hpp"
#include "sopkit/transform.hpp"

#include <bit>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace sopkit::testing {

/// Formula pools per plugin. `p_forms` have object block x0 and one
/// parameter; `q_forms[a]` have an object block of length a (the y block of
/// phi) and at most one parameter.
struct Pool {
    std::string plugin;
    std::vector<std::string> phis;
    std::vector<std::string> p_forms;
    std::vector<std::string> q_forms1;
    std::vector<std::string> q_forms2;
};

inline const std::vector<Pool> &pools()
{
    static const std::vector<Pool> all = {
        {"dlo",
         {"x0 < y0", "y0 < x0 & x0 < y1 ; vars x0 | y0 y1", "x0 < y0 | y1 < x0 ; vars x0 | y0 y1"},
         {"x0 < z0 ; vars x0 | z0", "z0 < x0 ; vars x0 | z0", "x0 != z0 ; vars x0 | z0"},
         {"y0 < z0 ; vars y0 | z0", "z0 < y0 ; vars y0 | z0"},
         {"y0 < y1 ; vars y0 y1 |", "y1 < y0 ; vars y0 y1 |", "y0 < z0 ; vars y0 y1 | z0"}},
        {"random_graph",
         {"R(x0,y0)", "R(x0,y0) & !R(x0,y1) ; vars x0 | y0 y1", "!R(x0,y0)"},
         {"R(x0,z0) ; vars x0 | z0", "!R(x0,z0) ; vars x0 | z0", "x0 != z0 ; vars x0 | z0"},
         {"R(y0,z0) ; vars y0 | z0", "!R(y0,z0) & y0 != z0 ; vars y0 | z0"},
         {"R(y0,y1) ; vars y0 y1 |", "!R(y0,y1) & y0 != y1 ; vars y0 y1 |", "R(y1,z0) ; vars y0 y1 | z0"}},
        {"equiv",
         {"E(x0,y0)", "!E(x0,y0)", "E(x0,y0) & !E(x0,y1) ; vars x0 | y0 y1"},
         {"E(x0,z0) ; vars x0 | z0", "!E(x0,z0) ; vars x0 | z0", "x0 != z0 ; vars x0 | z0"},
         {"E(y0,z0) ; vars y0 | z0", "!E(y0,z0) ; vars y0 | z0"},
         {"E(y0,y1) ; vars y0 y1 |", "!E(y0,y1) ; vars y0 y1 |", "E(y0,z0) ; vars y0 y1 | z0"}},
        {"tfeq",
         {"E(x0,y0)", "R(x0,y0)", "E(x0,y0) & R(x0,y1) ; vars x0 | y0 y1"},
         {"E(x0,z0) ; vars x0 | z0", "!E(x0,z0) ; vars x0 | z0", "Q(x0) ; vars x0 |"},
         {"Q(y0) ; vars y0 |", "P(y0) ; vars y0 |", "!E(y0,z0) ; vars y0 | z0"},
         {"Q(y0) & P(y1) ; vars y0 y1 |", "E(y0,z0) ; vars y0 y1 | z0", "!R(y0,y1) ; vars y0 y1 |"}},
    };
    return all;
}

struct RankInstance {
    std::string plugin;
    PluginPtr T;
    TemplatePtr phi;
    PartialType p, q;
    Diagram D;
    int cap = 1;

    std::string describe() const
    {
        std::string s = plugin + " phi=" + phi->text() + " cap=" + std::to_string(cap) + " p={";
        for (const auto &i : p)
            s += i.encode() + " ";
        s += "} q={";
        for (const auto &i : q)
            s += i.encode() + " ";
        return s + "}";
    }
};

/// Instances with a one- or two-element parameter diagram.
inline std::vector<RankInstance> random_rank_instances(std::mt19937 &rng, int count, int max_cap = 3)
{
    std::vector<RankInstance> out;
    std::map<std::string, PluginPtr> plugins;
    std::map<std::string, std::vector<Diagram>> diagrams;
    for (const auto &pool : pools()) {
        plugins[pool.plugin] = make_plugin(pool.plugin);
        diagrams[pool.plugin] = plugins[pool.plugin]->enumerate_diagrams(1, 2, 6);
    }
    auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
    for (int i = 0; i < count; ++i) {
        const Pool &pool = pools()[static_cast<std::size_t>(i) % pools().size()];
        RankInstance inst;
        inst.plugin = pool.plugin;
        inst.T = plugins[pool.plugin];
        const auto sig = inst.T->signature();
        inst.phi = parse_formula(pool.phis[pick(pool.phis.size())], sig);
        const auto &ds = diagrams[pool.plugin];
        inst.D = ds[pick(ds.size())];
        const ParamTuple names = inst.D.tuples.front();
        auto param_for = [&](const TemplatePtr &t) {
            ParamTuple ps;
            for (int k = 0; k < t->param_arity(); ++k)
                ps.push_back(names[pick(names.size())]);
            return ps;
        };
        const int np = static_cast<int>(pick(4)), nq = static_cast<int>(pick(4));
        for (int k = 0; k < np; ++k) {
            auto t = parse_formula(pool.p_forms[pick(pool.p_forms.size())], sig);
            inst.p.push_back(substitute(t, param_for(t)));
        }
        const auto &qf = inst.phi->param_arity() == 1 ? pool.q_forms1 : pool.q_forms2;
        for (int k = 0; k < nq; ++k) {
            auto t = parse_formula(qf[pick(qf.size())], sig);
            inst.q.push_back(substitute(t, param_for(t)));
        }
        inst.cap = 1 + static_cast<int>(pick(static_cast<std::size_t>(max_cap)));
        out.push_back(std::move(inst));
    }
    return out;
}

/// A canonical SOP''_2 family over a tree pattern, with its template.
struct PatternWitness {
    std::shared_ptr<PatternPlugin> T;
    TemplatePtr theta;
    WitnessFamily wf;
};

inline PatternWitness pattern_witness(const std::string &rule, int n, int depth)
{
    PatternWitness w;
    w.T = make_tree_pattern(rule, n);
    std::string vars;
    for (int i = 0; i <= n; ++i)
        vars += " y" + std::to_string(i);
    w.theta = parse_formula("true ; vars x0 |" + vars, w.T->signature());
    w.wf.n = n;
    w.wf.depth = depth;
    w.wf.canonical = true;
    w.wf.diagram = w.T->empty_diagram();
    return w;
}


// -- tree patterns restated ---------------------------------------------------

using Nodes = std::vector<Node>;

inline bool apart(const Node &a, const Node &b) { return !a.comparable(b); }

/// The corpus rules restated: arity and the pairwise predicate on chains.
inline std::pair<int, std::function<bool(const Nodes &, const Nodes &)>> rule(const std::string &name)
{
    auto tops = [](const Nodes &a, const Nodes &b) { return apart(a.back(), b.back()); };
    if (name == "incomparable-tops")
        return {2, tops};
    if (name == "three-incomparable-tops")
        return {3, tops};
    if (name == "four-incomparable-tops")
        return {4, tops};
    if (name == "incomparable-tops-same-root")
        return {2, [=](const Nodes &a, const Nodes &b) { return tops(a, b) && a[0] == b[0]; }};
    if (name == "incomparable-middles")
        return {2, [](const Nodes &a, const Nodes &b) { return apart(a[1], b[1]); }};
    if (name == "incomparable-tops-same-middle")
        return {2, [=](const Nodes &a, const Nodes &b) { return tops(a, b) && a[1] == b[1]; }};
    if (name == "split-below-root")
        return {2, [=](const Nodes &a, const Nodes &b) { return tops(a, b) && apart(a[1], b[1]) && a[0] == b[0]; }};
    if (name == "any-incomparable")
        return {2, [](const Nodes &a, const Nodes &b) {
                    for (const Node &x : a)
                        for (const Node &y : b)
                            if (apart(x, y))
                                return true;
                    return false;
                }};
    throw std::invalid_argument(name);
}

/// All chains of `count` nodes below `top`, by brute force over subsets of lengths.
inline std::vector<Nodes> chains_of(const Node &top, int count)
{
    std::vector<Nodes> out;
    const int L = top.len + 1;
    for (std::uint32_t mask = 0; mask < (1u << L); ++mask) {
        if (std::popcount(mask) != count)
            continue;
        Nodes c;
        for (int l = 0; l < L; ++l)
            if (mask >> l & 1u)
                c.push_back(top.prefix(l));
        out.push_back(c);
    }
    return out;
}

inline bool inconsistent_by_rule(const std::string &name, int n, const Nodes &tops)
{
    std::set<Nodes> chains;
    for (const Node &t : tops)
        for (const Nodes &c : chains_of(t, n + 1))
            chains.insert(c);
    const std::vector<Nodes> all(chains.begin(), chains.end());
    const auto [arity, pair] = rule(name);
    std::vector<int> pick;
    std::function<bool(std::size_t)> rec = [&](std::size_t from) {
        if (static_cast<int>(pick.size()) == arity)
            return true;
        for (std::size_t i = from; i < all.size(); ++i) {
            bool ok = true;
            for (int j : pick)
                ok = ok && pair(all[j], all[i]);
            if (!ok)
                continue;
            pick.push_back(static_cast<int>(i));
            if (rec(i + 1))
                return true;
            pick.pop_back();
        }
        return false;
    };
    return rec(0);
}

/// Smallest |Υ| by an independent scan: embeddings are found by backtracking
/// with the full pairwise ⊲ / ⊥ test, and inconsistency uses the restated rule.
inline int min_upsilon(const std::string &name, int n, int m, int E, int B)
{
    std::vector<std::vector<int>> dom{{}};
    for (std::size_t i = 0; i < dom.size(); ++i)
        if (static_cast<int>(dom[i].size()) < n)
            for (int j = 0; j < m; ++j) {
                auto c = dom[i];
                c.push_back(j);
                dom.push_back(c);
            }
    auto below = [](const std::vector<int> &a, const std::vector<int> &b) {
        return a.size() < b.size() && std::equal(a.begin(), a.end(), b.begin());
    };
    std::vector<int> leaves;
    for (std::size_t i = 0; i < dom.size(); ++i)
        if (static_cast<int>(dom[i].size()) == n)
            leaves.push_back(static_cast<int>(i));
    const Nodes targets = nodes_upto(E);
    std::set<Nodes> leaf_images; // sorted tuples of leaf images over all h
    Nodes h(dom.size());
    std::function<void(std::size_t)> embed = [&](std::size_t i) {
        if (i == dom.size()) {
            Nodes img;
            for (int l : leaves)
                img.push_back(h[l]);
            leaf_images.insert(img);
            return;
        }
        for (const Node &v : targets) {
            bool ok = true;
            for (std::size_t j = 0; j < i && ok; ++j) {
                ok = ok && h[j] != v;
                ok = ok && below(dom[j], dom[i]) == h[j].strict_initial_of(v);
                ok = ok && below(dom[i], dom[j]) == v.strict_initial_of(h[j]);
                const bool dom_apart = !below(dom[i], dom[j]) && !below(dom[j], dom[i]) && dom[i] != dom[j];
                ok = ok && dom_apart == apart(h[j], v);
            }
            if (!ok)
                continue;
            h[i] = v;
            embed(i + 1);
        }
    };
    embed(0);
    for (int s = 1; s <= static_cast<int>(leaves.size()); ++s) {
        std::set<Nodes> tried;
        for (const Nodes &img : leaf_images) {
            std::vector<int> pick(s);
            std::function<bool(int, int)> subsets = [&](int k, int from) -> bool {
                if (k == s) {
                    // Every extension of each chosen leaf image to length B.
                    Nodes tops(s);
                    std::function<bool(int)> ext = [&](int i) -> bool {
                        if (i == s) {
                            Nodes key = tops;
                            std::sort(key.begin(), key.end());
                            if (!tried.insert(key).second)
                                return false;
                            return inconsistent_by_rule(name, n, tops);
                        }
                        const Node &base = img[pick[i]];
                        for (std::uint64_t e = 0; e < (std::uint64_t{1} << (B - base.len)); ++e) {
                            tops[i] = Node{(base.bits << (B - base.len)) | e, B};
                            if (ext(i + 1))
                                return true;
                        }
                        return false;
                    };
                    return ext(0);
                }
                for (int i = from; i < static_cast<int>(img.size()); ++i) {
                    pick[k] = i;
                    if (subsets(k + 1, i + 1))
                        return true;
                }
                return false;
            };
            if (subsets(0, 0))
                return s;
        }
    }
    return -1;
}

// -- T_feq structures ----------------------------------------------------------

/// Small T_feq model built from named pieces.
struct Builder {
    FiniteStructure M{Signature::feq()};

    Builder &q(Element e)
    {
        M.add_element(e);
        M.add_fact(feq::kQ, {e});
        M.add_fact(feq::kE, {e, e});
        return *this;
    }
    Builder &p(Element e)
    {
        M.add_element(e);
        M.add_fact(feq::kP, {e});
        return *this;
    }
    Builder &e(Element a, Element b)
    {
        M.add_fact(feq::kE, {a, b});
        M.add_fact(feq::kE, {b, a});
        return *this;
    }
    Builder &r(Element a, Element z)
    {
        M.add_fact(feq::kR, {a, z});
        return *this;
    }
    FiniteStructure done()
    {
        feq::close_equivalence(M);
        feq::rebuild_function(M);
        return M;
    }
};

/// A random T_feq model: classes, representatives, F rebuilt.
inline FiniteStructure random_model(std::mt19937 &rng, int nq, int np, Element first = 0)
{
    Builder b;
    std::vector<Element> qs, ps;
    for (int i = 0; i < nq; ++i) {
        qs.push_back(first + i);
        b.q(first + i);
    }
    for (int i = 0; i < np; ++i) {
        ps.push_back(first + nq + i);
        b.p(first + nq + i);
    }
    for (std::size_t i = 1; i < qs.size(); ++i)
        if (rng() % 2)
            b.e(qs[i], qs[rng() % i]);
    FiniteStructure M = b.done();
    for (Element z : ps)
        for (const auto &cls : feq::classes(M).members)
            if (rng() % 2)
                M.add_fact(feq::kR, {cls[rng() % cls.size()], z});
    feq::rebuild_function(M);
    return M;
}

/// Random one-point T*_feq extensions of M, `steps` times; new elements are
/// shifted by `offset` so two extensions of the same base stay apart.
inline FiniteStructure random_extension(std::mt19937 &rng, const FiniteStructure &M, int steps, Element offset)
{
    static const FeqPlugin plugin;
    FiniteStructure cur = M;
    for (int s = 0; s < steps; ++s) {
        std::vector<FiniteStructure> options;
        Budget b;
        plugin.for_each_point(cur, b, [&](FiniteStructure &N, Element) {
            options.push_back(N);
            return true;
        });
        cur = options[rng() % options.size()];
    }
    std::map<Element, Element> rename;
    for (Element e : cur.universe())
        rename[e] = M.contains(e) ? e : e + offset;
    return cur.renamed(rename);
}

/// An amalgamation problem: N0 and N1 extend a common part A that is closed
/// under F in both, and B is a closed part of A.
inline feq::AmalgamInput random_amalgam_input(std::mt19937 &rng)
{
    FiniteStructure A(Signature::feq());
    if (rng() % 4)
        A = feq::ec_extend(random_model(rng, 1 + static_cast<int>(rng() % 3), static_cast<int>(rng() % 3)), 40);
    FiniteStructure B = A;
    if (A.size() > 0 && rng() % 2) {
        // Dropping a P element leaves a part that is still closed.
        const auto ps = feq::elements_in(A, feq::kP);
        if (!ps.empty()) {
            std::set<Element> keep(A.universe().begin(), A.universe().end());
            keep.erase(ps[rng() % ps.size()]);
            B = feq::ec_extend(A.restrict_to(keep), 40);
            if (!std::includes(A.universe().begin(), A.universe().end(), B.universe().begin(), B.universe().end()))
                B = A;
        }
    }
    return {B, random_extension(rng, A, 1 + static_cast<int>(rng() % 3), 100),
            random_extension(rng, A, 1 + static_cast<int>(rng() % 3), 200)};
}

/// As above, redrawn until no input has more than `max_size` elements.
inline feq::AmalgamInput random_valid_input(std::mt19937 &rng, int max_size = 8)
{
    while (true) {
        feq::AmalgamInput in = random_amalgam_input(rng);
        if (static_cast<int>(std::max({in.base.size(), in.n0.size(), in.n1.size()})) <= max_size)
            return in;
    }
}

inline bool extends(const FiniteStructure &N, const FiniteStructure &M)
{
    for (Element e : M.universe())
        if (!N.contains(e))
            return false;
    const std::set<Element> keep(M.universe().begin(), M.universe().end());
    const FiniteStructure R = N.restrict_to(keep);
    for (int rel = 0; rel < 4; ++rel)
        if (R.facts(rel) != M.facts(rel))
            return false;
    for (const auto &[args, v] : M.graph(feq::kF))
        if (N.apply(feq::kF, args) != v)
            return false;
    return true;
}

} // namespace sopkit::testing
