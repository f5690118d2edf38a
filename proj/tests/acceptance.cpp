// Acceptance checks. `acceptance N...` runs the listed criteria (all when none
// are given) and prints one PASS/FAIL line each. Exit status is non-zero when
// any selected criterion fails.
#include "support.hpp"

#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>

using namespace sopkit;
using namespace sopkit::testing;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = false;
    std::string detail;
};

Budget budget(std::size_t node_cap, int size_cap)
{
    Budget b;
    b.node_cap = node_cap;
    b.size_cap = size_cap;
    return b;
}

std::optional<int> level_of(const RankValue &v)
{
    switch (v.kind) {
    case RankValue::Kind::MinusOne: return -1;
    case RankValue::Kind::Finite:
    case RankValue::Kind::AtLeast: return v.value;
    default: return std::nullopt;
    }
}

// 1. rank and rank_via_tree agree on every determined instance.
Outcome rank_tree_agreement()
{
    constexpr int kInstances = 600;
    std::mt19937 rng(1001);
    int determined = 0, disagree = 0;
    std::map<std::string, int> per_plugin;
    std::string first;
    for (auto &I : random_rank_instances(rng, kInstances, 3)) {
        Budget b1 = budget(300'000, 6), b2 = budget(300'000, 6);
        const RankValue r1 = rank(*I.T, I.phi, I.p, I.q, I.cap, b1, I.D, false).value;
        const RankValue r2 = rank_via_tree(*I.T, I.phi, I.p, I.q, I.cap, b2, I.D).value;
        if (!r1.determined() || !r2.determined())
            continue;
        ++determined;
        ++per_plugin[I.plugin];
        if (r1 != r2) {
            ++disagree;
            if (first.empty())
                first = I.describe() + " rank=" + r1.str() + " tree=" + r2.str();
        }
    }
    std::ostringstream os;
    os << kInstances << " instances, " << determined << " determined (";
    for (auto it = per_plugin.begin(); it != per_plugin.end(); ++it)
        os << (it == per_plugin.begin() ? "" : " ") << it->first << "=" << it->second;
    os << "), " << disagree << " disagreements; tolerance 0";
    if (!first.empty())
        os << "; first: " << first;
    return {disagree == 0 && kInstances >= 500, os.str()};
}

// 2. Shrinking p and q never lowers the rank; adding an entailed instance never changes it.
Outcome monotonicity()
{
    std::mt19937 rng(1002);
    int pairs = 0, mono_bad = 0, entailed = 0, entail_bad = 0;
    for (auto &I : random_rank_instances(rng, 420, 3)) {
        PartialType p2, q2;
        for (const auto &i : I.p)
            if (rng() % 2)
                p2.push_back(i);
        for (const auto &i : I.q)
            if (rng() % 2)
                q2.push_back(i);
        Budget b1 = budget(300'000, 6), b2 = budget(300'000, 6);
        const auto big = level_of(rank(*I.T, I.phi, I.p, I.q, I.cap, b1, I.D, false).value);
        const auto small = level_of(rank(*I.T, I.phi, p2, q2, I.cap, b2, I.D, false).value);
        if (big && small) {
            ++pairs;
            mono_bad += *big > *small;
        }

        const Pool &pool = *std::find_if(pools().begin(), pools().end(),
                                         [&](const Pool &p) { return p.plugin == I.plugin; });
        auto t = parse_formula(pool.p_forms[rng() % pool.p_forms.size()], I.T->signature());
        const auto names = I.D.tuples.front();
        ParamTuple ps;
        for (int k = 0; k < t->param_arity(); ++k)
            ps.push_back(names[rng() % names.size()]);
        PartialType neg = I.p;
        neg.push_back(substitute(t, ps, false));
        Budget db;
        if (!I.T->decide(neg, I.D, db, 1).inconsistent())
            continue;
        PartialType with_entailed = I.p;
        with_entailed.push_back(substitute(t, ps));
        Budget b3 = budget(300'000, 6), b4 = budget(300'000, 6);
        const RankValue r1 = rank(*I.T, I.phi, I.p, I.q, I.cap, b3, I.D, false).value;
        const RankValue r2 = rank(*I.T, I.phi, with_entailed, I.q, I.cap, b4, I.D, false).value;
        if (r1.determined() && r2.determined()) {
            ++entailed;
            entail_bad += r1 != r2;
        }
    }
    std::ostringstream os;
    os << pairs << " determined (p'',q'') pairs, " << mono_bad << " monotonicity violations; " << entailed
       << " entailed additions, " << entail_bad << " changes; tolerance 0";
    return {pairs >= 300 && mono_bad == 0 && entail_bad == 0 && entailed > 0, os.str()};
}

// 3. DLO: verified interval trees at depths 1-5, and rank AtLeast(cap) for cap <= 5.
Outcome dlo_sop1()
{
    auto T = make_plugin("dlo");
    auto phi = parse_formula("y0 < x0 & x0 < y1 ; vars x0 | y0 y1", T->signature());
    std::ostringstream os;
    bool ok = true;
    os << "trees";
    for (int d = 1; d <= 5; ++d) {
        Budget b;
        const bool v = verify_sop1tree(*T, phi, {}, {}, dlo_sop1_tree(d), b).ok();
        os << " d" << d << "=" << (v ? "ok" : "bad");
        ok = ok && v;
    }
    os << "; rank";
    for (int cap = 1; cap <= 5; ++cap) {
        Budget b = budget(20'000'000, 2 * cap + 2);
        const RankResult r = rank(*T, phi, {}, {}, cap, b);
        bool v = r.value == RankValue::at_least(cap) && r.witness;
        if (v) {
            Budget vb;
            v = verify_sop1tree(*T, phi, {}, {}, *r.witness, vb).ok();
        }
        os << " cap" << cap << "=" << r.value.str();
        ok = ok && v;
    }
    return {ok, os.str()};
}

// 4. Random graph: rk of R(x,y) over (top, top) is Finite(0).
Outcome random_graph_rank()
{
    auto T = make_plugin("random_graph");
    auto phi = parse_formula("R(x0,y0)", T->signature());
    Budget b = budget(20'000'000, 6);
    const RankResult r = rank(*T, phi, {}, {}, 3, b);
    Budget b2 = budget(20'000'000, 6);
    const Truth one = rank_at_least(*T, phi, {}, {}, 1, b2).answer;
    std::ostringstream os;
    os << "rank=" << r.value.str() << ", rk>=1 " << to_string(one) << ", size cap 6, " << b.nodes << " nodes";
    return {r.value == RankValue::finite(0) && one == Truth::False, os.str()};
}

/// Conjunctions of at most three E/R literals over x0, y0, y1 that mention x0,
/// up to swapping y0 and y1, with y1 used only alongside y0.
std::vector<std::string> feq_formulas()
{
    const std::vector<std::string> vars = {"x0", "y0", "y1"};
    struct Lit {
        bool neg;
        char rel;
        int a, b;
    };
    std::vector<Lit> lits;
    for (char rel : {'E', 'R'})
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                for (bool neg : {false, true})
                    lits.push_back({neg, rel, a, b});
    auto text = [&](std::vector<Lit> c, bool swap) {
        std::vector<std::string> parts;
        for (Lit l : c) {
            auto v = [&](int i) { return swap && i > 0 ? 3 - i : i; };
            parts.push_back(std::string(l.neg ? "!" : "") + l.rel + "(" + vars[v(l.a)] + "," + vars[v(l.b)] + ")");
        }
        std::sort(parts.begin(), parts.end());
        std::string s;
        for (const auto &p : parts)
            s += (s.empty() ? "" : " & ") + p;
        return s;
    };
    std::set<std::string> out;
    std::vector<Lit> cur;
    std::function<void(std::size_t)> rec = [&](std::size_t from) {
        if (!cur.empty()) {
            bool x = false, y0 = false, y1 = false, clash = false;
            for (std::size_t i = 0; i < cur.size(); ++i) {
                for (int v : {cur[i].a, cur[i].b}) {
                    x = x || v == 0;
                    y0 = y0 || v == 1;
                    y1 = y1 || v == 2;
                }
                for (std::size_t j = 0; j < i; ++j)
                    clash = clash || (cur[i].rel == cur[j].rel && cur[i].a == cur[j].a && cur[i].b == cur[j].b);
            }
            if (x && !clash && (y0 || !y1))
                out.insert(std::min(text(cur, false), text(cur, true)));
        }
        if (cur.size() == 3)
            return;
        for (std::size_t i = from; i < lits.size(); ++i) {
            cur.push_back(lits[i]);
            rec(i + 1);
            cur.pop_back();
        }
    };
    rec(0);
    return {out.begin(), out.end()};
}

// 5. T*_feq: no depth-2 tree for any small formula; the DLO control finds one.
Outcome feq_refutation()
{
    constexpr std::size_t kNodeCap = 100'000;
    constexpr int kSizeCap = 8;
    const auto sig = Signature::feq();
    int refuted = 0, found = 0, undetermined = 0, verified = 0;
    std::vector<std::string> examples;
    static const FeqPlugin plugin;
    for (const auto &f : feq_formulas()) {
        auto phi = parse_formula(f + " ; vars x0 | y0 y1", sig);
        Budget b = budget(kNodeCap, kSizeCap);
        const auto r = feq::nsop1_refutation_search(phi, 2, b);
        if (r.tree_found) {
            ++found;
            Budget vb;
            vb.size_cap = 16;
            verified += r.tree && verify_sop1tree(plugin, phi, {}, {}, *r.tree, vb).ok();
            if (examples.size() < 3)
                examples.push_back(f);
        } else if (r.exhausted) {
            ++refuted;
        } else {
            ++undetermined;
        }
    }
    auto dlo = make_plugin("dlo");
    Budget cb = budget(kNodeCap, kSizeCap);
    const auto control = rank_at_least(*dlo, parse_formula("y0 < x0 & x0 < y1 ; vars x0 | y0 y1", dlo->signature()),
                                       {}, {}, 2, cb);
    std::ostringstream os;
    os << refuted + found + undetermined << " formulas: " << refuted << " refuted, " << found
       << " with a depth-2 tree (" << verified << " re-verified), " << undetermined
       << " undetermined; budget " << kNodeCap << " nodes, size cap " << kSizeCap
       << "; DLO control " << (control.answer == Truth::True ? "found a tree" : "found none");
    for (std::size_t i = 0; i < examples.size(); ++i)
        os << (i ? ", " : "; trees for: ") << examples[i];
    return {found == 0 && undetermined == 0 && control.answer == Truth::True, os.str()};
}

// 6. Valid amalgamation problems give T_feq models extending every input.
Outcome amalgamation()
{
    constexpr int kInputs = 600;
    std::mt19937 rng(1006);
    int ok = 0, grown = 0;
    std::string first;
    for (int i = 0; i < kInputs; ++i) {
        const auto in = random_valid_input(rng, 8);
        try {
            const FiniteStructure N = feq::amalgamate(in);
            const bool good = feq::check_tfeq(N).empty() && extends(N, in.base) && extends(N, in.n0) &&
                              extends(N, in.n1);
            ok += good;
            grown += N.size() > std::max(in.n0.size(), in.n1.size());
            if (!good && first.empty())
                first = "bad amalgam for " + in.n0.to_json().dump();
        } catch (const std::exception &e) {
            if (first.empty())
                first = e.what();
        }
    }
    std::ostringstream os;
    os << ok << "/" << kInputs << " valid inputs (size <= 8) amalgamate to extending T_feq models (" << grown
       << " strictly larger than both sides); tolerance 100%";
    if (!first.empty())
        os << "; first failure: " << first;
    return {ok == kInputs, os.str()};
}

// 7. SOP''_2 to SOP_2 on the pattern corpus at d = 3, with minimality of Υ*.
Outcome transform_corpus()
{
    int passed = 0, minimal = 0, total = 0;
    std::ostringstream os;
    for (const auto &pat : tree_patterns()) {
        ++total;
        auto w = pattern_witness(pat.name, pat.n, pat.n + 4);
        const auto t0 = Clock::now();
        try {
            Budget b;
            const TransformResult r = transform_sop2pp_to_sop2(*w.T, w.theta, w.wf, {}, 3, b);
            passed += r.verification.ok();
            const auto &c = r.certificate;
            const int scan = min_upsilon(pat.name, pat.n, c.m, c.embed_depth, c.branch_depth);
            minimal += scan == static_cast<int>(c.upsilon.size());
            os << (total > 1 ? "; " : "") << pat.name << "/" << pat.n << " k=" << r.k << " |U|=" << c.upsilon.size()
               << " scan=" << scan << " "
               << std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count() << "ms";
        } catch (const std::exception &e) {
            os << (total > 1 ? "; " : "") << pat.name << "/" << pat.n << " error: " << e.what();
        }
    }
    std::ostringstream head;
    head << passed << "/" << total << " verified, " << minimal << "/" << total << " minimal: " << os.str();
    return {total >= 10 && passed == total && minimal == total, head.str()};
}

// 8. SOP_2 acceptance implies SOP_1 acceptance; ≈1 refines ≈2 and both are equivalences.
Outcome invariants()
{
    // Families: transform outputs, dyadic families and perturbed copies.
    int sop2 = 0, implied = 0, families = 0;
    auto check = [&](const TheoryPlugin &T, const TemplatePtr &phi, const TreeFamily &f) {
        ++families;
        Budget b;
        if (!verify_sop2_witness(T, phi, f, b).ok())
            return;
        ++sop2;
        Budget b2;
        implied += verify_sop1_witness(T, phi, f, b2).ok();
    };
    for (const auto &pat : tree_patterns()) {
        if (pat.name == "four-incomparable-tops")
            continue;
        auto w = pattern_witness(pat.name, pat.n, pat.n + 4);
        Budget b;
        const TransformResult r = transform_sop2pp_to_sop2(*w.T, w.theta, w.wf, {}, 2, b);
        check(*w.T, r.theta_k, r.family);
    }
    auto dlo = make_plugin("dlo");
    auto interval = parse_formula("y0 < x0 & x0 < y1 ; vars x0 | y0 y1", dlo->signature());
    std::mt19937 rng(1008);
    for (int d = 1; d <= 4; ++d) {
        const TreeFamily f = dlo_dyadic_family(d);
        check(*dlo, interval, f);
        const auto nodes = nodes_upto(d);
        for (int k = 0; k < 20; ++k) {
            TreeFamily g = f;
            g.at(nodes[rng() % nodes.size()]) = f.at(nodes[rng() % nodes.size()]);
            check(*dlo, interval, g);
        }
    }

    // ≈ laws: tuple_equiv must coincide with equality of an independently
    // computed profile, which makes it an equivalence relation.
    auto profile = [](const std::vector<Node> &t, int mode) {
        std::string out;
        for (const Node &a : t)
            for (const Node &b : t) {
                const Node m = meet(a, b);
                for (const Node &c : t) {
                    const std::string ms = m.str(), cs = c.str();
                    out += cs.size() <= ms.size() && ms.compare(0, cs.size(), cs) == 0 ? '1' : '0';
                    out += ms.size() < cs.size() && cs.compare(0, ms.size(), ms) == 0 ? '1' : '0';
                    if (mode == 1)
                        out += ms.size() < cs.size() && cs.compare(0, ms.size() + 1, ms + "0") == 0 ? '1' : '0';
                }
            }
        return out;
    };
    const auto nodes = nodes_upto(4);
    long law_checks = 0, law_bad = 0;
    std::size_t classes1 = 0, classes2 = 0;
    for (int len = 1; len <= 3; ++len) {
        std::vector<std::vector<Node>> tuples;
        std::vector<std::size_t> idx(len, 0);
        while (true) {
            std::vector<Node> t;
            for (std::size_t i : idx)
                t.push_back(nodes[i]);
            tuples.push_back(t);
            std::size_t k = 0;
            while (k < idx.size() && ++idx[k] == nodes.size())
                idx[k++] = 0;
            if (k == idx.size())
                break;
        }
        for (int mode : {1, 2}) {
            std::map<std::string, std::size_t> rep; // profile -> first tuple
            for (std::size_t i = 0; i < tuples.size(); ++i)
                rep.emplace(profile(tuples[i], mode), i);
            (mode == 1 ? classes1 : classes2) += rep.size();
            for (const auto &t : tuples) {
                const std::string mine = profile(t, mode);
                ++law_checks;
                law_bad += !tuple_equiv(t, t, mode);
                for (const auto &[key, r] : rep) {
                    ++law_checks;
                    law_bad += tuple_equiv(t, tuples[r], mode) != (key == mine);
                    law_bad += tuple_equiv(tuples[r], t, mode) != (key == mine);
                }
                if (mode == 1) {
                    // ≈1 implies ≈2 against the ≈1 representative.
                    ++law_checks;
                    const auto &r = tuples[rep.at(mine)];
                    law_bad += tuple_equiv(t, r, 1) && !tuple_equiv(t, r, 2);
                }
            }
        }
    }
    std::ostringstream os;
    os << families << " families, " << sop2 << " SOP2-accepted, " << implied << " of them SOP1-accepted; "
       << law_checks << " ≈ checks at depth <= 4, length <= 3 (" << classes1 << " ≈1 / " << classes2
       << " ≈2 classes), " << law_bad << " violations; tolerance 0";
    return {sop2 > 0 && implied == sop2 && law_bad == 0, os.str()};
}

const std::map<int, std::pair<const char *, Outcome (*)()>> kCriteria = {
    {1, {"rank/tree agreement", rank_tree_agreement}},
    {2, {"monotonicity and entailment", monotonicity}},
    {3, {"DLO has SOP'1 trees", dlo_sop1}},
    {4, {"random graph rank 0", random_graph_rank}},
    {5, {"T*_feq depth-2 refutation", feq_refutation}},
    {6, {"T_feq amalgamation", amalgamation}},
    {7, {"SOP''2 to SOP2 transform", transform_corpus}},
    {8, {"witness and ≈ invariants", invariants}},
};

} // namespace

int main(int argc, char **argv)
{
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) {
        char *end = nullptr;
        const long n = std::strtol(argv[i], &end, 10);
        if (*end != '\0' || !kCriteria.count(static_cast<int>(n))) {
            std::cerr << "usage: acceptance [1-8]...\n";
            return 64;
        }
        selected.push_back(static_cast<int>(n));
    }
    if (selected.empty())
        for (const auto &[n, c] : kCriteria)
            selected.push_back(n);
    bool all = true;
    for (int n : selected) {
        const auto &[name, run] = kCriteria.at(n);
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = run();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        std::printf("%s criterion %d (%s): %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", n, name, o.detail.c_str(), secs);
        std::fflush(stdout);
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
