#include "sopkit/trees.hpp"

#include <algorithm>
#include <sstream>

namespace sopkit {

Node Node::parse(std::string_view s)
{
    if (s.size() > 62)
        throw std::invalid_argument("node longer than 62 bits");
    Node n;
    for (char c : s) {
        if (c != '0' && c != '1')
            throw std::invalid_argument("node '" + std::string(s) + "' is not a bit string");
        n = n.child(c - '0');
    }
    return n;
}

Node Node::from_heap(std::size_t h)
{
    int len = 0;
    while ((std::size_t{2} << len) - 1 <= h)
        ++len;
    return Node{h - ((std::size_t{1} << len) - 1), len};
}

std::string Node::str() const
{
    std::string s;
    for (int i = 0; i < len; ++i)
        s += static_cast<char>('0' + at(i));
    return s;
}

Node meet(const Node &a, const Node &b)
{
    int l = 0;
    const int top = std::min(a.len, b.len);
    while (l < top && a.at(l) == b.at(l))
        ++l;
    return a.prefix(l);
}

Node concat(const Node &a, const Node &b)
{
    return Node{(a.bits << b.len) | b.bits, a.len + b.len};
}

Node segment(const Node &nu, int from, int to)
{
    if (from < 0 || to > nu.len || from > to)
        throw std::out_of_range("segment out of range");
    const Node p = nu.prefix(to);
    return Node{p.bits & ((std::uint64_t{1} << (to - from)) - 1), to - from};
}

std::vector<Node> level(int l)
{
    std::vector<Node> out;
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << l); ++v)
        out.push_back(Node{v, l});
    return out;
}

std::vector<Node> nodes_upto(int depth)
{
    std::vector<Node> out;
    for (int l = 0; l <= depth; ++l)
        for (const Node &n : level(l))
            out.push_back(n);
    return out;
}

// ---------------------------------------------------------------------------

void Report::fail(std::string what)
{
    holds = Truth::False;
    violations.push_back(std::move(what));
}

void Report::unknown(std::string what)
{
    if (holds == Truth::True)
        holds = Truth::Unknown;
    indeterminate.push_back(std::move(what));
}

void Report::expect(const Verdict &v, bool expect_consistent, const std::string &what)
{
    if (v.unknown())
        unknown(what);
    else if (v.consistent() != expect_consistent)
        fail(what);
}

nlohmann::json Report::to_json() const
{
    return {{"holds", to_string(holds)}, {"violations", violations}, {"indeterminate", indeterminate}};
}

SopTree SopTree::make(int depth, Diagram d)
{
    if (depth < 0 || depth > 30)
        throw std::invalid_argument("tree depth out of range");
    return SopTree{depth, std::vector<ParamTuple>((std::size_t{1} << depth) - 1), std::move(d)};
}

TreeFamily TreeFamily::make(int depth, Diagram d)
{
    if (depth < 0 || depth > 30)
        throw std::invalid_argument("family depth out of range");
    return TreeFamily{depth, std::vector<ParamTuple>((std::size_t{2} << depth) - 1), std::move(d)};
}

ParamTuple WitnessFamily::at(const Chain &c) const
{
    if (canonical) {
        ParamTuple t;
        for (const Node &n : c)
            t.push_back(static_cast<Element>(n.heap()));
        return t;
    }
    auto it = tuples.find(c);
    if (it == tuples.end()) {
        std::string s;
        for (const Node &n : c)
            s += "<" + n.str() + ">";
        throw std::out_of_range("witness family has no tuple for chain " + s);
    }
    return it->second;
}

bool WitnessFamily::defined(const Chain &c) const
{
    if (canonical)
        return std::all_of(c.begin(), c.end(), [&](const Node &n) { return n.len <= depth; });
    return tuples.count(c) > 0;
}

std::vector<Chain> chains_below(const Node &top, int count)
{
    std::vector<Chain> out;
    Chain cur;
    std::function<void(int)> rec = [&](int from) {
        if (static_cast<int>(cur.size()) == count) {
            out.push_back(cur);
            return;
        }
        for (int l = from; l <= top.len; ++l) {
            cur.push_back(top.prefix(l));
            rec(l + 1);
            cur.pop_back();
        }
    };
    rec(0);
    return out;
}

namespace {

std::string tuple_text(const ParamTuple &t)
{
    std::string s = "(";
    for (std::size_t i = 0; i < t.size(); ++i)
        s += (i ? "," : "") + std::to_string(t[i]);
    return s + ")";
}

std::string node_text(const Node &n)
{
    return "<" + n.str() + ">";
}

template <typename Family>
void check_arity(const Family &f, const TemplatePtr &phi)
{
    for (const auto &t : f.tuples)
        if (static_cast<int>(t.size()) != phi->param_arity())
            throw std::invalid_argument("tuple " + tuple_text(t) + " does not fit the parameter block of " +
                                        phi->text());
}

Verdict decide_pair(const TheoryPlugin &T, const TemplatePtr &phi, const ParamTuple &a, const ParamTuple &b,
                    const Diagram &D, Budget &budget)
{
    return T.decide({substitute(phi, a), substitute(phi, b)}, D, budget, phi->object_arity());
}

/// Branch clause shared by the SOP_1 / SOP_2 verifiers.
void check_branches(const TheoryPlugin &T, const TemplatePtr &phi, const TreeFamily &f, Budget &budget, Report &r)
{
    for (const Node &eta : level(f.depth)) {
        PartialType S;
        for (int l = 0; l <= f.depth; ++l)
            S.push_back(substitute(phi, f.at(eta.prefix(l))));
        r.expect(T.decide(S, f.diagram, budget, phi->object_arity()), true, "(a) branch " + node_text(eta));
    }
}

} // namespace

Report verify_sop1tree(const TheoryPlugin &T, const TemplatePtr &phi, const PartialType &p, const PartialType &q,
                       const SopTree &tree, Budget &budget)
{
    check_arity(tree, phi);
    Report r;
    const Diagram &D = tree.diagram;
    const int n = tree.depth;
    for (const Node &eta : level(n)) {
        PartialType S = p;
        for (int l = 0; l < n; ++l)
            if (eta.at(l) == 1)
                S.push_back(substitute(phi, tree.at(eta.prefix(l))));
        r.expect(T.decide(S, D, budget, phi->object_arity()), true, "(a) branch " + node_text(eta));
    }
    if (n == 0) {
        r.expect(T.decide(q, D, budget, phi->param_arity()), true, "(b) q is inconsistent");
    }
    const std::vector<Node> nodes = n == 0 ? std::vector<Node>{} : nodes_upto(n - 1);
    for (const Node &eta : nodes)
        for (const auto &inst : q) {
            Truth t = T.holds(inst, tree.at(eta), D, budget);
            if (t == Truth::False)
                r.fail("(b) node " + node_text(eta) + " fails " + inst.encode());
            else if (t == Truth::Unknown)
                r.unknown("(b) node " + node_text(eta));
        }
    for (const Node &nu : nodes) {
        if (nu.len + 1 >= n)
            continue;
        const Node zero = nu.child(0);
        for (const Node &eta : nodes)
            if (zero.initial_of(eta))
                r.expect(decide_pair(T, phi, tree.at(nu), tree.at(eta), D, budget), false,
                         "(c) " + node_text(nu) + " with " + node_text(eta));
    }
    return r;
}

SplitTree split_tree(const TemplatePtr &phi, const PartialType &p, const PartialType &q, const SopTree &tree)
{
    if (tree.depth < 1)
        throw std::invalid_argument("split_tree needs depth >= 1");
    const ParamTuple &root = tree.at(Node{});
    SplitTree s{SopTree::make(tree.depth - 1, tree.diagram), SopTree::make(tree.depth - 1, tree.diagram), p, q, p, q};
    for (const Node &eta : tree.depth > 1 ? nodes_upto(tree.depth - 2) : std::vector<Node>{}) {
        s.a0.at(eta) = tree.at(concat(Node{0, 1}, eta));
        s.a1.at(eta) = tree.at(concat(Node{1, 1}, eta));
    }
    s.q0.push_back(pair_instance(phi, root));
    s.p1.push_back(substitute(phi, root));
    return s;
}

SopTree join_tree(const ParamTuple &c, const SopTree &a0, const SopTree &a1, Diagram diagram)
{
    if (a0.depth != a1.depth)
        throw std::invalid_argument("join_tree: subtrees of different depth");
    SopTree t = SopTree::make(a0.depth + 1, std::move(diagram));
    t.at(Node{}) = c;
    for (const Node &eta : a0.depth > 0 ? nodes_upto(a0.depth - 1) : std::vector<Node>{}) {
        t.at(concat(Node{0, 1}, eta)) = a0.at(eta);
        t.at(concat(Node{1, 1}, eta)) = a1.at(eta);
    }
    return t;
}

Report verify_sop2_witness(const TheoryPlugin &T, const TemplatePtr &phi, const TreeFamily &f, Budget &budget)
{
    check_arity(f, phi);
    Report r;
    check_branches(T, phi, f, budget, r);
    const std::vector<Node> nodes = nodes_upto(f.depth);
    for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t j = i + 1; j < nodes.size(); ++j)
            if (!nodes[i].comparable(nodes[j]))
                r.expect(decide_pair(T, phi, f.at(nodes[i]), f.at(nodes[j]), f.diagram, budget), false,
                         "(b) " + node_text(nodes[i]) + " with " + node_text(nodes[j]));
    return r;
}

Report verify_sop1_witness(const TheoryPlugin &T, const TemplatePtr &phi, const TreeFamily &f, Budget &budget)
{
    check_arity(f, phi);
    Report r;
    check_branches(T, phi, f, budget, r);
    const std::vector<Node> nodes = nodes_upto(f.depth);
    for (const Node &nu : nodes) {
        if (nu.len >= f.depth)
            continue;
        const Node zero = nu.child(0), one = nu.child(1);
        for (const Node &eta : nodes)
            if (zero.initial_of(eta))
                r.expect(decide_pair(T, phi, f.at(eta), f.at(one), f.diagram, budget), false,
                         "(b) " + node_text(eta) + " with " + node_text(one));
    }
    return r;
}

Report verify_sop1p_witness(const TheoryPlugin &T, const TemplatePtr &phi, const TreeFamily &f, Budget &budget)
{
    check_arity(f, phi);
    Report r;
    for (const Node &eta : level(f.depth)) {
        PartialType S;
        for (int l = 0; l < f.depth; ++l)
            S.push_back(substitute(phi, f.at(eta.prefix(l)), eta.at(l) == 1));
        r.expect(T.decide(S, f.diagram, budget, phi->object_arity()), true, "(a) signed branch " + node_text(eta));
    }
    const std::vector<Node> nodes = nodes_upto(f.depth);
    for (const Node &nu : nodes) {
        if (nu.len >= f.depth)
            continue;
        const Node zero = nu.child(0);
        for (const Node &eta : nodes)
            if (zero.initial_of(eta))
                r.expect(decide_pair(T, phi, f.at(eta), f.at(nu), f.diagram, budget), false,
                         "(b) " + node_text(eta) + " with " + node_text(nu));
    }
    return r;
}

// ---------------------------------------------------------------------------
// SOP''_2

std::vector<std::vector<int>> tree_domain(int n, int m)
{
    std::vector<std::vector<int>> out{{}};
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (static_cast<int>(out[i].size()) == n)
            continue;
        for (int j = 0; j < m; ++j) {
            auto c = out[i];
            c.push_back(j);
            out.push_back(std::move(c));
        }
    }
    return out;
}

bool for_each_embedding(int n, int m, int E, const std::function<bool(const std::vector<Node> &)> &f)
{
    const auto dom = tree_domain(n, m);
    std::vector<int> parent(dom.size(), -1);
    for (std::size_t i = 1; i < dom.size(); ++i) {
        auto p = dom[i];
        p.pop_back();
        parent[i] = static_cast<int>(std::find(dom.begin(), dom.end(), p) - dom.begin());
    }
    const std::vector<Node> all = nodes_upto(E);
    std::vector<Node> h(dom.size());
    std::function<bool(std::size_t)> rec = [&](std::size_t i) -> bool {
        if (i == dom.size())
            return f(h);
        for (const Node &v : all) {
            if (i > 0) {
                if (!h[parent[i]].strict_initial_of(v))
                    continue;
                bool clash = false;
                for (std::size_t s = 1; s < i && !clash; ++s)
                    if (parent[s] == parent[i] && v.comparable(h[s]))
                        clash = true;
                if (clash)
                    continue;
            }
            // Leave room below for the rest of the domain subtree.
            if (v.len + (n - static_cast<int>(dom[i].size())) > E)
                continue;
            h[i] = v;
            if (!rec(i + 1))
                return false;
        }
        return true;
    };
    return rec(0);
}

Report verify_sop2pp_witness(const TheoryPlugin &T, const TemplatePtr &theta, const WitnessFamily &wf,
                             const Sop2ppOptions &opt, Budget &budget)
{
    if (wf.n < 0 || opt.m < 1)
        throw std::invalid_argument("sop2pp: need n >= 0 and m >= 1");
    Report r;
    const int count = wf.n + 1;
    for (const Node &eta : level(wf.depth)) {
        PartialType S;
        for (const Chain &c : chains_below(eta, count))
            S.push_back(substitute(theta, wf.at(c)));
        r.expect(T.decide(S, wf.diagram, budget, theta->object_arity()), true, "(a) branch " + node_text(eta));
    }
    if (!opt.check_embeddings)
        return r;
    const int E = opt.embed_depth >= 0 ? opt.embed_depth : wf.n + 2;
    if (E > wf.depth && !wf.canonical)
        throw std::invalid_argument("sop2pp: embedding depth " + std::to_string(E) + " exceeds the family depth");
    const auto dom = tree_domain(wf.n, opt.m);
    std::vector<std::size_t> leaves;
    for (std::size_t i = 0; i < dom.size(); ++i)
        if (static_cast<int>(dom[i].size()) == wf.n)
            leaves.push_back(i);
    for_each_embedding(wf.n, opt.m, E, [&](const std::vector<Node> &h) {
        PartialType S;
        for (std::size_t leaf : leaves) {
            Chain c;
            auto path = dom[leaf];
            for (int l = 0; l <= wf.n; ++l) {
                std::vector<int> pre(path.begin(), path.begin() + l);
                c.push_back(h[std::find(dom.begin(), dom.end(), pre) - dom.begin()]);
            }
            S.push_back(substitute(theta, wf.at(c)));
        }
        Verdict v = T.decide(S, wf.diagram, budget, theta->object_arity());
        if (!v.inconsistent()) {
            std::string img;
            for (const Node &x : h)
                img += node_text(x);
            r.expect(v, false, "(b) image " + img);
        }
        return !budget.exhausted && r.violations.size() < 16;
    });
    if (budget.exhausted && r.holds == Truth::True)
        r.unknown("(b) budget exhausted during the embedding scan");
    return r;
}

// ---------------------------------------------------------------------------
// SOP_3 and SOP_n

namespace {

/// φ(x; y) read with both blocks as objects, x first.
TemplatePtr flatten_blocks(const TemplatePtr &phi)
{
    std::vector<std::string> objs = phi->object_vars();
    objs.insert(objs.end(), phi->param_vars().begin(), phi->param_vars().end());
    return std::make_shared<FormulaTemplate>(phi->signature(), objs, std::vector<std::string>{}, phi->bound_vars(),
                                             phi->matrix());
}

/// Object block z_0 ... z_{n-1} (each of the x length) carrying φ(z_i, z_{i+1 mod n}).
TemplatePtr cycle_template(const TemplatePtr &phi, int n)
{
    const int w = phi->object_arity();
    const int nb = phi->bound_count();
    std::vector<std::string> objs, bound;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < w; ++j)
            objs.push_back("z" + std::to_string(i) + "_" + std::to_string(j));
    std::vector<Formula> parts;
    for (int i = 0; i < n; ++i) {
        std::vector<int> map(phi->slot_count());
        for (int j = 0; j < w; ++j) {
            map[j] = i * w + j;
            map[w + j] = ((i + 1) % n) * w + j;
        }
        for (int b = 0; b < nb; ++b) {
            map[2 * w + b] = n * w + i * nb + b;
            bound.push_back(phi->bound_vars()[b] + "_" + std::to_string(i));
        }
        parts.push_back(shift_formula(phi->matrix(), map));
    }
    return std::make_shared<FormulaTemplate>(phi->signature(), objs, std::vector<std::string>{}, bound,
                                             Formula::conjunction(std::move(parts)));
}

} // namespace

Report verify_sop3_witness(const TheoryPlugin &T, const TemplatePtr &phi, const TemplatePtr &psi,
                           const std::vector<ParamTuple> &a, const std::vector<ParamTuple> &b, const Diagram &D,
                           Budget &budget)
{
    if (phi->object_arity() != psi->object_arity() || phi->param_arity() != psi->param_arity())
        throw std::invalid_argument("sop3: phi and psi need the same variable blocks");
    if (a.size() != b.size())
        throw std::invalid_argument("sop3: the a and b sequences differ in length");
    Report r;
    const int w = phi->object_arity() + phi->param_arity();
    r.expect(T.decide({substitute(flatten_blocks(phi), {}), substitute(flatten_blocks(psi), {})}, T.empty_diagram(),
                      budget, w),
             false, "(a) phi and psi are jointly satisfiable");
    for (std::size_t j = 0; j < b.size(); ++j)
        for (std::size_t i = 0; i < a.size(); ++i) {
            const bool use_phi = i <= j;
            Truth t = T.holds(substitute(use_phi ? phi : psi, a[i]), b[j], D, budget);
            const std::string what = std::string("(b) ") + (use_phi ? "phi" : "psi") + "[b_" + std::to_string(j) +
                                     ", a_" + std::to_string(i) + "]";
            if (t == Truth::False)
                r.fail(what);
            else if (t == Truth::Unknown)
                r.unknown(what);
        }
    for (std::size_t j = 0; j < a.size(); ++j)
        for (std::size_t i = 0; i < j; ++i)
            r.expect(T.decide({substitute(phi, a[j]), substitute(psi, a[i])}, D, budget, phi->object_arity()), false,
                     "(c) phi(x, a_" + std::to_string(j) + ") with psi(x, a_" + std::to_string(i) + ")");
    return r;
}

Report verify_sopn_witness(const TheoryPlugin &T, const TemplatePtr &phi, const std::vector<ParamTuple> &chain,
                           int n, const Diagram &D, Budget &budget)
{
    if (phi->object_arity() != phi->param_arity())
        throw std::invalid_argument("sopn: phi(x, y) needs lg(x) = lg(y)");
    if (n < 1)
        throw std::invalid_argument("sopn: cycle length must be positive");
    Report r;
    for (std::size_t j = 0; j < chain.size(); ++j)
        for (std::size_t i = 0; i < j; ++i) {
            Truth t = T.holds(substitute(phi, chain[j]), chain[i], D, budget);
            const std::string what = "chain edge " + std::to_string(i) + " -> " + std::to_string(j);
            if (t == Truth::False)
                r.fail(what);
            else if (t == Truth::Unknown)
                r.unknown(what);
        }
    r.expect(T.decide({substitute(cycle_template(phi, n), {})}, T.empty_diagram(), budget, n * phi->object_arity()),
             false, "the " + std::to_string(n) + "-cycle is consistent");
    return r;
}

// ---------------------------------------------------------------------------
// Indiscernibility

TupleProfile TupleProfile::of(const std::vector<Node> &t)
{
    const int s = static_cast<int>(t.size());
    TupleProfile p;
    p.size = s;
    p.below_meet.resize(s * s * s);
    p.meet_below.resize(s * s * s);
    p.zero_turn.resize(s * s * s);
    for (int k1 = 0; k1 < s; ++k1)
        for (int k2 = 0; k2 < s; ++k2) {
            const Node m = meet(t[k1], t[k2]);
            for (int k3 = 0; k3 < s; ++k3) {
                const int i = (k1 * s + k2) * s + k3;
                p.below_meet[i] = t[k3].initial_of(m);
                p.meet_below[i] = m.strict_initial_of(t[k3]);
                p.zero_turn[i] = m.child(0).initial_of(t[k3]);
            }
        }
    return p;
}

bool tuple_equiv(const std::vector<Node> &a, const std::vector<Node> &b, int t)
{
    if (t != 1 && t != 2)
        throw std::invalid_argument("tuple_equiv: t must be 1 or 2");
    if (a.size() != b.size())
        return false;
    const TupleProfile pa = TupleProfile::of(a), pb = TupleProfile::of(b);
    if (pa.below_meet != pb.below_meet || pa.meet_below != pb.meet_below)
        return false;
    return t == 2 || pa.zero_turn == pb.zero_turn;
}

Report check_fbti(const TheoryPlugin &T, const TreeFamily &f, int t, const std::vector<TemplatePtr> &delta,
                  int max_len, Budget &budget)
{
    if (t != 1 && t != 2)
        throw std::invalid_argument("check_fbti: t must be 1 or 2");
    Report r;
    const std::vector<Node> nodes = nodes_upto(f.depth);
    const std::size_t w = f.tuples.empty() ? 0 : f.tuples.front().size();
    for (int len = 1; len <= max_len; ++len) {
        // Δ formulas speak about the concatenation of len tuples.
        std::vector<TemplatePtr> active;
        for (const auto &d : delta)
            if (d->param_arity() == 0 && d->object_arity() == static_cast<int>(len * w))
                active.push_back(d);
        if (active.empty())
            continue;
        std::vector<std::pair<std::vector<Node>, std::vector<Truth>>> reps;
        std::vector<std::size_t> idx(len, 0);
        while (true) {
            std::vector<Node> tup;
            ParamTuple objs;
            for (std::size_t i : idx) {
                tup.push_back(nodes[i]);
                const auto &a = f.at(nodes[i]);
                objs.insert(objs.end(), a.begin(), a.end());
            }
            std::vector<Truth> type;
            for (const auto &d : active)
                type.push_back(T.holds(substitute(d, {}), objs, f.diagram, budget));
            bool placed = false;
            for (const auto &[rep, rtype] : reps)
                if (tuple_equiv(rep, tup, t)) {
                    placed = true;
                    for (std::size_t k = 0; k < type.size(); ++k) {
                        if (type[k] == Truth::Unknown || rtype[k] == Truth::Unknown) {
                            r.unknown("undetermined " + active[k]->text());
                        } else if (type[k] != rtype[k]) {
                            std::string a, b;
                            for (const Node &n : rep)
                                a += node_text(n);
                            for (const Node &n : tup)
                                b += node_text(n);
                            r.fail(a + " and " + b + " differ on " + active[k]->text());
                        }
                    }
                    break;
                }
            if (!placed)
                reps.emplace_back(tup, type);
            std::size_t k = 0;
            while (k < idx.size() && ++idx[k] == nodes.size())
                idx[k++] = 0;
            if (k == idx.size())
                break;
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// I/O

namespace {

nlohmann::json node_table(const std::vector<ParamTuple> &tuples)
{
    nlohmann::json j = nlohmann::json::object();
    for (std::size_t h = 0; h < tuples.size(); ++h)
        j[Node::from_heap(h).str()] = tuples[h];
    return j;
}

void read_node_table(const nlohmann::json &j, std::vector<ParamTuple> &tuples)
{
    for (std::size_t h = 0; h < tuples.size(); ++h) {
        const std::string key = Node::from_heap(h).str();
        if (!j.contains(key))
            throw std::invalid_argument("witness is missing node \"" + key + "\"");
        tuples[h] = j[key].get<ParamTuple>();
    }
    if (j.size() != tuples.size())
        throw std::invalid_argument("witness has nodes outside the tree");
}

void check_schema(const nlohmann::json &j)
{
    if (!j.contains("schema") || j["schema"] != kWitnessSchema)
        throw std::invalid_argument("unsupported witness schema " +
                                    (j.contains("schema") ? j["schema"].dump() : std::string("(missing)")));
}

} // namespace

nlohmann::json tree_to_json(const SopTree &t)
{
    return {{"schema", kWitnessSchema},
            {"kind", "sop1tree"},
            {"depth", t.depth},
            {"nodes", node_table(t.tuples)},
            {"diagram", t.diagram.to_json()}};
}

SopTree tree_from_json(const nlohmann::json &j, SignaturePtr sig)
{
    check_schema(j);
    SopTree t = SopTree::make(j.at("depth").get<int>(), Diagram::from_json(j.at("diagram"), std::move(sig)));
    read_node_table(j.at("nodes"), t.tuples);
    return t;
}

nlohmann::json family_to_json(const TreeFamily &f)
{
    return {{"schema", kWitnessSchema},
            {"kind", "family"},
            {"depth", f.depth},
            {"nodes", node_table(f.tuples)},
            {"diagram", f.diagram.to_json()}};
}

TreeFamily family_from_json(const nlohmann::json &j, SignaturePtr sig)
{
    check_schema(j);
    TreeFamily f = TreeFamily::make(j.at("depth").get<int>(), Diagram::from_json(j.at("diagram"), std::move(sig)));
    read_node_table(j.at("nodes"), f.tuples);
    return f;
}

nlohmann::json witness_family_to_json(const WitnessFamily &wf)
{
    nlohmann::json chains = nlohmann::json::array();
    for (const auto &[c, t] : wf.tuples) {
        std::vector<std::string> names;
        for (const Node &n : c)
            names.push_back(n.str());
        chains.push_back({{"chain", names}, {"params", t}});
    }
    return {{"schema", kWitnessSchema}, {"kind", "sop2pp"},           {"n", wf.n},
            {"depth", wf.depth},        {"canonical", wf.canonical}, {"chains", chains},
            {"diagram", wf.diagram.to_json()}};
}

WitnessFamily witness_family_from_json(const nlohmann::json &j, SignaturePtr sig)
{
    check_schema(j);
    WitnessFamily wf;
    wf.n = j.at("n").get<int>();
    wf.depth = j.at("depth").get<int>();
    wf.canonical = j.value("canonical", false);
    wf.diagram = Diagram::from_json(j.at("diagram"), std::move(sig));
    for (const auto &e : j.value("chains", nlohmann::json::array())) {
        Chain c;
        for (const auto &s : e.at("chain"))
            c.push_back(Node::parse(s.get<std::string>()));
        if (static_cast<int>(c.size()) != wf.n + 1)
            throw std::invalid_argument("chain of the wrong length in witness family");
        for (std::size_t i = 1; i < c.size(); ++i)
            if (!c[i - 1].strict_initial_of(c[i]))
                throw std::invalid_argument("witness family key is not a ⊲-chain");
        wf.tuples[c] = e.at("params").get<ParamTuple>();
    }
    return wf;
}

std::string tree_to_dot(const TheoryPlugin &T, const TemplatePtr &phi, const std::vector<ParamTuple> &tuples,
                        int levels, const Diagram &D, Budget &budget)
{
    std::ostringstream os;
    os << "digraph tree {\n  node [shape=box];\n";
    const std::size_t count = (std::size_t{1} << levels) - 1;
    auto name = [](const Node &n) { return "\"n" + n.str() + "\""; };
    for (std::size_t h = 0; h < count && h < tuples.size(); ++h) {
        const Node n = Node::from_heap(h);
        os << "  " << name(n) << " [label=\"" << (n.len ? n.str() : "<>") << "\\n" << tuple_text(tuples[h])
           << "\"];\n";
    }
    for (std::size_t h = 1; h < count && h < tuples.size(); ++h) {
        const Node n = Node::from_heap(h);
        os << "  " << name(n.prefix(n.len - 1)) << " -> " << name(n) << ";\n";
    }
    for (std::size_t i = 0; i < count && i < tuples.size(); ++i)
        for (std::size_t j = i + 1; j < count && j < tuples.size(); ++j)
            if (decide_pair(T, phi, tuples[i], tuples[j], D, budget).inconsistent())
                os << "  " << name(Node::from_heap(i)) << " -> " << name(Node::from_heap(j))
                   << " [style=dashed, color=red, dir=none, constraint=false];\n";
    os << "}\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// DLO constructions

namespace {

Diagram dlo_chain(int points)
{
    Diagram d{FiniteStructure(Signature::dlo()), {}};
    for (int i = 0; i < points; ++i)
        d.structure.add_element(i);
    for (int i = 0; i < points; ++i)
        for (int j = i + 1; j < points; ++j)
            d.structure.add_fact(0, {i, j});
    return d;
}

} // namespace

SopTree dlo_sop1_tree(int depth)
{
    // Region of ν is (lo, hi); a_ν = (lo, mid); ν⌢1 works inside a_ν and ν⌢0 in (mid, hi).
    const int width = 1 << depth;
    SopTree t = SopTree::make(depth, dlo_chain(width + 1));
    std::function<void(const Node &, int, int)> fill = [&](const Node &nu, int lo, int hi) {
        if (nu.len >= depth)
            return;
        const int mid = lo + (hi - lo) / 2;
        t.at(nu) = {lo, mid};
        fill(nu.child(1), lo, mid);
        fill(nu.child(0), mid, hi);
    };
    fill(Node{}, 0, width);
    t.diagram.tuples = t.tuples;
    return t;
}

TreeFamily dlo_dyadic_family(int depth)
{
    const int width = 1 << depth;
    TreeFamily f = TreeFamily::make(depth, dlo_chain(width + 1));
    for (const Node &n : nodes_upto(depth)) {
        const int step = width >> n.len;
        const int lo = static_cast<int>(n.bits) * step;
        f.at(n) = {lo, lo + step};
    }
    f.diagram.tuples = f.tuples;
    return f;
}

} // namespace sopkit
