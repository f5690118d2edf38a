#include "sopkit/feq.hpp"

#include "sopkit/parser.hpp"
#include "sopkit/rank.hpp"

#include <algorithm>
#include <numeric>

namespace sopkit::feq {

namespace {

bool is(const FiniteStructure &M, int unary, Element e)
{
    return M.holds(unary, std::vector<Element>{e});
}

bool rel(const FiniteStructure &M, int r, Element a, Element b)
{
    return M.holds(r, std::vector<Element>{a, b});
}

void require_feq(const FiniteStructure &M)
{
    if (*M.signature() != *Signature::feq())
        throw std::invalid_argument("structure is not over the {Q,P,E,R,F} signature");
}

std::string show(const std::vector<Element> &es)
{
    std::string s;
    for (Element e : es)
        s += (s.empty() ? "" : ",") + std::to_string(e);
    return s;
}

} // namespace

std::vector<Element> elements_in(const FiniteStructure &M, int unary)
{
    std::vector<Element> out;
    for (const auto &t : M.facts(unary))
        out.push_back(t[0]);
    return out;
}

Classes classes(const FiniteStructure &M)
{
    Classes c;
    for (Element q : elements_in(M, kQ)) {
        if (c.of.count(q))
            continue;
        const int id = static_cast<int>(c.members.size());
        c.members.push_back({});
        for (Element v : elements_in(M, kQ))
            if (v == q || rel(M, kE, q, v)) {
                if (!c.of.count(v)) {
                    c.of[v] = id;
                    c.members.back().push_back(v);
                }
            }
    }
    return c;
}

void close_equivalence(FiniteStructure &M)
{
    const std::vector<Element> Q = elements_in(M, kQ);
    std::map<Element, Element> parent;
    for (Element e : Q)
        parent[e] = e;
    auto find = [&](Element e) {
        while (parent[e] != e)
            e = parent[e] = parent[parent[e]];
        return e;
    };
    for (const auto &t : M.facts(kE))
        if (parent.count(t[0]) && parent.count(t[1]))
            parent[find(t[0])] = find(t[1]);
    for (Element a : Q)
        for (Element b : Q)
            if (find(a) == find(b))
                M.add_fact(kE, {a, b});
}

void rebuild_function(FiniteStructure &M)
{
    M.clear_function(kF);
    const Classes cls = classes(M);
    for (Element z : elements_in(M, kP))
        for (const auto &mem : cls.members) {
            std::vector<Element> reps;
            for (Element y : mem)
                if (rel(M, kR, y, z))
                    reps.push_back(y);
            if (reps.size() != 1)
                continue;
            for (Element x : mem)
                M.set_value(kF, {x, z}, reps.front());
        }
}

int add_missing_representatives(FiniteStructure &M)
{
    const Classes cls = classes(M);
    const std::vector<Element> P = elements_in(M, kP);
    int added = 0;
    for (const auto &mem : cls.members) {
        std::vector<Element> missing;
        for (Element z : P)
            if (std::none_of(mem.begin(), mem.end(), [&](Element y) { return rel(M, kR, y, z); }))
                missing.push_back(z);
        if (missing.empty())
            continue;
        const Element w = M.fresh_element();
        M.add_element(w);
        M.add_fact(kQ, {w});
        M.add_fact(kE, {w, w});
        for (Element v : mem) {
            M.add_fact(kE, {w, v});
            M.add_fact(kE, {v, w});
        }
        for (Element z : missing)
            M.add_fact(kR, {w, z});
        ++added;
    }
    return added;
}

std::vector<Violation> check_tfeq(const FiniteStructure &M)
{
    std::vector<Violation> out;
    if (*M.signature() != *Signature::feq()) {
        out.push_back({'s', "signature is not {Q,P,E,R,F}", {}});
        return out;
    }
    for (Element e : M.universe()) {
        const bool p = is(M, kP, e), q = is(M, kQ, e);
        if (p == q)
            out.push_back({'a', p ? "element is in both P and Q" : "element is in neither P nor Q", {e}});
    }
    for (const auto &t : M.facts(kE))
        if (!is(M, kQ, t[0]) || !is(M, kQ, t[1]))
            out.push_back({'b', "E relates elements outside Q", {t[0], t[1]}});
    const std::vector<Element> Q = elements_in(M, kQ);
    for (Element a : Q) {
        if (!rel(M, kE, a, a))
            out.push_back({'b', "E is not reflexive", {a}});
        for (Element b : Q) {
            if (rel(M, kE, a, b) && !rel(M, kE, b, a))
                out.push_back({'b', "E is not symmetric", {a, b}});
            for (Element c : Q)
                if (rel(M, kE, a, b) && rel(M, kE, b, c) && !rel(M, kE, a, c))
                    out.push_back({'b', "E is not transitive", {a, b, c}});
        }
    }
    for (const auto &t : M.facts(kR))
        if (!is(M, kQ, t[0]) || !is(M, kP, t[1]))
            out.push_back({'c', "R is not contained in Q x P", {t[0], t[1]}});
    for (const auto &s : M.facts(kR))
        for (const auto &t : M.facts(kR))
            if (s[1] == t[1] && s[0] < t[0] && rel(M, kE, s[0], t[0]))
                out.push_back({'c', "two E-equivalent representatives of one P element", {s[0], t[0], s[1]}});
    for (const auto &[args, y] : M.graph(kF)) {
        const Element x = args[0], z = args[1];
        if (!is(M, kQ, x) || !is(M, kP, z))
            out.push_back({'d', "F is defined outside Q x P", {x, z}});
        if (!is(M, kQ, y) || !rel(M, kR, y, z) || !rel(M, kE, x, y))
            out.push_back({'d', "F(x,z) is not the representative of x's class for z", {x, z, y}});
    }
    return out;
}

bool satisfies_axioms_by_evaluation(const FiniteStructure &M)
{
    // Each axiom is written as the existential statement of its failure.
    static const char *const failures[] = {
        "exists u . (P(u) & Q(u)) | !(P(u) | Q(u)) ; vars |",
        "exists u v . E(u,v) & !(Q(u) & Q(v)) ; vars |",
        "exists u . Q(u) & !E(u,u) ; vars |",
        "exists u v . E(u,v) & !E(v,u) ; vars |",
        "exists u v w . E(u,v) & E(v,w) & !E(u,w) ; vars |",
        "exists u v . R(u,v) & !(Q(u) & P(v)) ; vars |",
        "exists u v w . R(u,w) & R(v,w) & E(u,v) & u != v ; vars |",
        "exists u v . def(F(u,v)) & !(Q(u) & P(v)) ; vars |",
        "exists u v . def(F(u,v)) & !(Q(F(u,v)) & R(F(u,v),v) & E(u,F(u,v))) ; vars |",
    };
    for (const char *text : failures) {
        const TemplatePtr f = parse_formula(text, Signature::feq());
        if (evaluate(M, *f, {}))
            return false;
    }
    return true;
}

// ---------------------------------------------------------------------------

FiniteStructure amalgamate(const AmalgamInput &input)
{
    const FiniteStructure *parts[] = {&input.base, &input.n0, &input.n1};
    const char *names[] = {"B", "N0", "N1"};
    for (int i = 0; i < 3; ++i) {
        require_feq(*parts[i]);
        auto v = check_tfeq(*parts[i]);
        if (!v.empty())
            throw AmalgamError(AmalgamError::Kind::Shape, v.front().elements,
                               std::string(names[i]) + " is not a model of T_feq: " + v.front().message);
    }
    if (!std::includes(input.n0.universe().begin(), input.n0.universe().end(), input.base.universe().begin(),
                       input.base.universe().end()) &&
        !std::includes(input.n1.universe().begin(), input.n1.universe().end(), input.base.universe().begin(),
                       input.base.universe().end())) {
        // The base may be split between N0 and N1, but it must be covered.
        for (Element b : input.base.universe())
            if (!input.n0.contains(b) && !input.n1.contains(b))
                throw AmalgamError(AmalgamError::Kind::Shape, {b}, "base element lies in neither N0 nor N1");
    }

    // Any two inputs must induce the same structure on the elements they share.
    const Signature &sig = *Signature::feq();
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            const FiniteStructure &A = *parts[i], &B = *parts[j];
            std::set<Element> common;
            for (Element e : A.universe())
                if (B.contains(e))
                    common.insert(e);
            for (std::size_t r = 0; r < sig.relations().size(); ++r) {
                const int ri = static_cast<int>(r);
                for (const auto *side : {&A, &B}) {
                    const FiniteStructure &other = side == &A ? B : A;
                    for (const auto &t : side->facts(ri)) {
                        if (!std::all_of(t.begin(), t.end(), [&](Element e) { return common.count(e) > 0; }))
                            continue;
                        if (!other.holds(ri, t))
                            throw AmalgamError(AmalgamError::Kind::Disagreement, t,
                                               std::string(names[i]) + " and " + names[j] + " disagree on " +
                                                   sig.relations()[r].name + "(" + show(t) + ")");
                    }
                }
            }
        }

    FiniteStructure N(Signature::feq());
    for (const auto *part : parts) {
        for (Element e : part->universe())
            N.add_element(e);
        for (std::size_t r = 0; r < sig.relations().size(); ++r)
            for (const auto &t : part->facts(static_cast<int>(r)))
                N.add_fact(static_cast<int>(r), t);
    }
    close_equivalence(N);
    for (const auto &s : N.facts(kR))
        for (const auto &t : N.facts(kR))
            if (s[1] == t[1] && s[0] < t[0] && rel(N, kE, s[0], t[0]))
                throw AmalgamError(AmalgamError::Kind::Uniqueness, {s[0], t[0], s[1]},
                                   "E-closure makes " + std::to_string(s[0]) + " and " + std::to_string(t[0]) +
                                       " two representatives of " + std::to_string(s[1]));
    rebuild_function(N);
    return N;
}

FiniteStructure ec_extend(const FiniteStructure &M, int cap, bool seed_empty)
{
    require_feq(M);
    auto v = check_tfeq(M);
    if (!v.empty())
        throw std::invalid_argument("ec_extend: input is not a model of T_feq: " + v.front().message);
    FiniteStructure out = M;
    if (out.size() == 0 && seed_empty) {
        out.add_element(0);
        out.add_element(1);
        out.add_fact(kQ, {0});
        out.add_fact(kE, {0, 0});
        out.add_fact(kP, {1});
        out.add_fact(kR, {0, 1});
    }
    add_missing_representatives(out);
    if (static_cast<int>(out.size()) > cap)
        throw std::length_error("ec_extend: closing needs " + std::to_string(out.size()) + " elements, cap is " +
                                std::to_string(cap));
    rebuild_function(out);
    return out;
}

// ---------------------------------------------------------------------------
// Canonical form

namespace {

std::string encode_under(const FiniteStructure &M, const std::map<Element, int> &lab)
{
    const Signature &sig = *M.signature();
    std::string key = std::to_string(M.size()) + "|";
    for (std::size_t r = 0; r < sig.relations().size(); ++r) {
        std::vector<std::vector<int>> rows;
        for (const auto &t : M.facts(static_cast<int>(r))) {
            std::vector<int> row;
            for (Element e : t)
                row.push_back(lab.at(e));
            rows.push_back(std::move(row));
        }
        std::sort(rows.begin(), rows.end());
        key += sig.relations()[r].name + "{";
        for (const auto &row : rows) {
            for (int x : row)
                key += std::to_string(x) + ",";
            key += ";";
        }
        key += "}";
    }
    std::vector<std::vector<int>> rows;
    for (const auto &[args, y] : M.graph(kF))
        rows.push_back({lab.at(args[0]), lab.at(args[1]), lab.at(y)});
    std::sort(rows.begin(), rows.end());
    key += "F{";
    for (const auto &row : rows)
        key += std::to_string(row[0]) + "," + std::to_string(row[1]) + ">" + std::to_string(row[2]) + ";";
    return key + "}";
}

} // namespace

std::string canonical_form(const FiniteStructure &M)
{
    require_feq(M);
    // Colour refinement, then every ordering inside the colour cells.
    std::map<Element, std::string> colour;
    const Classes cls = classes(M);
    for (Element e : M.universe()) {
        std::string c = is(M, kP, e) ? "P" : is(M, kQ, e) ? "Q" : "-";
        if (cls.of.count(e))
            c += std::to_string(cls.members[cls.of.at(e)].size());
        colour[e] = c;
    }
    for (int round = 0; round < 4; ++round) {
        std::map<Element, std::string> next;
        for (Element e : M.universe()) {
            std::vector<std::string> around;
            for (int r : {kE, kR})
                for (const auto &t : M.facts(r)) {
                    if (t[0] == e && t[1] != e)
                        around.push_back(std::to_string(r) + ">" + colour[t[1]]);
                    if (t[1] == e && t[0] != e)
                        around.push_back(std::to_string(r) + "<" + colour[t[0]]);
                }
            std::sort(around.begin(), around.end());
            std::string c = colour[e] + "[";
            for (auto &a : around)
                c += a + " ";
            next[e] = c + "]";
        }
        // Compress to keep strings short.
        std::vector<std::string> distinct;
        for (auto &[e, c] : next)
            distinct.push_back(c);
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        for (auto &[e, c] : next)
            c = std::to_string(std::lower_bound(distinct.begin(), distinct.end(), c) - distinct.begin());
        colour = std::move(next);
    }
    std::map<std::string, std::vector<Element>> cells;
    for (auto &[e, c] : colour)
        cells[c].push_back(e);
    std::vector<std::vector<Element>> order;
    for (auto &[c, es] : cells)
        order.push_back(es);
    std::string best;
    bool have = false;
    std::function<void(std::size_t, std::map<Element, int> &, int)> rec = [&](std::size_t cell,
                                                                             std::map<Element, int> &lab, int next) {
        if (cell == order.size()) {
            std::string k = encode_under(M, lab);
            if (!have || k < best) {
                best = std::move(k);
                have = true;
            }
            return;
        }
        std::vector<Element> perm = order[cell];
        do {
            for (std::size_t i = 0; i < perm.size(); ++i)
                lab[perm[i]] = next + static_cast<int>(i);
            rec(cell + 1, lab, next + static_cast<int>(perm.size()));
        } while (std::next_permutation(perm.begin(), perm.end()));
    };
    std::map<Element, int> lab;
    rec(0, lab, 0);
    return best;
}

bool isomorphic(const FiniteStructure &a, const FiniteStructure &b)
{
    return a.size() == b.size() && canonical_form(a) == canonical_form(b);
}

// ---------------------------------------------------------------------------

RefutationResult nsop1_refutation_search(const TemplatePtr &phi, int depth, Budget &budget)
{
    static const FeqPlugin plugin;
    RefutationResult out;
    out.size_cap = budget.size_cap;
    const std::size_t before = budget.nodes;
    AtLeastResult r = rank_at_least(plugin, phi, {}, {}, depth, budget);
    out.nodes = budget.nodes - before;
    out.tree_found = r.answer == Truth::True;
    out.exhausted = r.answer != Truth::Unknown;
    out.tree = std::move(r.tree);
    return out;
}

} // namespace sopkit::feq
