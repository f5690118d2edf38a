#include "sopkit/oracle.hpp"
#include "sopkit/patterns.hpp"

#include "sopkit/feq.hpp"

#include <algorithm>
#include <numeric>

namespace sopkit {

const char *to_string(Truth t)
{
    switch (t) {
    case Truth::True: return "true";
    case Truth::False: return "false";
    default: return "unknown";
    }
}

const char *to_string(Verdict::Kind k)
{
    switch (k) {
    case Verdict::Kind::Consistent: return "consistent";
    case Verdict::Kind::Inconsistent: return "inconsistent";
    default: return "unknown";
    }
}

Budget Budget::with_time(std::size_t node_cap, int size_cap, std::optional<long> time_ms)
{
    Budget b;
    b.node_cap = node_cap;
    b.size_cap = size_cap;
    if (time_ms)
        b.deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(*time_ms);
    return b;
}

std::vector<Element> Diagram::named() const
{
    std::vector<Element> out;
    for (const auto &t : tuples)
        for (Element e : t)
            if (std::find(out.begin(), out.end(), e) == out.end())
                out.push_back(e);
    return out;
}

nlohmann::json Diagram::to_json() const
{
    nlohmann::json j = structure.to_json();
    j["tuples"] = tuples;
    return j;
}

Diagram Diagram::from_json(const nlohmann::json &j, SignaturePtr sig)
{
    Diagram d{FiniteStructure::from_json(j, std::move(sig)), {}};
    if (j.contains("tuples"))
        d.tuples = j["tuples"].get<std::vector<ParamTuple>>();
    return d;
}

void TheoryPlugin::check_handles(const PartialType &S, const Diagram &D) const
{
    for (const auto &inst : S) {
        if (*inst.tmpl->signature() != *signature() && id() != "pattern")
            throw OracleError("instance over a signature the '" + id() + "' plugin does not know");
        for (Element e : inst.params)
            if (!D.structure.contains(e))
                throw OracleError("parameter " + std::to_string(e) + " is not in the diagram");
    }
}

// ---------------------------------------------------------------------------
// Canonical labels

namespace {

std::string relabel_tuple(const ParamTuple &t, const std::map<Element, int> &label)
{
    std::string s = "(";
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i)
            s += ',';
        s += std::to_string(label.at(t[i]));
    }
    return s + ")";
}

} // namespace

Canon TheoryPlugin::canonical(const Diagram &D, const std::vector<Element> &order) const
{
    const FiniteStructure &M = D.structure;
    const Signature &sig = *M.signature();
    Canon c;
    int next = 0;
    for (Element e : order)
        if (M.contains(e) && !c.label.count(e))
            c.label[e] = next++;

    // Anonymous elements are ordered by how they sit over the named ones.
    std::vector<std::pair<std::string, Element>> anon;
    for (Element u : M.universe()) {
        if (c.label.count(u))
            continue;
        std::vector<std::string> parts;
        auto code = [&](Element e) {
            if (e == u)
                return std::string("@");
            auto it = c.label.find(e);
            return it == c.label.end() ? std::string("*") : std::to_string(it->second);
        };
        for (std::size_t r = 0; r < sig.relations().size(); ++r)
            for (const auto &t : M.facts(static_cast<int>(r))) {
                if (std::find(t.begin(), t.end(), u) == t.end())
                    continue;
                std::string s = std::to_string(r) + ":";
                for (Element e : t)
                    s += code(e) + ",";
                parts.push_back(std::move(s));
            }
        std::sort(parts.begin(), parts.end());
        std::string sigtext;
        for (auto &p : parts)
            sigtext += p + ";";
        anon.emplace_back(std::move(sigtext), u);
    }
    std::sort(anon.begin(), anon.end());
    for (auto &[s, u] : anon)
        c.label[u] = next++;

    c.key = "n" + std::to_string(M.size()) + "|";
    for (std::size_t r = 0; r < sig.relations().size(); ++r) {
        std::vector<std::string> rows;
        for (const auto &t : M.facts(static_cast<int>(r)))
            rows.push_back(relabel_tuple(t, c.label));
        std::sort(rows.begin(), rows.end());
        c.key += std::to_string(r) + "{";
        for (auto &row : rows)
            c.key += row;
        c.key += "}";
    }
    for (std::size_t f = 0; f < sig.functions().size(); ++f) {
        std::vector<std::string> rows;
        for (const auto &[args, v] : M.graph(static_cast<int>(f)))
            rows.push_back(relabel_tuple(args, c.label) + std::to_string(c.label.at(v)));
        std::sort(rows.begin(), rows.end());
        c.key += "f" + std::to_string(f) + "{";
        for (auto &row : rows)
            c.key += row;
        c.key += "}";
    }
    return c;
}

std::vector<Diagram> TheoryPlugin::enumerate_diagrams(int k, int arity, int cap) const
{
    if (k < 0 || arity < 0)
        throw OracleError("enumerate_diagrams: negative count or arity");
    if (k * arity > cap)
        throw OracleError("enumerate_diagrams: size cap " + std::to_string(cap) + " cannot host " +
                          std::to_string(k) + " tuples of arity " + std::to_string(arity));
    std::vector<Diagram> level{empty_diagram()};
    for (int i = 0; i < k; ++i) {
        std::vector<Diagram> next;
        std::set<std::string> seen;
        for (const auto &D : level) {
            Budget b;
            b.size_cap = cap;
            for_each_extension(D, arity, b, [&](const Diagram &D2, const ParamTuple &) {
                std::vector<Element> order;
                for (const auto &t : D2.tuples)
                    order.insert(order.end(), t.begin(), t.end());
                Canon c = canonical(D2, order);
                std::string key = c.key;
                for (const auto &t : D2.tuples)
                    key += relabel_tuple(t, c.label);
                if (seen.insert(key).second)
                    next.push_back(D2);
                return true;
            });
        }
        level = std::move(next);
    }
    return level;
}

std::optional<Realization> TheoryPlugin::realize(const PartialType &S, const Diagram &D, Budget &budget) const
{
    Verdict v = decide(S, D, budget);
    if (!v.consistent() || !v.witness)
        return std::nullopt;
    return v.witness;
}

// ---------------------------------------------------------------------------
// Generic search over complete finite extensions

struct StructuralPlugin::Check {
    int ready = 0; // number of leading slots that must be assigned
    std::function<Truth(const FiniteStructure &, const std::vector<Element> &, Budget &)> run;
};

namespace {

void used_slots(const Term &t, std::vector<int> &out)
{
    if (t.kind == Term::Kind::Variable)
        out.push_back(t.index);
    for (const auto &a : t.args)
        used_slots(a, out);
}

void used_slots(const Formula &f, std::vector<int> &out)
{
    for (const auto &t : f.terms)
        used_slots(t, out);
    for (const auto &c : f.children)
        used_slots(c, out);
}

/// 1 + the largest object slot the template's matrix mentions (0 if none).
int object_reach(const FormulaTemplate &f)
{
    std::vector<int> used;
    used_slots(f.matrix(), used);
    int reach = 0;
    for (int s : used)
        if (s < f.object_arity())
            reach = std::max(reach, s + 1);
    return reach;
}

std::vector<Element> template_slots(const FormulaTemplate &f, std::span<const Element> objects,
                                    const ParamTuple &params, std::span<const Element> bound)
{
    std::vector<Element> slots;
    slots.reserve(f.slot_count());
    slots.insert(slots.end(), objects.begin(), objects.begin() + f.object_arity());
    slots.insert(slots.end(), params.begin(), params.end());
    slots.insert(slots.end(), bound.begin(), bound.end());
    slots.resize(f.slot_count(), 0);
    return slots;
}

} // namespace

Truth StructuralPlugin::search(const FiniteStructure &M, int nslots, const std::vector<Check> &checks,
                               std::vector<Element> &vals, int slot, Budget &budget,
                               const std::function<bool(const FiniteStructure &, const std::vector<Element> &)> &leaf) const
{
    if (!budget.step())
        return Truth::Unknown;
    for (const auto &c : checks) {
        if (c.ready != slot)
            continue;
        Truth t = c.run(M, vals, budget);
        if (t != Truth::True)
            return t;
    }
    if (slot == nslots)
        return leaf(M, vals) ? Truth::True : Truth::False;

    Truth agg = Truth::False;
    const std::vector<Element> existing = M.universe();
    for (Element e : existing) {
        vals[slot] = e;
        Truth t = search(M, nslots, checks, vals, slot + 1, budget, leaf);
        if (t == Truth::True)
            return t;
        if (t == Truth::Unknown)
            agg = Truth::Unknown;
        if (budget.exhausted)
            return Truth::Unknown;
    }
    bool found = false;
    for_each_point(M, budget, [&](FiniteStructure &M2, Element e) {
        vals[slot] = e;
        Truth t = search(M2, nslots, checks, vals, slot + 1, budget, leaf);
        if (t == Truth::True) {
            found = true;
            return false;
        }
        if (t == Truth::Unknown)
            agg = Truth::Unknown;
        return !budget.exhausted;
    });
    if (found)
        return Truth::True;
    if (budget.exhausted)
        return Truth::Unknown;
    return agg;
}

Truth StructuralPlugin::exists_bound(const FiniteStructure &M, const FormulaTemplate &f, std::vector<Element> prefix,
                                     Budget &budget) const
{
    const int nb = f.bound_count();
    std::vector<Check> checks{Check{nb, [&](const FiniteStructure &M2, const std::vector<Element> &vals, Budget &) {
                                        std::vector<Element> slots = prefix;
                                        slots.insert(slots.end(), vals.begin(), vals.end());
                                        return truth_of(evaluate_matrix(M2, f.matrix(), slots));
                                    }}};
    std::vector<Element> vals(nb);
    return search(M, nb, checks, vals, 0, budget, [](const FiniteStructure &, const std::vector<Element> &) {
        return true;
    });
}

Truth StructuralPlugin::pair_holds(const FormulaInstance &inst, const ParamTuple &objects, const FiniteStructure &M,
                                   Budget &budget) const
{
    PartialType both{substitute(inst.tmpl, objects), substitute(inst.tmpl, inst.params)};
    Verdict v = decide(both, Diagram{M, {}}, budget);
    return negate(v.as_truth());
}

Truth StructuralPlugin::plain_holds(const FormulaInstance &inst, const ParamTuple &objects, const FiniteStructure &M,
                                    std::span<const Element> bound, Budget &budget) const
{
    const FormulaTemplate &f = *inst.tmpl;
    Truth t;
    if (f.has_exists() && bound.empty()) {
        t = exists_bound(M, f, template_slots(f, objects, inst.params, {}), budget);
        if (f.bound_count() == 0)
            t = truth_of(evaluate_matrix(M, f.matrix(), template_slots(f, objects, inst.params, {})));
    } else {
        t = truth_of(evaluate_matrix(M, f.matrix(), template_slots(f, objects, inst.params, bound)));
    }
    return inst.negated ? negate(t) : t;
}

Truth StructuralPlugin::holds(const FormulaInstance &inst, const ParamTuple &objects, const Diagram &D,
                              Budget &budget) const
{
    if (static_cast<int>(objects.size()) != inst.object_arity())
        throw OracleError("holds: object tuple has the wrong length");
    for (Element e : objects)
        if (!D.structure.contains(e))
            throw OracleError("holds: element " + std::to_string(e) + " is not in the diagram");
    if (inst.is_pair())
        return pair_holds(inst, objects, D.structure, budget);
    return plain_holds(inst, objects, D.structure, {}, budget);
}

Verdict StructuralPlugin::decide(const PartialType &S, const Diagram &D, Budget &budget, int object_arity) const
{
    check_handles(S, D);
    const int nx = object_arity >= 0 ? object_arity : type_object_arity(S, 0);
    if (!S.empty() && type_object_arity(S, nx) != nx)
        throw OracleError("decide: object arity mismatch");

    std::vector<Check> checks;
    int nslots = nx;
    for (const auto &inst : S) {
        const FormulaTemplate &f = *inst.tmpl;
        if (inst.is_pair()) {
            checks.push_back(Check{nx, [this, &inst, nx](const FiniteStructure &M, const std::vector<Element> &vals,
                                                         Budget &b) {
                                       ParamTuple objs(vals.begin(), vals.begin() + nx);
                                       return pair_holds(inst, objs, M, b);
                                   }});
        } else if (f.has_exists() && !inst.negated) {
            const int offset = nslots;
            nslots += f.bound_count();
            checks.push_back(Check{nslots, [&inst, offset](const FiniteStructure &M, const std::vector<Element> &vals,
                                                           Budget &) {
                                       const FormulaTemplate &g = *inst.tmpl;
                                       std::span<const Element> bound(vals.data() + offset, g.bound_count());
                                       return truth_of(evaluate_matrix(
                                           M, g.matrix(), template_slots(g, vals, inst.params, bound)));
                                   }});
        } else {
            checks.push_back(Check{object_reach(f), [this, &inst](const FiniteStructure &M,
                                                                  const std::vector<Element> &vals, Budget &b) {
                                       ParamTuple objs(vals.begin(), vals.begin() + inst.tmpl->object_arity());
                                       return plain_holds(inst, objs, M, {}, b);
                                   }});
        }
    }

    std::vector<Element> vals(nslots, 0);
    std::optional<Realization> witness;
    Truth t = search(D.structure, nslots, checks, vals, 0, budget,
                     [&](const FiniteStructure &M, const std::vector<Element> &v) {
                         witness = Realization{Diagram{M, D.tuples}, ParamTuple(v.begin(), v.begin() + nx)};
                         return true;
                     });
    Verdict out;
    if (t == Truth::True) {
        out.kind = Verdict::Kind::Consistent;
        out.witness = std::move(witness);
    } else {
        out.kind = t == Truth::False ? Verdict::Kind::Inconsistent : Verdict::Kind::Unknown;
    }
    return out;
}

bool StructuralPlugin::for_each_extension(const Diagram &D, int arity, Budget &budget,
                                          const std::function<bool(const Diagram &, const ParamTuple &)> &f) const
{
    const std::vector<Element> named = D.named();
    std::vector<Element> vals(arity, 0);
    bool stopped = false;
    search(D.structure, arity, {}, vals, 0, budget, [&](const FiniteStructure &M, const std::vector<Element> &c) {
        std::set<Element> names(named.begin(), named.end());
        names.insert(c.begin(), c.end());
        if (static_cast<int>(names.size()) > budget.size_cap) {
            budget.size_truncated = true;
            return false;
        }
        Diagram D2{M, D.tuples};
        D2.tuples.push_back(c);
        if (!f(D2, c)) {
            stopped = true;
            return true;
        }
        return false;
    });
    return !stopped;
}

std::set<Element> StructuralPlugin::closure(const FiniteStructure &, const std::set<Element> &keep) const
{
    return keep;
}

Diagram StructuralPlugin::restrict(const Diagram &D, const std::vector<Element> &keep) const
{
    std::set<Element> base;
    for (Element e : keep)
        if (D.structure.contains(e))
            base.insert(e);
    std::set<Element> all = closure(D.structure, base);
    Diagram out{D.structure.restrict_to(all), {}};
    for (const auto &t : D.tuples)
        if (std::all_of(t.begin(), t.end(), [&](Element e) { return base.count(e) > 0; }))
            out.tuples.push_back(t);
    return out;
}

// ---------------------------------------------------------------------------
// Amalgamation helpers

namespace {

struct Merged {
    FiniteStructure structure;
    std::map<Element, Element> renaming;
    std::vector<Element> left_new;
    std::vector<Element> right_new; // after renaming
};

Merged merge_over(const Diagram &base, const Diagram &left, const Diagram &right)
{
    const FiniteStructure &B = base.structure;
    const FiniteStructure &L = left.structure;
    const FiniteStructure &Rt = right.structure;
    Element next = std::max(L.fresh_element(), Rt.fresh_element());
    Merged m{L, {}, {}, {}};
    for (Element e : L.universe())
        if (!B.contains(e))
            m.left_new.push_back(e);
    for (Element e : Rt.universe())
        if (!B.contains(e)) {
            m.renaming[e] = next;
            m.right_new.push_back(next);
            ++next;
        }
    FiniteStructure R2 = Rt.renamed(m.renaming);
    for (Element e : R2.universe())
        m.structure.add_element(e);
    const Signature &sig = *L.signature();
    for (std::size_t r = 0; r < sig.relations().size(); ++r)
        for (const auto &t : R2.facts(static_cast<int>(r)))
            m.structure.add_fact(static_cast<int>(r), t);
    for (std::size_t f = 0; f < sig.functions().size(); ++f)
        for (const auto &[args, v] : R2.graph(static_cast<int>(f)))
            m.structure.set_value(static_cast<int>(f), args, v);
    return m;
}

Amalgam finish(Merged &&m, const Diagram &left, const Diagram &right)
{
    Amalgam a{Diagram{std::move(m.structure), left.tuples}, std::move(m.renaming)};
    for (const auto &t : right.tuples) {
        ParamTuple u = t;
        for (auto &e : u) {
            auto it = a.right_renaming.find(e);
            if (it != a.right_renaming.end())
                e = it->second;
        }
        if (std::find(a.diagram.tuples.begin(), a.diagram.tuples.end(), u) == a.diagram.tuples.end())
            a.diagram.tuples.push_back(std::move(u));
    }
    return a;
}

/// Elements of a DLO diagram in increasing order.
std::vector<Element> sorted_chain(const FiniteStructure &M)
{
    std::vector<std::pair<int, Element>> rank;
    for (Element e : M.universe())
        rank.emplace_back(0, e);
    for (const auto &t : M.facts(0)) {
        for (auto &[r, e] : rank)
            if (e == t[1])
                ++r;
    }
    std::sort(rank.begin(), rank.end());
    std::vector<Element> out;
    for (auto &[r, e] : rank)
        out.push_back(e);
    return out;
}

/// Union-find closure of a binary relation into an equivalence on `domain`.
void close_equivalence_on(FiniteStructure &M, int rel, const std::vector<Element> &domain)
{
    std::map<Element, Element> parent;
    for (Element e : domain)
        parent[e] = e;
    std::function<Element(Element)> find = [&](Element e) {
        while (parent[e] != e)
            e = parent[e] = parent[parent[e]];
        return e;
    };
    for (const auto &t : M.facts(rel))
        if (parent.count(t[0]) && parent.count(t[1]))
            parent[find(t[0])] = find(t[1]);
    for (Element a : domain)
        for (Element b : domain)
            if (find(a) == find(b))
                M.add_fact(rel, {a, b});
}

} // namespace

// ---------------------------------------------------------------------------
// DLO

bool DloPlugin::for_each_point(const FiniteStructure &M, Budget &budget,
                               const std::function<bool(FiniteStructure &, Element)> &f) const
{
    const std::vector<Element> chain = sorted_chain(M);
    const Element e = M.fresh_element();
    for (std::size_t gap = 0; gap <= chain.size(); ++gap) {
        if (!budget.step())
            return false;
        FiniteStructure M2 = M;
        M2.add_element(e);
        for (std::size_t j = 0; j < chain.size(); ++j) {
            if (j < gap)
                M2.add_fact(0, {chain[j], e});
            else
                M2.add_fact(0, {e, chain[j]});
        }
        if (!f(M2, e))
            return false;
    }
    return true;
}

Amalgam DloPlugin::amalgamate(const Diagram &base, const Diagram &left, const Diagram &right) const
{
    Merged m = merge_over(base, left, right);
    auto gap = [&](Element e) {
        int g = 0;
        for (Element b : base.structure.universe())
            if (m.structure.holds(0, std::vector<Element>{b, e}))
                ++g;
        return g;
    };
    for (Element l : m.left_new)
        for (Element r : m.right_new) {
            if (gap(l) <= gap(r))
                m.structure.add_fact(0, {l, r});
            else
                m.structure.add_fact(0, {r, l});
        }
    return finish(std::move(m), left, right);
}

Canon DloPlugin::canonical(const Diagram &D, const std::vector<Element> &order) const
{
    Canon c;
    int next = 0;
    for (Element e : order)
        if (D.structure.contains(e) && !c.label.count(e))
            c.label[e] = next++;
    const std::vector<Element> chain = sorted_chain(D.structure);
    c.key = "<";
    for (Element e : chain) {
        auto it = c.label.find(e);
        if (it == c.label.end()) {
            c.label[e] = next++;
            c.key += "*,";
        } else {
            c.key += std::to_string(it->second) + ",";
        }
    }
    return c;
}

// ---------------------------------------------------------------------------
// Random graph

bool RandomGraphPlugin::for_each_point(const FiniteStructure &M, Budget &budget,
                                       const std::function<bool(FiniteStructure &, Element)> &f) const
{
    const std::vector<Element> &U = M.universe();
    if (U.size() > 20)
        throw OracleError("random graph diagram too large to extend");
    const Element e = M.fresh_element();
    for (std::uint32_t mask = 0; mask < (1u << U.size()); ++mask) {
        if (!budget.step())
            return false;
        FiniteStructure M2 = M;
        M2.add_element(e);
        for (std::size_t j = 0; j < U.size(); ++j)
            if (mask & (1u << j)) {
                M2.add_fact(0, {e, U[j]});
                M2.add_fact(0, {U[j], e});
            }
        if (!f(M2, e))
            return false;
    }
    return true;
}

Amalgam RandomGraphPlugin::amalgamate(const Diagram &base, const Diagram &left, const Diagram &right) const
{
    return finish(merge_over(base, left, right), left, right);
}

// ---------------------------------------------------------------------------
// One equivalence relation

bool EquivalencePlugin::for_each_point(const FiniteStructure &M, Budget &budget,
                                       const std::function<bool(FiniteStructure &, Element)> &f) const
{
    std::vector<std::vector<Element>> cls;
    std::map<Element, int> of;
    for (Element u : M.universe()) {
        if (of.count(u))
            continue;
        of[u] = static_cast<int>(cls.size());
        cls.push_back({u});
        for (Element v : M.universe())
            if (v != u && M.holds(0, std::vector<Element>{u, v})) {
                of[v] = of[u];
                cls.back().push_back(v);
            }
    }
    const Element e = M.fresh_element();
    for (std::size_t c = 0; c <= cls.size(); ++c) {
        if (!budget.step())
            return false;
        FiniteStructure M2 = M;
        M2.add_element(e);
        M2.add_fact(0, {e, e});
        if (c < cls.size())
            for (Element v : cls[c]) {
                M2.add_fact(0, {e, v});
                M2.add_fact(0, {v, e});
            }
        if (!f(M2, e))
            return false;
    }
    return true;
}

Amalgam EquivalencePlugin::amalgamate(const Diagram &base, const Diagram &left, const Diagram &right) const
{
    Merged m = merge_over(base, left, right);
    close_equivalence_on(m.structure, 0, m.structure.universe());
    return finish(std::move(m), left, right);
}

// ---------------------------------------------------------------------------
// T*_feq

namespace {

/// Restricted-growth labelings of n items: label 0 is reserved for `owner`,
/// labels >= 1 are fresh blocks.
void for_each_owner_partition(int n, const std::function<bool(const std::vector<int> &)> &f)
{
    std::vector<int> lab(n, 0);
    std::function<bool(int, int)> rec = [&](int i, int maxlab) -> bool {
        if (i == n)
            return f(lab);
        for (int l = 0; l <= maxlab + 1; ++l) {
            lab[i] = l;
            if (!rec(i + 1, std::max(maxlab, l)))
                return false;
        }
        return true;
    };
    rec(0, 0);
}

} // namespace

bool FeqPlugin::for_each_point(const FiniteStructure &M, Budget &budget,
                               const std::function<bool(FiniteStructure &, Element)> &f) const
{
    using namespace feq;
    const Classes cls = classes(M);
    const std::vector<Element> Ps = elements_in(M, kP);
    const Element e = M.fresh_element();

    // New P element: each class picks an existing member or a fresh one as its representative.
    {
        const std::size_t nc = cls.members.size();
        std::vector<std::size_t> pick(nc, 0);
        while (true) {
            if (!budget.step())
                return false;
            FiniteStructure M2 = M;
            M2.add_element(e);
            M2.add_fact(kP, {e});
            Element next = e + 1;
            for (std::size_t c = 0; c < nc; ++c) {
                const auto &mem = cls.members[c];
                Element rep;
                if (pick[c] < mem.size()) {
                    rep = mem[pick[c]];
                } else {
                    rep = next++;
                    M2.add_element(rep);
                    M2.add_fact(kQ, {rep});
                    M2.add_fact(kE, {rep, rep});
                    for (Element v : mem) {
                        M2.add_fact(kE, {rep, v});
                        M2.add_fact(kE, {v, rep});
                    }
                }
                M2.add_fact(kR, {rep, e});
            }
            rebuild_function(M2);
            if (!f(M2, e))
                return false;
            std::size_t c = 0;
            while (c < nc && ++pick[c] > cls.members[c].size())
                pick[c++] = 0;
            if (c == nc)
                break;
        }
    }

    // New Q element joining an existing class.
    for (const auto &mem : cls.members) {
        if (!budget.step())
            return false;
        FiniteStructure M2 = M;
        M2.add_element(e);
        M2.add_fact(kQ, {e});
        M2.add_fact(kE, {e, e});
        for (Element v : mem) {
            M2.add_fact(kE, {e, v});
            M2.add_fact(kE, {v, e});
        }
        rebuild_function(M2);
        if (!f(M2, e))
            return false;
    }

    // New Q element in a new class: P elements are represented by e or by fresh class members.
    bool go = true;
    for_each_owner_partition(static_cast<int>(Ps.size()), [&](const std::vector<int> &lab) {
        if (!budget.step())
            return go = false;
        FiniteStructure M2 = M;
        M2.add_element(e);
        M2.add_fact(kQ, {e});
        std::vector<Element> members{e};
        const int blocks = lab.empty() ? 0 : *std::max_element(lab.begin(), lab.end());
        for (int b = 1; b <= blocks; ++b) {
            Element w = e + b;
            M2.add_element(w);
            M2.add_fact(kQ, {w});
            members.push_back(w);
        }
        for (Element a : members)
            for (Element b : members)
                M2.add_fact(kE, {a, b});
        for (std::size_t i = 0; i < Ps.size(); ++i)
            M2.add_fact(kR, {members[lab[i]], Ps[i]});
        rebuild_function(M2);
        return go = f(M2, e);
    });
    return go;
}

std::set<Element> FeqPlugin::closure(const FiniteStructure &M, const std::set<Element> &keep) const
{
    std::set<Element> out = keep;
    for (Element x : keep) {
        if (!M.holds(feq::kQ, std::vector<Element>{x}))
            continue;
        for (Element z : keep)
            if (auto y = M.apply(feq::kF, std::vector<Element>{x, z}))
                out.insert(*y);
    }
    return out;
}

Amalgam FeqPlugin::amalgamate(const Diagram &base, const Diagram &left, const Diagram &right) const
{
    Merged m = merge_over(base, left, right);
    feq::close_equivalence(m.structure);
    feq::add_missing_representatives(m.structure);
    feq::rebuild_function(m.structure);
    return finish(std::move(m), left, right);
}

// ---------------------------------------------------------------------------
// Abstract pattern oracle

PatternPlugin::PatternPlugin(std::vector<Atom> instances, std::vector<std::vector<int>> min_inconsistent)
    : instances_(std::move(instances)), hyperedges_(std::move(min_inconsistent)), description_("explicit")
{
    for (const auto &edge : hyperedges_) {
        std::vector<Atom> atoms;
        for (int i : edge) {
            if (i < 0 || i >= static_cast<int>(instances_.size()))
                throw OracleError("pattern: hyperedge index " + std::to_string(i) + " out of range");
            atoms.push_back(instances_[i]);
        }
        std::sort(atoms.begin(), atoms.end());
        atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
        forbidden_.push_back(std::move(atoms));
    }
    for (const auto &a : instances_)
        if (std::find(candidates_.begin(), candidates_.end(), a.params) == candidates_.end())
            candidates_.push_back(a.params);
}

PatternPlugin::PatternPlugin(Rule rule, std::vector<ParamTuple> candidates, std::string description)
    : rule_(std::move(rule)), candidates_(std::move(candidates)), description_(std::move(description))
{
}

std::vector<PatternPlugin::Atom> PatternPlugin::expand(const FormulaInstance &inst, const ParamTuple *objects)
{
    const ParamTuple &params = objects ? *objects : inst.params;
    const int k = inst.tmpl->power();
    if (k <= 1)
        return {Atom{params, inst.negated && !inst.is_pair()}};
    if (inst.negated && !inst.is_pair())
        throw OracleError("pattern: negated conjunctive powers are not literals");
    const std::size_t width = params.size() / static_cast<std::size_t>(k);
    std::vector<Atom> out;
    for (int l = 0; l < k; ++l)
        out.push_back(Atom{ParamTuple(params.begin() + l * width, params.begin() + (l + 1) * width), false});
    return out;
}

bool PatternPlugin::inconsistent(std::vector<Atom> atoms) const
{
    std::sort(atoms.begin(), atoms.end());
    atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
    for (const auto &a : atoms)
        if (a.negated && std::binary_search(atoms.begin(), atoms.end(), Atom{a.params, false}))
            return true;
    if (rule_)
        return rule_(atoms);
    for (const auto &edge : forbidden_)
        if (std::includes(atoms.begin(), atoms.end(), edge.begin(), edge.end()))
            return true;
    return false;
}

Diagram PatternPlugin::diagram_for(const std::vector<ParamTuple> &tuples)
{
    Diagram d{FiniteStructure(Signature::empty()), tuples};
    for (const auto &t : tuples)
        for (Element e : t)
            d.structure.add_element(e);
    return d;
}

Verdict PatternPlugin::decide(const PartialType &S, const Diagram &D, Budget &budget, int) const
{
    Verdict out;
    const bool has_pair = std::any_of(S.begin(), S.end(), [](const auto &i) { return i.is_pair(); });
    if (!budget.step()) {
        out.kind = Verdict::Kind::Unknown;
        return out;
    }
    if (!has_pair) {
        std::vector<Atom> atoms;
        std::vector<int> owner;
        for (std::size_t i = 0; i < S.size(); ++i)
            for (auto &a : expand(S[i])) {
                atoms.push_back(std::move(a));
                owner.push_back(static_cast<int>(i));
            }
        if (!inconsistent(atoms)) {
            out.kind = Verdict::Kind::Consistent;
            out.witness = Realization{D, {}};
            return out;
        }
        out.kind = Verdict::Kind::Inconsistent;
        // Shrink to a minimal inconsistent set of instances.
        std::vector<int> core(S.size());
        std::iota(core.begin(), core.end(), 0);
        for (std::size_t drop = 0; drop < S.size() && S.size() <= 64; ++drop) {
            std::vector<int> trial;
            for (int i : core)
                if (i != static_cast<int>(drop))
                    trial.push_back(i);
            std::vector<Atom> sub;
            for (std::size_t j = 0; j < atoms.size(); ++j)
                if (std::find(trial.begin(), trial.end(), owner[j]) != trial.end())
                    sub.push_back(atoms[j]);
            if (inconsistent(sub))
                core = trial;
        }
        out.core = core;
        return out;
    }
    for (const auto &inst : S)
        if (!inst.is_pair())
            throw OracleError("pattern: a type over the parameter block may only hold pair instances");
    const int arity = S.front().object_arity();
    for (const auto &cand : candidates_) {
        if (static_cast<int>(cand.size()) != arity)
            continue;
        bool ok = true;
        for (const auto &inst : S)
            if (holds(inst, cand, D, budget) != Truth::True) {
                ok = false;
                break;
            }
        if (ok) {
            out.kind = Verdict::Kind::Consistent;
            Diagram D2 = D;
            for (Element e : cand)
                D2.structure.add_element(e);
            out.witness = Realization{std::move(D2), cand};
            return out;
        }
    }
    out.kind = Verdict::Kind::Inconsistent;
    return out;
}

Truth PatternPlugin::holds(const FormulaInstance &inst, const ParamTuple &objects, const Diagram &, Budget &) const
{
    if (!inst.is_pair())
        throw OracleError("pattern: plain instances have no object domain to evaluate in");
    std::vector<Atom> atoms = expand(FormulaInstance{inst.tmpl, objects, false, FormulaInstance::Shape::Plain});
    for (auto &a : expand(FormulaInstance{inst.tmpl, inst.params, false, FormulaInstance::Shape::Plain}))
        atoms.push_back(std::move(a));
    return truth_of(inconsistent(std::move(atoms)));
}

bool PatternPlugin::for_each_extension(const Diagram &D, int arity, Budget &budget,
                                       const std::function<bool(const Diagram &, const ParamTuple &)> &f) const
{
    for (const auto &cand : candidates_) {
        if (static_cast<int>(cand.size()) != arity)
            continue;
        if (!budget.step())
            return true;
        Diagram D2 = D;
        for (Element e : cand)
            D2.structure.add_element(e);
        D2.tuples.push_back(cand);
        if (!f(D2, cand))
            return false;
    }
    return true;
}

Diagram PatternPlugin::restrict(const Diagram &D, const std::vector<Element> &keep) const
{
    std::set<Element> k(keep.begin(), keep.end());
    Diagram out{D.structure.restrict_to(k), {}};
    for (const auto &t : D.tuples)
        if (std::all_of(t.begin(), t.end(), [&](Element e) { return k.count(e) > 0; }))
            out.tuples.push_back(t);
    return out;
}

Amalgam PatternPlugin::amalgamate(const Diagram &, const Diagram &left, const Diagram &right) const
{
    Amalgam a{left, {}};
    for (Element e : right.structure.universe())
        a.diagram.structure.add_element(e);
    for (const auto &t : right.tuples)
        if (std::find(a.diagram.tuples.begin(), a.diagram.tuples.end(), t) == a.diagram.tuples.end())
            a.diagram.tuples.push_back(t);
    return a;
}

Canon PatternPlugin::canonical(const Diagram &D, const std::vector<Element> &) const
{
    // Handles are global names, so no relabeling is sound.
    Canon c;
    c.key = "pattern:";
    for (Element e : D.structure.universe()) {
        c.label[e] = e;
        c.key += std::to_string(e) + ",";
    }
    return c;
}

std::vector<Diagram> PatternPlugin::enumerate_diagrams(int k, int arity, int cap) const
{
    if (k * arity > cap)
        throw OracleError("enumerate_diagrams: size cap too small");
    std::vector<Diagram> level{diagram_for({})};
    for (int i = 0; i < k; ++i) {
        std::vector<Diagram> next;
        for (const auto &D : level) {
            Budget b;
            for_each_extension(D, arity, b, [&](const Diagram &D2, const ParamTuple &) {
                next.push_back(D2);
                return true;
            });
        }
        level = std::move(next);
    }
    return level;
}

std::optional<Realization> PatternPlugin::realize(const PartialType &, const Diagram &, Budget &) const
{
    return std::nullopt;
}

// ---------------------------------------------------------------------------

PluginPtr make_plugin(const std::string &id)
{
    if (id == "dlo")
        return std::make_shared<DloPlugin>();
    if (id == "random_graph")
        return std::make_shared<RandomGraphPlugin>();
    if (id == "equiv")
        return std::make_shared<EquivalencePlugin>();
    if (id == "tfeq")
        return std::make_shared<FeqPlugin>();
    throw OracleError("unknown plugin '" + id + "'");
}

PluginPtr load_theory(const nlohmann::json &spec)
{
    if (!spec.is_object() || !spec.contains("plugin") || !spec["plugin"].is_string())
        throw OracleError("theory spec needs a \"plugin\" string");
    const std::string id = spec["plugin"].get<std::string>();
    if (id != "pattern")
        return make_plugin(id);
    if (!spec.contains("pattern"))
        throw OracleError("pattern theory needs a \"pattern\" object");
    const auto &p = spec["pattern"];
    if (p.contains("rule"))
        return make_tree_pattern(p["rule"].get<std::string>(), p.value("n", 1));
    std::vector<PatternPlugin::Atom> instances;
    for (const auto &inst : p.at("instances"))
        instances.push_back({inst.at("params").get<ParamTuple>(), inst.value("negated", false)});
    std::vector<std::vector<int>> edges;
    if (p.contains("min_inconsistent"))
        edges = p["min_inconsistent"].get<std::vector<std::vector<int>>>();
    return std::make_shared<PatternPlugin>(std::move(instances), std::move(edges));
}

} // namespace sopkit
