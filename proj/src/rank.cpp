#include "sopkit/rank.hpp"

#include <algorithm>
#include <unordered_set>

namespace sopkit {

std::string RankValue::str() const
{
    switch (kind) {
    case Kind::MinusOne: return "-1";
    case Kind::Finite: return std::to_string(value);
    case Kind::AtLeast: return "AtLeast(" + std::to_string(value) + ")";
    default: return "Undetermined(" + std::to_string(lo) + ".." + std::to_string(hi) + ")";
    }
}

nlohmann::json RankValue::to_json() const
{
    static const char *names[] = {"minus_one", "finite", "at_least", "undetermined"};
    nlohmann::json j{{"kind", names[static_cast<int>(kind)]}, {"text", str()}};
    if (kind == Kind::Finite || kind == Kind::AtLeast)
        j["value"] = value;
    if (kind == Kind::Undetermined) {
        j["lo"] = lo;
        j["hi"] = hi;
    }
    return j;
}

std::optional<bool> rank_leq(const RankValue &a, const RankValue &b)
{
    if (!a.determined() || !b.determined())
        return std::nullopt;
    auto lower = [](const RankValue &r) { return r.kind == RankValue::Kind::MinusOne ? -1 : r.value; };
    const bool a_open = a.kind == RankValue::Kind::AtLeast;
    const bool b_open = b.kind == RankValue::Kind::AtLeast;
    if (!a_open && !b_open)
        return lower(a) <= lower(b);
    if (!a_open) // a finite, b at least c
        return lower(a) <= lower(b) ? std::optional<bool>(true) : std::nullopt;
    if (!b_open) // a at least c, b finite
        return lower(a) <= lower(b) ? std::nullopt : std::optional<bool>(false);
    return std::nullopt;
}

namespace {

std::vector<Element> mentioned(const PartialType &p, const PartialType &q)
{
    std::vector<Element> out = mentioned_elements(p);
    for (Element e : mentioned_elements(q))
        if (std::find(out.begin(), out.end(), e) == out.end())
            out.push_back(e);
    return out;
}

std::vector<ParamTuple> param_tuples(const PartialType &p, const PartialType &q)
{
    std::vector<ParamTuple> out;
    for (const auto *t : {&p, &q})
        for (const auto &inst : *t)
            if (!inst.params.empty() && std::find(out.begin(), out.end(), inst.params) == out.end())
                out.push_back(inst.params);
    return out;
}

PartialType with(PartialType t, FormulaInstance inst)
{
    t.push_back(std::move(inst));
    return t;
}

/// The diagram of the parameters of p and q, with those tuples named.
Diagram focus(const TheoryPlugin &T, const Diagram &D, const PartialType &p, const PartialType &q)
{
    Diagram out = T.restrict(D, mentioned(p, q));
    out.tuples = param_tuples(p, q);
    return out;
}

std::string problem_key(const TheoryPlugin &T, const Diagram &D, const PartialType &p, const PartialType &q, int n)
{
    const Canon c = T.canonical(D, mentioned(p, q));
    auto label = [&](Element e) { return c.label.at(e); };
    std::string key = c.key + "|n" + std::to_string(n);
    for (const auto *t : {&p, &q}) {
        std::vector<std::string> parts;
        for (const auto &inst : *t)
            parts.push_back(inst.encode(label));
        std::sort(parts.begin(), parts.end());
        parts.erase(std::unique(parts.begin(), parts.end()), parts.end());
        key += t == &p ? "|p" : "|q";
        for (auto &s : parts)
            key += ";" + s;
    }
    return key;
}

Truth both(Truth a, Truth b)
{
    if (a == Truth::False || b == Truth::False)
        return Truth::False;
    if (a == Truth::Unknown || b == Truth::Unknown)
        return Truth::Unknown;
    return Truth::True;
}

Truth check_q(const TheoryPlugin &T, const PartialType &q, const ParamTuple &c, const Diagram &D, Budget &budget)
{
    Truth t = Truth::True;
    for (const auto &inst : q) {
        t = both(t, T.holds(inst, c, D, budget));
        if (t == Truth::False)
            break;
    }
    return t;
}

/// Root c with A^0 and A^1 from two diagrams over the same base, glued.
SopTree glue(const TheoryPlugin &T, const ParamTuple &c, const Diagram &base, const SopTree &a0, const SopTree &a1)
{
    Amalgam am = T.amalgamate(base, a0.diagram, a1.diagram);
    SopTree right = a1;
    for (auto &t : right.tuples)
        for (auto &e : t) {
            auto it = am.right_renaming.find(e);
            if (it != am.right_renaming.end())
                e = it->second;
        }
    SopTree out = join_tree(c, a0, right, am.diagram);
    for (const auto &t : out.tuples)
        if (std::find(out.diagram.tuples.begin(), out.diagram.tuples.end(), t) == out.diagram.tuples.end())
            out.diagram.tuples.push_back(t);
    return out;
}

/// Runs an extension scan, reporting whether the size cap cut it short.
bool scan_extensions(const TheoryPlugin &T, const Diagram &D, int arity, Budget &budget,
                     const std::function<bool(const Diagram &, const ParamTuple &)> &f, bool &truncated)
{
    const bool saved = budget.size_truncated;
    budget.size_truncated = false;
    const bool done = T.for_each_extension(D, arity, budget, f);
    truncated = budget.size_truncated;
    budget.size_truncated = saved || truncated;
    return done;
}

} // namespace

RankSolver::RankSolver(const TheoryPlugin &T, TemplatePtr phi, Budget &budget)
    : T_(T), phi_(std::move(phi)), budget_(budget)
{
    if (!phi_)
        throw std::invalid_argument("rank: no formula");
}

RankSolver::Problem RankSolver::normalize(const Diagram &D, const PartialType &p, const PartialType &q, int n) const
{
    for (const auto &inst : p)
        if (inst.object_arity() != phi_->object_arity())
            throw std::invalid_argument("rank: p is not over the object block of " + phi_->text());
    for (const auto &inst : q)
        if (inst.object_arity() != phi_->param_arity())
            throw std::invalid_argument("rank: q is not over the parameter block of " + phi_->text());
    Diagram F = focus(T_, D, p, q);
    std::string key = problem_key(T_, F, p, q, n);
    return {std::move(F), std::move(key)};
}

Truth RankSolver::base_case(const Diagram &D, const PartialType &p, const PartialType &q)
{
    Truth a = T_.decide(p, D, budget_, phi_->object_arity()).as_truth();
    if (a == Truth::False)
        return a;
    return both(a, T_.decide(q, D, budget_, phi_->param_arity()).as_truth());
}

Truth RankSolver::satisfies_q(const PartialType &q, const ParamTuple &c, const Diagram &D)
{
    return check_q(T_, q, c, D, budget_);
}

Truth RankSolver::at_least(const Diagram &D, const PartialType &p, const PartialType &q, int n)
{
    if (n < 0)
        return Truth::True;
    Problem pr = normalize(D, p, q, n);
    if (auto it = memo_.find(pr.key); it != memo_.end())
        return it->second;

    Truth res;
    if (n == 0) {
        res = base_case(pr.D, p, q);
    } else if (at_least(pr.D, p, q, 0) == Truth::False) {
        res = Truth::False;
    } else {
        res = Truth::False;
        bool truncated = false;
        scan_extensions(
            T_, pr.D, phi_->param_arity(), budget_,
            [&](const Diagram &D2, const ParamTuple &c) {
                const Truth sq = satisfies_q(q, c, D2);
                if (sq != Truth::True) {
                    if (sq == Truth::Unknown)
                        res = Truth::Unknown;
                    return !budget_.exhausted;
                }
                const Truth a = at_least(D2, with(p, substitute(phi_, c)), q, n - 1);
                if (a == Truth::False)
                    return !budget_.exhausted;
                const Truth b = at_least(D2, p, with(q, pair_instance(phi_, c)), n - 1);
                if (a == Truth::True && b == Truth::True) {
                    res = Truth::True;
                    return false;
                }
                if (b == Truth::Unknown || a == Truth::Unknown)
                    res = Truth::Unknown;
                return !budget_.exhausted;
            },
            truncated);
        if (res != Truth::True && (truncated || budget_.exhausted))
            res = Truth::Unknown;
    }
    if (!budget_.exhausted || res != Truth::Unknown)
        memo_[pr.key] = res;
    return res;
}

std::optional<SopTree> RankSolver::witness(const Diagram &D, const PartialType &p, const PartialType &q, int n)
{
    if (at_least(D, p, q, n) != Truth::True)
        return std::nullopt;
    Problem pr = normalize(D, p, q, n);
    if (n == 0) {
        SopTree t = SopTree::make(0, pr.D);
        return t;
    }
    std::optional<SopTree> out;
    bool truncated = false;
    scan_extensions(
        T_, pr.D, phi_->param_arity(), budget_,
        [&](const Diagram &D2, const ParamTuple &c) {
            if (satisfies_q(q, c, D2) != Truth::True)
                return true;
            const PartialType p1 = with(p, substitute(phi_, c));
            const PartialType q0 = with(q, pair_instance(phi_, c));
            if (at_least(D2, p1, q, n - 1) != Truth::True || at_least(D2, p, q0, n - 1) != Truth::True)
                return !budget_.exhausted;
            auto a1 = witness(D2, p1, q, n - 1);
            auto a0 = witness(D2, p, q0, n - 1);
            if (!a0 || !a1)
                return !budget_.exhausted;
            out = glue(T_, c, focus(T_, D2, p1, q), *a0, *a1);
            return false;
        },
        truncated);
    return out;
}

AtLeastResult rank_at_least(const TheoryPlugin &T, const TemplatePtr &phi, const PartialType &p, const PartialType &q,
                            int n, Budget &budget, const std::optional<Diagram> &D)
{
    RankSolver s(T, phi, budget);
    const Diagram base = D ? *D : T.empty_diagram();
    AtLeastResult r;
    r.answer = s.at_least(base, p, q, n);
    if (r.answer == Truth::True)
        r.tree = s.witness(base, p, q, n);
    return r;
}

namespace {

/// Shared driver: probe n = 0..cap and classify.
template <typename Probe>
RankResult classify(int cap, Probe &&probe)
{
    if (cap < 0)
        throw std::invalid_argument("rank: cap must be non-negative");
    int last_yes = -1;
    int first_unknown = -1;
    std::optional<SopTree> tree;
    for (int n = 0; n <= cap; ++n) {
        std::optional<SopTree> t;
        const Truth a = probe(n, t);
        if (a == Truth::True) {
            last_yes = n;
            tree = std::move(t);
            continue;
        }
        if (a == Truth::False) {
            if (first_unknown < 0)
                return {last_yes < 0 ? RankValue::minus_one() : RankValue::finite(last_yes), tree};
            return {RankValue::undetermined(last_yes, n - 1), tree};
        }
        if (first_unknown < 0)
            first_unknown = n;
    }
    if (first_unknown < 0)
        return {RankValue::at_least(cap), tree};
    return {RankValue::undetermined(last_yes, cap), tree};
}

} // namespace

RankResult rank(const TheoryPlugin &T, const TemplatePtr &phi, const PartialType &p, const PartialType &q, int cap,
                Budget &budget, const std::optional<Diagram> &D, bool want_witness)
{
    RankSolver s(T, phi, budget);
    const Diagram base = D ? *D : T.empty_diagram();
    RankResult r = classify(cap, [&](int n, std::optional<SopTree> &) { return s.at_least(base, p, q, n); });
    if (want_witness) {
        int depth = r.value.kind == RankValue::Kind::Undetermined ? r.value.lo : r.value.value;
        if (depth >= 0)
            r.witness = s.witness(base, p, q, depth);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Direct tree search

namespace {

class TreeSearch {
public:
    TreeSearch(const TheoryPlugin &T, TemplatePtr phi, Budget &budget) : T_(T), phi_(std::move(phi)), budget_(budget)
    {
    }

    /// A depth-n tree for (p, q) over D, or nullopt with `status` False / Unknown.
    std::optional<SopTree> find(const Diagram &D, const PartialType &p, const PartialType &q, int n, Truth &status)
    {
        const Diagram F = focus(T_, D, p, q);
        const std::string key = "T" + problem_key(T_, F, p, q, n);
        if (auto it = failed_.find(key); it != failed_.end()) {
            status = it->second;
            return std::nullopt;
        }
        if (n == 0) {
            const Truth tp = T_.decide(p, F, budget_, phi_->object_arity()).as_truth();
            const Truth tq = tp == Truth::False ? tp : T_.decide(q, F, budget_, phi_->param_arity()).as_truth();
            status = both(tp, tq);
            if (status == Truth::True)
                return SopTree::make(0, F);
            remember(key, status);
            return std::nullopt;
        }
        // Collect the candidate roots first and try them newest-first.
        std::vector<std::pair<Diagram, ParamTuple>> roots;
        bool truncated = false;
        scan_extensions(
            T_, F, phi_->param_arity(), budget_,
            [&](const Diagram &D2, const ParamTuple &c) {
                roots.emplace_back(D2, c);
                return !budget_.exhausted;
            },
            truncated);
        status = Truth::False;
        for (auto it = roots.rbegin(); it != roots.rend(); ++it) {
            const auto &[D2, c] = *it;
            const Truth sq = check_q(T_, q, c, D2, budget_);
            if (sq != Truth::True) {
                if (sq == Truth::Unknown)
                    status = Truth::Unknown;
                continue;
            }
            const PartialType p1 = with(p, substitute(phi_, c));
            Truth s1 = Truth::False;
            auto a1 = find(D2, p1, q, n - 1, s1);
            if (!a1) {
                if (s1 == Truth::Unknown)
                    status = Truth::Unknown;
                continue;
            }
            const PartialType q0 = with(q, pair_instance(phi_, c));
            Truth s0 = Truth::False;
            auto a0 = find(D2, p, q0, n - 1, s0);
            if (!a0) {
                if (s0 == Truth::Unknown)
                    status = Truth::Unknown;
                continue;
            }
            status = Truth::True;
            return glue(T_, c, focus(T_, D2, p1, q), *a0, *a1);
        }
        if (truncated || budget_.exhausted)
            status = Truth::Unknown;
        remember(key, status);
        return std::nullopt;
    }

private:
    void remember(const std::string &key, Truth status)
    {
        if (!budget_.exhausted || status != Truth::Unknown)
            failed_[key] = status;
    }

    const TheoryPlugin &T_;
    TemplatePtr phi_;
    Budget &budget_;
    std::unordered_map<std::string, Truth> failed_;
};

} // namespace

AtLeastResult find_tree(const TheoryPlugin &T, const TemplatePtr &phi, const PartialType &p, const PartialType &q,
                        int n, Budget &budget, const std::optional<Diagram> &D)
{
    TreeSearch s(T, phi, budget);
    AtLeastResult r;
    Truth status = Truth::False;
    auto tree = s.find(D ? *D : T.empty_diagram(), p, q, n, status);
    if (!tree) {
        r.answer = status;
        return r;
    }
    const Report check = verify_sop1tree(T, phi, p, q, *tree, budget);
    if (check.holds == Truth::False)
        throw std::logic_error("tree search produced a tree that fails verification: " + check.violations.front());
    r.answer = check.holds;
    if (r.answer == Truth::True)
        r.tree = std::move(tree);
    return r;
}

RankResult rank_via_tree(const TheoryPlugin &T, const TemplatePtr &phi, const PartialType &p, const PartialType &q,
                         int cap, Budget &budget, const std::optional<Diagram> &D)
{
    return classify(cap, [&](int n, std::optional<SopTree> &t) {
        AtLeastResult r = find_tree(T, phi, p, q, n, budget, D);
        t = std::move(r.tree);
        return r.answer;
    });
}

} // namespace sopkit
