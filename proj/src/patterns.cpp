#include "sopkit/patterns.hpp"

#include "sopkit/trees.hpp"

#include <algorithm>

namespace sopkit {

namespace {

using Atom = PatternPlugin::Atom;
using Nodes = std::vector<Node>;

struct RuleDef {
    const char *name;
    int min_n;
    const char *description;
    // Inconsistent iff some `arity` chains pairwise satisfy `pair`.
    int arity;
    bool (*pair)(const Nodes &, const Nodes &);
};

bool tops_apart(const Nodes &a, const Nodes &b) { return !a.back().comparable(b.back()); }
bool tops_apart_roots_equal(const Nodes &a, const Nodes &b) { return tops_apart(a, b) && a.front() == b.front(); }
bool middles_apart(const Nodes &a, const Nodes &b) { return !a[1].comparable(b[1]); }
bool tops_apart_middles_equal(const Nodes &a, const Nodes &b) { return tops_apart(a, b) && a[1] == b[1]; }
bool tops_and_middles_apart_roots_equal(const Nodes &a, const Nodes &b)
{
    return tops_apart(a, b) && middles_apart(a, b) && a.front() == b.front();
}
bool some_nodes_apart(const Nodes &a, const Nodes &b)
{
    for (const Node &x : a)
        for (const Node &y : b)
            if (!x.comparable(y))
                return true;
    return false;
}

const RuleDef kRules[] = {
    {"incomparable-tops", 1, "two chains with incomparable tops", 2, tops_apart},
    {"three-incomparable-tops", 2, "three chains with pairwise incomparable tops", 3, tops_apart},
    {"four-incomparable-tops", 2, "four chains with pairwise incomparable tops", 4, tops_apart},
    {"incomparable-tops-same-root", 1, "incomparable tops over the same bottom node", 2, tops_apart_roots_equal},
    {"incomparable-middles", 2, "two chains whose second nodes are incomparable", 2, middles_apart},
    {"incomparable-tops-same-middle", 2, "incomparable tops through the same second node", 2,
     tops_apart_middles_equal},
    {"split-below-root", 2, "incomparable tops and second nodes over the same bottom node", 2,
     tops_and_middles_apart_roots_equal},
    {"any-incomparable", 1, "some node of one chain incomparable to some node of another", 2, some_nodes_apart},
};

const RuleDef &find_rule(const std::string &name)
{
    for (const auto &r : kRules)
        if (name == r.name)
            return r;
    throw OracleError("unknown tree pattern \"" + name + "\"");
}

/// Is there a set of `k` chains, pairwise related by `pair`?
bool clique(const std::vector<Nodes> &chains, int k, bool (*pair)(const Nodes &, const Nodes &))
{
    std::vector<int> pick;
    std::function<bool(int)> rec = [&](int from) {
        if (static_cast<int>(pick.size()) == k)
            return true;
        for (int i = from; i < static_cast<int>(chains.size()); ++i) {
            bool ok = std::all_of(pick.begin(), pick.end(), [&](int j) { return pair(chains[j], chains[i]); });
            if (!ok)
                continue;
            pick.push_back(i);
            if (rec(i + 1))
                return true;
            pick.pop_back();
        }
        return false;
    };
    return rec(0);
}

} // namespace

const std::vector<TreePattern> &tree_patterns()
{
    static const std::vector<TreePattern> all = [] {
        std::vector<TreePattern> out;
        for (const auto &r : kRules)
            for (int n = r.min_n; n <= 2; ++n)
                out.push_back({r.name, n, r.description});
        return out;
    }();
    return all;
}

std::shared_ptr<PatternPlugin> make_tree_pattern(const std::string &name, int n)
{
    const RuleDef &def = find_rule(name);
    if (n < def.min_n)
        throw OracleError("tree pattern \"" + name + "\" needs n >= " + std::to_string(def.min_n));
    PatternPlugin::Rule rule = [&def, n](const std::vector<Atom> &atoms) {
        std::vector<Nodes> chains;
        for (const Atom &a : atoms) {
            if (a.negated || static_cast<int>(a.params.size()) != n + 1)
                continue;
            Nodes c;
            for (Element e : a.params)
                c.push_back(Node::from_heap(static_cast<std::size_t>(e)));
            chains.push_back(std::move(c));
        }
        return clique(chains, def.arity, def.pair);
    };
    return std::make_shared<PatternPlugin>(std::move(rule), std::vector<ParamTuple>{},
                                           std::string(name) + "/n=" + std::to_string(n));
}

} // namespace sopkit
