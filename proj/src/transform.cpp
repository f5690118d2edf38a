#include "sopkit/transform.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

namespace sopkit {

namespace {

nlohmann::json node_json(const Node &n) { return n.str(); }

nlohmann::json chain_json(const Chain &c)
{
    nlohmann::json j = nlohmann::json::array();
    for (const Node &n : c)
        j.push_back(n.str());
    return j;
}

long long binomial(int n, int k)
{
    if (k < 0 || k > n)
        return 0;
    long long r = 1;
    for (int i = 1; i <= k; ++i)
        r = r * (n - k + i) / i;
    return r;
}

/// Calls f on each k-subset of {0..n-1}, in lexicographic order.
bool for_each_subset(int n, int k, const std::function<bool(const std::vector<int> &)> &f)
{
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i)
        idx[i] = i;
    if (k > n)
        return true;
    while (true) {
        if (!f(idx))
            return false;
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i)
            --i;
        if (i < 0)
            return true;
        ++idx[i];
        for (int j = i + 1; j < k; ++j)
            idx[j] = idx[j - 1] + 1;
    }
}

PartialType union_type(const TemplatePtr &theta, const WitnessFamily &wf, const std::vector<Node> &tops)
{
    PartialType S;
    std::set<Chain> seen;
    for (const Node &t : tops)
        for (const Chain &c : chains_below(t, wf.n + 1))
            if (seen.insert(c).second)
                S.push_back(substitute(theta, wf.at(c)));
    return S;
}

} // namespace

PartialType branch_type(const TemplatePtr &theta, const WitnessFamily &wf, const Node &nu)
{
    return union_type(theta, wf, {nu});
}

nlohmann::json EmbeddingCertificate::to_json() const
{
    nlohmann::json j;
    j["n"] = n;
    j["m"] = m;
    j["embed_depth"] = embed_depth;
    j["branch_depth"] = branch_depth;
    nlohmann::json hj = nlohmann::json::object();
    for (std::size_t i = 0; i < domain.size(); ++i) {
        std::string key;
        for (int x : domain[i])
            key += std::to_string(x) + (domain[i].size() > 1 ? "." : "");
        if (!key.empty() && key.back() == '.')
            key.pop_back();
        hj[key] = node_json(h[i]);
    }
    j["h"] = hj;
    j["upsilon"] = upsilon;
    nlohmann::json bj = nlohmann::json::array();
    for (const Node &b : branches)
        bj.push_back(node_json(b));
    j["branches"] = bj;
    j["eta0"] = eta0;
    j["eta1"] = eta1;
    j["k_star"] = k_star;
    j["l_star"] = l_star;
    j["scanned"] = scanned;
    return j;
}

EmbeddingCertificate find_min_embedding(const TheoryPlugin &T, const TemplatePtr &theta, const WitnessFamily &wf,
                                        const EmbeddingOptions &opt, Budget &budget)
{
    EmbeddingCertificate cert;
    cert.n = wf.n;
    cert.m = opt.m;
    cert.embed_depth = opt.embed_depth >= 0 ? opt.embed_depth : wf.n + 2;
    cert.branch_depth = opt.branch_depth >= 0 ? opt.branch_depth : cert.embed_depth + 1;
    if (cert.branch_depth <= cert.embed_depth)
        throw std::invalid_argument("transform: branch depth must exceed the embedding depth");
    if (!wf.canonical && cert.branch_depth > wf.depth)
        throw TransformError(TransformError::Kind::TooShallow,
                             "transform: branch depth " + std::to_string(cert.branch_depth) +
                                 " exceeds the family depth " + std::to_string(wf.depth));
    cert.domain = tree_domain(wf.n, opt.m);
    std::vector<int> leaves;
    for (std::size_t i = 0; i < cert.domain.size(); ++i)
        if (static_cast<int>(cert.domain[i].size()) == wf.n)
            leaves.push_back(static_cast<int>(i));

    std::vector<std::vector<Node>> embeddings;
    for_each_embedding(wf.n, opt.m, cert.embed_depth, [&](const std::vector<Node> &h) {
        embeddings.push_back(h);
        return true;
    });

    // The verdict depends only on the set of branches, which many (h, Υ) share.
    std::map<std::vector<Node>, bool> seen;
    const int B = cert.branch_depth;
    const int count = static_cast<int>(leaves.size());
    bool found = false;
    for (int s = 1; s <= count && !found; ++s) {
        // First inconsistent choice of branches above an ordered tuple of leaf
        // images; distinct (h, Υ) often share their images.
        std::unordered_map<std::string, std::optional<std::vector<Node>>> by_images;
        auto first_branches = [&](const std::vector<Node> &images) -> const std::optional<std::vector<Node>> & {
            std::string packed;
            for (const Node &x : images)
                packed.append(reinterpret_cast<const char *>(&x.bits), sizeof x.bits).push_back(char(x.len));
            auto found_it = by_images.find(packed);
            if (found_it != by_images.end())
                return found_it->second;
            std::optional<std::vector<Node>> result;
            std::vector<Node> tops(s);
            std::vector<std::uint64_t> ext(s, 0), span(s);
            for (int i = 0; i < s; ++i)
                span[i] = std::uint64_t{1} << (B - images[i].len);
            while (true) {
                for (int i = 0; i < s; ++i)
                    tops[i] = Node{(images[i].bits << (B - images[i].len)) | ext[i], B};
                ++cert.scanned;
                std::vector<Node> key = tops;
                std::sort(key.begin(), key.end());
                auto it = seen.find(key);
                if (it == seen.end()) {
                    Verdict v = T.decide(union_type(theta, wf, tops), wf.diagram, budget, theta->object_arity());
                    if (v.unknown())
                        throw TransformError(TransformError::Kind::Budget, "transform: budget exhausted in the Ξ search");
                    it = seen.emplace(std::move(key), v.inconsistent()).first;
                }
                if (it->second) {
                    result = tops;
                    break;
                }
                int i = s - 1;
                while (i >= 0 && ++ext[i] == span[i])
                    ext[i--] = 0;
                if (i < 0)
                    break;
            }
            return by_images.emplace(std::move(packed), std::move(result)).first->second;
        };
        std::vector<Node> images;
        for (const auto &h : embeddings) {
            bool stop = !for_each_subset(count, s, [&](const std::vector<int> &pick) {
                images.clear();
                for (int i : pick)
                    images.push_back(h[leaves[i]]);
                const auto &tops = first_branches(images);
                if (!tops)
                    return true;
                cert.h = h;
                cert.upsilon.clear();
                for (int i : pick)
                    cert.upsilon.push_back(cert.domain[leaves[i]]);
                cert.branches = *tops;
                return false;
            });
            if (stop) {
                found = true;
                break;
            }
        }
    }
    if (!found)
        throw TransformError(TransformError::Kind::NotInXi,
                             "transform: not in Ξ (no h into 2^{<=" + std::to_string(cert.embed_depth) +
                                 "} with an inconsistent set of branches)");
    if (cert.branches.size() < 2)
        throw TransformError(TransformError::Kind::NotInXi,
                             "transform: a single branch is already inconsistent, so clause (a) fails");

    int best = -1;
    for (std::size_t i = 0; i < cert.branches.size(); ++i)
        for (std::size_t j = i + 1; j < cert.branches.size(); ++j) {
            const int l = meet(cert.branches[i], cert.branches[j]).len;
            if (l > best) {
                best = l;
                cert.eta0 = static_cast<int>(i);
                cert.eta1 = static_cast<int>(j);
            }
        }
    cert.k_star = best;
    cert.l_star = -1;
    for (int l = wf.n; l <= B && cert.l_star < 0; ++l) {
        std::vector<Node> cut;
        for (const Node &b : cert.branches)
            cut.push_back(b.prefix(l));
        Verdict v = T.decide(union_type(theta, wf, cut), wf.diagram, budget, theta->object_arity());
        if (v.unknown())
            throw TransformError(TransformError::Kind::Budget, "transform: budget exhausted computing ℓ*");
        if (v.inconsistent())
            cert.l_star = l;
    }
    if (cert.l_star <= cert.k_star)
        throw TransformError(TransformError::Kind::Internal,
                             "transform: ℓ* <= k*, which contradicts the minimality of Υ*");
    return cert;
}

Node varsigma(const Node &eta, int k_star, int l_star, const Node &nu_rho)
{
    if (eta.len <= k_star)
        return eta;
    return nu_rho.prefix(nu_rho.len - (l_star - eta.len));
}

Node nu_of(const EmbeddingCertificate &cert, const Node &rho)
{
    const Node &b0 = cert.branches.at(cert.eta0);
    const Node &b1 = cert.branches.at(cert.eta1);
    Node nu = b0.prefix(cert.k_star);
    const Node s0 = segment(b0, cert.k_star, cert.l_star);
    const Node s1 = segment(b1, cert.k_star, cert.l_star);
    for (int i = 0; i < rho.len; ++i)
        nu = concat(nu, rho.at(i) ? s1 : s0);
    return nu;
}

nlohmann::json TransformResult::to_json() const
{
    nlohmann::json j;
    j["schema"] = kWitnessSchema;
    j["k"] = k;
    j["depth"] = depth;
    j["theta_k"] = theta_k->text();
    j["certificate"] = certificate.to_json();
    nlohmann::json fc = nlohmann::json::array();
    for (const Chain &c : fixed_chains)
        fc.push_back(chain_json(c));
    j["fixed_chains"] = fc;
    nlohmann::json cj = nlohmann::json::object();
    for (const auto &[node, chains] : conjuncts) {
        nlohmann::json arr = nlohmann::json::array();
        for (const Chain &c : chains)
            arr.push_back(chain_json(c));
        cj[node] = arr;
    }
    j["conjuncts"] = cj;
    j["family"] = family_to_json(family);
    j["verification"] = verification.to_json();
    return j;
}

TransformResult transform_sop2pp_to_sop2(const TheoryPlugin &T, const TemplatePtr &theta, const WitnessFamily &wf,
                                         const EmbeddingOptions &opt, int d, Budget &budget)
{
    if (d < 0)
        throw std::invalid_argument("transform: negative output depth");
    TransformResult out;
    out.depth = d;
    out.certificate = find_min_embedding(T, theta, wf, opt, budget);
    const EmbeddingCertificate &cert = out.certificate;
    const int ks = cert.k_star, ls = cert.l_star, step = ls - ks;

    const int need = ks + (d + 1) * step;
    if (!wf.canonical && need > wf.depth)
        throw TransformError(TransformError::Kind::TooShallow,
                             "transform: output depth " + std::to_string(d) + " needs a family of depth " +
                                 std::to_string(need));

    std::set<Chain> fixed;
    for (std::size_t i = 0; i < cert.branches.size(); ++i) {
        if (static_cast<int>(i) == cert.eta0 || static_cast<int>(i) == cert.eta1)
            continue;
        for (const Chain &c : chains_below(cert.branches[i].prefix(ls), wf.n + 1))
            fixed.insert(c);
    }
    out.fixed_chains.assign(fixed.begin(), fixed.end());
    out.k = static_cast<int>(out.fixed_chains.size() + binomial(ls + 1, wf.n + 1));
    out.theta_k = conjunctive_power(theta, out.k);

    // ≈_2 check behind the replacement step: swapping the two ℓ*-branches for
    // their ς-images below incomparable ν_ρ0, ν_ρ1 keeps the profile.
    std::vector<Node> fixed_nodes;
    for (const Chain &c : out.fixed_chains)
        fixed_nodes.insert(fixed_nodes.end(), c.begin(), c.end());
    std::sort(fixed_nodes.begin(), fixed_nodes.end());
    fixed_nodes.erase(std::unique(fixed_nodes.begin(), fixed_nodes.end()), fixed_nodes.end());
    const Node &b0 = cert.branches[cert.eta0];
    const Node &b1 = cert.branches[cert.eta1];
    const auto nodes = nodes_upto(d);
    for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t j = i + 1; j < nodes.size(); ++j) {
            if (nodes[i].comparable(nodes[j]))
                continue;
            const Node nu0 = nu_of(cert, concat(Node{0, 1}, nodes[i]));
            const Node nu1 = nu_of(cert, concat(Node{0, 1}, nodes[j]));
            std::vector<Node> before = fixed_nodes, after = fixed_nodes;
            for (int l = 0; l <= ls; ++l) {
                before.push_back(b0.prefix(l));
                after.push_back(varsigma(b0.prefix(l), ks, ls, nu0));
            }
            for (int l = ks + 1; l <= ls; ++l) {
                before.push_back(b1.prefix(l));
                after.push_back(varsigma(b1.prefix(l), ks, ls, nu1));
            }
            if (!tuple_equiv(before, after, 2))
                throw TransformError(TransformError::Kind::NotIndiscernible,
                                     "transform: the ς-replacement changes the ≈_2 profile at " + nodes[i].str() +
                                         " / " + nodes[j].str());
        }

    out.family = TreeFamily::make(d, wf.diagram);
    for (const Node &rho : nodes) {
        const Node nu = nu_of(cert, concat(Node{0, 1}, rho));
        std::vector<Chain> conj = out.fixed_chains;
        for (const Chain &c : chains_below(nu, wf.n + 1)) {
            const bool in_window = std::all_of(c.begin(), c.end(), [&](const Node &x) {
                return x.len <= ks || x.len > nu.len - step;
            });
            if (in_window)
                conj.push_back(c);
        }
        if (static_cast<int>(conj.size()) != out.k)
            throw TransformError(TransformError::Kind::Internal,
                                 "transform: node " + rho.str() + " has " + std::to_string(conj.size()) +
                                     " conjuncts, expected " + std::to_string(out.k));
        ParamTuple b;
        for (const Chain &c : conj) {
            ParamTuple a = wf.at(c);
            b.insert(b.end(), a.begin(), a.end());
        }
        out.family.at(rho) = std::move(b);
        out.conjuncts[rho.str()] = std::move(conj);
    }
    out.family.diagram.tuples = out.family.tuples;
    out.verification = verify_sop2_witness(T, out.theta_k, out.family, budget);
    return out;
}

WitnessFamily sop2_implies_sop2pp(const TreeFamily &family)
{
    WitnessFamily wf;
    wf.n = 1;
    wf.depth = family.depth;
    wf.diagram = family.diagram;
    for (const Node &top : nodes_upto(family.depth))
        for (int l = 0; l < top.len; ++l)
            wf.tuples[Chain{top.prefix(l), top}] = family.at(top);
    return wf;
}

} // namespace sopkit
