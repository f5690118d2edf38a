#pragma once

#include "sopkit/oracle.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace sopkit {

/// A binary string of length <= 62. Bit i of the string is
/// (bits >> (len - 1 - i)) & 1, so the numeric value reads left to right.
struct Node {
    std::uint64_t bits = 0;
    int len = 0;

    static Node parse(std::string_view s);
    static Node from_heap(std::size_t h);
    std::string str() const;

    int at(int i) const { return static_cast<int>((bits >> (len - 1 - i)) & 1u); }
    Node child(int b) const { return Node{(bits << 1) | static_cast<std::uint64_t>(b & 1), len + 1}; }
    Node prefix(int l) const { return Node{bits >> (len - l), l}; }
    /// Position in the breadth-first layout: 2^len - 1 + value.
    std::size_t heap() const { return (std::size_t{1} << len) - 1 + bits; }

    /// this ⊴ other
    bool initial_of(const Node &other) const { return len <= other.len && other.prefix(len) == *this; }
    /// this ⊲ other
    bool strict_initial_of(const Node &other) const { return len < other.len && initial_of(other); }
    bool comparable(const Node &other) const { return initial_of(other) || other.initial_of(*this); }

    friend bool operator==(const Node &, const Node &) = default;
    /// Shortlex: by length, then value.
    friend bool operator<(const Node &a, const Node &b) { return a.len != b.len ? a.len < b.len : a.bits < b.bits; }
};

Node meet(const Node &a, const Node &b);
Node concat(const Node &a, const Node &b);
/// ν↾[from, to)
Node segment(const Node &nu, int from, int to);
/// Every node of length exactly l, in order.
std::vector<Node> level(int l);
/// Every node of length <= depth, shortlex.
std::vector<Node> nodes_upto(int depth);

/// The verdict of a verifier. `holds` is Unknown only when a budget was hit
/// and no violation was found.
struct Report {
    Truth holds = Truth::True;
    std::vector<std::string> violations;
    std::vector<std::string> indeterminate;

    bool ok() const { return holds == Truth::True; }
    void fail(std::string what);
    void unknown(std::string what);
    /// Folds in an oracle verdict; `expect_consistent` says which side passes.
    void expect(const Verdict &v, bool expect_consistent, const std::string &what);
    nlohmann::json to_json() const;
};

/// Parameter tuples indexed by nodes of length < depth (a φ-SOP'_1 tree of
/// depth n has nodes 2^{<n}; depth 0 is the empty tree).
struct SopTree {
    int depth = 0;
    std::vector<ParamTuple> tuples; // heap order
    Diagram diagram;

    static SopTree make(int depth, Diagram d);
    std::size_t size() const { return tuples.size(); }
    const ParamTuple &at(const Node &n) const { return tuples.at(n.heap()); }
    ParamTuple &at(const Node &n) { return tuples.at(n.heap()); }
};

/// Parameter tuples on 2^{<=depth}, as in the SOP_1 / SOP_2 / SOP'_1 witnesses.
struct TreeFamily {
    int depth = 0;
    std::vector<ParamTuple> tuples; // heap order
    Diagram diagram;

    static TreeFamily make(int depth, Diagram d);
    const ParamTuple &at(const Node &n) const { return tuples.at(n.heap()); }
    ParamTuple &at(const Node &n) { return tuples.at(n.heap()); }
};

using Chain = std::vector<Node>;

/// ā_η̄ for chains η̄ = ⟨η_0 ⊲ ... ⊲ η_n⟩ of nodes of length <= depth. A
/// canonical family has no table: ā_η̄ is the list of heap indices of η̄, for
/// oracles that read the tree position straight off the parameters.
struct WitnessFamily {
    int n = 0;
    int depth = 0;
    bool canonical = false;
    std::map<Chain, ParamTuple> tuples;
    Diagram diagram;

    ParamTuple at(const Chain &c) const;
    bool defined(const Chain &c) const;
};

/// Every ⊲-chain of `count` nodes that are initial segments of `top`
/// (lengths 0..|top|), in lexicographic order of lengths.
std::vector<Chain> chains_below(const Node &top, int count);

// -- φ-SOP'_1 trees ---------------------------------------------------------

/// (a) p ∪ {φ(x, a_{η↾l}) : l < n, η(l) = 1} is consistent for each η ∈ 2^n;
/// (b) every a_η satisfies q; (c) ν⌢0 ⊴ η ⇒ {φ(x, a_ν), φ(x, a_η)} is
/// inconsistent. At depth 0, (b) asks that q be consistent.
Report verify_sop1tree(const TheoryPlugin &T, const TemplatePtr &phi, const PartialType &p, const PartialType &q,
                       const SopTree &tree, Budget &budget);

struct SplitTree {
    SopTree a0, a1;
    PartialType p0, q0; // (p, q ∪ {pair(a_⟨⟩)}) for A^0
    PartialType p1, q1; // (p ∪ {φ(x, a_⟨⟩)}, q) for A^1
};

/// A^l = {a_{⟨l⟩⌢η}} with the types it is a tree for.
SplitTree split_tree(const TemplatePtr &phi, const PartialType &p, const PartialType &q, const SopTree &tree);

/// The tree with root c, A^0 under ⟨0⟩ and A^1 under ⟨1⟩ (the converse of split_tree).
SopTree join_tree(const ParamTuple &c, const SopTree &a0, const SopTree &a1, Diagram diagram);

// -- tree-indexed witnesses -------------------------------------------------

/// SOP_2: branches {φ(x, a_{η↾l}) : l <= d} consistent; incomparable pairs inconsistent.
Report verify_sop2_witness(const TheoryPlugin &T, const TemplatePtr &phi, const TreeFamily &f, Budget &budget);
/// SOP_1: branches consistent; ν⌢0 ⊴ η ⇒ {φ(x, a_η), φ(x, a_{ν⌢1})} inconsistent.
Report verify_sop1_witness(const TheoryPlugin &T, const TemplatePtr &phi, const TreeFamily &f, Budget &budget);
/// SOP'_1: {φ(x, a_{η↾l})^{η(l)} : l < d} consistent for η ∈ 2^d;
/// ν⌢0 ⊴ η ⇒ {φ(x, a_η), φ(x, a_ν)} inconsistent.
Report verify_sop1p_witness(const TheoryPlugin &T, const TemplatePtr &phi, const TreeFamily &f, Budget &budget);

struct Sop2ppOptions {
    int m = 2;
    int embed_depth = -1; // depth of 2^{<=E} that h maps into; -1 means n + 2
    bool check_embeddings = true;
};

/// Clause (a) on the branches of 2^{depth}; clause (b) for every injective h
/// from ^{<=n}m into 2^{<=E} preserving ⊲ and ⊥.
Report verify_sop2pp_witness(const TheoryPlugin &T, const TemplatePtr &theta, const WitnessFamily &wf,
                             const Sop2ppOptions &opt, Budget &budget);

/// Enumerates the injective maps h : ^{<=n}m → 2^{<=E} preserving ⊲ and ⊥.
/// Domain nodes are listed by `tree_domain(n, m)`; f gets h in that order.
std::vector<std::vector<int>> tree_domain(int n, int m);
bool for_each_embedding(int n, int m, int E, const std::function<bool(const std::vector<Node> &)> &f);

/// SOP_3 in its two-formula form, for finite sequences a, b:
/// (a) {φ(x,y), ψ(x,y)} contradictory; (b) i <= j ⇒ φ[b_j, a_i] and
/// i > j ⇒ ψ[b_j, a_i]; (c) {φ(x, a_j), ψ(x, a_i)} contradictory for i < j.
Report verify_sop3_witness(const TheoryPlugin &T, const TemplatePtr &phi, const TemplatePtr &psi,
                           const std::vector<ParamTuple> &a, const std::vector<ParamTuple> &b, const Diagram &D,
                           Budget &budget);

/// SOP_n read as a chain plus a forbidden cycle: φ[a_i, a_j] for all i < j, and
/// {φ(z_0, z_1), ..., φ(z_{n-1}, z_0)} is inconsistent.
Report verify_sopn_witness(const TheoryPlugin &T, const TemplatePtr &phi, const std::vector<ParamTuple> &chain,
                           int n, const Diagram &D, Budget &budget);

// -- indiscernibility -------------------------------------------------------

/// The three truth matrices of Def. (b) for a tuple of nodes.
struct TupleProfile {
    int size = 0;
    std::vector<bool> below_meet;   // η_{k3} ⊴ η_{k1} ∩ η_{k2}
    std::vector<bool> meet_below;   // η_{k1} ∩ η_{k2} ⊲ η_{k3}
    std::vector<bool> zero_turn;    // (η_{k1} ∩ η_{k2})⌢0 ⊴ η_{k3}

    static TupleProfile of(const std::vector<Node> &t);
};

/// ≈_1 compares all three matrices, ≈_2 drops the third.
bool tuple_equiv(const std::vector<Node> &a, const std::vector<Node> &b, int t);

/// Finite t-fbti check: tuples of nodes of 2^{<=depth} of each length up to
/// `max_len` in the same ≈_t class agree on every formula in Δ (each a
/// template whose parameter block is the concatenation of the tuples).
Report check_fbti(const TheoryPlugin &T, const TreeFamily &f, int t, const std::vector<TemplatePtr> &delta,
                  int max_len, Budget &budget);

// -- I/O --------------------------------------------------------------------

inline constexpr const char *kWitnessSchema = "sopkit/witness/1";

nlohmann::json tree_to_json(const SopTree &t);
SopTree tree_from_json(const nlohmann::json &j, SignaturePtr sig);
nlohmann::json family_to_json(const TreeFamily &f);
TreeFamily family_from_json(const nlohmann::json &j, SignaturePtr sig);
nlohmann::json witness_family_to_json(const WitnessFamily &wf);
WitnessFamily witness_family_from_json(const nlohmann::json &j, SignaturePtr sig);

/// Graphviz text; inconsistent pairs (as found by the oracle) are drawn as dashed red edges.
std::string tree_to_dot(const TheoryPlugin &T, const TemplatePtr &phi, const std::vector<ParamTuple> &tuples,
                        int levels, const Diagram &D, Budget &budget);

// -- constructions over DLO -------------------------------------------------

/// Nested-interval φ-SOP'_1 tree for φ = y0 < x0 & x0 < y1 of the given depth:
/// a_{ν⌢1}'s subtree lies inside a_ν, a_{ν⌢0}'s subtree to its right.
SopTree dlo_sop1_tree(int depth);
/// a_η = the η-th dyadic subinterval; an SOP_2 (hence SOP_1) witness.
TreeFamily dlo_dyadic_family(int depth);

} // namespace sopkit
