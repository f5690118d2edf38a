#pragma once

#include "sopkit/trees.hpp"

#include <optional>
#include <string>
#include <unordered_map>

namespace sopkit {

/// rk^1 under a depth cap.
struct RankValue {
    enum class Kind { MinusOne, Finite, AtLeast, Undetermined };

    Kind kind = Kind::MinusOne;
    int value = -1; // Finite: the rank; AtLeast: the cap
    int lo = -1;    // Undetermined: rank is in [lo, hi], hi = cap meaning "lo or more"
    int hi = -1;

    static RankValue minus_one() { return {Kind::MinusOne, -1, -1, -1}; }
    static RankValue finite(int n) { return {Kind::Finite, n, n, n}; }
    static RankValue at_least(int cap) { return {Kind::AtLeast, cap, cap, cap}; }
    static RankValue undetermined(int lo, int hi) { return {Kind::Undetermined, -1, lo, hi}; }

    bool determined() const { return kind != Kind::Undetermined; }
    std::string str() const;
    nlohmann::json to_json() const;
    friend bool operator==(const RankValue &, const RankValue &) = default;
};

/// a <= b as ranks, when both are determined. AtLeast(c) is read as "c or more",
/// so AtLeast(c) <= Finite(k) is false for k < c and unknown otherwise.
std::optional<bool> rank_leq(const RankValue &a, const RankValue &b);

struct AtLeastResult {
    Truth answer = Truth::Unknown;
    std::optional<SopTree> tree; // a verified-by-construction tree when answer is True
};

/// Search state for one (theory, φ). The memo is keyed by the canonical form
/// of the diagram of the mentioned parameters together with p, q and n.
class RankSolver {
public:
    RankSolver(const TheoryPlugin &T, TemplatePtr phi, Budget &budget);

    /// rk ≥ n by the recursive definition.
    Truth at_least(const Diagram &D, const PartialType &p, const PartialType &q, int n);

    /// A depth-n tree for (p, q) when at_least is True.
    std::optional<SopTree> witness(const Diagram &D, const PartialType &p, const PartialType &q, int n);

    std::size_t memo_size() const { return memo_.size(); }

private:
    struct Problem {
        Diagram D;
        std::string key;
    };
    Problem normalize(const Diagram &D, const PartialType &p, const PartialType &q, int n) const;
    Truth base_case(const Diagram &D, const PartialType &p, const PartialType &q);
    Truth satisfies_q(const PartialType &q, const ParamTuple &c, const Diagram &D);

    const TheoryPlugin &T_;
    TemplatePtr phi_;
    Budget &budget_;
    std::unordered_map<std::string, Truth> memo_;
};

/// Diagram of p and q's parameters; defaults to the empty diagram.
AtLeastResult rank_at_least(const TheoryPlugin &T, const TemplatePtr &phi, const PartialType &p, const PartialType &q,
                            int n, Budget &budget, const std::optional<Diagram> &D = std::nullopt);

struct RankResult {
    RankValue value;
    std::optional<SopTree> witness; // depth = value (or the cap for AtLeast)
};

RankResult rank(const TheoryPlugin &T, const TemplatePtr &phi, const PartialType &p, const PartialType &q, int cap,
                Budget &budget, const std::optional<Diagram> &D = std::nullopt, bool want_witness = true);

/// The same value obtained by searching for φ-SOP'_1 trees directly: root c
/// first, then the two subtree problems, glued by amalgamation and checked
/// with verify_sop1tree.
RankResult rank_via_tree(const TheoryPlugin &T, const TemplatePtr &phi, const PartialType &p, const PartialType &q,
                         int cap, Budget &budget, const std::optional<Diagram> &D = std::nullopt);

/// The tree search behind rank_via_tree, for one depth.
AtLeastResult find_tree(const TheoryPlugin &T, const TemplatePtr &phi, const PartialType &p, const PartialType &q,
                        int n, Budget &budget, const std::optional<Diagram> &D = std::nullopt);

} // namespace sopkit
