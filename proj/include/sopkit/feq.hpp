#pragma once

#include "sopkit/oracle.hpp"
#include "sopkit/trees.hpp"

#include <map>
#include <string>
#include <vector>

namespace sopkit::feq {

// Symbol indices in Signature::feq().
inline constexpr int kQ = 0;
inline constexpr int kP = 1;
inline constexpr int kE = 2;
inline constexpr int kR = 3;
inline constexpr int kF = 0;

struct Violation {
    char clause = '?'; // 'a'..'d' for the T_feq axioms, 's' for shape errors
    std::string message;
    std::vector<Element> elements;
};

/// Checks axioms (a)-(d) of T_feq. Empty result means the structure is a model.
std::vector<Violation> check_tfeq(const FiniteStructure &M);

/// Same verdict computed by evaluating the axioms as formulas; used as an oracle.
bool satisfies_axioms_by_evaluation(const FiniteStructure &M);

/// E-classes of Q elements, ordered by least member.
struct Classes {
    std::map<Element, int> of;
    std::vector<std::vector<Element>> members;
};
Classes classes(const FiniteStructure &M);

std::vector<Element> elements_in(const FiniteStructure &M, int unary);

/// Makes E reflexive, symmetric and transitive on Q.
void close_equivalence(FiniteStructure &M);

/// Sets F(x, z) to the unique y with y E x and y R z, wherever one exists.
void rebuild_function(FiniteStructure &M);

/// Adds one fresh class member per E-class that lacks an R-representative for
/// some P element, making it the representative for all of them. Returns the
/// number of elements added.
int add_missing_representatives(FiniteStructure &M);

struct AmalgamInput {
    FiniteStructure base;
    FiniteStructure n0;
    FiniteStructure n1;
};

class AmalgamError : public std::runtime_error {
public:
    enum class Kind { Disagreement, Uniqueness, Shape };
    AmalgamError(Kind kind, std::vector<Element> witness, const std::string &message)
        : std::runtime_error(message), kind_(kind), witness_(std::move(witness))
    {
    }
    Kind kind() const { return kind_; }
    const std::vector<Element> &witness() const { return witness_; }

private:
    Kind kind_;
    std::vector<Element> witness_;
};

/// N with |N| = |N0| u |N1|, relations the unions, E closed under
/// transitivity, F(x, z) the unique y E x with y R z.
FiniteStructure amalgamate(const AmalgamInput &input);

/// Bounded one-point existential closure: every E-class gets a representative
/// for every P element and F becomes total on Q x P. `cap` bounds the size of
/// the result. An empty input stays empty unless `seed_empty` is set, in which
/// case it becomes the two-element structure {q R p}.
FiniteStructure ec_extend(const FiniteStructure &M, int cap, bool seed_empty = false);

/// Canonical text of a T_feq structure; equal iff isomorphic (exhaustive over
/// label permutations, so meant for small structures).
std::string canonical_form(const FiniteStructure &M);
bool isomorphic(const FiniteStructure &a, const FiniteStructure &b);

struct RefutationResult {
    bool tree_found = false;
    bool exhausted = true; // false when the budget was hit before the search finished
    std::optional<SopTree> tree;
    std::size_t nodes = 0;
    int size_cap = 0;
};

/// Searches for a phi-SOP'_1 tree of the given depth over T*_feq (p = q = top).
RefutationResult nsop1_refutation_search(const TemplatePtr &phi, int depth, Budget &budget);

} // namespace sopkit::feq
