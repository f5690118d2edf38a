#pragma once

#include "sopkit/formula.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

namespace sopkit {

using Element = int;
using ParamTuple = std::vector<Element>;

struct TupleLess {
    using is_transparent = void;
    bool operator()(std::span<const Element> a, std::span<const Element> b) const
    {
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    }
};

class StructureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A finite structure with partial functions. Elements are opaque ids.
class FiniteStructure {
public:
    FiniteStructure() : FiniteStructure(Signature::empty()) {}
    explicit FiniteStructure(SignaturePtr sig);

    const SignaturePtr &signature() const { return sig_; }
    const std::vector<Element> &universe() const { return universe_; }
    std::size_t size() const { return universe_.size(); }
    bool contains(Element e) const;
    Element fresh_element() const { return universe_.empty() ? 0 : universe_.back() + 1; }

    void add_element(Element e);
    void add_fact(int relation, ParamTuple tuple);
    void remove_fact(int relation, std::span<const Element> tuple);
    bool holds(int relation, std::span<const Element> tuple) const;
    const std::set<ParamTuple, TupleLess> &facts(int relation) const { return relations_.at(relation); }

    void set_value(int function, ParamTuple args, Element value);
    void clear_function(int function) { functions_.at(function).clear(); }
    std::optional<Element> apply(int function, std::span<const Element> args) const;
    const std::map<ParamTuple, Element, TupleLess> &graph(int function) const { return functions_.at(function); }

    void set_constant(int c, Element e);
    std::optional<Element> constant(int c) const { return constants_.at(c); }

    /// Substructure on `keep`; facts and function entries leaving it are dropped.
    FiniteStructure restrict_to(const std::set<Element> &keep) const;
    /// Applies an injective renaming to every element.
    FiniteStructure renamed(const std::map<Element, Element> &rename) const;

    nlohmann::json to_json() const;
    static FiniteStructure from_json(const nlohmann::json &j, SignaturePtr sig);

    friend bool operator==(const FiniteStructure &a, const FiniteStructure &b);

private:
    SignaturePtr sig_;
    std::vector<Element> universe_; // sorted
    std::vector<std::set<ParamTuple, TupleLess>> relations_;
    std::vector<std::map<ParamTuple, Element, TupleLess>> functions_;
    std::vector<std::optional<Element>> constants_;
};

/// Truth of f in M; `assignment` covers the object and parameter blocks, the
/// existential block (if any) is searched exhaustively over the universe.
bool evaluate(const FiniteStructure &M, const FormulaTemplate &f, std::span<const Element> assignment);

/// Truth of a quantifier-free matrix under a total slot assignment.
bool evaluate_matrix(const FiniteStructure &M, const Formula &f, std::span<const Element> slots);

std::optional<Element> evaluate_term(const FiniteStructure &M, const Term &t, std::span<const Element> slots);

} // namespace sopkit
