#pragma once

#include "sopkit/instance.hpp"

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace sopkit {

enum class Truth { False, True, Unknown };

inline Truth truth_of(bool b) { return b ? Truth::True : Truth::False; }
inline Truth negate(Truth t)
{
    return t == Truth::Unknown ? t : (t == Truth::True ? Truth::False : Truth::True);
}
const char *to_string(Truth t);

/// Search limits. Unknown verdicts are produced only when one of these is hit.
struct Budget {
    std::size_t node_cap = 20'000'000;
    int size_cap = 8; // named elements per diagram
    std::optional<std::chrono::steady_clock::time_point> deadline;

    std::size_t nodes = 0;
    bool exhausted = false;
    bool size_truncated = false;

    static Budget with_time(std::size_t node_cap, int size_cap, std::optional<long> time_ms);

    bool step()
    {
        if (exhausted)
            return false;
        if (++nodes > node_cap) {
            exhausted = true;
        } else if (deadline && (nodes & 1023) == 0 && std::chrono::steady_clock::now() > *deadline) {
            exhausted = true;
        }
        return !exhausted;
    }
    bool hit() const { return exhausted || size_truncated; }
};

/// Complete quantifier-free description of finitely many parameter tuples.
/// Elements occurring in `tuples` are named; any other element of the
/// structure is an anonymous closure element (T*_feq representatives).
struct Diagram {
    FiniteStructure structure;
    std::vector<ParamTuple> tuples;

    std::vector<Element> named() const;
    nlohmann::json to_json() const;
    static Diagram from_json(const nlohmann::json &j, SignaturePtr sig);
};

struct Realization {
    Diagram diagram;
    ParamTuple objects;
};

struct Verdict {
    enum class Kind { Consistent, Inconsistent, Unknown };

    Kind kind = Kind::Unknown;
    std::optional<Realization> witness;
    std::vector<int> core; // indices of a minimal inconsistent subset, when known

    bool consistent() const { return kind == Kind::Consistent; }
    bool inconsistent() const { return kind == Kind::Inconsistent; }
    bool unknown() const { return kind == Kind::Unknown; }
    Truth as_truth() const
    {
        return kind == Kind::Consistent ? Truth::True : kind == Kind::Inconsistent ? Truth::False : Truth::Unknown;
    }
};
const char *to_string(Verdict::Kind k);

struct Amalgam {
    Diagram diagram;
    std::map<Element, Element> right_renaming; // new elements of the right side
};

/// Canonical relabeling of a diagram with a prescribed order on named elements.
struct Canon {
    std::string key;
    std::map<Element, int> label;
};

class OracleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class TheoryPlugin {
public:
    virtual ~TheoryPlugin() = default;

    virtual std::string id() const = 0;
    virtual SignaturePtr signature() const = 0;

    /// Is there an extension of D realizing S? `object_arity` < 0 infers it from S.
    virtual Verdict decide(const PartialType &S, const Diagram &D, Budget &budget, int object_arity = -1) const = 0;

    /// Truth in the monster of one instance with its object block set to `objects` (all in D).
    virtual Truth holds(const FormulaInstance &inst, const ParamTuple &objects, const Diagram &D,
                        Budget &budget) const = 0;

    /// Calls f(D', c) for every extension of D by one tuple c of the given arity,
    /// up to the named-element cap. Coordinates may reuse elements. Stops when f
    /// returns false; returns false iff stopped.
    virtual bool for_each_extension(const Diagram &D, int arity, Budget &budget,
                                    const std::function<bool(const Diagram &, const ParamTuple &)> &f) const = 0;

    /// Substructure generated by `keep`; tuples leaving it are dropped.
    virtual Diagram restrict(const Diagram &D, const std::vector<Element> &keep) const = 0;

    /// Joins two extensions of `base` so both embed over it; the right side's
    /// new elements are renamed apart.
    virtual Amalgam amalgamate(const Diagram &base, const Diagram &left, const Diagram &right) const = 0;

    virtual Canon canonical(const Diagram &D, const std::vector<Element> &order) const;

    /// Each diagram over k tuples of the given arity, up to isomorphism, once.
    virtual std::vector<Diagram> enumerate_diagrams(int k, int arity, int cap) const;

    /// A finite structure and assignment realizing the plain instances of S.
    virtual std::optional<Realization> realize(const PartialType &S, const Diagram &D, Budget &budget) const;

    Verdict consistent(const PartialType &S, const Diagram &D, Budget &budget) const { return decide(S, D, budget); }

    Diagram empty_diagram() const { return Diagram{FiniteStructure(signature()), {}}; }
    void check_handles(const PartialType &S, const Diagram &D) const;
};

using PluginPtr = std::shared_ptr<const TheoryPlugin>;

/// Shared machinery for plugins whose diagrams are finite structures and whose
/// consistency is "realized in some complete finite extension".
class StructuralPlugin : public TheoryPlugin {
public:
    Verdict decide(const PartialType &S, const Diagram &D, Budget &budget, int object_arity = -1) const override;
    Truth holds(const FormulaInstance &inst, const ParamTuple &objects, const Diagram &D,
                Budget &budget) const override;
    bool for_each_extension(const Diagram &D, int arity, Budget &budget,
                            const std::function<bool(const Diagram &, const ParamTuple &)> &f) const override;
    Diagram restrict(const Diagram &D, const std::vector<Element> &keep) const override;

    /// Every complete one-point extension of M. The new element gets id
    /// M.fresh_element(); closure elements (if any) get the ids after it.
    virtual bool for_each_point(const FiniteStructure &M, Budget &budget,
                                const std::function<bool(FiniteStructure &, Element)> &f) const = 0;

protected:
    /// Elements generated by `keep` (default: keep itself).
    virtual std::set<Element> closure(const FiniteStructure &M, const std::set<Element> &keep) const;

    struct Check;
    Truth search(const FiniteStructure &M, int nslots, const std::vector<Check> &checks,
                 std::vector<Element> &vals, int slot, Budget &budget,
                 const std::function<bool(const FiniteStructure &, const std::vector<Element> &)> &leaf) const;
    Truth exists_bound(const FiniteStructure &M, const FormulaTemplate &f, std::vector<Element> prefix,
                       Budget &budget) const;
    Truth pair_holds(const FormulaInstance &inst, const ParamTuple &objects, const FiniteStructure &M,
                     Budget &budget) const;
    Truth plain_holds(const FormulaInstance &inst, const ParamTuple &objects, const FiniteStructure &M,
                      std::span<const Element> bound, Budget &budget) const;
};

/// Dense linear order without endpoints; diagrams are finite linear orders.
class DloPlugin final : public StructuralPlugin {
public:
    std::string id() const override { return "dlo"; }
    SignaturePtr signature() const override { return Signature::dlo(); }
    bool for_each_point(const FiniteStructure &M, Budget &budget,
                        const std::function<bool(FiniteStructure &, Element)> &f) const override;
    Amalgam amalgamate(const Diagram &base, const Diagram &left, const Diagram &right) const override;
    Canon canonical(const Diagram &D, const std::vector<Element> &order) const override;
};

/// The random graph; diagrams are finite loopless graphs.
class RandomGraphPlugin final : public StructuralPlugin {
public:
    std::string id() const override { return "random_graph"; }
    SignaturePtr signature() const override { return Signature::random_graph(); }
    bool for_each_point(const FiniteStructure &M, Budget &budget,
                        const std::function<bool(FiniteStructure &, Element)> &f) const override;
    Amalgam amalgamate(const Diagram &base, const Diagram &left, const Diagram &right) const override;
};

/// Model completion of one equivalence relation (infinitely many infinite classes).
class EquivalencePlugin final : public StructuralPlugin {
public:
    std::string id() const override { return "equiv"; }
    SignaturePtr signature() const override { return Signature::equivalence(); }
    bool for_each_point(const FiniteStructure &M, Budget &budget,
                        const std::function<bool(FiniteStructure &, Element)> &f) const override;
    Amalgam amalgamate(const Diagram &base, const Diagram &left, const Diagram &right) const override;
};

/// T*_feq. Diagrams are T_feq structures in which every E-class has exactly
/// one R-representative for each P element present, with F filled in.
class FeqPlugin final : public StructuralPlugin {
public:
    std::string id() const override { return "tfeq"; }
    SignaturePtr signature() const override { return Signature::feq(); }
    bool for_each_point(const FiniteStructure &M, Budget &budget,
                        const std::function<bool(FiniteStructure &, Element)> &f) const override;
    Amalgam amalgamate(const Diagram &base, const Diagram &left, const Diagram &right) const override;

protected:
    std::set<Element> closure(const FiniteStructure &M, const std::set<Element> &keep) const override;
};

/// Abstract oracle: an instance is identified by its parameter tuple and
/// polarity, and a set is inconsistent iff it contains a forbidden set (or a
/// literal together with its negation). Conjunctive powers expand into their
/// conjuncts.
class PatternPlugin final : public TheoryPlugin {
public:
    struct Atom {
        ParamTuple params;
        bool negated = false;
        friend auto operator<=>(const Atom &, const Atom &) = default;
    };
    /// Monotone: returns true when the set of positive/negative atoms is inconsistent.
    using Rule = std::function<bool(const std::vector<Atom> &)>;

    PatternPlugin(std::vector<Atom> instances, std::vector<std::vector<int>> min_inconsistent);
    PatternPlugin(Rule rule, std::vector<ParamTuple> candidates, std::string description);

    std::string id() const override { return "pattern"; }
    SignaturePtr signature() const override { return Signature::empty(); }
    Verdict decide(const PartialType &S, const Diagram &D, Budget &budget, int object_arity = -1) const override;
    Truth holds(const FormulaInstance &inst, const ParamTuple &objects, const Diagram &D,
                Budget &budget) const override;
    bool for_each_extension(const Diagram &D, int arity, Budget &budget,
                            const std::function<bool(const Diagram &, const ParamTuple &)> &f) const override;
    Diagram restrict(const Diagram &D, const std::vector<Element> &keep) const override;
    Amalgam amalgamate(const Diagram &base, const Diagram &left, const Diagram &right) const override;
    Canon canonical(const Diagram &D, const std::vector<Element> &order) const override;
    std::vector<Diagram> enumerate_diagrams(int k, int arity, int cap) const override;
    std::optional<Realization> realize(const PartialType &S, const Diagram &D, Budget &budget) const override;

    const std::vector<Atom> &instances() const { return instances_; }
    const std::vector<std::vector<int>> &hyperedges() const { return hyperedges_; }

    /// Atoms of an instance after expanding conjunctive powers.
    static std::vector<Atom> expand(const FormulaInstance &inst, const ParamTuple *objects = nullptr);
    bool inconsistent(std::vector<Atom> atoms) const;
    /// A diagram holding every element of the given tuples.
    static Diagram diagram_for(const std::vector<ParamTuple> &tuples);

private:
    std::vector<Atom> instances_;
    std::vector<std::vector<int>> hyperedges_;
    std::vector<std::vector<Atom>> forbidden_;
    Rule rule_;
    std::vector<ParamTuple> candidates_;
    std::string description_;
};

/// Builds a plugin from a theory spec:
/// {"plugin": "dlo"|"random_graph"|"equiv"|"tfeq"|"pattern", "pattern": {...}}.
PluginPtr load_theory(const nlohmann::json &spec);
PluginPtr make_plugin(const std::string &id);

} // namespace sopkit
