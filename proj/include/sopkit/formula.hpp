#pragma once

#include "sopkit/signature.hpp"

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace sopkit {

struct Term {
    enum class Kind : std::uint8_t { Variable, Constant, Apply };

    Kind kind = Kind::Variable;
    int index = 0; // variable slot, constant index, or function index
    std::vector<Term> args;

    static Term variable(int slot) { return Term{Kind::Variable, slot, {}}; }
    static Term constant(int c) { return Term{Kind::Constant, c, {}}; }
    static Term apply(int f, std::vector<Term> args) { return Term{Kind::Apply, f, std::move(args)}; }

    friend bool operator==(const Term &, const Term &) = default;
};

/// Quantifier-free formula tree. And/Or are n-ary and kept flat by the parser.
struct Formula {
    enum class Kind : std::uint8_t { True, False, Atom, Equal, Defined, Not, And, Or };

    Kind kind = Kind::True;
    int symbol = -1; // relation index for Atom
    std::vector<Term> terms;
    std::vector<Formula> children;

    static Formula truth() { return Formula{Kind::True, -1, {}, {}}; }
    static Formula falsity() { return Formula{Kind::False, -1, {}, {}}; }
    static Formula atom(int relation, std::vector<Term> args) { return Formula{Kind::Atom, relation, std::move(args), {}}; }
    static Formula equal(Term a, Term b) { return Formula{Kind::Equal, -1, {std::move(a), std::move(b)}, {}}; }
    static Formula defined(Term t) { return Formula{Kind::Defined, -1, {std::move(t)}, {}}; }
    static Formula negation(Formula f) { return Formula{Kind::Not, -1, {}, {std::move(f)}}; }
    static Formula conjunction(std::vector<Formula> fs);
    static Formula disjunction(std::vector<Formula> fs);

    friend bool operator==(const Formula &, const Formula &) = default;
};

class FormulaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A formula phi(x; y) with a distinguished object block x and parameter
/// block y, optionally under one existential block. Variable slots are laid
/// out as [objects | parameters | bound].
class FormulaTemplate {
public:
    FormulaTemplate(SignaturePtr sig, std::vector<std::string> object_vars,
                    std::vector<std::string> param_vars, std::vector<std::string> bound_vars,
                    Formula matrix);

    const SignaturePtr &signature() const { return sig_; }
    const std::vector<std::string> &object_vars() const { return object_vars_; }
    const std::vector<std::string> &param_vars() const { return param_vars_; }
    const std::vector<std::string> &bound_vars() const { return bound_vars_; }
    const Formula &matrix() const { return matrix_; }

    int object_arity() const { return static_cast<int>(object_vars_.size()); }
    int param_arity() const { return static_cast<int>(param_vars_.size()); }
    int bound_count() const { return static_cast<int>(bound_vars_.size()); }
    int slot_count() const { return object_arity() + param_arity() + bound_count(); }
    bool has_exists() const { return !bound_vars_.empty(); }
    bool mentions_function() const { return mentions_function_; }

    const std::string &slot_name(int slot) const;

    /// Set when this template is theta^<k>: the conjunction of k copies of a
    /// base template over disjoint parameter blocks.
    const std::shared_ptr<const FormulaTemplate> &power_base() const { return power_base_; }
    int power() const { return power_; }

    /// Printed form in the concrete grammar, computed once.
    const std::string &text() const { return text_; }
    std::string to_string() const { return text_; }

    friend bool operator==(const FormulaTemplate &a, const FormulaTemplate &b);

private:
    friend std::shared_ptr<const FormulaTemplate> conjunctive_power(
        const std::shared_ptr<const FormulaTemplate> &, int);

    SignaturePtr sig_;
    std::vector<std::string> object_vars_;
    std::vector<std::string> param_vars_;
    std::vector<std::string> bound_vars_;
    Formula matrix_;
    bool mentions_function_ = false;
    std::shared_ptr<const FormulaTemplate> power_base_;
    int power_ = 1;
    std::string text_;
};

using TemplatePtr = std::shared_ptr<const FormulaTemplate>;

/// theta^<k>(x; y_0 ... y_{k-1}) = AND_{l<k} theta(x; y_l).
TemplatePtr conjunctive_power(const TemplatePtr &base, int k);

/// Printing in the concrete grammar; parse(print(t)) == t for parsed templates.
std::string print_formula(const Formula &f, const FormulaTemplate &ctx);
std::string print_term(const Term &t, const FormulaTemplate &ctx);

/// Renames variable slots: slot i becomes slot_map[i].
Term shift_term(const Term &t, const std::vector<int> &slot_map);
Formula shift_formula(const Formula &f, const std::vector<int> &slot_map);

bool is_existential_positive(const Formula &f);
bool term_mentions_function(const Term &t);
bool formula_mentions_function(const Formula &f);

} // namespace sopkit
