#include "sopkit/formula.hpp"

#include <cctype>
#include <set>

namespace sopkit {

namespace {

void flatten_into(std::vector<Formula> &out, Formula f, Formula::Kind kind)
{
    if (f.kind == kind) {
        for (auto &c : f.children)
            flatten_into(out, std::move(c), kind);
    } else {
        out.push_back(std::move(f));
    }
}

Formula make_nary(std::vector<Formula> fs, Formula::Kind kind, Formula unit)
{
    std::vector<Formula> flat;
    for (auto &f : fs)
        flatten_into(flat, std::move(f), kind);
    if (flat.empty())
        return unit;
    if (flat.size() == 1)
        return std::move(flat.front());
    return Formula{kind, -1, {}, std::move(flat)};
}

bool is_symbolic(const std::string &name)
{
    return !name.empty() && !(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_');
}

void check_term(const Term &t, const Signature &sig, int slots)
{
    switch (t.kind) {
    case Term::Kind::Variable:
        if (t.index < 0 || t.index >= slots)
            throw FormulaError("variable slot out of range");
        break;
    case Term::Kind::Constant:
        if (t.index < 0 || t.index >= static_cast<int>(sig.constants().size()))
            throw FormulaError("constant index out of range");
        break;
    case Term::Kind::Apply: {
        if (t.index < 0 || t.index >= static_cast<int>(sig.functions().size()))
            throw FormulaError("function index out of range");
        const auto &decl = sig.functions()[t.index];
        if (static_cast<int>(t.args.size()) != decl.arity)
            throw FormulaError("function '" + decl.name + "' expects " + std::to_string(decl.arity) +
                               " arguments");
        for (const auto &a : t.args)
            check_term(a, sig, slots);
        break;
    }
    }
}

void check_formula(const Formula &f, const Signature &sig, int slots)
{
    switch (f.kind) {
    case Formula::Kind::True:
    case Formula::Kind::False:
        break;
    case Formula::Kind::Atom: {
        if (f.symbol < 0 || f.symbol >= static_cast<int>(sig.relations().size()))
            throw FormulaError("relation index out of range");
        const auto &decl = sig.relations()[f.symbol];
        if (static_cast<int>(f.terms.size()) != decl.arity)
            throw FormulaError("relation '" + decl.name + "' expects " + std::to_string(decl.arity) +
                               " arguments");
        for (const auto &t : f.terms)
            check_term(t, sig, slots);
        break;
    }
    case Formula::Kind::Equal:
        if (f.terms.size() != 2)
            throw FormulaError("equality needs two terms");
        for (const auto &t : f.terms)
            check_term(t, sig, slots);
        break;
    case Formula::Kind::Defined:
        if (f.terms.size() != 1)
            throw FormulaError("def() takes one term");
        check_term(f.terms[0], sig, slots);
        break;
    case Formula::Kind::Not:
        if (f.children.size() != 1)
            throw FormulaError("negation takes one operand");
        check_formula(f.children[0], sig, slots);
        break;
    case Formula::Kind::And:
    case Formula::Kind::Or:
        for (const auto &c : f.children)
            check_formula(c, sig, slots);
        break;
    }
}

std::string join_names(const std::vector<std::string> &names)
{
    std::string out;
    for (const auto &n : names) {
        if (!out.empty())
            out += ' ';
        out += n;
    }
    return out;
}

} // namespace

Term shift_term(const Term &t, const std::vector<int> &slot_map)
{
    if (t.kind == Term::Kind::Variable)
        return Term::variable(slot_map[t.index]);
    Term out = t;
    for (auto &a : out.args)
        a = shift_term(a, slot_map);
    return out;
}

Formula shift_formula(const Formula &f, const std::vector<int> &slot_map)
{
    Formula out = f;
    for (auto &t : out.terms)
        t = shift_term(t, slot_map);
    for (auto &c : out.children)
        c = shift_formula(c, slot_map);
    return out;
}

Formula Formula::conjunction(std::vector<Formula> fs)
{
    return make_nary(std::move(fs), Kind::And, truth());
}

Formula Formula::disjunction(std::vector<Formula> fs)
{
    return make_nary(std::move(fs), Kind::Or, falsity());
}

FormulaTemplate::FormulaTemplate(SignaturePtr sig, std::vector<std::string> object_vars,
                                 std::vector<std::string> param_vars,
                                 std::vector<std::string> bound_vars, Formula matrix)
    : sig_(std::move(sig)), object_vars_(std::move(object_vars)),
      param_vars_(std::move(param_vars)), bound_vars_(std::move(bound_vars)),
      matrix_(std::move(matrix))
{
    if (!sig_)
        throw FormulaError("template without signature");
    std::set<std::string> seen;
    for (const auto *block : {&object_vars_, &param_vars_, &bound_vars_}) {
        for (const auto &v : *block) {
            if (v.empty())
                throw FormulaError("empty variable name");
            if (sig_->declares(v))
                throw FormulaError("variable '" + v + "' clashes with a signature symbol");
            if (!seen.insert(v).second)
                throw FormulaError("variable '" + v + "' declared twice");
        }
    }
    check_formula(matrix_, *sig_, slot_count());
    mentions_function_ = formula_mentions_function(matrix_);

    text_.clear();
    if (has_exists())
        text_ += "exists " + join_names(bound_vars_) + " . ";
    text_ += print_formula(matrix_, *this);
    text_ += " ; vars ";
    text_ += join_names(object_vars_);
    text_ += object_vars_.empty() ? "|" : " |";
    if (!param_vars_.empty())
        text_ += " " + join_names(param_vars_);
}

const std::string &FormulaTemplate::slot_name(int slot) const
{
    const int nx = object_arity();
    const int ny = param_arity();
    if (slot < 0 || slot >= slot_count())
        throw FormulaError("slot out of range");
    if (slot < nx)
        return object_vars_[slot];
    if (slot < nx + ny)
        return param_vars_[slot - nx];
    return bound_vars_[slot - nx - ny];
}

bool operator==(const FormulaTemplate &a, const FormulaTemplate &b)
{
    return *a.sig_ == *b.sig_ && a.object_vars_ == b.object_vars_ && a.param_vars_ == b.param_vars_ &&
           a.bound_vars_ == b.bound_vars_ && a.matrix_ == b.matrix_;
}

TemplatePtr conjunctive_power(const TemplatePtr &base, int k)
{
    if (!base || k < 1)
        throw FormulaError("conjunctive power needs a template and k >= 1");
    const int nx = base->object_arity();
    const int ny = base->param_arity();
    const int nb = base->bound_count();
    std::vector<std::string> params;
    std::vector<std::string> bound;
    std::vector<Formula> copies;
    for (int l = 0; l < k; ++l) {
        const std::string suffix = "_" + std::to_string(l);
        std::vector<int> slot_map(base->slot_count());
        for (int i = 0; i < nx; ++i)
            slot_map[i] = i;
        for (int j = 0; j < ny; ++j) {
            slot_map[nx + j] = nx + l * ny + j;
            params.push_back(base->param_vars()[j] + suffix);
        }
        for (int b = 0; b < nb; ++b) {
            slot_map[nx + ny + b] = nx + k * ny + l * nb + b;
            bound.push_back(base->bound_vars()[b] + suffix);
        }
        copies.push_back(shift_formula(base->matrix(), slot_map));
    }
    Formula body = k == 1 ? copies.front() : Formula{Formula::Kind::And, -1, {}, std::move(copies)};
    auto out = std::make_shared<FormulaTemplate>(base->signature(), base->object_vars(), std::move(params),
                                                 std::move(bound), std::move(body));
    out->power_base_ = base->power_base() ? base->power_base() : base;
    out->power_ = k * base->power();
    return out;
}

std::string print_term(const Term &t, const FormulaTemplate &ctx)
{
    const Signature &sig = *ctx.signature();
    switch (t.kind) {
    case Term::Kind::Variable:
        return ctx.slot_name(t.index);
    case Term::Kind::Constant:
        return sig.constants()[t.index];
    case Term::Kind::Apply: {
        std::string out = sig.functions()[t.index].name + "(";
        for (std::size_t i = 0; i < t.args.size(); ++i) {
            if (i)
                out += ",";
            out += print_term(t.args[i], ctx);
        }
        return out + ")";
    }
    }
    return {};
}

namespace {

std::string print_operand(const Formula &f, const FormulaTemplate &ctx)
{
    // Operands of ! and of n-ary connectives are parenthesized unless atomic.
    if (f.kind == Formula::Kind::And || f.kind == Formula::Kind::Or)
        return "(" + print_formula(f, ctx) + ")";
    if (f.kind == Formula::Kind::Not && !f.children.empty() && f.children[0].kind == Formula::Kind::Equal)
        return "(" + print_formula(f, ctx) + ")";
    return print_formula(f, ctx);
}

} // namespace

std::string print_formula(const Formula &f, const FormulaTemplate &ctx)
{
    const Signature &sig = *ctx.signature();
    switch (f.kind) {
    case Formula::Kind::True:
        return "true";
    case Formula::Kind::False:
        return "false";
    case Formula::Kind::Atom: {
        const auto &decl = sig.relations()[f.symbol];
        if (decl.arity == 2 && is_symbolic(decl.name))
            return print_term(f.terms[0], ctx) + " " + decl.name + " " + print_term(f.terms[1], ctx);
        std::string out = decl.name + "(";
        for (std::size_t i = 0; i < f.terms.size(); ++i) {
            if (i)
                out += ",";
            out += print_term(f.terms[i], ctx);
        }
        return out + ")";
    }
    case Formula::Kind::Equal:
        return print_term(f.terms[0], ctx) + " = " + print_term(f.terms[1], ctx);
    case Formula::Kind::Defined:
        return "def(" + print_term(f.terms[0], ctx) + ")";
    case Formula::Kind::Not: {
        const Formula &c = f.children[0];
        if (c.kind == Formula::Kind::Equal)
            return print_term(c.terms[0], ctx) + " != " + print_term(c.terms[1], ctx);
        return "!" + print_operand(c, ctx);
    }
    case Formula::Kind::And:
    case Formula::Kind::Or: {
        const char *op = f.kind == Formula::Kind::And ? " & " : " | ";
        std::string out;
        for (std::size_t i = 0; i < f.children.size(); ++i) {
            if (i)
                out += op;
            out += print_operand(f.children[i], ctx);
        }
        return out;
    }
    }
    return {};
}

bool is_existential_positive(const Formula &f)
{
    switch (f.kind) {
    case Formula::Kind::Not:
        return false;
    case Formula::Kind::And:
    case Formula::Kind::Or:
        for (const auto &c : f.children)
            if (!is_existential_positive(c))
                return false;
        return true;
    default:
        return true;
    }
}

bool term_mentions_function(const Term &t)
{
    return t.kind == Term::Kind::Apply;
}

bool formula_mentions_function(const Formula &f)
{
    for (const auto &t : f.terms)
        if (term_mentions_function(t))
            return true;
    for (const auto &c : f.children)
        if (formula_mentions_function(c))
            return true;
    return false;
}

} // namespace sopkit
