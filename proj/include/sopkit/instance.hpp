#pragma once

#include "sopkit/structure.hpp"

#include <string>
#include <vector>

namespace sopkit {

/// A template with its parameter block filled in.
///
/// Plain instances are phi(x, params) or its negation; the object block is the
/// template's x. Pair instances encode not-exists x (phi(x, y) & phi(x, params)):
/// their object block is the template's y.
struct FormulaInstance {
    enum class Shape { Plain, NegatedExistentialPair };

    TemplatePtr tmpl;
    ParamTuple params;
    bool negated = false;
    Shape shape = Shape::Plain;

    bool is_pair() const { return shape == Shape::NegatedExistentialPair; }
    int object_arity() const { return is_pair() ? tmpl->param_arity() : tmpl->object_arity(); }

    /// Stable text used in memo keys and reports, with elements renamed by `label`.
    template <typename Label>
    std::string encode(Label &&label) const
    {
        std::string out = is_pair() ? "P:" : (negated ? "N:" : "+:");
        out += tmpl->text();
        out += '[';
        for (std::size_t i = 0; i < params.size(); ++i) {
            if (i)
                out += ',';
            out += std::to_string(label(params[i]));
        }
        out += ']';
        return out;
    }
    std::string encode() const
    {
        return encode([](Element e) { return e; });
    }

    friend bool operator==(const FormulaInstance &a, const FormulaInstance &b)
    {
        return (a.tmpl == b.tmpl || *a.tmpl == *b.tmpl) && a.params == b.params && a.negated == b.negated &&
               a.shape == b.shape;
    }
};

/// A finite set of instances over one object block.
using PartialType = std::vector<FormulaInstance>;

/// phi(x, params), or not phi(x, params) when `positive` is false (the phi^0 of SOP'_1).
FormulaInstance substitute(const TemplatePtr &tmpl, ParamTuple params, bool positive = true);

/// not exists x (phi(x, y) & phi(x, c)), an instance over the y block.
FormulaInstance pair_instance(const TemplatePtr &tmpl, ParamTuple c);

/// Throws unless all instances share one object arity.
int type_object_arity(const PartialType &type, int fallback);

std::vector<Element> mentioned_elements(const PartialType &type);

} // namespace sopkit
