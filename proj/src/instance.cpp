#include "sopkit/instance.hpp"

#include <algorithm>

namespace sopkit {

FormulaInstance substitute(const TemplatePtr &tmpl, ParamTuple params, bool positive)
{
    if (!tmpl)
        throw FormulaError("substitute: no template");
    if (static_cast<int>(params.size()) != tmpl->param_arity())
        throw FormulaError("substitute: " + std::to_string(params.size()) + " parameters for a template with " +
                           std::to_string(tmpl->param_arity()));
    return FormulaInstance{tmpl, std::move(params), !positive, FormulaInstance::Shape::Plain};
}

FormulaInstance pair_instance(const TemplatePtr &tmpl, ParamTuple c)
{
    if (!tmpl)
        throw FormulaError("pair_instance: no template");
    if (static_cast<int>(c.size()) != tmpl->param_arity())
        throw FormulaError("pair_instance: " + std::to_string(c.size()) + " parameters for a template with " +
                           std::to_string(tmpl->param_arity()));
    return FormulaInstance{tmpl, std::move(c), true, FormulaInstance::Shape::NegatedExistentialPair};
}

int type_object_arity(const PartialType &type, int fallback)
{
    if (type.empty())
        return fallback;
    const int n = type.front().object_arity();
    for (const auto &inst : type)
        if (inst.object_arity() != n)
            throw FormulaError("partial type mixes object blocks of different lengths");
    return n;
}

std::vector<Element> mentioned_elements(const PartialType &type)
{
    std::vector<Element> out;
    for (const auto &inst : type)
        for (Element e : inst.params)
            if (std::find(out.begin(), out.end(), e) == out.end())
                out.push_back(e);
    return out;
}

} // namespace sopkit
