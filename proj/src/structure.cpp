#include "sopkit/structure.hpp"

#include <algorithm>

namespace sopkit {

FiniteStructure::FiniteStructure(SignaturePtr sig)
    : sig_(std::move(sig)), relations_(sig_->relations().size()), functions_(sig_->functions().size()),
      constants_(sig_->constants().size())
{
}

bool FiniteStructure::contains(Element e) const
{
    return std::binary_search(universe_.begin(), universe_.end(), e);
}

void FiniteStructure::add_element(Element e)
{
    auto it = std::lower_bound(universe_.begin(), universe_.end(), e);
    if (it == universe_.end() || *it != e)
        universe_.insert(it, e);
}

void FiniteStructure::add_fact(int relation, ParamTuple tuple)
{
    const auto &decl = sig_->relations().at(relation);
    if (static_cast<int>(tuple.size()) != decl.arity)
        throw StructureError("relation '" + decl.name + "' has arity " + std::to_string(decl.arity));
    for (Element e : tuple)
        if (!contains(e))
            throw StructureError("fact for '" + decl.name + "' mentions element " + std::to_string(e) +
                                 " outside the universe");
    relations_[relation].insert(std::move(tuple));
}

void FiniteStructure::remove_fact(int relation, std::span<const Element> tuple)
{
    auto &table = relations_.at(relation);
    auto it = table.find(tuple);
    if (it != table.end())
        table.erase(it);
}

bool FiniteStructure::holds(int relation, std::span<const Element> tuple) const
{
    const auto &table = relations_[relation];
    return table.find(tuple) != table.end();
}

void FiniteStructure::set_value(int function, ParamTuple args, Element value)
{
    const auto &decl = sig_->functions().at(function);
    if (static_cast<int>(args.size()) != decl.arity)
        throw StructureError("function '" + decl.name + "' has arity " + std::to_string(decl.arity));
    for (Element e : args)
        if (!contains(e))
            throw StructureError("function '" + decl.name + "' argument outside the universe");
    if (!contains(value))
        throw StructureError("function '" + decl.name + "' value outside the universe");
    auto &table = functions_[function];
    auto it = table.find(std::span<const Element>(args));
    if (it != table.end() && it->second != value)
        throw StructureError("function '" + decl.name + "' given two values at one point");
    table.emplace(std::move(args), value);
}

std::optional<Element> FiniteStructure::apply(int function, std::span<const Element> args) const
{
    const auto &table = functions_[function];
    auto it = table.find(args);
    if (it == table.end())
        return std::nullopt;
    return it->second;
}

void FiniteStructure::set_constant(int c, Element e)
{
    if (!contains(e))
        throw StructureError("constant outside the universe");
    constants_.at(c) = e;
}

FiniteStructure FiniteStructure::restrict_to(const std::set<Element> &keep) const
{
    FiniteStructure out(sig_);
    for (Element e : universe_)
        if (keep.count(e))
            out.universe_.push_back(e);
    auto inside = [&](std::span<const Element> t) {
        return std::all_of(t.begin(), t.end(), [&](Element e) { return keep.count(e) > 0; });
    };
    for (std::size_t r = 0; r < relations_.size(); ++r)
        for (const auto &t : relations_[r])
            if (inside(t))
                out.relations_[r].insert(t);
    for (std::size_t f = 0; f < functions_.size(); ++f)
        for (const auto &[args, v] : functions_[f])
            if (inside(args) && keep.count(v))
                out.functions_[f].emplace(args, v);
    for (std::size_t c = 0; c < constants_.size(); ++c)
        if (constants_[c] && keep.count(*constants_[c]))
            out.constants_[c] = constants_[c];
    return out;
}

FiniteStructure FiniteStructure::renamed(const std::map<Element, Element> &rename) const
{
    auto map = [&](Element e) {
        auto it = rename.find(e);
        return it == rename.end() ? e : it->second;
    };
    auto map_tuple = [&](const ParamTuple &t) {
        ParamTuple out(t.size());
        std::transform(t.begin(), t.end(), out.begin(), map);
        return out;
    };
    FiniteStructure out(sig_);
    for (Element e : universe_)
        out.universe_.push_back(map(e));
    std::sort(out.universe_.begin(), out.universe_.end());
    if (std::adjacent_find(out.universe_.begin(), out.universe_.end()) != out.universe_.end())
        throw StructureError("renaming is not injective");
    for (std::size_t r = 0; r < relations_.size(); ++r)
        for (const auto &t : relations_[r])
            out.relations_[r].insert(map_tuple(t));
    for (std::size_t f = 0; f < functions_.size(); ++f)
        for (const auto &[args, v] : functions_[f])
            out.functions_[f].emplace(map_tuple(args), map(v));
    for (std::size_t c = 0; c < constants_.size(); ++c)
        if (constants_[c])
            out.constants_[c] = map(*constants_[c]);
    return out;
}

bool operator==(const FiniteStructure &a, const FiniteStructure &b)
{
    return *a.sig_ == *b.sig_ && a.universe_ == b.universe_ && a.relations_ == b.relations_ &&
           a.functions_ == b.functions_ && a.constants_ == b.constants_;
}

nlohmann::json FiniteStructure::to_json() const
{
    nlohmann::json j;
    j["universe"] = universe_;
    j["relations"] = nlohmann::json::object();
    for (std::size_t r = 0; r < relations_.size(); ++r) {
        auto rows = nlohmann::json::array();
        for (const auto &t : relations_[r])
            rows.push_back(t);
        j["relations"][sig_->relations()[r].name] = rows;
    }
    if (!functions_.empty()) {
        j["functions"] = nlohmann::json::object();
        for (std::size_t f = 0; f < functions_.size(); ++f) {
            auto rows = nlohmann::json::array();
            for (const auto &[args, v] : functions_[f]) {
                auto row = nlohmann::json(args);
                row.push_back(v);
                rows.push_back(row);
            }
            j["functions"][sig_->functions()[f].name] = rows;
        }
    }
    if (!constants_.empty()) {
        j["constants"] = nlohmann::json::object();
        for (std::size_t c = 0; c < constants_.size(); ++c)
            if (constants_[c])
                j["constants"][sig_->constants()[c]] = *constants_[c];
    }
    return j;
}

FiniteStructure FiniteStructure::from_json(const nlohmann::json &j, SignaturePtr sig)
{
    if (!j.is_object() || !j.contains("universe") || !j["universe"].is_array())
        throw StructureError("structure JSON needs a \"universe\" array");
    FiniteStructure out(sig);
    for (const auto &e : j["universe"]) {
        if (!e.is_number_integer())
            throw StructureError("universe entries must be integers");
        out.add_element(e.get<Element>());
    }
    if (j.contains("relations")) {
        for (const auto &[name, rows] : j["relations"].items()) {
            auto r = sig->relation(name);
            if (!r)
                throw StructureError("unknown relation '" + name + "'");
            for (const auto &row : rows)
                out.add_fact(*r, row.get<ParamTuple>());
        }
    }
    if (j.contains("functions")) {
        for (const auto &[name, rows] : j["functions"].items()) {
            auto f = sig->function(name);
            if (!f)
                throw StructureError("unknown function '" + name + "'");
            for (const auto &row : rows) {
                auto vals = row.get<ParamTuple>();
                if (vals.empty())
                    throw StructureError("empty row for function '" + name + "'");
                Element v = vals.back();
                vals.pop_back();
                out.set_value(*f, std::move(vals), v);
            }
        }
    }
    if (j.contains("constants")) {
        for (const auto &[name, v] : j["constants"].items()) {
            auto c = sig->constant(name);
            if (!c)
                throw StructureError("unknown constant '" + name + "'");
            out.set_constant(*c, v.get<Element>());
        }
    }
    return out;
}

std::optional<Element> evaluate_term(const FiniteStructure &M, const Term &t, std::span<const Element> slots)
{
    switch (t.kind) {
    case Term::Kind::Variable:
        return slots[t.index];
    case Term::Kind::Constant:
        return M.constant(t.index);
    case Term::Kind::Apply: {
        Element args[8];
        std::vector<Element> big;
        std::span<Element> buf;
        if (t.args.size() <= 8) {
            buf = std::span<Element>(args, t.args.size());
        } else {
            big.resize(t.args.size());
            buf = big;
        }
        for (std::size_t i = 0; i < t.args.size(); ++i) {
            auto v = evaluate_term(M, t.args[i], slots);
            if (!v)
                return std::nullopt;
            buf[i] = *v;
        }
        return M.apply(t.index, buf);
    }
    }
    return std::nullopt;
}

bool evaluate_matrix(const FiniteStructure &M, const Formula &f, std::span<const Element> slots)
{
    switch (f.kind) {
    case Formula::Kind::True:
        return true;
    case Formula::Kind::False:
        return false;
    case Formula::Kind::Atom: {
        Element args[8];
        std::vector<Element> big;
        std::span<Element> buf;
        if (f.terms.size() <= 8) {
            buf = std::span<Element>(args, f.terms.size());
        } else {
            big.resize(f.terms.size());
            buf = big;
        }
        for (std::size_t i = 0; i < f.terms.size(); ++i) {
            auto v = evaluate_term(M, f.terms[i], slots);
            if (!v)
                return false; // defined-and-true semantics
            buf[i] = *v;
        }
        return M.holds(f.symbol, buf);
    }
    case Formula::Kind::Equal: {
        auto a = evaluate_term(M, f.terms[0], slots);
        if (!a)
            return false;
        auto b = evaluate_term(M, f.terms[1], slots);
        return b && *a == *b;
    }
    case Formula::Kind::Defined:
        return evaluate_term(M, f.terms[0], slots).has_value();
    case Formula::Kind::Not:
        return !evaluate_matrix(M, f.children[0], slots);
    case Formula::Kind::And:
        for (const auto &c : f.children)
            if (!evaluate_matrix(M, c, slots))
                return false;
        return true;
    case Formula::Kind::Or:
        for (const auto &c : f.children)
            if (evaluate_matrix(M, c, slots))
                return true;
        return false;
    }
    return false;
}

bool evaluate(const FiniteStructure &M, const FormulaTemplate &f, std::span<const Element> assignment)
{
    const int free = f.object_arity() + f.param_arity();
    if (static_cast<int>(assignment.size()) != free)
        throw StructureError("assignment has " + std::to_string(assignment.size()) + " elements, template needs " +
                             std::to_string(free));
    for (Element e : assignment)
        if (!M.contains(e))
            throw StructureError("assignment element " + std::to_string(e) + " is outside the universe");
    std::vector<Element> slots(assignment.begin(), assignment.end());
    slots.resize(f.slot_count());
    if (!f.has_exists())
        return evaluate_matrix(M, f.matrix(), slots);
    const auto &U = M.universe();
    if (U.empty())
        return false;
    std::vector<std::size_t> idx(f.bound_count(), 0);
    while (true) {
        for (int b = 0; b < f.bound_count(); ++b)
            slots[free + b] = U[idx[b]];
        if (evaluate_matrix(M, f.matrix(), slots))
            return true;
        int b = 0;
        while (b < f.bound_count() && ++idx[b] == U.size())
            idx[b++] = 0;
        if (b == f.bound_count())
            return false;
    }
}

} // namespace sopkit
