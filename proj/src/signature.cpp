#include "sopkit/signature.hpp"

#include <algorithm>
#include <set>

namespace sopkit {

Signature::Signature(std::vector<SymbolDecl> relations, std::vector<SymbolDecl> functions,
                     std::vector<std::string> constants)
    : relations_(std::move(relations)), functions_(std::move(functions)),
      constants_(std::move(constants))
{
    std::set<std::string> seen;
    auto claim = [&](const std::string &name) {
        if (name.empty())
            throw SignatureError("empty symbol name");
        if (!seen.insert(name).second)
            throw SignatureError("duplicate symbol '" + name + "'");
    };
    for (const auto &r : relations_) {
        claim(r.name);
        if (r.arity < 1)
            throw SignatureError("relation '" + r.name + "' must have arity >= 1");
    }
    for (const auto &f : functions_) {
        claim(f.name);
        if (f.arity < 1)
            throw SignatureError("function '" + f.name + "' must have arity >= 1");
    }
    for (const auto &c : constants_)
        claim(c);
}

namespace {
template <typename Seq, typename Key>
std::optional<int> index_of(const Seq &seq, std::string_view name, Key key)
{
    for (std::size_t i = 0; i < seq.size(); ++i)
        if (key(seq[i]) == name)
            return static_cast<int>(i);
    return std::nullopt;
}
} // namespace

std::optional<int> Signature::relation(std::string_view name) const
{
    return index_of(relations_, name, [](const SymbolDecl &d) -> const std::string & { return d.name; });
}

std::optional<int> Signature::function(std::string_view name) const
{
    return index_of(functions_, name, [](const SymbolDecl &d) -> const std::string & { return d.name; });
}

std::optional<int> Signature::constant(std::string_view name) const
{
    return index_of(constants_, name, [](const std::string &s) -> const std::string & { return s; });
}

bool Signature::declares(std::string_view name) const
{
    return relation(name) || function(name) || constant(name);
}

SignaturePtr Signature::dlo()
{
    static const auto sig = std::make_shared<const Signature>(std::vector<SymbolDecl>{{"<", 2}},
                                                              std::vector<SymbolDecl>{},
                                                              std::vector<std::string>{});
    return sig;
}

SignaturePtr Signature::random_graph()
{
    static const auto sig = std::make_shared<const Signature>(std::vector<SymbolDecl>{{"R", 2}},
                                                              std::vector<SymbolDecl>{},
                                                              std::vector<std::string>{});
    return sig;
}

SignaturePtr Signature::equivalence()
{
    static const auto sig = std::make_shared<const Signature>(std::vector<SymbolDecl>{{"E", 2}},
                                                              std::vector<SymbolDecl>{},
                                                              std::vector<std::string>{});
    return sig;
}

SignaturePtr Signature::feq()
{
    static const auto sig = std::make_shared<const Signature>(
        std::vector<SymbolDecl>{{"Q", 1}, {"P", 1}, {"E", 2}, {"R", 2}},
        std::vector<SymbolDecl>{{"F", 2}}, std::vector<std::string>{});
    return sig;
}

SignaturePtr Signature::empty()
{
    static const auto sig = std::make_shared<const Signature>();
    return sig;
}

} // namespace sopkit
