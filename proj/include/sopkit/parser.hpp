#pragma once

#include "sopkit/formula.hpp"

#include <cstddef>
#include <string_view>

namespace sopkit {

class ParseError : public std::runtime_error {
public:
    enum class Kind { Syntax, UnknownSymbol, Arity };

    ParseError(Kind kind, std::size_t offset, const std::string &message);

    Kind kind() const { return kind_; }
    std::size_t offset() const { return offset_; }

private:
    Kind kind_;
    std::size_t offset_;
};

/// Parses the concrete grammar documented in docs/grammar.md.
///
/// Without a "; vars" clause, free variables whose names start with 'x' form
/// the object block and those starting with 'y' the parameter block, each
/// ordered by name (numeric suffixes compare numerically).
TemplatePtr parse_formula(std::string_view text, const SignaturePtr &sig);

} // namespace sopkit
