#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sopkit {

struct SymbolDecl {
    std::string name;
    int arity = 0;

    friend bool operator==(const SymbolDecl &, const SymbolDecl &) = default;
};

class SignatureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Relations, partial functions and constants of a first-order language.
/// Equality is built in and never declared.
class Signature {
public:
    Signature() = default;
    Signature(std::vector<SymbolDecl> relations, std::vector<SymbolDecl> functions,
              std::vector<std::string> constants);

    const std::vector<SymbolDecl> &relations() const { return relations_; }
    const std::vector<SymbolDecl> &functions() const { return functions_; }
    const std::vector<std::string> &constants() const { return constants_; }

    std::optional<int> relation(std::string_view name) const;
    std::optional<int> function(std::string_view name) const;
    std::optional<int> constant(std::string_view name) const;

    bool declares(std::string_view name) const;

    friend bool operator==(const Signature &, const Signature &) = default;

    static std::shared_ptr<const Signature> dlo();
    static std::shared_ptr<const Signature> random_graph();
    static std::shared_ptr<const Signature> equivalence();
    /// {Q, P, E, R, F}: P, Q unary, E, R binary, F a partial binary function.
    static std::shared_ptr<const Signature> feq();
    static std::shared_ptr<const Signature> empty();

private:
    std::vector<SymbolDecl> relations_;
    std::vector<SymbolDecl> functions_;
    std::vector<std::string> constants_;
};

using SignaturePtr = std::shared_ptr<const Signature>;

} // namespace sopkit
