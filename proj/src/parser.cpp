#include "sopkit/parser.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>

namespace sopkit {

ParseError::ParseError(Kind kind, std::size_t offset, const std::string &message)
    : std::runtime_error(message + " at offset " + std::to_string(offset)), kind_(kind), offset_(offset)
{
}

namespace {

enum class Tok { Ident, Symbol, LParen, RParen, Comma, Semi, Dot, And, Or, Not, Eq, Neq, End };

struct Token {
    Tok kind;
    std::string text;
    std::size_t offset;
};

bool symbol_char(char c)
{
    switch (c) {
    case '<': case '>': case '=': case '+': case '*': case '-':
    case '/': case '~': case '@': case '#': case '$': case '%': case '^':
        return true;
    default:
        return false;
    }
}

std::vector<Token> lex(std::string_view s)
{
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_'))
                ++i;
            out.push_back({Tok::Ident, std::string(s.substr(start, i - start)), start});
            continue;
        }
        auto single = [&](Tok k) {
            out.push_back({k, std::string(1, c), start});
            ++i;
        };
        switch (c) {
        case '(': single(Tok::LParen); continue;
        case ')': single(Tok::RParen); continue;
        case ',': single(Tok::Comma); continue;
        case ';': single(Tok::Semi); continue;
        case '.': single(Tok::Dot); continue;
        case '&': single(Tok::And); continue;
        case '|': single(Tok::Or); continue;
        case '!':
            if (i + 1 < s.size() && s[i + 1] == '=') {
                out.push_back({Tok::Neq, "!=", start});
                i += 2;
            } else {
                single(Tok::Not);
            }
            continue;
        default:
            break;
        }
        if (symbol_char(c)) {
            while (i < s.size() && symbol_char(s[i]))
                ++i;
            std::string text(s.substr(start, i - start));
            out.push_back({text == "=" ? Tok::Eq : Tok::Symbol, text, start});
            continue;
        }
        throw ParseError(ParseError::Kind::Syntax, start, std::string("unexpected character '") + c + "'");
    }
    out.push_back({Tok::End, "", s.size()});
    return out;
}

bool is_keyword(const std::string &s)
{
    return s == "exists" || s == "vars" || s == "true" || s == "false" || s == "def";
}

/// Orders x2 before x10.
bool natural_less(const std::string &a, const std::string &b)
{
    auto split = [](const std::string &s) {
        std::size_t k = s.size();
        while (k > 0 && std::isdigit(static_cast<unsigned char>(s[k - 1])))
            --k;
        return std::pair<std::string, std::string>(s.substr(0, k), s.substr(k));
    };
    auto [pa, na] = split(a);
    auto [pb, nb] = split(b);
    if (pa != pb)
        return a < b;
    if (na.size() != nb.size())
        return na.size() < nb.size();
    return na < nb;
}

class Parser {
public:
    Parser(std::string_view text, const SignaturePtr &sig) : toks_(lex(text)), sig_(sig) {}

    TemplatePtr run()
    {
        std::vector<std::string> bound;
        if (peek_ident("exists")) {
            next();
            while (peek().kind == Tok::Ident && !is_keyword(peek().text))
                bound.push_back(declare_name(next()));
            if (bound.empty())
                fail(peek(), "expected variable after 'exists'");
            expect(Tok::Dot, "'.'");
        }
        Formula body = disjunction();

        std::optional<std::pair<std::vector<std::string>, std::vector<std::string>>> blocks;
        if (peek().kind == Tok::Semi) {
            next();
            if (!peek_ident("vars"))
                fail(peek(), "expected 'vars'");
            next();
            std::vector<std::string> xs;
            std::vector<std::string> ys;
            while (peek().kind == Tok::Ident)
                xs.push_back(declare_name(next()));
            expect(Tok::Or, "'|'");
            while (peek().kind == Tok::Ident)
                ys.push_back(declare_name(next()));
            blocks.emplace(std::move(xs), std::move(ys));
        }
        if (peek().kind != Tok::End)
            fail(peek(), "unexpected '" + peek().text + "'");

        std::vector<std::string> xs;
        std::vector<std::string> ys;
        if (blocks) {
            xs = blocks->first;
            ys = blocks->second;
        } else {
            for (const auto &[name, where] : first_use_) {
                if (std::find(bound.begin(), bound.end(), name) != bound.end())
                    continue;
                if (name[0] == 'x')
                    xs.push_back(name);
                else if (name[0] == 'y')
                    ys.push_back(name);
                else
                    throw ParseError(ParseError::Kind::UnknownSymbol, where,
                                     "cannot place variable '" + name + "' without a vars clause");
            }
            std::sort(xs.begin(), xs.end(), natural_less);
            std::sort(ys.begin(), ys.end(), natural_less);
        }

        std::map<std::string, int> slot;
        int next_slot = 0;
        for (const auto *block : {&xs, &ys, &bound})
            for (const auto &v : *block)
                slot.emplace(v, next_slot++);
        for (const auto &[name, where] : first_use_)
            if (!slot.count(name))
                throw ParseError(ParseError::Kind::UnknownSymbol, where, "unknown variable '" + name + "'");

        std::vector<int> remap(names_.size());
        for (std::size_t i = 0; i < names_.size(); ++i)
            remap[i] = slot.at(names_[i]);
        body = resolve(body, remap);
        try {
            return std::make_shared<FormulaTemplate>(sig_, std::move(xs), std::move(ys), std::move(bound),
                                                     std::move(body));
        } catch (const FormulaError &e) {
            throw ParseError(ParseError::Kind::Syntax, 0, e.what());
        }
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    SignaturePtr sig_;
    std::vector<std::string> names_;                 // temporary variable ids
    std::map<std::string, std::size_t> first_use_;   // name -> offset

    const Token &peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
    const Token &next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    bool peek_ident(const char *word) const { return peek().kind == Tok::Ident && peek().text == word; }

    [[noreturn]] void fail(const Token &t, const std::string &msg) const
    {
        throw ParseError(ParseError::Kind::Syntax, t.offset, msg);
    }

    void expect(Tok k, const char *what)
    {
        if (peek().kind != k)
            fail(peek(), std::string("expected ") + what);
        next();
    }

    std::string declare_name(const Token &t)
    {
        if (is_keyword(t.text))
            fail(t, "keyword '" + t.text + "' used as a variable");
        if (sig_->declares(t.text))
            throw ParseError(ParseError::Kind::Syntax, t.offset, "symbol '" + t.text + "' used as a variable");
        return t.text;
    }

    int variable_id(const Token &t)
    {
        first_use_.emplace(t.text, t.offset);
        auto it = std::find(names_.begin(), names_.end(), t.text);
        if (it != names_.end())
            return static_cast<int>(it - names_.begin());
        names_.push_back(t.text);
        return static_cast<int>(names_.size() - 1);
    }

    static Term resolve(const Term &t, const std::vector<int> &remap)
    {
        if (t.kind == Term::Kind::Variable)
            return Term::variable(remap[t.index]);
        Term out = t;
        for (auto &a : out.args)
            a = resolve(a, remap);
        return out;
    }

    static Formula resolve(const Formula &f, const std::vector<int> &remap)
    {
        Formula out = f;
        for (auto &t : out.terms)
            t = resolve(t, remap);
        for (auto &c : out.children)
            c = resolve(c, remap);
        return out;
    }

    Formula disjunction()
    {
        std::vector<Formula> parts{conjunction()};
        while (peek().kind == Tok::Or) {
            next();
            parts.push_back(conjunction());
        }
        return parts.size() == 1 ? std::move(parts.front()) : Formula::disjunction(std::move(parts));
    }

    Formula conjunction()
    {
        std::vector<Formula> parts{unary()};
        while (peek().kind == Tok::And) {
            next();
            parts.push_back(unary());
        }
        return parts.size() == 1 ? std::move(parts.front()) : Formula::conjunction(std::move(parts));
    }

    Formula unary()
    {
        if (peek().kind == Tok::Not) {
            next();
            return Formula::negation(unary());
        }
        return primary();
    }

    std::vector<Term> arguments(const Token &head, int arity, const char *what)
    {
        expect(Tok::LParen, "'('");
        std::vector<Term> args{term()};
        while (peek().kind == Tok::Comma) {
            next();
            args.push_back(term());
        }
        expect(Tok::RParen, "')'");
        if (static_cast<int>(args.size()) != arity)
            throw ParseError(ParseError::Kind::Arity, head.offset,
                             std::string(what) + " '" + head.text + "' expects " + std::to_string(arity) +
                                 " arguments, got " + std::to_string(args.size()));
        return args;
    }

    Formula primary()
    {
        const Token &t = peek();
        if (t.kind == Tok::LParen) {
            next();
            Formula f = disjunction();
            expect(Tok::RParen, "')'");
            return f;
        }
        if (t.kind == Tok::Ident) {
            if (t.text == "true") {
                next();
                return Formula::truth();
            }
            if (t.text == "false") {
                next();
                return Formula::falsity();
            }
            if (t.text == "exists")
                fail(t, "'exists' is only allowed once, at the top");
            if (t.text == "def") {
                next();
                expect(Tok::LParen, "'('");
                Term inner = term();
                expect(Tok::RParen, "')'");
                return Formula::defined(std::move(inner));
            }
        }
        if ((t.kind == Tok::Ident || t.kind == Tok::Symbol) && peek(1).kind == Tok::LParen) {
            if (auto r = sig_->relation(t.text)) {
                Token head = next();
                return Formula::atom(*r, arguments(head, sig_->relations()[*r].arity, "relation"));
            }
        }
        Term lhs = term();
        const Token op = peek();
        switch (op.kind) {
        case Tok::Eq:
            next();
            return Formula::equal(std::move(lhs), term());
        case Tok::Neq:
            next();
            return Formula::negation(Formula::equal(std::move(lhs), term()));
        case Tok::Ident:
        case Tok::Symbol: {
            auto r = sig_->relation(op.text);
            if (!r)
                throw ParseError(ParseError::Kind::UnknownSymbol, op.offset, "unknown relation '" + op.text + "'");
            if (sig_->relations()[*r].arity != 2)
                throw ParseError(ParseError::Kind::Arity, op.offset,
                                 "relation '" + op.text + "' is not binary and cannot be infix");
            next();
            Term rhs = term();
            return Formula::atom(*r, {std::move(lhs), std::move(rhs)});
        }
        default:
            fail(op, "expected a relation after term");
        }
    }

    Term term()
    {
        const Token &t = peek();
        if (t.kind != Tok::Ident && t.kind != Tok::Symbol)
            fail(t, "expected term");
        if (auto f = sig_->function(t.text)) {
            Token head = next();
            if (peek().kind != Tok::LParen)
                throw ParseError(ParseError::Kind::Arity, head.offset,
                                 "function '" + head.text + "' needs arguments");
            return Term::apply(*f, arguments(head, sig_->functions()[*f].arity, "function"));
        }
        if (t.kind == Tok::Symbol)
            throw ParseError(ParseError::Kind::UnknownSymbol, t.offset, "unknown symbol '" + t.text + "'");
        if (auto c = sig_->constant(t.text)) {
            next();
            return Term::constant(*c);
        }
        if (sig_->relation(t.text))
            throw ParseError(ParseError::Kind::Syntax, t.offset, "relation '" + t.text + "' used as a term");
        if (is_keyword(t.text))
            fail(t, "unexpected keyword '" + t.text + "'");
        if (peek(1).kind == Tok::LParen)
            throw ParseError(ParseError::Kind::UnknownSymbol, t.offset, "unknown symbol '" + t.text + "'");
        const Token v = next();
        return Term::variable(variable_id(v));
    }
};

} // namespace

TemplatePtr parse_formula(std::string_view text, const SignaturePtr &sig)
{
    if (!sig)
        throw ParseError(ParseError::Kind::Syntax, 0, "no signature");
    return Parser(text, sig).run();
}

} // namespace sopkit
