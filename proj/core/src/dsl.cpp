#include "qtheta/dsl.hpp"

#include <cctype>
#include <limits>
#include <sstream>

namespace qtheta {

namespace {

enum class Tok { integer, q, func, plus, minus, star, caret, lparen, rparen, end };

const char* tok_name(Tok t) {
    switch (t) {
        case Tok::integer: return "integer";
        case Tok::q: return "'q'";
        case Tok::func: return "'phi' or 'psi'";
        case Tok::plus: return "'+'";
        case Tok::minus: return "'-'";
        case Tok::star: return "'*'";
        case Tok::caret: return "'^'";
        case Tok::lparen: return "'('";
        case Tok::rparen: return "')'";
        case Tok::end: return "end of input";
    }
    return "?";
}

struct Token {
    Tok kind = Tok::end;
    std::int64_t value = 0;       // integer
    ThetaFunc func = ThetaFunc::phi;
    int line = 1, column = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) { advance(); }

    const Token& peek() const { return current_; }

    Token take() {
        Token t = current_;
        advance();
        return t;
    }

    [[noreturn]] void fail(const Token& at, const std::string& expected) const {
        throw ParseError("syntax error: expected " + expected + ", found " +
                             tok_name(at.kind),
                         at.line, at.column, expected);
    }

private:
    void advance() {
        skip_blank();
        current_.line = line_;
        current_.column = column_;
        if (pos_ >= text_.size()) {
            current_.kind = Tok::end;
            return;
        }
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::int64_t v = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                const int d = text_[pos_] - '0';
                if (v > (std::numeric_limits<std::int64_t>::max() - d) / 10)
                    throw ParseError("integer literal too large", line_, column_, "smaller integer");
                v = v * 10 + d;
                bump();
            }
            current_.kind = Tok::integer;
            current_.value = v;
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::string word;
            while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) {
                word.push_back(text_[pos_]);
                bump();
            }
            if (word == "q") {
                current_.kind = Tok::q;
            } else if (word == "phi" || word == "psi") {
                current_.kind = Tok::func;
                current_.func = word == "phi" ? ThetaFunc::phi : ThetaFunc::psi;
            } else {
                throw ParseError("unknown name '" + word + "'", current_.line, current_.column,
                                 "'q', 'phi' or 'psi'");
            }
            return;
        }
        switch (c) {
            case '+': current_.kind = Tok::plus; break;
            case '-': current_.kind = Tok::minus; break;
            case '*': current_.kind = Tok::star; break;
            case '^': current_.kind = Tok::caret; break;
            case '(': current_.kind = Tok::lparen; break;
            case ')': current_.kind = Tok::rparen; break;
            default:
                throw ParseError(std::string("unexpected character '") + c + "'", line_, column_,
                                 "expression token");
        }
        bump();
    }

    void skip_blank() {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') bump();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                bump();
            } else {
                break;
            }
        }
    }

    void bump() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1, column_ = 1;
    Token current_;
};

class Parser {
public:
    explicit Parser(std::string_view text) : lex_(text) {}

    ThetaExpr parse() {
        ThetaExpr e;
        bool negate = false;
        if (lex_.peek().kind == Tok::minus) {
            lex_.take();
            negate = true;
        }
        e.terms.push_back(parse_term(negate));
        while (lex_.peek().kind == Tok::plus || lex_.peek().kind == Tok::minus) {
            const bool minus = lex_.take().kind == Tok::minus;
            e.terms.push_back(parse_term(minus));
        }
        if (lex_.peek().kind != Tok::end) lex_.fail(lex_.peek(), "'+', '-', '*' or end of input");
        return e;
    }

private:
    Term parse_term(bool negate) {
        Term t;
        if (negate) t.coefficient = -1;
        parse_atom(t);
        for (;;) {
            if (lex_.peek().kind == Tok::star) {
                lex_.take();
                parse_atom(t);
                continue;
            }
            // Juxtaposed coefficient, as in "2q^4".
            if (last_was_int_ && (lex_.peek().kind == Tok::q || lex_.peek().kind == Tok::func)) {
                parse_atom(t);
                continue;
            }
            break;
        }
        return t;
    }

    void parse_atom(Term& t) {
        const Token tok = lex_.peek();
        last_was_int_ = false;
        switch (tok.kind) {
            case Tok::integer: {
                lex_.take();
                if (tok.value == 0)
                    throw ParseError("zero coefficient is not a valid term", tok.line, tok.column,
                                     "nonzero integer");
                std::int64_t c;
                if (__builtin_mul_overflow(t.coefficient, tok.value, &c))
                    throw ParseError("term coefficient overflows", tok.line, tok.column,
                                     "smaller coefficient");
                t.coefficient = c;
                last_was_int_ = true;
                return;
            }
            case Tok::q: {
                lex_.take();
                const std::int64_t e = parse_opt_exponent(/*allow_zero=*/true, 1);
                if (__builtin_add_overflow(t.qexponent, e, &t.qexponent))
                    throw ParseError("monomial exponent overflows", tok.line, tok.column,
                                     "smaller exponent");
                return;
            }
            case Tok::func: {
                lex_.take();
                Factor f;
                f.func = tok.func;
                expect(Tok::lparen);
                expect(Tok::q);
                f.arg = parse_opt_exponent(/*allow_zero=*/false, 1);
                expect(Tok::rparen);
                f.power = parse_opt_exponent(/*allow_zero=*/false, 1);
                t.factors.push_back(f);
                return;
            }
            default:
                lex_.fail(tok, "integer, 'q', 'phi' or 'psi'");
        }
    }

    // Consumes "^ INT" if present, else returns `dflt`.
    std::int64_t parse_opt_exponent(bool allow_zero, std::int64_t dflt) {
        if (lex_.peek().kind != Tok::caret) return dflt;
        lex_.take();
        const Token tok = lex_.peek();
        if (tok.kind != Tok::integer) lex_.fail(tok, "integer exponent");
        lex_.take();
        if (!allow_zero && tok.value == 0)
            throw ParseError("exponent must be positive here", tok.line, tok.column,
                             "positive integer");
        return tok.value;
    }

    void expect(Tok k) {
        if (lex_.peek().kind != k) lex_.fail(lex_.peek(), tok_name(k));
        lex_.take();
    }

    Lexer lex_;
    bool last_was_int_ = false;
};

void print_term_body(std::ostream& os, const Term& t) {
    bool first = true;
    const std::int64_t mag = t.coefficient < 0 ? -t.coefficient : t.coefficient;
    const bool bare = t.qexponent == 0 && t.factors.empty();
    if (mag != 1 || bare) {
        os << mag;
        first = false;
    }
    if (t.qexponent > 0) {
        if (!first) os << "*";
        os << "q";
        if (t.qexponent > 1) os << "^" << t.qexponent;
        first = false;
    }
    for (const auto& f : t.factors) {
        if (!first) os << "*";
        os << (f.func == ThetaFunc::phi ? "phi(q" : "psi(q");
        if (f.arg > 1) os << "^" << f.arg;
        os << ")";
        if (f.power > 1) os << "^" << f.power;
        first = false;
    }
}

} // namespace

ParseError::ParseError(std::string message, int line, int column, std::string expected)
    : std::runtime_error(message + " at line " + std::to_string(line) + ", column " +
                         std::to_string(column)),
      line_(line),
      column_(column),
      expected_(std::move(expected)) {}

ThetaExpr parse_expr(std::string_view text) { return Parser(text).parse(); }

std::string to_string(const Term& t) {
    std::ostringstream os;
    if (t.coefficient < 0) os << "-";
    print_term_body(os, t);
    return os.str();
}

std::string to_string(const ThetaExpr& e) {
    std::ostringstream os;
    for (std::size_t i = 0; i < e.terms.size(); ++i) {
        const Term& t = e.terms[i];
        if (i == 0) {
            if (t.coefficient < 0) os << "-";
        } else {
            os << (t.coefficient < 0 ? " - " : " + ");
        }
        print_term_body(os, t);
    }
    return os.str();
}

std::shared_ptr<const Series> LeafCache::get(ThetaFunc f, std::int64_t arg, std::int64_t order) {
    const auto key = std::make_tuple(static_cast<int>(f), arg, order);
    {
        std::scoped_lock lock(mu_);
        if (auto it = map_.find(key); it != map_.end()) return it->second;
    }
    auto built = std::make_shared<const Series>(f == ThetaFunc::phi ? theta_phi(order, arg)
                                                                    : theta_psi(order, arg));
    std::scoped_lock lock(mu_);
    auto [it, inserted] = map_.emplace(key, std::move(built));
    return it->second;
}

namespace {

// base^power truncated to the base's window, by repeated squaring. The
// coefficients are exact integers, so any multiplication order yields
// the same result as the naive product chain.
Series pow_truncated(const Series& base, std::int64_t power) {
    Series::Small one(static_cast<std::size_t>(base.precision()), 0);
    one[0] = 1;
    Series result{std::move(one)};
    Series square = base;
    for (std::int64_t bits = power; bits > 0; bits >>= 1) {
        if (bits & 1) result = mul(result, square);
        if (bits > 1) square = mul(square, square);
    }
    return result;
}

} // namespace

Series eval(const ThetaExpr& e, std::int64_t order, LeafCache* cache) {
    if (order < 1) throw SeriesError("evaluation order must be positive");
    if (e.terms.empty()) throw SeriesError("cannot evaluate an empty sum");
    LeafCache local;
    LeafCache& leaves = cache ? *cache : local;

    Series acc = Series::zero(order);
    for (const Term& t : e.terms) {
        Series term = Series::zero(order);
        if (t.qexponent < order) {
            // Seed with coefficient * q^exponent, then fold in the factors.
            Series::Small seed(static_cast<std::size_t>(order), 0);
            seed[static_cast<std::size_t>(t.qexponent)] = t.coefficient;
            term = Series(std::move(seed));
            for (const Factor& f : t.factors) {
                const auto leaf = leaves.get(f.func, f.arg, order);
                term = mul(term, pow_truncated(*leaf, f.power));
            }
        }
        acc = add(acc, term);
    }
    return acc;
}

} // namespace qtheta
