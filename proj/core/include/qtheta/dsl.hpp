#pragma once

#include "qtheta/series.hpp"
#include "qtheta/theta.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace qtheta {

// Expression language for theta identities:
//
//   expr := term (('+'|'-') term)* ;
//   term := atom ('*' atom)* ;
//   atom := INT | qpow | call ;
//   qpow := 'q' ('^' INT)? ;
//   call := ('phi'|'psi') '(' 'q' ('^' INT)? ')' ('^' INT)? ;
//
// Whitespace is ignored and '#' starts a comment to end of line. An INT
// atom may be juxtaposed directly against the following atom ("2q^4"),
// and a leading '-' negates the first term; the printer always emits the
// explicit-star canonical form.

enum class ThetaFunc { phi, psi };

struct Factor {
    ThetaFunc func = ThetaFunc::phi;
    std::int64_t arg = 1;   // phi(q^arg)
    std::int64_t power = 1; // ... ^power
    bool operator==(const Factor&) const = default;
};

struct Term {
    std::int64_t coefficient = 1; // nonzero
    std::int64_t qexponent = 0;
    std::vector<Factor> factors;
    bool operator==(const Term&) const = default;
};

/// Normal form: a single sum of monomial terms, no nested sums.
struct ThetaExpr {
    std::vector<Term> terms;
    bool operator==(const ThetaExpr&) const = default;
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::string message, int line, int column, std::string expected);
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }
    const std::string& expected() const noexcept { return expected_; }

private:
    int line_;
    int column_;
    std::string expected_;
};

ThetaExpr parse_expr(std::string_view text);
std::string to_string(const ThetaExpr& e);
std::string to_string(const Term& t);

/// Shared memo of built theta leaves keyed by (func, arg, order).
/// Filling is idempotent, so concurrent use needs no coordination beyond
/// the internal lock.
class LeafCache {
public:
    std::shared_ptr<const Series> get(ThetaFunc f, std::int64_t arg, std::int64_t order);

private:
    std::mutex mu_;
    std::map<std::tuple<int, std::int64_t, std::int64_t>, std::shared_ptr<const Series>> map_;
};

/// Build the expression's series with exactly `order` coefficients.
Series eval(const ThetaExpr& e, std::int64_t order, LeafCache* cache = nullptr);

} // namespace qtheta
