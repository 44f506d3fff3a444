#pragma once

#include "qtheta/series.hpp"

#include <cstdint>
#include <string>

namespace qtheta {

/// Which representation count a sequence describes:
///   N: representations by a*x^2 + b*y^2 + c*z^2 over Z^3,
///   t: representations by a*x(x+1)/2 + b*y(y+1)/2 + c*z(z+1)/2 over Z^3,
///   T: the same over N^3 (t = 8*T pointwise).
enum class Kind { N, t, T };

const char* kind_name(Kind k);
Kind kind_from_name(const std::string& s);

struct FormTriple {
    std::int64_t a = 1, b = 1, c = 1;
    bool operator==(const FormTriple&) const = default;
};

struct SeqSpec {
    Kind kind = Kind::N;
    FormTriple form;
    bool operator==(const SeqSpec&) const = default;
};

std::string seq_label(const SeqSpec& s); // e.g. "t(2,3,3)"

/// phi(q^k) = 1 + 2*sum_{j>=1} q^(k*j^2), truncated to `order` coefficients.
Series theta_phi(std::int64_t order, std::int64_t k = 1);

/// psi(q^k) = sum_{j>=0} q^(k*j(j+1)/2), truncated to `order` coefficients.
Series theta_psi(std::int64_t order, std::int64_t k = 1);

/// Generating function of the sequence: phi-product for N, 8*psi-product
/// for t, psi-product for T; truncated to `order`.
Series gf(const SeqSpec& spec, std::int64_t order);

/// Exact count by direct enumeration; independent of the series engine.
/// Loops run over the two largest form coefficients, the third variable is
/// resolved by a perfect-square / triangular-number membership test.
std::int64_t oracle_count(const SeqSpec& spec, std::int64_t n);

struct FormConstant {
    FormTriple form;
    std::int64_t value = 0;
};

/// C(a,b,c) = i1(i1-1)(i1-2)(i1-3)/4 + i1(i1-1)i2/2 + i1*i3, where i_j is
/// the number of entries of {a,b,c} equal to j.
FormConstant form_constant(const FormTriple& form);

// Small exact helpers shared with the oracle and tests.
std::int64_t isqrt64(std::int64_t n);
bool is_perfect_square(std::int64_t n);
bool is_triangular(std::int64_t n);

} // namespace qtheta
