#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

namespace qtheta {

using BigInt = boost::multiprecision::cpp_int;

class SeriesError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Truncated formal power series in q.
///
/// A Series carries exact integer coefficients for every exponent
/// 0 <= k < precision() and says nothing about exponents beyond the
/// window. Coefficients are stored as int64 while they fit; any
/// operation that would overflow promotes the whole series to
/// arbitrary-precision integers, so results are always exact.
///
/// Values are immutable after construction and safe to share across
/// threads.
class Series {
public:
    using Small = std::vector<std::int64_t>;
    using Wide  = std::vector<BigInt>;

    explicit Series(Small coeffs);
    explicit Series(Wide coeffs);

    static Series zero(std::int64_t precision);

    std::int64_t precision() const noexcept;

    /// Coefficient of q^n. Reading outside the known window is an error,
    /// never a silent zero.
    BigInt coefficient(std::int64_t n) const;

    /// True once the series left the int64 fast path.
    bool wide() const noexcept { return std::holds_alternative<Wide>(coeffs_); }

    const Small& small_coeffs() const { return std::get<Small>(coeffs_); }
    const Wide&  wide_coeffs()  const { return std::get<Wide>(coeffs_); }

private:
    std::variant<Small, Wide> coeffs_;
};

/// Validating constructor: `coeffs` must have exactly `precision` entries.
Series make_series(std::vector<std::int64_t> coeffs, std::int64_t precision);

/// Coefficient-wise sum / difference; precision = min of the operands'.
Series add(const Series& a, const Series& b);
Series subtract(const Series& a, const Series& b);
Series negate(const Series& a);

/// Truncated convolution; precision = min of the operands'. Exact:
/// overflow is detected and the computation promoted, never wrapped.
Series mul(const Series& a, const Series& b);

/// c * q^shift * a; precision grows to precision(a) + shift since the
/// low coefficients are exactly zero.
Series monomial_scale(const Series& a, std::int64_t c, std::int64_t shift);

/// Replace q by q^k (k >= 1); precision becomes k*(P-1)+1.
Series substitute_power(const Series& a, std::int64_t k);

/// Keep exponents congruent to r (mod m) and reindex: the result's
/// coefficient at n is a's coefficient at m*n + r. Precision becomes
/// ceil((P - r) / m), which must stay positive.
Series extract_progression(const Series& a, std::int64_t m, std::int64_t r);

struct CoefficientMismatch {
    std::int64_t exponent;
    BigInt lhs;
    BigInt rhs;
};

/// Compare coefficients for all exponents < order (order must not exceed
/// either precision). Returns the smallest mismatching exponent, or
/// nullopt when the series agree on the whole window.
std::optional<CoefficientMismatch> first_mismatch(const Series& a, const Series& b,
                                                  std::int64_t order);

bool equal_to_order(const Series& a, const Series& b, std::int64_t order);

} // namespace qtheta
