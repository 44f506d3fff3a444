#include "qtheta/series.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <string>

namespace qtheta {

namespace {

using u128 = unsigned __int128;

constexpr std::int64_t kMaxI64 = std::numeric_limits<std::int64_t>::max();

std::int64_t checked_precision(std::size_t n) {
    if (n == 0) throw SeriesError("series needs at least one coefficient");
    return static_cast<std::int64_t>(n);
}

Series::Wide widen(const Series::Small& v) {
    Series::Wide w;
    w.reserve(v.size());
    for (auto x : v) w.emplace_back(x);
    return w;
}

Series::Wide as_wide(const Series& s) {
    if (s.wide()) return s.wide_coeffs();
    return widen(s.small_coeffs());
}

std::int64_t count_nonzero(const Series::Small& v, std::int64_t window) {
    std::int64_t n = 0;
    for (std::int64_t i = 0; i < window; ++i)
        if (v[static_cast<std::size_t>(i)] != 0) ++n;
    return n;
}

std::int64_t max_abs(const Series::Small& v, std::int64_t window) {
    std::int64_t m = 0;
    for (std::int64_t i = 0; i < window; ++i) {
        std::int64_t x = v[static_cast<std::size_t>(i)];
        if (x == std::numeric_limits<std::int64_t>::min()) return kMaxI64;
        x = std::llabs(x);
        if (x > m) m = x;
    }
    return m;
}

// Convolution over int64 with a proven a-priori bound: skipped when the
// bound cannot be established (caller falls back to the checked path).
bool conv_small_unchecked(const Series::Small& a, const Series::Small& b,
                          std::int64_t p, Series::Small& out) {
    const std::int64_t ma = max_abs(a, p), mb = max_abs(b, p);
    if (ma != 0 && mb != 0) {
        const std::int64_t pairs =
            std::max<std::int64_t>(1, std::min(count_nonzero(a, p), count_nonzero(b, p)));
        if (static_cast<u128>(ma) * static_cast<u128>(mb) >
            static_cast<u128>(kMaxI64) / static_cast<u128>(pairs))
            return false;
    }
    out.assign(static_cast<std::size_t>(p), 0);
    // Iterate the sparser operand on the outside; theta factors are very
    // sparse, so this turns the O(P^2) baseline into nnz * P work while
    // producing bit-identical sums.
    const bool a_outer = count_nonzero(a, p) <= count_nonzero(b, p);
    const Series::Small& outer = a_outer ? a : b;
    const Series::Small& inner = a_outer ? b : a;
    for (std::int64_t i = 0; i < p; ++i) {
        const std::int64_t oi = outer[static_cast<std::size_t>(i)];
        if (oi == 0) continue;
        const std::int64_t lim = p - i;
        const std::int64_t* in = inner.data();
        std::int64_t* res = out.data() + i;
        for (std::int64_t j = 0; j < lim; ++j) {
            if (in[j] != 0) res[j] += oi * in[j];
        }
    }
    return true;
}

bool conv_small_checked(const Series::Small& a, const Series::Small& b,
                        std::int64_t p, Series::Small& out) {
    out.assign(static_cast<std::size_t>(p), 0);
    for (std::int64_t i = 0; i < p; ++i) {
        const std::int64_t ai = a[static_cast<std::size_t>(i)];
        if (ai == 0) continue;
        for (std::int64_t j = 0; j + i < p; ++j) {
            const std::int64_t bj = b[static_cast<std::size_t>(j)];
            if (bj == 0) continue;
            std::int64_t prod, sum;
            if (__builtin_mul_overflow(ai, bj, &prod)) return false;
            if (__builtin_add_overflow(out[static_cast<std::size_t>(i + j)], prod, &sum))
                return false;
            out[static_cast<std::size_t>(i + j)] = sum;
        }
    }
    return true;
}

Series::Wide conv_wide(const Series::Wide& a, const Series::Wide& b, std::int64_t p) {
    Series::Wide out(static_cast<std::size_t>(p), BigInt(0));
    for (std::int64_t i = 0; i < p; ++i) {
        const BigInt& ai = a[static_cast<std::size_t>(i)];
        if (ai.is_zero()) continue;
        for (std::int64_t j = 0; j + i < p; ++j) {
            const BigInt& bj = b[static_cast<std::size_t>(j)];
            if (bj.is_zero()) continue;
            out[static_cast<std::size_t>(i + j)] += ai * bj;
        }
    }
    return out;
}

} // namespace

Series::Series(Small coeffs) : coeffs_(std::move(coeffs)) {
    checked_precision(std::get<Small>(coeffs_).size());
}

Series::Series(Wide coeffs) : coeffs_(std::move(coeffs)) {
    checked_precision(std::get<Wide>(coeffs_).size());
}

Series Series::zero(std::int64_t precision) {
    if (precision < 1) throw SeriesError("precision must be positive");
    return Series(Small(static_cast<std::size_t>(precision), 0));
}

std::int64_t Series::precision() const noexcept {
    if (wide()) return static_cast<std::int64_t>(std::get<Wide>(coeffs_).size());
    return static_cast<std::int64_t>(std::get<Small>(coeffs_).size());
}

BigInt Series::coefficient(std::int64_t n) const {
    if (n < 0 || n >= precision())
        throw SeriesError("coefficient index " + std::to_string(n) +
                          " outside known window [0, " + std::to_string(precision()) + ")");
    if (wide()) return std::get<Wide>(coeffs_)[static_cast<std::size_t>(n)];
    return BigInt(std::get<Small>(coeffs_)[static_cast<std::size_t>(n)]);
}

Series make_series(std::vector<std::int64_t> coeffs, std::int64_t precision) {
    if (precision < 1) throw SeriesError("precision must be positive");
    if (static_cast<std::int64_t>(coeffs.size()) != precision)
        throw SeriesError("coefficient count " + std::to_string(coeffs.size()) +
                          " does not match precision " + std::to_string(precision));
    return Series(std::move(coeffs));
}

Series add(const Series& a, const Series& b) {
    const std::int64_t p = std::min(a.precision(), b.precision());
    if (!a.wide() && !b.wide()) {
        const auto& av = a.small_coeffs();
        const auto& bv = b.small_coeffs();
        Series::Small out(static_cast<std::size_t>(p));
        bool ok = true;
        for (std::int64_t i = 0; i < p && ok; ++i)
            ok = !__builtin_add_overflow(av[static_cast<std::size_t>(i)],
                                         bv[static_cast<std::size_t>(i)],
                                         &out[static_cast<std::size_t>(i)]);
        if (ok) return Series(std::move(out));
    }
    const auto av = as_wide(a);
    const auto bv = as_wide(b);
    Series::Wide out(static_cast<std::size_t>(p));
    for (std::int64_t i = 0; i < p; ++i)
        out[static_cast<std::size_t>(i)] =
            av[static_cast<std::size_t>(i)] + bv[static_cast<std::size_t>(i)];
    return Series(std::move(out));
}

Series negate(const Series& a) { return monomial_scale(a, -1, 0); }

Series subtract(const Series& a, const Series& b) { return add(a, negate(b)); }

Series mul(const Series& a, const Series& b) {
    const std::int64_t p = std::min(a.precision(), b.precision());
    if (!a.wide() && !b.wide()) {
        Series::Small out;
        if (conv_small_unchecked(a.small_coeffs(), b.small_coeffs(), p, out))
            return Series(std::move(out));
        if (conv_small_checked(a.small_coeffs(), b.small_coeffs(), p, out))
            return Series(std::move(out));
    }
    return Series(conv_wide(as_wide(a), as_wide(b), p));
}

Series monomial_scale(const Series& a, std::int64_t c, std::int64_t shift) {
    if (shift < 0) throw SeriesError("monomial shift must be nonnegative");
    const std::int64_t p = a.precision();
    if (shift > std::numeric_limits<std::int64_t>::max() - p)
        throw SeriesError("monomial shift overflows precision arithmetic");
    const std::int64_t out_p = p + shift;
    if (!a.wide()) {
        const auto& av = a.small_coeffs();
        Series::Small out(static_cast<std::size_t>(out_p), 0);
        bool ok = true;
        for (std::int64_t i = 0; i < p && ok; ++i)
            ok = !__builtin_mul_overflow(av[static_cast<std::size_t>(i)], c,
                                         &out[static_cast<std::size_t>(i + shift)]);
        if (ok) return Series(std::move(out));
    }
    const auto av = as_wide(a);
    Series::Wide out(static_cast<std::size_t>(out_p), BigInt(0));
    for (std::int64_t i = 0; i < p; ++i)
        out[static_cast<std::size_t>(i + shift)] = av[static_cast<std::size_t>(i)] * c;
    return Series(std::move(out));
}

Series substitute_power(const Series& a, std::int64_t k) {
    if (k < 1) throw SeriesError("substitution power must be >= 1");
    const std::int64_t p = a.precision();
    if (p > 1 && k > (std::numeric_limits<std::int64_t>::max() - 1) / (p - 1))
        throw SeriesError("substitution power overflows precision arithmetic");
    const std::int64_t out_p = k * (p - 1) + 1;
    if (!a.wide()) {
        const auto& av = a.small_coeffs();
        Series::Small out(static_cast<std::size_t>(out_p), 0);
        for (std::int64_t i = 0; i < p; ++i)
            out[static_cast<std::size_t>(i * k)] = av[static_cast<std::size_t>(i)];
        return Series(std::move(out));
    }
    const auto& av = a.wide_coeffs();
    Series::Wide out(static_cast<std::size_t>(out_p), BigInt(0));
    for (std::int64_t i = 0; i < p; ++i)
        out[static_cast<std::size_t>(i * k)] = av[static_cast<std::size_t>(i)];
    return Series(std::move(out));
}

Series extract_progression(const Series& a, std::int64_t m, std::int64_t r) {
    if (m < 1) throw SeriesError("progression modulus must be >= 1");
    if (r < 0 || r >= m) throw SeriesError("progression residue must satisfy 0 <= r < m");
    const std::int64_t p = a.precision();
    if (p - r <= 0)
        throw SeriesError("progression residue " + std::to_string(r) +
                          " lies outside the precision window " + std::to_string(p));
    const std::int64_t out_p = (p - r + m - 1) / m;
    if (!a.wide()) {
        const auto& av = a.small_coeffs();
        Series::Small out(static_cast<std::size_t>(out_p));
        for (std::int64_t i = 0; i < out_p; ++i)
            out[static_cast<std::size_t>(i)] = av[static_cast<std::size_t>(m * i + r)];
        return Series(std::move(out));
    }
    const auto& av = a.wide_coeffs();
    Series::Wide out(static_cast<std::size_t>(out_p));
    for (std::int64_t i = 0; i < out_p; ++i)
        out[static_cast<std::size_t>(i)] = av[static_cast<std::size_t>(m * i + r)];
    return Series(std::move(out));
}

std::optional<CoefficientMismatch> first_mismatch(const Series& a, const Series& b,
                                                  std::int64_t order) {
    if (order < 1) throw SeriesError("comparison order must be positive");
    if (order > a.precision() || order > b.precision())
        throw SeriesError("comparison order " + std::to_string(order) +
                          " exceeds a precision window");
    if (!a.wide() && !b.wide()) {
        const auto& av = a.small_coeffs();
        const auto& bv = b.small_coeffs();
        for (std::int64_t i = 0; i < order; ++i) {
            if (av[static_cast<std::size_t>(i)] != bv[static_cast<std::size_t>(i)])
                return CoefficientMismatch{i, BigInt(av[static_cast<std::size_t>(i)]),
                                           BigInt(bv[static_cast<std::size_t>(i)])};
        }
        return std::nullopt;
    }
    for (std::int64_t i = 0; i < order; ++i) {
        BigInt x = a.coefficient(i), y = b.coefficient(i);
        if (x != y) return CoefficientMismatch{i, std::move(x), std::move(y)};
    }
    return std::nullopt;
}

bool equal_to_order(const Series& a, const Series& b, std::int64_t order) {
    return !first_mismatch(a, b, order).has_value();
}

} // namespace qtheta
