#include "qtheta/theta.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace qtheta {

namespace {

void require_form(const FormTriple& f) {
    if (f.a < 1 || f.b < 1 || f.c < 1)
        throw std::invalid_argument("form coefficients must be positive");
}

std::int64_t tri(std::int64_t x) { return x * (x + 1) / 2; }

// Largest x >= 0 with x(x+1)/2 <= m.
std::int64_t tri_floor(std::int64_t m) {
    std::int64_t x = (isqrt64(8 * m + 1) - 1) / 2;
    while (tri(x + 1) <= m) ++x;
    while (x > 0 && tri(x) > m) --x;
    return x;
}

} // namespace

const char* kind_name(Kind k) {
    switch (k) {
        case Kind::N: return "N";
        case Kind::t: return "t";
        case Kind::T: return "T";
    }
    return "?";
}

Kind kind_from_name(const std::string& s) {
    if (s == "N") return Kind::N;
    if (s == "t") return Kind::t;
    if (s == "T") return Kind::T;
    throw std::invalid_argument("unknown sequence kind '" + s + "' (expected N, t or T)");
}

std::string seq_label(const SeqSpec& s) {
    return std::string(kind_name(s.kind)) + "(" + std::to_string(s.form.a) + "," +
           std::to_string(s.form.b) + "," + std::to_string(s.form.c) + ")";
}

std::int64_t isqrt64(std::int64_t n) {
    if (n < 0) throw std::invalid_argument("isqrt64 of negative value");
    if (n == 0) return 0;
    auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

bool is_perfect_square(std::int64_t n) {
    if (n < 0) return false;
    const std::int64_t r = isqrt64(n);
    return r * r == n;
}

bool is_triangular(std::int64_t n) {
    // n = x(x+1)/2 for some x >= 0 iff 8n+1 is an odd perfect square.
    if (n < 0) return false;
    return is_perfect_square(8 * n + 1);
}

Series theta_phi(std::int64_t order, std::int64_t k) {
    if (order < 1) throw SeriesError("order must be positive");
    if (k < 1) throw SeriesError("theta argument power must be >= 1");
    Series::Small v(static_cast<std::size_t>(order), 0);
    v[0] = 1;
    // Bound j by (order-1)/k first so k*j*j cannot overflow.
    for (std::int64_t j = 1; j * j <= (order - 1) / k; ++j)
        v[static_cast<std::size_t>(k * j * j)] = 2;
    return Series(std::move(v));
}

Series theta_psi(std::int64_t order, std::int64_t k) {
    if (order < 1) throw SeriesError("order must be positive");
    if (k < 1) throw SeriesError("theta argument power must be >= 1");
    Series::Small v(static_cast<std::size_t>(order), 0);
    for (std::int64_t j = 0; tri(j) <= (order - 1) / k; ++j)
        v[static_cast<std::size_t>(k * tri(j))] = 1;
    return Series(std::move(v));
}

Series gf(const SeqSpec& spec, std::int64_t order) {
    require_form(spec.form);
    if (order < 1) throw SeriesError("order must be positive");
    if (spec.kind == Kind::N) {
        Series p = mul(theta_phi(order, spec.form.a), theta_phi(order, spec.form.b));
        return mul(p, theta_phi(order, spec.form.c));
    }
    Series p = mul(theta_psi(order, spec.form.a), theta_psi(order, spec.form.b));
    p = mul(p, theta_psi(order, spec.form.c));
    if (spec.kind == Kind::t) return monomial_scale(p, 8, 0);
    return p;
}

std::int64_t oracle_count(const SeqSpec& spec, std::int64_t n) {
    require_form(spec.form);
    if (n < 0) throw std::invalid_argument("oracle index must be nonnegative");

    // Outer loops over the two largest coefficients keeps ranges small;
    // the count itself is invariant under reordering.
    std::array<std::int64_t, 3> c{spec.form.a, spec.form.b, spec.form.c};
    std::sort(c.begin(), c.end(), std::greater<>());
    const std::int64_t c1 = c[0], c2 = c[1], c3 = c[2];

    std::int64_t count = 0;
    switch (spec.kind) {
        case Kind::N: {
            for (std::int64_t x = 0; c1 * x * x <= n; ++x) {
                const std::int64_t rem1 = n - c1 * x * x;
                for (std::int64_t y = 0; c2 * y * y <= rem1; ++y) {
                    const std::int64_t rem2 = rem1 - c2 * y * y;
                    if (rem2 % c3 != 0) continue;
                    const std::int64_t zz = rem2 / c3;
                    if (!is_perfect_square(zz)) continue;
                    const std::int64_t z = isqrt64(zz);
                    count += (x ? 2 : 1) * (y ? 2 : 1) * (z ? 2 : 1);
                }
            }
            return count;
        }
        case Kind::t: {
            // Over Z^3: run x and y through both preimages of each
            // triangular value, and count the two z-preimages in closed form.
            const std::int64_t xmax = tri_floor(n / c1);
            for (std::int64_t x = -xmax - 1; x <= xmax; ++x) {
                const std::int64_t rem1 = n - c1 * tri(x);
                if (rem1 < 0) continue;
                const std::int64_t ymax = tri_floor(rem1 / c2);
                for (std::int64_t y = -ymax - 1; y <= ymax; ++y) {
                    const std::int64_t rem2 = rem1 - c2 * tri(y);
                    if (rem2 < 0 || rem2 % c3 != 0) continue;
                    if (is_triangular(rem2 / c3)) count += 2;
                }
            }
            return count;
        }
        case Kind::T: {
            for (std::int64_t x = 0; c1 * tri(x) <= n; ++x) {
                const std::int64_t rem1 = n - c1 * tri(x);
                for (std::int64_t y = 0; c2 * tri(y) <= rem1; ++y) {
                    const std::int64_t rem2 = rem1 - c2 * tri(y);
                    if (rem2 % c3 != 0) continue;
                    if (is_triangular(rem2 / c3)) ++count;
                }
            }
            return count;
        }
    }
    throw std::logic_error("unreachable sequence kind");
}

FormConstant form_constant(const FormTriple& form) {
    require_form(form);
    const std::array<std::int64_t, 3> entries{form.a, form.b, form.c};
    std::int64_t i1 = 0, i2 = 0, i3 = 0;
    for (auto e : entries) {
        if (e == 1) ++i1;
        if (e == 2) ++i2;
        if (e == 3) ++i3;
    }
    const std::int64_t value =
        i1 * (i1 - 1) * (i1 - 2) * (i1 - 3) / 4 + i1 * (i1 - 1) * i2 / 2 + i1 * i3;
    return FormConstant{form, value};
}

} // namespace qtheta
