#pragma once

#include "qtheta/dsl.hpp"
#include "qtheta/report.hpp"
#include "qtheta/series.hpp"
#include "qtheta/theta.hpp"

#include <cstdint>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace qtheta {

class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Affine index map n -> mul*n + add with mul >= 1, add >= 0.
struct IndexMap {
    std::int64_t mul = 1;
    std::int64_t add = 0;
    std::int64_t operator()(std::int64_t n) const {
        std::int64_t prod, sum;
        if (__builtin_mul_overflow(mul, n, &prod) || __builtin_add_overflow(prod, add, &sum))
            throw SeriesError("index map value overflows the 64-bit range");
        return sum;
    }
    bool operator==(const IndexMap&) const = default;
};

/// Residue-class domain: n is admitted when n mod modulus lies in residues.
struct Domain {
    std::int64_t modulus = 1;
    std::vector<std::int64_t> residues{0};
    bool contains(std::int64_t n) const;
    bool operator==(const Domain&) const = default;
};

/// One series identity from the text corpus: LHS == RHS, both expressions.
struct IdentityRecord {
    std::string name;
    ThetaExpr lhs;
    ThetaExpr rhs;
    std::string source;
};

/// Asserts scale_den * sum_n seq(map.mul*n + map.add) q^n == rhs as series.
/// map.add may exceed map.mul; the extraction is then shifted down by
/// add/mul whole steps.
struct GfIdentity {
    std::string name;
    SeqSpec seq;
    IndexMap map;
    std::int64_t scale_den = 1;
    ThetaExpr rhs;
    std::string source;
    std::string comment;
};

struct RuleTerm {
    std::int64_t coef = 1;
    SeqSpec seq;
    IndexMap map;
};

/// Asserts den * lhs(lhs_map(n)) == num * sum_i coef_i * seq_i(map_i(n))
/// for every admissible n in [n_start, n_max]: n mod domain in residues
/// and not excluded. `orig`, when present, says the scan variable m
/// corresponds to original index orig(m) (rules normalized away from
/// fractional index maps); scans bound orig(m) rather than m.
struct LinearRule {
    std::string name;
    SeqSpec lhs_seq;
    IndexMap lhs_map;
    std::vector<RuleTerm> rhs;
    std::int64_t num = 1;
    std::int64_t den = 1;
    Domain domain;
    std::optional<Domain> exclude;
    std::int64_t n_start = 1;
    std::optional<IndexMap> orig;
    std::string source;
    std::string comment;
};

/// Quadratic index family for a correction rule: fires at n when
/// 2*(n + target_offset) == A*k^2 + B*k + C has an integer root k, and
/// contributes (-1)^(k + sign_offset) * (D*k + E).
struct QuadraticFamily {
    std::int64_t target_offset = 0; // 0 checks n, 1 checks n+1
    std::int64_t A = 0, B = 0, C = 0;
    std::int64_t sign_offset = 0;
    std::int64_t D = 0, E = 0;
    Domain guard; // residue classes of n where the family applies
};

/// r(n) = lhs(n) - rhs(map(n))/den; the division must be exact (checked).
/// Every fired family must predict one consistent value; r(n) must equal
/// it, or 0 when no family fires.
struct CorrectionRule {
    std::string name;
    SeqSpec lhs_seq;
    IndexMap lhs_map;
    SeqSpec rhs_seq;
    IndexMap rhs_map;
    std::int64_t den = 2;
    std::vector<QuadraticFamily> families;
    std::string source;
    std::string comment;
};

/// Read-mostly cache of built generating functions keyed by (kind, form).
/// plan() raises the target order so a suite builds each series once;
/// get() serves any request at or below the built order. A nonzero byte
/// budget turns oversized builds into ResourceError.
class SeriesCache {
public:
    explicit SeriesCache(std::int64_t mem_limit_bytes = 0)
        : mem_limit_bytes_(mem_limit_bytes) {}

    void plan(const SeqSpec& spec, std::int64_t order);
    std::shared_ptr<const Series> get(const SeqSpec& spec, std::int64_t order);
    LeafCache& leaves() { return leaves_; }

private:
    using Key = std::tuple<int, std::int64_t, std::int64_t, std::int64_t>;
    static Key key_of(const SeqSpec& spec);

    std::int64_t mem_limit_bytes_;
    std::int64_t bytes_used_ = 0;
    std::mutex mu_;
    std::map<Key, std::int64_t> planned_;
    std::map<Key, std::shared_ptr<const Series>> built_;
    std::map<Key, std::shared_future<void>> building_;
    LeafCache leaves_;
};

VerificationReport check_identity(const IdentityRecord& id, std::int64_t order,
                                  SeriesCache& cache);
VerificationReport check_gf_identity(const GfIdentity& id, std::int64_t order,
                                     SeriesCache& cache);
VerificationReport check_linear_rule(const LinearRule& rule, std::int64_t n_max, Engine engine,
                                     SeriesCache& cache);
VerificationReport check_correction_rule(const CorrectionRule& rule, std::int64_t n_max,
                                         SeriesCache& cache);

/// Largest admissible scan value for a rule given the bound on the
/// original index (differs from n_max only for normalized rules).
std::int64_t scan_limit(const LinearRule& rule, std::int64_t n_max);

/// True when the case domains plus the exclusion tile Z/modulus exactly
/// once. On failure `detail` names a residue covered zero or several times.
bool residues_partition(const std::vector<Domain>& cases, const Domain& exclusion,
                        std::int64_t modulus, std::string* detail = nullptr);

/// The generated rule families: the C(a,b,c)-ratio relation for every
/// ordered form with a+b+c <= 7, the two-term difference relation for
/// a+b+c == 8, and the odd-pair difference rules (2 ∤ ab, 4 | a-b,
/// 4 | c-2) for forms with a+b+c <= s2_sum_bound.
std::vector<LinearRule> generate_ach_rules(std::int64_t s2_sum_bound = 20);

} // namespace qtheta
