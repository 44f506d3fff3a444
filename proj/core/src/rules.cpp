#include "qtheta/rules.hpp"

#include <algorithm>
#include <chrono>
#include <future>
#include <numeric>
#include <sstream>

namespace qtheta {

namespace {

class Stopwatch {
public:
    double ms() const {
        const auto now = std::chrono::steady_clock::now();
        return std::chrono::duration<double, std::milli>(now - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

VerificationReport error_report(std::string name, std::string engine, std::string range,
                                const std::exception& e, double ms) {
    VerificationReport r;
    r.name = std::move(name);
    r.engine = std::move(engine);
    r.range = std::move(range);
    r.status = Status::error;
    r.detail = e.what();
    r.elapsed_ms = ms;
    return r;
}

std::int64_t parity_sign(std::int64_t k) { return ((k % 2) + 2) % 2 == 0 ? 1 : -1; }

} // namespace

bool Domain::contains(std::int64_t n) const {
    const std::int64_t r = ((n % modulus) + modulus) % modulus;
    return std::find(residues.begin(), residues.end(), r) != residues.end();
}

SeriesCache::Key SeriesCache::key_of(const SeqSpec& spec) {
    return {static_cast<int>(spec.kind), spec.form.a, spec.form.b, spec.form.c};
}

void SeriesCache::plan(const SeqSpec& spec, std::int64_t order) {
    std::scoped_lock lock(mu_);
    auto& slot = planned_[key_of(spec)];
    slot = std::max(slot, order);
}

std::shared_ptr<const Series> SeriesCache::get(const SeqSpec& spec, std::int64_t order) {
    const Key key = key_of(spec);
    for (;;) {
        std::shared_future<void> wait_on;
        std::int64_t target = order;
        std::promise<void> done;
        {
            std::unique_lock lock(mu_);
            auto it = built_.find(key);
            if (it != built_.end() && it->second->precision() >= order) return it->second;
            auto bit = building_.find(key);
            if (bit != building_.end()) {
                wait_on = bit->second;
            } else {
                auto pit = planned_.find(key);
                if (pit != planned_.end()) target = std::max(target, pit->second);
                const std::int64_t bytes =
                    target * static_cast<std::int64_t>(sizeof(std::int64_t));
                if (mem_limit_bytes_ > 0 && bytes_used_ + bytes > mem_limit_bytes_)
                    throw ResourceError("series cache budget exceeded: building " +
                                        seq_label(spec) + " to order " + std::to_string(target) +
                                        " needs " + std::to_string(bytes) + " bytes on top of " +
                                        std::to_string(bytes_used_));
                building_[key] = done.get_future().share();
            }
        }
        if (wait_on.valid()) {
            // Another thread is building this key; wait and re-check.
            wait_on.wait();
            continue;
        }
        std::shared_ptr<const Series> value;
        std::exception_ptr failure;
        try {
            value = std::make_shared<const Series>(gf(spec, target));
        } catch (...) {
            failure = std::current_exception();
        }
        {
            std::unique_lock lock(mu_);
            building_.erase(key);
            if (!failure) {
                bytes_used_ += target * static_cast<std::int64_t>(sizeof(std::int64_t));
                built_[key] = value;
            }
        }
        done.set_value();
        if (failure) std::rethrow_exception(failure);
        return value;
    }
}

VerificationReport check_identity(const IdentityRecord& id, std::int64_t order,
                                  SeriesCache& cache) {
    Stopwatch timer;
    VerificationReport r;
    r.name = id.name;
    r.engine = "series";
    r.range = "order " + std::to_string(order);
    try {
        const Series lhs = eval(id.lhs, order, &cache.leaves());
        const Series rhs = eval(id.rhs, order, &cache.leaves());
        if (auto bad = first_mismatch(lhs, rhs, order)) {
            r.status = Status::counterexample;
            r.witness = Witness{bad->exponent, std::nullopt, bad->lhs, bad->rhs, std::nullopt};
            r.detail = "coefficients differ at q^" + std::to_string(bad->exponent);
        }
    } catch (const std::exception& e) {
        return error_report(id.name, "series", r.range, e, timer.ms());
    }
    r.elapsed_ms = timer.ms();
    return r;
}

VerificationReport check_gf_identity(const GfIdentity& id, std::int64_t order,
                                     SeriesCache& cache) {
    Stopwatch timer;
    VerificationReport r;
    r.name = id.name;
    r.engine = "series";
    r.range = "order " + std::to_string(order);
    try {
        if (id.map.mul < 1) throw SeriesError("index map multiplier must be >= 1");
        if (id.map.add < 0) throw SeriesError("index map offset must be >= 0");
        if (id.scale_den < 1) throw SeriesError("scale denominator must be >= 1");
        const std::int64_t residue = id.map.add % id.map.mul;
        const std::int64_t skip = id.map.add / id.map.mul;
        const std::int64_t source_order = id.map(order - 1) + 1;
        const auto source = cache.get(id.seq, source_order);
        const Series lane = extract_progression(*source, id.map.mul, residue);
        const Series rhs = eval(id.rhs, order, &cache.leaves());
        for (std::int64_t n = 0; n < order; ++n) {
            const BigInt lhs_val = lane.coefficient(n + skip) * id.scale_den;
            const BigInt rhs_val = rhs.coefficient(n);
            if (lhs_val != rhs_val) {
                const std::int64_t orig = id.map(n);
                const std::int64_t direct = oracle_count(id.seq, orig);
                r.status = Status::counterexample;
                r.witness = Witness{n, orig, lhs_val, rhs_val,
                                    BigInt(direct) * id.scale_den != rhs_val};
                r.detail = "extraction of " + seq_label(id.seq) + " at index " +
                           std::to_string(orig) + " disagrees with the expression";
                break;
            }
        }
    } catch (const std::exception& e) {
        return error_report(id.name, "series", r.range, e, timer.ms());
    }
    r.elapsed_ms = timer.ms();
    return r;
}

std::int64_t scan_limit(const LinearRule& rule, std::int64_t n_max) {
    if (!rule.orig) return n_max;
    if (n_max < rule.orig->add) return rule.n_start - 1; // empty scan
    return (n_max - rule.orig->add) / rule.orig->mul;
}

namespace {

struct SideValues {
    BigInt lhs;
    BigInt rhs;
};

SideValues oracle_sides(const LinearRule& rule, std::int64_t n) {
    SideValues v;
    v.lhs = BigInt(oracle_count(rule.lhs_seq, rule.lhs_map(n))) * rule.den;
    BigInt sum = 0;
    for (const auto& term : rule.rhs)
        sum += BigInt(term.coef) * oracle_count(term.seq, term.map(n));
    v.rhs = sum * rule.num;
    return v;
}

} // namespace

VerificationReport check_linear_rule(const LinearRule& rule, std::int64_t n_max, Engine engine,
                                     SeriesCache& cache) {
    Stopwatch timer;
    VerificationReport r;
    r.name = rule.name;
    r.engine = engine_name(engine);
    const std::int64_t hi = scan_limit(rule, n_max);
    {
        std::ostringstream os;
        os << "n in [" << rule.n_start << ", " << hi << "]";
        if (rule.orig && !(rule.orig->mul == 1 && rule.orig->add == 0))
            os << " (original index " << rule.orig->mul << "n+" << rule.orig->add << " <= "
               << n_max << ")";
        if (!(rule.domain.modulus == 1))
            os << ", mod " << rule.domain.modulus;
        r.range = os.str();
    }
    try {
        if (hi < rule.n_start) {
            r.status = Status::skipped;
            r.detail = "no admissible indices in range";
            r.elapsed_ms = timer.ms();
            return r;
        }
        std::shared_ptr<const Series> lhs_series;
        std::vector<std::shared_ptr<const Series>> rhs_series;
        if (engine != Engine::oracle) {
            // One pass to size every series, so the cache builds each once.
            cache.plan(rule.lhs_seq, rule.lhs_map(hi) + 1);
            for (const auto& term : rule.rhs) cache.plan(term.seq, term.map(hi) + 1);
            lhs_series = cache.get(rule.lhs_seq, rule.lhs_map(hi) + 1);
            for (const auto& term : rule.rhs)
                rhs_series.push_back(cache.get(term.seq, term.map(hi) + 1));
        }
        for (std::int64_t n = rule.n_start; n <= hi; ++n) {
            if (!rule.domain.contains(n)) continue;
            if (rule.exclude && rule.exclude->contains(n)) continue;
            const std::optional<std::int64_t> orig_n =
                rule.orig ? std::optional<std::int64_t>((*rule.orig)(n)) : std::nullopt;

            BigInt lhs_val, rhs_val;
            if (engine != Engine::oracle) {
                lhs_val = lhs_series->coefficient(rule.lhs_map(n)) * rule.den;
                BigInt sum = 0;
                for (std::size_t i = 0; i < rule.rhs.size(); ++i)
                    sum += BigInt(rule.rhs[i].coef) *
                           rhs_series[i]->coefficient(rule.rhs[i].map(n));
                rhs_val = sum * rule.num;
            }
            if (engine == Engine::oracle) {
                const SideValues v = oracle_sides(rule, n);
                lhs_val = v.lhs;
                rhs_val = v.rhs;
            } else if (engine == Engine::both) {
                const SideValues v = oracle_sides(rule, n);
                if (v.lhs != lhs_val || v.rhs != rhs_val) {
                    r.status = Status::counterexample;
                    r.witness = Witness{n, orig_n, lhs_val, v.lhs, std::nullopt};
                    r.detail = "series and oracle engines disagree";
                    r.elapsed_ms = timer.ms();
                    return r;
                }
            }
            if (lhs_val != rhs_val) {
                r.status = Status::counterexample;
                bool confirmed = true;
                if (engine == Engine::series) {
                    const SideValues v = oracle_sides(rule, n);
                    confirmed = v.lhs != v.rhs;
                }
                r.witness = Witness{n, orig_n, lhs_val, rhs_val, confirmed};
                r.detail = "relation fails at n=" + std::to_string(n);
                r.elapsed_ms = timer.ms();
                return r;
            }
        }
    } catch (const std::exception& e) {
        return error_report(rule.name, engine_name(engine), r.range, e, timer.ms());
    }
    r.elapsed_ms = timer.ms();
    return r;
}

VerificationReport check_correction_rule(const CorrectionRule& rule, std::int64_t n_max,
                                         SeriesCache& cache) {
    Stopwatch timer;
    VerificationReport r;
    r.name = rule.name;
    r.engine = "series";
    r.range = "n in [1, " + std::to_string(n_max) + "]";
    try {
        cache.plan(rule.lhs_seq, rule.lhs_map(n_max) + 1);
        cache.plan(rule.rhs_seq, rule.rhs_map(n_max) + 1);
        const auto lhs = cache.get(rule.lhs_seq, rule.lhs_map(n_max) + 1);
        const auto rhs = cache.get(rule.rhs_seq, rule.rhs_map(n_max) + 1);
        for (std::int64_t n = 1; n <= n_max; ++n) {
            const BigInt lhs_val = lhs->coefficient(rule.lhs_map(n));
            const BigInt rhs_val = rhs->coefficient(rule.rhs_map(n));
            if (rhs_val % rule.den != 0) {
                r.status = Status::counterexample;
                r.witness = Witness{n, std::nullopt, lhs_val, rhs_val, std::nullopt};
                r.detail = seq_label(rule.rhs_seq) + " at " + std::to_string(rule.rhs_map(n)) +
                           " is not divisible by " + std::to_string(rule.den) +
                           "; the correction would be non-integral";
                r.elapsed_ms = timer.ms();
                return r;
            }
            const BigInt actual = lhs_val - rhs_val / rule.den;

            std::optional<BigInt> predicted;
            bool inconsistent = false;
            for (const auto& fam : rule.families) {
                if (!fam.guard.contains(n)) continue;
                // Integer roots of A k^2 + B k + (C - 2(n+offset)) = 0.
                const std::int64_t constant = fam.C - 2 * (n + fam.target_offset);
                const std::int64_t disc = fam.B * fam.B - 4 * fam.A * constant;
                if (disc < 0) continue;
                const std::int64_t root = isqrt64(disc);
                if (root * root != disc) continue;
                for (const std::int64_t num : {-fam.B + root, -fam.B - root}) {
                    if (num % (2 * fam.A) != 0) continue;
                    const std::int64_t k = num / (2 * fam.A);
                    const BigInt value = parity_sign(k + fam.sign_offset) * (fam.D * k + fam.E);
                    if (!predicted)
                        predicted = value;
                    else if (*predicted != value)
                        inconsistent = true;
                }
            }
            if (inconsistent) {
                r.status = Status::counterexample;
                r.witness = Witness{n, std::nullopt, actual, *predicted, std::nullopt};
                r.detail = "index families predict conflicting values at n=" + std::to_string(n);
                r.elapsed_ms = timer.ms();
                return r;
            }
            const BigInt expected = predicted.value_or(BigInt(0));
            if (actual != expected) {
                const BigInt direct =
                    BigInt(oracle_count(rule.lhs_seq, rule.lhs_map(n))) -
                    BigInt(oracle_count(rule.rhs_seq, rule.rhs_map(n))) / rule.den;
                r.status = Status::counterexample;
                r.witness = Witness{n, std::nullopt, actual, expected, direct != expected};
                r.detail = "correction value disagrees with the index-family prediction";
                r.elapsed_ms = timer.ms();
                return r;
            }
        }
    } catch (const std::exception& e) {
        return error_report(rule.name, "series", r.range, e, timer.ms());
    }
    r.elapsed_ms = timer.ms();
    return r;
}

bool residues_partition(const std::vector<Domain>& cases, const Domain& exclusion,
                        std::int64_t modulus, std::string* detail) {
    for (const auto& d : cases) {
        if (modulus % d.modulus != 0) {
            if (detail)
                *detail = "domain modulus " + std::to_string(d.modulus) +
                          " does not divide " + std::to_string(modulus);
            return false;
        }
    }
    if (modulus % exclusion.modulus != 0) {
        if (detail) *detail = "exclusion modulus does not divide the lift modulus";
        return false;
    }
    for (std::int64_t rho = 0; rho < modulus; ++rho) {
        int hits = exclusion.contains(rho) ? 1 : 0;
        for (const auto& d : cases)
            if (d.contains(rho)) ++hits;
        if (hits != 1) {
            if (detail)
                *detail = "residue " + std::to_string(rho) + " mod " + std::to_string(modulus) +
                          " is covered " + std::to_string(hits) + " times";
            return false;
        }
    }
    return true;
}

std::vector<LinearRule> generate_ach_rules(std::int64_t s2_sum_bound) {
    std::vector<LinearRule> rules;

    auto form_name = [](const FormTriple& f) {
        return std::to_string(f.a) + "_" + std::to_string(f.b) + "_" + std::to_string(f.c);
    };

    // den*t(n) = num*N(8n + a+b+c) with num/den = 2/(2+C(a,b,c)), a+b+c <= 7.
    for (std::int64_t a = 1; a <= 5; ++a)
        for (std::int64_t b = a; a + 2 * b <= 7; ++b)
            for (std::int64_t c = b; a + b + c <= 7; ++c) {
                const FormTriple form{a, b, c};
                const std::int64_t s = a + b + c;
                const std::int64_t den_raw = 2 + form_constant(form).value;
                const std::int64_t g = std::gcd<std::int64_t>(2, den_raw);
                LinearRule rule;
                rule.name = "gen_ratio_" + form_name(form);
                rule.lhs_seq = {Kind::t, form};
                rule.rhs = {{1, {Kind::N, form}, {8, s}}};
                rule.num = 2 / g;
                rule.den = den_raw / g;
                rule.source = "Adiga-Cooper-Han ratio relation";
                rules.push_back(std::move(rule));
            }

    // den*t(n) = num*(N(8n+8) - N(2n+2)) with num/den = 2/(2+C), a+b+c == 8.
    for (std::int64_t a = 1; a <= 2; ++a)
        for (std::int64_t b = a; a + 2 * b <= 8; ++b) {
            const std::int64_t c = 8 - a - b;
            if (c < b) continue;
            const FormTriple form{a, b, c};
            const std::int64_t den_raw = 2 + form_constant(form).value;
            const std::int64_t g = std::gcd<std::int64_t>(2, den_raw);
            LinearRule rule;
            rule.name = "gen_diff8_" + form_name(form);
            rule.lhs_seq = {Kind::t, form};
            rule.rhs = {{1, {Kind::N, form}, {8, 8}}, {-1, {Kind::N, form}, {2, 2}}};
            rule.num = 2 / g;
            rule.den = den_raw / g;
            rule.source = "Baruah-Cooper-Hirschhorn difference relation";
            rules.push_back(std::move(rule));
        }

    // t(n) = N(8n + s) - N(2n + s/4) when a, b odd, 4 | a-b, 4 | c-2.
    for (std::int64_t a = 1; a <= s2_sum_bound; a += 2)
        for (std::int64_t b = a; a + b + 2 <= s2_sum_bound; b += 4)
            for (std::int64_t c = 2; a + b + c <= s2_sum_bound; c += 4) {
                const FormTriple form{a, b, c};
                const std::int64_t s = a + b + c;
                LinearRule rule;
                rule.name = "gen_oddpair_" + form_name(form);
                rule.lhs_seq = {Kind::t, form};
                rule.rhs = {{1, {Kind::N, form}, {8, s}}, {-1, {Kind::N, form}, {2, s / 4}}};
                rule.source = "odd-pair two-term difference relation";
                rules.push_back(std::move(rule));
            }

    return rules;
}

} // namespace qtheta
