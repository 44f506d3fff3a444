#include "qtheta/engine.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace qtheta {

namespace {

// Prime the cache's target orders so every generating function is built
// exactly once at the largest order any item needs.
void plan_item(const CorpusItem& item, const SuiteSettings& settings, SeriesCache& cache) {
    if (const auto* gf_id = std::get_if<GfIdentity>(&item)) {
        cache.plan(gf_id->seq, gf_id->map(settings.order - 1) + 1);
    } else if (const auto* rule = std::get_if<LinearRule>(&item)) {
        if (settings.engine == Engine::oracle) return;
        const std::int64_t hi = scan_limit(*rule, settings.n_max);
        if (hi < rule->n_start) return;
        cache.plan(rule->lhs_seq, rule->lhs_map(hi) + 1);
        for (const auto& term : rule->rhs) cache.plan(term.seq, term.map(hi) + 1);
    } else if (const auto* corr = std::get_if<CorrectionRule>(&item)) {
        cache.plan(corr->lhs_seq, corr->lhs_map(settings.n_max) + 1);
        cache.plan(corr->rhs_seq, corr->rhs_map(settings.n_max) + 1);
    }
}

VerificationReport run_item(const CorpusItem& item, const SuiteSettings& settings,
                            SeriesCache& cache) {
    return std::visit(
        [&](const auto& v) -> VerificationReport {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, IdentityRecord>)
                return check_identity(v, settings.order, cache);
            else if constexpr (std::is_same_v<T, GfIdentity>)
                return check_gf_identity(v, settings.order, cache);
            else if constexpr (std::is_same_v<T, LinearRule>)
                return check_linear_rule(v, settings.n_max, settings.engine, cache);
            else
                return check_correction_rule(v, settings.n_max, cache);
        },
        item);
}

} // namespace

std::vector<VerificationReport> run_suite(const std::vector<CorpusItem>& items,
                                          const SuiteSettings& settings, SeriesCache& cache) {
    for (const auto& item : items) {
        try {
            plan_item(item, settings, cache);
        } catch (const std::exception&) {
            // sizing failures resurface as that item's own error report
        }
    }

    std::vector<VerificationReport> reports(items.size());
    const int jobs = std::max(1, settings.jobs);
    if (jobs == 1 || items.size() <= 1) {
        for (std::size_t i = 0; i < items.size(); ++i)
            reports[i] = run_item(items[i], settings, cache);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= items.size()) return;
                reports[i] = run_item(items[i], settings, cache);
            }
        };
        std::vector<std::thread> pool;
        const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(jobs), items.size());
        pool.reserve(n);
        for (std::size_t i = 0; i < n; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::sort(reports.begin(), reports.end(),
              [](const VerificationReport& a, const VerificationReport& b) { return a.name < b.name; });
    return reports;
}

std::vector<VerificationReport> run_suite(const std::vector<CorpusItem>& items,
                                          const SuiteSettings& settings) {
    SeriesCache cache(settings.mem_limit_bytes);
    return run_suite(items, settings, cache);
}

} // namespace qtheta
