#pragma once

#include "qtheta/corpus.hpp"
#include "qtheta/report.hpp"
#include "qtheta/rules.hpp"

#include <cstdint>
#include <vector>

namespace qtheta {

struct SuiteSettings {
    std::int64_t order = 1024;  // series identities are compared to this order
    std::int64_t n_max = 2000;  // sequence rules are scanned to this bound
    Engine engine = Engine::series;
    int jobs = 1;
    std::int64_t mem_limit_bytes = 0; // 0 = unlimited
};

/// Run every item and return one report each, sorted by item name. Items
/// never abort the suite: failures and per-item errors become reports.
/// Output is identical for any jobs value.
std::vector<VerificationReport> run_suite(const std::vector<CorpusItem>& items,
                                          const SuiteSettings& settings);

std::vector<VerificationReport> run_suite(const std::vector<CorpusItem>& items,
                                          const SuiteSettings& settings, SeriesCache& cache);

} // namespace qtheta
