#pragma once

#include "qtheta/series.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qtheta {

enum class Engine { series, oracle, both };

const char* engine_name(Engine e);
Engine engine_from_name(const std::string& s);

enum class Status { verified, counterexample, skipped, error };

const char* status_name(Status s);

struct Witness {
    std::int64_t n = 0;                  // scan variable at the failure
    std::optional<std::int64_t> orig_n;  // original index for normalized rules
    BigInt lhs;
    BigInt rhs;
    std::optional<bool> oracle_confirmed; // counterexamples re-checked by enumeration
};

/// Structured outcome of one corpus item.
struct VerificationReport {
    std::string name;
    std::string engine; // "series" | "oracle" | "both" | "n/a"
    std::string range;  // human-readable description of what was checked
    Status status = Status::verified;
    std::optional<Witness> witness;
    std::string detail;     // error text, or extra context on failure
    double elapsed_ms = 0.0;
};

/// JSON array of reports with stable field names and ordering. Wall-clock
/// times are volatile, so they are emitted only when `with_timings` is set;
/// the default output is byte-stable across runs and parallelism degrees.
std::string reports_to_json(const std::vector<VerificationReport>& reports,
                            bool with_timings = false);

std::string reports_to_csv(const std::vector<VerificationReport>& reports);
std::string reports_to_text(const std::vector<VerificationReport>& reports);

bool all_verified(const std::vector<VerificationReport>& reports);
bool any_counterexample(const std::vector<VerificationReport>& reports);
bool any_error(const std::vector<VerificationReport>& reports);

} // namespace qtheta
