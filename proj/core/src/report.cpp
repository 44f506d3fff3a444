#include "qtheta/report.hpp"

#include <json.hpp>

#include <sstream>
#include <stdexcept>

namespace qtheta {

namespace {

using Json = nlohmann::ordered_json;

// Witness values are small in practice but unbounded in principle; keep
// them inside int64 when possible so the JSON stays plain numbers.
Json bigint_to_json(const BigInt& v) {
    if (v >= std::numeric_limits<std::int64_t>::min() &&
        v <= std::numeric_limits<std::int64_t>::max())
        return static_cast<std::int64_t>(v);
    return v.str();
}

Json report_to_json(const VerificationReport& r, bool with_timings) {
    Json j;
    j["name"] = r.name;
    j["engine"] = r.engine;
    j["range"] = r.range;
    j["status"] = status_name(r.status);
    if (r.witness) {
        Json w;
        w["n"] = r.witness->n;
        if (r.witness->orig_n) w["orig_n"] = *r.witness->orig_n;
        w["lhs"] = bigint_to_json(r.witness->lhs);
        w["rhs"] = bigint_to_json(r.witness->rhs);
        if (r.witness->oracle_confirmed) w["oracle_confirmed"] = *r.witness->oracle_confirmed;
        j["witness"] = std::move(w);
    }
    if (!r.detail.empty()) j["detail"] = r.detail;
    if (with_timings) j["elapsed_ms"] = r.elapsed_ms;
    return j;
}

} // namespace

const char* engine_name(Engine e) {
    switch (e) {
        case Engine::series: return "series";
        case Engine::oracle: return "oracle";
        case Engine::both: return "both";
    }
    return "?";
}

Engine engine_from_name(const std::string& s) {
    if (s == "series") return Engine::series;
    if (s == "oracle") return Engine::oracle;
    if (s == "both") return Engine::both;
    throw std::invalid_argument("unknown engine '" + s + "' (expected series, oracle or both)");
}

const char* status_name(Status s) {
    switch (s) {
        case Status::verified: return "verified";
        case Status::counterexample: return "counterexample";
        case Status::skipped: return "skipped";
        case Status::error: return "error";
    }
    return "?";
}

std::string reports_to_json(const std::vector<VerificationReport>& reports, bool with_timings) {
    Json arr = Json::array();
    for (const auto& r : reports) arr.push_back(report_to_json(r, with_timings));
    return arr.dump(2) + "\n";
}

std::string reports_to_csv(const std::vector<VerificationReport>& reports) {
    std::ostringstream os;
    os << "name,engine,range,status,witness_n,witness_lhs,witness_rhs,detail\n";
    for (const auto& r : reports) {
        os << r.name << ',' << r.engine << ',' << '"' << r.range << '"' << ','
           << status_name(r.status) << ',';
        if (r.witness)
            os << r.witness->n << ',' << r.witness->lhs.str() << ',' << r.witness->rhs.str();
        else
            os << ",,";
        os << ',' << '"' << r.detail << '"' << '\n';
    }
    return os.str();
}

std::string reports_to_text(const std::vector<VerificationReport>& reports) {
    std::ostringstream os;
    for (const auto& r : reports) {
        os << (r.status == Status::verified ? "[ ok ] " : "[FAIL] ");
        os << r.name << "  (" << r.engine << ", " << r.range << ")";
        if (r.status != Status::verified) os << "  status=" << status_name(r.status);
        if (r.witness) {
            os << "  witness: n=" << r.witness->n;
            if (r.witness->orig_n) os << " (orig n=" << *r.witness->orig_n << ")";
            os << " lhs=" << r.witness->lhs.str() << " rhs=" << r.witness->rhs.str();
            if (r.witness->oracle_confirmed)
                os << (*r.witness->oracle_confirmed ? " [oracle agrees]" : " [oracle disagrees]");
        }
        if (!r.detail.empty()) os << "  " << r.detail;
        os << "  [" << r.elapsed_ms << " ms]";
        os << '\n';
    }
    return os.str();
}

bool all_verified(const std::vector<VerificationReport>& reports) {
    for (const auto& r : reports)
        if (r.status != Status::verified) return false;
    return true;
}

bool any_counterexample(const std::vector<VerificationReport>& reports) {
    for (const auto& r : reports)
        if (r.status == Status::counterexample) return true;
    return false;
}

bool any_error(const std::vector<VerificationReport>& reports) {
    for (const auto& r : reports)
        if (r.status == Status::error) return true;
    return false;
}

} // namespace qtheta
