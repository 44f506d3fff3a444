#pragma once

#include "qtheta/rules.hpp"

#include <string>
#include <variant>
#include <vector>

namespace qtheta {

class CorpusError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using CorpusItem = std::variant<IdentityRecord, GfIdentity, LinearRule, CorrectionRule>;

const std::string& item_name(const CorpusItem& item);

/// Load a corpus file. ".qid" files hold one series identity per
/// non-comment line ("name : LHS == RHS"); ".json" files hold typed
/// records under "identities", "rules" and "correction_rules" keys.
/// Unknown fields and duplicate names are rejected; errors carry the
/// file name plus a line number or JSON path.
std::vector<CorpusItem> load_corpus(const std::string& path);

std::vector<CorpusItem> parse_qid(const std::string& text, const std::string& origin);
std::vector<CorpusItem> parse_corpus_json(const std::string& text, const std::string& origin);

} // namespace qtheta
