#include "qtheta/corpus.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace qtheta {

namespace {

using Json = nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
    throw CorpusError(origin + ": " + what);
}

void check_fields(const Json& obj, const std::string& origin, const std::string& where,
                  const std::set<std::string>& allowed) {
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key))
            fail(origin, where + ": unknown field '" + key + "'");
    }
}

std::int64_t require_int(const Json& obj, const std::string& origin, const std::string& where,
                         const std::string& key) {
    if (!obj.contains(key)) fail(origin, where + ": missing field '" + key + "'");
    if (!obj[key].is_number_integer()) fail(origin, where + ": field '" + key + "' must be an integer");
    return obj[key].get<std::int64_t>();
}

std::string require_string(const Json& obj, const std::string& origin, const std::string& where,
                           const std::string& key) {
    if (!obj.contains(key)) fail(origin, where + ": missing field '" + key + "'");
    if (!obj[key].is_string()) fail(origin, where + ": field '" + key + "' must be a string");
    return obj[key].get<std::string>();
}

std::string optional_string(const Json& obj, const std::string& key) {
    if (obj.contains(key) && obj[key].is_string()) return obj[key].get<std::string>();
    return {};
}

SeqSpec parse_seq(const Json& obj, const std::string& origin, const std::string& where) {
    if (!obj.is_object()) fail(origin, where + ": seq must be an object");
    check_fields(obj, origin, where, {"kind", "form"});
    SeqSpec s;
    try {
        s.kind = kind_from_name(require_string(obj, origin, where, "kind"));
    } catch (const std::invalid_argument& e) {
        fail(origin, where + ": " + e.what());
    }
    if (!obj.contains("form") || !obj["form"].is_array() || obj["form"].size() != 3)
        fail(origin, where + ": form must be an array of three positive integers");
    const auto& f = obj["form"];
    for (const auto& v : f)
        if (!v.is_number_integer() || v.get<std::int64_t>() < 1)
            fail(origin, where + ": form entries must be positive integers");
    s.form = {f[0].get<std::int64_t>(), f[1].get<std::int64_t>(), f[2].get<std::int64_t>()};
    return s;
}

IndexMap parse_map(const Json& obj, const std::string& origin, const std::string& where) {
    if (!obj.is_object()) fail(origin, where + ": map must be an object");
    check_fields(obj, origin, where, {"mul", "add"});
    IndexMap m;
    m.mul = require_int(obj, origin, where, "mul");
    m.add = require_int(obj, origin, where, "add");
    if (m.mul < 1) fail(origin, where + ": map.mul must be >= 1");
    if (m.add < 0) fail(origin, where + ": map.add must be >= 0");
    return m;
}

Domain parse_domain(const Json& obj, const std::string& origin, const std::string& where) {
    if (!obj.is_object()) fail(origin, where + ": domain must be an object");
    check_fields(obj, origin, where, {"mod", "residues"});
    Domain d;
    d.modulus = require_int(obj, origin, where, "mod");
    if (d.modulus < 1) fail(origin, where + ": modulus must be >= 1");
    if (!obj.contains("residues") || !obj["residues"].is_array() || obj["residues"].empty())
        fail(origin, where + ": residues must be a nonempty array");
    d.residues.clear();
    for (const auto& v : obj["residues"]) {
        if (!v.is_number_integer()) fail(origin, where + ": residues must be integers");
        const std::int64_t r = v.get<std::int64_t>();
        if (r < 0 || r >= d.modulus) fail(origin, where + ": residue out of range");
        d.residues.push_back(r);
    }
    return d;
}

ThetaExpr parse_rhs_expr(const std::string& text, const std::string& origin,
                         const std::string& where) {
    try {
        return parse_expr(text);
    } catch (const ParseError& e) {
        fail(origin, where + ": " + e.what());
    }
}

GfIdentity parse_gf_identity(const Json& obj, const std::string& origin) {
    const std::string name = require_string(obj, origin, "identity", "name");
    const std::string where = "identity '" + name + "'";
    check_fields(obj, origin, where, {"name", "seq", "map", "scale_den", "rhs", "source", "comment"});
    GfIdentity id;
    id.name = name;
    if (!obj.contains("seq")) fail(origin, where + ": missing field 'seq'");
    id.seq = parse_seq(obj["seq"], origin, where);
    if (!obj.contains("map")) fail(origin, where + ": missing field 'map'");
    id.map = parse_map(obj["map"], origin, where);
    id.scale_den = obj.contains("scale_den") ? require_int(obj, origin, where, "scale_den") : 1;
    if (id.scale_den < 1) fail(origin, where + ": scale_den must be >= 1");
    id.rhs = parse_rhs_expr(require_string(obj, origin, where, "rhs"), origin, where);
    id.source = optional_string(obj, "source");
    id.comment = optional_string(obj, "comment");
    return id;
}

LinearRule parse_linear_rule(const Json& obj, const std::string& origin) {
    const std::string name = require_string(obj, origin, "rule", "name");
    const std::string where = "rule '" + name + "'";
    check_fields(obj, origin, where,
                 {"name", "lhs", "rhs", "ratio", "domain", "exclude", "n_start", "orig",
                  "source", "comment"});
    LinearRule rule;
    rule.name = name;

    if (!obj.contains("lhs") || !obj["lhs"].is_object())
        fail(origin, where + ": missing lhs object");
    check_fields(obj["lhs"], origin, where + " lhs", {"seq", "map"});
    rule.lhs_seq = parse_seq(obj["lhs"]["seq"], origin, where);
    rule.lhs_map = obj["lhs"].contains("map") ? parse_map(obj["lhs"]["map"], origin, where)
                                              : IndexMap{};

    if (!obj.contains("rhs") || !obj["rhs"].is_array() || obj["rhs"].empty())
        fail(origin, where + ": rhs must be a nonempty array");
    for (const auto& term : obj["rhs"]) {
        check_fields(term, origin, where + " rhs term", {"coef", "seq", "map"});
        RuleTerm t;
        t.coef = require_int(term, origin, where, "coef");
        if (t.coef == 0) fail(origin, where + ": rhs coefficient must be nonzero");
        if (!term.contains("seq")) fail(origin, where + ": rhs term missing seq");
        t.seq = parse_seq(term["seq"], origin, where);
        t.map = term.contains("map") ? parse_map(term["map"], origin, where) : IndexMap{};
        rule.rhs.push_back(std::move(t));
    }

    if (obj.contains("ratio")) {
        check_fields(obj["ratio"], origin, where + " ratio", {"num", "den"});
        rule.num = require_int(obj["ratio"], origin, where, "num");
        rule.den = require_int(obj["ratio"], origin, where, "den");
        if (rule.num < 1 || rule.den < 1) fail(origin, where + ": ratio parts must be positive");
    }
    if (obj.contains("domain")) rule.domain = parse_domain(obj["domain"], origin, where);
    if (obj.contains("exclude")) rule.exclude = parse_domain(obj["exclude"], origin, where);
    if (obj.contains("n_start")) {
        rule.n_start = require_int(obj, origin, where, "n_start");
        if (rule.n_start < 0) fail(origin, where + ": n_start must be >= 0");
    }
    if (obj.contains("orig")) rule.orig = parse_map(obj["orig"], origin, where);
    rule.source = optional_string(obj, "source");
    rule.comment = optional_string(obj, "comment");
    return rule;
}

CorrectionRule parse_correction_rule(const Json& obj, const std::string& origin) {
    const std::string name = require_string(obj, origin, "correction rule", "name");
    const std::string where = "correction rule '" + name + "'";
    check_fields(obj, origin, where,
                 {"name", "lhs", "rhs", "den", "families", "source", "comment"});
    CorrectionRule rule;
    rule.name = name;
    if (!obj.contains("lhs") || !obj["lhs"].is_object()) fail(origin, where + ": missing lhs");
    check_fields(obj["lhs"], origin, where + " lhs", {"seq", "map"});
    rule.lhs_seq = parse_seq(obj["lhs"]["seq"], origin, where);
    rule.lhs_map = obj["lhs"].contains("map") ? parse_map(obj["lhs"]["map"], origin, where)
                                              : IndexMap{};
    if (!obj.contains("rhs") || !obj["rhs"].is_object()) fail(origin, where + ": missing rhs");
    check_fields(obj["rhs"], origin, where + " rhs", {"seq", "map"});
    rule.rhs_seq = parse_seq(obj["rhs"]["seq"], origin, where);
    rule.rhs_map = obj["rhs"].contains("map") ? parse_map(obj["rhs"]["map"], origin, where)
                                              : IndexMap{};
    rule.den = obj.contains("den") ? require_int(obj, origin, where, "den") : 2;
    if (rule.den < 1) fail(origin, where + ": den must be >= 1");
    if (!obj.contains("families") || !obj["families"].is_array())
        fail(origin, where + ": families must be an array");
    for (const auto& fam : obj["families"]) {
        check_fields(fam, origin, where + " family",
                     {"target_offset", "A", "B", "C", "sign_offset", "D", "E", "guard"});
        QuadraticFamily f;
        f.target_offset = require_int(fam, origin, where, "target_offset");
        if (f.target_offset != 0 && f.target_offset != 1)
            fail(origin, where + ": target_offset must be 0 (n) or 1 (n+1)");
        f.A = require_int(fam, origin, where, "A");
        f.B = require_int(fam, origin, where, "B");
        f.C = require_int(fam, origin, where, "C");
        if (f.A < 1) fail(origin, where + ": family coefficient A must be >= 1");
        f.sign_offset = require_int(fam, origin, where, "sign_offset");
        f.D = require_int(fam, origin, where, "D");
        f.E = require_int(fam, origin, where, "E");
        if (fam.contains("guard")) f.guard = parse_domain(fam["guard"], origin, where);
        rule.families.push_back(std::move(f));
    }
    rule.source = optional_string(obj, "source");
    rule.comment = optional_string(obj, "comment");
    return rule;
}

std::string strip(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

void check_duplicates(const std::vector<CorpusItem>& items, const std::string& origin) {
    std::set<std::string> seen;
    for (const auto& item : items)
        if (!seen.insert(item_name(item)).second)
            fail(origin, "duplicate item name '" + item_name(item) + "'");
}

} // namespace

const std::string& item_name(const CorpusItem& item) {
    return std::visit([](const auto& v) -> const std::string& { return v.name; }, item);
}

std::vector<CorpusItem> parse_qid(const std::string& text, const std::string& origin) {
    std::vector<CorpusItem> items;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = origin + ":" + std::to_string(lineno);
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = strip(line);
        if (line.empty()) continue;
        const auto colon = line.find(':');
        if (colon == std::string::npos)
            throw CorpusError(where + ": expected 'name : LHS == RHS'");
        const std::string name = strip(line.substr(0, colon));
        if (name.empty()) throw CorpusError(where + ": empty identity name");
        const std::string body = line.substr(colon + 1);
        const auto eq = body.find("==");
        if (eq == std::string::npos)
            throw CorpusError(where + ": expected '==' between the two sides");
        IdentityRecord rec;
        rec.name = name;
        rec.source = origin + ":" + std::to_string(lineno);
        try {
            rec.lhs = parse_expr(body.substr(0, eq));
            rec.rhs = parse_expr(body.substr(eq + 2));
        } catch (const ParseError& e) {
            throw CorpusError(where + ": " + e.what());
        }
        items.emplace_back(std::move(rec));
    }
    check_duplicates(items, origin);
    return items;
}

std::vector<CorpusItem> parse_corpus_json(const std::string& text, const std::string& origin) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw CorpusError(origin + ": " + e.what());
    }
    if (!doc.is_object()) fail(origin, "top level must be an object");
    check_fields(doc, origin, "top level", {"identities", "rules", "correction_rules"});
    std::vector<CorpusItem> items;
    if (doc.contains("identities")) {
        if (!doc["identities"].is_array()) fail(origin, "'identities' must be an array");
        for (const auto& obj : doc["identities"]) items.emplace_back(parse_gf_identity(obj, origin));
    }
    if (doc.contains("rules")) {
        if (!doc["rules"].is_array()) fail(origin, "'rules' must be an array");
        for (const auto& obj : doc["rules"]) items.emplace_back(parse_linear_rule(obj, origin));
    }
    if (doc.contains("correction_rules")) {
        if (!doc["correction_rules"].is_array())
            fail(origin, "'correction_rules' must be an array");
        for (const auto& obj : doc["correction_rules"])
            items.emplace_back(parse_correction_rule(obj, origin));
    }
    check_duplicates(items, origin);
    return items;
}

std::vector<CorpusItem> load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CorpusError(path + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".qid") == 0)
        return parse_qid(buf.str(), path);
    if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0)
        return parse_corpus_json(buf.str(), path);
    throw CorpusError(path + ": unknown corpus format (expected .qid or .json)");
}

} // namespace qtheta
