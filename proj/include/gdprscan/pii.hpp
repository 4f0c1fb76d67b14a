#pragma once

#include <algorithm>
#include <cctype>
#include <ctime>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gdprscan/model.hpp"

namespace gdprscan::pii {

enum class Evidence { FieldNameMatch, ValuePatternMatch, Both };

inline std::string_view evidence_name(Evidence e) {
    switch (e) {
        case Evidence::FieldNameMatch: return "field_name_match";
        case Evidence::ValuePatternMatch: return "value_pattern_match";
        case Evidence::Both: return "both";
    }
    return "unknown";
}

struct PiiFinding {
    std::string database_id;
    std::string table_name;
    std::string field_name;
    PiiCategory category = PiiCategory::Email;
    Evidence evidence = Evidence::FieldNameMatch;

    bool operator==(const PiiFinding&) const = default;
};

// ── Field-name dictionary ────────────────────────────────────────────────────

using TokenSequence = std::vector<std::string>;

struct DictionaryEntry {
    PiiCategory category = PiiCategory::Email;
    std::vector<TokenSequence> patterns;
};

struct PiiDictionary {
    std::string version;
    std::vector<DictionaryEntry> entries;
};

// When several categories match a field name, the most specific one wins.
// Composite identifiers (ip_address, email_address) must beat the generic
// trailing token, so address-like categories rank last.
inline constexpr std::array<PiiCategory, 9> kNamePriority = {
    PiiCategory::IpAddress, PiiCategory::Email,       PiiCategory::NationalId,
    PiiCategory::DeviceId,  PiiCategory::BirthDate,   PiiCategory::Geolocation,
    PiiCategory::Phone,     PiiCategory::PersonName,  PiiCategory::PostalAddress,
};

inline PiiDictionary default_dictionary() {
    auto seqs = [](std::initializer_list<TokenSequence> list) {
        return std::vector<TokenSequence>(list);
    };
    PiiDictionary dict;
    dict.version = "1";
    dict.entries = {
        {PiiCategory::Email, seqs({{"email"}, {"e", "mail"}, {"mail"}})},
        {PiiCategory::Phone, seqs({{"phone"}, {"tel"}, {"telephone"}, {"mobile"}, {"msisdn"}})},
        {PiiCategory::PersonName, seqs({{"first", "name"},
                                        {"last", "name"},
                                        {"full", "name"},
                                        {"firstname"},
                                        {"lastname"},
                                        {"fullname"},
                                        {"surname"}})},
        {PiiCategory::PostalAddress,
         seqs({{"address"}, {"street"}, {"postcode"}, {"zip"}, {"zipcode"}, {"postal", "code"}})},
        {PiiCategory::Geolocation,
         seqs({{"lat"}, {"lng"}, {"lon"}, {"latitude"}, {"longitude"}, {"geolocation"}})},
        {PiiCategory::IpAddress, seqs({{"ip"}, {"ipaddr"}, {"ipv4"}, {"ipv6"}})},
        {PiiCategory::DeviceId, seqs({{"udid"}, {"imei"}, {"device", "id"}, {"deviceid"}})},
        {PiiCategory::NationalId,
         seqs({{"ssn"}, {"national", "id"}, {"nationalid"}, {"passport"}})},
        {PiiCategory::BirthDate,
         seqs({{"dob"}, {"birthdate"}, {"birth", "date"}, {"date", "of", "birth"}, {"birthday"}})},
    };
    return dict;
}

// Dictionary file: {"version": "...", "categories": {"<category>": [["tok",...],...]}}
inline PiiDictionary load_dictionary(std::string_view bytes) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(bytes);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("pii dictionary: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("version") || !doc["version"].is_string() ||
        !doc.contains("categories") || !doc["categories"].is_object())
        throw ParseError("pii dictionary: expected object with 'version' and 'categories'");

    PiiDictionary dict;
    dict.version = doc["version"].get<std::string>();
    for (const auto& [key, value] : doc["categories"].items()) {
        auto category = parse_pii_category(key);
        if (!category) throw ParseError("pii dictionary: unknown category '" + key + "'");
        DictionaryEntry entry{*category, {}};
        if (!value.is_array()) throw ParseError("pii dictionary: patterns must be an array");
        for (const auto& pattern : value) {
            if (!pattern.is_array() || pattern.empty())
                throw ParseError("pii dictionary: each pattern is a non-empty token array");
            TokenSequence seq;
            for (const auto& tok : pattern) {
                if (!tok.is_string() || tok.get<std::string>().empty())
                    throw ParseError("pii dictionary: tokens must be non-empty strings");
                seq.push_back(tok.get<std::string>());
            }
            entry.patterns.push_back(std::move(seq));
        }
        dict.entries.push_back(std::move(entry));
    }
    return dict;
}

inline std::string serialize_dictionary(const PiiDictionary& dict) {
    nlohmann::ordered_json doc;
    doc["version"] = dict.version;
    nlohmann::ordered_json cats(nlohmann::json::value_t::object);
    for (auto category : kAllPiiCategories) {
        for (const auto& entry : dict.entries) {
            if (entry.category != category) continue;
            auto patterns = nlohmann::ordered_json::array();
            for (const auto& seq : entry.patterns) patterns.push_back(seq);
            cats[std::string(pii_category_name(category))] = patterns;
        }
    }
    doc["categories"] = cats;
    return doc.dump(2) + "\n";
}

// ── Field-name classification ────────────────────────────────────────────────

// Lowercases and splits on '_', '-', spaces, camel-case boundaries, and
// letter/digit boundaries. "userEmailAddr" -> [user, email, addr],
// "IPAddress" -> [ip, address], "phone2" -> [phone, 2].
inline std::vector<std::string> tokenize_field_name(std::string_view name) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            tokens.push_back(current);
            current.clear();
        }
    };

    for (std::size_t i = 0; i < name.size(); ++i) {
        unsigned char c = name[i];
        if (c == '_' || c == '-' || c == ' ' || c == '.') {
            flush();
            continue;
        }
        bool upper = std::isupper(c) != 0;
        bool digit = std::isdigit(c) != 0;
        if (!current.empty()) {
            unsigned char prev = name[i - 1];
            bool prev_lower = std::islower(prev) != 0;
            bool prev_digit = std::isdigit(prev) != 0;
            bool next_lower = i + 1 < name.size() && std::islower(name[i + 1]) != 0;
            if (upper && (prev_lower || (std::isupper(prev) && next_lower))) flush();
            if (digit != prev_digit) flush();
        }
        current.push_back(static_cast<char>(std::tolower(c)));
    }
    flush();
    return tokens;
}

namespace detail {

inline bool contains_subsequence(const std::vector<std::string>& tokens,
                                 const TokenSequence& pattern) {
    if (pattern.empty() || pattern.size() > tokens.size()) return false;
    for (std::size_t start = 0; start + pattern.size() <= tokens.size(); ++start) {
        bool match = true;
        for (std::size_t j = 0; j < pattern.size(); ++j) {
            if (tokens[start + j] != pattern[j]) {
                match = false;
                break;
            }
        }
        if (match) return true;
    }
    return false;
}

}  // namespace detail

inline std::optional<PiiCategory> classify_field_name(std::string_view name,
                                                      const PiiDictionary& dict) {
    auto tokens = tokenize_field_name(name);
    if (tokens.empty()) return std::nullopt;
    for (auto category : kNamePriority) {
        for (const auto& entry : dict.entries) {
            if (entry.category != category) continue;
            for (const auto& pattern : entry.patterns)
                if (detail::contains_subsequence(tokens, pattern)) return category;
        }
    }
    return std::nullopt;
}

inline std::optional<PiiCategory> classify_field_name(std::string_view name) {
    static const PiiDictionary dict = default_dictionary();
    return classify_field_name(name, dict);
}

// ── Sampled-value classification ─────────────────────────────────────────────

namespace detail {

inline bool email_shaped(std::string_view v) {
    auto at = v.find('@');
    if (at == std::string_view::npos || at == 0 || at + 1 >= v.size()) return false;
    if (v.find('@', at + 1) != std::string_view::npos) return false;

    auto local = v.substr(0, at);
    for (unsigned char c : local)
        if (!(std::isalnum(c) || c == '.' || c == '_' || c == '%' || c == '+' || c == '-'))
            return false;

    auto domain = v.substr(at + 1);
    auto last_dot = domain.rfind('.');
    if (last_dot == std::string_view::npos || last_dot == 0 || last_dot + 1 >= domain.size())
        return false;
    for (unsigned char c : domain)
        if (!(std::isalnum(c) || c == '.' || c == '-')) return false;
    if (domain.front() == '.' || domain.find("..") != std::string_view::npos) return false;

    auto tld = domain.substr(last_dot + 1);
    if (tld.size() < 2) return false;
    return std::all_of(tld.begin(), tld.end(), [](unsigned char c) { return std::isalpha(c); });
}

inline bool dotted_quad(std::string_view v) {
    int parts = 0;
    std::size_t i = 0;
    while (i < v.size()) {
        std::size_t digits = 0;
        int value = 0;
        while (i < v.size() && v[i] >= '0' && v[i] <= '9') {
            value = value * 10 + (v[i] - '0');
            ++digits;
            ++i;
        }
        if (digits == 0 || digits > 3 || value > 255) return false;
        ++parts;
        if (i < v.size()) {
            if (v[i] != '.') return false;
            ++i;
            if (i == v.size()) return false;  // trailing dot
        }
    }
    return parts == 4;
}

inline bool phone_shaped(std::string_view v) {
    std::size_t i = 0;
    if (!v.empty() && v[0] == '+') i = 1;
    std::size_t digits = 0;
    for (; i < v.size(); ++i) {
        char c = v[i];
        if (c >= '0' && c <= '9') {
            ++digits;
        } else if (c != ' ' && c != '-' && c != '(' && c != ')' && c != '.') {
            return false;
        }
    }
    return digits >= 7;
}

inline int current_utc_year() {
    static const int year = [] {
        std::time_t t = std::time(nullptr);
        std::tm tm{};
        gmtime_r(&t, &tm);
        return tm.tm_year + 1900;
    }();
    return year;
}

inline bool birth_date_shaped(std::string_view v) {
    if (v.size() != 10 || v[4] != '-' || v[7] != '-') return false;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i == 4 || i == 7) continue;
        if (v[i] < '0' || v[i] > '9') return false;
    }
    int year = (v[0] - '0') * 1000 + (v[1] - '0') * 100 + (v[2] - '0') * 10 + (v[3] - '0');
    int month = (v[5] - '0') * 10 + (v[6] - '0');
    int day = (v[8] - '0') * 10 + (v[9] - '0');
    if (year < 1900 || year > current_utc_year()) return false;
    if (month < 1 || month > 12) return false;
    static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    int max_day = kDays[month - 1];
    bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    if (month == 2 && leap) max_day = 29;
    return day >= 1 && day <= max_day;
}

}  // namespace detail

// Fixed test order: email, IP address, phone, birth date. First match wins.
inline std::optional<PiiCategory> classify_value(std::string_view value) {
    if (detail::email_shaped(value)) return PiiCategory::Email;
    if (detail::dotted_quad(value)) return PiiCategory::IpAddress;
    if (detail::phone_shaped(value)) return PiiCategory::Phone;
    if (detail::birth_date_shaped(value)) return PiiCategory::BirthDate;
    return std::nullopt;
}

// ── R18 evaluation ───────────────────────────────────────────────────────────

// One finding at most per table field. A field-name hit names the category;
// otherwise the first classifiable sampled value does. Findings covered by the
// declared purpose or the allowlist are suppressed.
inline std::vector<PiiFinding> find_personal_data(const Database& db, const PiiDictionary& dict) {
    std::vector<PiiFinding> findings;
    for (const auto& table : db.tables) {
        for (const auto& field : table.fields) {
            auto name_cat = classify_field_name(field.name, dict);

            std::optional<PiiCategory> value_cat;
            bool value_matches_name_cat = false;
            for (const auto& row : table.sampled_rows) {
                auto cell = row.find(field.name);
                if (cell == row.end()) continue;
                auto cat = classify_value(cell->second);
                if (!cat) continue;
                if (!value_cat) value_cat = cat;
                if (name_cat && *cat == *name_cat) {
                    value_matches_name_cat = true;
                    break;
                }
                if (!name_cat) break;
            }

            if (name_cat) {
                findings.push_back({db.ref.id, table.name, field.name, *name_cat,
                                    value_matches_name_cat ? Evidence::Both
                                                           : Evidence::FieldNameMatch});
            } else if (value_cat) {
                findings.push_back(
                    {db.ref.id, table.name, field.name, *value_cat, Evidence::ValuePatternMatch});
            }
        }
    }
    return findings;
}

inline std::vector<Exposure> eval_data_minimization(const Database& db, const DataPolicy& policy,
                                                    const PiiDictionary& dict) {
    std::vector<Exposure> out;
    for (const auto& finding : find_personal_data(db, dict)) {
        if (policy.permitted_categories.contains(finding.category)) continue;
        if (policy.allowlist.contains(
                {finding.database_id, finding.table_name, finding.field_name}))
            continue;
        out.push_back(Exposure{
            RuleId::R18, principle_of(RuleId::R18), db.ref,
            "table '" + finding.table_name + "' field '" + finding.field_name +
                "' appears to hold " + std::string(pii_category_name(finding.category)) +
                " data outside the declared collection purpose (" +
                std::string(evidence_name(finding.evidence)) + ")",
            finding.table_name + "." + finding.field_name, ""});
    }
    return out;
}

inline std::vector<Exposure> eval_data_minimization(const Database& db, const DataPolicy& policy) {
    static const PiiDictionary dict = default_dictionary();
    return eval_data_minimization(db, policy, dict);
}

// ── DataPolicy file ──────────────────────────────────────────────────────────

// Policy file: {"permitted_categories": ["email",...],
//               "allowlist": [{"database_id":..,"table_name":..,"field_name":..},...]}
// Wildcards are not permitted in v1.
inline DataPolicy load_policy(std::string_view bytes) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(bytes);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("data policy: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("data policy: expected a JSON object");

    DataPolicy policy;
    if (doc.contains("permitted_categories")) {
        if (!doc["permitted_categories"].is_array())
            throw ParseError("data policy: permitted_categories must be an array");
        for (const auto& item : doc["permitted_categories"]) {
            if (!item.is_string())
                throw ParseError("data policy: permitted_categories entries must be strings");
            auto cat = parse_pii_category(item.get<std::string>());
            if (!cat)
                throw ParseError("data policy: unknown category '" + item.get<std::string>() + "'");
            policy.permitted_categories.insert(*cat);
        }
    }
    if (doc.contains("allowlist")) {
        if (!doc["allowlist"].is_array())
            throw ParseError("data policy: allowlist must be an array");
        for (const auto& item : doc["allowlist"]) {
            if (!item.is_object() || !item.contains("database_id") ||
                !item.contains("table_name") || !item.contains("field_name"))
                throw ParseError(
                    "data policy: allowlist entries need database_id, table_name, field_name");
            AllowlistEntry entry;
            const std::array<std::pair<const char*, std::string*>, 3> slots = {{
                {"database_id", &entry.database_id},
                {"table_name", &entry.table_name},
                {"field_name", &entry.field_name},
            }};
            for (auto [key, slot] : slots) {
                if (!item[key].is_string() || item[key].get<std::string>().empty())
                    throw ParseError(std::string("data policy: allowlist ") + key +
                                     " must be a non-empty string");
                *slot = item[key].get<std::string>();
                if (slot->find('*') != std::string::npos)
                    throw ParseError("data policy: wildcards are not permitted in v1");
            }
            policy.allowlist.insert(std::move(entry));
        }
    }
    return policy;
}

inline std::string serialize_policy(const DataPolicy& policy) {
    nlohmann::ordered_json doc;
    auto cats = nlohmann::ordered_json::array();
    for (auto c : kAllPiiCategories)
        if (policy.permitted_categories.contains(c))
            cats.push_back(std::string(pii_category_name(c)));
    doc["permitted_categories"] = cats;
    auto allow = nlohmann::ordered_json::array();
    for (const auto& entry : policy.allowlist) {
        nlohmann::ordered_json e;
        e["database_id"] = entry.database_id;
        e["table_name"] = entry.table_name;
        e["field_name"] = entry.field_name;
        allow.push_back(e);
    }
    doc["allowlist"] = allow;
    return doc.dump(2) + "\n";
}

}  // namespace gdprscan::pii
