#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gdprscan/model.hpp"

namespace gdprscan::report {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

// Duplicate fingerprints would break diff set semantics, so they are rejected
// whenever a report is built or parsed.
inline void check_unique_fingerprints(const std::vector<Exposure>& exposures) {
    std::set<std::string_view> seen;
    for (const auto& e : exposures)
        if (!seen.insert(e.fingerprint).second)
            throw ReportError("duplicate exposure fingerprint '" + e.fingerprint + "'");
}

// ── Canonical serialization ──────────────────────────────────────────────────
// Key order is fixed and documented; exposures are pre-sorted; equal reports
// serialize to identical bytes.

namespace detail {

inline ojson exposure_to_json(const Exposure& e) {
    ojson o;
    o["rule_id"] = rule_name(e.rule_id);
    o["principle"] = principle_name(e.principle);
    o["region"] = e.resource.region;
    o["kind"] = kind_name(e.resource.kind);
    o["id"] = e.resource.id;
    if (e.resource.name) o["name"] = *e.resource.name;
    o["detail"] = e.detail;
    o["discriminator"] = e.discriminator;
    o["fingerprint"] = e.fingerprint;
    return o;
}

inline ojson exposures_to_json(const std::vector<Exposure>& list) {
    auto arr = ojson::array();
    for (const auto& e : list) arr.push_back(exposure_to_json(e));
    return arr;
}

inline ojson summary_to_json(const Summary& s) {
    ojson o;
    auto by_kind = [](const std::map<ResourceKind, std::uint64_t>& m) {
        ojson out(ojson::value_t::object);
        for (auto kind : kAllKinds) {
            auto it = m.find(kind);
            if (it != m.end() && it->second > 0)
                out[std::string(kind_name(kind))] = it->second;
        }
        return out;
    };
    o["resources_scanned_by_kind"] = by_kind(s.resources_scanned_by_kind);
    o["exposures_by_kind"] = by_kind(s.exposures_by_kind);
    ojson by_principle(ojson::value_t::object);
    for (auto p : kAllPrinciples) {
        auto it = s.exposures_by_principle.find(p);
        if (it != s.exposures_by_principle.end() && it->second > 0)
            by_principle[std::string(principle_name(p))] = it->second;
    }
    o["exposures_by_principle"] = by_principle;
    ojson by_region(ojson::value_t::object);
    for (const auto& [region, count] : s.exposures_by_region)
        if (count > 0) by_region[region] = count;
    o["exposures_by_region"] = by_region;
    o["total_exposures"] = s.total_exposures;
    return o;
}

inline Exposure exposure_from_json(const json& o, const std::string& where) {
    if (!o.is_object()) throw ParseError(where + ": expected an object");
    auto str = [&](const char* key) {
        if (!o.contains(key) || !o.at(key).is_string())
            throw ParseError(where + ": missing string '" + key + "'");
        return o.at(key).get<std::string>();
    };
    Exposure e;
    auto rule = parse_rule_id(str("rule_id"));
    if (!rule) throw ParseError(where + ": unknown rule_id");
    e.rule_id = *rule;
    auto principle = parse_principle(str("principle"));
    if (!principle) throw ParseError(where + ": unknown principle");
    e.principle = *principle;
    if (e.principle != principle_of(e.rule_id))
        throw ParseError(where + ": principle does not match rule " + rule_name(e.rule_id));
    e.resource.region = str("region");
    auto kind = parse_kind(str("kind"));
    if (!kind) throw ParseError(where + ": unknown kind");
    e.resource.kind = *kind;
    e.resource.id = str("id");
    if (o.contains("name")) e.resource.name = str("name");
    e.detail = str("detail");
    e.discriminator = str("discriminator");
    e.fingerprint = str("fingerprint");
    return e;
}

}  // namespace detail

inline std::string serialize_report(const Report& report) {
    check_unique_fingerprints(report.exposures);
    ojson doc;
    doc["schema_version"] = report.schema_version;
    doc["scan_id"] = report.scan_id;
    doc["scanned_at"] = report.scanned_at;
    doc["snapshot_provider"] = report.snapshot_provider;
    doc["summary"] = detail::summary_to_json(report.summary);
    doc["exposures"] = detail::exposures_to_json(report.exposures);
    return doc.dump(2) + "\n";
}

inline Report parse_report(std::string_view bytes) {
    json doc;
    try {
        doc = json::parse(bytes);
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed report document: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("report: expected a JSON object");
    auto str = [&](const char* key) {
        if (!doc.contains(key) || !doc.at(key).is_string())
            throw ParseError(std::string("report: missing string '") + key + "'");
        return doc.at(key).get<std::string>();
    };

    Report report;
    report.schema_version = str("schema_version");
    report.scan_id = str("scan_id");
    report.scanned_at = str("scanned_at");
    report.snapshot_provider = str("snapshot_provider");

    if (!doc.contains("exposures") || !doc.at("exposures").is_array())
        throw ParseError("report: missing 'exposures' array");
    const auto& arr = doc.at("exposures");
    for (std::size_t i = 0; i < arr.size(); ++i)
        report.exposures.push_back(
            detail::exposure_from_json(arr[i], "/exposures/" + std::to_string(i)));
    std::sort(report.exposures.begin(), report.exposures.end(), canonical_exposure_less);
    check_unique_fingerprints(report.exposures);

    if (doc.contains("summary")) {
        const auto& s = doc.at("summary");
        if (!s.is_object()) throw ParseError("report: summary must be an object");
        auto read_kind_map = [&](const char* key, std::map<ResourceKind, std::uint64_t>& out) {
            if (!s.contains(key)) return;
            for (const auto& [k, v] : s.at(key).items()) {
                auto kind = parse_kind(k);
                if (!kind || !v.is_number_unsigned())
                    throw ParseError(std::string("report: bad entry in summary/") + key);
                out[*kind] = v.get<std::uint64_t>();
            }
        };
        read_kind_map("resources_scanned_by_kind", report.summary.resources_scanned_by_kind);
        read_kind_map("exposures_by_kind", report.summary.exposures_by_kind);
        if (s.contains("exposures_by_principle")) {
            for (const auto& [k, v] : s.at("exposures_by_principle").items()) {
                auto p = parse_principle(k);
                if (!p || !v.is_number_unsigned())
                    throw ParseError("report: bad entry in summary/exposures_by_principle");
                report.summary.exposures_by_principle[*p] = v.get<std::uint64_t>();
            }
        }
        if (s.contains("exposures_by_region")) {
            for (const auto& [k, v] : s.at("exposures_by_region").items()) {
                if (!v.is_number_unsigned())
                    throw ParseError("report: bad entry in summary/exposures_by_region");
                report.summary.exposures_by_region[k] = v.get<std::uint64_t>();
            }
        }
        if (s.contains("total_exposures")) {
            if (!s.at("total_exposures").is_number_unsigned())
                throw ParseError("report: total_exposures must be a count");
            report.summary.total_exposures = s.at("total_exposures").get<std::uint64_t>();
        }
    }
    return report;
}

// ── Text rendering ───────────────────────────────────────────────────────────

inline std::string render_text(const Report& report) {
    std::ostringstream out;
    out << "GDPR scan report " << report.scan_id << "\n";
    out << "scanned at: " << report.scanned_at << "\n";
    out << "provider:   " << report.snapshot_provider << "\n";
    out << "\n";

    out << "resources scanned:\n";
    bool any_resources = false;
    for (auto kind : kAllKinds) {
        auto it = report.summary.resources_scanned_by_kind.find(kind);
        if (it == report.summary.resources_scanned_by_kind.end() || it->second == 0) continue;
        any_resources = true;
        out << "  " << kind_name(kind);
        for (std::size_t pad = kind_name(kind).size(); pad < 16; ++pad) out << ' ';
        out << it->second << "\n";
    }
    if (!any_resources) out << "  (none)\n";
    out << "\n";

    out << "exposures by principle:\n";
    bool any_principles = false;
    for (auto p : kAllPrinciples) {
        auto it = report.summary.exposures_by_principle.find(p);
        if (it == report.summary.exposures_by_principle.end() || it->second == 0) continue;
        any_principles = true;
        out << "  " << principle_name(p);
        for (std::size_t pad = principle_name(p).size(); pad < 28; ++pad) out << ' ';
        out << it->second << "\n";
    }
    if (!any_principles) out << "  (none)\n";
    out << "\n";

    out << report.summary.total_exposures << " exposures found\n";

    RuleId current = RuleId::R1;
    bool first_group = true;
    for (const auto& e : report.exposures) {
        if (first_group || e.rule_id != current) {
            out << "\n[" << rule_name(e.rule_id) << "] " << principle_name(e.principle) << "\n";
            current = e.rule_id;
            first_group = false;
        }
        out << "  " << e.resource.region << "/" << kind_name(e.resource.kind) << "/"
            << e.resource.id;
        if (e.resource.name) out << " (" << *e.resource.name << ")";
        out << ": " << e.detail << "\n";
    }
    return out.str();
}

// ── Diffing ──────────────────────────────────────────────────────────────────

struct ReportDiff {
    std::vector<Exposure> new_exposures;        // after  \ before
    std::vector<Exposure> resolved_exposures;   // before \ after
    std::vector<Exposure> persisting_exposures; // intersection, payload from `after`
};

// Set decomposition by fingerprint. Only reports of the same schema_version
// are comparable; the fingerprint recipe may change between versions.
inline ReportDiff diff(const Report& before, const Report& after) {
    if (before.schema_version != after.schema_version)
        throw ReportError("cannot diff reports with schema_version '" + before.schema_version +
                          "' and '" + after.schema_version + "'");
    check_unique_fingerprints(before.exposures);
    check_unique_fingerprints(after.exposures);

    std::set<std::string_view> before_fps;
    for (const auto& e : before.exposures) before_fps.insert(e.fingerprint);
    std::set<std::string_view> after_fps;
    for (const auto& e : after.exposures) after_fps.insert(e.fingerprint);

    ReportDiff result;
    for (const auto& e : after.exposures) {
        if (before_fps.contains(e.fingerprint))
            result.persisting_exposures.push_back(e);
        else
            result.new_exposures.push_back(e);
    }
    for (const auto& e : before.exposures)
        if (!after_fps.contains(e.fingerprint)) result.resolved_exposures.push_back(e);

    auto sort_canonical = [](std::vector<Exposure>& v) {
        std::sort(v.begin(), v.end(), canonical_exposure_less);
    };
    sort_canonical(result.new_exposures);
    sort_canonical(result.resolved_exposures);
    sort_canonical(result.persisting_exposures);
    return result;
}

inline std::string serialize_diff(const ReportDiff& d) {
    ojson doc;
    doc["schema_version"] = std::string(kSchemaVersion);
    doc["new_exposures"] = detail::exposures_to_json(d.new_exposures);
    doc["resolved_exposures"] = detail::exposures_to_json(d.resolved_exposures);
    doc["persisting_exposures"] = detail::exposures_to_json(d.persisting_exposures);
    return doc.dump(2) + "\n";
}

inline std::string render_diff_text(const ReportDiff& d) {
    std::ostringstream out;
    out << d.new_exposures.size() << " new, " << d.resolved_exposures.size() << " resolved, "
        << d.persisting_exposures.size() << " persisting\n";
    auto section = [&](const char* label, const std::vector<Exposure>& list) {
        if (list.empty()) return;
        out << "\n" << label << ":\n";
        for (const auto& e : list)
            out << "  [" << rule_name(e.rule_id) << "] " << e.resource.region << "/"
                << kind_name(e.resource.kind) << "/" << e.resource.id << ": " << e.detail << "\n";
    };
    section("new", d.new_exposures);
    section("resolved", d.resolved_exposures);
    section("persisting", d.persisting_exposures);
    return out.str();
}

}  // namespace gdprscan::report
