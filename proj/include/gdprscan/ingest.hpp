#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "gdprscan/cidr.hpp"
#include "gdprscan/iso8601.hpp"
#include "gdprscan/model.hpp"

namespace gdprscan::ingest {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

// ── Structural parsing ───────────────────────────────────────────────────────
// parse_snapshot enforces shape only (types, known enums, no unknown keys);
// semantic invariants are validate_snapshot's job so that `validate` can
// report all of them at once.

namespace detail {

[[noreturn]] inline void fail(const std::string& path, const std::string& message) {
    throw ParseError(path + ": " + message);
}

inline void check_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                       const std::string& path) {
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            fail(path, "unknown key '" + key + "'");
    }
}

inline const json& require(const json& obj, const char* key, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key)) fail(path, std::string("missing key '") + key + "'");
    return obj.at(key);
}

inline std::string require_string(const json& obj, const char* key, const std::string& path) {
    const auto& v = require(obj, key, path);
    if (!v.is_string()) fail(path + "/" + key, "expected a string");
    return v.get<std::string>();
}

inline bool require_bool(const json& obj, const char* key, const std::string& path) {
    const auto& v = require(obj, key, path);
    if (!v.is_boolean()) fail(path + "/" + key, "expected a boolean");
    return v.get<bool>();
}

inline int require_int(const json& obj, const char* key, const std::string& path) {
    const auto& v = require(obj, key, path);
    if (!v.is_number_integer()) fail(path + "/" + key, "expected an integer");
    return v.get<int>();
}

inline std::optional<std::string> optional_string(const json& obj, const char* key,
                                                  const std::string& path) {
    if (!obj.contains(key)) return std::nullopt;
    if (!obj.at(key).is_string()) fail(path + "/" + key, "expected a string");
    return obj.at(key).get<std::string>();
}

inline std::vector<std::string> string_list(const json& obj, const char* key,
                                            const std::string& path) {
    if (!obj.contains(key)) return {};
    const auto& v = obj.at(key);
    if (!v.is_array()) fail(path + "/" + key, "expected an array");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_string())
            fail(path + "/" + key + "/" + std::to_string(i), "expected a string");
        out.push_back(v[i].get<std::string>());
    }
    return out;
}

template <typename Enum>
Enum require_enum(const json& obj, const char* key, const std::string& path,
                  std::optional<Enum> (*parser)(std::string_view)) {
    auto text = require_string(obj, key, path);
    auto value = parser(text);
    if (!value) fail(path + "/" + key, "unknown value '" + text + "'");
    return *value;
}

inline PortRange parse_port_range(const json& v, const std::string& path) {
    if (v.is_string()) {
        if (v.get<std::string>() != "all") fail(path, "expected \"all\" or [low, high]");
        return PortRange::all();
    }
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
        fail(path, "expected \"all\" or [low, high]");
    return PortRange::of(v[0].get<int>(), v[1].get<int>());
}

inline FirewallRule parse_firewall_rule(const json& v, const std::string& path) {
    if (!v.is_object()) fail(path, "expected an object");
    check_keys(v, {"protocol", "port_range", "cidr", "direction"}, path);
    FirewallRule rule;
    rule.protocol = require_enum<FwProtocol>(v, "protocol", path, parse_fw_protocol);
    rule.port_range = parse_port_range(require(v, "port_range", path), path + "/port_range");
    rule.cidr = require_string(v, "cidr", path);
    rule.direction = require_enum<Direction>(v, "direction", path, parse_direction);
    return rule;
}

inline Table parse_table(const json& v, const std::string& path) {
    if (!v.is_object()) fail(path, "expected an object");
    check_keys(v, {"name", "fields", "ttl_enabled", "ttl_attribute", "sampled_rows"}, path);
    Table table;
    table.name = require_string(v, "name", path);
    if (v.contains("fields")) {
        const auto& fields = v.at("fields");
        if (!fields.is_array()) fail(path + "/fields", "expected an array");
        for (std::size_t i = 0; i < fields.size(); ++i) {
            const auto fpath = path + "/fields/" + std::to_string(i);
            if (!fields[i].is_object()) fail(fpath, "expected an object");
            check_keys(fields[i], {"name", "declared_type"}, fpath);
            table.fields.push_back({require_string(fields[i], "name", fpath),
                                    require_string(fields[i], "declared_type", fpath)});
        }
    }
    table.ttl_enabled = require_bool(v, "ttl_enabled", path);
    table.ttl_attribute = optional_string(v, "ttl_attribute", path);
    if (v.contains("sampled_rows")) {
        const auto& rows = v.at("sampled_rows");
        if (!rows.is_array()) fail(path + "/sampled_rows", "expected an array");
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto rpath = path + "/sampled_rows/" + std::to_string(i);
            if (!rows[i].is_object()) fail(rpath, "expected an object");
            Row row;
            for (const auto& [key, cell] : rows[i].items()) {
                if (!cell.is_string()) fail(rpath + "/" + key, "expected a string value");
                row[key] = cell.get<std::string>();
            }
            table.sampled_rows.push_back(std::move(row));
        }
    }
    return table;
}

inline Resource parse_resource(const json& v, const std::string& path) {
    if (!v.is_object()) fail(path, "expected an object");
    auto kind_text = require_string(v, "kind", path);
    auto kind = parse_kind(kind_text);
    if (!kind) fail(path + "/kind", "unknown resource kind '" + kind_text + "'");

    ResourceRef ref;
    ref.kind = *kind;
    ref.region = require_string(v, "region", path);
    ref.id = require_string(v, "id", path);
    ref.name = optional_string(v, "name", path);

    auto list_of = [&](const char* key, auto parser) {
        using Item = decltype(parser(v, path));
        std::vector<Item> out;
        if (!v.contains(key)) return out;
        const auto& arr = v.at(key);
        if (!arr.is_array()) fail(path + "/" + key, "expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i)
            out.push_back(parser(arr[i], path + "/" + key + "/" + std::to_string(i)));
        return out;
    };

    switch (*kind) {
        case ResourceKind::Server: {
            check_keys(v,
                       {"kind", "region", "id", "name", "state", "purpose_tag",
                        "attached_firewall_ids", "attached_storage_ids"},
                       path);
            Server server;
            server.ref = ref;
            server.state = require_enum<ServerState>(v, "state", path, parse_server_state);
            server.purpose_tag = optional_string(v, "purpose_tag", path);
            server.attached_firewall_ids = string_list(v, "attached_firewall_ids", path);
            server.attached_storage_ids = string_list(v, "attached_storage_ids", path);
            return server;
        }
        case ResourceKind::ServerStorage: {
            check_keys(
                v, {"kind", "region", "id", "name", "encrypted", "attached_server_id", "purpose_tag"},
                path);
            ServerStorage vol;
            vol.ref = ref;
            vol.encrypted = require_bool(v, "encrypted", path);
            vol.attached_server_id = optional_string(v, "attached_server_id", path);
            vol.purpose_tag = optional_string(v, "purpose_tag", path);
            return vol;
        }
        case ResourceKind::Database: {
            check_keys(v, {"kind", "region", "id", "name", "encrypted", "tables"}, path);
            Database db;
            db.ref = ref;
            db.encrypted = require_bool(v, "encrypted", path);
            db.tables = list_of("tables", parse_table);
            return db;
        }
        case ResourceKind::Firewall: {
            check_keys(v, {"kind", "region", "id", "name", "inbound_rules", "outbound_rules"},
                       path);
            Firewall fw;
            fw.ref = ref;
            fw.inbound_rules = list_of("inbound_rules", parse_firewall_rule);
            fw.outbound_rules = list_of("outbound_rules", parse_firewall_rule);
            return fw;
        }
        case ResourceKind::LoadBalancer: {
            check_keys(v, {"kind", "region", "id", "name", "listeners"}, path);
            LoadBalancer lb;
            lb.ref = ref;
            lb.listeners = list_of("listeners", [](const json& l, const std::string& lpath) {
                if (!l.is_object()) fail(lpath, "expected an object");
                check_keys(
                    l, {"frontend_protocol", "frontend_port", "backend_protocol", "backend_port"},
                    lpath);
                Listener listener;
                listener.frontend_protocol = require_enum<ListenerProtocol>(
                    l, "frontend_protocol", lpath, parse_listener_protocol);
                listener.frontend_port = require_int(l, "frontend_port", lpath);
                listener.backend_protocol = require_enum<ListenerProtocol>(
                    l, "backend_protocol", lpath, parse_listener_protocol);
                listener.backend_port = require_int(l, "backend_port", lpath);
                return listener;
            });
            return lb;
        }
        case ResourceKind::CloudStorage: {
            check_keys(v, {"kind", "region", "id", "name", "encrypted", "read_grants",
                           "write_grants"},
                       path);
            CloudStorage cs;
            cs.ref = ref;
            cs.encrypted = require_bool(v, "encrypted", path);
            auto parse_grant = [](const json& g, const std::string& gpath) {
                if (!g.is_object()) fail(gpath, "expected an object");
                check_keys(g, {"grantee", "principal_id"}, gpath);
                AccessGrant grant;
                grant.grantee = require_enum<Grantee>(g, "grantee", gpath, parse_grantee);
                grant.principal_id = optional_string(g, "principal_id", gpath);
                return grant;
            };
            cs.read_grants = list_of("read_grants", parse_grant);
            cs.write_grants = list_of("write_grants", parse_grant);
            return cs;
        }
        case ResourceKind::AccessPolicy: {
            check_keys(v, {"kind", "region", "id", "name", "statements"}, path);
            AccessPolicy ap;
            ap.ref = ref;
            ap.statements = list_of("statements", [](const json& s, const std::string& spath) {
                if (!s.is_object()) fail(spath, "expected an object");
                check_keys(s, {"effect", "actions", "resources"}, spath);
                PolicyStatement st;
                st.effect = require_enum<PolicyEffect>(s, "effect", spath, parse_policy_effect);
                st.actions = string_list(s, "actions", spath);
                st.resources = string_list(s, "resources", spath);
                return st;
            });
            return ap;
        }
        case ResourceKind::Router: {
            check_keys(v, {"kind", "region", "id", "name", "routes"}, path);
            Router rt;
            rt.ref = ref;
            rt.routes = list_of("routes", [](const json& r, const std::string& rpath) {
                if (!r.is_object()) fail(rpath, "expected an object");
                check_keys(r, {"destination_cidr", "target"}, rpath);
                Route route;
                route.destination_cidr = require_string(r, "destination_cidr", rpath);
                route.target = require_enum<RouteTarget>(r, "target", rpath, parse_route_target);
                return route;
            });
            return rt;
        }
    }
    fail(path, "unhandled resource kind");
}

}  // namespace detail

inline Snapshot parse_snapshot(std::string_view bytes) {
    json doc;
    try {
        doc = json::parse(bytes);
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed snapshot document: ") + e.what());
    }
    if (!doc.is_object()) detail::fail("", "expected a JSON object");
    detail::check_keys(doc, {"schema_version", "provider_id", "generated_at", "resources"}, "");

    Snapshot snapshot;
    snapshot.schema_version = detail::require_string(doc, "schema_version", "");
    snapshot.provider_id = detail::require_string(doc, "provider_id", "");
    snapshot.generated_at = detail::require_string(doc, "generated_at", "");

    const auto& resources = detail::require(doc, "resources", "");
    if (!resources.is_array()) detail::fail("/resources", "expected an array");
    for (std::size_t i = 0; i < resources.size(); ++i)
        snapshot.resources.push_back(
            detail::parse_resource(resources[i], "/resources/" + std::to_string(i)));
    return snapshot;
}

// ── Canonical serialization ──────────────────────────────────────────────────
// Fixed key order, resource order preserved as given. Equal snapshots
// serialize to identical bytes.

namespace detail {

inline ojson port_range_to_json(const PortRange& pr) {
    if (pr.is_all()) return "all";
    return ojson::array({pr.bounds->first, pr.bounds->second});
}

inline ojson firewall_rule_to_json(const FirewallRule& rule) {
    ojson o;
    o["protocol"] = fw_protocol_name(rule.protocol);
    o["port_range"] = port_range_to_json(rule.port_range);
    o["cidr"] = rule.cidr;
    o["direction"] = direction_name(rule.direction);
    return o;
}

inline ojson resource_to_json(const Resource& resource) {
    ojson o;
    const auto& ref = resource_ref(resource);
    o["kind"] = kind_name(ref.kind);
    o["region"] = ref.region;
    o["id"] = ref.id;
    if (ref.name) o["name"] = *ref.name;

    std::visit(
        [&](const auto& r) {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, Server>) {
                o["state"] = server_state_name(r.state);
                if (r.purpose_tag) o["purpose_tag"] = *r.purpose_tag;
                o["attached_firewall_ids"] = r.attached_firewall_ids;
                o["attached_storage_ids"] = r.attached_storage_ids;
            } else if constexpr (std::is_same_v<T, ServerStorage>) {
                o["encrypted"] = r.encrypted;
                if (r.attached_server_id) o["attached_server_id"] = *r.attached_server_id;
                if (r.purpose_tag) o["purpose_tag"] = *r.purpose_tag;
            } else if constexpr (std::is_same_v<T, Database>) {
                o["encrypted"] = r.encrypted;
                auto tables = ojson::array();
                for (const auto& t : r.tables) {
                    ojson table;
                    table["name"] = t.name;
                    auto fields = ojson::array();
                    for (const auto& f : t.fields) {
                        ojson field;
                        field["name"] = f.name;
                        field["declared_type"] = f.declared_type;
                        fields.push_back(field);
                    }
                    table["fields"] = fields;
                    table["ttl_enabled"] = t.ttl_enabled;
                    if (t.ttl_attribute) table["ttl_attribute"] = *t.ttl_attribute;
                    auto rows = ojson::array();
                    for (const auto& row : t.sampled_rows) {
                        ojson r2(ojson::value_t::object);
                        for (const auto& [k, v2] : row) r2[k] = v2;
                        rows.push_back(r2);
                    }
                    table["sampled_rows"] = rows;
                    tables.push_back(table);
                }
                o["tables"] = tables;
            } else if constexpr (std::is_same_v<T, Firewall>) {
                auto dump_rules = [](const std::vector<FirewallRule>& list) {
                    auto arr = ojson::array();
                    for (const auto& rule : list) arr.push_back(firewall_rule_to_json(rule));
                    return arr;
                };
                o["inbound_rules"] = dump_rules(r.inbound_rules);
                o["outbound_rules"] = dump_rules(r.outbound_rules);
            } else if constexpr (std::is_same_v<T, LoadBalancer>) {
                auto arr = ojson::array();
                for (const auto& l : r.listeners) {
                    ojson listener;
                    listener["frontend_protocol"] = listener_protocol_name(l.frontend_protocol);
                    listener["frontend_port"] = l.frontend_port;
                    listener["backend_protocol"] = listener_protocol_name(l.backend_protocol);
                    listener["backend_port"] = l.backend_port;
                    arr.push_back(listener);
                }
                o["listeners"] = arr;
            } else if constexpr (std::is_same_v<T, CloudStorage>) {
                o["encrypted"] = r.encrypted;
                auto dump_grants = [](const std::vector<AccessGrant>& list) {
                    auto arr = ojson::array();
                    for (const auto& g : list) {
                        ojson grant;
                        grant["grantee"] = grantee_name(g.grantee);
                        if (g.principal_id) grant["principal_id"] = *g.principal_id;
                        arr.push_back(grant);
                    }
                    return arr;
                };
                o["read_grants"] = dump_grants(r.read_grants);
                o["write_grants"] = dump_grants(r.write_grants);
            } else if constexpr (std::is_same_v<T, AccessPolicy>) {
                auto arr = ojson::array();
                for (const auto& s : r.statements) {
                    ojson st;
                    st["effect"] = policy_effect_name(s.effect);
                    st["actions"] = s.actions;
                    st["resources"] = s.resources;
                    arr.push_back(st);
                }
                o["statements"] = arr;
            } else if constexpr (std::is_same_v<T, Router>) {
                auto arr = ojson::array();
                for (const auto& rt : r.routes) {
                    ojson route;
                    route["destination_cidr"] = rt.destination_cidr;
                    route["target"] = route_target_name(rt.target);
                    arr.push_back(route);
                }
                o["routes"] = arr;
            }
        },
        resource);
    return o;
}

}  // namespace detail

inline std::string serialize_snapshot(const Snapshot& snapshot) {
    ojson doc;
    doc["schema_version"] = snapshot.schema_version;
    doc["provider_id"] = snapshot.provider_id;
    doc["generated_at"] = snapshot.generated_at;
    auto resources = ojson::array();
    for (const auto& r : snapshot.resources) resources.push_back(detail::resource_to_json(r));
    doc["resources"] = resources;
    return doc.dump(2) + "\n";
}

// ── Semantic validation ──────────────────────────────────────────────────────

inline constexpr std::int64_t kClockSkewToleranceSeconds = 24 * 60 * 60;

// Total function; never throws. Errors sort before warnings, then by path.
// `now` is injectable so callers get reproducible results.
inline std::vector<ValidationIssue> validate_snapshot(
    const Snapshot& snapshot, std::int64_t now = iso8601::now_epoch()) {
    std::vector<ValidationIssue> issues;
    auto error = [&](std::string path, std::string message) {
        issues.push_back({Severity::Error, std::move(path), std::move(message)});
    };
    auto warning = [&](std::string path, std::string message) {
        issues.push_back({Severity::Warning, std::move(path), std::move(message)});
    };

    if (snapshot.schema_version != kSchemaVersion)
        error("/schema_version", "unknown schema_version '" + snapshot.schema_version + "'");

    if (auto at = iso8601::parse_utc(snapshot.generated_at)) {
        if (*at > now + kClockSkewToleranceSeconds)
            error("/generated_at", "generated_at '" + snapshot.generated_at +
                                       "' is more than 24h in the future");
    } else {
        error("/generated_at",
              "'" + snapshot.generated_at + "' is not a YYYY-MM-DDTHH:MM:SSZ timestamp");
    }

    // Identity index for duplicate and dangling-reference checks.
    std::set<std::tuple<std::string, ResourceKind, std::string>> seen;
    std::set<std::pair<ResourceKind, std::string>> ids_by_kind;
    for (const auto& resource : snapshot.resources) {
        const auto& ref = resource_ref(resource);
        ids_by_kind.insert({ref.kind, ref.id});
    }

    for (std::size_t i = 0; i < snapshot.resources.size(); ++i) {
        const auto& resource = snapshot.resources[i];
        const auto& ref = resource_ref(resource);
        const std::string base = "/resources/" + std::to_string(i);

        if (ref.id.empty()) error(base + "/id", "id must be non-empty");
        if (ref.region.empty()) error(base + "/region", "region must be non-empty");

        if (!ref.id.empty()) {
            auto key = std::tuple(ref.region, ref.kind, ref.id);
            if (!seen.insert(key).second)
                error(base, "duplicate id '" + ref.id + "' for kind '" +
                                std::string(kind_name(ref.kind)) + "' in region '" + ref.region +
                                "'");
        }

        auto check_reference = [&](const std::string& path, ResourceKind kind,
                                   const std::string& id) {
            if (!ids_by_kind.contains({kind, id}))
                warning(path, "references " + std::string(kind_name(kind)) + " '" + id +
                                  "' which is not in the snapshot");
        };

        std::visit(
            [&](const auto& r) {
                using T = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<T, Server>) {
                    for (std::size_t j = 0; j < r.attached_firewall_ids.size(); ++j)
                        check_reference(base + "/attached_firewall_ids/" + std::to_string(j),
                                        ResourceKind::Firewall, r.attached_firewall_ids[j]);
                    for (std::size_t j = 0; j < r.attached_storage_ids.size(); ++j)
                        check_reference(base + "/attached_storage_ids/" + std::to_string(j),
                                        ResourceKind::ServerStorage, r.attached_storage_ids[j]);
                } else if constexpr (std::is_same_v<T, ServerStorage>) {
                    if (r.attached_server_id)
                        check_reference(base + "/attached_server_id", ResourceKind::Server,
                                        *r.attached_server_id);
                } else if constexpr (std::is_same_v<T, Database>) {
                    std::set<std::string> table_names;
                    for (std::size_t j = 0; j < r.tables.size(); ++j) {
                        const auto& t = r.tables[j];
                        const std::string tbase = base + "/tables/" + std::to_string(j);
                        if (t.name.empty()) error(tbase + "/name", "table name must be non-empty");
                        if (!t.name.empty() && !table_names.insert(t.name).second)
                            error(tbase + "/name", "duplicate table name '" + t.name + "'");

                        std::set<std::string> field_names;
                        for (std::size_t k = 0; k < t.fields.size(); ++k) {
                            const auto& f = t.fields[k];
                            const std::string fpath =
                                tbase + "/fields/" + std::to_string(k) + "/name";
                            if (f.name.empty()) error(fpath, "field name must be non-empty");
                            if (!f.name.empty() && !field_names.insert(f.name).second)
                                error(fpath, "duplicate field name '" + f.name + "'");
                        }

                        if (t.ttl_enabled && !t.ttl_attribute)
                            error(tbase + "/ttl_attribute",
                                  "ttl_enabled is set but ttl_attribute is missing");
                        if (t.ttl_attribute && !field_names.contains(*t.ttl_attribute))
                            error(tbase + "/ttl_attribute", "ttl_attribute '" + *t.ttl_attribute +
                                                                "' does not name a field");

                        for (std::size_t k = 0; k < t.sampled_rows.size(); ++k) {
                            for (const auto& [column, value] : t.sampled_rows[k]) {
                                if (!field_names.contains(column))
                                    error(tbase + "/sampled_rows/" + std::to_string(k),
                                          "row key '" + column + "' is not a declared field");
                            }
                        }
                    }
                } else if constexpr (std::is_same_v<T, Firewall>) {
                    auto check_rules = [&](const std::vector<FirewallRule>& list, Direction dir,
                                           const char* key) {
                        for (std::size_t j = 0; j < list.size(); ++j) {
                            const auto& rule = list[j];
                            const std::string rbase =
                                base + "/" + key + "/" + std::to_string(j);
                            if (!net::is_valid_cidr(rule.cidr))
                                error(rbase + "/cidr", "invalid CIDR '" + rule.cidr + "'");
                            if (!rule.port_range.is_all()) {
                                auto [lo, hi] = *rule.port_range.bounds;
                                if (lo < 0 || hi > 65535 || lo > hi)
                                    error(rbase + "/port_range",
                                          "port range " + rule.port_range.to_string() +
                                              " is outside 0-65535 or inverted");
                            }
                            if (rule.direction != dir)
                                warning(rbase + "/direction",
                                        "rule direction does not match its list");
                        }
                    };
                    check_rules(r.inbound_rules, Direction::Inbound, "inbound_rules");
                    check_rules(r.outbound_rules, Direction::Outbound, "outbound_rules");
                } else if constexpr (std::is_same_v<T, LoadBalancer>) {
                    if (r.listeners.empty())
                        error(base + "/listeners", "load balancer has no listeners");
                    for (std::size_t j = 0; j < r.listeners.size(); ++j) {
                        const auto& l = r.listeners[j];
                        const std::string lbase = base + "/listeners/" + std::to_string(j);
                        if (l.frontend_port < 1 || l.frontend_port > 65535)
                            error(lbase + "/frontend_port", "port outside 1-65535");
                        if (l.backend_port < 1 || l.backend_port > 65535)
                            error(lbase + "/backend_port", "port outside 1-65535");
                    }
                } else if constexpr (std::is_same_v<T, CloudStorage>) {
                    auto check_grants = [&](const std::vector<AccessGrant>& list, const char* key) {
                        for (std::size_t j = 0; j < list.size(); ++j) {
                            const auto& g = list[j];
                            const bool needs_principal = g.grantee == Grantee::Account ||
                                                         g.grantee == Grantee::PrincipalId;
                            if (needs_principal != g.principal_id.has_value())
                                error(base + "/" + key + "/" + std::to_string(j) + "/principal_id",
                                      needs_principal
                                          ? "principal_id required for this grantee"
                                          : "principal_id not allowed for this grantee");
                        }
                    };
                    check_grants(r.read_grants, "read_grants");
                    check_grants(r.write_grants, "write_grants");
                } else if constexpr (std::is_same_v<T, AccessPolicy>) {
                    if (r.statements.empty())
                        error(base + "/statements", "access policy has no statements");
                    for (std::size_t j = 0; j < r.statements.size(); ++j) {
                        const std::string sbase = base + "/statements/" + std::to_string(j);
                        if (r.statements[j].actions.empty())
                            error(sbase + "/actions", "statement has no actions");
                        if (r.statements[j].resources.empty())
                            error(sbase + "/resources", "statement has no resources");
                    }
                } else if constexpr (std::is_same_v<T, Router>) {
                    for (std::size_t j = 0; j < r.routes.size(); ++j) {
                        if (!net::is_valid_cidr(r.routes[j].destination_cidr))
                            error(base + "/routes/" + std::to_string(j) + "/destination_cidr",
                                  "invalid CIDR '" + r.routes[j].destination_cidr + "'");
                    }
                }
            },
            resource);
    }

    std::sort(issues.begin(), issues.end(), [](const ValidationIssue& a, const ValidationIssue& b) {
        const bool aw = a.severity != Severity::Error;
        const bool bw = b.severity != Severity::Error;
        return std::tie(aw, a.path, a.message) < std::tie(bw, b.path, b.message);
    });
    return issues;
}

inline bool has_errors(const std::vector<ValidationIssue>& issues) {
    return std::any_of(issues.begin(), issues.end(),
                       [](const ValidationIssue& i) { return i.severity == Severity::Error; });
}

// Parse + validate. Warnings are tolerated; the first error is fatal.
inline Snapshot load_snapshot(std::string_view bytes, std::int64_t now = iso8601::now_epoch()) {
    Snapshot snapshot = parse_snapshot(bytes);
    auto issues = validate_snapshot(snapshot, now);
    if (has_errors(issues)) {
        const auto& first = issues.front();
        throw ValidationFailure("invalid snapshot: " + first.path + ": " + first.message,
                                std::move(issues));
    }
    return snapshot;
}

// ── Provider client ──────────────────────────────────────────────────────────

struct ProviderPage {
    std::vector<Resource> resources;
    std::optional<std::string> next_token;
};

class ProviderClient {
public:
    virtual ~ProviderClient() = default;
    virtual std::string provider_id() const = 0;
    virtual ProviderPage list_resources(ResourceKind kind, const std::string& region,
                                        const std::optional<std::string>& page_token) = 0;
    virtual std::vector<Row> sample_rows(const std::string& database_id,
                                         const std::string& table_name, std::size_t limit) = 0;
};

inline constexpr std::size_t kDefaultSamplingCap = 100;

// Assembles a snapshot from a provider: all pages, all kinds, all requested
// regions, with each database table carrying at most sampling_cap sampled
// rows. Resources come back canonically sorted so repagination cannot change
// the result.
inline Snapshot fetch_inventory(ProviderClient& client, const std::vector<std::string>& regions,
                                std::size_t sampling_cap = kDefaultSamplingCap,
                                std::int64_t now = iso8601::now_epoch()) {
    if (regions.empty()) throw ProviderError("fetch_inventory: no regions given");

    Snapshot snapshot;
    snapshot.provider_id = client.provider_id();
    snapshot.generated_at = iso8601::format_utc(now);

    for (const auto& region : regions) {
        for (auto kind : kAllKinds) {
            std::optional<std::string> token;
            std::set<std::string> seen_tokens;
            while (true) {
                ProviderPage page;
                try {
                    page = client.list_resources(kind, region, token);
                } catch (const std::exception& e) {
                    throw ProviderError("while listing " + std::string(kind_name(kind)) + " in " +
                                        region + ": " + e.what());
                }
                for (auto& resource : page.resources)
                    snapshot.resources.push_back(std::move(resource));
                if (!page.next_token) break;
                if (!seen_tokens.insert(*page.next_token).second)
                    throw ProviderError("pagination loop while listing " +
                                        std::string(kind_name(kind)) + " in " + region +
                                        ": token '" + *page.next_token + "' repeated");
                token = page.next_token;
            }
        }
    }

    for (auto& resource : snapshot.resources) {
        auto* db = std::get_if<Database>(&resource);
        if (!db) continue;
        for (auto& table : db->tables) {
            std::vector<Row> rows;
            try {
                rows = client.sample_rows(db->ref.id, table.name, sampling_cap);
            } catch (const std::exception& e) {
                throw ProviderError("while sampling " + db->ref.id + "/" + table.name + ": " +
                                    e.what());
            }
            if (rows.size() > sampling_cap) rows.resize(sampling_cap);
            table.sampled_rows = std::move(rows);
        }
    }

    std::sort(snapshot.resources.begin(), snapshot.resources.end(), canonical_resource_less);
    return snapshot;
}

// Serves a directory of per-kind documents ("server.json", "database.json",
// ...) page by page. The only client shipped in v1; scans in CI read
// snapshot files instead of talking to a cloud API.
class DirectoryProviderClient : public ProviderClient {
public:
    explicit DirectoryProviderClient(const std::filesystem::path& dir, std::size_t page_size = 100)
        : page_size_(page_size == 0 ? 1 : page_size) {
        namespace fs = std::filesystem;
        if (!fs::is_directory(dir))
            throw ProviderError("fixture directory '" + dir.string() + "' not found");

        if (fs::exists(dir / "provider.json")) {
            auto doc = json::parse(slurp(dir / "provider.json"));
            if (doc.is_object() && doc.contains("provider_id") && doc["provider_id"].is_string())
                provider_id_ = doc["provider_id"].get<std::string>();
        }

        for (auto kind : kAllKinds) {
            auto file = dir / (std::string(kind_name(kind)) + ".json");
            if (!fs::exists(file)) continue;
            json doc;
            try {
                doc = json::parse(slurp(file));
            } catch (const json::exception& e) {
                throw ParseError(file.string() + ": " + e.what());
            }
            if (!doc.is_array()) throw ParseError(file.string() + ": expected an array");
            for (std::size_t i = 0; i < doc.size(); ++i) {
                auto resource = detail::parse_resource(doc[i], "/" + std::to_string(i));
                if (resource_kind(resource) != kind)
                    throw ParseError(file.string() + ": resource " + std::to_string(i) +
                                     " has kind '" +
                                     std::string(kind_name(resource_kind(resource))) + "'");
                if (auto* db = std::get_if<Database>(&resource)) {
                    for (auto& table : db->tables) {
                        stored_rows_[db->ref.id][table.name] = std::move(table.sampled_rows);
                        table.sampled_rows.clear();
                    }
                }
                resources_.push_back(std::move(resource));
            }
        }
    }

    std::string provider_id() const override { return provider_id_; }

    ProviderPage list_resources(ResourceKind kind, const std::string& region,
                                const std::optional<std::string>& page_token) override {
        std::vector<const Resource*> matching;
        for (const auto& r : resources_) {
            const auto& ref = resource_ref(r);
            if (ref.kind == kind && ref.region == region) matching.push_back(&r);
        }

        std::size_t offset = 0;
        if (page_token) {
            try {
                offset = std::stoul(*page_token);
            } catch (const std::exception&) {
                throw ProviderError("bad page token '" + *page_token + "'");
            }
            if (offset > matching.size())
                throw ProviderError("page token '" + *page_token + "' out of range");
        }

        ProviderPage page;
        std::size_t end = std::min(offset + page_size_, matching.size());
        for (std::size_t i = offset; i < end; ++i) page.resources.push_back(*matching[i]);
        if (end < matching.size()) page.next_token = std::to_string(end);
        return page;
    }

    std::vector<Row> sample_rows(const std::string& database_id, const std::string& table_name,
                                 std::size_t limit) override {
        auto db = stored_rows_.find(database_id);
        if (db == stored_rows_.end()) return {};
        auto table = db->second.find(table_name);
        if (table == db->second.end()) return {};
        const auto& rows = table->second;
        std::vector<Row> out(rows.begin(), rows.begin() + std::min(limit, rows.size()));
        return out;
    }

private:
    static std::string slurp(const std::filesystem::path& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw ProviderError("cannot read '" + path.string() + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    }

    std::string provider_id_ = "fixture";
    std::size_t page_size_;
    std::vector<Resource> resources_;
    std::map<std::string, std::map<std::string, std::vector<Row>>> stored_rows_;
};

}  // namespace gdprscan::ingest
