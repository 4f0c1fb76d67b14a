#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "gdprscan/cidr.hpp"
#include "gdprscan/model.hpp"

namespace gdprscan::rules {

// ── Catalog ──────────────────────────────────────────────────────────────────

struct CatalogEntry {
    Principle principle = Principle::IntegrityConfidentiality;
    std::string title;
    bool enabled = true;

    bool operator==(const CatalogEntry&) const = default;
};

struct RuleCatalog {
    std::map<RuleId, CatalogEntry> entries;

    bool is_enabled(RuleId r) const {
        auto it = entries.find(r);
        return it != entries.end() && it->second.enabled;
    }

    void disable(RuleId r) {
        auto it = entries.find(r);
        if (it != entries.end()) it->second.enabled = false;
    }

    bool is_total() const {
        if (entries.size() != kRuleCount) return false;
        for (const auto& [rule, entry] : entries)
            if (entry.principle != principle_of(rule)) return false;
        return true;
    }

    bool operator==(const RuleCatalog&) const = default;
};

inline RuleCatalog default_catalog() {
    static const std::array<std::string_view, 19> kTitles = {
        "A database must be encrypted",
        "Each server must exist with a purpose",
        "Each server without purpose must be removed",
        "Each server must have a corresponding cloud firewall",
        "Each server storage must be encrypted",
        "Each server storage must exist for a purpose",
        "Each cloud firewall must use secure protocols inbound and outbound",
        "Each cloud firewall must limit access to reliable sources",
        "Each cloud firewall must limit outbound communication to reliable sources",
        "Each load balancer must use end to end encryption",
        "Each load balancer must use secure protocols",
        "Each cloud storage resource must be encrypted",
        "Each cloud storage resource must limit access to reliable sources",
        "Each cloud storage resource must limit modification and deletion to reliable sources",
        "Each access management resource must not grant unconditional permissions",
        "Each access management resource must not grant permissions to unconditional resources",
        "Each router must limit outbound communication to reliable sources",
        "Each database must not collect personal data types outside an organization's data "
        "collection purpose",
        "Each database tuple must not live indefinitely",
    };
    RuleCatalog catalog;
    for (int n = 1; n <= kRuleCount; ++n) {
        auto rule = static_cast<RuleId>(n);
        catalog.entries[rule] = {principle_of(rule), std::string(kTitles[n - 1]), true};
    }
    return catalog;
}

// Machine-readable catalog export: {"rules": [{rule_id, principle, title, enabled}, ...]}
inline std::string serialize_catalog(const RuleCatalog& catalog) {
    nlohmann::ordered_json doc;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& [rule, entry] : catalog.entries) {
        nlohmann::ordered_json o;
        o["rule_id"] = rule_name(rule);
        o["principle"] = principle_name(entry.principle);
        o["title"] = entry.title;
        o["enabled"] = entry.enabled;
        arr.push_back(o);
    }
    doc["rules"] = arr;
    return doc.dump(2) + "\n";
}

inline RuleCatalog catalog_from_json(std::string_view bytes) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(bytes);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("rule catalog: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("rules") || !doc["rules"].is_array())
        throw ParseError("rule catalog: expected object with a 'rules' array");

    RuleCatalog catalog;
    for (const auto& o : doc["rules"]) {
        if (!o.is_object() || !o.contains("rule_id") || !o["rule_id"].is_string() ||
            !o.contains("principle") || !o["principle"].is_string() || !o.contains("title") ||
            !o["title"].is_string() || !o.contains("enabled") || !o["enabled"].is_boolean())
            throw ParseError("rule catalog: each rule needs rule_id, principle, title, enabled");
        auto rule = parse_rule_id(o["rule_id"].get<std::string>());
        auto principle = parse_principle(o["principle"].get<std::string>());
        if (!rule || !principle) throw ParseError("rule catalog: unknown rule_id or principle");
        if (*principle != principle_of(*rule))
            throw ParseError("rule catalog: principle does not match " + rule_name(*rule));
        if (catalog.entries.contains(*rule))
            throw ParseError("rule catalog: duplicate entry for " + rule_name(*rule));
        catalog.entries[*rule] = {*principle, o["title"].get<std::string>(),
                                  o["enabled"].get<bool>()};
    }
    if (!catalog.is_total()) throw ParseError("rule catalog: must cover R1-R19 exactly");
    return catalog;
}

// Insecure (protocol, port) combinations for R7: plaintext application
// protocols on their conventional ports, plus allow-all-protocols rules.
// tcp/22 (ssh) counts as secure transport. One documented constant.
inline constexpr std::array<int, 4> kInsecureTcpPorts = {21, 23, 25, 80};

inline bool is_insecure_firewall_rule(const FirewallRule& rule) {
    if (rule.protocol == FwProtocol::All) return true;
    if (rule.protocol != FwProtocol::Tcp) return false;
    return std::any_of(kInsecureTcpPorts.begin(), kInsecureTcpPorts.end(),
                       [&](int port) { return rule.port_range.contains(port); });
}

// ── Evaluators ───────────────────────────────────────────────────────────────
// Pure functions: same resource in, same exposure list out, fingerprints left
// blank (the engine computes them). Each evaluator emits only its documented
// rule ids.

namespace detail {

inline Exposure make(RuleId rule, const ResourceRef& ref, std::string detail,
                     std::string discriminator) {
    return Exposure{rule, principle_of(rule), ref, std::move(detail), std::move(discriminator), ""};
}

inline bool blank(const std::optional<std::string>& tag) {
    if (!tag) return true;
    return tag->find_first_not_of(" \t") == std::string::npos;
}

}  // namespace detail

// R1: flag a database that is not encrypted at rest.
inline std::vector<Exposure> eval_database_ic(const Database& db) {
    std::vector<Exposure> out;
    if (!db.encrypted)
        out.push_back(detail::make(RuleId::R1, db.ref,
                                   "database '" + db.ref.id + "' is not encrypted", "encrypted"));
    return out;
}

// R2: missing/blank purpose tag. R3: additionally stopped, so a removal
// candidate. R4: no cloud firewall attached.
inline std::vector<Exposure> eval_server(const Server& server) {
    std::vector<Exposure> out;
    const bool no_purpose = detail::blank(server.purpose_tag);
    if (no_purpose)
        out.push_back(detail::make(RuleId::R2, server.ref,
                                   "server '" + server.ref.id + "' has no purpose tag",
                                   "purpose_tag"));
    if (no_purpose && server.state == ServerState::Stopped)
        out.push_back(detail::make(
            RuleId::R3, server.ref,
            "server '" + server.ref.id + "' is stopped without a purpose; candidate for removal",
            "state"));
    if (server.attached_firewall_ids.empty())
        out.push_back(detail::make(RuleId::R4, server.ref,
                                   "server '" + server.ref.id + "' has no cloud firewall attached",
                                   "attached_firewall_ids"));
    return out;
}

// R5: unencrypted volume. R6: unattached volume without a purpose tag (an
// attached volume inherits its server's purpose).
inline std::vector<Exposure> eval_server_storage(const ServerStorage& vol) {
    std::vector<Exposure> out;
    if (!vol.encrypted)
        out.push_back(detail::make(RuleId::R5, vol.ref,
                                   "server storage '" + vol.ref.id + "' is not encrypted",
                                   "encrypted"));
    if (detail::blank(vol.purpose_tag) && !vol.attached_server_id)
        out.push_back(detail::make(
            RuleId::R6, vol.ref,
            "server storage '" + vol.ref.id + "' is unattached and has no purpose tag",
            "purpose_tag"));
    return out;
}

// R7 per rule with an insecure (protocol, port); R8 per inbound rule open to a
// catch-all source; R9 per outbound rule open to a catch-all destination.
inline std::vector<Exposure> eval_firewall(const Firewall& fw) {
    std::vector<Exposure> out;

    auto rule_tuple = [](const FirewallRule& rule) {
        return std::string(fw_protocol_name(rule.protocol)) + "/" + rule.port_range.to_string();
    };
    auto disc = [&](std::string_view dir, std::size_t i, const std::string& tail) {
        return std::string(dir) + "[" + std::to_string(i) + "]:" + tail;
    };

    auto check_direction = [&](const std::vector<FirewallRule>& list, Direction dir) {
        const std::string_view dir_name = direction_name(dir);
        for (std::size_t i = 0; i < list.size(); ++i) {
            const auto& rule = list[i];
            if (is_insecure_firewall_rule(rule)) {
                out.push_back(detail::make(
                    RuleId::R7, fw.ref,
                    std::string(dir_name) + " rule " + std::to_string(i) + " (" + rule_tuple(rule) +
                        " " + rule.cidr + ") allows an insecure protocol",
                    disc(dir_name, i, rule_tuple(rule) + ":" + rule.cidr)));
            }
            if (net::is_catch_all_cidr(rule.cidr)) {
                if (dir == Direction::Inbound) {
                    out.push_back(detail::make(
                        RuleId::R8, fw.ref,
                        "inbound rule " + std::to_string(i) + " (" + rule_tuple(rule) +
                            ") accepts traffic from catch-all source " + rule.cidr,
                        disc(dir_name, i, rule.cidr)));
                } else {
                    out.push_back(detail::make(
                        RuleId::R9, fw.ref,
                        "outbound rule " + std::to_string(i) + " (" + rule_tuple(rule) +
                            ") sends traffic to catch-all destination " + rule.cidr,
                        disc(dir_name, i, rule.cidr)));
                }
            }
        }
    };

    check_direction(fw.inbound_rules, Direction::Inbound);
    check_direction(fw.outbound_rules, Direction::Outbound);
    return out;
}

// R10 per listener that is not encrypted on both legs. R11 once per balancer
// when no listener offers a secure frontend; a mixed http+https balancer is
// not an R11 violation.
inline std::vector<Exposure> eval_load_balancer(const LoadBalancer& lb) {
    std::vector<Exposure> out;
    bool any_secure_frontend = false;
    for (std::size_t i = 0; i < lb.listeners.size(); ++i) {
        const auto& l = lb.listeners[i];
        if (is_secure_listener_protocol(l.frontend_protocol)) any_secure_frontend = true;
        if (!is_secure_listener_protocol(l.frontend_protocol) ||
            !is_secure_listener_protocol(l.backend_protocol)) {
            out.push_back(detail::make(
                RuleId::R10, lb.ref,
                "listener " + std::to_string(i) + " (" +
                    std::string(listener_protocol_name(l.frontend_protocol)) + ":" +
                    std::to_string(l.frontend_port) + " -> " +
                    std::string(listener_protocol_name(l.backend_protocol)) + ":" +
                    std::to_string(l.backend_port) + ") is not encrypted end to end",
                "listener[" + std::to_string(i) + "]"));
        }
    }
    if (!any_secure_frontend)
        out.push_back(detail::make(RuleId::R11, lb.ref,
                                   "no listener on '" + lb.ref.id +
                                       "' uses a secure frontend protocol",
                                   "listeners"));
    return out;
}

// R12 unencrypted; R13 per read grant open to the world or to any
// authenticated identity; R14 same for write grants.
inline std::vector<Exposure> eval_cloud_storage(const CloudStorage& cs) {
    std::vector<Exposure> out;
    if (!cs.encrypted)
        out.push_back(detail::make(RuleId::R12, cs.ref,
                                   "cloud storage '" + cs.ref.id + "' is not encrypted",
                                   "encrypted"));
    auto open_grant = [](const AccessGrant& g) {
        return g.grantee == Grantee::Public || g.grantee == Grantee::AnyAuthenticated;
    };
    for (std::size_t i = 0; i < cs.read_grants.size(); ++i) {
        if (open_grant(cs.read_grants[i]))
            out.push_back(detail::make(
                RuleId::R13, cs.ref,
                "read grant " + std::to_string(i) + " is open to " +
                    std::string(grantee_name(cs.read_grants[i].grantee)),
                "read_grant[" + std::to_string(i) + "]"));
    }
    for (std::size_t i = 0; i < cs.write_grants.size(); ++i) {
        if (open_grant(cs.write_grants[i]))
            out.push_back(detail::make(
                RuleId::R14, cs.ref,
                "write grant " + std::to_string(i) + " is open to " +
                    std::string(grantee_name(cs.write_grants[i].grantee)),
                "write_grant[" + std::to_string(i) + "]"));
    }
    return out;
}

// R15 per allow statement granting wildcard actions ("*" or "service:*");
// R16 per allow statement applying to the wildcard resource "*". Deny
// statements are restrictive and never flagged.
inline std::vector<Exposure> eval_access_policy(const AccessPolicy& ap) {
    std::vector<Exposure> out;
    for (std::size_t i = 0; i < ap.statements.size(); ++i) {
        const auto& st = ap.statements[i];
        if (st.effect != PolicyEffect::Allow) continue;

        auto wild_action = std::find_if(st.actions.begin(), st.actions.end(), [](const auto& a) {
            return a == "*" || (a.size() >= 2 && a.ends_with(":*"));
        });
        if (wild_action != st.actions.end())
            out.push_back(detail::make(RuleId::R15, ap.ref,
                                       "allow statement " + std::to_string(i) +
                                           " grants unconditional actions ('" + *wild_action + "')",
                                       "statement[" + std::to_string(i) + "]:actions"));

        if (std::find(st.resources.begin(), st.resources.end(), "*") != st.resources.end())
            out.push_back(detail::make(RuleId::R16, ap.ref,
                                       "allow statement " + std::to_string(i) +
                                           " applies to the unconditional resource '*'",
                                       "statement[" + std::to_string(i) + "]:resources"));
    }
    return out;
}

// R17 per route sending a catch-all destination straight to an internet
// gateway. NAT egress is mediated and not flagged.
inline std::vector<Exposure> eval_router(const Router& rt) {
    std::vector<Exposure> out;
    for (std::size_t i = 0; i < rt.routes.size(); ++i) {
        const auto& route = rt.routes[i];
        if (route.target == RouteTarget::InternetGateway &&
            net::is_catch_all_cidr(route.destination_cidr)) {
            out.push_back(detail::make(RuleId::R17, rt.ref,
                                       "route " + std::to_string(i) + " (" +
                                           route.destination_cidr +
                                           ") egresses via internet gateway",
                                       "route[" + std::to_string(i) + "]"));
        }
    }
    return out;
}

// R19 per table without a TTL/expiry mechanism.
inline std::vector<Exposure> eval_storage_limitation(const Database& db) {
    std::vector<Exposure> out;
    for (const auto& table : db.tables) {
        if (!table.ttl_enabled)
            out.push_back(detail::make(RuleId::R19, db.ref,
                                       "table '" + table.name + "' in database '" + db.ref.id +
                                           "' has no TTL/expiry mechanism",
                                       table.name));
    }
    return out;
}

}  // namespace gdprscan::rules
