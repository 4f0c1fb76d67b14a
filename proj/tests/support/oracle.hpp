#pragma once

// Brute-force oracle: every rule predicate re-coded in straight-line style,
// independent of the gdprscan evaluators. The engine must agree with this on
// the exposure identity tuple (rule, region, kind, id, discriminator).

#include <map>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "gdprscan/model.hpp"
#include "gdprscan/rules.hpp"

namespace oracle {

using namespace gdprscan;

struct Violation {
    std::string rule;
    std::string region;
    std::string kind;
    std::string id;
    std::string discriminator;

    auto operator<=>(const Violation&) const = default;
};

inline std::string kind_text(ResourceKind k) {
    switch (k) {
        case ResourceKind::Server: return "server";
        case ResourceKind::ServerStorage: return "server_storage";
        case ResourceKind::Database: return "database";
        case ResourceKind::Firewall: return "firewall";
        case ResourceKind::LoadBalancer: return "load_balancer";
        case ResourceKind::CloudStorage: return "cloud_storage";
        case ResourceKind::AccessPolicy: return "access_policy";
        case ResourceKind::Router: return "router";
    }
    return "?";
}

inline bool catch_all(const std::string& cidr) {
    auto slash = cidr.rfind('/');
    return slash != std::string::npos && cidr.substr(slash + 1) == "0";
}

inline bool missing_purpose(const std::optional<std::string>& tag) {
    if (!tag.has_value()) return true;
    for (char c : *tag)
        if (c != ' ' && c != '\t') return false;
    return true;
}

inline std::string ports_text(const PortRange& pr) {
    if (!pr.bounds.has_value()) return "all";
    std::ostringstream os;
    os << pr.bounds->first;
    if (pr.bounds->second != pr.bounds->first) os << "-" << pr.bounds->second;
    return os.str();
}

inline bool covers_port(const PortRange& pr, int port) {
    if (!pr.bounds.has_value()) return true;
    return pr.bounds->first <= port && port <= pr.bounds->second;
}

inline bool insecure_rule(const FirewallRule& rule) {
    if (rule.protocol == FwProtocol::All) return true;
    if (rule.protocol != FwProtocol::Tcp) return false;
    return covers_port(rule.port_range, 21) || covers_port(rule.port_range, 23) ||
           covers_port(rule.port_range, 25) || covers_port(rule.port_range, 80);
}

inline std::string proto_text(FwProtocol p) {
    switch (p) {
        case FwProtocol::Tcp: return "tcp";
        case FwProtocol::Udp: return "udp";
        case FwProtocol::Icmp: return "icmp";
        case FwProtocol::All: return "all";
    }
    return "?";
}

// ── Independent PII classification ───────────────────────────────────────────

inline std::vector<std::string> regex_tokens(const std::string& name) {
    static const std::regex kToken("[A-Z]?[a-z]+|[A-Z]+(?![a-z])|[0-9]+");
    std::vector<std::string> tokens;
    for (auto it = std::sregex_iterator(name.begin(), name.end(), kToken);
         it != std::sregex_iterator(); ++it) {
        std::string tok = it->str();
        for (auto& c : tok) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        tokens.push_back(tok);
    }
    return tokens;
}

inline std::optional<PiiCategory> name_category(const std::string& name) {
    auto tokens = regex_tokens(name);
    std::string joined = "|";
    for (const auto& t : tokens) joined += t + "|";
    auto has = [&](const std::string& pattern) {
        return joined.find("|" + pattern + "|") != std::string::npos;
    };

    // Priority mirrors the documented contract: specific composites first,
    // generic address-like categories last.
    if (has("ip") || has("ipaddr") || has("ipv4") || has("ipv6")) return PiiCategory::IpAddress;
    if (has("email") || has("e|mail") || has("mail")) return PiiCategory::Email;
    if (has("ssn") || has("national|id") || has("nationalid") || has("passport"))
        return PiiCategory::NationalId;
    if (has("udid") || has("imei") || has("device|id") || has("deviceid"))
        return PiiCategory::DeviceId;
    if (has("dob") || has("birthdate") || has("birth|date") || has("date|of|birth") ||
        has("birthday"))
        return PiiCategory::BirthDate;
    if (has("lat") || has("lng") || has("lon") || has("latitude") || has("longitude") ||
        has("geolocation"))
        return PiiCategory::Geolocation;
    if (has("phone") || has("tel") || has("telephone") || has("mobile") || has("msisdn"))
        return PiiCategory::Phone;
    if (has("first|name") || has("last|name") || has("full|name") || has("firstname") ||
        has("lastname") || has("fullname") || has("surname"))
        return PiiCategory::PersonName;
    if (has("address") || has("street") || has("postcode") || has("zip") || has("zipcode") ||
        has("postal|code"))
        return PiiCategory::PostalAddress;
    return std::nullopt;
}

inline std::optional<PiiCategory> value_category(const std::string& value) {
    static const std::regex kEmail(
        R"(^[A-Za-z0-9._%+-]+@[A-Za-z0-9-]+(\.[A-Za-z0-9-]+)*\.[A-Za-z]{2,}$)");
    static const std::regex kIp(R"(^(\d{1,3})\.(\d{1,3})\.(\d{1,3})\.(\d{1,3})$)");
    static const std::regex kPhone(R"(^\+?[0-9 ().-]*$)");
    static const std::regex kDate(R"(^(\d{4})-(\d{2})-(\d{2})$)");

    if (std::regex_match(value, kEmail)) return PiiCategory::Email;

    std::smatch m;
    if (std::regex_match(value, m, kIp)) {
        bool ok = true;
        for (int i = 1; i <= 4; ++i)
            if (std::stoi(m[i].str()) > 255) ok = false;
        if (ok) return PiiCategory::IpAddress;
    }

    if (std::regex_match(value, kPhone)) {
        int digits = 0;
        for (char c : value)
            if (c >= '0' && c <= '9') ++digits;
        if (digits >= 7) return PiiCategory::Phone;
    }

    if (std::regex_match(value, m, kDate)) {
        int year = std::stoi(m[1].str());
        int month = std::stoi(m[2].str());
        int day = std::stoi(m[3].str());
        std::time_t t = std::time(nullptr);
        std::tm tm{};
        gmtime_r(&t, &tm);
        const int this_year = tm.tm_year + 1900;
        static const int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
        if (year >= 1900 && year <= this_year && month >= 1 && month <= 12) {
            int max_day = kDays[month - 1];
            if (month == 2 && ((year % 4 == 0 && year % 100 != 0) || year % 400 == 0))
                max_day = 29;
            if (day >= 1 && day <= max_day) return PiiCategory::BirthDate;
        }
    }
    return std::nullopt;
}

// ── Straight-line rule predicates ────────────────────────────────────────────

inline std::vector<Violation> expected_violations(const Snapshot& snapshot,
                                                  const DataPolicy& policy,
                                                  const rules::RuleCatalog& catalog) {
    std::vector<Violation> out;
    auto on = [&](int n) { return catalog.is_enabled(static_cast<RuleId>(n)); };
    auto add = [&](int n, const ResourceRef& ref, const std::string& disc) {
        out.push_back({"R" + std::to_string(n), ref.region, kind_text(ref.kind), ref.id, disc});
    };

    for (const auto& resource : snapshot.resources) {
        if (const auto* db = std::get_if<Database>(&resource)) {
            if (on(1) && !db->encrypted) add(1, db->ref, "encrypted");
            if (on(19)) {
                for (const auto& table : db->tables)
                    if (!table.ttl_enabled) add(19, db->ref, table.name);
            }
            if (on(18)) {
                for (const auto& table : db->tables) {
                    for (const auto& field : table.fields) {
                        std::optional<PiiCategory> category = name_category(field.name);
                        if (!category.has_value()) {
                            for (const auto& row : table.sampled_rows) {
                                auto cell = row.find(field.name);
                                if (cell == row.end()) continue;
                                auto vc = value_category(cell->second);
                                if (vc.has_value()) {
                                    category = vc;
                                    break;
                                }
                            }
                        }
                        if (!category.has_value()) continue;
                        if (policy.permitted_categories.count(*category) > 0) continue;
                        if (policy.allowlist.count({db->ref.id, table.name, field.name}) > 0)
                            continue;
                        add(18, db->ref, table.name + "." + field.name);
                    }
                }
            }
        } else if (const auto* srv = std::get_if<Server>(&resource)) {
            if (on(2) && missing_purpose(srv->purpose_tag)) add(2, srv->ref, "purpose_tag");
            if (on(3) && missing_purpose(srv->purpose_tag) && srv->state == ServerState::Stopped)
                add(3, srv->ref, "state");
            if (on(4) && srv->attached_firewall_ids.empty())
                add(4, srv->ref, "attached_firewall_ids");
        } else if (const auto* vol = std::get_if<ServerStorage>(&resource)) {
            if (on(5) && !vol->encrypted) add(5, vol->ref, "encrypted");
            if (on(6) && missing_purpose(vol->purpose_tag) && !vol->attached_server_id.has_value())
                add(6, vol->ref, "purpose_tag");
        } else if (const auto* fw = std::get_if<Firewall>(&resource)) {
            for (std::size_t i = 0; i < fw->inbound_rules.size(); ++i) {
                const auto& rule = fw->inbound_rules[i];
                std::ostringstream at;
                at << "inbound[" << i << "]";
                if (on(7) && insecure_rule(rule))
                    add(7, fw->ref,
                        at.str() + ":" + proto_text(rule.protocol) + "/" +
                            ports_text(rule.port_range) + ":" + rule.cidr);
                if (on(8) && catch_all(rule.cidr)) add(8, fw->ref, at.str() + ":" + rule.cidr);
            }
            for (std::size_t i = 0; i < fw->outbound_rules.size(); ++i) {
                const auto& rule = fw->outbound_rules[i];
                std::ostringstream at;
                at << "outbound[" << i << "]";
                if (on(7) && insecure_rule(rule))
                    add(7, fw->ref,
                        at.str() + ":" + proto_text(rule.protocol) + "/" +
                            ports_text(rule.port_range) + ":" + rule.cidr);
                if (on(9) && catch_all(rule.cidr)) add(9, fw->ref, at.str() + ":" + rule.cidr);
            }
        } else if (const auto* lb = std::get_if<LoadBalancer>(&resource)) {
            bool any_secure_front = false;
            for (std::size_t i = 0; i < lb->listeners.size(); ++i) {
                const auto& l = lb->listeners[i];
                const bool front_secure = l.frontend_protocol == ListenerProtocol::Https ||
                                          l.frontend_protocol == ListenerProtocol::Tls;
                const bool back_secure = l.backend_protocol == ListenerProtocol::Https ||
                                         l.backend_protocol == ListenerProtocol::Tls;
                if (front_secure) any_secure_front = true;
                if (on(10) && (!front_secure || !back_secure)) {
                    std::ostringstream at;
                    at << "listener[" << i << "]";
                    add(10, lb->ref, at.str());
                }
            }
            if (on(11) && !any_secure_front) add(11, lb->ref, "listeners");
        } else if (const auto* cs = std::get_if<CloudStorage>(&resource)) {
            if (on(12) && !cs->encrypted) add(12, cs->ref, "encrypted");
            for (std::size_t i = 0; i < cs->read_grants.size(); ++i) {
                const auto g = cs->read_grants[i].grantee;
                if (on(13) && (g == Grantee::Public || g == Grantee::AnyAuthenticated)) {
                    std::ostringstream at;
                    at << "read_grant[" << i << "]";
                    add(13, cs->ref, at.str());
                }
            }
            for (std::size_t i = 0; i < cs->write_grants.size(); ++i) {
                const auto g = cs->write_grants[i].grantee;
                if (on(14) && (g == Grantee::Public || g == Grantee::AnyAuthenticated)) {
                    std::ostringstream at;
                    at << "write_grant[" << i << "]";
                    add(14, cs->ref, at.str());
                }
            }
        } else if (const auto* ap = std::get_if<AccessPolicy>(&resource)) {
            for (std::size_t i = 0; i < ap->statements.size(); ++i) {
                const auto& st = ap->statements[i];
                if (st.effect == PolicyEffect::Deny) continue;
                bool wild_action = false;
                for (const auto& a : st.actions) {
                    if (a == "*") wild_action = true;
                    if (a.size() >= 2 && a.compare(a.size() - 2, 2, ":*") == 0) wild_action = true;
                }
                bool wild_resource = false;
                for (const auto& r : st.resources)
                    if (r == "*") wild_resource = true;
                std::ostringstream at;
                at << "statement[" << i << "]";
                if (on(15) && wild_action) add(15, ap->ref, at.str() + ":actions");
                if (on(16) && wild_resource) add(16, ap->ref, at.str() + ":resources");
            }
        } else if (const auto* rt = std::get_if<Router>(&resource)) {
            for (std::size_t i = 0; i < rt->routes.size(); ++i) {
                const auto& route = rt->routes[i];
                if (on(17) && route.target == RouteTarget::InternetGateway &&
                    catch_all(route.destination_cidr)) {
                    std::ostringstream at;
                    at << "route[" << i << "]";
                    add(17, rt->ref, at.str());
                }
            }
        }
    }
    return out;
}

inline std::vector<Violation> from_report(const std::vector<Exposure>& exposures) {
    std::vector<Violation> out;
    for (const auto& e : exposures)
        out.push_back({rule_name(e.rule_id), e.resource.region, kind_text(e.resource.kind),
                       e.resource.id, e.discriminator});
    return out;
}

inline std::vector<Violation> sorted(std::vector<Violation> v) {
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace oracle
