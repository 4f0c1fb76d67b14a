#pragma once

// Seeded random snapshots and policies for property tests. Everything here is
// valid by construction: unique ids per (region, kind), parseable CIDRs,
// consistent TTL attributes, sampled rows drawn from declared fields.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gdprscan/model.hpp"

namespace testgen {

using namespace gdprscan;

struct Rng {
    std::mt19937_64 eng;

    explicit Rng(std::uint64_t seed) : eng(seed) {}

    int range(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng); }
    bool chance(double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(eng) < p; }

    template <typename T, std::size_t N>
    const T& pick(const std::array<T, N>& pool) {
        return pool[static_cast<std::size_t>(range(0, static_cast<int>(N) - 1))];
    }
};

inline const std::array<std::string, 3> kRegions = {"eu-1", "us-1", "ap-1"};

inline const std::array<std::string, 6> kCidrs = {
    "0.0.0.0/0", "::/0", "10.0.0.0/8", "192.168.0.0/16", "172.16.0.0/12", "2001:db8::/32"};

// Mix of PII-looking and innocuous column names, with varied separator styles.
inline const std::array<std::string, 16> kFieldNames = {
    "email",      "user_email", "contactEmail", "record_count", "payload", "phone_number",
    "note",       "ip_addr",    "created",      "expires_at",   "full_name", "zip",
    "color",      "device_id",  "ssn",          "lat"};

// Values that exercise every branch of the value classifier, including the
// near-misses (octet 256, invalid month, dotted digit runs).
inline const std::array<std::string, 11> kCellValues = {
    "alice@example.com", "bob@x.org",    "256.1.1.1", "192.168.1.10",
    "hello world",       "+1 555-123-4567", "2001-07-19", "1985-13-01",
    "42",                "x7",           "10.0.0.256"};

inline const std::array<std::string, 5> kActions = {"*", "storage:*", "storage:read", "iam:list",
                                                    "db:query"};
inline const std::array<std::string, 4> kActionResources = {"*", "bucket/a", "db/main",
                                                            "queue/jobs"};

struct IdCounters {
    int next = 0;
    std::string fresh(const char* prefix) { return std::string(prefix) + std::to_string(next++); }
};

inline std::optional<std::string> random_purpose(Rng& rng) {
    switch (rng.range(0, 4)) {
        case 0: return std::nullopt;
        case 1: return "";        // blank counts as missing
        case 2: return "  ";      // whitespace-only also counts as missing
        case 3: return "api";
        default: return "batch";
    }
}

inline Table random_table(Rng& rng, int index) {
    Table table;
    table.name = "t" + std::to_string(index);

    std::vector<std::string> names(kFieldNames.begin(), kFieldNames.end());
    std::shuffle(names.begin(), names.end(), rng.eng);
    int field_count = rng.range(0, 4);
    for (int i = 0; i < field_count; ++i) table.fields.push_back({names[i], "string"});

    if (!table.fields.empty() && rng.chance(0.5)) {
        table.ttl_enabled = true;
        table.ttl_attribute =
            table.fields[static_cast<std::size_t>(rng.range(0, field_count - 1))].name;
    }

    int row_count = table.fields.empty() ? 0 : rng.range(0, 3);
    for (int i = 0; i < row_count; ++i) {
        Row row;
        for (const auto& field : table.fields)
            if (rng.chance(0.6)) row[field.name] = rng.pick(kCellValues);
        table.sampled_rows.push_back(std::move(row));
    }
    return table;
}

inline Resource random_resource(Rng& rng, IdCounters& ids) {
    ResourceRef ref;
    ref.region = rng.pick(kRegions);
    if (rng.chance(0.3)) ref.name = "res-" + std::to_string(rng.range(0, 999));

    switch (rng.range(0, 7)) {
        case 0: {
            Server r;
            ref.kind = ResourceKind::Server;
            ref.id = ids.fresh("srv-");
            r.ref = ref;
            r.state = rng.chance(0.5) ? ServerState::Running : ServerState::Stopped;
            r.purpose_tag = random_purpose(rng);
            int fw = rng.range(0, 2);
            for (int i = 0; i < fw; ++i)
                r.attached_firewall_ids.push_back("fw-" + std::to_string(rng.range(0, 20)));
            return r;
        }
        case 1: {
            ServerStorage r;
            ref.kind = ResourceKind::ServerStorage;
            ref.id = ids.fresh("vol-");
            r.ref = ref;
            r.encrypted = rng.chance(0.6);
            if (rng.chance(0.5)) r.attached_server_id = "srv-" + std::to_string(rng.range(0, 20));
            r.purpose_tag = random_purpose(rng);
            return r;
        }
        case 2: {
            Database r;
            ref.kind = ResourceKind::Database;
            ref.id = ids.fresh("db-");
            r.ref = ref;
            r.encrypted = rng.chance(0.6);
            int tables = rng.range(0, 3);
            for (int i = 0; i < tables; ++i) r.tables.push_back(random_table(rng, i));
            return r;
        }
        case 3: {
            Firewall r;
            ref.kind = ResourceKind::Firewall;
            ref.id = ids.fresh("fw-");
            r.ref = ref;
            auto random_rule = [&](Direction dir) {
                FirewallRule rule;
                switch (rng.range(0, 3)) {
                    case 0: rule.protocol = FwProtocol::Tcp; break;
                    case 1: rule.protocol = FwProtocol::Udp; break;
                    case 2: rule.protocol = FwProtocol::Icmp; break;
                    default: rule.protocol = FwProtocol::All; break;
                }
                switch (rng.range(0, 4)) {
                    case 0: rule.port_range = PortRange::all(); break;
                    case 1: rule.port_range = PortRange::single(22); break;
                    case 2: rule.port_range = PortRange::single(80); break;
                    case 3: rule.port_range = PortRange::of(20, 30); break;
                    default: rule.port_range = PortRange::single(443); break;
                }
                rule.cidr = rng.pick(kCidrs);
                rule.direction = dir;
                return rule;
            };
            int in = rng.range(0, 4), out = rng.range(0, 3);
            for (int i = 0; i < in; ++i) r.inbound_rules.push_back(random_rule(Direction::Inbound));
            for (int i = 0; i < out; ++i)
                r.outbound_rules.push_back(random_rule(Direction::Outbound));
            return r;
        }
        case 4: {
            LoadBalancer r;
            ref.kind = ResourceKind::LoadBalancer;
            ref.id = ids.fresh("lb-");
            r.ref = ref;
            int listeners = rng.range(1, 3);
            for (int i = 0; i < listeners; ++i) {
                Listener l;
                auto proto = [&] {
                    switch (rng.range(0, 3)) {
                        case 0: return ListenerProtocol::Http;
                        case 1: return ListenerProtocol::Https;
                        case 2: return ListenerProtocol::Tcp;
                        default: return ListenerProtocol::Tls;
                    }
                };
                l.frontend_protocol = proto();
                l.frontend_port = rng.range(1, 65535);
                l.backend_protocol = proto();
                l.backend_port = rng.range(1, 65535);
                r.listeners.push_back(l);
            }
            return r;
        }
        case 5: {
            CloudStorage r;
            ref.kind = ResourceKind::CloudStorage;
            ref.id = ids.fresh("cs-");
            r.ref = ref;
            r.encrypted = rng.chance(0.6);
            auto random_grant = [&] {
                AccessGrant g;
                switch (rng.range(0, 3)) {
                    case 0: g.grantee = Grantee::Public; break;
                    case 1: g.grantee = Grantee::AnyAuthenticated; break;
                    case 2:
                        g.grantee = Grantee::Account;
                        g.principal_id = "acct-" + std::to_string(rng.range(1, 99));
                        break;
                    default:
                        g.grantee = Grantee::PrincipalId;
                        g.principal_id = "svc-" + std::to_string(rng.range(1, 99));
                        break;
                }
                return g;
            };
            int reads = rng.range(0, 3), writes = rng.range(0, 3);
            for (int i = 0; i < reads; ++i) r.read_grants.push_back(random_grant());
            for (int i = 0; i < writes; ++i) r.write_grants.push_back(random_grant());
            return r;
        }
        case 6: {
            AccessPolicy r;
            ref.kind = ResourceKind::AccessPolicy;
            ref.id = ids.fresh("pol-");
            r.ref = ref;
            int statements = rng.range(1, 3);
            for (int i = 0; i < statements; ++i) {
                PolicyStatement st;
                st.effect = rng.chance(0.7) ? PolicyEffect::Allow : PolicyEffect::Deny;
                int actions = rng.range(1, 3);
                for (int j = 0; j < actions; ++j) st.actions.push_back(rng.pick(kActions));
                int resources = rng.range(1, 2);
                for (int j = 0; j < resources; ++j)
                    st.resources.push_back(rng.pick(kActionResources));
                r.statements.push_back(std::move(st));
            }
            return r;
        }
        default: {
            Router r;
            ref.kind = ResourceKind::Router;
            ref.id = ids.fresh("rt-");
            r.ref = ref;
            int routes = rng.range(0, 3);
            for (int i = 0; i < routes; ++i) {
                Route route;
                route.destination_cidr = rng.pick(kCidrs);
                switch (rng.range(0, 3)) {
                    case 0: route.target = RouteTarget::InternetGateway; break;
                    case 1: route.target = RouteTarget::Nat; break;
                    case 2: route.target = RouteTarget::Internal; break;
                    default: route.target = RouteTarget::Peering; break;
                }
                r.routes.push_back(route);
            }
            return r;
        }
    }
}

inline Snapshot random_snapshot(Rng& rng, int max_resources = 20) {
    Snapshot snapshot;
    snapshot.provider_id = "testgen";
    snapshot.generated_at = "2026-01-01T00:00:00Z";
    IdCounters ids;
    int n = rng.range(0, max_resources);
    for (int i = 0; i < n; ++i) snapshot.resources.push_back(random_resource(rng, ids));
    return snapshot;
}

inline DataPolicy random_policy(Rng& rng, const Snapshot& snapshot) {
    DataPolicy policy;
    for (auto category : kAllPiiCategories)
        if (rng.chance(0.15)) policy.permitted_categories.insert(category);
    for (const auto& resource : snapshot.resources) {
        const auto* db = std::get_if<Database>(&resource);
        if (!db) continue;
        for (const auto& table : db->tables)
            for (const auto& field : table.fields)
                if (rng.chance(0.2))
                    policy.allowlist.insert({db->ref.id, table.name, field.name});
    }
    if (rng.chance(0.3)) policy.allowlist.insert({"no-such-db", "t", "f"});
    return policy;
}

}  // namespace testgen
