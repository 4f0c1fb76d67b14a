#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <variant>
#include <vector>

namespace gdprscan {

// Version of the snapshot/report wire formats. Fingerprint recipe is frozen per version.
inline constexpr std::string_view kSchemaVersion = "1";

// ── Enums ────────────────────────────────────────────────────────────────────

enum class ResourceKind {
    Server,
    ServerStorage,
    Database,
    Firewall,
    LoadBalancer,
    CloudStorage,
    AccessPolicy,
    Router,
};

inline constexpr std::array<ResourceKind, 8> kAllKinds = {
    ResourceKind::Server,       ResourceKind::ServerStorage, ResourceKind::Database,
    ResourceKind::Firewall,     ResourceKind::LoadBalancer,  ResourceKind::CloudStorage,
    ResourceKind::AccessPolicy, ResourceKind::Router,
};

inline std::string_view kind_name(ResourceKind k) {
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
    return "unknown";
}

inline std::optional<ResourceKind> parse_kind(std::string_view s) {
    for (auto k : kAllKinds)
        if (kind_name(k) == s) return k;
    return std::nullopt;
}

enum class Principle {
    IntegrityConfidentiality,
    DataMinimization,
    StorageLimitation,
};

inline constexpr std::array<Principle, 3> kAllPrinciples = {
    Principle::IntegrityConfidentiality,
    Principle::DataMinimization,
    Principle::StorageLimitation,
};

inline std::string_view principle_name(Principle p) {
    switch (p) {
        case Principle::IntegrityConfidentiality: return "integrity-confidentiality";
        case Principle::DataMinimization: return "data-minimization";
        case Principle::StorageLimitation: return "storage-limitation";
    }
    return "unknown";
}

inline std::optional<Principle> parse_principle(std::string_view s) {
    for (auto p : kAllPrinciples)
        if (principle_name(p) == s) return p;
    return std::nullopt;
}

// Rule identifiers R1..R19. The underlying value is the rule number.
enum class RuleId : int {
    R1 = 1, R2, R3, R4, R5, R6, R7, R8, R9, R10,
    R11, R12, R13, R14, R15, R16, R17, R18, R19,
};

inline constexpr int kRuleCount = 19;

inline int rule_number(RuleId r) { return static_cast<int>(r); }

inline std::string rule_name(RuleId r) { return "R" + std::to_string(rule_number(r)); }

inline std::optional<RuleId> parse_rule_id(std::string_view s) {
    if (s.size() < 2 || s.size() > 3 || s[0] != 'R') return std::nullopt;
    int n = 0;
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9') return std::nullopt;
        n = n * 10 + (s[i] - '0');
    }
    if (n < 1 || n > kRuleCount) return std::nullopt;
    return static_cast<RuleId>(n);
}

// Principle grouping: R1-R17 integrity & confidentiality, R18 data minimization,
// R19 storage limitation. Total over all rule ids.
inline Principle principle_of(RuleId r) {
    switch (r) {
        case RuleId::R18: return Principle::DataMinimization;
        case RuleId::R19: return Principle::StorageLimitation;
        default: return Principle::IntegrityConfidentiality;
    }
}

enum class ServerState { Running, Stopped };

inline std::string_view server_state_name(ServerState s) {
    return s == ServerState::Running ? "running" : "stopped";
}

inline std::optional<ServerState> parse_server_state(std::string_view s) {
    if (s == "running") return ServerState::Running;
    if (s == "stopped") return ServerState::Stopped;
    return std::nullopt;
}

enum class FwProtocol { Tcp, Udp, Icmp, All };

inline std::string_view fw_protocol_name(FwProtocol p) {
    switch (p) {
        case FwProtocol::Tcp: return "tcp";
        case FwProtocol::Udp: return "udp";
        case FwProtocol::Icmp: return "icmp";
        case FwProtocol::All: return "all";
    }
    return "unknown";
}

inline std::optional<FwProtocol> parse_fw_protocol(std::string_view s) {
    if (s == "tcp") return FwProtocol::Tcp;
    if (s == "udp") return FwProtocol::Udp;
    if (s == "icmp") return FwProtocol::Icmp;
    if (s == "all") return FwProtocol::All;
    return std::nullopt;
}

enum class Direction { Inbound, Outbound };

inline std::string_view direction_name(Direction d) {
    return d == Direction::Inbound ? "inbound" : "outbound";
}

inline std::optional<Direction> parse_direction(std::string_view s) {
    if (s == "inbound") return Direction::Inbound;
    if (s == "outbound") return Direction::Outbound;
    return std::nullopt;
}

enum class ListenerProtocol { Http, Https, Tcp, Tls };

inline std::string_view listener_protocol_name(ListenerProtocol p) {
    switch (p) {
        case ListenerProtocol::Http: return "http";
        case ListenerProtocol::Https: return "https";
        case ListenerProtocol::Tcp: return "tcp";
        case ListenerProtocol::Tls: return "tls";
    }
    return "unknown";
}

inline std::optional<ListenerProtocol> parse_listener_protocol(std::string_view s) {
    if (s == "http") return ListenerProtocol::Http;
    if (s == "https") return ListenerProtocol::Https;
    if (s == "tcp") return ListenerProtocol::Tcp;
    if (s == "tls") return ListenerProtocol::Tls;
    return std::nullopt;
}

// Fixed classification: https and tls carry encryption, http and raw tcp do not.
inline bool is_secure_listener_protocol(ListenerProtocol p) {
    return p == ListenerProtocol::Https || p == ListenerProtocol::Tls;
}

enum class Grantee { Public, AnyAuthenticated, Account, PrincipalId };

inline std::string_view grantee_name(Grantee g) {
    switch (g) {
        case Grantee::Public: return "public";
        case Grantee::AnyAuthenticated: return "any_authenticated";
        case Grantee::Account: return "account";
        case Grantee::PrincipalId: return "principal";
    }
    return "unknown";
}

inline std::optional<Grantee> parse_grantee(std::string_view s) {
    if (s == "public") return Grantee::Public;
    if (s == "any_authenticated") return Grantee::AnyAuthenticated;
    if (s == "account") return Grantee::Account;
    if (s == "principal") return Grantee::PrincipalId;
    return std::nullopt;
}

enum class PolicyEffect { Allow, Deny };

inline std::string_view policy_effect_name(PolicyEffect e) {
    return e == PolicyEffect::Allow ? "allow" : "deny";
}

inline std::optional<PolicyEffect> parse_policy_effect(std::string_view s) {
    if (s == "allow") return PolicyEffect::Allow;
    if (s == "deny") return PolicyEffect::Deny;
    return std::nullopt;
}

enum class RouteTarget { InternetGateway, Nat, Internal, Peering };

inline std::string_view route_target_name(RouteTarget t) {
    switch (t) {
        case RouteTarget::InternetGateway: return "internet_gateway";
        case RouteTarget::Nat: return "nat";
        case RouteTarget::Internal: return "internal";
        case RouteTarget::Peering: return "peering";
    }
    return "unknown";
}

inline std::optional<RouteTarget> parse_route_target(std::string_view s) {
    if (s == "internet_gateway") return RouteTarget::InternetGateway;
    if (s == "nat") return RouteTarget::Nat;
    if (s == "internal") return RouteTarget::Internal;
    if (s == "peering") return RouteTarget::Peering;
    return std::nullopt;
}

// Personal-data categories recognized in v1. Closed enum.
enum class PiiCategory {
    Email,
    PersonName,
    Phone,
    PostalAddress,
    Geolocation,
    IpAddress,
    DeviceId,
    NationalId,
    BirthDate,
};

inline constexpr std::array<PiiCategory, 9> kAllPiiCategories = {
    PiiCategory::Email,     PiiCategory::PersonName, PiiCategory::Phone,
    PiiCategory::PostalAddress, PiiCategory::Geolocation, PiiCategory::IpAddress,
    PiiCategory::DeviceId,  PiiCategory::NationalId, PiiCategory::BirthDate,
};

inline std::string_view pii_category_name(PiiCategory c) {
    switch (c) {
        case PiiCategory::Email: return "email";
        case PiiCategory::PersonName: return "person_name";
        case PiiCategory::Phone: return "phone";
        case PiiCategory::PostalAddress: return "postal_address";
        case PiiCategory::Geolocation: return "geolocation";
        case PiiCategory::IpAddress: return "ip_address";
        case PiiCategory::DeviceId: return "device_id";
        case PiiCategory::NationalId: return "national_id";
        case PiiCategory::BirthDate: return "birth_date";
    }
    return "unknown";
}

inline std::optional<PiiCategory> parse_pii_category(std::string_view s) {
    for (auto c : kAllPiiCategories)
        if (pii_category_name(c) == s) return c;
    return std::nullopt;
}

// ── Resource types ───────────────────────────────────────────────────────────

struct ResourceRef {
    std::string region;
    ResourceKind kind = ResourceKind::Server;
    std::string id;
    std::optional<std::string> name;

    bool operator==(const ResourceRef&) const = default;
};

struct PortRange {
    // nullopt bounds means the rule applies to all ports.
    std::optional<std::pair<int, int>> bounds;

    static PortRange all() { return {}; }
    static PortRange single(int p) { return {std::pair{p, p}}; }
    static PortRange of(int lo, int hi) { return {std::pair{lo, hi}}; }

    bool is_all() const { return !bounds.has_value(); }
    bool contains(int port) const {
        return !bounds || (port >= bounds->first && port <= bounds->second);
    }

    std::string to_string() const {
        if (!bounds) return "all";
        if (bounds->first == bounds->second) return std::to_string(bounds->first);
        return std::to_string(bounds->first) + "-" + std::to_string(bounds->second);
    }

    bool operator==(const PortRange&) const = default;
};

struct FirewallRule {
    FwProtocol protocol = FwProtocol::Tcp;
    PortRange port_range;
    std::string cidr;
    Direction direction = Direction::Inbound;

    bool operator==(const FirewallRule&) const = default;
};

struct Listener {
    ListenerProtocol frontend_protocol = ListenerProtocol::Https;
    int frontend_port = 443;
    ListenerProtocol backend_protocol = ListenerProtocol::Https;
    int backend_port = 443;

    bool operator==(const Listener&) const = default;
};

struct FieldDescriptor {
    std::string name;
    std::string declared_type;

    bool operator==(const FieldDescriptor&) const = default;
};

using Row = std::map<std::string, std::string>;

struct Table {
    std::string name;
    std::vector<FieldDescriptor> fields;
    bool ttl_enabled = false;
    std::optional<std::string> ttl_attribute;
    std::vector<Row> sampled_rows;

    bool operator==(const Table&) const = default;
};

struct PolicyStatement {
    PolicyEffect effect = PolicyEffect::Allow;
    std::vector<std::string> actions;
    std::vector<std::string> resources;

    bool operator==(const PolicyStatement&) const = default;
};

struct Route {
    std::string destination_cidr;
    RouteTarget target = RouteTarget::Internal;

    bool operator==(const Route&) const = default;
};

struct AccessGrant {
    Grantee grantee = Grantee::PrincipalId;
    std::optional<std::string> principal_id;

    bool operator==(const AccessGrant&) const = default;
};

struct Server {
    ResourceRef ref;
    ServerState state = ServerState::Running;
    std::optional<std::string> purpose_tag;
    std::vector<std::string> attached_firewall_ids;
    std::vector<std::string> attached_storage_ids;

    bool operator==(const Server&) const = default;
};

struct ServerStorage {
    ResourceRef ref;
    bool encrypted = false;
    std::optional<std::string> attached_server_id;
    std::optional<std::string> purpose_tag;

    bool operator==(const ServerStorage&) const = default;
};

struct Database {
    ResourceRef ref;
    bool encrypted = false;
    std::vector<Table> tables;

    bool operator==(const Database&) const = default;
};

struct Firewall {
    ResourceRef ref;
    std::vector<FirewallRule> inbound_rules;
    std::vector<FirewallRule> outbound_rules;

    bool operator==(const Firewall&) const = default;
};

struct LoadBalancer {
    ResourceRef ref;
    std::vector<Listener> listeners;

    bool operator==(const LoadBalancer&) const = default;
};

struct CloudStorage {
    ResourceRef ref;
    bool encrypted = false;
    std::vector<AccessGrant> read_grants;
    std::vector<AccessGrant> write_grants;

    bool operator==(const CloudStorage&) const = default;
};

struct AccessPolicy {
    ResourceRef ref;
    std::vector<PolicyStatement> statements;

    bool operator==(const AccessPolicy&) const = default;
};

struct Router {
    ResourceRef ref;
    std::vector<Route> routes;

    bool operator==(const Router&) const = default;
};

using Resource = std::variant<Server, ServerStorage, Database, Firewall, LoadBalancer,
                              CloudStorage, AccessPolicy, Router>;

inline const ResourceRef& resource_ref(const Resource& r) {
    return std::visit([](const auto& v) -> const ResourceRef& { return v.ref; }, r);
}

inline ResourceKind resource_kind(const Resource& r) { return resource_ref(r).kind; }

struct Snapshot {
    std::string schema_version{kSchemaVersion};
    std::string provider_id;
    std::string generated_at;  // ISO-8601 UTC
    std::vector<Resource> resources;

    bool operator==(const Snapshot&) const = default;
};

// Canonical resource order: (region, kind, id). Id uniqueness within
// (region, kind) makes this a total order on valid snapshots.
inline bool canonical_resource_less(const Resource& a, const Resource& b) {
    const auto& ra = resource_ref(a);
    const auto& rb = resource_ref(b);
    return std::tie(ra.region, ra.kind, ra.id) < std::tie(rb.region, rb.kind, rb.id);
}

// ── Exposures and reports ────────────────────────────────────────────────────

struct Exposure {
    RuleId rule_id = RuleId::R1;
    Principle principle = Principle::IntegrityConfidentiality;
    ResourceRef resource;
    std::string detail;         // human-readable, deterministic
    std::string discriminator;  // machine-readable locator within the resource
    std::string fingerprint;    // hex digest, stable across runs

    bool operator==(const Exposure&) const = default;
};

// Canonical exposure order: (rule, region, kind, id, detail), with the
// discriminator as a final tiebreak.
inline bool canonical_exposure_less(const Exposure& a, const Exposure& b) {
    const int an = rule_number(a.rule_id);
    const int bn = rule_number(b.rule_id);
    return std::tie(an, a.resource.region, a.resource.kind, a.resource.id, a.detail,
                    a.discriminator) < std::tie(bn, b.resource.region, b.resource.kind,
                                                b.resource.id, b.detail, b.discriminator);
}

struct Summary {
    std::map<ResourceKind, std::uint64_t> resources_scanned_by_kind;
    std::map<ResourceKind, std::uint64_t> exposures_by_kind;
    std::map<Principle, std::uint64_t> exposures_by_principle;
    std::map<std::string, std::uint64_t> exposures_by_region;
    std::uint64_t total_exposures = 0;

    bool operator==(const Summary&) const = default;
};

struct Report {
    std::string schema_version{kSchemaVersion};
    std::string scan_id;
    std::string scanned_at;  // ISO-8601 UTC
    std::string snapshot_provider;
    std::vector<Exposure> exposures;  // canonically ordered
    Summary summary;

    bool operator==(const Report&) const = default;
};

// ── Data-minimization policy ─────────────────────────────────────────────────

struct AllowlistEntry {
    std::string database_id;
    std::string table_name;
    std::string field_name;

    auto operator<=>(const AllowlistEntry&) const = default;
};

struct DataPolicy {
    std::set<PiiCategory> permitted_categories;
    std::set<AllowlistEntry> allowlist;

    bool operator==(const DataPolicy&) const = default;
};

// ── Validation issues and errors ─────────────────────────────────────────────

enum class Severity { Error, Warning };

inline std::string_view severity_name(Severity s) {
    return s == Severity::Error ? "error" : "warning";
}

struct ValidationIssue {
    Severity severity = Severity::Error;
    std::string path;  // JSON-pointer-like locator into the snapshot document
    std::string message;

    bool operator==(const ValidationIssue&) const = default;
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ValidationFailure : public std::runtime_error {
public:
    ValidationFailure(std::string what, std::vector<ValidationIssue> issues)
        : std::runtime_error(std::move(what)), issues_(std::move(issues)) {}

    const std::vector<ValidationIssue>& issues() const { return issues_; }

private:
    std::vector<ValidationIssue> issues_;
};

class ProviderError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ReportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace gdprscan
