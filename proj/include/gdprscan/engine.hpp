#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "gdprscan/ingest.hpp"
#include "gdprscan/model.hpp"
#include "gdprscan/pii.hpp"
#include "gdprscan/rules.hpp"

namespace gdprscan::engine {

// ── Fingerprinting ───────────────────────────────────────────────────────────
// FNV-1a 64-bit over "rule_id|region|kind|id|discriminator", rendered as 16
// lowercase hex digits. Frozen for report schema_version 1: fingerprints must
// stay comparable across runs, platforms, and releases of this tool.

inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

inline std::string fingerprint(const Exposure& exposure) {
    std::string input = rule_name(exposure.rule_id);
    input += '|';
    input += exposure.resource.region;
    input += '|';
    input += kind_name(exposure.resource.kind);
    input += '|';
    input += exposure.resource.id;
    input += '|';
    input += exposure.discriminator;

    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(input)));
    return buf;
}

// ── Scan configuration ───────────────────────────────────────────────────────

struct ScanConfig {
    rules::RuleCatalog catalog = rules::default_catalog();
    DataPolicy policy;
    std::string scan_id;                      // generated when empty
    std::optional<std::string> scanned_at;    // pinned for reproducible runs
    pii::PiiDictionary dictionary = pii::default_dictionary();
};

inline std::string generate_scan_id(std::int64_t now = iso8601::now_epoch()) {
    std::random_device rd;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "scan-%lld-%08x", static_cast<long long>(now), rd());
    return buf;
}

// ── Summaries ────────────────────────────────────────────────────────────────

inline Summary summarize(const std::vector<Exposure>& exposures, const Snapshot& snapshot) {
    Summary summary;
    for (const auto& resource : snapshot.resources)
        ++summary.resources_scanned_by_kind[resource_kind(resource)];
    for (const auto& exposure : exposures) {
        ++summary.exposures_by_kind[exposure.resource.kind];
        ++summary.exposures_by_principle[exposure.principle];
        ++summary.exposures_by_region[exposure.resource.region];
        ++summary.total_exposures;
    }
    return summary;
}

// ── Scan ─────────────────────────────────────────────────────────────────────

namespace detail {

inline std::vector<Exposure> evaluate_resource(const Resource& resource, const ScanConfig& config) {
    std::vector<Exposure> out;
    auto append = [&](std::vector<Exposure>&& more) {
        for (auto& e : more) out.push_back(std::move(e));
    };
    std::visit(
        [&](const auto& r) {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, Server>) {
                append(rules::eval_server(r));
            } else if constexpr (std::is_same_v<T, ServerStorage>) {
                append(rules::eval_server_storage(r));
            } else if constexpr (std::is_same_v<T, Database>) {
                append(rules::eval_database_ic(r));
                append(pii::eval_data_minimization(r, config.policy, config.dictionary));
                append(rules::eval_storage_limitation(r));
            } else if constexpr (std::is_same_v<T, Firewall>) {
                append(rules::eval_firewall(r));
            } else if constexpr (std::is_same_v<T, LoadBalancer>) {
                append(rules::eval_load_balancer(r));
            } else if constexpr (std::is_same_v<T, CloudStorage>) {
                append(rules::eval_cloud_storage(r));
            } else if constexpr (std::is_same_v<T, AccessPolicy>) {
                append(rules::eval_access_policy(r));
            } else if constexpr (std::is_same_v<T, Router>) {
                append(rules::eval_router(r));
            }
        },
        resource);
    return out;
}

// Fans resource evaluation out across worker threads for large snapshots.
// Chunks are joined in order and the result canonically sorted, so the
// parallelism is not observable in the report.
inline std::vector<Exposure> evaluate_all(const Snapshot& snapshot, const ScanConfig& config) {
    const auto& resources = snapshot.resources;
    const std::size_t n = resources.size();

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t workers =
        (n >= 512 && hw > 1) ? std::min<std::size_t>(hw, (n + 255) / 256) : 1;

    std::vector<Exposure> exposures;
    if (workers <= 1) {
        for (const auto& resource : resources) {
            auto batch = evaluate_resource(resource, config);
            exposures.insert(exposures.end(), std::make_move_iterator(batch.begin()),
                             std::make_move_iterator(batch.end()));
        }
        return exposures;
    }

    std::vector<std::vector<Exposure>> partial(workers);
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
            const std::size_t begin = n * w / workers;
            const std::size_t end = n * (w + 1) / workers;
            for (std::size_t i = begin; i < end; ++i) {
                auto batch = evaluate_resource(resources[i], config);
                partial[w].insert(partial[w].end(), std::make_move_iterator(batch.begin()),
                                  std::make_move_iterator(batch.end()));
            }
        });
    }
    for (auto& t : threads) t.join();
    for (auto& chunk : partial)
        exposures.insert(exposures.end(), std::make_move_iterator(chunk.begin()),
                         std::make_move_iterator(chunk.end()));
    return exposures;
}

}  // namespace detail

// Runs every enabled rule over every resource and assembles the report.
// Refuses snapshots with validation errors.
inline Report scan(const Snapshot& snapshot, const ScanConfig& config) {
    if (!config.catalog.is_total())
        throw std::invalid_argument("scan: rule catalog must cover R1-R19");

    const std::string scanned_at = config.scanned_at.value_or(iso8601::now_utc());
    auto scan_epoch = iso8601::parse_utc(scanned_at);
    if (!scan_epoch) throw std::invalid_argument("scan: scanned_at is not a valid timestamp");

    auto issues = ingest::validate_snapshot(snapshot, *scan_epoch);
    if (ingest::has_errors(issues)) {
        const auto& first = issues.front();
        throw ValidationFailure("refusing to scan invalid snapshot: " + first.path + ": " +
                                    first.message,
                                std::move(issues));
    }

    auto exposures = detail::evaluate_all(snapshot, config);

    std::erase_if(exposures,
                  [&](const Exposure& e) { return !config.catalog.is_enabled(e.rule_id); });
    for (auto& exposure : exposures) exposure.fingerprint = fingerprint(exposure);
    std::sort(exposures.begin(), exposures.end(), canonical_exposure_less);

    Report report;
    report.schema_version = std::string(kSchemaVersion);
    report.scan_id = config.scan_id.empty() ? generate_scan_id() : config.scan_id;
    report.scanned_at = scanned_at;
    report.snapshot_provider = snapshot.provider_id;
    report.summary = summarize(exposures, snapshot);
    report.exposures = std::move(exposures);
    return report;
}

}  // namespace gdprscan::engine
