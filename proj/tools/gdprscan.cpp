// gdprscan: GDPR compliance scanner for infrastructure snapshots.
//
// Exit codes (stable contract for CI gating):
//   0  clean, or exposures below the configured gate
//   1  gate tripped (scan), new exposures (diff), validation errors (validate)
//   2  usage or input error

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gdprscan/engine.hpp"
#include "gdprscan/ingest.hpp"
#include "gdprscan/model.hpp"
#include "gdprscan/pii.hpp"
#include "gdprscan/report.hpp"
#include "gdprscan/rules.hpp"

namespace {

constexpr int kExitClean = 0;
constexpr int kExitGate = 1;
constexpr int kExitUsage = 2;

std::optional<std::string> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

bool write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return true;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        std::cerr << "gdprscan: cannot write '" << out_path << "'\n";
        return false;
    }
    out << text;
    return true;
}

void print_issues(const std::vector<gdprscan::ValidationIssue>& issues, std::ostream& os) {
    for (const auto& issue : issues)
        os << gdprscan::severity_name(issue.severity) << "  " << issue.path << "  "
           << issue.message << "\n";
}

struct ScanOptions {
    std::string snapshot_path;
    std::string policy_path;
    std::string fail_on;
    std::string format = "text";
    std::string out_path;
    std::vector<std::string> disabled_rules;
    std::size_t sampling_cap = gdprscan::ingest::kDefaultSamplingCap;
    std::string scan_id;
    std::string scanned_at;
};

int run_scan(const ScanOptions& opt) {
    using namespace gdprscan;

    auto bytes = read_file(opt.snapshot_path);
    if (!bytes) {
        std::cerr << "gdprscan: cannot read snapshot '" << opt.snapshot_path << "'\n";
        return kExitUsage;
    }

    engine::ScanConfig config;
    config.scan_id = opt.scan_id;
    if (!opt.scanned_at.empty()) {
        if (!iso8601::parse_utc(opt.scanned_at)) {
            std::cerr << "gdprscan: --scanned-at must be YYYY-MM-DDTHH:MM:SSZ\n";
            return kExitUsage;
        }
        config.scanned_at = opt.scanned_at;
    }

    for (const auto& id_text : opt.disabled_rules) {
        auto rule = parse_rule_id(id_text);
        if (!rule) {
            std::cerr << "gdprscan: unknown rule id '" << id_text << "'\n";
            return kExitUsage;
        }
        config.catalog.disable(*rule);
    }

    if (!opt.policy_path.empty()) {
        auto policy_bytes = read_file(opt.policy_path);
        if (!policy_bytes) {
            std::cerr << "gdprscan: cannot read policy '" << opt.policy_path << "'\n";
            return kExitUsage;
        }
        try {
            config.policy = pii::load_policy(*policy_bytes);
        } catch (const ParseError& e) {
            std::cerr << "gdprscan: " << e.what() << "\n";
            return kExitUsage;
        }
    }

    Snapshot snapshot;
    try {
        const auto now = config.scanned_at ? *iso8601::parse_utc(*config.scanned_at)
                                           : iso8601::now_epoch();
        snapshot = ingest::load_snapshot(*bytes, now);
    } catch (const ValidationFailure& e) {
        std::cerr << "gdprscan: " << e.what() << "\n";
        print_issues(e.issues(), std::cerr);
        return kExitUsage;
    } catch (const ParseError& e) {
        std::cerr << "gdprscan: " << e.what() << "\n";
        return kExitUsage;
    }

    // The cap bounds how many sampled rows per table feed value classification.
    for (auto& resource : snapshot.resources) {
        if (auto* db = std::get_if<Database>(&resource)) {
            for (auto& table : db->tables)
                if (table.sampled_rows.size() > opt.sampling_cap)
                    table.sampled_rows.resize(opt.sampling_cap);
        }
    }

    Report result = engine::scan(snapshot, config);

    const std::string text =
        opt.format == "json" ? report::serialize_report(result) : report::render_text(result);
    if (!write_output(text, opt.out_path)) return kExitUsage;

    if (opt.fail_on.empty()) return kExitClean;
    if (opt.fail_on == "any")
        return result.summary.total_exposures > 0 ? kExitGate : kExitClean;
    auto principle = parse_principle(opt.fail_on);
    auto it = result.summary.exposures_by_principle.find(*principle);
    const bool tripped = it != result.summary.exposures_by_principle.end() && it->second > 0;
    return tripped ? kExitGate : kExitClean;
}

int run_validate(const std::string& snapshot_path) {
    using namespace gdprscan;

    auto bytes = read_file(snapshot_path);
    if (!bytes) {
        std::cerr << "gdprscan: cannot read snapshot '" << snapshot_path << "'\n";
        return kExitUsage;
    }
    Snapshot snapshot;
    try {
        snapshot = ingest::parse_snapshot(*bytes);
    } catch (const ParseError& e) {
        std::cerr << "gdprscan: " << e.what() << "\n";
        return kExitUsage;
    }
    auto issues = ingest::validate_snapshot(snapshot);
    print_issues(issues, std::cout);
    if (issues.empty()) std::cout << "snapshot is valid\n";
    return ingest::has_errors(issues) ? kExitGate : kExitClean;
}

int run_rules(const std::string& format, const std::string& principle_filter) {
    using namespace gdprscan;

    auto catalog = rules::default_catalog();
    if (!principle_filter.empty()) {
        auto principle = parse_principle(principle_filter);
        std::erase_if(catalog.entries,
                      [&](const auto& kv) { return kv.second.principle != *principle; });
    }

    if (format == "json") {
        std::cout << rules::serialize_catalog(catalog);
        return kExitClean;
    }
    for (const auto& [rule, entry] : catalog.entries) {
        std::string id = rule_name(rule);
        std::cout << id << std::string(5 - id.size(), ' ')
                  << principle_name(entry.principle);
        for (std::size_t pad = principle_name(entry.principle).size(); pad < 28; ++pad)
            std::cout << ' ';
        std::cout << (entry.enabled ? "enabled " : "disabled") << "  " << entry.title << "\n";
    }
    return kExitClean;
}

int run_diff(const std::string& before_path, const std::string& after_path,
             const std::string& format) {
    using namespace gdprscan;

    auto before_bytes = read_file(before_path);
    if (!before_bytes) {
        std::cerr << "gdprscan: cannot read '" << before_path << "'\n";
        return kExitUsage;
    }
    auto after_bytes = read_file(after_path);
    if (!after_bytes) {
        std::cerr << "gdprscan: cannot read '" << after_path << "'\n";
        return kExitUsage;
    }

    try {
        Report before = report::parse_report(*before_bytes);
        Report after = report::parse_report(*after_bytes);
        auto result = report::diff(before, after);
        std::cout << (format == "json" ? report::serialize_diff(result)
                                       : report::render_diff_text(result));
        return result.new_exposures.empty() ? kExitClean : kExitGate;
    } catch (const ParseError& e) {
        std::cerr << "gdprscan: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ReportError& e) {
        std::cerr << "gdprscan: " << e.what() << "\n";
        return kExitUsage;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GDPR compliance scanner for infrastructure snapshots"};
    app.require_subcommand(1);

    const std::vector<std::string> kFormats = {"json", "text"};
    const std::vector<std::string> kPrinciples = {"integrity-confidentiality", "data-minimization",
                                                  "storage-limitation"};
    std::vector<std::string> fail_on_values = {"any"};
    fail_on_values.insert(fail_on_values.end(), kPrinciples.begin(), kPrinciples.end());

    ScanOptions scan_opt;
    auto* scan_cmd = app.add_subcommand("scan", "Scan a snapshot for GDPR exposures");
    scan_cmd->add_option("--snapshot", scan_opt.snapshot_path, "Snapshot file to scan")
        ->required();
    scan_cmd->add_option("--policy", scan_opt.policy_path,
                         "Data policy file (permitted categories + allowlist)");
    scan_cmd->add_option("--fail-on", scan_opt.fail_on, "Exit 1 when matching exposures exist")
        ->check(CLI::IsMember(fail_on_values));
    scan_cmd->add_option("--format", scan_opt.format, "Output format")
        ->check(CLI::IsMember(kFormats));
    scan_cmd->add_option("--out", scan_opt.out_path, "Write the report to a file");
    scan_cmd->add_option("--disable-rule", scan_opt.disabled_rules,
                         "Disable a rule by id (repeatable)");
    scan_cmd->add_option("--sampling-cap", scan_opt.sampling_cap,
                         "Max sampled rows per table fed to PII detection");
    scan_cmd->add_option("--scan-id", scan_opt.scan_id, "Pin the scan id (for reproducible runs)");
    scan_cmd->add_option("--scanned-at", scan_opt.scanned_at,
                         "Pin the scan timestamp, YYYY-MM-DDTHH:MM:SSZ");

    std::string diff_before, diff_after, diff_format = "text";
    auto* diff_cmd = app.add_subcommand("diff", "Compare two scan reports by fingerprint");
    diff_cmd->add_option("before", diff_before, "Earlier report file")->required();
    diff_cmd->add_option("after", diff_after, "Later report file")->required();
    diff_cmd->add_option("--format", diff_format, "Output format")->check(CLI::IsMember(kFormats));

    std::string rules_format = "text", rules_principle;
    auto* rules_cmd = app.add_subcommand("rules", "List the rule catalog");
    rules_cmd->add_option("--format", rules_format, "Output format")
        ->check(CLI::IsMember(kFormats));
    rules_cmd->add_option("--principle", rules_principle, "Only rules of this principle")
        ->check(CLI::IsMember(kPrinciples));

    std::string validate_path;
    auto* validate_cmd = app.add_subcommand("validate", "Validate a snapshot file");
    validate_cmd->add_option("--snapshot", validate_path, "Snapshot file to validate")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*scan_cmd) return run_scan(scan_opt);
        if (*diff_cmd) return run_diff(diff_before, diff_after, diff_format);
        if (*rules_cmd) return run_rules(rules_format, rules_principle);
        if (*validate_cmd) return run_validate(validate_path);
    } catch (const std::exception& e) {
        std::cerr << "gdprscan: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
