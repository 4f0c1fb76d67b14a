#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "gdprscan/engine.hpp"

namespace testsupport {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read test file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline std::string fixture_path(const std::string& name) {
    return std::string(GDPRSCAN_FIXTURE_DIR) + "/" + name;
}

inline std::string data_path(const std::string& name) {
    return std::string(GDPRSCAN_DATA_DIR) + "/" + name;
}

// Test scans pin scan id and timestamp so serialized reports are comparable.
inline constexpr const char* kPinnedScanTime = "2026-01-15T00:00:00Z";
inline constexpr std::int64_t kPinnedScanEpoch = 1768435200;

inline gdprscan::engine::ScanConfig pinned_config() {
    gdprscan::engine::ScanConfig config;
    config.scan_id = "test-scan";
    config.scanned_at = kPinnedScanTime;
    return config;
}

}  // namespace testsupport
