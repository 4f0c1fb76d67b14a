#pragma once

#include <arpa/inet.h>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace gdprscan::net {

struct Cidr {
    int family = 0;      // AF_INET or AF_INET6
    int prefix_len = 0;  // 0..32 (v4) or 0..128 (v6)
};

// Parses "a.b.c.d/p" or "<v6>/p". The prefix is mandatory.
inline std::optional<Cidr> parse_cidr(std::string_view text) {
    auto slash = text.find('/');
    if (slash == std::string_view::npos || slash == 0 || slash + 1 >= text.size())
        return std::nullopt;

    std::string addr(text.substr(0, slash));
    std::string_view prefix = text.substr(slash + 1);
    if (prefix.size() > 3) return std::nullopt;

    int prefix_len = 0;
    for (char c : prefix) {
        if (c < '0' || c > '9') return std::nullopt;
        prefix_len = prefix_len * 10 + (c - '0');
    }
    if (prefix.size() > 1 && prefix[0] == '0') return std::nullopt;  // no leading zeros

    unsigned char buf[16];
    if (inet_pton(AF_INET, addr.c_str(), buf) == 1) {
        if (prefix_len > 32) return std::nullopt;
        return Cidr{AF_INET, prefix_len};
    }
    if (inet_pton(AF_INET6, addr.c_str(), buf) == 1) {
        if (prefix_len > 128) return std::nullopt;
        return Cidr{AF_INET6, prefix_len};
    }
    return std::nullopt;
}

inline bool is_valid_cidr(std::string_view text) { return parse_cidr(text).has_value(); }

// A /0 network admits every address, so any /0 spelling (0.0.0.0/0, ::/0,
// or an equivalent with nonzero host bits) counts as the unrestricted catch-all.
inline bool is_catch_all_cidr(std::string_view text) {
    auto cidr = parse_cidr(text);
    return cidr && cidr->prefix_len == 0;
}

}  // namespace gdprscan::net
