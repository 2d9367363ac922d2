#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace etk::text {

/// Shortest decimal form that parses back to the same double.
std::string format_number(double value);

/// Parses the whole field as a finite double; nullopt on any leftover text.
std::optional<double> parse_number(std::string_view field);

std::vector<std::string_view> split(std::string_view line, char sep);

std::string_view trim(std::string_view s);

/// 64-bit FNV-1a, used for content digests in run manifests.
std::uint64_t fnv1a64(std::string_view bytes);

std::string hex64(std::uint64_t value);

}  // namespace etk::text
