#pragma once

// Small helpers shared by the text file formats.

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "liqregime/errors.hpp"

namespace liqregime::text {

/// Ordered key/value pairs written as "# key=value" header lines.
using Metadata = std::vector<std::pair<std::string, std::string>>;

std::optional<std::string> lookup(const Metadata& meta, std::string_view key);

/// Shortest decimal that round-trips to the same double.
std::string format_shortest(double value);

/// Fixed 17 significant digits ("%.17g"); also round-trips.
std::string format_17g(double value);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char delim);

/// Whitespace-separated tokens.
std::vector<std::string_view> tokens(std::string_view s);

/// Flat "key=value" lines; '#' starts a comment, blank lines are skipped.
/// Duplicate keys keep the last value.
Metadata read_key_values(std::istream& in, std::string_view what);

class ParseError : public Error {
public:
    using Error::Error;
};

double parse_double(std::string_view s, std::string_view what);
std::int64_t parse_int(std::string_view s, std::string_view what);

}  // namespace liqregime::text
