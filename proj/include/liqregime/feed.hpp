#pragma once

// Canonical normalized market-message feed.
//
// Text format, one record per line:
//   seq,ts_ns,side(B|A),kind(U|T),action(N|C|D|empty),price_ticks,qty,level,aggressor(B|S|empty)
// Book updates may omit the trailing aggressor column. Lines starting with '#'
// are headers/comments, blank lines are ignored.

#include <array>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "liqregime/errors.hpp"

namespace liqregime::feed {

enum class Kind : std::uint8_t { BookUpdate, Trade };
enum class Side : std::uint8_t { Bid, Ask };
enum class Action : std::uint8_t { None, New, Change, Delete };
enum class Aggressor : std::uint8_t { None, Buy, Sell };

inline constexpr int kMaxLevels = 10;

struct MarketMessage {
    std::int64_t seq = 0;
    std::int64_t ts_ns = 0;
    Kind kind = Kind::BookUpdate;
    Side side = Side::Bid;
    Action action = Action::None;   // BookUpdate only
    std::int64_t price_ticks = 0;   // 1 tick = 0.25 index points
    std::int64_t qty = 0;
    int level = 0;                  // 1..10, BookUpdate only; 0 for trades
    Aggressor aggressor = Aggressor::None;  // Trade only

    bool operator==(const MarketMessage&) const = default;
};

/// Base of parse-time failures; carries the offending field and 1-based line.
class FeedError : public Error {
public:
    FeedError(const std::string& what, std::string field, std::size_t line)
        : Error(what), field_(std::move(field)), line_(line) {}
    const std::string& field() const noexcept { return field_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string field_;
    std::size_t line_;
};

/// Wrong field count or a field that does not decode.
class MalformedRecord : public FeedError {
public:
    MalformedRecord(const std::string& field, std::size_t line, const std::string& detail);
};

/// A field decodes but violates a range or consistency rule.
class DomainError : public FeedError {
public:
    DomainError(const std::string& field, std::size_t line, const std::string& detail);
};

/// Checks every MarketMessage invariant; throws DomainError naming the field.
void validate(const MarketMessage& msg, std::size_t line = 0);

MarketMessage parse_line(std::string_view line, std::size_t line_no = 0);
std::string format_line(const MarketMessage& msg);

char side_code(Side side);
const char* side_name(Side side);

// ---------------------------------------------------------------------------
// Fixed-width binary twin: 40 bytes per record, little-endian.
//   0  int64 seq
//   8  int64 ts_ns
//  16  int64 price_ticks
//  24  int64 qty
//  32  uint8 kind, side, action, aggressor, level
//  37  3 bytes zero padding
// ---------------------------------------------------------------------------
inline constexpr std::size_t kBinaryRecordSize = 40;
using BinaryRecord = std::array<std::uint8_t, kBinaryRecordSize>;

BinaryRecord encode_binary(const MarketMessage& msg);
MarketMessage decode_binary(std::span<const std::uint8_t, kBinaryRecordSize> bytes,
                            std::size_t record_no = 0);

enum class ParseMode { Strict, Lenient };

/// Pulls validated messages from a newline-delimited text stream.
///
/// Strict mode throws on the first malformed line or timestamp regression.
/// Lenient mode skips such lines and counts them in skipped().
class MessageReader {
public:
    explicit MessageReader(std::istream& in, ParseMode mode = ParseMode::Strict);

    std::optional<MarketMessage> next();

    std::size_t records_seen() const noexcept { return records_; }
    std::size_t skipped() const noexcept { return skipped_; }
    std::size_t line_number() const noexcept { return line_no_; }

private:
    std::istream& in_;
    ParseMode mode_;
    std::string line_;
    std::size_t line_no_ = 0;
    std::size_t records_ = 0;
    std::size_t skipped_ = 0;
    std::optional<MarketMessage> last_;
};

struct StreamResult {
    std::vector<MarketMessage> messages;
    std::size_t skipped = 0;
};

StreamResult stream_messages(std::istream& in, ParseMode mode = ParseMode::Strict);

}  // namespace liqregime::feed
