#include "liqregime/feed.hpp"

#include <charconv>
#include <utility>

namespace liqregime::feed {

namespace {

constexpr std::size_t kFieldCount = 9;

constexpr const char* kFieldNames[kFieldCount] = {
    "seq", "ts_ns", "side", "kind", "action", "price_ticks", "qty", "level", "aggressor"};

std::string located(std::size_t line, const std::string& field, const std::string& detail) {
    std::string out = "line " + std::to_string(line) + ": ";
    if (!field.empty()) out += "field '" + field + "': ";
    return out + detail;
}

std::int64_t parse_int(std::string_view text, int field, std::size_t line) {
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw MalformedRecord(kFieldNames[field], line,
                              "not an integer: '" + std::string(text) + "'");
    }
    return value;
}

char single_char(std::string_view text, int field, std::size_t line) {
    if (text.size() != 1) {
        throw MalformedRecord(kFieldNames[field], line,
                              "expected one character, got '" + std::string(text) + "'");
    }
    return text.front();
}

void put_le(BinaryRecord& out, std::size_t offset, std::uint64_t value) {
    for (std::size_t i = 0; i < 8; ++i) out[offset + i] = static_cast<std::uint8_t>(value >> (8 * i));
}

std::int64_t get_le(std::span<const std::uint8_t, kBinaryRecordSize> in, std::size_t offset) {
    std::uint64_t value = 0;
    for (std::size_t i = 0; i < 8; ++i) value |= static_cast<std::uint64_t>(in[offset + i]) << (8 * i);
    return static_cast<std::int64_t>(value);
}

}  // namespace

MalformedRecord::MalformedRecord(const std::string& field, std::size_t line,
                                 const std::string& detail)
    : FeedError("malformed record, " + located(line, field, detail), field, line) {}

DomainError::DomainError(const std::string& field, std::size_t line, const std::string& detail)
    : FeedError("domain error, " + located(line, field, detail), field, line) {}

char side_code(Side side) { return side == Side::Bid ? 'B' : 'A'; }

const char* side_name(Side side) { return side == Side::Bid ? "bid" : "ask"; }

void validate(const MarketMessage& msg, std::size_t line) {
    if (msg.ts_ns < 0) throw DomainError("ts_ns", line, "negative timestamp");
    if (msg.price_ticks <= 0) {
        throw DomainError("price_ticks", line, "must be positive (got " + std::to_string(msg.price_ticks) + ")");
    }
    if (msg.qty < 0) throw DomainError("qty", line, "negative quantity " + std::to_string(msg.qty));

    if (msg.kind == Kind::BookUpdate) {
        if (msg.action == Action::None) throw DomainError("action", line, "book update without action");
        if (msg.level < 1 || msg.level > kMaxLevels) {
            throw DomainError("level", line, "out of range 1..10 (got " + std::to_string(msg.level) + ")");
        }
        if ((msg.action == Action::New || msg.action == Action::Change) && msg.qty == 0) {
            throw DomainError("qty", line, "New/Change requires qty > 0");
        }
        if (msg.aggressor != Aggressor::None) {
            throw DomainError("aggressor", line, "book updates carry no aggressor");
        }
    } else {
        if (msg.action != Action::None) throw DomainError("action", line, "trades carry no action");
        if (msg.level != 0) throw DomainError("level", line, "trades carry no level");
        if (msg.aggressor == Aggressor::None) throw DomainError("aggressor", line, "trade without aggressor");
    }
}

MarketMessage parse_line(std::string_view line, std::size_t line_no) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    std::string_view fields[kFieldCount];
    std::size_t count = 0;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (count == kFieldCount) {
            throw MalformedRecord("", line_no, "too many fields");
        }
        if (comma == std::string_view::npos) {
            fields[count++] = line.substr(start);
            break;
        }
        fields[count++] = line.substr(start, comma - start);
        start = comma + 1;
    }
    if (count < kFieldCount - 1) {
        throw MalformedRecord("", line_no,
                              "expected 8 or 9 fields, got " + std::to_string(count));
    }

    MarketMessage msg;
    msg.seq = parse_int(fields[0], 0, line_no);
    msg.ts_ns = parse_int(fields[1], 1, line_no);

    switch (single_char(fields[2], 2, line_no)) {
        case 'B': msg.side = Side::Bid; break;
        case 'A': msg.side = Side::Ask; break;
        default: throw MalformedRecord("side", line_no, "expected B or A");
    }
    switch (single_char(fields[3], 3, line_no)) {
        case 'U': msg.kind = Kind::BookUpdate; break;
        case 'T': msg.kind = Kind::Trade; break;
        default: throw MalformedRecord("kind", line_no, "expected U or T");
    }
    if (!fields[4].empty()) {
        switch (single_char(fields[4], 4, line_no)) {
            case 'N': msg.action = Action::New; break;
            case 'C': msg.action = Action::Change; break;
            case 'D': msg.action = Action::Delete; break;
            default: throw MalformedRecord("action", line_no, "expected N, C, D or empty");
        }
    }
    msg.price_ticks = parse_int(fields[5], 5, line_no);
    msg.qty = parse_int(fields[6], 6, line_no);
    if (!fields[7].empty()) {
        const std::int64_t level = parse_int(fields[7], 7, line_no);
        if (level < 1 || level > kMaxLevels) {
            throw DomainError("level", line_no, "out of range 1..10 (got " + std::to_string(level) + ")");
        }
        msg.level = static_cast<int>(level);
    } else if (msg.kind == Kind::BookUpdate) {
        throw DomainError("level", line_no, "book update without level");
    }
    if (count == kFieldCount && !fields[8].empty()) {
        switch (single_char(fields[8], 8, line_no)) {
            case 'B': msg.aggressor = Aggressor::Buy; break;
            case 'S': msg.aggressor = Aggressor::Sell; break;
            default: throw MalformedRecord("aggressor", line_no, "expected B, S or empty");
        }
    }

    validate(msg, line_no);
    return msg;
}

std::string format_line(const MarketMessage& msg) {
    std::string out;
    out.reserve(64);
    out += std::to_string(msg.seq);
    out += ',';
    out += std::to_string(msg.ts_ns);
    out += ',';
    out += side_code(msg.side);
    out += ',';
    out += msg.kind == Kind::BookUpdate ? 'U' : 'T';
    out += ',';
    switch (msg.action) {
        case Action::New: out += 'N'; break;
        case Action::Change: out += 'C'; break;
        case Action::Delete: out += 'D'; break;
        case Action::None: break;
    }
    out += ',';
    out += std::to_string(msg.price_ticks);
    out += ',';
    out += std::to_string(msg.qty);
    out += ',';
    if (msg.kind == Kind::BookUpdate) {
        out += std::to_string(msg.level);
    } else {
        out += ',';
        out += msg.aggressor == Aggressor::Buy ? 'B' : 'S';
    }
    return out;
}

BinaryRecord encode_binary(const MarketMessage& msg) {
    BinaryRecord out{};
    put_le(out, 0, static_cast<std::uint64_t>(msg.seq));
    put_le(out, 8, static_cast<std::uint64_t>(msg.ts_ns));
    put_le(out, 16, static_cast<std::uint64_t>(msg.price_ticks));
    put_le(out, 24, static_cast<std::uint64_t>(msg.qty));
    out[32] = static_cast<std::uint8_t>(msg.kind);
    out[33] = static_cast<std::uint8_t>(msg.side);
    out[34] = static_cast<std::uint8_t>(msg.action);
    out[35] = static_cast<std::uint8_t>(msg.aggressor);
    out[36] = static_cast<std::uint8_t>(msg.level);
    return out;
}

MarketMessage decode_binary(std::span<const std::uint8_t, kBinaryRecordSize> bytes,
                            std::size_t record_no) {
    if (bytes[32] > 1) throw MalformedRecord("kind", record_no, "bad enum byte");
    if (bytes[33] > 1) throw MalformedRecord("side", record_no, "bad enum byte");
    if (bytes[34] > 3) throw MalformedRecord("action", record_no, "bad enum byte");
    if (bytes[35] > 2) throw MalformedRecord("aggressor", record_no, "bad enum byte");
    MarketMessage msg;
    msg.seq = get_le(bytes, 0);
    msg.ts_ns = get_le(bytes, 8);
    msg.price_ticks = get_le(bytes, 16);
    msg.qty = get_le(bytes, 24);
    msg.kind = static_cast<Kind>(bytes[32]);
    msg.side = static_cast<Side>(bytes[33]);
    msg.action = static_cast<Action>(bytes[34]);
    msg.aggressor = static_cast<Aggressor>(bytes[35]);
    msg.level = bytes[36];
    validate(msg, record_no);
    return msg;
}

MessageReader::MessageReader(std::istream& in, ParseMode mode) : in_(in), mode_(mode) {}

std::optional<MarketMessage> MessageReader::next() {
    while (std::getline(in_, line_)) {
        ++line_no_;
        if (line_.empty() || line_ == "\r" || line_.front() == '#') continue;
        ++records_;
        try {
            MarketMessage msg = parse_line(line_, line_no_);
            if (last_ && msg.ts_ns < last_->ts_ns) {
                throw TimestampRegression(msg.seq, last_->ts_ns, msg.ts_ns);
            }
            last_ = msg;
            return msg;
        } catch (const Error&) {
            if (mode_ == ParseMode::Strict) throw;
            ++skipped_;
        }
    }
    return std::nullopt;
}

StreamResult stream_messages(std::istream& in, ParseMode mode) {
    MessageReader reader(in, mode);
    StreamResult result;
    while (auto msg = reader.next()) result.messages.push_back(*msg);
    result.skipped = reader.skipped();
    return result;
}

}  // namespace liqregime::feed
