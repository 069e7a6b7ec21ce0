#include "liqregime/book.hpp"

#include <algorithm>
#include <cmath>

namespace liqregime::book {

namespace {

// Strictly better price for the side: higher for bids, lower for asks.
bool better(Side side, std::int64_t a, std::int64_t b) { return side == Side::Bid ? a > b : a < b; }

}  // namespace

const char* errc_name(BookErrc code) {
    switch (code) {
        case BookErrc::MissingLevel: return "MissingLevel";
        case BookErrc::CrossedBook: return "CrossedBook";
        case BookErrc::EmptySide: return "EmptySide";
        case BookErrc::PriceOrder: return "PriceOrder";
        case BookErrc::PriceMismatch: return "PriceMismatch";
    }
    return "BookError";
}

BookError::BookError(BookErrc code, const std::string& detail)
    : Error(std::string(errc_name(code)) + ": " + detail), code_(code) {}

bool OrderBook::top_crossed() const {
    return has_both_sides() && bids_.levels[0].price_ticks >= asks_.levels[0].price_ticks;
}

bool OrderBook::apply(const MarketMessage& msg) {
    ts_ns_ = msg.ts_ns;
    if (msg.kind == feed::Kind::Trade) return false;

    Ladder& l = ladder(msg.side);
    const int pos = msg.level - 1;
    const Ladder saved = l;
    auto where = [&] {
        return std::string(feed::side_name(msg.side)) + " level " + std::to_string(msg.level) +
               " (seq " + std::to_string(msg.seq) + ")";
    };

    switch (msg.action) {
        case feed::Action::New: {
            if (pos > l.size) throw BookError(BookErrc::MissingLevel, "insert beyond depth at " + where());
            if ((pos > 0 && !better(msg.side, l.levels[pos - 1].price_ticks, msg.price_ticks)) ||
                (pos < l.size && !better(msg.side, msg.price_ticks, l.levels[pos].price_ticks))) {
                throw BookError(BookErrc::PriceOrder,
                                "price " + std::to_string(msg.price_ticks) + " out of order at " + where());
            }
            const int last = std::min(l.size, feed::kMaxLevels - 1);
            for (int i = last; i > pos; --i) l.levels[i] = l.levels[i - 1];
            l.levels[pos] = {msg.price_ticks, msg.qty};
            l.size = std::min(l.size + 1, feed::kMaxLevels);
            break;
        }
        case feed::Action::Change: {
            if (pos >= l.size) throw BookError(BookErrc::MissingLevel, "change of empty " + where());
            if (l.levels[pos].price_ticks != msg.price_ticks) {
                throw BookError(BookErrc::PriceMismatch, "change price differs at " + where());
            }
            if (l.levels[pos].qty == msg.qty) return false;
            l.levels[pos].qty = msg.qty;
            return true;  // quantity-only edits cannot cross the book
        }
        case feed::Action::Delete: {
            if (pos >= l.size) throw BookError(BookErrc::MissingLevel, "delete of empty " + where());
            if (l.levels[pos].price_ticks != msg.price_ticks) {
                throw BookError(BookErrc::PriceMismatch, "delete price differs at " + where());
            }
            for (int i = pos; i + 1 < l.size; ++i) l.levels[i] = l.levels[i + 1];
            --l.size;
            l.levels[l.size] = {};
            break;
        }
        case feed::Action::None:
            return false;
    }

    const bool crossed_now = top_crossed();
    if (crossed_now && mode_ == BookMode::Strict) {
        l = saved;
        throw BookError(BookErrc::CrossedBook, "update would cross the book at " + where());
    }
    crossed_ = crossed_now;
    return true;
}

bool OrderBook::invariants_hold() const {
    for (Side side : {Side::Bid, Side::Ask}) {
        const Ladder& l = ladder(side);
        if (l.size < 0 || l.size > feed::kMaxLevels) return false;
        for (int i = 0; i < l.size; ++i) {
            if (l.levels[i].qty <= 0 || l.levels[i].price_ticks <= 0) return false;
            if (i > 0 && !better(side, l.levels[i - 1].price_ticks, l.levels[i].price_ticks)) return false;
        }
    }
    if (top_crossed() != crossed_) return false;
    return mode_ == BookMode::Lenient || !crossed_;
}

bool OrderBook::operator==(const OrderBook& other) const {
    auto same = [](const Ladder& a, const Ladder& b) {
        return a.size == b.size && std::equal(a.levels.begin(), a.levels.begin() + a.size, b.levels.begin());
    };
    return same(bids_, other.bids_) && same(asks_, other.asks_) && ts_ns_ == other.ts_ns_ &&
           crossed_ == other.crossed_;
}

std::pair<OrderBook, bool> apply_message(OrderBook book, const MarketMessage& msg) {
    const bool changed = book.apply(msg);
    return {std::move(book), changed};
}

std::int64_t midpoint_halfticks(const OrderBook& book) {
    if (!book.has_both_sides()) throw BookError(BookErrc::EmptySide, "midpoint needs both sides");
    return book.bids()[0].price_ticks + book.asks()[0].price_ticks;
}

std::int64_t band_liquidity(const OrderBook& book, Side side, int band_ticks) {
    const std::int64_t mid = midpoint_halfticks(book);
    const std::int64_t band = 2 * static_cast<std::int64_t>(band_ticks);
    std::int64_t total = 0;
    // Levels are sorted away from the midpoint, so stop at the first miss.
    if (side == Side::Bid) {
        for (const auto& lvl : book.bids()) {
            if (2 * lvl.price_ticks < mid - band) break;
            total += lvl.qty;
        }
    } else {
        for (const auto& lvl : book.asks()) {
            if (2 * lvl.price_ticks > mid + band) break;
            total += lvl.qty;
        }
    }
    return total;
}

const char* transform_name(Transform t) {
    switch (t) {
        case Transform::Raw: return "raw";
        case Transform::Log1p: return "log1p";
        case Transform::ZScore: return "zscore";
    }
    return "?";
}

std::optional<Transform> parse_transform(std::string_view name) {
    if (name == "raw") return Transform::Raw;
    if (name == "log1p") return Transform::Log1p;
    if (name == "zscore") return Transform::ZScore;
    return std::nullopt;
}

SeriesExtractor::SeriesExtractor(Side side, Transform transform, int band_ticks, BookMode mode)
    : book_(mode), side_(side), transform_(transform), band_ticks_(band_ticks) {
    if (transform == Transform::ZScore) {
        throw TransformUnavailable("zscore needs the whole series; use batch extraction");
    }
    if (band_ticks < 1) throw Error("band_ticks must be >= 1");
}

double SeriesExtractor::transformed(std::int64_t raw) const {
    const double x = static_cast<double>(raw);
    return transform_ == Transform::Log1p ? std::log1p(x) : x;
}

std::optional<LiquidityObservation> SeriesExtractor::push(const MarketMessage& msg) {
    if (!book_.apply(msg) || !book_.has_both_sides()) return std::nullopt;

    const std::int64_t liq = band_liquidity(book_, side_, band_ticks_);
    const std::int64_t mid = midpoint_halfticks(book_);
    if (!seeded_) {
        seeded_ = true;
        ref_liq_ = liq;
        ref_mid_ = mid;
        return std::nullopt;
    }
    if (liq == ref_liq_ && mid == ref_mid_) return std::nullopt;

    LiquidityObservation obs;
    obs.ts_ns = msg.ts_ns;
    obs.side = side_;
    obs.liq = transformed(liq);
    obs.liq_lag = transformed(ref_liq_);
    obs.dbam = static_cast<double>(mid - ref_mid_) * kPointsPerHalfTick;
    obs.crossed = book_.crossed();
    ref_liq_ = liq;
    ref_mid_ = mid;
    return obs;
}

ZScoreStats zscore_in_place(std::span<LiquidityObservation> series) {
    ZScoreStats stats;
    if (series.empty()) return stats;
    double sum = 0.0;
    for (const auto& o : series) sum += o.liq;
    stats.mean = sum / static_cast<double>(series.size());
    double ss = 0.0;
    for (const auto& o : series) ss += (o.liq - stats.mean) * (o.liq - stats.mean);
    const double sd = std::sqrt(ss / static_cast<double>(series.size()));
    stats.scale = sd > 0.0 ? sd : 1.0;
    for (auto& o : series) {
        o.liq = (o.liq - stats.mean) / stats.scale;
        o.liq_lag = (o.liq_lag - stats.mean) / stats.scale;
    }
    return stats;
}

std::vector<LiquidityObservation> extract_series(std::span<const MarketMessage> messages, Side side,
                                                 Transform transform, int band_ticks, BookMode mode) {
    const bool zscore = transform == Transform::ZScore;
    SeriesExtractor extractor(side, zscore ? Transform::Raw : transform, band_ticks, mode);
    std::vector<LiquidityObservation> out;
    for (const auto& msg : messages) {
        if (auto obs = extractor.push(msg)) out.push_back(*obs);
    }
    if (zscore) zscore_in_place(out);
    return out;
}

}  // namespace liqregime::book
