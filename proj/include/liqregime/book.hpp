#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "liqregime/errors.hpp"
#include "liqregime/feed.hpp"

namespace liqregime::book {

using feed::MarketMessage;
using feed::Side;

struct PriceLevel {
    std::int64_t price_ticks = 0;
    std::int64_t qty = 0;

    bool operator==(const PriceLevel&) const = default;
};

enum class BookMode { Strict, Lenient };

enum class BookErrc { MissingLevel, CrossedBook, EmptySide, PriceOrder, PriceMismatch };

class BookError : public Error {
public:
    BookError(BookErrc code, const std::string& detail);
    BookErrc code() const noexcept { return code_; }

private:
    BookErrc code_;
};

const char* errc_name(BookErrc code);

/// Level-relative 10-deep ladder per side.
///
/// Bids are kept strictly descending and asks strictly ascending by price.
/// In strict mode an update that would cross the book is rejected with
/// CrossedBook and the ladder is left untouched; in lenient mode it is applied
/// and crossed() reports the condition until a later update uncrosses it.
class OrderBook {
public:
    explicit OrderBook(BookMode mode = BookMode::Strict) : mode_(mode) {}

    /// Applies one validated message; returns true iff the ladder mutated.
    bool apply(const MarketMessage& msg);

    std::span<const PriceLevel> levels(Side side) const {
        const Ladder& l = ladder(side);
        return {l.levels.data(), static_cast<std::size_t>(l.size)};
    }
    std::span<const PriceLevel> bids() const { return levels(Side::Bid); }
    std::span<const PriceLevel> asks() const { return levels(Side::Ask); }

    std::int64_t ts_ns() const noexcept { return ts_ns_; }
    bool crossed() const noexcept { return crossed_; }
    bool has_both_sides() const noexcept { return bids_.size > 0 && asks_.size > 0; }
    BookMode mode() const noexcept { return mode_; }

    /// Ordering, uniqueness, positive quantities, depth bound, and (strict
    /// mode) an uncrossed top of book.
    bool invariants_hold() const;

    bool operator==(const OrderBook& other) const;

private:
    struct Ladder {
        std::array<PriceLevel, feed::kMaxLevels> levels{};
        int size = 0;
    };

    Ladder& ladder(Side side) { return side == Side::Bid ? bids_ : asks_; }
    const Ladder& ladder(Side side) const { return side == Side::Bid ? bids_ : asks_; }
    bool top_crossed() const;

    Ladder bids_;
    Ladder asks_;
    std::int64_t ts_ns_ = 0;
    bool crossed_ = false;
    BookMode mode_;
};

/// Value-semantics wrapper: returns the updated copy and the changed flag.
std::pair<OrderBook, bool> apply_message(OrderBook book, const MarketMessage& msg);

/// best bid + best ask, i.e. the midpoint expressed in half-ticks.
std::int64_t midpoint_halfticks(const OrderBook& book);

/// Contracts resting on `side` within `band_ticks` of the midpoint.
std::int64_t band_liquidity(const OrderBook& book, Side side, int band_ticks = 4);

/// One tick is 0.25 index points, so one half-tick is 0.125.
inline constexpr double kPointsPerHalfTick = 0.125;

// ---------------------------------------------------------------------------
// Market-time liquidity series
// ---------------------------------------------------------------------------

enum class Transform { Raw, Log1p, ZScore };

const char* transform_name(Transform t);
std::optional<Transform> parse_transform(std::string_view name);

struct LiquidityObservation {
    std::int64_t ts_ns = 0;
    Side side = Side::Bid;
    double liq = 0.0;
    double liq_lag = 0.0;
    double dbam = 0.0;     // midpoint change in index points
    bool crossed = false;  // lenient mode only: emitted from a crossed book

    bool operator==(const LiquidityObservation&) const = default;
};

class TransformUnavailable : public Error {
public:
    explicit TransformUnavailable(const std::string& detail) : Error(detail) {}
};

/// Streaming market-time sampler for one side of the book.
///
/// Emits an observation for every message after which the side's band
/// liquidity or the midpoint differs from the previous sample point. The first
/// sample point only seeds the lag and is not emitted.
class SeriesExtractor {
public:
    SeriesExtractor(Side side, Transform transform = Transform::Log1p, int band_ticks = 4,
                    BookMode mode = BookMode::Strict);

    std::optional<LiquidityObservation> push(const MarketMessage& msg);

    const OrderBook& book() const noexcept { return book_; }
    Side side() const noexcept { return side_; }

private:
    double transformed(std::int64_t raw) const;

    OrderBook book_;
    Side side_;
    Transform transform_;
    int band_ticks_;
    bool seeded_ = false;
    std::int64_t ref_liq_ = 0;
    std::int64_t ref_mid_ = 0;
};

struct ZScoreStats {
    double mean = 0.0;
    double scale = 1.0;
};

/// Standardizes liq and liq_lag in place with the batch mean and population
/// standard deviation of liq. A zero-variance series keeps scale 1.
ZScoreStats zscore_in_place(std::span<LiquidityObservation> series);

std::vector<LiquidityObservation> extract_series(std::span<const MarketMessage> messages, Side side,
                                                 Transform transform = Transform::Log1p,
                                                 int band_ticks = 4,
                                                 BookMode mode = BookMode::Strict);

}  // namespace liqregime::book
