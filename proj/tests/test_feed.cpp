#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "liqregime/feed.hpp"
#include "support/feed_gen.hpp"

using namespace liqregime;
using namespace liqregime::feed;

TEST(Feed, ParsesBookUpdate) {
    const auto m = parse_line("1,1478692800000000000,B,U,N,9000,150,1");
    EXPECT_EQ(m.seq, 1);
    EXPECT_EQ(m.ts_ns, 1478692800000000000LL);
    EXPECT_EQ(m.kind, Kind::BookUpdate);
    EXPECT_EQ(m.side, Side::Bid);
    EXPECT_EQ(m.action, Action::New);
    EXPECT_EQ(m.price_ticks, 9000);
    EXPECT_EQ(m.qty, 150);
    EXPECT_EQ(m.level, 1);
    EXPECT_EQ(m.aggressor, Aggressor::None);
}

TEST(Feed, ParsesTrade) {
    const auto m = parse_line("2,1478692800000000100,A,T,,9001,5,,B");
    EXPECT_EQ(m.kind, Kind::Trade);
    EXPECT_EQ(m.side, Side::Ask);
    EXPECT_EQ(m.action, Action::None);
    EXPECT_EQ(m.price_ticks, 9001);
    EXPECT_EQ(m.qty, 5);
    EXPECT_EQ(m.level, 0);
    EXPECT_EQ(m.aggressor, Aggressor::Buy);
}

TEST(Feed, LevelOutOfRangeIsDomainError) {
    try {
        parse_line("3,1478692800000000200,B,U,N,9000,150,11", 7);
        FAIL() << "expected DomainError";
    } catch (const DomainError& e) {
        EXPECT_EQ(e.field(), "level");
        EXPECT_EQ(e.line(), 7u);
    }
    EXPECT_THROW(parse_line("3,1,B,U,N,9000,150,0"), DomainError);
    EXPECT_THROW(parse_line("3,1,B,U,N,9000,-1,1"), DomainError);
}

TEST(Feed, MalformedRecordsNameTheField) {
    EXPECT_THROW(parse_line("1,2,B,U,N,9000"), MalformedRecord);
    try {
        parse_line("1,abc,B,U,N,9000,1,1", 3);
        FAIL();
    } catch (const MalformedRecord& e) {
        EXPECT_EQ(e.field(), "ts_ns");
        EXPECT_EQ(e.line(), 3u);
    }
    EXPECT_THROW(parse_line("1,2,X,U,N,9000,1,1"), MalformedRecord);
}

TEST(Feed, TiesAllowedRegressionRejected) {
    std::istringstream ties("1,100,B,U,N,9000,1,1\n2,100,B,U,C,9000,2,1\n");
    EXPECT_EQ(stream_messages(ties).messages.size(), 2u);

    std::istringstream back("1,200,B,U,N,9000,1,1\n2,100,B,U,C,9000,2,1\n");
    try {
        stream_messages(back);
        FAIL();
    } catch (const TimestampRegression& e) {
        EXPECT_EQ(e.seq(), 2);
        EXPECT_EQ(e.ts_prev(), 200);
        EXPECT_EQ(e.ts_now(), 100);
    }
}

TEST(Feed, LenientSkipsAndCounts) {
    std::istringstream in(
        "# header\n"
        "1,100,B,U,N,9000,1,1\n"
        "garbage\n"
        "\n"
        "2,50,B,U,C,9000,2,1\n"
        "3,150,B,U,N,9000,1,12\n"
        "4,150,A,U,N,9001,3,1\n");
    const auto r = stream_messages(in, ParseMode::Lenient);
    ASSERT_EQ(r.messages.size(), 2u);
    EXPECT_EQ(r.skipped, 3u);
    EXPECT_EQ(r.messages[1].seq, 4);
}

TEST(Feed, ThousandGeneratedRecordsRoundTrip) {
    gen::FeedGenerator g(42);
    const auto truth = g.script(1000);
    std::ostringstream os;
    for (const auto& m : truth) os << format_line(m) << '\n';
    std::istringstream in(os.str());
    const auto r = stream_messages(in);
    EXPECT_EQ(r.skipped, 0u);
    EXPECT_EQ(r.messages, truth);
}

TEST(Feed, FormatParseRoundTripProperty) {
    std::mt19937_64 rng(7);
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    for (int i = 0; i < 5000; ++i) {
        MarketMessage m;
        m.seq = static_cast<std::int64_t>(rng() >> 2);
        m.ts_ns = static_cast<std::int64_t>(rng() >> 1);
        m.side = pick(0, 1) ? Side::Ask : Side::Bid;
        m.price_ticks = pick(1, 200000);
        m.qty = pick(0, 1'000'000);
        if (pick(0, 3) == 0) {
            m.kind = Kind::Trade;
            m.qty = pick(1, 1000);
            m.aggressor = static_cast<Aggressor>(pick(1, 2));
        } else {
            m.action = static_cast<Action>(pick(1, 3));
            m.level = pick(1, kMaxLevels);
            if (m.action != Action::Delete) m.qty = pick(1, 1000);
        }
        const std::string line = format_line(m);
        EXPECT_EQ(parse_line(line), m) << line;
        EXPECT_EQ(decode_binary(encode_binary(m)), m) << line;
    }
}

TEST(Feed, BinaryLayoutIsLittleEndian) {
    MarketMessage m = parse_line("258,1,A,U,C,65534,7,3");
    const auto b = encode_binary(m);
    EXPECT_EQ(b[0], 0x02);
    EXPECT_EQ(b[1], 0x01);
    EXPECT_EQ(b[16], 0xFE);
    EXPECT_EQ(b[17], 0xFF);
    EXPECT_EQ(b[18], 0x00);
    EXPECT_EQ(b[24], 7);
    EXPECT_EQ(b[36], 3);
    EXPECT_EQ(b[37], 0);
}
