#include <gtest/gtest.h>

#include <random>

#include "liqregime/signal.hpp"
#include "liqregime/synth.hpp"
#include "support/instances.hpp"

using namespace liqregime;
using namespace liqregime::signal;

namespace {

constexpr std::int64_t kMs = 1'000'000;
constexpr std::int64_t kSec = 1'000'000'000;

}  // namespace

TEST(Signal, SingleRisingEdge) {
    FireTracker t(0.2, 10 * kMs);
    EXPECT_FALSE(t.observe(0, 0.1).fired);
    const auto v = t.observe(1 * kMs, 0.3);
    EXPECT_TRUE(v.fired);
    EXPECT_EQ(v.decision, Decision::Delay);
    EXPECT_EQ(v.window_end_ns, 11 * kMs);
    EXPECT_FALSE(t.observe(2 * kMs, 0.25).fired);
    EXPECT_EQ(t.fires(), 1);
}

TEST(Signal, NoRetriggerWhileAbove) {
    FireTracker t(0.2, 10 * kMs);
    EXPECT_TRUE(t.observe(0, 0.3).fired);
    EXPECT_FALSE(t.observe(1, 0.3).fired);
    EXPECT_FALSE(t.observe(2, 0.3).fired);
    EXPECT_EQ(t.fires(), 1);
    const std::vector<double> path = {0.3, 0.3, 0.3};
    EXPECT_EQ(count_rising_edges(path, 0.2), 1);
}

TEST(Signal, ThresholdIsStrict) {
    const std::vector<double> path = {0.2, 0.2, 0.21, 0.2, 0.5};
    EXPECT_EQ(count_rising_edges(path, 0.2), 2);
}

TEST(Signal, DelayWindowBoundaries) {
    FireTracker t(0.5, 10 * kMs);
    t.observe(0, 0.9);
    EXPECT_EQ(t.observe(10 * kMs - 1, 0.1).decision, Decision::Delay);
    EXPECT_EQ(t.observe(10 * kMs, 0.1).decision, Decision::Pass);
}

TEST(Signal, DurationPercentMatchesPublishedFigures) {
    EXPECT_EQ(duration_percent(0.636, 10 * kMs), 0.636);
    EXPECT_EQ(duration_percent(10.59, 10 * kMs), 10.59);
    EXPECT_EQ(duration_percent(0.0, 10 * kMs), 0.0);
}

TEST(Signal, ReportOneFire) {
    FireTracker t(0.2, 10 * kMs);
    t.observe(0, 0.9);
    t.observe(kSec, 0.1);
    const auto r = report(t);
    EXPECT_EQ(r.fires, 1);
    EXPECT_DOUBLE_EQ(r.duration_raw_pct, 1.0);
    EXPECT_DOUBLE_EQ(r.duration_merged_pct, 1.0);
}

TEST(Signal, ReportOverlappingFires) {
    FireTracker t(0.2, 10 * kMs);
    t.observe(0, 0.9);
    t.observe(1 * kMs, 0.1);
    t.observe(5 * kMs, 0.9);
    t.observe(6 * kMs, 0.1);
    t.observe(kSec, 0.1);
    const auto r = report(t);
    EXPECT_EQ(r.fires, 2);
    EXPECT_DOUBLE_EQ(r.duration_raw_pct, 2.0);
    EXPECT_DOUBLE_EQ(r.duration_merged_pct, 1.5);
}

TEST(Signal, Report636FiresIn1000Seconds) {
    FireTracker t(0.2, 10 * kMs);
    const std::int64_t gap = 1000 * kSec / 636;
    for (int i = 0; i < 636; ++i) {
        t.observe(i * gap, 0.9);
        t.observe(i * gap + 20 * kMs, 0.05);
    }
    t.observe(1000 * kSec, 0.05);
    const auto r = report(t);
    EXPECT_EQ(r.fires, 636);
    EXPECT_EQ(r.fires_per_sec, 0.636);
    EXPECT_EQ(r.duration_raw_pct, 0.636);
    EXPECT_NEAR(r.duration_merged_pct, 0.636, 1e-12);
}

TEST(Signal, EmptyAndZeroSpan) {
    FireTracker t(0.2, 10 * kMs);
    EXPECT_THROW(report(t), EmptyStream);
    t.observe(5, 0.9);
    const auto r = report(t);
    EXPECT_EQ(r.fires, 1);
    EXPECT_EQ(r.fires_per_sec, 0.0);
    EXPECT_EQ(r.duration_merged_pct, 0.0);
}

TEST(Signal, ConfigValidation) {
    const auto p = regime::make_params({0, 0}, {0, 0}, {0, 0}, {1, 2});
    EXPECT_EQ(resolved({}, 4).state_index, 4u);
    EXPECT_THROW(Detector(p, {3, 0.2, 10 * kMs}), InvalidConfig);
    EXPECT_THROW(Detector(p, {1, 1.0, 10 * kMs}), InvalidConfig);
    EXPECT_THROW(Detector(p, {1, 0.2, 0}), InvalidConfig);
    Detector d(p, {});
    d.on_observation(10, {0, 0, 0});
    EXPECT_THROW(d.on_observation(9, {0, 0, 0}), TimestampRegression);
}

TEST(Signal, PropertiesOnRandomPaths) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<std::int64_t> dt(0, 20 * kMs);
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<double> path(500);
        for (double& x : path) x = u(rng);
        std::vector<std::int64_t> ts(path.size());
        std::int64_t now = 0;
        for (auto& x : ts) x = (now += dt(rng));
        for (double th : {0.95, 0.8, 0.5, 0.3, 0.1}) {
            FireTracker t(th, 10 * kMs);
            bool close = false;
            std::int64_t last_fire = -1;
            for (std::size_t i = 0; i < path.size(); ++i) {
                if (t.observe(ts[i], path[i]).fired) {
                    if (last_fire >= 0 && ts[i] - last_fire < 10 * kMs) close = true;
                    last_fire = ts[i];
                }
            }
            EXPECT_EQ(t.fires(), count_rising_edges(path, th));
            const auto r = report(t);
            EXPECT_LE(r.duration_merged_pct, r.duration_raw_pct + 1e-12);
            if (!close && last_fire + 10 * kMs <= ts.back()) {
                EXPECT_NEAR(r.duration_merged_pct, r.duration_raw_pct, 1e-9);
            }
            if (close) EXPECT_LT(r.duration_merged_pct, r.duration_raw_pct);
        }
    }
}

TEST(Signal, LowerThresholdCanMergeExcursions) {
    // Two excursions above 0.3 separated by a dip to 0.1 are one excursion above 0.05.
    const std::vector<double> path = {0.5, 0.1, 0.5};
    EXPECT_EQ(count_rising_edges(path, 0.3), 2);
    EXPECT_EQ(count_rising_edges(path, 0.05), 1);
}

TEST(Signal, LoweringThresholdNeverLosesFiresOnUnimodalPaths) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<double> path(200);
        const std::size_t peak = rng() % path.size();
        double x = 0.0;
        for (std::size_t i = 0; i < path.size(); ++i) {
            x = i <= peak ? std::min(1.0, x + u(rng) * 0.02) : std::max(0.0, x - u(rng) * 0.02);
            path[i] = x;
        }
        std::int64_t prev = 0;
        for (double th = 0.95; th > 0.0; th -= 0.05) {
            const auto f = count_rising_edges(path, th);
            EXPECT_GE(f, prev);
            prev = f;
        }
    }
}

TEST(Signal, DetectorMatchesBatchFilter) {
    synth::SimSpec spec;
    spec.params = regime::make_params({0.0, 0.1, 0.0, -0.1}, {0.9, 0.5, 0.2, 0.8}, {0.1, 0.3, -0.2, 0.0},
                                      {0.05, 0.2, 0.4, 1.0}, 0.9);
    spec.length = 20000;
    spec.seed = 5;
    const auto sim = synth::simulate(spec);
    const auto batch = regime::hamilton_filter(spec.params, sim.data);
    std::vector<double> p4(sim.data.size());
    for (std::size_t t = 0; t < p4.size(); ++t) p4[t] = batch.filtered(t, 3);

    Detector det(spec.params, {});
    std::int64_t last_fire = -1;
    for (std::size_t t = 0; t < sim.data.size(); ++t) {
        const std::int64_t ts = static_cast<std::int64_t>(t) * kMs;
        const auto v = det.on_observation(ts, sim.data.at(t));
        EXPECT_EQ(v.prob, p4[t]);
        if (v.fired) last_fire = ts;
        const bool within = last_fire >= 0 && ts < last_fire + 10 * kMs;
        EXPECT_EQ(v.decision == Decision::Delay, within) << t;
    }
    EXPECT_EQ(det.tracker().fires(), count_rising_edges(p4, 0.2));
    EXPECT_GT(det.tracker().fires(), 10);
}

TEST(Signal, EventAndReportFormats) {
    Verdict v;
    v.prob = 0.25;
    v.fired = true;
    v.decision = Decision::Delay;
    v.window_end_ns = 110;
    EXPECT_EQ(format_event(100, v), "100,0.25,1,D,110");
    SignalReport r;
    r.fires = 2;
    r.fires_per_sec = 2.0;
    r.duration_raw_pct = 2.0;
    r.duration_merged_pct = 1.5;
    r.threshold = 0.2;
    r.delay_ns = 10 * kMs;
    r.span_ns = kSec;
    r.observations = 5;
    std::ostringstream os;
    write_report_text(os, r, 4);
    EXPECT_NE(os.str().find("duration_merged_pct: 1.5\n"), std::string::npos);
    EXPECT_NE(report_json(r, 4).find("\"state_index\": 4"), std::string::npos);
}
