#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>

#include "liqregime/errors.hpp"
#include "liqregime/regime.hpp"

namespace liqregime::signal {

struct SignalConfig {
    std::size_t state_index = 0;      // 1-based; 0 selects the last (highest-sigma) state
    double threshold = 0.2;
    std::int64_t delay_ns = 10'000'000;
};

/// Resolves state_index 0 to K and checks the ranges against K.
SignalConfig resolved(SignalConfig cfg, std::size_t num_states);

class InvalidConfig : public Error {
public:
    using Error::Error;
};

class EmptyStream : public Error {
public:
    EmptyStream() : Error("no observations consumed") {}
};

enum class Decision : std::uint8_t { Pass, Delay };

struct Verdict {
    Decision decision = Decision::Pass;
    std::int64_t window_end_ns = 0;  // end of the latest delay window, 0 if none yet
    bool fired = false;
    double prob = 0.0;
};

/// Rising-edge firing plus delay-window bookkeeping over a probability path.
/// A fire is p_t > threshold with p_{t-1} <= threshold; the path starts below.
class FireTracker {
public:
    FireTracker(double threshold, std::int64_t delay_ns);

    Verdict observe(std::int64_t ts_ns, double prob);

    std::int64_t fires() const noexcept { return fires_; }
    std::int64_t merged_busy_ns() const noexcept { return merged_busy_ns_; }
    std::int64_t window_end_ns() const noexcept { return window_end_ns_; }
    std::int64_t first_ts_ns() const noexcept { return first_ts_ns_; }
    std::int64_t last_ts_ns() const noexcept { return last_ts_ns_; }
    std::size_t observations() const noexcept { return observations_; }
    double threshold() const noexcept { return threshold_; }
    std::int64_t delay_ns() const noexcept { return delay_ns_; }

private:
    double threshold_;
    std::int64_t delay_ns_;
    bool above_ = false;
    bool has_window_ = false;
    std::int64_t fires_ = 0;
    std::int64_t window_end_ns_ = 0;
    std::int64_t merged_busy_ns_ = 0;
    std::int64_t first_ts_ns_ = 0;
    std::int64_t last_ts_ns_ = 0;
    std::size_t observations_ = 0;
};

/// Online detector: Hamilton filter step, then edge detection on the
/// filtered probability of the configured state.
class Detector {
public:
    Detector(regime::SwitchingParams params, SignalConfig cfg);

    Verdict on_observation(std::int64_t ts_ns, const regime::Observation& obs);

    const FireTracker& tracker() const noexcept { return tracker_; }
    std::span<const double> prob() const noexcept { return filter_.prob(); }
    const SignalConfig& config() const noexcept { return cfg_; }

private:
    regime::OnlineFilter filter_;
    SignalConfig cfg_;
    FireTracker tracker_;
};

/// fires/sec x delay x 100, i.e. percent of time covered if windows never overlap.
double duration_percent(double fires_per_sec, std::int64_t delay_ns);

/// Offline count of rising edges, for cross-checking the online tracker.
std::int64_t count_rising_edges(std::span<const double> probs, double threshold);

struct SignalReport {
    std::int64_t fires = 0;
    double fires_per_sec = 0.0;
    double duration_raw_pct = 0.0;
    double duration_merged_pct = 0.0;
    // Echoed settings
    double threshold = 0.0;
    std::int64_t delay_ns = 0;
    std::int64_t span_ns = 0;
    std::size_t observations = 0;
};

/// Rates use the wall-clock span between the first and last observation; a
/// zero span yields zero rates. Throws EmptyStream before any observation.
SignalReport report(const FireTracker& tracker);

void write_report_text(std::ostream& out, const SignalReport& r, std::size_t state_index);
std::string report_json(const SignalReport& r, std::size_t state_index);

/// "ts_ns,prob_state,fire,decision,window_end_ns"
std::string format_event(std::int64_t ts_ns, const Verdict& v);

}  // namespace liqregime::signal
