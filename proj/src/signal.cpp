#include "liqregime/signal.hpp"

#include <algorithm>
#include <json.hpp>

#include "liqregime/text.hpp"

namespace liqregime::signal {

SignalConfig resolved(SignalConfig cfg, std::size_t num_states) {
    if (cfg.state_index == 0) cfg.state_index = num_states;
    if (cfg.state_index < 1 || cfg.state_index > num_states) {
        throw InvalidConfig("state_index " + std::to_string(cfg.state_index) + " outside 1.." +
                            std::to_string(num_states));
    }
    if (!(cfg.threshold > 0.0 && cfg.threshold < 1.0)) throw InvalidConfig("threshold must be in (0, 1)");
    if (cfg.delay_ns <= 0) throw InvalidConfig("delay must be positive");
    return cfg;
}

FireTracker::FireTracker(double threshold, std::int64_t delay_ns) : threshold_(threshold), delay_ns_(delay_ns) {
    if (delay_ns <= 0) throw InvalidConfig("delay must be positive");
}

Verdict FireTracker::observe(std::int64_t ts_ns, double prob) {
    if (observations_ > 0 && ts_ns < last_ts_ns_) throw TimestampRegression(-1, last_ts_ns_, ts_ns);
    if (observations_ == 0) first_ts_ns_ = ts_ns;
    last_ts_ns_ = ts_ns;
    ++observations_;

    Verdict v;
    v.prob = prob;
    const bool above = prob > threshold_;
    if (above && !above_) {
        ++fires_;
        v.fired = true;
        const std::int64_t end = ts_ns + delay_ns_;
        merged_busy_ns_ += has_window_ && ts_ns < window_end_ns_ ? end - window_end_ns_ : delay_ns_;
        window_end_ns_ = end;
        has_window_ = true;
    }
    above_ = above;
    v.window_end_ns = window_end_ns_;
    v.decision = has_window_ && ts_ns < window_end_ns_ ? Decision::Delay : Decision::Pass;
    return v;
}

Detector::Detector(regime::SwitchingParams params, SignalConfig cfg)
    : filter_(std::move(params)),
      cfg_(resolved(cfg, filter_.params().num_states())),
      tracker_(cfg_.threshold, cfg_.delay_ns) {}

Verdict Detector::on_observation(std::int64_t ts_ns, const regime::Observation& obs) {
    if (tracker_.observations() > 0 && ts_ns < tracker_.last_ts_ns()) {
        throw TimestampRegression(-1, tracker_.last_ts_ns(), ts_ns);
    }
    const auto prob = filter_.update(obs);
    return tracker_.observe(ts_ns, prob[cfg_.state_index - 1]);
}

double duration_percent(double fires_per_sec, std::int64_t delay_ns) {
    // fires/sec * (delay_ns / 1e9) * 100, grouped to keep exact decimals exact
    return fires_per_sec * static_cast<double>(delay_ns) / 1e7;
}

std::int64_t count_rising_edges(std::span<const double> probs, double threshold) {
    std::int64_t fires = 0;
    bool above = false;
    for (double p : probs) {
        if (p > threshold && !above) ++fires;
        above = p > threshold;
    }
    return fires;
}

SignalReport report(const FireTracker& tracker) {
    if (tracker.observations() == 0) throw EmptyStream();
    SignalReport r;
    r.fires = tracker.fires();
    r.threshold = tracker.threshold();
    r.delay_ns = tracker.delay_ns();
    r.observations = tracker.observations();
    r.span_ns = tracker.last_ts_ns() - tracker.first_ts_ns();
    if (r.span_ns > 0) {
        const double span_sec = static_cast<double>(r.span_ns) / 1e9;
        r.fires_per_sec = static_cast<double>(r.fires) / span_sec;
        r.duration_raw_pct = duration_percent(r.fires_per_sec, r.delay_ns);
        const std::int64_t overhang = std::max<std::int64_t>(0, tracker.window_end_ns() - tracker.last_ts_ns());
        const std::int64_t busy = r.fires > 0 ? tracker.merged_busy_ns() - overhang : 0;
        r.duration_merged_pct = static_cast<double>(busy) / static_cast<double>(r.span_ns) * 100.0;
    }
    return r;
}

void write_report_text(std::ostream& out, const SignalReport& r, std::size_t state_index) {
    out << "fires: " << r.fires << '\n'
        << "fires_per_sec: " << text::format_shortest(r.fires_per_sec) << '\n'
        << "duration_raw_pct: " << text::format_shortest(r.duration_raw_pct) << '\n'
        << "duration_merged_pct: " << text::format_shortest(r.duration_merged_pct) << '\n'
        << "state_index: " << state_index << '\n'
        << "threshold: " << text::format_shortest(r.threshold) << '\n'
        << "delay_ns: " << r.delay_ns << '\n'
        << "span_ns: " << r.span_ns << '\n'
        << "observations: " << r.observations << '\n';
}

std::string report_json(const SignalReport& r, std::size_t state_index) {
    nlohmann::ordered_json j;
    j["fires"] = r.fires;
    j["fires_per_sec"] = r.fires_per_sec;
    j["duration_raw_pct"] = r.duration_raw_pct;
    j["duration_merged_pct"] = r.duration_merged_pct;
    j["state_index"] = state_index;
    j["threshold"] = r.threshold;
    j["delay_ns"] = r.delay_ns;
    j["span_ns"] = r.span_ns;
    j["observations"] = r.observations;
    return j.dump(2);
}

std::string format_event(std::int64_t ts_ns, const Verdict& v) {
    std::string out = std::to_string(ts_ns);
    out += ',';
    out += text::format_shortest(v.prob);
    out += v.fired ? ",1," : ",0,";
    out += v.decision == Decision::Delay ? 'D' : 'P';
    out += ',';
    out += std::to_string(v.window_end_ns);
    return out;
}

}  // namespace liqregime::signal
