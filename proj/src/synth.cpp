#include "liqregime/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "liqregime/rng.hpp"

namespace liqregime::synth {

namespace {

enum Stream : std::uint64_t { kStates = 0, kShocks = 1, kTicks = 2 };

std::size_t draw(std::span<const double> dist, double u) {
    double cum = 0.0;
    for (std::size_t j = 0; j < dist.size(); ++j) {
        cum += dist[j];
        if (u < cum) return j;
    }
    // Rounding left u above the total; take the last state with mass.
    for (std::size_t j = dist.size(); j-- > 0;) {
        if (dist[j] > 0.0) return j;
    }
    return dist.size() - 1;
}

double log_gauss(double y, double mean, double sigma) {
    const double r = y - mean;
    return -0.5 * std::log(2.0 * std::numbers::pi * sigma * sigma) - r * r / (2.0 * sigma * sigma);
}

// Calls visit(path, log_weight) for every state path with nonzero prior.
template <class Visit>
void enumerate_paths(const regime::SwitchingParams& p, const regime::RegressionData& d, Visit&& visit) {
    regime::validate(p);
    regime::validate(d);
    const std::size_t k = p.num_states();
    const std::size_t n = d.size();
    double paths = 1.0;
    for (std::size_t t = 0; t < n; ++t) {
        paths *= static_cast<double>(k);
        if (paths > kMaxPaths) {
            throw InstanceTooLarge("K^T = " + std::to_string(k) + "^" + std::to_string(n) + " exceeds 1e6 paths");
        }
    }

    std::vector<double> log_density(n * k);
    for (std::size_t t = 0; t < n; ++t)
        for (std::size_t j = 0; j < k; ++j)
            log_density[t * k + j] = log_gauss(d.y[t], regime::state_mean(p, j, d.y_lag[t], d.dbam[t]), p.sigma[j]);

    std::vector<std::size_t> path(n, 0);
    while (true) {
        double lw = std::log(p.init_dist[path[0]]) + log_density[path[0]];
        for (std::size_t t = 1; t < n && lw > -std::numeric_limits<double>::infinity(); ++t) {
            lw += std::log(p.trans(path[t - 1], path[t])) + log_density[t * k + path[t]];
        }
        if (lw > -std::numeric_limits<double>::infinity()) visit(std::span<const std::size_t>(path), lw);

        std::size_t pos = n;
        while (pos > 0) {
            --pos;
            if (++path[pos] < k) break;
            path[pos] = 0;
            if (pos == 0) return;
        }
    }
}

std::vector<double> parse_reals(const std::string& s, std::string_view key) {
    std::vector<double> out;
    for (auto tok : text::tokens(s)) out.push_back(text::parse_double(tok, key));
    return out;
}

}  // namespace

void validate(const SimSpec& spec) {
    regime::SwitchingParams shape = spec.params;
    for (double s : shape.sigma) {
        if (!(s >= 0.0) || !std::isfinite(s)) throw regime::InvalidParams("simulation sigma must be >= 0");
    }
    std::fill(shape.sigma.begin(), shape.sigma.end(), 1.0);
    regime::validate(shape);
    if (spec.length < 2) throw regime::InvalidParams("simulation length must be >= 2");
    if (!(spec.p_move >= 0.0 && spec.p_move <= 1.0)) throw regime::InvalidParams("p_move must be in [0, 1]");
    if (!std::isfinite(spec.y0)) throw regime::InvalidParams("y0 must be finite");
}

Simulation simulate(const SimSpec& spec) {
    validate(spec);
    const regime::SwitchingParams& p = spec.params;
    const rng::CounterRng states(spec.seed, kStates);
    const rng::CounterRng shocks(spec.seed, kShocks);
    const rng::CounterRng ticks(spec.seed, kTicks);

    Simulation sim;
    sim.states.reserve(spec.length);
    sim.data.y.reserve(spec.length);
    sim.data.y_lag.reserve(spec.length);
    sim.data.dbam.reserve(spec.length);

    double y_prev = spec.y0;
    std::size_t s = 0;
    for (std::size_t t = 0; t < spec.length; ++t) {
        const double u = states.uniform(t);
        s = t == 0 ? draw(p.init_dist, u) : draw(p.trans.row(s), u);

        double dbam = 0.0;
        if (spec.dbam_model == DbamModel::IidTicks) {
            const double v = ticks.uniform(t);
            if (v < spec.p_move / 2) dbam = -0.125;
            else if (v < spec.p_move) dbam = 0.125;
        }
        const double y = regime::state_mean(p, s, y_prev, dbam) + p.sigma[s] * shocks.normal(t);
        sim.states.push_back(static_cast<int>(s));
        sim.data.push_back({y, y_prev, dbam});
        y_prev = y;
    }
    return sim;
}

double brute_force_loglik(const regime::SwitchingParams& p, const regime::RegressionData& d) {
    std::vector<double> weights;
    enumerate_paths(p, d, [&](std::span<const std::size_t>, double lw) { weights.push_back(lw); });
    if (weights.empty()) return -std::numeric_limits<double>::infinity();
    const double m = *std::max_element(weights.begin(), weights.end());
    double s = 0.0;
    for (double w : weights) s += std::exp(w - m);
    return m + std::log(s);
}

regime::Matrix brute_force_smoothed(const regime::SwitchingParams& p, const regime::RegressionData& d) {
    const std::size_t k = p.num_states();
    const std::size_t n = d.size();
    std::vector<std::vector<std::size_t>> paths;
    std::vector<double> weights;
    enumerate_paths(p, d, [&](std::span<const std::size_t> path, double lw) {
        paths.emplace_back(path.begin(), path.end());
        weights.push_back(lw);
    });

    regime::Matrix out(n, k);
    if (weights.empty()) return out;
    const double m = *std::max_element(weights.begin(), weights.end());
    double total = 0.0;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        const double w = std::exp(weights[i] - m);
        total += w;
        for (std::size_t t = 0; t < n; ++t) out(t, paths[i][t]) += w;
    }
    for (std::size_t t = 0; t < n; ++t)
        for (std::size_t j = 0; j < k; ++j) out(t, j) /= total;
    return out;
}

SimSpec parse_sim_spec(const text::Metadata& kv) {
    SimSpec spec;
    std::vector<double> alpha, beta_lag, beta_dbam, sigma, trans, init;
    double stay = 0.95;
    bool have_stay = false;
    std::size_t declared_states = 0;
    for (const auto& [key, value] : kv) {
        if (key == "states") declared_states = static_cast<std::size_t>(text::parse_int(value, key));
        else if (key == "alpha") alpha = parse_reals(value, key);
        else if (key == "beta_lag") beta_lag = parse_reals(value, key);
        else if (key == "beta_dbam") beta_dbam = parse_reals(value, key);
        else if (key == "sigma") sigma = parse_reals(value, key);
        else if (key == "trans") trans = parse_reals(value, key);
        else if (key == "stay") { stay = text::parse_double(value, key); have_stay = true; }
        else if (key == "init_dist") init = parse_reals(value, key);
        else if (key == "T" || key == "length") spec.length = static_cast<std::size_t>(text::parse_int(value, key));
        else if (key == "dbam_model") {
            if (value == "zeros") spec.dbam_model = DbamModel::Zeros;
            else if (value == "iid_ticks") spec.dbam_model = DbamModel::IidTicks;
            else throw text::ParseError("dbam_model must be zeros or iid_ticks");
        }
        else if (key == "p_move") spec.p_move = text::parse_double(value, key);
        else if (key == "y0") spec.y0 = text::parse_double(value, key);
        else if (key == "seed") spec.seed = static_cast<std::uint64_t>(text::parse_int(value, key));
        else if (key == "ts_step_ns") spec.ts_step_ns = text::parse_int(value, key);
        else throw text::ParseError("simulation spec: unknown key '" + key + "'");
    }

    const std::size_t k = alpha.size();
    if (k == 0) throw text::ParseError("simulation spec: alpha is required");
    if (declared_states && declared_states != k) throw text::ParseError("simulation spec: states disagrees with alpha");
    if (beta_lag.size() != k || beta_dbam.size() != k || sigma.size() != k) {
        throw text::ParseError("simulation spec: alpha, beta_lag, beta_dbam and sigma need equal lengths");
    }
    if (!trans.empty() && have_stay) throw text::ParseError("simulation spec: give trans or stay, not both");

    // make_params validates sigma > 0; build with unit scales, then restore.
    spec.params = regime::make_params(alpha, beta_lag, beta_dbam, std::vector<double>(k, 1.0), stay);
    spec.params.sigma = sigma;
    if (!trans.empty()) {
        if (trans.size() != k * k) throw text::ParseError("simulation spec: trans needs K*K values");
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) spec.params.trans(i, j) = trans[i * k + j];
        spec.params.init_dist = regime::stationary_distribution(spec.params.trans);
    }
    if (!init.empty()) spec.params.init_dist = init;
    if (spec.ts_step_ns <= 0) throw text::ParseError("simulation spec: ts_step_ns must be positive");
    validate(spec);
    return spec;
}

}  // namespace liqregime::synth
