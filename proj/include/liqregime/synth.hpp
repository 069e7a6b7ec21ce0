#pragma once

// Ground-truth simulation of the switching regression and brute-force
// path-enumeration oracles for the filter and smoother.

#include <cstdint>
#include <istream>
#include <vector>

#include "liqregime/errors.hpp"
#include "liqregime/regime.hpp"
#include "liqregime/text.hpp"

namespace liqregime::synth {

enum class DbamModel { Zeros, IidTicks };

struct SimSpec {
    regime::SwitchingParams params;
    std::size_t length = 0;  // T
    DbamModel dbam_model = DbamModel::IidTicks;
    double p_move = 0.1;     // IidTicks: +-0.125 each with probability p_move / 2
    double y0 = 0.0;
    std::uint64_t seed = 0;
    std::int64_t ts_step_ns = 1'000'000;  // synthetic clock spacing for written series
};

void validate(const SimSpec& spec);

struct Simulation {
    std::vector<int> states;  // 0-based
    regime::RegressionData data;
};

/// s_1 ~ init_dist, s_t ~ trans(s_{t-1}, .), y_t = mean(s_t, y_{t-1}, dbam_t) + sigma z_t.
/// Draws come from counter-based streams, so the output is a pure function of the spec.
Simulation simulate(const SimSpec& spec);

class InstanceTooLarge : public Error {
public:
    using Error::Error;
};

inline constexpr double kMaxPaths = 1e6;

/// log sum over all K^T state paths of prior(path) * prod_t N(y_t; mean, sigma).
double brute_force_loglik(const regime::SwitchingParams& p, const regime::RegressionData& d);

/// P(s_t = j | all data) by path enumeration.
regime::Matrix brute_force_smoothed(const regime::SwitchingParams& p, const regime::RegressionData& d);

/// Parses a flat key=value simulation spec (see README for the keys).
SimSpec parse_sim_spec(const text::Metadata& kv);

}  // namespace liqregime::synth
