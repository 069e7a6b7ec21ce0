#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "kernel.hpp"
#include "liqregime/regime.hpp"
#include "smoother.hpp"

namespace liqregime::regime {

void detail::filter_into(const SwitchingParams& p, const RegressionData& d, FilterResult& r) {
    validate(p);
    validate(d);
    const std::size_t k = p.num_states();
    const std::size_t n = d.size();
    const EmissionTerms emission(p);

    if (r.filtered.rows() != n || r.filtered.cols() != k) {
        r.predicted = Matrix(n, k);
        r.filtered = Matrix(n, k);
    }
    r.loglik = 0.0;
    std::copy(p.init_dist.begin(), p.init_dist.end(), r.predicted.row(0).begin());
    for (std::size_t t = 0; t < n; ++t) {
        if (t > 0) detail::predict(p.trans, r.filtered.row(t - 1).data(), r.predicted.row(t).data());
        r.loglik += detail::update(p, emission, r.predicted.row(t).data(), d.at(t),
                                   r.filtered.row(t).data(), t);
    }
}

FilterResult hamilton_filter(const SwitchingParams& p, const RegressionData& d) {
    FilterResult r;
    detail::filter_into(p, d, r);
    return r;
}

double filter_loglik(const SwitchingParams& p, const RegressionData& d) {
    validate(p);
    validate(d);
    OnlineFilter online(p);
    for (std::size_t t = 0; t < d.size(); ++t) online.update(d.at(t));
    return online.loglik();
}

FilterStep filter_update(const SwitchingParams& p, std::span<const double> predicted,
                         const Observation& obs) {
    if (predicted.size() != p.num_states()) throw InvalidParams("probability vector has wrong size");
    const EmissionTerms emission(p);
    FilterStep step;
    step.prob.resize(p.num_states());
    step.loglik_increment = detail::update(p, emission, predicted.data(), obs, step.prob.data(), 0);
    return step;
}

FilterStep filter_step(const SwitchingParams& p, std::span<const double> prob, const Observation& obs) {
    if (prob.size() != p.num_states()) throw InvalidParams("probability vector has wrong size");
    std::vector<double> predicted(p.num_states());
    detail::predict(p.trans, prob.data(), predicted.data());
    return filter_update(p, predicted, obs);
}

EmissionTerms::EmissionTerms(const SwitchingParams& p)
    : log_norm(p.num_states()), inv_sigma(p.num_states()) {
    const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
    for (std::size_t j = 0; j < p.num_states(); ++j) {
        log_norm[j] = -half_log_2pi - std::log(p.sigma[j]);
        inv_sigma[j] = 1.0 / p.sigma[j];
    }
}

OnlineFilter::OnlineFilter(SwitchingParams params)
    : params_((validate(params), std::move(params))),
      emission_(params_),
      prob_(params_.num_states()),
      predicted_(params_.num_states()),
      next_(params_.num_states()) {}

std::span<const double> OnlineFilter::update(const Observation& obs) {
    const double* prior = params_.init_dist.data();
    if (steps_ > 0) {
        detail::predict(params_.trans, prob_.data(), predicted_.data());
        prior = predicted_.data();
    }
    loglik_ += detail::update(params_, emission_, prior, obs, next_.data(), steps_);
    prob_.swap(next_);
    ++steps_;
    return prob_;
}

SmoothResult kim_smoother(const SwitchingParams& p, const FilterResult& f) {
    validate(p);
    const std::size_t k = p.num_states();
    const std::size_t n = f.filtered.rows();
    if (n == 0 || f.filtered.cols() != k || f.predicted.rows() != n || f.predicted.cols() != k) {
        throw InvalidData("filter result does not match the parameters");
    }
    SmoothResult r;
    r.num_states = k;
    r.smoothed = Matrix(n, k);
    r.pairwise.assign((n - 1) * k * k, 0.0);
    detail::smooth_into(p, f, r.smoothed, r.pairwise.data(), nullptr);
    return r;
}

}  // namespace liqregime::regime
