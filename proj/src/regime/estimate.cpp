#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

#include "kernel.hpp"
#include "liqregime/regime.hpp"
#include "liqregime/rng.hpp"
#include "smoother.hpp"

namespace liqregime::regime {

namespace {

struct WeightedFit {
    double alpha = 0.0;
    double beta_lag = 0.0;
    double beta_dbam = 0.0;
    double sigma = 0.0;
    double weight = 0.0;
};

// Weighted least squares of y on [1, y_lag, dbam] with the ML residual scale.
template <class WeightFn>
WeightedFit weighted_fit(const RegressionData& d, WeightFn&& weight, double sigma_floor) {
    Eigen::Matrix3d xtx = Eigen::Matrix3d::Zero();
    Eigen::Vector3d xty = Eigen::Vector3d::Zero();
    double total = 0.0;
    for (std::size_t t = 0; t < d.size(); ++t) {
        const double w = weight(t);
        if (w == 0.0) continue;
        const double x1 = d.y_lag[t];
        const double x2 = d.dbam[t];
        const double y = d.y[t];
        total += w;
        xtx(0, 1) += w * x1;
        xtx(0, 2) += w * x2;
        xtx(1, 1) += w * x1 * x1;
        xtx(1, 2) += w * x1 * x2;
        xtx(2, 2) += w * x2 * x2;
        xty(0) += w * y;
        xty(1) += w * x1 * y;
        xty(2) += w * x2 * y;
    }
    xtx(0, 0) = total;
    xtx(1, 0) = xtx(0, 1);
    xtx(2, 0) = xtx(0, 2);
    xtx(2, 1) = xtx(1, 2);

    WeightedFit out;
    out.weight = total;
    if (total > 0.0) {
        const Eigen::Vector3d beta = xtx.completeOrthogonalDecomposition().solve(xty);
        out.alpha = beta(0);
        out.beta_lag = beta(1);
        out.beta_dbam = beta(2);
        double ss = 0.0;
        for (std::size_t t = 0; t < d.size(); ++t) {
            const double w = weight(t);
            if (w == 0.0) continue;
            const double r = d.y[t] - out.alpha - out.beta_lag * d.y_lag[t] - out.beta_dbam * d.dbam[t];
            ss += w * r * r;
        }
        out.sigma = std::sqrt(ss / total);
    }
    out.sigma = std::max(out.sigma, sigma_floor);
    return out;
}

struct EmWorkspace {
    FilterResult filter;
    Matrix smoothed;
    Matrix pair_sum;
};

EmStepResult em_step_into(const SwitchingParams& p, const RegressionData& d, double sigma_floor,
                          EmWorkspace& ws) {
    const std::size_t k = p.num_states();
    const std::size_t n = d.size();
    detail::filter_into(p, d, ws.filter);
    if (ws.smoothed.rows() != n || ws.smoothed.cols() != k) ws.smoothed = Matrix(n, k);
    detail::smooth_into(p, ws.filter, ws.smoothed, nullptr, &ws.pair_sum);

    EmStepResult out;
    out.loglik = ws.filter.loglik;
    SwitchingParams& q = out.params;
    q.alpha.resize(k);
    q.beta_lag.resize(k);
    q.beta_dbam.resize(k);
    q.sigma.resize(k);
    q.trans = Matrix(k, k);
    q.init_dist.assign(ws.smoothed.row(0).begin(), ws.smoothed.row(0).end());
    double init_total = 0.0;
    for (double& x : q.init_dist) init_total += (x = std::clamp(x, 0.0, 1.0));
    for (double& x : q.init_dist) x /= init_total;

    const double required = 3.0 * static_cast<double>(k);
    const Matrix& sm = ws.smoothed;
    for (std::size_t j = 0; j < k; ++j) {
        const WeightedFit f = weighted_fit(d, [&](std::size_t t) { return sm(t, j); }, sigma_floor);
        if (f.weight < required) throw StateStarvation(j, f.weight, required);
        q.alpha[j] = f.alpha;
        q.beta_lag[j] = f.beta_lag;
        q.beta_dbam[j] = f.beta_dbam;
        q.sigma[j] = f.sigma;
    }

    for (std::size_t i = 0; i < k; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < k; ++j) row += ws.pair_sum(i, j);
        for (std::size_t j = 0; j < k; ++j) q.trans(i, j) = row > 0.0 ? ws.pair_sum(i, j) / row : p.trans(i, j);
    }
    return out;
}

SwitchingParams initial_params(const RegressionData& d, std::size_t k, const FitConfig& cfg,
                               std::size_t restart, std::span<const double> abs_resid) {
    const std::size_t n = d.size();
    const rng::CounterRng jitter(cfg.seed, 2 * restart);
    const rng::CounterRng sizes(cfg.seed, 2 * restart + 1);

    std::vector<double> score(abs_resid.begin(), abs_resid.end());
    if (restart > 0) {
        for (std::size_t t = 0; t < n; ++t) score[t] *= std::exp(0.5 * jitter.normal(t));
    }
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return score[a] < score[b]; });

    std::vector<double> share(k, 1.0);
    if (restart > 0) {
        for (std::size_t j = 0; j < k; ++j) share[j] = 0.5 + sizes.uniform(j);
    }
    const double share_total = std::accumulate(share.begin(), share.end(), 0.0);

    std::vector<std::uint32_t> label(n);
    double cum = 0.0;
    std::size_t begin = 0;
    for (std::size_t j = 0; j < k; ++j) {
        cum += share[j];
        const std::size_t end = j + 1 == k ? n : static_cast<std::size_t>(std::llround(cum / share_total * n));
        for (std::size_t i = begin; i < end; ++i) label[idx[i]] = static_cast<std::uint32_t>(j);
        begin = end;
    }

    std::vector<double> alpha(k), beta_lag(k), beta_dbam(k), sigma(k);
    for (std::size_t j = 0; j < k; ++j) {
        const WeightedFit f =
            weighted_fit(d, [&](std::size_t t) { return label[t] == j ? 1.0 : 0.0; }, cfg.sigma_floor);
        alpha[j] = f.alpha;
        beta_lag[j] = f.beta_lag;
        beta_dbam[j] = f.beta_dbam;
        sigma[j] = f.sigma;
    }
    return make_params(std::move(alpha), std::move(beta_lag), std::move(beta_dbam), std::move(sigma), 0.95);
}

}  // namespace

OlsFit ols(const RegressionData& d) {
    validate(d);
    const WeightedFit f = weighted_fit(d, [](std::size_t) { return 1.0; }, 0.0);
    return {f.alpha, f.beta_lag, f.beta_dbam, f.sigma};
}

EmStepResult em_step(const SwitchingParams& p, const RegressionData& d, double sigma_floor) {
    EmWorkspace ws;
    return em_step_into(p, d, sigma_floor, ws);
}

void validate(const FitConfig& cfg) {
    if (cfg.max_iter < 1) throw InvalidParams("max_iter must be >= 1");
    if (!(cfg.tol > 0.0)) throw InvalidParams("tol must be > 0");
    if (cfg.restarts < 1) throw InvalidParams("restarts must be >= 1");
    if (!(cfg.sigma_floor > 0.0)) throw InvalidParams("sigma_floor must be > 0");
}

RestartDiagnostics run_em(SwitchingParams& p, const RegressionData& d, const FitConfig& cfg) {
    validate(cfg);
    EmWorkspace ws;
    RestartDiagnostics diag;
    double prev = 0.0;
    for (int it = 1; it <= cfg.max_iter; ++it) {
        EmStepResult step = em_step_into(p, d, cfg.sigma_floor, ws);
        diag.iterations = it;
        p = std::move(step.params);
        if (it > 1 && std::abs(step.loglik - prev) <= cfg.tol * std::abs(prev)) {
            diag.converged = true;
            break;
        }
        prev = step.loglik;
    }
    diag.loglik = filter_loglik(p, d);
    return diag;
}

FitResult fit(const RegressionData& d, std::size_t num_states, const FitConfig& cfg) {
    validate(d);
    validate(cfg);
    if (num_states == 0) throw InvalidParams("at least one state required");

    const OlsFit base = ols(d);
    std::vector<double> abs_resid(d.size());
    for (std::size_t t = 0; t < d.size(); ++t) {
        abs_resid[t] = std::abs(d.y[t] - base.alpha - base.beta_lag * d.y_lag[t] - base.beta_dbam * d.dbam[t]);
    }

    const std::size_t restarts = static_cast<std::size_t>(cfg.restarts);
    std::vector<SwitchingParams> params(restarts);
    std::vector<RestartDiagnostics> diags(restarts);
    std::vector<std::exception_ptr> errors(restarts);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t r = next++; r < restarts; r = next++) {
            try {
                params[r] = initial_params(d, num_states, cfg, r, abs_resid);
                diags[r] = run_em(params[r], d, cfg);
            } catch (const Error& e) {
                diags[r].failed = true;
                diags[r].error = e.what();
                errors[r] = std::current_exception();
            }
        }
    };
    unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, restarts));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    }

    std::optional<std::size_t> best;
    for (std::size_t r = 0; r < restarts; ++r) {
        if (diags[r].failed) continue;
        if (!best || diags[r].loglik > diags[*best].loglik) best = r;
    }
    if (!best) std::rethrow_exception(errors.front());

    FitResult result;
    result.params = canonicalize(params[*best]).params;
    result.loglik = diags[*best].loglik;
    result.diagnostics.restarts = std::move(diags);
    result.diagnostics.best_restart = *best;
    result.diagnostics.converged = result.diagnostics.restarts[*best].converged;
    return result;
}

}  // namespace liqregime::regime
