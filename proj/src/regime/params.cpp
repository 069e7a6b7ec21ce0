#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "liqregime/regime.hpp"

namespace liqregime::regime {

namespace {
constexpr double kSimplexTol = 1e-12;

void check_simplex(std::span<const double> v, const std::string& what) {
    double sum = 0.0;
    for (double x : v) {
        if (!(x >= 0.0 && x <= 1.0)) throw InvalidParams(what + " has an entry outside [0, 1]");
        sum += x;
    }
    if (std::abs(sum - 1.0) > kSimplexTol) throw InvalidParams(what + " does not sum to 1");
}
}  // namespace

void validate(const SwitchingParams& p, double sigma_floor) {
    const std::size_t k = p.num_states();
    if (k == 0) throw InvalidParams("at least one state required");
    if (p.beta_lag.size() != k || p.beta_dbam.size() != k || p.sigma.size() != k ||
        p.init_dist.size() != k || p.trans.rows() != k || p.trans.cols() != k) {
        throw InvalidParams("parameter vectors disagree on the number of states");
    }
    for (std::size_t j = 0; j < k; ++j) {
        if (!std::isfinite(p.alpha[j]) || !std::isfinite(p.beta_lag[j]) || !std::isfinite(p.beta_dbam[j])) {
            throw InvalidParams("non-finite coefficient in state " + std::to_string(j + 1));
        }
        if (!(p.sigma[j] > 0.0) || !std::isfinite(p.sigma[j]) || p.sigma[j] < sigma_floor) {
            throw InvalidParams("sigma of state " + std::to_string(j + 1) + " below floor");
        }
        check_simplex(p.trans.row(j), "transition row " + std::to_string(j + 1));
    }
    check_simplex(p.init_dist, "initial distribution");
}

void validate(const RegressionData& d) {
    if (d.y_lag.size() != d.y.size() || d.dbam.size() != d.y.size()) {
        throw InvalidData("regression columns differ in length");
    }
    if (d.size() < 2) throw InvalidData("at least two observations required");
    for (std::size_t t = 0; t < d.size(); ++t) {
        if (!std::isfinite(d.y[t]) || !std::isfinite(d.y_lag[t]) || !std::isfinite(d.dbam[t])) {
            throw InvalidData("non-finite value at t=" + std::to_string(t));
        }
    }
}

std::vector<double> stationary_distribution(const Matrix& trans) {
    const std::size_t k = trans.rows();
    Eigen::MatrixXd a(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) a(i, j) = trans(j, i) - (i == j ? 1.0 : 0.0);
    a.row(static_cast<Eigen::Index>(k - 1)).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
    b(static_cast<Eigen::Index>(k - 1)) = 1.0;
    const Eigen::VectorXd pi = a.colPivHouseholderQr().solve(b);

    std::vector<double> out(k);
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        out[i] = std::max(0.0, pi(static_cast<Eigen::Index>(i)));
        sum += out[i];
    }
    for (double& x : out) x /= sum;
    return out;
}

SwitchingParams make_params(std::vector<double> alpha, std::vector<double> beta_lag,
                            std::vector<double> beta_dbam, std::vector<double> sigma, double stay) {
    const std::size_t k = alpha.size();
    SwitchingParams p;
    p.alpha = std::move(alpha);
    p.beta_lag = std::move(beta_lag);
    p.beta_dbam = std::move(beta_dbam);
    p.sigma = std::move(sigma);
    p.trans = Matrix(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            p.trans(i, j) = k == 1 ? 1.0 : (i == j ? stay : (1.0 - stay) / static_cast<double>(k - 1));
    p.init_dist = stationary_distribution(p.trans);
    validate(p);
    return p;
}

Canonical canonicalize(const SwitchingParams& p, std::vector<Matrix> probs) {
    const std::size_t k = p.num_states();
    Canonical c;
    c.order.resize(k);
    std::iota(c.order.begin(), c.order.end(), std::size_t{0});
    std::stable_sort(c.order.begin(), c.order.end(), [&](std::size_t a, std::size_t b) {
        if (p.sigma[a] != p.sigma[b]) return p.sigma[a] < p.sigma[b];
        return p.alpha[a] < p.alpha[b];
    });

    SwitchingParams& q = c.params;
    q.alpha.resize(k);
    q.beta_lag.resize(k);
    q.beta_dbam.resize(k);
    q.sigma.resize(k);
    q.init_dist.resize(k);
    q.trans = Matrix(k, k);
    for (std::size_t n = 0; n < k; ++n) {
        const std::size_t o = c.order[n];
        q.alpha[n] = p.alpha[o];
        q.beta_lag[n] = p.beta_lag[o];
        q.beta_dbam[n] = p.beta_dbam[o];
        q.sigma[n] = p.sigma[o];
        q.init_dist[n] = p.init_dist[o];
        for (std::size_t m = 0; m < k; ++m) q.trans(n, m) = p.trans(o, c.order[m]);
    }

    c.probs.reserve(probs.size());
    for (const Matrix& m : probs) {
        if (m.cols() != k) throw InvalidParams("probability matrix has wrong number of columns");
        Matrix out(m.rows(), k);
        for (std::size_t t = 0; t < m.rows(); ++t)
            for (std::size_t n = 0; n < k; ++n) out(t, n) = m(t, c.order[n]);
        c.probs.push_back(std::move(out));
    }
    return c;
}

}  // namespace liqregime::regime
