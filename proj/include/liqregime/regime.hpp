#pragma once

// K-state Markov-switching Gaussian regression
//
//   y_t = alpha_j + beta_lag_j * y_{t-1} + beta_dbam_j * dbam_t + sigma_j * e_t,
//   s_t = j,  P(s_t = j | s_{t-1} = i) = trans(i, j),  e_t ~ N(0, 1).
//
// State indices are 0-based throughout the C++ API.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "liqregime/errors.hpp"

namespace liqregime::regime {

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    const std::vector<double>& data() const noexcept { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

struct SwitchingParams {
    std::vector<double> alpha;
    std::vector<double> beta_lag;
    std::vector<double> beta_dbam;
    std::vector<double> sigma;
    Matrix trans;  // trans(i, j) = P(s_t = j | s_{t-1} = i)
    std::vector<double> init_dist;

    std::size_t num_states() const noexcept { return alpha.size(); }

    bool operator==(const SwitchingParams&) const = default;
};

class InvalidParams : public Error {
public:
    using Error::Error;
};

/// Shapes, stochastic rows/simplex (1e-12), and sigma_j >= sigma_floor > 0.
void validate(const SwitchingParams& p, double sigma_floor = 0.0);

/// Diagonal `stay` with the remainder spread uniformly; init is its
/// stationary distribution.
SwitchingParams make_params(std::vector<double> alpha, std::vector<double> beta_lag,
                            std::vector<double> beta_dbam, std::vector<double> sigma,
                            double stay = 0.95);

inline double state_mean(const SwitchingParams& p, std::size_t j, double y_lag, double dbam) {
    return p.alpha[j] + p.beta_lag[j] * y_lag + p.beta_dbam[j] * dbam;
}

/// Solves trans^T pi = pi, sum(pi) = 1.
std::vector<double> stationary_distribution(const Matrix& trans);

struct Observation {
    double y = 0.0;
    double y_lag = 0.0;
    double dbam = 0.0;
};

struct RegressionData {
    std::vector<double> y;
    std::vector<double> y_lag;
    std::vector<double> dbam;

    std::size_t size() const noexcept { return y.size(); }
    Observation at(std::size_t t) const { return {y[t], y_lag[t], dbam[t]}; }
    void push_back(const Observation& o) {
        y.push_back(o.y);
        y_lag.push_back(o.y_lag);
        dbam.push_back(o.dbam);
    }
};

class InvalidData : public Error {
public:
    using Error::Error;
};

/// T >= 2, equal column lengths, all values finite.
void validate(const RegressionData& d);

/// A step's total likelihood was zero or non-finite even in the log domain.
class NumericalDegeneracy : public Error {
public:
    NumericalDegeneracy(std::size_t t, const std::string& detail)
        : Error("numerical degeneracy at t=" + std::to_string(t) + ": " + detail), t_(t) {}
    std::size_t t() const noexcept { return t_; }

private:
    std::size_t t_;
};

/// A state carries too little posterior weight to identify its regression.
class StateStarvation : public Error {
public:
    StateStarvation(std::size_t state, double weight, double required)
        : Error("state " + std::to_string(state + 1) + " starved: weight " + std::to_string(weight) +
                " < " + std::to_string(required)),
          state_(state) {}
    std::size_t state() const noexcept { return state_; }

private:
    std::size_t state_;
};

// ---------------------------------------------------------------------------
// Hamilton filter
// ---------------------------------------------------------------------------

struct FilterResult {
    Matrix predicted;  // P(s_t | y_1..y_{t-1}); row 0 is init_dist
    Matrix filtered;   // P(s_t | y_1..y_t)
    double loglik = 0.0;
};

FilterResult hamilton_filter(const SwitchingParams& p, const RegressionData& d);

/// Log-likelihood only; no T x K storage.
double filter_loglik(const SwitchingParams& p, const RegressionData& d);

struct FilterStep {
    std::vector<double> prob;
    double loglik_increment = 0.0;
};

/// One predict + update: prob' proportional to (trans^T prob) * density(obs).
FilterStep filter_step(const SwitchingParams& p, std::span<const double> prob, const Observation& obs);

/// Update only, from an already-predicted distribution.
FilterStep filter_update(const SwitchingParams& p, std::span<const double> predicted,
                         const Observation& obs);

/// Per-state Gaussian constants, -log(sigma sqrt(2 pi)) and 1/sigma.
struct EmissionTerms {
    std::vector<double> log_norm;
    std::vector<double> inv_sigma;

    explicit EmissionTerms(const SwitchingParams& p);
};

/// Sequential form of hamilton_filter. The first observation is weighted by
/// init_dist, every later one by the one-step prediction, so the filtered
/// rows and total log-likelihood agree bit-for-bit with the batch pass.
class OnlineFilter {
public:
    explicit OnlineFilter(SwitchingParams params);

    std::span<const double> update(const Observation& obs);

    std::span<const double> prob() const noexcept { return prob_; }
    double loglik() const noexcept { return loglik_; }
    std::size_t steps() const noexcept { return steps_; }
    const SwitchingParams& params() const noexcept { return params_; }

private:
    SwitchingParams params_;
    EmissionTerms emission_;
    std::vector<double> prob_;
    std::vector<double> predicted_;
    std::vector<double> next_;
    double loglik_ = 0.0;
    std::size_t steps_ = 0;
};

// ---------------------------------------------------------------------------
// Kim smoother
// ---------------------------------------------------------------------------

struct SmoothResult {
    Matrix smoothed;              // P(s_t | all data)
    std::vector<double> pairwise; // (T-1) x K x K, P(s_t = i, s_{t+1} = j | all data)
    std::size_t num_states = 0;

    double pair(std::size_t t, std::size_t i, std::size_t j) const {
        return pairwise[(t * num_states + i) * num_states + j];
    }
};

SmoothResult kim_smoother(const SwitchingParams& p, const FilterResult& f);

// ---------------------------------------------------------------------------
// Estimation
// ---------------------------------------------------------------------------

struct OlsFit {
    double alpha = 0.0;
    double beta_lag = 0.0;
    double beta_dbam = 0.0;
    double sigma = 0.0;  // maximum-likelihood scale (divides by T)
};

/// Least squares of y on [1, y_lag, dbam]; minimum-norm if rank deficient.
OlsFit ols(const RegressionData& d);

struct EmStepResult {
    SwitchingParams params;
    double loglik = 0.0;  // of the input parameters
};

EmStepResult em_step(const SwitchingParams& p, const RegressionData& d, double sigma_floor = 1e-6);

enum class LabelRule { SigmaAscending };

struct FitConfig {
    int max_iter = 500;
    double tol = 1e-8;  // relative log-likelihood change
    int restarts = 8;
    std::uint64_t seed = 0;
    double sigma_floor = 1e-6;
    LabelRule label_rule = LabelRule::SigmaAscending;
    unsigned threads = 0;  // 0 = hardware concurrency
};

void validate(const FitConfig& cfg);

struct RestartDiagnostics {
    double loglik = 0.0;
    int iterations = 0;
    bool converged = false;
    bool failed = false;
    std::string error;
};

struct FitDiagnostics {
    std::vector<RestartDiagnostics> restarts;
    std::size_t best_restart = 0;
    bool converged = false;  // best restart met tol within max_iter
};

struct FitResult {
    SwitchingParams params;  // canonical labels
    double loglik = 0.0;
    FitDiagnostics diagnostics;
};

/// Multi-start EM. Restart r starts from a quantile slicing of the pooled
/// OLS residual magnitudes (restart 0 unjittered, later ones with seeded
/// jitter on scores and slice sizes) and a 0.95-diagonal transition matrix.
/// The best final log-likelihood wins; ties go to the lower restart index.
/// Throws StateStarvation only if every restart starved.
FitResult fit(const RegressionData& d, std::size_t num_states, const FitConfig& cfg = {});

/// Runs EM from the given starting point until tol or max_iter.
RestartDiagnostics run_em(SwitchingParams& p, const RegressionData& d, const FitConfig& cfg);

struct Canonical {
    SwitchingParams params;
    std::vector<std::size_t> order;  // new state n was old state order[n]
    std::vector<Matrix> probs;       // columns permuted the same way
};

/// Relabels states by ascending sigma, ties by ascending alpha.
Canonical canonicalize(const SwitchingParams& p, std::vector<Matrix> probs = {});

}  // namespace liqregime::regime
