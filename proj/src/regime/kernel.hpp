#pragma once

// Shared inner loops of the batch and online filters. Both paths call the
// same functions in the same order so their results agree bit-for-bit.

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "liqregime/regime.hpp"

namespace liqregime::regime::detail {


/// out_j = sum_i prob_i * trans(i, j)
inline void predict(const Matrix& trans, const double* prob, double* out) {
    const std::size_t k = trans.rows();
    for (std::size_t j = 0; j < k; ++j) out[j] = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double pi = prob[i];
        const double* row = trans.row(i).data();
        for (std::size_t j = 0; j < k; ++j) out[j] += pi * row[j];
    }
}

/// Bayes update of `pred` by the Gaussian emission densities, computed
/// relative to the largest log-density so nothing underflows. Returns the
/// log-likelihood increment log sum_j pred_j f_j(y).
inline double update(const SwitchingParams& p, const EmissionTerms& e, const double* pred,
                     const Observation& o, double* out, std::size_t t) {
    const std::size_t k = p.num_states();
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k; ++j) {
        const double z = (o.y - state_mean(p, j, o.y_lag, o.dbam)) * e.inv_sigma[j];
        out[j] = e.log_norm[j] - 0.5 * z * z;
        if (pred[j] > 0.0 && out[j] > m) m = out[j];
    }
    if (!std::isfinite(m)) {
        throw NumericalDegeneracy(t, "no state with positive prior and finite density");
    }
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        out[j] = pred[j] > 0.0 ? pred[j] * std::exp(out[j] - m) : 0.0;
        s += out[j];
    }
    if (!(s > 0.0) || !std::isfinite(s)) throw NumericalDegeneracy(t, "total likelihood vanished");
    const double inv = 1.0 / s;
    for (std::size_t j = 0; j < k; ++j) out[j] *= inv;
    return m + std::log(s);
}

}  // namespace liqregime::regime::detail

namespace liqregime::regime::detail {

/// hamilton_filter into caller-owned storage (reused across EM iterations).
void filter_into(const SwitchingParams& p, const RegressionData& d, FilterResult& out);

}  // namespace liqregime::regime::detail
