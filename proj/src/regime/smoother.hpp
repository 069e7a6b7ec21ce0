#pragma once

#include <algorithm>
#include <limits>
#include <vector>

#include "liqregime/regime.hpp"

namespace liqregime::regime::detail {

/// Backward Kim recursion. Writes the smoothed marginals, and optionally the
/// full pairwise posteriors and/or their sum over t.
///
/// pair_t(i, j) = filtered_t(i) trans(i, j) smoothed_{t+1}(j) / predicted_{t+1}(j);
/// predicted entries are floored at the smallest positive normal.
inline void smooth_into(const SwitchingParams& p, const FilterResult& f, Matrix& smoothed,
                        double* pairwise, Matrix* pair_sum) {
    const std::size_t k = p.num_states();
    const std::size_t n = f.filtered.rows();
    constexpr double kFloor = std::numeric_limits<double>::min();

    std::copy(f.filtered.row(n - 1).begin(), f.filtered.row(n - 1).end(), smoothed.row(n - 1).begin());
    if (pair_sum) *pair_sum = Matrix(k, k);

    std::vector<double> ratio(k);
    std::vector<double> pair(k * k);
    for (std::size_t t = n - 1; t-- > 0;) {
        const auto next = smoothed.row(t + 1);
        const auto pred = f.predicted.row(t + 1);
        for (std::size_t j = 0; j < k; ++j) ratio[j] = next[j] / std::max(pred[j], kFloor);

        const auto filt = f.filtered.row(t);
        double total = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double* tr = p.trans.row(i).data();
            for (std::size_t j = 0; j < k; ++j) {
                const double v = filt[i] * tr[j] * ratio[j];
                pair[i * k + j] = v;
                total += v;
            }
        }
        if (!(total > 0.0)) throw NumericalDegeneracy(t, "smoothed probabilities vanished");
        const double inv = 1.0 / total;
        auto out = smoothed.row(t);
        for (std::size_t i = 0; i < k; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                const double v = pair[i * k + j] * inv;
                pair[i * k + j] = v;
                s += v;
            }
            out[i] = s;
        }
        if (pairwise) std::copy(pair.begin(), pair.end(), pairwise + t * k * k);
        if (pair_sum) {
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < k; ++j) (*pair_sum)(i, j) += pair[i * k + j];
        }
    }
}

}  // namespace liqregime::regime::detail
