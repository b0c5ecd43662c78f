#include "fslab/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fslab {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, double step, int maxIter, double fTol) {
    const std::size_t n = x0.size();
    NelderMeadResult res;
    std::vector<std::vector<double>> s(n + 1, x0);
    std::vector<double> fv(n + 1);
    auto eval = [&](const std::vector<double>& x) {
        ++res.evaluations;
        const double v = f(x);
        return std::isnan(v) ? HUGE_VAL : v;
    };
    for (std::size_t k = 1; k <= n; ++k) s[k][k - 1] += s[k][k - 1] > 0.5 ? -step : step;
    for (std::size_t k = 0; k <= n; ++k) fv[k] = eval(s[k]);

    std::vector<std::size_t> idx(n + 1);
    std::vector<double> centroid(n), trial(n);
    auto along = [&](double t, std::vector<double>& out) {
        for (std::size_t d = 0; d < n; ++d) out[d] = centroid[d] + t * (s[n][d] - centroid[d]);
    };
    for (int it = 0; it < maxIter; ++it) {
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        auto s2 = s;
        auto f2 = fv;
        for (std::size_t k = 0; k <= n; ++k) {
            s[k] = s2[idx[k]];
            fv[k] = f2[idx[k]];
        }
        if (std::abs(fv[n] - fv[0]) <= fTol * (std::abs(fv[0]) + fTol)) break;
        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t d = 0; d < n; ++d) centroid[d] += s[k][d] / static_cast<double>(n);

        along(-1.0, trial);
        const double fr = eval(trial);
        if (fr < fv[0]) {
            std::vector<double> xe(n);
            along(-2.0, xe);
            const double fe = eval(xe);
            if (fe < fr) {
                s[n] = xe;
                fv[n] = fe;
            } else {
                s[n] = trial;
                fv[n] = fr;
            }
        } else if (fr < fv[n - 1]) {
            s[n] = trial;
            fv[n] = fr;
        } else {
            along(fr < fv[n] ? -0.5 : 0.5, trial);
            const double fc = eval(trial);
            if (fc < std::min(fr, fv[n])) {
                s[n] = trial;
                fv[n] = fc;
            } else {
                for (std::size_t k = 1; k <= n; ++k) {
                    for (std::size_t d = 0; d < n; ++d) s[k][d] = s[0][d] + 0.5 * (s[k][d] - s[0][d]);
                    fv[k] = eval(s[k]);
                }
            }
        }
    }
    const auto best = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
    res.x = s[best];
    res.value = fv[best];
    return res;
}

}  // namespace fslab
