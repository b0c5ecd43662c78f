#pragma once

#include <functional>
#include <vector>

namespace fslab {

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int evaluations = 0;
};

// Derivative-free local minimization. Initial simplex steps are `step` along each
// axis, taken towards the centre of the unit box when x0 lies in it.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, double step, int maxIter, double fTol = 1e-12);

}  // namespace fslab
