#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fslab/evolution.hpp"
#include "fslab/halfspace.hpp"

namespace fslab {

struct ResidualEntry {
    std::string name;
    double absolute = 0.0;
    double relative = 0.0;  // absolute / max(data norm, largest term norm)
    std::size_t worstMode = 0;
};

struct ResidualReport {
    std::vector<ResidualEntry> rows;
    std::size_t tangentialPoints = 0;
    std::size_t normalNodes = 0;
    double worst_relative() const;
    bool passes(double tolerance) const { return worst_relative() <= tolerance; }
    const ResidualEntry& row(const std::string& name) const;
};

// Residuals of the flat free-surface resolvent system in its original (unreduced)
// form: density, momentum, tangential and normal stress, kinematic rows.
ResidualReport pde_residual(const ResolventSolution& sol, const ResolventData& data, const FluidParams& params,
                            const SectorSpec& spec, cplx lambda);

struct NormSpec {
    double p = 2.0;    // time exponent
    double q = 2.0;    // space exponent
    int order = 0;     // Sobolev order 0..2
    bool seminorm = false;  // only the top-order derivatives
    double gamma = 0.0;     // exponential time weight e^{-gamma t}
    void validate() const;
};

// Volume-normalized discrete L_q / H^k_q norms; derivatives spectral in x',
// collocation in x_N.
double discrete_norm(const HalfSpaceField& f, const NormSpec& spec);
double discrete_norm(const BoundaryField& f, const NormSpec& spec);
// (int_0^T (e^{-gamma t} v(t))^p dt)^{1/p} by the trapezoidal rule.
double time_norm(const std::vector<double>& t, const std::vector<double>& values, const NormSpec& spec);
// Log-spaced grid on [t0, t1] with n points.
std::vector<double> log_time_grid(double t0, double t1, std::size_t n);

// Pointwise layout of a vector space: quadrature weight per point, components per point.
struct PointLayout {
    std::vector<double> weights;
    std::size_t components = 1;
    std::size_t size() const { return weights.size() * components; }
};

using LinearOp = std::function<std::vector<cplx>(const std::vector<cplx>&)>;

struct RBoundReport {
    std::string label;
    std::size_t operators = 0;
    std::size_t testVectors = 0;
    std::size_t trials = 0;
    double estimate = 0.0;
    double maxSingleNorm = 0.0;
    double halfTrialEstimate = 0.0;   // same estimate from the first half of the random trials
    std::vector<double> prefixEstimates;  // estimate for the first m operators
};

// Square-function quotient ||(sum |T_j f_j|^2)^{1/2}||_q / ||(sum |f_j|^2)^{1/2}||_q,
// maximized over exhaustive single-operator trials and random Rademacher
// combinations of the test vectors; a sampled lower estimate of the R-bound.
RBoundReport rbound_estimate(const std::vector<LinearOp>& family, const PointLayout& in, const PointLayout& out,
                             const std::vector<std::vector<cplx>>& testVectors, std::size_t trials,
                             std::uint64_t seed, double q = 2.0, const std::string& label = "");

PointLayout layout_of(const HalfSpaceField& f);
PointLayout layout_of(const BoundaryField& f);

// Solution-operator family T_j F = lambda_j^power u_j, where u_j is the velocity of the
// full resolvent problem with body force F and zero remaining data. All operators share
// one normal grid, truncated for the smallest decay rate over the lambdas.
struct OperatorFamily {
    std::vector<LinearOp> ops;
    std::vector<cplx> lambdas;
    HalfSpaceField prototype;  // zero physical field of the input shape
    PointLayout in, out;
};
OperatorFamily resolvent_family(const std::vector<cplx>& lambdas, double power, const FluidParams& params,
                                const SectorSpec& spec, const TangentialGridPtr& tg, std::size_t normalNodes);

// Random Gaussian bumps with the prototype's shape, one per index, from (seed, index).
std::vector<std::vector<cplx>> gaussian_test_vectors(const HalfSpaceField& prototype, std::size_t count,
                                                     std::uint64_t seed);

// Manufactured solution v = e^{-x_N} e_c in one tangential mode with wave number xi:
// data are formed analytically, solve_lame_bvp is run on n normal nodes over [0, X],
// and the max relative nodal error is returned.
double lame_manufactured_error(const FluidParams& params, const SectorSpec& spec, cplx lambda, double xi,
                               std::size_t component, std::size_t nodes, double X = 40.0);

// max_x |B int e^{-B(x+y)} k dy - int e^{-B(x+y)} k' dy - e^{-Bx} k(0)| / |k(0)| over xs,
// integrals on the graded Gauss-Legendre rule over [0, X].
double volevich_reconstruction_error(cplx B, const std::function<cplx(double)>& k,
                                     const std::function<cplx(double)>& dk, const std::vector<double>& xs, double X,
                                     const SolverOptions& opts = {});

struct TraceAgreement {
    double velocity = 0.0;  // max |u_direct(0) - u_volevich(0)| / max |u_direct(0)|
    double height = 0.0;    // same for h against the extended height at x_N = 0
};

// Runs both surface solvers on K (the Volevich one on extend_boundary(K)) and compares traces.
TraceAgreement volevich_trace_agreement(const BoundaryField& K, const FluidParams& params, const SectorSpec& spec,
                                        cplx lambda, const NormalGridPtr& normal, const SolverOptions& opts = {});

struct SemigroupCheck {
    double cMeasured = 0.0;
    double gamma0 = 0.0;
    std::vector<double> times;
    std::vector<double> ratios;
};

// Smallest C with |U(t)| + t(|d_t U(t)| + |U(t)|_D) <= C e^{gamma0 t} |U0| on the time
// grid, with U(t) = e^{t gen} U0. An empty domain norm drops that term.
SemigroupCheck semigroup_estimate_check(const Eigen::MatrixXcd& gen, const Eigen::VectorXcd& U0,
                                        const std::vector<double>& times, double gamma0,
                                        const SemigroupNorms& norms);

}  // namespace fslab
