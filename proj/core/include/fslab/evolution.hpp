#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fslab/grid.hpp"
#include "fslab/params.hpp"

namespace fslab {

// Hyperbolic contour z(u) = mu (1 + sin(i u - alpha)), u = k h, |k| <= halfNodes.
// The shape is chosen per time t: alpha, h and mu balance the discretization
// and truncation errors for a spectrum inside the sector |arg(-z)| <= spectrumAngle,
// with the contour itself kept inside the resolvent region of `sector`.
struct ContourSpec {
    int halfNodes = 48;
    double spectrumAngle = -1.0;  // < 0: use sector.epsilon
    SectorSpec sector;

    struct Node {
        cplx z;
        cplx weight;  // h dz/du / (2 pi i)
    };
    std::vector<Node> nodes(double t) const;
    void validate() const;
};

// Dense per-mode discretization of the evolution operator acting on
// U = (eta at all normal nodes, u at interior nodes, h). Boundary values of u are
// eliminated: u(X) = 0 and u(0) is recovered from the two stress conditions.
struct PerModeGenerator {
    Eigen::MatrixXcd matrix;
    std::array<double, 2> xi{0.0, 0.0};
    int dim = 1;
    NormalGridPtr normal;
    FluidParams params;

    std::size_t nodes() const { return normal->size(); }
    std::size_t size() const { return static_cast<std::size_t>(matrix.rows()); }
    // Offsets into the state vector.
    std::size_t eta_offset() const { return 0; }
    std::size_t u_offset(std::size_t comp) const { return nodes() + comp * (nodes() - 2); }
    std::size_t h_offset() const { return nodes() + static_cast<std::size_t>(dim + 1) * (nodes() - 2); }
};

struct ModeState {
    Eigen::VectorXcd eta;                // n
    std::vector<Eigen::VectorXcd> u;     // dim + 1 components, n nodes each
    cplx h = 0.0;
};

PerModeGenerator build_generator(const std::array<double, 2>& xi, int dim, const FluidParams& params,
                                 const NormalGridPtr& normal);

// Packs eta, interior u and h; boundary values in `s.u` are ignored.
Eigen::VectorXcd pack_state(const PerModeGenerator& gen, const ModeState& s);
// Unpacks a state, recovering the boundary values of u.
ModeState unpack_state(const PerModeGenerator& gen, const Eigen::VectorXcd& U);

Eigen::VectorXcd propagate_contour(const PerModeGenerator& gen, const Eigen::VectorXcd& U0, double t,
                                   const ContourSpec& contour);
Eigen::VectorXcd propagate_contour(const Eigen::MatrixXcd& gen, const Eigen::VectorXcd& U0, double t,
                                   const ContourSpec& contour);

// e^{t gen} U0 by scaling and squaring with Pade approximation.
Eigen::VectorXcd matrix_exponential_oracle(const Eigen::MatrixXcd& gen, const Eigen::VectorXcd& U0, double t);
inline constexpr Eigen::Index kExpmMaxDimension = 2000;

// Per-mode norms of the base space (eta in H^1, u in L_2, h in W^{2-1/q}) and of the
// operator domain (eta in H^1, u in H^2, h in W^{3-1/q}); Sobolev weights use (1 + |xi'|^2).
double state_space_norm(const PerModeGenerator& gen, const Eigen::VectorXcd& U, double q = 2.0);
double state_domain_norm(const PerModeGenerator& gen, const Eigen::VectorXcd& U, double q = 2.0);

// Forcing (d, f, k) in the packed state layout, sampled at t_j = j dt (t_0 = 0).
struct ForcingHistory {
    double dt = 0.0;
    std::vector<Eigen::VectorXcd> samples;
};

struct MaximalRegularityReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;  // lhs / rhs, 0 when rhs = 0
    std::vector<double> times;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> series;  // per time, one value per column
};

// Zero initial data; the forced solution is advanced exactly for piecewise-linear
// forcing. Time norms are e^{-gamma0 t}-weighted L_p on the sample grid; the
// half time derivative of grad u is applied as (gamma0 + i tau)^{1/2} in frequency.
MaximalRegularityReport maximal_regularity_norms(const PerModeGenerator& gen, const ForcingHistory& forcing,
                                                 double gamma0, double p = 2.0, double q = 2.0);

// Space and domain norms for semigroup_estimate_check.
struct SemigroupNorms {
    std::function<double(const Eigen::VectorXcd&)> space;
    std::function<double(const Eigen::VectorXcd&)> domain;  // may be empty
};
SemigroupNorms generator_norms(const PerModeGenerator& gen, double q = 2.0);

}  // namespace fslab
