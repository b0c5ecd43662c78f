#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fslab/halfspace.hpp"

namespace fslab {

using Mat2 = Eigen::Matrix2d;
using Vec2 = Eigen::Vector2d;

// Graph-type map of the flat half plane (N = 2):
//   Phi(xi) = (xi_1, xi_2 + a exp(-xi_1^2 / width^2)).
// grad Phi^T = A + B(xi) and grad (Phi^{-1})^T at Phi(xi) = A_- + B_-(xi), A = A_- = I.
struct DiffeoSpec {
    double amplitude = 0.0;
    double width = 1.0;

    void validate() const;
    // Surface height a*exp(-s^2/width^2) and its derivatives of order 0..3.
    double height(double s, int order = 0) const;
    Vec2 map(const Vec2& xi) const;
    Vec2 inverse(const Vec2& x) const;
    Mat2 A() const { return Mat2::Identity(); }
    Mat2 B(double xi1) const;
    Mat2 Aminus() const { return Mat2::Identity(); }
    Mat2 Bminus(double xi1) const;
    // Jacobian of the inverse map at Phi(xi): A_- + B_-.
    Mat2 inverse_jacobian(double xi1) const { return Aminus() + Bminus(xi1); }

    // Sup norms of (B, B_-), their first and second derivatives.
    struct Bounds {
        double M1 = 0.0, M2 = 0.0, M3 = 0.0;
    };
    Bounds bounds(double halfLength) const;
};

// Boundary geometry sampled on the tangential grid (N - 1 = 1).
struct SurfaceGeometry {
    TangentialGridPtr grid;
    std::vector<double> g;            // g_11
    std::vector<double> gInv;         // g^11
    std::vector<double> det;          // det of the first fundamental form
    std::vector<double> christoffel;  // Lambda^1_11
    std::vector<Vec2> normal;         // outward unit normal n_+
    std::vector<double> stretch;      // |A_Phi n_0|
    std::vector<Mat2> jacobian;       // A_Phi at each tangential point
    std::vector<Vec2> jacobianDiv;    // (Div A_Phi)_j = sum_k d_k (A_Phi)_jk
};

SurfaceGeometry build_geometry(const DiffeoSpec& spec, const TangentialGridPtr& grid);

// Data (F, G, K) of the flat problem
//   lambda w - gamma1^{-1} Div(S(w) + zeta gamma3 div w I) = F,
//   (S(w) + zeta gamma3 div w I) n0 + sigma (m - Delta') H n0 = G,  lambda H - w . n0 = K.
struct BentData {
    HalfSpaceField F;  // 2 components, physical
    BoundaryField G;   // 2 components, physical
    BoundaryField K;   // 1 component, physical
};

// Data on the curved domain given as functions of x = (x_1, x_2).
struct CurvedDataFunctions {
    std::function<Vec2(const Vec2&)> f;
    std::function<Vec2(const Vec2&)> g;       // evaluated on the surface
    std::function<double(const Vec2&)> k;     // evaluated on the surface
};

// Data on the curved domain sampled on a structured grid: the same tangential grid,
// x_2 on its own normal grid (which must cover x_2 = xi_2 + height), g and k by x_1.
struct CurvedDataSamples {
    HalfSpaceField f;  // 2 components, physical
    BoundaryField g;   // 2 components, physical
    BoundaryField k;   // 1 component, physical
};

// F_+ = A_-^T (f o Phi), G_+ = |A_Phi n0| A_-^T (g o Phi), K_+ = k o Phi on the flat grids.
BentData pullback_data(const CurvedDataFunctions& data, const DiffeoSpec& spec, const TangentialGridPtr& tg,
                       const NormalGridPtr& ng);
BentData pullback_data(const CurvedDataSamples& data, const DiffeoSpec& spec, const NormalGridPtr& ng);

// Perturbation triple (F1(w), F2(w, H) n0, F3(w) . n0) evaluated as the difference between
// the pulled-back curved operator and the flat operator.
BentData apply_perturbation(const HalfSpaceField& w, const BoundaryField& H, const SurfaceGeometry& geo,
                            const FluidParams& params, const SectorSpec& spec, cplx lambda);

// Flat solve of the data triple; returns (w, H) in physical space.
std::pair<HalfSpaceField, BoundaryField> flat_solve(const BentData& Z, const FluidParams& params,
                                                    const SectorSpec& spec, cplx lambda);

// ||F||_{L2} + |lambda|^{1/2} ||G||_{L2} + ||G||_{H1} + ||K||_{H2}, with G and K extended
// into the half space by extend_boundary.
double bent_data_norm(const BentData& Z, cplx lambda);

struct PerturbationState {
    std::vector<double> updateNorms;
    std::vector<double> ratios;  // updateNorms[k] / updateNorms[k-1]
    std::size_t iterations = 0;
    bool converged = false;
};

struct PushedForward {
    HalfSpaceField v;           // on the physical grid (x_1, x_2), zero outside the domain
    std::vector<bool> inside;   // per (point, node)
    BoundaryField h;            // by x_1
};

struct BentSolution {
    HalfSpaceField w;  // flat coordinates, physical tangential space
    BoundaryField H;
    PerturbationState state;
    double residual = 0.0;  // relative residual of the curved problem at the mapped nodes
};

struct NeumannOptions {
    int maxIter = 50;
    double tol = 1e-10;
};

BentSolution neumann_solve(const BentData& Z0, const DiffeoSpec& diffeo, const FluidParams& params,
                           const SectorSpec& spec, cplx lambda, const NeumannOptions& opts = {});

// Residual of the curved problem at x = Phi(xi) with derivatives by the chain rule.
double curved_residual(const HalfSpaceField& w, const BoundaryField& H, const BentData& Z,
                       const SurfaceGeometry& geo, const FluidParams& params, const SectorSpec& spec,
                       cplx lambda);

// v = A_- (w o Phi^{-1}) and h = H o Phi^{-1} on a physical grid with normal grid `phys`.
PushedForward push_forward(const HalfSpaceField& w, const BoundaryField& H, const DiffeoSpec& spec,
                           const NormalGridPtr& phys);

// max over probes of ||R Z|| / ||Z|| with R Z = perturbation(flat_solve(Z)).
struct ContractionProxy {
    double value = 0.0;
    std::vector<double> probes;
};
ContractionProxy contraction_proxy(const DiffeoSpec& diffeo, const FluidParams& params, const SectorSpec& spec,
                                   cplx lambda, const TangentialGridPtr& tg, const NormalGridPtr& ng,
                                   std::uint64_t seed, int probes = 8);

void write_history_csv(const std::string& path, const PerturbationState& state);

}  // namespace fslab
