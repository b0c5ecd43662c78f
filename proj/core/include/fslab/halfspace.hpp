#pragma once

#include <array>

#include "fslab/field.hpp"
#include "fslab/symbols.hpp"

namespace fslab {

// Data (d, F, G, K) and solution (eta, u, h) of the flat free-surface resolvent problem.
struct ResolventData {
    HalfSpaceField d;  // 1 component
    HalfSpaceField F;  // dim + 1 components
    BoundaryField G;   // dim + 1 components
    BoundaryField K;   // 1 component
};

struct ResolventSolution {
    HalfSpaceField eta;
    HalfSpaceField u;
    BoundaryField h;
    HalfSpaceField hExt;  // cut-off extension of h into the half space
};

struct SolverOptions {
    double nFloor = kNFloor;
    // Composite Gauss-Legendre panels for the Volevich integrals.
    double quadFirstPanel = 0.02;
    double quadRatio = 1.3;
    int cutoffPanels = 16;  // panels on [0, 2] for the height extension
};

// Smooth cut-off: 1 on |s| <= 1, 0 on |s| >= 2.
double cutoff(double s);
double cutoff_derivative(double s);

// Closed-form surface solution of one mode per unit boundary datum k(0) = 1.
struct SurfaceMode {
    SpectralPoint point;
    CoreSymbols core;
    LopatinskiMatrix L;
    MultiplierSet n;
    double weight = 1.0;  // m + |xi'|^2
    cplx hOverK;          // detL / N

    // order-th x_N derivative (0..2) of component `comp` at x.
    cplx u(std::size_t comp, double x, int order = 0) const;
};

SurfaceMode surface_mode(const SpectralPoint& pt, const SymbolParams& sp, double nFloor = kNFloor);

// Normal truncation X with e^{-X min Re A} below 1e-12 over the grid's modes, at least 20.
double choose_truncation(const FluidParams& params, const SectorSpec& spec, cplx lambda, const TangentialGrid& tg);

struct SurfaceSolution {
    HalfSpaceField u;  // spectral
    BoundaryField h;   // spectral
};

// Surface-coupled homogeneous problem driven by the kinematic datum k on x_N = 0.
SurfaceSolution solve_surface_homogeneous(const BoundaryField& k, const FluidParams& params, const SectorSpec& spec,
                                          cplx lambda, const NormalGridPtr& normal,
                                          const SolverOptions& opts = {});

struct VolevichSolution {
    HalfSpaceField u;     // spectral
    HalfSpaceField hExt;  // spectral
};

// Same problem written as normal-direction integrals of (m - Delta')k, d_N k and
// grad' d_N k against decaying kernels; k is a half-space extension.
VolevichSolution solve_surface_volevich(const HalfSpaceField& k, const FluidParams& params, const SectorSpec& spec,
                                        cplx lambda, const SolverOptions& opts = {});

// Half-space extension k(x', x_N) = F^{-1}[e^{-x_N (1 + |xi'|^2)^{1/2}} K^].
HalfSpaceField extend_boundary(const BoundaryField& K, const NormalGridPtr& normal);

// Height extension phi(x_N) F^{-1}[(detL/N) e^{-|xi'| x_N} k^(0)] evaluated directly.
HalfSpaceField height_extension(const BoundaryField& k, const FluidParams& params, const SectorSpec& spec,
                                cplx lambda, const NormalGridPtr& normal, const SolverOptions& opts = {});

// Reduced Lame system with traction data G' and decay closure v(X) = 0,
// one dense collocation solve per mode.
HalfSpaceField solve_lame_bvp(const HalfSpaceField& F, const BoundaryField& Gprime, const FluidParams& params,
                              const SectorSpec& spec, cplx lambda);

ResolventSolution solve_full_resolvent(const ResolventData& data, const FluidParams& params, const SectorSpec& spec,
                                       cplx lambda, const SolverOptions& opts = {});

// (lambda - Delta')^{-1} on the flat boundary.
BoundaryField laplace_beltrami_resolvent_flat(const BoundaryField& f, cplx lambda);

// Spectral-space helpers shared with the residual checks.
HalfSpaceField normal_derivative(const HalfSpaceField& f, int order = 1);
HalfSpaceField divergence(const HalfSpaceField& u);  // spectral u, dim + 1 components

}  // namespace fslab
