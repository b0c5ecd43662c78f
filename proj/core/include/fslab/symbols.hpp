#pragma once

#include <array>

#include "fslab/params.hpp"

namespace fslab {

// Square-root symbols of the half-space problem at one spectral point.
struct CoreSymbols {
    cplx lambda;
    double r2 = 0.0;  // |xi'|^2
    cplx A;           // sqrt(lambda / (2 alpha + beta + zeta) + |xi'|^2)
    cplx B;           // sqrt(lambda / alpha + |xi'|^2)
    cplx etaCoef;     // (alpha + beta + zeta) / alpha
    // Cancellation-free forms of differences used throughout.
    cplx a2r2;  // A^2 - |xi'|^2 = lambda / (2 alpha + beta + zeta)
    cplx b2r2;  // B^2 - |xi'|^2 = lambda / alpha
    cplx gap;   // B - A
    cplx den;   // AB - |xi'|^2
};

// Unchecked in region; throws BranchError when Re A or Re B is not positive.
CoreSymbols core_symbols(const SpectralPoint& pt, const SymbolParams& sp);

// Checks lambda against the configured region first (RegionError).
CoreSymbols eval_core(const SpectralPoint& pt, const FluidParams& params, const SectorSpec& spec);

// Relative gap |B - A| below which eval_M uses the series around B = A.
inline constexpr double kMTaylorSwitch = 1e-6;

// (e^{-Bx} - e^{-Ax}) / (B - A), continuous across B = A.
cplx eval_M(const CoreSymbols& c, double x);
cplx eval_M(cplx A, cplx B, double x);
// Naive difference quotient.
cplx eval_M_direct(cplx A, cplx B, double x);
// Three-term expansion around B = A.
cplx eval_M_taylor(cplx A, cplx B, double x);

struct LopatinskiMatrix {
    cplx L11, L12, L21, L22;
    cplx detL;
    cplx P;       // lambda / (AB - |xi'|^2)
    cplx D;       // detL / P
    cplx N;       // lambda detL + sigma L11 (m + |xi'|^2)
    cplx Ntilde;  // lambda D + sigma A (m + |xi'|^2)
    cplx E;       // lambda L22 + sigma (m + |xi'|^2)
    // Entries recomputed from the P-factored form, with P evaluated from its
    // alternative rational expression.
    cplx altL11, altL12, altL21, altL22, altDetL, altP;
    double formMismatch = 0.0;  // max relative difference between the two forms
};

// Threshold for |AB - |xi'|^2| relative to |AB| + |xi'|^2.
inline constexpr double kNearSingular = 1e-14;

LopatinskiMatrix lopatinski(const CoreSymbols& c, const SymbolParams& sp);
LopatinskiMatrix eval_lopatinski(const SpectralPoint& pt, const FluidParams& params, const SectorSpec& spec);

// n_{J1}, n_{J2} for J = 1..dim+1; entries past dim+1 are zero.
struct MultiplierSet {
    int count = 2;
    std::array<cplx, 3> n1{};
    std::array<cplx, 3> n2{};
};

// Default relative floor for |N| against (|lambda|+|xi'|)(|lambda|^{1/2}+|xi'|)^2.
inline constexpr double kNFloor = 1e-10;

double n_scale(const SpectralPoint& pt);

MultiplierSet multipliers(const SpectralPoint& pt, const CoreSymbols& c, const LopatinskiMatrix& L,
                          const SymbolParams& sp, double nFloor = kNFloor);
MultiplierSet eval_nJk(const SpectralPoint& pt, const FluidParams& params, const SectorSpec& spec,
                       double nFloor = kNFloor);

struct QPair {
    cplx Q;       // (|xi'|^2 - A^2) / (AB - |xi'|^2)
    cplx Qprime;  // 1 / (AB + |xi'|^2)
};

QPair q_symbols(const CoreSymbols& c);
QPair eval_QQprime(const SpectralPoint& pt, const FluidParams& params, const SectorSpec& spec);

// All symbols at a point, evaluated once.
struct SymbolBundle {
    SpectralPoint point;
    SymbolParams params;
    CoreSymbols core;
    LopatinskiMatrix L;
    MultiplierSet n;
    QPair q;
};

SymbolBundle evaluate_all(const SpectralPoint& pt, const SymbolParams& sp, double nFloor = kNFloor);

}  // namespace fslab
