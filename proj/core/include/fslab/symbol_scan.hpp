#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fslab/params.hpp"
#include "fslab/sampling.hpp"
#include "fslab/symbols.hpp"

namespace fslab {

enum class SymbolKind {
    APow, BPow, L11, L12, L21, L22, DetL, DetLInv, Q, Qprime, NJ1, NJ2, DetLOverN, ExpBx
};

struct SymbolSelector {
    SymbolKind kind = SymbolKind::BPow;
    double power = 1.0;  // exponent for APow / BPow
    int J = 0;           // 0-based component for NJ1 / NJ2

    std::string name() const;
    static SymbolSelector parse(const std::string& text);
};

struct MultiplierClassSpec {
    double order = 0.0;
    int type = 1;
    int maxDerivOrder = 2;
    SectorSpec region;
};

// Value of a selected symbol; x is the normal coordinate used by ExpBx only.
cplx eval_symbol(const SymbolSelector& sel, const SpectralPoint& pt, const FluidParams& params,
                 ZetaCase zc, double x = 0.0);

struct DerivativeEntry {
    std::array<int, 2> kappa{0, 0};
    int ell = 0;
    double worstRatio = 0.0;    // after local maximization
    double sampledRatio = 0.0;  // max over the sample set alone
    SpectralPoint argmax;
    double argmaxX = 0.0;
};

struct MultiplierScanReport {
    std::string symbol;
    MultiplierClassSpec cls;
    std::size_t samples = 0;
    std::vector<DerivativeEntry> perDerivative;
    std::vector<std::string> violations;
    double decayConstant = 0.0;  // fitted c' for ExpBx, 0 otherwise
};

// Worst ratio of finite-difference derivatives against the class bound.
MultiplierScanReport multiplier_class_scan(const SymbolSelector& sel, const MultiplierClassSpec& spec,
                                           const SamplingPlan& plan, const FluidParams& params);

// The default class table used by verify-symbols.
std::vector<std::pair<SymbolSelector, MultiplierClassSpec>> default_symbol_classes(const SectorSpec& region,
                                                                                    int dim);

struct NabReport {
    double lambda0Found = 0.0;
    double cFound = 0.0;
    double sampledMin = 0.0;
    double refinedMin = 0.0;
    SpectralPoint argmin;
    std::size_t samples = 0;
    std::size_t validationSamples = 0;
    std::size_t violations = 0;
    std::vector<std::pair<double, double>> searchTrace;  // (lambda0, min ratio)
};

inline constexpr double kNabFloor = 1e-10;

// |N| / ((|lambda|+|xi'|)(|lambda|^{1/2}+|xi'|)^2) at a point.
double nab_ratio(const SpectralPoint& pt, const FluidParams& params, ZetaCase zc);

NabReport nab_lower_bound_scan(const FluidParams& params, const SectorSpec& spec, std::size_t sampleBudget,
                               std::uint64_t seed, int dim = 1);

struct SectorScanReport {
    std::size_t samples = 0;
    std::size_t violations = 0;
    double minMargin = 0.0;  // min of lhs / rhs
};

// Sector inequality |a lambda + |xi'|^2| >= sin(eps/2)(a|lambda| + |xi'|^2) over random samples.
SectorScanReport sector_inequality_scan(double epsilon, std::size_t samples, std::uint64_t seed);

struct ABScanReport {
    std::size_t samples = 0;
    double maxArgAB = 0.0;
    double epsilon0 = 0.0;       // pi - max |arg(AB)|
    double cIntAB = 0.0;         // min |AB + |xi'|^2| / (|lambda| + |xi'|^2)
    double cLowerA = 0.0, cUpperA = 0.0;  // bounds of |A| / (|lambda|^{1/2}+|xi'|)
    double cLowerB = 0.0, cUpperB = 0.0;
};

ABScanReport ab_sector_scan(const FluidParams& params, const SectorSpec& spec, const SamplingPlan& plan);

struct LopatinskiIdentityReport {
    std::size_t samples = 0;
    double formMismatch = 0.0;  // entries and det L between the two closed forms
    double detFactor = 0.0;     // det L against P D
    double nFactor = 0.0;       // N against P Ntilde
    double nExpansion = 0.0;    // N against L11 E - lambda L12 L21
    SpectralPoint argmax;
    double worst() const;
};

// Cross-form identities of the Lopatinski matrix over the samples of a plan.
LopatinskiIdentityReport lopatinski_identity_scan(const FluidParams& params, const SectorSpec& spec,
                                                  const SamplingPlan& plan);

struct MBranchReport {
    std::size_t samples = 0;
    double maxRelDiff = 0.0;  // series against the difference quotient
    double relGap = 0.0;
};

// Puts B = A + d with |d| = relGap (|A| + |B|) in a sampled direction and compares
// the series branch of M with the naive quotient at x = s / Re A for each s in xs.
MBranchReport m_branch_scan(const FluidParams& params, const SectorSpec& spec, const SamplingPlan& plan,
                            double relGap, const std::vector<double>& xs);

}  // namespace fslab
