#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "fslab/errors.hpp"
#include "fslab/random.hpp"
#include "fslab/sampling.hpp"
#include "fslab/symbol_scan.hpp"
#include "fslab/symbols.hpp"

using namespace fslab;

namespace {

const double kS2 = std::sqrt(2.0);

SpectralPoint point(cplx lambda, double xi = 0.0) {
    SpectralPoint p;
    p.lambda = lambda;
    p.xi = {xi, 0.0};
    return p;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Straightforward long-double evaluation of the boundary matrix from A and B.
struct NaiveL {
    std::complex<long double> L11, L12, L21, L22, det, N;
};

NaiveL naive_lopatinski(const SpectralPoint& pt, const FluidParams& fp) {
    using C = std::complex<long double>;
    const long double a = static_cast<long double>(fp.mu / fp.gamma1);
    const long double b = static_cast<long double>((fp.nu - fp.mu) / fp.gamma1);
    const C z = C(fp.zeta.real(), fp.zeta.imag()) * static_cast<long double>(fp.gamma3 / fp.gamma1);
    const C lam(pt.lambda.real(), pt.lambda.imag());
    const long double r2 = static_cast<long double>(pt.xi_norm2());
    const C A = std::sqrt(lam / (2.0L * a + b + z) + r2);
    const C B = std::sqrt(lam / a + r2);
    const C den = A * B - r2;
    NaiveL L;
    L.L11 = a * A * (B * B - r2) / den;
    L.L12 = a * r2 * (2.0L * A * B - r2 - B * B) / den;
    L.L21 = (2.0L * a * A * (B - A) - (b + z) * (A * A - r2)) / den;
    L.L22 = (2.0L * a + b + z) * B * (A * A - r2) / den;
    L.det = L.L11 * L.L22 - L.L12 * L.L21;
    const long double sigma = static_cast<long double>(fp.sigma / fp.gamma1);
    L.N = lam * L.det + sigma * L.L11 * (static_cast<long double>(fp.m) + r2);
    return L;
}

cplx d(std::complex<long double> z) { return {static_cast<double>(z.real()), static_cast<double>(z.imag())}; }

}  // namespace

TEST(CoreSymbols, BaselineAtUnitLambda) {
    const CoreSymbols c = eval_core(point(1.0), FluidParams{}, SectorSpec{});
    EXPECT_NEAR(std::abs(c.A - 1.0 / kS2), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(c.B - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(c.den - 1.0 / kS2), 0.0, 1e-15);
}

TEST(CoreSymbols, RootsHavePositiveRealPart) {
    SamplingPlan plan;
    plan.count = 2000;
    plan.seed = 3;
    for (std::size_t k = 0; k < plan.count; ++k) {
        const SpectralPoint pt = sample_point(plan, SectorSpec{}, FluidParams{}, k);
        const CoreSymbols c = eval_core(pt, FluidParams{}, SectorSpec{});
        EXPECT_GT(c.A.real(), 0.0);
        EXPECT_GT(c.B.real(), 0.0);
    }
}

TEST(CoreSymbols, OutsideRegionThrows) {
    EXPECT_THROW(eval_core(point({0.5, 0.0}), FluidParams{}, SectorSpec{}), RegionError);
}

TEST(Lopatinski, FrozenBaselineValues) {
    const LopatinskiMatrix L = eval_lopatinski(point(1.0), FluidParams{}, SectorSpec{});
    EXPECT_LT(rel(L.L11, 1.0), 1e-14);
    EXPECT_LT(std::abs(L.L12), 1e-15);
    EXPECT_LT(rel(L.L21, 2.0 * (1.0 - 1.0 / kS2)), 1e-14);
    EXPECT_LT(rel(L.L22, kS2), 1e-14);
    EXPECT_LT(rel(L.detL, kS2), 1e-14);
    EXPECT_LT(rel(L.P, kS2), 1e-14);
    EXPECT_LT(rel(L.D, 1.0), 1e-14);
    EXPECT_LT(rel(L.N, 1.0 + kS2), 1e-14);
    EXPECT_LT(rel(L.Ntilde, 1.7071067811865475), 1e-14);
    EXPECT_LT(rel(L.E, 1.0 + kS2), 1e-14);
}

TEST(Lopatinski, MatchesLongDoubleOracle) {
    SamplingPlan plan;
    plan.count = 3000;
    plan.seed = 4;
    plan.lambdaMaxFactor = 1e3;
    plan.xiMin = 1e-2;
    plan.xiMax = 1e2;
    const FluidParams fp;
    for (std::size_t k = 0; k < plan.count; ++k) {
        const SpectralPoint pt = sample_point(plan, SectorSpec{}, fp, k);
        const LopatinskiMatrix L = eval_lopatinski(pt, fp, SectorSpec{});
        const NaiveL o = naive_lopatinski(pt, fp);
        const double scale = std::abs(L.L11) + std::abs(L.L12) + std::abs(L.L21) + std::abs(L.L22);
        EXPECT_LT(std::abs(L.L11 - d(o.L11)) / scale, 1e-11) << k;
        EXPECT_LT(std::abs(L.L12 - d(o.L12)) / scale, 1e-11) << k;
        EXPECT_LT(std::abs(L.L21 - d(o.L21)) / scale, 1e-11) << k;
        EXPECT_LT(std::abs(L.L22 - d(o.L22)) / scale, 1e-11) << k;
        EXPECT_LT(rel(L.N, d(o.N)), 1e-10) << k;
    }
}

TEST(Lopatinski, CrossFormIdentities) {
    SamplingPlan plan;
    plan.count = 5000;
    plan.seed = 8;
    const auto r = lopatinski_identity_scan(FluidParams{}, SectorSpec{}, plan);
    EXPECT_LE(r.worst(), 1e-12);
}

TEST(Lopatinski, CrossFormIdentitiesCaseC1) {
    SamplingPlan plan;
    plan.count = 3000;
    plan.seed = 9;
    SectorSpec s;
    s.zetaCase = ZetaCase::C1;
    EXPECT_LE(lopatinski_identity_scan(FluidParams{}, s, plan).worst(), 1e-12);
}

TEST(QSymbols, FrozenBaselineValues) {
    const QPair q = eval_QQprime(point(1.0), FluidParams{}, SectorSpec{});
    EXPECT_LT(rel(q.Q, -1.0 / kS2), 1e-14);
    EXPECT_LT(rel(q.Qprime, kS2), 1e-14);
}

TEST(Multipliers, FrozenBaselineValues) {
    const MultiplierSet n = eval_nJk(point(1.0), FluidParams{}, SectorSpec{});
    ASSERT_EQ(n.count, 2);
    EXPECT_LT(std::abs(n.n1[0]), 1e-16);
    EXPECT_LT(std::abs(n.n2[0]), 1e-16);
    EXPECT_LT(rel(n.n1[1], -0.12132034355964257), 1e-14);
    EXPECT_LT(rel(n.n2[1], 0.41421356237309505), 1e-14);
}

TEST(Multipliers, TangentialEntriesOddInXi) {
    const FluidParams fp;
    const MultiplierSet a = eval_nJk(point({3.0, 1.0}, 0.8), fp, SectorSpec{});
    const MultiplierSet b = eval_nJk(point({3.0, 1.0}, -0.8), fp, SectorSpec{});
    EXPECT_LT(rel(a.n1[0], -b.n1[0]), 1e-14);
    EXPECT_LT(rel(a.n2[0], -b.n2[0]), 1e-14);
    EXPECT_LT(rel(a.n1[1], b.n1[1]), 1e-14);
}

TEST(MFunction, FrozenValue) {
    EXPECT_LT(rel(eval_M(cplx(1.0 / kS2), cplx(1.0), 1.0), -0.42742283597740833), 1e-14);
}

TEST(MFunction, ContinuousAcrossSwitch) {
    const cplx A(0.9, 0.3);
    for (double g : {0.5e-6, 0.99e-6, 1.01e-6, 2e-6}) {
        const cplx B = A + cplx(g * 2.0 * std::abs(A), 0.0);
        const cplx ref = eval_M_direct(A, B, 0.7);
        EXPECT_LT(rel(eval_M(A, B, 0.7), ref), 1e-9) << g;
    }
}

TEST(MFunction, EqualRootsLimit) {
    const cplx A(1.3, -0.4);
    for (double x : {0.0, 0.3, 2.0})
        EXPECT_LT(std::abs(eval_M(A, A, x) - (-x * std::exp(-A * x))), 1e-15);
}

TEST(MFunction, SeriesAgreesWithQuotientNearCoincidence) {
    SamplingPlan plan;
    plan.count = 2000;
    plan.seed = 10;
    const auto r = m_branch_scan(FluidParams{}, SectorSpec{}, plan, 1e-8, {0.1, 1.0, 5.0});
    EXPECT_LE(r.maxRelDiff, 1e-6);
}

TEST(NabScan, FindsBoundWithoutViolations) {
    const NabReport r = nab_lower_bound_scan(FluidParams{}, SectorSpec{}, 5000, 21);
    EXPECT_LE(r.lambda0Found, 100.0);
    EXPECT_GE(r.lambda0Found, 1.0);
    EXPECT_GT(r.cFound, 1e-6);
    EXPECT_EQ(r.violations, 0u);
}

TEST(NabScan, DeterministicUnderSeed) {
    const NabReport a = nab_lower_bound_scan(FluidParams{}, SectorSpec{}, 1000, 5);
    const NabReport b = nab_lower_bound_scan(FluidParams{}, SectorSpec{}, 1000, 5);
    EXPECT_EQ(a.cFound, b.cFound);
    EXPECT_EQ(a.lambda0Found, b.lambda0Found);
}

TEST(AbSector, PositiveAngleMargin) {
    SamplingPlan plan;
    plan.count = 5000;
    plan.seed = 6;
    const ABScanReport r = ab_sector_scan(FluidParams{}, SectorSpec{}, plan);
    EXPECT_GT(r.epsilon0, 0.0);
    EXPECT_GT(r.cIntAB, 0.0);
    EXPECT_LE(r.cLowerA, r.cUpperA);
}

TEST(MultiplierClass, ScanIsFiniteForBPow) {
    SamplingPlan plan;
    plan.count = 100;
    plan.seed = 2;
    MultiplierClassSpec cls;
    cls.order = 1.0;
    const auto r = multiplier_class_scan({SymbolKind::BPow, 1.0, 0}, cls, plan, FluidParams{});
    ASSERT_FALSE(r.perDerivative.empty());
    for (const auto& d : r.perDerivative) EXPECT_TRUE(std::isfinite(d.worstRatio));
    EXPECT_TRUE(r.violations.empty());
}

TEST(SymbolSelector, NameRoundTrip) {
    for (const auto& [sel, cls] : default_symbol_classes(SectorSpec{}, 1)) {
        const SymbolSelector back = SymbolSelector::parse(sel.name());
        EXPECT_EQ(back.name(), sel.name());
    }
}
