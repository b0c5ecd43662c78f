#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "fslab/errors.hpp"
#include "fslab/halfspace.hpp"
#include "fslab/verification.hpp"

using namespace fslab;

namespace {

struct Grids {
    TangentialGridPtr tg;
    NormalGridPtr ng;
};

Grids make_grids(cplx lambda, std::size_t nt = 64, std::size_t nn = 64, int dim = 1) {
    Grids g;
    g.tg = std::make_shared<const TangentialGrid>(dim, nt, 10.0);
    g.ng = std::make_shared<const NormalGrid>(nn, choose_truncation(FluidParams{}, SectorSpec{}, lambda, *g.tg),
                                              kDefaultMapLength);
    return g;
}

ResolventData gaussian_data(const Grids& g, double shift) {
    const std::size_t nc = static_cast<std::size_t>(g.tg->dim() + 1);
    ResolventData D{HalfSpaceField(g.tg, g.ng, 1, Space::Physical), HalfSpaceField(g.tg, g.ng, nc, Space::Physical),
                    BoundaryField(g.tg, nc, Space::Physical), BoundaryField(g.tg, 1, Space::Physical)};
    for (std::size_t p = 0; p < g.tg->size(); ++p) {
        const auto x = g.tg->x(p);
        const double r2 = (x[0] - shift) * (x[0] - shift) + (g.tg->dim() == 2 ? x[1] * x[1] : 0.0);
        for (std::size_t i = 0; i < g.ng->size(); ++i) {
            const double z = g.ng->nodes()[i];
            const double e = std::exp(-r2 - (z - 1.0 - shift) * (z - 1.0 - shift));
            D.d.at(p, i, 0) = e;
            for (std::size_t c = 0; c < nc; ++c) D.F.at(p, i, c) = cplx(0.5 - 0.3 * c, 0.1 * shift) * e;
        }
        for (std::size_t c = 0; c < nc; ++c) D.G.at(p, c) = (1.0 - 0.4 * c) * std::exp(-r2);
        D.K.at(p, 0) = std::exp(-2.0 * r2);
    }
    return D;
}

double max_abs(const std::vector<cplx>& v) {
    double m = 0.0;
    for (cplx z : v) m = std::max(m, std::abs(z));
    return m;
}

}  // namespace

TEST(Transform, GaussianMatchesContinuousTransform) {
    auto tg = std::make_shared<const TangentialGrid>(1, 64, 10.0);
    BoundaryField f(tg, 1, Space::Physical);
    for (std::size_t p = 0; p < tg->size(); ++p) f.at(p, 0) = std::exp(-tg->x(p)[0] * tg->x(p)[0]);
    const BoundaryField s = to_spectral(f);
    // Error budget: the aliased copy at distance 2 xi_Nyquist.
    const double nyquist = std::numbers::pi / tg->dx();
    for (std::size_t m = 0; m < tg->size(); ++m) {
        const double xi = tg->xi(m)[0];
        const double far = 2.0 * nyquist - std::abs(xi);
        const double budget = 1e-14 + 2.0 * std::sqrt(std::numbers::pi) * std::exp(-far * far / 4);
        EXPECT_LE(std::abs(s.at(m, 0) - std::sqrt(std::numbers::pi) * std::exp(-xi * xi / 4)), budget) << m;
    }
}

TEST(Transform, RoundTrip) {
    auto tg = std::make_shared<const TangentialGrid>(2, 16, 5.0);
    auto ng = std::make_shared<const NormalGrid>(8, 10.0);
    HalfSpaceField f(tg, ng, 2, Space::Physical);
    for (std::size_t k = 0; k < f.data().size(); ++k) f.data()[k] = cplx(std::sin(0.37 * k), std::cos(1.1 * k));
    const HalfSpaceField b = to_physical(to_spectral(f));
    for (std::size_t k = 0; k < f.data().size(); ++k) EXPECT_NEAR(std::abs(b.data()[k] - f.data()[k]), 0.0, 1e-13);
}

TEST(NormalGrid, InterpolationOutsideThrows) {
    NormalGrid ng(16, 5.0, 1.0);
    EXPECT_THROW(ng.interpolation_row(-0.1), InterpolationError);
    EXPECT_THROW(ng.interpolation_row(5.1), InterpolationError);
    const auto row = ng.interpolation_row(ng.nodes()[3]);
    EXPECT_NEAR(row(3), 1.0, 1e-14);
}

TEST(NormalGrid, DifferentiatesExponential) {
    NormalGrid ng(64, 40.0, kDefaultMapLength);
    Eigen::VectorXd f(64), df(64);
    for (int i = 0; i < 64; ++i) {
        f(i) = std::exp(-ng.nodes()[static_cast<std::size_t>(i)]);
        df(i) = -f(i);
    }
    EXPECT_LT((ng.D() * f - df).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT((ng.D2() * f - f).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(SurfaceSolver, HeightAtZeroFrequency) {
    SpectralPoint pt;
    const SurfaceMode s = surface_mode(pt, symbol_params(FluidParams{}, ZetaCase::C3, 1.0));
    EXPECT_NEAR(std::abs(s.hOverK - std::sqrt(2.0) / (1.0 + std::sqrt(2.0))), 0.0, 1e-12);

    const Grids g = make_grids(1.0);
    BoundaryField k(g.tg, 1, Space::Spectral);
    std::size_t zero = 0;
    for (std::size_t m = 0; m < g.tg->size(); ++m)
        if (g.tg->xi(m)[0] == 0.0) zero = m;
    k.at(zero, 0) = 1.0;
    const SurfaceSolution sol = solve_surface_homogeneous(k, FluidParams{}, SectorSpec{}, 1.0, g.ng);
    EXPECT_NEAR(std::abs(sol.h.at(zero, 0) - 0.58578643762690495), 0.0, 1e-12);
}

TEST(SurfaceSolver, KinematicIdentityPerMode) {
    for (cplx lam : {cplx(1.0, 0.0), cplx(2.0, 1.0), cplx(30.0, -20.0)}) {
        const Grids g = make_grids(lam);
        const BoundaryField k = to_spectral(gaussian_data(g, 0.3).K);
        const SurfaceSolution sol = solve_surface_homogeneous(k, FluidParams{}, SectorSpec{}, lam, g.ng);
        const double scale = max_abs(k.data());
        for (std::size_t m = 0; m < g.tg->size(); ++m) {
            const cplx r = lam * sol.h.at(m, 0) + sol.u.at(m, 0, 1) - k.at(m, 0);
            EXPECT_LE(std::abs(r), 1e-10 * scale) << m;
        }
    }
}

TEST(FullResolvent, ResidualsOnGaussianData) {
    for (cplx lam : {cplx(4.0, 0.0), cplx(4.0, 3.0), cplx(100.0, 20.0)}) {
        const Grids g = make_grids(lam);
        const ResolventData D = gaussian_data(g, 0.0);
        const ResolventSolution sol = solve_full_resolvent(D, FluidParams{}, SectorSpec{}, lam);
        const ResidualReport r = pde_residual(sol, D, FluidParams{}, SectorSpec{}, lam);
        EXPECT_EQ(r.rows.size(), 5u);
        EXPECT_LE(r.worst_relative(), 1e-6) << lam;
    }
}

TEST(FullResolvent, TwoDimensionalTangentialGrid) {
    const cplx lam(5.0, 2.0);
    const Grids g = make_grids(lam, 16, 40, 2);
    const ResolventData D = gaussian_data(g, 0.0);
    const ResolventSolution sol = solve_full_resolvent(D, FluidParams{}, SectorSpec{}, lam);
    EXPECT_LE(pde_residual(sol, D, FluidParams{}, SectorSpec{}, lam).worst_relative(), 1e-6);
}

TEST(FullResolvent, Linearity) {
    const cplx lam(3.0, 1.0);
    const Grids g = make_grids(lam);
    const ResolventData D1 = gaussian_data(g, 0.0), D2 = gaussian_data(g, 0.7);
    const cplx a(1.5, -0.5), b(-0.25, 2.0);
    ResolventData D = D1;
    D.d *= a; D.F *= a; D.G *= a; D.K *= a;
    ResolventData E = D2;
    E.d *= b; E.F *= b; E.G *= b; E.K *= b;
    D.d += E.d; D.F += E.F; D.G += E.G; D.K += E.K;
    const auto s1 = solve_full_resolvent(D1, FluidParams{}, SectorSpec{}, lam);
    const auto s2 = solve_full_resolvent(D2, FluidParams{}, SectorSpec{}, lam);
    const auto s = solve_full_resolvent(D, FluidParams{}, SectorSpec{}, lam);
    // Normwise: ||s - a s1 - b s2|| <= 1e-12 (|a| ||s1|| + |b| ||s2||).
    auto check = [&](const std::vector<cplx>& v, const std::vector<cplx>& v1, const std::vector<cplx>& v2) {
        double diff = 0.0, n1 = 0.0, n2 = 0.0;
        for (std::size_t k = 0; k < v.size(); ++k) {
            diff += std::norm(v[k] - a * v1[k] - b * v2[k]);
            n1 += std::norm(v1[k]);
            n2 += std::norm(v2[k]);
        }
        EXPECT_LE(std::sqrt(diff), 1e-12 * (std::abs(a) * std::sqrt(n1) + std::abs(b) * std::sqrt(n2)));
    };
    check(s.u.data(), s1.u.data(), s2.u.data());
    check(s.eta.data(), s1.eta.data(), s2.eta.data());
    check(s.h.data(), s1.h.data(), s2.h.data());
}

TEST(FullResolvent, ZeroDataGivesZero) {
    const Grids g = make_grids(4.0, 16, 24);
    ResolventData D = gaussian_data(g, 0.0);
    D.d *= 0.0; D.F *= 0.0; D.G *= 0.0; D.K *= 0.0;
    const auto s = solve_full_resolvent(D, FluidParams{}, SectorSpec{}, 4.0);
    EXPECT_EQ(max_abs(s.u.data()), 0.0);
    EXPECT_EQ(max_abs(s.eta.data()), 0.0);
    EXPECT_EQ(max_abs(s.h.data()), 0.0);
}

TEST(FullResolvent, CaseC1) {
    SectorSpec spec;
    spec.zetaCase = ZetaCase::C1;
    const cplx lam(6.0, 2.0);
    auto tg = std::make_shared<const TangentialGrid>(1, 32, 10.0);
    auto ng = std::make_shared<const NormalGrid>(64, choose_truncation(FluidParams{}, spec, lam, *tg), kDefaultMapLength);
    const ResolventData D = gaussian_data({tg, ng}, 0.2);
    const auto s = solve_full_resolvent(D, FluidParams{}, spec, lam);
    EXPECT_LE(pde_residual(s, D, FluidParams{}, spec, lam).worst_relative(), 1e-6);
}

TEST(FullResolvent, RejectsLambdaOutsideRegion) {
    const Grids g = make_grids(4.0, 16, 24);
    EXPECT_ANY_THROW(solve_full_resolvent(gaussian_data(g, 0.0), FluidParams{}, SectorSpec{}, cplx(-5.0, 0.0)));
}

TEST(ExtendBoundary, TraceEqualsDatum) {
    const Grids g = make_grids(4.0, 32, 32);
    const BoundaryField K = gaussian_data(g, 0.0).K;
    const HalfSpaceField ext = to_physical(extend_boundary(K, g.ng));
    for (std::size_t p = 0; p < g.tg->size(); ++p) EXPECT_NEAR(std::abs(ext.at(p, 0, 0) - K.at(p, 0)), 0.0, 1e-12);
}

TEST(Io, BinaryRoundTrip) {
    const Grids g = make_grids(4.0, 8, 6);
    HalfSpaceField f(g.tg, g.ng, 2, Space::Physical);
    for (std::size_t k = 0; k < f.data().size(); ++k) f.data()[k] = cplx(0.1 * k, -1.0 / (k + 1.0));
    const auto dir = std::filesystem::temp_directory_path() / "fslab_io_test";
    std::filesystem::create_directories(dir);
    const std::string path = (dir / "f.bin").string();
    write_binary(f, path);
    EXPECT_TRUE(std::filesystem::exists(path + ".json"));
    const HalfSpaceField b = read_binary_halfspace(path);
    ASSERT_EQ(b.data().size(), f.data().size());
    for (std::size_t k = 0; k < f.data().size(); ++k) EXPECT_EQ(b.data()[k], f.data()[k]);

    write_csv(f, (dir / "f.csv").string());
    std::ifstream is(dir / "f.csv");
    std::string header;
    std::getline(is, header);
    EXPECT_NE(header.find("c1_im"), std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST(LameBvp, ManufacturedSolution) {
    for (double xi : {0.0, 0.7, -2.0}) {
        const double e64 = lame_manufactured_error(FluidParams{}, SectorSpec{}, cplx(3.0, 1.0), xi, 1, 64);
        const double e32 = lame_manufactured_error(FluidParams{}, SectorSpec{}, cplx(3.0, 1.0), xi, 1, 32);
        EXPECT_LE(e64, 1e-8) << xi;
        EXPECT_GE(e32 / std::max(e64, 1e-300), 10.0) << xi;
    }
}
