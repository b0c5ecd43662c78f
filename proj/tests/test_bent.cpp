#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "fslab/bent.hpp"
#include "fslab/errors.hpp"

using namespace fslab;

namespace {

struct Case {
    TangentialGridPtr tg;
    NormalGridPtr ng;
    cplx lambda;
};

Case make_setup(cplx lambda = 16.0, std::size_t nt = 32, std::size_t nn = 32) {
    Case s;
    s.lambda = lambda;
    s.tg = std::make_shared<const TangentialGrid>(1, nt, 10.0);
    s.ng = std::make_shared<const NormalGrid>(nn, choose_truncation({}, {}, lambda, *s.tg), kDefaultMapLength);
    return s;
}

CurvedDataFunctions curved_data() {
    CurvedDataFunctions d;
    d.f = [](const Vec2& x) {
        const double e = std::exp(-x(0) * x(0) - (x(1) - 1.5) * (x(1) - 1.5));
        return Vec2(e, -0.5 * e);
    };
    d.g = [](const Vec2& x) {
        const double e = std::exp(-x(0) * x(0));
        return Vec2(0.3 * e, e);
    };
    d.k = [](const Vec2& x) { return std::exp(-2.0 * x(0) * x(0)); };
    return d;
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

double max_abs(const std::vector<cplx>& a) {
    double m = 0.0;
    for (cplx z : a) m = std::max(m, std::abs(z));
    return m;
}

double max_ratio(const PerturbationState& s) {
    double m = 0.0;
    for (double r : s.ratios) m = std::max(m, r);
    return m;
}

}  // namespace

TEST(Diffeo, MapAndInverse) {
    DiffeoSpec d{0.3, 1.5};
    for (double s : {-2.0, 0.0, 0.7}) {
        const Vec2 xi(s, 0.4);
        EXPECT_NEAR((d.inverse(d.map(xi)) - xi).norm(), 0.0, 1e-15);
        EXPECT_NEAR(d.map(Vec2(s, 0.0))(1), 0.3 * std::exp(-s * s / 2.25), 1e-15);
        // Jacobian of the inverse times the Jacobian of the map is the identity.
        EXPECT_NEAR(((d.A() + d.B(s)) * (d.Aminus() + d.Bminus(s)) - Mat2::Identity()).norm(), 0.0, 1e-15);
    }
    EXPECT_THROW((DiffeoSpec{0.1, 0.0}).validate(), ParameterError);
    EXPECT_THROW(d.height(0.0, 4), ParameterError);
}

TEST(Diffeo, HeightDerivativesMatchFiniteDifferences) {
    DiffeoSpec d{0.2, 0.8};
    const double h = 1e-5;
    for (double s : {-1.1, 0.3, 0.9})
        for (int k = 1; k <= 3; ++k) {
            const double fd = (d.height(s + h, k - 1) - d.height(s - h, k - 1)) / (2 * h);
            EXPECT_NEAR(d.height(s, k), fd, 1e-7 * (1 + std::abs(fd))) << s << " " << k;
        }
}

TEST(Diffeo, BoundsOfGaussianBump) {
    // max |h'| = a sqrt(2) e^{-1/2} / w, max |h''| = 2 a / w^2.
    DiffeoSpec d{0.05, 1.0};
    const auto b = d.bounds(10.0);
    EXPECT_NEAR(b.M1, 0.05 * std::sqrt(2.0) * std::exp(-0.5), 1e-6);
    EXPECT_NEAR(b.M2, 0.1, 1e-9);
    EXPECT_GT(b.M3, 0.0);
}

TEST(Geometry, FlatAtZeroAmplitude) {
    auto tg = std::make_shared<const TangentialGrid>(1, 16, 5.0);
    const SurfaceGeometry g = build_geometry(DiffeoSpec{0.0, 1.0}, tg);
    for (std::size_t p = 0; p < tg->size(); ++p) {
        EXPECT_EQ(g.g[p], 1.0);
        EXPECT_EQ(g.gInv[p], 1.0);
        EXPECT_EQ(g.christoffel[p], 0.0);
        EXPECT_EQ(g.stretch[p], 1.0);
        EXPECT_EQ(g.normal[p], Vec2(0.0, -1.0));
        EXPECT_EQ(g.jacobian[p], Mat2::Identity());
    }
}

TEST(Geometry, MetricAndNormalOfGraph) {
    DiffeoSpec d{0.2, 1.0};
    auto tg = std::make_shared<const TangentialGrid>(1, 32, 5.0);
    const SurfaceGeometry g = build_geometry(d, tg);
    for (std::size_t p = 0; p < tg->size(); ++p) {
        const double s = tg->x(p)[0];
        const double h1 = d.height(s, 1), h2 = d.height(s, 2);
        EXPECT_NEAR(g.g[p], 1.0 + h1 * h1, 1e-15);
        EXPECT_NEAR(g.g[p] * g.gInv[p], 1.0, 1e-15);
        EXPECT_NEAR(g.christoffel[p], h1 * h2 / (1.0 + h1 * h1), 1e-15);
        // Outward normal of {x_2 > h(x_1)} is (h', -1) / |(h', -1)|.
        const Vec2 ref = Vec2(h1, -1.0) / std::sqrt(1.0 + h1 * h1);
        EXPECT_NEAR((g.normal[p] - ref).norm(), 0.0, 1e-15);
        EXPECT_NEAR(g.normal[p].norm(), 1.0, 1e-15);
        // The normal is orthogonal to the tangent (1, h').
        EXPECT_NEAR(g.normal[p].dot(Vec2(1.0, h1)), 0.0, 1e-15);
        EXPECT_NEAR(g.stretch[p], std::sqrt(1.0 + h1 * h1), 1e-15);
    }
}

TEST(Geometry, RejectsSteepBump) {
    auto tg = std::make_shared<const TangentialGrid>(1, 16, 5.0);
    EXPECT_THROW(build_geometry(DiffeoSpec{2.0, 1.0}, tg), ParameterError);
    auto tg2 = std::make_shared<const TangentialGrid>(2, 8, 5.0);
    EXPECT_THROW(build_geometry(DiffeoSpec{0.1, 1.0}, tg2), ShapeError);
}

TEST(Pullback, IdentityCopiesData) {
    const Case s = make_setup();
    const auto data = curved_data();
    const BentData Z = pullback_data(data, DiffeoSpec{0.0, 1.0}, s.tg, s.ng);
    for (std::size_t p = 0; p < s.tg->size(); ++p) {
        const double x = s.tg->x(p)[0];
        for (std::size_t i = 0; i < s.ng->size(); ++i) {
            const Vec2 f = data.f(Vec2(x, s.ng->nodes()[i]));
            EXPECT_EQ(Z.F.at(p, i, 0), f(0));
            EXPECT_EQ(Z.F.at(p, i, 1), f(1));
        }
        EXPECT_EQ(Z.G.at(p, 1), data.g(Vec2(x, 0.0))(1));
        EXPECT_EQ(Z.K.at(p, 0), data.k(Vec2(x, 0.0)));
    }
}

TEST(Pullback, ConstantDataAndSampledForm) {
    const Case s = make_setup(16.0, 32, 48);
    const DiffeoSpec d{0.1, 1.0};
    CurvedDataFunctions c;
    c.f = [](const Vec2&) { return Vec2(2.0, -1.0); };
    c.g = [](const Vec2&) { return Vec2(0.0, 1.0); };
    c.k = [](const Vec2&) { return 3.0; };
    const BentData Z = pullback_data(c, d, s.tg, s.ng);
    for (std::size_t p = 0; p < s.tg->size(); ++p) {
        const double h1 = d.height(s.tg->x(p)[0], 1);
        EXPECT_NEAR(std::abs(Z.F.at(p, 5, 0) - 2.0), 0.0, 1e-15);
        EXPECT_NEAR(std::abs(Z.G.at(p, 1) - std::sqrt(1.0 + h1 * h1)), 0.0, 1e-15);
        EXPECT_NEAR(std::abs(Z.K.at(p, 0) - 3.0), 0.0, 1e-15);
    }

    // Sampled data on a longer normal grid agree with the functional form.
    const auto data = curved_data();
    auto src = std::make_shared<const NormalGrid>(96, s.ng->length() + 1.0, kDefaultMapLength);
    CurvedDataSamples cs{HalfSpaceField(s.tg, src, 2, Space::Physical), BoundaryField(s.tg, 2, Space::Physical),
                         BoundaryField(s.tg, 1, Space::Physical)};
    for (std::size_t p = 0; p < s.tg->size(); ++p) {
        const double x = s.tg->x(p)[0];
        for (std::size_t i = 0; i < src->size(); ++i) {
            const Vec2 f = data.f(Vec2(x, src->nodes()[i]));
            cs.f.at(p, i, 0) = f(0);
            cs.f.at(p, i, 1) = f(1);
        }
        const Vec2 surf(x, d.height(x));
        cs.g.at(p, 0) = data.g(surf)(0);
        cs.g.at(p, 1) = data.g(surf)(1);
        cs.k.at(p, 0) = data.k(surf);
    }
    const BentData A = pullback_data(data, d, s.tg, s.ng);
    const BentData B = pullback_data(cs, d, s.ng);
    EXPECT_LE(max_diff(A.F.data(), B.F.data()), 1e-8);
    EXPECT_LE(max_diff(A.G.data(), B.G.data()), 1e-15);
    EXPECT_LE(max_diff(A.K.data(), B.K.data()), 1e-15);
}

TEST(Perturbation, VanishesForIdentity) {
    const Case s = make_setup();
    const BentData Z = pullback_data(curved_data(), DiffeoSpec{0.0, 1.0}, s.tg, s.ng);
    const auto [w, H] = flat_solve(Z, {}, {}, s.lambda);
    const SurfaceGeometry geo = build_geometry(DiffeoSpec{0.0, 1.0}, s.tg);
    const BentData R = apply_perturbation(w, H, geo, {}, {}, s.lambda);
    EXPECT_EQ(max_abs(R.F.data()), 0.0);
    EXPECT_EQ(max_abs(R.G.data()), 0.0);
    EXPECT_EQ(max_abs(R.K.data()), 0.0);
}

TEST(Perturbation, IsLinear) {
    const Case s = make_setup();
    const DiffeoSpec d{0.05, 1.0};
    const SurfaceGeometry geo = build_geometry(d, s.tg);
    const BentData Z = pullback_data(curved_data(), d, s.tg, s.ng);
    auto [w, H] = flat_solve(Z, {}, {}, s.lambda);
    const BentData R1 = apply_perturbation(w, H, geo, {}, {}, s.lambda);
    const cplx c(0.5, -2.0);
    w *= c;
    H *= c;
    const BentData R2 = apply_perturbation(w, H, geo, {}, {}, s.lambda);
    auto check = [&](const std::vector<cplx>& a, const std::vector<cplx>& b) {
        std::vector<cplx> sa(a);
        for (auto& v : sa) v *= c;
        EXPECT_LE(max_diff(sa, b), 1e-12 * (1.0 + max_abs(b)));
    };
    check(R1.F.data(), R2.F.data());
    check(R1.G.data(), R2.G.data());
    check(R1.K.data(), R2.K.data());
}

TEST(Perturbation, HeightOnlyEntersTheStressRow) {
    const Case s = make_setup();
    const SurfaceGeometry geo = build_geometry(DiffeoSpec{0.05, 1.0}, s.tg);
    HalfSpaceField w(s.tg, s.ng, 2, Space::Physical);
    BoundaryField H(s.tg, 1, Space::Physical);
    for (std::size_t p = 0; p < s.tg->size(); ++p) H.at(p, 0) = std::exp(-s.tg->x(p)[0] * s.tg->x(p)[0]);
    const BentData R = apply_perturbation(w, H, geo, {}, {}, s.lambda);
    EXPECT_EQ(max_abs(R.F.data()), 0.0);
    EXPECT_EQ(max_abs(R.K.data()), 0.0);
    EXPECT_GT(max_abs(R.G.data()), 0.0);
}

TEST(Neumann, IdentityDiffeoMatchesFlatSolve) {
    const Case s = make_setup();
    const BentData Z = pullback_data(curved_data(), DiffeoSpec{0.0, 1.0}, s.tg, s.ng);
    const BentSolution b = neumann_solve(Z, DiffeoSpec{0.0, 1.0}, {}, {}, s.lambda);
    const auto [w, H] = flat_solve(Z, {}, {}, s.lambda);
    EXPECT_TRUE(b.state.converged);
    EXPECT_LE(max_diff(b.w.data(), w.data()), 1e-12 * max_abs(w.data()));
    EXPECT_LE(max_diff(b.H.data(), H.data()), 1e-12 * max_abs(H.data()));
    EXPECT_LE(b.residual, 1e-6);
}

TEST(Neumann, SmallBumpConvergesWithSmallRatio) {
    const Case s = make_setup(16.0, 64, 64);
    const DiffeoSpec d{0.05, 1.0};
    const BentSolution b = neumann_solve(pullback_data(curved_data(), d, s.tg, s.ng), d, {}, {}, s.lambda);
    EXPECT_TRUE(b.state.converged);
    EXPECT_LT(max_ratio(b.state), 0.5);
    EXPECT_LE(b.residual, 1e-6);
    EXPECT_EQ(b.state.ratios.size() + 1, b.state.updateNorms.size());
}

TEST(Neumann, RatioGrowsWithAmplitude) {
    const Case s = make_setup();
    double prev = 0.0;
    for (double a : {0.01, 0.02, 0.04}) {
        const DiffeoSpec d{a, 1.0};
        const BentSolution b = neumann_solve(pullback_data(curved_data(), d, s.tg, s.ng), d, {}, {}, s.lambda);
        const double r = max_ratio(b.state);
        EXPECT_GT(r, prev) << a;
        prev = r;
    }
}

TEST(Neumann, ReportsDivergenceOrExhaustion) {
    const Case s = make_setup(16.0, 32, 32);
    const DiffeoSpec d{1.1, 1.0};
    NeumannOptions o;
    o.maxIter = 12;
    const BentData Z = pullback_data(curved_data(), d, s.tg, s.ng);
    try {
        const BentSolution b = neumann_solve(Z, d, {}, {}, s.lambda, o);
        EXPECT_FALSE(b.state.converged);
    } catch (const DivergenceError&) {
        SUCCEED();
    }
    EXPECT_THROW(neumann_solve(Z, d, {}, {}, s.lambda, NeumannOptions{0, 1e-10}), ParameterError);
}

TEST(ContractionProxy, SmallForSmallBumpAndZeroForFlat) {
    const Case s = make_setup();
    const auto flat = contraction_proxy(DiffeoSpec{0.0, 1.0}, {}, {}, s.lambda, s.tg, s.ng, 3, 2);
    EXPECT_EQ(flat.value, 0.0);
    const auto bump = contraction_proxy(DiffeoSpec{0.05, 1.0}, {}, {}, s.lambda, s.tg, s.ng, 3, 4);
    EXPECT_EQ(bump.probes.size(), 4u);
    EXPECT_GT(bump.value, 0.0);
    EXPECT_LT(bump.value, 0.5);
}

TEST(PushForward, InverseOfPullbackOnIdentity) {
    const Case s = make_setup();
    const BentData Z = pullback_data(curved_data(), DiffeoSpec{0.0, 1.0}, s.tg, s.ng);
    const PushedForward pf = push_forward(Z.F, Z.K, DiffeoSpec{0.0, 1.0}, s.ng);
    EXPECT_LE(max_diff(pf.v.data(), Z.F.data()), 1e-12);
    for (bool b : pf.inside) EXPECT_TRUE(b);
}

TEST(History, CsvHasOneRowPerIteration) {
    PerturbationState st;
    st.updateNorms = {1.0, 0.1, 0.01};
    st.ratios = {0.1, 0.1};
    st.iterations = 3;
    const auto path = (std::filesystem::temp_directory_path() / "fslab_history_test.csv").string();
    write_history_csv(path, st);
    std::ifstream is(path);
    std::string line;
    int lines = 0;
    std::getline(is, line);
    EXPECT_EQ(line, "iter,updateNorm,ratio");
    while (std::getline(is, line)) ++lines;
    EXPECT_EQ(lines, 3);
    std::filesystem::remove(path);
}
