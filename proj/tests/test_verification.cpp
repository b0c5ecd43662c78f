#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fslab/errors.hpp"
#include "fslab/verification.hpp"

using namespace fslab;

namespace {

constexpr double kPi = std::numbers::pi;

ResolventData gaussian_data(const TangentialGridPtr& tg, const NormalGridPtr& ng) {
    ResolventData D{HalfSpaceField(tg, ng, 1, Space::Physical), HalfSpaceField(tg, ng, 2, Space::Physical),
                    BoundaryField(tg, 2, Space::Physical), BoundaryField(tg, 1, Space::Physical)};
    for (std::size_t p = 0; p < tg->size(); ++p) {
        const double x = tg->x(p)[0];
        for (std::size_t i = 0; i < ng->size(); ++i) {
            const double z = ng->nodes()[i];
            const double e = std::exp(-x * x - (z - 1.0) * (z - 1.0));
            D.d.at(p, i, 0) = e;
            D.F.at(p, i, 0) = 0.5 * e;
            D.F.at(p, i, 1) = -0.2 * x * e;
        }
        D.G.at(p, 0) = std::exp(-x * x);
        D.G.at(p, 1) = 0.4 * std::exp(-x * x);
        D.K.at(p, 0) = std::exp(-2.0 * x * x);
    }
    return D;
}

LinearOp scale_op(cplx s) {
    return [s](const std::vector<cplx>& v) {
        std::vector<cplx> o(v);
        for (auto& x : o) x *= s;
        return o;
    };
}

PointLayout uniform_layout(std::size_t n) {
    PointLayout L;
    L.weights.assign(n, 1.0);
    return L;
}

std::vector<std::vector<cplx>> simple_vectors(std::size_t n, std::size_t count) {
    std::vector<std::vector<cplx>> t(count, std::vector<cplx>(n));
    for (std::size_t k = 0; k < count; ++k)
        for (std::size_t i = 0; i < n; ++i) t[k][i] = cplx(std::sin(1.3 * i + k), std::cos(0.7 * i * (k + 1)));
    return t;
}

}  // namespace

TEST(Residual, ExactSolveIsSmallAndPerturbationIsDetected) {
    const cplx lam(4.0, 2.0);
    auto tg = std::make_shared<const TangentialGrid>(1, 64, 10.0);
    auto ng = std::make_shared<const NormalGrid>(64, choose_truncation({}, {}, lam, *tg), kDefaultMapLength);
    const ResolventData D = gaussian_data(tg, ng);
    ResolventSolution sol = solve_full_resolvent(D, {}, {}, lam);
    const ResidualReport good = pde_residual(sol, D, {}, {}, lam);
    EXPECT_LE(good.worst_relative(), 1e-6);
    EXPECT_EQ(good.tangentialPoints, 64u);
    EXPECT_EQ(good.normalNodes, 64u);
    EXPECT_NO_THROW(good.row("kinematic"));
    EXPECT_ANY_THROW(good.row("no-such-row"));

    sol.h = to_physical(sol.h);
    for (auto& v : sol.h.data()) v *= 1.01;
    const ResidualReport bad = pde_residual(sol, D, {}, {}, lam);
    EXPECT_GT(bad.row("kinematic").relative, 1e-4);
}

TEST(DiscreteNorm, ConstantFieldHasUnitNorm) {
    auto tg = std::make_shared<const TangentialGrid>(1, 16, 3.0);
    auto ng = std::make_shared<const NormalGrid>(16, 5.0);
    HalfSpaceField f(tg, ng, 1, Space::Physical);
    for (auto& v : f.data()) v = 1.0;
    for (double q : {1.5, 2.0, 4.0}) {
        NormSpec s;
        s.q = q;
        EXPECT_NEAR(discrete_norm(f, s), 1.0, 1e-12);
        s.order = 2;
        EXPECT_NEAR(discrete_norm(f, s), 1.0, 1e-10);  // derivatives of a constant vanish
    }
    BoundaryField b(tg, 1, Space::Physical);
    for (auto& v : b.data()) v = 1.0;
    EXPECT_NEAR(discrete_norm(b, NormSpec{}), 1.0, 1e-12);
}

TEST(DiscreteNorm, TangentialSineSeminorm) {
    // f = sin(k x): mean of |f|^2 is 1/2, of |f'|^2 is k^2/2.
    auto tg = std::make_shared<const TangentialGrid>(1, 32, kPi);
    BoundaryField b(tg, 1, Space::Physical);
    const double k = 3.0;
    for (std::size_t p = 0; p < tg->size(); ++p) b.at(p, 0) = std::sin(k * tg->x(p)[0]);
    NormSpec s;
    EXPECT_NEAR(discrete_norm(b, s), std::sqrt(0.5), 1e-12);
    s.order = 1;
    s.seminorm = true;
    EXPECT_NEAR(discrete_norm(b, s), k * std::sqrt(0.5), 1e-10);
    s.seminorm = false;
    EXPECT_NEAR(discrete_norm(b, s), std::sqrt(0.5 + 0.5 * k * k), 1e-10);
}

TEST(DiscreteNorm, HomogeneityAndTriangleInequality) {
    auto tg = std::make_shared<const TangentialGrid>(1, 16, 4.0);
    auto ng = std::make_shared<const NormalGrid>(12, 8.0);
    HalfSpaceField f(tg, ng, 2, Space::Physical), g(tg, ng, 2, Space::Physical);
    for (std::size_t k = 0; k < f.data().size(); ++k) {
        f.data()[k] = cplx(std::sin(0.3 * k), 0.1 * std::cos(k));
        g.data()[k] = cplx(std::cos(0.11 * k), std::sin(2.0 * k));
    }
    for (int order : {0, 1}) {
        for (double q : {1.5, 2.0, 3.0}) {
            NormSpec s;
            s.q = q;
            s.order = order;
            HalfSpaceField scaled = f;
            scaled *= cplx(-2.0, 1.5);
            EXPECT_NEAR(discrete_norm(scaled, s), 2.5 * discrete_norm(f, s), 1e-11 * discrete_norm(f, s));
            HalfSpaceField sum = f;
            sum += g;
            EXPECT_LE(discrete_norm(sum, s), discrete_norm(f, s) + discrete_norm(g, s) + 1e-12);
        }
    }
}

TEST(DiscreteNorm, RejectsBadSpec) {
    NormSpec s;
    s.q = 1.0;
    EXPECT_THROW(s.validate(), ParameterError);
    s.q = 2.0;
    s.order = 3;
    EXPECT_THROW(s.validate(), ParameterError);
}

TEST(TimeNorm, ConstantAndWeighted) {
    const auto t = log_time_grid(0.01, 2.0, 200);
    EXPECT_NEAR(t.front(), 0.01, 1e-15);
    EXPECT_NEAR(t.back(), 2.0, 1e-14);
    for (std::size_t i = 1; i < t.size(); ++i) EXPECT_GT(t[i], t[i - 1]);
    std::vector<double> one(t.size(), 1.0);
    NormSpec s;
    EXPECT_NEAR(time_norm(t, one, s), std::sqrt(1.99), 1e-12);
    s.gamma = 1.0;
    s.p = 2.0;
    // int e^{-2t} over [0.01, 2], trapezoid error is second order in the step.
    const double exact = std::sqrt(0.5 * (std::exp(-0.02) - std::exp(-4.0)));
    EXPECT_NEAR(time_norm(t, one, s), exact, 1e-3);
    EXPECT_THROW(log_time_grid(0.0, 1.0, 4), ParameterError);
}

TEST(RBound, SingletonEqualsItsNorm) {
    const std::size_t n = 40;
    const auto tests = simple_vectors(n, 4);
    const auto L = uniform_layout(n);
    const RBoundReport r = rbound_estimate({scale_op(cplx(0.0, 3.0))}, L, L, tests, 200, 7);
    EXPECT_NEAR(r.estimate, 3.0, 1e-12);
    EXPECT_NEAR(r.maxSingleNorm, 3.0, 1e-12);
    ASSERT_EQ(r.prefixEstimates.size(), 1u);

    // Diagonal multiplier: estimate equals the largest quotient over the test vectors.
    LinearOp diag = [](const std::vector<cplx>& v) {
        std::vector<cplx> o(v);
        for (std::size_t i = 0; i < o.size(); ++i) o[i] *= 1.0 + 0.05 * static_cast<double>(i);
        return o;
    };
    const RBoundReport d = rbound_estimate({diag}, L, L, tests, 200, 7, 3.0);
    EXPECT_NEAR(d.estimate, d.maxSingleNorm, 1e-12 * d.maxSingleNorm);
    EXPECT_LE(d.estimate, 1.0 + 0.05 * (n - 1) + 1e-12);
}

TEST(RBound, ScalarFamilyBoundedByLargestScalar) {
    const std::size_t n = 30;
    const auto tests = simple_vectors(n, 4);
    const auto L = uniform_layout(n);
    const std::vector<cplx> lams{cplx(2.0, 1.0), cplx(5.0, -3.0), cplx(1.5, 0.5), cplx(40.0, 10.0)};
    std::vector<LinearOp> fam;
    double minAbs = 1e300;
    for (cplx l : lams) {
        fam.push_back(scale_op(1.0 / l));
        minAbs = std::min(minAbs, std::abs(l));
    }
    for (double q : {1.5, 2.0, 4.0}) {
        const RBoundReport r = rbound_estimate(fam, L, L, tests, 300, 3, q);
        EXPECT_LE(r.estimate, (1.0 / minAbs) * (1.0 + 1e-9)) << q;
        EXPECT_NEAR(r.maxSingleNorm, 1.0 / minAbs, 1e-12);
        for (std::size_t m = 1; m < r.prefixEstimates.size(); ++m)
            EXPECT_GE(r.prefixEstimates[m], r.prefixEstimates[m - 1]);
        EXPECT_LE(r.halfTrialEstimate, r.estimate);
        EXPECT_GE(r.halfTrialEstimate, r.maxSingleNorm);
    }
}

TEST(RBound, DeterministicInSeed) {
    const std::size_t n = 20;
    const auto tests = simple_vectors(n, 3);
    const auto L = uniform_layout(n);
    LinearOp rot = [](const std::vector<cplx>& v) {
        std::vector<cplx> o(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) o[i] = v[(i + 1) % v.size()] * (i % 2 ? 2.0 : 0.5);
        return o;
    };
    const std::vector<LinearOp> fam{rot, scale_op(1.0), scale_op(0.5)};
    const auto a = rbound_estimate(fam, L, L, tests, 150, 11);
    const auto b = rbound_estimate(fam, L, L, tests, 150, 11);
    EXPECT_EQ(a.estimate, b.estimate);
    EXPECT_EQ(a.prefixEstimates, b.prefixEstimates);
}

TEST(RBound, RejectsBadInput) {
    const auto L = uniform_layout(5);
    const auto tests = simple_vectors(5, 2);
    EXPECT_THROW(rbound_estimate({}, L, L, tests, 200, 1), ParameterError);
    EXPECT_THROW(rbound_estimate({scale_op(1.0)}, L, L, tests, 50, 1), ParameterError);
    EXPECT_THROW(rbound_estimate({scale_op(1.0)}, L, L, simple_vectors(4, 2), 200, 1), ShapeError);
}

TEST(RBound, ResolventFamilyIsFiniteAndScales) {
    auto tg = std::make_shared<const TangentialGrid>(1, 16, 8.0);
    const std::vector<cplx> lams{cplx(2.0, 0.0), cplx(3.0, 2.0)};
    const OperatorFamily f0 = resolvent_family(lams, 0.0, {}, {}, tg, 24);
    const OperatorFamily f1 = resolvent_family(lams, 1.0, {}, {}, tg, 24);
    const auto tests = gaussian_test_vectors(f0.prototype, 2, 5);
    ASSERT_EQ(tests.size(), 2u);
    const auto u0 = f0.ops[1](tests[0]);
    const auto u1 = f1.ops[1](tests[0]);
    ASSERT_EQ(u0.size(), u1.size());
    for (std::size_t i = 0; i < u0.size(); ++i) EXPECT_NEAR(std::abs(u1[i] - lams[1] * u0[i]), 0.0, 1e-12 * (1 + std::abs(u1[i])));
    const RBoundReport r = rbound_estimate(f0.ops, f0.in, f0.out, tests, 100, 5);
    EXPECT_TRUE(std::isfinite(r.estimate));
    EXPECT_GT(r.estimate, 0.0);
}

TEST(LameManufactured, ConvergesSpectrally) {
    for (std::size_t comp : {0u, 1u}) {
        for (double xi : {0.0, 0.5, 2.0}) {
            const double e32 = lame_manufactured_error({}, {}, cplx(3.0, 1.0), xi, comp, 32);
            const double e64 = lame_manufactured_error({}, {}, cplx(3.0, 1.0), xi, comp, 64);
            EXPECT_LE(e64, 1e-8) << comp << " " << xi;
            EXPECT_LE(10.0 * e64, std::max(e32, 1e-13)) << comp << " " << xi;
        }
    }
}

TEST(Volevich, ReconstructsBoundaryValue) {
    const std::vector<double> xs{0.0, 0.3, 1.0, 2.5};
    for (cplx B : {cplx(1.0, 0.0), cplx(2.0, 1.5), cplx(0.7, -0.4)}) {
        auto k = [](double x) { return cplx(std::exp(-x) * (1.0 + x), 0.0); };
        auto dk = [](double x) { return cplx(-x * std::exp(-x), 0.0); };
        EXPECT_LE(volevich_reconstruction_error(B, k, dk, xs, 60.0), 1e-8) << B;
    }
}

TEST(Volevich, TraceAgreesWithDirectSolver) {
    auto tg = std::make_shared<const TangentialGrid>(1, 32, 8.0);
    for (cplx lam : {cplx(2.0, 0.0), cplx(5.0, 3.0)}) {
        auto ng = std::make_shared<const NormalGrid>(64, 40.0, kDefaultMapLength);
        BoundaryField K(tg, 1, Space::Physical);
        for (std::size_t p = 0; p < tg->size(); ++p) K.at(p, 0) = std::exp(-tg->x(p)[0] * tg->x(p)[0]);
        const TraceAgreement a = volevich_trace_agreement(K, {}, {}, lam, ng);
        EXPECT_LE(a.velocity, 1e-6) << lam;
        EXPECT_LE(a.height, 1e-6) << lam;
    }
}

TEST(SemigroupCheck, ScalarDecayHasUnitConstant) {
    const Eigen::MatrixXcd gen = Eigen::MatrixXcd::Constant(1, 1, -1.0);
    const Eigen::VectorXcd U0 = Eigen::VectorXcd::Constant(1, 2.0);
    SemigroupNorms norms;
    norms.space = [](const Eigen::VectorXcd& v) { return v.norm(); };
    const auto t = log_time_grid(0.01, 5.0, 40);
    const SemigroupCheck c = semigroup_estimate_check(gen, U0, t, 0.0, norms);
    // (1 + t) e^{-t} peaks at t = 0 with value 1.
    for (std::size_t i = 0; i < t.size(); ++i) EXPECT_NEAR(c.ratios[i], (1.0 + t[i]) * std::exp(-t[i]), 1e-12);
    EXPECT_LE(c.cMeasured, 1.0);
    EXPECT_GT(c.cMeasured, 0.99);

    const SemigroupCheck z = semigroup_estimate_check(gen, Eigen::VectorXcd::Zero(1), t, 0.0, norms);
    EXPECT_EQ(z.cMeasured, 0.0);
    EXPECT_THROW(semigroup_estimate_check(gen, U0, t, 0.0, SemigroupNorms{}), ParameterError);
}
