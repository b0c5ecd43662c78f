#include <benchmark/benchmark.h>

#include <cmath>

#include "fslab/bent.hpp"
#include "fslab/evolution.hpp"
#include "fslab/halfspace.hpp"
#include "fslab/symbols.hpp"

using namespace fslab;

namespace {

void BM_LopatinskiEval(benchmark::State& state) {
    const SymbolParams sp = symbol_params(FluidParams{}, ZetaCase::C3, cplx(3.0, 2.0));
    SpectralPoint pt;
    pt.lambda = cplx(3.0, 2.0);
    double xi = 0.1;
    for (auto _ : state) {
        pt.xi[0] = xi;
        const LopatinskiMatrix L = lopatinski(core_symbols(pt, sp), sp);
        benchmark::DoNotOptimize(L.N);
        xi = xi < 100.0 ? xi * 1.01 : 0.1;
    }
}
BENCHMARK(BM_LopatinskiEval);

ResolventData gaussian_data(const TangentialGridPtr& tg, const NormalGridPtr& ng) {
    ResolventData D{HalfSpaceField(tg, ng, 1, Space::Physical), HalfSpaceField(tg, ng, 2, Space::Physical),
                    BoundaryField(tg, 2, Space::Physical), BoundaryField(tg, 1, Space::Physical)};
    for (std::size_t p = 0; p < tg->size(); ++p) {
        const double x = tg->x(p)[0];
        for (std::size_t i = 0; i < ng->size(); ++i) {
            const double e = std::exp(-x * x - (ng->nodes()[i] - 1.0) * (ng->nodes()[i] - 1.0));
            D.d.at(p, i, 0) = e;
            D.F.at(p, i, 0) = 0.5 * e;
            D.F.at(p, i, 1) = -0.3 * e;
        }
        D.G.at(p, 0) = std::exp(-x * x);
        D.G.at(p, 1) = 0.4 * std::exp(-x * x);
        D.K.at(p, 0) = std::exp(-2.0 * x * x);
    }
    return D;
}

void BM_FullResolventSolve(benchmark::State& state) {
    const cplx lam(4.0, 1.0);
    const auto n = static_cast<std::size_t>(state.range(0));
    auto tg = std::make_shared<const TangentialGrid>(1, 64, 10.0);
    auto ng = std::make_shared<const NormalGrid>(n, choose_truncation({}, {}, lam, *tg), kDefaultMapLength);
    const ResolventData D = gaussian_data(tg, ng);
    for (auto _ : state) {
        const ResolventSolution s = solve_full_resolvent(D, {}, {}, lam);
        benchmark::DoNotOptimize(s.h.data().data());
    }
}
BENCHMARK(BM_FullResolventSolve)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_ContourPropagation(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    auto ng = std::make_shared<const NormalGrid>(n, 20.0, kDefaultMapLength);
    const PerModeGenerator gen = build_generator({1.0, 0.0}, 1, FluidParams{}, ng);
    Eigen::VectorXcd U0 = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(gen.size()));
    U0(0) = 1.0;
    ContourSpec contour;
    for (auto _ : state) {
        const Eigen::VectorXcd U = propagate_contour(gen, U0, 1.0, contour);
        benchmark::DoNotOptimize(U.data());
    }
}
BENCHMARK(BM_ContourPropagation)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_NeumannIteration(benchmark::State& state) {
    const cplx lam(16.0, 0.0);
    auto tg = std::make_shared<const TangentialGrid>(1, 64, 10.0);
    auto ng = std::make_shared<const NormalGrid>(64, choose_truncation({}, {}, lam, *tg), kDefaultMapLength);
    CurvedDataFunctions data;
    data.f = [](const Vec2& x) { return Vec2(std::exp(-x.squaredNorm()), 0.0); };
    data.g = [](const Vec2& x) { return Vec2(0.0, std::exp(-x(0) * x(0))); };
    data.k = [](const Vec2& x) { return std::exp(-2.0 * x(0) * x(0)); };
    const DiffeoSpec d{0.05, 1.0};
    const BentData Z = pullback_data(data, d, tg, ng);
    for (auto _ : state) {
        const BentSolution s = neumann_solve(Z, d, {}, {}, lam);
        benchmark::DoNotOptimize(s.residual);
    }
}
BENCHMARK(BM_NeumannIteration)->Unit(benchmark::kMillisecond)->Iterations(2);

}  // namespace

BENCHMARK_MAIN();
