#include "fslab/halfspace.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "fslab/errors.hpp"
#include "fslab/parallel.hpp"
#include "fslab/regions.hpp"

namespace fslab {

namespace {

using CMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>;
using CVector = Eigen::Matrix<cplx, Eigen::Dynamic, 1>;
using RowMajorC = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr cplx I(0.0, 1.0);

double step_g(double t) { return t > 0 ? std::exp(-1.0 / t) : 0.0; }
double step_dg(double t) { return t > 0 ? std::exp(-1.0 / t) / (t * t) : 0.0; }

SpectralPoint mode_point(const TangentialGrid& tg, std::size_t mode, cplx lambda) {
    SpectralPoint pt;
    pt.lambda = lambda;
    pt.dim = tg.dim();
    pt.xi = tg.xi(mode);
    return pt;
}

void require_region(cplx lambda, const FluidParams& params, const SectorSpec& spec) {
    validate(params);
    validate(spec);
    check_zeta_case(params, spec);
    if (!in_gamma_region(lambda, spec, params)) throw RegionError("lambda lies outside the resolvent region");
}

Eigen::Map<RowMajorC> mode_block(HalfSpaceField& f, std::size_t mode) {
    return Eigen::Map<RowMajorC>(f.data().data() + mode * f.nodes() * f.components(),
                                 static_cast<Eigen::Index>(f.nodes()), static_cast<Eigen::Index>(f.components()));
}

Eigen::Map<const RowMajorC> mode_block(const HalfSpaceField& f, std::size_t mode) {
    return Eigen::Map<const RowMajorC>(f.data().data() + mode * f.nodes() * f.components(),
                                       static_cast<Eigen::Index>(f.nodes()),
                                       static_cast<Eigen::Index>(f.components()));
}

// Values of a nodal vector at the points of a quadrature rule.
Eigen::MatrixXd interpolation_matrix(const NormalGrid& ng, const std::vector<double>& pts) {
    Eigen::MatrixXd P(static_cast<Eigen::Index>(pts.size()), static_cast<Eigen::Index>(ng.size()));
    for (std::size_t q = 0; q < pts.size(); ++q) P.row(static_cast<Eigen::Index>(q)) = ng.interpolation_row(pts[q]);
    return P;
}

}  // namespace

double cutoff(double s) {
    const double a = std::abs(s);
    if (a <= 1.0) return 1.0;
    if (a >= 2.0) return 0.0;
    const double p = step_g(2.0 - a);
    const double q = step_g(a - 1.0);
    return p / (p + q);
}

double cutoff_derivative(double s) {
    const double a = std::abs(s);
    if (a <= 1.0 || a >= 2.0) return 0.0;
    const double p = step_g(2.0 - a), dp = -step_dg(2.0 - a);
    const double q = step_g(a - 1.0), dq = step_dg(a - 1.0);
    const double d = (dp * q - p * dq) / ((p + q) * (p + q));
    return s < 0 ? -d : d;
}

SurfaceMode surface_mode(const SpectralPoint& pt, const SymbolParams& sp, double nFloor) {
    SurfaceMode s;
    s.point = pt;
    s.core = core_symbols(pt, sp);
    s.L = lopatinski(s.core, sp);
    s.n = multipliers(pt, s.core, s.L, sp, nFloor);
    s.weight = sp.m + s.core.r2;
    s.hOverK = s.L.detL / s.L.N;
    return s;
}

cplx SurfaceMode::u(std::size_t comp, double x, int order) const {
    const cplx A = core.A, B = core.B;
    const cplx E = std::exp(-B * x);
    const cplx M = eval_M(core, x);
    cplx Ed, Md;
    switch (order) {
        case 0: Ed = E; Md = M; break;
        case 1: Ed = -B * E; Md = -E - A * M; break;
        case 2: Ed = B * B * E; Md = (A + B) * E + A * A * M; break;
        default: throw ParameterError("surface mode derivatives are available up to order 2");
    }
    const std::size_t normal = static_cast<std::size_t>(point.dim);
    if (comp > normal) throw ShapeError("component index out of range");
    if (comp < normal) return weight * (n.n1[comp] * (B * Md - Ed) + n.n2[comp] * Ed);
    return weight * (n.n1[normal] * B * Md + n.n2[normal] * Ed);
}

double choose_truncation(const FluidParams& params, const SectorSpec& spec, cplx lambda, const TangentialGrid& tg) {
    double minA = HUGE_VAL;
    const SymbolParams sp = symbol_params(params, spec.zetaCase, lambda);
    for (std::size_t m = 0; m < tg.size(); ++m) minA = std::min(minA, core_symbols(mode_point(tg, m, lambda), sp).A.real());
    return std::max(20.0, -std::log(1e-12) / minA);
}

SurfaceSolution solve_surface_homogeneous(const BoundaryField& kIn, const FluidParams& params, const SectorSpec& spec,
                                          cplx lambda, const NormalGridPtr& normal, const SolverOptions& opts) {
    if (kIn.components() != 1) throw ShapeError("kinematic datum must have one component");
    require_region(lambda, params, spec);
    const BoundaryField k = to_spectral(kIn);
    const auto& tg = *k.tangential();
    const std::size_t nc = static_cast<std::size_t>(tg.dim()) + 1;
    SurfaceSolution out{HalfSpaceField(k.tangential(), normal, nc, Space::Spectral),
                        BoundaryField(k.tangential(), 1, Space::Spectral)};
    const SymbolParams sp = symbol_params(params, spec.zetaCase, lambda);
    const auto& xs = normal->nodes();
    parallel_for(tg.size(), [&](std::size_t m) {
        const cplx km = k.at(m, 0);
        const SurfaceMode s = surface_mode(mode_point(tg, m, lambda), sp, opts.nFloor);
        out.h.at(m, 0) = s.hOverK * km;
        for (std::size_t i = 0; i < xs.size(); ++i)
            for (std::size_t c = 0; c < nc; ++c) out.u.at(m, i, c) = s.u(c, xs[i]) * km;
    });
    return out;
}

VolevichSolution solve_surface_volevich(const HalfSpaceField& kIn, const FluidParams& params, const SectorSpec& spec,
                                        cplx lambda, const SolverOptions& opts) {
    if (kIn.components() != 1) throw ShapeError("kinematic datum must have one component");
    require_region(lambda, params, spec);
    const HalfSpaceField k = to_spectral(kIn);
    const auto& tg = *k.tangential();
    const auto& ng = *k.normal();
    const int dim = tg.dim();
    const std::size_t nc = static_cast<std::size_t>(dim) + 1;
    const std::size_t nn = ng.size();
    const HalfSpaceField dk = normal_derivative(k);

    const QuadratureRule rule = graded_gauss_legendre(ng.length(), opts.quadFirstPanel, opts.quadRatio);
    const Eigen::MatrixXd P = interpolation_matrix(ng, rule.x);
    const QuadratureRule hrule = graded_gauss_legendre(2.0, 2.0 / opts.cutoffPanels, 1.0);
    const Eigen::MatrixXd Ph = interpolation_matrix(ng, hrule.x);
    const std::size_t nq = rule.x.size();

    VolevichSolution out{HalfSpaceField(k.tangential(), k.normal(), nc, Space::Spectral),
                         HalfSpaceField(k.tangential(), k.normal(), 1, Space::Spectral)};
    const SymbolParams sp = symbol_params(params, spec.zetaCase, lambda);
    const double m0 = sp.m;
    const auto& xs = ng.nodes();

    parallel_for(tg.size(), [&](std::size_t mode) {
        const SurfaceMode s = surface_mode(mode_point(tg, mode, lambda), sp, opts.nFloor);
        const cplx A = s.core.A, B = s.core.B;
        const auto xi = tg.xi(mode);
        const double r = std::sqrt(s.core.r2);
        CVector kn(static_cast<Eigen::Index>(nn)), dkn(static_cast<Eigen::Index>(nn));
        for (std::size_t i = 0; i < nn; ++i) {
            kn(static_cast<Eigen::Index>(i)) = k.at(mode, i, 0);
            dkn(static_cast<Eigen::Index>(i)) = dk.at(mode, i, 0);
        }
        // Integrands: F1 = (m - Delta')k, F2 = d_N k, F3_l = i xi_l d_N k.
        const CVector F1 = (P.cast<cplx>() * kn) * s.weight;
        const CVector F2 = P.cast<cplx>() * dkn;
        std::array<CVector, 2> F3;
        for (int l = 0; l < dim; ++l) F3[static_cast<std::size_t>(l)] = I * xi[static_cast<std::size_t>(l)] * F2;

        for (std::size_t i = 0; i < nn; ++i) {
            std::vector<cplx> acc(nc, cplx(0.0, 0.0));
            for (std::size_t q = 0; q < nq; ++q) {
                const double z = xs[i] + rule.x[q];
                const double w = rule.w[q];
                const cplx E = std::exp(-B * z);
                const cplx BM = B * eval_M(s.core, z);
                const cplx f1 = F1(static_cast<Eigen::Index>(q)), f2 = F2(static_cast<Eigen::Index>(q));
                cplx f3dot = 0.0;  // sum_l (i xi_l) F3_l
                for (int l = 0; l < dim; ++l)
                    f3dot += I * xi[static_cast<std::size_t>(l)] * F3[static_cast<std::size_t>(l)](static_cast<Eigen::Index>(q));
                for (int j = 0; j < dim; ++j) {
                    const cplx n1 = s.n.n1[static_cast<std::size_t>(j)], n2 = s.n.n2[static_cast<std::size_t>(j)];
                    const cplx W1 = n1 * A * BM * f1 + n2 * B * E * f1;
                    const cplx W2 = -n1 * m0 * (BM - E) * f2 - n2 * m0 * E * f2;
                    const cplx W3 = n1 * (BM - E) * f3dot + n2 * E * f3dot;
                    acc[static_cast<std::size_t>(j)] += w * (W1 + W2 + W3);
                }
                const cplx n1 = s.n.n1[static_cast<std::size_t>(dim)], n2 = s.n.n2[static_cast<std::size_t>(dim)];
                const cplx W1 = (n1 + n2) * B * E * f1 + n1 * A * BM * f1;
                const cplx W2 = -n1 * m0 * BM * f2 - n2 * m0 * E * f2;
                const cplx W3 = n1 * BM * f3dot + n2 * E * f3dot;
                acc[static_cast<std::size_t>(dim)] += w * (W1 + W2 + W3);
            }
            for (std::size_t c = 0; c < nc; ++c) out.u.at(mode, i, c) = acc[c];
        }

        // Height: phi(x) (detL/N) [int r e^{-r(x+y)} phi k - int e^{-r(x+y)} d_N(phi k)].
        const CVector kh = Ph.cast<cplx>() * kn;
        const CVector dkh = Ph.cast<cplx>() * dkn;
        for (std::size_t i = 0; i < nn; ++i) {
            const double phx = cutoff(xs[i]);
            if (phx == 0.0) continue;
            cplx acc = 0.0;
            for (std::size_t q = 0; q < hrule.x.size(); ++q) {
                const double y = hrule.x[q];
                const double e = std::exp(-r * (xs[i] + y));
                const cplx kq = kh(static_cast<Eigen::Index>(q)), dkq = dkh(static_cast<Eigen::Index>(q));
                acc += hrule.w[q] * (r * e * cutoff(y) * kq - e * (cutoff_derivative(y) * kq + cutoff(y) * dkq));
            }
            out.hExt.at(mode, i, 0) = phx * s.hOverK * acc;
        }
    });
    return out;
}

HalfSpaceField extend_boundary(const BoundaryField& KIn, const NormalGridPtr& normal) {
    const BoundaryField K = to_spectral(KIn);
    HalfSpaceField out(K.tangential(), normal, K.components(), Space::Spectral);
    const auto& tg = *K.tangential();
    const auto& xs = normal->nodes();
    for (std::size_t m = 0; m < tg.size(); ++m) {
        const auto xi = tg.xi(m);
        const double rate = std::sqrt(1.0 + xi[0] * xi[0] + xi[1] * xi[1]);
        for (std::size_t i = 0; i < xs.size(); ++i)
            for (std::size_t c = 0; c < K.components(); ++c) out.at(m, i, c) = K.at(m, c) * std::exp(-rate * xs[i]);
    }
    return out;
}

HalfSpaceField height_extension(const BoundaryField& kIn, const FluidParams& params, const SectorSpec& spec,
                                cplx lambda, const NormalGridPtr& normal, const SolverOptions& opts) {
    require_region(lambda, params, spec);
    const BoundaryField k = to_spectral(kIn);
    const auto& tg = *k.tangential();
    HalfSpaceField out(k.tangential(), normal, 1, Space::Spectral);
    const SymbolParams sp = symbol_params(params, spec.zetaCase, lambda);
    const auto& xs = normal->nodes();
    parallel_for(tg.size(), [&](std::size_t m) {
        const SpectralPoint pt = mode_point(tg, m, lambda);
        const CoreSymbols c = core_symbols(pt, sp);
        const LopatinskiMatrix L = lopatinski(c, sp);
        if (std::abs(L.N) < opts.nFloor * n_scale(pt)) throw SingularityError("|N| below the certified floor");
        const cplx ratio = L.detL / L.N;
        const double r = std::sqrt(c.r2);
        for (std::size_t i = 0; i < xs.size(); ++i)
            out.at(m, i, 0) = cutoff(xs[i]) * ratio * std::exp(-r * xs[i]) * k.at(m, 0);
    });
    return out;
}

HalfSpaceField normal_derivative(const HalfSpaceField& f, int order) {
    if (order < 1 || order > 2) throw ParameterError("normal derivative order must be 1 or 2");
    HalfSpaceField out = f.zeros_like(f.components());
    const Eigen::MatrixXcd D = (order == 1 ? f.normal()->D() : f.normal()->D2()).cast<cplx>();
    for (std::size_t m = 0; m < f.modes(); ++m) mode_block(out, m) = D * mode_block(f, m);
    return out;
}

HalfSpaceField divergence(const HalfSpaceField& u) {
    if (u.space() != Space::Spectral) throw ShapeError("divergence expects a spectral field");
    const auto& tg = *u.tangential();
    const std::size_t dim = static_cast<std::size_t>(tg.dim());
    if (u.components() != dim + 1) throw ShapeError("divergence needs dim + 1 components");
    HalfSpaceField out = u.zeros_like(1);
    const HalfSpaceField du = normal_derivative(u);
    for (std::size_t m = 0; m < u.modes(); ++m) {
        const auto xi = tg.xi(m);
        for (std::size_t i = 0; i < u.nodes(); ++i) {
            cplx s = du.at(m, i, dim);
            for (std::size_t l = 0; l < dim; ++l) s += I * xi[l] * u.at(m, i, l);
            out.at(m, i, 0) = s;
        }
    }
    return out;
}

HalfSpaceField solve_lame_bvp(const HalfSpaceField& FIn, const BoundaryField& GIn, const FluidParams& params,
                              const SectorSpec& spec, cplx lambda) {
    require_region(lambda, params, spec);
    const HalfSpaceField F = to_spectral(FIn);
    const BoundaryField G = to_spectral(GIn);
    const auto& tg = *F.tangential();
    const std::size_t dim = static_cast<std::size_t>(tg.dim());
    const std::size_t nc = dim + 1;
    if (F.components() != nc || G.components() != nc) throw ShapeError("Lame data need dim + 1 components");
    if (G.tangential()->size() != tg.size()) throw ShapeError("boundary and volume grids differ");
    const auto& ng = *F.normal();
    const std::size_t n = ng.size();
    const Eigen::MatrixXd& D = ng.D();
    const Eigen::MatrixXd& D2 = ng.D2();
    const SymbolParams sp = symbol_params(params, spec.zetaCase, lambda);
    const double alpha = sp.alpha;
    const cplx grad = alpha + sp.beta + sp.zeta;  // coefficient of grad div
    const cplx bz = sp.beta + sp.zeta;

    HalfSpaceField v = F.zeros_like(nc);
    parallel_for(tg.size(), [&](std::size_t mode) {
        const auto xiArr = tg.xi(mode);
        std::array<cplx, 2> ix{I * xiArr[0], I * xiArr[1]};
        const double r2 = xiArr[0] * xiArr[0] + (dim == 2 ? xiArr[1] * xiArr[1] : 0.0);
        const cplx diag = lambda + alpha * r2;
        const auto sz = static_cast<Eigen::Index>(nc * n);
        CMatrix Mx = CMatrix::Zero(sz, sz);
        CVector rhs = CVector::Zero(sz);
        auto id = [&](std::size_t c, std::size_t i) { return static_cast<Eigen::Index>(c * n + i); };
        auto Dij = [&](std::size_t i, std::size_t k) { return D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)); };
        auto D2ij = [&](std::size_t i, std::size_t k) {
            return D2(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
        };
        for (std::size_t i = 1; i + 1 < n; ++i) {
            for (std::size_t j = 0; j < dim; ++j) {
                const auto row = id(j, i);
                Mx(row, id(j, i)) += diag;
                for (std::size_t k = 0; k < n; ++k) {
                    Mx(row, id(j, k)) -= alpha * D2ij(i, k);
                    Mx(row, id(dim, k)) -= grad * ix[j] * Dij(i, k);
                }
                for (std::size_t l = 0; l < dim; ++l) Mx(row, id(l, i)) -= grad * ix[j] * ix[l];
                rhs(row) = F.at(mode, i, j);
            }
            const auto row = id(dim, i);
            Mx(row, id(dim, i)) += diag;
            for (std::size_t k = 0; k < n; ++k) {
                Mx(row, id(dim, k)) -= (alpha + grad) * D2ij(i, k);
                for (std::size_t l = 0; l < dim; ++l) Mx(row, id(l, k)) -= grad * ix[l] * Dij(i, k);
            }
            rhs(row) = F.at(mode, i, dim);
        }
        // Traction rows at x_N = 0.
        for (std::size_t j = 0; j < dim; ++j) {
            const auto row = id(j, 0);
            for (std::size_t k = 0; k < n; ++k) Mx(row, id(j, k)) += alpha * Dij(0, k);
            Mx(row, id(dim, 0)) += alpha * ix[j];
            rhs(row) = -G.at(mode, j);
        }
        {
            const auto row = id(dim, 0);
            for (std::size_t k = 0; k < n; ++k) Mx(row, id(dim, k)) += (2.0 * alpha + bz) * Dij(0, k);
            for (std::size_t l = 0; l < dim; ++l) Mx(row, id(l, 0)) += bz * ix[l];
            rhs(row) = -G.at(mode, dim);
        }
        // Decay closure at x_N = X.
        for (std::size_t c = 0; c < nc; ++c) Mx(id(c, n - 1), id(c, n - 1)) = 1.0;

        // Row equilibration; the D2 rows are orders of magnitude larger than the boundary rows.
        for (Eigen::Index r = 0; r < sz; ++r) {
            const double s = 1.0 / Mx.row(r).cwiseAbs().maxCoeff();
            Mx.row(r) *= s;
            rhs(r) *= s;
        }
        Eigen::PartialPivLU<CMatrix> lu(Mx);
        if (!(lu.rcond() > 1e-15)) throw SingularityError("collocation matrix is numerically singular");
        CVector sol = lu.solve(rhs);
        sol += lu.solve(rhs - Mx * sol);
        for (std::size_t c = 0; c < nc; ++c)
            for (std::size_t i = 0; i < n; ++i) v.at(mode, i, c) = sol(id(c, i));
    });
    return v;
}

ResolventSolution solve_full_resolvent(const ResolventData& data, const FluidParams& params, const SectorSpec& spec,
                                       cplx lambda, const SolverOptions& opts) {
    require_region(lambda, params, spec);
    const HalfSpaceField d = to_spectral(data.d);
    const HalfSpaceField F = to_spectral(data.F);
    const BoundaryField G = to_spectral(data.G);
    const BoundaryField K = to_spectral(data.K);
    const auto& tg = *F.tangential();
    const std::size_t dim = static_cast<std::size_t>(tg.dim());
    const std::size_t nc = dim + 1;
    if (d.components() != 1 || K.components() != 1 || F.components() != nc || G.components() != nc)
        throw ShapeError("resolvent data have the wrong component counts");
    if (!d.same_shape(F.zeros_like(1))) throw ShapeError("density and force grids differ");

    const double g1 = params.gamma1;
    const cplx g2 = pressure_coupling(params, spec.zetaCase, lambda);

    // Density elimination: f = F/g1 - grad(g2 d)/(g1 lambda), g = G + g2 d n0 / lambda.
    HalfSpaceField f = F;
    const HalfSpaceField dd = normal_derivative(d);
    for (std::size_t m = 0; m < tg.size(); ++m) {
        const auto xi = tg.xi(m);
        for (std::size_t i = 0; i < F.nodes(); ++i) {
            for (std::size_t j = 0; j < dim; ++j)
                f.at(m, i, j) = F.at(m, i, j) / g1 - g2 * I * xi[j] * d.at(m, i, 0) / (g1 * lambda);
            f.at(m, i, dim) = F.at(m, i, dim) / g1 - g2 * dd.at(m, i, 0) / (g1 * lambda);
        }
    }
    BoundaryField Gp = G;
    for (std::size_t m = 0; m < tg.size(); ++m) {
        Gp.at(m, dim) -= g2 * d.at(m, 0, 0) / lambda;
        for (std::size_t c = 0; c < nc; ++c) Gp.at(m, c) /= g1;
    }

    const HalfSpaceField v = solve_lame_bvp(f, Gp, params, spec, lambda);
    BoundaryField k = K;
    for (std::size_t m = 0; m < tg.size(); ++m) k.at(m, 0) -= v.at(m, 0, dim);
    SurfaceSolution w = solve_surface_homogeneous(k, params, spec, lambda, F.normal(), opts);

    ResolventSolution sol;
    sol.u = v;
    sol.u += w.u;
    sol.h = w.h;
    sol.hExt = height_extension(k, params, spec, lambda, F.normal(), opts);
    const HalfSpaceField div = divergence(sol.u);
    sol.eta = d;
    for (std::size_t idx = 0; idx < sol.eta.data().size(); ++idx)
        sol.eta.data()[idx] = (d.data()[idx] - g1 * div.data()[idx]) / lambda;

    if (data.F.space() == Space::Physical) {
        sol.eta = to_physical(sol.eta);
        sol.u = to_physical(sol.u);
        sol.h = to_physical(sol.h);
        sol.hExt = to_physical(sol.hExt);
    }
    return sol;
}

BoundaryField laplace_beltrami_resolvent_flat(const BoundaryField& fIn, cplx lambda) {
    if (lambda.imag() == 0.0 && lambda.real() <= 0.0) throw ParameterError("lambda must avoid (-inf, 0]");
    BoundaryField f = to_spectral(fIn);
    const auto& tg = *f.tangential();
    for (std::size_t m = 0; m < tg.size(); ++m) {
        const auto xi = tg.xi(m);
        const cplx denom = lambda + xi[0] * xi[0] + xi[1] * xi[1];
        if (std::abs(denom) < 1e-14) throw SingularityError("lambda + |xi'|^2 vanishes on a mode");
        for (std::size_t c = 0; c < f.components(); ++c) f.at(m, c) /= denom;
    }
    return fIn.space() == Space::Physical ? to_physical(f) : f;
}

}  // namespace fslab
