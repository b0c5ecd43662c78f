#include "fslab/bent.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "fslab/errors.hpp"
#include "fslab/random.hpp"
#include "fslab/verification.hpp"

namespace fslab {

namespace {

constexpr cplx I(0.0, 1.0);
using CMat2 = Eigen::Matrix2cd;
using CVec2 = Eigen::Vector2cd;

// Tangential derivative of a physical field, spectrally.
HalfSpaceField d_tangential(const HalfSpaceField& f) {
    HalfSpaceField s = to_spectral(f);
    const auto& tg = *f.tangential();
    const std::size_t per = s.nodes() * s.components();
    for (std::size_t m = 0; m < s.modes(); ++m) {
        const cplx k = I * tg.xi(m)[0];
        for (std::size_t e = 0; e < per; ++e) s.data()[m * per + e] *= k;
    }
    return to_physical(s);
}

BoundaryField d_tangential(const BoundaryField& f, int order) {
    BoundaryField s = to_spectral(f);
    const auto& tg = *f.tangential();
    for (std::size_t m = 0; m < s.modes(); ++m) {
        const cplx k = std::pow(I * tg.xi(m)[0], order);
        for (std::size_t c = 0; c < s.components(); ++c) s.at(m, c) *= k;
    }
    return to_physical(s);
}

CMat2 velocity_gradient(const HalfSpaceField& dt, const HalfSpaceField& dn, std::size_t p, std::size_t i) {
    CMat2 G;
    for (int j = 0; j < 2; ++j) {
        G(0, j) = dt.at(p, i, static_cast<std::size_t>(j));
        G(1, j) = dn.at(p, i, static_cast<std::size_t>(j));
    }
    return G;
}

// S(v) + zeta gamma3 div v I from grad v^T.
CMat2 stress(const CMat2& G, const FluidParams& p, cplx zg3) {
    CMat2 S = p.mu * (G + G.transpose());
    S.diagonal().array() += (p.nu - p.mu + zg3) * G.trace();
    return S;
}

cplx zeta_gamma3(const FluidParams& p, const SectorSpec& spec, cplx lambda) {
    return effective_zeta(p, spec.zetaCase, lambda) * p.gamma3;
}

void require_physical(const BentData& Z) {
    if (Z.F.components() != 2 || Z.G.components() != 2 || Z.K.components() != 1)
        throw ShapeError("bent data need 2, 2 and 1 components");
    if (Z.F.tangential()->dim() != 1) throw ShapeError("the bent module is two-dimensional");
}

}  // namespace

void DiffeoSpec::validate() const {
    if (!(width > 0) || !std::isfinite(width)) throw ParameterError("bump width must be positive");
    if (!std::isfinite(amplitude)) throw ParameterError("bump amplitude must be finite");
}

double DiffeoSpec::height(double s, int order) const {
    const double w2 = width * width;
    const double e = amplitude * std::exp(-s * s / w2);
    switch (order) {
        case 0: return e;
        case 1: return -2.0 * s / w2 * e;
        case 2: return (4.0 * s * s / (w2 * w2) - 2.0 / w2) * e;
        case 3: return (-8.0 * s * s * s / (w2 * w2 * w2) + 12.0 * s / (w2 * w2)) * e;
        default: throw ParameterError("height derivative order must be 0..3");
    }
}

Vec2 DiffeoSpec::map(const Vec2& xi) const { return {xi(0), xi(1) + height(xi(0))}; }
Vec2 DiffeoSpec::inverse(const Vec2& x) const { return {x(0), x(1) - height(x(0))}; }

Mat2 DiffeoSpec::B(double xi1) const {
    Mat2 b = Mat2::Zero();
    b(0, 1) = height(xi1, 1);
    return b;
}

Mat2 DiffeoSpec::Bminus(double xi1) const {
    Mat2 b = Mat2::Zero();
    b(0, 1) = -height(xi1, 1);
    return b;
}

DiffeoSpec::Bounds DiffeoSpec::bounds(double halfLength) const {
    validate();
    Bounds b;
    const int n = 8001;
    for (int i = 0; i < n; ++i) {
        const double s = -halfLength + 2.0 * halfLength * i / (n - 1);
        b.M1 = std::max({b.M1, B(s).norm(), Bminus(s).norm()});
        b.M2 = std::max(b.M2, std::abs(height(s, 2)));
        b.M3 = std::max(b.M3, std::abs(height(s, 3)));
    }
    return b;
}

SurfaceGeometry build_geometry(const DiffeoSpec& spec, const TangentialGridPtr& grid) {
    spec.validate();
    if (!grid || grid->dim() != 1) throw ShapeError("bent geometry needs a one-dimensional tangential grid");
    if (spec.bounds(grid->half_length()).M1 >= 1.0) throw ParameterError("bump too steep: sup |B| >= 1");
    SurfaceGeometry geo;
    geo.grid = grid;
    const Vec2 n0(0.0, -1.0);
    for (std::size_t p = 0; p < grid->size(); ++p) {
        const double s = grid->x(p)[0];
        const double h1 = spec.height(s, 1), h2 = spec.height(s, 2);
        const Vec2 tau(1.0, h1), tau2(0.0, h2);
        const double g = tau.dot(tau);
        geo.g.push_back(g);
        geo.gInv.push_back(1.0 / g);
        geo.det.push_back(g);
        geo.christoffel.push_back(tau2.dot(tau) / g);
        const Mat2 A = spec.inverse_jacobian(s);
        const Vec2 An0 = A * n0;
        geo.stretch.push_back(An0.norm());
        geo.normal.push_back(An0 / An0.norm());
        geo.jacobian.push_back(A);
        // Only the xi_1 derivative is nonzero; (Div A)_j = d_1 A_j1.
        Mat2 dA = Mat2::Zero();
        dA(0, 1) = -h2;
        geo.jacobianDiv.push_back(Vec2(dA(0, 0), dA(1, 0)));
    }
    return geo;
}

BentData pullback_data(const CurvedDataFunctions& data, const DiffeoSpec& spec, const TangentialGridPtr& tg,
                       const NormalGridPtr& ng) {
    spec.validate();
    if (!data.f || !data.g || !data.k) throw ParameterError("curved data functions must all be set");
    BentData Z{HalfSpaceField(tg, ng, 2, Space::Physical), BoundaryField(tg, 2, Space::Physical),
               BoundaryField(tg, 1, Space::Physical)};
    const Mat2 AmT = spec.Aminus().transpose();
    for (std::size_t p = 0; p < tg->size(); ++p) {
        const double s = tg->x(p)[0];
        for (std::size_t i = 0; i < ng->size(); ++i) {
            const Vec2 F = AmT * data.f(spec.map(Vec2(s, ng->nodes()[i])));
            Z.F.at(p, i, 0) = F(0);
            Z.F.at(p, i, 1) = F(1);
        }
        const Vec2 x = spec.map(Vec2(s, 0.0));
        const double stretch = (spec.inverse_jacobian(s) * Vec2(0.0, -1.0)).norm();
        const Vec2 G = stretch * (AmT * data.g(x));
        Z.G.at(p, 0) = G(0);
        Z.G.at(p, 1) = G(1);
        Z.K.at(p, 0) = data.k(x);
    }
    return Z;
}

BentData pullback_data(const CurvedDataSamples& data, const DiffeoSpec& spec, const NormalGridPtr& ng) {
    spec.validate();
    const auto& tg = data.f.tangential();
    if (data.f.components() != 2 || data.g.components() != 2 || data.k.components() != 1)
        throw ShapeError("curved data need 2, 2 and 1 components");
    const HalfSpaceField f = to_physical(data.f);
    const BoundaryField g = to_physical(data.g), k = to_physical(data.k);
    const auto& src = *f.normal();
    BentData Z{HalfSpaceField(tg, ng, 2, Space::Physical), BoundaryField(tg, 2, Space::Physical),
               BoundaryField(tg, 1, Space::Physical)};
    const Mat2 AmT = spec.Aminus().transpose();
    for (std::size_t p = 0; p < tg->size(); ++p) {
        const double s = tg->x(p)[0];
        for (std::size_t i = 0; i < ng->size(); ++i) {
            const Eigen::RowVectorXd row = src.interpolation_row(ng->nodes()[i] + spec.height(s));
            CVec2 v = CVec2::Zero();
            for (std::size_t j = 0; j < src.size(); ++j)
                for (int c = 0; c < 2; ++c) v(c) += row(static_cast<Eigen::Index>(j)) * f.at(p, j, static_cast<std::size_t>(c));
            const CVec2 F = AmT.cast<cplx>() * v;
            Z.F.at(p, i, 0) = F(0);
            Z.F.at(p, i, 1) = F(1);
        }
        const double stretch = (spec.inverse_jacobian(s) * Vec2(0.0, -1.0)).norm();
        const CVec2 G = stretch * (AmT.cast<cplx>() * CVec2(g.at(p, 0), g.at(p, 1)));
        Z.G.at(p, 0) = G(0);
        Z.G.at(p, 1) = G(1);
        Z.K.at(p, 0) = k.at(p, 0);
    }
    return Z;
}

BentData apply_perturbation(const HalfSpaceField& wIn, const BoundaryField& HIn, const SurfaceGeometry& geo,
                            const FluidParams& params, const SectorSpec& spec, cplx lambda) {
    const HalfSpaceField w = to_physical(wIn);
    const BoundaryField H = to_physical(HIn);
    if (w.components() != 2 || H.components() != 1) throw ShapeError("iterate needs 2 velocity components and 1 height");
    if (geo.g.size() != w.modes()) throw ShapeError("geometry and iterate grids differ");
    const cplx zg3 = zeta_gamma3(params, spec, lambda);
    const HalfSpaceField dt = d_tangential(w), dn = normal_derivative(w);
    const std::size_t P = w.modes(), n = w.nodes();
    const CMat2 Am = Mat2::Identity().cast<cplx>();

    // F(w) = F0(w) A_Phi - A_-(S(w) + zeta gamma3 div w I), stored row-major in 4 components.
    HalfSpaceField Fw = w.zeros_like(4);
    HalfSpaceField TdivA = w.zeros_like(2);
    for (std::size_t p = 0; p < P; ++p) {
        const CMat2 A = geo.jacobian[p].cast<cplx>();
        const CVec2 divA = geo.jacobianDiv[p].cast<cplx>();
        for (std::size_t i = 0; i < n; ++i) {
            const CMat2 G = velocity_gradient(dt, dn, p, i);
            const CMat2 T = stress(A * G * Am.transpose(), params, zg3);
            const CMat2 M = T * A - Am * stress(G, params, zg3);
            for (int r = 0; r < 2; ++r) {
                for (int c = 0; c < 2; ++c) Fw.at(p, i, static_cast<std::size_t>(2 * r + c)) = M(r, c);
                TdivA.at(p, i, static_cast<std::size_t>(r)) = (T * divA)(r);
            }
        }
    }
    const HalfSpaceField Ft = d_tangential(Fw), Fn = normal_derivative(Fw);

    BentData R{w.zeros_like(2), BoundaryField(w.tangential(), 2, Space::Physical),
               BoundaryField(w.tangential(), 1, Space::Physical)};
    for (std::size_t p = 0; p < P; ++p)
        for (std::size_t i = 0; i < n; ++i) {
            CVec2 div;
            for (int r = 0; r < 2; ++r)
                div(r) = Ft.at(p, i, static_cast<std::size_t>(2 * r)) + Fn.at(p, i, static_cast<std::size_t>(2 * r + 1)) -
                         TdivA.at(p, i, static_cast<std::size_t>(r));
            const CVec2 F1 = -(Am.transpose() * div) / params.gamma1;
            R.F.at(p, i, 0) = F1(0);
            R.F.at(p, i, 1) = F1(1);
        }

    const BoundaryField H1 = d_tangential(H, 1), H2 = d_tangential(H, 2);
    const CVec2 n0(0.0, -1.0);
    for (std::size_t p = 0; p < P; ++p) {
        const CMat2 A = geo.jacobian[p].cast<cplx>();
        const CMat2 G = velocity_gradient(dt, dn, p, 0);
        const CMat2 T = stress(A * G * Am.transpose(), params, zg3);
        const cplx h = H.at(p, 0);
        const cplx lapGamma = geo.gInv[p] * H2.at(p, 0) - geo.gInv[p] * geo.christoffel[p] * H1.at(p, 0);
        const CVec2 An0 = A * n0;
        const CVec2 curved = Am.transpose() * (T * An0 + params.sigma * (params.m * h - lapGamma) * An0);
        const CVec2 flat = stress(G, params, zg3) * n0 + params.sigma * (params.m * h - H2.at(p, 0)) * n0;
        const CVec2 F2 = curved - flat;
        R.G.at(p, 0) = F2(0);
        R.G.at(p, 1) = F2(1);
        const CVec2 wb(w.at(p, 0, 0), w.at(p, 0, 1));
        R.K.at(p, 0) = n0.dot(wb) - An0.dot(Am * wb) / geo.stretch[p];  // dot() conjugates its left side
    }
    return R;
}

std::pair<HalfSpaceField, BoundaryField> flat_solve(const BentData& Z, const FluidParams& params,
                                                    const SectorSpec& spec, cplx lambda) {
    require_physical(Z);
    ResolventData data{to_physical(Z.F).zeros_like(1), to_physical(Z.F), to_physical(Z.G), to_physical(Z.K)};
    data.F *= params.gamma1;
    ResolventSolution sol = solve_full_resolvent(data, params, spec, lambda);
    return {std::move(sol.u), std::move(sol.h)};
}

double bent_data_norm(const BentData& Z, cplx lambda) {
    NormSpec l2, h1, h2;
    h1.order = 1;
    h2.order = 2;
    const auto& ng = Z.F.normal();
    const HalfSpaceField Gx = extend_boundary(Z.G, ng), Kx = extend_boundary(Z.K, ng);
    return discrete_norm(Z.F, l2) + std::sqrt(std::abs(lambda)) * discrete_norm(Gx, l2) + discrete_norm(Gx, h1) +
           discrete_norm(Kx, h2);
}

namespace {

BentData difference(const BentData& a, const BentData& b) {
    BentData d{to_physical(a.F), to_physical(a.G), to_physical(a.K)};
    const HalfSpaceField bF = to_physical(b.F);
    const BoundaryField bG = to_physical(b.G), bK = to_physical(b.K);
    for (std::size_t e = 0; e < d.F.data().size(); ++e) d.F.data()[e] -= bF.data()[e];
    for (std::size_t e = 0; e < d.G.data().size(); ++e) d.G.data()[e] -= bG.data()[e];
    for (std::size_t e = 0; e < d.K.data().size(); ++e) d.K.data()[e] -= bK.data()[e];
    return d;
}

// Relative L2 residual accumulator, as in the flat residual check.
struct Row {
    double res = 0.0, scale = 0.0;
    void add(double w, cplx r, std::initializer_list<cplx> terms) {
        res += w * std::norm(r);
        double t = 0.0;
        for (cplx x : terms) t = std::max(t, std::norm(x));
        scale += w * t;
    }
    double relative() const { return scale > 0 ? std::sqrt(res / scale) : std::sqrt(res); }
};

}  // namespace

double curved_residual(const HalfSpaceField& wIn, const BoundaryField& HIn, const BentData& Z,
                       const SurfaceGeometry& geo, const FluidParams& params, const SectorSpec& spec,
                       cplx lambda) {
    const HalfSpaceField w = to_physical(wIn);
    const BoundaryField H = to_physical(HIn);
    const HalfSpaceField F = to_physical(Z.F);
    const BoundaryField G = to_physical(Z.G), K = to_physical(Z.K);
    const cplx zg3 = zeta_gamma3(params, spec, lambda);
    const HalfSpaceField dt = d_tangential(w), dn = normal_derivative(w);
    const std::size_t P = w.modes(), n = w.nodes();
    const CMat2 Am = Mat2::Identity().cast<cplx>();

    // Physical stress at the mapped nodes, then Div_x T = sum_jk A_jk d_k T_rj.
    HalfSpaceField T = w.zeros_like(4);
    for (std::size_t p = 0; p < P; ++p) {
        const CMat2 A = geo.jacobian[p].cast<cplx>();
        for (std::size_t i = 0; i < n; ++i) {
            const CMat2 S = stress(A * velocity_gradient(dt, dn, p, i) * Am.transpose(), params, zg3);
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c) T.at(p, i, static_cast<std::size_t>(2 * r + c)) = S(r, c);
        }
    }
    const HalfSpaceField Tt = d_tangential(T), Tn = normal_derivative(T);
    const double dx = w.tangential()->dx();
    const auto& wq = w.normal()->weights();

    Row momentum, stressRow, kinematic;
    for (std::size_t p = 0; p < P; ++p) {
        const CMat2 A = geo.jacobian[p].cast<cplx>();
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const CVec2 v = Am * CVec2(w.at(p, i, 0), w.at(p, i, 1));
            const CVec2 f = Am * CVec2(F.at(p, i, 0), F.at(p, i, 1));
            CVec2 div = CVec2::Zero();
            for (int r = 0; r < 2; ++r)
                for (int j = 0; j < 2; ++j) {
                    const auto e = static_cast<std::size_t>(2 * r + j);
                    div(r) += A(j, 0) * Tt.at(p, i, e) + A(j, 1) * Tn.at(p, i, e);
                }
            for (int r = 0; r < 2; ++r)
                momentum.add(dx * wq[i], lambda * v(r) - div(r) / params.gamma1 - f(r),
                             {lambda * v(r), div(r) / params.gamma1, f(r)});
        }
    }
    const BoundaryField H1 = d_tangential(H, 1), H2 = d_tangential(H, 2);
    for (std::size_t p = 0; p < P; ++p) {
        const CVec2 nplus = geo.normal[p].cast<cplx>();
        CMat2 S;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) S(r, c) = T.at(p, 0, static_cast<std::size_t>(2 * r + c));
        const cplx h = H.at(p, 0);
        const cplx lapGamma = geo.gInv[p] * H2.at(p, 0) - geo.gInv[p] * geo.christoffel[p] * H1.at(p, 0);
        const CVec2 g = Am * CVec2(G.at(p, 0), G.at(p, 1)) / geo.stretch[p];
        const CVec2 Sn = S * nplus;
        const CVec2 surf = params.sigma * (params.m * h - lapGamma) * nplus;
        for (int r = 0; r < 2; ++r) stressRow.add(dx, Sn(r) + surf(r) - g(r), {Sn(r), surf(r), g(r)});
        const CVec2 v = Am * CVec2(w.at(p, 0, 0), w.at(p, 0, 1));
        const cplx vn = v(0) * nplus(0) + v(1) * nplus(1);
        kinematic.add(dx, lambda * h - vn - K.at(p, 0), {lambda * h, vn, K.at(p, 0)});
    }
    return std::max({momentum.relative(), stressRow.relative(), kinematic.relative()});
}

BentSolution neumann_solve(const BentData& Z0In, const DiffeoSpec& diffeo, const FluidParams& params,
                           const SectorSpec& spec, cplx lambda, const NeumannOptions& opts) {
    require_physical(Z0In);
    if (opts.maxIter < 1 || !(opts.tol > 0)) throw ParameterError("Neumann iteration needs maxIter >= 1 and tol > 0");
    const BentData Z0{to_physical(Z0In.F), to_physical(Z0In.G), to_physical(Z0In.K)};
    const SurfaceGeometry geo = build_geometry(diffeo, Z0.F.tangential());
    const double z0 = bent_data_norm(Z0, lambda);
    BentSolution out;
    BentData Z = Z0;
    int above = 0;
    for (int it = 1; it <= opts.maxIter; ++it) {
        const auto [w, H] = flat_solve(Z, params, spec, lambda);
        const BentData R = apply_perturbation(w, H, geo, params, spec, lambda);
        BentData next = difference(Z0, R);
        const double upd = bent_data_norm(difference(next, Z), lambda);
        auto& st = out.state;
        if (!st.updateNorms.empty()) {
            const double prev = st.updateNorms.back();
            const double ratio = prev > 0 ? upd / prev : 0.0;
            st.ratios.push_back(ratio);
            above = ratio >= 1.0 ? above + 1 : 0;
        }
        st.updateNorms.push_back(upd);
        st.iterations = static_cast<std::size_t>(it);
        Z = std::move(next);
        if (upd <= opts.tol * z0) {
            st.converged = true;
            break;
        }
        if (above >= 3)
            throw DivergenceError("Neumann iteration is not contracting (ratio " + std::to_string(st.ratios.back()) + ")");
    }
    auto [w, H] = flat_solve(Z, params, spec, lambda);
    out.residual = curved_residual(w, H, Z0, geo, params, spec, lambda);
    out.w = std::move(w);
    out.H = std::move(H);
    return out;
}

PushedForward push_forward(const HalfSpaceField& wIn, const BoundaryField& HIn, const DiffeoSpec& spec,
                           const NormalGridPtr& phys) {
    const HalfSpaceField w = to_physical(wIn);
    const auto& tg = w.tangential();
    const auto& src = *w.normal();
    PushedForward out{HalfSpaceField(tg, phys, 2, Space::Physical), {}, to_physical(HIn)};
    out.inside.assign(tg->size() * phys->size(), false);
    const CMat2 Am = spec.Aminus().cast<cplx>();
    for (std::size_t p = 0; p < tg->size(); ++p) {
        const double s = tg->x(p)[0];
        for (std::size_t j = 0; j < phys->size(); ++j) {
            const double xi2 = phys->nodes()[j] - spec.height(s);
            if (xi2 < 0.0 || xi2 > src.length()) continue;
            const Eigen::RowVectorXd row = src.interpolation_row(xi2);
            CVec2 v = CVec2::Zero();
            for (std::size_t i = 0; i < src.size(); ++i)
                for (int c = 0; c < 2; ++c) v(c) += row(static_cast<Eigen::Index>(i)) * w.at(p, i, static_cast<std::size_t>(c));
            const CVec2 pv = Am * v;
            out.v.at(p, j, 0) = pv(0);
            out.v.at(p, j, 1) = pv(1);
            out.inside[p * phys->size() + j] = true;
        }
    }
    return out;
}

ContractionProxy contraction_proxy(const DiffeoSpec& diffeo, const FluidParams& params, const SectorSpec& spec,
                                   cplx lambda, const TangentialGridPtr& tg, const NormalGridPtr& ng,
                                   std::uint64_t seed, int probes) {
    if (probes < 1) throw ParameterError("contraction proxy needs at least one probe");
    const SurfaceGeometry geo = build_geometry(diffeo, tg);
    ContractionProxy out;
    for (int k = 0; k < probes; ++k) {
        auto g = make_rng(seed, 7, static_cast<std::uint64_t>(k));
        auto centre = [&](double lo, double hi) { return lo + (hi - lo) * uniform01(g); };
        auto amp = [&] { return 2.0 * uniform01(g) - 1.0; };
        const double c1 = centre(-3, 3), c2 = centre(0.5, 3), a1 = amp(), a2 = amp();
        const double b1 = centre(-3, 3), b2 = amp(), b3 = amp(), b4 = amp();
        BentData Z{HalfSpaceField(tg, ng, 2, Space::Physical), BoundaryField(tg, 2, Space::Physical),
                   BoundaryField(tg, 1, Space::Physical)};
        for (std::size_t p = 0; p < tg->size(); ++p) {
            const double x = tg->x(p)[0];
            for (std::size_t i = 0; i < ng->size(); ++i) {
                const double y = ng->nodes()[i];
                const double e = std::exp(-(x - c1) * (x - c1) - (y - c2) * (y - c2));
                Z.F.at(p, i, 0) = a1 * e;
                Z.F.at(p, i, 1) = a2 * e;
            }
            const double e = std::exp(-(x - b1) * (x - b1));
            Z.G.at(p, 0) = b2 * e;
            Z.G.at(p, 1) = b3 * e;
            Z.K.at(p, 0) = b4 * e;
        }
        const auto [w, H] = flat_solve(Z, params, spec, lambda);
        const BentData R = apply_perturbation(w, H, geo, params, spec, lambda);
        out.probes.push_back(bent_data_norm(R, lambda) / bent_data_norm(Z, lambda));
    }
    out.value = *std::max_element(out.probes.begin(), out.probes.end());
    return out;
}

void write_history_csv(const std::string& path, const PerturbationState& state) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open '" + path + "' for writing");
    os << std::setprecision(17) << "iter,updateNorm,ratio\n";
    for (std::size_t k = 0; k < state.updateNorms.size(); ++k) {
        os << k + 1 << ',' << state.updateNorms[k] << ',';
        if (k > 0) os << state.ratios[k - 1];
        os << '\n';
    }
}

}  // namespace fslab
