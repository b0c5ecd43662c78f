#include "fslab/symbols.hpp"

#include <algorithm>
#include <cmath>

#include "fslab/errors.hpp"
#include "fslab/regions.hpp"

namespace fslab {

namespace {

void check_point(const SpectralPoint& pt) {
    if (pt.dim != 1 && pt.dim != 2) throw ShapeError("tangential dimension must be 1 or 2");
}

double rel_diff(cplx a, cplx b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

// e^z - 1 without cancellation for small |z|.
cplx expm1c(cplx z) {
    const double a = z.real();
    const double b = z.imag();
    const double s = std::sin(b / 2);
    return {std::expm1(a) * std::cos(b) - 2.0 * s * s, std::exp(a) * std::sin(b)};
}

cplx m_from_gap(cplx A, cplx d, double x) {
    if (x == 0.0) return 0.0;
    if (std::abs(d) < kMTaylorSwitch * (2.0 * std::abs(A) + std::abs(d))) return eval_M_taylor(A, A + d, x);
    return std::exp(-A * x) * expm1c(-d * x) / d;
}

void check_den(const CoreSymbols& c) {
    if (std::abs(c.den) < kNearSingular * (std::abs(c.A * c.B) + c.r2))
        throw SingularityError("AB - |xi'|^2 is numerically zero");
}

}  // namespace

CoreSymbols core_symbols(const SpectralPoint& pt, const SymbolParams& sp) {
    check_point(pt);
    const cplx c2 = 2.0 * sp.alpha + sp.beta + sp.zeta;
    CoreSymbols c;
    c.lambda = pt.lambda;
    c.r2 = pt.xi_norm2();
    c.A = std::sqrt(pt.lambda / c2 + c.r2);
    c.B = std::sqrt(pt.lambda / sp.alpha + c.r2);
    c.etaCoef = (sp.alpha + sp.beta + sp.zeta) / sp.alpha;
    if (!(c.A.real() > 0) || !(c.B.real() > 0))
        throw BranchError("Re A or Re B is not positive; lambda is outside the admissible sector");
    c.a2r2 = pt.lambda / c2;
    c.b2r2 = pt.lambda / sp.alpha;
    c.gap = (c.b2r2 - c.a2r2) / (c.A + c.B);
    // A^2 B^2 - |xi'|^4 = lambda (lambda / (alpha c2) + (1/alpha + 1/c2) |xi'|^2)
    c.den = pt.lambda * (pt.lambda / (sp.alpha * c2) + (1.0 / sp.alpha + 1.0 / c2) * c.r2) / (c.A * c.B + c.r2);
    return c;
}

CoreSymbols eval_core(const SpectralPoint& pt, const FluidParams& params, const SectorSpec& spec) {
    if (!in_gamma_region(pt.lambda, spec, params)) throw RegionError("lambda outside the configured region");
    return core_symbols(pt, symbol_params(params, spec.zetaCase, pt.lambda));
}

cplx eval_M_direct(cplx A, cplx B, double x) {
    return (std::exp(-B * x) - std::exp(-A * x)) / (B - A);
}

cplx eval_M_taylor(cplx A, cplx B, double x) {
    const cplx d = (B - A) * x;
    return -x * std::exp(-A * x) * (1.0 - d / 2.0 + d * d / 6.0);
}

cplx eval_M(cplx A, cplx B, double x) { return m_from_gap(A, B - A, x); }

cplx eval_M(const CoreSymbols& c, double x) { return m_from_gap(c.A, c.gap, x); }

LopatinskiMatrix lopatinski(const CoreSymbols& c, const SymbolParams& sp) {
    check_den(c);
    const double r2 = c.r2;
    const cplx A = c.A;
    const cplx B = c.B;
    const cplx AB = A * B;
    const double a = sp.alpha;
    const cplx bz = sp.beta + sp.zeta;
    const cplx c2 = 2.0 * a + bz;
    const cplx c3 = 3.0 * a + bz;
    const cplx lam = c.lambda;
    const cplx den = c.den;

    LopatinskiMatrix L;
    L.L11 = a * A * c.b2r2 / den;
    L.L12 = a * r2 * (c.a2r2 - c.gap * c.gap) / den;  // 2AB - |xi'|^2 - B^2
    L.L21 = (2.0 * a * A * c.gap - bz * c.a2r2) / den;
    L.L22 = c2 * B * c.a2r2 / den;
    L.detL = L.L11 * L.L22 - L.L12 * L.L21;
    L.P = lam / den;

    L.altP = a * c2 / c3 * (AB + r2) / (lam / c3 + r2);
    const cplx P = L.altP;
    const cplx mix = A / (A + B) - bz / c2 * B / (A + B);
    L.altL11 = A * P;
    L.altL12 = r2 * (2.0 * a - P);
    L.altL21 = mix * P;
    L.altL22 = B * P;
    L.D = AB * P - r2 * (2.0 * a - P) * mix;
    L.altDetL = P * L.D;

    L.N = lam * L.detL + sp.sigma * L.L11 * (sp.m + r2);
    L.Ntilde = lam * L.D + sp.sigma * A * (sp.m + r2);
    L.E = lam * L.L22 + sp.sigma * (sp.m + r2);

    double mm = 0.0;
    mm = std::max(mm, rel_diff(L.L11, L.altL11));
    mm = std::max(mm, rel_diff(L.L12, L.altL12));
    mm = std::max(mm, rel_diff(L.L21, L.altL21));
    mm = std::max(mm, rel_diff(L.L22, L.altL22));
    mm = std::max(mm, rel_diff(L.detL, L.altDetL));
    mm = std::max(mm, rel_diff(L.P, L.altP));
    L.formMismatch = mm;
    return L;
}

LopatinskiMatrix eval_lopatinski(const SpectralPoint& pt, const FluidParams& params, const SectorSpec& spec) {
    const CoreSymbols c = eval_core(pt, params, spec);
    return lopatinski(c, symbol_params(params, spec.zetaCase, pt.lambda));
}

double n_scale(const SpectralPoint& pt) {
    const double r = std::sqrt(pt.xi_norm2());
    const double l = std::abs(pt.lambda);
    const double s = std::sqrt(l) + r;
    return (l + r) * s * s;
}

QPair q_symbols(const CoreSymbols& c) {
    check_den(c);
    const cplx den2 = c.A * c.B + c.r2;
    if (std::abs(den2) < kNearSingular * (std::abs(c.A * c.B) + c.r2))
        throw SingularityError("AB + |xi'|^2 is numerically zero");
    return {-c.a2r2 / c.den, 1.0 / den2};
}

QPair eval_QQprime(const SpectralPoint& pt, const FluidParams& params, const SectorSpec& spec) {
    return q_symbols(eval_core(pt, params, spec));
}

MultiplierSet multipliers(const SpectralPoint& pt, const CoreSymbols& c, const LopatinskiMatrix& L,
                          const SymbolParams& sp, double nFloor) {
    if (!(std::abs(L.N) >= nFloor * n_scale(pt)))
        throw SingularityError("|N(A,B)| below the certified floor");
    const cplx A = c.A;
    const cplx B = c.B;
    const cplx Q = q_symbols(c).Q;
    const cplx common = sp.sigma * c.etaCoef * (L.L12 + B * L.L11) / (B * (A + B) * L.N) * Q;
    MultiplierSet n;
    n.count = pt.dim + 1;
    for (int j = 0; j < pt.dim; ++j) {
        const cplx ixi(0.0, pt.xi[j]);
        n.n1[j] = -common * ixi;
        n.n2[j] = sp.sigma * ixi * L.L11 / (B * L.N);
    }
    n.n1[pt.dim] = common * A;
    n.n2[pt.dim] = sp.sigma * L.L11 / L.N;
    return n;
}

MultiplierSet eval_nJk(const SpectralPoint& pt, const FluidParams& params, const SectorSpec& spec,
                       double nFloor) {
    const CoreSymbols c = eval_core(pt, params, spec);
    const SymbolParams sp = symbol_params(params, spec.zetaCase, pt.lambda);
    return multipliers(pt, c, lopatinski(c, sp), sp, nFloor);
}

SymbolBundle evaluate_all(const SpectralPoint& pt, const SymbolParams& sp, double nFloor) {
    SymbolBundle b;
    b.point = pt;
    b.params = sp;
    b.core = core_symbols(pt, sp);
    b.L = lopatinski(b.core, sp);
    b.n = multipliers(pt, b.core, b.L, sp, nFloor);
    b.q = q_symbols(b.core);
    return b;
}

}  // namespace fslab
