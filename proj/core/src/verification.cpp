#include "fslab/verification.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <numbers>

#include "fslab/errors.hpp"
#include "fslab/parallel.hpp"
#include "fslab/random.hpp"

namespace fslab {

namespace {

constexpr cplx I(0.0, 1.0);

// Accumulates squared spectral L2 mass of one residual row and of its terms.
struct RowAccumulator {
    std::string name;
    double residual = 0.0, data = 0.0;
    std::vector<double> terms;
    std::vector<double> perMode;

    RowAccumulator(std::string n, std::size_t nterms, std::size_t modes)
        : name(std::move(n)), terms(nterms, 0.0), perMode(modes, 0.0) {}

    void add(std::size_t mode, double w, cplx res, cplx dat, std::initializer_list<cplx> parts) {
        const double r2 = w * std::norm(res);
        residual += r2;
        perMode[mode] += r2;
        data += w * std::norm(dat);
        std::size_t k = 0;
        for (cplx p : parts) terms[k++] += w * std::norm(p);
    }

    ResidualEntry finish() const {
        ResidualEntry e;
        e.name = name;
        e.absolute = std::sqrt(residual);
        double scale = std::sqrt(data);
        for (double t : terms) scale = std::max(scale, std::sqrt(t));
        e.relative = scale > 0 ? e.absolute / scale : 0.0;
        e.worstMode = static_cast<std::size_t>(std::max_element(perMode.begin(), perMode.end()) - perMode.begin());
        return e;
    }
};

}  // namespace

double ResidualReport::worst_relative() const {
    double w = 0.0;
    for (const auto& r : rows) w = std::max(w, r.relative);
    return w;
}

const ResidualEntry& ResidualReport::row(const std::string& name) const {
    for (const auto& r : rows)
        if (r.name == name) return r;
    throw ParameterError("no residual row named '" + name + "'");
}

ResidualReport pde_residual(const ResolventSolution& solIn, const ResolventData& dataIn, const FluidParams& params,
                            const SectorSpec& spec, cplx lambda) {
    const HalfSpaceField d = to_spectral(dataIn.d), F = to_spectral(dataIn.F);
    const BoundaryField G = to_spectral(dataIn.G), K = to_spectral(dataIn.K);
    const HalfSpaceField eta = to_spectral(solIn.eta), u = to_spectral(solIn.u);
    const BoundaryField h = to_spectral(solIn.h);
    const auto& tg = *u.tangential();
    const auto& ng = *u.normal();
    const std::size_t dim = static_cast<std::size_t>(tg.dim());
    if (!u.same_shape(F) || !eta.same_shape(d)) throw ShapeError("solution and data grids differ");

    const double mu = params.mu, nu = params.nu, g1 = params.gamma1, sigma = params.sigma;
    const cplx g2 = pressure_coupling(params, spec.zetaCase, lambda);
    const HalfSpaceField du = normal_derivative(u), d2u = normal_derivative(u, 2);
    const HalfSpaceField div = divergence(u);
    const HalfSpaceField ddiv = normal_derivative(div);
    const HalfSpaceField deta = normal_derivative(eta);
    const auto& w = ng.weights();
    const double cell = std::pow(tg.dxi(), tg.dim());
    const std::size_t modes = tg.size(), n = ng.size();

    RowAccumulator density("density", 2, modes), momentum("momentum", 4, modes), tangential("tangential_stress", 2, modes),
        normalStress("normal_stress", 4, modes), kinematic("kinematic", 2, modes);
    for (std::size_t m = 0; m < modes; ++m) {
        const auto xi = tg.xi(m);
        const double r2 = xi[0] * xi[0] + xi[1] * xi[1];
        for (std::size_t i = 0; i < n; ++i) {
            const double wi = cell * w[i];
            const cplx a = lambda * eta.at(m, i, 0), b = g1 * div.at(m, i, 0);
            density.add(m, wi, a + b - d.at(m, i, 0), d.at(m, i, 0), {a, b});
            if (i == 0 || i + 1 == n) continue;
            for (std::size_t c = 0; c <= dim; ++c) {
                const cplx t1 = g1 * lambda * u.at(m, i, c);
                const cplx t2 = -mu * (d2u.at(m, i, c) - r2 * u.at(m, i, c));
                const cplx gd = c < dim ? I * xi[c] * div.at(m, i, 0) : ddiv.at(m, i, 0);
                const cplx ge = c < dim ? I * xi[c] * eta.at(m, i, 0) : deta.at(m, i, 0);
                const cplx t3 = -nu * gd, t4 = g2 * ge;
                momentum.add(m, wi, t1 + t2 + t3 + t4 - F.at(m, i, c), F.at(m, i, c), {t1, t2, t3, t4});
            }
        }
        for (std::size_t j = 0; j < dim; ++j) {
            const cplx a = -mu * du.at(m, 0, j), b = -mu * I * xi[j] * u.at(m, 0, dim);
            tangential.add(m, cell, a + b - G.at(m, j), G.at(m, j), {a, b});
        }
        const cplx a = -2.0 * mu * du.at(m, 0, dim), b = -(nu - mu) * div.at(m, 0, 0), c = g2 * eta.at(m, 0, 0);
        const cplx e = -sigma * (params.m + r2) * h.at(m, 0);
        normalStress.add(m, cell, a + b + c + e - G.at(m, dim), G.at(m, dim), {a, b, c, e});
        const cplx k1 = lambda * h.at(m, 0), k2 = u.at(m, 0, dim);
        kinematic.add(m, cell, k1 + k2 - K.at(m, 0), K.at(m, 0), {k1, k2});
    }
    ResidualReport rep;
    rep.tangentialPoints = modes;
    rep.normalNodes = n;
    for (const auto* acc : {&density, &momentum, &tangential, &normalStress, &kinematic}) {
        if (acc == &tangential && dim == 0) continue;
        rep.rows.push_back(acc->finish());
    }
    return rep;
}

void NormSpec::validate() const {
    if (!(p > 1.0) || !std::isfinite(p) || !(q > 1.0) || !std::isfinite(q))
        throw ParameterError("norm exponents must lie in (1, inf)");
    if (order < 0 || order > 2) throw ParameterError("unsupported Sobolev order");
    if (!(gamma >= 0.0)) throw ParameterError("time weight must be non-negative");
}

namespace {

// All derivative fields of exactly the given order (ordered index tuples), in physical space.
std::vector<HalfSpaceField> derivatives_of_order(const HalfSpaceField& fs, int order) {
    const auto& tg = *fs.tangential();
    const std::size_t dim = static_cast<std::size_t>(tg.dim());
    auto apply = [&](const HalfSpaceField& g, std::size_t axis) {
        if (axis == dim) return normal_derivative(g);
        HalfSpaceField out = g;
        for (std::size_t m = 0; m < g.modes(); ++m) {
            const cplx f = I * tg.xi(m)[axis];
            for (std::size_t k = 0; k < g.nodes() * g.components(); ++k)
                out.data()[m * g.nodes() * g.components() + k] *= f;
        }
        return out;
    };
    std::vector<HalfSpaceField> level{fs};
    for (int o = 0; o < order; ++o) {
        std::vector<HalfSpaceField> next;
        for (const auto& g : level)
            for (std::size_t axis = 0; axis <= dim; ++axis) next.push_back(apply(g, axis));
        level = std::move(next);
    }
    for (auto& g : level) g = to_physical(g);
    return level;
}

double pointwise_lq(const std::vector<HalfSpaceField>& parts, double q) {
    const auto& f0 = parts.front();
    const auto& w = f0.normal()->weights();
    const double cell = std::pow(f0.tangential()->dx(), f0.tangential()->dim());
    double acc = 0.0, vol = 0.0;
    for (std::size_t p = 0; p < f0.modes(); ++p)
        for (std::size_t i = 0; i < f0.nodes(); ++i) {
            double s = 0.0;
            for (const auto& g : parts)
                for (std::size_t c = 0; c < g.components(); ++c) s += std::norm(g.at(p, i, c));
            acc += cell * w[i] * std::pow(s, 0.5 * q);
            vol += cell * w[i];
        }
    return acc / vol;
}

}  // namespace

double discrete_norm(const HalfSpaceField& f, const NormSpec& spec) {
    spec.validate();
    const HalfSpaceField fs = to_spectral(f);
    double total = 0.0;
    for (int o = spec.seminorm ? spec.order : 0; o <= spec.order; ++o)
        total += pointwise_lq(derivatives_of_order(fs, o), spec.q);
    return std::pow(total, 1.0 / spec.q);
}

double discrete_norm(const BoundaryField& f, const NormSpec& spec) {
    spec.validate();
    const auto& tg = *f.tangential();
    const std::size_t dim = static_cast<std::size_t>(tg.dim());
    const BoundaryField fs = to_spectral(f);
    double total = 0.0;
    for (int o = spec.seminorm ? spec.order : 0; o <= spec.order; ++o) {
        std::vector<BoundaryField> level{fs};
        for (int k = 0; k < o; ++k) {
            std::vector<BoundaryField> next;
            for (const auto& g : level)
                for (std::size_t axis = 0; axis < dim; ++axis) {
                    BoundaryField h = g;
                    for (std::size_t m = 0; m < g.modes(); ++m)
                        for (std::size_t c = 0; c < g.components(); ++c) h.at(m, c) *= I * tg.xi(m)[axis];
                    next.push_back(h);
                }
            level = std::move(next);
        }
        double acc = 0.0;
        std::vector<BoundaryField> phys;
        for (auto& g : level) phys.push_back(to_physical(g));
        for (std::size_t p = 0; p < tg.size(); ++p) {
            double s = 0.0;
            for (const auto& g : phys)
                for (std::size_t c = 0; c < g.components(); ++c) s += std::norm(g.at(p, c));
            acc += std::pow(s, 0.5 * spec.q);
        }
        total += acc / static_cast<double>(tg.size());
    }
    return std::pow(total, 1.0 / spec.q);
}

double time_norm(const std::vector<double>& t, const std::vector<double>& v, const NormSpec& spec) {
    spec.validate();
    if (t.size() != v.size() || t.size() < 2) throw ShapeError("time norm needs matching series of length >= 2");
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        const double a = std::pow(std::exp(-spec.gamma * t[i]) * v[i], spec.p);
        const double b = std::pow(std::exp(-spec.gamma * t[i + 1]) * v[i + 1], spec.p);
        acc += 0.5 * (t[i + 1] - t[i]) * (a + b);
    }
    return std::pow(acc, 1.0 / spec.p);
}

std::vector<double> log_time_grid(double t0, double t1, std::size_t n) {
    if (!(t0 > 0) || !(t1 > t0) || n < 2) throw ParameterError("log time grid needs 0 < t0 < t1 and n >= 2");
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i)
        t[i] = t0 * std::pow(t1 / t0, static_cast<double>(i) / static_cast<double>(n - 1));
    return t;
}

PointLayout layout_of(const HalfSpaceField& f) {
    PointLayout L;
    L.components = f.components();
    const double cell = std::pow(f.tangential()->dx(), f.tangential()->dim());
    for (std::size_t p = 0; p < f.modes(); ++p)
        for (std::size_t i = 0; i < f.nodes(); ++i) L.weights.push_back(cell * f.normal()->weights()[i]);
    return L;
}

PointLayout layout_of(const BoundaryField& f) {
    PointLayout L;
    L.components = f.components();
    L.weights.assign(f.modes(), std::pow(f.tangential()->dx(), f.tangential()->dim()));
    return L;
}

namespace {

// ||(sum_i |v_i|^2)^{1/2}||_q over a layout, for vectors given as sums of basis images.
double square_function(const PointLayout& L, const std::vector<std::vector<cplx>>& vs, double q) {
    double acc = 0.0;
    for (std::size_t p = 0; p < L.weights.size(); ++p) {
        double s = 0.0;
        for (const auto& v : vs)
            for (std::size_t c = 0; c < L.components; ++c) s += std::norm(v[p * L.components + c]);
        acc += L.weights[p] * std::pow(s, 0.5 * q);
    }
    return std::pow(acc, 1.0 / q);
}

}  // namespace

RBoundReport rbound_estimate(const std::vector<LinearOp>& family, const PointLayout& in, const PointLayout& out,
                             const std::vector<std::vector<cplx>>& tests, std::size_t trials, std::uint64_t seed,
                             double q, const std::string& label) {
    if (family.empty()) throw ParameterError("R-bound estimate needs a non-empty family");
    if (tests.empty()) throw ParameterError("R-bound estimate needs test vectors");
    if (trials < 100) throw ParameterError("R-bound estimate needs at least 100 trials");
    if (!(q > 1.0)) throw ParameterError("q must exceed 1");
    for (const auto& t : tests)
        if (t.size() != in.size()) throw ShapeError("test vector does not match the input layout");
    const std::size_t J = family.size(), K = tests.size();

    // Images T_j t_k; every trial input is a signed combination of the t_k.
    std::vector<std::vector<std::vector<cplx>>> img(J, std::vector<std::vector<cplx>>(K));
    for (std::size_t j = 0; j < J; ++j)
        parallel_for(K, [&](std::size_t k) {
            img[j][k] = family[j](tests[k]);
            if (img[j][k].size() != out.size()) throw ShapeError("operator output does not match the output layout");
        });

    RBoundReport rep;
    rep.label = label;
    rep.operators = J;
    rep.testVectors = K;
    rep.trials = trials;
    std::vector<double> single(J, 0.0);
    for (std::size_t j = 0; j < J; ++j)
        for (std::size_t k = 0; k < K; ++k) {
            const double den = square_function(in, {tests[k]}, q);
            if (den > 0) single[j] = std::max(single[j], square_function(out, {img[j][k]}, q) / den);
        }

    double running = 0.0, half = 0.0;
    for (std::size_t m = 1; m <= J; ++m) {
        running = std::max(running, single[m - 1]);
        if (m >= 2) {
            std::vector<double> best(trials, 0.0);
            parallel_for(trials, [&](std::size_t t) {
                auto g = make_rng(seed, m, t);
                std::vector<std::vector<cplx>> fin, fout;
                while (fin.empty()) {
                    for (std::size_t i = 0; i < m; ++i) {
                        if (uniform01(g) < 0.5) continue;
                        std::vector<cplx> a(in.size(), 0.0), b(out.size(), 0.0);
                        for (std::size_t k = 0; k < K; ++k) {
                            const double s = uniform01(g) < 0.5 ? -1.0 : 1.0;
                            for (std::size_t e = 0; e < a.size(); ++e) a[e] += s * tests[k][e];
                            for (std::size_t e = 0; e < b.size(); ++e) b[e] += s * img[i][k][e];
                        }
                        fin.push_back(std::move(a));
                        fout.push_back(std::move(b));
                    }
                }
                const double den = square_function(in, fin, q);
                best[t] = den > 0 ? square_function(out, fout, q) / den : 0.0;
            });
            running = std::max(running, *std::max_element(best.begin(), best.end()));
            if (m == J) half = *std::max_element(best.begin(), best.begin() + static_cast<std::ptrdiff_t>(trials / 2));
        }
        rep.prefixEstimates.push_back(running);
    }
    rep.estimate = running;
    rep.maxSingleNorm = *std::max_element(single.begin(), single.end());
    rep.halfTrialEstimate = std::max(half, rep.maxSingleNorm);
    return rep;
}

double lame_manufactured_error(const FluidParams& params, const SectorSpec& spec, cplx lambda, double xi,
                               std::size_t component, std::size_t nodes, double X) {
    // One-mode tangential grid: mode 1 carries xi, or mode 0 when xi = 0.
    const double L = xi == 0.0 ? 1.0 : std::numbers::pi / std::abs(xi);
    const std::size_t mode = xi == 0.0 ? 0 : (xi > 0 ? 1 : 3);
    auto tg = std::make_shared<const TangentialGrid>(1, 4, L);
    auto ng = std::make_shared<const NormalGrid>(nodes, X, kDefaultMapLength);
    if (component > 1) throw ParameterError("component out of range");
    const SymbolParams sp = symbol_params(params, spec.zetaCase, lambda);
    const double a = sp.alpha;
    const cplx grad = sp.alpha + sp.beta + sp.zeta, bz = sp.beta + sp.zeta;
    const cplx ix = I * xi;
    const cplx at = component == 0 ? 1.0 : 0.0, an = component == 1 ? 1.0 : 0.0;
    const cplx delta = ix * at - an;  // div v = delta e^{-x}
    const cplx diag = lambda - a * (1.0 - xi * xi);

    HalfSpaceField F(tg, ng, 2, Space::Spectral), exact(tg, ng, 2, Space::Spectral);
    BoundaryField G(tg, 2, Space::Spectral);
    for (std::size_t i = 0; i < ng->size(); ++i) {
        const double e = std::exp(-ng->nodes()[i]);
        exact.at(mode, i, 0) = at * e;
        exact.at(mode, i, 1) = an * e;
        F.at(mode, i, 0) = (diag * at - grad * ix * delta) * e;
        F.at(mode, i, 1) = (diag * an + grad * delta) * e;
    }
    G.at(mode, 0) = -a * (-at + ix * an);
    G.at(mode, 1) = -(-2.0 * a * an + bz * delta);
    const HalfSpaceField v = solve_lame_bvp(F, G, params, spec, lambda);
    double err = 0.0, ref = 0.0;
    for (std::size_t k = 0; k < v.data().size(); ++k) {
        err = std::max(err, std::abs(v.data()[k] - exact.data()[k]));
        ref = std::max(ref, std::abs(exact.data()[k]));
    }
    return err / ref;
}

double volevich_reconstruction_error(cplx B, const std::function<cplx(double)>& k,
                                     const std::function<cplx(double)>& dk, const std::vector<double>& xs, double X,
                                     const SolverOptions& opts) {
    const QuadratureRule rule = graded_gauss_legendre(X, opts.quadFirstPanel, opts.quadRatio);
    const cplx k0 = k(0.0);
    if (k0 == 0.0) throw ParameterError("reconstruction needs k(0) != 0");
    double worst = 0.0;
    for (double x : xs) {
        cplx acc = 0.0;
        for (std::size_t q = 0; q < rule.x.size(); ++q) {
            const cplx e = std::exp(-B * (x + rule.x[q]));
            acc += rule.w[q] * (B * e * k(rule.x[q]) - e * dk(rule.x[q]));
        }
        worst = std::max(worst, std::abs(acc - std::exp(-B * x) * k0) / std::abs(k0));
    }
    return worst;
}

TraceAgreement volevich_trace_agreement(const BoundaryField& K, const FluidParams& params, const SectorSpec& spec,
                                        cplx lambda, const NormalGridPtr& normal, const SolverOptions& opts) {
    const BoundaryField Ks = to_spectral(K);
    const SurfaceSolution direct = solve_surface_homogeneous(Ks, params, spec, lambda, normal, opts);
    const VolevichSolution vol = solve_surface_volevich(extend_boundary(Ks, normal), params, spec, lambda, opts);
    double du = 0.0, su = 0.0, dh = 0.0, sh = 0.0;
    for (std::size_t m = 0; m < Ks.modes(); ++m) {
        for (std::size_t c = 0; c < direct.u.components(); ++c) {
            du = std::max(du, std::abs(direct.u.at(m, 0, c) - vol.u.at(m, 0, c)));
            su = std::max(su, std::abs(direct.u.at(m, 0, c)));
        }
        dh = std::max(dh, std::abs(direct.h.at(m, 0) - vol.hExt.at(m, 0, 0)));
        sh = std::max(sh, std::abs(direct.h.at(m, 0)));
    }
    return {su > 0 ? du / su : du, sh > 0 ? dh / sh : dh};
}

}  // namespace fslab

namespace fslab {

SemigroupCheck semigroup_estimate_check(const Eigen::MatrixXcd& gen, const Eigen::VectorXcd& U0,
                                        const std::vector<double>& times, double gamma0,
                                        const SemigroupNorms& norms) {
    if (!norms.space) throw ParameterError("semigroup check needs a space norm");
    if (times.empty()) throw ParameterError("semigroup check needs at least one time");
    SemigroupCheck rep;
    rep.gamma0 = gamma0;
    rep.times = times;
    rep.ratios.assign(times.size(), 0.0);
    const double n0 = norms.space(U0);
    if (n0 == 0.0) return rep;
    parallel_for(times.size(), [&](std::size_t i) {
        const double t = times[i];
        if (!(t > 0)) throw ParameterError("semigroup check times must be positive");
        const Eigen::VectorXcd U = matrix_exponential_oracle(gen, U0, t);
        const Eigen::VectorXcd dU = gen * U;
        double lhs = norms.space(U) + t * norms.space(dU);
        if (norms.domain) lhs += t * norms.domain(U);
        rep.ratios[i] = lhs / (std::exp(gamma0 * t) * n0);
    });
    rep.cMeasured = *std::max_element(rep.ratios.begin(), rep.ratios.end());
    return rep;
}

OperatorFamily resolvent_family(const std::vector<cplx>& lambdas, double power, const FluidParams& params,
                                const SectorSpec& spec, const TangentialGridPtr& tg, std::size_t normalNodes) {
    if (lambdas.empty()) throw ParameterError("operator family needs at least one lambda");
    double X = 0.0;
    for (cplx l : lambdas) X = std::max(X, choose_truncation(params, spec, l, *tg));
    const auto ng = std::make_shared<const NormalGrid>(normalNodes, X, kDefaultMapLength);
    OperatorFamily fam;
    fam.lambdas = lambdas;
    fam.prototype = HalfSpaceField(tg, ng, static_cast<std::size_t>(tg->dim() + 1), Space::Physical);
    fam.in = layout_of(fam.prototype);
    fam.out = fam.in;
    for (cplx l : lambdas) {
        const cplx scale = std::pow(l, power);
        const HalfSpaceField proto = fam.prototype;
        fam.ops.push_back([=](const std::vector<cplx>& v) {
            ResolventData data{proto.zeros_like(1), proto, BoundaryField(proto.tangential(), proto.components(), Space::Physical),
                               BoundaryField(proto.tangential(), 1, Space::Physical)};
            if (v.size() != data.F.data().size()) throw ShapeError("operator input has the wrong size");
            data.F.data() = v;
            HalfSpaceField u = to_physical(solve_full_resolvent(data, params, spec, l).u);
            u *= scale;
            return u.data();
        });
    }
    return fam;
}

std::vector<std::vector<cplx>> gaussian_test_vectors(const HalfSpaceField& prototype, std::size_t count,
                                                     std::uint64_t seed) {
    const auto& tg = *prototype.tangential();
    const auto& ng = *prototype.normal();
    const double L = tg.half_length();
    std::vector<std::vector<cplx>> out;
    for (std::size_t k = 0; k < count; ++k) {
        auto g = make_rng(seed, 11, k);
        std::array<double, 2> c{};
        for (int d = 0; d < tg.dim(); ++d) c[static_cast<std::size_t>(d)] = (uniform01(g) - 0.5) * L * 0.6;
        const double cn = 0.5 + 2.5 * uniform01(g);
        const double width = 0.5 + uniform01(g);
        std::vector<cplx> amp(prototype.components());
        for (auto& a : amp) a = cplx(2.0 * uniform01(g) - 1.0, 2.0 * uniform01(g) - 1.0);
        HalfSpaceField f = prototype.zeros_like(prototype.components());
        for (std::size_t p = 0; p < f.modes(); ++p) {
            const auto x = tg.x(p);
            double r2 = 0.0;
            for (int d = 0; d < tg.dim(); ++d) {
                const double dx = x[static_cast<std::size_t>(d)] - c[static_cast<std::size_t>(d)];
                r2 += dx * dx;
            }
            for (std::size_t i = 0; i < f.nodes(); ++i) {
                const double dz = ng.nodes()[i] - cn;
                const double e = std::exp(-(r2 + dz * dz) / (width * width));
                for (std::size_t c2 = 0; c2 < f.components(); ++c2) f.at(p, i, c2) = amp[c2] * e;
            }
        }
        out.push_back(std::move(f.data()));
    }
    return out;
}

}  // namespace fslab
