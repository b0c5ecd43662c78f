#include "fslab/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include <fftw3.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "fslab/errors.hpp"
#include "fslab/parallel.hpp"
#include "fslab/regions.hpp"
#include "fslab/symbols.hpp"

namespace fslab {

namespace {

constexpr cplx I(0.0, 1.0);
constexpr double kPi = std::numbers::pi;

// Contour shape per unit half-node count: alpha, step*M and mu*t/M.
struct ContourShape {
    double alpha = 0.0, stepTimesM = 0.0, muScale = 0.0;
};

// Grid search over (alpha, strip half-width d, a = M h) minimizing the balanced
// error exponent; b follows from equating discretization and truncation terms.
ContourShape optimal_shape(double spectrumAngle, double alphaMax) {
    static std::mutex guard;
    static std::map<std::pair<double, double>, ContourShape> cache;
    std::lock_guard<std::mutex> lock(guard);
    const auto key = std::make_pair(spectrumAngle, alphaMax);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    const double top = 0.5 * kPi - spectrumAngle;
    const double aHi = std::min(alphaMax, top) * (1.0 - 1e-3);
    double best = 0.0;
    ContourShape shape;
    for (int ia = 1; ia <= 60; ++ia) {
        const double al = aHi * ia / 60.0;
        const double dMax = std::min(al, top - al);
        for (int id = 1; id <= 40; ++id) {
            const double d = dMax * id / 40.0;
            for (int k = 1; k <= 200; ++k) {
                const double a = 6.0 * k / 200.0;
                const double den = std::sin(al) * std::cosh(a) - std::sin(al - d);
                if (den <= 0) continue;
                const double b = 2.0 * kPi * d / (a * den);
                const double e = b * (1.0 - std::sin(al) * std::cosh(a));
                if (e < best) {
                    best = e;
                    shape = {al, a, b};
                }
            }
        }
    }
    if (!(best < 0)) throw ContourError("no convergent contour for this sector");
    cache[key] = shape;
    return shape;
}

}  // namespace

void ContourSpec::validate() const {
    if (halfNodes < 2) throw ParameterError("contour needs at least 2 half nodes");
    fslab::validate(sector);
    const double delta = spectrumAngle < 0 ? sector.epsilon : spectrumAngle;
    if (!(delta < 0.5 * kPi)) throw ParameterError("spectrum angle must be below pi/2");
}

std::vector<ContourSpec::Node> ContourSpec::nodes(double t) const {
    validate();
    if (!(t > 0)) throw ParameterError("contour propagation needs t > 0");
    const double delta = spectrumAngle < 0 ? sector.epsilon : spectrumAngle;
    const ContourShape s = optimal_shape(delta, 0.5 * kPi - sector.epsilon);
    const double h = s.stepTimesM / halfNodes;
    // Keep the vertex mu (1 - sin alpha) at least lambda0 away from the origin.
    const double mu = std::max(s.muScale * halfNodes / t, 1.0001 * sector.lambda0 / (1.0 - std::sin(s.alpha)));
    std::vector<Node> out;
    out.reserve(static_cast<std::size_t>(2 * halfNodes + 1));
    for (int k = -halfNodes; k <= halfNodes; ++k) {
        const double u = k * h;
        const cplx z = mu * (1.0 + std::sin(I * u - s.alpha));
        const cplx dz = mu * I * std::cos(I * u - s.alpha);
        if (!in_lambda_region(z, sector)) throw ContourError("contour node leaves the resolvent region");
        out.push_back({z, h * dz / (2.0 * kPi * I)});
    }
    return out;
}

namespace {

// Recovers u(0) from the stress rows and applies the operator to a packed state.
class GeneratorApply {
public:
    GeneratorApply(const std::array<double, 2>& xi, int dim, const FluidParams& p, const NormalGrid& ng)
        : xi_(xi), dim_(static_cast<std::size_t>(dim)), p_(p), ng_(ng), n_(ng.size()) {
        r2_ = xi[0] * xi[0] + (dim == 2 ? xi[1] * xi[1] : 0.0);
        g2_ = pressure_coupling(p, ZetaCase::C1, 1.0);
        const auto nc = static_cast<Eigen::Index>(dim_ + 1);
        Eigen::MatrixXcd Bm = Eigen::MatrixXcd::Zero(nc, nc);
        const double d00 = ng.D()(0, 0);
        for (std::size_t j = 0; j < dim_; ++j) {
            const auto r = static_cast<Eigen::Index>(j);
            Bm(r, r) = p.mu * d00;
            Bm(r, nc - 1) = p.mu * I * xi[j];
        }
        Bm(nc - 1, nc - 1) = (p.mu + p.nu) * d00;
        for (std::size_t l = 0; l < dim_; ++l) Bm(nc - 1, static_cast<Eigen::Index>(l)) = (p.nu - p.mu) * I * xi[l];
        lu_.compute(Bm);
        if (!(lu_.rcond() > 1e-14)) throw SingularityError("boundary bordering is singular");
    }

    std::size_t state_size() const { return n_ + (dim_ + 1) * (n_ - 2) + 1; }

    ModeState unpack(const Eigen::VectorXcd& U) const {
        ModeState s;
        s.eta = U.segment(0, static_cast<Eigen::Index>(n_));
        const std::size_t nc = dim_ + 1;
        for (std::size_t c = 0; c < nc; ++c) {
            Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n_));
            v.segment(1, static_cast<Eigen::Index>(n_ - 2)) =
                U.segment(static_cast<Eigen::Index>(n_ + c * (n_ - 2)), static_cast<Eigen::Index>(n_ - 2));
            s.u.push_back(std::move(v));
        }
        s.h = U(static_cast<Eigen::Index>(state_size() - 1));
        // Stress rows: mu(d_N u_j + i xi_j u_N) = 0,
        // 2 mu d_N u_N + (nu - mu) div u - gamma2 eta + sigma (m + |xi|^2) h = 0.
        Eigen::VectorXcd rhs(static_cast<Eigen::Index>(nc));
        const auto D0 = ng_.D().row(0);
        auto interior_d = [&](const Eigen::VectorXcd& v) {
            cplx acc = 0.0;
            for (std::size_t i = 1; i + 1 < n_; ++i) acc += D0(static_cast<Eigen::Index>(i)) * v(static_cast<Eigen::Index>(i));
            return acc;
        };
        for (std::size_t j = 0; j < dim_; ++j) rhs(static_cast<Eigen::Index>(j)) = -p_.mu * interior_d(s.u[j]);
        rhs(static_cast<Eigen::Index>(dim_)) =
            -(p_.mu + p_.nu) * interior_d(s.u[dim_]) + g2_ * s.eta(0) - p_.sigma * (p_.m + r2_) * s.h;
        const Eigen::VectorXcd b = lu_.solve(rhs);
        for (std::size_t c = 0; c < nc; ++c) s.u[c](0) = b(static_cast<Eigen::Index>(c));
        return s;
    }

    Eigen::VectorXcd apply(const Eigen::VectorXcd& U) const {
        const ModeState s = unpack(U);
        const Eigen::MatrixXd& D = ng_.D();
        const Eigen::MatrixXd& D2 = ng_.D2();
        const std::size_t nc = dim_ + 1;
        Eigen::VectorXcd div = D.cast<cplx>() * s.u[dim_];
        for (std::size_t l = 0; l < dim_; ++l) div += I * xi_[l] * s.u[l];
        const Eigen::VectorXcd ddiv = D.cast<cplx>() * div;
        const Eigen::VectorXcd deta = D.cast<cplx>() * s.eta;
        Eigen::VectorXcd out(static_cast<Eigen::Index>(state_size()));
        out.segment(0, static_cast<Eigen::Index>(n_)) = -p_.gamma1 * div;
        for (std::size_t c = 0; c < nc; ++c) {
            const Eigen::VectorXcd lap = D2.cast<cplx>() * s.u[c] - r2_ * s.u[c];
            for (std::size_t i = 1; i + 1 < n_; ++i) {
                const auto ii = static_cast<Eigen::Index>(i);
                const cplx gd = c < dim_ ? I * xi_[c] * div(ii) : ddiv(ii);
                const cplx ge = c < dim_ ? I * xi_[c] * s.eta(ii) : deta(ii);
                out(static_cast<Eigen::Index>(n_ + c * (n_ - 2) + i - 1)) =
                    (p_.mu * lap(ii) + p_.nu * gd - g2_ * ge) / p_.gamma1;
            }
        }
        out(static_cast<Eigen::Index>(state_size() - 1)) = -s.u[dim_](0);
        return out;
    }

private:
    std::array<double, 2> xi_;
    std::size_t dim_;
    FluidParams p_;
    const NormalGrid& ng_;
    std::size_t n_;
    double r2_ = 0.0;
    cplx g2_;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
};

}  // namespace

PerModeGenerator build_generator(const std::array<double, 2>& xi, int dim, const FluidParams& params,
                                 const NormalGridPtr& normal) {
    if (dim != 1 && dim != 2) throw ParameterError("tangential dimension must be 1 or 2");
    if (!normal) throw ShapeError("generator needs a normal grid");
    validate(params);
    const GeneratorApply op(xi, dim, params, *normal);
    const auto sz = static_cast<Eigen::Index>(op.state_size());
    PerModeGenerator gen;
    gen.matrix.resize(sz, sz);
    gen.xi = xi;
    gen.dim = dim;
    gen.normal = normal;
    gen.params = params;
    parallel_for(static_cast<std::size_t>(sz), [&](std::size_t j) {
        Eigen::VectorXcd e = Eigen::VectorXcd::Zero(sz);
        e(static_cast<Eigen::Index>(j)) = 1.0;
        gen.matrix.col(static_cast<Eigen::Index>(j)) = op.apply(e);
    });
    return gen;
}

Eigen::VectorXcd pack_state(const PerModeGenerator& gen, const ModeState& s) {
    const std::size_t n = gen.nodes(), nc = static_cast<std::size_t>(gen.dim) + 1;
    if (static_cast<std::size_t>(s.eta.size()) != n || s.u.size() != nc) throw ShapeError("state does not match the generator");
    Eigen::VectorXcd U(static_cast<Eigen::Index>(gen.size()));
    U.segment(0, static_cast<Eigen::Index>(n)) = s.eta;
    for (std::size_t c = 0; c < nc; ++c) {
        if (static_cast<std::size_t>(s.u[c].size()) != n) throw ShapeError("state does not match the generator");
        U.segment(static_cast<Eigen::Index>(gen.u_offset(c)), static_cast<Eigen::Index>(n - 2)) =
            s.u[c].segment(1, static_cast<Eigen::Index>(n - 2));
    }
    U(static_cast<Eigen::Index>(gen.h_offset())) = s.h;
    return U;
}

ModeState unpack_state(const PerModeGenerator& gen, const Eigen::VectorXcd& U) {
    if (static_cast<std::size_t>(U.size()) != gen.size()) throw ShapeError("state does not match the generator");
    const GeneratorApply op(gen.xi, gen.dim, gen.params, *gen.normal);
    return op.unpack(U);
}

Eigen::VectorXcd propagate_contour(const Eigen::MatrixXcd& A, const Eigen::VectorXcd& U0, double t,
                                   const ContourSpec& contour) {
    if (A.rows() != A.cols() || A.rows() != U0.size()) throw ShapeError("generator and state sizes differ");
    const auto nodes = contour.nodes(t);
    std::vector<Eigen::VectorXcd> terms(nodes.size());
    parallel_for(nodes.size(), [&](std::size_t k) {
        const cplx z = nodes[k].z;
        Eigen::MatrixXcd R = -A;
        R.diagonal().array() += z;
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(R);
        Eigen::VectorXcd x = lu.solve(U0);
        if (!x.allFinite()) throw ContourError("resolvent solve failed at a contour node");
        const cplx w = nodes[k].weight * std::exp(z * t);
        terms[k] = w * x;
    });
    Eigen::VectorXcd sum = Eigen::VectorXcd::Zero(U0.size());
    for (const auto& term : terms) sum += term;
    return sum;
}

Eigen::VectorXcd propagate_contour(const PerModeGenerator& gen, const Eigen::VectorXcd& U0, double t,
                                   const ContourSpec& contour) {
    return propagate_contour(gen.matrix, U0, t, contour);
}

Eigen::VectorXcd matrix_exponential_oracle(const Eigen::MatrixXcd& A, const Eigen::VectorXcd& U0, double t) {
    if (A.rows() != A.cols() || A.rows() != U0.size()) throw ShapeError("generator and state sizes differ");
    if (A.rows() > kExpmMaxDimension) throw ParameterError("matrix exponential oracle is capped at dimension 2000");
    const Eigen::MatrixXcd E = (t * A).exp();
    return E * U0;
}

namespace {

double weighted_lq(const NormalGrid& ng, const Eigen::VectorXcd& v, double q) {
    double acc = 0.0;
    for (std::size_t i = 0; i < ng.size(); ++i) acc += ng.weights()[i] * std::pow(std::abs(v(static_cast<Eigen::Index>(i))), q);
    return std::pow(acc, 1.0 / q);
}

double mode_weight(const PerModeGenerator& gen) { return 1.0 + gen.xi[0] * gen.xi[0] + gen.xi[1] * gen.xi[1]; }

double eta_h1(const PerModeGenerator& gen, const Eigen::VectorXcd& eta, double q) {
    const auto& ng = *gen.normal;
    return std::sqrt(mode_weight(gen)) * weighted_lq(ng, eta, q) + weighted_lq(ng, ng.D().cast<cplx>() * eta, q);
}

double velocity_norm(const PerModeGenerator& gen, const ModeState& s, int order, double q) {
    const auto& ng = *gen.normal;
    const double w = std::sqrt(mode_weight(gen));
    double acc = 0.0;
    for (const auto& u : s.u) {
        acc += std::pow(w, order) * weighted_lq(ng, u, q);
        if (order >= 1) acc += std::pow(w, order - 1) * weighted_lq(ng, ng.D().cast<cplx>() * u, q);
        if (order >= 2) acc += weighted_lq(ng, ng.D2().cast<cplx>() * u, q);
    }
    return acc;
}

double height_norm(const PerModeGenerator& gen, cplx h, double order) {
    return std::pow(mode_weight(gen), 0.5 * order) * std::abs(h);
}

}  // namespace

double state_space_norm(const PerModeGenerator& gen, const Eigen::VectorXcd& U, double q) {
    const ModeState s = unpack_state(gen, U);
    return eta_h1(gen, s.eta, q) + velocity_norm(gen, s, 0, q) + height_norm(gen, s.h, 2.0 - 1.0 / q);
}

double state_domain_norm(const PerModeGenerator& gen, const Eigen::VectorXcd& U, double q) {
    const ModeState s = unpack_state(gen, U);
    return eta_h1(gen, s.eta, q) + velocity_norm(gen, s, 2, q) + height_norm(gen, s.h, 3.0 - 1.0 / q);
}

SemigroupNorms generator_norms(const PerModeGenerator& gen, double q) {
    return {[gen, q](const Eigen::VectorXcd& U) { return state_space_norm(gen, U, q); },
            [gen, q](const Eigen::VectorXcd& U) { return state_domain_norm(gen, U, q); }};
}

namespace {

// Weighted L_p in time on a uniform grid, trapezoidal.
double uniform_time_norm(const std::vector<double>& v, double dt, double gamma, double p) {
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < v.size(); ++j) {
        const double a = std::pow(std::exp(-gamma * dt * j) * v[j], p);
        const double b = std::pow(std::exp(-gamma * dt * (j + 1)) * v[j + 1], p);
        acc += 0.5 * dt * (a + b);
    }
    return std::pow(acc, 1.0 / p);
}

std::mutex& fft_planner_mutex() {
    static std::mutex m;
    return m;
}

// (gamma + i tau)^{1/2} applied to e^{-gamma t} g(t) for each row of `series`
// (rows are time samples); zero padding to twice the length.
std::vector<Eigen::VectorXcd> half_time_derivative(const std::vector<Eigen::VectorXcd>& series, double dt,
                                                   double gamma) {
    const std::size_t J = series.size(), width = static_cast<std::size_t>(series.front().size());
    std::size_t P = 1;
    while (P < 2 * J) P <<= 1;
    std::vector<cplx> buf(P * width, 0.0);
    for (std::size_t j = 0; j < J; ++j)
        for (std::size_t e = 0; e < width; ++e)
            buf[j * width + e] = std::exp(-gamma * dt * j) * series[j](static_cast<Eigen::Index>(e));
    int n = static_cast<int>(P);
    auto* data = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_plan fwd, bwd;
    {
        std::lock_guard<std::mutex> lock(fft_planner_mutex());
        fwd = fftw_plan_many_dft(1, &n, static_cast<int>(width), data, nullptr, static_cast<int>(width), 1, data,
                                 nullptr, static_cast<int>(width), 1, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd = fftw_plan_many_dft(1, &n, static_cast<int>(width), data, nullptr, static_cast<int>(width), 1, data,
                                 nullptr, static_cast<int>(width), 1, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    fftw_execute(fwd);
    for (std::size_t k = 0; k < P; ++k) {
        const long sk = k < P / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(P);
        const double tau = 2.0 * kPi * static_cast<double>(sk) / (static_cast<double>(P) * dt);
        const cplx f = std::sqrt(cplx(gamma, tau)) / static_cast<double>(P);
        for (std::size_t e = 0; e < width; ++e) buf[k * width + e] *= f;
    }
    fftw_execute(bwd);
    {
        std::lock_guard<std::mutex> lock(fft_planner_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
    }
    std::vector<Eigen::VectorXcd> out(J, Eigen::VectorXcd(static_cast<Eigen::Index>(width)));
    for (std::size_t j = 0; j < J; ++j)
        for (std::size_t e = 0; e < width; ++e)
            out[j](static_cast<Eigen::Index>(e)) = buf[j * width + e] * std::exp(gamma * dt * j);
    return out;
}

}  // namespace

MaximalRegularityReport maximal_regularity_norms(const PerModeGenerator& gen, const ForcingHistory& forcing,
                                                 double gamma0, double p, double q) {
    if (!(forcing.dt > 0) || forcing.samples.size() < 2) throw ParameterError("forcing history needs dt > 0 and >= 2 samples");
    if (!(p > 1) || !(q > 1) || !(gamma0 >= 0)) throw ParameterError("need p, q > 1 and gamma0 >= 0");
    const auto sz = static_cast<Eigen::Index>(gen.size());
    for (const auto& f : forcing.samples)
        if (f.size() != sz) throw ShapeError("forcing sample does not match the generator");
    if (forcing.samples.front().norm() != 0.0) throw ParameterError("forcing must vanish at t = 0");
    const double dt = forcing.dt;
    const std::size_t J = forcing.samples.size();

    MaximalRegularityReport rep;
    rep.columns = {"dt_eta", "eta", "dt_u", "half_dt_grad_u", "u", "dt_h", "h", "d", "f", "k"};
    rep.times.resize(J);
    for (std::size_t j = 0; j < J; ++j) rep.times[j] = dt * static_cast<double>(j);
    bool zero = true;
    for (const auto& f : forcing.samples) zero = zero && f.norm() == 0.0;
    if (zero) {
        rep.series.assign(J, std::vector<double>(rep.columns.size(), 0.0));
        return rep;
    }

    // Exact step for linear-in-time forcing: exp of the bordered matrix [[A, I, 0], [0, 0, I], [0, 0, 0]].
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(3 * sz, 3 * sz);
    M.topLeftCorner(sz, sz) = gen.matrix * dt;
    M.block(0, sz, sz, sz).diagonal().setConstant(dt);
    M.block(sz, 2 * sz, sz, sz).diagonal().setConstant(dt);
    const Eigen::MatrixXcd E = M.exp();
    const Eigen::MatrixXcd step = E.topLeftCorner(sz, sz), B1 = E.block(0, sz, sz, sz), B2 = E.block(0, 2 * sz, sz, sz);

    std::vector<Eigen::VectorXcd> U(J), dU(J);
    U[0] = Eigen::VectorXcd::Zero(sz);
    for (std::size_t j = 0; j + 1 < J; ++j)
        U[j + 1] = step * U[j] + B1 * forcing.samples[j] + B2 * (forcing.samples[j + 1] - forcing.samples[j]);
    for (std::size_t j = 0; j < J; ++j) dU[j] = gen.matrix * U[j] + forcing.samples[j];

    // Gradient of u per time sample: (i xi_l u_c, d_N u_c) stacked.
    const auto& ng = *gen.normal;
    const std::size_t n = ng.size(), nc = static_cast<std::size_t>(gen.dim) + 1;
    std::vector<ModeState> states(J);
    std::vector<Eigen::VectorXcd> grad(J);
    for (std::size_t j = 0; j < J; ++j) {
        states[j] = unpack_state(gen, U[j]);
        Eigen::VectorXcd g(static_cast<Eigen::Index>(n * nc * nc));
        std::size_t o = 0;
        for (std::size_t c = 0; c < nc; ++c) {
            for (int l = 0; l < gen.dim; ++l, o += n)
                g.segment(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(n)) = I * gen.xi[static_cast<std::size_t>(l)] * states[j].u[c];
            g.segment(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(n)) = ng.D().cast<cplx>() * states[j].u[c];
            o += n;
        }
        grad[j] = std::move(g);
    }
    const auto half = half_time_derivative(grad, dt, gamma0);

    rep.series.resize(J);
    for (std::size_t j = 0; j < J; ++j) {
        const ModeState ds = unpack_state(gen, dU[j]);
        const Eigen::VectorXcd& F = forcing.samples[j];
        double hg = 0.0;
        for (std::size_t blk = 0; blk < nc * nc; ++blk)
            hg += weighted_lq(ng, half[j].segment(static_cast<Eigen::Index>(blk * n), static_cast<Eigen::Index>(n)), q);
        double fnorm = 0.0;
        for (std::size_t c = 0; c < nc; ++c) {
            Eigen::VectorXcd fc = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n));
            fc.segment(1, static_cast<Eigen::Index>(n - 2)) =
                F.segment(static_cast<Eigen::Index>(gen.u_offset(c)), static_cast<Eigen::Index>(n - 2));
            fnorm += weighted_lq(ng, fc, q);
        }
        rep.series[j] = {eta_h1(gen, ds.eta, q),
                         eta_h1(gen, states[j].eta, q),
                         velocity_norm(gen, ds, 0, q),
                         hg,
                         velocity_norm(gen, states[j], 2, q),
                         height_norm(gen, ds.h, 2.0 - 1.0 / q),
                         height_norm(gen, states[j].h, 3.0 - 1.0 / q),
                         eta_h1(gen, F.segment(0, static_cast<Eigen::Index>(n)), q),
                         fnorm,
                         height_norm(gen, F(static_cast<Eigen::Index>(gen.h_offset())), 2.0 - 1.0 / q)};
    }
    for (std::size_t col = 0; col < rep.columns.size(); ++col) {
        std::vector<double> v(J);
        for (std::size_t j = 0; j < J; ++j) v[j] = rep.series[j][col];
        const double norm = uniform_time_norm(v, dt, gamma0, p);
        (col < 7 ? rep.lhs : rep.rhs) += norm;
    }
    rep.ratio = rep.rhs > 0 ? rep.lhs / rep.rhs : 0.0;
    return rep;
}

}  // namespace fslab
