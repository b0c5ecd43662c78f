#include "fslab/grid.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>

#include "fslab/errors.hpp"

namespace fslab {

TangentialGrid::TangentialGrid(int dim, std::size_t n, double halfLength) : dim_(dim), n_(n), L_(halfLength) {
    if (dim != 1 && dim != 2) throw ShapeError("tangential dimension must be 1 or 2");
    if (n < 2 || (n & (n - 1)) != 0) throw ShapeError("tangential point count must be a power of two");
    if (!(halfLength > 0)) throw ParameterError("tangential half-length must be positive");
}

double TangentialGrid::dxi() const { return std::numbers::pi / L_; }

std::size_t TangentialGrid::size() const { return dim_ == 1 ? n_ : n_ * n_; }

long TangentialGrid::signed_index(std::size_t k) const {
    const long kk = static_cast<long>(k);
    const long nn = static_cast<long>(n_);
    return kk < nn / 2 ? kk : kk - nn;
}

std::array<std::size_t, 2> TangentialGrid::split(std::size_t flat) const {
    if (dim_ == 1) return {flat, 0};
    return {flat / n_, flat % n_};
}

std::array<double, 2> TangentialGrid::xi(std::size_t mode) const {
    const auto [a, b] = split(mode);
    const double s = dxi();
    if (dim_ == 1) return {s * static_cast<double>(signed_index(a)), 0.0};
    return {s * static_cast<double>(signed_index(a)), s * static_cast<double>(signed_index(b))};
}

std::array<double, 2> TangentialGrid::x(std::size_t point) const {
    const auto [a, b] = split(point);
    const double h = dx();
    if (dim_ == 1) return {-L_ + h * static_cast<double>(a), 0.0};
    return {-L_ + h * static_cast<double>(a), -L_ + h * static_cast<double>(b)};
}

NormalGrid::NormalGrid(std::size_t n, double X, double mapLength) : n_(n), X_(X), map_(mapLength) {
    if (n < 4) throw ShapeError("normal grid needs at least 4 nodes");
    if (!(X > 0)) throw ParameterError("normal truncation length must be positive");
    const double pi = std::numbers::pi;
    const std::size_t N = n - 1;
    t_.resize(n);
    x_.resize(n);
    bary_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        t_[i] = -std::cos(pi * static_cast<double>(i) / static_cast<double>(N));
        bary_[i] = (i % 2 ? -1.0 : 1.0) * ((i == 0 || i == N) ? 0.5 : 1.0);
    }
    t_[0] = -1.0;
    t_[N] = 1.0;
    if (N % 2 == 0) t_[N / 2] = 0.0;
    for (std::size_t i = 0; i < n; ++i) x_[i] = to_physical(t_[i]);
    x_[0] = 0.0;
    x_[N] = X_;

    // Differentiation in t, then chain rule.
    Eigen::MatrixXd Dt = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    auto c = [&](std::size_t i) { return (i == 0 || i == N) ? 2.0 : 1.0; };
    for (std::size_t i = 0; i < n; ++i) {
        double rowSum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double sign = ((i + j) % 2) ? -1.0 : 1.0;
            const double v = c(i) / c(j) * sign / (t_[i] - t_[j]);
            Dt(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            rowSum += v;
        }
        Dt(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = -rowSum;
    }
    Eigen::VectorXd dtdx(static_cast<Eigen::Index>(n));
    std::vector<double> dxdt(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (map_ > 0) {
            const double q = 1.0 + 2.0 * map_ / X_;
            dxdt[i] = map_ * (1.0 + q) / ((q - t_[i]) * (q - t_[i]));
        } else {
            dxdt[i] = 0.5 * X_;
        }
        dtdx(static_cast<Eigen::Index>(i)) = 1.0 / dxdt[i];
    }
    D_ = dtdx.asDiagonal() * Dt;
    D2_ = D_ * D_;

    // Clenshaw-Curtis weights on the reference interval.
    std::vector<double> wt(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double theta = pi * static_cast<double>(N - i) / static_cast<double>(N);
        double s = 0.0;
        for (std::size_t k = 1; k <= N / 2; ++k) {
            const double b = (2 * k == N) ? 1.0 : 2.0;
            s += b * std::cos(2.0 * static_cast<double>(k) * theta) / (4.0 * static_cast<double>(k * k) - 1.0);
        }
        const double ci = (i == 0 || i == N) ? 1.0 : 2.0;
        wt[i] = ci / static_cast<double>(N) * (1.0 - s);
    }
    w_.resize(n);
    for (std::size_t i = 0; i < n; ++i) w_[i] = wt[i] * dxdt[i];
}

double NormalGrid::to_physical(double t) const {
    if (map_ > 0) {
        const double q = 1.0 + 2.0 * map_ / X_;
        return map_ * (1.0 + t) / (q - t);
    }
    return 0.5 * X_ * (1.0 + t);
}

double NormalGrid::to_reference(double x) const {
    if (map_ > 0) {
        const double q = 1.0 + 2.0 * map_ / X_;
        return (q * x - map_) / (x + map_);
    }
    return 2.0 * x / X_ - 1.0;
}

Eigen::RowVectorXd NormalGrid::interpolation_row(double x) const {
    if (x < -1e-12 * X_ || x > X_ * (1.0 + 1e-12)) throw InterpolationError("normal coordinate outside [0, X]");
    const double t = to_reference(std::clamp(x, 0.0, X_));
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(n_));
    double denom = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        const double d = t - t_[i];
        if (d == 0.0) {
            row.setZero();
            row(static_cast<Eigen::Index>(i)) = 1.0;
            return row;
        }
        const double v = bary_[i] / d;
        row(static_cast<Eigen::Index>(i)) = v;
        denom += v;
    }
    return row / denom;
}

QuadratureRule graded_gauss_legendre(double X, double first, double ratio) {
    using GL = boost::math::quadrature::gauss<double, 16>;
    const auto& absc = GL::abscissa();  // non-negative half of the symmetric rule
    const auto& wts = GL::weights();
    QuadratureRule q;
    double a = 0.0;
    double width = first;
    while (a < X) {
        const double b = std::min(X, a + width);
        const double mid = 0.5 * (a + b);
        const double half = 0.5 * (b - a);
        for (std::size_t k = 0; k < absc.size(); ++k) {
            q.x.push_back(mid - half * absc[k]);
            q.w.push_back(half * wts[k]);
            if (absc[k] != 0.0) {
                q.x.push_back(mid + half * absc[k]);
                q.w.push_back(half * wts[k]);
            }
        }
        a = b;
        width *= ratio;
    }
    return q;
}

}  // namespace fslab
