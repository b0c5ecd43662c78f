#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <memory>
#include <vector>

namespace fslab {

// Periodic box [-L, L)^dim with n points per axis and its FFT dual frequencies.
class TangentialGrid {
public:
    TangentialGrid(int dim, std::size_t n, double halfLength);

    int dim() const { return dim_; }
    std::size_t n() const { return n_; }
    double half_length() const { return L_; }
    double dx() const { return 2.0 * L_ / static_cast<double>(n_); }
    double dxi() const;
    std::size_t size() const;  // points = modes

    // Signed frequency index along one axis (FFT ordering).
    long signed_index(std::size_t k) const;
    std::array<double, 2> xi(std::size_t mode) const;
    std::array<double, 2> x(std::size_t point) const;
    std::array<std::size_t, 2> split(std::size_t flat) const;

private:
    int dim_;
    std::size_t n_;
    double L_;
};

// Chebyshev-Gauss-Lobatto nodes on [0, X], optionally clustered towards 0 by
// the algebraic map x = l (1 + t) / (1 + 2 l / X - t).
class NormalGrid {
public:
    NormalGrid(std::size_t n, double X, double mapLength = 0.0);

    std::size_t size() const { return x_.size(); }
    double length() const { return X_; }
    double map_length() const { return map_; }
    const std::vector<double>& nodes() const { return x_; }
    const std::vector<double>& weights() const { return w_; }  // Clenshaw-Curtis in x
    const Eigen::MatrixXd& D() const { return D_; }
    const Eigen::MatrixXd& D2() const { return D2_; }

    double to_reference(double x) const;  // t in [-1, 1]
    double to_physical(double t) const;
    // Barycentric interpolation row: values at x are row . nodal values.
    Eigen::RowVectorXd interpolation_row(double x) const;

private:
    std::size_t n_;
    double X_, map_;
    std::vector<double> t_, x_, w_, bary_;
    Eigen::MatrixXd D_, D2_;
};

// Default clustering length used by the solvers.
inline constexpr double kDefaultMapLength = 2.0;

using TangentialGridPtr = std::shared_ptr<const TangentialGrid>;
using NormalGridPtr = std::shared_ptr<const NormalGrid>;

// Nodes and weights of a composite 16-point Gauss-Legendre rule on [0, X] whose
// panels grow geometrically by `ratio` from width `first`.
struct QuadratureRule {
    std::vector<double> x, w;
};
QuadratureRule graded_gauss_legendre(double X, double first, double ratio);

}  // namespace fslab
