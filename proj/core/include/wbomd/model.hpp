#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <string>

namespace wbomd {

/// Thrown when a numerical routine detects an ill-posed situation at run time
/// (gap collapse, quadrature underflow, diverged state, ...).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Eigendecomposition of a symmetric 2x2 matrix: ascending values, orthonormal
/// columns obeying the library-wide sign convention.
struct Eigenpair2 {
    Eigen::Vector2d values;
    Eigen::Matrix2d vectors;
};

/// Closed-form symmetric 2x2 eigensolve.  The second eigenvector is the exact
/// 90-degree rotation of the first, so the returned columns are orthonormal to
/// machine precision by construction.
Eigenpair2 eig2(const Eigen::Matrix2d& m);

/// Sign convention shared by every eigenvector field in the library: the first
/// component of each column whose magnitude exceeds the tolerance is made
/// positive.  With a fixed convention, eigenvector fields of smoothly varying
/// matrices are continuous wherever that leading component stays away from 0.
void apply_sign_convention(Eigen::Ref<Eigen::MatrixXd> vectors, double tol = 1e-12);

/// Position-dependent symmetric d x d potential matrix with its sorted
/// eigendecomposition ("adiabatic surfaces").  Surface indices j are 1-based
/// throughout the public API: surface 1 is the lowest.
class MatrixPotential {
public:
    using ValueFn = std::function<Eigen::MatrixXd(double)>;
    using EigenFn = std::function<void(double, Eigen::VectorXd&, Eigen::MatrixXd&)>;
    using ForceFn = std::function<double(double, int)>;

    /// Generic potential from an evaluation callback; eigendecomposition is
    /// numeric (closed form for d = 2, dense solver above).
    static MatrixPotential from_callback(int dim, ValueFn evaluate);

    /// Single-surface potential from a scalar function, optionally with its
    /// analytic derivative.
    static MatrixPotential scalar(std::function<double(double)> lambda);
    static MatrixPotential scalar(std::function<double(double)> lambda,
                                  std::function<double(double)> dlambda);

    int dim() const { return dim_; }

    /// V(x); always symmetric.
    Eigen::MatrixXd value(double x) const { return value_(x); }

    /// Ascending eigenvalues and sign-fixed orthonormal eigenvector columns.
    void eigen(double x, Eigen::VectorXd& values, Eigen::MatrixXd& vectors) const
    {
        eigen_(x, values, vectors);
    }

    Eigen::VectorXd eigenvalues(double x) const;

    /// lambda_j(x), 1-based surface index.
    double surface(double x, int j) const;

    /// -d lambda_j / dx: analytic when the family provides it, otherwise a
    /// central difference with step 1e-5.  Near-degenerate surfaces make the
    /// branch derivative ill-defined and raise NumericalError.
    double surface_force(double x, int j) const;

    bool has_analytic_force() const { return static_cast<bool>(force_); }

    /// Named construction parameter (e.g. "delta"); throws if absent.
    double parameter(const std::string& name) const;
    bool has_parameter(const std::string& name) const
    {
        return params_.count(name) != 0;
    }

private:
    friend MatrixPotential build_avoided_crossing(double, double, double);

    MatrixPotential() = default;
    void check_surface(int j) const;

    int dim_ = 0;
    ValueFn value_;
    EigenFn eigen_;
    ForceFn force_; // 1-based surface index; empty means finite differences
    std::map<std::string, double> params_;
};

/// Two-level family with an avoided crossing at x = 0 of gap 2*delta:
///   lambda_1(x) = x^2 - sqrt(delta^2 + x^2) + a*cos(b*x) - 1
///   lambda_2(x) = x^2 + sqrt(delta^2 + x^2)
/// Both the eigendecomposition and the surface forces are analytic.
MatrixPotential build_avoided_crossing(double delta, double a, double b);

} // namespace wbomd
