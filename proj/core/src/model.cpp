#include "wbomd/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace wbomd {

namespace {

void require_symmetric(const Eigen::MatrixXd& m, double tol)
{
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > tol * scale)
        throw std::invalid_argument("matrix is not symmetric (asymmetry " +
                                    std::to_string(asym) + ")");
}

// Parameters of the two-level avoided-crossing family.  The x -+ r(x)
// combinations are evaluated in cancellation-free form so the eigenvector
// components stay accurate far from the crossing.
struct AvoidedCrossing {
    double delta, a, b;

    double r(double x) const { return std::hypot(delta, x); }

    double lower(double x) const { return x * x - r(x) + a * std::cos(b * x) - 1.0; }
    double upper(double x) const { return x * x + r(x); }

    // t = (x - r)/delta < 0 and s = (x + r)/delta > 0; t*s = -1.
    double t(double x) const { return x > 0.0 ? -delta / (x + r(x)) : (x - r(x)) / delta; }
    double s(double x) const { return x < 0.0 ? delta / (r(x) - x) : (x + r(x)) / delta; }

    void eigen(double x, Eigen::VectorXd& values, Eigen::MatrixXd& vectors) const
    {
        values.resize(2);
        values[0] = lower(x);
        values[1] = upper(x);
        const double tv = t(x), sv = s(x);
        const double n1 = std::sqrt(1.0 + tv * tv);
        const double n2 = std::sqrt(1.0 + sv * sv);
        vectors.resize(2, 2);
        // Column signs already satisfy the convention: -t and s are positive.
        vectors(0, 0) = -tv / n1;
        vectors(1, 0) = -1.0 / n1;
        vectors(0, 1) = sv / n2;
        vectors(1, 1) = 1.0 / n2;
    }

    Eigen::MatrixXd value(double x) const
    {
        Eigen::VectorXd values;
        Eigen::MatrixXd vectors;
        eigen(x, values, vectors);
        return vectors * values.asDiagonal() * vectors.transpose();
    }

    double force(double x, int j) const
    {
        const double xr = x / r(x);
        if (j == 1)
            return -(2.0 * x - xr - a * b * std::sin(b * x));
        return -(2.0 * x + xr);
    }
};

} // namespace

Eigenpair2 eig2(const Eigen::Matrix2d& m)
{
    require_symmetric(m, 1e-12);
    const double alpha = m(0, 0), beta = m(1, 1), gamma = m(0, 1);

    Eigenpair2 out;
    if (gamma == 0.0) {
        if (alpha <= beta) {
            out.values << alpha, beta;
            out.vectors = Eigen::Matrix2d::Identity();
        } else {
            out.values << beta, alpha;
            out.vectors << 0, 1, 1, 0;
        }
        return out;
    }

    const double disc = std::hypot(alpha - beta, 2.0 * gamma);
    const double lo = 0.5 * ((alpha + beta) - disc);
    const double hi = 0.5 * ((alpha + beta) + disc);
    out.values << lo, hi;

    // Eigenvector of the top eigenvalue from the numerically larger residual
    // row; its exact 90-degree rotation spans the other eigenspace.
    Eigen::Vector2d top;
    if (alpha <= beta)
        top << gamma, hi - alpha;
    else
        top << hi - beta, gamma;
    top.normalize();
    out.vectors.col(0) << top.y(), -top.x();
    out.vectors.col(1) = top;
    apply_sign_convention(out.vectors);
    return out;
}

void apply_sign_convention(Eigen::Ref<Eigen::MatrixXd> vectors, double tol)
{
    for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
        Eigen::Index lead = -1;
        for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
            if (std::abs(vectors(r, c)) > tol) {
                lead = r;
                break;
            }
        }
        if (lead < 0) {
            vectors.col(c).cwiseAbs().maxCoeff(&lead);
        }
        if (vectors(lead, c) < 0.0)
            vectors.col(c) = -vectors.col(c);
    }
}

MatrixPotential MatrixPotential::from_callback(int dim, ValueFn evaluate)
{
    if (dim < 1)
        throw std::invalid_argument("MatrixPotential: dim must be positive");
    if (!evaluate)
        throw std::invalid_argument("MatrixPotential: evaluation callback required");
    MatrixPotential pot;
    pot.dim_ = dim;
    pot.value_ = [dim, evaluate](double x) {
        Eigen::MatrixXd v = evaluate(x);
        if (v.rows() != dim || v.cols() != dim)
            throw std::invalid_argument("MatrixPotential: callback returned wrong size");
        return v;
    };
    pot.eigen_ = [dim, value = pot.value_](double x, Eigen::VectorXd& values,
                                           Eigen::MatrixXd& vectors) {
        const Eigen::MatrixXd v = value(x);
        require_symmetric(v, 1e-12);
        if (dim == 1) {
            values.resize(1);
            values[0] = v(0, 0);
            vectors = Eigen::MatrixXd::Ones(1, 1);
            return;
        }
        if (dim == 2) {
            const Eigenpair2 pair = eig2(v);
            values = pair.values;
            vectors = pair.vectors;
            return;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(v);
        if (solver.info() != Eigen::Success)
            throw NumericalError("MatrixPotential: dense eigensolve failed at x = " +
                                 std::to_string(x));
        values = solver.eigenvalues();
        vectors = solver.eigenvectors();
        apply_sign_convention(vectors);
    };
    return pot;
}

MatrixPotential MatrixPotential::scalar(std::function<double(double)> lambda)
{
    return from_callback(1, [lambda = std::move(lambda)](double x) {
        Eigen::MatrixXd v(1, 1);
        v(0, 0) = lambda(x);
        return v;
    });
}

MatrixPotential MatrixPotential::scalar(std::function<double(double)> lambda,
                                        std::function<double(double)> dlambda)
{
    MatrixPotential pot = scalar(std::move(lambda));
    pot.force_ = [dlambda = std::move(dlambda)](double x, int) { return -dlambda(x); };
    return pot;
}

Eigen::VectorXd MatrixPotential::eigenvalues(double x) const
{
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
    eigen_(x, values, vectors);
    return values;
}

void MatrixPotential::check_surface(int j) const
{
    if (j < 1 || j > dim_)
        throw std::invalid_argument("surface index " + std::to_string(j) +
                                    " out of range 1.." + std::to_string(dim_));
}

double MatrixPotential::surface(double x, int j) const
{
    check_surface(j);
    return eigenvalues(x)[j - 1];
}

double MatrixPotential::surface_force(double x, int j) const
{
    check_surface(j);
    if (force_)
        return force_(x, j);

    if (dim_ > 1) {
        const Eigen::VectorXd lam = eigenvalues(x);
        double gap = std::numeric_limits<double>::infinity();
        if (j > 1)
            gap = std::min(gap, lam[j - 1] - lam[j - 2]);
        if (j < dim_)
            gap = std::min(gap, lam[j] - lam[j - 1]);
        if (gap < 1e-10)
            throw NumericalError("surface derivative ill-defined: gap " +
                                 std::to_string(gap) + " below 1e-10 at x = " +
                                 std::to_string(x));
    }
    const double h = 1e-5;
    return -(surface(x + h, j) - surface(x - h, j)) / (2.0 * h);
}

double MatrixPotential::parameter(const std::string& name) const
{
    const auto it = params_.find(name);
    if (it == params_.end())
        throw std::invalid_argument("MatrixPotential: no parameter named '" + name + "'");
    return it->second;
}

MatrixPotential build_avoided_crossing(double delta, double a, double b)
{
    if (!(delta > 0.0))
        throw std::invalid_argument("build_avoided_crossing: delta must be > 0 "
                                    "(eigenvector formula divides by delta), got " +
                                    std::to_string(delta));
    const AvoidedCrossing fam{delta, a, b};
    MatrixPotential pot;
    pot.dim_ = 2;
    pot.params_ = {{"delta", delta}, {"a", a}, {"b", b}};
    pot.value_ = [fam](double x) { return fam.value(x); };
    pot.eigen_ = [fam](double x, Eigen::VectorXd& values, Eigen::MatrixXd& vectors) {
        fam.eigen(x, values, vectors);
    };
    pot.force_ = [fam](double x, int j) { return fam.force(x, j); };
    return pot;
}

} // namespace wbomd
