#pragma once

// Finite-dimensional nonlinear systems F: B[x0, R] subset R^n -> R^n, a small
// registry of builtin test problems with analytically known constants, and
// the norm machinery used by every certificate and bound check.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kantsolve/errors.hpp"
#include "kantsolve/majorant.hpp"

namespace kantsolve {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using ParamMap = std::map<std::string, double>;

enum class VectorNormKind { euclidean, max };

inline std::string to_string(VectorNormKind k) {
    return k == VectorNormKind::euclidean ? "euclidean" : "max";
}

inline double vector_norm(const Vector& v, VectorNormKind kind = VectorNormKind::euclidean) {
    return kind == VectorNormKind::euclidean ? v.norm() : v.lpNorm<Eigen::Infinity>();
}

/// Induced operator norm: largest singular value (euclidean) or maximum
/// absolute row sum (max).
inline double operator_norm(const Matrix& M, VectorNormKind kind = VectorNormKind::euclidean) {
    if (kind == VectorNormKind::max) return M.cwiseAbs().rowwise().sum().maxCoeff();
    return Eigen::JacobiSVD<Matrix>(M).singularValues()(0);
}

/// Smallest singular value; zero signals singularity. Equals 1/||M^{-1}||_2,
/// which lets inverse-norm bounds be tested without forming inverses.
inline double smallest_singular_value(const Matrix& M) {
    if (M.rows() != M.cols()) throw InvalidInput("smallest_singular_value: matrix not square");
    Eigen::JacobiSVD<Matrix> svd(M);
    return svd.singularValues()(M.rows() - 1);
}

/// A nonlinear system with base point x0 and domain B[x0, R]. The jacobian
/// evaluator is optional; jacobian_at falls back to central differences.
struct ProblemSpec {
    std::string name;
    int dim = 0;
    std::function<Vector(const Vector&)> residual;
    std::function<Matrix(const Vector&)> jacobian; // empty -> finite differences
    Vector x0;
    double R = 0.0;
    std::optional<double> known_L;    // scaled Lipschitz constant (euclidean norm)
    std::vector<Vector> known_roots;
    ParamMap params;
};

/// Central-difference Jacobian, column j from probes x +/- h_j e_j with
/// h_j = cbrt(eps) max(1, |x_j|). Probes must stay inside B[x0, R].
inline Matrix fd_jacobian(const ProblemSpec& ps, const Vector& x,
                          VectorNormKind norm = VectorNormKind::euclidean) {
    const double h0 = std::cbrt(kEps);
    Matrix J(ps.dim, ps.dim);
    for (int j = 0; j < ps.dim; ++j) {
        const double h = h0 * std::max(1.0, std::abs(x(j)));
        Vector xp = x, xm = x;
        xp(j) += h;
        xm(j) -= h;
        if (vector_norm(xp - ps.x0, norm) > ps.R || vector_norm(xm - ps.x0, norm) > ps.R) {
            throw DomainViolation("fd_jacobian: probe for column " + std::to_string(j) +
                                  " leaves B[x0, R]");
        }
        // the realized step xp(j) - xm(j) absorbs representation rounding
        J.col(j) = (ps.residual(xp) - ps.residual(xm)) / (xp(j) - xm(j));
    }
    return J;
}

inline Matrix jacobian_at(const ProblemSpec& ps, const Vector& x,
                          VectorNormKind norm = VectorNormKind::euclidean) {
    return ps.jacobian ? ps.jacobian(x) : fd_jacobian(ps, x, norm);
}

namespace detail {

inline double param_or(const ParamMap& params, const std::string& key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

/// Uniform sample from the ball of the given norm around `center`:
/// direction x radius^(1/n) scaling for the euclidean ball, per-coordinate
/// uniform for the max ball. Deterministic under a fixed engine state.
inline Vector sample_in_ball(std::mt19937_64& rng, const Vector& center, double radius,
                             VectorNormKind norm) {
    const int n = static_cast<int>(center.size());
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vector x(n);
    if (norm == VectorNormKind::max) {
        for (int i = 0; i < n; ++i) x(i) = center(i) + radius * (2.0 * unit(rng) - 1.0);
        return x;
    }
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector dir(n);
    double nrm = 0.0;
    do {
        for (int i = 0; i < n; ++i) dir(i) = gauss(rng);
        nrm = dir.norm();
    } while (nrm == 0.0);
    const double r = radius * std::pow(unit(rng), 1.0 / n);
    return center + (r / nrm) * dir;
}

inline Vector scalar_vec(double v) {
    Vector x(1);
    x(0) = v;
    return x;
}

} // namespace detail

/// Builtin registry. `params` carries problem constants plus, for scalar
/// problems, optional "x0" and "R" keys; the structured overload below
/// overrides x0/R for any dimension. Derived data (known_L, known_roots)
/// is computed from the final x0 and R.
inline ProblemSpec builtin(const std::string& name, const ParamMap& params,
                           std::optional<Vector> x0_override, std::optional<double> R_override) {
    using detail::param_or;
    using detail::scalar_vec;

    auto scalar_x0 = [&](double fallback) {
        if (x0_override) {
            if (x0_override->size() != 1) throw InvalidInput("builtin: x0 must be scalar");
            return (*x0_override)(0);
        }
        return param_or(params, "x0", fallback);
    };

    ProblemSpec ps;
    ps.name = name;
    ps.params = params;

    if (name == "scalar-majorant") {
        // F = f: the system that is its own majorant.
        const double b = param_or(params, "b", 0.25);
        const double L = param_or(params, "L", 1.0);
        if (L <= 0.0 || b < 0.0) throw InvalidInput("scalar-majorant: need b >= 0, L > 0");
        ps.dim = 1;
        ps.residual = [b, L](const Vector& x) {
            return detail::scalar_vec((0.5 * L) * x(0) * x(0) - x(0) + b);
        };
        ps.jacobian = [L](const Vector& x) {
            Matrix J(1, 1);
            J(0, 0) = L * x(0) - 1.0;
            return J;
        };
        const double x0 = scalar_x0(0.0);
        ps.x0 = scalar_vec(x0);
        ps.R = R_override ? *R_override : param_or(params, "R", 2.0 / L);
        const double fp0 = L * x0 - 1.0;
        if (fp0 != 0.0) ps.known_L = L / std::abs(fp0);
        const double disc = 1.0 - 2.0 * b * L;
        if (disc >= 0.0) {
            const double s = std::sqrt(disc);
            ps.known_roots = {scalar_vec(2.0 * b / (1.0 + s)), scalar_vec((1.0 + s) / L)};
        }
        return ps;
    }

    if (name == "scalar-sqrt") {
        const double c = param_or(params, "c", 2.0);
        ps.dim = 1;
        ps.residual = [c](const Vector& x) { return detail::scalar_vec(x(0) * x(0) - c); };
        ps.jacobian = [](const Vector& x) {
            Matrix J(1, 1);
            J(0, 0) = 2.0 * x(0);
            return J;
        };
        const double x0 = scalar_x0(1.5);
        ps.x0 = scalar_vec(x0);
        ps.R = R_override ? *R_override : param_or(params, "R", 1.0);
        // |G'(y) - G'(x)| = |y - x| / |x0| exactly, on the whole line.
        if (x0 != 0.0) ps.known_L = 1.0 / std::abs(x0);
        if (c > 0.0) {
            ps.known_roots = {scalar_vec(std::sqrt(c)), scalar_vec(-std::sqrt(c))};
        } else if (c == 0.0) {
            ps.known_roots = {scalar_vec(0.0)};
        }
        return ps;
    }

    if (name == "scalar-exp") {
        const double c = param_or(params, "c", 2.0);
        ps.dim = 1;
        ps.residual = [c](const Vector& x) { return detail::scalar_vec(std::exp(x(0)) - c); };
        ps.jacobian = [](const Vector& x) {
            Matrix J(1, 1);
            J(0, 0) = std::exp(x(0));
            return J;
        };
        const double x0 = scalar_x0(0.5);
        ps.x0 = scalar_vec(x0);
        ps.R = R_override ? *R_override : param_or(params, "R", 0.5);
        // sup over B[x0,R] of e^(x-x0) = e^R bounds the scaled Jacobian variation.
        ps.known_L = std::exp(ps.R);
        if (c > 0.0) ps.known_roots = {scalar_vec(std::log(c))};
        return ps;
    }

    if (name == "circle-line") {
        // F(x, y) = (x^2 + y^2 - 1, x - y): unit circle meets the diagonal.
        ps.dim = 2;
        ps.residual = [](const Vector& v) {
            Vector r(2);
            r(0) = v(0) * v(0) + v(1) * v(1) - 1.0;
            r(1) = v(0) - v(1);
            return r;
        };
        ps.jacobian = [](const Vector& v) {
            Matrix J(2, 2);
            J << 2.0 * v(0), 2.0 * v(1), 1.0, -1.0;
            return J;
        };
        Vector x0(2);
        if (x0_override) {
            if (x0_override->size() != 2) throw InvalidInput("circle-line: x0 must have dim 2");
            x0 = *x0_override;
        } else {
            x0 << param_or(params, "x0x", 1.0), param_or(params, "x0y", 0.0);
        }
        ps.x0 = x0;
        ps.R = R_override ? *R_override : param_or(params, "R", 1.0);
        // F'(x) - F'(y) is rank one with fixed left factor, so the scaled
        // Lipschitz constant is exact: sqrt(2)/|x + y| in the euclidean norm.
        const double sum = x0(0) + x0(1);
        if (sum != 0.0) ps.known_L = std::sqrt(2.0) / std::abs(sum);
        const double r = std::sqrt(0.5);
        Vector root1(2), root2(2);
        root1 << r, r;
        root2 << -r, -r;
        ps.known_roots = {root1, root2};
        return ps;
    }

    if (name == "discrete-bvp") {
        // u'' = u^3 - gamma on (0,1), u(0) = u(1) = 0, central differences on
        // n interior points. No analytic Lipschitz constant is stored; L is
        // estimated (or supplied) at run time.
        const int n = static_cast<int>(param_or(params, "n", 10.0));
        if (n < 1) throw InvalidInput("discrete-bvp: need n >= 1");
        const double gamma = param_or(params, "gamma", 1.0);
        const double h = 1.0 / (n + 1);
        const double ih2 = 1.0 / (h * h);
        ps.dim = n;
        ps.residual = [n, gamma, ih2](const Vector& u) {
            Vector r(n);
            for (int i = 0; i < n; ++i) {
                const double um = i > 0 ? u(i - 1) : 0.0;
                const double up = i + 1 < n ? u(i + 1) : 0.0;
                r(i) = (2.0 * u(i) - um - up) * ih2 + u(i) * u(i) * u(i) - gamma;
            }
            return r;
        };
        ps.jacobian = [n, ih2](const Vector& u) {
            Matrix J = Matrix::Zero(n, n);
            for (int i = 0; i < n; ++i) {
                J(i, i) = 2.0 * ih2 + 3.0 * u(i) * u(i);
                if (i > 0) J(i, i - 1) = -ih2;
                if (i + 1 < n) J(i, i + 1) = -ih2;
            }
            return J;
        };
        ps.x0 = x0_override ? *x0_override : Vector(Vector::Zero(n));
        if (ps.x0.size() != n) throw InvalidInput("discrete-bvp: x0 must have dim n");
        ps.R = R_override ? *R_override : param_or(params, "R", 1.0);
        return ps;
    }

    throw UnknownProblem("no builtin problem named '" + name + "'");
}

inline ProblemSpec builtin(const std::string& name, const ParamMap& params = {}) {
    return builtin(name, params, std::nullopt, std::nullopt);
}

inline std::vector<std::string> builtin_names() {
    return {"scalar-majorant", "scalar-sqrt", "scalar-exp", "circle-line", "discrete-bvp"};
}

} // namespace kantsolve
