#pragma once

// Newton iteration on the preconditioned system: pure undamped steps with a
// fresh LU factorization each time, trace capture of every quantity the
// bound checker needs, and the K(t) membership test.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kantsolve/certify.hpp"
#include "kantsolve/errors.hpp"
#include "kantsolve/majorant.hpp"
#include "kantsolve/precondition.hpp"

namespace kantsolve {

enum class StopReason {
    majorant_gap_tol,
    step_tol,
    kmax_reached,
    singular_jacobian,
    left_certified_ball
};

inline std::string to_string(StopReason r) {
    switch (r) {
        case StopReason::majorant_gap_tol: return "MAJORANT_GAP_TOL";
        case StopReason::step_tol: return "STEP_TOL";
        case StopReason::kmax_reached: return "KMAX_REACHED";
        case StopReason::singular_jacobian: return "SINGULAR_JACOBIAN";
        default: return "LEFT_CERTIFIED_BALL";
    }
}

struct StopCriteria {
    double majorant_tol = 1e-12; ///< stop when t* - t_k <= tol (a priori bound on ||x* - x_k||)
    double step_tol = 1e-14;     ///< stop when ||x_{k+1} - x_k|| <= tol
    int k_max = 100;

    void validate() const {
        if (!(majorant_tol > 0.0) || !(step_tol > 0.0) || k_max < 1) {
            throw InvalidInput("StopCriteria: tolerances must be positive and k_max >= 1");
        }
    }
};

struct NewtonTrace {
    std::vector<Vector> iterates;
    std::vector<double> step_norms;        ///< ||x_{k+1} - x_k||, size iterates-1
    std::vector<double> residual_norms;    ///< ||G(x_k)||
    std::vector<double> sigma_mins;        ///< sigma_min(G'(x_k))
    std::vector<double> distances_from_x0; ///< ||x_k - x0||
    StopReason stop_reason = StopReason::kmax_reached;

    int final_index() const { return static_cast<int>(iterates.size()) - 1; }
};

namespace detail {

inline void require_inside_domain(const PreconditionedSystem& pcs, const Vector& x,
                                  const char* who) {
    if (vector_norm(x - pcs.x0(), pcs.norm()) > pcs.domain_radius()) {
        throw DomainViolation(std::string(who) + ": point outside B[x0, R]");
    }
}

inline bool numerically_singular(const Matrix& J, double sigma_min) {
    // negated comparison so a zero (or NaN) Jacobian counts as singular
    return !(sigma_min > 100.0 * kEps * operator_norm(J, VectorNormKind::euclidean));
}

} // namespace detail

/// One Newton step x - G'(x)^{-1} G(x) through a fresh LU factorization of
/// G'(x). By affine invariance this equals the step through F.
inline Vector newton_step(const PreconditionedSystem& pcs, const Vector& x) {
    detail::require_inside_domain(pcs, x, "newton_step");
    const Matrix J = pcs.g_jacobian(x);
    const double smin = smallest_singular_value(J);
    if (detail::numerically_singular(J, smin)) {
        throw SingularJacobian("newton_step: G'(x) numerically singular (sigma_min = " +
                               std::to_string(smin) + ")");
    }
    return x - Eigen::PartialPivLU<Matrix>(J).solve(pcs.g_residual(x));
}

/// Run Newton from x0 under a certificate. Stop priority at each iterate:
/// leaving the certified ball (a diagnostic: the theorem forbids it, so it
/// indicts the inputs), then the a priori majorant gap, then the a posteriori
/// step size, then the iteration cap. A singular Jacobian is recorded as a
/// stop reason rather than thrown.
inline NewtonTrace solve(const PreconditionedSystem& pcs, const Certificate& cert,
                         const StopCriteria& stop = {}) {
    if (!cert.certified()) {
        throw InvalidInput("solve: certificate status is " + to_string(cert.status));
    }
    stop.validate();
    const MajorantParams p = cert.params();
    const double t_star = cert.analysis->t_star;
    const double ball_slack = 64.0 * kEps * std::max(1.0, t_star);

    NewtonTrace trace;
    Vector x = pcs.x0();
    bool step_was_small = false;
    for (int k = 0;; ++k) {
        const Vector r = pcs.g_residual(x);
        const Matrix J = pcs.g_jacobian(x);
        const double smin = smallest_singular_value(J);
        const double dist = vector_norm(x - pcs.x0(), pcs.norm());
        trace.iterates.push_back(x);
        trace.residual_norms.push_back(vector_norm(r, pcs.norm()));
        trace.sigma_mins.push_back(smin);
        trace.distances_from_x0.push_back(dist);

        if (dist >= t_star + ball_slack) {
            trace.stop_reason = StopReason::left_certified_ball;
            break;
        }
        if (closed_form_gap(p, k) <= stop.majorant_tol) {
            trace.stop_reason = StopReason::majorant_gap_tol;
            break;
        }
        if (step_was_small) {
            trace.stop_reason = StopReason::step_tol;
            break;
        }
        if (k == stop.k_max) {
            trace.stop_reason = StopReason::kmax_reached;
            break;
        }
        if (detail::numerically_singular(J, smin)) {
            trace.stop_reason = StopReason::singular_jacobian;
            break;
        }
        const Vector step = Eigen::PartialPivLU<Matrix>(J).solve(r);
        const double step_norm = vector_norm(step, pcs.norm());
        trace.step_norms.push_back(step_norm);
        step_was_small = step_norm <= stop.step_tol;
        x -= step;
    }
    return trace;
}

/// Membership in the good region K(t) = { x in B[x0, t] : ||G(x)|| <= f(t) }.
/// The residual is the preconditioned one, matching the normalization
/// F'(x0) = I under which the majorant constants are stated.
inline bool k_membership(const PreconditionedSystem& pcs, const Certificate& cert,
                         const Vector& x, double t) {
    if (!cert.certified()) {
        throw InvalidInput("k_membership: certificate status is " + to_string(cert.status));
    }
    const double t_star = cert.analysis->t_star;
    if (!(t >= 0.0) || !(t < t_star)) {
        throw DomainError("k_membership: t = " + std::to_string(t) + " outside [0, t*)");
    }
    const MajorantParams p = cert.params();
    const double ball_slack = 4.0 * kEps * std::max(1.0, t);
    const double residual_slack = 64.0 * kEps * std::max(1.0, cert.b);
    return vector_norm(x - pcs.x0(), pcs.norm()) <= t + ball_slack &&
           vector_norm(pcs.g_residual(x), pcs.norm()) <= f_eval(p, t) + residual_slack;
}

} // namespace kantsolve
