#pragma once

// Checks every inequality the convergence theory asserts, along an actual
// Newton trace and by sampling, producing a named pass/fail report with
// margins. The unknown limit x* is replaced by the final iterate; every
// check touching it has its slack inflated by the terminal majorant gap,
// which bounds the proxy error, so roundoff and proxy error can never cause
// a false failure while genuine violations (which are problem-scale, not
// eps-scale) still trip.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "kantsolve/certify.hpp"
#include "kantsolve/errors.hpp"
#include "kantsolve/majorant.hpp"
#include "kantsolve/newton.hpp"
#include "kantsolve/precondition.hpp"

namespace kantsolve {

enum class CheckId {
    step_vs_gap,      ///< ||x_{k+1} - x_k||            <= t_{k+1} - t_k
    tail_envelope,    ///< ||x* - x_k||                 <= t* - t_k
    q_linear,         ///< ||x* - x_{k+1}||             <= (1/2) ||x* - x_k||
    q_quadratic,      ///< ||x* - x_{k+1}||             <= C_k ||x* - x_k||^2 (strict)
    ratio_rate,       ///< ||x* - x_{k+1}||             <= gap ratio * ||x* - x_k||^2
    k_membership,     ///< x_k in K(t_k): ball and residual parts
    inv_norm,         ///< sigma_min(G'(x))             >= |f'(t)| on B(x0, t)
    linearization,    ///< ||G(y) - G(x) - G'(x)(y-x)|| <= (L/2) ||y - x||^2
    uniqueness_rate,  ///< contraction of ||y - x_k|| for known roots inside B[x0, t*]
    uniqueness_cross, ///< known roots outside stay outside the uniqueness region
};

inline std::string to_string(CheckId id) {
    switch (id) {
        case CheckId::step_vs_gap: return "STEP_VS_GAP";
        case CheckId::tail_envelope: return "TAIL_ENVELOPE";
        case CheckId::q_linear: return "Q_LINEAR";
        case CheckId::q_quadratic: return "Q_QUADRATIC";
        case CheckId::ratio_rate: return "RATIO_RATE";
        case CheckId::k_membership: return "K_MEMBERSHIP";
        case CheckId::inv_norm: return "INV_NORM";
        case CheckId::linearization: return "LINEARIZATION";
        case CheckId::uniqueness_rate: return "UNIQUENESS_RATE";
        default: return "UNIQUENESS_CROSS";
    }
}

/// One verified inequality lhs <= rhs; passes when margin >= -slack.
struct BoundCheck {
    CheckId id;
    int k = 0; ///< iteration or sample index
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    double slack = 0.0;
    bool pass = false;
};

struct BoundReport {
    std::vector<BoundCheck> checks;
    bool all_pass = true;
    std::vector<std::string> notices;

    void add(BoundCheck c) {
        all_pass = all_pass && c.pass;
        checks.push_back(c);
    }
    void add(const std::vector<BoundCheck>& cs) {
        for (const auto& c : cs) add(c);
    }
};

namespace detail {

/// extra_slack carries the x*-proxy error bound on top of the roundoff term.
inline BoundCheck make_check(CheckId id, int k, double lhs, double rhs,
                             double extra_slack = 0.0) {
    BoundCheck c;
    c.id = id;
    c.k = k;
    c.lhs = lhs;
    c.rhs = rhs;
    c.margin = rhs - lhs;
    c.slack = 64.0 * kEps * std::max({1.0, std::abs(lhs), std::abs(rhs)}) + extra_slack;
    c.pass = c.margin >= -c.slack;
    return c;
}

inline void sort_report(std::vector<BoundCheck>& checks) {
    std::stable_sort(checks.begin(), checks.end(), [](const BoundCheck& a, const BoundCheck& b) {
        if (a.id != b.id) return static_cast<int>(a.id) < static_cast<int>(b.id);
        return a.k < b.k;
    });
}

} // namespace detail

/// Single-pair linearization error check, ||G(y) - G(x) - G'(x)(y-x)|| against
/// (L/2)||y - x||^2, in the configured norm.
inline BoundCheck linearization_pair(const PreconditionedSystem& pcs, double L, const Vector& x,
                                     const Vector& y, int index = 0) {
    const Vector err = pcs.g_residual(y) - pcs.g_residual(x) - pcs.g_jacobian(x) * (y - x);
    const double d = vector_norm(y - x, pcs.norm());
    return detail::make_check(CheckId::linearization, index, vector_norm(err, pcs.norm()),
                              0.5 * L * d * d);
}

/// Single-point derivative bound check at x in B(x0, t):
/// sigma_min(G'(x)) >= |f'(t)|, i.e. ||G'(x)^{-1}||_2 <= 1/|f'(t)|.
inline BoundCheck inverse_bound_at(const PreconditionedSystem& pcs, const MajorantParams& p,
                                   double t, const Vector& x, int index = 0) {
    return detail::make_check(CheckId::inv_norm, index, -f_prime(p, t),
                              smallest_singular_value(pcs.g_jacobian(x)));
}

/// Trace-wise checks: per-step gap domination, the tail envelope, the
/// Q-linear and (strict case) Q-quadratic rates, the gap-ratio rate, and
/// K(t_k) membership of every iterate.
inline BoundReport verify_trace(const PreconditionedSystem& pcs, const Certificate& cert,
                                const NewtonTrace& trace) {
    if (!cert.certified()) {
        throw InvalidInput("verify_trace: certificate status is " + to_string(cert.status));
    }
    if (trace.iterates.size() < 2) {
        throw InsufficientTrace("verify_trace: need at least 2 iterates, got " +
                                std::to_string(trace.iterates.size()));
    }
    const MajorantParams p = cert.params();
    const int K = trace.final_index();
    const Vector& proxy = trace.iterates.back(); // stands in for x*
    std::vector<double> gap(K + 1);
    for (int k = 0; k <= K; ++k) gap[k] = closed_form_gap(p, k);
    const double proxy_err = gap[K]; // ||x* - x_K|| <= t* - t_K

    std::vector<double> e(K + 1); // ||proxy - x_k||
    for (int k = 0; k <= K; ++k) e[k] = vector_norm(proxy - trace.iterates[k], pcs.norm());

    BoundReport report;
    for (int k = 0; k < K; ++k) {
        report.add(detail::make_check(CheckId::step_vs_gap, k, trace.step_norms[k],
                                      gap[k] - gap[k + 1]));
    }
    for (int k = 0; k <= K; ++k) {
        report.add(detail::make_check(CheckId::tail_envelope, k, e[k], gap[k], proxy_err));
    }
    for (int k = 0; k < K; ++k) {
        report.add(detail::make_check(CheckId::q_linear, k, e[k + 1], 0.5 * e[k],
                                      1.5 * proxy_err));
    }
    if (cert.analysis->strict) {
        for (int k = 0; k < K; ++k) {
            const double c = quadratic_rate_coefficient(p, k);
            const double extra = proxy_err + c * (2.0 * e[k] + proxy_err) * proxy_err;
            report.add(
                detail::make_check(CheckId::q_quadratic, k, e[k + 1], c * e[k] * e[k], extra));
        }
    }
    for (int k = 0; k < K; ++k) {
        if (gap[k] <= 0.0) break; // beyond majorant resolution
        const double ratio = gap[k + 1] / (gap[k] * gap[k]);
        const double extra = proxy_err + ratio * (2.0 * e[k] + proxy_err) * proxy_err;
        report.add(
            detail::make_check(CheckId::ratio_rate, k, e[k + 1], ratio * e[k] * e[k], extra));
    }
    for (int k = 0; k <= K; ++k) {
        const double t_k = closed_form_t(p, k);
        report.add(detail::make_check(CheckId::k_membership, k, trace.distances_from_x0[k], t_k));
        report.add(detail::make_check(CheckId::k_membership, k, trace.residual_norms[k],
                                      f_eval(p, t_k)));
    }
    detail::sort_report(report.checks);
    return report;
}

/// Derivative bound sweep over points sampled in B(x0, t), 0 <= t < t*.
/// Euclidean norm only: there ||M^{-1}|| = 1/sigma_min is exactly computable;
/// under the max norm the caller gets an empty list and should note the skip.
inline std::vector<BoundCheck> check_inverse_bound(const PreconditionedSystem& pcs,
                                                   const Certificate& cert, double t,
                                                   int n_samples, std::uint64_t seed) {
    if (!cert.certified()) {
        throw InvalidInput("check_inverse_bound: certificate status is " +
                           to_string(cert.status));
    }
    const double t_star = cert.analysis->t_star;
    if (!(t >= 0.0) || !(t < t_star || (t == 0.0 && t_star == 0.0))) {
        throw DomainError("check_inverse_bound: t = " + std::to_string(t) + " outside [0, t*)");
    }
    if (pcs.norm() != VectorNormKind::euclidean) return {};
    const MajorantParams p = cert.params();
    std::vector<BoundCheck> checks;
    if (t == 0.0) {
        // B(x0, 0) degenerates to the base point itself, where G'(x0) = I.
        checks.push_back(inverse_bound_at(pcs, p, t, pcs.x0(), 0));
        return checks;
    }
    std::mt19937_64 rng(seed);
    for (int i = 0; i < n_samples; ++i) {
        const Vector x = detail::sample_in_ball(rng, pcs.x0(), t, pcs.norm());
        checks.push_back(inverse_bound_at(pcs, p, t, x, i));
    }
    return checks;
}

/// Linearization error sweep over pairs x in B(x0, R), y in B[x0, R].
inline std::vector<BoundCheck> check_linearization(const PreconditionedSystem& pcs, double L,
                                                   int n_pairs, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<BoundCheck> checks;
    checks.reserve(n_pairs);
    const double R = pcs.domain_radius();
    for (int i = 0; i < n_pairs; ++i) {
        const Vector x = detail::sample_in_ball(rng, pcs.x0(), R, pcs.norm());
        const Vector y = detail::sample_in_ball(rng, pcs.x0(), R, pcs.norm());
        checks.push_back(linearization_pair(pcs, L, x, y, i));
    }
    return checks;
}

/// Uniqueness checks against the problem's known roots. Roots inside
/// B[x0, t*] must obey the per-step contraction and the gap envelope; roots
/// outside must keep distance at least the certified uniqueness radius.
/// Returns an empty list when the problem declares no roots.
inline std::vector<BoundCheck> uniqueness_checks(const PreconditionedSystem& pcs,
                                                 const Certificate& cert,
                                                 const NewtonTrace& trace) {
    if (!cert.certified()) {
        throw InvalidInput("uniqueness_checks: certificate status is " + to_string(cert.status));
    }
    const auto& roots = pcs.base().known_roots;
    if (roots.empty()) return {};
    const MajorantParams p = cert.params();
    const double t_star = cert.analysis->t_star;
    const int K = trace.final_index();
    std::vector<double> gap(K + 1);
    for (int k = 0; k <= K; ++k) gap[k] = closed_form_gap(p, k);

    std::vector<BoundCheck> checks;
    for (const Vector& root : roots) {
        const double dist = vector_norm(root - pcs.x0(), pcs.norm());
        const bool inside = dist <= t_star + 64.0 * kEps * std::max(1.0, t_star);
        if (!inside) {
            checks.push_back(
                detail::make_check(CheckId::uniqueness_cross, 0, cert.uniqueness_radius, dist));
            continue;
        }
        std::vector<double> d(K + 1);
        for (int k = 0; k <= K; ++k) d[k] = vector_norm(root - trace.iterates[k], pcs.norm());
        for (int k = 0; k <= K; ++k) {
            checks.push_back(detail::make_check(CheckId::uniqueness_rate, k, d[k], gap[k]));
        }
        for (int k = 0; k < K; ++k) {
            if (gap[k] <= 0.0) break;
            const double ratio = gap[k + 1] / (gap[k] * gap[k]);
            checks.push_back(detail::make_check(CheckId::uniqueness_rate, k, d[k + 1],
                                                ratio * d[k] * d[k]));
        }
    }
    detail::sort_report(checks);
    return checks;
}

struct VerifyOptions {
    int n_samples = 32;          ///< points for the inverse-norm sweep
    int n_pairs = 32;            ///< pairs for the linearization sweep
    std::uint64_t seed = 42;
    double inv_t_fraction = 0.5; ///< inverse bound tested at t = fraction * t*
};

/// Full verification: trace checks plus both sampling sweeps plus the
/// uniqueness checks, assembled into one deterministic report.
inline BoundReport full_verification(const PreconditionedSystem& pcs, const Certificate& cert,
                                     const NewtonTrace& trace, const VerifyOptions& opts = {}) {
    BoundReport report = verify_trace(pcs, cert, trace);
    const double t = opts.inv_t_fraction * cert.analysis->t_star;
    if (pcs.norm() == VectorNormKind::euclidean) {
        report.add(check_inverse_bound(pcs, cert, t, opts.n_samples, opts.seed));
    } else {
        report.notices.push_back(
            "INV_NORM skipped: the inverse bound is only exactly computable in the euclidean "
            "norm");
    }
    report.add(check_linearization(pcs, cert.L, opts.n_pairs, opts.seed + 1));
    if (pcs.base().known_roots.empty()) {
        report.notices.push_back("uniqueness checks skipped: no known roots declared");
    } else {
        report.add(uniqueness_checks(pcs, cert, trace));
    }
    detail::sort_report(report.checks);
    return report;
}

} // namespace kantsolve
