#pragma once

// Scalar analytics of the quadratic majorant
//
//     f(t) = (L/2) t^2 - t + b,      b >= 0, L > 0, 2bL <= 1,
//
// whose Newton sequence from t0 = 0 dominates the Newton iteration of any
// system with residual bound b and scaled Lipschitz constant L. Everything
// downstream (certificates, stopping rules, bound checks) is driven by the
// quantities computed here.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "kantsolve/errors.hpp"

namespace kantsolve {

inline constexpr double kEps = std::numeric_limits<double>::epsilon();

/// The pair (b, L) defining the majorant. Validates the Kantorovich
/// hypotheses on construction: b >= 0, L > 0 and 2bL <= 1 (exact
/// floating-point comparison, no tolerance slack).
class MajorantParams {
public:
    MajorantParams(double b, double L) : b_(b), L_(L) {
        if (!std::isfinite(b) || !std::isfinite(L) || b < 0.0 || L <= 0.0) {
            throw InvalidInput("MajorantParams: need finite b >= 0 and L > 0, got b=" +
                               std::to_string(b) + " L=" + std::to_string(L));
        }
        if (2.0 * b * L > 1.0) {
            throw HypothesisViolated("MajorantParams: 2bL = " + std::to_string(2.0 * b * L) +
                                     " exceeds 1");
        }
    }

    double b() const { return b_; }
    double L() const { return L_; }

    /// True when 2bL is within 1e-12 of the strict/boundary threshold, where
    /// the classification below is numerically fragile.
    bool boundary_fragile() const { return std::abs(1.0 - 2.0 * b_ * L_) <= 1e-12; }

private:
    double b_;
    double L_;
};

/// Roots and derived constants of the majorant.
struct MajorantAnalysis {
    double t_star = 0.0;  ///< smaller root t*
    double t_star2 = 0.0; ///< larger root t**
    double theta = 0.0;   ///< root ratio t*/t** in [0, 1]
    double disc = 0.0;    ///< discriminant 1 - 2bL >= 0
    bool strict = false;  ///< 2bL < 1
    bool fragile = false; ///< |1 - 2bL| <= 1e-12
};

/// Newton trajectory of the majorant from t0 = 0.
struct MajorantTrajectory {
    std::vector<double> t;    ///< t_0 = 0, t_{k+1} = n_f(t_k); size k_max + 1
    std::vector<double> gaps; ///< t* - t_k, same length
    int k_max = 0;
};

inline double f_eval(const MajorantParams& p, double t) {
    return (0.5 * p.L()) * t * t - t + p.b();
}

inline double f_prime(const MajorantParams& p, double t) { return p.L() * t - 1.0; }

/// Roots via the cancellation-free form t* = 2b/(1 + sqrt(1-2bL)). When the
/// discriminant is exactly zero the two roots are pinned equal so that the
/// boundary classification and the root geometry cannot disagree at ulp level.
inline MajorantAnalysis analyze(const MajorantParams& p) {
    MajorantAnalysis a;
    a.disc = 1.0 - 2.0 * p.b() * p.L();
    a.fragile = p.boundary_fragile();
    const double s = std::sqrt(a.disc);
    a.t_star = 2.0 * p.b() / (1.0 + s);
    a.strict = a.disc > 0.0;
    a.t_star2 = a.strict ? (1.0 + s) / p.L() : a.t_star;
    a.theta = a.strict ? a.t_star / a.t_star2 : 1.0;
    return a;
}

namespace detail {

/// Guard band keeping callers away from t*, where f'(t) loses its sign
/// margin: arguments with t* - t below this are rejected.
inline double root_guard(double t_star) { return 4.0 * kEps * std::max(1.0, t_star); }

inline void require_below_root(double t, double t_star, const char* who) {
    if (!(t >= 0.0) || !(t < t_star - root_guard(t_star))) {
        throw DomainError(std::string(who) + ": t = " + std::to_string(t) +
                          " outside [0, t*), t* = " + std::to_string(t_star));
    }
}

/// One majorant Newton step expressed in the gap g = t* - t:
///
///     g_next = L g^2 / (2 (s + L g)),        s = sqrt(1 - 2bL),
///
/// using the identities 1 - L t* = s and t* - n_f(t) = L (t*-t)^2 / (-2 f'(t)).
/// All quantities are positive, so the update has no cancellation; the direct
/// form t - f(t)/f'(t) loses every digit once t is within ~sqrt(eps) of t*.
/// The half-gap clamp enforces g_next <= g/2, which holds in exact arithmetic
/// and keeps the boundary case (s = 0) an exact halving.
inline double gap_step(double L, double s, double g) {
    if (g <= 0.0) return 0.0;
    const double next = (L * g * g) / (2.0 * (s + L * g));
    return std::min(next, 0.5 * g);
}

/// theta^(2^k) by repeated squaring; underflows to zero harmlessly.
inline double theta_pow_2k(double theta, int k) {
    double q = theta;
    for (int i = 0; i < k; ++i) q *= q;
    return q;
}

} // namespace detail

/// Scalar Newton map n_f(t) = t - f(t)/f'(t) on [0, t*).
inline double newton_map(const MajorantParams& p, double t) {
    const MajorantAnalysis a = analyze(p);
    detail::require_below_root(t, a.t_star, "newton_map");
    const double s = std::sqrt(a.disc);
    const double g = a.t_star - t;
    return a.t_star - detail::gap_step(p.L(), s, g);
}

/// Quadratic contraction factor L/(-2 f'(t_k)) of the gap recursion at t_k.
inline double rate_factor(const MajorantParams& p, double t_k) {
    const MajorantAnalysis a = analyze(p);
    detail::require_below_root(t_k, a.t_star, "rate_factor");
    return p.L() / (-2.0 * f_prime(p, t_k));
}

/// Majorant sequence t_0 = 0, t_{k+1} = n_f(t_k), carried in gap form. The
/// gaps saturate at zero once they underflow; past that point t_k freezes at
/// t* instead of producing out-of-domain garbage.
inline MajorantTrajectory majorant_sequence(const MajorantParams& p, int k_max) {
    if (k_max < 0) throw InvalidInput("majorant_sequence: k_max must be >= 0");
    const MajorantAnalysis a = analyze(p);
    const double s = std::sqrt(a.disc);
    MajorantTrajectory traj;
    traj.k_max = k_max;
    traj.t.reserve(static_cast<std::size_t>(k_max) + 1);
    traj.gaps.reserve(static_cast<std::size_t>(k_max) + 1);
    double g = a.t_star;
    for (int k = 0; k <= k_max; ++k) {
        traj.gaps.push_back(g);
        traj.t.push_back(k == 0 ? 0.0 : a.t_star - g);
        g = detail::gap_step(p.L(), s, g);
    }
    return traj;
}

/// Closed-form gap t* - t_k. Strict case:
///
///     gap_k = theta^(2^k) / (1 - theta^(2^k)) * 2 sqrt(1-2bL) / L,
///
/// boundary case (2bL = 1) the algebraic limit t* 2^{-k}, computed by exact
/// binary scaling.
inline double closed_form_gap(const MajorantParams& p, int k) {
    if (k < 0) throw InvalidInput("closed_form_gap: k must be >= 0");
    const MajorantAnalysis a = analyze(p);
    if (k == 0) return a.t_star;
    if (!a.strict) return std::ldexp(a.t_star, -k);
    const double q = detail::theta_pow_2k(a.theta, k);
    if (q == 0.0) return 0.0;
    const double s = std::sqrt(a.disc);
    return q / (1.0 - q) * (2.0 * s / p.L());
}

/// Closed-form t_k; agrees with the recursive sequence to ~1e-12 relative.
inline double closed_form_t(const MajorantParams& p, int k) {
    if (k == 0) return 0.0;
    const MajorantAnalysis a = analyze(p);
    return a.t_star - closed_form_gap(p, k);
}

/// k-dependent Q-quadratic coefficient
///
///     (1 - theta^(2^k)) / (1 + theta^(2^k)) * L / (2 sqrt(1-2bL)),
///
/// defined for strict parameters only; equals rate_factor at t_k.
inline double quadratic_rate_coefficient(const MajorantParams& p, int k) {
    if (k < 0) throw InvalidInput("quadratic_rate_coefficient: k must be >= 0");
    const MajorantAnalysis a = analyze(p);
    if (!a.strict) {
        throw DomainError("quadratic_rate_coefficient: undefined at the boundary 2bL = 1");
    }
    const double q = detail::theta_pow_2k(a.theta, k);
    const double s = std::sqrt(a.disc);
    return (1.0 - q) / (1.0 + q) * p.L() / (2.0 * s);
}

/// Uniform Q-quadratic constant L / (2 sqrt(1-2bL)) (strict case).
inline double quadratic_coefficient(const MajorantParams& p) {
    const MajorantAnalysis a = analyze(p);
    if (!a.strict) {
        throw DomainError("quadratic_coefficient: undefined at the boundary 2bL = 1");
    }
    return p.L() / (2.0 * std::sqrt(a.disc));
}

} // namespace kantsolve
