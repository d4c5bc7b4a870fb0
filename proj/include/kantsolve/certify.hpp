#pragma once

// Kantorovich hypothesis check: given (b, L, R) decide whether a zero is
// guaranteed, and if so emit the guaranteed radii, rates and the a priori
// gap table t* - t_k.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kantsolve/errors.hpp"
#include "kantsolve/majorant.hpp"
#include "kantsolve/precondition.hpp"
#include "kantsolve/problem.hpp"

namespace kantsolve {

enum class CertStatus { certified_strict, certified_boundary, rejected };
enum class RejectReason { none, hypothesis_2bl, ball_outside_domain, singular_base_point };
enum class RateKind { q_linear, q_quadratic };

inline std::string to_string(CertStatus s) {
    switch (s) {
        case CertStatus::certified_strict: return "CERTIFIED_STRICT";
        case CertStatus::certified_boundary: return "CERTIFIED_BOUNDARY";
        default: return "REJECTED";
    }
}

inline std::string to_string(RejectReason r) {
    switch (r) {
        case RejectReason::hypothesis_2bl: return "HYPOTHESIS_2BL";
        case RejectReason::ball_outside_domain: return "BALL_OUTSIDE_DOMAIN";
        case RejectReason::singular_base_point: return "SINGULAR_BASE_POINT";
        default: return "NONE";
    }
}

inline std::string to_string(RateKind r) {
    return r == RateKind::q_linear ? "Q_LINEAR" : "Q_QUADRATIC";
}

struct Certificate {
    CertStatus status = CertStatus::rejected;
    RejectReason reason = RejectReason::none;
    double b = 0.0, L = 0.0, R = 0.0;
    std::optional<MajorantAnalysis> analysis; // absent only when 2bL > 1
    double existence_radius = std::numeric_limits<double>::quiet_NaN();  // t*
    double uniqueness_radius = std::numeric_limits<double>::quiet_NaN(); // t* or min(R, t**)
    bool uniqueness_open = false;
    RateKind rate = RateKind::q_linear;
    std::optional<double> quadratic_coefficient; // L / (2 sqrt(1-2bL)), strict only
    std::vector<double> predicted_gaps;          // t* - t_k, k = 0..k_max
    VectorNormKind norm = VectorNormKind::euclidean;
    std::vector<std::string> warnings;

    bool certified() const { return status != CertStatus::rejected; }
    MajorantParams params() const { return MajorantParams(b, L); }
};

/// Check the hypotheses for (b, L, R) and build the certificate. Guaranteed
/// conclusions on success: a zero x* exists in B[x0, t*], all iterates stay
/// in that ball, ||x* - x_k|| <= t* - t_k, the error halves every step, and
/// x* is the unique zero in B[x0, t*] (strict case: in the open ball of
/// radius min(R, t**) as well).
inline Certificate certify(double b, double L, double R,
                           VectorNormKind norm = VectorNormKind::euclidean, int k_max = 10) {
    if (!std::isfinite(b) || !std::isfinite(L) || !std::isfinite(R) || b < 0.0 || L <= 0.0 ||
        R <= 0.0 || k_max < 0) {
        throw InvalidInput("certify: need finite b >= 0, L > 0, R > 0, k_max >= 0");
    }
    Certificate cert;
    cert.b = b;
    cert.L = L;
    cert.R = R;
    cert.norm = norm;

    if (2.0 * b * L > 1.0) {
        cert.status = CertStatus::rejected;
        cert.reason = RejectReason::hypothesis_2bl;
        return cert;
    }
    const MajorantParams p(b, L);
    const MajorantAnalysis a = analyze(p);
    cert.analysis = a;
    if (a.fragile) {
        cert.warnings.push_back(
            "2bL is within 1e-12 of 1: the strict/boundary classification is numerically "
            "fragile");
    }
    if (a.t_star > R) {
        cert.status = CertStatus::rejected;
        cert.reason = RejectReason::ball_outside_domain;
        return cert;
    }

    cert.status = a.strict ? CertStatus::certified_strict : CertStatus::certified_boundary;
    cert.existence_radius = a.t_star;
    if (a.strict) {
        // Uniqueness holds in B[x0, rho] for every t* <= rho < t** with the
        // ball inside the domain; report the supremum with an open qualifier.
        cert.uniqueness_radius = std::min(R, a.t_star2);
        cert.uniqueness_open = true;
        cert.rate = RateKind::q_quadratic;
        cert.quadratic_coefficient = quadratic_coefficient(p);
    } else {
        cert.uniqueness_radius = a.t_star;
        cert.uniqueness_open = false;
        cert.rate = RateKind::q_linear;
    }
    cert.predicted_gaps.reserve(static_cast<std::size_t>(k_max) + 1);
    for (int k = 0; k <= k_max; ++k) cert.predicted_gaps.push_back(closed_form_gap(p, k));
    if (b == 0.0) {
        cert.warnings.push_back("b = 0: x0 is already a zero; existence radius is 0");
    }
    return cert;
}

/// Where the Lipschitz constant for certify_problem comes from. Sampling can
/// only certify lower bounds, so L is always an input; `estimate_guarded`
/// additionally runs the sampler and records a warning when the supplied
/// value is provably too small.
struct LipschitzSource {
    enum class Kind { supplied, known, estimate_guarded };
    Kind kind = Kind::known;
    double value = 0.0;

    static LipschitzSource supplied(double v) { return {Kind::supplied, v}; }
    static LipschitzSource known() { return {Kind::known, 0.0}; }
    static LipschitzSource estimate_guarded(double v) { return {Kind::estimate_guarded, v}; }
};

inline std::pair<PreconditionedSystem, Certificate> certify_problem(
    const ProblemSpec& ps, const LipschitzSource& source, int k_max = 10,
    VectorNormKind norm = VectorNormKind::euclidean, int n_samples = 64,
    std::uint64_t seed = 42) {
    PreconditionedSystem pcs = build(ps, norm);
    const double b = compute_b(pcs);
    std::vector<std::string> warnings;

    double L = 0.0;
    switch (source.kind) {
        case LipschitzSource::Kind::known:
            if (!ps.known_L) {
                throw InvalidInput("certify_problem: problem '" + ps.name +
                                   "' has no known Lipschitz constant; supply one");
            }
            L = *ps.known_L;
            if (norm == VectorNormKind::max && ps.dim > 1) {
                warnings.push_back(
                    "known_L is tabulated for the euclidean norm; its validity under the max "
                    "norm is not guaranteed");
            }
            break;
        case LipschitzSource::Kind::supplied:
            L = source.value;
            break;
        case LipschitzSource::Kind::estimate_guarded: {
            L = source.value;
            const double est = estimate_L(pcs, ps.R, n_samples, seed);
            if (est > L * (1.0 + 1e-9)) {
                warnings.push_back("supplied L = " + std::to_string(L) +
                                   " is provably too small: sampled lower bound " +
                                   std::to_string(est));
            }
            break;
        }
    }

    Certificate cert = certify(b, L, ps.R, norm, k_max);
    for (auto& w : warnings) cert.warnings.push_back(std::move(w));
    return {std::move(pcs), std::move(cert)};
}

} // namespace kantsolve
