#pragma once

// Base-point normalization G = F'(x0)^{-1} F. The Jacobian at x0 is
// factorized exactly once; G is realized as wrapped evaluators, never as a
// separate problem. Newton steps through G and through F coincide, so the
// preconditioner changes the constants (b, L) but not the iteration.

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <utility>

#include <Eigen/Dense>

#include "kantsolve/errors.hpp"
#include "kantsolve/problem.hpp"

namespace kantsolve {

class PreconditionedSystem {
public:
    PreconditionedSystem(ProblemSpec base, VectorNormKind norm)
        : base_(std::move(base)), norm_(norm) {
        const Matrix J0 = jacobian_at(base_, base_.x0, norm_);
        Eigen::JacobiSVD<Matrix> svd(J0);
        const double smax = svd.singularValues()(0);
        const double smin = svd.singularValues()(base_.dim - 1);
        cond_ = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
        if (!(cond_ <= 1.0 / (100.0 * kEps))) {
            throw SingularBasePoint("F'(x0) is singular or too ill-conditioned (cond ~ " +
                                    std::to_string(cond_) + ")");
        }
        lu_ = std::make_shared<Eigen::PartialPivLU<Matrix>>(J0);
    }

    const ProblemSpec& base() const { return base_; }
    VectorNormKind norm() const { return norm_; }
    const Vector& x0() const { return base_.x0; }
    double domain_radius() const { return base_.R; }
    double cond_estimate() const { return cond_; }

    /// G(x) = F'(x0)^{-1} F(x)
    Vector g_residual(const Vector& x) const { return lu_->solve(base_.residual(x)); }

    /// G'(x) = F'(x0)^{-1} F'(x); G'(x0) = I up to roundoff.
    Matrix g_jacobian(const Vector& x) const { return lu_->solve(jacobian_at(base_, x, norm_)); }

private:
    ProblemSpec base_;
    VectorNormKind norm_;
    std::shared_ptr<Eigen::PartialPivLU<Matrix>> lu_; // immutable after build
    double cond_ = 0.0;
};

inline PreconditionedSystem build(const ProblemSpec& ps,
                                  VectorNormKind norm = VectorNormKind::euclidean) {
    if (ps.dim <= 0 || !ps.residual) throw InvalidInput("build: problem has no evaluator");
    if (ps.x0.size() != ps.dim) throw InvalidInput("build: x0 dimension mismatch");
    if (!(ps.R > 0.0)) throw InvalidInput("build: domain radius R must be positive");
    return PreconditionedSystem(ps, norm);
}

/// Tight residual constant b = ||F'(x0)^{-1} F(x0)|| in the configured norm.
inline double compute_b(const PreconditionedSystem& pcs) {
    return vector_norm(pcs.g_residual(pcs.x0()), pcs.norm());
}

/// Sampled lower bound on the scaled Lipschitz constant over B[x0, radius]:
/// max over all pairs of sampled points of
/// ||G'(y) - G'(x)|| / ||y - x||. Deterministic given the seed. A sampled
/// quotient can only under-estimate L, so the result is used to reject
/// user-supplied values that are provably too small, never to certify.
inline double estimate_L(const PreconditionedSystem& pcs, double radius, int n_samples,
                         std::uint64_t seed) {
    if (radius > pcs.domain_radius()) {
        throw DomainViolation("estimate_L: radius exceeds the problem domain");
    }
    if (n_samples < 2) throw InvalidInput("estimate_L: need at least 2 sample points");
    std::mt19937_64 rng(seed);
    std::vector<Vector> pts;
    std::vector<Matrix> jacs;
    pts.reserve(n_samples);
    jacs.reserve(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        Vector x = detail::sample_in_ball(rng, pcs.x0(), radius, pcs.norm());
        jacs.push_back(pcs.g_jacobian(x));
        pts.push_back(std::move(x));
    }
    double best = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const double d = vector_norm(pts[i] - pts[j], pcs.norm());
            if (d <= 1e-14 * std::max(1.0, radius)) continue;
            best = std::max(best, operator_norm(jacs[i] - jacs[j], pcs.norm()) / d);
        }
    }
    return best;
}

} // namespace kantsolve
