#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <quadmath.h>
#include <vector>

#include "kantsolve/majorant.hpp"

using namespace kantsolve;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Oracle: the textbook root formula (1 - sqrt(1-2bL))/L evaluated in quad
// precision, where its cancellation is harmless.
double t_star_oracle(double b, double L) {
    const __float128 qb = b, qL = L;
    const __float128 t = (__float128(1) - sqrtq(__float128(1) - __float128(2) * qb * qL)) / qL;
    return static_cast<double>(t);
}

// Oracle: the Newton recursion on f carried directly in long double.
std::vector<long double> recursion_oracle(double b, double L, int k_max) {
    std::vector<long double> t{0.0L};
    long double x = 0.0L;
    for (int k = 0; k < k_max; ++k) {
        const long double f = 0.5L * L * x * x - x + b;
        const long double fp = static_cast<long double>(L) * x - 1.0L;
        x = x - f / fp;
        t.push_back(x);
    }
    return t;
}

const std::vector<double> kHalfBLGrid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99, 1.0};

} // namespace

TEST_CASE("f_eval and f_prime") {
    const MajorantParams p1(0.25, 1.0);
    CHECK(f_eval(p1, 0.0) == 0.25);
    const MajorantParams p2(0.5, 1.0);
    CHECK(f_eval(p2, 0.5) == 0.125);

    const MajorantAnalysis a = analyze(p1);
    CHECK_THAT(f_eval(p1, a.t_star), WithinAbs(0.0, 1e-8));

    CHECK(f_prime(p1, 0.0) == -1.0);
    CHECK(f_prime(p1, 0.25) == -0.75);
    CHECK(f_prime(MajorantParams(0.25, 2.0), 0.5) == 0.0);
}

TEST_CASE("construction validates the hypotheses") {
    CHECK_THROWS_AS(MajorantParams(0.6, 1.0), HypothesisViolated);
    // the 2bL <= 1 comparison is exact, no tolerance band
    CHECK_THROWS_AS(MajorantParams(0.5000000000000002, 1.0), HypothesisViolated);
    CHECK_NOTHROW(MajorantParams(0.5, 1.0));
    CHECK_THROWS_AS(MajorantParams(-0.1, 1.0), InvalidInput);
    CHECK_THROWS_AS(MajorantParams(0.25, 0.0), InvalidInput);
    CHECK_THROWS_AS(MajorantParams(0.25, -1.0), InvalidInput);

    CHECK(MajorantParams(0.5, 1.0).boundary_fragile());
    CHECK_FALSE(MajorantParams(0.25, 1.0).boundary_fragile());
}

TEST_CASE("analyze: strict case roots and ratio") {
    const MajorantAnalysis a = analyze(MajorantParams(0.25, 1.0));
    CHECK_THAT(a.t_star, WithinRel(0.2928932188134524, 1e-15));
    CHECK_THAT(a.t_star2, WithinRel(1.7071067811865475, 1e-15));
    CHECK_THAT(a.theta, WithinRel(0.1715728752538099, 1e-14));
    CHECK(a.strict);
    CHECK(a.disc == 0.5);

    // the computed values are genuine roots
    const MajorantParams p(0.25, 1.0);
    CHECK(std::abs(f_eval(p, a.t_star)) <= 4 * kEps * std::max(1.0, p.b()));
    CHECK(std::abs(f_eval(p, a.t_star2)) <= 4 * kEps * std::max(1.0, p.b()));
}

TEST_CASE("analyze: boundary and b = 0") {
    const MajorantAnalysis boundary = analyze(MajorantParams(0.5, 1.0));
    CHECK(boundary.t_star == 1.0);
    CHECK(boundary.t_star2 == 1.0);
    CHECK(boundary.theta == 1.0);
    CHECK_FALSE(boundary.strict);
    CHECK(boundary.fragile);

    const MajorantAnalysis zero = analyze(MajorantParams(0.0, 1.0));
    CHECK(zero.t_star == 0.0);
    CHECK(zero.t_star2 == 2.0);
    CHECK(zero.theta == 0.0);
    CHECK(zero.strict);
}

TEST_CASE("analyze invariants over a parameter grid") {
    for (const double half : kHalfBLGrid) {
        for (const double L : {0.5, 1.0, 3.0}) {
            const double b = half / (2.0 * L);
            const MajorantParams p(b, L);
            const MajorantAnalysis a = analyze(p);
            CAPTURE(b, L);
            CHECK(a.t_star >= 0.0);
            CHECK(a.t_star <= a.t_star2);
            CHECK(a.t_star <= 1.0 / L * (1 + 4 * kEps));
            CHECK(a.t_star2 <= 2.0 / L * (1 + 4 * kEps));
            CHECK((a.strict == (a.t_star < a.t_star2)));
            CHECK((a.strict == (a.theta < 1.0)));
        }
    }
}

TEST_CASE("newton_map examples and domain guard") {
    const MajorantParams p(0.25, 1.0);
    CHECK_THAT(newton_map(p, 0.0), WithinAbs(0.25, 1e-15));
    CHECK_THAT(newton_map(p, 0.25), WithinRel(7.0 / 24.0, 1e-14));
    const MajorantParams boundary(0.5, 1.0);
    CHECK(newton_map(boundary, 0.5) == 0.75);

    const double t_star = analyze(p).t_star;
    CHECK_THROWS_AS(newton_map(p, t_star), DomainError);
    CHECK_THROWS_AS(newton_map(p, t_star * (1 + 1e-12)), DomainError);
    CHECK_THROWS_AS(newton_map(p, -0.1), DomainError);
    CHECK_THROWS_AS(newton_map(p, std::nan("")), DomainError);
}

TEST_CASE("newton_map stays strictly inside (t, t*)") {
    for (const double half : kHalfBLGrid) {
        const MajorantParams p(half / 2.0, 1.0);
        const double t_star = analyze(p).t_star;
        for (int i = 0; i < 400; ++i) {
            const double t = t_star * i / 401.0;
            const double next = newton_map(p, t);
            CAPTURE(half, t);
            CHECK(next > t);
            CHECK(next <= t_star);
        }
    }
}

TEST_CASE("majorant_sequence examples") {
    const MajorantTrajectory strict = majorant_sequence(MajorantParams(0.25, 1.0), 2);
    REQUIRE(strict.t.size() == 3);
    CHECK(strict.t[0] == 0.0);
    CHECK_THAT(strict.t[1], WithinAbs(0.25, 1e-15));
    CHECK_THAT(strict.t[2], WithinRel(7.0 / 24.0, 1e-14));

    const MajorantTrajectory boundary = majorant_sequence(MajorantParams(0.5, 1.0), 3);
    CHECK(boundary.t == std::vector<double>{0.0, 0.5, 0.75, 0.875});

    const MajorantTrajectory zero = majorant_sequence(MajorantParams(0.0, 1.0), 2);
    CHECK(zero.t == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("trajectory invariants: monotone, below t*, halving gaps") {
    for (const double half : kHalfBLGrid) {
        for (const double L : {0.25, 1.0, 2.0}) {
            const MajorantParams p(half / (2.0 * L), L);
            const double t_star = analyze(p).t_star;
            const MajorantTrajectory traj = majorant_sequence(p, 40);
            // strict increase is only representable while the gap is above
            // the ulp resolution of t* - g
            const double resolvable = 4 * kEps * std::max(1.0, t_star);
            for (int k = 0; k < 40; ++k) {
                CAPTURE(half, L, k);
                if (traj.gaps[k + 1] > resolvable) {
                    CHECK(traj.t[k] < traj.t[k + 1]);
                    CHECK(traj.t[k + 1] < t_star);
                }
                CHECK(traj.t[k + 1] <= t_star);
                CHECK(traj.gaps[k + 1] <= 0.5 * traj.gaps[k]);
                CHECK(traj.gaps[k] >= 0.0);
            }
        }
    }
}

TEST_CASE("closed form examples") {
    const MajorantParams p(0.25, 1.0);
    CHECK(closed_form_t(p, 0) == 0.0);
    CHECK_THAT(closed_form_t(p, 1), WithinAbs(0.25, 1e-15));
    const MajorantParams boundary(0.5, 1.0);
    CHECK(closed_form_t(boundary, 3) == 0.875);
    CHECK(closed_form_t(MajorantParams(0.0, 2.0), 5) == 0.0);
}

TEST_CASE("closed form agrees with the recursion to 1e-12 relative") {
    for (const double half : kHalfBLGrid) {
        const MajorantParams p(half / 2.0, 1.0);
        const MajorantTrajectory traj = majorant_sequence(p, 30);
        for (int k = 0; k <= 30; ++k) {
            const double closed = closed_form_t(p, k);
            const double recursive = traj.t[k];
            CAPTURE(half, k);
            CHECK(std::abs(closed - recursive) <=
                  1e-12 * std::max({1e-300, std::abs(closed), std::abs(recursive)}));
        }
    }
}

TEST_CASE("recursion matches an independent long double oracle") {
    for (const double half : {0.2, 0.5, 0.9, 1.0}) {
        const double b = half / 2.0;
        const auto oracle = recursion_oracle(b, 1.0, 12);
        const MajorantTrajectory traj = majorant_sequence(MajorantParams(b, 1.0), 12);
        for (int k = 0; k <= 12; ++k) {
            CAPTURE(half, k);
            CHECK(std::abs(traj.t[k] - static_cast<double>(oracle[k])) <=
                  1e-13 * std::max(1.0, std::abs(traj.t[k])));
        }
    }
}

TEST_CASE("rate_factor examples") {
    CHECK_THAT(rate_factor(MajorantParams(0.25, 1.0), 0.0), WithinAbs(0.5, 1e-16));
    CHECK_THAT(rate_factor(MajorantParams(0.5, 1.0), 0.5), WithinAbs(1.0, 1e-15));
    CHECK_THAT(rate_factor(MajorantParams(0.25, 1.0), 0.25), WithinRel(2.0 / 3.0, 1e-15));
    CHECK_THROWS_AS(rate_factor(MajorantParams(0.25, 1.0), 0.3), DomainError);
}

TEST_CASE("scalar sign facts on [0, t*)") {
    for (const double half : kHalfBLGrid) {
        const double L = 1.5;
        const MajorantParams p(half / (2.0 * L), L);
        const double t_star = analyze(p).t_star;
        for (int i = 0; i < 100; ++i) {
            const double t = t_star * i / 100.0;
            CAPTURE(half, t);
            CHECK(f_eval(p, t) > 0.0);
            CHECK(f_prime(p, t) <= L * (t - t_star) + 4 * kEps);
            CHECK(f_prime(p, t) < 0.0);
        }
    }
}

TEST_CASE("gap identity: t* - n_f(t) = -L/(2 f'(t)) (t* - t)^2") {
    for (const double half : kHalfBLGrid) {
        const MajorantParams p(half / 2.0, 1.0);
        const double t_star = analyze(p).t_star;
        for (int i = 0; i < 97; ++i) {
            const double t = t_star * i / 97.0;
            const double lhs = t_star - newton_map(p, t);
            const double rhs = -p.L() / (2.0 * f_prime(p, t)) * (t_star - t) * (t_star - t);
            CAPTURE(half, t);
            // 8 eps at the scale of the quantities involved; a plain relative
            // comparison is unattainable once n_f(t) is within ulps of t*
            CHECK(std::abs(lhs - rhs) <=
                  8 * kEps * std::max({t_star, std::abs(lhs), std::abs(rhs)}));
        }
    }
}

TEST_CASE("residual identity: f(n_f(t)) = (L/2) (f(t)/f'(t))^2") {
    for (const double half : kHalfBLGrid) {
        const MajorantParams p(half / 2.0, 1.0);
        const double t_star = analyze(p).t_star;
        for (int i = 0; i < 97; ++i) {
            const double t = t_star * i / 97.0;
            const double ratio = f_eval(p, t) / f_prime(p, t);
            const double lhs = f_eval(p, newton_map(p, t));
            const double rhs = 0.5 * p.L() * ratio * ratio;
            CAPTURE(half, t);
            CHECK(std::abs(lhs - rhs) <=
                  8 * kEps * std::max({p.b(), t_star, std::abs(lhs), std::abs(rhs)}));
        }
    }
}

TEST_CASE("the root ratio squares each step (strict case)") {
    // (t_{k+1} - t*)/(t_{k+1} - t**) = ((t_k - t*)/(t_k - t**))^2, starting at theta
    for (const double half : {0.2, 0.5, 0.8, 0.99}) {
        const MajorantParams p(half / 2.0, 1.0);
        const MajorantAnalysis a = analyze(p);
        const double width = a.t_star2 - a.t_star;
        const MajorantTrajectory traj = majorant_sequence(p, 10);
        double ratio = a.theta;
        for (int k = 0; k <= 10; ++k) {
            const double g = traj.gaps[k];
            if (g <= 1e-100) break;
            CAPTURE(half, k);
            CHECK_THAT(g / (g + width), WithinRel(ratio, 1e-11));
            ratio *= ratio;
        }
    }
}

TEST_CASE("derivative closed form at t_k (strict case)") {
    for (const double half : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const MajorantParams p(half / 2.0, 1.0);
        const MajorantAnalysis a = analyze(p);
        const double s = std::sqrt(a.disc);
        for (int k = 0; k <= 6; ++k) {
            const double q = kantsolve::detail::theta_pow_2k(a.theta, k);
            if (q < 1e-12) break;
            const double expected = -(1.0 + q) / (1.0 - q) * s;
            const double got = f_prime(p, closed_form_t(p, k));
            CAPTURE(half, k);
            CHECK_THAT(got, WithinRel(expected, 1e-10));
        }
    }
}

TEST_CASE("theta-form quadratic coefficient equals the rate factor at t_k") {
    for (const double half : {0.2, 0.6, 0.9, 0.99}) {
        const MajorantParams p(half / 2.0, 1.0);
        const double t_star = analyze(p).t_star;
        for (int k = 0; k <= 5; ++k) {
            if (closed_form_gap(p, k) <= 8 * kEps * std::max(1.0, t_star)) break;
            const double via_theta = quadratic_rate_coefficient(p, k);
            const double via_derivative = rate_factor(p, closed_form_t(p, k));
            CAPTURE(half, k);
            CHECK_THAT(via_theta, WithinRel(via_derivative, 1e-10));
        }
    }
    CHECK_THROWS_AS(quadratic_rate_coefficient(MajorantParams(0.5, 1.0), 0), DomainError);
}

TEST_CASE("cancellation stability for tiny 2bL") {
    const MajorantAnalysis a = analyze(MajorantParams(1e-12, 1.0));
    CHECK_THAT(a.t_star, WithinRel(t_star_oracle(1e-12, 1.0), 1e-10));
    // and well below that, in fact
    CHECK_THAT(a.t_star, WithinRel(t_star_oracle(1e-12, 1.0), 1e-15));
}
