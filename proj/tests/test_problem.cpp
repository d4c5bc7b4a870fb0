#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "kantsolve/problem.hpp"

using namespace kantsolve;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Vector vec1(double a) {
    Vector v(1);
    v << a;
    return v;
}

Vector vec2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

} // namespace

TEST_CASE("operator_norm") {
    CHECK(operator_norm(Matrix::Identity(3, 3)) == 1.0);

    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 3.0;
    d(1, 1) = -4.0;
    CHECK_THAT(operator_norm(d), WithinRel(4.0, 1e-14));

    Matrix u(2, 2);
    u << 1, 1, 0, 1;
    CHECK(operator_norm(u, VectorNormKind::max) == 2.0);
}

TEST_CASE("operator_norm dominates the vector image") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 6);
        Matrix M(n, n);
        Vector v(n);
        for (int i = 0; i < n; ++i) {
            v(i) = gauss(rng);
            for (int j = 0; j < n; ++j) M(i, j) = gauss(rng);
        }
        if (vector_norm(v) == 0.0) continue;
        for (const auto kind : {VectorNormKind::euclidean, VectorNormKind::max}) {
            CHECK(vector_norm(M * v, kind) <=
                  operator_norm(M, kind) * vector_norm(v, kind) * (1 + 1e-12));
        }
    }
}

TEST_CASE("smallest_singular_value") {
    CHECK(smallest_singular_value(Matrix::Identity(4, 4)) == 1.0);

    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 0.25;
    d(1, 1) = 2.0;
    CHECK_THAT(smallest_singular_value(d), WithinRel(0.25, 1e-14));

    Matrix r(2, 2);
    r << 1, 1, 1, 1;
    CHECK_THAT(smallest_singular_value(r), WithinAbs(0.0, 1e-12));
}

TEST_CASE("fd_jacobian on a scalar square") {
    ProblemSpec ps;
    ps.name = "square";
    ps.dim = 1;
    ps.residual = [](const Vector& x) { return vec1(x(0) * x(0) - 2.0); };
    ps.x0 = vec1(1.0);
    ps.R = 2.0;
    const Matrix J = fd_jacobian(ps, vec1(1.0));
    CHECK_THAT(J(0, 0), WithinAbs(2.0, 1e-8));
}

TEST_CASE("fd_jacobian is exact on affine maps") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> gauss;
    Matrix A(4, 4);
    Vector c(4);
    for (int i = 0; i < 4; ++i) {
        c(i) = gauss(rng);
        for (int j = 0; j < 4; ++j) A(i, j) = gauss(rng);
    }
    ProblemSpec ps;
    ps.name = "affine";
    ps.dim = 4;
    ps.residual = [A, c](const Vector& x) { return Vector(A * x - c); };
    ps.x0 = Vector::Zero(4);
    ps.R = 10.0;
    const Matrix J = fd_jacobian(ps, Vector::Ones(4));
    CHECK((J - A).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("fd_jacobian on circle-line matches the analytic Jacobian") {
    ProblemSpec ps = builtin("circle-line");
    ps.jacobian = nullptr; // force the fallback
    const Matrix J = fd_jacobian(ps, vec2(1.0, 0.0));
    Matrix expected(2, 2);
    expected << 2, 0, 1, -1;
    CHECK((J - expected).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("fd_jacobian rejects probes outside the domain") {
    ProblemSpec ps = builtin("scalar-sqrt"); // x0 = 1.5, R = 1
    ps.jacobian = nullptr;
    CHECK_THROWS_AS(fd_jacobian(ps, vec1(2.5)), DomainViolation);
}

TEST_CASE("fd_jacobian agrees with analytic Jacobians on all builtins") {
    std::mt19937_64 rng(3);
    for (const auto& name : builtin_names()) {
        ProblemSpec ps = builtin(name);
        ProblemSpec fd = ps;
        fd.jacobian = nullptr;
        for (int trial = 0; trial < 10; ++trial) {
            const Vector x = detail::sample_in_ball(rng, ps.x0, ps.R / 2.0,
                                                    VectorNormKind::euclidean);
            const Matrix diff = jacobian_at(ps, x) - fd_jacobian(fd, x);
            CAPTURE(name, trial);
            CHECK(diff.cwiseAbs().maxCoeff() < 1e-6);
        }
    }
}

TEST_CASE("builtin registry") {
    CHECK_THROWS_AS(builtin("no-such-problem"), UnknownProblem);
    CHECK(builtin_names().size() == 5);

    SECTION("scalar-majorant") {
        const ProblemSpec ps = builtin("scalar-majorant", {{"b", 0.25}, {"L", 1.0}});
        CHECK(ps.dim == 1);
        CHECK(ps.x0(0) == 0.0);
        REQUIRE(ps.known_roots.size() == 2);
        CHECK_THAT(ps.known_roots[0](0), WithinRel(0.2928932188134524, 1e-12));
        CHECK_THAT(ps.known_roots[1](0), WithinRel(1.7071067811865475, 1e-12));
        REQUIRE(ps.known_L.has_value());
        CHECK(*ps.known_L == 1.0);
    }

    SECTION("scalar-sqrt") {
        const ProblemSpec ps = builtin("scalar-sqrt", {{"c", 2.0}, {"x0", 1.5}});
        CHECK(ps.dim == 1);
        REQUIRE(ps.known_roots.size() == 2);
        CHECK_THAT(ps.known_roots[0](0), WithinRel(std::sqrt(2.0), 1e-15));
        CHECK_THAT(ps.known_roots[1](0), WithinRel(-std::sqrt(2.0), 1e-15));
        CHECK_THAT(*ps.known_L, WithinRel(2.0 / 3.0, 1e-15));
    }

    SECTION("circle-line") {
        const ProblemSpec ps = builtin("circle-line");
        CHECK(ps.dim == 2);
        CHECK(ps.x0(0) == 1.0);
        CHECK(ps.x0(1) == 0.0);
        REQUIRE(ps.known_roots.size() == 2);
        const double r = std::sqrt(0.5);
        CHECK(ps.known_roots[0](0) == r);
        CHECK(ps.known_roots[1](1) == -r);
        CHECK_THAT(*ps.known_L, WithinRel(std::sqrt(2.0), 1e-15));
    }

    SECTION("x0 override recomputes derived constants") {
        const ProblemSpec ps = builtin("scalar-sqrt", {{"c", 2.0}}, vec1(1.0), 1.5);
        CHECK(ps.x0(0) == 1.0);
        CHECK(ps.R == 1.5);
        CHECK(*ps.known_L == 1.0);
    }

    SECTION("discrete-bvp") {
        const ProblemSpec ps = builtin("discrete-bvp", {{"n", 8.0}});
        CHECK(ps.dim == 8);
        CHECK_FALSE(ps.known_L.has_value());
        CHECK(ps.known_roots.empty());
        // residual at zero is the constant source term
        const Vector r = ps.residual(Vector::Zero(8));
        for (int i = 0; i < 8; ++i) CHECK(r(i) == -1.0);
    }
}

TEST_CASE("known roots really are roots") {
    for (const auto& name : builtin_names()) {
        const ProblemSpec ps = builtin(name);
        const double scale = std::max(1.0, vector_norm(ps.residual(ps.x0)));
        for (const auto& root : ps.known_roots) {
            CAPTURE(name);
            CHECK(vector_norm(ps.residual(root)) <= 1e-10 * scale);
        }
    }
}
