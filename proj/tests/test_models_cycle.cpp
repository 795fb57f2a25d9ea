#include "phamp/limit_cycle.hpp"
#include "phamp/models.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace phamp;

TEST_CASE("registry lists the built-in models")
{
    const auto names = model_names();
    for (const char* n : {"rt", "hh", "wcsyn", "wcsyn-literal", "qif", "normal-form"})
        CHECK(std::find(names.begin(), names.end(), n) != names.end());
    CHECK_THROWS_AS(find_model("fitzhugh"), UsageError);
    CHECK_THROWS_AS(find_model("rt").resolve({{"g_bogus", 1.0}}), UsageError);
}

TEST_CASE("exact jacobians agree with central differences")
{
    for (const char* name : {"rt", "hh", "wcsyn", "qif"}) {
        CAPTURE(name);
        const auto& spec = find_model(name);
        const auto X = spec.field();
        const Vec3 x = spec.guess;
        const Mat3 J = X->jacobian(x);
        for (int j = 0; j < 3; ++j) {
            const double h = 1e-6 * std::max(1.0, std::abs(x(j)));
            const Vec3 d = (X->value(x + h * Vec3::Unit(j)) - X->value(x - h * Vec3::Unit(j))) / (2.0 * h);
            CHECK((d - J.col(j)).norm() <= 1e-6 * std::max(1.0, J.col(j).norm()));
        }
    }
}

TEST_CASE("jet composition at order zero is the field")
{
    const auto& spec = find_model("rt");
    const auto X = spec.field();
    const Vec3 x = spec.guess;
    std::array<Jet2, 3> k;
    for (int i = 0; i < 3; ++i)
        k[i] = Jet2::constant(2, 1, x(i)) + (i == 0 ? 1.0 : 0.0) * Jet2::variable(2, 1, 0);
    const auto r = X->compose(k);
    const Vec3 f = X->value(x);
    const Mat3 J = X->jacobian(x);
    for (int i = 0; i < 3; ++i) {
        CHECK(r[i](0, 0)(0) == doctest::Approx(f(i)).epsilon(1e-13));
        CHECK(r[i](1, 0)(0) == doctest::Approx(J(i, 0)).epsilon(1e-12));
        CHECK(r[i](0, 1)(0) == 0.0);
    }
}

TEST_CASE("non-finite field values are domain errors")
{
    const auto X = find_model("normal-form").field();
    CHECK_THROWS_AS(X->value(Vec3::Zero()), DomainError);
}

TEST_CASE("equilibrium of a linear field")
{
    const auto X = find_model("linear").field();
    CHECK(find_equilibrium(*X, Vec3(0.3, -0.2, 0.1)).norm() < 1e-12);
}

TEST_CASE("normal-form cycle, period and exponents")
{
    const auto& spec = find_model("normal-form");
    const auto X = spec.field({{"T", 3.0}});
    const auto orbit = find_limit_cycle(*X, spec.guess);
    CHECK(orbit.T == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(orbit.x0(0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(orbit.x0(1)) < 1e-8);
    const auto fd = monodromy_and_exponents(*X, orbit, 64);
    CHECK(fd.lambda1 == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(fd.lambda2 == doctest::Approx(-0.3).epsilon(1e-9));
    CHECK(fd.trivial_residual < 1e-10);
    // Phi(T) Q(0) C reproduces M; Q is periodic
    CHECK((grid_matrix(fd.Q, 0) - Mat3::Identity()).norm() < 1e-9);
    CHECK((fd.gamma.evaluate(0.25) - Eigen::Vector3d(0.0, 1.0, 0.0)).norm() < 1e-9);
}

TEST_CASE("resonance scan")
{
    auto r = check_nonresonance(-1.0, -0.5, 4);
    CHECK_FALSE(r.pass);
    CHECK(r.min_modulus < 1e-12);
    r = check_nonresonance(-1.0, -0.3 * std::numbers::sqrt2, 10);
    CHECK(r.pass);
}
