#include "phamp/jet.hpp"
#include "phamp/periodic_grid.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace phamp;

namespace {
constexpr double tau = 2.0 * std::numbers::pi;

Eigen::VectorXd smooth(double t)
{
    Eigen::VectorXd v(2);
    v << std::exp(std::sin(tau * t)), std::cos(3.0 * tau * t) + 0.25;
    return v;
}
} // namespace

TEST_CASE("grid rejects sizes that are not powers of two")
{
    CHECK(is_power_of_two(64));
    CHECK_FALSE(is_power_of_two(48));
    CHECK_THROWS(require_fft_size(48));
    CHECK_THROWS(require_fft_size(2));
}

TEST_CASE("spectral derivative and interpolation of a smooth function")
{
    const auto g = PeriodicGrid::sample(64, 2, smooth);
    const auto d = g.derivative();
    for (int i = 0; i < 64; i += 7) {
        const double t = g.theta(i);
        CHECK(d.samples()(i, 0) == doctest::Approx(tau * std::cos(tau * t) * std::exp(std::sin(tau * t))).epsilon(1e-11));
        CHECK(d.samples()(i, 1) == doctest::Approx(-3.0 * tau * std::sin(3.0 * tau * t)).epsilon(1e-11));
    }
    for (double t : {0.013, 0.377, 0.9}) {
        const auto v = g.evaluate(t);
        CHECK(v(0) == doctest::Approx(smooth(t)(0)).epsilon(1e-12));
        CHECK(v(1) == doctest::Approx(smooth(t)(1)).epsilon(1e-12));
    }
}

TEST_CASE("tail norm of a band-limited grid vanishes")
{
    const auto g = PeriodicGrid::sample(32, 2, smooth);
    CHECK(PeriodicGrid::sample(32, 1, [](double t) { return Eigen::VectorXd::Constant(1, std::cos(tau * t)); })
              .tail_norm() < 1e-14);
    // exp(sin) has coefficients I_k(1); the tail from k = 14 is about 2 I_14(1).
    CHECK(g.tail_norm() > 1e-20);
    CHECK(g.tail_norm() < 1e-12);
    // A single Nyquist mode (-1)^i enters once, doubled.
    PeriodicGrid ny(8, 1);
    for (int i = 0; i < 8; ++i)
        ny.set_row(i, Eigen::VectorXd::Constant(1, i % 2 ? -1.0 : 1.0));
    CHECK(ny.tail_norm() == doctest::Approx(2.0));
}

TEST_CASE("fft round trip and text round trip")
{
    const auto g = PeriodicGrid::sample(16, 2, smooth);
    const auto back = PeriodicGrid::from_spectrum(g.spectrum());
    CHECK((back.samples() - g.samples()).cwiseAbs().maxCoeff() < 1e-14);
    std::stringstream ss;
    g.write(ss);
    const auto r = PeriodicGrid::read(ss);
    CHECK(r.samples() == g.samples());
}

TEST_CASE("l1 norm averages row norms")
{
    PeriodicGrid g(4, 2);
    for (int i = 0; i < 4; ++i)
        g.set_row(i, Eigen::Vector2d(3.0, 4.0));
    CHECK(g.l1_norm() == doctest::Approx(5.0));
}

TEST_CASE("graded monomial index")
{
    CHECK(Jet2::index(0, 0) == 0);
    CHECK(Jet2::index(1, 0) == 1);
    CHECK(Jet2::index(0, 1) == 2);
    CHECK(Jet2::index(2, 0) == 3);
    CHECK(Jet2::index(0, 3) == 9);
    CHECK(Jet2::count(10) == 66);
}

TEST_CASE("jet product matches polynomial multiplication")
{
    const int L = 4;
    const auto s1 = Jet2::variable(L, 3, 0);
    const auto s2 = Jet2::variable(L, 3, 1);
    const auto p = (1.0 + 2.0 * s1 - s2) * (s1 * s2 + 0.5 * s2);
    // (1 + 2a - b)(ab + b/2) = ab + b/2 + 2a^2 b + ab - a b^2 - b^2/2
    CHECK(p(0, 1)(0) == doctest::Approx(0.5));
    CHECK(p(1, 1)(0) == doctest::Approx(2.0));
    CHECK(p(0, 2)(0) == doctest::Approx(-0.5));
    CHECK(p(2, 1)(0) == doctest::Approx(2.0));
    CHECK(p(1, 2)(0) == doctest::Approx(-1.0));
    CHECK(p(0, 0)(0) == 0.0);
    const auto cubic = ipow(s1 + s2, 3);
    CHECK(cubic(2, 1)(1) == doctest::Approx(3.0));
    // truncation drops order 5 and up
    const auto high = ipow(s1, 3) * square(s2);
    for (int k = 0; k < Jet2::count(L); ++k)
        CHECK(high.at(k).abs().maxCoeff() == 0.0);
}

TEST_CASE("jet exp coefficients")
{
    const int L = 5;
    const auto e = exp(Jet2::variable(L, 2, 0) + Jet2::variable(L, 2, 1));
    // exp(a + b) = sum a^i b^j / (i! j!)
    auto fact = [](int n) { return std::tgamma(n + 1.0); };
    for (int m = 0; m <= L; ++m)
        for (int b = 0; b <= m; ++b)
            CHECK(e(m - b, b)(0) == doctest::Approx(1.0 / (fact(m - b) * fact(b))).epsilon(1e-14));
    const auto c = exp(Jet2::constant(L, 2, 0.7));
    CHECK(c(0, 0)(1) == doctest::Approx(std::exp(0.7)));
    CHECK(c(1, 0)(1) == 0.0);
}

TEST_CASE("elementary functions agree pointwise with their truncated series")
{
    const int L = 12;
    const int n = 3;
    Eigen::ArrayXd base(n);
    base << 0.8, 1.3, 2.1;
    const auto f = Jet2::constant(L, base) + 0.3 * Jet2::variable(L, n, 0) - 0.2 * Jet2::variable(L, n, 1);
    const double a = 0.05, b = -0.04;
    const Eigen::ArrayXd x = base + 0.3 * a - 0.2 * b;
    auto close = [](const Eigen::ArrayXd& u, const Eigen::ArrayXd& v) { return ((u - v).abs() / v.abs()).maxCoeff(); };
    CHECK(close(exp(f).evaluate(a, b), x.exp()) < 1e-13);
    CHECK(close(log(f).evaluate(a, b), x.log()) < 1e-13);
    CHECK(close(pow(f, 1.7).evaluate(a, b), x.pow(1.7)) < 1e-13);
    CHECK(close(sqrt(f).evaluate(a, b), x.sqrt()) < 1e-13);
    CHECK(close(reciprocal(f).evaluate(a, b), x.inverse()) < 1e-13);
    CHECK(close(sin(f).evaluate(a, b), x.sin()) < 1e-13);
    CHECK(close(cos(f).evaluate(a, b), x.cos()) < 1e-13);
    CHECK(close((f / (f * f + 1.0)).evaluate(a, b), x / (x * x + 1.0)) < 1e-13);
}

TEST_CASE("restriction keeps lower orders only")
{
    const auto s = Jet2::variable(6, 1, 0);
    const auto r = exp(s).restricted(2);
    CHECK(r.order() == 2);
    CHECK(r(2, 0)(0) == doctest::Approx(0.5));
}
