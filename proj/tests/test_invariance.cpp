#include "fixtures.hpp"

#include "phamp/domain.hpp"
#include "phamp/response.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace phamp;

namespace {
constexpr double tau = 2.0 * std::numbers::pi;

// The normal-form field is conjugate to its linearization: the cycle is the
// unit circle, sigma1 moves along x3 and sigma2 radially, each scaled by b = 1/2.
Vec3 exact_K(double theta, double s1, double s2)
{
    const double rho = 1.0 + 0.5 * s2;
    return {rho * std::cos(tau * theta), rho * std::sin(tau * theta), 0.5 * s1};
}
} // namespace

TEST_CASE("normal-form parameterization is the exact conjugacy")
{
    auto& p = fixture::model("normal-form");
    const auto& K = p.map();
    CHECK(K.order() == 10);
    CHECK(K.T() == doctest::Approx(2.0).epsilon(1e-10));
    for (double th : {0.0, 0.1, 0.55, 0.93})
        for (double s1 : {-0.8, 0.0, 0.6})
            for (double s2 : {-0.9, 0.0, 1.5})
                CHECK((K.evaluate(th, s1, s2) - exact_K(th, s1, s2)).norm() < 1e-9);
    for (int m = 2; m <= K.order(); ++m)
        for (int b = 0; b <= m; ++b)
            CHECK(K.coeff(m - b, b).max_abs() < 1e-9);
}

TEST_CASE("solve report residuals")
{
    auto& p = fixture::model("normal-form");
    REQUIRE(p.solve_report());
    const auto& rep = *p.solve_report();
    CHECK(rep.max_residual < 1e-9);
    CHECK(rep.residual_l1.size() == 66u);
    CHECK(rep.resonance.pass);
}

TEST_CASE("local slice residual and jacobian")
{
    auto& p = fixture::model("normal-form");
    const auto s = p.map().slice(0.37);
    CHECK(s.residual(p.field(), 0.3, -0.2).norm() < 1e-9);
    const Mat3 J = s.jacobian(0.3, -0.2);
    const double h = 1e-6;
    const Vec3 dth = (exact_K(0.37 + h, 0.3, -0.2) - exact_K(0.37 - h, 0.3, -0.2)) / (2 * h);
    CHECK((J.col(0) - dth).norm() < 1e-7);
    CHECK((J.col(1) - Vec3(0, 0, 0.5)).norm() < 1e-9);
}

TEST_CASE("accuracy domain of the normal form")
{
    auto& p = fixture::model("normal-form");
    const auto& D = p.domain();
    CHECK(D.rows() == p.map().size());
    CHECK(D.contains(0.2, 0.1, 0.1));
    CHECK_FALSE(D.contains(0.2, 0.0, -2.5)); // rho = -0.25: through the singular axis
    for (int i = 0; i < D.rows(); i += 97)
        for (int j = 0; j < D.n_angles; ++j)
            CHECK(D.R(i, j) > 0.5);
    CHECK(D.line_extent(0.3, 0.0, -1.0, 2) <= 2.0);
}

TEST_CASE("local responses invert the jacobian")
{
    auto& p = fixture::model("normal-form");
    const auto& K = p.map();
    const auto r = local_response(K, 0.2, 0.4, -0.3);
    const Mat3 J = K.slice(0.2).jacobian(0.4, -0.3);
    CHECK((r.rows() * J - Mat3::Identity()).norm() < 1e-10);
    // grad Theta of atan2(x2, x1) / 2 pi at radius 0.85
    const Vec3 x = exact_K(0.2, 0.4, -0.3);
    const Vec3 g(-x(1) / (tau * 0.85 * 0.85), x(0) / (tau * 0.85 * 0.85), 0.0);
    CHECK((r.grad_theta - g).norm() < 1e-9);
    CHECK((r.grad_sigma1 - Vec3(0, 0, 2.0)).norm() < 1e-9);
}

TEST_CASE("response series matches the pointwise inverse")
{
    auto& p = fixture::model("normal-form");
    const ResponseSeries B(p.map());
    CHECK(B.order() == 9);
    const auto r = local_response(p.map(), 0.61, 0.05, 0.04);
    CHECK((B.evaluate(0.61, 0.05, 0.04) - r.rows()).norm() < 1e-8);
}

TEST_CASE("adjoint propagation keeps the responses consistent")
{
    auto& p = fixture::model("normal-form");
    const auto start = local_response(p.map(), 0.0, 0.1, 0.1);
    const auto back = propagate_response(p.field(), start, 1.0, p.map().lambda1(), p.map().lambda2());
    CHECK_FALSE(back.truncated);
    const auto direct = local_response(p.map(), 0.5, 0.1 * std::exp(1.0), 0.1 * std::exp(0.3));
    CHECK((back.x - direct.x).norm() < 1e-9);
    CHECK((back.grad_theta - direct.grad_theta).norm() < 1e-8);
    CHECK((back.grad_sigma1 - direct.grad_sigma1).norm() < 1e-8);
    CHECK((back.grad_sigma2 - direct.grad_sigma2).norm() < 1e-8);
}
