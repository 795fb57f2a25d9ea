#include "fixtures.hpp"

#include "phamp/strobe.hpp"

#include <doctest.h>

#include <cmath>

using namespace phamp;

TEST_CASE("map kinds parse and print")
{
    for (const char* s : {"state", "pa", "pa-lin", "slow", "phase"})
        CHECK(to_string(parse_map_kind(s)) == s);
    CHECK_THROWS_AS(parse_map_kind("stroboscopic"), UsageError);
}

TEST_CASE("stimulus validation")
{
    StimulusSpec s;
    CHECK_NOTHROW(s.validate());
    CHECK(s.total() == doctest::Approx(8.494));
    s.n = 0;
    CHECK_THROWS_AS(s.validate(), UsageError);
    s = {};
    s.Ts = 0.0;
    CHECK_THROWS_AS(s.validate(), UsageError);
}

TEST_CASE("a zero stimulus leaves the cycle invariant")
{
    auto& p = fixture::model("rt");
    const auto& pa = p.phase_amplitude();
    StimulusSpec stim;
    stim.eps = 0.0;
    stim.n = 5;
    const double advance = stim.total() / pa.T();
    for (const char* kind : {"state", "pa-lin", "slow", "phase"}) {
        CAPTURE(kind);
        const StroboscopicMap F(pa, stim, parse_map_kind(kind));
        const auto q = F.apply(F.on_cycle(0.2));
        const Vec3 expected = pa.map().evaluate(wrap_phase(0.2 + advance), 0.0, 0.0);
        CHECK((F.state_of(q) - expected).norm() < 1e-7 * expected.norm());
        if (F.kind() != MapKind::State) {
            CHECK(std::abs(phase_distance(q.theta, 0.2 + advance)) < 1e-12);
            CHECK(q.s1 == 0.0);
            CHECK(q.s2 == 0.0);
        }
    }
}

TEST_CASE("finite responses approach the infinitesimal ones")
{
    auto& p = fixture::model("rt");
    const auto& pa = p.phase_amplitude();
    const Vec3 v = Vec3::UnitX();
    CHECK(prf_arf_finite(pa, 0.0, v, 0.3, 0.0, 0.0).dtheta == 0.0);
    const auto g = pa.evaluate(0.3, 0.0, 0.0);
    const double h = 1e-3;
    const auto a = prf_arf_finite(pa, h, v, 0.3, 0.0, 0.0);
    const auto b = prf_arf_finite(pa, h / 2, v, 0.3, 0.0, 0.0);
    // first-order Richardson extrapolation of the difference quotients
    const double th = 2.0 * b.dtheta / (h / 2) - a.dtheta / h;
    const double s2 = 2.0 * b.dsigma2 / (h / 2) - a.dsigma2 / h;
    CHECK(th == doctest::Approx(g.grad_theta.dot(v)).epsilon(1e-4));
    CHECK(s2 == doctest::Approx(g.grad_sigma2.dot(v)).epsilon(1e-4));
    // opposite kicks: equal and opposite to first order
    const auto m = prf_arf_finite(pa, -h, v, 0.3, 0.0, 0.0);
    CHECK(std::abs(a.dtheta + m.dtheta) < 1e-3 * std::abs(a.dtheta));
}

TEST_CASE("inhibitory and excitatory trains move the amplitude differently")
{
    auto& p = fixture::model("rt");
    const auto& pa = p.phase_amplitude();
    // A kick of size 2 in V at phase 0.5, against the cycle's own scale:
    // the second-order part makes |dsigma2| asymmetric in the sign.
    const auto inh = prf_arf_finite(pa, -2.0, Vec3::UnitX(), 0.5, 0.0, 0.0);
    const auto exc = prf_arf_finite(pa, 2.0, Vec3::UnitX(), 0.5, 0.0, 0.0);
    MESSAGE("dsigma2 inhibitory " << inh.dsigma2 << ", excitatory " << exc.dsigma2);
    CHECK(inh.dsigma2 * exc.dsigma2 < 0.0);
    CHECK(std::abs(std::abs(inh.dsigma2) - std::abs(exc.dsigma2)) > 1e-6);
}

TEST_CASE("phase-only map fixed point")
{
    auto& p = fixture::model("rt");
    const StroboscopicMap F(p.phase_amplitude(), StimulusSpec{}, MapKind::Phase);
    const auto r = fixed_point(F, F.on_cycle(0.0));
    CHECK(r.converged);
    CHECK(r.point.theta == doctest::Approx(0.15).epsilon(0.01 / 0.15));
    const auto orbit = iterate(F, r.point, 3);
    REQUIRE(orbit.size() == 4u);
    CHECK(F.distance(orbit.back(), r.point) < 1e-6);
}
