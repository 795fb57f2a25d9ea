#include "fixtures.hpp"

#include "phamp/globalize.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace phamp;

namespace {
constexpr double tau = 2.0 * std::numbers::pi;

double angle_phase(const Vec3& x) { return wrap_phase(std::atan2(x(1), x(0)) / tau); }

GlobalizationConfig small_config(Pipeline& p)
{
    auto g = p.globalization();
    g.max_periods = 8;
    g.max_sweep_points = 150;
    g.max_points = 4000;
    return g;
}
} // namespace

TEST_CASE("coordinates of far points on the normal form")
{
    auto& p = fixture::model("normal-form");
    const auto& pa = p.phase_amplitude();
    for (const Vec3& x : {Vec3(0.3, 0.2, 0.1), Vec3(-4.0, 1.0, 7.0), Vec3(0.0, -2.5, -3.0)}) {
        CAPTURE(x.transpose());
        const auto c = pa.coordinates_of(x);
        const double rho = std::hypot(x(0), x(1));
        CHECK(std::abs(phase_distance(c.theta, angle_phase(x))) < 1e-9);
        CHECK(c.sigma1 == doctest::Approx(2.0 * x(2)).epsilon(1e-9));
        CHECK(c.sigma2 == doctest::Approx(2.0 * (rho - 1.0)).epsilon(1e-9));
    }
}

TEST_CASE("global evaluation beyond the accuracy domain")
{
    auto& p = fixture::model("normal-form");
    const auto& pa = p.phase_amplitude();
    double t = -1.0;
    const auto r = pa.evaluate(0.3, 400.0, 3.0, true, true, &t);
    CHECK(t > 0.0);
    CHECK_FALSE(r.truncated);
    CHECK(r.x(2) == doctest::Approx(200.0).epsilon(1e-9));
    CHECK(std::hypot(r.x(0), r.x(1)) == doctest::Approx(2.5).epsilon(1e-9));
    CHECK(r.grad_sigma1(2) == doctest::Approx(2.0 / 1.0).epsilon(1e-7));
}

TEST_CASE("slow leaf and isochron of the normal form")
{
    auto& p = fixture::model("normal-form");
    const auto& pa = p.phase_amplitude();
    const auto cfg = small_config(p);
    const auto leaf = grow_slow_leaf(pa, 0.1, cfg);
    REQUIRE(leaf.points.size() > 10);
    for (const auto& q : leaf.points) {
        CHECK(std::abs(q.x(2)) < 1e-9);
        CHECK(std::abs(phase_distance(angle_phase(q.x), 0.1)) < 1e-9);
        CHECK(q.sigma2 == doctest::Approx(2.0 * (std::hypot(q.x(0), q.x(1)) - 1.0)).epsilon(1e-8));
    }
    auto icfg = cfg;
    icfg.anchor_stride = 8;
    const auto iso = grow_isochron(pa, 0.1, leaf, icfg);
    REQUIRE(iso.points.size() > leaf.points.size());
    for (const auto& q : iso.points)
        CHECK(std::abs(phase_distance(angle_phase(q.x), 0.1)) < 1e-8);
}

TEST_CASE("isostable level sets")
{
    auto& p = fixture::model("normal-form");
    const auto& pa = p.phase_amplitude();
    const auto objs = grow_isostable(pa, 2, 1.0, {0.0, 0.5}, small_config(p));
    REQUIRE(objs.size() == 2u);
    for (const auto& o : objs) {
        CHECK(o.kind == "isostable");
        REQUIRE_FALSE(o.points.empty());
        for (const auto& q : o.points)
            CHECK(std::hypot(q.x(0), q.x(1)) == doctest::Approx(1.5).epsilon(1e-8));
    }
}

TEST_CASE("manifold objects survive a text round trip")
{
    auto& p = fixture::model("normal-form");
    const auto leaf = grow_leaf(p.phase_amplitude(), 0.25, 1, small_config(p));
    CHECK(leaf.kind == "fast-leaf");
    std::stringstream ss;
    write_object(ss, leaf, "normal-form");
    const auto back = read_object(ss);
    CHECK(back.kind == leaf.kind);
    CHECK(back.theta == leaf.theta);
    REQUIRE(back.points.size() == leaf.points.size());
    for (size_t i = 0; i < back.points.size(); ++i) {
        CHECK(back.points[i].x == leaf.points[i].x);
        CHECK(back.points[i].sigma1 == leaf.points[i].sigma1);
    }
}

TEST_CASE("leaf axis is validated")
{
    auto& p = fixture::model("normal-form");
    CHECK_THROWS_AS(grow_leaf(p.phase_amplitude(), 0.0, 3, p.globalization()), UsageError);
}
