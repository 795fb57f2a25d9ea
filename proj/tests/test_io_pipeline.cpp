#include "fixtures.hpp"

#include "phamp/io.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace phamp;

namespace {
fs::path scratch(const std::string& name)
{
    const fs::path d = fs::temp_directory_path() / ("phamp-test-" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& f)
{
    std::ifstream in(f, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}
} // namespace

TEST_CASE("sha256 of a known message")
{
    const auto d = scratch("sha");
    std::ofstream(d / "abc") << "abc";
    CHECK(sha256_hex(d / "abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("manifest detects modified files")
{
    const auto d = scratch("manifest");
    std::ofstream(d / "a.txt") << "one\n";
    fs::create_directories(d / "sub");
    std::ofstream(d / "sub" / "b.txt") << "two\n";
    write_manifest(d);
    CHECK(verify_manifest(d).empty());
    const auto text = slurp(d / "manifest.sha256");
    CHECK(text.find("  a.txt\n") != std::string::npos);
    CHECK(text.find("  sub/b.txt\n") != std::string::npos);
    std::ofstream(d / "sub" / "b.txt") << "changed\n";
    const auto bad = verify_manifest(d);
    REQUIRE(bad.size() == 1u);
    CHECK(bad[0] == "sub/b.txt");
}

TEST_CASE("metadata round trip keeps every bit")
{
    const auto d = scratch("meta");
    Metadata m;
    m.set("name", std::string("rt"));
    m.set("x", 0.1 + 0.2);
    m.set("n", 2048);
    m.set("v", Vec3(1.0 / 3.0, -2.5e-17, 7.0));
    Mat3 A;
    A << 1, 2, 3, 4, 5, 6, 7, 8, 9.5;
    m.set("A", A);
    m.write(d / "m.meta");
    const auto r = Metadata::read(d / "m.meta");
    CHECK(r.get("name") == "rt");
    CHECK(r.number("x") == 0.1 + 0.2);
    CHECK(r.integer("n") == 2048);
    CHECK(r.vec3("v") == Vec3(1.0 / 3.0, -2.5e-17, 7.0));
    CHECK(r.mat3("A") == A);
    CHECK_FALSE(r.has("missing"));
    CHECK_THROWS(r.get("missing"));
}

TEST_CASE("maps are written deterministically and reload exactly")
{
    auto& p = fixture::model("normal-form");
    const auto a = scratch("map-a"), b = scratch("map-b");
    write_map(a, p.map());
    write_map(b, p.map());
    write_manifest(a);
    write_manifest(b);
    CHECK(slurp(a / "manifest.sha256") == slurp(b / "manifest.sha256"));
    const auto K = read_map(a);
    CHECK(K.order() == p.map().order());
    CHECK(K.T() == p.map().T());
    for (int m = 0; m <= K.order(); ++m)
        for (int i = 0; i <= m; ++i)
            CHECK(K.coeff(m - i, i).samples() == p.map().coeff(m - i, i).samples());
    CHECK(K.evaluate(0.3, 0.2, -0.1) == p.map().evaluate(0.3, 0.2, -0.1));
}

TEST_CASE("config keys and errors")
{
    RunConfig c;
    apply_setting(c, "model.name", "hh");
    apply_setting(c, "solver.L", "8");
    apply_setting(c, "model.params.I_app", "10");
    apply_setting(c, "strobe.v", "0,1,0");
    CHECK(c.model == "hh");
    CHECK(c.solver.L == 8);
    CHECK(c.params.at("I_app") == 10.0);
    CHECK(c.stimulus.v == Vec3(0, 1, 0));
    CHECK_THROWS_AS(apply_setting(c, "solver.colour", "1"), UsageError);
    CHECK_THROWS_AS(apply_setting(c, "solver.L", "ten"), UsageError);
    std::istringstream in("# comment\nsolver.N = 1024\n\nbogus.key = 3\n");
    try {
        read_config(c, in, "run.cfg");
        FAIL("expected a usage error");
    } catch (const UsageError& e) {
        CHECK(std::string(e.what()).find("run.cfg:4") != std::string::npos);
    }
    CHECK(c.solver.N == 1024);
    CHECK(config_keys().size() > 20u);
}

TEST_CASE("pipeline rejects bad models and reuses a matching cache")
{
    RunConfig none;
    CHECK_THROWS_AS(Pipeline{none}, UsageError);
    RunConfig lin;
    lin.model = "linear";
    CHECK_THROWS_AS(Pipeline{lin}, UsageError);

    const auto dir = scratch("cache");
    fixture::model("normal-form").save_map(dir);
    RunConfig c;
    c.model = "normal-form";
    c.cache_dir = dir.string();
    Pipeline p(c);
    const auto& K = p.map();
    CHECK(p.map_from_cache());
    CHECK(monomial_residuals(p.field(), K).back() < 1e-9);

    c.solver.L = 6;
    Pipeline q(c);
    q.map();
    CHECK_FALSE(q.map_from_cache());
}
