#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <levyma/config.hpp>
#include <levyma/grid.hpp>
#include <levyma/levy_model.hpp>

using namespace levyma;

TEST_CASE("config: sections, types, defaults") {
    Config cfg = Config::parse(
        "# experiment setup\n"
        "[levy] kind=\"gamma\" b=2.5\n"
        "[sim]\n"
        "delta=0.5 h=0.125\n"
        "seed=42 verbose=true\n"
        "sides=1.0,2.0,0.5\n");
    CHECK(cfg.get_string("levy.kind") == "gamma");
    CHECK(cfg.get_double("levy.b") == 2.5);
    CHECK(cfg.get_double("sim.delta") == 0.5);
    CHECK(cfg.get_int("sim.seed") == 42);
    CHECK(cfg.get_bool("sim.verbose", false));
    CHECK(cfg.get_double("sim.missing", 7.0) == 7.0);
    auto sides = cfg.get_doubles("sim.sides");
    REQUIRE(sides.size() == 3);
    CHECK(sides[1] == 2.0);
    CHECK_FALSE(cfg.has("sim.absent"));
    CHECK_THROWS_AS(cfg.get_double("sim.nothere"), config_error);
}

TEST_CASE("config: malformed input reports the line") {
    try {
        Config::parse("[ok] a=1\nbroken line without equals\n", "test.cfg");
        FAIL("expected a parse failure");
    } catch (const config_error& e) {
        std::string msg = e.what();
        CHECK(msg.find("test.cfg:2") != std::string::npos);
    }
    CHECK_THROWS_AS(Config::parse("[unterminated\n"), config_error);
    CHECK_THROWS_AS(Config::parse("[s] key=\n"), config_error);
    CHECK_THROWS_AS(Config::parse("[s] key=\"open\n"), config_error);
}

TEST_CASE("config: non-numeric values fail with the key name") {
    Config cfg = Config::parse("[a] x=abc\n");
    try {
        cfg.get_double("a.x");
        FAIL("expected failure");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("a.x") != std::string::npos);
    }
}

TEST_CASE("grid CSV round trip preserves values to full precision") {
    GridFn g = GridFn::sample(-3.0, 5.0, 64, [](double x) {
        return cplx(std::sin(x) * 1e-7, std::cos(3.0 * x));
    });
    write_csv(g, "cfgio_grid.csv");
    GridFn r = read_grid_csv("cfgio_grid.csv");
    std::remove("cfgio_grid.csv");
    REQUIRE(r.n() == g.n());
    CHECK(r.lo == g.lo);
    CHECK(r.hi == g.hi);
    for (std::size_t i = 0; i < g.n(); ++i) CHECK(r.values[i] == g.values[i]);
}

TEST_CASE("two-branch CSV round trip") {
    LogGridFn w(-2.0, 2.0, 33);
    for (std::size_t i = 0; i < w.n(); ++i) {
        w.pos[i] = cplx(double(i), -1.0);
        w.neg[i] = cplx(0.25, double(i) * 1e-9);
    }
    write_csv(w, "cfgio_log.csv");
    LogGridFn r = read_log_grid_csv("cfgio_log.csv");
    std::remove("cfgio_log.csv");
    REQUIRE(r.n() == w.n());
    for (std::size_t i = 0; i < w.n(); ++i) {
        CHECK(r.pos[i] == w.pos[i]);
        CHECK(r.neg[i] == w.neg[i]);
    }
}

TEST_CASE("model and kernel construction from config") {
    Config cfg = Config::parse(
        "[levy] kind=\"gamma\" b=1.5 tau=1.0\n"
        "[kernel] kind=\"exp_window\" lambda=1.0 theta=2.0\n");
    LevyModel m = model_from_config(cfg);
    CHECK(m.kind == LevyModel::Kind::Gamma);
    CHECK(m.b == 1.5);
    KernelFn f = kernel_from_config(cfg);
    CHECK(f.kind == KernelFn::Kind::ExpWindow);
    CHECK(f.theta == 2.0);

    Config cube = Config::parse("[kernel] kind=\"indicator_cube\" sides=1.0,2.0\n");
    KernelFn fc = kernel_from_config(cube);
    CHECK(fc.dim == 2);
    CHECK(fc.cube_volume == 2.0);

    Config bad = Config::parse("[levy] kind=\"cauchy\"\n");
    CHECK_THROWS_AS(model_from_config(bad), config_error);
}

TEST_CASE("malformed numeric CSV rows are rejected") {
    std::FILE* fp = std::fopen("cfgio_bad.csv", "w");
    std::fputs("x,re,im\n1.0,2.0\n", fp);
    std::fclose(fp);
    CHECK_THROWS_AS(read_grid_csv("cfgio_bad.csv"), config_error);
    std::remove("cfgio_bad.csv");
}
