#include <catch2/catch_amalgamated.hpp>

#include <holoflow/grid.hpp>
#include <holoflow/random.hpp>

using namespace holoflow;

TEST_CASE("grid shapes validate and linearize row-major") {
    const GridShape line = GridShape::line(5);
    CHECK(line.total() == 5);
    CHECK_FALSE(line.is_2d());

    const GridShape plane = GridShape::plane(3, 4);
    CHECK(plane.total() == 12);
    CHECK(plane.linear(0, 0) == 0);
    CHECK(plane.linear(1, 0) == 4);
    CHECK(plane.linear(2, 3) == 11);
    CHECK(plane.str() == "3x4");

    CHECK_THROWS_AS(GridShape{{}}.validate(), config_error);
    CHECK_THROWS_AS(GridShape{{4, 0}}.validate(), config_error);
    CHECK_THROWS_AS(GridShape{{2, 2, 2}}.validate(), config_error);
}

TEST_CASE("2D flatten/unflatten round trip is the identity") {
    const GridShape shape = GridShape::plane(6, 7);
    ComplexGrid g(shape);
    for (std::size_t r = 0; r < 6; ++r)
        for (std::size_t c = 0; c < 7; ++c)
            g[shape.linear(r, c)] = cplx(static_cast<double>(r), static_cast<double>(c));
    for (std::size_t i = 0; i < g.size(); ++i) {
        const std::size_t r = i / shape.cols();
        const std::size_t c = i % shape.cols();
        CHECK(g[shape.linear(r, c)] == g[i]);
    }
}

TEST_CASE("wrap_phase maps into [0, 2pi)") {
    CHECK(wrap_phase(0.0) == 0.0);
    CHECK(wrap_phase(two_pi) == 0.0);
    CHECK(wrap_phase(-1e-18) < two_pi);
    CHECK(wrap_phase(-1.0) == Catch::Approx(two_pi - 1.0));
    CHECK(wrap_phase(7.0 * two_pi + 0.5) == Catch::Approx(0.5));
    for (double x : {-123.456, -0.1, 0.1, 9.7, 1e6}) {
        const double w = wrap_phase(x);
        CHECK(w >= 0.0);
        CHECK(w < two_pi);
    }
}

TEST_CASE("init_cartesian is a pure function of seed, shape, variance") {
    const GridShape shape = GridShape::line(4);
    const ComplexGrid a = init_cartesian(shape, 17, 0.01);
    const ComplexGrid b = init_cartesian(shape, 17, 0.01);
    REQUIRE(a.size() == b.size());
    for (std::size_t n = 0; n < a.size(); ++n) CHECK(a[n] == b[n]);

    const ComplexGrid c = init_cartesian(shape, 18, 0.01);
    bool differs = false;
    for (std::size_t n = 0; n < a.size(); ++n) differs = differs || a[n] != c[n];
    CHECK(differs);
}

TEST_CASE("init_cartesian enforces the amplitude floor") {
    for (std::uint64_t seed = 0; seed < 16; ++seed) {
        const ComplexGrid g = init_cartesian(GridShape::plane(16, 16), seed, 0.01);
        CHECK(min_amplitude(g) >= amplitude_floor);
        CHECK(all_finite(g));
    }
    CHECK_THROWS_AS(init_cartesian(GridShape::line(4), 0, 0.0), config_error);
    CHECK_THROWS_AS(init_cartesian(GridShape::line(4), 0, -1.0), config_error);
}

TEST_CASE("init_cartesian sample moment matches the requested variance") {
    // E|c|^2 = variance; at N = 1e5 the sample mean sits within 5%.
    const std::size_t n = 100000;
    const ComplexGrid g = init_cartesian(GridShape::line(n), 123, 0.01);
    double mean = 0.0;
    for (const cplx& v : g.data) mean += std::norm(v);
    mean /= static_cast<double>(n);
    CHECK(mean > 0.0095);
    CHECK(mean < 0.0105);

    // And the components are balanced: E[re^2] ~ E[im^2] ~ variance/2.
    double re2 = 0.0, im2 = 0.0;
    for (const cplx& v : g.data) {
        re2 += v.real() * v.real();
        im2 += v.imag() * v.imag();
    }
    CHECK(re2 / n == Catch::Approx(0.005).epsilon(0.05));
    CHECK(im2 / n == Catch::Approx(0.005).epsilon(0.05));
}

TEST_CASE("init_phase_from takes arguments and wraps them") {
    ComplexGrid c0(GridShape::line(3), {cplx(1, 0), cplx(0, 1), cplx(-1, 0)});
    const PhaseGrid phi = init_phase_from(c0);
    CHECK(phi[0] == Catch::Approx(0.0).margin(1e-15));
    CHECK(phi[1] == Catch::Approx(two_pi / 4.0));
    CHECK(phi[2] == Catch::Approx(two_pi / 2.0));

    ComplexGrid diag(GridShape::line(1), {cplx(1, 1)});
    CHECK(init_phase_from(diag)[0] == Catch::Approx(two_pi / 8.0));

    ComplexGrid below(GridShape::line(1), {cplx(1, -1)});
    CHECK(init_phase_from(below)[0] == Catch::Approx(7.0 * two_pi / 8.0));

    ComplexGrid zero(GridShape::line(1), {cplx(0, 0)});
    CHECK_THROWS_AS(init_phase_from(zero), numeric_error);
}

TEST_CASE("phase grid wraps on construction and on set") {
    PhaseGrid p(GridShape::line(2), {-1.0, 3.0 * two_pi + 0.25});
    CHECK(p[0] == Catch::Approx(two_pi - 1.0));
    CHECK(p[1] == Catch::Approx(0.25));
    p.set(0, -0.5);
    CHECK(p[0] == Catch::Approx(two_pi - 0.5));
}

TEST_CASE("intensity grids reject negative or non-finite values") {
    CHECK_THROWS_AS(IntensityGrid(GridShape::line(2), {1.0, -0.5}), config_error);
    CHECK_THROWS_AS(IntensityGrid(GridShape::line(1), {std::nan("")}), config_error);
    CHECK_NOTHROW(IntensityGrid(GridShape::line(2), {0.0, 2.5}));
}
