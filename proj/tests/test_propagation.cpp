#include <catch2/catch_amalgamated.hpp>

#include <holoflow/propagation.hpp>
#include <holoflow/random.hpp>

using namespace holoflow;

namespace {

// Direct O(N^2) transform, the oracle for the fast path. sign -1 is the
// forward kernel, +1 the adjoint.
ComplexGrid direct_transform(const ComplexGrid& in, int sign) {
    const std::size_t rows = in.shape.is_2d() ? in.shape.rows() : 1;
    const std::size_t cols = in.shape.cols();
    ComplexGrid out(in.shape);
    for (std::size_t mr = 0; mr < rows; ++mr)
        for (std::size_t mc = 0; mc < cols; ++mc) {
            cplx sum(0.0, 0.0);
            for (std::size_t nr = 0; nr < rows; ++nr)
                for (std::size_t nc = 0; nc < cols; ++nc) {
                    const double angle =
                        sign * two_pi *
                        (static_cast<double>(mr * nr) / static_cast<double>(rows) +
                         static_cast<double>(mc * nc) / static_cast<double>(cols));
                    sum += std::polar(1.0, angle) * in.data[nr * cols + nc];
                }
            out.data[mr * cols + mc] = sum;
        }
    return out;
}

double max_abs_diff(const ComplexGrid& a, const ComplexGrid& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("propagate concentrates a DC input at zero frequency") {
    const ComplexGrid h(GridShape::line(4), {1, 1, 1, 1});
    const ComplexGrid p = propagate(h);
    CHECK(std::abs(p[0] - cplx(4, 0)) < 1e-14);
    for (std::size_t m = 1; m < 4; ++m) CHECK(std::abs(p[m]) < 1e-14);
}

TEST_CASE("propagate shifts a single harmonic") {
    const ComplexGrid h(GridShape::line(4), {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)});
    const ComplexGrid p = propagate(h);
    CHECK(std::abs(p[1] - cplx(4, 0)) < 1e-13);
    CHECK(std::abs(p[0]) < 1e-13);
    CHECK(std::abs(p[2]) < 1e-13);
    CHECK(std::abs(p[3]) < 1e-13);
}

TEST_CASE("propagate matches the direct summation oracle") {
    for (const GridShape& shape :
         {GridShape::line(8), GridShape::line(12), GridShape::plane(4, 4), GridShape::plane(8, 8),
          GridShape::plane(3, 5)}) {
        const ComplexGrid h = init_cartesian(shape, 7 + shape.total(), 1.0);
        CHECK(max_abs_diff(propagate(h), direct_transform(h, -1)) < 1e-10);
    }
}

TEST_CASE("adjoint_propagate matches its oracle and the DC row") {
    const ComplexGrid g(GridShape::line(4), {1, 0, 0, 0});
    const ComplexGrid t = adjoint_propagate(g);
    for (std::size_t n = 0; n < 4; ++n) CHECK(std::abs(t[n] - cplx(1, 0)) < 1e-14);

    for (const GridShape& shape : {GridShape::line(8), GridShape::plane(8, 8)}) {
        const ComplexGrid x = init_cartesian(shape, 3, 1.0);
        CHECK(max_abs_diff(adjoint_propagate(x), direct_transform(x, +1)) < 1e-10);
    }
}

TEST_CASE("adjoint(forward(x)) = N x") {
    for (const GridShape& shape : {GridShape::line(16), GridShape::line(21), GridShape::plane(4, 8)}) {
        const double n = static_cast<double>(shape.total());
        const ComplexGrid x = init_cartesian(shape, 11, 1.0);
        const ComplexGrid round = adjoint_propagate(propagate(x));
        double worst = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
            worst = std::max(worst, std::abs(round[i] - n * x[i]) / std::abs(n * x[i]));
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("Parseval: output energy is N times input energy") {
    for (const GridShape& shape : {GridShape::line(32), GridShape::plane(8, 8)}) {
        const ComplexGrid x = init_cartesian(shape, 5, 1.0);
        const ComplexGrid p = propagate(x);
        double in = 0.0, out = 0.0;
        for (const cplx& v : x.data) in += std::norm(v);
        for (const cplx& v : p.data) out += std::norm(v);
        CHECK(std::abs(out - static_cast<double>(shape.total()) * in) <
              1e-12 * static_cast<double>(shape.total()) * in);
    }
}

TEST_CASE("project_phase_only normalizes to the unit circle") {
    const ComplexGrid c(GridShape::line(3), {cplx(3, 4), cplx(-2, 0), std::polar(1.0, 1.234)});
    const ComplexGrid h = project_phase_only(c);
    CHECK(std::abs(h[0] - cplx(0.6, 0.8)) < 1e-15);
    CHECK(std::abs(h[1] - cplx(-1, 0)) < 1e-15);
    CHECK(std::abs(h[2] - std::polar(1.0, 1.234)) < 1e-15);  // unit inputs unchanged
    for (std::size_t n = 0; n < h.size(); ++n) CHECK(std::abs(std::abs(h[n]) - 1.0) <= 1e-15);
}

TEST_CASE("project_phase_only names the offending index") {
    const ComplexGrid c(GridShape::line(3), {cplx(1, 0), cplx(0, 0), cplx(2, 0)});
    CHECK_THROWS_WITH(project_phase_only(c), Catch::Matchers::ContainsSubstring("entry 1"));
}

TEST_CASE("intensity is the squared modulus") {
    const ComplexGrid p(GridShape::line(2), {cplx(3, 4), cplx(0, 0)});
    const IntensityGrid i = intensity(p);
    CHECK(i[0] == 25.0);
    CHECK(i[1] == 0.0);

    const ComplexGrid r = init_cartesian(GridShape::line(8), 2, 1.0);
    const IntensityGrid ir = intensity(r);
    double a = 0.0, b = 0.0;
    for (const cplx& v : r.data) a += std::norm(v);
    for (double v : ir.data) b += v;
    CHECK(a == Catch::Approx(b).epsilon(1e-15));
}

TEST_CASE("unit holograms deliver total energy N^2") {
    for (const GridShape& shape : {GridShape::line(64), GridShape::plane(8, 8)}) {
        const double n = static_cast<double>(shape.total());
        const ComplexGrid h = project_phase_only(init_cartesian(shape, 9, 0.01));
        const IntensityGrid disp = intensity(propagate(h));
        double sum = 0.0;
        for (double v : disp.data) sum += v;
        CHECK(std::abs(sum - n * n) < 1e-10 * n * n);
    }
}
