#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "octarm/topology.hpp"

using namespace octarm;

namespace {

constexpr double tau = 2.0 * std::numbers::pi;

RibbonFrame straight_ribbon(int n, double turns, double radius = 0.01) {
    RibbonFrame rb;
    rb.centerline.resize(n + 1);
    rb.normals.resize(n + 1);
    rb.radii.assign(n + 1, radius);
    for (int i = 0; i <= n; ++i) {
        const double u = double(i) / n;
        rb.centerline[i] = Vec3(0.0, 0.0, u);
        const double phi = turns * tau * u;
        rb.normals[i] = Vec3(std::cos(phi), std::sin(phi), 0.0);
    }
    return rb;
}

std::vector<Vec3> circle(const Vec3& center, const Vec3& u, const Vec3& v,
                         int n) {
    std::vector<Vec3> c(n + 1);
    for (int i = 0; i <= n; ++i) {
        const double th = tau * i / n;
        c[i] = center + std::cos(th) * u + std::sin(th) * v;
    }
    c.back() = c.front();
    return c;
}

// Smooth random closed curve from a short Fourier series.
struct FourierCurve {
    Vec3 a[3], b[3];
    Vec3 point(double th) const {
        Vec3 p = Vec3::Zero();
        for (int m = 0; m < 3; ++m)
            p += a[m] * std::cos((m + 1) * th) + b[m] * std::sin((m + 1) * th);
        return p;
    }
    Vec3 deriv(double th) const {
        Vec3 p = Vec3::Zero();
        for (int m = 0; m < 3; ++m)
            p += (m + 1) * (-a[m] * std::sin((m + 1) * th) +
                            b[m] * std::cos((m + 1) * th));
        return p;
    }
};

FourierCurve random_curve(std::mt19937& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    FourierCurve c;
    for (int m = 0; m < 3; ++m) {
        const double scale = 1.0 / ((m + 1) * (m + 1));
        c.a[m] = scale * Vec3(gauss(rng), gauss(rng), gauss(rng));
        c.b[m] = scale * Vec3(gauss(rng), gauss(rng), gauss(rng));
    }
    return c;
}

// Brute-force Gauss double integral for the writhe of a smooth closed curve
// (midpoint rule on the periodic integrand; the diagonal limit is finite).
double writhe_quadrature(const FourierCurve& c, int m) {
    double total = 0.0;
    const double h = tau / m;
    for (int i = 0; i < m; ++i) {
        const double si = (i + 0.5) * h;
        const Vec3 ri = c.point(si), ti = c.deriv(si);
        for (int j = 0; j < m; ++j) {
            if (i == j) continue;
            const double sj = (j + 0.5) * h;
            const Vec3 d = ri - c.point(sj);
            const double dist = d.norm();
            total += ti.cross(c.deriv(sj)).dot(d) / (dist * dist * dist);
        }
    }
    return total * h * h / (4.0 * std::numbers::pi);
}

std::vector<Vec3> sample_closed(const FourierCurve& c, int n) {
    std::vector<Vec3> pts(n + 1);
    for (int i = 0; i < n; ++i) pts[i] = c.point(tau * i / n);
    pts[n] = pts[0];
    return pts;
}

}  // namespace

TEST_CASE("extend: straight rod becomes collinear curve of length (2a+1)L") {
    auto rb = straight_ribbon(10, 0.0);
    rb.extension_factor = 1e3;
    const auto ext = extend_curve(rb);
    REQUIRE(ext.n_nodes() == rb.n_nodes() + 2);
    double len = 0.0;
    for (int i = 0; i + 1 < ext.n_nodes(); ++i) {
        const Vec3 seg = ext.centerline[i + 1] - ext.centerline[i];
        len += seg.norm();
        CHECK(seg.normalized().dot(Vec3::UnitZ()) == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK(len == doctest::Approx((2.0 * 1e3 + 1.0) * 1.0).epsilon(1e-12));
}

TEST_CASE("extend: helix extensions point along the end tangents") {
    const int n = 64;
    RibbonFrame rb;
    rb.radii.assign(n + 1, 0.01);
    for (int i = 0; i <= n; ++i) {
        const double th = 3.0 * tau * i / n;
        rb.centerline.push_back(Vec3(std::cos(th), std::sin(th), 0.2 * th));
        rb.normals.push_back(Vec3::Zero());  // unused here
    }
    const auto ext = extend_curve(rb);
    const Vec3 base_dir = (ext.centerline[1] - ext.centerline[0]).normalized();
    const Vec3 base_tan = (rb.centerline[1] - rb.centerline[0]).normalized();
    CHECK((base_dir - base_tan).norm() <= 1e-12);
    const int m = ext.n_nodes();
    const Vec3 tip_dir = (ext.centerline[m - 1] - ext.centerline[m - 2]).normalized();
    const Vec3 tip_tan = (rb.centerline[n] - rb.centerline[n - 1]).normalized();
    CHECK((tip_dir - tip_tan).norm() <= 1e-12);
}

TEST_CASE("extend: zero factor returns the original curve") {
    auto rb = straight_ribbon(5, 1.0);
    rb.extension_factor = 0.0;
    const auto ext = extend_curve(rb);
    REQUIRE(ext.n_nodes() == rb.n_nodes());
    for (int i = 0; i < rb.n_nodes(); ++i)
        CHECK((ext.centerline[i] - rb.centerline[i]).norm() == 0.0);
}

TEST_CASE("extend: degenerate end segment raises") {
    RibbonFrame rb = straight_ribbon(4, 0.0);
    rb.centerline[1] = rb.centerline[0];
    CHECK_THROWS_AS((void)extend_curve(rb), GeometryError);
}

TEST_CASE("link: two distant straight segments are unlinked") {
    // The open-pair solid angle decays as (separation)^-2.
    const std::vector<Vec3> a{Vec3(0, 0, 0), Vec3(1, 0, 0)};
    const std::vector<Vec3> b{Vec3(0, 2000, 1200), Vec3(1, 2001, 1200)};
    CHECK(std::abs(link(a, b)) <= 1e-6);
}

TEST_CASE("link: Hopf link has |Lk| = 1") {
    const auto a = circle(Vec3::Zero(), Vec3::UnitX(), Vec3::UnitY(), 200);
    const auto b = circle(Vec3(1, 0, 0), Vec3::UnitX(), Vec3::UnitZ(), 200);
    CHECK(std::abs(link(a, b)) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("link: antisymmetric under orientation reversal of either curve") {
    const auto a = circle(Vec3::Zero(), Vec3::UnitX(), Vec3::UnitY(), 100);
    auto b = circle(Vec3(1, 0, 0), Vec3::UnitX(), Vec3::UnitZ(), 100);
    const double lk = link(a, b);
    std::reverse(b.begin(), b.end());
    CHECK(link(a, b) == doctest::Approx(-lk).epsilon(1e-12));
}

TEST_CASE("link: proximity diagnostics flags near-intersecting pairs") {
    const std::vector<Vec3> a{Vec3(0, 0, 0), Vec3(1, 0, 0)};
    const std::vector<Vec3> b{Vec3(1e-12, 0, 0), Vec3(1, 1, 0)};
    LinkDiagnostics diag;
    (void)link(a, b, &diag);
    REQUIRE(diag.closest_pair.has_value());
    CHECK(diag.closest_pair->first == 0);
    CHECK(diag.closest_pair->second == 0);
}

TEST_CASE("writhe: planar curves have zero writhe") {
    std::vector<Vec3> c;
    for (int i = 0; i <= 120; ++i) {
        const double s = double(i) / 120;
        c.push_back(Vec3(s, 0.2 * std::sin(3.0 * tau * s), 0.0));
    }
    CHECK(std::abs(writhe(c)) <= 1e-6);
}

TEST_CASE("writhe: matches brute-force quadrature on random smooth curves") {
    std::mt19937 rng(20260826);
    // Distance between points at least 0.5 rad apart in parameter; draws that
    // nearly self-intersect converge too slowly for either evaluator.
    auto self_distance = [](const FourierCurve& c) {
        double best = std::numeric_limits<double>::max();
        const int m = 256;
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) {
                const double dth = std::min(double(j - i), double(m - (j - i))) * tau / m;
                if (dth < 0.5) continue;
                best = std::min(best, (c.point(tau * i / m) - c.point(tau * j / m)).norm());
            }
        return best;
    };
    int accepted = 0;
    while (accepted < 20) {
        const auto curve = random_curve(rng);
        if (self_distance(curve) < 0.1) continue;
        const double wr_sum = writhe(sample_closed(curve, 600));
        const double wr_quad = writhe_quadrature(curve, 600);
        CHECK(std::abs(wr_sum - wr_quad) <= 1e-3);
        ++accepted;
    }
}

TEST_CASE("writhe/link: invariant under rigid rotation and translation") {
    std::mt19937 rng(7);
    const auto fc = random_curve(rng);
    auto c = sample_closed(fc, 160);
    const double wr = writhe(c);
    const Mat3 R = rotation_exp(Vec3(0.3, -1.1, 0.7));
    const Vec3 shift(4.0, -2.0, 9.0);
    auto moved = c;
    for (auto& p : moved) p = R * p + shift;
    CHECK(std::abs(writhe(moved) - wr) <= 1e-10);

    const auto a = circle(Vec3::Zero(), Vec3::UnitX(), Vec3::UnitY(), 80);
    const auto b = circle(Vec3(1, 0, 0), Vec3::UnitX(), Vec3::UnitZ(), 80);
    const double lk = link(a, b);
    auto am = a, bm = b;
    for (auto& p : am) p = R * p + shift;
    for (auto& p : bm) p = R * p + shift;
    CHECK(std::abs(link(am, bm) - lk) <= 1e-10);
}

TEST_CASE("writhe: invariant under simultaneous orientation reversal") {
    std::mt19937 rng(11);
    auto c = sample_closed(random_curve(rng), 160);
    const double wr = writhe(c);
    std::reverse(c.begin(), c.end());
    CHECK(writhe(c) == doctest::Approx(wr).epsilon(1e-12));
}

TEST_CASE("twist: untwisted straight ribbon has Tw = 0") {
    const auto rb = straight_ribbon(20, 0.0);
    CHECK(twist(rb) == doctest::Approx(0.0));
}

TEST_CASE("twist: uniform 4pi rotation of the normal gives Tw = 2") {
    const auto rb = straight_ribbon(200, 2.0);
    CHECK(twist(rb) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("cfw: straight ribbon twisted two turns carries Lk = 2") {
    auto rb = straight_ribbon(200, 2.0);
    const auto q = cfw_check(rb);
    CHECK(q.twist == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(std::abs(q.writhe) <= 1e-6);
    CHECK(q.link == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(q.cfw_residual <= 1e-6);
}

TEST_CASE("cfw: residual equals |Lk - Wr - Tw| recomputed independently") {
    auto rb = straight_ribbon(80, 1.5);
    const auto q = cfw_check(rb);
    CHECK(q.cfw_residual ==
          doctest::Approx(std::abs(q.link - q.writhe - q.twist)).epsilon(1e-15));
}

TEST_CASE("ribbon validation rejects bad normals") {
    auto rb = straight_ribbon(10, 1.0);
    rb.normals[4] *= 1.5;
    CHECK_THROWS_AS(rb.validate(), GeometryError);
    rb = straight_ribbon(10, 1.0);
    rb.normals[4] = Vec3::UnitZ();  // parallel to tangent
    CHECK_THROWS_AS(rb.validate(), GeometryError);
}
