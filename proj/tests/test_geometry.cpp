#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ebem/geometry.hpp"

using namespace ebem;

namespace {

void check_mesh_invariants(const BoundaryMesh& mesh)
{
    const Eigen::Matrix2d N = rot90();
    for (int i = 0; i < mesh.n_nodes(); ++i) {
        CHECK(mesh.seg_len[i] > 0.0);
        CHECK(std::abs(mesh.seg_tangent[i].norm() - 1.0) <= 1e-14);
        CHECK(std::abs(mesh.seg_normal[i].norm() - 1.0) <= 1e-14);
        CHECK(std::abs(mesh.seg_normal[i].dot(mesh.seg_tangent[i])) <= 1e-15);
        CHECK((mesh.seg_normal[i] + N * mesh.seg_tangent[i]).norm() <= 1e-14);
        // segments concatenate head-to-tail
        const Vec2 end = mesh.nodes[i] + mesh.seg_len[i] * mesh.seg_tangent[i];
        CHECK((end - mesh.nodes[mesh.next[i]]).norm() <= 1e-12);
        CHECK(mesh.prev[mesh.next[i]] == i);
        CHECK(mesh.loop_of[mesh.next[i]] == mesh.loop_of[i]);
    }
}

}  // namespace

TEST_CASE("circle with four nodes")
{
    const BoundaryMesh mesh = sample_curve(curve_by_name("circle"), 4);
    REQUIRE(mesh.n_nodes() == 4);
    CHECK((mesh.nodes[0] - Vec2(1, 0)).norm() <= 1e-15);
    CHECK((mesh.nodes[1] - Vec2(0, 1)).norm() <= 1e-15);
    CHECK((mesh.nodes[2] - Vec2(-1, 0)).norm() <= 1e-15);
    CHECK((mesh.nodes[3] - Vec2(0, -1)).norm() <= 1e-15);
    for (int i = 0; i < 4; ++i) CHECK(mesh.seg_len[i] == doctest::Approx(std::sqrt(2.0)));
    // first segment (1,0)->(0,1): outward normal (1/sqrt2, 1/sqrt2)
    CHECK((mesh.seg_normal[0] - Vec2(1, 1).normalized()).norm() <= 1e-14);
    check_mesh_invariants(mesh);
}

TEST_CASE("analytic curves satisfy the frame invariants")
{
    for (const char* name : {"rounded_triangle", "kite", "star", "ellipse"}) {
        CAPTURE(name);
        const BoundaryMesh mesh = sample_curve(curve_by_name(name), 128);
        REQUIRE(mesh.n_nodes() == 128);
        REQUIRE(mesh.n_loops() == 1);
        check_mesh_invariants(mesh);
    }
}

TEST_CASE("normals point outward (winding test)")
{
    for (const char* name : {"rounded_triangle", "kite", "star", "circle", "right_triangle"}) {
        CAPTURE(name);
        const BoundaryMesh mesh = sample_curve(curve_by_name(name), 64);
        double hmin = 1e30;
        for (double h : mesh.seg_len) hmin = std::min(hmin, h);
        for (int i = 0; i < mesh.n_nodes(); i += 7) {
            const Vec2 p = mesh.seg_mid[i] + 0.05 * hmin * mesh.seg_normal[i];
            CHECK_FALSE(point_in_obstacle(mesh, p));
            const Vec2 q = mesh.seg_mid[i] - 0.05 * hmin * mesh.seg_normal[i];
            CHECK(point_in_obstacle(mesh, q));
        }
    }
}

TEST_CASE("perimeter approximates the arc length from below")
{
    for (const char* name : {"star", "kite", "rounded_triangle"}) {
        CAPTURE(name);
        const double exact = curve_arc_length(curve_by_name(name));
        const BoundaryMesh mesh = sample_curve(curve_by_name(name), 1024);
        CHECK(mesh.perimeter() < exact);
        CHECK(mesh.perimeter() > exact * 0.999);
    }
}

TEST_CASE("refinement nesting on analytic curves")
{
    const BoundaryMesh coarse = sample_curve(curve_by_name("kite"), 64);
    const BoundaryMesh fine = sample_curve(curve_by_name("kite"), 128);
    for (int i = 0; i < 64; ++i)
        CHECK((coarse.nodes[i] - fine.nodes[2 * i]).norm() <= 1e-13);
}

TEST_CASE("reference map endpoints and midpoint")
{
    const BoundaryMesh mesh = sample_curve(curve_by_name("kite"), 32);
    for (int i : {0, 5, 31}) {
        CHECK((reference_map(mesh, i, -1.0) - mesh.nodes[i]).norm() <= 1e-15);
        CHECK((reference_map(mesh, i, 1.0) - mesh.nodes[mesh.next[i]]).norm() <= 1e-15);
        CHECK((reference_map(mesh, i, 0.0) - mesh.seg_mid[i]).norm() <= 1e-15);
    }
    // explicit affine check on a constructed polygon
    CurveSpec spec{Polygon{{{0.0, 0.0}, {2.0, 0.0}, {2.0, 2.0}, {0.0, 2.0}}}};
    const BoundaryMesh sq = sample_curve(spec, 4);
    CHECK((reference_map(sq, 0, 0.5) - Vec2(1.5, 0.0)).norm() <= 1e-15);
}

TEST_CASE("polygon sampling keeps vertices")
{
    const BoundaryMesh mesh = sample_curve(curve_by_name("right_triangle"), 100);
    REQUIRE(mesh.n_nodes() == 100);
    check_mesh_invariants(mesh);
    int found = 0;
    for (const Vec2& v : {Vec2(-1, -1), Vec2(1, -1), Vec2(-1, 1)})
        for (const Vec2& x : mesh.nodes)
            if ((x - v).norm() <= 1e-14) {
                ++found;
                break;
            }
    CHECK(found == 3);
    // exact perimeter for polygons
    CHECK(mesh.perimeter() == doctest::Approx(4.0 + 2.0 * std::sqrt(2.0)).epsilon(1e-14));
    CHECK(curve_arc_length(curve_by_name("right_triangle")) ==
          doctest::Approx(4.0 + 2.0 * std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("composite scene splits nodes across loops")
{
    const BoundaryMesh mesh = sample_curve(curve_by_name("kite_ellipse"), 256);
    REQUIRE(mesh.n_loops() == 2);
    REQUIRE(mesh.n_nodes() == 256);
    check_mesh_invariants(mesh);
    int second = 0;
    for (int i = 0; i < mesh.n_nodes(); ++i)
        if (mesh.loop_of[i] == 1) ++second;
    CHECK(second >= 8);
    CHECK(second < 128);  // the small ellipse gets fewer nodes
    // cyclic closure stays within each loop
    CHECK(point_in_obstacle(mesh, Vec2(2.5, 0.0)));    // inside the ellipse
    CHECK_FALSE(point_in_obstacle(mesh, Vec2(1.8, 0.0)));
}

TEST_CASE("degenerate specs are rejected")
{
    CHECK_THROWS(sample_curve(CurveSpec{Circle{0.0, Vec2(0, 0)}}, 16));
    CHECK_THROWS(sample_curve(CurveSpec{Polygon{{{0, 0}, {1, 0}, {1, 0}}}}, 16));
    CHECK_THROWS(sample_curve(curve_by_name("kite"), 2));
    CHECK_THROWS(curve_by_name("dodecahedron"));
}

TEST_CASE("mesh CSV round trip")
{
    const BoundaryMesh mesh = sample_curve(curve_by_name("kite_ellipse"), 64);
    std::stringstream ss;
    write_mesh_csv(mesh, ss);
    const BoundaryMesh back = read_mesh_csv(ss);
    REQUIRE(back.n_nodes() == mesh.n_nodes());
    REQUIRE(back.n_loops() == mesh.n_loops());
    for (int i = 0; i < mesh.n_nodes(); ++i) {
        CHECK((back.nodes[i] - mesh.nodes[i]).norm() <= 1e-12);
        CHECK(back.loop_of[i] == mesh.loop_of[i]);
    }
}
