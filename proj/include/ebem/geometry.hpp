#ifndef EBEM_GEOMETRY_HPP
#define EBEM_GEOMETRY_HPP

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "ebem/core.hpp"

namespace ebem {

// Closed boundary curves. Analytic loops are parametrized over [0, 2pi),
// counter-clockwise.
struct RoundedTriangle {};  // (2 + 0.5 cos 3t)(cos t, sin t)
struct Kite {};             // (cos t + 0.65 cos 2t - 0.65, 1.5 sin t)
struct Star {};             // (1 + 0.3 cos 5t)(cos t, sin t)
struct Circle {
    double radius = 1.0;
    Vec2 center{0.0, 0.0};
};
struct Ellipse {
    Vec2 center{0.0, 0.0};
    Vec2 semi_axes{1.0, 1.0};
};
struct Polygon {
    std::vector<Vec2> vertices;  // counter-clockwise, no repeats
};

struct CurveSpec;

struct Composite {
    std::vector<CurveSpec> loops;  // pairwise disjoint
};

struct CurveSpec {
    std::variant<RoundedTriangle, Kite, Star, Circle, Ellipse, Polygon, Composite> shape;
};

// Named presets accepted by the CLI; throws on unknown name.
CurveSpec curve_by_name(const std::string& name);

// Polygonal mesh. Nodes are numbered contiguously across loops; segment i runs
// from node i to node next[i], so there are as many segments as nodes.
struct BoundaryMesh {
    std::vector<Vec2> nodes;
    std::vector<int> next, prev;     // cyclic successor/predecessor within each loop
    std::vector<int> loop_of;        // loop id per node
    std::vector<int> loop_start;     // first node index of each loop
    std::vector<double> seg_len;     // |Gamma_i| of segment i = (node i -> next[i])
    std::vector<Vec2> seg_tangent;   // unit tangent of segment i
    std::vector<Vec2> seg_normal;    // outward unit normal, n_i = -N t_i
    std::vector<Vec2> seg_mid;

    int n_nodes() const { return static_cast<int>(nodes.size()); }
    int n_loops() const { return static_cast<int>(loop_start.size()); }
    double perimeter() const;
};

// Uniform parameter sampling for analytic loops; polygons distribute nodes
// along edges proportionally to length while keeping every vertex; composites
// split N across loops proportionally to arc length (at least 8 per loop).
BoundaryMesh sample_curve(const CurveSpec& spec, int N);

// x(xi) = x_i + (1+xi)/2 (x_{i+1} - x_i) on segment i.
Vec2 reference_map(const BoundaryMesh& mesh, int segment, double xi);

// Arc length of the spec's boundary by adaptive Gauss quadrature of |x'(t)|
// (exact sum of edge lengths for polygons). Oracle for perimeter tests.
double curve_arc_length(const CurveSpec& spec);

// Winding-number test against the polygonal boundary; true if p lies inside
// any loop. Points on the boundary are unspecified.
bool point_in_obstacle(const BoundaryMesh& mesh, const Vec2& p);

// CSV export/import, columns: loop_id,node_index,x,y.
void write_mesh_csv(const BoundaryMesh& mesh, std::ostream& os);
BoundaryMesh read_mesh_csv(std::istream& is);

}  // namespace ebem

#endif
