#include "ebem/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "ebem/quadrature.hpp"

namespace ebem {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

Vec2 analytic_point(const CurveSpec& spec, double t);

struct AnalyticEval {
    Vec2 operator()(const RoundedTriangle&) const
    {
        double r = 2.0 + 0.5 * std::cos(3.0 * t);
        return {r * std::cos(t), r * std::sin(t)};
    }
    Vec2 operator()(const Kite&) const
    {
        return {std::cos(t) + 0.65 * std::cos(2.0 * t) - 0.65, 1.5 * std::sin(t)};
    }
    Vec2 operator()(const Star&) const
    {
        double r = 1.0 + 0.3 * std::cos(5.0 * t);
        return {r * std::cos(t), r * std::sin(t)};
    }
    Vec2 operator()(const Circle& c) const
    {
        return c.center + c.radius * Vec2{std::cos(t), std::sin(t)};
    }
    Vec2 operator()(const Ellipse& e) const
    {
        return e.center + Vec2{e.semi_axes.x() * std::cos(t), e.semi_axes.y() * std::sin(t)};
    }
    Vec2 operator()(const Polygon&) const
    {
        throw std::logic_error("analytic_point on polygon");
    }
    Vec2 operator()(const Composite&) const
    {
        throw std::logic_error("analytic_point on composite");
    }
    double t;
};

Vec2 analytic_point(const CurveSpec& spec, double t)
{
    return std::visit(AnalyticEval{t}, spec.shape);
}

void validate_shape(const CurveSpec& spec)
{
    if (const auto* c = std::get_if<Circle>(&spec.shape)) {
        if (!(c->radius > 0.0)) throw std::invalid_argument("circle: radius must be positive");
    } else if (const auto* e = std::get_if<Ellipse>(&spec.shape)) {
        if (!(e->semi_axes.x() > 0.0) || !(e->semi_axes.y() > 0.0))
            throw std::invalid_argument("ellipse: semi-axes must be positive");
    } else if (const auto* p = std::get_if<Polygon>(&spec.shape)) {
        const auto& v = p->vertices;
        if (v.size() < 3) throw std::invalid_argument("polygon: need at least 3 vertices");
        double area2 = 0.0;
        for (size_t i = 0; i < v.size(); ++i) {
            const Vec2& a = v[i];
            const Vec2& b = v[(i + 1) % v.size()];
            if ((b - a).norm() < 1e-14)
                throw std::invalid_argument("polygon: repeated vertices");
            area2 += a.x() * b.y() - a.y() * b.x();
        }
        if (area2 <= 0.0)
            throw std::invalid_argument("polygon: vertices must be counter-clockwise");
    } else if (const auto* comp = std::get_if<Composite>(&spec.shape)) {
        if (comp->loops.empty()) throw std::invalid_argument("composite: no loops");
        for (const auto& sub : comp->loops) {
            if (std::holds_alternative<Composite>(sub.shape))
                throw std::invalid_argument("composite: nesting not supported");
            validate_shape(sub);
        }
    }
}

// Nodes of one loop, in order.
std::vector<Vec2> loop_nodes(const CurveSpec& spec, int N)
{
    if (N < 3) throw std::invalid_argument("sample_curve: need N >= 3 per loop");
    if (const auto* p = std::get_if<Polygon>(&spec.shape)) {
        const auto& v = p->vertices;
        const int V = static_cast<int>(v.size());
        if (N < V) throw std::invalid_argument("sample_curve: polygon needs N >= vertex count");
        std::vector<double> len(V);
        double total = 0.0;
        for (int i = 0; i < V; ++i) {
            len[i] = (v[(i + 1) % V] - v[i]).norm();
            total += len[i];
        }
        // Largest-remainder split of the N-V interior nodes across edges.
        std::vector<int> extra(V, 0);
        std::vector<std::pair<double, int>> rem(V);
        int assigned = 0;
        for (int i = 0; i < V; ++i) {
            double share = (N - V) * len[i] / total;
            extra[i] = static_cast<int>(share);
            assigned += extra[i];
            rem[i] = {share - extra[i], i};
        }
        std::sort(rem.rbegin(), rem.rend());
        for (int k = 0; k < N - V - assigned; ++k) extra[rem[k].second] += 1;
        std::vector<Vec2> nodes;
        nodes.reserve(N);
        for (int i = 0; i < V; ++i) {
            const Vec2& a = v[i];
            const Vec2& b = v[(i + 1) % V];
            const int pieces = extra[i] + 1;
            for (int k = 0; k < pieces; ++k)
                nodes.push_back(a + (static_cast<double>(k) / pieces) * (b - a));
        }
        return nodes;
    }
    std::vector<Vec2> nodes;
    nodes.reserve(N);
    for (int i = 0; i < N; ++i) nodes.push_back(analytic_point(spec, two_pi * i / N));
    return nodes;
}

void append_loop(BoundaryMesh& mesh, const std::vector<Vec2>& nodes)
{
    const int base = mesh.n_nodes();
    const int n = static_cast<int>(nodes.size());
    const int loop = mesh.n_loops();
    mesh.loop_start.push_back(base);
    for (int i = 0; i < n; ++i) {
        mesh.nodes.push_back(nodes[i]);
        mesh.next.push_back(base + (i + 1) % n);
        mesh.prev.push_back(base + (i + n - 1) % n);
        mesh.loop_of.push_back(loop);
    }
}

void build_frames(BoundaryMesh& mesh)
{
    const int n = mesh.n_nodes();
    mesh.seg_len.resize(n);
    mesh.seg_tangent.resize(n);
    mesh.seg_normal.resize(n);
    mesh.seg_mid.resize(n);
    const Eigen::Matrix2d N = rot90();
    for (int i = 0; i < n; ++i) {
        const Vec2 d = mesh.nodes[mesh.next[i]] - mesh.nodes[i];
        const double len = d.norm();
        if (!(len > 0.0)) throw std::invalid_argument("mesh: zero-length segment");
        mesh.seg_len[i] = len;
        mesh.seg_tangent[i] = d / len;
        mesh.seg_normal[i] = -(N * mesh.seg_tangent[i]);
        mesh.seg_mid[i] = mesh.nodes[i] + 0.5 * d;
    }
}

}  // namespace

double BoundaryMesh::perimeter() const
{
    double s = 0.0;
    for (double l : seg_len) s += l;
    return s;
}

CurveSpec curve_by_name(const std::string& name)
{
    if (name == "rounded_triangle") return {RoundedTriangle{}};
    if (name == "kite") return {Kite{}};
    if (name == "star") return {Star{}};
    if (name == "circle") return {Circle{}};
    if (name == "ellipse") return {Ellipse{}};
    if (name == "right_triangle")
        return {Polygon{{{-1.0, -1.0}, {1.0, -1.0}, {-1.0, 1.0}}}};
    if (name == "kite_ellipse") {
        Composite c;
        c.loops.push_back({Kite{}});
        c.loops.push_back({Ellipse{{2.5, 0.0}, {0.3, 0.2}}});
        return {std::move(c)};
    }
    throw std::invalid_argument("unknown curve name: " + name);
}

BoundaryMesh sample_curve(const CurveSpec& spec, int N)
{
    validate_shape(spec);
    BoundaryMesh mesh;
    if (const auto* comp = std::get_if<Composite>(&spec.shape)) {
        const int L = static_cast<int>(comp->loops.size());
        if (N < 8 * L) throw std::invalid_argument("sample_curve: composite needs N >= 8 per loop");
        std::vector<double> len(L);
        double total = 0.0;
        for (int i = 0; i < L; ++i) {
            len[i] = curve_arc_length(comp->loops[i]);
            total += len[i];
        }
        std::vector<int> count(L, 8);
        int assigned = 8 * L;
        std::vector<std::pair<double, int>> rem(L);
        for (int i = 0; i < L; ++i) {
            double share = (N - assigned) * len[i] / total;
            count[i] += static_cast<int>(share);
            rem[i] = {share - static_cast<int>(share), i};
        }
        int placed = 0;
        for (int c : count) placed += c;
        std::sort(rem.rbegin(), rem.rend());
        for (int k = 0; k < N - placed; ++k) count[rem[k % L].second] += 1;
        for (int i = 0; i < L; ++i) append_loop(mesh, loop_nodes(comp->loops[i], count[i]));
    } else {
        append_loop(mesh, loop_nodes(spec, N));
    }
    build_frames(mesh);
    return mesh;
}

Vec2 reference_map(const BoundaryMesh& mesh, int segment, double xi)
{
    const Vec2& a = mesh.nodes[segment];
    const Vec2& b = mesh.nodes[mesh.next[segment]];
    return a + 0.5 * (1.0 + xi) * (b - a);
}

double curve_arc_length(const CurveSpec& spec)
{
    validate_shape(spec);
    if (const auto* p = std::get_if<Polygon>(&spec.shape)) {
        double s = 0.0;
        const auto& v = p->vertices;
        for (size_t i = 0; i < v.size(); ++i) s += (v[(i + 1) % v.size()] - v[i]).norm();
        return s;
    }
    if (const auto* comp = std::get_if<Composite>(&spec.shape)) {
        double s = 0.0;
        for (const auto& sub : comp->loops) s += curve_arc_length(sub);
        return s;
    }
    // Composite 16-point Gauss on |x'(t)| (central differences of the
    // parametrization), panels doubled until two successive levels agree.
    const GaussRule& g = gauss_legendre(16);
    auto speed = [&](double t) {
        const double h = 1e-6;
        return (analytic_point(spec, t + h) - analytic_point(spec, t - h)).norm() / (2.0 * h);
    };
    double prev = 0.0;
    for (int panels = 8; panels <= 4096; panels *= 2) {
        double s = 0.0;
        const double w = two_pi / panels;
        for (int p = 0; p < panels; ++p) {
            const double mid = w * (p + 0.5);
            for (int k = 0; k < g.n; ++k)
                s += 0.5 * w * g.weights[k] * speed(mid + 0.5 * w * g.nodes[k]);
        }
        if (panels > 8 && std::abs(s - prev) < 1e-9 * s) return s;
        prev = s;
    }
    return prev;
}

bool point_in_obstacle(const BoundaryMesh& mesh, const Vec2& p)
{
    // Even-odd crossing count over all segments of all loops.
    int crossings = 0;
    for (int i = 0; i < mesh.n_nodes(); ++i) {
        const Vec2& a = mesh.nodes[i];
        const Vec2& b = mesh.nodes[mesh.next[i]];
        if ((a.y() > p.y()) == (b.y() > p.y())) continue;
        const double x_cross = a.x() + (p.y() - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
        if (x_cross > p.x()) ++crossings;
    }
    return crossings % 2 == 1;
}

void write_mesh_csv(const BoundaryMesh& mesh, std::ostream& os)
{
    os << "loop_id,node_index,x,y\n";
    os.precision(17);
    for (int i = 0; i < mesh.n_nodes(); ++i)
        os << mesh.loop_of[i] << ',' << i << ',' << mesh.nodes[i].x() << ','
           << mesh.nodes[i].y() << '\n';
}

BoundaryMesh read_mesh_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("mesh csv: empty stream");
    BoundaryMesh mesh;
    int current_loop = -1;
    std::vector<Vec2> pending;
    auto flush = [&] {
        if (!pending.empty()) {
            if (pending.size() < 3) throw std::invalid_argument("mesh csv: loop too short");
            append_loop(mesh, pending);
            pending.clear();
        }
    };
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        int loop, idx;
        double x, y;
        char c1, c2, c3;
        if (!(row >> loop >> c1 >> idx >> c2 >> x >> c3 >> y) || c1 != ',' || c2 != ',' ||
            c3 != ',')
            throw std::invalid_argument("mesh csv: bad row: " + line);
        if (loop != current_loop) {
            flush();
            current_loop = loop;
        }
        pending.push_back({x, y});
    }
    flush();
    build_frames(mesh);
    return mesh;
}

}  // namespace ebem
