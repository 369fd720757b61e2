// Command-line driver: solve / convergence / fieldmap / selftest.
// Exit codes: 0 ok, 1 numerical failure, 2 configuration error.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ebem/solver.hpp"

using json = nlohmann::json;
using namespace ebem;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json load_config(const std::string& path, const std::vector<std::string>& overrides)
{
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    json cfg;
    try {
        cfg = json::parse(is);
    } catch (const json::parse_error& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    for (const std::string& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw ConfigError("override must be key=value, got: " + ov);
        const std::string key = ov.substr(0, eq);
        const std::string val = ov.substr(eq + 1);
        json* node = &cfg;
        std::stringstream ss(key);
        std::string part;
        std::vector<std::string> parts;
        while (std::getline(ss, part, '.')) parts.push_back(part);
        if (parts.empty()) throw ConfigError("empty override key");
        for (size_t i = 0; i + 1 < parts.size(); ++i) node = &(*node)[parts[i]];
        try {
            (*node)[parts.back()] = json::parse(val);
        } catch (const json::parse_error&) {
            (*node)[parts.back()] = val;  // bare string
        }
    }
    return cfg;
}

const json& require(const json& j, const char* block, const char* field)
{
    auto it = j.find(field);
    if (it == j.end())
        throw ConfigError(std::string("missing config field \"") + block + "." + field + "\"");
    return *it;
}

Vec2 as_vec2(const json& j, const std::string& what)
{
    if (!j.is_array() || j.size() != 2)
        throw ConfigError(what + " must be a 2-element array");
    return Vec2(j[0].get<double>(), j[1].get<double>());
}

ElasticMedium parse_medium(const json& cfg)
{
    const json& m = require(cfg, "", "medium");
    const double lambda = m.value("lambda", 2.0);
    const double mu = m.value("mu", 1.0);
    const double rho = m.value("rho", 1.0);
    const double omega = require(m, "medium", "omega").get<double>();
    try {
        return ElasticMedium(lambda, mu, rho, omega);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid medium: ") + e.what());
    }
}

CurveSpec parse_curve(const json& g)
{
    const std::string name = require(g, "geometry", "curve").get<std::string>();
    if (name == "polygon") {
        Polygon poly;
        for (const json& v : require(g, "geometry", "vertices"))
            poly.vertices.push_back(as_vec2(v, "geometry.vertices entry"));
        return {std::move(poly)};
    }
    try {
        CurveSpec spec = curve_by_name(name);
        if (auto* c = std::get_if<Circle>(&spec.shape)) {
            c->radius = g.value("radius", c->radius);
            if (g.contains("center")) c->center = as_vec2(g["center"], "geometry.center");
        }
        if (auto* e = std::get_if<Ellipse>(&spec.shape)) {
            if (g.contains("center")) e->center = as_vec2(g["center"], "geometry.center");
            if (g.contains("semi_axes"))
                e->semi_axes = as_vec2(g["semi_axes"], "geometry.semi_axes");
        }
        return spec;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

SolverConfig parse_solver(const json& cfg, int threads_flag)
{
    SolverConfig sc;
    if (cfg.contains("solver")) {
        const json& s = cfg["solver"];
        sc.eta = s.value("eta", 1.0);
        sc.M = s.value("M", 20);
        sc.gauss_order = s.value("gauss_order", 8);
        sc.grading_depth = s.value("grading_depth", 3);
        sc.threads = s.value("threads", 0);
    }
    if (threads_flag > 0) sc.threads = threads_flag;
    if (sc.eta == 0.0)
        throw ConfigError("solver.eta must be nonzero (uniqueness of the combined equation)");
    if (sc.M < 1 || sc.gauss_order < 2 || sc.gauss_order > 64 || sc.grading_depth < 0)
        throw ConfigError("solver block out of range (M >= 1, 2 <= gauss_order <= 64, "
                          "grading_depth >= 0)");
    return sc;
}

struct IncidentConfig {
    IncidentField field;
    double amplitude = 1.0;
};

IncidentConfig parse_incident(const json& cfg)
{
    const json& inc = require(cfg, "", "incident");
    const std::string type = require(inc, "incident", "type").get<std::string>();
    IncidentConfig out;
    out.amplitude = inc.value("amplitude", 1.0);
    if (type == "plane_p") {
        Vec2 d(1.0, 0.0);
        if (inc.contains("direction")) d = as_vec2(inc["direction"], "incident.direction");
        const double n = d.norm();
        if (!(n > 0.0)) throw ConfigError("incident.direction must be nonzero");
        out.field = PlanePWave{d / n};
    } else if (type == "point_source") {
        Vec2 z(0.0, 0.0);
        if (inc.contains("source")) z = as_vec2(inc["source"], "incident.source");
        out.field = PointSourceP{z};
    } else if (type == "manufactured") {
        Vec2 z(0.0, 0.0);
        if (inc.contains("source")) z = as_vec2(inc["source"], "incident.source");
        out.field = Manufactured{z};
    } else {
        throw ConfigError("incident.type must be plane_p, point_source, or manufactured");
    }
    return out;
}

int parse_N(const json& cfg)
{
    const json& g = require(cfg, "", "geometry");
    const int N = require(g, "geometry", "N").get<int>();
    if (N < 3) throw ConfigError("geometry.N must be at least 3");
    return N;
}

std::string out_path(const std::string& dir, const std::string& name)
{
    if (dir.empty() || dir == ".") return name;
    return dir + "/" + name;
}

std::ofstream open_out(const std::string& path)
{
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open output file: " + path);
    os.precision(16);
    return os;
}

// ---------------------------------------------------------------- solve ----

int cmd_solve(const json& cfg, const std::string& out_dir, int threads)
{
    const ElasticMedium med = parse_medium(cfg);
    const CurveSpec spec = parse_curve(require(cfg, "", "geometry"));
    const SolverConfig sc = parse_solver(cfg, threads);
    const IncidentConfig inc = parse_incident(cfg);
    const int N = parse_N(cfg);
    const std::string prefix = cfg.contains("output")
                                   ? cfg["output"].value("prefix", std::string("run"))
                                   : std::string("run");

    const auto t0 = std::chrono::steady_clock::now();
    const BoundaryMesh mesh = sample_curve(spec, N);
    BoundarySolution sol = solve_scattering(med, mesh, inc.field, sc);
    sol.u *= inc.amplitude;  // pipeline is linear in the incident data
    sol.g *= inc.amplitude;
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                            .count();

    std::ofstream os = open_out(out_path(out_dir, prefix + "_solution.csv"));
    os << "# scattered boundary displacement at mesh nodes (nondimensional); "
          "loop/index follow the mesh numbering\n";
    os << "loop,index,x,y,re_u1,im_u1,re_u2,im_u2\n";
    for (int i = 0; i < mesh.n_nodes(); ++i) {
        const CVec2 u = sol.u.segment<2>(2 * i);
        os << mesh.loop_of[i] << ',' << i << ',' << mesh.nodes[i].x() << ','
           << mesh.nodes[i].y() << ',' << u(0).real() << ',' << u(0).imag() << ','
           << u(1).real() << ',' << u(1).imag() << '\n';
    }
    os << "# summary: N=" << mesh.n_nodes() << " omega=" << med.omega
       << " residual=" << sol.residual << " wall_seconds=" << wall << '\n';
    std::printf("solve: N=%d omega=%.6g residual=%.3e wall=%.2fs -> %s\n", mesh.n_nodes(),
                med.omega, sol.residual, wall,
                out_path(out_dir, prefix + "_solution.csv").c_str());
    return 0;
}

// ---------------------------------------------------------- convergence ----

int cmd_convergence(const json& cfg, const std::string& out_dir, int threads,
                    std::vector<int> Ns)
{
    const ElasticMedium med = parse_medium(cfg);
    const CurveSpec spec = parse_curve(require(cfg, "", "geometry"));
    const SolverConfig sc = parse_solver(cfg, threads);
    const IncidentConfig inc = parse_incident(cfg);
    const auto* mf = std::get_if<Manufactured>(&inc.field);
    if (!mf)
        throw ConfigError("convergence requires incident.type = manufactured "
                          "(needs an exact solution)");
    if (Ns.empty() && cfg.contains("convergence") && cfg["convergence"].contains("N_list"))
        Ns = cfg["convergence"]["N_list"].get<std::vector<int>>();
    if (Ns.empty()) throw ConfigError("no N list (config convergence.N_list or --N)");
    for (int N : Ns)
        if (N < 3) throw ConfigError("convergence N values must be at least 3");
    const std::string prefix = cfg.contains("output")
                                   ? cfg["output"].value("prefix", std::string("run"))
                                   : std::string("run");

    const auto rows = convergence_study(med, spec, Ns, sc, mf->source);

    std::ofstream os = open_out(out_path(out_dir, prefix + "_convergence.csv"));
    os << "# manufactured-solution refinement study; l2_error = L2(Gamma) norm of "
          "u - u_h, order = log(e_prev/e)/log(N/N_prev)\n";
    os << "N,omega,l2_error,order\n";
    for (size_t k = 0; k < rows.size(); ++k) {
        os << rows[k].N << ',' << med.omega << ',' << rows[k].l2 << ',';
        if (k > 0) os << rows[k].order_l2;
        os << '\n';
        std::printf("N=%5d  L2=%.4e  order=%s\n", rows[k].N, rows[k].l2,
                    k > 0 ? std::to_string(rows[k].order_l2).c_str() : "--");
    }
    std::printf("-> %s\n", out_path(out_dir, prefix + "_convergence.csv").c_str());
    return 0;
}

// -------------------------------------------------------------- fieldmap ----

int cmd_fieldmap(const json& cfg, const std::string& out_dir, int threads)
{
    const ElasticMedium med = parse_medium(cfg);
    const CurveSpec spec = parse_curve(require(cfg, "", "geometry"));
    const SolverConfig sc = parse_solver(cfg, threads);
    const IncidentConfig inc = parse_incident(cfg);
    const int N = parse_N(cfg);
    const json& out_block = require(cfg, "", "output");
    const json& grid = require(out_block, "output", "grid");
    const double xmin = require(grid, "output.grid", "xmin").get<double>();
    const double xmax = require(grid, "output.grid", "xmax").get<double>();
    const double ymin = require(grid, "output.grid", "ymin").get<double>();
    const double ymax = require(grid, "output.grid", "ymax").get<double>();
    const int nx = require(grid, "output.grid", "nx").get<int>();
    const int ny = require(grid, "output.grid", "ny").get<int>();
    if (!(xmax > xmin) || !(ymax > ymin) || nx < 2 || ny < 2)
        throw ConfigError("output.grid must have positive extents and nx, ny >= 2");
    const std::string which = out_block.value("field", std::string("scattered"));
    if (which != "scattered" && which != "total")
        throw ConfigError("output.field must be scattered or total");
    const std::string prefix = out_block.value("prefix", std::string("run"));

    const BoundaryMesh mesh = sample_curve(spec, N);
    BoundarySolution sol = solve_scattering(med, mesh, inc.field, sc);
    sol.u *= inc.amplitude;
    sol.g *= inc.amplitude;

    double hmax = 0.0;
    for (double h : mesh.seg_len) hmax = std::max(hmax, h);

    // Mask interior points and a one-segment-wide collar; evaluate the rest.
    std::vector<Vec2> pts;
    std::vector<int> mask(size_t(nx) * ny, 1);
    std::vector<size_t> live;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const Vec2 p(xmin + (xmax - xmin) * i / (nx - 1),
                         ymin + (ymax - ymin) * j / (ny - 1));
            bool near = point_in_obstacle(mesh, p);
            for (int s = 0; !near && s < mesh.n_nodes(); ++s)
                near = (p - mesh.seg_mid[s]).norm() < hmax;
            if (!near) {
                mask[size_t(j) * nx + i] = 0;
                live.push_back(size_t(j) * nx + i);
                pts.push_back(p);
            }
        }
    }
    const std::vector<CVec2> vals = represent_field(med, mesh, sol, pts, sc);

    std::vector<CVec2> field(size_t(nx) * ny, CVec2::Zero());
    for (size_t k = 0; k < live.size(); ++k) {
        CVec2 u = vals[k];
        if (which == "total")
            u += inc.amplitude * incident_displacement(med, inc.field, pts[k]);
        field[live[k]] = u;
    }

    std::ofstream os = open_out(out_path(out_dir, prefix + "_field.csv"));
    os << "# " << which << " displacement field on a " << nx << "x" << ny
       << " grid; mask=1 marks points inside an obstacle or within one segment "
          "length of the boundary (field set to 0 there)\n";
    os << "x,y,re_u1,im_u1,re_u2,im_u2,mask\n";
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const size_t idx = size_t(j) * nx + i;
            const Vec2 p(xmin + (xmax - xmin) * i / (nx - 1),
                         ymin + (ymax - ymin) * j / (ny - 1));
            const CVec2& u = field[idx];
            os << p.x() << ',' << p.y() << ',' << u(0).real() << ',' << u(0).imag() << ','
               << u(1).real() << ',' << u(1).imag() << ',' << mask[idx] << '\n';
        }
    }
    std::printf("fieldmap: %d x %d grid, %zu evaluated, %zu masked -> %s\n", nx, ny,
                live.size(), mask.size() - live.size(),
                out_path(out_dir, prefix + "_field.csv").c_str());
    return 0;
}

// -------------------------------------------------------------- selftest ----

struct Suite {
    std::string name;
    int passed = 0;
    int failed = 0;
    std::vector<std::string> messages;

    void check(bool ok, const std::string& what)
    {
        if (ok) {
            ++passed;
        } else {
            ++failed;
            messages.push_back(what);
        }
    }
};

int cmd_selftest(const std::string& perturb_moment)
{
    std::vector<Suite> suites;

    {
        Suite s{"special-functions"};
        for (double x : {0.1, 1.0, 10.0, 50.0}) {
            const auto [j0, y0] = bessel_jy(0, x);
            const auto [j1, y1] = bessel_jy(1, x);
            const double w = j0 * y1 - j1 * y0 + 2.0 / (M_PI * x);
            s.check(std::abs(w) <= 1e-12 * 2.0 / (M_PI * x),
                    "Wronskian at x=" + std::to_string(x));
        }
        for (double x : {0.1, 1.0, 5.0, 25.0, 100.0}) {
            const Complex r = hankel1(2, x) - (2.0 / x) * hankel1(1, x) + hankel1(0, x);
            s.check(std::abs(r) <= 1e-12 * std::abs(hankel1(2, x)),
                    "Hankel recurrence at x=" + std::to_string(x));
        }
        const Complex h0 = hankel1(0, 1.0);
        s.check(std::abs(h0 - Complex(0.765197687, 0.088256964)) < 1e-8, "H0(1) value");
        suites.push_back(std::move(s));
    }

    {
        Suite s{"series-vs-direct"};
        const ElasticMedium med(2.0, 1.0, 1.0, 1.0);
        const SeriesCoefficients sc = series_coefficients(med, 20);
        const double r = M_PI / med.ks();
        for (FKind kind : {FKind::F1, FKind::F2, FKind::F3}) {
            Complex ser;
            switch (kind) {
            case FKind::F1: ser = f1_series(sc, r); break;
            case FKind::F2: ser = f2_series(sc, r); break;
            case FKind::F3: ser = f3_series(med.ks(), 20, r); break;
            }
            const Complex dir = f_direct(kind, med.ks(), med.kp(), r);
            s.check(std::abs(ser - dir) <= 1e-10 * std::abs(dir),
                    "series F" + std::to_string(int(kind) + 1) + " at r=pi/ks");
        }
        suites.push_back(std::move(s));
    }

    {
        Suite s{"moment-table"};
        int pk = -1, pm = -1;
        if (!perturb_moment.empty()) {
            if (std::sscanf(perturb_moment.c_str(), "%d,%d", &pk, &pm) != 2)
                throw ConfigError("--perturb-moment expects kind,m");
        }
        const SingularTable& tab = singular_table(20);
        const std::vector<double>* cols[6] = {&tab.I1, &tab.I2, &tab.I3,
                                              &tab.I4, &tab.I5, &tab.I6};
        for (int kind = 1; kind <= 6; ++kind) {
            for (int m = 0; m <= 20; ++m) {
                double v = (*cols[kind - 1])[m];
                if (kind == pk && m == pm) v += 1e-6;  // fault-injection hook
                s.check(std::abs(v - oracle_moment(m, kind)) <= 1e-10,
                        "I" + std::to_string(kind) + "[" + std::to_string(m) +
                            "] vs quadrature oracle");
            }
        }
        suites.push_back(std::move(s));
    }

    {
        Suite s{"kernels"};
        const ElasticMedium med(2.0, 1.0, 1.0, 3.0);
        const KernelContext ctx(med);
        const Vec2 xs[3] = {{0.3, -0.7}, {1.2, 0.4}, {-0.5, 2.0}};
        const Vec2 ys[3] = {{1.0, 1.0}, {-0.2, -0.1}, {0.8, -1.4}};
        for (int k = 0; k < 3; ++k) {
            const CMat22 E = fundamental_tensor(ctx, xs[k], ys[k]);
            const CMat22 Et = fundamental_tensor(ctx, ys[k], xs[k]);
            s.check((E - E.transpose()).cwiseAbs().maxCoeff() <= 1e-14, "E symmetry");
            s.check((E - Et).cwiseAbs().maxCoeff() <= 1e-14, "E(x,y) = E(y,x)");
        }
        // Columns of E solve the Navier equation in x away from y.
        const Vec2 y(0.0, 0.0), x(0.9, 0.4);
        const double h = 1e-4;
        const double mu = med.mu, lam = med.lambda;
        CMat22 nav = CMat22::Zero();
        auto Eat = [&](double dx, double dy) {
            return fundamental_tensor(ctx, Vec2(x.x() + dx, x.y() + dy), y);
        };
        const CMat22 E0 = Eat(0, 0);
        const CMat22 dxx = (Eat(h, 0) - 2.0 * E0 + Eat(-h, 0)) / (h * h);
        const CMat22 dyy = (Eat(0, h) - 2.0 * E0 + Eat(0, -h)) / (h * h);
        const CMat22 dxy = (Eat(h, h) - Eat(h, -h) - Eat(-h, h) + Eat(-h, -h)) / (4 * h * h);
        nav.row(0) = mu * (dxx.row(0) + dyy.row(0)) +
                     (lam + mu) * (dxx.row(0) + dxy.row(1));
        nav.row(1) = mu * (dxx.row(1) + dyy.row(1)) +
                     (lam + mu) * (dxy.row(0) + dyy.row(1));
        nav += med.rho * med.omega * med.omega * E0;
        s.check(nav.cwiseAbs().maxCoeff() <= 1e-4, "Navier residual of E (finite differences)");
        suites.push_back(std::move(s));
    }

    {
        Suite s{"mass-matrices"};
        const BoundaryMesh mesh = sample_curve(curve_by_name("kite"), 64);
        const Eigen::MatrixXcd I1 = assemble_mass_hat(mesh);
        const Eigen::MatrixXcd I2 = assemble_mass_mixed(mesh);
        s.check((I1 - I1.transpose()).cwiseAbs().maxCoeff() <= 1e-15, "I1 symmetric");
        for (int i = 0; i < mesh.n_nodes(); ++i) {
            const double expect = 0.5 * (mesh.seg_len[i] + mesh.seg_len[mesh.prev[i]]);
            s.check(std::abs(I1.row(2 * i).sum().real() - expect) <= 1e-13, "I1 row sum");
            s.check(std::abs(I2.row(2 * i).sum().real() - expect) <= 1e-13, "I2 row sum");
        }
        // two identical scalar components per node
        s.check(std::abs(I1.sum().real() - 2.0 * mesh.perimeter()) <= 1e-12,
                "I1 total mass");
        suites.push_back(std::move(s));
    }

    int total_failed = 0;
    for (const Suite& s : suites) {
        std::printf("%-18s %d passed, %d failed\n", s.name.c_str(), s.passed, s.failed);
        for (const std::string& m : s.messages) std::printf("    FAIL: %s\n", m.c_str());
        total_failed += s.failed;
    }
    std::printf(total_failed == 0 ? "selftest: all suites passed\n"
                                  : "selftest: %d check(s) failed\n",
                total_failed);
    return total_failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Galerkin boundary-element solver for 2D exterior elastic scattering"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", perturb_moment, n_list_arg;
    int threads = 0;
    std::vector<std::string> overrides;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* opt = sub->add_option("--config", config_path, "JSON run configuration");
        if (needs_config) opt->required();
        sub->add_option("--out", out_dir, "output directory (default: current)");
        sub->add_option("--threads", threads, "assembly threads (0 = hardware)");
        sub->add_option("--override", overrides,
                        "config override key=value (dotted path, repeatable)");
    };

    CLI::App* solve = app.add_subcommand("solve", "solve one scattering problem");
    add_common(solve, true);
    CLI::App* conv = app.add_subcommand("convergence", "manufactured refinement study");
    add_common(conv, true);
    conv->add_option("--N", n_list_arg, "comma-separated N list (overrides config)");
    CLI::App* field = app.add_subcommand("fieldmap", "evaluate the field on a grid");
    add_common(field, true);
    CLI::App* selftest = app.add_subcommand("selftest", "run built-in invariant suites");
    selftest->add_option("--perturb-moment", perturb_moment,
                         "fault-injection hook: kind,m entry to perturb by 1e-6")
        ->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (selftest->parsed()) return cmd_selftest(perturb_moment);
        const json cfg = load_config(config_path, overrides);
        if (solve->parsed()) return cmd_solve(cfg, out_dir, threads);
        if (conv->parsed()) {
            std::vector<int> Ns;
            if (!n_list_arg.empty()) {
                std::stringstream ss(n_list_arg);
                std::string tok;
                while (std::getline(ss, tok, ',')) Ns.push_back(std::stoi(tok));
            }
            return cmd_convergence(cfg, out_dir, threads, Ns);
        }
        return cmd_fieldmap(cfg, out_dir, threads);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const json::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
