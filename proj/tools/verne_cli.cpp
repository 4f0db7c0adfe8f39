// verne: command-line front end for the hybrid machine kinematics library.
//
// Exit codes: 0 success, 1 domain error (error name on stderr), 2 usage
// error. All numeric output is printed with 12 significant digits and a
// locale-independent decimal point; solution rows are sorted canonically so
// identical inputs produce byte-identical output.
#include <CLI11.hpp>
#include <verne/verne.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

const char* to_string(verne::RootProvenance pr) {
    switch (pr) {
        case verne::RootProvenance::octic: return "octic";
        case verne::RootProvenance::half_angle: return "half_angle";
        default: return "symmetric";
    }
}

const char* to_string(verne::Branch b) {
    return b == verne::Branch::above ? "above" : "below";
}

// Flags shared by every subcommand.
struct Common {
    std::string params;
    std::string out;
    double tol = verne::kResidualTol;
    long seed = 0;  // reserved for randomized property runs
};

void add_common(CLI::App* cmd, Common& g) {
    cmd->add_option("--params", g.params,
                    "parameter file (default: $VERNE_PARAMS, else built-in "
                    "reference machine)");
    cmd->add_option("--tol", g.tol, "residual tolerance");
    cmd->add_option("--out", g.out,
                    "write output to this file (workspace: directory)");
    cmd->add_option("--seed", g.seed, "reserved; reproducible fuzz seed");
}

verne::MachineParams resolve_params(const std::string& path) {
    std::string file = path;
    if (file.empty())
        if (const char* env = std::getenv("VERNE_PARAMS")) file = env;
    if (file.empty()) return verne::reference_params();
    return verne::load_params_file(file);
}

// Stream selector: stdout, or the --out file when given.
struct Sink {
    std::ofstream file;
    std::ostream* s = &std::cout;

    explicit Sink(const std::string& path) {
        if (path.empty()) return;
        file.open(path);
        if (!file) throw verne::Error("ParseError", "cannot write " + path);
        s = &file;
    }
    std::ostream& out() { return *s; }
};

void run_validate(const Common& g) {
    const verne::MachineParams p = resolve_params(g.params);
    verne::validate(p);
    Sink sink(g.out);
    sink.out() << verne::serialize(p);
}

void run_ik(const Common& g, double x, double y, double z, double phi1,
            double phi2, bool tool_frame) {
    const verne::MachineParams p = resolve_params(g.params);
    std::vector<verne::IkCandidate> cands;
    if (tool_frame)
        cands = verne::ik_machine({x, y, z, phi1, phi2}, p, g.tol);
    else
        cands = verne::ik_parallel(x, y, z, p, g.tol);
    const verne::FilterResult fr = verne::filter_feasible(cands, p);

    Sink sink(g.out);
    sink.out() << "kind,theta1,theta2,alpha,x,y,z,rho1,rho2,rho3,"
                  "res1,res2,res3,res4,slider1,slider2,slider3,rods_ok,"
                  "stroke1,stroke2,stroke3,nonsing1,nonsing2,nonsing3,"
                  "orient_ok,feasible\n";
    auto row = [&](const char* kind, std::size_t i) {
        const verne::IkCandidate& c = cands[i];
        const verne::FeasibilityReport& r = fr.reports[i];
        sink.out() << kind << ',' << num(c.theta1) << ',' << num(c.theta2)
                   << ',' << num(c.pose.alpha) << ',' << num(c.pose.x) << ','
                   << num(c.pose.y) << ',' << num(c.pose.z);
        for (double v : c.rho) sink.out() << ',' << num(v);
        for (double v : c.residuals) sink.out() << ',' << num(v);
        for (bool b : r.slider_above) sink.out() << ',' << b;
        sink.out() << ',' << r.rod_crossing_ok;
        for (bool b : r.stroke) sink.out() << ',' << b;
        for (bool b : r.nonsingular) sink.out() << ',' << b;
        sink.out() << ',' << r.orientation_in_range << ',' << r.feasible()
                   << '\n';
    };
    for (std::size_t i = 0; i < cands.size(); ++i) row("candidate", i);

    std::size_t hits = 0, survivor = 0;
    for (std::size_t i = 0; i < fr.reports.size(); ++i)
        if (fr.reports[i].feasible()) {
            survivor = i;
            ++hits;
        }
    if (hits == 0) throw verne::NoFeasibleSolution();
    if (hits > 1) throw verne::MultipleFeasible(hits);
    row("survivor", survivor);
}

void run_fk(const Common& g, const verne::JointCoords& rho, double theta1,
            double theta2, bool with_table) {
    const verne::MachineParams p = resolve_params(g.params);
    const verne::FkResult r = verne::fk_parallel(rho, p, g.tol);

    Sink sink(g.out);
    sink.out() << "alpha,x,y,z,res1,res2,res3,res4,provenance,"
                  "branch1,branch2,branch3,machine_reachable";
    if (with_table) sink.out() << ",X_u,Y_u,Z_u,phi1,phi2";
    sink.out() << '\n';
    for (const verne::FkSolution& sol : r.solutions) {
        const verne::AssemblyMode mode =
            verne::classify_assembly_mode(sol.pose, rho, p);
        sink.out() << num(sol.pose.alpha) << ',' << num(sol.pose.x) << ','
                   << num(sol.pose.y) << ',' << num(sol.pose.z);
        for (double v : sol.residuals) sink.out() << ',' << num(v);
        sink.out() << ',' << to_string(sol.provenance);
        for (verne::Branch b : mode.branch) sink.out() << ',' << to_string(b);
        sink.out() << ',' << mode.machine_reachable;
        if (with_table) {
            const verne::ToolPose tool = verne::tool_pose_from_platform(
                sol.pose, {theta1, theta2}, p);
            sink.out() << ',' << num(tool.X_u) << ',' << num(tool.Y_u) << ','
                       << num(tool.Z_u) << ',' << num(tool.phi1) << ','
                       << num(tool.phi2);
        }
        sink.out() << '\n';
    }
    sink.out() << "# solutions = " << r.solutions.size() << '\n'
               << "# octic_degree = " << r.octic_degree << '\n'
               << "# sturm_distinct = " << r.sturm_distinct << '\n'
               << "# certified = " << r.certified << '\n'
               << "# spurious_roots = " << r.spurious_roots << '\n'
               << "# symmetric_branch_used = " << r.symmetric_branch_used
               << '\n';
}

void run_ellipse(const Common& g, double alpha, int samples) {
    const verne::MachineParams p = resolve_params(g.params);
    const verne::IsoOrientationEllipse e =
        verne::iso_orientation_ellipse(alpha, p);
    Sink sink(g.out);
    sink.out() << "center_x,a,b\n"
               << num(e.center_x) << ',' << num(e.a) << ',' << num(e.b)
               << '\n';
    if (samples > 0) {
        sink.out() << "x,y\n";
        for (int k = 0; k < samples; ++k) {
            double x = 0, y = 0;
            verne::ellipse_point(e, 2 * verne::kPi * k / samples, x, y);
            sink.out() << num(x) << ',' << num(y) << '\n';
        }
    }
}

void run_workspace(const Common& g, double delta, double phi1, double phi2,
                   const std::string& frame, int alpha_steps, int samples,
                   const verne::SweepWindows& window) {
    namespace fs = std::filesystem;
    const verne::MachineParams p = resolve_params(g.params);
    const verne::ConstraintLimits lim = verne::make_limits(p);

    // Replicate the sweep's analytic bounds to turn the cell size into grid
    // counts; explicit window limits override them.
    verne::WorkspaceOptions opt;
    opt.window = window;
    opt.tol = g.tol;
    opt.alpha_steps = alpha_steps;
    opt.ellipse_samples = samples;
    const double a_max =
        std::sqrt(verne::sq(p.L1) - verne::sq(p.R1 - p.r1));
    const double pad = 1e-9 * (1 + a_max);
    opt.xy_cells =
        std::max(2, int(std::ceil(2 * (a_max + pad) / delta)));
    const double u_max = std::max(p.R1, p.R2);
    const double l_max = std::max(p.L1, std::max(p.L2, p.L3));
    double z_lo = std::min({p.rho_min[0], p.rho_min[1], p.rho_min[2]}) - u_max;
    double z_hi = std::max({p.rho_max[0], p.rho_max[1], p.rho_max[2]}) +
                  u_max + l_max;
    if (std::isfinite(window.z_lo)) z_lo = window.z_lo;
    if (std::isfinite(window.z_hi)) z_hi = window.z_hi;
    opt.z_steps = std::max(1, int(std::ceil((z_hi - z_lo) / delta)));

    const verne::Workspace w = verne::full_workspace(p, lim, opt);

    fs::create_directories(g.out);

    {
        std::ofstream pts(fs::path(g.out) / "points.csv");
        pts << "frame,x,y,z,alpha\n";
        if (frame == "table") {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            for (const verne::Vec3& v :
                 verne::manufacturing_workspace(w, phi1, phi2, p))
                pts << "table," << num(v.x) << ',' << num(v.y) << ','
                    << num(v.z) << ',' << num(nan) << '\n';
        } else {
            for (const verne::CellRep& rep : w.reps)
                pts << "base," << num(rep.pose.x) << ',' << num(rep.pose.y)
                    << ',' << num(rep.pose.z) << ',' << num(rep.pose.alpha)
                    << '\n';
        }
    }

    for (std::size_t iz = 0; iz < w.z_layers.size(); ++iz) {
        char name[32];
        std::snprintf(name, sizeof name, "slice_%04zu.csv", iz);
        std::ofstream slice(fs::path(g.out) / name);
        slice << "x,y,code\n";
        for (int iy = 0; iy < w.ny; ++iy)
            for (int ix = 0; ix < w.nx; ++ix) {
                const double cx = w.x0 + (ix + 0.5) * w.dx;
                const double cy = w.y0 + (iy + 0.5) * w.dy;
                slice << num(cx) << ',' << num(cy) << ','
                      << verne::to_string(
                             w.cell_code[w.index(ix, iy, int(iz))])
                      << '\n';
            }
    }

    std::ostringstream sum;
    sum << "total_cells = " << w.total_cells() << '\n'
        << "grid = " << w.nx << " x " << w.ny << " x " << w.z_layers.size()
        << '\n'
        << "cell_volume_mm3 = " << num(w.cell_volume()) << '\n'
        << "volume_estimate_mm3 = " << num(w.volume_estimate()) << '\n';
    for (int i = 0; i < verne::kConstraintCodeCount; ++i)
        sum << verne::to_string(verne::ConstraintCode(i)) << " = "
            << w.code_counts[i] << '\n';
    std::ofstream(fs::path(g.out) / "summary.txt") << sum.str();
    std::cout << sum.str();
}

void run_oracle_ik(const Common& g, double x, double y, double z, int n) {
    const verne::MachineParams p = resolve_params(g.params);
    const verne::OracleIkResult r = verne::oracle_ik(x, y, z, p, n, g.tol);
    Sink sink(g.out);
    sink.out() << "alpha,rho1,rho2,rho3,max_residual\n";
    for (const verne::OracleIkCandidate& c : r.candidates) {
        sink.out() << num(c.alpha);
        for (double v : c.rho) sink.out() << ',' << num(v);
        sink.out() << ',' << num(c.max_residual) << '\n';
    }
    sink.out() << "# roll_roots = " << r.alphas.size() << '\n';
    for (double a : r.alphas) sink.out() << "# root " << num(a) << '\n';
}

void run_oracle_fk(const Common& g, const verne::JointCoords& rho, int n) {
    const verne::MachineParams p = resolve_params(g.params);
    const verne::OracleFkResult r = verne::oracle_fk(rho, p, n, g.tol);
    Sink sink(g.out);
    sink.out() << "alpha,x,y,z\n";
    for (const verne::PlatformPose& pose : r.poses)
        sink.out() << num(pose.alpha) << ',' << num(pose.x) << ','
                   << num(pose.y) << ',' << num(pose.z) << '\n';
    for (const verne::OracleInterval& b : r.excluded)
        sink.out() << "# excluded [" << num(b.lo) << ", " << num(b.hi)
                   << "]\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kinematics for a hybrid 5-axis machine: a 3-DOF parallel "
                 "module with coupled platform roll plus a 2-DOF tilting "
                 "table"};
    app.require_subcommand(1);

    Common g;

    auto* validate = app.add_subcommand(
        "validate", "load parameters, check them, echo the canonical form");
    add_common(validate, g);
    validate->callback([&] { run_validate(g); });

    double x = 0, y = 0, z = 0, phi1 = 0, phi2 = 0;
    bool tool_frame = false;
    auto* ik = app.add_subcommand(
        "ik", "inverse kinematics: position to slider candidates");
    add_common(ik, g);
    ik->add_option("--x", x, "target x (mm)")->required();
    ik->add_option("--y", y, "target y (mm)")->required();
    ik->add_option("--z", z, "target z (mm)")->required();
    ik->add_option("--phi1", phi1, "tool tilt about x (rad, tool frame)");
    ik->add_option("--phi2", phi2, "tool spin about z (rad, tool frame)");
    ik->add_flag("--tool-frame", tool_frame,
                 "treat x/y/z/phi1/phi2 as a tool pose in the table frame");
    ik->callback([&] { run_ik(g, x, y, z, phi1, phi2, tool_frame); });

    verne::JointCoords rho{0, 0, 0};
    double theta1 = 0, theta2 = 0;
    auto* fk = app.add_subcommand(
        "fk", "forward kinematics: slider set to assembly poses");
    add_common(fk, g);
    fk->add_option("--rho1", rho[0], "slider 1 (mm)")->required();
    fk->add_option("--rho2", rho[1], "slider 2 (mm)")->required();
    fk->add_option("--rho3", rho[2], "slider 3 (mm)")->required();
    auto* t1 = fk->add_option("--theta1", theta1, "table tilt (rad)");
    auto* t2 = fk->add_option("--theta2", theta2, "table spin (rad)");
    fk->callback([&] {
        run_fk(g, rho, theta1, theta2, t1->count() || t2->count());
    });

    double alpha = 0;
    int samples = 0;
    auto* ellipse = app.add_subcommand(
        "ellipse", "iso-orientation position locus for a platform roll");
    add_common(ellipse, g);
    ellipse->add_option("--alpha", alpha, "platform roll (rad)")->required();
    ellipse->add_option("--samples", samples, "also print N locus points");
    ellipse->callback([&] { run_ellipse(g, alpha, samples); });

    double delta = 0;
    std::string frame = "base";
    int alpha_steps = 181, ellipse_samples = 720;
    verne::SweepWindows window;
    auto* ws = app.add_subcommand(
        "workspace", "discretized workspace sweep written to a directory");
    add_common(ws, g);
    ws->add_option("--delta", delta, "cell size (mm)")
        ->required()
        ->check(CLI::PositiveNumber);
    ws->add_option("--phi1", phi1, "tool tilt for table-frame mapping (rad)");
    ws->add_option("--phi2", phi2, "tool spin for table-frame mapping (rad)");
    ws->add_option("--frame", frame, "points.csv frame")
        ->check(CLI::IsMember({"base", "table"}));
    ws->add_option("--alpha-steps", alpha_steps, "roll grid size");
    ws->add_option("--samples", ellipse_samples, "locus samples per slice");
    ws->add_option("--alpha-lo", window.alpha_lo, "roll window low (rad)");
    ws->add_option("--alpha-hi", window.alpha_hi, "roll window high (rad)");
    ws->add_option("--z-lo", window.z_lo, "z window low (mm)");
    ws->add_option("--z-hi", window.z_hi, "z window high (mm)");
    ws->callback([&] {
        if (g.out.empty())
            throw CLI::RequiredError("workspace: --out <directory>");
        run_workspace(g, delta, phi1, phi2, frame, alpha_steps,
                      ellipse_samples, window);
    });

    int grid = 4096;
    auto* orc =
        app.add_subcommand("oracle", "brute-force reference solvers");
    orc->require_subcommand(1);
    auto* oik = orc->add_subcommand("ik", "grid-scan inverse kinematics");
    add_common(oik, g);
    oik->add_option("--x", x, "target x (mm)")->required();
    oik->add_option("--y", y, "target y (mm)")->required();
    oik->add_option("--z", z, "target z (mm)")->required();
    oik->add_option("--n", grid, "scan grid size");
    oik->callback([&] { run_oracle_ik(g, x, y, z, grid); });
    auto* ofk = orc->add_subcommand("fk", "grid-scan forward kinematics");
    add_common(ofk, g);
    ofk->add_option("--rho1", rho[0], "slider 1 (mm)")->required();
    ofk->add_option("--rho2", rho[1], "slider 2 (mm)")->required();
    ofk->add_option("--rho3", rho[2], "slider 3 (mm)")->required();
    ofk->add_option("--n", grid, "scan grid size");
    ofk->callback([&] { run_oracle_fk(g, rho, grid); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const verne::Error& e) {
        std::cerr << e.what() << '\n';
        return 1;
    }
    return 0;
}
