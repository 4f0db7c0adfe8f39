#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>
#include <sys/wait.h>
#include <unistd.h>

// End-to-end checks driving the installed binary. The test runner exports
// VERNE_CLI (binary path) and VERNE_SOURCE_DIR (repository root).

namespace {

namespace fs = std::filesystem;

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() /
                     ("verne_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

// args is the shell fragment after the binary; env is an optional KEY=VALUE
// prefix for the child process
RunResult run_cli(const std::string& args, const std::string& env = "") {
    const char* exe = std::getenv("VERNE_CLI");
    REQUIRE(exe != nullptr);
    static int seq = 0;
    const fs::path out = scratch_dir() / ("out" + std::to_string(seq));
    const fs::path err = scratch_dir() / ("err" + std::to_string(seq));
    ++seq;
    std::string cmd = env.empty() ? "" : env + " ";
    cmd += "\"" + std::string(exe) + "\" " + args + " >" + out.string() +
           " 2>" + err.string();
    const int rc = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

int count_lines(const std::string& s) {
    int n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

// True when some CSV line carries (x, y, z) in columns 1..3 within tol.
// Solved poses print with residual-level digits, so exact substrings on
// round coordinates would be brittle.
bool has_xyz_row(const std::string& out, double x, double y, double z,
                 double tol = 1e-6) {
    std::istringstream lines(out);
    std::string line;
    while (std::getline(lines, line)) {
        std::istringstream fields(line);
        std::string cell;
        std::vector<double> v;
        while (std::getline(fields, cell, ',')) {
            char* end = nullptr;
            const double d = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str()) break;
            v.push_back(d);
        }
        if (v.size() >= 4 && std::fabs(v[1] - x) < tol &&
            std::fabs(v[2] - y) < tol && std::fabs(v[3] - z) < tol)
            return true;
    }
    return false;
}

bool cli_available() { return std::getenv("VERNE_CLI") != nullptr; }

}  // namespace

TEST_CASE("validate echoes the built-in machine", "[cli]") {
    if (!cli_available()) SKIP("VERNE_CLI not set");
    const RunResult r = run_cli("validate");
    CHECK(r.exit_code == 0);
    CHECK(r.err.empty());
    CHECK(contains(r.out, "R1 = 150 mm"));
    CHECK(contains(r.out, "rho_max = 1400 mm"));
    CHECK(contains(r.out, "passive_cone_half_angle = "));
}

TEST_CASE("validate accepts the shipped parameter file", "[cli]") {
    if (!cli_available()) SKIP("VERNE_CLI not set");
    const char* src = std::getenv("VERNE_SOURCE_DIR");
    REQUIRE(src != nullptr);
    const fs::path cfg = fs::path(src) / "data" / "reference_params.cfg";
    REQUIRE(fs::exists(cfg));
    const RunResult r = run_cli("validate --params " + cfg.string());
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "R1 = 150 mm"));
}

TEST_CASE("validate rejects broken parameters by key", "[cli]") {
    if (!cli_available()) SKIP("VERNE_CLI not set");
    const char* src = std::getenv("VERNE_SOURCE_DIR");
    REQUIRE(src != nullptr);
    std::string text =
        slurp(fs::path(src) / "data" / "reference_params.cfg");
    const auto at = text.find("R1 = 150 mm");
    REQUIRE(at != std::string::npos);
    text.replace(at, 11, "R1 = 110 mm");  // collides with r1
    const fs::path bad = scratch_dir() / "bad_params.cfg";
    std::ofstream(bad) << text;

    const RunResult r = run_cli("validate --params " + bad.string());
    CHECK(r.exit_code == 1);
    CHECK(contains(r.err, "InvalidValue: R1"));
    CHECK(r.out.empty());

    // the same file through the environment default
    const RunResult r2 = run_cli("validate", "VERNE_PARAMS=" + bad.string());
    CHECK(r2.exit_code == 1);
    CHECK(contains(r2.err, "InvalidValue: R1"));
}

TEST_CASE("ik prints candidates plus the unique survivor", "[cli]") {
    if (!cli_available()) SKIP("VERNE_CLI not set");
    const std::string args = "ik --x -240 --y -86 --z 1000";
    const RunResult r = run_cli(args);
    CHECK(r.exit_code == 0);
    CHECK(count_lines(r.out) == 18);  // header + 16 candidates + survivor
    CHECK(contains(r.out, "kind,theta1,theta2,alpha,x,y,z,rho1"));
    CHECK(contains(r.out, "\nsurvivor,"));
    CHECK(contains(r.out, ",84.9078409009,"));

    // byte-identical on repetition
    const RunResult r2 = run_cli(args);
    CHECK(r.out == r2.out);
}

TEST_CASE("ik reports unreachable targets on stderr", "[cli]") {
    if (!cli_available()) SKIP("VERNE_CLI not set");
    const RunResult r = run_cli("ik --x 4000 --y 0 --z 1000");
    CHECK(r.exit_code == 1);
    CHECK(contains(r.err, "Unreachable"));
}

TEST_CASE("fk reports the assembly set and solve diagnostics", "[cli]") {
    if (!cli_available()) SKIP("VERNE_CLI not set");
    const RunResult r = run_cli(
        "fk --rho1 84.9078409009 --rho2 108.846188435 --rho3 106.012365835");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "# solutions = 4"));
    CHECK(contains(r.out, "# octic_degree = 8"));
    CHECK(contains(r.out, "# certified = 1"));
    CHECK(contains(r.out, "# spurious_roots = 0"));
    CHECK(has_xyz_row(r.out, -240, -86, 1000));
    CHECK(contains(r.out, "octic,above,above,above,1"));

    // table angles append the tool columns
    const RunResult rt = run_cli(
        "fk --rho1 84.9078409009 --rho2 108.846188435 --rho3 106.012365835 "
        "--theta1 0.4 --theta2 0.3");
    CHECK(rt.exit_code == 0);
    CHECK(contains(rt.out, ",X_u,Y_u,Z_u,phi1,phi2"));
    CHECK(contains(rt.out, "-199.090757259"));
}

TEST_CASE("ellipse prints the locus parameters", "[cli]") {
    if (!cli_available()) SKIP("VERNE_CLI not set");
    const RunResult r = run_cli("ellipse --alpha 0.3 --samples 8");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "center_x,a,b\n-240,918.327884876,734.229175484"));
    CHECK(contains(r.out, "x,y\n"));
    CHECK(count_lines(r.out) == 11);  // two headers, one locus row, 8 points
}

TEST_CASE("output redirects to a file with --out", "[cli]") {
    if (!cli_available()) SKIP("VERNE_CLI not set");
    const fs::path out = scratch_dir() / "ellipse.csv";
    const RunResult r =
        run_cli("ellipse --alpha 0.3 --out " + out.string());
    CHECK(r.exit_code == 0);
    CHECK(r.out.empty());
    CHECK(contains(slurp(out), "918.327884876"));
}

TEST_CASE("oracle subcommands expose the brute-force solvers", "[cli]") {
    if (!cli_available()) SKIP("VERNE_CLI not set");
    const RunResult ik = run_cli("oracle ik --x -240 --y -86 --z 1000");
    CHECK(ik.exit_code == 0);
    CHECK(contains(ik.out, "# roll_roots = 4"));
    CHECK(count_lines(ik.out) == 1 + 16 + 1 + 4);

    const RunResult fk = run_cli(
        "oracle fk --rho1 84.9078409009 --rho2 108.846188435 "
        "--rho3 106.012365835");
    CHECK(fk.exit_code == 0);
    CHECK(count_lines(fk.out) == 5);  // header + four assembly poses
    CHECK(has_xyz_row(fk.out, -240, -86, 1000));
}

TEST_CASE("workspace writes a self-consistent directory", "[cli]") {
    if (!cli_available()) SKIP("VERNE_CLI not set");
    const fs::path dir = scratch_dir() / "ws";
    const std::string args =
        "workspace --delta 60 --alpha-lo -0.2 --alpha-hi 0.2 "
        "--alpha-steps 9 --samples 90 --z-lo 900 --z-hi 1100 --out " +
        dir.string();
    const RunResult r = run_cli(args);
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "grid = 31 x 31 x 4"));
    CHECK(contains(r.out, "total_cells = 3844"));
    REQUIRE(fs::exists(dir / "points.csv"));
    REQUIRE(fs::exists(dir / "summary.txt"));
    for (int i = 0; i < 4; ++i) {
        char name[20];
        std::snprintf(name, sizeof name, "slice_%04d.csv", i);
        CHECK(fs::exists(dir / name));
    }
    CHECK(slurp(dir / "summary.txt") == r.out);

    // counts cover the whole grid
    long long sum = 0;
    std::istringstream in(r.out);
    for (std::string line; std::getline(in, line);) {
        for (const char* code :
             {"ok = ", "interference = ", "leg_length = ",
              "serial_singularity = ", "passive_joint = ", "stroke = ",
              "coupling_empty = "})
            if (line.rfind(code, 0) == 0)
                sum += std::stoll(line.substr(line.find('=') + 1));
    }
    CHECK(sum == 3844);
    CHECK(contains(slurp(dir / "points.csv"), "base,"));

    // rerun into a fresh directory: byte-identical artifacts
    const fs::path dir2 = scratch_dir() / "ws2";
    const std::string args2 =
        "workspace --delta 60 --alpha-lo -0.2 --alpha-hi 0.2 "
        "--alpha-steps 9 --samples 90 --z-lo 900 --z-hi 1100 --out " +
        dir2.string();
    const RunResult r2 = run_cli(args2);
    CHECK(r2.exit_code == 0);
    CHECK(slurp(dir / "points.csv") == slurp(dir2 / "points.csv"));
    CHECK(slurp(dir / "summary.txt") == slurp(dir2 / "summary.txt"));

    // table-frame mapping produces the manufacturing point cloud
    const fs::path dir3 = scratch_dir() / "ws3";
    const RunResult r3 = run_cli(
        "workspace --delta 60 --alpha-lo -0.2 --alpha-hi 0.2 "
        "--alpha-steps 9 --samples 90 --z-lo 900 --z-hi 1100 "
        "--frame table --phi1 0.1 --phi2 0.2 --out " +
        dir3.string());
    CHECK(r3.exit_code == 0);
    CHECK(contains(slurp(dir3 / "points.csv"), "table,"));
}

TEST_CASE("usage errors exit with code 2", "[cli]") {
    if (!cli_available()) SKIP("VERNE_CLI not set");
    CHECK(run_cli("").exit_code == 2);           // missing subcommand
    CHECK(run_cli("frobnicate").exit_code == 2); // unknown subcommand
    CHECK(run_cli("ik --x 1 --y 2").exit_code == 2);  // missing --z
    CHECK(run_cli("workspace --delta 50").exit_code == 2);  // missing --out
    CHECK(run_cli("--help").exit_code == 0);
    CHECK(contains(run_cli("--help").out, "workspace"));
}
