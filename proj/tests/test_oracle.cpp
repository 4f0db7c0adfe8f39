#include <catch2/catch_amalgamated.hpp>
#include <verne/fk.hpp>
#include <verne/ik.hpp>
#include <verne/oracle.hpp>

#include <cmath>

using namespace verne;

namespace {

bool same_candidate(const OracleIkCandidate& o, const IkCandidate& s,
                    double tol = 1e-6) {
    return std::fabs(normalize_angle(o.alpha - s.pose.alpha)) < tol &&
           std::fabs(o.rho[0] - s.rho[0]) < tol &&
           std::fabs(o.rho[1] - s.rho[1]) < tol &&
           std::fabs(o.rho[2] - s.rho[2]) < tol;
}

void check_ik_agreement(double x, double y, double z) {
    const MachineParams p = reference_params();
    const auto solver = ik_parallel(x, y, z, p);
    const OracleIkResult oracle = oracle_ik(x, y, z, p);

    REQUIRE(oracle.candidates.size() == solver.size());
    // bijection: every scan hit has exactly one analytic partner
    std::vector<bool> used(solver.size(), false);
    for (const OracleIkCandidate& oc : oracle.candidates) {
        bool matched = false;
        for (std::size_t i = 0; i < solver.size() && !matched; ++i) {
            if (used[i] || !same_candidate(oc, solver[i])) continue;
            used[i] = true;
            matched = true;
        }
        CHECK(matched);
        CHECK(oc.max_residual < 1e-9);
    }
}

}  // namespace

TEST_CASE("scan oracle reproduces the analytic inverse solution set",
          "[oracle]") {
    check_ik_agreement(-240, -86, 1000);
}

TEST_CASE("scan oracle handles tangent roots on the symmetry plane",
          "[oracle]") {
    // y = 0 makes 0 and pi double roots of the coupling relation; the
    // oracle finds them by dip refinement rather than sign change
    check_ik_agreement(-240, 0, 1000);
    const OracleIkResult o = oracle_ik(-240, 0, 1000, reference_params());
    REQUIRE(o.alphas.size() == 2);
    CHECK(std::fabs(o.alphas[0]) < 1e-6);
    CHECK(std::fabs(std::fabs(o.alphas[1]) - kPi) < 1e-6);
}

TEST_CASE("scan oracle finds nothing beyond reach", "[oracle]") {
    const MachineParams p = reference_params();

    // off the x axis the coupling residual is bounded away from zero
    const OracleIkResult o = oracle_ik(4000, -50, 1000, p);
    CHECK(o.alphas.empty());
    CHECK(o.candidates.empty());

    // on the x axis the residual degenerates at zero-sine rolls (the locus
    // is a segment there), so the rolls appear but no slider set does
    const OracleIkResult axis = oracle_ik(4000, 0, 1000, p);
    REQUIRE(axis.alphas.size() == 2);
    CHECK(std::fabs(axis.alphas[0]) < 1e-6);
    CHECK(std::fabs(std::fabs(axis.alphas[1]) - kPi) < 1e-6);
    CHECK(axis.candidates.empty());
}

TEST_CASE("scan oracle is stable under grid refinement", "[oracle]") {
    const MachineParams p = reference_params();
    const OracleIkResult a = oracle_ik(-240, -86, 1000, p, 2048);
    const OracleIkResult b = oracle_ik(-240, -86, 1000, p, 4096);
    REQUIRE(a.alphas.size() == b.alphas.size());
    REQUIRE(a.candidates.size() == b.candidates.size());
    for (std::size_t i = 0; i < a.alphas.size(); ++i)
        CHECK(a.alphas[i] == Catch::Approx(b.alphas[i]).margin(1e-6));
}

TEST_CASE("scan oracle reproduces forward assembly sets", "[oracle]") {
    const MachineParams p = reference_params();
    for (const JointCoords& rho :
         {JointCoords{84.9078409009, 108.846188435, 106.012365835},
          JointCoords{674, 685, 250}}) {
        const FkResult r = fk_parallel(rho, p);
        const OracleFkResult o = oracle_fk(rho, p);
        CHECK(o.excluded.empty());
        REQUIRE(o.poses.size() == r.solutions.size());
        for (std::size_t i = 0; i < o.poses.size(); ++i) {
            CHECK(o.poses[i].alpha ==
                  Catch::Approx(r.solutions[i].pose.alpha).margin(1e-6));
            CHECK(o.poses[i].x ==
                  Catch::Approx(r.solutions[i].pose.x).margin(1e-6));
            CHECK(o.poses[i].y ==
                  Catch::Approx(r.solutions[i].pose.y).margin(1e-6));
            CHECK(o.poses[i].z ==
                  Catch::Approx(r.solutions[i].pose.z).margin(1e-6));
        }
    }
}

TEST_CASE("forward oracle reports guard bands instead of guessing",
          "[oracle]") {
    const MachineParams p = reference_params();
    // equal rear sliders: the back-substitution denominator vanishes at the
    // symmetric rolls, so the scan must skip bands around them
    const JointCoords rho{117.503541, 126.423444, 126.423444};
    const FkResult r = fk_parallel(rho, p);
    const OracleFkResult o = oracle_fk(rho, p);
    CHECK_FALSE(o.excluded.empty());
    for (const OracleInterval& b : o.excluded) CHECK(b.lo < b.hi);

    auto inside_excluded = [&](double a) {
        for (const OracleInterval& b : o.excluded)
            if (a >= b.lo && a <= b.hi) return true;
        return false;
    };
    // every oracle pose matches a solver pose
    for (const PlatformPose& op : o.poses) {
        bool matched = false;
        for (const FkSolution& s : r.solutions)
            matched =
                matched ||
                (std::fabs(normalize_angle(op.alpha - s.pose.alpha)) < 1e-6 &&
                 std::fabs(op.x - s.pose.x) < 1e-6 &&
                 std::fabs(op.y - s.pose.y) < 1e-6 &&
                 std::fabs(op.z - s.pose.z) < 1e-6);
        CHECK(matched);
    }
    // solver poses the oracle missed must sit inside a skipped band
    for (const FkSolution& s : r.solutions) {
        bool matched = false;
        for (const PlatformPose& op : o.poses)
            matched = matched ||
                      std::fabs(normalize_angle(op.alpha - s.pose.alpha)) <
                          1e-6;
        if (!matched) CHECK(inside_excluded(normalize_angle(s.pose.alpha)));
    }
}
