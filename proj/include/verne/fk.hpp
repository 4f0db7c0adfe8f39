#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ik.hpp"
#include "legs.hpp"
#include "params.hpp"
#include "polyroots.hpp"
#include "transforms.hpp"

namespace verne {

struct NoAssembly : Error {
    NoAssembly() : Error("NoAssembly",
                         "no platform pose assembles the slider set") {}
};
struct SingularDenominator : Error {
    explicit SingularDenominator(const std::string& which)
        : Error("SingularDenominator", which) {}
};

// How a forward solution was obtained: a finite root of the assembly
// polynomial, the roll = pi branch that the half-angle substitution cannot
// represent, or the direct two-circle solve used when the linear elimination
// degenerates (near-equal rho2, rho3 at roll 0 / pi).
enum class RootProvenance { octic, half_angle, symmetric };

struct FkSolution {
    PlatformPose pose;
    RootProvenance provenance = RootProvenance::octic;
    std::array<double, 4> residuals{0, 0, 0, 0};
};

struct FkResult {
    std::vector<FkSolution> solutions;  // ascending in roll angle
    Poly octic;                         // length 9, ascending
    int octic_degree = 0;               // effective degree actually solved
    int sturm_distinct = 0;
    bool certified = false;
    int spurious_roots = 0;  // polynomial roots discarded at denominator zeros
    bool symmetric_branch_used = false;
};

// Per-leg slider placement relative to the leg's quadratic center, plus
// whether the pose lies in the machine's working mode.
struct AssemblyMode {
    std::array<Branch, 3> branch{Branch::above, Branch::above, Branch::above};
    bool machine_reachable = false;
};

namespace fkdetail {

inline double c1_guard(const MachineParams& p) {
    return 1e-8 * (p.R1 + p.r1);
}

inline double w_guard(const JointCoords& rho, const MachineParams& p) {
    return 1e-8 * (std::fabs(rho[1] - rho[2]) * (p.R1 + p.r1) +
                   2 * std::fabs(p.R2 * p.r1 - p.R1 * p.r4) + 1);
}

// Determinant of the (y, z) elimination block; vanishing means the three
// difference equations no longer fix the position.
inline double assembly_det(double c, double s, const JointCoords& rho,
                           const MachineParams& p) {
    const double w1 = p.R1 * c - p.r1, w2 = p.R2 * c - p.r4;
    const double u1 = p.R1 * s, u2 = p.R2 * s;
    const double G = (rho[2] - rho[1]) - 2 * u2;
    return w1 * G + 2 * u1 * w2;
}

}  // namespace fkdetail

// Position of the platform for a fixed roll angle, by sequential elimination
// of the pairwise-differenced leg equations. Throws SingularDenominator when
// the roll relation (R1 cos a = r1) or the assembly determinant degenerates.
inline PlatformPose fk_back_substitute_cs(double c, double s,
                                          const JointCoords& rho,
                                          const MachineParams& p) {
    const double w1 = p.R1 * c - p.r1, w2 = p.R2 * c - p.r4;
    const double u1 = p.R1 * s, u2 = p.R2 * s;
    if (std::fabs(w1) < fkdetail::c1_guard(p))
        throw SingularDenominator("roll relation denominator R1 cos a - r1");

    const double G = (rho[2] - rho[1]) - 2 * u2;
    const double b2 =
        G * (rho[1] + rho[2]) / 2 + (sq(p.L2) - sq(p.L3)) / 2;
    const double W = w1 * G + 2 * u1 * w2;
    if (std::fabs(W) < fkdetail::w_guard(rho, p))
        throw SingularDenominator("assembly determinant");

    const double z = (w1 * b2 + 2 * w2 * u1 * rho[0]) / W;
    const double y = u1 * (rho[0] - z) / w1;

    const double dd1 = p.D1 - p.d1, dd2 = p.D2 - p.d2;
    const double rhs3 = sq(p.L1) - sq(p.L2) - sq(dd1) + sq(dd2) - sq(w1) +
                        sq(w2) - sq(u1 - rho[0]) + sq(u2 + rho[1]);
    const double x = (rhs3 - 2 * (w1 + w2) * y -
                      2 * (u1 + u2 - rho[0] + rho[1]) * z) /
                     (2 * (dd1 - dd2));
    return {x, y, z, std::atan2(s, c)};
}

inline PlatformPose fk_back_substitute(double alpha, const JointCoords& rho,
                                       const MachineParams& p) {
    return fk_back_substitute_cs(std::cos(alpha), std::sin(alpha), rho, p);
}

// Coefficients (ascending, length 9) of the assembly polynomial in
// s = tan(alpha/2): the leg I residual at the back-substituted position,
// cleared of the elimination denominator and the half-angle denominator.
// Sample nodes that land on a denominator zero are nudged deterministically.
inline Poly fk_octic(const JointCoords& rho, const MachineParams& p) {
    auto sample = [&](double t) {
        const double w = 1 + t * t;
        const double c = (1 - t * t) / w, sn = 2 * t / w;
        const PlatformPose pose = fk_back_substitute_cs(c, sn, rho, p);
        const LegFrame f = leg_frame(pose.x, c, sn, p);
        const double res =
            leg1_rod1_residual(f, pose.y, pose.z, rho[0], p);
        const double what = (rho[2] - rho[1]) * (p.R1 * (1 - t * t) -
                                                 p.r1 * (1 + t * t)) +
                            4 * t * (p.R2 * p.r1 - p.R1 * p.r4);
        return res * what * what * w * w;
    };

    std::vector<std::pair<double, double>> samples;
    double yscale = 0;
    for (double x : chebyshev_nodes(9, -2.0, 2.0)) {
        for (int attempt = 0;; ++attempt) {
            try {
                const double y = sample(x);
                yscale = std::max(yscale, std::fabs(y));
                samples.push_back({x, y});
                break;
            } catch (const SingularDenominator&) {
                if (attempt >= 8) throw;
                x += 0.0137 * (attempt + 1);
            }
        }
    }
    const Poly c = interpolate_coeffs(samples, 8);

    // Out-of-sample audit certifying the degree-8 claim.
    yscale = std::max(yscale, 1e-300);
    int audited = 0;
    for (int k = 1; k <= 50; ++k) {
        const double x = -2.0 + 4.0 * k / 51.0;
        try {
            if (std::fabs(poly_eval(c, x) - sample(x)) > 1e-9 * yscale)
                throw DegreeOverflow();
            ++audited;
        } catch (const SingularDenominator&) {
            // denominator zero: the sampled form is undefined there
        }
    }
    if (audited < 30) throw IllConditioned();
    return c;
}

namespace fkdetail {

// Direct solve on the symmetric branches (roll exactly 0 or pi) where the
// elimination determinant vanishes for rho2 == rho3: y is forced to zero and
// the two remaining independent equations are circles in the (x, z) plane.
inline std::vector<PlatformPose> symmetric_branch(double c,
                                                  const JointCoords& rho,
                                                  const MachineParams& p,
                                                  double tol) {
    std::vector<PlatformPose> out;
    if (std::fabs(rho[1] - rho[2]) >
        1e-9 * (1 + std::fabs(rho[1]) + std::fabs(rho[2])))
        return out;
    if (std::fabs(p.L2 - p.L3) > 1e-12 * std::max(p.L2, p.L3)) return out;

    const double alpha = c > 0 ? 0.0 : kPi;
    const double w1 = p.R1 * c - p.r1, w2 = p.R2 * c - p.r4;
    const double rb = 0.5 * (rho[1] + rho[2]);
    const double q1 = sq(p.L1) - sq(w1), q2 = sq(p.L2) - sq(w2);
    if (q1 < 0 || q2 < 0) return out;

    // x = a + b z from the circle difference.
    const double dd1 = p.D1 - p.d1, dd2 = p.D2 - p.d2;
    const double b = -(rb - rho[0]) / (dd1 - dd2);
    const double a = (q1 - q2 - sq(dd1) + sq(dd2) - sq(rho[0]) + sq(rb)) /
                     (2 * (dd1 - dd2));

    // Back into circle 2: quadratic in z.
    const double A = 1 + sq(b);
    const double B = 2 * ((a + dd2) * b - rb);
    const double C = sq(a + dd2) + sq(rb) - q2;
    const double disc = sq(B) - 4 * A * C;
    if (disc < 0) return out;
    for (double sign : {-1.0, 1.0}) {
        const double z = (-B + sign * std::sqrt(disc)) / (2 * A);
        const PlatformPose pose{a + b * z, 0.0, z, alpha};
        const auto res = constraint_residuals(pose, rho, p);
        bool ok = true;
        for (double r : res) ok = ok && std::fabs(r) <= tol;
        if (ok) out.push_back(pose);
        if (disc == 0) break;
    }
    return out;
}

}  // namespace fkdetail

// All assembly poses for a slider set: real roots of the assembly polynomial
// (polished against the back-substitution residual), the roll = pi branch,
// and the symmetric branches when the elimination degenerates. Throws
// NoAssembly when nothing satisfies the constraints to `tol`.
inline FkResult fk_parallel(const JointCoords& rho, const MachineParams& p,
                            double tol = kResidualTol) {
    FkResult out;
    const double good = std::max(tol, 1e-9);

    // Normalized residual of the full constraint set at the back-substituted
    // pose; NaN where the elimination is undefined.
    auto rel = [&](double alpha) {
        try {
            const PlatformPose pose = fk_back_substitute(alpha, rho, p);
            const auto res = constraint_residuals(pose, rho, p);
            double m = 0;
            for (double r : res) m = std::max(m, std::fabs(r));
            return m;
        } catch (const SingularDenominator&) {
            return std::numeric_limits<double>::quiet_NaN();
        }
    };
    auto signed_rel = [&](double alpha) {
        try {
            const PlatformPose pose = fk_back_substitute(alpha, rho, p);
            const double c = std::cos(alpha), s = std::sin(alpha);
            const LegFrame f = leg_frame(pose.x, c, s, p);
            return leg1_rod1_residual(f, pose.y, pose.z, rho[0], p) /
                   sq(p.L1);
        } catch (const SingularDenominator&) {
            return std::numeric_limits<double>::quiet_NaN();
        }
    };

    struct Cand {
        double alpha;
        RootProvenance prov;
    };
    std::vector<Cand> cands;

    bool octic_zero = false;
    try {
        out.octic = fk_octic(rho, p);
        const RealRootResult rr = real_roots(out.octic);
        out.octic_degree = rr.degree;
        out.sturm_distinct = rr.sturm_distinct;
        out.certified = rr.certified;
        for (const RootEstimate& re : rr.roots) {
            const double alpha = normalize_angle(2 * std::atan(re.x));
            const double cs = std::cos(alpha), sn = std::sin(alpha);
            if (std::fabs(fkdetail::assembly_det(cs, sn, rho, p)) <
                    fkdetail::w_guard(rho, p) ||
                std::fabs(p.R1 * cs - p.r1) < fkdetail::c1_guard(p)) {
                ++out.spurious_roots;  // denominator zero, not an assembly
                continue;
            }
            cands.push_back({alpha, RootProvenance::octic});
        }
    } catch (const ZeroPolynomial&) {
        octic_zero = true;  // fully degenerate architecture at this rho
        out.octic.assign(9, 0.0);
    }

    // Roll = pi escapes the half-angle substitution.
    if (std::fabs(fkdetail::assembly_det(-1, 0, rho, p)) >=
        fkdetail::w_guard(rho, p))
        cands.push_back({kPi, RootProvenance::half_angle});

    std::vector<FkSolution> sols;
    for (const Cand& cd : cands) {
        double alpha = ikdetail::polish_root(signed_rel, cd.alpha);
        if (!(rel(alpha) <= good)) alpha = cd.alpha;
        if (!(rel(alpha) <= good)) continue;
        try {
            FkSolution s;
            s.pose = fk_back_substitute(alpha, rho, p);
            s.provenance = cd.prov;
            s.residuals = constraint_residuals(s.pose, rho, p);
            sols.push_back(s);
        } catch (const SingularDenominator&) {
        }
    }

    // Symmetric branches where the determinant vanishes (rho2 == rho3).
    for (double c : {1.0, -1.0}) {
        if (std::fabs(fkdetail::assembly_det(c, 0, rho, p)) <
                fkdetail::w_guard(rho, p) ||
            octic_zero) {
            for (const PlatformPose& pose :
                 fkdetail::symmetric_branch(c, rho, p, good)) {
                FkSolution s;
                s.pose = pose;
                s.provenance = RootProvenance::symmetric;
                s.residuals = constraint_residuals(pose, rho, p);
                sols.push_back(s);
                out.symmetric_branch_used = true;
            }
        }
    }

    // Deduplicate identical poses (wraparound-aware in roll; symmetric
    // branches legitimately share one roll angle across two positions).
    std::sort(sols.begin(), sols.end(),
              [](const FkSolution& a, const FkSolution& b) {
                  if (a.pose.alpha != b.pose.alpha)
                      return a.pose.alpha < b.pose.alpha;
                  if (a.pose.z != b.pose.z) return a.pose.z < b.pose.z;
                  if (a.pose.y != b.pose.y) return a.pose.y < b.pose.y;
                  return a.pose.x < b.pose.x;
              });
    for (const FkSolution& s : sols) {
        bool dup = false;
        for (const FkSolution& kept : out.solutions)
            dup = dup ||
                  (std::fabs(normalize_angle(s.pose.alpha -
                                             kept.pose.alpha)) < 1e-9 &&
                   std::fabs(s.pose.x - kept.pose.x) < 1e-6 &&
                   std::fabs(s.pose.y - kept.pose.y) < 1e-6 &&
                   std::fabs(s.pose.z - kept.pose.z) < 1e-6);
        if (!dup) out.solutions.push_back(s);
    }

    if (out.solutions.empty()) throw NoAssembly();
    return out;
}

// Slider placement relative to each leg's quadratic center, and whether the
// pose lies in the machine's working mode (sliders strictly above, strokes
// respected, leg I rods uncrossed).
inline AssemblyMode classify_assembly_mode(const PlatformPose& pose,
                                           const JointCoords& rho,
                                           const MachineParams& p) {
    const double c = std::cos(pose.alpha), s = std::sin(pose.alpha);
    const double u1 = p.R1 * s, u2 = p.R2 * s;
    AssemblyMode m;
    m.branch = {rho[0] <= pose.z + u1 ? Branch::above : Branch::below,
                rho[1] <= pose.z - u2 ? Branch::above : Branch::below,
                rho[2] <= pose.z + u2 ? Branch::above : Branch::below};
    const auto above = sliders_above_platform(pose.z, u1, u2, rho);
    const auto stroke = stroke_ok(rho, p);
    m.machine_reachable = above[0] && above[1] && above[2] && stroke[0] &&
                          stroke[1] && stroke[2] && rods_uncrossed(c, p);
    return m;
}

struct FkMachineSolution {
    FkSolution base;
    ToolPose tool;
};

// Machine-level forward kinematics: every assembly pose mapped through the
// tilting-table chain to a tool pose in the table frame.
inline std::vector<FkMachineSolution> fk_machine(const JointCoords& rho,
                                                 const TableOrientation& o,
                                                 const MachineParams& p,
                                                 double tol = kResidualTol) {
    const FkResult base = fk_parallel(rho, p, tol);
    std::vector<FkMachineSolution> out;
    for (const FkSolution& s : base.solutions)
        out.push_back({s, tool_pose_from_platform(s.pose, o, p)});
    return out;
}

}  // namespace verne
