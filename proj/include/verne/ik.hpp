#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "coupling.hpp"
#include "legs.hpp"
#include "params.hpp"
#include "polyroots.hpp"
#include "transforms.hpp"

namespace verne {

struct Unreachable : Error {
    explicit Unreachable(const std::string& what)
        : Error("Unreachable", what) {}
};
struct NoFeasibleSolution : Error {
    NoFeasibleSolution() : Error("NoFeasibleSolution", "no candidate survives "
                                                       "the feasibility filter") {}
};
struct MultipleFeasible : Error {
    explicit MultipleFeasible(std::size_t n)
        : Error("MultipleFeasible",
                std::to_string(n) + " candidates survive the filter") {}
};
struct DegenerateTarget : Error {
    DegenerateTarget() : Error("DegenerateTarget",
                               "orientation relation vanishes identically") {}
};

// Default dimensionless tolerance on constraint residuals.
inline constexpr double kResidualTol = 1e-9;
// Absolute agreement (mm) required between the two leg I slider values.
inline constexpr double kRho1MatchTol = 1e-7;

enum class Branch : int { above = 0, below = 1 };

// One inverse-kinematic candidate prior to feasibility filtering. For
// machine-level queries theta1/theta2 carry the table angles; for
// platform-level queries they are NaN.
struct IkCandidate {
    PlatformPose pose;
    double theta1 = std::numeric_limits<double>::quiet_NaN();
    double theta2 = std::numeric_limits<double>::quiet_NaN();
    JointCoords rho{0, 0, 0};
    std::array<Branch, 3> branch{Branch::above, Branch::above, Branch::above};
    std::array<double, 4> residuals{0, 0, 0, 0};
};

struct FeasibilityReport {
    std::array<bool, 3> slider_above{false, false, false};
    bool rod_crossing_ok = false;
    std::array<bool, 3> stroke{false, false, false};
    std::array<bool, 3> nonsingular{false, false, false};
    bool orientation_in_range = true;

    bool feasible() const {
        for (bool b : slider_above)
            if (!b) return false;
        if (!rod_crossing_ok) return false;
        for (bool b : stroke)
            if (!b) return false;
        for (bool b : nonsingular)
            if (!b) return false;
        return orientation_in_range;
    }
};

struct FilterResult {
    std::vector<std::size_t> survivors;       // indices into the input set
    std::vector<FeasibilityReport> reports;   // parallel to the input set
};

namespace ikdetail {

// Newton polish of an orientation root against the scalar relation f.
inline double polish_root(const std::function<double(double)>& f,
                          double a0) {
    double a = a0, best = a0;
    double fb = std::fabs(f(a0));
    for (int it = 0; it < 12; ++it) {
        const double h = 1e-7 * (1 + std::fabs(a));
        const double f0 = f(a);
        const double d = (f(a + h) - f(a - h)) / (2 * h);
        if (d == 0) break;
        const double na = a - f0 / d;
        if (!std::isfinite(na)) break;
        const double fn = std::fabs(f(na));
        if (fn < fb) {
            fb = fn;
            best = na;
        }
        if (std::fabs(na - a) < 1e-15 * (1 + std::fabs(na))) break;
        a = na;
    }
    return best;
}

// Collects candidates for one orientation root. (c, s) parameterize the roll
// angle; thetas are forwarded verbatim for machine-level queries.
inline void enumerate_rhos(const PlatformPose& pose, double c, double s,
                           double theta1, double theta2,
                           const MachineParams& p, double tol,
                           std::vector<IkCandidate>& out) {
    const LegFrame f = leg_frame(pose.x, c, s, p);
    const SliderRoots q3 = leg1_rod1_roots(f, pose.y, pose.z, p);
    const SliderRoots q4 = leg1_rod2_roots(f, pose.y, pose.z, p);
    const SliderRoots q2 = leg2_roots(f, pose.y, pose.z, p);
    const SliderRoots q5 = leg3_roots(f, pose.y, pose.z, p);

    const double band1 = -1e-10 * sq(p.L1);
    const double band2 = -1e-10 * sq(p.L2);
    const double band3 = -1e-10 * sq(p.L3);
    if (q3.disc < band1 || q4.disc < band1) return;
    if (q2.disc < band2 || q5.disc < band3) return;

    auto root = [](const SliderRoots& q, Branch b) {
        const double r = std::sqrt(std::max(0.0, q.disc));
        return b == Branch::above ? q.center - r : q.center + r;
    };

    // The two leg I equations must deliver the same slider value; each
    // consistent pairing yields one rho1.
    struct Rho1 {
        double value;
        Branch tag;
    };
    std::vector<Rho1> rho1s;
    for (Branch b3 : {Branch::above, Branch::below}) {
        for (Branch b4 : {Branch::above, Branch::below}) {
            const double va = root(q3, b3), vb = root(q4, b4);
            if (std::fabs(va - vb) <= kRho1MatchTol) {
                const double v = 0.5 * (va + vb);
                bool dup = false;
                for (const Rho1& r : rho1s)
                    dup = dup || std::fabs(r.value - v) <= kRho1MatchTol;
                if (!dup) rho1s.push_back({v, b3});
            }
        }
    }

    for (const Rho1& r1 : rho1s) {
        for (Branch b2 : {Branch::above, Branch::below}) {
            for (Branch b5 : {Branch::above, Branch::below}) {
                IkCandidate cand;
                cand.pose = pose;
                cand.theta1 = theta1;
                cand.theta2 = theta2;
                cand.rho = {r1.value, root(q2, b2), root(q5, b5)};
                cand.branch = {r1.tag, b2, b5};
                cand.residuals = {
                    leg1_rod1_residual(f, pose.y, pose.z, cand.rho[0], p) /
                        sq(p.L1),
                    leg1_rod2_residual(f, pose.y, pose.z, cand.rho[0], p) /
                        sq(p.L1),
                    leg2_residual(f, pose.y, pose.z, cand.rho[1], p) /
                        sq(p.L2),
                    leg3_residual(f, pose.y, pose.z, cand.rho[2], p) /
                        sq(p.L3)};
                bool ok = true;
                for (double rv : cand.residuals)
                    ok = ok && std::fabs(rv) <= tol;
                if (ok) out.push_back(cand);
            }
        }
    }
}

inline void sort_candidates(std::vector<IkCandidate>& cands) {
    std::sort(cands.begin(), cands.end(),
              [](const IkCandidate& a, const IkCandidate& b) {
                  if (a.pose.alpha != b.pose.alpha)
                      return a.pose.alpha < b.pose.alpha;
                  for (int i = 0; i < 3; ++i)
                      if (a.branch[i] != b.branch[i])
                          return int(a.branch[i]) < int(b.branch[i]);
                  return false;
              });
}

}  // namespace ikdetail

// Coefficients (ascending, length 7) of the roll-angle polynomial in
// t = tan(alpha/2) whose real roots are the rolls consistent with a platform
// position (x, y). Built by exact interpolation of the coupling relation
// cleared of its half-angle denominator.
inline Poly orientation_polynomial(double x, double y,
                                   const MachineParams& p) {
    auto F = [&](double t) {
        const double w = 1 + t * t;
        const double c = (1 - t * t) / w, s = 2 * t / w;
        return coupling_residual_cs(x, y, c, s, p) * w * w * w;
    };
    double scale = 0;
    for (double t : chebyshev_nodes(7, -2.0, 2.0))
        scale = std::max(scale, std::fabs(F(t)));
    if (scale < 1e-14 * sq(p.R1) * sq(p.L1)) throw DegenerateTarget();
    return audited_interpolation(F, 6, -2.0, 2.0);
}

// Machine-level analog in t = tan(theta1/2) for a tool pose expressed in the
// table frame. The platform pose is recovered through the frame chain with
// theta2 = -phi2, and the same coupling relation is imposed on it.
inline Poly orientation_polynomial_machine(const ToolPose& u,
                                           const MachineParams& p) {
    const double theta2 = -u.phi2;
    const Transform t_pl = table_from_platform(u, p);
    const double cf = std::cos(u.phi1), sf = std::sin(u.phi1);
    auto F = [&](double t) {
        const double w = 1 + t * t;
        const double c1 = (1 - t * t) / w, s1 = 2 * t / w;
        const Transform T = base_from_table_cs(c1, s1, theta2, p) * t_pl;
        const double ca = c1 * cf - s1 * sf;
        const double sa = s1 * cf + c1 * sf;
        return coupling_residual_cs(T.t.x, T.t.y, ca, sa, p) * w * w * w;
    };
    double scale = 0;
    for (double t : chebyshev_nodes(7, -2.0, 2.0))
        scale = std::max(scale, std::fabs(F(t)));
    if (scale < 1e-14 * sq(p.R1) * sq(p.L1)) throw DegenerateTarget();
    return audited_interpolation(F, 6, -2.0, 2.0);
}

// All inverse-kinematic candidates for a platform position: every real roll
// root of the orientation polynomial (plus the half-angle escape at roll pi)
// crossed with every per-leg slider branch that satisfies the constraint
// equations to `tol`. Throws Unreachable when the set is empty.
inline std::vector<IkCandidate> ik_parallel(double x, double y, double z,
                                            const MachineParams& p,
                                            double tol = kResidualTol) {
    const Poly poly = orientation_polynomial(x, y, p);
    const double scale = sq(p.R1) * sq(p.L1);
    auto rel = [&](double alpha) {
        return coupling_residual(x, y, alpha, p) / scale;
    };

    std::vector<double> alphas;
    RealRootResult rr;
    bool any_root = false;
    try {
        rr = real_roots(poly);
        any_root = !rr.roots.empty();
    } catch (const ZeroPolynomial&) {
        throw DegenerateTarget();
    }
    for (const RootEstimate& re : rr.roots) {
        const double a =
            ikdetail::polish_root(rel, normalize_angle(2 * std::atan(re.x)));
        if (std::fabs(rel(a)) <= std::max(tol, 1e-9)) alphas.push_back(a);
    }
    // Roll pi escapes the half-angle parameterization; test it directly.
    if (std::fabs(rel(kPi)) <= std::max(tol, 1e-9)) {
        alphas.push_back(kPi);
        any_root = true;
    }
    std::sort(alphas.begin(), alphas.end());
    alphas.erase(std::unique(alphas.begin(), alphas.end(),
                             [](double a, double b) {
                                 return std::fabs(a - b) < 1e-9;
                             }),
                 alphas.end());

    std::vector<IkCandidate> out;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (double a : alphas) {
        PlatformPose pose{x, y, z, a};
        ikdetail::enumerate_rhos(pose, std::cos(a), std::sin(a), nan, nan, p,
                                 tol, out);
    }
    if (out.empty())
        throw Unreachable(any_root ? "no slider branch reaches the position"
                                   : "no real roll root for the position");
    ikdetail::sort_candidates(out);
    return out;
}

// Machine-level inverse kinematics: tool pose in the table frame to table
// tilt roots and slider sets. theta2 = -phi2 identically; each real tilt
// root is polished, mapped through the frame chain to a platform pose, and
// expanded into slider candidates.
inline std::vector<IkCandidate> ik_machine(const ToolPose& u,
                                           const MachineParams& p,
                                           double tol = kResidualTol) {
    const double theta2 = -u.phi2;
    const Transform t_pl = table_from_platform(u, p);
    const double scale = sq(p.R1) * sq(p.L1);
    auto pose_at = [&](double theta1) {
        const Transform T =
            base_from_table({theta1, theta2}, p) * t_pl;
        return PlatformPose{T.t.x, T.t.y, T.t.z,
                            normalize_angle(theta1 + u.phi1)};
    };
    auto rel = [&](double theta1) {
        const PlatformPose pose = pose_at(theta1);
        return coupling_residual(pose.x, pose.y, pose.alpha, p) / scale;
    };

    const Poly poly = orientation_polynomial_machine(u, p);
    std::vector<double> thetas;
    bool any_root = false;
    try {
        const RealRootResult rr = real_roots(poly);
        any_root = !rr.roots.empty();
        for (const RootEstimate& re : rr.roots) {
            const double th = ikdetail::polish_root(
                rel, normalize_angle(2 * std::atan(re.x)));
            if (std::fabs(rel(th)) <= std::max(tol, 1e-9))
                thetas.push_back(th);
        }
    } catch (const ZeroPolynomial&) {
        throw DegenerateTarget();
    }
    if (std::fabs(rel(kPi)) <= std::max(tol, 1e-9)) {
        thetas.push_back(kPi);
        any_root = true;
    }
    std::sort(thetas.begin(), thetas.end());
    thetas.erase(std::unique(thetas.begin(), thetas.end(),
                             [](double a, double b) {
                                 return std::fabs(a - b) < 1e-9;
                             }),
                 thetas.end());

    std::vector<IkCandidate> out;
    for (double th : thetas) {
        const PlatformPose pose = pose_at(th);
        ikdetail::enumerate_rhos(pose, std::cos(pose.alpha),
                                 std::sin(pose.alpha), th, theta2, p, tol,
                                 out);
    }
    if (out.empty())
        throw Unreachable(any_root ? "no slider branch reaches the tool pose"
                                   : "no real tilt root for the tool pose");
    ikdetail::sort_candidates(out);
    return out;
}

// Applies the feasibility rules to every candidate: sliders above the
// platform sockets, leg I rods uncrossed, strokes respected, rods away from
// horizontal, and (for machine-level candidates) the table tilt in range.
inline FilterResult filter_feasible(const std::vector<IkCandidate>& cands,
                                    const MachineParams& p,
                                    double margin = kSingularityMargin) {
    FilterResult res;
    res.reports.reserve(cands.size());
    for (std::size_t i = 0; i < cands.size(); ++i) {
        const IkCandidate& c = cands[i];
        const double ca = std::cos(c.pose.alpha), sa = std::sin(c.pose.alpha);
        const double u1 = p.R1 * sa, u2 = p.R2 * sa;
        FeasibilityReport rep;
        rep.slider_above = sliders_above_platform(c.pose.z, u1, u2, c.rho);
        rep.rod_crossing_ok = rods_uncrossed(ca, p);
        rep.stroke = stroke_ok(c.rho, p);
        rep.nonsingular = legs_nonsingular(c.pose.z, u1, u2, c.rho, p, margin);
        rep.orientation_in_range =
            std::isnan(c.theta1) ||
            (c.theta1 >= p.theta1_min && c.theta1 <= p.theta1_max);
        if (rep.feasible()) res.survivors.push_back(i);
        res.reports.push_back(rep);
    }
    return res;
}

// The single working-mode candidate, or NoFeasibleSolution / MultipleFeasible.
inline IkCandidate unique_feasible(const std::vector<IkCandidate>& cands,
                                   const MachineParams& p,
                                   double margin = kSingularityMargin) {
    const FilterResult res = filter_feasible(cands, p, margin);
    if (res.survivors.empty()) throw NoFeasibleSolution();
    if (res.survivors.size() > 1) throw MultipleFeasible(res.survivors.size());
    return cands[res.survivors[0]];
}

}  // namespace verne
