#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "coupling.hpp"
#include "fk.hpp"
#include "params.hpp"
#include "transforms.hpp"

namespace verne {

// Brute-force cross-check solvers. These deliberately avoid the analytic
// elimination shortcuts: orientation roots come from dense scans of the
// defining relation, slider values from per-rod quadratics on raw attachment
// coordinates, and every candidate is accepted only by direct evaluation of
// the six rod-length residuals.

struct OracleInterval {
    double lo = 0, hi = 0;  // rad
};

struct OracleIkCandidate {
    double alpha = 0;
    JointCoords rho{0, 0, 0};
    double max_residual = 0;  // over the six rods, normalized
};

struct OracleIkResult {
    std::vector<double> alphas;                 // orientation roots found
    std::vector<OracleIkCandidate> candidates;  // sorted by (alpha, rho)
};

struct OracleFkResult {
    std::vector<PlatformPose> poses;      // ascending roll angle
    std::vector<OracleInterval> excluded; // denominator guard bands skipped
};

namespace oracledetail {

inline double bisect(const std::function<double(double)>& f, double lo,
                     double hi, double flo) {
    for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
        const double m = 0.5 * (lo + hi);
        const double fm = f(m);
        if (fm == 0) return m;
        if ((fm > 0) == (flo > 0)) {
            lo = m;
            flo = fm;
        } else {
            hi = m;
        }
    }
    return 0.5 * (lo + hi);
}

inline double ternary_min(const std::function<double(double)>& f, double lo,
                          double hi) {
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
        if (f(m1) <= f(m2))
            hi = m2;
        else
            lo = m1;
    }
    return 0.5 * (lo + hi);
}

inline void push_unique_angle(std::vector<double>& v, double a) {
    a = normalize_angle(a);
    for (double b : v)
        if (std::fabs(normalize_angle(a - b)) < 1e-9) return;
    v.push_back(a);
}

}  // namespace oracledetail

// Inverse cross-check: scan the roll-coupling relation on a dense grid for
// sign changes and near-zero dips (plus the symmetric rolls 0 and pi, which
// are tangent zeros whenever y = 0), then enumerate slider values from the
// per-rod quadratics in raw attachment coordinates.
inline OracleIkResult oracle_ik(double x, double y, double z,
                                const MachineParams& p, int n = 4096,
                                double tol = 1e-9) {
    const double accept = std::max(tol, 1e-9);
    auto F = [&](double a) {
        return coupling_residual_normalized(x, y, a, p);
    };

    std::vector<double> grid(n + 1), val(n + 1);
    double scale = 0;
    for (int i = 0; i <= n; ++i) {
        grid[i] = -kPi + 2 * kPi * i / n;
        val[i] = F(grid[i]);
        scale = std::max(scale, std::fabs(val[i]));
    }
    scale = std::max(scale, 1e-300);

    OracleIkResult out;
    for (double a : {0.0, kPi})
        if (std::fabs(F(a)) <= accept)
            oracledetail::push_unique_angle(out.alphas, a);
    for (int i = 0; i < n; ++i) {
        if (val[i] == 0) {
            oracledetail::push_unique_angle(out.alphas, grid[i]);
        } else if (val[i] * val[i + 1] < 0) {
            const double a = oracledetail::bisect(F, grid[i], grid[i + 1],
                                                  val[i]);
            if (std::fabs(F(a)) <= accept)
                oracledetail::push_unique_angle(out.alphas, a);
        } else if (i > 0 && std::fabs(val[i]) < 1e-4 * scale &&
                   std::fabs(val[i]) <= std::fabs(val[i - 1]) &&
                   std::fabs(val[i]) <= std::fabs(val[i + 1])) {
            // tangent zero: refine the dip of |F|
            auto absF = [&](double a) { return std::fabs(F(a)); };
            const double a =
                oracledetail::ternary_min(absF, grid[i - 1], grid[i + 1]);
            if (std::fabs(F(a)) <= accept)
                oracledetail::push_unique_angle(out.alphas, a);
        }
    }
    std::sort(out.alphas.begin(), out.alphas.end());

    for (double a : out.alphas) {
        const PlatformPose pose{x, y, z, a};
        const auto B = platform_attachments(pose, p);
        const auto A0 = slider_attachments({0, 0, 0}, p);
        auto rod_rhos = [&](int i) {
            const int leg = i / 2;
            const double L = rod_length(p, leg);
            const double dx = B[i].x - A0[i].x, dy = B[i].y - A0[i].y;
            const double disc = L * L - dx * dx - dy * dy;
            std::vector<double> r;
            if (disc < -1e-10 * L * L) return r;
            const double rt = std::sqrt(std::max(0.0, disc));
            r.push_back(B[i].z - rt);
            if (rt > 0) r.push_back(B[i].z + rt);
            return r;
        };
        auto max_res = [&](const JointCoords& rho) {
            double m = 0;
            for (int i = 0; i < 6; ++i) {
                const int leg = i / 2;
                const double L = rod_length(p, leg);
                const Vec3 A{A0[i].x, A0[i].y, A0[i].z + rho[leg]};
                const Vec3 d = B[i] - A;
                m = std::max(m, std::fabs(dot(d, d) - L * L) / (L * L));
            }
            return m;
        };

        std::vector<double> r1s;
        for (int i : {0, 1})
            for (double v : rod_rhos(i)) {
                bool dup = false;
                for (double w : r1s) dup = dup || std::fabs(w - v) <= 1e-7;
                if (!dup) r1s.push_back(v);
            }
        for (double rho1 : r1s)
            for (double rho2 : rod_rhos(2))
                for (double rho3 : rod_rhos(4)) {
                    const JointCoords rho{rho1, rho2, rho3};
                    const double m = max_res(rho);
                    if (m > accept) continue;
                    bool dup = false;
                    for (const OracleIkCandidate& c : out.candidates)
                        dup = dup ||
                              (std::fabs(normalize_angle(c.alpha - a)) <
                                   1e-9 &&
                               std::fabs(c.rho[0] - rho1) <= 1e-7 &&
                               std::fabs(c.rho[1] - rho2) <= 1e-7 &&
                               std::fabs(c.rho[2] - rho3) <= 1e-7);
                    if (!dup) out.candidates.push_back({a, rho, m});
                }
    }
    std::sort(out.candidates.begin(), out.candidates.end(),
              [](const OracleIkCandidate& a, const OracleIkCandidate& b) {
                  if (a.alpha != b.alpha) return a.alpha < b.alpha;
                  for (int i = 0; i < 3; ++i)
                      if (a.rho[i] != b.rho[i]) return a.rho[i] < b.rho[i];
                  return false;
              });
    return out;
}

// Forward cross-check: scan the back-substitution residual over the full
// roll circle, bracketing sign changes and refining near-zero dips. Grid
// cells inside the denominator guard bands are excluded and reported; roots
// are accepted only if all six rod residuals vanish to `tol`.
inline OracleFkResult oracle_fk(const JointCoords& rho,
                                const MachineParams& p, int n = 4096,
                                double tol = 1e-9) {
    const double accept = std::max(tol, 1e-9);
    const double guard_w = 10 * fkdetail::w_guard(rho, p);
    const double guard_c = 10 * fkdetail::c1_guard(p);
    const double nan = std::numeric_limits<double>::quiet_NaN();

    auto blocked = [&](double a) {
        const double c = std::cos(a), s = std::sin(a);
        return std::fabs(fkdetail::assembly_det(c, s, rho, p)) < guard_w ||
               std::fabs(p.R1 * c - p.r1) < guard_c;
    };
    // Signed residual of rod 1 against the back-substituted position,
    // evaluated through raw attachment coordinates.
    auto g = [&](double a) -> double {
        if (blocked(a)) return nan;
        const PlatformPose pose = fk_back_substitute(a, rho, p);
        const auto R = rods(pose, rho, p);
        const Vec3 d = R[0].b - R[0].a;
        return (dot(d, d) - sq(p.L1)) / sq(p.L1);
    };
    auto full_res = [&](double a) -> double {
        if (blocked(a)) return nan;
        const PlatformPose pose = fk_back_substitute(a, rho, p);
        const auto res = attachment_residuals(pose, rho, p);
        double m = 0;
        for (double r : res) m = std::max(m, std::fabs(r));
        return m;
    };

    std::vector<double> grid(n + 1), val(n + 1);
    for (int i = 0; i <= n; ++i) {
        grid[i] = -kPi + 2 * kPi * i / n;
        val[i] = g(grid[i]);
    }

    OracleFkResult out;
    // Collect excluded guard bands as maximal runs of blocked grid cells.
    int run = -1;
    for (int i = 0; i <= n; ++i) {
        if (std::isnan(val[i])) {
            if (run < 0) run = i;
        } else if (run >= 0) {
            out.excluded.push_back({grid[std::max(0, run - 1)], grid[i]});
            run = -1;
        }
    }
    if (run >= 0) out.excluded.push_back({grid[std::max(0, run - 1)], kPi});

    std::vector<double> roots;
    double scale = 0;
    for (int i = 0; i <= n; ++i)
        if (!std::isnan(val[i])) scale = std::max(scale, std::fabs(val[i]));
    scale = std::max(scale, 1e-300);

    for (int i = 0; i < n; ++i) {
        if (std::isnan(val[i]) || std::isnan(val[i + 1])) continue;
        if (val[i] == 0) {
            if (full_res(grid[i]) <= accept)
                oracledetail::push_unique_angle(roots, grid[i]);
        } else if (val[i] * val[i + 1] < 0) {
            auto gs = [&](double a) {
                const double v = g(a);
                return std::isnan(v) ? 0.0 : v;
            };
            const double a =
                oracledetail::bisect(gs, grid[i], grid[i + 1], val[i]);
            if (full_res(a) <= accept)
                oracledetail::push_unique_angle(roots, a);
        } else if (i > 0 && !std::isnan(val[i - 1]) &&
                   std::fabs(val[i]) < 1e-4 * scale &&
                   std::fabs(val[i]) <= std::fabs(val[i - 1]) &&
                   std::fabs(val[i]) <= std::fabs(val[i + 1])) {
            auto absg = [&](double a) {
                const double v = g(a);
                return std::isnan(v) ? std::numeric_limits<double>::max()
                                     : std::fabs(v);
            };
            const double a =
                oracledetail::ternary_min(absg, grid[i - 1], grid[i + 1]);
            if (full_res(a) <= accept)
                oracledetail::push_unique_angle(roots, a);
        }
    }
    std::sort(roots.begin(), roots.end());
    for (double a : roots) out.poses.push_back(fk_back_substitute(a, rho, p));
    return out;
}

}  // namespace verne
