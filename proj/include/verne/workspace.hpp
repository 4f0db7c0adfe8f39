#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "coupling.hpp"
#include "ik.hpp"
#include "legs.hpp"
#include "params.hpp"
#include "transforms.hpp"

namespace verne {

// Why a sampled configuration was rejected. Cells never reached by any roll
// locus keep `coupling_empty`; one accepted candidate makes the cell `ok`.
enum class ConstraintCode : int {
    ok = 0,
    interference = 1,
    leg_length = 2,
    serial_singularity = 3,
    passive_joint = 4,
    stroke = 5,
    coupling_empty = 6,
};
inline constexpr int kConstraintCodeCount = 7;

inline const char* to_string(ConstraintCode c) {
    switch (c) {
        case ConstraintCode::ok: return "ok";
        case ConstraintCode::interference: return "interference";
        case ConstraintCode::leg_length: return "leg_length";
        case ConstraintCode::serial_singularity: return "serial_singularity";
        case ConstraintCode::passive_joint: return "passive_joint";
        case ConstraintCode::stroke: return "stroke";
        case ConstraintCode::coupling_empty: return "coupling_empty";
    }
    return "?";
}

// Tunable thresholds for the feasibility checks, defaulted from the machine
// description.
struct ConstraintLimits {
    double rod_clearance = 0;            // mm, minimum rod/rod distance
    double singularity_margin = kSingularityMargin;  // rad from horizontal
    double passive_cone_half_angle = 0;  // rad about the socket axes
    double residual_tol = kResidualTol;  // normalized rod-length residual
    JointCoords rho_min{0, 0, 0};
    JointCoords rho_max{0, 0, 0};
};

inline ConstraintLimits make_limits(const MachineParams& p) {
    ConstraintLimits lim;
    lim.rod_clearance = p.rod_clearance;
    lim.passive_cone_half_angle = p.passive_cone_half_angle;
    lim.rho_min = p.rho_min;
    lim.rho_max = p.rho_max;
    return lim;
}

// Minimum distance between segments [p1, q1] and [p2, q2].
inline double segment_distance(const Vec3& p1, const Vec3& q1, const Vec3& p2,
                               const Vec3& q2) {
    const Vec3 d1 = q1 - p1, d2 = q2 - p2, r = p1 - p2;
    const double a = dot(d1, d1), e = dot(d2, d2), f = dot(d2, r);
    double s = 0, t = 0;
    if (a <= 1e-30 && e <= 1e-30) {
        // both degenerate to points
    } else if (a <= 1e-30) {
        t = std::clamp(f / e, 0.0, 1.0);
    } else {
        const double c = dot(d1, r);
        if (e <= 1e-30) {
            s = std::clamp(-c / a, 0.0, 1.0);
        } else {
            const double b = dot(d1, d2), den = a * e - b * b;
            if (den > 1e-30) s = std::clamp((b * f - c * e) / den, 0.0, 1.0);
            t = (b * s + f) / e;
            if (t < 0) {
                t = 0;
                s = std::clamp(-c / a, 0.0, 1.0);
            } else if (t > 1) {
                t = 1;
                s = std::clamp((b - c) / a, 0.0, 1.0);
            }
        }
    }
    const Vec3 c1 = p1 + d1 * s, c2 = p2 + d2 * t;
    return norm(c1 - c2);
}

// First violated constraint for a configuration, in fixed priority order:
// rod interference, rod length consistency, rods too close to horizontal,
// passive socket cone limits (slider side about +z, platform side about the
// inward platform normal), then slider strokes.
inline ConstraintCode check_constraints(const PlatformPose& pose,
                                        const JointCoords& rho,
                                        const MachineParams& p,
                                        const ConstraintLimits& lim) {
    const auto R = rods(pose, rho, p);

    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j)
            if (segment_distance(R[i].a, R[i].b, R[j].a, R[j].b) <
                lim.rod_clearance)
                return ConstraintCode::interference;

    for (const Rod& r : R) {
        const Vec3 d = r.b - r.a;
        const double L = rod_length(p, r.leg);
        if (std::fabs(dot(d, d) - L * L) / (L * L) > lim.residual_tol)
            return ConstraintCode::leg_length;
    }

    const double sin_margin = std::sin(lim.singularity_margin);
    for (const Rod& r : R) {
        const double L = rod_length(p, r.leg);
        if (std::fabs(r.b.z - r.a.z) < L * sin_margin)
            return ConstraintCode::serial_singularity;
    }

    const double cos_cone = std::cos(lim.passive_cone_half_angle);
    const double ca = std::cos(pose.alpha), sa = std::sin(pose.alpha);
    const Vec3 z_pl{0, -sa, ca};  // platform z axis in the base frame
    for (const Rod& r : R) {
        const Vec3 d = r.b - r.a;
        const double len = norm(d);
        if (d.z < len * cos_cone) return ConstraintCode::passive_joint;
        if (dot(d, z_pl) < len * cos_cone) return ConstraintCode::passive_joint;
    }

    for (int i = 0; i < 3; ++i)
        if (rho[i] < lim.rho_min[i] || rho[i] > lim.rho_max[i])
            return ConstraintCode::stroke;

    return ConstraintCode::ok;
}

struct SlicePoint {
    double x = 0, y = 0;
    ConstraintCode code = ConstraintCode::leg_length;
    JointCoords rho{std::numeric_limits<double>::quiet_NaN(),
                    std::numeric_limits<double>::quiet_NaN(),
                    std::numeric_limits<double>::quiet_NaN()};
};

// Samples the iso-orientation ellipse at `samples` parameter values and
// classifies each position. Working-mode branches (every slider strictly
// above both of its sockets) are preferred; when none exists the remaining
// branches are classified instead. Within the preferred set the point takes
// the minimum constraint code over branches (a permutation-invariant rule),
// so `ok` wins whenever some branch is accepted. Below-socket branches can
// never be `ok`: the slider-side cone about +z is narrower than a half-space
// and rejects them. (c, s) are cos/sin of the roll; passing an exactly
// negated s yields the bit-exact mirrored result with legs II/III exchanged.
// Throws EmptyLocus when the roll admits no positions.
inline std::vector<SlicePoint> constant_orientation_slice_cs(
    double c, double s, double alpha, double z, const MachineParams& p,
    const ConstraintLimits& lim, int samples = 720,
    double tol = kResidualTol) {
    const IsoOrientationEllipse e = iso_orientation_ellipse_cs(c, s, alpha, p);
    if (samples < 4) samples = 4;
    if (samples % 2) ++samples;

    std::vector<SlicePoint> out;
    std::vector<IkCandidate> cands;
    auto rho_less = [](const JointCoords& a, const JointCoords& b) {
        for (int i = 0; i < 3; ++i)
            if (a[i] != b[i]) return a[i] < b[i];
        return false;
    };
    auto eval = [&](double x, double y) {
        SlicePoint pt;
        pt.x = x;
        pt.y = y;
        const PlatformPose pose{x, y, z, alpha};
        cands.clear();
        const double nan = std::numeric_limits<double>::quiet_NaN();
        ikdetail::enumerate_rhos(pose, c, s, nan, nan, p, tol, cands);
        const double u1 = p.R1 * s, u2 = p.R2 * s;
        int best = -1;  // no branch: the position is outside some leg's reach
        bool best_mode = false;
        JointCoords best_rho{nan, nan, nan};
        for (const IkCandidate& cand : cands) {
            const auto ab = sliders_above_platform(z, u1, u2, cand.rho);
            const bool mode = ab[0] && ab[1] && ab[2];
            if (best_mode && !mode) continue;
            const int code =
                int(check_constraints(pose, cand.rho, p, lim));
            if (best < 0 || (mode && !best_mode) || code < best ||
                (code == best && code == int(ConstraintCode::ok) &&
                 rho_less(cand.rho, best_rho))) {
                best = code;
                best_mode = mode;
                best_rho = cand.rho;
            }
        }
        pt.code = best < 0 ? ConstraintCode::leg_length : ConstraintCode(best);
        if (pt.code == ConstraintCode::ok) pt.rho = best_rho;
        out.push_back(pt);
    };

    // Emit +y / -y pairs from one trigonometric evaluation so the two sides
    // are exact negations of each other.
    const int half = samples / 2;
    for (int k = 0; k <= half; ++k) {
        const double t = 2 * kPi * k / samples;
        const double x = e.center_x + e.a * std::cos(t);
        // sin is exactly zero at both parameter endpoints
        const double y = (k == 0 || k == half) ? 0.0 : e.b * std::sin(t);
        eval(x, y);
        if (y != 0) eval(x, -y);
    }
    return out;
}

inline std::vector<SlicePoint> constant_orientation_slice(
    double alpha, double z, const MachineParams& p,
    const ConstraintLimits& lim, int samples = 720,
    double tol = kResidualTol) {
    return constant_orientation_slice_cs(std::cos(alpha), std::sin(alpha),
                                         alpha, z, p, lim, samples, tol);
}

// Optional sweep range overrides; NaN fields fall back to the analytic
// bounds derived from the machine description.
struct SweepWindows {
    double alpha_lo = std::numeric_limits<double>::quiet_NaN();
    double alpha_hi = std::numeric_limits<double>::quiet_NaN();
    double z_lo = std::numeric_limits<double>::quiet_NaN();
    double z_hi = std::numeric_limits<double>::quiet_NaN();
};

struct WorkspaceOptions {
    int alpha_steps = 181;     // forced odd so the roll grid contains 0
    int z_steps = 101;         // number of z layers
    int ellipse_samples = 720; // positions probed per (roll, z) slice
    int xy_cells = 128;        // grid cells per horizontal axis
    double tol = kResidualTol;
    SweepWindows window;
};

struct CellRep {
    PlatformPose pose;
    JointCoords rho{0, 0, 0};
};

// Discretized positional workspace: an (x, y, z) cell grid where each cell
// records the first accepted configuration or the first rejection reason.
// Per-code cell counts always sum to the total number of cells.
struct Workspace {
    double x0 = 0, y0 = 0, dx = 0, dy = 0;
    int nx = 0, ny = 0;
    std::vector<double> z_layers;            // layer centers, ascending
    double dz = 0;
    std::vector<ConstraintCode> cell_code;   // nx * ny * z_layers.size()
    std::vector<std::int32_t> cell_rep;      // index into reps, or -1
    std::vector<CellRep> reps;
    std::array<long long, kConstraintCodeCount> code_counts{};

    std::size_t index(int ix, int iy, int iz) const {
        return (std::size_t(iz) * ny + iy) * nx + ix;
    }
    long long total_cells() const {
        return (long long)(nx)*ny * (long long)z_layers.size();
    }
    double cell_volume() const { return dx * dy * dz; }
    double volume_estimate() const {
        return double(code_counts[0]) * cell_volume();
    }
};

// Sweeps roll angles and z layers, sampling each iso-orientation ellipse and
// scoring grid cells. Bounds are analytic (locus hull in x/y, stroke plus
// leg reach in z) unless overridden through options.window.
inline Workspace full_workspace(const MachineParams& p,
                                const ConstraintLimits& lim,
                                const WorkspaceOptions& opt = {}) {
    Workspace w;
    const double roll = max_roll_for_locus(p);
    const double a_max =
        std::sqrt(sq(p.L1) - sq(p.R1 - p.r1));  // largest locus semi-axis

    w.nx = std::max(2, opt.xy_cells);
    w.ny = std::max(2, opt.xy_cells);
    const double pad = 1e-9 * (1 + a_max);
    w.x0 = (p.d1 - p.D1) - a_max - pad;
    w.y0 = -a_max - pad;
    w.dx = 2 * (a_max + pad) / w.nx;
    w.dy = 2 * (a_max + pad) / w.ny;

    const double u_max = std::max(p.R1, p.R2);
    const double L_max = std::max(p.L1, std::max(p.L2, p.L3));
    double z_lo = *std::min_element(p.rho_min.begin(), p.rho_min.end()) -
                  u_max;
    double z_hi = *std::max_element(p.rho_max.begin(), p.rho_max.end()) +
                  u_max + L_max;
    if (std::isfinite(opt.window.z_lo)) z_lo = opt.window.z_lo;
    if (std::isfinite(opt.window.z_hi)) z_hi = opt.window.z_hi;

    const int nz = std::max(1, opt.z_steps);
    w.dz = (z_hi - z_lo) / nz;
    for (int iz = 0; iz < nz; ++iz)
        w.z_layers.push_back(z_lo + (iz + 0.5) * w.dz);

    const std::size_t ncells = std::size_t(w.nx) * w.ny * nz;
    w.cell_code.assign(ncells, ConstraintCode::coupling_empty);
    w.cell_rep.assign(ncells, -1);

    // Roll grid: symmetric k * step form so +-roll pairs are exact
    // negations, unless an explicit window is requested.
    std::vector<double> alphas;
    const bool windowed = std::isfinite(opt.window.alpha_lo) &&
                          std::isfinite(opt.window.alpha_hi);
    int asteps = std::max(1, opt.alpha_steps);
    if (windowed) {
        if (asteps == 1) {
            alphas.push_back(0.5 * (opt.window.alpha_lo +
                                    opt.window.alpha_hi));
        } else {
            for (int j = 0; j < asteps; ++j)
                alphas.push_back(opt.window.alpha_lo +
                                 j * (opt.window.alpha_hi -
                                      opt.window.alpha_lo) /
                                     (asteps - 1));
        }
    } else {
        if (asteps % 2 == 0) ++asteps;
        const int K = (asteps - 1) / 2;
        const double step = K > 0 ? roll / K : 0;
        for (int k = -K; k <= K; ++k) alphas.push_back(k * step);
    }

    for (int iz = 0; iz < nz; ++iz) {
        const double z = w.z_layers[iz];
        for (double alpha : alphas) {
            std::vector<SlicePoint> pts;
            try {
                pts = constant_orientation_slice(alpha, z, p, lim,
                                                 opt.ellipse_samples,
                                                 opt.tol);
            } catch (const EmptyLocus&) {
                continue;
            }
            for (const SlicePoint& pt : pts) {
                const int ix = int(std::floor((pt.x - w.x0) / w.dx));
                const int iy = int(std::floor((pt.y - w.y0) / w.dy));
                if (ix < 0 || ix >= w.nx || iy < 0 || iy >= w.ny) continue;
                const std::size_t idx = w.index(ix, iy, iz);
                if (pt.code == ConstraintCode::ok) {
                    if (w.cell_code[idx] != ConstraintCode::ok) {
                        w.cell_code[idx] = ConstraintCode::ok;
                        w.cell_rep[idx] = std::int32_t(w.reps.size());
                        w.reps.push_back(
                            {PlatformPose{pt.x, pt.y, z, alpha}, pt.rho});
                    }
                } else if (w.cell_code[idx] ==
                           ConstraintCode::coupling_empty) {
                    w.cell_code[idx] = pt.code;
                }
            }
        }
    }

    for (ConstraintCode c : w.cell_code) ++w.code_counts[int(c)];
    return w;
}

// Tool positions (in the tilting-table frame) at a fixed workpiece
// orientation, mapped from the accepted cells: the table tilt absorbs
// theta1 = roll - phi1 and must stay within its range.
inline std::vector<Vec3> manufacturing_workspace(const Workspace& w,
                                                 double phi1, double phi2,
                                                 const MachineParams& p) {
    std::vector<Vec3> pts;
    for (const CellRep& rep : w.reps) {
        const double theta1 = normalize_angle(rep.pose.alpha - phi1);
        if (theta1 < p.theta1_min || theta1 > p.theta1_max) continue;
        const ToolPose u =
            tool_pose_from_platform(rep.pose, {theta1, -phi2}, p);
        pts.push_back({u.X_u, u.Y_u, u.Z_u});
    }
    return pts;
}

}  // namespace verne
