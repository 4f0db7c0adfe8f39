#pragma once

#include <array>
#include <cmath>
#include <optional>

#include "params.hpp"
#include "transforms.hpp"

namespace verne {

// Rod angle below which a leg counts as serially singular (rod direction
// nearly horizontal, i.e. slider motion decouples from platform motion).
inline constexpr double kSingularityMargin = 0.02;  // rad

inline double sq(double v) { return v * v; }

// Intermediate quantities shared by the four leg constraint equations at a
// fixed roll angle. All formulas keep (c, s) = (cos alpha, sin alpha)
// explicit so that mirrored evaluations (y -> -y, s -> -s) produce exactly
// negated intermediates.
struct LegFrame {
    double x1 = 0;  // x + D1 - d1
    double x2 = 0;  // x + D2 - d2
    double w1 = 0;  // R1 c - r1
    double w2 = 0;  // R2 c - r4
    double u1 = 0;  // R1 s
    double u2 = 0;  // R2 s
};

inline LegFrame leg_frame(double x, double c, double s,
                          const MachineParams& p) {
    LegFrame f;
    f.x1 = x + (p.D1 - p.d1);
    f.x2 = x + (p.D2 - p.d2);
    f.w1 = p.R1 * c - p.r1;
    f.w2 = p.R2 * c - p.r4;
    f.u1 = p.R1 * s;
    f.u2 = p.R2 * s;
    return f;
}

// Closed-form squared-length residuals of the four printed constraint
// equations (leg I gives two, legs II/III one each). Zero iff the rod length
// matches.
inline double leg1_rod1_residual(const LegFrame& f, double y, double z,
                                 double rho1, const MachineParams& p) {
    return sq(f.x1) + sq(y + f.w1) + sq(z + f.u1 - rho1) - sq(p.L1);
}
inline double leg1_rod2_residual(const LegFrame& f, double y, double z,
                                 double rho1, const MachineParams& p) {
    return sq(f.x1) + sq(y - f.w1) + sq(z - f.u1 - rho1) - sq(p.L1);
}
inline double leg2_residual(const LegFrame& f, double y, double z, double rho2,
                            const MachineParams& p) {
    return sq(f.x2) + sq(y - f.w2) + sq(z - f.u2 - rho2) - sq(p.L2);
}
inline double leg3_residual(const LegFrame& f, double y, double z, double rho3,
                            const MachineParams& p) {
    return sq(f.x2) + sq(y + f.w2) + sq(z + f.u2 - rho3) - sq(p.L3);
}

// Residuals of all four equations, normalized by the squared rod lengths.
inline std::array<double, 4> constraint_residuals(const PlatformPose& pose,
                                                  const JointCoords& rho,
                                                  const MachineParams& p) {
    const double c = std::cos(pose.alpha), s = std::sin(pose.alpha);
    const LegFrame f = leg_frame(pose.x, c, s, p);
    return {leg1_rod1_residual(f, pose.y, pose.z, rho[0], p) / sq(p.L1),
            leg1_rod2_residual(f, pose.y, pose.z, rho[0], p) / sq(p.L1),
            leg2_residual(f, pose.y, pose.z, rho[1], p) / sq(p.L2),
            leg3_residual(f, pose.y, pose.z, rho[2], p) / sq(p.L3)};
}

// Same residuals evaluated through the transform-composed attachment points,
// one per rod: |B_ij - A_ij|^2 - L_i^2, normalized by L_i^2. Used to audit
// the closed forms against the frame model.
inline std::array<double, 6> attachment_residuals(const PlatformPose& pose,
                                                  const JointCoords& rho,
                                                  const MachineParams& p) {
    const auto R = rods(pose, rho, p);
    std::array<double, 6> out;
    for (int i = 0; i < 6; ++i) {
        const Vec3 d = R[i].b - R[i].a;
        const double L = rod_length(p, R[i].leg);
        out[i] = (dot(d, d) - L * L) / (L * L);
    }
    return out;
}

// Both slider coordinates solving one leg equation at a fixed (x, y, z, c, s)
// target: rho = center +- sqrt(disc). Negative discriminants mean the leg
// cannot reach the pose at this roll.
struct SliderRoots {
    double center = 0;
    double disc = 0;
    bool real() const { return disc >= 0; }
    double above() const { return center - std::sqrt(disc); }
    double below() const { return center + std::sqrt(disc); }
};

inline SliderRoots leg1_rod1_roots(const LegFrame& f, double y, double z,
                                   const MachineParams& p) {
    return {z + f.u1, sq(p.L1) - sq(f.x1) - sq(y + f.w1)};
}
inline SliderRoots leg1_rod2_roots(const LegFrame& f, double y, double z,
                                   const MachineParams& p) {
    return {z - f.u1, sq(p.L1) - sq(f.x1) - sq(y - f.w1)};
}
inline SliderRoots leg2_roots(const LegFrame& f, double y, double z,
                              const MachineParams& p) {
    return {z - f.u2, sq(p.L2) - sq(f.x2) - sq(y - f.w2)};
}
inline SliderRoots leg3_roots(const LegFrame& f, double y, double z,
                              const MachineParams& p) {
    return {z + f.u2, sq(p.L3) - sq(f.x2) - sq(y + f.w2)};
}

// Slider-above-platform predicate, per leg. With z downward-positive,
// "above" means the slider socket z is strictly smaller than both platform
// socket z values of the leg.
inline std::array<bool, 3> sliders_above_platform(double z, double u1,
                                                  double u2,
                                                  const JointCoords& rho) {
    const bool leg1 = (z + u1 - rho[0] > 0) && (z - u1 - rho[0] > 0);
    const bool leg2 = (z - u2 - rho[1] > 0);
    const bool leg3 = (z + u2 - rho[2] > 0);
    return {leg1, leg2, leg3};
}

inline std::array<bool, 3> sliders_above_platform(const PlatformPose& pose,
                                                  const JointCoords& rho,
                                                  const MachineParams& p) {
    return sliders_above_platform(pose.z, p.R1 * std::sin(pose.alpha),
                                  p.R2 * std::sin(pose.alpha), rho);
}

// Leg I rods stay uncrossed only while R1 cos(roll) > r1.
inline bool rods_uncrossed(double c, const MachineParams& p) {
    return p.R1 * c - p.r1 > 0;
}

// True when every rod of every leg is safely away from horizontal.
inline std::array<bool, 3> legs_nonsingular(double z, double u1, double u2,
                                            const JointCoords& rho,
                                            const MachineParams& p,
                                            double margin) {
    const double m1 = p.L1 * std::sin(margin);
    const double m23 = std::sin(margin);
    const bool leg1 = std::fabs(z + u1 - rho[0]) >= m1 &&
                      std::fabs(z - u1 - rho[0]) >= m1;
    const bool leg2 = std::fabs(z - u2 - rho[1]) >= p.L2 * m23;
    const bool leg3 = std::fabs(z + u2 - rho[2]) >= p.L3 * m23;
    return {leg1, leg2, leg3};
}

inline std::array<bool, 3> stroke_ok(const JointCoords& rho,
                                     const MachineParams& p) {
    std::array<bool, 3> ok;
    for (int i = 0; i < 3; ++i)
        ok[i] = rho[i] >= p.rho_min[i] && rho[i] <= p.rho_max[i];
    return ok;
}

}  // namespace verne
