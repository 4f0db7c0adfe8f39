#pragma once

#include <array>
#include <cmath>

#include "params.hpp"

namespace verne {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Wraps an angle to (-pi, pi].
inline double normalize_angle(double a) {
    double r = std::remainder(a, 2 * kPi);
    if (r <= -kPi) r = kPi;
    return r;
}

struct Vec3 {
    double x = 0, y = 0, z = 0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
};

inline double dot(const Vec3& a, const Vec3& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
}
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z,
            a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

// Rigid transform: rotation R (row-major) plus translation t.
struct Transform {
    std::array<std::array<double, 3>, 3> R{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
    Vec3 t;

    Vec3 apply(const Vec3& v) const {
        return {R[0][0] * v.x + R[0][1] * v.y + R[0][2] * v.z + t.x,
                R[1][0] * v.x + R[1][1] * v.y + R[1][2] * v.z + t.y,
                R[2][0] * v.x + R[2][1] * v.y + R[2][2] * v.z + t.z};
    }

    Vec3 rotate(const Vec3& v) const {
        return {R[0][0] * v.x + R[0][1] * v.y + R[0][2] * v.z,
                R[1][0] * v.x + R[1][1] * v.y + R[1][2] * v.z,
                R[2][0] * v.x + R[2][1] * v.y + R[2][2] * v.z};
    }
};

inline Transform operator*(const Transform& a, const Transform& b) {
    Transform r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            r.R[i][j] = a.R[i][0] * b.R[0][j] + a.R[i][1] * b.R[1][j] +
                        a.R[i][2] * b.R[2][j];
    r.t = a.apply(b.t);
    return r;
}

inline Transform inverse(const Transform& a) {
    Transform r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.R[i][j] = a.R[j][i];
    Vec3 mt = r.rotate(a.t);
    r.t = {-mt.x, -mt.y, -mt.z};
    return r;
}

inline Transform translation(double x, double y, double z) {
    Transform r;
    r.t = {x, y, z};
    return r;
}

// Rotation about x given (cos, sin) directly; lets callers substitute exact
// rational values of the half-angle parameterization.
inline Transform rot_x_cs(double c, double s) {
    Transform r;
    r.R = {{{1, 0, 0}, {0, c, -s}, {0, s, c}}};
    return r;
}
inline Transform rot_z_cs(double c, double s) {
    Transform r;
    r.R = {{{c, -s, 0}, {s, c, 0}, {0, 0, 1}}};
    return r;
}
inline Transform rot_x(double a) { return rot_x_cs(std::cos(a), std::sin(a)); }
inline Transform rot_z(double a) { return rot_z_cs(std::cos(a), std::sin(a)); }

// Extracts b from a rotation block of the form rot(x, b).
inline double rotation_angle_x(const Transform& T) {
    return std::atan2(T.R[2][1], T.R[1][1]);
}

// Platform pose in the base frame: position of P plus the coupled roll about
// x. The base z axis points downward.
struct PlatformPose {
    double x = 0, y = 0, z = 0;
    double alpha = 0;
};

// Tilting table joint angles: theta1 tilt about x, theta2 spin about the
// table z axis.
struct TableOrientation {
    double theta1 = 0, theta2 = 0;
};

// Tool center point expressed in the table frame plus the two relative
// orientation angles of the tool with respect to the table.
struct ToolPose {
    double X_u = 0, Y_u = 0, Z_u = 0;
    double phi1 = 0, phi2 = 0;
};

// bT_pl: translation by P plus roll about x.
inline Transform base_from_platform(const PlatformPose& pose) {
    Transform r = rot_x(pose.alpha);
    r.t = {pose.x, pose.y, pose.z};
    return r;
}

// Variant taking (cos alpha, sin alpha) explicitly.
inline Transform base_from_platform_cs(double x, double y, double z, double c,
                                       double s) {
    Transform r = rot_x_cs(c, s);
    r.t = {x, y, z};
    return r;
}

// bT_t = trans(z, d_a) rot(x, theta1) trans(z, d_t) rot(x, pi) rot(z, theta2)
inline Transform base_from_table_cs(double c1, double s1, double theta2,
                                    const MachineParams& p) {
    return translation(0, 0, p.d_a) * rot_x_cs(c1, s1) *
           translation(0, 0, p.d_t) * rot_x_cs(-1.0, 0.0) * rot_z(theta2);
}
inline Transform base_from_table(const TableOrientation& o,
                                 const MachineParams& p) {
    return base_from_table_cs(std::cos(o.theta1), std::sin(o.theta1), o.theta2,
                              p);
}

// tT_pl = trans(X_u, Y_u, Z_u) rot(z, phi2) rot(x, pi + phi1) trans(z, -delta)
// Built so the tool tip, at offset delta along platform z, lands exactly at
// (X_u, Y_u, Z_u) in the table frame.
inline Transform table_from_platform(const ToolPose& u,
                                      const MachineParams& p) {
    return translation(u.X_u, u.Y_u, u.Z_u) * rot_z(u.phi2) *
           rot_x(kPi + u.phi1) * translation(0, 0, -p.delta);
}

// Tool center point in the base frame for a given tool length.
inline Vec3 tcp_in_base(const PlatformPose& pose, double delta) {
    const double c = std::cos(pose.alpha), s = std::sin(pose.alpha);
    return {pose.x, pose.y - delta * s, pose.z + delta * c};
}

// Closed-form tool pose in the table frame for a platform pose and table
// angles (theta2 fixes phi2 = -theta2).
inline ToolPose tool_pose_from_platform(const PlatformPose& pose,
                                        const TableOrientation& o,
                                        const MachineParams& p) {
    const double c1 = std::cos(o.theta1), s1 = std::sin(o.theta1);
    const double c2 = std::cos(o.theta2), s2 = std::sin(o.theta2);
    const double am = pose.alpha - o.theta1;
    const double v1 = p.delta * std::sin(am) - c1 * pose.y -
                      s1 * (pose.z - p.d_a);
    const double v2 = p.d_t - c1 * pose.z + p.d_a * c1 -
                      p.delta * std::cos(am);
    ToolPose u;
    u.X_u = c2 * pose.x + v1 * s2;
    u.Y_u = -s2 * pose.x + v1 * c2;
    u.Z_u = s1 * pose.y + v2;
    u.phi1 = normalize_angle(pose.alpha - o.theta1);
    u.phi2 = normalize_angle(-o.theta2);
    return u;
}

// One rod, from slider socket (a) to platform socket (b), with its leg index
// (0 = leg I, 1 = leg II, 2 = leg III).
struct Rod {
    Vec3 a, b;
    int leg = 0;
};

// Half-extent in x of the parallelogram rod pairs of legs II/III. The closed
// form constraint equations are independent of this spacing; it only shapes
// the 3D rod segments used by the clearance and joint-cone checks.
inline double rod_pair_half_extent(const MachineParams& p) {
    return 0.5 * p.d2;
}

// Platform-side socket positions in the base frame (leg I pair first, then
// leg II pair, then leg III pair).
inline std::array<Vec3, 6> platform_attachments(const PlatformPose& pose,
                                                const MachineParams& p) {
    const Transform T = base_from_platform(pose);
    const double e = rod_pair_half_extent(p);
    return {T.apply({-p.d1, p.R1, 0}),      T.apply({-p.d1, -p.R1, 0}),
            T.apply({-p.d2 + e, -p.R2, 0}), T.apply({-p.d2 - e, -p.R2, 0}),
            T.apply({-p.d2 + e, p.R2, 0}),  T.apply({-p.d2 - e, p.R2, 0})};
}

// Slider-side socket positions in the base frame for given joint coordinates.
inline std::array<Vec3, 6> slider_attachments(const JointCoords& rho,
                                              const MachineParams& p) {
    const double e = rod_pair_half_extent(p);
    return {Vec3{-p.D1, p.r1, rho[0]},      Vec3{-p.D1, -p.r1, rho[0]},
            Vec3{-p.D2 + e, -p.r4, rho[1]}, Vec3{-p.D2 - e, -p.r4, rho[1]},
            Vec3{-p.D2 + e, p.r4, rho[2]},  Vec3{-p.D2 - e, p.r4, rho[2]}};
}

inline std::array<Rod, 6> rods(const PlatformPose& pose,
                               const JointCoords& rho,
                               const MachineParams& p) {
    const auto B = platform_attachments(pose, p);
    const auto A = slider_attachments(rho, p);
    std::array<Rod, 6> r;
    for (int i = 0; i < 6; ++i) r[i] = {A[i], B[i], i / 2};
    return r;
}

}  // namespace verne
