#pragma once

#include <cmath>

#include "legs.hpp"
#include "params.hpp"
#include "transforms.hpp"

namespace verne {

struct EmptyLocus : Error {
    explicit EmptyLocus(double alpha)
        : Error("EmptyLocus", "no position locus at roll " +
                                  std::to_string(alpha)) {}
};

// Residual of the roll/position coupling relation obtained by eliminating
// rho1 between the two leg I equations:
//   R1^2 sin^2(a) (x + D1 - d1)^2 + (R1^2 + r1^2 - 2 R1 r1 cos a) y^2
//     - R1^2 sin^2(a) (L1^2 - (R1^2 + r1^2 - 2 R1 r1 cos a))
// Zero exactly on the reachable position locus for roll a. Units mm^4.
inline double coupling_residual_cs(double x, double y, double c, double s,
                                   const MachineParams& p) {
    const double x1 = x + (p.D1 - p.d1);
    const double a2 = sq(p.R1) * sq(s);
    const double m = sq(p.R1) + sq(p.r1) - 2 * p.R1 * p.r1 * c;
    return a2 * (sq(x1) - (sq(p.L1) - m)) + m * sq(y);
}

inline double coupling_residual(double x, double y, double alpha,
                                const MachineParams& p) {
    return coupling_residual_cs(x, y, std::cos(alpha), std::sin(alpha), p);
}

// Same residual scaled by R1^2 L1^2, making tolerances dimensionless.
inline double coupling_residual_normalized(double x, double y, double alpha,
                                           const MachineParams& p) {
    return coupling_residual(x, y, alpha, p) / (sq(p.R1) * sq(p.L1));
}

// The locus of reachable platform positions at fixed roll and fixed z: an
// axis-aligned ellipse centered on (d1 - D1, 0). `a` is the x semi-axis,
// `b` the y semi-axis; b <= a always (they coincide when R1 cos a = r1,
// where the locus is a circle).
struct IsoOrientationEllipse {
    double alpha = 0;
    double center_x = 0;
    double a = 0, b = 0;
};

inline IsoOrientationEllipse iso_orientation_ellipse_cs(
    double c, double s, double alpha, const MachineParams& p) {
    const double m = sq(p.R1) + sq(p.r1) - 2 * p.R1 * p.r1 * c;
    double rad = sq(p.L1) - m;
    // Tolerate roundoff at a point locus; anything clearly negative is empty.
    if (rad < -1e-12 * sq(p.L1)) throw EmptyLocus(alpha);
    if (rad < 0) rad = 0;
    IsoOrientationEllipse e;
    e.alpha = alpha;
    e.center_x = p.d1 - p.D1;
    e.a = std::sqrt(rad);
    e.b = std::fabs(p.R1 * s) * e.a / std::sqrt(m);
    return e;
}

inline IsoOrientationEllipse iso_orientation_ellipse(double alpha,
                                                     const MachineParams& p) {
    return iso_orientation_ellipse_cs(std::cos(alpha), std::sin(alpha), alpha,
                                      p);
}

// Point on the ellipse at parameter t.
inline void ellipse_point(const IsoOrientationEllipse& e, double t, double& x,
                          double& y) {
    x = e.center_x + e.a * std::cos(t);
    y = e.b * std::sin(t);
}

// Largest |roll| with a nonempty position locus (pi when unbounded).
inline double max_roll_for_locus(const MachineParams& p) {
    const double cmin =
        (sq(p.R1) + sq(p.r1) - sq(p.L1)) / (2 * p.R1 * p.r1);
    if (cmin <= -1) return kPi;
    if (cmin >= 1) return 0;
    return std::acos(cmin);
}

}  // namespace verne
