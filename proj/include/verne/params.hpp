#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace verne {

// Base for all domain errors. `name()` is the stable identifier printed by
// the CLI on stderr; `what()` carries the human-readable detail.
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& msg)
        : std::runtime_error(name + ": " + msg), name_(std::move(name)) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

struct MissingField : Error {
    explicit MissingField(const std::string& key)
        : Error("MissingField", key) {}
};

struct InvalidValue : Error {
    InvalidValue(const std::string& key, const std::string& reason)
        : Error("InvalidValue", key + ": " + reason) {}
};

struct ParseError : Error {
    ParseError(int line, const std::string& reason)
        : Error("ParseError", "line " + std::to_string(line) + ": " + reason) {}
};

// Prismatic joint coordinates (rho1, rho2, rho3), mm, z measured downward.
using JointCoords = std::array<double, 3>;

// Fixed description of one machine instance. Lengths in mm, angles in rad.
// Leg I is the asymmetric leg (slider socket half-spacing r1 differs from the
// platform half-spacing R1, which couples platform roll to position). Legs II
// and III are parallelogram legs sharing one guide station in x.
struct MachineParams {
    // Leg I attachment geometry: guide at x = -D1, platform sockets at
    // x = -d1, y = +-R1 on the platform, y = +-r1 on the slider.
    double D1 = 0, d1 = 0, R1 = 0, r1 = 0;
    // Legs II/III: guides at x = -D2, slider sockets at y = -+r4, platform
    // sockets at x = -d2, y = -+R2.
    double D2 = 0, d2 = 0, R2 = 0, r4 = 0;
    // Rod lengths per leg.
    double L1 = 0, L2 = 0, L3 = 0;
    // Tool center point offset along the platform z axis.
    double delta = 0;
    // Tilting table: frame offsets along z before/after the tilt joint.
    double d_a = 0, d_t = 0;
    // Per-slider stroke limits.
    JointCoords rho_min{0, 0, 0};
    JointCoords rho_max{0, 0, 0};
    // Tilting table angle range.
    double theta1_min = 0, theta1_max = 0;
    // Spherical joint cone half-angle about the socket axis.
    double passive_cone_half_angle = 0;
    // Minimum allowed distance between rod segments.
    double rod_clearance = 0;
};

inline bool operator==(const MachineParams& a, const MachineParams& b) {
    return a.D1 == b.D1 && a.d1 == b.d1 && a.R1 == b.R1 && a.r1 == b.r1 &&
           a.D2 == b.D2 && a.d2 == b.d2 && a.R2 == b.R2 && a.r4 == b.r4 &&
           a.L1 == b.L1 && a.L2 == b.L2 && a.L3 == b.L3 &&
           a.delta == b.delta && a.d_a == b.d_a && a.d_t == b.d_t &&
           a.rho_min == b.rho_min && a.rho_max == b.rho_max &&
           a.theta1_min == b.theta1_min && a.theta1_max == b.theta1_max &&
           a.passive_cone_half_angle == b.passive_cone_half_angle &&
           a.rod_clearance == b.rod_clearance;
}

inline double rod_length(const MachineParams& p, int leg) {
    return leg == 0 ? p.L1 : (leg == 1 ? p.L2 : p.L3);
}

// Throws InvalidValue on the first violated structural requirement.
inline void validate(const MachineParams& p) {
    const std::array<std::pair<const char*, double>, 14> lengths{{
        {"D1", p.D1}, {"d1", p.d1}, {"R1", p.R1}, {"r1", p.r1},
        {"D2", p.D2}, {"d2", p.d2}, {"R2", p.R2}, {"r4", p.r4},
        {"L1", p.L1}, {"L2", p.L2}, {"L3", p.L3}, {"delta", p.delta},
        {"d_a", p.d_a}, {"d_t", p.d_t}}};
    for (const auto& [key, v] : lengths) {
        if (!(v > 0) || !std::isfinite(v))
            throw InvalidValue(key, "must be a positive length");
    }
    if (p.R1 == p.r1)
        throw InvalidValue("R1", "leg I must be asymmetric (R1 != r1)");
    // Orientation zero must admit a nonempty position locus.
    if (!(p.L1 * p.L1 - (p.R1 - p.r1) * (p.R1 - p.r1) > 0))
        throw InvalidValue("L1", "position locus empty at zero roll");
    // The two guide stations must differ for the position elimination chain.
    if (p.D1 - p.d1 == p.D2 - p.d2)
        throw InvalidValue("D2", "guide stations coincide (D1-d1 == D2-d2)");
    for (int i = 0; i < 3; ++i) {
        if (!(p.rho_min[i] < p.rho_max[i]))
            throw InvalidValue("rho_min", "stroke empty on slider " +
                                              std::to_string(i + 1));
    }
    if (!(p.theta1_min < p.theta1_max))
        throw InvalidValue("theta1_min", "empty table angle range");
    if (!(p.theta1_min > -3.15) || !(p.theta1_max < 3.15))
        throw InvalidValue("theta1_max", "table angle range exceeds one turn");
    if (!(p.passive_cone_half_angle > 0) ||
        !(p.passive_cone_half_angle < 1.5707963267948966))
        throw InvalidValue("passive_cone_half_angle", "must lie in (0, pi/2)");
    if (!(p.rod_clearance >= 0))
        throw InvalidValue("rod_clearance", "must be non-negative");
}

// Desk-scale reference machine. Chosen so that the nominal test pose
// (-240, -86, 1000) mm sits strictly inside the positional workspace with a
// full complement of sixteen inverse-kinematic candidates, and so that the
// slider values {250, 674, 685} mm are all inside the stroke.
inline MachineParams reference_params() {
    MachineParams p;
    p.D1 = 340;  p.d1 = 100;  p.R1 = 150;  p.r1 = 110;
    p.D2 = 120;  p.d2 = 80;   p.R2 = 128;  p.r4 = 80;
    p.L1 = 920;  p.L2 = 920;  p.L3 = 920;
    p.delta = 150;
    p.d_a = 1200;  p.d_t = 150;
    p.rho_min = {0, 0, 0};
    p.rho_max = {1400, 1400, 1400};
    p.theta1_min = -1.0;  p.theta1_max = 1.0;
    p.passive_cone_half_angle = 0.7;
    p.rod_clearance = 15;
    return p;
}

namespace detail {

inline std::string fmt_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct ParamKey {
    const char* name;
    bool angle;  // expects "rad" instead of "mm"
};

inline constexpr std::array<ParamKey, 20> param_keys{{
    {"D1", false}, {"d1", false}, {"R1", false}, {"r1", false},
    {"D2", false}, {"d2", false}, {"R2", false}, {"r4", false},
    {"L1", false}, {"L2", false}, {"L3", false}, {"delta", false},
    {"d_a", false}, {"d_t", false}, {"rho_min", false}, {"rho_max", false},
    {"theta1_min", true}, {"theta1_max", true},
    {"passive_cone_half_angle", true}, {"rod_clearance", false}}};

}  // namespace detail

// Parses the line-oriented `key = value unit` format ('#' starts a comment,
// blank lines ignored; lengths carry "mm", angles "rad"). All keys are
// required. rho_min / rho_max apply to all three sliders.
inline MachineParams load_params(std::istream& in) {
    std::map<std::string, double> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto pos = line.find('#'); pos != std::string::npos)
            line.erase(pos);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        std::string eq;
        double value;
        std::string unit;
        if (!(ls >> eq >> value >> unit) || eq != "=")
            throw ParseError(lineno, "expected `key = value unit`");
        std::string extra;
        if (ls >> extra) throw ParseError(lineno, "trailing tokens");
        const detail::ParamKey* pk = nullptr;
        for (const auto& k : detail::param_keys)
            if (key == k.name) pk = &k;
        if (!pk) throw ParseError(lineno, "unknown key `" + key + "`");
        const std::string want = pk->angle ? "rad" : "mm";
        if (unit != want)
            throw ParseError(lineno, key + " must carry unit " + want);
        if (kv.count(key)) throw ParseError(lineno, "duplicate key " + key);
        kv[key] = value;
    }
    for (const auto& k : detail::param_keys)
        if (!kv.count(k.name)) throw MissingField(k.name);

    MachineParams p;
    p.D1 = kv["D1"];  p.d1 = kv["d1"];  p.R1 = kv["R1"];  p.r1 = kv["r1"];
    p.D2 = kv["D2"];  p.d2 = kv["d2"];  p.R2 = kv["R2"];  p.r4 = kv["r4"];
    p.L1 = kv["L1"];  p.L2 = kv["L2"];  p.L3 = kv["L3"];
    p.delta = kv["delta"];
    p.d_a = kv["d_a"];  p.d_t = kv["d_t"];
    p.rho_min.fill(kv["rho_min"]);
    p.rho_max.fill(kv["rho_max"]);
    p.theta1_min = kv["theta1_min"];
    p.theta1_max = kv["theta1_max"];
    p.passive_cone_half_angle = kv["passive_cone_half_angle"];
    p.rod_clearance = kv["rod_clearance"];
    validate(p);
    return p;
}

inline MachineParams load_params_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(0, "cannot open " + path);
    return load_params(in);
}

// Emits the canonical parameter file; load_params(serialize(p)) == p.
// Per-slider strokes are collapsed to slider 1's values (the file format is
// uniform across sliders).
inline std::string serialize(const MachineParams& p) {
    std::ostringstream out;
    out << "# VERNE-style hybrid machine parameters\n";
    auto put = [&](const char* key, double v, bool angle) {
        out << key << " = " << detail::fmt_full(v) << (angle ? " rad" : " mm")
            << "\n";
    };
    put("D1", p.D1, false);  put("d1", p.d1, false);
    put("R1", p.R1, false);  put("r1", p.r1, false);
    put("D2", p.D2, false);  put("d2", p.d2, false);
    put("R2", p.R2, false);  put("r4", p.r4, false);
    put("L1", p.L1, false);  put("L2", p.L2, false);  put("L3", p.L3, false);
    put("delta", p.delta, false);
    put("d_a", p.d_a, false);  put("d_t", p.d_t, false);
    put("rho_min", p.rho_min[0], false);
    put("rho_max", p.rho_max[0], false);
    put("theta1_min", p.theta1_min, true);
    put("theta1_max", p.theta1_max, true);
    put("passive_cone_half_angle", p.passive_cone_half_angle, true);
    put("rod_clearance", p.rod_clearance, false);
    return out.str();
}

inline MachineParams load_params(const std::string& text) {
    std::istringstream in(text);
    return load_params(in);
}

}  // namespace verne
