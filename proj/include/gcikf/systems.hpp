// The scalar strongly-nonlinear benchmark and the 4-state vehicle
// navigation benchmark.
#pragma once

#include <cmath>

#include "gcikf/model.hpp"

namespace gcikf {

struct RangeSingularity : Error { using Error::Error; };

// ---------------------------------------------------------------------------
// Scalar system:  x' = 0.5 x + 25 x / (1 + x^2) + 8 cos(1.2 x),  z = x^2 / 20
// ---------------------------------------------------------------------------

inline double scalar_f(double x) {
    return 0.5 * x + 25.0 * x / (1.0 + x * x) + 8.0 * std::cos(1.2 * x);
}

inline double scalar_h(double x) { return x * x / 20.0; }

/// dz/dx = x / 10
inline double scalar_h_jacobian(double x) { return x / 10.0; }

inline StateSpaceModel scalar_system() {
    StateSpaceModel m;
    m.state_dim = 1;
    m.meas_dim = 1;
    m.f = [](const Vec& x) { return Vec::Constant(1, scalar_f(x(0))); };
    m.h = [](const Vec& x) { return Vec::Constant(1, scalar_h(x(0))); };
    m.h_jacobian = [](const Vec& x) { return Mat::Constant(1, 1, scalar_h_jacobian(x(0))); };
    m.W = Mat::Identity(1, 1);
    m.V = Mat::Identity(1, 1);
    return m;
}

// ---------------------------------------------------------------------------
// Vehicle navigation: constant-velocity dynamics, four-channel measurement
//   h(x) = [ -x1 - x3,  -x2 - x4,  sqrt(x1^2 + x2^2),
//            arctan((x1 + 100) / (x2 + 100)) ]
// State: [east pos, north pos, east vel, north vel], sampling interval T.
// ---------------------------------------------------------------------------

inline Mat vehicle_transition(double T = 0.1) {
    Mat F = Mat::Identity(4, 4);
    F(0, 2) = T;
    F(1, 3) = T;
    return F;
}

inline Vec vehicle_h(const Vec& x) {
    const double r2 = x(0) * x(0) + x(1) * x(1);
    if (r2 <= 0.0)
        throw RangeSingularity("vehicle_h: range undefined at the origin");
    Vec z(4);
    z(0) = -x(0) - x(2);
    z(1) = -x(1) - x(3);
    z(2) = std::sqrt(r2);
    z(3) = std::atan((x(0) + 100.0) / (x(1) + 100.0));
    return z;
}

inline Mat vehicle_h_jacobian(const Vec& x) {
    const double r = std::sqrt(x(0) * x(0) + x(1) * x(1));
    if (r <= 0.0)
        throw RangeSingularity("vehicle_h_jacobian: range undefined at the origin");
    const double u = x(0) + 100.0;
    const double v = x(1) + 100.0;
    const double den = u * u + v * v;
    Mat H = Mat::Zero(4, 4);
    H(0, 0) = -1.0; H(0, 2) = -1.0;
    H(1, 1) = -1.0; H(1, 3) = -1.0;
    H(2, 0) = x(0) / r;
    H(2, 1) = x(1) / r;
    H(3, 0) = v / den;
    H(3, 1) = -u / den;
    return H;
}

/// Conventional range/bearing-only variant (config switch for sensitivity
/// studies): h(x) = [ sqrt(x1^2 + x2^2), arctan((x1+100)/(x2+100)) ].
inline Vec vehicle_h_range_bearing(const Vec& x) {
    Vec full = vehicle_h(x);
    Vec z(2);
    z(0) = full(2);
    z(1) = full(3);
    return z;
}

inline Mat vehicle_h_range_bearing_jacobian(const Vec& x) {
    Mat full = vehicle_h_jacobian(x);
    Mat H(2, 4);
    H.row(0) = full.row(2);
    H.row(1) = full.row(3);
    return H;
}

inline StateSpaceModel vehicle_system(double T = 0.1, bool range_bearing_only = false) {
    StateSpaceModel m;
    m.state_dim = 4;
    m.meas_dim = range_bearing_only ? 2 : 4;
    const Mat F = vehicle_transition(T);
    m.f = [F](const Vec& x) { return Vec(F * x); };
    m.f_jacobian = [F](const Vec&) { return F; };
    if (range_bearing_only) {
        m.h = [](const Vec& x) { return vehicle_h_range_bearing(x); };
        m.h_jacobian = [](const Vec& x) { return vehicle_h_range_bearing_jacobian(x); };
    } else {
        m.h = [](const Vec& x) { return vehicle_h(x); };
        m.h_jacobian = [](const Vec& x) { return vehicle_h_jacobian(x); };
    }
    m.W = Mat::Identity(4, 4);
    m.V = Mat::Identity(m.meas_dim, m.meas_dim);
    return m;
}

} // namespace gcikf
