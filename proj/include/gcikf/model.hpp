// State-space model description shared by the filter engines and the
// benchmark systems.
#pragma once

#include <functional>
#include <stdexcept>

#include "gcikf/linalg.hpp"

namespace gcikf {

struct JacobianUnavailable : Error { using Error::Error; };

/// Nonlinear dynamic system x' = f(x) + w, z = h(x) + v with optional
/// analytic Jacobians and the noise covariances the filter assumes.
struct StateSpaceModel {
    int state_dim = 0;
    int meas_dim = 0;
    std::function<Vec(const Vec&)> f;
    std::function<Vec(const Vec&)> h;
    std::function<Mat(const Vec&)> f_jacobian; // optional
    std::function<Mat(const Vec&)> h_jacobian; // optional
    Mat W; // process covariance
    Mat V; // measurement covariance

    void validate() const {
        if (state_dim < 1 || meas_dim < 1)
            throw std::invalid_argument("StateSpaceModel: bad dimensions");
        if (!f || !h) throw std::invalid_argument("StateSpaceModel: f and h required");
        if (W.rows() != state_dim || W.cols() != state_dim)
            throw std::invalid_argument("StateSpaceModel: W shape");
        if (V.rows() != meas_dim || V.cols() != meas_dim)
            throw std::invalid_argument("StateSpaceModel: V shape");
    }
};

} // namespace gcikf
