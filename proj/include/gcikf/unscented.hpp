// Sigma-point machinery and the square-root time/measurement recursions.
#pragma once

#include <cmath>
#include <utility>

#include "gcikf/linalg.hpp"

namespace gcikf {

struct DegenerateScaling : Error { using Error::Error; };
struct NonFiniteDynamics : Error { using Error::Error; };
struct NonFiniteMeasurement : Error { using Error::Error; };

/// Unscented-transform scaling parameters.  lambda = alpha^2 (N + kappa) - N.
struct UtParams {
    double alpha = 1.0;
    double beta = 2.0;
    double kappa = 0.0;

    double lambda(int n) const { return alpha * alpha * (n + kappa) - n; }
};

/// State mean plus upper-triangular covariance factor, P = S^T * S.
struct SqrtBelief {
    Vec x;
    UpperTri S;

    int dim() const { return static_cast<int>(x.size()); }
};

/// 2N+1 sigma points (columns) with mean and covariance weights.
struct SigmaSet {
    Mat points; // N x (2N+1)
    Vec wm;
    Vec wc;
};

/// Predicted measurement statistics: mean, sqrt innovation factor with
/// D^T * D = P_z, and the state/measurement cross covariance.
struct MeasStats {
    Vec zhat;
    UpperTri D;
    Mat Pxz;
};

/// Mean and covariance weights of the scaled unscented transform.
/// wm[0] = lambda/(N+lambda), wc[0] = wm[0] + (1 - alpha^2 + beta),
/// wm[i] = wc[i] = 1/(2(N+lambda)) otherwise.
inline std::pair<Vec, Vec> make_weights(int n, const UtParams& p) {
    if (n < 1) throw std::invalid_argument("make_weights: need N >= 1");
    const double lam = p.lambda(n);
    if (!(p.alpha > 0.0) || n + lam <= 0.0)
        throw DegenerateScaling("make_weights: N + lambda must be positive");
    Vec wm = Vec::Constant(2 * n + 1, 1.0 / (2.0 * (n + lam)));
    Vec wc = wm;
    wm(0) = lam / (n + lam);
    wc(0) = wm(0) + (1.0 - p.alpha * p.alpha + p.beta);
    return {wm, wc};
}

/// Sigma points about a sqrt belief.  Offsets use the rows of the upper
/// factor S, so that the weighted spread reproduces (N+lambda) S^T S.
inline SigmaSet sigma_points(const SqrtBelief& b, const UtParams& p) {
    const int n = b.dim();
    auto [wm, wc] = make_weights(n, p);
    const double g = std::sqrt(n + p.lambda(n));
    SigmaSet set;
    set.points.resize(n, 2 * n + 1);
    set.points.col(0) = b.x;
    for (int i = 0; i < n; ++i) {
        const Vec off = g * b.S.mat().row(i).transpose();
        set.points.col(1 + i) = b.x + off;
        set.points.col(1 + n + i) = b.x - off;
    }
    set.wm = std::move(wm);
    set.wc = std::move(wc);
    return set;
}

namespace detail {

/// Shared core of the square-root propagation: weighted mean of transformed
/// points, then QR of the weighted deviations stacked with the noise factor,
/// then a rank-1 adjustment with the central deviation.
inline std::pair<Vec, UpperTri> sr_moments(const Mat& transformed, const Vec& wm,
                                           const Vec& wc, const UpperTri& sqrtNoise) {
    const Index d = transformed.rows();
    const Index cnt = transformed.cols();
    Vec mean = Vec::Zero(d);
    for (Index i = 0; i < cnt; ++i) mean += wm(i) * transformed.col(i);

    const double w1 = std::sqrt(wc(1));
    Mat stack(cnt - 1 + d, d);
    for (Index i = 1; i < cnt; ++i)
        stack.row(i - 1) = w1 * (transformed.col(i) - mean).transpose();
    stack.bottomRows(d) = sqrtNoise.mat();

    UpperTri S = qr_triangularize(stack);
    const Vec dev0 = transformed.col(0) - mean;
    const double w0 = wc(0);
    if (w0 != 0.0 && dev0.squaredNorm() > 0.0)
        S = rank1_update(S, std::sqrt(std::abs(w0)) * dev0, w0 > 0.0 ? +1 : -1);
    return {std::move(mean), std::move(S)};
}

} // namespace detail

/// Square-root time update: propagate sigma points through the dynamics and
/// rebuild the factor from the weighted deviations and process-noise factor.
template <typename F>
SqrtBelief sr_predict(const SqrtBelief& b, F&& f, const UpperTri& sqrtW, const UtParams& p) {
    const int n = b.dim();
    SigmaSet set = sigma_points(b, p);
    Mat prop(n, 2 * n + 1);
    for (int i = 0; i < 2 * n + 1; ++i) {
        Vec y = f(Vec(set.points.col(i)));
        if (!y.allFinite())
            throw NonFiniteDynamics("sr_predict: dynamics returned non-finite state");
        prop.col(i) = y;
    }
    auto [mean, S] = detail::sr_moments(prop, set.wm, set.wc, sqrtW);
    return SqrtBelief{std::move(mean), std::move(S)};
}

/// Square-root measurement statistics from a predicted belief: fresh sigma
/// points, predicted measurement mean, sqrt innovation factor and cross
/// covariance.
template <typename H>
MeasStats sr_measure(const SqrtBelief& pred, H&& h, const UpperTri& sqrtV, const UtParams& p) {
    const int n = pred.dim();
    SigmaSet set = sigma_points(pred, p);
    Vec z0 = h(Vec(set.points.col(0)));
    if (!z0.allFinite())
        throw NonFiniteMeasurement("sr_measure: measurement returned non-finite value");
    const Index m = z0.size();
    Mat zs(m, 2 * n + 1);
    zs.col(0) = z0;
    for (int i = 1; i < 2 * n + 1; ++i) {
        Vec zi = h(Vec(set.points.col(i)));
        if (!zi.allFinite())
            throw NonFiniteMeasurement("sr_measure: measurement returned non-finite value");
        zs.col(i) = zi;
    }

    auto [zhat, D] = detail::sr_moments(zs, set.wm, set.wc, sqrtV);

    Mat Pxz = Mat::Zero(n, m);
    for (int i = 0; i < 2 * n + 1; ++i)
        Pxz += set.wc(i) * (set.points.col(i) - pred.x) * (zs.col(i) - zhat).transpose();
    return MeasStats{std::move(zhat), std::move(D), std::move(Pxz)};
}

} // namespace gcikf
