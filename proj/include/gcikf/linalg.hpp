// Dense small-matrix kernels for square-root filtering: Cholesky, QR
// triangularization, rank-1 factor update/downdate, triangular solves.
//
// Factor convention used across the library: covariances are carried as an
// upper-triangular factor S with P = S^T * S.  The QR-based predict step
// naturally produces an upper factor, so the same convention is used
// everywhere.
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Core>

namespace gcikf {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Index = Eigen::Index;

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct NotSymmetric : Error { using Error::Error; };
struct NotPositiveDefinite : Error { using Error::Error; };
struct RankDeficient : Error { using Error::Error; };
struct DowndateBreaksPD : Error { using Error::Error; };
struct SingularTriangular : Error { using Error::Error; };

/// Upper-triangular square factor.  A factor S representing a covariance P
/// satisfies P = S^T * S; strictly-lower entries are exactly zero.
class UpperTri {
  public:
    explicit UpperTri(Mat m) : m_(std::move(m)) {
        if (m_.rows() != m_.cols())
            throw std::invalid_argument("UpperTri: matrix must be square");
        m_.triangularView<Eigen::StrictlyLower>().setZero();
    }

    static UpperTri identity(Index n) { return UpperTri(Mat::Identity(n, n)); }

    static UpperTri scaled_identity(Index n, double s) {
        return UpperTri(Mat::Identity(n, n) * s);
    }

    Index dim() const { return m_.rows(); }
    const Mat& mat() const { return m_; }

    /// S^T * S, the covariance this factor represents.
    Mat gram() const { return m_.transpose() * m_; }

    double min_diag() const { return m_.diagonal().minCoeff(); }

  private:
    Mat m_;
};

namespace detail {

inline void check_finite(const Mat& m, const char* what) {
    if (!m.allFinite()) throw Error(std::string(what) + ": non-finite entries");
}

} // namespace detail

/// Cholesky factorization of a symmetric positive-definite matrix.
/// Returns upper-triangular S with S^T * S = P.  The input is symmetrized as
/// (P + P^T)/2 before factoring to absorb round-off; asymmetry beyond 1e-12
/// relative is rejected.
inline UpperTri cholesky_factor(const Mat& P) {
    if (P.rows() != P.cols())
        throw std::invalid_argument("cholesky_factor: matrix must be square");
    detail::check_finite(P, "cholesky_factor");
    const Index n = P.rows();
    const double scale = P.cwiseAbs().maxCoeff();
    if ((P - P.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, 1.0))
        throw NotSymmetric("cholesky_factor: input not symmetric");

    Mat A = 0.5 * (P + P.transpose());
    // Standard lower-triangular factorization, written into L.
    Mat L = Mat::Zero(n, n);
    for (Index j = 0; j < n; ++j) {
        double d = A(j, j);
        for (Index k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
        if (d <= 0.0 || !std::isfinite(d))
            throw NotPositiveDefinite("cholesky_factor: leading minor " +
                                      std::to_string(j + 1) + " not positive");
        L(j, j) = std::sqrt(d);
        for (Index i = j + 1; i < n; ++i) {
            double s = A(i, j);
            for (Index k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
            L(i, j) = s / L(j, j);
        }
    }
    return UpperTri(L.transpose());
}

/// Upper-triangular R of a QR decomposition of A (rows >= cols), with
/// R^T * R = A^T * A and nonnegative diagonal.
inline UpperTri qr_triangularize(const Mat& A) {
    const Index m = A.rows(), n = A.cols();
    if (m < n)
        throw std::invalid_argument("qr_triangularize: need rows >= cols");
    detail::check_finite(A, "qr_triangularize");

    Mat R = A;
    // Householder reflections, accumulating only R.
    for (Index k = 0; k < n; ++k) {
        double norm = R.col(k).tail(m - k).norm();
        if (norm == 0.0) continue;
        double alpha = R(k, k) >= 0 ? -norm : norm;
        Vec v = Vec::Zero(m - k);
        v(0) = R(k, k) - alpha;
        v.tail(m - k - 1) = R.col(k).tail(m - k - 1);
        const double vnorm2 = v.squaredNorm();
        if (vnorm2 > 0.0) {
            for (Index j = k + 1; j < n; ++j) {
                const double proj = v.dot(R.col(j).tail(m - k));
                R.col(j).tail(m - k) -= (2.0 * proj / vnorm2) * v;
            }
        }
        R(k, k) = alpha;
        R.col(k).tail(m - k - 1).setZero();
    }

    Mat out = R.topRows(n);
    // Fix diagonal signs so factors are unique and comparable.
    for (Index i = 0; i < n; ++i)
        if (out(i, i) < 0.0) out.row(i) = -out.row(i);

    const double dmax = out.diagonal().cwiseAbs().maxCoeff();
    if (dmax == 0.0) throw RankDeficient("qr_triangularize: zero matrix");
    for (Index i = 0; i < n; ++i)
        if (std::abs(out(i, i)) < 1e-14 * dmax)
            throw RankDeficient("qr_triangularize: rank-deficient column " +
                                std::to_string(i + 1));
    return UpperTri(std::move(out));
}

/// Rank-1 update (sign=+1) or downdate (sign=-1) of an upper factor:
/// returns S' with S'^T * S' = S^T * S + sign * x * x^T.
inline UpperTri rank1_update(const UpperTri& S, const Vec& x, int sign) {
    const Index n = S.dim();
    if (x.size() != n)
        throw std::invalid_argument("rank1_update: dimension mismatch");
    if (sign != 1 && sign != -1)
        throw std::invalid_argument("rank1_update: sign must be +1 or -1");
    detail::check_finite(x, "rank1_update");

    Mat R = S.mat();
    Vec v = x;
    for (Index k = 0; k < n; ++k) {
        const double rkk = R(k, k);
        if (rkk == 0.0)
            throw std::invalid_argument("rank1_update: singular factor");
        double r;
        if (sign > 0) {
            r = std::hypot(rkk, v(k));
        } else {
            const double d = (rkk - v(k)) * (rkk + v(k));
            if (d <= 0.0 || !std::isfinite(d))
                throw DowndateBreaksPD("rank1_update: downdate loses positive definiteness at row " +
                                       std::to_string(k + 1));
            r = std::sqrt(d);
        }
        const double c = r / rkk;
        const double s = v(k) / rkk;
        R(k, k) = r;
        for (Index j = k + 1; j < n; ++j) {
            R(k, j) = (R(k, j) + sign * s * v(j)) / c;
            v(j) = c * v(j) - s * R(k, j);
        }
    }
    return UpperTri(std::move(R));
}

enum class Side { Left, Right };

/// Solve a triangular system with the factor S:
///   Left:   S * X = B   (or S^T * X = B when transposed)
///   Right:  X * S = B   (or X * S^T = B when transposed)
inline Mat tri_solve(const UpperTri& S, const Mat& B, Side side, bool transposed = false) {
    const Index n = S.dim();
    const Mat& R = S.mat();
    const double dmax = R.diagonal().cwiseAbs().maxCoeff();
    for (Index i = 0; i < n; ++i)
        if (std::abs(R(i, i)) <= 1e-14 * dmax)
            throw SingularTriangular("tri_solve: zero diagonal at row " +
                                     std::to_string(i + 1));

    if (side == Side::Left) {
        if (B.rows() != n) throw std::invalid_argument("tri_solve: shape mismatch");
        Mat X = B;
        if (!transposed) {
            // back substitution: R X = B
            for (Index j = 0; j < X.cols(); ++j)
                for (Index i = n - 1; i >= 0; --i) {
                    double s = X(i, j);
                    for (Index k = i + 1; k < n; ++k) s -= R(i, k) * X(k, j);
                    X(i, j) = s / R(i, i);
                }
        } else {
            // forward substitution: R^T X = B
            for (Index j = 0; j < X.cols(); ++j)
                for (Index i = 0; i < n; ++i) {
                    double s = X(i, j);
                    for (Index k = 0; k < i; ++k) s -= R(k, i) * X(k, j);
                    X(i, j) = s / R(i, i);
                }
        }
        return X;
    }

    if (B.cols() != n) throw std::invalid_argument("tri_solve: shape mismatch");
    // X R = B  <=>  R^T X^T = B^T ; X R^T = B  <=>  R X^T = B^T
    Mat Xt = tri_solve(S, B.transpose(), Side::Left, !transposed);
    return Xt.transpose();
}

} // namespace gcikf
