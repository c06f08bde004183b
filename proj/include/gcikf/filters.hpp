// The filter family: plain UKF, iterated UKF, square-root UKF, and the
// robust regression-based iterated square-root filters (MCC / CI / GCI /
// GCI with parameter adaptation).
#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "gcikf/model.hpp"
#include "gcikf/robust_cost.hpp"
#include "gcikf/unscented.hpp"

namespace gcikf {

struct InnerMatrixNotPD : Error { using Error::Error; };
struct NonFiniteIterate : Error { using Error::Error; };

enum class FilterKind { Ukf, Iukf, SrUkf, MccUkf, SrCiIukf, SrGciIukf, SrGciIukfAdapt };

inline std::string to_string(FilterKind k) {
    switch (k) {
        case FilterKind::Ukf: return "UKF";
        case FilterKind::Iukf: return "IUKF";
        case FilterKind::SrUkf: return "SR-UKF";
        case FilterKind::MccUkf: return "MCC-UKF";
        case FilterKind::SrCiIukf: return "SR-CI-IUKF";
        case FilterKind::SrGciIukf: return "SR-GCI-IUKF";
        case FilterKind::SrGciIukfAdapt: return "SR-GCI-IUKF-ADAPT";
    }
    return "?";
}

enum class JacobianMode { Analytic, FiniteDifference, Statistical };

struct FilterSpec {
    FilterKind kind = FilterKind::Ukf;
    Kernel kernel = Kernel::uniform();
    UtParams ut{};
    double iter_tol = 1e-6;
    int iter_max = 10;
    JacobianMode jacobian_mode = JacobianMode::Analytic;
    AdaptConfig adapt = AdaptConfig::defaults();

    // Lockout guard: when at least half of the whitened innovation channels
    // sit beyond guard_sigma for guard_persist consecutive steps, the update
    // falls back to uniform weights for one step so the filter cannot reject
    // every measurement forever.
    double guard_sigma = 2.5;
    int guard_persist = 3;

    double gain_ceiling = 1e6;

    bool is_square_root() const {
        return kind == FilterKind::SrUkf || kind == FilterKind::SrCiIukf ||
               kind == FilterKind::SrGciIukf || kind == FilterKind::SrGciIukfAdapt;
    }
    bool is_iterated() const {
        return kind == FilterKind::Iukf || kind == FilterKind::MccUkf ||
               kind == FilterKind::SrCiIukf || kind == FilterKind::SrGciIukf ||
               kind == FilterKind::SrGciIukfAdapt;
    }
};

struct StepDiagnostics {
    int iterations_used = 0;
    double gain_norm = 0.0;
    double cov_min_diag = 0.0;
    std::vector<double> cost_trace;
    bool divergence_flag = false;
    bool guard_engaged = false;
};

/// Whitened nonlinear regression of the measurement update.  With Psi the
/// block-diagonal factor [S_pred, 0; 0, sqrtV], the stacked observation is
/// Q = Psi^-T [x_pred; z] and the residual at x is e(x) = Q - Psi^-T [x; h(x)],
/// so E[e e^T] = I in the Gaussian case.
class RegressionFrame {
  public:
    RegressionFrame(const SqrtBelief& pred, Vec z, const UpperTri& sqrtV,
                    std::function<Vec(const Vec&)> h)
        : pred_(pred), z_(std::move(z)), sqrtV_(sqrtV), h_(std::move(h)) {
        Q_.resize(pred_.dim() + z_.size());
        Q_.head(pred_.dim()) = tri_solve(pred_.S, pred_.x, Side::Left, true);
        Q_.tail(z_.size()) = tri_solve(sqrtV_, z_, Side::Left, true);
    }

    const Vec& Q() const { return Q_; }

    Vec residual(const Vec& x) const {
        Vec hx = h_(x);
        if (!hx.allFinite())
            throw NonFiniteMeasurement("RegressionFrame: h(x) not finite");
        Vec e(Q_.size());
        e.head(pred_.dim()) = tri_solve(pred_.S, Vec(pred_.x - x), Side::Left, true);
        e.tail(z_.size()) = tri_solve(sqrtV_, Vec(z_ - hx), Side::Left, true);
        return e;
    }

    /// Block-diagonal stacked factor: Psi^T Psi = blockdiag(P_pred, V).
    UpperTri psi() const {
        const Index n = pred_.dim(), m = z_.size();
        Mat p = Mat::Zero(n + m, n + m);
        p.topLeftCorner(n, n) = pred_.S.mat();
        p.bottomRightCorner(m, m) = sqrtV_.mat();
        return UpperTri(std::move(p));
    }

  private:
    const SqrtBelief& pred_;
    Vec z_;
    const UpperTri& sqrtV_;
    std::function<Vec(const Vec&)> h_;
    Vec Q_;
};

inline RegressionFrame build_frame(const SqrtBelief& pred, const Vec& z, const UpperTri& sqrtV,
                                   std::function<Vec(const Vec&)> h) {
    return RegressionFrame(pred, z, sqrtV, std::move(h));
}

/// Weighted gain K = S' H^T (H S' H^T + V')^-1 with
/// S' = S^T diag(1/tx) S and V' = sqrtV^T diag(1/tz) sqrtV.
/// Uniformly rescaling (tx, tz) by any c > 0 leaves K unchanged.
inline Mat robust_gain(const UpperTri& S_pred, const Mat& H, const Vec& tx, const Vec& tz,
                       const UpperTri& sqrtV) {
    const Index n = S_pred.dim();
    const Index m = sqrtV.dim();
    if (H.rows() != m || H.cols() != n)
        throw std::invalid_argument("robust_gain: H shape mismatch");
    if (tx.size() != n || tz.size() != m)
        throw std::invalid_argument("robust_gain: weight size mismatch");
    if (tx.minCoeff() <= 0.0 || tz.minCoeff() <= 0.0)
        throw std::invalid_argument("robust_gain: weights must be positive");

    Mat Sx = S_pred.mat();
    for (Index i = 0; i < n; ++i) Sx.row(i) /= std::sqrt(tx(i));
    const Mat Sigma = Sx.transpose() * Sx;

    Mat Sv = sqrtV.mat();
    for (Index i = 0; i < m; ++i) Sv.row(i) /= std::sqrt(tz(i));
    const Mat Vw = Sv.transpose() * Sv;

    Mat inner = H * Sigma * H.transpose() + Vw;
    inner = 0.5 * (inner + inner.transpose());
    UpperTri C = [&] {
        try {
            return cholesky_factor(inner);
        } catch (const NotPositiveDefinite& e) {
            throw InnerMatrixNotPD(std::string("robust_gain: ") + e.what());
        }
    }();
    const Mat rhs = H * Sigma; // = (Sigma H^T)^T
    Mat Kt = tri_solve(C, tri_solve(C, rhs, Side::Left, true), Side::Left, false);
    return Kt.transpose();
}

/// Measurement Jacobian at x: model-supplied, central finite differences with
/// step max(1e-6, 1e-6 |x_i|), or statistical linearization (P^-1 Pxz)^T.
inline Mat jacobian(const StateSpaceModel& model, const Vec& x, JacobianMode mode,
                    const SqrtBelief* pred = nullptr, const MeasStats* meas = nullptr) {
    switch (mode) {
        case JacobianMode::Analytic:
            if (!model.h_jacobian)
                throw JacobianUnavailable("jacobian: analytic Jacobian not supplied");
            return model.h_jacobian(x);
        case JacobianMode::FiniteDifference: {
            Mat H(model.meas_dim, model.state_dim);
            Vec xp = x, xm = x;
            for (int i = 0; i < model.state_dim; ++i) {
                const double step = std::max(1e-6, 1e-6 * std::abs(x(i)));
                xp(i) = x(i) + step;
                xm(i) = x(i) - step;
                H.col(i) = (model.h(xp) - model.h(xm)) / (2.0 * step);
                xp(i) = x(i);
                xm(i) = x(i);
            }
            return H;
        }
        case JacobianMode::Statistical: {
            if (!pred || !meas)
                throw JacobianUnavailable("jacobian: statistical mode needs measurement stats");
            // H = (P^-1 Pxz)^T with P = S^T S
            Mat Y = tri_solve(pred->S, meas->Pxz, Side::Left, true);
            Mat Z = tri_solve(pred->S, Y, Side::Left, false);
            return Z.transpose();
        }
    }
    throw Error("jacobian: unreachable");
}

class Filter {
  public:
    Filter(StateSpaceModel model, FilterSpec spec, SqrtBelief init)
        : model_(std::move(model)),
          spec_(std::move(spec)),
          belief_(std::move(init)),
          sqrtW_(cholesky_factor(model_.W)),
          sqrtV_(cholesky_factor(model_.V)),
          kernel_(spec_.kernel) {
        model_.validate();
        if (belief_.dim() != model_.state_dim)
            throw std::invalid_argument("Filter: init state dimension mismatch");
        if (spec_.jacobian_mode == JacobianMode::Analytic && !model_.h_jacobian)
            spec_.jacobian_mode = JacobianMode::FiniteDifference;
        spec_.adapt.validate();
    }

    const SqrtBelief& belief() const { return belief_; }
    const StateSpaceModel& model() const { return model_; }
    const FilterSpec& spec() const { return spec_; }
    GciParams current_gci() const { return kernel_.gci_params; }
    int divergence_count() const { return divergences_; }

    StepDiagnostics step(const Vec& z) {
        if (z.size() != model_.meas_dim)
            throw std::invalid_argument("Filter::step: measurement dimension mismatch");
        if (!z.allFinite())
            throw std::invalid_argument("Filter::step: non-finite measurement");
        try {
            switch (spec_.kind) {
                case FilterKind::Ukf: return step_moment(z, /*iterated=*/false);
                case FilterKind::Iukf: return step_moment(z, /*iterated=*/true);
                case FilterKind::MccUkf: return step_moment(z, /*iterated=*/true);
                case FilterKind::SrUkf: return step_sr_plain(z);
                case FilterKind::SrCiIukf:
                case FilterKind::SrGciIukf:
                case FilterKind::SrGciIukfAdapt: return step_sr_robust(z);
            }
        } catch (const Error&) {
            return freeze_step();
        }
        throw Error("Filter::step: unreachable");
    }

  private:
    StateSpaceModel model_;
    FilterSpec spec_;
    SqrtBelief belief_;
    UpperTri sqrtW_;
    UpperTri sqrtV_;
    Kernel kernel_;
    std::deque<double> errwin_;
    int guard_count_ = 0;
    int divergences_ = 0;
    double last_win_var_ = -1.0;

    // ----- shared pieces ---------------------------------------------------

    StepDiagnostics freeze_step() {
        ++divergences_;
        StepDiagnostics d;
        d.divergence_flag = true;
        d.cov_min_diag = belief_.S.min_diag();
        return d;
    }

    /// Eigenvalue-floored re-factorization of a near-PD covariance.
    UpperTri fallback_refactor(Mat P) const {
        P = 0.5 * (P + P.transpose());
        const Index n = P.rows();
        const double tr = P.trace();
        if (!(tr > 0.0) || !P.allFinite())
            throw NotPositiveDefinite("fallback_refactor: covariance beyond repair");
        Eigen::SelfAdjointEigenSolver<Mat> es(P);
        const double floor = 1e-12 * tr / static_cast<double>(n);
        Vec ev = es.eigenvalues().cwiseMax(floor);
        Mat fixed = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
        fixed = 0.5 * (fixed + fixed.transpose());
        return cholesky_factor(fixed);
    }

    void accept(Vec x, UpperTri S, StepDiagnostics& d) {
        if (!x.allFinite())
            throw NonFiniteIterate("accept: non-finite state");
        d.cov_min_diag = S.min_diag();
        belief_ = SqrtBelief{std::move(x), std::move(S)};
    }

    bool guard_update(const Vec& z, const Vec& x_pred) {
        if (kernel_.is_uniform()) return false;
        const Vec s = tri_solve(sqrtV_, Vec(z - model_.h(x_pred)), Side::Left, true).cwiseAbs();
        Index discrepant = 0;
        for (Index i = 0; i < s.size(); ++i)
            if (s(i) > spec_.guard_sigma) ++discrepant;
        if (2 * discrepant >= s.size())
            ++guard_count_;
        else
            guard_count_ = 0;
        if (guard_count_ >= spec_.guard_persist) {
            guard_count_ = 0;
            return true;
        }
        return false;
    }

    void maybe_adapt() {
        if (spec_.kind != FilterKind::SrGciIukfAdapt) return;
        const auto& cfg = spec_.adapt;
        if (static_cast<int>(errwin_.size()) < std::max(cfg.min_samples, 2)) return;
        std::vector<double> win(errwin_.begin(), errwin_.end());
        if (cfg.trigger == AdaptConfig::Trigger::OnInnovationChange) {
            double mean = 0.0, var = 0.0;
            for (double e : win) mean += e;
            mean /= static_cast<double>(win.size());
            for (double e : win) var += (e - mean) * (e - mean);
            var /= static_cast<double>(win.size());
            if (last_win_var_ >= 0.0 &&
                std::abs(var - last_win_var_) <= cfg.trigger_threshold * last_win_var_)
                return;
            last_win_var_ = var;
        }
        kernel_.gci_params = adapt_parameters(win, cfg);
    }

    void push_window(const Vec& e) {
        if (spec_.kind != FilterKind::SrGciIukfAdapt) return;
        for (Index i = 0; i < e.size(); ++i) {
            errwin_.push_back(e(i));
            if (static_cast<int>(errwin_.size()) > spec_.adapt.window) errwin_.pop_front();
        }
    }

    /// Iterated weighted update shared by every robust path.  Returns the
    /// final iterate, gain, Jacobian and weights at the final gain
    /// evaluation; the caller forms the posterior factor.
    struct IrlsResult {
        Vec x;
        Mat K;
        Mat H;
        Vec tx;
        Vec tz;
    };

    IrlsResult irls_update(const SqrtBelief& pred, const Vec& z, bool uniform_weights,
                           const MeasStats& meas, StepDiagnostics& d) {
        const int n = model_.state_dim;
        RegressionFrame frame(pred, z, sqrtV_, model_.h);
        Vec x_t = pred.x;
        std::optional<Mat> gain;
        const bool trace_cost = kernel_.type == Kernel::Type::Gci;
        const int itmax = spec_.is_iterated() ? spec_.iter_max : 1;
        Mat H_last;
        Vec tx_last, tz_last;

        for (int t = 0; t < itmax; ++t) {
            Vec e = frame.residual(x_t);
            Vec tx, tz;
            if (uniform_weights || kernel_.is_uniform()) {
                tx = Vec::Ones(n);
                tz = Vec::Ones(e.size() - n);
            } else {
                // decay-only weights: the kernel's constant scale cancels in
                // the gain exactly
                tx.resize(n);
                tz.resize(e.size() - n);
                for (Index i = 0; i < n; ++i) tx(i) = kernel_.decay(e(i));
                for (Index i = n; i < e.size(); ++i) tz(i - n) = kernel_.decay(e(i));
                const double wmax = std::max(tx.maxCoeff(), tz.maxCoeff());
                const double wfloor = 1e-12 * wmax;
                tx = tx.cwiseMax(wfloor);
                tz = tz.cwiseMax(wfloor);
            }
            if (trace_cost) d.cost_trace.push_back(gci_cost(e, kernel_.gci_params));

            const Mat H = jacobian(model_, x_t, spec_.jacobian_mode, &pred, &meas);
            const Mat K = robust_gain(pred.S, H, tx, tz, sqrtV_);
            Vec x_next = pred.x + K * (z - model_.h(x_t) - H * (pred.x - x_t));
            if (!x_next.allFinite()) {
                if (!gain) throw NonFiniteIterate("irls_update: first iterate not finite");
                break; // keep the last finite iterate
            }
            gain = K;
            H_last = H;
            tx_last = tx;
            tz_last = tz;
            d.iterations_used = t + 1;
            const double rel =
                (x_next - x_t).norm() / std::max(x_t.norm(), 1e-300);
            x_t = x_next;
            if (rel <= spec_.iter_tol) break;
        }
        d.gain_norm = gain->norm();
        if (d.gain_norm > spec_.gain_ceiling)
            throw Error("irls_update: gain norm above ceiling");
        return IrlsResult{std::move(x_t), std::move(*gain), std::move(H_last),
                          std::move(tx_last), std::move(tz_last)};
    }

    /// Posterior factor by rank-1 downdates of the predicted factor with the
    /// columns of K D^T; falls back to an eigenvalue-floored refactorization.
    /// Used by the plain square-root update, where the gain is the UT gain
    /// Pxz (D^T D)^-1 and the downdate is exact.
    UpperTri posterior_factor_sr(const SqrtBelief& pred, const Mat& K, const UpperTri& D) const {
        const Mat U = K * D.mat().transpose();
        try {
            UpperTri S = pred.S;
            for (Index j = 0; j < U.cols(); ++j)
                S = rank1_update(S, U.col(j), -1);
            return S;
        } catch (const DowndateBreaksPD&) {
            return fallback_refactor(pred.S.gram() - U * U.transpose());
        }
    }

    /// Posterior factor for the weighted iterated updates in Joseph form on
    /// the weighted covariances,
    ///   P' = (I - K H) S' (I - K H)^T + K V' K^T,
    /// with S' = S^T diag(1/tx) S and V' = sqrtV^T diag(1/tz) sqrtV — the
    /// exact posterior of the weighted regression the gain solves.  Built as
    /// one QR of the stacked scaled factors so positive definiteness holds
    /// by construction; reduces to the textbook posterior under uniform
    /// weights.  (Pairing the linearization-based gain with the unscented
    /// innovation factor in a plain downdate over-subtracts under strong
    /// nonlinearity and loses positive definiteness.)
    UpperTri posterior_factor_joseph(const SqrtBelief& pred, const Mat& K, const Mat& H,
                                     const Vec& tx, const Vec& tz) const {
        const Index n = pred.dim();
        const Index m = K.cols();
        Mat stack(n + m, n);
        const Mat At = (Mat::Identity(n, n) - K * H).transpose();
        stack.topRows(n) = pred.S.mat() * At;
        for (Index i = 0; i < n; ++i) stack.row(i) /= std::sqrt(tx(i));
        stack.bottomRows(m) = sqrtV_.mat() * K.transpose();
        for (Index i = 0; i < m; ++i) stack.row(n + i) /= std::sqrt(tz(i));
        return qr_triangularize(stack);
    }

    // ----- full-covariance family (UKF / IUKF / MCC-UKF) -------------------

    StepDiagnostics step_moment(const Vec& z, bool iterated) {
        StepDiagnostics d;
        const int n = model_.state_dim;
        auto [wm, wc] = make_weights(n, spec_.ut);

        // moment-form time update
        SigmaSet set = sigma_points(belief_, spec_.ut);
        Mat prop(n, 2 * n + 1);
        for (int i = 0; i < 2 * n + 1; ++i) {
            Vec y = model_.f(Vec(set.points.col(i)));
            if (!y.allFinite()) throw NonFiniteDynamics("step: dynamics not finite");
            prop.col(i) = y;
        }
        Vec xp = Vec::Zero(n);
        for (int i = 0; i < 2 * n + 1; ++i) xp += wm(i) * prop.col(i);
        Mat Pp = model_.W;
        for (int i = 0; i < 2 * n + 1; ++i) {
            const Vec dev = prop.col(i) - xp;
            Pp += wc(i) * dev * dev.transpose();
        }
        Pp = 0.5 * (Pp + Pp.transpose());
        SqrtBelief pred{xp, cholesky_factor(Pp)};

        if (!iterated) {
            // moment-form UT measurement update
            const int m = model_.meas_dim;
            SigmaSet mset = sigma_points(pred, spec_.ut);
            Mat zs(m, 2 * n + 1);
            for (int i = 0; i < 2 * n + 1; ++i) {
                Vec zi = model_.h(Vec(mset.points.col(i)));
                if (!zi.allFinite()) throw NonFiniteMeasurement("step: h not finite");
                zs.col(i) = zi;
            }
            Vec zhat = Vec::Zero(m);
            for (int i = 0; i < 2 * n + 1; ++i) zhat += wm(i) * zs.col(i);
            Mat Pzz = model_.V;
            Mat Pxz = Mat::Zero(n, m);
            for (int i = 0; i < 2 * n + 1; ++i) {
                const Vec dz = zs.col(i) - zhat;
                Pzz += wc(i) * dz * dz.transpose();
                Pxz += wc(i) * (mset.points.col(i) - pred.x) * dz.transpose();
            }
            Pzz = 0.5 * (Pzz + Pzz.transpose());
            const UpperTri Cz = cholesky_factor(Pzz);
            Mat Kt = tri_solve(Cz, tri_solve(Cz, Mat(Pxz.transpose()), Side::Left, true),
                               Side::Left, false);
            const Mat K = Kt.transpose();
            Vec x_post = pred.x + K * (z - zhat);
            Mat P_post = Pp - K * Pzz * K.transpose();
            d.iterations_used = 1;
            d.gain_norm = K.norm();
            UpperTri S_post = [&] {
                try {
                    return cholesky_factor(0.5 * (P_post + P_post.transpose()));
                } catch (const NotPositiveDefinite&) {
                    return fallback_refactor(P_post);
                }
            }();
            accept(std::move(x_post), std::move(S_post), d);
            return d;
        }

        MeasStats meas = sr_measure(pred, model_.h, sqrtV_, spec_.ut);
        const bool uniform = guard_update(z, pred.x);
        d.guard_engaged = uniform;
        IrlsResult res = irls_update(pred, z, uniform, meas, d);
        const Mat A = Mat::Identity(n, n) - res.K * res.H;
        Mat Sx = pred.S.mat();
        for (int i = 0; i < n; ++i) Sx.row(i) /= std::sqrt(res.tx(i));
        Mat Sv = sqrtV_.mat();
        for (Index i = 0; i < Sv.rows(); ++i) Sv.row(i) /= std::sqrt(res.tz(i));
        Mat P_post = A * (Sx.transpose() * Sx) * A.transpose() +
                     res.K * (Sv.transpose() * Sv) * res.K.transpose();
        UpperTri S_post = [&] {
            try {
                return cholesky_factor(0.5 * (P_post + P_post.transpose()));
            } catch (const NotPositiveDefinite&) {
                return fallback_refactor(P_post);
            }
        }();
        accept(std::move(res.x), std::move(S_post), d);
        return d;
    }

    // ----- square-root family ----------------------------------------------

    StepDiagnostics step_sr_plain(const Vec& z) {
        StepDiagnostics d;
        SqrtBelief pred = sr_predict(belief_, model_.f, sqrtW_, spec_.ut);
        MeasStats meas = sr_measure(pred, model_.h, sqrtV_, spec_.ut);
        Mat Kt = tri_solve(meas.D, tri_solve(meas.D, Mat(meas.Pxz.transpose()), Side::Left, true),
                           Side::Left, false);
        const Mat K = Kt.transpose();
        Vec x_post = pred.x + K * (z - meas.zhat);
        d.iterations_used = 1;
        d.gain_norm = K.norm();
        UpperTri S_post = posterior_factor_sr(pred, K, meas.D);
        accept(std::move(x_post), std::move(S_post), d);
        return d;
    }

    StepDiagnostics step_sr_robust(const Vec& z) {
        StepDiagnostics d;
        SqrtBelief pred = sr_predict(belief_, model_.f, sqrtW_, spec_.ut);
        MeasStats meas = sr_measure(pred, model_.h, sqrtV_, spec_.ut);

        maybe_adapt();
        const bool uniform = guard_update(z, pred.x);
        d.guard_engaged = uniform;

        IrlsResult res = irls_update(pred, z, uniform, meas, d);
        UpperTri S_post = posterior_factor_joseph(pred, res.K, res.H, res.tx, res.tz);

        RegressionFrame frame(pred, z, sqrtV_, model_.h);
        push_window(frame.residual(res.x));

        accept(std::move(res.x), std::move(S_post), d);
        return d;
    }
};

} // namespace gcikf
