// Generalized-correntropy loss family: cost, IRLS weights, filter kernel
// weights, and information-potential parameter adaptation.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gcikf/linalg.hpp"

namespace gcikf {

struct InsufficientSamples : Error { using Error::Error; };

namespace detail {

/// Gamma function via the Lanczos approximation (g = 7, 9 coefficients).
/// Relative error stays below 1e-13 over the arguments this library uses.
inline double lanczos_gamma(double x) {
    static constexpr double coeffs[] = {
        0.99999999999980993,  676.5203681218851,    -1259.1392167224028,
        771.32342877765313,   -176.61502916214059,  12.507343278686905,
        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    if (x < 0.5) {
        // reflection
        return std::numbers::pi / (std::sin(std::numbers::pi * x) * lanczos_gamma(1.0 - x));
    }
    x -= 1.0;
    double a = coeffs[0];
    const double t = x + 7.5;
    for (int i = 1; i < 9; ++i) a += coeffs[i] / (x + i);
    return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, x + 0.5) * std::exp(-t) * a;
}

/// exp(-u) with the argument capped so the result never underflows to an
/// exact denormal/zero surprise inside weight ratios.
inline double exp_neg(double u) { return std::exp(-std::min(u, 700.0)); }

} // namespace detail

/// Shape delta and scale theta of the generalized-correntropy kernel, with
/// kernel factor phi = 1/theta and normalizer mu = delta / (2 theta Gamma(1/delta)).
struct GciParams {
    double delta = 2.0;
    double theta = 1.0;

    GciParams() = default;
    GciParams(double d, double t) : delta(d), theta(t) {
        if (!(delta > 0.0) || !(theta > 0.0))
            throw std::invalid_argument("GciParams: delta and theta must be positive");
    }

    double phi() const { return 1.0 / theta; }
    double mu() const { return delta / (2.0 * theta * detail::lanczos_gamma(1.0 / delta)); }
};

/// Cost of Eq-style mu * sum_i (1 - exp(-phi |e_i|^delta)).  Zero iff e = 0,
/// monotone in each |e_i|, saturating at mu * len(e).
inline double gci_cost(const Vec& e, const GciParams& p) {
    if (!e.allFinite()) throw std::invalid_argument("gci_cost: non-finite residual");
    const double phi = p.phi();
    double acc = 0.0;
    for (Index i = 0; i < e.size(); ++i)
        acc += 1.0 - detail::exp_neg(phi * std::pow(std::abs(e(i)), p.delta));
    return p.mu() * acc;
}

/// Analytic gradient of gci_cost.
inline Vec gci_cost_gradient(const Vec& e, const GciParams& p) {
    const double phi = p.phi();
    Vec g(e.size());
    for (Index i = 0; i < e.size(); ++i) {
        const double a = std::abs(e(i));
        const double sgn = e(i) >= 0.0 ? 1.0 : -1.0;
        g(i) = p.mu() * p.delta * phi * std::pow(a, p.delta - 1.0) *
               detail::exp_neg(phi * std::pow(a, p.delta)) * sgn;
    }
    return g;
}

constexpr double kResidualFloor = 1e-8;

/// IRLS weight of the GCI loss:
///   mu * delta * phi * max(|e|, eps)^(delta-2) * exp(-phi |e|^delta).
/// The |e|^(delta-2) factor diverges at zero for delta < 2, so |e| is floored
/// at kResidualFloor in that factor only.
inline double irls_weight(double e, const GciParams& p) {
    const double a = std::abs(e);
    const double phi = p.phi();
    const double powfac = std::pow(std::max(a, kResidualFloor), p.delta - 2.0);
    return p.mu() * p.delta * phi * powfac * detail::exp_neg(phi * std::pow(a, p.delta));
}

/// Filtering kernel: which robust weight shapes the diagonal weight matrices.
///
/// The GCI filtering weight is the generalized-Gaussian kernel decay
///   w(e) = 2 mu phi exp(-phi |e|^delta),
/// i.e. the exact IRLS weight at delta = 2 carried to all shapes.  The
/// |e|^(delta-2) IRLS factor is deliberately not applied in the filter: it
/// blows up (delta < 2) or vanishes (delta > 2) on the exactly-consistent
/// first iterate and creates spurious fixed points in the iterated update.
struct Kernel {
    enum class Type { Gci, Ci, Mcc, Uniform };

    Type type = Type::Uniform;
    GciParams gci_params{};
    double sigma = 1.0;

    static Kernel gci(const GciParams& p) { return Kernel{Type::Gci, p, 1.0}; }
    static Kernel ci(double sigma) {
        if (!(sigma > 0.0)) throw std::invalid_argument("Kernel::ci: sigma must be positive");
        return Kernel{Type::Ci, GciParams{}, sigma};
    }
    static Kernel mcc(double sigma) {
        if (!(sigma > 0.0)) throw std::invalid_argument("Kernel::mcc: sigma must be positive");
        return Kernel{Type::Mcc, GciParams{}, sigma};
    }
    static Kernel uniform() { return Kernel{}; }

    bool is_uniform() const { return type == Type::Uniform; }

    /// Pure kernel decay exp(-u(e)) with unit value at zero residual.  The
    /// filter gain is invariant to a uniform weight scale, so the engines
    /// weight with the decay alone; GCI at delta = 2 and CI at sigma^2 =
    /// theta then run through bit-identical arithmetic.
    double decay(double e) const {
        switch (type) {
            case Type::Gci:
                return detail::exp_neg(std::pow(std::abs(e), gci_params.delta) /
                                       gci_params.theta);
            case Type::Ci:
                return detail::exp_neg(e * e / (sigma * sigma));
            case Type::Mcc:
                return detail::exp_neg(e * e / (2.0 * sigma * sigma));
            case Type::Uniform:
                return 1.0;
        }
        return 1.0;
    }

    /// Constant in front of the decay; for GCI this is the delta = 2 IRLS
    /// prefactor 2 mu phi carried to all shapes.
    double scale() const {
        if (type == Type::Gci) return 2.0 * gci_params.mu() * gci_params.phi();
        return 1.0;
    }

    double weight(double e) const { return scale() * decay(e); }
};

/// Diagonal weights of the stacked residual, split into the state block
/// (first n entries) and measurement block (rest).
inline std::pair<Vec, Vec> weight_matrices(const Vec& e, Index n_state, const Kernel& k) {
    if (n_state < 0 || n_state > e.size())
        throw std::invalid_argument("weight_matrices: bad split");
    Vec tx(n_state), tz(e.size() - n_state);
    for (Index i = 0; i < n_state; ++i) tx(i) = k.weight(e(i));
    for (Index i = n_state; i < e.size(); ++i) tz(i - n_state) = k.weight(e(i));
    return {std::move(tx), std::move(tz)};
}

/// Information-potential objective T = Q - V/2 with
///   Q = (1/N) sum_i q(e_i),   V = (1/N^2) sum_ij q(e_i - e_j),
/// q the per-sample GCI kernel q(e) = mu (1 - exp(-phi |e|^delta)).
inline double ip_objective(std::span<const double> errors, double delta, double theta) {
    if (errors.size() < 2)
        throw InsufficientSamples("ip_objective: need at least 2 samples");
    const GciParams p(delta, theta);
    const double phi = p.phi();
    const double mu = p.mu();
    auto q = [&](double v) {
        return mu * (1.0 - detail::exp_neg(phi * std::pow(std::abs(v), delta)));
    };
    // Sums are evaluated over sorted samples so the result is bit-identical
    // under permutation of the input.
    std::vector<double> s(errors.begin(), errors.end());
    for (double e : s)
        if (!std::isfinite(e)) throw std::invalid_argument("ip_objective: non-finite sample");
    std::sort(s.begin(), s.end());
    const std::size_t n = s.size();
    double Q = 0.0;
    for (double e : s) Q += q(e);
    Q /= static_cast<double>(n);
    double V = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) V += q(s[i] - s[j]);
    V /= static_cast<double>(n) * static_cast<double>(n);
    return Q - 0.5 * V;
}

/// Grid sets and windowing for parameter adaptation.
struct AdaptConfig {
    std::vector<double> delta_grid;
    std::vector<double> theta_grid;
    int window = 50;
    int min_samples = 2;

    enum class Trigger { EveryStep, OnInnovationChange };
    Trigger trigger = Trigger::EveryStep;
    double trigger_threshold = 0.5; // relative change of windowed residual variance

    static std::vector<double> linspace(double lo, double hi, double step) {
        std::vector<double> out;
        for (double v = lo; v <= hi + 1e-9; v += step) out.push_back(v);
        return out;
    }

    static AdaptConfig defaults() {
        AdaptConfig c;
        c.delta_grid = linspace(1.0, 3.0, 0.2);
        c.theta_grid = linspace(5.0, 25.0, 2.5);
        return c;
    }

    void validate() const {
        if (delta_grid.empty() || theta_grid.empty())
            throw std::invalid_argument("AdaptConfig: grids must be nonempty");
        if (window < 2) throw std::invalid_argument("AdaptConfig: window must be >= 2");
    }
};

namespace detail {

/// Average log-density of the generalized-Gaussian kernel at (delta, theta):
/// log mu_d - mean(|e|^delta)/theta with the proper density normalizer
/// mu_d = delta / (2 theta^(1/delta) Gamma(1/delta)).
inline double gg_logscore(std::span<const double> errors, double delta, double theta) {
    double m = 0.0;
    for (double e : errors) m += std::pow(std::abs(e), delta);
    m /= static_cast<double>(errors.size());
    const double logmu = std::log(delta) -
                         std::log(2.0 * std::pow(theta, 1.0 / delta) * lanczos_gamma(1.0 / delta));
    return logmu - m / theta;
}

} // namespace detail

/// Pick (delta, theta) on the configured grids by maximizing the
/// generalized-Gaussian fit score of the error samples; ties break toward
/// the smaller grid values (ascending scan with strict improvement).
inline GciParams adapt_parameters(std::span<const double> errors, const AdaptConfig& cfg) {
    cfg.validate();
    if (static_cast<int>(errors.size()) < std::max(cfg.min_samples, 2))
        throw InsufficientSamples("adapt_parameters: not enough error samples");
    for (double e : errors)
        if (!std::isfinite(e))
            throw std::invalid_argument("adapt_parameters: non-finite sample");

    double best = -std::numeric_limits<double>::infinity();
    double bd = cfg.delta_grid.front(), bt = cfg.theta_grid.front();
    for (double d : cfg.delta_grid) {
        for (double t : cfg.theta_grid) {
            const double s = detail::gg_logscore(errors, d, t);
            if (s > best) {
                best = s;
                bd = d;
                bt = t;
            }
        }
    }
    return GciParams(bd, bt);
}

} // namespace gcikf
