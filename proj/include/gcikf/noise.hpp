// Seeded generation of finite Gaussian/Laplace mixtures and their closed-form
// moments.  Reproducibility contract: identical (seed, stream_id) produce an
// identical sample sequence on every platform, so no std::*_distribution is
// used anywhere.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gcikf {

struct NoiseComponent {
    enum class Family { Gaussian, Laplace };
    double weight = 1.0;
    Family family = Family::Gaussian;
    double mean = 0.0;
    double variance = 1.0;
};

struct NoiseModel {
    std::vector<NoiseComponent> components;

    void validate() const {
        if (components.empty())
            throw std::invalid_argument("NoiseModel: no components");
        double wsum = 0.0;
        for (const auto& c : components) {
            if (!(c.weight > 0.0))
                throw std::invalid_argument("NoiseModel: weights must be positive");
            if (!(c.variance > 0.0))
                throw std::invalid_argument("NoiseModel: variances must be positive");
            wsum += c.weight;
        }
        if (std::abs(wsum - 1.0) > 1e-12)
            throw std::invalid_argument("NoiseModel: weights must sum to 1, got " +
                                        std::to_string(wsum));
    }

    static NoiseModel gaussian(double mean, double variance) {
        return NoiseModel{{{1.0, NoiseComponent::Family::Gaussian, mean, variance}}};
    }
};

/// Exact mixture mean and variance:
///   mean = sum w_i mu_i,  var = sum w_i (sigma_i^2 + mu_i^2) - mean^2.
inline std::pair<double, double> mixture_moments(const NoiseModel& m) {
    m.validate();
    double mean = 0.0, second = 0.0;
    for (const auto& c : m.components) {
        mean += c.weight * c.mean;
        second += c.weight * (c.variance + c.mean * c.mean);
    }
    return {mean, second - mean * mean};
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& s) {
    s += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace detail

/// Deterministic random stream keyed by (seed, stream_id).  Different
/// stream ids yield statistically independent sequences.
class SeededStream {
  public:
    SeededStream(std::uint64_t seed, std::uint64_t stream_id) {
        std::uint64_t s = seed;
        std::uint64_t a = detail::splitmix64(s);
        s ^= 0x6a09e667f3bcc909ULL + stream_id * 0x9e3779b97f4a7c15ULL;
        std::uint64_t b = detail::splitmix64(s);
        engine_.seed(a ^ (b << 1));
    }

    /// Uniform draw in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Standard normal via the Marsaglia polar method.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

    /// Standard Laplace (unit scale b = 1) via inverse CDF.
    double laplace() {
        const double u = uniform() - 0.5;
        return u >= 0.0 ? -std::log(1.0 - 2.0 * u) : std::log(1.0 + 2.0 * u);
    }

    /// One draw from a finite mixture: pick the component by weight, then
    /// sample it.  Laplace components are parameterized so their variance
    /// equals the stated variance (b = sqrt(var/2)).
    double sample(const NoiseModel& m) {
        const double u = uniform();
        double acc = 0.0;
        const NoiseComponent* chosen = &m.components.back();
        for (const auto& c : m.components) {
            acc += c.weight;
            if (u < acc) {
                chosen = &c;
                break;
            }
        }
        if (chosen->family == NoiseComponent::Family::Gaussian)
            return chosen->mean + std::sqrt(chosen->variance) * normal();
        return chosen->mean + std::sqrt(chosen->variance / 2.0) * laplace();
    }

  private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace gcikf
