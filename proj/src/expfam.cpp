#include "exfseg/expfam.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace exfseg {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kRayleighSupportEps = 1e-8;
} // namespace

const char* family_name(Family f) {
    switch (f) {
        case Family::Gaussian: return "gauss";
        case Family::Poisson: return "poisson";
        case Family::Rayleigh: return "rayleigh";
    }
    return "?";
}

Family family_from_name(const std::string& name) {
    if (name == "gauss" || name == "gaussian") return Family::Gaussian;
    if (name == "poisson") return Family::Poisson;
    if (name == "rayleigh") return Family::Rayleigh;
    throw ParameterError("unknown family name: " + name);
}

double ExpFamilyModel::log_pdf(double y, const Vec2& eta) const {
    if (!in_support(y))
        throw SupportError(std::string(name()) + ": value outside support: " +
                           std::to_string(y));
    check_natural(eta);
    return log_carrier(y) + dot(eta, sufficient_stat(y), k()) - log_normalizer(eta);
}

void ExpFamilyModel::check_natural(const Vec2& eta) const {
    if (!valid_natural(eta))
        throw ParameterError(std::string(name()) +
                             ": natural parameter outside the open parameter space");
}

// ---------------------------------------------------------------------------
// Gaussian, k = 2: eta = (mu/var, -1/(2 var)), T(y) = (y, y^2), h = 1.
// A(eta) = -eta1^2/(4 eta2) + 0.5 log(2 pi) - 0.5 log(-2 eta2).

class GaussianModel final : public ExpFamilyModel {
public:
    Family family() const override { return Family::Gaussian; }
    int k() const override { return 2; }

    bool in_support(double y) const override { return std::isfinite(y); }
    double clamp_to_support(double y) const override { return y; }

    Vec2 sufficient_stat(double y) const override {
        if (!in_support(y)) throw SupportError("gauss: non-finite value");
        return {y, y * y};
    }
    double log_carrier(double) const override { return 0.0; }

    bool valid_natural(const Vec2& eta) const override {
        return std::isfinite(eta[0]) && std::isfinite(eta[1]) && eta[1] < 0.0;
    }
    double log_normalizer(const Vec2& eta) const override {
        return -eta[0] * eta[0] / (4.0 * eta[1]) + 0.5 * std::log(2.0 * kPi) -
               0.5 * std::log(-2.0 * eta[1]);
    }
    Vec2 mean_param(const Vec2& eta) const override {
        double var = -1.0 / (2.0 * eta[1]);
        double mu = eta[0] * var;
        return {mu, mu * mu + var};
    }
    Vec2 natural_param(const Vec2& mu) const override {
        double var = mu[1] - mu[0] * mu[0];
        if (!(var > 0.0))
            throw DegenerateRegionError("gauss: non-positive sample variance");
        return {mu[0] / var, -1.0 / (2.0 * var)};
    }
    bool valid_mean(const Vec2& mu) const override {
        return mu[1] - mu[0] * mu[0] > 0.0;
    }

    double sample(const Vec2& eta, Rng& rng) const override {
        check_natural(eta);
        double var = -1.0 / (2.0 * eta[1]);
        double mu = eta[0] * var;
        // Box-Muller; the sine companion draw is discarded to keep the
        // generator state a pure function of the call count.
        double u1 = rng.uniform01();
        double u2 = rng.uniform01();
        double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
        return mu + std::sqrt(var) * z;
    }
};

// ---------------------------------------------------------------------------
// Poisson, k = 1: eta = log lambda, T(y) = y, A = exp(eta), h = 1/y!.
// Continuous-valued fields are rounded to the nearest integer at evaluation.

class PoissonModel final : public ExpFamilyModel {
public:
    Family family() const override { return Family::Poisson; }
    int k() const override { return 1; }

    bool in_support(double y) const override {
        return std::isfinite(y) && std::round(y) >= 0.0;
    }
    double clamp_to_support(double y) const override {
        return std::max(0.0, std::round(y));
    }

    Vec2 sufficient_stat(double y) const override {
        if (!in_support(y)) throw SupportError("poisson: negative value");
        return {std::round(y), 0.0};
    }
    double log_carrier(double y) const override {
        return -std::lgamma(std::round(y) + 1.0);
    }

    bool valid_natural(const Vec2& eta) const override { return std::isfinite(eta[0]); }
    double log_normalizer(const Vec2& eta) const override { return std::exp(eta[0]); }
    Vec2 mean_param(const Vec2& eta) const override { return {std::exp(eta[0]), 0.0}; }
    Vec2 natural_param(const Vec2& mu) const override {
        if (!(mu[0] > 0.0))
            throw DegenerateRegionError("poisson: non-positive sample mean");
        return {std::log(mu[0]), 0.0};
    }
    bool valid_mean(const Vec2& mu) const override { return mu[0] > 0.0; }

    double sample(const Vec2& eta, Rng& rng) const override {
        check_natural(eta);
        double lambda = std::exp(eta[0]);
        if (lambda <= 30.0) return sample_knuth(lambda, rng);
        return sample_ptrs(lambda, rng);
    }

private:
    // Knuth's product-of-uniforms method; O(lambda) per draw.
    static double sample_knuth(double lambda, Rng& rng) {
        double limit = std::exp(-lambda);
        double prod = 1.0;
        long long n = -1;
        do {
            prod *= rng.uniform01();
            ++n;
        } while (prod > limit);
        return static_cast<double>(n);
    }

    // Hormann's transformed rejection (PTRS); uses only uniform draws.
    static double sample_ptrs(double lambda, Rng& rng) {
        double log_lambda = std::log(lambda);
        double b = 0.931 + 2.53 * std::sqrt(lambda);
        double a = -0.059 + 0.02483 * b;
        double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        double v_r = 0.9277 - 3.6224 / (b - 2.0);
        for (;;) {
            double u = rng.uniform01() - 0.5;
            double v = rng.uniform01();
            double us = 0.5 - std::abs(u);
            double kf = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
            if (us >= 0.07 && v <= v_r) return kf;
            if (kf < 0.0 || (us < 0.013 && v > us)) continue;
            if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
                kf * log_lambda - lambda - std::lgamma(kf + 1.0))
                return kf;
        }
    }
};

// ---------------------------------------------------------------------------
// Rayleigh, k = 1: eta = -1/(2 theta^2), T(y) = y^2, A = -log(-2 eta),
// h(y) = y; this reproduces p(y) = (y/theta^2) exp(-y^2 / (2 theta^2)).

class RayleighModel final : public ExpFamilyModel {
public:
    Family family() const override { return Family::Rayleigh; }
    int k() const override { return 1; }

    bool in_support(double y) const override { return std::isfinite(y) && y > 0.0; }
    double clamp_to_support(double y) const override {
        return std::max(y, kRayleighSupportEps);
    }

    Vec2 sufficient_stat(double y) const override {
        if (!in_support(y)) throw SupportError("rayleigh: non-positive value");
        return {y * y, 0.0};
    }
    double log_carrier(double y) const override { return std::log(y); }

    bool valid_natural(const Vec2& eta) const override {
        return std::isfinite(eta[0]) && eta[0] < 0.0;
    }
    double log_normalizer(const Vec2& eta) const override {
        return -std::log(-2.0 * eta[0]);
    }
    Vec2 mean_param(const Vec2& eta) const override { return {-1.0 / eta[0], 0.0}; }
    Vec2 natural_param(const Vec2& mu) const override {
        if (!(mu[0] > 0.0))
            throw DegenerateRegionError("rayleigh: non-positive mean of y^2");
        return {-1.0 / mu[0], 0.0};
    }
    bool valid_mean(const Vec2& mu) const override { return mu[0] > 0.0; }

    double sample(const Vec2& eta, Rng& rng) const override {
        check_natural(eta);
        double theta = std::sqrt(-1.0 / (2.0 * eta[0]));
        return theta * std::sqrt(-2.0 * std::log(rng.uniform01()));
    }
};

// ---------------------------------------------------------------------------

const ExpFamilyModel& model_for(Family f) {
    static const GaussianModel gauss;
    static const PoissonModel poisson;
    static const RayleighModel rayleigh;
    switch (f) {
        case Family::Gaussian: return gauss;
        case Family::Poisson: return poisson;
        case Family::Rayleigh: return rayleigh;
    }
    throw ParameterError("unknown family");
}

Vec2 rayleigh_natural(double theta) {
    if (!(theta > 0.0)) throw ParameterError("rayleigh: theta must be positive");
    return {-1.0 / (2.0 * theta * theta), 0.0};
}
Vec2 poisson_natural(double lambda) {
    if (!(lambda > 0.0)) throw ParameterError("poisson: lambda must be positive");
    return {std::log(lambda), 0.0};
}
Vec2 gaussian_natural(double mu, double var) {
    if (!(var > 0.0)) throw ParameterError("gauss: variance must be positive");
    return {mu / var, -1.0 / (2.0 * var)};
}
double rayleigh_theta(const Vec2& eta) { return std::sqrt(-1.0 / (2.0 * eta[0])); }
double poisson_lambda(const Vec2& eta) { return std::exp(eta[0]); }
double gaussian_var(const Vec2& eta) { return -1.0 / (2.0 * eta[1]); }
double gaussian_mean(const Vec2& eta) { return eta[0] * gaussian_var(eta); }

MomentFloors MomentFloors::from_field(const ScalarField& field) {
    double s1 = 0.0, s2 = 0.0;
    for (double v : field.data) {
        s1 += v;
        s2 += v * v;
    }
    double n = static_cast<double>(field.size());
    double mean = s1 / n;
    double mean_sq = s2 / n;
    double var = std::max(mean_sq - mean * mean, 0.0);
    MomentFloors floors;
    floors.var_floor = std::max(1e-6 * var, 1e-12);
    floors.mean_floor = std::max(1e-6 * std::abs(mean), 1e-12);
    floors.mean_sq_floor = std::max(1e-6 * mean_sq, 1e-12);
    return floors;
}

Vec2 ml_estimate(const ExpFamilyModel& model, const Vec2& sum_T, long long count) {
    if (count < model.k())
        throw DegenerateRegionError("ml_estimate: fewer pixels than parameters");
    double inv = 1.0 / static_cast<double>(count);
    Vec2 mu{sum_T[0] * inv, sum_T[1] * inv};
    return model.natural_param(mu);
}

Vec2 ml_estimate_floored(const ExpFamilyModel& model, const Vec2& sum_T,
                         long long count, const MomentFloors& floors) {
    if (count < 1)
        throw DegenerateRegionError("ml_estimate_floored: empty region");
    double inv = 1.0 / static_cast<double>(std::max<long long>(count, model.k()));
    Vec2 mu{sum_T[0] * inv, sum_T[1] * inv};
    switch (model.family()) {
        case Family::Gaussian: {
            double var = mu[1] - mu[0] * mu[0];
            if (var < floors.var_floor) mu[1] = mu[0] * mu[0] + floors.var_floor;
            break;
        }
        case Family::Poisson:
            mu[0] = std::max(mu[0], floors.mean_floor);
            break;
        case Family::Rayleigh:
            mu[0] = std::max(mu[0], floors.mean_sq_floor);
            break;
    }
    return model.natural_param(mu);
}

double moments_estimate_rayleigh(double sum_y, long long count) {
    if (count < 1) throw DegenerateRegionError("rayleigh moments: empty region");
    if (!(sum_y > 0.0))
        throw DegenerateRegionError("rayleigh moments: non-positive sample mean");
    return std::sqrt(2.0 / kPi) * (sum_y / static_cast<double>(count));
}

} // namespace exfseg
