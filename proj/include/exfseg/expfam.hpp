#pragma once

#include <array>
#include <cstdint>

#include "exfseg/errors.hpp"
#include "exfseg/grid.hpp"
#include "exfseg/rng.hpp"

namespace exfseg {

enum class Family { Gaussian, Poisson, Rayleigh };

const char* family_name(Family f);
Family family_from_name(const std::string& name);

/// Parameter / statistic vector for families with k <= 2. Only the
/// first k entries are meaningful; k comes from the model.
using Vec2 = std::array<double, 2>;

inline double dot(const Vec2& a, const Vec2& b, int k) {
    double s = a[0] * b[0];
    if (k > 1) s += a[1] * b[1];
    return s;
}

/// A member of the canonical exponential family:
///   p(y, eta) = h(y) exp(<eta, T(y)> - A(eta)),  y in the support.
/// The triplet (T, A, h) plus the mean map grad A and its inverse psi
/// fully describe one member. Instances are stateless.
class ExpFamilyModel {
public:
    virtual ~ExpFamilyModel() = default;

    virtual Family family() const = 0;
    virtual int k() const = 0;

    virtual bool in_support(double y) const = 0;
    /// Nearest usable value inside the support; lets the evolution engine
    /// evaluate a model on data generated under a different law.
    virtual double clamp_to_support(double y) const = 0;

    virtual Vec2 sufficient_stat(double y) const = 0; // T(y)
    virtual double log_carrier(double y) const = 0;   // log h(y)

    virtual bool valid_natural(const Vec2& eta) const = 0;
    virtual double log_normalizer(const Vec2& eta) const = 0; // A(eta)
    virtual Vec2 mean_param(const Vec2& eta) const = 0;       // grad A(eta) = E[T(Y)]
    virtual Vec2 natural_param(const Vec2& mu) const = 0;     // psi(mu)
    virtual bool valid_mean(const Vec2& mu) const = 0;        // mu in image of grad A

    virtual double sample(const Vec2& eta, Rng& rng) const = 0;

    double log_pdf(double y, const Vec2& eta) const;
    void check_natural(const Vec2& eta) const;

    const char* name() const { return family_name(family()); }
};

/// Stateless singleton per family.
const ExpFamilyModel& model_for(Family f);

// Conversions between the usual parameters and the natural ones.
Vec2 rayleigh_natural(double theta);          // eta = -1/(2 theta^2)
Vec2 poisson_natural(double lambda);          // eta = log lambda
Vec2 gaussian_natural(double mu, double var); // eta = (mu/var, -1/(2 var))
double rayleigh_theta(const Vec2& eta);
double poisson_lambda(const Vec2& eta);
double gaussian_mean(const Vec2& eta);
double gaussian_var(const Vec2& eta);

enum class EstimatorKind { ML, MomentsRayleigh };

/// Floors applied when a region degenerates (constant intensity);
/// derived from global image statistics.
struct MomentFloors {
    double var_floor = 1e-12;     // Gaussian sample variance
    double mean_floor = 1e-12;    // Poisson mean, Rayleigh mean of y
    double mean_sq_floor = 1e-12; // Rayleigh mean of y^2

    static MomentFloors from_field(const ScalarField& field);
};

/// Per-region sufficient-statistic accumulators plus the fitted
/// natural parameter.
struct RegionEstimate {
    Vec2 sum_T{0.0, 0.0};
    long long count = 0;
    double sum_y = 0.0;
    double sum_y2 = 0.0;
    double sum_log_h = 0.0;
    Vec2 eta_hat{0.0, 0.0};
    EstimatorKind estimator = EstimatorKind::ML;
    double theta_mo = 0.0; // populated for MomentsRayleigh

    double mean_y() const { return sum_y / static_cast<double>(count); }
    double mean_y2() const { return sum_y2 / static_cast<double>(count); }

    void add(const ExpFamilyModel& model, double y) {
        Vec2 t = model.sufficient_stat(y);
        sum_T[0] += t[0];
        sum_T[1] += t[1];
        sum_y += y;
        sum_y2 += y * y;
        sum_log_h += model.log_carrier(y);
        ++count;
    }
};

/// eta_hat = psi(sum_T / count); unique in-region likelihood maximizer.
Vec2 ml_estimate(const ExpFamilyModel& model, const Vec2& sum_T, long long count);

/// Same map with degenerate moments floored instead of throwing.
Vec2 ml_estimate_floored(const ExpFamilyModel& model, const Vec2& sum_T,
                         long long count, const MomentFloors& floors);

/// Rayleigh moments estimator: theta = sqrt(2/pi) * mean(y).
double moments_estimate_rayleigh(double sum_y, long long count);

} // namespace exfseg
