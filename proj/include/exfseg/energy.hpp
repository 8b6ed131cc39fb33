#pragma once

#include <array>
#include <string>

#include "exfseg/expfam.hpp"
#include "exfseg/grid.hpp"

namespace exfseg {

/// Which boundary speed drives the contour.
struct SpeedLaw {
    enum class Kind { MLLogLikelihood, MomentsRayleigh, ChanVese };

    Kind kind = Kind::ChanVese;
    const ExpFamilyModel* model = nullptr; // null for ChanVese

    static SpeedLaw ml(Family family) {
        return SpeedLaw{Kind::MLLogLikelihood, &model_for(family)};
    }
    // The moments speed exists only for the Rayleigh family.
    static SpeedLaw moments_rayleigh() {
        return SpeedLaw{Kind::MomentsRayleigh, &model_for(Family::Rayleigh)};
    }
    static SpeedLaw chan_vese() { return SpeedLaw{Kind::ChanVese, nullptr}; }

    std::string name() const {
        switch (kind) {
            case Kind::MLLogLikelihood: return model->name();
            case Kind::MomentsRayleigh: return "rayleigh_mo";
            case Kind::ChanVese: return "chanvese";
        }
        return "?";
    }
};

/// Energy decomposition of one two-region configuration.
struct EnergyReport {
    std::array<double, 2> region_terms{0.0, 0.0}; // inner, outer
    double boundary_term = 0.0;                   // contour length estimate
    double lambda = 0.0;
    double total = 0.0;

    static EnergyReport make(double inner, double outer, double length, double lambda) {
        EnergyReport r;
        r.region_terms = {inner, outer};
        r.boundary_term = length;
        r.lambda = lambda;
        r.total = inner + outer + lambda * length;
        return r;
    }
};

/// -sum over masked pixels of log p(y(x), eta_hat).
double region_neg_loglik(const ScalarField& field, const BoolGrid& mask,
                         const ExpFamilyModel& model, const RegionEstimate& estimate);

/// Same quantity computed from the accumulators alone (no pixel pass):
/// -(sum_log_h + <eta, sum_T> - count * A(eta)).
double region_neg_loglik_from_sums(const ExpFamilyModel& model,
                                   const RegionEstimate& estimate);

/// Two-region descent speed under ML estimation:
/// log p(y, eta_in) - log p(y, eta_out). Carrier terms cancel.
double speed_ml(double y, const Vec2& eta_in, const Vec2& eta_out,
                const ExpFamilyModel& model);

/// Additive term of the Rayleigh moments-estimator boundary integrand:
/// A(y, R) = (2 - (pi/2) * mean_y2 / mean_y^2) * (1 - y / mean_y).
/// The full integrand is log p(y, theta_mo) + A(y, R).
double rayleigh_moment_correction(double y, double mean_y, double mean_y2);

/// Piecewise-constant two-phase baseline: (y - c_out)^2 - (y - c_in)^2.
double speed_chan_vese(double y, double c_in, double c_out);

/// Dispatch on the law; estimates must be fitted to the current regions.
double evolve_speed(const SpeedLaw& law, double y, const RegionEstimate& in,
                    const RegionEstimate& out);

/// Region energy matching the law being descended (negative log-likelihood
/// for model laws, sum of squared deviations for Chan-Vese).
double region_energy(const SpeedLaw& law, const RegionEstimate& estimate);

/// Bhattacharyya distance D = -log integral sqrt(p_f p_o), closed form.
double bhattacharyya(const ExpFamilyModel& model, const Vec2& eta_f, const Vec2& eta_o);

/// Quadrature / summation evaluation of the same integral; the oracle
/// the closed forms are validated against.
double bhattacharyya_numeric(const ExpFamilyModel& model, const Vec2& eta_f,
                             const Vec2& eta_o);

} // namespace exfseg
