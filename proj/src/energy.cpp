#include "exfseg/energy.hpp"

#include <cmath>

namespace exfseg {

namespace {
constexpr double kPi = 3.14159265358979323846;
} // namespace

double region_neg_loglik(const ScalarField& field, const BoolGrid& mask,
                         const ExpFamilyModel& model, const RegionEstimate& estimate) {
    double acc = 0.0;
    for (int y = 0; y < field.height; ++y)
        for (int x = 0; x < field.width; ++x)
            if (mask.at(x, y)) acc -= model.log_pdf(field.at(x, y), estimate.eta_hat);
    return acc;
}

double region_neg_loglik_from_sums(const ExpFamilyModel& model,
                                   const RegionEstimate& estimate) {
    double n = static_cast<double>(estimate.count);
    return -(estimate.sum_log_h + dot(estimate.eta_hat, estimate.sum_T, model.k()) -
             n * model.log_normalizer(estimate.eta_hat));
}

double speed_ml(double y, const Vec2& eta_in, const Vec2& eta_out,
                const ExpFamilyModel& model) {
    if (!model.in_support(y))
        throw SupportError(std::string(model.name()) + ": value outside support");
    model.check_natural(eta_in);
    model.check_natural(eta_out);
    Vec2 t = model.sufficient_stat(y);
    Vec2 d{eta_in[0] - eta_out[0], eta_in[1] - eta_out[1]};
    return dot(d, t, model.k()) - model.log_normalizer(eta_in) +
           model.log_normalizer(eta_out);
}

double rayleigh_moment_correction(double y, double mean_y, double mean_y2) {
    if (!(mean_y > 0.0))
        throw DegenerateRegionError("moment correction: non-positive mean");
    double ratio = mean_y2 / (mean_y * mean_y);
    return (2.0 - 0.5 * kPi * ratio) * (1.0 - y / mean_y);
}

double speed_chan_vese(double y, double c_in, double c_out) {
    return (y - c_out) * (y - c_out) - (y - c_in) * (y - c_in);
}

double evolve_speed(const SpeedLaw& law, double y, const RegionEstimate& in,
                    const RegionEstimate& out) {
    switch (law.kind) {
        case SpeedLaw::Kind::MLLogLikelihood:
            return speed_ml(y, in.eta_hat, out.eta_hat, *law.model);
        case SpeedLaw::Kind::MomentsRayleigh: {
            double lp = speed_ml(y, in.eta_hat, out.eta_hat, *law.model);
            double corr_in = rayleigh_moment_correction(y, in.mean_y(), in.mean_y2());
            double corr_out = rayleigh_moment_correction(y, out.mean_y(), out.mean_y2());
            return lp + corr_in - corr_out;
        }
        case SpeedLaw::Kind::ChanVese:
            return speed_chan_vese(y, in.mean_y(), out.mean_y());
    }
    return 0.0;
}

double region_energy(const SpeedLaw& law, const RegionEstimate& estimate) {
    switch (law.kind) {
        case SpeedLaw::Kind::MLLogLikelihood:
        case SpeedLaw::Kind::MomentsRayleigh:
            return region_neg_loglik_from_sums(*law.model, estimate);
        case SpeedLaw::Kind::ChanVese: {
            double n = static_cast<double>(estimate.count);
            double c = estimate.mean_y();
            return estimate.sum_y2 - n * c * c;
        }
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Bhattacharyya distance

double bhattacharyya(const ExpFamilyModel& model, const Vec2& eta_f, const Vec2& eta_o) {
    model.check_natural(eta_f);
    model.check_natural(eta_o);
    switch (model.family()) {
        case Family::Poisson: {
            double lf = poisson_lambda(eta_f), lo = poisson_lambda(eta_o);
            double d = std::sqrt(lf) - std::sqrt(lo);
            return 0.5 * d * d;
        }
        case Family::Rayleigh: {
            double tf = rayleigh_theta(eta_f), to = rayleigh_theta(eta_o);
            return std::log((tf * tf + to * to) / (2.0 * tf * to));
        }
        case Family::Gaussian: {
            double mf = gaussian_mean(eta_f), vf = gaussian_var(eta_f);
            double mo = gaussian_mean(eta_o), vo = gaussian_var(eta_o);
            double dm = mf - mo;
            return dm * dm / (4.0 * (vf + vo)) +
                   0.5 * std::log((vf + vo) / (2.0 * std::sqrt(vf * vo)));
        }
    }
    throw ParameterError("bhattacharyya: unknown family");
}

namespace {

// Composite Simpson over [a, b] of sqrt(p_f p_o).
double simpson_sqrt_prod(const ExpFamilyModel& model, const Vec2& ef, const Vec2& eo,
                         double a, double b, int n) {
    if (n % 2 != 0) ++n;
    double h = (b - a) / n;
    auto g = [&](double y) {
        return std::exp(0.5 * (model.log_pdf(y, ef) + model.log_pdf(y, eo)));
    };
    double s = g(a) + g(b);
    for (int i = 1; i < n; ++i) s += g(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

} // namespace

double bhattacharyya_numeric(const ExpFamilyModel& model, const Vec2& eta_f,
                             const Vec2& eta_o) {
    model.check_natural(eta_f);
    model.check_natural(eta_o);
    switch (model.family()) {
        case Family::Poisson: {
            double lmax = std::max(poisson_lambda(eta_f), poisson_lambda(eta_o));
            int cutoff = static_cast<int>(std::ceil(lmax + 20.0 * std::sqrt(lmax))) + 20;
            double s = 0.0;
            for (int y = 0; y <= cutoff; ++y)
                s += std::exp(0.5 * (model.log_pdf(y, eta_f) + model.log_pdf(y, eta_o)));
            return -std::log(s);
        }
        case Family::Rayleigh: {
            double tmax = std::max(rayleigh_theta(eta_f), rayleigh_theta(eta_o));
            double lo = 1e-9, hi = 20.0 * tmax;
            return -std::log(simpson_sqrt_prod(model, eta_f, eta_o, lo, hi, 200000));
        }
        case Family::Gaussian: {
            double sf = std::sqrt(gaussian_var(eta_f)), so = std::sqrt(gaussian_var(eta_o));
            double smax = std::max(sf, so);
            double lo = std::min(gaussian_mean(eta_f), gaussian_mean(eta_o)) - 10.0 * smax;
            double hi = std::max(gaussian_mean(eta_f), gaussian_mean(eta_o)) + 10.0 * smax;
            return -std::log(simpson_sqrt_prod(model, eta_f, eta_o, lo, hi, 200000));
        }
    }
    throw ParameterError("bhattacharyya_numeric: unknown family");
}

} // namespace exfseg
