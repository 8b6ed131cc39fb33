#include "exfseg/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace exfseg {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kMaxUpdate = 0.45; // CFL bound on the per-pixel phi update
constexpr int kConvergeStreak = 5;
// A band pixel advancing toward a sign flip slower than this per step cannot
// flip within any practical iteration budget; it does not block convergence.
constexpr double kMobileUpdate = 1e-3;
// A run that has not improved its best energy for this many steps is in a
// limit cycle (e.g. one boundary pixel flipping back and forth across the
// reinitialization schedule) and is treated as converged.
constexpr int kStagnationWindow = 100;

// 1D squared-distance transform (Felzenszwalb & Huttenlocher).
void edt_1d(const std::vector<double>& f, std::vector<double>& d, int n,
            std::vector<int>& v, std::vector<double>& z) {
    int k = 0;
    v[0] = 0;
    z[0] = -std::numeric_limits<double>::infinity();
    z[1] = std::numeric_limits<double>::infinity();
    for (int q = 1; q < n; ++q) {
        double s;
        for (;;) {
            s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
            if (s > z[k]) break;
            --k;
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = std::numeric_limits<double>::infinity();
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        d[q] = (q - v[k]) * (q - v[k]) + f[v[k]];
    }
}

// Exact squared Euclidean distance to the nearest seed pixel.
ScalarField edt_squared(const BoolGrid& seeds) {
    const double inf = 1e18;
    int w = seeds.width, h = seeds.height;
    ScalarField d(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            d.at(x, y) = seeds.at(x, y) ? 0.0 : inf;

    int n = std::max(w, h);
    std::vector<double> f(n), out(n), z(n + 1);
    std::vector<int> v(n);
    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y) f[y] = d.at(x, y);
        edt_1d(f, out, h, v, z);
        for (int y = 0; y < h; ++y) d.at(x, y) = out[y];
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) f[x] = d.at(x, y);
        edt_1d(f, out, w, v, z);
        for (int x = 0; x < w; ++x) d.at(x, y) = out[x];
    }
    return d;
}

} // namespace

ScalarField init_phi(const BoolGrid& mask) {
    size_t inside = mask.count_true();
    if (inside == 0 || inside == mask.size())
        throw std::invalid_argument("init_phi: mask must contain both regions");

    ScalarField d_to_in = edt_squared(mask);
    ScalarField d_to_out = edt_squared(mask.complement());
    ScalarField phi(mask.width, mask.height);
    // Boundary pixels land at +-0.5 so the zero crossing sits between the
    // innermost outside pixel and the outermost inside pixel.
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            phi.at(x, y) = mask.at(x, y) ? std::sqrt(d_to_out.at(x, y)) - 0.5
                                         : -(std::sqrt(d_to_in.at(x, y)) - 0.5);
    return phi;
}

double curvature(const ScalarField& phi, int x, int y) {
    double px = 0.5 * (phi.at(x + 1, y) - phi.at(x - 1, y));
    double py = 0.5 * (phi.at(x, y + 1) - phi.at(x, y - 1));
    double pxx = phi.at(x + 1, y) - 2.0 * phi.at(x, y) + phi.at(x - 1, y);
    double pyy = phi.at(x, y + 1) - 2.0 * phi.at(x, y) + phi.at(x, y - 1);
    double pxy = 0.25 * (phi.at(x + 1, y + 1) - phi.at(x + 1, y - 1) -
                         phi.at(x - 1, y + 1) + phi.at(x - 1, y - 1));
    double grad = std::max(std::sqrt(px * px + py * py), 1e-8);
    return (pxx * py * py - 2.0 * px * py * pxy + pyy * px * px) /
           (grad * grad * grad);
}

double heaviside_eps(double v, double eps) {
    if (v > eps) return 1.0;
    if (v < -eps) return 0.0;
    return 0.5 * (1.0 + v / eps + std::sin(kPi * v / eps) / kPi);
}

double dirac_eps(double v, double eps) {
    if (std::abs(v) > eps) return 0.0;
    return (1.0 + std::cos(kPi * v / eps)) / (2.0 * eps);
}

double contour_length(const ScalarField& phi, double eps) {
    double len = 0.0;
    for (int y = 0; y < phi.height; ++y) {
        for (int x = 0; x < phi.width; ++x) {
            // One-sided differences at the image border.
            int x0 = std::max(x - 1, 0), x1 = std::min(x + 1, phi.width - 1);
            int y0 = std::max(y - 1, 0), y1 = std::min(y + 1, phi.height - 1);
            double hx = (heaviside_eps(phi.at(x1, y), eps) -
                         heaviside_eps(phi.at(x0, y), eps)) /
                        (x1 - x0);
            double hy = (heaviside_eps(phi.at(x, y1), eps) -
                         heaviside_eps(phi.at(x, y0), eps)) /
                        (y1 - y0);
            len += std::sqrt(hx * hx + hy * hy);
        }
    }
    return len;
}

ScalarField reinitialize(const ScalarField& phi) {
    BoolGrid inside(phi.width, phi.height);
    size_t n_in = 0;
    for (int y = 0; y < phi.height; ++y)
        for (int x = 0; x < phi.width; ++x) {
            bool in = phi.at(x, y) > 0.0;
            inside.at(x, y) = in;
            n_in += in;
        }
    if (n_in == 0 || n_in == phi.size())
        throw std::invalid_argument("reinitialize: phi has a single sign");
    return init_phi(inside);
}

ScalarField adapt_field(const SpeedLaw& law, const ScalarField& field) {
    if (law.model == nullptr) return field;
    ScalarField out = field;
    for (double& v : out.data) v = law.model->clamp_to_support(v);
    return out;
}

namespace {

// Recompute the O(1) parameter estimates from the running sums.
void refresh_estimates(LevelSetState& state, const EvolveConfig& config,
                       const MomentFloors& floors) {
    const SpeedLaw& law = config.law;
    for (RegionEstimate* est : {&state.inner, &state.outer}) {
        if (est->count == 0) continue; // collapse handled by the caller
        if (law.kind == SpeedLaw::Kind::MLLogLikelihood) {
            est->estimator = EstimatorKind::ML;
            est->eta_hat = ml_estimate_floored(*law.model, est->sum_T, est->count, floors);
        } else if (law.kind == SpeedLaw::Kind::MomentsRayleigh) {
            est->estimator = EstimatorKind::MomentsRayleigh;
            double mean = std::max(est->mean_y(), floors.mean_floor);
            est->theta_mo = moments_estimate_rayleigh(
                mean * static_cast<double>(est->count), est->count);
            est->eta_hat = rayleigh_natural(est->theta_mo);
        }
    }
}

void accumulate(RegionEstimate& est, const SpeedLaw& law, double v) {
    if (law.model != nullptr) {
        est.add(*law.model, v);
    } else {
        est.sum_y += v;
        est.sum_y2 += v * v;
        ++est.count;
    }
}

void retract(RegionEstimate& est, const SpeedLaw& law, double v) {
    if (law.model != nullptr) {
        Vec2 t = law.model->sufficient_stat(v);
        for (int c = 0; c < law.model->k(); ++c) est.sum_T[c] -= t[c];
        est.sum_log_h -= law.model->log_carrier(v);
    }
    est.sum_y -= v;
    est.sum_y2 -= v * v;
    --est.count;
}

} // namespace

void fit_regions(LevelSetState& state, const ScalarField& field,
                 const EvolveConfig& config, const MomentFloors& floors) {
    state.inner = RegionEstimate{};
    state.outer = RegionEstimate{};
    for (int y = 0; y < field.height; ++y)
        for (int x = 0; x < field.width; ++x)
            accumulate(state.phi.at(x, y) > 0.0 ? state.inner : state.outer,
                       config.law, field.at(x, y));
    refresh_estimates(state, config, floors);
}

namespace {

EnergyReport current_energy(const LevelSetState& state, const EvolveConfig& config) {
    double inner = region_energy(config.law, state.inner);
    double outer = region_energy(config.law, state.outer);
    double len = contour_length(state.phi, config.epsilon);
    return EnergyReport::make(inner, outer, len, config.lambda);
}

} // namespace

LevelSetState init_state(const ScalarField& field, const BoolGrid& init_mask,
                         const EvolveConfig& config, const MomentFloors& floors) {
    if (field.width != init_mask.width || field.height != init_mask.height)
        throw std::invalid_argument("segment: field and mask dimensions differ");
    LevelSetState state;
    state.phi = init_phi(init_mask);
    fit_regions(state, field, config, floors);
    EnergyReport r = current_energy(state, config);
    state.reports.push_back(r);
    state.energy_trace.push_back(r.total);
    return state;
}

void evolve_step(LevelSetState& state, const ScalarField& field,
                 const EvolveConfig& config, const MomentFloors& floors) {
    if (state.status != RunStatus::Running) return;
    int w = field.width, h = field.height;
    const double eps = config.epsilon;

    // Pass 1: force F = speed + lambda * kappa in the Dirac band. A band
    // pixel whose update moves it toward the other sign fast enough to get
    // there is "pressure": the state is not stationary while any remain. The
    // CFL clamp is per pixel; a single outlier force must not freeze the
    // step for the whole grid.
    ScalarField update(w, h, 0.0);
    int pressure = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double p = state.phi.at(x, y);
            if (std::abs(p) > eps) continue;
            double f = evolve_speed(config.law, field.at(x, y), state.inner, state.outer);
            if (config.lambda > 0.0 && x > 0 && x < w - 1 && y > 0 && y < h - 1) {
                // Curvature beyond +-1/pixel is a discretization artifact
                // (degenerate |grad phi|) and would swamp the data speed.
                double kappa = std::clamp(curvature(state.phi, x, y), -1.0, 1.0);
                f += config.lambda * kappa;
            }
            double u = std::clamp(config.dt * dirac_eps(p, eps) * f, -kMaxUpdate,
                                  kMaxUpdate);
            update.at(x, y) = u;
            pressure += std::abs(u) >= kMobileUpdate && u * p < 0.0;
        }
    }

    // Pass 2: apply the banded update; flipped pixels move their contribution
    // between the two region accumulators, so re-estimation stays O(1).
    struct Flip {
        int x, y;
        double old_phi;
    };
    std::vector<Flip> flips;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double p = state.phi.at(x, y);
            if (std::abs(p) > eps) continue;
            double p_new = p + update.at(x, y);
            state.phi.at(x, y) = p_new;
            if ((p_new > 0.0) != (p > 0.0)) {
                flips.push_back({x, y, p});
                double v = field.at(x, y);
                RegionEstimate& from = p > 0.0 ? state.inner : state.outer;
                RegionEstimate& to = p > 0.0 ? state.outer : state.inner;
                retract(from, config.law, v);
                accumulate(to, config.law, v);
            }
        }
    }

    if (state.inner.count == 0 || state.outer.count == 0) {
        // Keep the pre-collapse configuration.
        for (const Flip& f : flips) {
            double v = field.at(f.x, f.y);
            RegionEstimate& from = f.old_phi > 0.0 ? state.outer : state.inner;
            RegionEstimate& to = f.old_phi > 0.0 ? state.inner : state.outer;
            retract(from, config.law, v);
            accumulate(to, config.law, v);
            state.phi.at(f.x, f.y) = f.old_phi;
        }
        state.status = RunStatus::Collapsed;
        return;
    }

    state.band_changes = static_cast<int>(flips.size());
    state.band_pressure = pressure;
    ++state.iter;
    refresh_estimates(state, config, floors);
    EnergyReport r = current_energy(state, config);
    state.reports.push_back(r);
    state.energy_trace.push_back(r.total);
}

SegmentResult segment(const ScalarField& field, const BoolGrid& init_mask,
                      const EvolveConfig& config) {
    ScalarField adapted = adapt_field(config.law, field);
    MomentFloors floors = MomentFloors::from_field(adapted);
    LevelSetState state = init_state(adapted, init_mask, config, floors);

    // Quiet means no sign flips and no band pixel still advancing toward the
    // other sign ("pressure"); the flip count alone cannot distinguish
    // convergence from sub-pixel creep. Reinitialization is skipped while no
    // sign has flipped since the last one: it would be a geometric no-op that
    // erases accumulated sub-pixel motion. A quiet streak with flips
    // outstanding forces one reinitialization so far pixels rejoin the band
    // before the run is declared converged.
    int quiet_steps = 0;
    bool flipped = false; // any sign change since the last reinitialization
    double best_energy = state.energy_trace.empty()
                             ? std::numeric_limits<double>::infinity()
                             : state.energy_trace.back();
    int best_iter = state.iter;
    while (state.status == RunStatus::Running && state.iter < config.max_iter) {
        bool due = state.iter > 0 && config.reinit_every > 0 &&
                   state.iter % config.reinit_every == 0;
        if ((due || quiet_steps >= kConvergeStreak) && flipped) {
            state.phi = reinitialize(state.phi);
            flipped = false;
            quiet_steps = 0;
        }
        evolve_step(state, adapted, config, floors);
        if (state.status != RunStatus::Running) break;
        flipped |= state.band_changes > 0;
        bool quiet = state.band_changes <= config.converge_tol &&
                     state.band_pressure <= config.converge_tol;
        quiet_steps = quiet ? quiet_steps + 1 : 0;
        double e = state.energy_trace.back();
        if (e < best_energy - (1e-8 * std::abs(best_energy) + 1e-12)) {
            best_energy = e;
            best_iter = state.iter;
        }
        if ((!flipped && quiet_steps >= kConvergeStreak) ||
            state.iter - best_iter >= kStagnationWindow)
            state.status = RunStatus::Converged;
    }
    if (state.status == RunStatus::Running) state.status = RunStatus::MaxIter;

    SegmentResult result;
    result.mask = BoolGrid(field.width, field.height);
    // The two-region labeling is symmetric under swapping inside and outside;
    // report the orientation where the inside region is the brighter one.
    bool bright_inside = state.inner.count == 0 || state.outer.count == 0 ||
                         state.inner.mean_y() >= state.outer.mean_y();
    for (int y = 0; y < field.height; ++y)
        for (int x = 0; x < field.width; ++x)
            result.mask.at(x, y) = (state.phi.at(x, y) > 0.0) == bright_inside;
    result.trace = std::move(state.reports);
    result.status = state.status;
    result.iterations = state.iter;
    return result;
}

} // namespace exfseg
