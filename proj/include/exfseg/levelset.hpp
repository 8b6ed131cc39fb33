#pragma once

#include <vector>

#include "exfseg/energy.hpp"
#include "exfseg/expfam.hpp"
#include "exfseg/grid.hpp"

namespace exfseg {

enum class RunStatus { Running, Converged, MaxIter, Collapsed };

struct EvolveConfig {
    double lambda = 0.2;   // weight of the length term
    double dt = 0.5;       // time step before the CFL clamp
    double epsilon = 1.5;  // regularized Dirac/Heaviside half-width, pixels
    int max_iter = 2000;
    int reinit_every = 20;
    int converge_tol = 0;  // sign-change count threshold
    SpeedLaw law = SpeedLaw::chan_vese();
};

struct LevelSetState {
    ScalarField phi; // positive inside the inner region
    int iter = 0;
    RegionEstimate inner, outer;
    std::vector<double> energy_trace; // totals; length == iter + 1
    std::vector<EnergyReport> reports;
    int band_changes = 0;   // pixels that changed sign last step
    int band_pressure = 0;  // band pixels still advancing toward the other sign
    RunStatus status = RunStatus::Running;
};

struct SegmentResult {
    BoolGrid mask;
    std::vector<EnergyReport> trace;
    RunStatus status = RunStatus::Running;
    int iterations = 0;
};

/// Signed distance transform of the mask, positive inside.
ScalarField init_phi(const BoolGrid& mask);

/// kappa = div(grad phi / |grad phi|), central differences, interior points.
double curvature(const ScalarField& phi, int x, int y);

/// Regularized Heaviside; companion of the cosine-bump Dirac below.
double heaviside_eps(double v, double eps);
/// (1/(2 eps)) (1 + cos(pi v / eps)) on |v| <= eps, else 0.
double dirac_eps(double v, double eps);

/// Contour length estimate: sum over the grid of |grad H_eps(phi)|.
double contour_length(const ScalarField& phi, double eps);

/// Signed distance to the current zero level set, sign preserving.
ScalarField reinitialize(const ScalarField& phi);

/// Fit both region estimates to the sign regions of phi.
void fit_regions(LevelSetState& state, const ScalarField& field,
                 const EvolveConfig& config, const MomentFloors& floors);

/// One explicit update: phi += dt_eff * dirac(phi) * (speed + lambda * kappa),
/// with dt_eff clamped so that dt_eff * max|speed + lambda kappa| <= 0.45.
/// Estimates are refreshed afterwards and the energy appended. Region
/// collapse sets a terminal status instead of throwing; phi is restored.
void evolve_step(LevelSetState& state, const ScalarField& field,
                 const EvolveConfig& config, const MomentFloors& floors);

/// Prepare a state for evolution (initial phi, estimates, energy).
/// `field` must already be support-adapted for the law's model.
LevelSetState init_state(const ScalarField& field, const BoolGrid& init_mask,
                         const EvolveConfig& config, const MomentFloors& floors);

/// Map every pixel into the support of the law's model (identity for
/// Chan-Vese); done once so evolution never hits a support error.
ScalarField adapt_field(const SpeedLaw& law, const ScalarField& field);

/// Full loop: evolve with periodic reinitialization until the sign-change
/// count stays at or below converge_tol for 5 consecutive steps, max_iter
/// is reached, or a region collapses.
SegmentResult segment(const ScalarField& field, const BoolGrid& init_mask,
                      const EvolveConfig& config);

} // namespace exfseg
