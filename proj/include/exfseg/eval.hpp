#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "exfseg/grid.hpp"
#include "exfseg/levelset.hpp"
#include "exfseg/synth.hpp"

namespace exfseg {

struct ConfusionCounts {
    long long tp = 0, fp = 0, tn = 0, fn = 0;
    long long total() const { return tp + fp + tn + fn; }
};

ConfusionCounts confusion(const BoolGrid& seg, const BoolGrid& gt);

/// ROC pair: FPF = fp/(fp+tn), TPF = tp/(tp+fn).
/// Throws if gt lacks one of the classes.
std::pair<double, double> fpf_tpf(const BoolGrid& seg, const BoolGrid& gt);

struct SweepRow {
    Family noise;
    double D = 0.0;
    std::string functional;
    uint64_t seed = 0;
    double fpf = 0.0, tpf = 0.0;
    int iterations = 0;
    double final_energy = 0.0;
    bool collapsed = false;
    double initial_energy = 0.0; // kept for the descent check; not in the CSV
};

struct AggregateRow {
    Family noise;
    double D = 0.0;
    std::string functional;
    double mean_fpf = 0.0, std_fpf = 0.0;
    double mean_tpf = 0.0, std_tpf = 0.0;
    int n = 0;
};

struct SweepConfig {
    BenchmarkSpec spec;           // target_D ignored; D_values drives the sweep
    std::vector<Family> noises{Family::Poisson, Family::Rayleigh};
    std::vector<double> D_values{0.125, 0.25, 0.5, 1.0};
    std::vector<SpeedLaw> functionals{SpeedLaw::chan_vese(), SpeedLaw::ml(Family::Gaussian),
                                      SpeedLaw::ml(Family::Poisson),
                                      SpeedLaw::ml(Family::Rayleigh)};
    EvolveConfig evolve;
    int threads = 0; // 0: hardware concurrency
};

/// One segmentation per (noise, D, realization, functional); all functionals
/// of one realization share the same corrupted image and initialization.
/// Rows are sorted by keys; deterministic given spec.base_seed.
std::vector<SweepRow> run_sweep(const SweepConfig& config);

std::vector<AggregateRow> aggregate(const std::vector<SweepRow>& rows);

/// Initialization used when no seed contour is given: a grid of small
/// circles covering the image.
BoolGrid circle_grid_init(int width, int height, double radius = 6.0,
                          double spacing = 16.0);

void write_rows_csv(std::ostream& os, const std::vector<SweepRow>& rows);
void write_aggregate_csv(std::ostream& os, const std::vector<AggregateRow>& rows);

} // namespace exfseg
