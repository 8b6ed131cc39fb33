#pragma once

#include <cstdint>
#include <vector>

#include "exfseg/expfam.hpp"
#include "exfseg/grid.hpp"

namespace exfseg {

enum class ShapeKind { Disk, Rectangle };

struct Shape {
    ShapeKind kind = ShapeKind::Disk;
    double cx = 0.0, cy = 0.0;
    double a = 0.0; // disk radius, or rectangle width
    double b = 0.0; // rectangle height (unused for disks)
};

/// One- or two-knob distribution parameters in their usual form:
/// Poisson (lambda), Rayleigh (theta), Gaussian (mean, sigma).
struct NoiseParams {
    double p1 = 0.0;
    double p2 = 0.0;
};

Vec2 natural_from_params(Family family, const NoiseParams& p);

struct BenchmarkSpec {
    int width = 128;
    int height = 128;
    std::vector<Shape> shapes;
    Family noise = Family::Poisson;
    NoiseParams bg{9.0, 0.0}; // Gaussian default sigma lives in p2
    double target_D = 0.5;
    int realizations = 50;
    uint64_t base_seed = 1;

    void validate() const; // throws on out-of-bounds or overlapping shapes
};

/// Default phantom: non-overlapping disks and a rectangle on uniform
/// background, scaled to the image size.
std::vector<Shape> default_phantom_shapes(int width, int height);

NoiseParams default_bg(Family noise);

/// Rasterize the shapes; true on foreground. Doubles as the ground truth.
BoolGrid make_phantom(const BenchmarkSpec& spec);

/// Foreground parameter with bhattacharyya(fg, bg) == target_D, fg >= bg.
/// Closed-form inverse, verified against the distance at 1e-9.
NoiseParams calibrate(Family noise, const NoiseParams& bg, double target_D);

/// Pixel-wise independent corruption; deterministic given the seed.
ScalarField corrupt(const BoolGrid& labels, Family noise, const NoiseParams& fg,
                    const NoiseParams& bg, uint64_t seed);

} // namespace exfseg
