#include "exfseg/synth.hpp"

#include <cmath>

#include "exfseg/energy.hpp"

namespace exfseg {

namespace {

bool shape_contains(const Shape& s, double x, double y) {
    if (s.kind == ShapeKind::Disk) {
        double dx = x - s.cx, dy = y - s.cy;
        return dx * dx + dy * dy <= s.a * s.a;
    }
    // Half-open box, so an integer-sized rectangle covers exactly a*b pixels.
    return x >= s.cx - 0.5 * s.a && x < s.cx + 0.5 * s.a && y >= s.cy - 0.5 * s.b &&
           y < s.cy + 0.5 * s.b;
}

void shape_bounds(const Shape& s, double& x0, double& y0, double& x1, double& y1) {
    if (s.kind == ShapeKind::Disk) {
        x0 = s.cx - s.a;
        x1 = s.cx + s.a;
        y0 = s.cy - s.a;
        y1 = s.cy + s.a;
    } else {
        x0 = s.cx - 0.5 * s.a;
        x1 = s.cx + 0.5 * s.a;
        y0 = s.cy - 0.5 * s.b;
        y1 = s.cy + 0.5 * s.b;
    }
}

} // namespace

Vec2 natural_from_params(Family family, const NoiseParams& p) {
    switch (family) {
        case Family::Poisson: return poisson_natural(p.p1);
        case Family::Rayleigh: return rayleigh_natural(p.p1);
        case Family::Gaussian: return gaussian_natural(p.p1, p.p2 * p.p2);
    }
    throw ParameterError("natural_from_params: unknown family");
}

void BenchmarkSpec::validate() const {
    if (width <= 0 || height <= 0)
        throw std::invalid_argument("benchmark: non-positive image size");
    if (target_D < 0.0)
        throw std::invalid_argument("benchmark: negative target distance");
    if (realizations < 1)
        throw std::invalid_argument("benchmark: realizations must be positive");
    for (const Shape& s : shapes) {
        double x0, y0, x1, y1;
        shape_bounds(s, x0, y0, x1, y1);
        if (x0 <= 0.0 || y0 <= 0.0 || x1 >= width - 1.0 || y1 >= height - 1.0)
            throw std::invalid_argument("benchmark: shape touches the image border");
    }
    for (size_t i = 0; i < shapes.size(); ++i) {
        for (size_t j = i + 1; j < shapes.size(); ++j) {
            double ax0, ay0, ax1, ay1, bx0, by0, bx1, by1;
            shape_bounds(shapes[i], ax0, ay0, ax1, ay1);
            shape_bounds(shapes[j], bx0, by0, bx1, by1);
            if (ax0 <= bx1 && bx0 <= ax1 && ay0 <= by1 && by0 <= ay1)
                throw std::invalid_argument("benchmark: overlapping shapes");
        }
    }
}

std::vector<Shape> default_phantom_shapes(int width, int height) {
    double w = width, h = height;
    return {
        {ShapeKind::Disk, 0.30 * w, 0.32 * h, 0.14 * w, 0.0},
        {ShapeKind::Disk, 0.72 * w, 0.28 * h, 0.09 * w, 0.0},
        {ShapeKind::Rectangle, 0.34 * w, 0.74 * h, 0.26 * w, 0.18 * h},
        {ShapeKind::Disk, 0.74 * w, 0.72 * h, 0.12 * w, 0.0},
    };
}

NoiseParams default_bg(Family noise) {
    switch (noise) {
        case Family::Poisson: return {1.065, 0.0};
        case Family::Rayleigh: return {1.0, 0.0};
        case Family::Gaussian: return {4.0, 1.0};
    }
    throw ParameterError("default_bg: unknown family");
}

BoolGrid make_phantom(const BenchmarkSpec& spec) {
    spec.validate();
    BoolGrid labels(spec.width, spec.height);
    for (int y = 0; y < spec.height; ++y)
        for (int x = 0; x < spec.width; ++x)
            for (const Shape& s : spec.shapes)
                if (shape_contains(s, x, y)) {
                    labels.at(x, y) = true;
                    break;
                }
    return labels;
}

NoiseParams calibrate(Family noise, const NoiseParams& bg, double target_D) {
    if (target_D < 0.0) throw ParameterError("calibrate: negative target distance");
    NoiseParams fg = bg;
    switch (noise) {
        case Family::Poisson: {
            double r = std::sqrt(bg.p1) + std::sqrt(2.0 * target_D);
            fg.p1 = r * r;
            break;
        }
        case Family::Rayleigh: {
            double e = std::exp(target_D);
            fg.p1 = bg.p1 * (e + std::sqrt(e * e - 1.0));
            break;
        }
        case Family::Gaussian: {
            // Shared sigma; only the mean moves.
            fg.p1 = bg.p1 + bg.p2 * std::sqrt(8.0 * target_D);
            break;
        }
    }
    const ExpFamilyModel& model = model_for(noise);
    double achieved = bhattacharyya(model, natural_from_params(noise, fg),
                                    natural_from_params(noise, bg));
    if (std::abs(achieved - target_D) > 1e-9)
        throw std::logic_error("calibrate: closed-form inverse failed verification");
    return fg;
}

ScalarField corrupt(const BoolGrid& labels, Family noise, const NoiseParams& fg,
                    const NoiseParams& bg, uint64_t seed) {
    const ExpFamilyModel& model = model_for(noise);
    Vec2 eta_fg = natural_from_params(noise, fg);
    Vec2 eta_bg = natural_from_params(noise, bg);
    Rng rng(seed);
    ScalarField out(labels.width, labels.height);
    for (int y = 0; y < labels.height; ++y)
        for (int x = 0; x < labels.width; ++x)
            out.at(x, y) = model.sample(labels.at(x, y) ? eta_fg : eta_bg, rng);
    return out;
}

} // namespace exfseg
