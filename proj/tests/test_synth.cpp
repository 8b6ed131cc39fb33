#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "exfseg/energy.hpp"
#include "exfseg/synth.hpp"

using namespace exfseg;

namespace {

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        double va = a[i], vb = b[j];
        if (va <= vb) ++i;
        if (vb <= va) ++j;
        d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
    }
    return d;
}

} // namespace

TEST_CASE("phantom rasterization") {
    BenchmarkSpec spec;
    spec.width = 64;
    spec.height = 64;
    spec.shapes = {{ShapeKind::Disk, 32.0, 32.0, 10.0, 0.0}};
    BoolGrid labels = make_phantom(spec);
    // Discrete disk area close to pi r^2.
    CHECK(std::abs(static_cast<double>(labels.count_true()) - 317.0) <= 4.0);

    spec.shapes.clear();
    CHECK(make_phantom(spec).count_true() == 0);

    spec.shapes = {{ShapeKind::Rectangle, 32.0, 32.0, 10.0, 10.0}};
    CHECK(make_phantom(spec).count_true() == 100);
}

TEST_CASE("phantom validation") {
    BenchmarkSpec spec;
    spec.width = 64;
    spec.height = 64;
    spec.shapes = {{ShapeKind::Disk, 5.0, 32.0, 10.0, 0.0}}; // crosses the border
    CHECK_THROWS(make_phantom(spec));

    spec.shapes = {{ShapeKind::Disk, 30.0, 30.0, 10.0, 0.0},
                   {ShapeKind::Disk, 35.0, 35.0, 10.0, 0.0}};
    CHECK_THROWS(make_phantom(spec));

    BenchmarkSpec bad;
    bad.realizations = 0;
    CHECK_THROWS(bad.validate());
}

TEST_CASE("calibration closed-form inverses") {
    NoiseParams fg = calibrate(Family::Poisson, {9.0, 0.0}, 0.5);
    CHECK(fg.p1 == doctest::Approx(16.0).epsilon(1e-12));

    for (Family f : {Family::Poisson, Family::Rayleigh, Family::Gaussian}) {
        NoiseParams bg = default_bg(f);
        NoiseParams same = calibrate(f, bg, 0.0);
        CHECK(same.p1 == doctest::Approx(bg.p1));
    }

    fg = calibrate(Family::Rayleigh, {1.0, 0.0}, std::log(1.25));
    CHECK(fg.p1 == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("calibration round trip and monotonicity") {
    Rng rng(55);
    for (int i = 0; i < 50; ++i) {
        Family f = i % 3 == 0   ? Family::Poisson
                   : i % 3 == 1 ? Family::Rayleigh
                                : Family::Gaussian;
        NoiseParams bg = default_bg(f);
        bg.p1 *= 0.5 + rng.uniform01();
        double target = 0.01 + 2.0 * rng.uniform01();
        NoiseParams fg = calibrate(f, bg, target);
        double achieved = bhattacharyya(model_for(f), natural_from_params(f, fg),
                                        natural_from_params(f, bg));
        CHECK(achieved == doctest::Approx(target).epsilon(1e-9));
        CHECK(fg.p1 >= bg.p1);
    }

    for (Family f : {Family::Poisson, Family::Rayleigh, Family::Gaussian}) {
        double prev = -1.0;
        for (double d : {0.0625, 0.125, 0.25, 0.5, 1.0, 2.0}) {
            double fg = calibrate(f, default_bg(f), d).p1;
            CHECK(fg > prev);
            prev = fg;
        }
    }
}

TEST_CASE("corruption sampling") {
    BenchmarkSpec spec;
    spec.width = 64;
    spec.height = 64;
    spec.shapes = {{ShapeKind::Rectangle, 32.0, 32.0, 32.0, 32.0}}; // 1024 px fg
    BoolGrid labels = make_phantom(spec);

    ScalarField field = corrupt(labels, Family::Poisson, {16.0, 0.0}, {9.0, 0.0}, 11);
    double fg_sum = 0.0;
    size_t fg_n = 0;
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x)
            if (labels.at(x, y)) {
                fg_sum += field.at(x, y);
                ++fg_n;
            }
    CHECK(fg_sum / fg_n == doctest::Approx(16.0).epsilon(0.05));

    // Determinism and realization independence.
    ScalarField same = corrupt(labels, Family::Poisson, {16.0, 0.0}, {9.0, 0.0}, 11);
    CHECK(same.data == field.data);
    ScalarField other = corrupt(labels, Family::Poisson, {16.0, 0.0}, {9.0, 0.0}, 12);
    CHECK(other.data != field.data);
    CHECK(child_seed(1, 0) != child_seed(1, 1));
    CHECK(child_seed(1, 0) != child_seed(2, 0));
}

TEST_CASE("equal parameters are indistinguishable by a KS test") {
    BenchmarkSpec spec;
    spec.width = 96;
    spec.height = 96;
    spec.shapes = {{ShapeKind::Rectangle, 48.0, 48.0, 46.0, 46.0}};
    BoolGrid labels = make_phantom(spec);
    ScalarField field = corrupt(labels, Family::Rayleigh, {1.5, 0.0}, {1.5, 0.0}, 31);
    std::vector<double> fg, bg;
    for (int y = 0; y < 96; ++y)
        for (int x = 0; x < 96; ++x)
            (labels.at(x, y) ? fg : bg).push_back(field.at(x, y));
    double d = ks_statistic(fg, bg);
    double n = static_cast<double>(fg.size()), m = static_cast<double>(bg.size());
    double critical = 1.628 * std::sqrt((n + m) / (n * m)); // alpha = 0.01
    CHECK(d < critical);
}
