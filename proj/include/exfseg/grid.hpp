#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace exfseg {

/// Rectangular grid of real values (image intensity, level-set function,
/// or speed field). Row-major, pixel (x, y) with x the column.
struct ScalarField {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    ScalarField() = default;
    ScalarField(int w, int h, double fill = 0.0)
        : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {
        if (w <= 0 || h <= 0)
            throw std::invalid_argument("ScalarField: non-positive dimensions");
    }

    double& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
    double at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
    size_t size() const { return data.size(); }
    bool same_shape(const ScalarField& o) const {
        return width == o.width && height == o.height;
    }
};

/// Boolean grid (masks, phantom labels).
struct BoolGrid {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> data;

    BoolGrid() = default;
    BoolGrid(int w, int h, bool fill = false)
        : width(w), height(h), data(static_cast<size_t>(w) * h, fill ? 1 : 0) {
        if (w <= 0 || h <= 0)
            throw std::invalid_argument("BoolGrid: non-positive dimensions");
    }

    uint8_t& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
    bool at(int x, int y) const { return data[static_cast<size_t>(y) * width + x] != 0; }
    size_t size() const { return data.size(); }

    size_t count_true() const {
        size_t n = 0;
        for (uint8_t v : data) n += (v != 0);
        return n;
    }
    BoolGrid complement() const {
        BoolGrid g(width, height);
        for (size_t i = 0; i < data.size(); ++i) g.data[i] = data[i] ? 0 : 1;
        return g;
    }
};

} // namespace exfseg
