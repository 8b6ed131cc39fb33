#pragma once

#include <string>

#include "exfseg/grid.hpp"

namespace exfseg {

/// 16-bit binary graymap for viewing; values scaled linearly to the
/// field's range (lossy — the text grid is the lossless sidecar).
void write_pgm16(const std::string& path, const ScalarField& field);

/// Binary graymap with values {0, 255}.
void write_mask_pgm(const std::string& path, const BoolGrid& mask);

/// Space-separated full-precision reals, one image row per line.
void write_text_grid(const std::string& path, const ScalarField& field);

/// Reads P5 (8/16-bit), P2, or a text grid; detected from content.
ScalarField read_field(const std::string& path);

/// Nonzero pixels become true.
BoolGrid read_mask(const std::string& path);

} // namespace exfseg
