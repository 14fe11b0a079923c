#pragma once

// Multi-level 1D decomposition and separable 2D transform.
//
// 1D layout: [ s_J | d_J | d_{J-1} | ... | d_1 ], total length N.
// 2D layout: in place, Mallat quadrants. After each level the top-left
// ceil(w/2) x ceil(h/2) block holds LL and the next level recurses into it.

#include "iwt/lifting.hpp"

#include <utility>
#include <vector>

namespace iwt {

int max_levels(std::size_t n);

struct LevelLengths {
    std::size_t approx_len = 0;
    std::size_t detail_len = 0;

    bool operator==(const LevelLengths&) const = default;
};

// Per-level (approx, detail) lengths for J levels of an N-sample signal.
std::vector<LevelLengths> level_lengths_for(std::size_t n, int levels);

struct Decomposition {
    int levels = 0;
    std::vector<LevelLengths> level_lengths;
    Samples coeffs;
    std::size_t original_length = 0;
    RoundingMode mode = RoundingMode::FloorShift;

    bool operator==(const Decomposition&) const = default;

    // Deepest approximation (s_J).
    std::span<const Sample> approx() const;
    // Detail subband of `level` (1 = finest).
    std::span<const Sample> detail(int level) const;
};

Decomposition forward_multilevel(const Signal& x, int levels,
                                 RoundingMode mode = RoundingMode::FloorShift,
                                 BoundaryRule boundary = BoundaryRule::SymmetricMirror,
                                 OpTally* tally = nullptr);
Signal inverse_multilevel(const Decomposition& dec,
                          BoundaryRule boundary = BoundaryRule::SymmetricMirror,
                          OpTally* tally = nullptr);
Samples inverse_multilevel_samples(const Decomposition& dec,
                                   BoundaryRule boundary = BoundaryRule::SymmetricMirror,
                                   OpTally* tally = nullptr);

struct Image {
    std::size_t width = 0;
    std::size_t height = 0;
    Samples pixels;  // row-major
    int bit_width = 8;

    Image() = default;
    Image(std::size_t w, std::size_t h, Samples px, int bits = 8);

    Sample at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }
    bool operator==(const Image&) const = default;
};

// First letter: horizontal (row) filter, second: vertical (column) filter.
enum class Band { LL, HL, LH, HH };

struct Rect {
    std::size_t x = 0, y = 0, width = 0, height = 0;
};

struct Decomposition2D {
    int levels = 0;
    std::size_t width = 0;
    std::size_t height = 0;
    Samples coeffs;  // width * height, row-major
    RoundingMode mode = RoundingMode::FloorShift;

    bool operator==(const Decomposition2D&) const = default;

    Rect band_rect(int level, Band band) const;
    Samples band(int level, Band band) const;
};

int max_levels_2d(std::size_t width, std::size_t height);

Decomposition2D forward_2d(const Image& img, int levels,
                           RoundingMode mode = RoundingMode::FloorShift,
                           BoundaryRule boundary = BoundaryRule::SymmetricMirror,
                           OpTally* tally = nullptr);
Image inverse_2d(const Decomposition2D& dec,
                 BoundaryRule boundary = BoundaryRule::SymmetricMirror,
                 OpTally* tally = nullptr);

}  // namespace iwt
