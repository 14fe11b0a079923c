#include "iwt/multilevel.hpp"

#include <algorithm>
#include <string>

namespace iwt {

int max_levels(std::size_t n) {
    int levels = 0;
    while (n >= 2) {
        n = (n + 1) / 2;
        ++levels;
    }
    return levels;
}

std::vector<LevelLengths> level_lengths_for(std::size_t n, int levels) {
    if (levels < 1) throw Error("at least one decomposition level is required");
    if (levels > max_levels(n)) throw Error("level count exceeds max_levels");
    std::vector<LevelLengths> out;
    out.reserve(static_cast<std::size_t>(levels));
    for (int j = 0; j < levels; ++j) {
        out.push_back({(n + 1) / 2, n / 2});
        n = (n + 1) / 2;
    }
    return out;
}

std::span<const Sample> Decomposition::approx() const {
    return std::span<const Sample>(coeffs).first(level_lengths.back().approx_len);
}

std::span<const Sample> Decomposition::detail(int level) const {
    if (level < 1 || level > levels) throw Error("detail level out of range");
    // Details are stored deepest first after s_J.
    std::size_t offset = level_lengths.back().approx_len;
    for (int j = levels; j > level; --j) offset += level_lengths[static_cast<std::size_t>(j - 1)].detail_len;
    return std::span<const Sample>(coeffs).subspan(
        offset, level_lengths[static_cast<std::size_t>(level - 1)].detail_len);
}

Decomposition forward_multilevel(const Signal& x, int levels, RoundingMode mode,
                                 BoundaryRule boundary, OpTally* tally) {
    Decomposition dec;
    dec.levels = levels;
    dec.level_lengths = level_lengths_for(x.size(), levels);
    dec.original_length = x.size();
    dec.mode = mode;
    dec.coeffs = x.samples();

    // Each level overwrites the current approximation prefix with [s | d].
    std::size_t len = x.size();
    for (int j = 0; j < levels; ++j) {
        std::span<Sample> region(dec.coeffs.data(), len);
        const SubbandPair sb = forward_1d(std::span<const Sample>(region), mode, boundary, tally);
        std::copy(sb.approx.begin(), sb.approx.end(), region.begin());
        std::copy(sb.detail.begin(), sb.detail.end(), region.begin() + static_cast<std::ptrdiff_t>(sb.approx.size()));
        len = sb.approx.size();
    }
    return dec;
}

Samples inverse_multilevel_samples(const Decomposition& dec, BoundaryRule boundary,
                                   OpTally* tally) {
    if (dec.levels < 1) throw Error("at least one decomposition level is required");
    if (dec.coeffs.size() != dec.original_length)
        throw Error("coefficient count does not match original length");
    if (dec.level_lengths != level_lengths_for(dec.original_length, dec.levels))
        throw Error("inconsistent level lengths");

    Samples x = dec.coeffs;
    for (int j = dec.levels; j >= 1; --j) {
        const LevelLengths& ll = dec.level_lengths[static_cast<std::size_t>(j - 1)];
        SubbandPair sb;
        sb.original_length = ll.approx_len + ll.detail_len;
        sb.approx.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(ll.approx_len));
        sb.detail.assign(x.begin() + static_cast<std::ptrdiff_t>(ll.approx_len),
                         x.begin() + static_cast<std::ptrdiff_t>(sb.original_length));
        const Samples rec = inverse_1d_samples(sb, dec.mode, boundary, tally);
        std::copy(rec.begin(), rec.end(), x.begin());
    }
    return x;
}

Signal inverse_multilevel(const Decomposition& dec, BoundaryRule boundary, OpTally* tally) {
    return Signal::infer(inverse_multilevel_samples(dec, boundary, tally));
}

Image::Image(std::size_t w, std::size_t h, Samples px, int bits)
    : width(w), height(h), pixels(std::move(px)), bit_width(bits) {
    if (w == 0 || h == 0) throw Error("image dimensions must be positive");
    if (pixels.size() != w * h)
        throw Error("pixel count " + std::to_string(pixels.size()) + " does not match " +
                    std::to_string(w) + "x" + std::to_string(h));
}

int max_levels_2d(std::size_t width, std::size_t height) {
    return std::min(max_levels(width), max_levels(height));
}

namespace {

void check_2d_levels(std::size_t width, std::size_t height, int levels) {
    if (width < 2 || height < 2) throw Error("image must be at least 2x2");
    if (levels < 1) throw Error("at least one decomposition level is required");
    if (levels > max_levels_2d(width, height)) throw Error("level count exceeds max_levels");
}

// Strided view of one row or column inside the coefficient plane.
struct Line {
    Sample* base;
    std::size_t stride;
    std::size_t len;

    Samples load() const {
        Samples v(len);
        for (std::size_t i = 0; i < len; ++i) v[i] = base[i * stride];
        return v;
    }
    void store(std::span<const Sample> v) const {
        for (std::size_t i = 0; i < len; ++i) base[i * stride] = v[i];
    }
};

void forward_line(const Line& line, RoundingMode mode, BoundaryRule boundary, OpTally* tally) {
    const SubbandPair sb = forward_1d(line.load(), mode, boundary, tally);
    Samples packed = sb.approx;
    packed.insert(packed.end(), sb.detail.begin(), sb.detail.end());
    line.store(packed);
}

void inverse_line(const Line& line, RoundingMode mode, BoundaryRule boundary, OpTally* tally) {
    const Samples v = line.load();
    SubbandPair sb;
    sb.original_length = line.len;
    const auto split_at = static_cast<std::ptrdiff_t>((line.len + 1) / 2);
    sb.approx.assign(v.begin(), v.begin() + split_at);
    sb.detail.assign(v.begin() + split_at, v.end());
    line.store(inverse_1d_samples(sb, mode, boundary, tally));
}

}  // namespace

Rect Decomposition2D::band_rect(int level, Band band) const {
    if (level < 1 || level > levels) throw Error("band level out of range");
    std::size_t w = width, h = height;
    for (int j = 1; j < level; ++j) {
        w = (w + 1) / 2;
        h = (h + 1) / 2;
    }
    const std::size_t lw = (w + 1) / 2, lh = (h + 1) / 2;
    switch (band) {
        case Band::LL: return {0, 0, lw, lh};
        case Band::HL: return {lw, 0, w - lw, lh};
        case Band::LH: return {0, lh, lw, h - lh};
        case Band::HH: return {lw, lh, w - lw, h - lh};
    }
    throw Error("unknown band");
}

Samples Decomposition2D::band(int level, Band b) const {
    const Rect r = band_rect(level, b);
    Samples out;
    out.reserve(r.width * r.height);
    for (std::size_t y = r.y; y < r.y + r.height; ++y)
        for (std::size_t x = r.x; x < r.x + r.width; ++x) out.push_back(coeffs[y * width + x]);
    return out;
}

Decomposition2D forward_2d(const Image& img, int levels, RoundingMode mode,
                           BoundaryRule boundary, OpTally* tally) {
    check_2d_levels(img.width, img.height, levels);
    Decomposition2D dec;
    dec.levels = levels;
    dec.width = img.width;
    dec.height = img.height;
    dec.mode = mode;
    dec.coeffs = img.pixels;

    std::size_t w = img.width, h = img.height;
    for (int j = 0; j < levels; ++j) {
        for (std::size_t y = 0; y < h; ++y)
            forward_line({dec.coeffs.data() + y * dec.width, 1, w}, mode, boundary, tally);
        for (std::size_t x = 0; x < w; ++x)
            forward_line({dec.coeffs.data() + x, dec.width, h}, mode, boundary, tally);
        w = (w + 1) / 2;
        h = (h + 1) / 2;
    }
    return dec;
}

Image inverse_2d(const Decomposition2D& dec, BoundaryRule boundary, OpTally* tally) {
    check_2d_levels(dec.width, dec.height, dec.levels);
    if (dec.coeffs.size() != dec.width * dec.height)
        throw Error("coefficient count does not match image size");

    std::vector<std::pair<std::size_t, std::size_t>> sizes;
    for (std::size_t w = dec.width, h = dec.height; sizes.size() < static_cast<std::size_t>(dec.levels);
         w = (w + 1) / 2, h = (h + 1) / 2)
        sizes.emplace_back(w, h);

    Samples plane = dec.coeffs;
    for (auto it = sizes.rbegin(); it != sizes.rend(); ++it) {
        const auto [w, h] = *it;
        for (std::size_t x = 0; x < w; ++x)
            inverse_line({plane.data() + x, dec.width, h}, dec.mode, boundary, tally);
        for (std::size_t y = 0; y < h; ++y)
            inverse_line({plane.data() + y * dec.width, 1, w}, dec.mode, boundary, tally);
    }

    int bits = 1;
    for (Sample v : plane)
        while (v >= (Sample{1} << bits) && bits < 31) ++bits;
    return Image(dec.width, dec.height, std::move(plane), std::max(bits, 8));
}

}  // namespace iwt
