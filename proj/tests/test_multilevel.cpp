#include "iwt/multilevel.hpp"

#include "oracle.hpp"

#include <doctest.h>

#include <random>

using namespace iwt;
using Vec = std::vector<Sample>;

namespace {

// Brute-force halving recurrence.
int halvings(std::size_t n) {
    int count = 0;
    std::size_t len = n;
    while (true) {
        if (len < 2) return count;
        len = len / 2 + len % 2;
        ++count;
    }
}

// 2D reference: separable oracle passes, row then column, recursing on LL.
Vec oracle_2d(Vec px, std::size_t w, std::size_t h, int levels, RoundingMode m) {
    std::size_t cw = w, ch = h;
    for (int j = 0; j < levels; ++j) {
        for (std::size_t y = 0; y < ch; ++y) {
            Vec row(px.begin() + static_cast<std::ptrdiff_t>(y * w),
                    px.begin() + static_cast<std::ptrdiff_t>(y * w + cw));
            const auto sb = oracle::forward(row, m);
            Vec packed = sb.approx;
            packed.insert(packed.end(), sb.detail.begin(), sb.detail.end());
            std::copy(packed.begin(), packed.end(), px.begin() + static_cast<std::ptrdiff_t>(y * w));
        }
        for (std::size_t x = 0; x < cw; ++x) {
            Vec col;
            for (std::size_t y = 0; y < ch; ++y) col.push_back(px[y * w + x]);
            const auto sb = oracle::forward(col, m);
            Vec packed = sb.approx;
            packed.insert(packed.end(), sb.detail.begin(), sb.detail.end());
            for (std::size_t y = 0; y < ch; ++y) px[y * w + x] = packed[y];
        }
        cw = (cw + 1) / 2;
        ch = (ch + 1) / 2;
    }
    return px;
}

}  // namespace

TEST_SUITE("multilevel") {

TEST_CASE("max_levels") {
    CHECK(max_levels(1) == 0);
    CHECK(max_levels(2) == 1);
    CHECK(max_levels(64) == 6);
    CHECK(max_levels(5) == 3);
    for (std::size_t n = 1; n < 5000; ++n) REQUIRE(max_levels(n) == halvings(n));
}

TEST_CASE("forward_multilevel examples") {
    const auto one = forward_multilevel(Signal(Vec{1, 3, 2, 0}), 1);
    CHECK(one.coeffs == Vec{2, 2, 2, -2});
    const auto two = forward_multilevel(Signal(Vec{1, 3, 2, 0}), 2);
    CHECK(two.coeffs == Vec{2, 0, 2, -2});
    CHECK(two.coeffs == oracle::forward_multilevel({1, 3, 2, 0}, 2, RoundingMode::FloorShift));
    CHECK(two.level_lengths == std::vector<LevelLengths>{{2, 2}, {1, 1}});
    CHECK(Vec(two.approx().begin(), two.approx().end()) == Vec{2});
    CHECK(Vec(two.detail(1).begin(), two.detail(1).end()) == Vec{2, -2});
    CHECK(Vec(two.detail(2).begin(), two.detail(2).end()) == Vec{0});

    const auto flat = forward_multilevel(Signal(Vec(8, 77)), 3);
    CHECK(flat.coeffs == Vec{77, 0, 0, 0, 0, 0, 0, 0});

    CHECK_THROWS_WITH_AS(forward_multilevel(Signal(Vec{1, 2, 3, 4}), 3),
                         "level count exceeds max_levels", Error);
    CHECK_THROWS_AS(forward_multilevel(Signal(Vec{1, 2, 3, 4}), 0), Error);
}

TEST_CASE("forward_multilevel matches the composed oracle") {
    std::mt19937_64 rng(8);
    for (RoundingMode m : {RoundingMode::FloorShift, RoundingMode::HardwareCorrected})
        for (std::size_t n = 2; n < 130; ++n) {
            const Vec x = oracle::random_signal(rng, n);
            for (int j = 1; j <= max_levels(n); ++j)
                REQUIRE(forward_multilevel(Signal(x), j, m).coeffs == oracle::forward_multilevel(x, j, m));
        }
}

TEST_CASE("inverse_multilevel") {
    Decomposition dec = forward_multilevel(Signal(Vec{1, 3, 2, 0}), 2);
    CHECK(inverse_multilevel(dec).samples() == Vec{1, 3, 2, 0});

    Decomposition zero = dec;
    zero.levels = 0;
    CHECK_THROWS_AS(inverse_multilevel(zero), Error);

    Decomposition bad = dec;
    bad.level_lengths[1] = {2, 0};
    CHECK_THROWS_WITH_AS(inverse_multilevel(bad), "inconsistent level lengths", Error);

    Decomposition short_coeffs = dec;
    short_coeffs.coeffs.pop_back();
    CHECK_THROWS_AS(inverse_multilevel(short_coeffs), Error);

    std::mt19937_64 rng(17);
    for (RoundingMode m : {RoundingMode::FloorShift, RoundingMode::HardwareCorrected})
        for (std::size_t n = 2; n <= 257; ++n) {
            const Vec x = oracle::random_signal(rng, n);
            const auto d = forward_multilevel(Signal(x), max_levels(n), m);
            REQUIRE(d.coeffs.size() == n);
            REQUIRE(inverse_multilevel_samples(d) == x);
        }
}

TEST_CASE("constant signals keep their value at every depth") {
    for (std::size_t n : {2u, 3u, 7u, 64u, 100u})
        for (int j = 1; j <= max_levels(n); ++j) {
            const auto d = forward_multilevel(Signal(Vec(n, 200)), j);
            for (Sample s : d.approx()) CHECK(s == 200);
            for (int l = 1; l <= j; ++l)
                for (Sample v : d.detail(l)) CHECK(v == 0);
        }
}

TEST_CASE("forward_2d small golden") {
    // Rows: [1,3] -> [2 | 2], [2,0] -> [1 | -2]; columns [2,1] -> [1 | -1], [2,-2] -> [0 | -4].
    const Image img(2, 2, {1, 3, 2, 0});
    const auto dec = forward_2d(img, 1);
    CHECK(dec.coeffs == Vec{1, 0, -1, -4});
    CHECK(dec.coeffs == oracle_2d({1, 3, 2, 0}, 2, 2, 1, RoundingMode::FloorShift));
    CHECK(dec.band(1, Band::LL) == Vec{1});
    CHECK(dec.band(1, Band::HL) == Vec{0});
    CHECK(dec.band(1, Band::LH) == Vec{-1});
    CHECK(dec.band(1, Band::HH) == Vec{-4});

    // Hardware rounding truncates floor(-2/4) and floor(-4/4) differently.
    const auto hw = forward_2d(img, 1, RoundingMode::HardwareCorrected);
    CHECK(hw.coeffs == Vec{2, 0, -1, -4});
    CHECK(inverse_2d(hw) == img);
}

TEST_CASE("forward_2d constant image") {
    const Image img(4, 4, Vec(16, 9));
    const auto dec = forward_2d(img, 1);
    CHECK(dec.band(1, Band::LL) == Vec(4, 9));
    for (Band b : {Band::HL, Band::LH, Band::HH}) CHECK(dec.band(1, b) == Vec(4, 0));

    const Image big(13, 6, Vec(78, 250));
    const auto deep = forward_2d(big, max_levels_2d(13, 6));
    CHECK(deep.band(deep.levels, Band::LL) == Vec(deep.band_rect(deep.levels, Band::LL).width *
                                                      deep.band_rect(deep.levels, Band::LL).height,
                                                  250));
}

TEST_CASE("forward_2d matches separable oracle and rows match forward_1d") {
    std::mt19937_64 rng(23);
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t w = 2 + rng() % 20, h = 2 + rng() % 20;
        const Vec px = oracle::random_signal(rng, w * h);
        const int j = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_levels_2d(w, h)));
        const auto dec = forward_2d(Image(w, h, px), j);
        REQUIRE(dec.coeffs == oracle_2d(px, w, h, j, RoundingMode::FloorShift));
    }

    // Row pass of one level equals forward_1d per row: with height 2 compare
    // against a column-inverted result.
    const std::size_t w = 9, h = 5;
    const Vec px = oracle::random_signal(rng, w * h);
    const auto dec = forward_2d(Image(w, h, px), 1);
    // Undo the column pass only, then compare rows.
    Vec plane = dec.coeffs;
    for (std::size_t x = 0; x < w; ++x) {
        Vec col;
        for (std::size_t y = 0; y < h; ++y) col.push_back(plane[y * w + x]);
        SubbandPair sb{Vec(col.begin(), col.begin() + 3), Vec(col.begin() + 3, col.end()), h};
        const Vec rec = inverse_1d_samples(sb);
        for (std::size_t y = 0; y < h; ++y) plane[y * w + x] = rec[y];
    }
    for (std::size_t y = 0; y < h; ++y) {
        const auto sb = forward_1d(std::span<const Sample>(px).subspan(y * w, w));
        Vec expect = sb.approx;
        expect.insert(expect.end(), sb.detail.begin(), sb.detail.end());
        CHECK(Vec(plane.begin() + static_cast<std::ptrdiff_t>(y * w),
                  plane.begin() + static_cast<std::ptrdiff_t>((y + 1) * w)) == expect);
    }
}

TEST_CASE("2D roundtrip and errors") {
    std::mt19937_64 rng(31);
    for (RoundingMode m : {RoundingMode::FloorShift, RoundingMode::HardwareCorrected})
        for (int rep = 0; rep < 40; ++rep) {
            const std::size_t w = 2 + rng() % 40, h = 2 + rng() % 40;
            const Image img(w, h, oracle::random_signal(rng, w * h));
            const auto dec = forward_2d(img, max_levels_2d(w, h), m);
            REQUIRE(dec.coeffs.size() == w * h);
            REQUIRE(inverse_2d(dec) == img);
        }

    CHECK_THROWS_AS(forward_2d(Image(1, 4, {1, 2, 3, 4}), 1), Error);
    CHECK_THROWS_WITH_AS(forward_2d(Image(4, 2, Vec(8, 0)), 2), "level count exceeds max_levels", Error);
    CHECK_THROWS_AS(Image(2, 2, {1, 2, 3}), Error);

    auto dec = forward_2d(Image(4, 4, Vec(16, 1)), 2);
    dec.coeffs.pop_back();
    CHECK_THROWS_AS(inverse_2d(dec), Error);
}

}
