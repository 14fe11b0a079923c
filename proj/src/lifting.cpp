#include "iwt/lifting.hpp"

#include <algorithm>
#include <limits>

namespace iwt {

namespace {

Sample narrow(std::int64_t v) {
    if (v < std::numeric_limits<Sample>::min() || v > std::numeric_limits<Sample>::max())
        throw Error("coefficient exceeds 32-bit range");
    return static_cast<Sample>(v);
}

void require_parity_lengths(std::size_t even_len, std::size_t other_len) {
    if (other_len == 0 || (even_len != other_len && even_len != other_len + 1))
        throw Error("parity length mismatch");
}

// even_ext[E] -> even[E-1]
std::int64_t even_at(std::span<const Sample> even, std::size_t i) {
    return even[std::min(i, even.size() - 1)];
}

// d_ext[-1] -> d[0], d_ext[O] -> d[O-1]
std::int64_t detail_at(std::span<const Sample> d, std::ptrdiff_t i) {
    const auto last = static_cast<std::ptrdiff_t>(d.size()) - 1;
    return d[static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, last))];
}

std::int64_t prediction(std::span<const Sample> even, std::size_t n, RoundingMode mode,
                        OpTally* tally) {
    if (tally) {
        tally->adds += 1;
        tally->shifts += 1;
    }
    return floor_div_pow2(even_at(even, n) + even_at(even, n + 1), 1, mode);
}

std::int64_t update_term(std::span<const Sample> d, std::size_t n, RoundingMode mode,
                         OpTally* tally) {
    if (tally) {
        tally->adds += 1;
        tally->shifts += 1;
    }
    const auto i = static_cast<std::ptrdiff_t>(n);
    return floor_div_pow2(detail_at(d, i) + detail_at(d, i - 1), 2, mode);
}

}  // namespace

const char* to_string(RoundingMode mode) {
    return mode == RoundingMode::FloorShift ? "floor" : "hw";
}

RoundingMode parse_rounding_mode(const std::string& name) {
    if (name == "floor") return RoundingMode::FloorShift;
    if (name == "hw") return RoundingMode::HardwareCorrected;
    throw Error("unknown rounding mode '" + name + "' (expected floor or hw)");
}

Signal::Signal(Samples samples, int bit_width, Signedness signedness)
    : samples_(std::move(samples)), bit_width_(bit_width), signedness_(signedness) {
    if (samples_.empty()) throw Error("empty signal");
    if (bit_width_ < 1 || bit_width_ > kMaxBitWidth)
        throw Error("bit width must be in [1, " + std::to_string(kMaxBitWidth) + "]");
    for (Sample v : samples_) {
        if (v < min_value() || v > max_value())
            throw Error("sample " + std::to_string(v) + " not representable in " +
                        std::to_string(bit_width_) + " bits");
    }
}

Signal Signal::infer(Samples samples) {
    if (samples.empty()) throw Error("empty signal");
    const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
    const bool is_signed = *lo < 0;
    int bits = 1;
    auto fits = [&](int b) {
        if (is_signed)
            return *lo >= -(std::int64_t{1} << (b - 1)) && *hi < (std::int64_t{1} << (b - 1));
        return *hi < (std::int64_t{1} << b);
    };
    while (!fits(bits)) ++bits;
    if (bits > kMaxBitWidth) throw Error("samples exceed the supported signal width");
    return Signal(std::move(samples), bits,
                  is_signed ? Signedness::TwosComplement : Signedness::Unsigned);
}

Sample Signal::min_value() const noexcept {
    return signedness_ == Signedness::Unsigned ? 0 : -(Sample{1} << (bit_width_ - 1));
}

Sample Signal::max_value() const noexcept {
    return signedness_ == Signedness::Unsigned ? (Sample{1} << bit_width_) - 1
                                               : (Sample{1} << (bit_width_ - 1)) - 1;
}

std::int64_t floor_div_pow2(std::int64_t v, int k, RoundingMode mode) {
    if (mode == RoundingMode::HardwareCorrected && v < 0)
        v += (std::int64_t{1} << k) - 1;
    return v >> k;
}

EvenOdd split(std::span<const Sample> x) {
    if (x.empty()) throw Error("empty signal");
    EvenOdd out;
    out.even.reserve((x.size() + 1) / 2);
    out.odd.reserve(x.size() / 2);
    for (std::size_t i = 0; i < x.size(); ++i)
        (i % 2 == 0 ? out.even : out.odd).push_back(x[i]);
    return out;
}

Samples merge(std::span<const Sample> even, std::span<const Sample> odd) {
    if (even.size() != odd.size() && even.size() != odd.size() + 1)
        throw Error("parity length mismatch");
    Samples x(even.size() + odd.size());
    for (std::size_t n = 0; n < even.size(); ++n) x[2 * n] = even[n];
    for (std::size_t n = 0; n < odd.size(); ++n) x[2 * n + 1] = odd[n];
    return x;
}

Samples predict_forward(std::span<const Sample> even, std::span<const Sample> odd,
                        RoundingMode mode, BoundaryRule, OpTally* tally) {
    require_parity_lengths(even.size(), odd.size());
    Samples detail(odd.size());
    for (std::size_t n = 0; n < odd.size(); ++n) {
        detail[n] = narrow(odd[n] - prediction(even, n, mode, tally));
        if (tally) tally->adds += 1;
    }
    return detail;
}

Samples update_forward(std::span<const Sample> even, std::span<const Sample> detail,
                       RoundingMode mode, BoundaryRule, OpTally* tally) {
    require_parity_lengths(even.size(), detail.size());
    Samples approx(even.size());
    for (std::size_t n = 0; n < even.size(); ++n) {
        approx[n] = narrow(even[n] + update_term(detail, n, mode, tally));
        if (tally) tally->adds += 1;
    }
    return approx;
}

Samples update_inverse(std::span<const Sample> approx, std::span<const Sample> detail,
                       RoundingMode mode, BoundaryRule, OpTally* tally) {
    require_parity_lengths(approx.size(), detail.size());
    Samples even(approx.size());
    for (std::size_t n = 0; n < approx.size(); ++n) {
        even[n] = narrow(approx[n] - update_term(detail, n, mode, tally));
        if (tally) tally->adds += 1;
    }
    return even;
}

Samples predict_inverse(std::span<const Sample> even, std::span<const Sample> detail,
                        RoundingMode mode, BoundaryRule, OpTally* tally) {
    require_parity_lengths(even.size(), detail.size());
    Samples odd(detail.size());
    for (std::size_t n = 0; n < detail.size(); ++n) {
        odd[n] = narrow(detail[n] + prediction(even, n, mode, tally));
        if (tally) tally->adds += 1;
    }
    return odd;
}

SubbandPair forward_1d(std::span<const Sample> x, RoundingMode mode, BoundaryRule boundary,
                       OpTally* tally) {
    if (x.size() < 2) throw Error("signal too short to decompose");
    auto [even, odd] = split(x);
    SubbandPair sb;
    sb.original_length = x.size();
    sb.detail = predict_forward(even, odd, mode, boundary, tally);
    sb.approx = update_forward(even, sb.detail, mode, boundary, tally);
    return sb;
}

SubbandPair forward_1d(const Signal& x, RoundingMode mode, BoundaryRule boundary,
                       OpTally* tally) {
    return forward_1d(std::span<const Sample>(x.samples()), mode, boundary, tally);
}

Samples inverse_1d_samples(const SubbandPair& sb, RoundingMode mode, BoundaryRule boundary,
                           OpTally* tally) {
    const std::size_t n = sb.original_length;
    if (n < 2 || sb.approx.size() != (n + 1) / 2 || sb.detail.size() != n / 2)
        throw Error("subband lengths inconsistent with original length");
    const Samples even = update_inverse(sb.approx, sb.detail, mode, boundary, tally);
    const Samples odd = predict_inverse(even, sb.detail, mode, boundary, tally);
    return merge(even, odd);
}

Signal inverse_1d(const SubbandPair& sb, RoundingMode mode, BoundaryRule boundary,
                  OpTally* tally) {
    return Signal::infer(inverse_1d_samples(sb, mode, boundary, tally));
}

}  // namespace iwt
