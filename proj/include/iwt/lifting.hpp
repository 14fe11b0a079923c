#pragma once

// Integer (5,3) lifting steps for a single decomposition level.
//
// Forward:  split -> predict -> update
//   d[n] = odd[n]  - div2^1(even[n] + even[n+1])
//   s[n] = even[n] + div2^2(d[n-1] + d[n])
// Inverse runs the same steps backwards with the signs flipped, so any
// deterministic rounding applied identically in both directions gives
// bit-exact reconstruction.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace iwt {

using Sample = std::int32_t;
using Samples = std::vector<Sample>;

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class Signedness { Unsigned, TwosComplement };

enum class RoundingMode : std::uint8_t {
    FloorShift = 0,         // floor(v / 2^k), i.e. arithmetic shift right
    HardwareCorrected = 1,  // negative sums truncate toward zero
};

enum class BoundaryRule { SymmetricMirror };

const char* to_string(RoundingMode mode);
RoundingMode parse_rounding_mode(const std::string& name);  // "floor" | "hw"

// A finite integer sequence whose samples all fit the declared width.
class Signal {
  public:
    static constexpr int kMaxBitWidth = 24;

    explicit Signal(Samples samples, int bit_width = 8,
                    Signedness signedness = Signedness::Unsigned);

    // Narrowest declaration that holds every sample (used for reconstructions).
    static Signal infer(Samples samples);

    const Samples& samples() const noexcept { return samples_; }
    std::size_t size() const noexcept { return samples_.size(); }
    int bit_width() const noexcept { return bit_width_; }
    Signedness signedness() const noexcept { return signedness_; }

    Sample min_value() const noexcept;
    Sample max_value() const noexcept;

  private:
    Samples samples_;
    int bit_width_;
    Signedness signedness_;
};

struct SubbandPair {
    Samples approx;
    Samples detail;
    std::size_t original_length = 0;

    bool operator==(const SubbandPair&) const = default;
};

// Adder and shifter uses of the reference path. A subtraction is one adder
// use; a shift by any amount is one shifter use.
struct OpTally {
    std::uint64_t adds = 0;
    std::uint64_t shifts = 0;

    OpTally& operator+=(const OpTally& o) {
        adds += o.adds;
        shifts += o.shifts;
        return *this;
    }
};

std::int64_t floor_div_pow2(std::int64_t v, int k, RoundingMode mode);

struct EvenOdd {
    Samples even;
    Samples odd;
};

EvenOdd split(std::span<const Sample> x);
Samples merge(std::span<const Sample> even, std::span<const Sample> odd);

Samples predict_forward(std::span<const Sample> even, std::span<const Sample> odd,
                        RoundingMode mode = RoundingMode::FloorShift,
                        BoundaryRule boundary = BoundaryRule::SymmetricMirror,
                        OpTally* tally = nullptr);
Samples update_forward(std::span<const Sample> even, std::span<const Sample> detail,
                       RoundingMode mode = RoundingMode::FloorShift,
                       BoundaryRule boundary = BoundaryRule::SymmetricMirror,
                       OpTally* tally = nullptr);
Samples update_inverse(std::span<const Sample> approx, std::span<const Sample> detail,
                       RoundingMode mode = RoundingMode::FloorShift,
                       BoundaryRule boundary = BoundaryRule::SymmetricMirror,
                       OpTally* tally = nullptr);
Samples predict_inverse(std::span<const Sample> even, std::span<const Sample> detail,
                        RoundingMode mode = RoundingMode::FloorShift,
                        BoundaryRule boundary = BoundaryRule::SymmetricMirror,
                        OpTally* tally = nullptr);

// One decomposition level on raw samples; length must be at least 2.
SubbandPair forward_1d(std::span<const Sample> x, RoundingMode mode = RoundingMode::FloorShift,
                       BoundaryRule boundary = BoundaryRule::SymmetricMirror,
                       OpTally* tally = nullptr);
SubbandPair forward_1d(const Signal& x, RoundingMode mode = RoundingMode::FloorShift,
                       BoundaryRule boundary = BoundaryRule::SymmetricMirror,
                       OpTally* tally = nullptr);

Samples inverse_1d_samples(const SubbandPair& sb, RoundingMode mode = RoundingMode::FloorShift,
                           BoundaryRule boundary = BoundaryRule::SymmetricMirror,
                           OpTally* tally = nullptr);
Signal inverse_1d(const SubbandPair& sb, RoundingMode mode = RoundingMode::FloorShift,
                  BoundaryRule boundary = BoundaryRule::SymmetricMirror,
                  OpTally* tally = nullptr);

}  // namespace iwt
