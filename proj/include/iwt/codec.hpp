#pragma once

// Serialization: the IWT1 coefficient container, binary PGM (P5), plain-text
// signals, and the seeded test-signal generator.
//
// IWT1 layout (all integers little-endian):
//   offset 0  "IWT1"
//          4  version (1)
//          5  dims (1 or 2)
//          6  levels J
//          7  rounding mode (0 floor, 1 hardware-corrected)
//          8  N                      (dims = 1)
//          8  width, 12 height       (dims = 2)
//   then one int32 per coefficient in the multilevel layout.

#include "iwt/multilevel.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <variant>
#include <vector>

namespace iwt::codec {

using Container = std::variant<Decomposition, Decomposition2D>;

inline constexpr std::size_t kHeaderBytes1d = 12;
inline constexpr std::size_t kHeaderBytes2d = 16;

class ContainerError : public Error {
  public:
    enum class Kind { BadMagic, BadHeader, Truncated, CountMismatch, Io };

    ContainerError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

  private:
    Kind kind_;
};

std::vector<std::uint8_t> encode(const Decomposition& dec);
std::vector<std::uint8_t> encode(const Decomposition2D& dec);
std::vector<std::uint8_t> encode(const Container& c);
Container decode(std::span<const std::uint8_t> bytes);

// Returns the number of bytes written.
std::size_t write_container(const Container& c, std::ostream& sink);
std::size_t write_container(const Container& c, const std::filesystem::path& path);
Container read_container(std::istream& source);
Container read_container(const std::filesystem::path& path);

Image read_pgm(std::istream& in);
Image read_pgm(const std::filesystem::path& path);
void write_pgm(const Image& img, std::ostream& out);
void write_pgm(const Image& img, const std::filesystem::path& path);

// One integer per line; blank lines and '#' comments are ignored.
Signal read_signal_text(std::istream& in, int bit_width = 8,
                        Signedness signedness = Signedness::Unsigned);
Signal read_signal_text(const std::filesystem::path& path, int bit_width = 8,
                        Signedness signedness = Signedness::Unsigned);
void write_signal_text(std::span<const Sample> samples, std::ostream& out);
void write_signal_text(std::span<const Sample> samples, const std::filesystem::path& path);

inline constexpr double kTestSignalMean = 128.0;
inline constexpr double kTestSignalStddev = 32.0;

// Clamped normal samples in [0, 255]. Uniforms come from std::mt19937_64
// (53-bit mantissa draws); normals from the Box-Muller cosine branch,
// rounded to nearest. Same seed, same sequence on every platform.
Signal generate_test_signal(std::size_t count, std::uint64_t seed);

}  // namespace iwt::codec
