#include "iwt/codec.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <iterator>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace iwt::codec {

namespace {

constexpr char kMagic[4] = {'I', 'W', 'T', '1'};
constexpr std::uint8_t kVersion = 1;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{b[at + static_cast<std::size_t>(i)]} << (8 * i);
    return v;
}

std::uint32_t checked_u32(std::size_t v, const char* what) {
    if (v > 0xFFFFFFFFu) throw ContainerError(ContainerError::Kind::BadHeader, std::string(what) + " exceeds 32 bits");
    return static_cast<std::uint32_t>(v);
}

void put_header(std::vector<std::uint8_t>& out, std::uint8_t dims, int levels, RoundingMode mode) {
    out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
    out.push_back(kVersion);
    out.push_back(dims);
    out.push_back(static_cast<std::uint8_t>(levels));
    out.push_back(static_cast<std::uint8_t>(mode));
}

void put_coeffs(std::vector<std::uint8_t>& out, std::span<const Sample> coeffs) {
    for (Sample c : coeffs) put_u32(out, static_cast<std::uint32_t>(c));
}

Samples get_coeffs(std::span<const std::uint8_t> bytes, std::size_t offset, std::size_t count) {
    const std::size_t need = offset + 4 * count;
    if (bytes.size() < need)
        throw ContainerError(ContainerError::Kind::Truncated,
                             "truncated container: expected " + std::to_string(need) +
                                 " bytes, got " + std::to_string(bytes.size()));
    if (bytes.size() > need)
        throw ContainerError(ContainerError::Kind::CountMismatch,
                             "coefficient count mismatch: " + std::to_string(bytes.size() - need) +
                                 " trailing bytes");
    Samples out(count);
    for (std::size_t i = 0; i < count; ++i)
        out[i] = static_cast<Sample>(get_u32(bytes, offset + 4 * i));
    return out;
}

[[noreturn]] void bad_header(const std::string& what) {
    throw ContainerError(ContainerError::Kind::BadHeader, what);
}

}  // namespace

std::vector<std::uint8_t> encode(const Decomposition& dec) {
    if (dec.coeffs.size() != dec.original_length ||
        dec.level_lengths != level_lengths_for(dec.original_length, dec.levels))
        throw Error("inconsistent decomposition");
    std::vector<std::uint8_t> out;
    out.reserve(kHeaderBytes1d + 4 * dec.coeffs.size());
    put_header(out, 1, dec.levels, dec.mode);
    put_u32(out, checked_u32(dec.original_length, "signal length"));
    put_coeffs(out, dec.coeffs);
    return out;
}

std::vector<std::uint8_t> encode(const Decomposition2D& dec) {
    if (dec.coeffs.size() != dec.width * dec.height || dec.levels < 1 ||
        dec.levels > max_levels_2d(dec.width, dec.height))
        throw Error("inconsistent decomposition");
    std::vector<std::uint8_t> out;
    out.reserve(kHeaderBytes2d + 4 * dec.coeffs.size());
    put_header(out, 2, dec.levels, dec.mode);
    put_u32(out, checked_u32(dec.width, "image width"));
    put_u32(out, checked_u32(dec.height, "image height"));
    put_coeffs(out, dec.coeffs);
    return out;
}

std::vector<std::uint8_t> encode(const Container& c) {
    return std::visit([](const auto& d) { return encode(d); }, c);
}

Container decode(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4 || !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin()))
        throw ContainerError(ContainerError::Kind::BadMagic, "not an IWT1 file");
    if (bytes.size() < 8)
        throw ContainerError(ContainerError::Kind::Truncated, "truncated container header");
    if (bytes[4] != kVersion) bad_header("unsupported IWT1 version " + std::to_string(bytes[4]));
    const std::uint8_t dims = bytes[5];
    const int levels = bytes[6];
    if (bytes[7] > 1) bad_header("unknown rounding mode " + std::to_string(bytes[7]));
    const auto mode = static_cast<RoundingMode>(bytes[7]);

    if (dims == 1) {
        if (bytes.size() < kHeaderBytes1d)
            throw ContainerError(ContainerError::Kind::Truncated, "truncated container header");
        Decomposition dec;
        dec.original_length = get_u32(bytes, 8);
        if (levels < 1 || levels > max_levels(dec.original_length))
            bad_header("level count " + std::to_string(levels) + " invalid for length " +
                       std::to_string(dec.original_length));
        dec.levels = levels;
        dec.mode = mode;
        dec.level_lengths = level_lengths_for(dec.original_length, levels);
        dec.coeffs = get_coeffs(bytes, kHeaderBytes1d, dec.original_length);
        return dec;
    }
    if (dims == 2) {
        if (bytes.size() < kHeaderBytes2d)
            throw ContainerError(ContainerError::Kind::Truncated, "truncated container header");
        Decomposition2D dec;
        dec.width = get_u32(bytes, 8);
        dec.height = get_u32(bytes, 12);
        if (dec.width < 2 || dec.height < 2) bad_header("image must be at least 2x2");
        if (levels < 1 || levels > max_levels_2d(dec.width, dec.height))
            bad_header("level count " + std::to_string(levels) + " invalid for image size");
        dec.levels = levels;
        dec.mode = mode;
        dec.coeffs = get_coeffs(bytes, kHeaderBytes2d, dec.width * dec.height);
        return dec;
    }
    bad_header("unsupported dimension count " + std::to_string(dims));
}

std::size_t write_container(const Container& c, std::ostream& sink) {
    const auto bytes = encode(c);
    sink.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!sink) throw ContainerError(ContainerError::Kind::Io, "failed to write container");
    return bytes.size();
}

std::size_t write_container(const Container& c, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ContainerError(ContainerError::Kind::Io, "cannot open " + path.string() + " for writing");
    return write_container(c, out);
}

Container read_container(std::istream& source) {
    const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(source)),
                                          std::istreambuf_iterator<char>());
    if (source.bad()) throw ContainerError(ContainerError::Kind::Io, "failed to read container");
    return decode(bytes);
}

Container read_container(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ContainerError(ContainerError::Kind::Io, "cannot open " + path.string());
    return read_container(in);
}

namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string pgm_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {}
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) return tok;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    return tok;
}

std::size_t pgm_number(std::istream& in, const char* field) {
    const std::string tok = pgm_token(in);
    if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); }))
        throw Error(std::string("malformed PGM header: bad ") + field);
    return std::stoul(tok);
}

}  // namespace

Image read_pgm(std::istream& in) {
    const std::string magic = pgm_token(in);
    if (magic == "P2") throw Error("unsupported PGM variant (P2 ASCII); only binary P5 is read");
    if (magic != "P5") throw Error("malformed PGM header: not a PGM file");
    const std::size_t width = pgm_number(in, "width");
    const std::size_t height = pgm_number(in, "height");
    const std::size_t maxval = pgm_number(in, "maxval");
    if (width == 0 || height == 0) throw Error("malformed PGM header: zero dimension");
    if (maxval == 0 || maxval > 255) throw Error("unsupported PGM maxval " + std::to_string(maxval) + " (must be 1..255)");

    Samples px(width * height);
    for (auto& p : px) {
        const int c = in.get();
        if (c == EOF) throw Error("truncated PGM pixel data");
        if (static_cast<std::size_t>(c) > maxval) throw Error("PGM pixel exceeds maxval");
        p = c;
    }
    return Image(width, height, std::move(px), 8);
}

Image read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    return read_pgm(in);
}

void write_pgm(const Image& img, std::ostream& out) {
    if (img.pixels.size() != img.width * img.height) throw Error("image size mismatch");
    out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
    for (Sample p : img.pixels) {
        if (p < 0 || p > 255) throw Error("pixel " + std::to_string(p) + " does not fit 8-bit PGM");
        out.put(static_cast<char>(p));
    }
    if (!out) throw Error("failed to write PGM");
}

void write_pgm(const Image& img, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    write_pgm(img, out);
}

Signal read_signal_text(std::istream& in, int bit_width, Signedness signedness) {
    Samples samples;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        long long v;
        if (!(ls >> v)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            throw Error("line " + std::to_string(lineno) + ": not an integer");
        }
        std::string rest;
        if (ls >> rest) throw Error("line " + std::to_string(lineno) + ": expected one integer");
        if (v < INT32_MIN || v > INT32_MAX) throw Error("line " + std::to_string(lineno) + ": value out of range");
        samples.push_back(static_cast<Sample>(v));
    }
    return Signal(std::move(samples), bit_width, signedness);
}

Signal read_signal_text(const std::filesystem::path& path, int bit_width, Signedness signedness) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    return read_signal_text(in, bit_width, signedness);
}

void write_signal_text(std::span<const Sample> samples, std::ostream& out) {
    for (Sample v : samples) out << v << '\n';
    if (!out) throw Error("failed to write signal");
}

void write_signal_text(std::span<const Sample> samples, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    write_signal_text(samples, out);
}

Signal generate_test_signal(std::size_t count, std::uint64_t seed) {
    if (count == 0) throw Error("sample count must be positive");
    std::mt19937_64 rng(seed);
    auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };  // [0, 1)

    Samples out;
    out.reserve(count);
    while (out.size() < count) {
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
        const long v = std::lround(kTestSignalMean + kTestSignalStddev * z);
        out.push_back(static_cast<Sample>(std::clamp(v, 0L, 255L)));
    }
    return Signal(std::move(out), 8, Signedness::Unsigned);
}

}  // namespace iwt::codec
