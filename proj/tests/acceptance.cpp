// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include "iwt/cli.hpp"
#include "iwt/codec.hpp"
#include "iwt/datapath.hpp"
#include "iwt/multilevel.hpp"

#include "oracle.hpp"

#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

using namespace iwt;
using Vec = std::vector<Sample>;

namespace {

constexpr RoundingMode kModes[] = {RoundingMode::FloorShift, RoundingMode::HardwareCorrected};

struct Outcome {
    bool pass = true;
    std::string detail;
};

template <typename F>
void for_each_signal(std::size_t len, int levels, F&& f) {
    Vec x(len, 0);
    while (true) {
        f(x);
        std::size_t i = 0;
        while (i < len && ++x[i] == levels) x[i++] = 0;
        if (i == len) return;
    }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt_seconds(double s) {
    std::ostringstream os;
    os.precision(2);
    os << std::fixed << s << " s";
    return os.str();
}

// 1. Exhaustive short signals in both modes, then >= 100,000 random 8-bit signals.
Outcome perfect_reconstruction() {
    const auto t0 = std::chrono::steady_clock::now();
    std::size_t exhaustive = 0, failures = 0;
    for (RoundingMode m : kModes)
        for (std::size_t n = 2; n <= 5; ++n)
            for_each_signal(n, 8, [&](const Vec& x) {
                ++exhaustive;
                if (inverse_1d_samples(forward_1d(x, m), m) != x) ++failures;
            });

    std::mt19937_64 rng(20240101);
    constexpr std::size_t kRandom = 100000;
    std::size_t primes = 0;
    for (std::size_t i = 0; i < kRandom; ++i) {
        const std::size_t n = 2 + i % 1023;  // every length in 2..1024
        if (i < 1023 && oracle::is_prime(n)) ++primes;
        const RoundingMode m = kModes[i % 2];
        const Vec x = oracle::random_signal(rng, n);
        if (inverse_1d_samples(forward_1d(x, m), m) != x) ++failures;
    }
    const double t = seconds_since(t0);
    Outcome o;
    o.pass = failures == 0 && t < 10.0;
    o.detail = std::to_string(exhaustive) + " exhaustive (" + std::to_string(exhaustive / 2) +
               " per mode) + " + std::to_string(kRandom) + " random, lengths 2..1024 incl. " +
               std::to_string(primes) + " prime lengths; " + std::to_string(failures) +
               " mismatches; " + fmt_seconds(t) + " (limit 10 s)";
    return o;
}

// 2. J = max_levels for every length 2..257.
Outcome multilevel_all_lengths() {
    std::mt19937_64 rng(257);
    std::size_t failures = 0, cases = 0;
    for (RoundingMode m : kModes)
        for (std::size_t n = 2; n <= 257; ++n) {
            const Vec x = oracle::random_signal(rng, n);
            const auto dec = forward_multilevel(Signal(x), max_levels(n), m);
            ++cases;
            if (dec.coeffs.size() != n || inverse_multilevel_samples(dec) != x) ++failures;
        }
    return {failures == 0, std::to_string(cases) + " signals (both modes), " +
                               std::to_string(failures) + " mismatches"};
}

// 3. 64-sample clamped-normal signal, J = 6, through the CLI.
Outcome fig5_roundtrip() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("iwt_accept_" + std::to_string(std::random_device{}()));
    fs::create_directories(dir);
    const std::string sig = (dir / "signal64.txt").string();
    auto run = [](std::vector<std::string> args, std::string& out) {
        args.insert(args.begin(), "iwt");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream os, es;
        const int code = cli::run(static_cast<int>(argv.size()), argv.data(), os, es);
        out = os.str() + es.str();
        return code;
    };
    std::string out;
    const int gen = run({"gen", "--count", "64", "--seed", "1", "--out", sig}, out);
    const int rt = run({"roundtrip", sig, "--levels", "6"}, out);
    fs::remove_all(dir);
    return {gen == 0 && rt == 0 && out.rfind("LOSSLESS", 0) == 0,
            "gen exit " + std::to_string(gen) + ", roundtrip J=6 exit " + std::to_string(rt) +
                ": " + out.substr(0, out.find('\n'))};
}

// 4. Per output pair: 4 adder uses and 2 shifter uses, synthesis equal to analysis.
Outcome table2_counts() {
    using datapath::Rational;
    bool ok = true;
    std::string detail;
    std::mt19937_64 rng(4);
    std::vector<Vec> signals = {codec::generate_test_signal(64, 1).samples()};
    for (std::size_t n : {2u, 4u, 8u, 256u}) signals.push_back(oracle::random_signal(rng, n));
    for (const Vec& x : signals) {
        const auto a = datapath::run_analysis(x, 16);
        const auto s = datapath::run_synthesis(a.subbands, 16);
        const Rational adders = datapath::per_output_pair(a.count.adder_uses, x.size());
        const Rational shifters = datapath::per_output_pair(a.count.shifter_uses, x.size());
        ok = ok && adders == Rational{4, 1} && shifters == Rational{2, 1} &&
             s.count.adder_uses == a.count.adder_uses && s.count.shifter_uses == a.count.shifter_uses;
        if (x.size() == 64)
            detail = "N=64: analysis adders/pair=" + adders.str() + " shifters/pair=" + shifters.str() +
                     "; synthesis adders=" + std::to_string(s.count.adder_uses) + " shifters=" +
                     std::to_string(s.count.shifter_uses) + " (analysis " +
                     std::to_string(a.count.adder_uses) + "/" + std::to_string(a.count.shifter_uses) + ")";
    }
    return {ok, detail + "; also N=2,4,8,256"};
}

// 5. Datapath vs reference (hardware-corrected) on the exhaustive suite at 16 bits.
Outcome simulator_equivalence() {
    std::size_t cases = 0, failures = 0, overflows = 0;
    for (std::size_t n = 2; n <= 5; ++n)
        for_each_signal(n, 8, [&](const Vec& x) {
            ++cases;
            try {
                const auto a = datapath::run_analysis(x, 16, RoundingMode::HardwareCorrected);
                const auto s = datapath::run_synthesis(a.subbands, 16, RoundingMode::HardwareCorrected);
                if (a.subbands != forward_1d(x, RoundingMode::HardwareCorrected) ||
                    s.signal != inverse_1d_samples(a.subbands, RoundingMode::HardwareCorrected) ||
                    s.signal != x)
                    ++failures;
            } catch (const datapath::DatapathError&) {
                ++overflows;
            }
        });
    return {failures == 0 && overflows == 0,
            std::to_string(cases) + " signals, " + std::to_string(failures) + " mismatches, " +
                std::to_string(overflows) + " overflow flags"};
}

// 6. Exhaustive 256^3 window search.
Outcome range_claim() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = datapath::range_analysis(8);
    const double t = seconds_since(t0);
    return {r.detail_min == -255 && r.detail_max == 255 && r.required_signed_bits == 9 && t < 60.0,
            "detail [" + std::to_string(r.detail_min) + ", " + std::to_string(r.detail_max) + "] -> " +
                std::to_string(r.required_signed_bits) + " signed bits; approx [" +
                std::to_string(r.approx_min) + ", " + std::to_string(r.approx_max) + "]; " +
                fmt_seconds(t) + " (limit 60 s)"};
}

// 7. Constants: zero details at every level. Even-slope ramps: zero interior details.
Outcome annihilation() {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> value(-100000, 100000), half_slope(-500, 500);
    std::size_t cases = 0, failures = 0;
    for (int rep = 0; rep < 2000; ++rep) {
        const std::size_t n = 2 + rng() % 400;
        const RoundingMode m = kModes[rep % 2];
        const int c = value(rng);
        const auto dec = forward_multilevel(Signal(Vec(n, c), 24, Signedness::TwosComplement),
                                            max_levels(n), m);
        ++cases;
        bool ok = true;
        for (Sample s : dec.approx()) ok = ok && s == c;
        for (int j = 1; j <= dec.levels; ++j)
            for (Sample d : dec.detail(j)) ok = ok && d == 0;

        const int slope = 2 * half_slope(rng);
        Vec ramp(n);
        for (std::size_t k = 0; k < n; ++k) ramp[k] = slope * static_cast<int>(k) + c;
        const auto sb = forward_1d(ramp, m);
        for (std::size_t i = 0; i < sb.detail.size(); ++i)
            if (2 * i + 2 < n) ok = ok && sb.detail[i] == 0;
        ++cases;
        if (!ok) ++failures;
    }
    return {failures == 0, std::to_string(cases) + " constant/ramp signals, " +
                               std::to_string(failures) + " failures"};
}

// 8. Random 8-bit images up to 64x64, every J up to the per-axis maximum.
Outcome image_roundtrip() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(88);
    std::size_t cases = 0, failures = 0, non_square = 0;
    for (int rep = 0; rep < 300; ++rep) {
        const std::size_t w = 2 + rng() % 63;
        const std::size_t h = rep % 3 == 0 ? w : 2 + rng() % 63;
        if (w != h) ++non_square;
        const Image img(w, h, oracle::random_signal(rng, w * h));
        for (int j = 1; j <= max_levels_2d(w, h); ++j) {
            const auto dec = forward_2d(img, j, kModes[(rep + j) % 2]);
            ++cases;
            if (inverse_2d(dec) != img) ++failures;
        }
    }
    for (RoundingMode m : kModes) {
        const Image img(64, 64, oracle::random_signal(rng, 64 * 64));
        ++cases;
        if (inverse_2d(forward_2d(img, 6, m)) != img) ++failures;
    }
    const double t = seconds_since(t0);
    return {failures == 0 && t < 10.0,
            std::to_string(cases) + " transforms (" + std::to_string(non_square) +
                " non-square images), " + std::to_string(failures) + " mismatches; " +
                fmt_seconds(t) + " (limit 10 s)"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"1 perfect reconstruction", perfect_reconstruction},
        {"2 multilevel, all lengths 2..257", multilevel_all_lengths},
        {"3 64-sample lossless roundtrip", fig5_roundtrip},
        {"4 operation counts per pair", table2_counts},
        {"5 simulator/reference equivalence", simulator_equivalence},
        {"6 detail range fits 9 bits", range_claim},
        {"7 annihilation", annihilation},
        {"8 2D roundtrip", image_roundtrip},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
        if (!o.pass) ++failed;
    }
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed")
              << std::endl;
    return failed == 0 ? 0 : 1;
}
