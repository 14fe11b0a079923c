#include "iwt/cli.hpp"

#include "iwt/codec.hpp"
#include "iwt/datapath.hpp"
#include "iwt/multilevel.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <optional>
#include <ostream>
#include <variant>

namespace iwt::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Per-pair figures for the direct (non-lifting) (5,3) form, as published;
// they are quoted, not computed.
constexpr int kDirectFormAdders = 8;
constexpr int kDirectFormShifters = 4;

using Input = std::variant<Signal, Image>;

struct InputOptions {
    std::string path;
    std::string format = "auto";
    int bits = 8;
    bool is_signed = false;
};

void add_input_options(CLI::App* cmd, InputOptions& in) {
    cmd->add_option("input", in.path, "Text signal (one integer per line) or binary PGM")
        ->required();
    cmd->add_option("--format", in.format, "Input format")
        ->check(CLI::IsMember({"auto", "text", "pgm"}));
    cmd->add_option("--bits", in.bits, "Declared sample width of a text signal")
        ->check(CLI::Range(1, Signal::kMaxBitWidth));
    cmd->add_flag("--signed", in.is_signed, "Text samples are two's complement");
}

Input load_input(const InputOptions& in) {
    std::string format = in.format;
    if (format == "auto") format = fs::path(in.path).extension() == ".pgm" ? "pgm" : "text";
    if (format == "pgm") return codec::read_pgm(fs::path(in.path));
    return codec::read_signal_text(fs::path(in.path), in.bits,
                                   in.is_signed ? Signedness::TwosComplement : Signedness::Unsigned);
}

// 2D inputs are streamed row by row.
Samples flatten(const Input& input) {
    if (const auto* s = std::get_if<Signal>(&input)) return s->samples();
    return std::get<Image>(input).pixels;
}

int parse_levels(const std::string& text, int max) {
    if (text == "max") {
        if (max < 1) throw Error("level count exceeds max_levels");
        return max;
    }
    int j = 0;
    try {
        std::size_t used = 0;
        j = std::stoi(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
    } catch (const std::exception&) {
        throw Error("--levels expects a positive integer or 'max'");
    }
    if (j < 1) throw Error("at least one decomposition level is required");
    if (j > max) throw Error("level count exceeds max_levels");
    return j;
}

codec::Container transform(const Input& input, const std::string& levels, RoundingMode mode,
                           OpTally* tally) {
    if (const auto* s = std::get_if<Signal>(&input))
        return forward_multilevel(*s, parse_levels(levels, max_levels(s->size())), mode,
                                  BoundaryRule::SymmetricMirror, tally);
    const Image& img = std::get<Image>(input);
    return forward_2d(img, parse_levels(levels, max_levels_2d(img.width, img.height)), mode,
                      BoundaryRule::SymmetricMirror, tally);
}

Samples reconstruct(const codec::Container& c) {
    if (const auto* d = std::get_if<Decomposition>(&c)) return inverse_multilevel_samples(*d);
    return inverse_2d(std::get<Decomposition2D>(c)).pixels;
}

std::uint64_t detail_energy(const codec::Container& c) {
    std::uint64_t e = 0;
    auto acc = [&](std::span<const Sample> v) {
        for (Sample x : v) e += static_cast<std::uint64_t>(std::int64_t{x} * x);
    };
    if (const auto* d = std::get_if<Decomposition>(&c)) {
        for (int j = 1; j <= d->levels; ++j) acc(d->detail(j));
    } else {
        const auto& d2 = std::get<Decomposition2D>(c);
        for (int j = 1; j <= d2.levels; ++j)
            for (Band b : {Band::HL, Band::LH, Band::HH}) acc(d2.band(j, b));
    }
    return e;
}

std::string describe(const codec::Container& c) {
    if (const auto* d = std::get_if<Decomposition>(&c))
        return "N=" + std::to_string(d->original_length) + " J=" + std::to_string(d->levels) +
               " mode=" + to_string(d->mode);
    const auto& d2 = std::get<Decomposition2D>(c);
    return "size=" + std::to_string(d2.width) + "x" + std::to_string(d2.height) +
           " J=" + std::to_string(d2.levels) + " mode=" + to_string(d2.mode);
}

// Index of the first differing sample, if any.
std::optional<std::size_t> first_difference(std::span<const Sample> a, std::span<const Sample> b) {
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i)
        if (a[i] != b[i]) return i;
    if (a.size() != b.size()) return n;
    return std::nullopt;
}

json count_json(const datapath::OpCount& c, std::size_t length) {
    const auto adders = datapath::per_output_pair(c.adder_uses, length);
    const auto shifters = datapath::per_output_pair(c.shifter_uses, length);
    return {{"adder_uses", c.adder_uses},
            {"shifter_uses", c.shifter_uses},
            {"register_transfers", c.register_transfers},
            {"cycles", c.cycles},
            {"adders_per_pair", adders.value()},
            {"shifters_per_pair", shifters.value()},
            {"adders_per_pair_exact", adders.str()},
            {"shifters_per_pair_exact", shifters.str()}};
}

std::string count_line(const datapath::OpCount& c, std::size_t length) {
    return "adders=" + datapath::per_output_pair(c.adder_uses, length).str() +
           " shifters=" + datapath::per_output_pair(c.shifter_uses, length).str() +
           " per pair (total adders=" + std::to_string(c.adder_uses) +
           " shifters=" + std::to_string(c.shifter_uses) +
           " transfers=" + std::to_string(c.register_transfers) +
           " cycles=" + std::to_string(c.cycles) + ")";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Integer (5,3) lifting wavelet toolkit", "iwt"};
    app.require_subcommand(1);

    // forward
    InputOptions fwd_in;
    std::string fwd_levels = "1", fwd_mode = "floor", fwd_out;
    bool fwd_json = false;
    auto* fwd = app.add_subcommand("forward", "Forward transform into an IWT1 container");
    add_input_options(fwd, fwd_in);
    fwd->add_option("--levels", fwd_levels, "Decomposition levels (integer or 'max')");
    fwd->add_option("--mode", fwd_mode, "Rounding mode")->check(CLI::IsMember({"floor", "hw"}));
    fwd->add_option("--out", fwd_out, "Output container")->required();
    fwd->add_flag("--json", fwd_json, "Machine-readable summary");

    // inverse
    std::string inv_path, inv_out, inv_format = "auto";
    auto* inv = app.add_subcommand("inverse", "Reconstruct a signal or image from a container");
    inv->add_option("container", inv_path, "IWT1 container")->required();
    inv->add_option("--out", inv_out, "Output file")->required();
    inv->add_option("--format", inv_format, "Output format (auto: text for 1D, pgm for 2D)")
        ->check(CLI::IsMember({"auto", "text", "pgm"}));

    // roundtrip
    InputOptions rt_in;
    std::string rt_levels = "1", rt_mode = "floor", rt_container;
    auto* rt = app.add_subcommand("roundtrip", "Check inverse(forward(x)) == x bit-exactly");
    add_input_options(rt, rt_in);
    auto* rt_lv = rt->add_option("--levels", rt_levels, "Decomposition levels (integer or 'max')");
    auto* rt_md = rt->add_option("--mode", rt_mode, "Rounding mode")->check(CLI::IsMember({"floor", "hw"}));
    rt->add_option("--container", rt_container,
                   "Reconstruct this container instead of transforming the input")
        ->excludes(rt_lv)
        ->excludes(rt_md);

    // ops
    InputOptions ops_in;
    std::string ops_mode = "hw";
    bool ops_json = false;
    auto* ops = app.add_subcommand("ops", "Adder/shifter counts of the lifting datapath");
    add_input_options(ops, ops_in);
    ops->add_option("--mode", ops_mode, "Rounding mode")->check(CLI::IsMember({"floor", "hw"}));
    ops->add_flag("--json", ops_json, "Machine-readable report");

    // simulate
    InputOptions sim_in;
    int sim_width = 16;
    std::string sim_mode = "hw";
    bool sim_json = false, sim_trace = false;
    auto* sim = app.add_subcommand("simulate", "Run the processing-element datapath model");
    add_input_options(sim, sim_in);
    sim->add_option("--reg-width", sim_width, "Register width in bits")->check(CLI::Range(4, 32));
    sim->add_option("--mode", sim_mode, "Rounding mode")->check(CLI::IsMember({"floor", "hw"}));
    sim->add_flag("--trace", sim_trace, "Print the emitted coefficient stream");
    sim->add_flag("--json", sim_json, "Machine-readable report");

    // gen
    std::size_t gen_count = 64;
    std::uint64_t gen_seed = 1;
    std::string gen_out;
    auto* gen = app.add_subcommand("gen", "Generate a clamped-normal 8-bit test signal");
    gen->add_option("--count", gen_count, "Number of samples")->check(CLI::PositiveNumber);
    gen->add_option("--seed", gen_seed, "Generator seed");
    gen->add_option("--out", gen_out, "Output file (stdout if omitted)");

    // schedule
    std::string sched_kind = "both", sched_mode = "hw";
    auto* sched = app.add_subcommand("schedule", "Dump the datapath microcode");
    sched->add_option("--kind", sched_kind)->check(CLI::IsMember({"analysis", "synthesis", "both"}));
    sched->add_option("--mode", sched_mode)->check(CLI::IsMember({"floor", "hw"}));

    // range
    int range_bits = 8;
    std::string range_mode = "floor";
    bool range_json = false;
    auto* range = app.add_subcommand("range", "Exhaustive single-level coefficient range search");
    range->add_option("--bits", range_bits, "Unsigned input width")->check(CLI::Range(1, 10));
    range->add_option("--mode", range_mode)->check(CLI::IsMember({"floor", "hw"}));
    range->add_flag("--json", range_json, "Machine-readable report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        const auto subs = app.get_subcommands();
        err << (subs.empty() ? app.help() : subs.front()->help());
        return kUsage;
    }

    try {
        if (*fwd) {
            const Input input = load_input(fwd_in);
            OpTally tally;
            const auto c = transform(input, fwd_levels, parse_rounding_mode(fwd_mode), &tally);
            const std::size_t bytes = codec::write_container(c, fs::path(fwd_out));
            const std::uint64_t energy = detail_energy(c);
            if (fwd_json) {
                out << json{{"container", fwd_out},
                            {"bytes", bytes},
                            {"description", describe(c)},
                            {"adders", tally.adds},
                            {"shifters", tally.shifts},
                            {"detail_energy", energy}}
                           .dump()
                    << '\n';
            } else {
                out << "forward: " << describe(c) << " adders=" << tally.adds
                    << " shifters=" << tally.shifts << " detail_energy=" << energy << " -> "
                    << fwd_out << " (" << bytes << " bytes)\n";
            }
            return kOk;
        }

        if (*inv) {
            const auto c = codec::read_container(fs::path(inv_path));
            const bool is_2d = std::holds_alternative<Decomposition2D>(c);
            std::string format = inv_format;
            if (format == "auto") format = is_2d ? "pgm" : "text";
            const Samples rec = reconstruct(c);
            if (format == "pgm") {
                if (!is_2d) throw Error("a 1D container cannot be written as PGM");
                const auto& d2 = std::get<Decomposition2D>(c);
                codec::write_pgm(Image(d2.width, d2.height, rec), fs::path(inv_out));
            } else {
                codec::write_signal_text(rec, fs::path(inv_out));
            }
            out << "inverse: " << describe(c) << " -> " << inv_out << '\n';
            return kOk;
        }

        if (*rt) {
            const Input input = load_input(rt_in);
            const Samples original = flatten(input);
            codec::Container c;
            if (!rt_container.empty()) {
                c = codec::read_container(fs::path(rt_container));
            } else {
                // Through the serialized form, as a file round trip would.
                c = codec::decode(codec::encode(
                    transform(input, rt_levels, parse_rounding_mode(rt_mode), nullptr)));
            }
            const Samples rec = reconstruct(c);
            if (const auto at = first_difference(original, rec)) {
                out << "MISMATCH at index " << *at << '\n';
                return kMismatch;
            }
            out << "LOSSLESS " << describe(c) << '\n';
            return kOk;
        }

        if (*ops) {
            const Samples x = flatten(load_input(ops_in));
            const RoundingMode mode = parse_rounding_mode(ops_mode);
            // Counts do not depend on the data; 32-bit registers avoid overflow.
            const auto a = datapath::run_analysis(x, 32, mode);
            const auto s = datapath::run_synthesis(a.subbands, 32, mode);
            if (ops_json) {
                out << json{{"signal_length", x.size()},
                            {"output_pairs", datapath::Rational{x.size(), 2}.value()},
                            {"mode", to_string(mode)},
                            {"lifting",
                             {{"analysis", count_json(a.count, x.size())},
                              {"synthesis", count_json(s.count, x.size())}}},
                            {"direct_form",
                             {{"adders_per_pair", kDirectFormAdders},
                              {"shifters_per_pair", kDirectFormShifters},
                              {"quoted", true}}}}
                           .dump(2)
                    << '\n';
            } else {
                out << "signal length " << x.size() << ", mode " << to_string(mode) << '\n'
                    << "lifting analysis:     " << count_line(a.count, x.size()) << '\n'
                    << "lifting synthesis:    " << count_line(s.count, x.size()) << '\n'
                    << "direct form (quoted): adders=" << kDirectFormAdders
                    << " shifters=" << kDirectFormShifters << " per pair\n";
            }
            return kOk;
        }

        if (*sim) {
            const Samples x = flatten(load_input(sim_in));
            const RoundingMode mode = parse_rounding_mode(sim_mode);
            datapath::AnalysisResult a;
            datapath::SynthesisResult s;
            try {
                a = datapath::run_analysis(x, sim_width, mode);
                s = datapath::run_synthesis(a.subbands, sim_width, mode);
            } catch (const datapath::DatapathError& e) {
                out << "OVERFLOW at cycle " << e.cycle() << ": " << e.what() << '\n';
                return kOverflow;
            }
            const bool analysis_ok = a.subbands == forward_1d(x, mode);
            const bool synthesis_ok = s.signal == x;
            const bool ok = analysis_ok && synthesis_ok;
            if (sim_json) {
                json stream = json::array();
                for (const auto& e : a.stream)
                    stream.push_back({{"port", e.port == datapath::Port::S ? "S" : "D"}, {"value", e.value}});
                out << json{{"verdict", ok ? "EQUIVALENT" : "MISMATCH"},
                            {"reg_width", sim_width},
                            {"mode", to_string(mode)},
                            {"analysis_cycles", a.count.cycles},
                            {"synthesis_cycles", s.count.cycles},
                            {"overflows", 0},
                            {"approx", a.subbands.approx},
                            {"detail", a.subbands.detail},
                            {"stream", stream}}
                           .dump()
                    << '\n';
            } else {
                out << (ok ? "EQUIVALENT" : "MISMATCH") << " reg_width=" << sim_width
                    << " mode=" << to_string(mode) << " analysis_cycles=" << a.count.cycles
                    << " synthesis_cycles=" << s.count.cycles << " overflows=0\n";
                if (!analysis_ok) out << "analysis differs from the reference transform\n";
                if (!synthesis_ok) out << "synthesis does not reproduce the input\n";
                if (sim_trace) {
                    for (const auto& e : a.stream)
                        out << (e.port == datapath::Port::S ? "s " : "d ") << e.value << '\n';
                }
            }
            return ok ? kOk : kMismatch;
        }

        if (*gen) {
            const Signal sig = codec::generate_test_signal(gen_count, gen_seed);
            if (gen_out.empty()) {
                codec::write_signal_text(sig.samples(), out);
            } else {
                codec::write_signal_text(sig.samples(), fs::path(gen_out));
                out << "gen: " << gen_count << " samples, seed " << gen_seed << " -> " << gen_out << '\n';
            }
            return kOk;
        }

        if (*sched) {
            const RoundingMode mode = parse_rounding_mode(sched_mode);
            if (sched_kind != "synthesis") out << datapath::dump(datapath::analysis_schedule(mode));
            if (sched_kind == "both") out << '\n';
            if (sched_kind != "analysis") out << datapath::dump(datapath::synthesis_schedule(mode));
            return kOk;
        }

        if (*range) {
            const auto r = datapath::range_analysis(range_bits, parse_rounding_mode(range_mode));
            if (range_json) {
                out << json{{"input_bits", r.input_bits},
                            {"detail_min", r.detail_min},
                            {"detail_max", r.detail_max},
                            {"approx_min", r.approx_min},
                            {"approx_max", r.approx_max},
                            {"required_signed_bits", r.required_signed_bits},
                            {"approx_required_signed_bits", r.approx_required_signed_bits}}
                           .dump()
                    << '\n';
            } else {
                out << "input " << r.input_bits << " bits: detail [" << r.detail_min << ", "
                    << r.detail_max << "] needs " << r.required_signed_bits
                    << " signed bits; approx [" << r.approx_min << ", " << r.approx_max
                    << "] needs " << r.approx_required_signed_bits << " signed bits\n";
            }
            return kOk;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}

}  // namespace iwt::cli
