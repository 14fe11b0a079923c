#pragma once

// Cycle-level model of the shift-add lifting datapath.
//
// One processing element (PE) holds three fixed-width two's-complement
// registers R0..R2, two programmable delay lines Dm and Dn, a single adder
// and a barrel shifter. A Schedule is microcode: one micro-op list per
// stream phase. The sequencer picks the phase from the sample position, so
// head and tail phases implement the mirror boundary without extra storage.
//
// Every micro-op takes one cycle. ADD and SUB_2C are adder uses, ASR1 and
// ASR2 are shifter uses. CORRECT_NEG biases a negative register by 2^k - 1
// ahead of the shift so the division truncates toward zero.

#include "iwt/lifting.hpp"

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

namespace iwt::datapath {

enum class Opcode : std::uint8_t {
    LoadIn,      // dst <- input port
    Mov,         // dst <- a
    Add,         // dst <- a + b
    Sub2c,       // dst <- a + ~b + 1
    Asr1,        // dst <- dst >> 1
    Asr2,        // dst <- dst >> 2
    CorrectNeg,  // if dst < 0: dst <- dst + (2^k - 1)
    TapDelay,    // shift a into delay line dst; the value falling out is latched
    EmitS,       // output port S <- a
    EmitD,       // output port D <- a
};

// Register or delay line. As an operand a delay line reads its output latch.
enum class Loc : std::uint8_t { R0, R1, R2, Dm, Dn, None };

struct MicroOp {
    Opcode op;
    Loc dst = Loc::None;
    Loc a = Loc::None;
    Loc b = Loc::None;
    int k = 0;  // CorrectNeg shift amount
};

const char* to_string(Opcode op);
const char* to_string(Loc loc);
std::string to_string(const MicroOp& op);

enum class ScheduleKind { Analysis, Synthesis };

struct Phase {
    std::string name;
    std::vector<MicroOp> ops;
};

struct Schedule {
    ScheduleKind kind = ScheduleKind::Analysis;
    RoundingMode mode = RoundingMode::HardwareCorrected;
    std::size_t delay_m = 1;
    std::size_t delay_n = 1;
    std::vector<Phase> phases;

    const Phase& phase(const std::string& name) const;
};

Schedule analysis_schedule(RoundingMode mode = RoundingMode::HardwareCorrected);
Schedule synthesis_schedule(RoundingMode mode = RoundingMode::HardwareCorrected);

// Index into schedule.phases for stream position `index` of a frame of
// `length` samples. Positions length and length + 1 are drain phases.
std::size_t select_phase(const Schedule& schedule, std::size_t index, std::size_t length);
inline constexpr std::size_t kDrainPhases = 2;

// Operand legality, at most one emit per phase, and no read of a register,
// delay cell or latch before it is written on any frame length up to
// `max_frame`. Throws Error naming the offending phase and op.
void validate(const Schedule& schedule, std::size_t max_frame = 16);

std::string dump(const Schedule& schedule);

class DelayLine {
  public:
    explicit DelayLine(std::size_t depth = 0) : cells_(depth, 0) {}

    // Shifts `v` in; returns the value pushed `depth` shifts ago (v itself at depth 0).
    std::int32_t shift(std::int32_t v);
    std::size_t depth() const noexcept { return cells_.size(); }
    std::int32_t latch() const noexcept { return latch_; }

  private:
    std::deque<std::int32_t> cells_;
    std::int32_t latch_ = 0;
};

struct OpCount {
    std::uint64_t adder_uses = 0;
    std::uint64_t shifter_uses = 0;
    std::uint64_t register_transfers = 0;
    std::uint64_t cycles = 0;

    bool operator==(const OpCount&) const = default;
};

struct Rational {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    bool operator==(const Rational&) const = default;
    bool is_integer() const { return den == 1; }
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const;
};

// count / (length / 2), reduced.
Rational per_output_pair(std::uint64_t count, std::size_t length);

struct PeState {
    std::int32_t regs[3] = {0, 0, 0};
    DelayLine delay_m;
    DelayLine delay_n;
    int reg_width = 9;
    bool overflow_flag = false;
    std::optional<std::uint64_t> first_overflow_cycle;

    // Sequencer.
    std::size_t frame_length = 0;
    std::size_t position = 0;
    OpCount count;

    std::int32_t min_value() const noexcept {
        return static_cast<std::int32_t>(-(std::int64_t{1} << (reg_width - 1)));
    }
    std::int32_t max_value() const noexcept {
        return static_cast<std::int32_t>((std::int64_t{1} << (reg_width - 1)) - 1);
    }
};

enum class Port { S, D };

struct Emission {
    Port port;
    std::int32_t value;

    bool operator==(const Emission&) const = default;
};

class DatapathError : public Error {
  public:
    enum class Kind { InputRange, Overflow };

    DatapathError(Kind kind, std::uint64_t cycle, const std::string& what)
        : Error(what), kind_(kind), cycle_(cycle) {}

    Kind kind() const noexcept { return kind_; }
    std::uint64_t cycle() const noexcept { return cycle_; }

  private:
    Kind kind_;
    std::uint64_t cycle_;
};

PeState pe_configure(std::size_t m, std::size_t n, int reg_width);

// Arms the sequencer for a frame of `length` stream samples.
void pe_begin_frame(PeState& pe, std::size_t length);
bool pe_frame_done(const PeState& pe);

// Executes one micro-op. Wraparound is flagged, never silent.
std::optional<Emission> pe_execute(PeState& pe, const MicroOp& op,
                                   std::optional<std::int32_t> input = std::nullopt);

// Runs the phase selected for the current stream position. `input` is
// required while position < frame_length and must be empty while draining.
std::optional<Emission> pe_step(PeState& pe, const Schedule& schedule,
                                 std::optional<std::int32_t> input);

struct AnalysisResult {
    SubbandPair subbands;
    OpCount count;
    std::vector<Emission> stream;
};

struct SynthesisResult {
    Samples signal;
    OpCount count;
    std::vector<Emission> stream;
};

// Throws DatapathError if any input does not fit or any register overflows.
AnalysisResult run_analysis(std::span<const Sample> x, int reg_width = 16,
                            RoundingMode mode = RoundingMode::HardwareCorrected);
SynthesisResult run_synthesis(const SubbandPair& sb, int reg_width = 16,
                              RoundingMode mode = RoundingMode::HardwareCorrected);

struct RangeReport {
    int input_bits = 0;
    std::int64_t detail_min = 0;
    std::int64_t detail_max = 0;
    std::int64_t approx_min = 0;
    std::int64_t approx_max = 0;
    int required_signed_bits = 0;         // detail
    int approx_required_signed_bits = 0;
};

int required_signed_bits(std::int64_t lo, std::int64_t hi);

// Exhaustive single-level extrema for unsigned inputs of `input_bits` (1..10).
RangeReport range_analysis(int input_bits, RoundingMode mode = RoundingMode::FloorShift);

}  // namespace iwt::datapath
