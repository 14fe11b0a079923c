#include "iwt/datapath.hpp"

#include <algorithm>
#include <bitset>
#include <limits>
#include <numeric>
#include <sstream>

namespace iwt::datapath {

namespace {

MicroOp load(Loc dst) { return {Opcode::LoadIn, dst}; }
MicroOp add(Loc dst, Loc a, Loc b) { return {Opcode::Add, dst, a, b}; }
MicroOp sub(Loc dst, Loc a, Loc b) { return {Opcode::Sub2c, dst, a, b}; }
MicroOp asr(Loc dst, int k) { return {k == 1 ? Opcode::Asr1 : Opcode::Asr2, dst}; }
MicroOp correct(Loc dst, int k) { return {Opcode::CorrectNeg, dst, Loc::None, Loc::None, k}; }
MicroOp tap(Loc line, Loc src) { return {Opcode::TapDelay, line, src}; }
MicroOp emit_s(Loc src) { return {Opcode::EmitS, Loc::None, src}; }
MicroOp emit_d(Loc src) { return {Opcode::EmitD, Loc::None, src}; }

// Divide-by-2^k with the mode's rounding: optional correction, then shift.
void divide(std::vector<MicroOp>& ops, Loc reg, int k, RoundingMode mode) {
    if (mode == RoundingMode::HardwareCorrected) ops.push_back(correct(reg, k));
    ops.push_back(asr(reg, k));
}

std::vector<MicroOp> concat(std::vector<MicroOp> a, const std::vector<MicroOp>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

bool is_register(Loc l) { return l == Loc::R0 || l == Loc::R1 || l == Loc::R2; }
bool is_delay(Loc l) { return l == Loc::Dm || l == Loc::Dn; }
bool is_operand(Loc l) { return is_register(l) || is_delay(l); }

}  // namespace

const char* to_string(Opcode op) {
    switch (op) {
        case Opcode::LoadIn: return "LOAD_IN";
        case Opcode::Mov: return "MOV";
        case Opcode::Add: return "ADD";
        case Opcode::Sub2c: return "SUB_2C";
        case Opcode::Asr1: return "ASR1";
        case Opcode::Asr2: return "ASR2";
        case Opcode::CorrectNeg: return "CORRECT_NEG";
        case Opcode::TapDelay: return "TAP_DELAY";
        case Opcode::EmitS: return "EMIT_S";
        case Opcode::EmitD: return "EMIT_D";
    }
    return "?";
}

const char* to_string(Loc loc) {
    switch (loc) {
        case Loc::R0: return "R0";
        case Loc::R1: return "R1";
        case Loc::R2: return "R2";
        case Loc::Dm: return "Dm";
        case Loc::Dn: return "Dn";
        case Loc::None: return "-";
    }
    return "?";
}

std::string to_string(const MicroOp& op) {
    std::ostringstream os;
    os << to_string(op.op);
    switch (op.op) {
        case Opcode::LoadIn:
        case Opcode::Asr1:
        case Opcode::Asr2: os << ' ' << to_string(op.dst); break;
        case Opcode::CorrectNeg: os << ' ' << to_string(op.dst) << ", " << op.k; break;
        case Opcode::Mov:
        case Opcode::TapDelay: os << ' ' << to_string(op.dst) << " <- " << to_string(op.a); break;
        case Opcode::Add: os << ' ' << to_string(op.dst) << " <- " << to_string(op.a) << " + " << to_string(op.b); break;
        case Opcode::Sub2c: os << ' ' << to_string(op.dst) << " <- " << to_string(op.a) << " - " << to_string(op.b); break;
        case Opcode::EmitS:
        case Opcode::EmitD: os << ' ' << to_string(op.a); break;
    }
    return os.str();
}

const Phase& Schedule::phase(const std::string& name) const {
    for (const Phase& p : phases)
        if (p.name == name) return p;
    throw Error("schedule has no phase '" + name + "'");
}

// Analysis register map (steady state):
//   even phase x[2n+2]: R2 = x[2n+1], Dm cell = x[2n]; computes d[n] into R1.
//   odd phase x[2n+3]:  R1 = d[n], Dn cell = d[n-1], Dm latch = x[2n];
//                       computes s[n] into R2, then loads the odd sample.
Schedule analysis_schedule(RoundingMode mode) {
    using enum Loc;
    Schedule s;
    s.kind = ScheduleKind::Analysis;
    s.mode = mode;

    std::vector<MicroOp> predict = {tap(Dm, R0), add(R1, R0, Dm)};
    divide(predict, R1, 1, mode);
    predict.push_back(sub(R1, R2, R1));
    predict.push_back(emit_d(R1));

    auto update = [&](bool mirror) {
        std::vector<MicroOp> ops = {tap(Dn, R1), mirror ? add(R2, R1, R1) : add(R2, R1, Dn)};
        divide(ops, R2, 2, mode);
        ops.push_back(add(R2, R2, Dm));
        ops.push_back(emit_s(R2));
        return ops;
    };

    // Last approximation of an odd-length frame: d_ext[K] = d[K-1].
    std::vector<MicroOp> tail = {tap(Dm, R0), add(R2, R1, R1)};
    divide(tail, R2, 2, mode);
    tail.push_back(add(R2, R2, Dm));
    tail.push_back(emit_s(R2));

    s.phases = {
        {"head", {load(R0), tap(Dm, R0)}},
        {"first_odd", {load(R2)}},
        {"even", concat({load(R0)}, predict)},
        {"odd_first", concat(update(true), {load(R2)})},
        {"odd", concat(update(false), {load(R2)})},
        {"drain_even", predict},
        {"drain_odd_first", update(true)},
        {"drain_odd", update(false)},
        {"drain_tail", tail},
    };
    return s;
}

// Synthesis input stream is s0, d0, s1, d1, ... Register map (steady state):
//   s phase s[n]: R1 = even[n-1] (emitted), loads s[n] into R0.
//   d phase d[n]: R2 <- d[n]; Dn latch = d[n-1]; even[n] into R1 and Dm;
//                 odd[n-1] from Dm latch = even[n-1].
Schedule synthesis_schedule(RoundingMode mode) {
    using enum Loc;
    Schedule s;
    s.kind = ScheduleKind::Synthesis;
    s.mode = mode;

    auto undo_update = [&](bool mirror) {
        std::vector<MicroOp> ops;
        ops.push_back(mirror ? add(R1, R2, R2) : add(R1, R2, Dn));
        divide(ops, R1, 2, mode);
        ops.push_back(sub(R1, R0, R1));
        ops.push_back(tap(Dm, R1));
        return ops;
    };
    auto undo_predict = [&](Loc left, Loc right, Loc detail) {
        std::vector<MicroOp> ops = {add(R0, left, right)};
        divide(ops, R0, 1, mode);
        ops.push_back(add(R0, R0, detail));
        ops.push_back(emit_d(R0));
        return ops;
    };

    s.phases = {
        {"first_s", {load(R0)}},
        {"first_d", concat({load(R2), tap(Dn, R2)}, undo_update(true))},
        {"s", {emit_s(R1), load(R0)}},
        {"d", concat(concat({load(R2), tap(Dn, R2)}, undo_update(false)), undo_predict(R1, Dm, Dn))},
        {"drain_s", {emit_s(R1)}},
        // even_ext[K] = even[K-1]
        {"drain_d_mirror", undo_predict(R1, R1, R2)},
        // Odd-length frame: the last even needs d_ext[K] = d[K-1].
        {"drain_d_tail", concat(undo_update(true), undo_predict(R1, Dm, R2))},
    };
    return s;
}

std::size_t select_phase(const Schedule& schedule, std::size_t i, std::size_t length) {
    if (length < 2) throw Error("frame must hold at least 2 samples");
    if (i >= length + kDrainPhases) throw Error("stream position past end of frame");
    const bool even_pos = i % 2 == 0;
    const bool draining = i >= length;
    const bool even_len = length % 2 == 0;
    std::string name;
    if (schedule.kind == ScheduleKind::Analysis) {
        if (i == 0) name = "head";
        else if (i == 1) name = "first_odd";
        else if (!draining) name = even_pos ? "even" : (i == 3 ? "odd_first" : "odd");
        else if (even_pos) name = even_len ? "drain_even" : "drain_tail";
        else name = i == 3 ? "drain_odd_first" : "drain_odd";
    } else {
        if (i == 0) name = "first_s";
        else if (i == 1) name = "first_d";
        else if (!draining) name = even_pos ? "s" : "d";
        else if (even_pos) name = "drain_s";
        else name = even_len ? "drain_d_mirror" : "drain_d_tail";
    }
    for (std::size_t p = 0; p < schedule.phases.size(); ++p)
        if (schedule.phases[p].name == name) return p;
    throw Error("schedule has no phase '" + name + "'");
}

void validate(const Schedule& schedule, std::size_t max_frame) {
    auto fail = [](const Phase& p, const MicroOp& op, const std::string& why) {
        throw Error("schedule phase '" + p.name + "', op '" + to_string(op) + "': " + why);
    };

    for (const Phase& p : schedule.phases) {
        int emits = 0;
        for (const MicroOp& op : p.ops) {
            switch (op.op) {
                case Opcode::LoadIn:
                case Opcode::Asr1:
                case Opcode::Asr2:
                    if (!is_register(op.dst)) fail(p, op, "destination must be a register");
                    break;
                case Opcode::CorrectNeg:
                    if (!is_register(op.dst)) fail(p, op, "destination must be a register");
                    if (op.k < 1 || op.k > 2) fail(p, op, "correction shift must be 1 or 2");
                    break;
                case Opcode::Mov:
                    if (!is_register(op.dst) || !is_operand(op.a)) fail(p, op, "bad operands");
                    break;
                case Opcode::Add:
                case Opcode::Sub2c:
                    if (!is_register(op.dst) || !is_operand(op.a) || !is_operand(op.b))
                        fail(p, op, "bad operands");
                    break;
                case Opcode::TapDelay:
                    if (!is_delay(op.dst) || !is_register(op.a)) fail(p, op, "bad operands");
                    break;
                case Opcode::EmitS:
                case Opcode::EmitD:
                    if (!is_operand(op.a)) fail(p, op, "bad operand");
                    ++emits;
                    break;
            }
        }
        if (emits > 1) throw Error("schedule phase '" + p.name + "' emits more than once");
    }

    // Definedness walk over every frame length.
    for (std::size_t len = 2; len <= max_frame; ++len) {
        bool reg[3] = {false, false, false};
        std::deque<bool> cells[2] = {std::deque<bool>(schedule.delay_m, false),
                                     std::deque<bool>(schedule.delay_n, false)};
        bool latch[2] = {false, false};
        std::size_t emitted = 0;

        auto line = [](Loc l) { return l == Loc::Dm ? 0 : 1; };
        auto defined = [&](Loc l) {
            return is_register(l) ? reg[static_cast<int>(l)] : latch[line(l)];
        };

        for (std::size_t i = 0; i < len + kDrainPhases; ++i) {
            const Phase& p = schedule.phases[select_phase(schedule, i, len)];
            for (const MicroOp& op : p.ops) {
                for (Loc src : {op.a, op.b})
                    if (src != Loc::None && !defined(src))
                        fail(p, op, "reads " + std::string(to_string(src)) +
                                        " before it is written (frame length " +
                                        std::to_string(len) + ")");
                switch (op.op) {
                    case Opcode::LoadIn:
                        if (i >= len) fail(p, op, "loads input while draining");
                        reg[static_cast<int>(op.dst)] = true;
                        break;
                    case Opcode::Asr1:
                    case Opcode::Asr2:
                    case Opcode::CorrectNeg:
                        if (!reg[static_cast<int>(op.dst)]) fail(p, op, "modifies an unwritten register");
                        break;
                    case Opcode::Mov:
                    case Opcode::Add:
                    case Opcode::Sub2c: reg[static_cast<int>(op.dst)] = true; break;
                    case Opcode::TapDelay: {
                        auto& c = cells[line(op.dst)];
                        if (c.empty()) {
                            latch[line(op.dst)] = true;
                        } else {
                            latch[line(op.dst)] = c.front();
                            c.pop_front();
                            c.push_back(true);
                        }
                        break;
                    }
                    case Opcode::EmitS:
                    case Opcode::EmitD: ++emitted; break;
                }
            }
        }
        if (emitted != len)
            throw Error("schedule emits " + std::to_string(emitted) + " values for a frame of " +
                        std::to_string(len));
    }
}

std::string dump(const Schedule& schedule) {
    std::ostringstream os;
    os << (schedule.kind == ScheduleKind::Analysis ? "analysis" : "synthesis")
       << " schedule, mode=" << to_string(schedule.mode) << ", Dm depth " << schedule.delay_m
       << ", Dn depth " << schedule.delay_n << '\n';
    for (const Phase& p : schedule.phases) {
        os << p.name << ":\n";
        for (std::size_t c = 0; c < p.ops.size(); ++c)
            os << "  " << c << ": " << to_string(p.ops[c]) << '\n';
    }
    return os.str();
}

std::int32_t DelayLine::shift(std::int32_t v) {
    if (cells_.empty()) {
        latch_ = v;
    } else {
        latch_ = cells_.front();
        cells_.pop_front();
        cells_.push_back(v);
    }
    return latch_;
}

std::string Rational::str() const {
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

Rational per_output_pair(std::uint64_t count, std::size_t length) {
    if (length == 0) throw Error("per-pair rate needs a non-empty frame");
    // count / (length / 2) = 2 * count / length
    std::uint64_t num = 2 * count, den = length;
    const std::uint64_t g = std::gcd(num, den);
    return {num / g, den / g};
}

PeState pe_configure(std::size_t m, std::size_t n, int reg_width) {
    if (reg_width < 4 || reg_width > 32) throw Error("register width must be in [4, 32]");
    PeState pe;
    pe.delay_m = DelayLine(m);
    pe.delay_n = DelayLine(n);
    pe.reg_width = reg_width;
    return pe;
}

void pe_begin_frame(PeState& pe, std::size_t length) {
    if (length < 2) throw Error("frame must hold at least 2 samples");
    pe.frame_length = length;
    pe.position = 0;
}

bool pe_frame_done(const PeState& pe) {
    return pe.frame_length != 0 && pe.position >= pe.frame_length + kDrainPhases;
}

namespace {

std::int32_t wrap(const PeState& pe, std::int64_t v) {
    const std::uint64_t mask = (std::uint64_t{1} << pe.reg_width) - 1;
    std::uint64_t bits = static_cast<std::uint64_t>(v) & mask;
    if (bits >> (pe.reg_width - 1)) bits |= ~mask;  // sign extend
    return static_cast<std::int32_t>(static_cast<std::int64_t>(bits));
}

std::int32_t read(const PeState& pe, Loc l) {
    switch (l) {
        case Loc::R0:
        case Loc::R1:
        case Loc::R2: return pe.regs[static_cast<int>(l)];
        case Loc::Dm: return pe.delay_m.latch();
        case Loc::Dn: return pe.delay_n.latch();
        case Loc::None: break;
    }
    throw Error("micro-op reads no operand");
}

// `exact` is the mathematically correct result; `v` what the register latches.
void write(PeState& pe, Loc l, std::int64_t exact, std::int32_t v) {
    if (v != exact && !pe.overflow_flag) {
        pe.overflow_flag = true;
        pe.first_overflow_cycle = pe.count.cycles;
    }
    if (!is_register(l)) throw Error("micro-op writes a non-register");
    pe.regs[static_cast<int>(l)] = v;
}

void write(PeState& pe, Loc l, std::int64_t exact) { write(pe, l, exact, wrap(pe, exact)); }

}  // namespace

std::optional<Emission> pe_execute(PeState& pe, const MicroOp& op,
                                   std::optional<std::int32_t> input) {
    std::optional<Emission> out;
    switch (op.op) {
        case Opcode::LoadIn:
            if (!input) throw Error("LOAD_IN with no input sample");
            if (*input < pe.min_value() || *input > pe.max_value())
                throw DatapathError(DatapathError::Kind::InputRange, pe.count.cycles,
                                    "input exceeds register width (" + std::to_string(*input) +
                                        " at cycle " + std::to_string(pe.count.cycles) + ")");
            write(pe, op.dst, *input);
            ++pe.count.register_transfers;
            break;
        case Opcode::Mov:
            write(pe, op.dst, read(pe, op.a));
            ++pe.count.register_transfers;
            break;
        case Opcode::Add:
            write(pe, op.dst, std::int64_t{read(pe, op.a)} + read(pe, op.b));
            ++pe.count.adder_uses;
            break;
        case Opcode::Sub2c: {
            // a + ~b + 1 through the adder; overflow is judged on the true difference.
            const std::int64_t a = read(pe, op.a), b = read(pe, op.b);
            write(pe, op.dst, a - b, wrap(pe, a + wrap(pe, ~b) + 1));
            ++pe.count.adder_uses;
            break;
        }
        case Opcode::Asr1:
        case Opcode::Asr2: {
            const int k = op.op == Opcode::Asr1 ? 1 : 2;
            write(pe, op.dst, read(pe, op.dst) >> k);
            ++pe.count.shifter_uses;
            break;
        }
        case Opcode::CorrectNeg: {
            const std::int32_t v = read(pe, op.dst);
            if (v < 0) write(pe, op.dst, std::int64_t{v} + ((std::int64_t{1} << op.k) - 1));
            break;
        }
        case Opcode::TapDelay: {
            DelayLine& line = op.dst == Loc::Dm ? pe.delay_m : pe.delay_n;
            if (!is_delay(op.dst)) throw Error("TAP_DELAY needs a delay line destination");
            line.shift(read(pe, op.a));
            ++pe.count.register_transfers;
            break;
        }
        case Opcode::EmitS:
        case Opcode::EmitD:
            out = Emission{op.op == Opcode::EmitS ? Port::S : Port::D, read(pe, op.a)};
            ++pe.count.register_transfers;
            break;
    }
    ++pe.count.cycles;
    return out;
}

std::optional<Emission> pe_step(PeState& pe, const Schedule& schedule,
                                std::optional<std::int32_t> input) {
    if (pe.frame_length == 0) throw Error("PE has no frame armed");
    if (pe_frame_done(pe)) throw Error("frame already complete");
    if (pe.delay_m.depth() != schedule.delay_m || pe.delay_n.depth() != schedule.delay_n)
        throw Error("PE delay depths do not match the schedule");
    const bool draining = pe.position >= pe.frame_length;
    if (draining && input) throw Error("input supplied while draining");
    if (!draining && !input) throw Error("input sample required");

    const Phase& phase = schedule.phases[select_phase(schedule, pe.position, pe.frame_length)];
    std::optional<Emission> out;
    for (const MicroOp& op : phase.ops) {
        if (auto e = pe_execute(pe, op, input)) out = e;
    }
    ++pe.position;
    return out;
}

namespace {

void check_overflow(const PeState& pe) {
    if (pe.overflow_flag)
        throw DatapathError(DatapathError::Kind::Overflow, *pe.first_overflow_cycle,
                            "register overflow at cycle " +
                                std::to_string(*pe.first_overflow_cycle) + " (width " +
                                std::to_string(pe.reg_width) + ")");
}

}  // namespace

AnalysisResult run_analysis(std::span<const Sample> x, int reg_width, RoundingMode mode) {
    if (x.size() < 2) throw Error("signal too short to decompose");
    const Schedule schedule = analysis_schedule(mode);
    PeState pe = pe_configure(schedule.delay_m, schedule.delay_n, reg_width);
    pe_begin_frame(pe, x.size());

    AnalysisResult r;
    r.subbands.original_length = x.size();
    auto collect = [&](const std::optional<Emission>& e) {
        if (!e) return;
        r.stream.push_back(*e);
        (e->port == Port::S ? r.subbands.approx : r.subbands.detail).push_back(e->value);
    };
    for (Sample v : x) {
        collect(pe_step(pe, schedule, v));
        check_overflow(pe);
    }
    while (!pe_frame_done(pe)) {
        collect(pe_step(pe, schedule, std::nullopt));
        check_overflow(pe);
    }
    r.count = pe.count;
    return r;
}

SynthesisResult run_synthesis(const SubbandPair& sb, int reg_width, RoundingMode mode) {
    const std::size_t n = sb.original_length;
    if (n < 2 || sb.approx.size() != (n + 1) / 2 || sb.detail.size() != n / 2)
        throw Error("subband lengths inconsistent with original length");
    const Schedule schedule = synthesis_schedule(mode);
    PeState pe = pe_configure(schedule.delay_m, schedule.delay_n, reg_width);
    pe_begin_frame(pe, n);

    // Output multiplexer: S port carries even samples, D port odd ones.
    Samples even, odd;
    SynthesisResult r;
    auto collect = [&](const std::optional<Emission>& e) {
        if (!e) return;
        r.stream.push_back(*e);
        (e->port == Port::S ? even : odd).push_back(e->value);
    };
    for (std::size_t i = 0; i < n; ++i) {
        const Sample v = i % 2 == 0 ? sb.approx[i / 2] : sb.detail[i / 2];
        collect(pe_step(pe, schedule, v));
        check_overflow(pe);
    }
    while (!pe_frame_done(pe)) {
        collect(pe_step(pe, schedule, std::nullopt));
        check_overflow(pe);
    }
    r.signal = merge(even, odd);
    r.count = pe.count;
    return r;
}

int required_signed_bits(std::int64_t lo, std::int64_t hi) {
    int bits = 1;
    while (lo < -(std::int64_t{1} << (bits - 1)) || hi > (std::int64_t{1} << (bits - 1)) - 1) ++bits;
    return bits;
}

RangeReport range_analysis(int input_bits, RoundingMode mode) {
    if (input_bits < 1 || input_bits > 10) throw Error("range analysis supports 1..10 input bits");
    const std::int64_t top = (std::int64_t{1} << input_bits) - 1;

    RangeReport r;
    r.input_bits = input_bits;
    r.detail_min = std::numeric_limits<std::int64_t>::max();
    r.detail_max = std::numeric_limits<std::int64_t>::min();
    r.approx_min = r.detail_min;
    r.approx_max = r.detail_max;

    // Every 3-sample window (left even, odd, right even).
    for (std::int64_t left = 0; left <= top; ++left)
        for (std::int64_t odd = 0; odd <= top; ++odd)
            for (std::int64_t right = 0; right <= top; ++right) {
                const std::int64_t d = odd - floor_div_pow2(left + right, 1, mode);
                r.detail_min = std::min(r.detail_min, d);
                r.detail_max = std::max(r.detail_max, d);
            }

    // Approximations: s = e + div4(d + d') where d and d' are any details
    // reachable with e as a shared neighbour. Bit i of `reach` marks d = i - 1024,
    // bit j of `sums` marks d + d' = j - 2048.
    constexpr std::size_t kDetailBias = 1024, kSumBias = 2048;
    for (std::int64_t e = 0; e <= top; ++e) {
        std::bitset<2 * kSumBias> reach;
        for (std::int64_t odd = 0; odd <= top; ++odd)
            for (std::int64_t other = 0; other <= top; ++other)
                reach.set(static_cast<std::size_t>(odd - floor_div_pow2(e + other, 1, mode) +
                                                   static_cast<std::int64_t>(kDetailBias)));
        std::bitset<2 * kSumBias> sums;
        for (std::size_t d = 0; d < 2 * kDetailBias; ++d)
            if (reach.test(d)) sums |= reach << d;
        for (std::size_t j = 0; j < sums.size(); ++j) {
            if (!sums.test(j)) continue;
            const std::int64_t s =
                e + floor_div_pow2(static_cast<std::int64_t>(j) - static_cast<std::int64_t>(kSumBias), 2, mode);
            r.approx_min = std::min(r.approx_min, s);
            r.approx_max = std::max(r.approx_max, s);
        }
    }
    r.required_signed_bits = required_signed_bits(r.detail_min, r.detail_max);
    r.approx_required_signed_bits = required_signed_bits(r.approx_min, r.approx_max);
    return r;
}

}  // namespace iwt::datapath
