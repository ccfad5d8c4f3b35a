#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace jointdesc {

// Fixed monotone toy machine. The program tape is read once, left to right,
// and decoded into instructions only when execution reaches the end of what
// has been decoded so far; reading past the end of the program halts.
//
//   00        PRINT0   append 0 to the output
//   01        PRINT1   append 1 to the output
//   100       LOOP     jump to the mark, forever
//   101 bbb   REP      jump back to the mark bbb+1 more times, then fall
//                      through and re-arm (each REP keeps its own counter)
//   110       MARK     mark := index of the next instruction
//   111       HALT
//
// The mark starts at instruction 0. Every executed instruction costs one step.
inline constexpr std::string_view kToyMachineId = "jd-toy-1";

enum class ToyOp { Print0, Print1, Loop, Rep, Mark, Halt };

struct ToyInstruction {
    ToyOp op = ToyOp::Halt;
    int repeats = 0;  // REP only: bbb + 1
};

std::string to_string(const ToyInstruction& ins);

class ToyMachine {
public:
    enum class Status {
        Output,      // one bit was appended to output()
        NeedBit,     // the next instruction needs another program bit
        Halted,      // HALT executed
        Dead,        // stuck in a loop that never prints again
        OutOfSteps,  // step budget exhausted
    };

    void feed(int bit) { pending_.push_back(static_cast<std::uint8_t>(bit & 1)); }

    // Runs until one of the events above; steps accumulate across calls.
    Status run(std::uint64_t step_budget);

    const std::vector<std::uint8_t>& output() const { return output_; }
    const std::vector<ToyInstruction>& program() const { return program_; }
    std::uint64_t steps() const { return steps_; }

private:
    struct LoopSnapshot {
        std::size_t mark;
        std::vector<int> counters;
        std::size_t output_length;
    };

    std::optional<ToyInstruction> decode();

    std::vector<std::uint8_t> pending_;
    std::vector<ToyInstruction> program_;
    std::vector<int> counters_;  // per instruction; -1 means armed
    std::vector<LoopSnapshot> snapshots_;
    std::vector<std::uint8_t> output_;
    std::size_t pc_ = 0;
    std::size_t mark_ = 0;
    std::uint64_t steps_ = 0;
};

// Encodes an instruction list as program bits ("0"/"1" characters).
std::string encode_toy_program(const std::vector<ToyInstruction>& program);

}  // namespace jointdesc
