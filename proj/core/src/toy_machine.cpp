#include "jointdesc/toy_machine.hpp"

#include "jointdesc/error.hpp"

namespace jointdesc {

std::string to_string(const ToyInstruction& ins) {
    switch (ins.op) {
        case ToyOp::Print0: return "PRINT0";
        case ToyOp::Print1: return "PRINT1";
        case ToyOp::Loop: return "LOOP";
        case ToyOp::Rep: return "REP " + std::to_string(ins.repeats);
        case ToyOp::Mark: return "MARK";
        case ToyOp::Halt: return "HALT";
    }
    return "?";
}

std::optional<ToyInstruction> ToyMachine::decode() {
    const auto& b = pending_;
    if (b.size() < 2) return std::nullopt;
    std::size_t used = 0;
    ToyInstruction ins;
    if (b[0] == 0) {
        ins.op = b[1] == 0 ? ToyOp::Print0 : ToyOp::Print1;
        used = 2;
    } else {
        if (b.size() < 3) return std::nullopt;
        const int code = 2 * b[1] + b[2];
        if (code == 1) {
            if (b.size() < 6) return std::nullopt;
            ins.op = ToyOp::Rep;
            ins.repeats = 4 * b[3] + 2 * b[4] + b[5] + 1;
            used = 6;
        } else {
            ins.op = code == 0 ? ToyOp::Loop : (code == 2 ? ToyOp::Mark : ToyOp::Halt);
            used = 3;
        }
    }
    pending_.erase(pending_.begin(), pending_.begin() + static_cast<std::ptrdiff_t>(used));
    return ins;
}

ToyMachine::Status ToyMachine::run(std::uint64_t step_budget) {
    while (true) {
        if (pc_ == program_.size()) {
            auto ins = decode();
            if (!ins) return Status::NeedBit;
            program_.push_back(*ins);
            counters_.push_back(-1);
        }
        if (steps_ >= step_budget) return Status::OutOfSteps;
        ++steps_;
        const ToyInstruction ins = program_[pc_];
        switch (ins.op) {
            case ToyOp::Print0:
            case ToyOp::Print1:
                output_.push_back(ins.op == ToyOp::Print1 ? 1 : 0);
                ++pc_;
                return Status::Output;
            case ToyOp::Mark:
                mark_ = ++pc_;
                break;
            case ToyOp::Halt:
                return Status::Halted;
            case ToyOp::Rep: {
                int& c = counters_[pc_];
                if (c < 0) c = ins.repeats;
                if (c > 0) {
                    --c;
                    pc_ = mark_;
                } else {
                    c = -1;
                    ++pc_;
                }
                break;
            }
            case ToyOp::Loop: {
                // No bits are read after the first LOOP, so a repeated state
                // with no new output means the machine never prints again.
                for (const auto& s : snapshots_) {
                    if (s.mark == mark_ && s.counters == counters_) {
                        if (s.output_length == output_.size()) return Status::Dead;
                    }
                }
                snapshots_.push_back({mark_, counters_, output_.size()});
                pc_ = mark_;
                break;
            }
        }
    }
}

std::string encode_toy_program(const std::vector<ToyInstruction>& program) {
    std::string bits;
    for (const auto& ins : program) {
        switch (ins.op) {
            case ToyOp::Print0: bits += "00"; break;
            case ToyOp::Print1: bits += "01"; break;
            case ToyOp::Loop: bits += "100"; break;
            case ToyOp::Mark: bits += "110"; break;
            case ToyOp::Halt: bits += "111"; break;
            case ToyOp::Rep: {
                if (ins.repeats < 1 || ins.repeats > 8) {
                    throw Error(ErrorKind::InvalidArgument, "REP repeats must be in 1..8");
                }
                const int v = ins.repeats - 1;
                bits += "101";
                bits += static_cast<char>('0' + ((v >> 2) & 1));
                bits += static_cast<char>('0' + ((v >> 1) & 1));
                bits += static_cast<char>('0' + (v & 1));
                break;
            }
        }
    }
    return bits;
}

}  // namespace jointdesc
