#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "jointdesc/rational.hpp"
#include "jointdesc/toy_machine.hpp"

namespace jointdesc {

inline constexpr int kMaxProgramLengthCap = 24;
inline constexpr std::uint64_t kMaxStepCap = 1'000'000;
inline constexpr std::size_t kMaxInputBits = 512;

struct ToyMachineConfig {
    int max_length = 16;           // L, program bits
    std::uint64_t steps = 10'000;  // T, per program
    std::string machine_id{kToyMachineId};

    void validate() const;  // CapExceeded / InvalidArgument
};

struct AlgProbEstimate {
    Rational mass;
    std::uint64_t programs_counted = 0;
    bool truncated = false;  // some program ran out of steps while still matching
};

// Lower bound on M(x): total 2^-|p| over the minimal programs of length <= L
// whose output begins with x within T steps. x is a string of '0'/'1'.
AlgProbEstimate estimate_M(std::string_view x, const ToyMachineConfig& cfg);

// estimate_M(xy) / estimate_M(x); throws ZeroBase when the base mass is 0.
Rational conditional_M(std::string_view x, std::string_view y, const ToyMachineConfig& cfg);

enum class BbRule { Indifference, Induction };

struct BbCredence {
    Rational ordinary;  // OO
    Rational thermal;   // BB
    // Induction only: M(y|x) for both continuations.
    Rational conditional_ordinary;
    Rational conditional_thermal;
};

BbCredence bb_credence(std::string_view history, std::string_view y_ordinary, std::string_view y_thermal,
                       std::uint64_t n_ordinary, std::uint64_t n_thermal, BbRule rule, const ToyMachineConfig& cfg);

// n seeded uniform bits as a '0'/'1' string.
std::string random_bits(std::size_t n, std::uint64_t seed);

}  // namespace jointdesc
