#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jointdesc/rational.hpp"

namespace jointdesc {

// Settings are 1-indexed (x = 1 is the "ask the friend" setting when a friend
// sits on that wing). Outcomes are 0-indexed.
struct ScenarioDescriptor {
    int settings_a = 2;
    int settings_b = 2;
    int outcomes_a = 2;
    int outcomes_b = 2;
    bool friend_on_a = false;
    bool friend_on_b = false;

    static ScenarioDescriptor binary(int settings_a, int settings_b, bool friend_on_a = false,
                                     bool friend_on_b = false);

    // Throws InvalidArgument when a cardinality is out of range.
    void validate() const;

    std::size_t cell_count() const { return static_cast<std::size_t>(settings_a) * settings_b; }
    std::size_t cell_size() const { return static_cast<std::size_t>(outcomes_a) * outcomes_b; }
    std::size_t entry_count() const { return cell_count() * cell_size(); }
    bool is_binary_2x2() const {
        return settings_a == 2 && settings_b == 2 && outcomes_a == 2 && outcomes_b == 2;
    }

    // Flat index of p(a,b|x,y): cells in (x,y) row-major order, each cell
    // row-major in (a,b).
    std::size_t entry_index(int x, int y, int a, int b) const {
        return (static_cast<std::size_t>(x - 1) * settings_b + (y - 1)) * cell_size() +
               static_cast<std::size_t>(a) * outcomes_b + b;
    }

    friend bool operator==(const ScenarioDescriptor&, const ScenarioDescriptor&) = default;
};

// Conditional probability table p(a,b|x,y) with exact entries. A cell may be
// absent (only readers produce that); validate_behavior reports MissingCell.
class Behavior {
public:
    using Cell = std::vector<Rational>;  // row-major outcomes_a x outcomes_b

    Behavior() = default;
    explicit Behavior(ScenarioDescriptor scenario);
    Behavior(ScenarioDescriptor scenario, std::vector<Cell> cells);

    static Behavior from_function(const ScenarioDescriptor& scenario,
                                  const std::function<Rational(int x, int y, int a, int b)>& p);
    // Inverse of flatten(); entries.size() must equal scenario.entry_count().
    static Behavior from_entries(const ScenarioDescriptor& scenario, std::span<const Rational> entries);

    const ScenarioDescriptor& scenario() const { return scenario_; }
    bool has_cell(int x, int y) const;
    const Cell& cell(int x, int y) const;  // throws MissingCell
    const Rational& operator()(int x, int y, int a, int b) const { return cell(x, y)[a * scenario_.outcomes_b + b]; }

    void require_complete() const;  // throws MissingCell naming the first gap
    std::vector<Rational> flatten() const;

    friend bool operator==(const Behavior&, const Behavior&) = default;

private:
    ScenarioDescriptor scenario_{};
    std::vector<Cell> cells_;
};

struct DeterministicStrategy {
    std::vector<int> alice;  // alice[x-1] = outcome for setting x
    std::vector<int> bob;
    std::optional<int> friend_c;  // present iff friend_on_a, equals alice[0]
    std::optional<int> friend_d;  // present iff friend_on_b, equals bob[0]

    Behavior to_behavior(const ScenarioDescriptor& scenario) const;
    friend bool operator==(const DeterministicStrategy&, const DeterministicStrategy&) = default;
};

enum class Condition { Normalization, Nonnegativity, NoSignallingA, NoSignallingB };

struct ValidationFailure {
    Condition condition;
    int x;  // 1-based
    int y;  // 1-based; for NoSignallingA the offending y (compared against y = 1)
    int a;  // -1 when not applicable
    int b;
    Rational value;  // offending entry, cell sum, or marginal difference
};

struct ValidationReport {
    bool normalization_ok = true;
    bool nonnegativity_ok = true;
    bool no_signalling_a_ok = true;  // Alice's marginal independent of y
    bool no_signalling_b_ok = true;  // Bob's marginal independent of x
    std::vector<ValidationFailure> failures;

    bool ok() const { return normalization_ok && nonnegativity_ok && no_signalling_a_ok && no_signalling_b_ok; }
};

std::string_view to_string(Condition condition);

inline constexpr std::uint64_t kDefaultVertexCap = 1'000'000;

ValidationReport validate_behavior(const Behavior& b);

// |outcomes_a|^settings_a * |outcomes_b|^settings_b, saturating at UINT64_MAX.
std::uint64_t deterministic_vertex_count(const ScenarioDescriptor& s);

// Mixed-radix order: Alice's assignment is the slow digit block, Bob's the
// fast one, setting 1 most significant. Throws SizeLimit above cap.
std::vector<DeterministicStrategy> enumerate_deterministic_vertices(const ScenarioDescriptor& s,
                                                                    std::uint64_t cap = kDefaultVertexCap);

// p(ab|xy) = 1/2 iff a xor b = (x-1)(y-1).
Behavior pr_box();
Behavior uniform_behavior(const ScenarioDescriptor& s);

// Convex combination; weights must be nonnegative and sum to 1.
Behavior mix(std::span<const Behavior> parts, std::span<const Rational> weights);

// Restriction to a subset of settings, renumbered 1..k in the given order.
// The friend flag survives only when setting 1 is kept in first position.
Behavior restrict_settings(const Behavior& b, std::span<const int> xs, std::span<const int> ys);

// E(1,1) + E(1,2) + E(2,1) - E(2,2) with outcome 0 -> +1 and 1 -> -1.
Rational chsh_value(const Behavior& b);

}  // namespace jointdesc
