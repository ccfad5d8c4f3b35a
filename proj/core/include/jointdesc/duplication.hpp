#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "jointdesc/rational.hpp"

namespace jointdesc {

enum class Coin { Heads, Tails };

std::string_view to_string(Coin c);

struct DuplicationExperiment {
    std::uint64_t labs = 1;        // N
    std::uint64_t multiplier = 2;  // M; 1 means no duplication
    Rational heads_probability{1, 2};
    Rational epsilon{1, 20};
    Rational price{37, 60};  // 2/3 - epsilon for the defaults

    // Price defaults to 2/3 - epsilon.
    static DuplicationExperiment make(std::uint64_t labs, std::uint64_t multiplier,
                                      Rational q = Rational(1, 2), Rational epsilon = Rational(1, 20));
    void validate() const;  // InvalidArgument
};

struct CredenceRule {
    enum class Kind { ElgaNUI, Reflection, CustomWeights };
    Kind kind = Kind::ElgaNUI;
    // CustomWeights: label -> nonnegative weight. For coin outcomes the labels
    // are "heads" and "tails" and the weight replaces the copy count m_i.
    std::map<std::string, Rational> weights;

    static CredenceRule elga() { return {Kind::ElgaNUI, {}}; }
    static CredenceRule reflection() { return {Kind::Reflection, {}}; }
    static CredenceRule custom(std::map<std::string, Rational> w) { return {Kind::CustomWeights, std::move(w)}; }
    // "elga", "reflection", or "custom:heads=1/3,tails=2/3".
    static CredenceRule parse(std::string_view text);
    std::string name() const;
};

enum class AgentRole { Freya, Wigner };

inline bool duplicated_on_heads(AgentRole r) { return r == AgentRole::Freya; }
std::string_view to_string(AgentRole r);

struct CoinCredence {
    Rational heads;
    Rational tails;
};

using LabelDistribution = std::vector<std::pair<std::string, Rational>>;

// Credence over which centred world one occupies. Throws EmptyCounts.
LabelDistribution self_locate(const std::vector<std::pair<std::string, std::uint64_t>>& counts,
                              const CredenceRule& rule);

// Single-lab credence about the coin for the given role.
CoinCredence credence_outcome(const CredenceRule& rule, const DuplicationExperiment& e, AgentRole role);

// Copy-weighted distribution of the number of Heads labs, k = 0..N.
std::vector<Rational> heads_count_distribution(std::uint64_t labs, std::uint64_t multiplier,
                                               const Rational& q = Rational(1, 2));

struct BinomialCredence {
    CoinCredence credence;
    Rational normalization;  // c
};

// Freya's total credence, summed over the copy-weighted Heads counts.
BinomialCredence credence_via_binomial(std::uint64_t labs, std::uint64_t multiplier,
                                       const Rational& q = Rational(1, 2));

struct Estimate {
    double mean = 0.0;
    double standard_error = 0.0;
};

struct RunRecord {
    std::uint64_t heads_labs = 0;
    std::uint64_t freya_copies = 0;
    std::uint64_t wigner_copies = 0;
    std::uint64_t freya_tails_copies = 0;
    std::uint64_t wigner_tails_copies = 0;
};

struct SimulationResult {
    DuplicationExperiment experiment;
    std::uint64_t runs = 0;
    std::uint64_t seed = 0;
    std::vector<RunRecord> records;

    // Pooled over all runs: fraction of copies sitting in a Tails lab and mean
    // profit per copy. Standard errors treat runs as the independent units.
    Estimate freya_tails_fraction;
    Estimate wigner_tails_fraction;
    Estimate freya_profit;
    Estimate wigner_profit;
    Estimate heads_fraction;  // per lab

    // Closed-form expectations for the estimates above.
    Rational expected_freya_tails;
    Rational expected_wigner_tails;
    Rational expected_freya_profit;
    Rational expected_wigner_profit;

    // Freya copies = heads*M + tails and Wigner copies = N on every run.
    bool bookkeeping_ok() const;
};

// Every copy buys one ticket at e.price that pays 1 iff its lab's coin shows
// Heads. Run r draws from Rng(mix_seed(seed, r)).
SimulationResult simulate_betting(const DuplicationExperiment& e, std::uint64_t runs, std::uint64_t seed);

// CSV rows run,role,lab,outcome,copies,bought,profit for the same draws as
// simulate_betting; profit is the lab's total for that role.
void write_betting_trace(std::ostream& out, const DuplicationExperiment& e, std::uint64_t runs, std::uint64_t seed);

struct ConsistencyReport {
    std::uint64_t multiplier = 0;
    Rational freya_tails;
    Rational wigner_tails;
    bool consistent = true;
};

// N = 1: Freya sees Tails iff Wigner does, so consistent agents must agree.
ConsistencyReport check_cp_consistency(const CredenceRule& rule_f, const CredenceRule& rule_w,
                                       std::uint64_t multiplier, const Rational& q = Rational(1, 2));

}  // namespace jointdesc
