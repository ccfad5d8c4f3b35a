#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jointdesc/behavior.hpp"
#include "jointdesc/lp.hpp"
#include "jointdesc/random.hpp"

namespace jointdesc {

enum class MembershipTest { JointFine, LocalDeterministic, LocalFriendliness, SequentialWigner };

std::string_view to_string(MembershipTest test);
std::optional<MembershipTest> parse_membership_test(std::string_view name);

// Reverse-and-remeasure scenario: Alice's final setting x~ in 1..R+1 is the
// first step at which she asks the friend (R+1 when she never does).
struct SequentialScenario {
    ScenarioDescriptor base;
    int reversals = 1;
};

// Where a row's right-hand side comes from: the behavior entry with the given
// flat index, plus a constant.
struct RowSource {
    std::optional<std::size_t> entry;
    Rational constant;
};

struct MembershipProblem {
    MembershipTest test = MembershipTest::LocalDeterministic;
    ScenarioDescriptor scenario;
    int reversals = 0;  // SequentialWigner only
    LinearFeasibilityProblem lp;
    std::vector<RowSource> rows;
    // For JointFine/LocalDeterministic: each variable's behavior coordinates,
    // i.e. the extreme points of the membership set. Empty otherwise.
    std::vector<std::vector<Rational>> extreme_points;
};

struct MembershipResult {
    MembershipProblem problem;
    FeasibilityCertificate certificate;

    bool feasible() const { return certificate.feasible(); }
};

// Variable-count caps map to SizeLimit.
MembershipProblem build_joint_fine_problem(const Behavior& b, std::uint64_t cap = kDefaultVertexCap);
MembershipProblem build_ld_problem(const Behavior& b, std::uint64_t cap = kDefaultVertexCap);
MembershipProblem build_lf_problem(const Behavior& b, std::uint64_t cap = kDefaultVertexCap);
MembershipProblem build_sw_problem(const Behavior& b, const SequentialScenario& s,
                                   std::uint64_t cap = kDefaultVertexCap);

// Joint distribution over all settings' outcomes reproducing b as marginals.
MembershipResult check_joint_fine(const Behavior& b, std::uint64_t cap = kDefaultVertexCap);
// Convex combination of deterministic strategies.
MembershipResult check_ld(const Behavior& b, std::uint64_t cap = kDefaultVertexCap);
// Local Friendliness decomposition with the friend's outcome as a hidden
// variable; needs friend_on_a and/or friend_on_b.
MembershipResult check_lf(const Behavior& b, std::uint64_t cap = kDefaultVertexCap);
// Sequential scenario with R reversals; b lives on x~ in 1..R+1.
MembershipResult check_sw_sequential(const Behavior& b, const SequentialScenario& s,
                                     std::uint64_t cap = kDefaultVertexCap);

MembershipResult run_membership(MembershipTest test, const Behavior& b, std::uint64_t cap = kDefaultVertexCap);

// Re-substitutes the certificate into the LP rows (independent verifier).
VerificationResult verify_membership(const MembershipResult& result);

// sum_k coefficients[k] * p_k <= bound holds on the membership set; the input
// behavior attains `value` > bound. Coefficients are indexed like
// Behavior::flatten(), shifted so the uniform behavior scores 0 and scaled so
// the bound is 2 whenever the bound is positive.
struct InequalityReport {
    MembershipTest test;
    ScenarioDescriptor scenario;
    std::vector<Rational> coefficients;
    Rational bound;
    Rational value;
    // True when the bound is the exact maximum over the set's extreme points
    // (JointFine/LocalDeterministic); otherwise it is the certificate's bound.
    bool bound_is_tight = false;

    Rational evaluate(const Behavior& b) const;
};

// Throws NotInfeasible on a Feasible certificate.
InequalityReport extract_inequality(const FeasibilityCertificate& certificate, const MembershipProblem& context,
                                    const Behavior& b);

struct Disagreement {
    std::string label;  // "vertex 3" or "sample 17"
    bool ld_feasible;
    bool sw_feasible;
};

struct EquivalenceReport {
    int settings_a = 2;
    int reversals = 1;
    std::uint64_t seed = 0;
    std::size_t vertices_checked = 0;
    std::size_t samples_checked = 0;
    std::size_t ld_feasible = 0;
    std::size_t ld_infeasible = 0;
    std::vector<Disagreement> disagreements;
};

// p(ab|xy) = 1/2 iff a xor b = (x-1)(y-1) mod 2 on a binary scenario.
Behavior pr_type_box(const ScenarioDescriptor& s);

// Mixture of 1-4 random deterministic vertices, the uniform point and the
// PR-type box, with weights in multiples of 1/64.
Behavior random_rational_behavior(const ScenarioDescriptor& s, Rng& rng);

// Binary settings_a x settings_a scenario, R = settings_a - 1; checks every
// deterministic vertex and `sample_count` random rational behaviors.
EquivalenceReport ld_sw_equivalence_test(std::size_t sample_count, std::uint64_t seed, int settings_a = 2);

}  // namespace jointdesc
