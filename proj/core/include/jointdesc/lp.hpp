#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "jointdesc/rational.hpp"

namespace jointdesc {

struct LinearEquality {
    std::vector<Rational> coefficients;
    Rational rhs;
};

// { x : A x = b, x_j >= 0 for every j flagged nonnegative }.
struct LinearFeasibilityProblem {
    std::size_t variable_count = 0;
    std::vector<LinearEquality> equalities;
    // Empty means every variable is nonnegative.
    std::vector<bool> nonnegative;

    bool is_nonnegative(std::size_t j) const { return nonnegative.empty() || nonnegative[j]; }
    // Throws DimensionMismatch.
    void validate() const;
};

struct Feasible {
    std::vector<Rational> witness;
};

// Farkas multipliers y, one per equality: y^T A >= 0 on nonnegative columns,
// y^T A = 0 on free columns, and y^T b < 0. Scaled to coprime integers.
struct Infeasible {
    std::vector<Rational> separating_functional;
};

struct FeasibilityCertificate {
    std::variant<Feasible, Infeasible> verdict;

    bool feasible() const { return std::holds_alternative<Feasible>(verdict); }
    const std::vector<Rational>& witness() const { return std::get<Feasible>(verdict).witness; }
    const std::vector<Rational>& functional() const { return std::get<Infeasible>(verdict).separating_functional; }
};

struct SolverStats {
    std::size_t pivots = 0;
    std::size_t rows = 0;
    std::size_t columns = 0;
};

// Exact phase-1 simplex, Bland's rule. Deterministic.
FeasibilityCertificate lp_feasible(const LinearFeasibilityProblem& problem, SolverStats* stats = nullptr);

struct VerificationResult {
    bool ok = false;
    std::string reason;  // empty when ok
};

// Re-multiplies the certificate against the problem with plain Rational
// arithmetic; shares no code with the solver.
VerificationResult verify_certificate(const LinearFeasibilityProblem& problem, const FeasibilityCertificate& cert);

}  // namespace jointdesc
