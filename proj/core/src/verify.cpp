#include "jointdesc/lp.hpp"

namespace jointdesc {

VerificationResult verify_certificate(const LinearFeasibilityProblem& problem, const FeasibilityCertificate& cert) {
    if (!problem.nonnegative.empty() && problem.nonnegative.size() != problem.variable_count) {
        return {false, "sign flag count differs from variable count"};
    }
    for (const auto& eq : problem.equalities) {
        if (eq.coefficients.size() != problem.variable_count) return {false, "malformed problem row"};
    }

    if (cert.feasible()) {
        const auto& x = cert.witness();
        if (x.size() != problem.variable_count) return {false, "witness has wrong length"};
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (problem.is_nonnegative(j) && x[j].sign() < 0) {
                return {false, "witness variable " + std::to_string(j) + " is negative"};
            }
        }
        for (std::size_t i = 0; i < problem.equalities.size(); ++i) {
            const auto& eq = problem.equalities[i];
            Rational lhs;
            for (std::size_t j = 0; j < x.size(); ++j) {
                if (!eq.coefficients[j].is_zero() && !x[j].is_zero()) lhs += eq.coefficients[j] * x[j];
            }
            if (lhs != eq.rhs) {
                return {false, "row " + std::to_string(i) + " evaluates to " + lhs.to_string() + ", expected " +
                                   eq.rhs.to_string()};
            }
        }
        return {true, {}};
    }

    const auto& y = cert.functional();
    if (y.size() != problem.equalities.size()) return {false, "functional has wrong length"};
    for (std::size_t j = 0; j < problem.variable_count; ++j) {
        Rational col;
        for (std::size_t i = 0; i < y.size(); ++i) {
            const auto& c = problem.equalities[i].coefficients[j];
            if (!c.is_zero() && !y[i].is_zero()) col += y[i] * c;
        }
        if (problem.is_nonnegative(j) ? col.sign() < 0 : !col.is_zero()) {
            return {false, "combined column " + std::to_string(j) + " = " + col.to_string() + " violates the cone"};
        }
    }
    Rational yb;
    for (std::size_t i = 0; i < y.size(); ++i) yb += y[i] * problem.equalities[i].rhs;
    if (yb.sign() >= 0) return {false, "y^T b = " + yb.to_string() + " is not negative"};
    return {true, {}};
}

}  // namespace jointdesc
