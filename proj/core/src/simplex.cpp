#include <algorithm>

#include "jointdesc/error.hpp"
#include "jointdesc/lp.hpp"

namespace jointdesc {

void LinearFeasibilityProblem::validate() const {
    if (!nonnegative.empty() && nonnegative.size() != variable_count) {
        throw Error(ErrorKind::DimensionMismatch, "sign flags: expected " + std::to_string(variable_count) +
                                                      ", got " + std::to_string(nonnegative.size()));
    }
    for (std::size_t i = 0; i < equalities.size(); ++i) {
        if (equalities[i].coefficients.size() != variable_count) {
            throw Error(ErrorKind::DimensionMismatch,
                        "row " + std::to_string(i) + " has " + std::to_string(equalities[i].coefficients.size()) +
                            " coefficients, expected " + std::to_string(variable_count));
        }
    }
}

namespace {

// Scale to coprime integers (sign preserved).
std::vector<Rational> to_primitive_integers(const std::vector<mpq_class>& v) {
    mpz_class lcm_den = 1;
    for (const auto& q : v) {
        if (q != 0) mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), q.get_den_mpz_t());
    }
    std::vector<mpz_class> ints;
    ints.reserve(v.size());
    mpz_class g = 0;
    for (const auto& q : v) {
        mpz_class n = q.get_num() * (lcm_den / q.get_den());
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), n.get_mpz_t());
        ints.push_back(std::move(n));
    }
    std::vector<Rational> out;
    out.reserve(v.size());
    for (auto& n : ints) out.emplace_back(mpq_class(g == 0 ? n : mpz_class(n / g)));
    return out;
}

class Phase1Tableau {
public:
    explicit Phase1Tableau(const LinearFeasibilityProblem& p) : problem_(p) {
        rows_ = p.equalities.size();
        // Column map: each variable gets a "+" column; free variables also a "-" column.
        for (std::size_t j = 0; j < p.variable_count; ++j) {
            column_var_.push_back({j, +1});
            if (!p.is_nonnegative(j)) column_var_.push_back({j, -1});
        }
        structural_ = column_var_.size();
        cols_ = structural_ + rows_;

        row_sign_.assign(rows_, 1);
        tab_.assign(rows_, std::vector<mpq_class>(cols_ + 1));
        for (std::size_t i = 0; i < rows_; ++i) {
            const auto& eq = p.equalities[i];
            row_sign_[i] = eq.rhs.sign() < 0 ? -1 : 1;
            for (std::size_t k = 0; k < structural_; ++k) {
                const auto& [var, sgn] = column_var_[k];
                const auto& c = eq.coefficients[var].value();
                if (c != 0) tab_[i][k] = (sgn * row_sign_[i] > 0) ? c : mpq_class(-c);
            }
            tab_[i][structural_ + i] = 1;
            tab_[i][cols_] = row_sign_[i] > 0 ? eq.rhs.value() : mpq_class(-eq.rhs.value());
        }
        basis_.resize(rows_);
        for (std::size_t i = 0; i < rows_; ++i) basis_[i] = structural_ + i;

        reduced_.assign(cols_, 0);
        objective_ = 0;
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t k = 0; k < structural_; ++k) {
                if (tab_[i][k] != 0) reduced_[k] -= tab_[i][k];
            }
            objective_ += tab_[i][cols_];
        }
    }

    void solve() {
        while (objective_ != 0) {
            std::size_t enter = cols_;
            for (std::size_t k = 0; k < cols_; ++k) {
                if (sgn(reduced_[k]) < 0) {
                    enter = k;
                    break;
                }
            }
            if (enter == cols_) return;  // optimal with positive infeasibility

            std::size_t leave = rows_;
            mpq_class best_ratio;
            for (std::size_t i = 0; i < rows_; ++i) {
                if (sgn(tab_[i][enter]) <= 0) continue;
                mpq_class ratio = tab_[i][cols_] / tab_[i][enter];
                if (leave == rows_ || ratio < best_ratio || (ratio == best_ratio && basis_[i] < basis_[leave])) {
                    leave = i;
                    best_ratio = std::move(ratio);
                }
            }
            // Phase 1 is bounded below by zero, so an entering column always has a positive entry.
            if (leave == rows_) throw Error(ErrorKind::InvalidArgument, "phase-1 simplex unbounded (internal)");
            pivot(leave, enter);
        }
    }

    FeasibilityCertificate certificate() const {
        if (objective_ == 0) {
            std::vector<mpq_class> x(problem_.variable_count);
            for (std::size_t i = 0; i < rows_; ++i) {
                if (basis_[i] >= structural_) continue;
                const auto& [var, sgn] = column_var_[basis_[i]];
                if (sgn > 0) x[var] += tab_[i][cols_];
                else x[var] -= tab_[i][cols_];
            }
            std::vector<Rational> w;
            w.reserve(x.size());
            for (auto& v : x) w.emplace_back(std::move(v));
            return {Feasible{std::move(w)}};
        }
        // Phase-1 duals y_i = 1 - reduced cost of artificial i; the Farkas
        // functional for the original rows is -row_sign * y.
        std::vector<mpq_class> f(rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            mpq_class y = 1 - reduced_[structural_ + i];
            f[i] = row_sign_[i] > 0 ? mpq_class(-y) : y;
        }
        return {Infeasible{to_primitive_integers(f)}};
    }

    std::size_t pivots() const { return pivots_; }
    std::size_t columns() const { return cols_; }

private:
    void pivot(std::size_t prow, std::size_t pcol) {
        ++pivots_;
        auto& pr = tab_[prow];
        const mpq_class inv = 1 / pr[pcol];
        std::vector<std::size_t> nz;
        for (std::size_t k = 0; k <= cols_; ++k) {
            if (pr[k] != 0) {
                pr[k] *= inv;
                nz.push_back(k);
            }
        }
        mpq_class factor;
        for (std::size_t i = 0; i < rows_; ++i) {
            if (i == prow || tab_[i][pcol] == 0) continue;
            factor = tab_[i][pcol];
            auto& r = tab_[i];
            for (std::size_t k : nz) r[k] -= factor * pr[k];
        }
        if (reduced_[pcol] != 0) {
            factor = reduced_[pcol];
            for (std::size_t k : nz) {
                if (k == cols_) objective_ += factor * pr[k];  // factor < 0: objective drops
                else reduced_[k] -= factor * pr[k];
            }
        }
        basis_[prow] = pcol;
    }

    const LinearFeasibilityProblem& problem_;
    std::size_t rows_ = 0, structural_ = 0, cols_ = 0, pivots_ = 0;
    std::vector<std::pair<std::size_t, int>> column_var_;
    std::vector<int> row_sign_;
    std::vector<std::vector<mpq_class>> tab_;  // last column holds the rhs
    std::vector<std::size_t> basis_;
    std::vector<mpq_class> reduced_;
    mpq_class objective_;
};

}  // namespace

FeasibilityCertificate lp_feasible(const LinearFeasibilityProblem& problem, SolverStats* stats) {
    problem.validate();
    Phase1Tableau tableau(problem);
    tableau.solve();
    if (stats) {
        stats->pivots = tableau.pivots();
        stats->rows = problem.equalities.size();
        stats->columns = tableau.columns();
    }
    return tableau.certificate();
}

}  // namespace jointdesc
