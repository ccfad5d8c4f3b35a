#include "jointdesc/membership.hpp"

#include <algorithm>
#include <map>

#include "jointdesc/error.hpp"

namespace jointdesc {

namespace {

// Sparse integer-coefficient rows, densified once at the end.
class LpBuilder {
public:
    explicit LpBuilder(std::size_t variables) : vars_(variables) {}

    std::size_t add_row(RowSource source) {
        rows_.emplace_back();
        sources_.push_back(std::move(source));
        return rows_.size() - 1;
    }
    void add(std::size_t row, std::size_t var, int coeff) { rows_[row][var] += coeff; }

    MembershipProblem finish(MembershipTest test, const ScenarioDescriptor& s) && {
        MembershipProblem p;
        p.test = test;
        p.scenario = s;
        p.lp.variable_count = vars_;
        p.lp.equalities.reserve(rows_.size());
        for (const auto& row : rows_) {
            LinearEquality eq;
            eq.coefficients.assign(vars_, Rational(0));
            for (const auto& [var, c] : row) eq.coefficients[var] = Rational(c);
            p.lp.equalities.push_back(std::move(eq));
        }
        p.rows = std::move(sources_);
        return p;
    }

    // rhs values for a concrete behavior.
private:
    std::size_t vars_;
    std::vector<std::map<std::size_t, int>> rows_;
    std::vector<RowSource> sources_;
};

void fill_rhs(MembershipProblem& p, const Behavior& b) {
    const auto entries = b.flatten();
    for (std::size_t i = 0; i < p.rows.size(); ++i) {
        Rational rhs = p.rows[i].constant;
        if (p.rows[i].entry) rhs += entries[*p.rows[i].entry];
        p.lp.equalities[i].rhs = std::move(rhs);
    }
}

void check_cap(std::uint64_t count, std::uint64_t cap, const char* what) {
    if (count > cap) {
        throw Error(ErrorKind::SizeLimit,
                    std::string(what) + ": " + std::to_string(count) + " variables exceed the cap of " + std::to_string(cap));
    }
}

std::uint64_t ipow(std::uint64_t base, int exp) {
    std::uint64_t r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

// One row per behavior entry, rhs = that entry.
void add_entry_rows(LpBuilder& lp, const ScenarioDescriptor& s) {
    for (std::size_t k = 0; k < s.entry_count(); ++k) lp.add_row({k, Rational(0)});
}

MembershipResult solve(MembershipProblem problem) {
    auto cert = lp_feasible(problem.lp);
    return {std::move(problem), std::move(cert)};
}

}  // namespace

std::string_view to_string(MembershipTest test) {
    switch (test) {
        case MembershipTest::JointFine: return "joint";
        case MembershipTest::LocalDeterministic: return "ld";
        case MembershipTest::LocalFriendliness: return "lf";
        case MembershipTest::SequentialWigner: return "sw";
    }
    return "unknown";
}

std::optional<MembershipTest> parse_membership_test(std::string_view name) {
    if (name == "joint" || name == "check-joint") return MembershipTest::JointFine;
    if (name == "ld" || name == "check-ld") return MembershipTest::LocalDeterministic;
    if (name == "lf" || name == "check-lf") return MembershipTest::LocalFriendliness;
    if (name == "sw" || name == "check-sw") return MembershipTest::SequentialWigner;
    return std::nullopt;
}

MembershipProblem build_joint_fine_problem(const Behavior& b, std::uint64_t cap) {
    const auto& s = b.scenario();
    const std::uint64_t count = deterministic_vertex_count(s);
    check_cap(count, cap, "joint distribution");

    LpBuilder lp(count);
    add_entry_rows(lp, s);
    const std::size_t norm = lp.add_row({std::nullopt, Rational(1)});

    // Tuple digits: a_1 is the fastest digit, then a_2.., then b_1...
    std::vector<int> digits(static_cast<std::size_t>(s.settings_a + s.settings_b), 0);
    std::vector<std::vector<Rational>> points;
    points.reserve(count);
    for (std::uint64_t t = 0; t < count; ++t) {
        std::uint64_t rest = t;
        for (int x = 0; x < s.settings_a; ++x) {
            digits[x] = static_cast<int>(rest % s.outcomes_a);
            rest /= s.outcomes_a;
        }
        for (int y = 0; y < s.settings_b; ++y) {
            digits[s.settings_a + y] = static_cast<int>(rest % s.outcomes_b);
            rest /= s.outcomes_b;
        }
        std::vector<Rational> point(s.entry_count());
        for (int x = 1; x <= s.settings_a; ++x) {
            for (int y = 1; y <= s.settings_b; ++y) {
                const std::size_t k = s.entry_index(x, y, digits[x - 1], digits[s.settings_a + y - 1]);
                lp.add(k, t, 1);
                point[k] = 1;
            }
        }
        lp.add(norm, t, 1);
        points.push_back(std::move(point));
    }
    auto p = std::move(lp).finish(MembershipTest::JointFine, s);
    p.extreme_points = std::move(points);
    fill_rhs(p, b);
    return p;
}

MembershipProblem build_ld_problem(const Behavior& b, std::uint64_t cap) {
    const auto& s = b.scenario();
    const auto vertices = enumerate_deterministic_vertices(s, cap);

    LpBuilder lp(vertices.size());
    add_entry_rows(lp, s);
    const std::size_t norm = lp.add_row({std::nullopt, Rational(1)});
    std::vector<std::vector<Rational>> points;
    points.reserve(vertices.size());
    for (std::size_t v = 0; v < vertices.size(); ++v) {
        auto column = vertices[v].to_behavior(s).flatten();
        for (std::size_t k = 0; k < column.size(); ++k) {
            if (!column[k].is_zero()) lp.add(k, v, 1);
        }
        lp.add(norm, v, 1);
        points.push_back(std::move(column));
    }
    auto p = std::move(lp).finish(MembershipTest::LocalDeterministic, s);
    p.extreme_points = std::move(points);
    fill_rhs(p, b);
    return p;
}

MembershipProblem build_lf_problem(const Behavior& b, std::uint64_t cap) {
    const auto& s = b.scenario();
    if (!s.friend_on_a && !s.friend_on_b) {
        throw Error(ErrorKind::NoFriend, "Local Friendliness needs friend_on_a or friend_on_b");
    }
    const int hc = s.friend_on_a ? s.outcomes_a : 1;
    const int hd = s.friend_on_b ? s.outcomes_b : 1;
    const int hidden = hc * hd;
    check_cap(static_cast<std::uint64_t>(s.entry_count()) * hidden + hidden, cap, "Local Friendliness");

    // q(a,b,h|x,y); the x = 1 (y = 1) branch forces a = c (b = d).
    auto slot = [&](int x, int y, int a, int bb, int h) {
        return s.entry_index(x, y, a, bb) * hidden + h;
    };
    std::vector<long> var(s.entry_count() * hidden, -1);
    std::size_t n = 0;
    for (int x = 1; x <= s.settings_a; ++x) {
        for (int y = 1; y <= s.settings_b; ++y) {
            for (int a = 0; a < s.outcomes_a; ++a) {
                for (int bb = 0; bb < s.outcomes_b; ++bb) {
                    for (int h = 0; h < hidden; ++h) {
                        const int c = h / hd, d = h % hd;
                        if (s.friend_on_a && x == 1 && a != c) continue;
                        if (s.friend_on_b && y == 1 && bb != d) continue;
                        var[slot(x, y, a, bb, h)] = static_cast<long>(n++);
                    }
                }
            }
        }
    }
    const std::size_t p_first = n;
    n += hidden;

    LpBuilder lp(n);
    add_entry_rows(lp, s);
    auto add_q = [&](std::size_t row, int x, int y, int a, int bb, int h, int coeff) {
        const long v = var[slot(x, y, a, bb, h)];
        if (v >= 0) lp.add(row, static_cast<std::size_t>(v), coeff);
    };
    for (int x = 1; x <= s.settings_a; ++x) {
        for (int y = 1; y <= s.settings_b; ++y) {
            for (int a = 0; a < s.outcomes_a; ++a) {
                for (int bb = 0; bb < s.outcomes_b; ++bb) {
                    for (int h = 0; h < hidden; ++h) add_q(s.entry_index(x, y, a, bb), x, y, a, bb, h, 1);
                }
            }
        }
    }
    // Friend outcome distribution independent of (x,y).
    for (int x = 1; x <= s.settings_a; ++x) {
        for (int y = 1; y <= s.settings_b; ++y) {
            for (int h = 0; h < hidden; ++h) {
                const std::size_t row = lp.add_row({std::nullopt, Rational(0)});
                for (int a = 0; a < s.outcomes_a; ++a) {
                    for (int bb = 0; bb < s.outcomes_b; ++bb) add_q(row, x, y, a, bb, h, 1);
                }
                lp.add(row, p_first + h, -1);
            }
        }
    }
    // Given h, Bob's marginal is independent of x ...
    for (int y = 1; y <= s.settings_b; ++y) {
        for (int bb = 0; bb < s.outcomes_b; ++bb) {
            for (int h = 0; h < hidden; ++h) {
                for (int x = 2; x <= s.settings_a; ++x) {
                    const std::size_t row = lp.add_row({std::nullopt, Rational(0)});
                    for (int a = 0; a < s.outcomes_a; ++a) {
                        add_q(row, x, y, a, bb, h, 1);
                        add_q(row, 1, y, a, bb, h, -1);
                    }
                }
            }
        }
    }
    // ... and Alice's is independent of y.
    for (int x = 1; x <= s.settings_a; ++x) {
        for (int a = 0; a < s.outcomes_a; ++a) {
            for (int h = 0; h < hidden; ++h) {
                for (int y = 2; y <= s.settings_b; ++y) {
                    const std::size_t row = lp.add_row({std::nullopt, Rational(0)});
                    for (int bb = 0; bb < s.outcomes_b; ++bb) {
                        add_q(row, x, y, a, bb, h, 1);
                        add_q(row, x, 1, a, bb, h, -1);
                    }
                }
            }
        }
    }
    auto p = std::move(lp).finish(MembershipTest::LocalFriendliness, s);
    fill_rhs(p, b);
    return p;
}

MembershipProblem build_sw_problem(const Behavior& b, const SequentialScenario& seq, std::uint64_t cap) {
    const auto& s = b.scenario();
    const int R = seq.reversals;
    if (R < 1) throw Error(ErrorKind::InvalidArgument, "at least one reversal is required");
    if (s.settings_a != R + 1) {
        throw Error(ErrorKind::WrongScenario, "sequential test needs settings_a = R + 1 = " + std::to_string(R + 1));
    }
    if (s.settings_b != seq.base.settings_b || s.outcomes_a != seq.base.outcomes_a ||
        s.outcomes_b != seq.base.outcomes_b) {
        throw Error(ErrorKind::WrongScenario, "behavior does not match the sequential scenario's base");
    }
    const int oa = s.outcomes_a, ob = s.outcomes_b, sb = s.settings_b;
    const std::uint64_t histories = ipow(static_cast<std::uint64_t>(oa), R);
    check_cap(static_cast<std::uint64_t>(s.entry_count()) * histories, cap, "sequential scenario");
    const int H = static_cast<int>(histories);

    // Digit i (1-based) of the friend history c = (c_1..c_R), c_1 most significant.
    auto friend_outcome = [&](int c, int i) {
        return static_cast<int>((static_cast<std::uint64_t>(c) / ipow(oa, R - i)) % oa);
    };
    auto slot = [&](int xt, int y, int at, int bb, int c) { return s.entry_index(xt, y, at, bb) * H + c; };
    std::vector<long> var(s.entry_count() * H, -1);
    std::size_t n = 0;
    for (int xt = 1; xt <= R + 1; ++xt) {
        for (int y = 1; y <= sb; ++y) {
            for (int at = 0; at < oa; ++at) {
                for (int bb = 0; bb < ob; ++bb) {
                    for (int c = 0; c < H; ++c) {
                        if (xt <= R && at != friend_outcome(c, xt)) continue;  // asked at step x~: a~ = c_x~
                        var[slot(xt, y, at, bb, c)] = static_cast<long>(n++);
                    }
                }
            }
        }
    }

    LpBuilder lp(n);
    add_entry_rows(lp, s);
    auto add_p = [&](std::size_t row, int xt, int y, int at, int bb, int c, int coeff) {
        const long v = var[slot(xt, y, at, bb, c)];
        if (v >= 0) lp.add(row, static_cast<std::size_t>(v), coeff);
    };
    for (int xt = 1; xt <= R + 1; ++xt) {
        for (int y = 1; y <= sb; ++y) {
            for (int at = 0; at < oa; ++at) {
                for (int bb = 0; bb < ob; ++bb) {
                    for (int c = 0; c < H; ++c) add_p(s.entry_index(xt, y, at, bb), xt, y, at, bb, c, 1);
                }
            }
        }
    }

    // (b, c_1..c_j) is fixed before Alice's choices from step j on, so its
    // marginal agrees across x~ in {j, ..., R+1}.
    for (int j = 1; j <= R; ++j) {
        const int prefixes = static_cast<int>(ipow(oa, j));
        const int tail = static_cast<int>(ipow(oa, R - j));
        for (int y = 1; y <= sb; ++y) {
            for (int bb = 0; bb < ob; ++bb) {
                for (int pre = 0; pre < prefixes; ++pre) {
                    for (int xt = j + 1; xt <= R + 1; ++xt) {
                        const std::size_t row = lp.add_row({std::nullopt, Rational(0)});
                        for (int at = 0; at < oa; ++at) {
                            for (int t = 0; t < tail; ++t) {
                                const int c = pre * tail + t;
                                add_p(row, xt, y, at, bb, c, 1);
                                add_p(row, j, y, at, bb, c, -1);
                            }
                        }
                    }
                }
            }
        }
    }
    // (a~, c) marginal independent of Bob's setting.
    for (int xt = 1; xt <= R + 1; ++xt) {
        for (int at = 0; at < oa; ++at) {
            for (int c = 0; c < H; ++c) {
                if (xt <= R && at != friend_outcome(c, xt)) continue;
                for (int y = 2; y <= sb; ++y) {
                    const std::size_t row = lp.add_row({std::nullopt, Rational(0)});
                    for (int bb = 0; bb < ob; ++bb) {
                        add_p(row, xt, y, at, bb, c, 1);
                        add_p(row, xt, 1, at, bb, c, -1);
                    }
                }
            }
        }
    }
    auto p = std::move(lp).finish(MembershipTest::SequentialWigner, s);
    p.reversals = R;
    fill_rhs(p, b);
    return p;
}

MembershipResult check_joint_fine(const Behavior& b, std::uint64_t cap) {
    return solve(build_joint_fine_problem(b, cap));
}

MembershipResult check_ld(const Behavior& b, std::uint64_t cap) { return solve(build_ld_problem(b, cap)); }

MembershipResult check_lf(const Behavior& b, std::uint64_t cap) { return solve(build_lf_problem(b, cap)); }

MembershipResult check_sw_sequential(const Behavior& b, const SequentialScenario& s, std::uint64_t cap) {
    return solve(build_sw_problem(b, s, cap));
}

MembershipResult run_membership(MembershipTest test, const Behavior& b, std::uint64_t cap) {
    switch (test) {
        case MembershipTest::JointFine: return check_joint_fine(b, cap);
        case MembershipTest::LocalDeterministic: return check_ld(b, cap);
        case MembershipTest::LocalFriendliness: return check_lf(b, cap);
        case MembershipTest::SequentialWigner: {
            ScenarioDescriptor base = b.scenario();
            return check_sw_sequential(b, {base, base.settings_a - 1}, cap);
        }
    }
    throw Error(ErrorKind::InvalidArgument, "unknown membership test");
}

VerificationResult verify_membership(const MembershipResult& result) {
    return verify_certificate(result.problem.lp, result.certificate);
}

Rational InequalityReport::evaluate(const Behavior& b) const {
    const auto entries = b.flatten();
    if (entries.size() != coefficients.size()) throw Error(ErrorKind::DimensionMismatch, "scenario mismatch");
    Rational v;
    for (std::size_t k = 0; k < entries.size(); ++k) {
        if (!coefficients[k].is_zero()) v += coefficients[k] * entries[k];
    }
    return v;
}

InequalityReport extract_inequality(const FeasibilityCertificate& certificate, const MembershipProblem& context,
                                    const Behavior& b) {
    if (certificate.feasible()) {
        throw Error(ErrorKind::NotInfeasible, "a feasible certificate carries no separating inequality");
    }
    const auto& y = certificate.functional();
    const auto& s = context.scenario;
    if (y.size() != context.rows.size() || !(b.scenario() == s)) {
        throw Error(ErrorKind::DimensionMismatch, "certificate does not belong to this membership problem");
    }

    // Members q satisfy y.(E q + c) = (y^T A) x >= 0; flip to "<=" form.
    InequalityReport r;
    r.test = context.test;
    r.scenario = s;
    r.coefficients.assign(s.entry_count(), Rational(0));
    Rational bound;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i].is_zero()) continue;
        if (context.rows[i].entry) r.coefficients[*context.rows[i].entry] -= y[i];
        bound += y[i] * context.rows[i].constant;
    }

    // Shift by a multiple of the per-cell normalization so the uniform point
    // scores 0.
    const Rational cells(static_cast<long long>(s.cell_count()));
    Rational at_uniform;
    for (const auto& c : r.coefficients) at_uniform += c;
    at_uniform /= Rational(static_cast<long long>(s.cell_size()));
    const Rational shift = -at_uniform / cells;
    for (auto& c : r.coefficients) c += shift;
    bound += shift * cells;

    if (!context.extreme_points.empty()) {
        std::optional<Rational> best;
        for (const auto& point : context.extreme_points) {
            Rational v;
            for (std::size_t k = 0; k < point.size(); ++k) {
                if (!point[k].is_zero()) v += r.coefficients[k] * point[k];
            }
            if (!best || v > *best) best = v;
        }
        bound = *best;
        r.bound_is_tight = true;
    }
    if (bound.sign() > 0) {
        const Rational scale = Rational(2) / bound;
        for (auto& c : r.coefficients) c *= scale;
        bound = 2;
    }
    r.bound = bound;
    r.value = r.evaluate(b);
    return r;
}

Behavior pr_type_box(const ScenarioDescriptor& s) {
    if (s.outcomes_a != 2 || s.outcomes_b != 2) throw Error(ErrorKind::WrongScenario, "PR-type box needs binary outcomes");
    return Behavior::from_function(s, [](int x, int y, int a, int b) {
        return ((a ^ b) == ((x - 1) * (y - 1)) % 2) ? Rational(1, 2) : Rational(0);
    });
}

Behavior random_rational_behavior(const ScenarioDescriptor& s, Rng& rng) {
    constexpr long long kUnits = 64;
    const auto count = deterministic_vertex_count(s);
    const int k = 1 + static_cast<int>(rng.below(4));

    std::vector<Behavior> parts;
    for (int i = 0; i < k; ++i) {
        // Decode a uniformly drawn vertex index without enumerating them all.
        std::uint64_t idx = rng.below(count);
        DeterministicStrategy v{std::vector<int>(s.settings_a), std::vector<int>(s.settings_b), {}, {}};
        for (int y = s.settings_b - 1; y >= 0; --y) {
            v.bob[y] = static_cast<int>(idx % s.outcomes_b);
            idx /= s.outcomes_b;
        }
        for (int x = s.settings_a - 1; x >= 0; --x) {
            v.alice[x] = static_cast<int>(idx % s.outcomes_a);
            idx /= s.outcomes_a;
        }
        parts.push_back(v.to_behavior(s));
    }
    parts.push_back(uniform_behavior(s));
    if (s.outcomes_a == 2 && s.outcomes_b == 2) parts.push_back(pr_type_box(s));

    // Random composition of 64 units into parts.size() nonnegative weights.
    std::vector<long long> cuts{0, kUnits};
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) cuts.push_back(static_cast<long long>(rng.below(kUnits + 1)));
    std::sort(cuts.begin(), cuts.end());
    std::vector<Rational> weights;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) weights.emplace_back(cuts[i + 1] - cuts[i], kUnits);
    return mix(parts, weights);
}

EquivalenceReport ld_sw_equivalence_test(std::size_t sample_count, std::uint64_t seed, int settings_a) {
    if (settings_a != 2 && settings_a != 3) {
        throw Error(ErrorKind::InvalidArgument, "equivalence test supports settings_a in {2, 3}");
    }
    const ScenarioDescriptor s = ScenarioDescriptor::binary(settings_a, settings_a);
    const SequentialScenario seq{s, settings_a - 1};

    EquivalenceReport report;
    report.settings_a = settings_a;
    report.reversals = seq.reversals;
    report.seed = seed;

    auto compare = [&](const Behavior& b, std::string label) {
        const bool ld = check_ld(b).feasible();
        const bool sw = check_sw_sequential(b, seq).feasible();
        (ld ? report.ld_feasible : report.ld_infeasible)++;
        if (ld != sw) report.disagreements.push_back({std::move(label), ld, sw});
    };

    const auto vertices = enumerate_deterministic_vertices(s);
    for (std::size_t v = 0; v < vertices.size(); ++v) {
        compare(vertices[v].to_behavior(s), "vertex " + std::to_string(v));
        ++report.vertices_checked;
    }
    Rng rng(seed);
    for (std::size_t i = 0; i < sample_count; ++i) {
        compare(random_rational_behavior(s, rng), "sample " + std::to_string(i));
        ++report.samples_checked;
    }
    return report;
}

}  // namespace jointdesc
