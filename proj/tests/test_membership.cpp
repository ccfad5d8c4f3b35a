#include <algorithm>

#include "jointdesc/behavior.hpp"
#include "jointdesc/membership.hpp"
#include "jointdesc/random.hpp"
#include "support.hpp"

using namespace jointdesc;

namespace {

const ScenarioDescriptor k22 = ScenarioDescriptor::binary(2, 2);

// Flip Alice's outcome for setting fx and swap Alice's settings 2 and 3 when
// present; neither touches the friend setting x = 1.
Behavior relabel(const Behavior& b, int fx) {
    const auto& s = b.scenario();
    return Behavior::from_function(s, [&](int x, int y, int a, int bb) {
        int sx = x;
        if (s.settings_a >= 3 && (x == 2 || x == 3)) sx = 5 - x;
        const int sa = sx == fx ? s.outcomes_a - 1 - a : a;
        return b(sx, y, sa, bb);
    });
}

void check_verified(const MembershipResult& r) {
    const auto v = verify_membership(r);
    CHECK_MESSAGE(v.ok, v.reason);
}

}  // namespace

TEST_CASE("joint distribution (Fine)") {
    SUBCASE("product behavior is feasible") {
        const Behavior b = Behavior::from_function(k22, [](int x, int y, int a, int bb) {
            const Rational pa = x == 1 ? Rational(1, 3) : Rational(3, 4);
            const Rational pb = y == 1 ? Rational(1, 5) : Rational(1, 2);
            return (a == 0 ? pa : Rational(1) - pa) * (bb == 0 ? pb : Rational(1) - pb);
        });
        const auto r = check_joint_fine(b);
        CHECK(r.feasible());
        check_verified(r);
    }
    SUBCASE("pr box is infeasible") {
        const auto r = check_joint_fine(pr_box());
        CHECK_FALSE(r.feasible());
        check_verified(r);
    }
    SUBCASE("size limit") {
        CHECK_ERROR_KIND(check_joint_fine(uniform_behavior(ScenarioDescriptor::binary(3, 3)), 10),
                         ErrorKind::SizeLimit);
    }
}

TEST_CASE("local deterministic membership") {
    const auto vs = enumerate_deterministic_vertices(k22);
    for (const auto& v : vs) {
        const auto r = check_ld(v.to_behavior(k22));
        REQUIRE(r.feasible());
        check_verified(r);
        const auto& w = r.certificate.witness();
        CHECK(std::count(w.begin(), w.end(), Rational(1)) == 1);
        CHECK(std::count(w.begin(), w.end(), Rational(0)) == static_cast<long>(w.size()) - 1);
    }
    const auto pr = check_ld(pr_box());
    CHECK_FALSE(pr.feasible());
    check_verified(pr);
}

TEST_CASE("Fine and LD verdicts agree") {
    for (const auto& s : {k22, ScenarioDescriptor::binary(2, 3), ScenarioDescriptor::binary(3, 3)}) {
        Rng rng(mix_seed(17, static_cast<std::uint64_t>(s.settings_b * 10 + s.settings_a)));
        for (const auto& v : enumerate_deterministic_vertices(s)) {
            const Behavior b = v.to_behavior(s);
            CHECK(check_ld(b).feasible() == check_joint_fine(b).feasible());
        }
        for (int i = 0; i < 60; ++i) {
            const Behavior b = random_rational_behavior(s, rng);
            const auto ld = check_ld(b), joint = check_joint_fine(b);
            CHECK(ld.feasible() == joint.feasible());
            check_verified(ld);
            check_verified(joint);
        }
    }
}

TEST_CASE("inequality extraction") {
    SUBCASE("pr box against LD reproduces a CHSH-type inequality") {
        for (auto test : {MembershipTest::LocalDeterministic, MembershipTest::JointFine}) {
            const auto r = run_membership(test, pr_box());
            const auto ineq = extract_inequality(r.certificate, r.problem, pr_box());
            CHECK(ineq.bound == Rational(2));
            CHECK(ineq.value == Rational(4));
            CHECK(ineq.bound_is_tight);
            Rational best(-1000);
            for (const auto& v : enumerate_deterministic_vertices(k22)) {
                best = std::max(best, ineq.evaluate(v.to_behavior(k22)));
            }
            CHECK(best == Rational(2));
        }
    }
    SUBCASE("feasible certificates are refused") {
        const auto r = check_ld(uniform_behavior(k22));
        CHECK_ERROR_KIND(extract_inequality(r.certificate, r.problem, uniform_behavior(k22)),
                         ErrorKind::NotInfeasible);
    }
    SUBCASE("LF inequality holds on LF-feasible behaviors") {
        const auto s = ScenarioDescriptor::binary(3, 3, true);
        const Behavior box = pr_type_box(s);
        const auto r = check_lf(box);
        REQUIRE_FALSE(r.feasible());
        check_verified(r);
        const auto ineq = extract_inequality(r.certificate, r.problem, box);
        CHECK(ineq.value > ineq.bound);
        Rng rng(8);
        int tested = 0;
        for (int i = 0; i < 80; ++i) {
            const Behavior b = random_rational_behavior(s, rng);
            if (!check_lf(b).feasible()) continue;
            ++tested;
            CHECK(ineq.evaluate(b) <= ineq.bound);
        }
        for (const auto& v : enumerate_deterministic_vertices(s)) CHECK(ineq.evaluate(v.to_behavior(s)) <= ineq.bound);
        CHECK(tested > 20);
    }
}

TEST_CASE("local friendliness") {
    const auto s = ScenarioDescriptor::binary(2, 2, true);
    SUBCASE("deterministic vertices with a(1) = c are feasible") {
        for (const auto& v : enumerate_deterministic_vertices(s)) {
            const auto r = check_lf(v.to_behavior(s));
            CHECK(r.feasible());
            check_verified(r);
        }
    }
    SUBCASE("no friend") { CHECK_ERROR_KIND(check_lf(pr_box()), ErrorKind::NoFriend); }
    SUBCASE("two friends") {
        const ScenarioDescriptor s2{2, 2, 2, 2, true, true};
        CHECK(check_lf(uniform_behavior(s2)).feasible());
        const auto r = check_lf(pr_type_box(s2));
        CHECK_FALSE(r.feasible());
        check_verified(r);
    }
}

TEST_CASE("nesting LD => LF => no-signalling") {
    for (const auto& s : {ScenarioDescriptor::binary(2, 2, true), ScenarioDescriptor::binary(3, 3, true),
                          ScenarioDescriptor::binary(3, 2, true)}) {
        Rng rng(mix_seed(41, static_cast<std::uint64_t>(s.settings_a * 10 + s.settings_b)));
        for (int i = 0; i < 40; ++i) {
            const Behavior b = random_rational_behavior(s, rng);
            const bool ld = check_ld(b).feasible();
            const bool lf = check_lf(b).feasible();
            if (ld) CHECK(lf);
            if (lf) {
                const auto v = validate_behavior(b);
                CHECK(v.no_signalling_a_ok);
                CHECK(v.no_signalling_b_ok);
            }
        }
    }
}

TEST_CASE("verdicts are invariant under relabeling") {
    for (const auto& s : {ScenarioDescriptor::binary(2, 2, true), ScenarioDescriptor::binary(3, 3, true)}) {
        Rng rng(mix_seed(5, static_cast<std::uint64_t>(s.settings_a)));
        for (int i = 0; i < 25; ++i) {
            const Behavior b = random_rational_behavior(s, rng);
            for (int fx = 1; fx <= s.settings_a; ++fx) {
                const Behavior r = relabel(b, fx);
                CHECK(check_ld(b).feasible() == check_ld(r).feasible());
                CHECK(check_lf(b).feasible() == check_lf(r).feasible());
                CHECK(check_joint_fine(b).feasible() == check_joint_fine(r).feasible());
            }
        }
    }
}

TEST_CASE("sequential reverse-and-remeasure scenario") {
    SUBCASE("pr box is infeasible with R = 1") {
        const auto r = check_sw_sequential(pr_box(), {k22, 1});
        CHECK_FALSE(r.feasible());
        check_verified(r);
    }
    SUBCASE("deterministic behaviors are feasible") {
        for (const auto& v : enumerate_deterministic_vertices(k22)) {
            const auto r = check_sw_sequential(v.to_behavior(k22), {k22, 1});
            CHECK(r.feasible());
            check_verified(r);
        }
    }
    SUBCASE("settings must equal R + 1") {
        CHECK_ERROR_KIND(check_sw_sequential(pr_box(), {k22, 2}), ErrorKind::WrongScenario);
    }
}

TEST_CASE("LD and sequential verdicts agree, 2x2 with R = 1") {
    const auto rep = ld_sw_equivalence_test(200, 7, 2);
    CHECK(rep.vertices_checked == 16);
    CHECK(rep.samples_checked == 200);
    CHECK(rep.disagreements.empty());
    CHECK(rep.ld_infeasible > 0);
    CHECK(ld_sw_equivalence_test(0, 7, 2).samples_checked == 0);
}

TEST_CASE("LD and sequential verdicts agree, 3x3 with R = 2") {
    const auto rep = ld_sw_equivalence_test(150, 11, 3);
    CHECK(rep.vertices_checked == 64);
    CHECK(rep.disagreements.empty());
    CHECK(rep.ld_infeasible > 0);
    CHECK(rep.ld_feasible > 0);
}
