#include <algorithm>
#include <filesystem>

#include "jointdesc/behavior.hpp"
#include "jointdesc/behavior_io.hpp"
#include "jointdesc/membership.hpp"
#include "jointdesc/random.hpp"
#include "support.hpp"

using namespace jointdesc;

namespace {

std::uint64_t ipow(std::uint64_t b, int e) {
    std::uint64_t r = 1;
    while (e-- > 0) r *= b;
    return r;
}

}  // namespace

TEST_CASE("validate_behavior") {
    const auto s = ScenarioDescriptor::binary(2, 2);
    SUBCASE("uniform passes") { CHECK(validate_behavior(uniform_behavior(s)).ok()); }
    SUBCASE("pr box is normalized and no-signalling") {
        const auto r = validate_behavior(pr_box());
        CHECK(r.ok());
        CHECK(r.failures.empty());
    }
    SUBCASE("negative entry is reported with its indices") {
        const auto b = Behavior::from_function(s, [](int x, int y, int a, int bb) {
            if (x == 2 && y == 1) return a == 0 && bb == 0 ? Rational(-1, 4) : Rational(5, 12);
            return Rational(1, 4);
        });
        const auto r = validate_behavior(b);
        CHECK_FALSE(r.nonnegativity_ok);
        CHECK(r.normalization_ok);
        const auto it = std::find_if(r.failures.begin(), r.failures.end(),
                                     [](const auto& f) { return f.condition == Condition::Nonnegativity; });
        REQUIRE(it != r.failures.end());
        CHECK(it->x == 2);
        CHECK(it->y == 1);
        CHECK(it->a == 0);
        CHECK(it->b == 0);
        CHECK(it->value == Rational(-1, 4));
    }
    SUBCASE("signalling table") {
        const auto b = Behavior::from_function(s, [](int, int y, int a, int bb) {
            return (y == 1 ? a == 0 : a == 1) && bb == 0 ? Rational(1) : Rational(0);
        });
        const auto r = validate_behavior(b);
        CHECK_FALSE(r.no_signalling_a_ok);
        CHECK(r.no_signalling_b_ok);
    }
    SUBCASE("missing cell") {
        Behavior partial(s);
        CHECK_ERROR_KIND(validate_behavior(partial), ErrorKind::MissingCell);
    }
}

TEST_CASE("deterministic vertex enumeration") {
    CHECK(enumerate_deterministic_vertices(ScenarioDescriptor::binary(2, 2)).size() == 16);
    CHECK(enumerate_deterministic_vertices(ScenarioDescriptor::binary(2, 2, true)).size() == 16);
    CHECK(enumerate_deterministic_vertices(ScenarioDescriptor::binary(3, 3)).size() == 64);
    CHECK_ERROR_KIND(enumerate_deterministic_vertices(ScenarioDescriptor::binary(3, 3), 63), ErrorKind::SizeLimit);

    SUBCASE("count formula, vertices are distinct, deterministic and valid") {
        for (int sa = 1; sa <= 3; ++sa) {
            for (int sb = 1; sb <= 3; ++sb) {
                for (int oa = 2; oa <= 3; ++oa) {
                    for (bool fa : {false, true}) {
                        ScenarioDescriptor s{sa, sb, oa, 2, fa, false};
                        const auto vs = enumerate_deterministic_vertices(s);
                        CHECK(vs.size() == ipow(static_cast<std::uint64_t>(oa), sa) * ipow(2, sb));
                        CHECK(deterministic_vertex_count(s) == vs.size());
                        for (const auto& v : vs) {
                            if (fa) CHECK(v.friend_c == v.alice[0]);
                            const Behavior b = v.to_behavior(s);
                            CHECK(validate_behavior(b).ok());
                            for (const auto& e : b.flatten()) CHECK((e == Rational(0) || e == Rational(1)));
                        }
                        for (std::size_t i = 1; i < vs.size(); ++i) CHECK_FALSE(vs[i] == vs[i - 1]);
                    }
                }
            }
        }
    }
}

TEST_CASE("pr box and chsh") {
    const Behavior pr = pr_box();
    CHECK(chsh_value(pr) == Rational(4));
    CHECK(chsh_value(uniform_behavior(ScenarioDescriptor::binary(2, 2))) == Rational(0));
    for (int x = 1; x <= 2; ++x) {
        for (int y = 1; y <= 2; ++y) {
            CHECK(pr(x, y, 0, 0) + pr(x, y, 0, 1) == Rational(1, 2));
            CHECK(pr(x, y, 0, 0) + pr(x, y, 1, 0) == Rational(1, 2));
        }
    }
    Rational best(-100);
    for (const auto& v : enumerate_deterministic_vertices(ScenarioDescriptor::binary(2, 2))) {
        best = std::max(best, chsh_value(v.to_behavior(ScenarioDescriptor::binary(2, 2))));
    }
    CHECK(best == Rational(2));
    CHECK_ERROR_KIND(chsh_value(uniform_behavior(ScenarioDescriptor::binary(3, 2))), ErrorKind::WrongScenario);
}

TEST_CASE("chsh is linear on mixtures") {
    const auto s = ScenarioDescriptor::binary(2, 2);
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const Behavior b1 = random_rational_behavior(s, rng);
        const Behavior b2 = random_rational_behavior(s, rng);
        const Rational w(static_cast<long long>(rng.below(65)), 64);
        const Behavior parts[] = {b1, b2};
        const Rational weights[] = {w, Rational(1) - w};
        CHECK(chsh_value(mix(parts, weights)) == w * chsh_value(b1) + (Rational(1) - w) * chsh_value(b2));
    }
}

TEST_CASE("restrict_settings keeps the chosen cells") {
    const auto s = ScenarioDescriptor::binary(3, 3, true);
    Rng rng(3);
    const Behavior b = random_rational_behavior(s, rng);
    const int xs[] = {3, 2}, ys[] = {1, 3};
    const Behavior r = restrict_settings(b, xs, ys);
    CHECK(r.scenario().settings_a == 2);
    CHECK_FALSE(r.scenario().friend_on_a);
    CHECK(r(1, 2, 0, 1) == b(3, 3, 0, 1));
    CHECK(r(2, 1, 1, 1) == b(2, 1, 1, 1));
}

TEST_CASE("behavior files round-trip exactly") {
    const Behavior pr = pr_box();
    CHECK(parse_behavior(format_behavior(pr)) == pr);

    Rng rng(5);
    for (const auto& s : {ScenarioDescriptor::binary(2, 2), ScenarioDescriptor::binary(3, 3, true),
                          ScenarioDescriptor{2, 3, 3, 2, false, true}}) {
        for (int i = 0; i < 10; ++i) {
            const Behavior b = random_rational_behavior(s, rng);
            CHECK(parse_behavior(format_behavior(b)) == b);
            CHECK(format_behavior(parse_behavior(format_behavior(b))) == format_behavior(b));
        }
    }

    const auto dir = std::filesystem::temp_directory_path() / "jointdesc_io_test";
    std::filesystem::create_directories(dir);
    write_behavior(pr, dir / "pr.json");
    CHECK(read_behavior(dir / "pr.json") == pr);
}

TEST_CASE("behavior file parsing") {
    const std::string head =
        R"({"settings_a":1,"settings_b":1,"outcomes_a":2,"outcomes_b":2,"friend_on_a":false,"friend_on_b":false,)";
    SUBCASE("fractions and decimals") {
        const Behavior b = parse_behavior(head + R"("table":{"1,1":[["1/3","0.125"],["0.5","1/24"]]}})");
        CHECK(b(1, 1, 0, 0) == Rational(1, 3));
        CHECK(b(1, 1, 0, 1) == Rational(1, 8));
        CHECK(b(1, 1, 1, 0) == Rational(1, 2));
    }
    SUBCASE("denominator cap rounds decimals only") {
        ReadOptions ro;
        ro.max_den = 10;
        const Behavior b = parse_behavior(head + R"("table":{"1,1":[["0.3333333","1/17"],["0.5","0"]]}})", ro);
        CHECK(b(1, 1, 0, 0) == Rational(1, 3));
        CHECK(b(1, 1, 0, 1) == Rational(1, 17));
    }
    SUBCASE("unknown fields are rejected") {
        CHECK_ERROR_KIND(parse_behavior(head + R"("table":{"1,1":[["1","0"],["0","0"]]},"extra":1})"),
                         ErrorKind::ParseError);
    }
    SUBCASE("diagnostics name the field path") {
        try {
            parse_behavior(head + R"("table":{"1,1":[["1","0"],["zz","0"]]}})");
            FAIL("expected ParseError");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::ParseError);
            CHECK(std::string(e.what()).find("\"1,1\"") != std::string::npos);
        }
    }
    SUBCASE("syntax errors report the line") {
        try {
            parse_behavior("{\n\"settings_a\": 1,\n oops}");
            FAIL("expected ParseError");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::ParseError);
            CHECK(std::string(e.what()).find("line 3") != std::string::npos);
        }
    }
    SUBCASE("a missing cell surfaces on use") {
        const Behavior b = parse_behavior(
            R"({"settings_a":2,"settings_b":1,"outcomes_a":2,"outcomes_b":2,"friend_on_a":false,"friend_on_b":false,)"
            R"("table":{"1,1":[["1","0"],["0","0"]]}})");
        CHECK_FALSE(b.has_cell(2, 1));
        CHECK_ERROR_KIND(validate_behavior(b), ErrorKind::MissingCell);
    }
    SUBCASE("non-finite decimals") {
        CHECK_ERROR_KIND(parse_behavior(head + R"("table":{"1,1":[["nan","0"],["0","0"]]}})"),
                         ErrorKind::RationalizeError);
    }
}
