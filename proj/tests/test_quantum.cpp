#include <cmath>
#include <numbers>

#include "jointdesc/quantum.hpp"
#include "jointdesc/random.hpp"
#include "support.hpp"

using namespace jointdesc;

namespace {

constexpr double kPi = std::numbers::pi;

// Closed form for cos(t)|00> + sin(t)|11> with both measurements in the X-Z
// plane: E(alpha, beta) = cos(alpha)cos(beta) + sin(2t) sin(alpha) sin(beta).
double closed_form_chsh(double t, double a1, double a2, double b1, double b2) {
    auto E = [&](double a, double b) { return std::cos(a) * std::cos(b) + std::sin(2 * t) * std::sin(a) * std::sin(b); };
    return E(a1, b1) + E(a1, b2) + E(a2, b1) - E(a2, b2);
}

// Dense grid over state and angles, independent of the optimizer.
double grid_chsh_max(bool product_only) {
    constexpr int kAngles = 24;
    double best = -10.0;
    const int states = product_only ? 1 : 9;
    for (int ti = 0; ti < states; ++ti) {
        const double t = product_only ? 0.0 : ti * (kPi / 2) / 8;
        for (int i = 0; i < kAngles; ++i) {
            for (int j = 0; j < kAngles; ++j) {
                for (int k = 0; k < kAngles; ++k) {
                    for (int l = 0; l < kAngles; ++l) {
                        const double step = 2 * kPi / kAngles;
                        best = std::max(best, closed_form_chsh(t, i * step, j * step, k * step, l * step));
                    }
                }
            }
        }
    }
    return best;
}

EwfsProtocol random_protocol(Rng& rng, int sa, int sb) {
    EwfsProtocol p;
    std::array<Complex, 4> amp;
    double n = 0.0;
    for (auto& a : amp) {
        a = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
        n += std::norm(a);
    }
    for (auto& a : amp) a /= std::sqrt(n);
    p.initial = PureState::with_ready_memory(amp);
    for (int x = 2; x <= sa; ++x) p.alice_angles.push_back(rng.uniform(0, 2 * kPi));
    for (int y = 1; y <= sb; ++y) p.bob_angles.push_back(rng.uniform(0, 2 * kPi));
    return p;
}

}  // namespace

TEST_CASE("measurement settings are complete and orthogonal") {
    for (double theta : {0.0, 0.3, kPi / 2, 2.0, -1.1}) {
        const MeasurementSetting m{theta, Party::Bob};
        const auto v0 = m.eigenvector(0), v1 = m.eigenvector(1);
        CHECK(std::abs(std::conj(v0[0]) * v1[0] + std::conj(v0[1]) * v1[1]) < 1e-12);
        for (int r = 0; r < 2; ++r) {
            for (int c = 0; c < 2; ++c) {
                const Complex sum = v0[r] * std::conj(v0[c]) + v1[r] * std::conj(v1[c]);
                CHECK(std::abs(sum - Complex(r == c ? 1.0 : 0.0)) < 1e-12);
            }
        }
    }
}

TEST_CASE("chsh_for matches the closed-form correlators") {
    Rng rng(1);
    for (int i = 0; i < 200; ++i) {
        const double t = rng.uniform(0, kPi / 2);
        const double a1 = rng.uniform(-kPi, kPi), a2 = rng.uniform(-kPi, kPi);
        const double b1 = rng.uniform(-kPi, kPi), b2 = rng.uniform(-kPi, kPi);
        CHECK(chsh_for(t, {a1, a2}, {b1, b2}) == doctest::Approx(closed_form_chsh(t, a1, a2, b1, b2)).epsilon(1e-12));
    }
}

TEST_CASE("singlet with standard angles reaches 2 sqrt 2") {
    EwfsProtocol p;
    p.initial = PureState::singlet();
    p.alice_angles = {0.0, kPi / 2};
    p.bob_angles = {-3 * kPi / 4, 3 * kPi / 4};
    const auto born = born_behavior(p);
    const int xs[] = {2, 3}, ys[] = {1, 2};
    CHECK(std::abs(chsh_value(born.exact.restrict_settings(xs, ys)) - 2 * std::sqrt(2.0)) < 1e-9);
    // Singlet correlator -cos(theta_a - theta_b).
    for (int x = 2; x <= 3; ++x) {
        for (int y = 1; y <= 2; ++y) {
            const auto& f = born.exact;
            const double E = f(x, y, 0, 0) - f(x, y, 0, 1) - f(x, y, 1, 0) + f(x, y, 1, 1);
            CHECK(E == doctest::Approx(-std::cos(p.alice_angles[x - 2] - p.bob_angles[y - 1])).epsilon(1e-12));
        }
    }
}

TEST_CASE("born behaviors are normalized, no-signalling and exactly rationalized") {
    Rng rng(2);
    for (int i = 0; i < 50; ++i) {
        const auto p = random_protocol(rng, 3, 3);
        const auto born = born_behavior(p);
        CHECK(max_normalization_error(born.exact) < 1e-12);
        CHECK(max_signalling(born.exact) < 1e-10);
        const auto v = validate_behavior(born.rational);
        CHECK(v.ok());
        const auto flat = born.rational.flatten();
        for (std::size_t k = 0; k < flat.size(); ++k) {
            CHECK(std::abs(flat[k].to_double() - born.exact.entries[k]) < 1e-3);
        }
        // Rounding happens in marginal / p(00) coordinates, each within the cap.
        const auto& r = born.rational;
        for (int x = 1; x <= 3; ++x) {
            for (int y = 1; y <= 3; ++y) {
                CHECK(r(x, y, 0, 0).denominator() <= kDefaultQuantumDenCap);
                CHECK((r(x, y, 0, 0) + r(x, y, 0, 1)).denominator() <= kDefaultQuantumDenCap);
                CHECK((r(x, y, 0, 0) + r(x, y, 1, 0)).denominator() <= kDefaultQuantumDenCap);
            }
        }
    }
}

TEST_CASE("x = 1 reads Charlie's copy") {
    Rng rng(3);
    for (int i = 0; i < 20; ++i) {
        auto p = random_protocol(rng, 3, 2);
        const auto born = born_behavior(p);
        // Direct Z measurement of the system equals reading the memory: a
        // protocol whose x = 2 measures the system at angle 0 without the copy.
        EwfsProtocol direct = p;
        direct.alice_angles = {0.0};
        const auto d = born_behavior(direct);
        for (int y = 1; y <= 2; ++y) {
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) CHECK(born.exact(1, y, a, b) == doctest::Approx(d.exact(2, y, a, b)).epsilon(1e-12));
            }
        }
        // Changing x >= 2 angles leaves the x = 1 column alone.
        EwfsProtocol moved = p;
        moved.alice_angles = {1.234, 0.5};
        const auto m = born_behavior(moved);
        for (int y = 1; y <= 2; ++y) {
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) CHECK(m.exact(1, y, a, b) == born.exact(1, y, a, b));
            }
        }
    }
}

TEST_CASE("x >= 2 equals the protocol without Charlie") {
    Rng rng(4);
    for (int i = 0; i < 20; ++i) {
        auto p = random_protocol(rng, 3, 2);
        const auto with = born_behavior(p);
        EwfsProtocol without = p;
        without.charlie_unitary = Operator::identity(kProtocolDim);
        const auto wo = born_behavior(without);
        for (int x = 2; x <= 3; ++x) {
            for (int y = 1; y <= 2; ++y) {
                for (int a = 0; a < 2; ++a) {
                    for (int b = 0; b < 2; ++b) CHECK(std::abs(with.exact(x, y, a, b) - wo.exact(x, y, a, b)) < 1e-10);
                }
            }
        }
    }
}

TEST_CASE("product states factorize") {
    Rng rng(5);
    EwfsProtocol p = random_protocol(rng, 3, 3);
    // |bob> (x) |system> = (cos u, sin u) (x) (cos v, e^{i w} sin v)
    const double u = 0.4, v = 1.1, w = 0.7;
    const Complex bob[2] = {std::cos(u), std::sin(u)};
    const Complex sys[2] = {std::cos(v), std::polar(std::sin(v), w)};
    p.initial = PureState::with_ready_memory({bob[0] * sys[0], bob[0] * sys[1], bob[1] * sys[0], bob[1] * sys[1]});
    const auto f = born_behavior(p).exact;
    for (int x = 1; x <= 3; ++x) {
        for (int y = 1; y <= 3; ++y) {
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    const double pa = f(x, y, a, 0) + f(x, y, a, 1);
                    const double pb = f(x, y, 0, b) + f(x, y, 1, b);
                    CHECK(std::abs(f(x, y, a, b) - pa * pb) < 1e-12);
                }
            }
        }
    }
}

TEST_CASE("reverse check") {
    EwfsProtocol p;
    p.initial = PureState::schmidt(0.3);
    p.alice_angles = {0.1};
    p.bob_angles = {0.2};
    CHECK(reverse_check(p));
    EwfsProtocol bad = p;
    bad.charlie_unitary(0, 0) = Complex(1.0 + 1e-6);
    CHECK_FALSE(reverse_check(bad));
    CHECK_ERROR_KIND(born_behavior(bad), ErrorKind::NonUnitary);

    Rng rng(6);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) worst = std::max(worst, reversal_deviation(p, random_protocol(rng, 2, 1).initial));
    CHECK(worst < 1e-10);
}

TEST_CASE("invalid states") {
    EwfsProtocol p;
    p.initial = PureState::with_ready_memory({1.0, 1.0, 0.0, 0.0});
    p.alice_angles = {0.0};
    p.bob_angles = {0.0};
    CHECK_ERROR_KIND(born_behavior(p), ErrorKind::Unnormalized);
}

TEST_CASE("CHSH optimizer against the grid oracle") {
    const double grid = grid_chsh_max(false);
    const double grid_product = grid_chsh_max(true);
    CHECK(grid <= 2 * std::sqrt(2.0) + 1e-12);
    CHECK(grid > 2.8);
    CHECK(grid_product <= 2 + 1e-12);

    const auto opt = chsh_optimize(1, 10'000);
    CHECK(opt.value >= 2.828427 - 1e-6);
    CHECK(opt.value >= grid - 1e-9);
    CHECK(opt.value <= 2 * std::sqrt(2.0) + 1e-12);
    CHECK(opt.value == doctest::Approx(chsh_for(opt.schmidt_angle, opt.alice_angles, opt.bob_angles)));

    const auto prod = chsh_optimize(1, 10'000, true);
    CHECK(prod.value <= 2 + 1e-9);
    CHECK(prod.value >= grid_product - 1e-9);
    CHECK(prod.schmidt_angle == 0.0);

    const auto again = chsh_optimize(1, 10'000);
    CHECK(again.value == opt.value);
    CHECK(again.alice_angles == opt.alice_angles);
}

TEST_CASE("LF violation search") {
    const auto res = lf_violation_search(3, 3, 1, 1000);
    CHECK_FALSE(res.membership.feasible());
    CHECK(verify_membership(res.membership).ok);
    CHECK(res.trace.size() <= 1000);
    CHECK_FALSE(res.trace.back().lf_feasible);
    // x = 1 column: Alice's outcome is Charlie's record, so its marginal is the
    // system's Z statistics regardless of Bob's setting.
    for (int y = 2; y <= 3; ++y) {
        CHECK(res.behavior(1, y, 0, 0) + res.behavior(1, y, 0, 1) ==
              res.behavior(1, 1, 0, 0) + res.behavior(1, 1, 0, 1));
    }
    // Re-rationalizing the float table at the same cap reproduces the verdict.
    const Behavior again = rationalize(res.exact, kDefaultQuantumDenCap);
    CHECK(again == res.behavior);
    CHECK_FALSE(check_lf(again).feasible());

    CHECK_ERROR_KIND(lf_violation_search(3, 3, 1, 0), ErrorKind::NotFound);
}

TEST_CASE("protocol JSON round-trip") {
    Rng rng(7);
    const auto p = random_protocol(rng, 3, 3);
    const auto q = protocol_from_json(nlohmann::json::parse(protocol_to_json(p).dump()));
    CHECK(q.alice_angles == p.alice_angles);
    CHECK(q.bob_angles == p.bob_angles);
    CHECK(q.initial.amplitudes == p.initial.amplitudes);
    CHECK_ERROR_KIND(protocol_from_json(nlohmann::json::parse(R"({"state": 1})")), ErrorKind::ParseError);
}
