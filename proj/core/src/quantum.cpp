#include "jointdesc/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "jointdesc/error.hpp"
#include "jointdesc/random.hpp"

namespace jointdesc {

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t index3(int bob, int system, int memory) {
    return static_cast<std::size_t>(4 * bob + 2 * system + memory);
}

std::string decimal(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_decimal_string(const nlohmann::json& j, const std::string& field) {
    if (!j.is_string()) throw Error(ErrorKind::ParseError, "protocol field '" + field + "': expected a decimal string");
    const std::string s = j.get<std::string>();
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
        return v;
    } catch (const std::logic_error&) {
        throw Error(ErrorKind::ParseError, "protocol field '" + field + "': bad decimal '" + s + "'");
    }
}

void check_unitary(const Operator& u) {
    if (u.dim() != kProtocolDim) throw Error(ErrorKind::NonUnitary, "Charlie's unitary must act on 8 dimensions");
    const Operator prod = u.adjoint() * u;
    for (std::size_t r = 0; r < u.dim(); ++r) {
        for (std::size_t c = 0; c < u.dim(); ++c) {
            const Complex expected = r == c ? 1.0 : 0.0;
            if (std::abs(prod(r, c) - expected) > kStateTolerance) {
                throw Error(ErrorKind::NonUnitary, "U^dagger U deviates from identity");
            }
        }
    }
}

// p(a,b) for Alice measuring the system qubit at angle_a and Bob at angle_b,
// memory traced out.
std::array<double, 4> measure_system_and_bob(const std::vector<Complex>& psi, double angle_a, double angle_b) {
    const MeasurementSetting ma{angle_a, Party::AliceDirect};
    const MeasurementSetting mb{angle_b, Party::Bob};
    std::array<double, 4> p{};
    for (int a = 0; a < 2; ++a) {
        const auto wa = ma.eigenvector(a);
        for (int b = 0; b < 2; ++b) {
            const auto vb = mb.eigenvector(b);
            double prob = 0.0;
            for (int m = 0; m < 2; ++m) {
                Complex amp = 0.0;
                for (int bb = 0; bb < 2; ++bb) {
                    for (int s = 0; s < 2; ++s) amp += std::conj(vb[bb]) * std::conj(wa[s]) * psi[index3(bb, s, m)];
                }
                prob += std::norm(amp);
            }
            p[static_cast<std::size_t>(2 * a + b)] = prob;
        }
    }
    return p;
}

// p(a,b) for reading the memory qubit (a) and Bob at angle_b, system traced out.
std::array<double, 4> read_memory_and_bob(const std::vector<Complex>& psi, double angle_b) {
    const MeasurementSetting mb{angle_b, Party::Bob};
    std::array<double, 4> p{};
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            const auto vb = mb.eigenvector(b);
            double prob = 0.0;
            for (int s = 0; s < 2; ++s) {
                Complex amp = 0.0;
                for (int bb = 0; bb < 2; ++bb) amp += std::conj(vb[bb]) * psi[index3(bb, s, a)];
                prob += std::norm(amp);
            }
            p[static_cast<std::size_t>(2 * a + b)] = prob;
        }
    }
    return p;
}

double best_block_chsh(const FloatBehavior& f) {
    const auto& s = f.scenario;
    double best = 0.0;
    auto E = [&](int x, int y) { return f(x, y, 0, 0) - f(x, y, 0, 1) - f(x, y, 1, 0) + f(x, y, 1, 1); };
    for (int x1 = 1; x1 <= s.settings_a; ++x1) {
        for (int x2 = x1 + 1; x2 <= s.settings_a; ++x2) {
            for (int y1 = 1; y1 <= s.settings_b; ++y1) {
                for (int y2 = y1 + 1; y2 <= s.settings_b; ++y2) {
                    const double e[4] = {E(x1, y1), E(x1, y2), E(x2, y1), E(x2, y2)};
                    const double total = e[0] + e[1] + e[2] + e[3];
                    for (double ei : e) best = std::max({best, std::abs(total - 2 * ei)});
                }
            }
        }
    }
    return best;
}

}  // namespace

PureState PureState::schmidt(double angle) {
    return with_ready_memory({std::cos(angle), 0.0, 0.0, std::sin(angle)});
}

PureState PureState::singlet() {
    const double r = 1.0 / std::sqrt(2.0);
    return with_ready_memory({0.0, r, -r, 0.0});
}

PureState PureState::with_ready_memory(const std::array<Complex, 4>& bob_system) {
    PureState s;
    s.amplitudes.assign(kProtocolDim, 0.0);
    for (int b = 0; b < 2; ++b) {
        for (int sys = 0; sys < 2; ++sys) s.amplitudes[index3(b, sys, 0)] = bob_system[static_cast<std::size_t>(2 * b + sys)];
    }
    return s;
}

double PureState::norm() const {
    double n = 0.0;
    for (const auto& a : amplitudes) n += std::norm(a);
    return std::sqrt(n);
}

void PureState::validate() const {
    if (amplitudes.size() != kProtocolDim) {
        throw Error(ErrorKind::Unnormalized, "state must have 8 amplitudes");
    }
    if (std::abs(norm() - 1.0) > kStateTolerance) throw Error(ErrorKind::Unnormalized, "state norm is not 1");
}

Operator Operator::identity(std::size_t dim) {
    Operator o(dim);
    for (std::size_t i = 0; i < dim; ++i) o(i, i) = 1.0;
    return o;
}

Operator Operator::adjoint() const {
    Operator o(dim_);
    for (std::size_t r = 0; r < dim_; ++r) {
        for (std::size_t c = 0; c < dim_; ++c) o(c, r) = std::conj((*this)(r, c));
    }
    return o;
}

Operator Operator::operator*(const Operator& other) const {
    if (other.dim_ != dim_) throw Error(ErrorKind::DimensionMismatch, "operator dimensions differ");
    Operator o(dim_);
    for (std::size_t r = 0; r < dim_; ++r) {
        for (std::size_t k = 0; k < dim_; ++k) {
            const Complex v = (*this)(r, k);
            if (v == Complex(0.0)) continue;
            for (std::size_t c = 0; c < dim_; ++c) o(r, c) += v * other(k, c);
        }
    }
    return o;
}

std::vector<Complex> Operator::apply(const std::vector<Complex>& v) const {
    if (v.size() != dim_) throw Error(ErrorKind::DimensionMismatch, "vector dimension differs");
    std::vector<Complex> out(dim_);
    for (std::size_t r = 0; r < dim_; ++r) {
        for (std::size_t c = 0; c < dim_; ++c) out[r] += (*this)(r, c) * v[c];
    }
    return out;
}

Operator controlled_copy_unitary() {
    Operator u(kProtocolDim);
    for (int b = 0; b < 2; ++b) {
        for (int s = 0; s < 2; ++s) {
            for (int m = 0; m < 2; ++m) u(index3(b, s, m ^ s), index3(b, s, m)) = 1.0;
        }
    }
    return u;
}

std::array<Complex, 2> MeasurementSetting::eigenvector(int outcome) const {
    const double c = std::cos(angle / 2), s = std::sin(angle / 2);
    if (outcome == 0) return {Complex(c), Complex(s)};
    return {Complex(-s), Complex(c)};
}

ScenarioDescriptor EwfsProtocol::scenario() const {
    ScenarioDescriptor s = ScenarioDescriptor::binary(settings_a(), std::max(1, settings_b()), true, false);
    return s;
}

FloatBehavior FloatBehavior::restrict_settings(std::span<const int> xs, std::span<const int> ys) const {
    FloatBehavior r;
    r.scenario = scenario;
    r.scenario.settings_a = static_cast<int>(xs.size());
    r.scenario.settings_b = static_cast<int>(ys.size());
    r.scenario.friend_on_a = scenario.friend_on_a && !xs.empty() && xs.front() == 1;
    r.scenario.friend_on_b = scenario.friend_on_b && !ys.empty() && ys.front() == 1;
    r.entries.resize(r.scenario.entry_count());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t j = 0; j < ys.size(); ++j) {
            for (int a = 0; a < scenario.outcomes_a; ++a) {
                for (int b = 0; b < scenario.outcomes_b; ++b) {
                    r.entries[r.scenario.entry_index(static_cast<int>(i) + 1, static_cast<int>(j) + 1, a, b)] =
                        (*this)(xs[i], ys[j], a, b);
                }
            }
        }
    }
    return r;
}

double chsh_value(const FloatBehavior& b) {
    if (!b.scenario.is_binary_2x2()) throw Error(ErrorKind::WrongScenario, "CHSH needs a binary 2x2 scenario");
    auto E = [&](int x, int y) { return b(x, y, 0, 0) - b(x, y, 0, 1) - b(x, y, 1, 0) + b(x, y, 1, 1); };
    return E(1, 1) + E(1, 2) + E(2, 1) - E(2, 2);
}

double max_normalization_error(const FloatBehavior& b) {
    double worst = 0.0;
    const auto& s = b.scenario;
    for (int x = 1; x <= s.settings_a; ++x) {
        for (int y = 1; y <= s.settings_b; ++y) {
            double sum = 0.0;
            for (int a = 0; a < s.outcomes_a; ++a) {
                for (int bb = 0; bb < s.outcomes_b; ++bb) sum += b(x, y, a, bb);
            }
            worst = std::max(worst, std::abs(sum - 1.0));
        }
    }
    return worst;
}

double max_signalling(const FloatBehavior& b) {
    const auto& s = b.scenario;
    double worst = 0.0;
    auto alice = [&](int x, int y, int a) {
        double m = 0.0;
        for (int bb = 0; bb < s.outcomes_b; ++bb) m += b(x, y, a, bb);
        return m;
    };
    auto bob = [&](int x, int y, int bb) {
        double m = 0.0;
        for (int a = 0; a < s.outcomes_a; ++a) m += b(x, y, a, bb);
        return m;
    };
    for (int x = 1; x <= s.settings_a; ++x) {
        for (int y = 1; y <= s.settings_b; ++y) {
            for (int a = 0; a < s.outcomes_a; ++a) worst = std::max(worst, std::abs(alice(x, y, a) - alice(x, 1, a)));
            for (int bb = 0; bb < s.outcomes_b; ++bb) worst = std::max(worst, std::abs(bob(x, y, bb) - bob(1, y, bb)));
        }
    }
    return worst;
}

Behavior rationalize(const FloatBehavior& f, std::uint64_t max_den) {
    const auto& s = f.scenario;
    auto round01 = [&](double v) { return Rational::from_double(std::clamp(v, 0.0, 1.0), max_den); };

    if (s.outcomes_a == 2 && s.outcomes_b == 2 && max_signalling(f) <= 1e-9) {
        // Collins-Gisin coordinates: p(a=0|x), p(b=0|y), p(00|xy).
        std::vector<Rational> alice(static_cast<std::size_t>(s.settings_a)), bob(static_cast<std::size_t>(s.settings_b));
        for (int x = 1; x <= s.settings_a; ++x) alice[x - 1] = round01(f(x, 1, 0, 0) + f(x, 1, 0, 1));
        for (int y = 1; y <= s.settings_b; ++y) bob[y - 1] = round01(f(1, y, 0, 0) + f(1, y, 1, 0));
        return Behavior::from_function(s, [&](int x, int y, int a, int b) {
            const Rational& pa = alice[x - 1];
            const Rational& pb = bob[y - 1];
            Rational joint = round01(f(x, y, 0, 0));
            // Keep p00 inside its Frechet bounds so all four entries stay >= 0.
            const Rational lo = std::max(Rational(0), pa + pb - Rational(1));
            const Rational hi = std::min(pa, pb);
            joint = std::clamp(joint, lo, hi);
            if (a == 0 && b == 0) return joint;
            if (a == 0) return pa - joint;
            if (b == 0) return pb - joint;
            return Rational(1) - pa - pb + joint;
        });
    }

    std::vector<Rational> out(f.entries.size());
    for (std::size_t cell = 0; cell < s.cell_count(); ++cell) {
        const std::size_t first = cell * s.cell_size();
        std::size_t largest = first;
        Rational sum;
        for (std::size_t k = first; k < first + s.cell_size(); ++k) {
            out[k] = round01(f.entries[k]);
            sum += out[k];
            if (f.entries[k] > f.entries[largest]) largest = k;
        }
        out[largest] += Rational(1) - sum;
    }
    return Behavior::from_entries(s, out);
}

BornResult born_behavior(const EwfsProtocol& p, std::uint64_t max_den) {
    p.initial.validate();
    check_unitary(p.charlie_unitary);
    if (p.bob_angles.empty()) throw Error(ErrorKind::InvalidArgument, "at least one Bob setting is required");

    const auto after_charlie = p.charlie_unitary.apply(p.initial.amplitudes);
    const auto reversed = p.charlie_unitary.adjoint().apply(after_charlie);

    FloatBehavior f;
    f.scenario = p.scenario();
    f.entries.resize(f.scenario.entry_count());
    for (int x = 1; x <= p.settings_a(); ++x) {
        for (int y = 1; y <= p.settings_b(); ++y) {
            const double theta_b = p.bob_angles[y - 1];
            const auto probs = x == 1 ? read_memory_and_bob(after_charlie, theta_b)
                                      : measure_system_and_bob(reversed, p.alice_angles[x - 2], theta_b);
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) f.entries[f.scenario.entry_index(x, y, a, b)] = probs[2 * a + b];
            }
        }
    }
    return {f, rationalize(f, max_den)};
}

double reversal_deviation(const EwfsProtocol& p, const PureState& psi) {
    const auto back = p.charlie_unitary.adjoint().apply(p.charlie_unitary.apply(psi.amplitudes));
    double worst = 0.0;
    for (std::size_t i = 0; i < back.size(); ++i) worst = std::max(worst, std::abs(back[i] - psi.amplitudes[i]));
    return worst;
}

bool reverse_check(const EwfsProtocol& p) {
    if (p.charlie_unitary.dim() != kProtocolDim || p.initial.amplitudes.size() != kProtocolDim) return false;
    const Operator prod = p.charlie_unitary.adjoint() * p.charlie_unitary;
    for (std::size_t r = 0; r < kProtocolDim; ++r) {
        for (std::size_t c = 0; c < kProtocolDim; ++c) {
            if (std::abs(prod(r, c) - Complex(r == c ? 1.0 : 0.0)) > kStateTolerance) return false;
        }
    }
    return reversal_deviation(p, p.initial) <= kStateTolerance;
}

double chsh_for(double schmidt_angle, const std::array<double, 2>& alice, const std::array<double, 2>& bob) {
    const auto psi = PureState::schmidt(schmidt_angle).amplitudes;
    auto E = [&](int x, int y) {
        const auto p = measure_system_and_bob(psi, alice[x], bob[y]);
        return p[0] - p[1] - p[2] + p[3];
    };
    return E(0, 0) + E(0, 1) + E(1, 0) - E(1, 1);
}

ChshOptimum chsh_optimize(std::uint64_t seed, std::size_t iterations, bool product_only) {
    constexpr std::size_t kPerRestart = 1000;
    const std::size_t restarts = std::max<std::size_t>(1, iterations / kPerRestart);
    const int first_coord = product_only ? 1 : 0;

    ChshOptimum best;
    best.value = -std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    for (std::size_t r = 0; r < restarts; ++r) {
        Rng rng(mix_seed(seed, r));
        // params: schmidt angle, alice[0..1], bob[0..1]
        std::array<double, 5> x{};
        x[0] = product_only ? 0.0 : rng.uniform(0.0, kPi / 2);
        for (int k = 1; k < 5; ++k) x[k] = rng.uniform(-kPi, kPi);
        std::array<double, 5> step{0.3, 0.5, 0.5, 0.5, 0.5};
        auto eval = [](const std::array<double, 5>& v) {
            return chsh_for(v[0], {v[1], v[2]}, {v[3], v[4]});
        };
        double value = eval(x);

        const std::size_t budget = r + 1 == restarts ? iterations - used : std::min(kPerRestart, iterations - used);
        for (std::size_t it = 0; it < budget; ++it, ++used) {
            const int k = first_coord + static_cast<int>(it % static_cast<std::size_t>(5 - first_coord));
            bool improved = false;
            for (double dir : {1.0, -1.0}) {
                auto trial = x;
                trial[k] += dir * step[k];
                const double v = eval(trial);
                if (v > value) {
                    x = trial;
                    value = v;
                    improved = true;
                    break;
                }
            }
            step[k] = improved ? std::min(step[k] * 1.5, 1.0) : std::max(step[k] * 0.5, 1e-15);
        }
        if (value > best.value) {
            best.value = value;
            best.schmidt_angle = x[0];
            best.alice_angles = {x[1], x[2]};
            best.bob_angles = {x[3], x[4]};
        }
    }
    best.iterations = used;
    return best;
}

LfSearchResult lf_violation_search(int settings_a, int settings_b, std::uint64_t seed, std::size_t budget,
                                   std::uint64_t max_den) {
    if (settings_a < 2 || settings_b < 1) {
        throw Error(ErrorKind::InvalidArgument, "LF search needs settings_a >= 2 and settings_b >= 1");
    }
    std::vector<SearchTraceEntry> trace;
    for (std::size_t i = 0; i < budget; ++i) {
        Rng rng(mix_seed(seed, i));
        EwfsProtocol p;
        const double schmidt = rng.uniform(0.0, kPi / 2);
        p.initial = PureState::schmidt(schmidt);
        for (int x = 2; x <= settings_a; ++x) p.alice_angles.push_back(rng.uniform(0.0, 2 * kPi));
        for (int y = 1; y <= settings_b; ++y) p.bob_angles.push_back(rng.uniform(0.0, 2 * kPi));

        auto born = born_behavior(p, max_den);
        auto membership = check_lf(born.rational);
        trace.push_back({i, schmidt, best_block_chsh(born.exact), membership.feasible()});
        if (!membership.feasible()) {
            return {std::move(p), std::move(born.exact), std::move(born.rational), std::move(membership),
                    std::move(trace)};
        }
    }
    throw Error(ErrorKind::NotFound, "no LF-infeasible behavior within " + std::to_string(budget) + " candidates");
}

nlohmann::ordered_json protocol_to_json(const EwfsProtocol& p) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json state = nlohmann::ordered_json::array();
    for (const auto& a : p.initial.amplitudes) state.push_back({decimal(a.real()), decimal(a.imag())});
    j["state"] = std::move(state);
    j["charlie_unitary"] = "controlled-copy";
    j["memory_ready"] = 0;
    nlohmann::ordered_json alice = nlohmann::ordered_json::array();
    for (double t : p.alice_angles) alice.push_back(decimal(t));
    j["alice_angles"] = std::move(alice);
    nlohmann::ordered_json bob = nlohmann::ordered_json::array();
    for (double t : p.bob_angles) bob.push_back(decimal(t));
    j["bob_angles"] = std::move(bob);
    return j;
}

EwfsProtocol protocol_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(ErrorKind::ParseError, "protocol must be an object");
    for (const auto& [key, _] : j.items()) {
        if (key != "state" && key != "charlie_unitary" && key != "memory_ready" && key != "alice_angles" &&
            key != "bob_angles") {
            throw Error(ErrorKind::ParseError, "protocol: unknown field '" + key + "'");
        }
    }
    if (j.contains("charlie_unitary") && j.at("charlie_unitary") != "controlled-copy") {
        throw Error(ErrorKind::ParseError, "protocol: only the controlled-copy unitary is supported");
    }
    if (j.contains("memory_ready") && j.at("memory_ready") != 0) {
        throw Error(ErrorKind::ParseError, "protocol: memory ready state must be 0");
    }
    EwfsProtocol p;
    const auto& state = j.at("state");
    if (!state.is_array() || state.size() != kProtocolDim) {
        throw Error(ErrorKind::ParseError, "protocol field 'state': expected 8 [re, im] pairs");
    }
    p.initial.amplitudes.clear();
    for (std::size_t i = 0; i < kProtocolDim; ++i) {
        const auto& pair = state[i];
        if (!pair.is_array() || pair.size() != 2) {
            throw Error(ErrorKind::ParseError, "protocol field 'state': expected [re, im] pairs");
        }
        p.initial.amplitudes.emplace_back(parse_decimal_string(pair[0], "state"), parse_decimal_string(pair[1], "state"));
    }
    for (const auto& t : j.at("alice_angles")) p.alice_angles.push_back(parse_decimal_string(t, "alice_angles"));
    for (const auto& t : j.at("bob_angles")) p.bob_angles.push_back(parse_decimal_string(t, "bob_angles"));
    return p;
}

}  // namespace jointdesc
