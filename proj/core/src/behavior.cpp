#include "jointdesc/behavior.hpp"

#include <limits>

#include "jointdesc/error.hpp"

namespace jointdesc {

namespace {

std::string cell_name(int x, int y) { return "(" + std::to_string(x) + "," + std::to_string(y) + ")"; }

std::uint64_t saturating_pow(std::uint64_t base, int exp) {
    std::uint64_t r = 1;
    for (int i = 0; i < exp; ++i) {
        if (r > std::numeric_limits<std::uint64_t>::max() / base) return std::numeric_limits<std::uint64_t>::max();
        r *= base;
    }
    return r;
}

}  // namespace

ScenarioDescriptor ScenarioDescriptor::binary(int settings_a, int settings_b, bool friend_on_a,
                                              bool friend_on_b) {
    ScenarioDescriptor s{settings_a, settings_b, 2, 2, friend_on_a, friend_on_b};
    s.validate();
    return s;
}

void ScenarioDescriptor::validate() const {
    if (settings_a < 1 || settings_b < 1) {
        throw Error(ErrorKind::InvalidArgument, "setting counts must be >= 1");
    }
    if (outcomes_a < 2 || outcomes_b < 2) {
        throw Error(ErrorKind::InvalidArgument, "outcome counts must be >= 2");
    }
}

Behavior::Behavior(ScenarioDescriptor scenario) : scenario_(scenario), cells_(scenario.cell_count()) {
    scenario_.validate();
}

Behavior::Behavior(ScenarioDescriptor scenario, std::vector<Cell> cells)
    : scenario_(scenario), cells_(std::move(cells)) {
    scenario_.validate();
    if (cells_.size() != scenario_.cell_count()) {
        throw Error(ErrorKind::DimensionMismatch, "expected " + std::to_string(scenario_.cell_count()) +
                                                      " cells, got " + std::to_string(cells_.size()));
    }
    for (const auto& c : cells_) {
        if (!c.empty() && c.size() != scenario_.cell_size()) {
            throw Error(ErrorKind::DimensionMismatch, "cell has " + std::to_string(c.size()) + " entries, expected " +
                                                          std::to_string(scenario_.cell_size()));
        }
    }
}

Behavior Behavior::from_function(const ScenarioDescriptor& scenario,
                                 const std::function<Rational(int, int, int, int)>& p) {
    std::vector<Cell> cells;
    cells.reserve(scenario.cell_count());
    for (int x = 1; x <= scenario.settings_a; ++x) {
        for (int y = 1; y <= scenario.settings_b; ++y) {
            Cell c;
            c.reserve(scenario.cell_size());
            for (int a = 0; a < scenario.outcomes_a; ++a) {
                for (int b = 0; b < scenario.outcomes_b; ++b) c.push_back(p(x, y, a, b));
            }
            cells.push_back(std::move(c));
        }
    }
    return Behavior(scenario, std::move(cells));
}

Behavior Behavior::from_entries(const ScenarioDescriptor& scenario, std::span<const Rational> entries) {
    if (entries.size() != scenario.entry_count()) {
        throw Error(ErrorKind::DimensionMismatch, "entry count mismatch");
    }
    std::vector<Cell> cells(scenario.cell_count());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        auto first = entries.begin() + static_cast<std::ptrdiff_t>(i * scenario.cell_size());
        cells[i].assign(first, first + static_cast<std::ptrdiff_t>(scenario.cell_size()));
    }
    return Behavior(scenario, std::move(cells));
}

bool Behavior::has_cell(int x, int y) const {
    if (x < 1 || x > scenario_.settings_a || y < 1 || y > scenario_.settings_b) return false;
    return !cells_[static_cast<std::size_t>(x - 1) * scenario_.settings_b + (y - 1)].empty();
}

const Behavior::Cell& Behavior::cell(int x, int y) const {
    if (!has_cell(x, y)) throw Error(ErrorKind::MissingCell, "no table entry for setting pair " + cell_name(x, y));
    return cells_[static_cast<std::size_t>(x - 1) * scenario_.settings_b + (y - 1)];
}

void Behavior::require_complete() const {
    for (int x = 1; x <= scenario_.settings_a; ++x) {
        for (int y = 1; y <= scenario_.settings_b; ++y) (void)cell(x, y);
    }
}

std::vector<Rational> Behavior::flatten() const {
    require_complete();
    std::vector<Rational> out;
    out.reserve(scenario_.entry_count());
    for (const auto& c : cells_) out.insert(out.end(), c.begin(), c.end());
    return out;
}

Behavior DeterministicStrategy::to_behavior(const ScenarioDescriptor& s) const {
    if (static_cast<int>(alice.size()) != s.settings_a || static_cast<int>(bob.size()) != s.settings_b) {
        throw Error(ErrorKind::DimensionMismatch, "strategy does not match scenario");
    }
    return Behavior::from_function(s, [&](int x, int y, int a, int b) {
        return Rational(alice[x - 1] == a && bob[y - 1] == b ? 1 : 0);
    });
}

std::string_view to_string(Condition condition) {
    switch (condition) {
        case Condition::Normalization: return "normalization";
        case Condition::Nonnegativity: return "nonnegativity";
        case Condition::NoSignallingA: return "no-signalling-a";
        case Condition::NoSignallingB: return "no-signalling-b";
    }
    return "unknown";
}

ValidationReport validate_behavior(const Behavior& b) {
    b.require_complete();
    const auto& s = b.scenario();
    ValidationReport report;

    for (int x = 1; x <= s.settings_a; ++x) {
        for (int y = 1; y <= s.settings_b; ++y) {
            Rational sum;
            for (int a = 0; a < s.outcomes_a; ++a) {
                for (int bb = 0; bb < s.outcomes_b; ++bb) {
                    const Rational& v = b(x, y, a, bb);
                    sum += v;
                    if (v.sign() < 0) {
                        report.nonnegativity_ok = false;
                        report.failures.push_back({Condition::Nonnegativity, x, y, a, bb, v});
                    }
                }
            }
            if (sum != Rational(1)) {
                report.normalization_ok = false;
                report.failures.push_back({Condition::Normalization, x, y, -1, -1, sum});
            }
        }
    }

    auto alice_marginal = [&](int x, int y, int a) {
        Rational m;
        for (int bb = 0; bb < s.outcomes_b; ++bb) m += b(x, y, a, bb);
        return m;
    };
    auto bob_marginal = [&](int x, int y, int bb) {
        Rational m;
        for (int a = 0; a < s.outcomes_a; ++a) m += b(x, y, a, bb);
        return m;
    };
    for (int x = 1; x <= s.settings_a; ++x) {
        for (int a = 0; a < s.outcomes_a; ++a) {
            const Rational ref = alice_marginal(x, 1, a);
            for (int y = 2; y <= s.settings_b; ++y) {
                Rational diff = alice_marginal(x, y, a) - ref;
                if (!diff.is_zero()) {
                    report.no_signalling_a_ok = false;
                    report.failures.push_back({Condition::NoSignallingA, x, y, a, -1, diff});
                }
            }
        }
    }
    for (int y = 1; y <= s.settings_b; ++y) {
        for (int bb = 0; bb < s.outcomes_b; ++bb) {
            const Rational ref = bob_marginal(1, y, bb);
            for (int x = 2; x <= s.settings_a; ++x) {
                Rational diff = bob_marginal(x, y, bb) - ref;
                if (!diff.is_zero()) {
                    report.no_signalling_b_ok = false;
                    report.failures.push_back({Condition::NoSignallingB, x, y, -1, bb, diff});
                }
            }
        }
    }
    return report;
}

std::uint64_t deterministic_vertex_count(const ScenarioDescriptor& s) {
    const std::uint64_t na = saturating_pow(static_cast<std::uint64_t>(s.outcomes_a), s.settings_a);
    const std::uint64_t nb = saturating_pow(static_cast<std::uint64_t>(s.outcomes_b), s.settings_b);
    if (na != 0 && nb > std::numeric_limits<std::uint64_t>::max() / na) {
        return std::numeric_limits<std::uint64_t>::max();
    }
    return na * nb;
}

std::vector<DeterministicStrategy> enumerate_deterministic_vertices(const ScenarioDescriptor& s,
                                                                    std::uint64_t cap) {
    s.validate();
    const std::uint64_t count = deterministic_vertex_count(s);
    if (count > cap) {
        throw Error(ErrorKind::SizeLimit,
                    std::to_string(count) + " deterministic vertices exceed the cap of " + std::to_string(cap));
    }
    std::vector<DeterministicStrategy> out;
    out.reserve(count);
    DeterministicStrategy cur{std::vector<int>(s.settings_a, 0), std::vector<int>(s.settings_b, 0), {}, {}};

    // Odometer over alice digits then bob digits, last bob setting fastest.
    for (std::uint64_t i = 0; i < count; ++i) {
        DeterministicStrategy v = cur;
        if (s.friend_on_a) v.friend_c = v.alice[0];
        if (s.friend_on_b) v.friend_d = v.bob[0];
        out.push_back(std::move(v));

        int pos = s.settings_b - 1;
        bool carry = true;
        for (; carry && pos >= 0; --pos) {
            if (++cur.bob[pos] < s.outcomes_b) carry = false;
            else cur.bob[pos] = 0;
        }
        for (pos = s.settings_a - 1; carry && pos >= 0; --pos) {
            if (++cur.alice[pos] < s.outcomes_a) carry = false;
            else cur.alice[pos] = 0;
        }
    }
    return out;
}

Behavior pr_box() {
    return Behavior::from_function(ScenarioDescriptor::binary(2, 2), [](int x, int y, int a, int b) {
        return ((a ^ b) == (x - 1) * (y - 1)) ? Rational(1, 2) : Rational(0);
    });
}

Behavior uniform_behavior(const ScenarioDescriptor& s) {
    const Rational v(1, static_cast<long long>(s.cell_size()));
    return Behavior::from_function(s, [&](int, int, int, int) { return v; });
}

Behavior mix(std::span<const Behavior> parts, std::span<const Rational> weights) {
    if (parts.empty() || parts.size() != weights.size()) {
        throw Error(ErrorKind::DimensionMismatch, "mix needs one weight per behavior");
    }
    Rational total;
    for (const auto& w : weights) {
        if (w.sign() < 0) throw Error(ErrorKind::InvalidArgument, "negative mixture weight");
        total += w;
    }
    if (total != Rational(1)) throw Error(ErrorKind::InvalidArgument, "mixture weights must sum to 1");
    const auto& s = parts.front().scenario();
    std::vector<Rational> acc(s.entry_count());
    for (std::size_t k = 0; k < parts.size(); ++k) {
        if (!(parts[k].scenario() == s)) throw Error(ErrorKind::WrongScenario, "mixing different scenarios");
        if (weights[k].is_zero()) continue;
        auto flat = parts[k].flatten();
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += weights[k] * flat[i];
    }
    return Behavior::from_entries(s, acc);
}

Behavior restrict_settings(const Behavior& b, std::span<const int> xs, std::span<const int> ys) {
    const auto& s = b.scenario();
    if (xs.empty() || ys.empty()) throw Error(ErrorKind::InvalidArgument, "empty setting subset");
    for (int x : xs) {
        if (x < 1 || x > s.settings_a) throw Error(ErrorKind::InvalidArgument, "setting x out of range");
    }
    for (int y : ys) {
        if (y < 1 || y > s.settings_b) throw Error(ErrorKind::InvalidArgument, "setting y out of range");
    }
    ScenarioDescriptor r = s;
    r.settings_a = static_cast<int>(xs.size());
    r.settings_b = static_cast<int>(ys.size());
    r.friend_on_a = s.friend_on_a && xs.front() == 1;
    r.friend_on_b = s.friend_on_b && ys.front() == 1;
    return Behavior::from_function(r, [&](int x, int y, int a, int bb) { return b(xs[x - 1], ys[y - 1], a, bb); });
}

Rational chsh_value(const Behavior& b) {
    if (!b.scenario().is_binary_2x2()) {
        throw Error(ErrorKind::WrongScenario, "CHSH needs a binary 2x2 scenario");
    }
    auto correlator = [&](int x, int y) {
        return b(x, y, 0, 0) - b(x, y, 0, 1) - b(x, y, 1, 0) + b(x, y, 1, 1);
    };
    return correlator(1, 1) + correlator(1, 2) + correlator(2, 1) - correlator(2, 2);
}

}  // namespace jointdesc
