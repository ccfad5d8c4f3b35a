#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "jointdesc/behavior.hpp"
#include "jointdesc/membership.hpp"

namespace jointdesc {

using Complex = std::complex<double>;

// Three qubits ordered Bob (x) system (x) Charlie's memory; basis index
// 4*bob + 2*system + memory.
inline constexpr std::size_t kProtocolDim = 8;
inline constexpr double kStateTolerance = 1e-12;
inline constexpr std::uint64_t kDefaultQuantumDenCap = 10'000;

struct PureState {
    std::vector<Complex> amplitudes;

    // cos(angle)|00> + sin(angle)|11> on Bob (x) system, memory ready in |0>.
    static PureState schmidt(double angle);
    // (|01> - |10>)/sqrt(2) on Bob (x) system, memory ready in |0>.
    static PureState singlet();
    // Arbitrary Bob (x) system amplitudes (|00>,|01>,|10>,|11>), memory ready.
    static PureState with_ready_memory(const std::array<Complex, 4>& bob_system);

    double norm() const;
    void validate() const;  // throws Unnormalized
};

class Operator {
public:
    explicit Operator(std::size_t dim) : dim_(dim), data_(dim * dim) {}
    static Operator identity(std::size_t dim);

    std::size_t dim() const { return dim_; }
    Complex& operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }
    const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * dim_ + c]; }

    Operator adjoint() const;
    Operator operator*(const Operator& o) const;
    std::vector<Complex> apply(const std::vector<Complex>& v) const;

private:
    std::size_t dim_;
    std::vector<Complex> data_;
};

// Charlie's measurement: copies the system's computational basis value into
// the memory qubit (CNOT system -> memory). Ready state is |0>.
Operator controlled_copy_unitary();

enum class Party { AliceDirect, Bob, Charlie };

// Projective qubit measurement of cos(angle) Z + sin(angle) X; outcome 0 is
// the +1 eigenvector (cos(angle/2), sin(angle/2)).
struct MeasurementSetting {
    double angle = 0.0;
    Party party = Party::Bob;

    std::array<Complex, 2> eigenvector(int outcome) const;
};

struct EwfsProtocol {
    PureState initial;
    Operator charlie_unitary = controlled_copy_unitary();
    // Settings x >= 2: undo U, then measure the system at alice_angles[x-2].
    // Setting x = 1 reads the memory.
    std::vector<double> alice_angles;
    std::vector<double> bob_angles;

    int settings_a() const { return 1 + static_cast<int>(alice_angles.size()); }
    int settings_b() const { return static_cast<int>(bob_angles.size()); }
    ScenarioDescriptor scenario() const;
};

// Float probability table in Behavior::flatten() order.
struct FloatBehavior {
    ScenarioDescriptor scenario;
    std::vector<double> entries;

    double operator()(int x, int y, int a, int b) const { return entries[scenario.entry_index(x, y, a, b)]; }
    FloatBehavior restrict_settings(std::span<const int> xs, std::span<const int> ys) const;
};

double chsh_value(const FloatBehavior& b);
double max_normalization_error(const FloatBehavior& b);
double max_signalling(const FloatBehavior& b);

struct BornResult {
    FloatBehavior exact;
    Behavior rational;
};

// Throws Unnormalized / NonUnitary on an invalid protocol.
BornResult born_behavior(const EwfsProtocol& p, std::uint64_t max_den = kDefaultQuantumDenCap);

// Exact rational table close to a float one. Binary tables are rounded in
// marginal/joint coordinates so the result is exactly no-signalling whenever
// the input is (within 1e-9); otherwise each entry is rounded and the largest
// entry of each cell absorbs the normalization residue.
Behavior rationalize(const FloatBehavior& b, std::uint64_t max_den = kDefaultQuantumDenCap);

// U^dagger U = 1 and U^dagger U psi = psi, both within 1e-12.
bool reverse_check(const EwfsProtocol& p);
// Max entrywise |U^dagger U psi - psi|.
double reversal_deviation(const EwfsProtocol& p, const PureState& psi);

struct ChshOptimum {
    double schmidt_angle = 0.0;
    std::array<double, 2> alice_angles{};
    std::array<double, 2> bob_angles{};
    double value = 0.0;
    std::size_t iterations = 0;
};

// Two-qubit CHSH for cos(t)|00> + sin(t)|11>, settings in the X-Z plane.
double chsh_for(double schmidt_angle, const std::array<double, 2>& alice, const std::array<double, 2>& bob);

// Seeded coordinate ascent with restarts; product_only pins the Schmidt angle at 0.
ChshOptimum chsh_optimize(std::uint64_t seed, std::size_t iterations, bool product_only = false);

struct SearchTraceEntry {
    std::size_t candidate = 0;
    double schmidt_angle = 0.0;
    double best_chsh = 0.0;  // largest float CHSH over 2x2 setting sub-blocks, for reference
    bool lf_feasible = true;
};

struct LfSearchResult {
    EwfsProtocol protocol;
    FloatBehavior exact;
    Behavior behavior;
    MembershipResult membership;
    std::vector<SearchTraceEntry> trace;
};

// Random states and angles; the first candidate whose rationalized behavior
// is LF-infeasible is returned with its certificate. Throws NotFound when the
// budget runs out.
LfSearchResult lf_violation_search(int settings_a, int settings_b, std::uint64_t seed, std::size_t budget,
                                   std::uint64_t max_den = kDefaultQuantumDenCap);

// Protocol object: state amplitudes and angles as decimal strings.
nlohmann::ordered_json protocol_to_json(const EwfsProtocol& p);
EwfsProtocol protocol_from_json(const nlohmann::json& j);

}  // namespace jointdesc
