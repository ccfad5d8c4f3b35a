#include "jointdesc/induction.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

#include "jointdesc/error.hpp"
#include "jointdesc/random.hpp"

namespace jointdesc {

namespace {

constexpr std::size_t kFrontierTarget = 64;

struct Node {
    ToyMachine machine;
    int length = 0;  // program bits fed so far
};

struct Tally {
    std::vector<std::uint64_t> by_length;  // qualifying programs per length
    bool truncated = false;

    explicit Tally(int max_length) : by_length(static_cast<std::size_t>(max_length) + 1, 0) {}

    void merge(const Tally& o) {
        for (std::size_t i = 0; i < by_length.size(); ++i) by_length[i] += o.by_length[i];
        truncated = truncated || o.truncated;
    }
};

void check_bits(std::string_view s, std::string_view what) {
    for (char c : s) {
        if (c != '0' && c != '1') {
            throw Error(ErrorKind::InvalidArgument, std::string(what) + " must contain only '0' and '1'");
        }
    }
}

class Enumerator {
public:
    Enumerator(std::string_view x, const ToyMachineConfig& cfg) : x_(x), cfg_(cfg) {}

    // Runs the node until it finishes or needs a bit. Returns true when it
    // needs a bit and may still be extended.
    bool advance(Node& n, Tally& t) const {
        while (true) {
            switch (n.machine.run(cfg_.steps)) {
                case ToyMachine::Status::Output: {
                    const auto& out = n.machine.output();
                    if (out.back() != static_cast<std::uint8_t>(x_[out.size() - 1] - '0')) return false;
                    if (out.size() == x_.size()) {
                        ++t.by_length[static_cast<std::size_t>(n.length)];
                        return false;
                    }
                    break;
                }
                case ToyMachine::Status::NeedBit: return n.length < cfg_.max_length;
                case ToyMachine::Status::OutOfSteps: t.truncated = true; return false;
                case ToyMachine::Status::Halted:
                case ToyMachine::Status::Dead: return false;
            }
        }
    }

    void explore(Node root, Tally& t) const {
        std::vector<Node> stack;
        stack.push_back(std::move(root));
        while (!stack.empty()) {
            Node n = std::move(stack.back());
            stack.pop_back();
            if (!advance(n, t)) continue;
            for (int bit : {1, 0}) {
                Node child = n;
                child.machine.feed(bit);
                ++child.length;
                stack.push_back(std::move(child));
            }
        }
    }

private:
    std::string_view x_;
    const ToyMachineConfig& cfg_;
};

}  // namespace

void ToyMachineConfig::validate() const {
    if (machine_id != kToyMachineId) {
        throw Error(ErrorKind::InvalidArgument, "unknown machine id '" + machine_id + "'");
    }
    if (max_length < 0 || steps == 0) throw Error(ErrorKind::InvalidArgument, "L must be >= 0 and T positive");
    if (max_length > kMaxProgramLengthCap) {
        throw Error(ErrorKind::CapExceeded, "L = " + std::to_string(max_length) + " exceeds the cap of 24");
    }
    if (steps > kMaxStepCap) throw Error(ErrorKind::CapExceeded, "T exceeds the cap of 10^6");
}

AlgProbEstimate estimate_M(std::string_view x, const ToyMachineConfig& cfg) {
    cfg.validate();
    check_bits(x, "x");
    if (x.size() > kMaxInputBits) throw Error(ErrorKind::CapExceeded, "x is longer than 512 bits");

    Tally total(cfg.max_length);
    if (x.empty()) {
        total.by_length[0] = 1;
    } else {
        const Enumerator en(x, cfg);
        // Breadth-first expansion to a frontier of program prefixes, then one
        // depth-first search per prefix. Counts are integers per length, so the
        // reduction is order-independent.
        std::vector<Node> frontier{Node{}};
        while (!frontier.empty() && frontier.size() < kFrontierTarget) {
            std::vector<Node> next;
            for (auto& n : frontier) {
                if (!en.advance(n, total)) continue;
                for (int bit : {0, 1}) {
                    Node child = n;
                    child.machine.feed(bit);
                    ++child.length;
                    next.push_back(std::move(child));
                }
            }
            frontier = std::move(next);
        }

        std::vector<Tally> partial(frontier.size(), Tally(cfg.max_length));
        std::atomic<std::size_t> next_task{0};
        auto worker = [&] {
            for (std::size_t i = next_task++; i < frontier.size(); i = next_task++) {
                en.explore(std::move(frontier[i]), partial[i]);
            }
        };
        const std::size_t workers =
            std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), frontier.size());
        std::vector<std::thread> pool;
        for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
        worker();
        for (auto& th : pool) th.join();
        for (const auto& p : partial) total.merge(p);
    }

    AlgProbEstimate est;
    mpq_class mass = 0;
    for (std::size_t len = 0; len < total.by_length.size(); ++len) {
        if (total.by_length[len] == 0) continue;
        mpz_class den = 1;
        den <<= static_cast<mp_bitcnt_t>(len);
        mass += mpq_class(mpz_class(static_cast<unsigned long>(total.by_length[len])), den);
        est.programs_counted += total.by_length[len];
    }
    est.mass = Rational(mass);
    est.truncated = total.truncated;
    return est;
}

Rational conditional_M(std::string_view x, std::string_view y, const ToyMachineConfig& cfg) {
    check_bits(y, "y");
    const AlgProbEstimate base = estimate_M(x, cfg);
    if (base.mass.is_zero()) {
        throw Error(ErrorKind::ZeroBase, "M(x) is 0 at L = " + std::to_string(cfg.max_length));
    }
    const std::string xy = std::string(x) + std::string(y);
    return estimate_M(xy, cfg).mass / base.mass;
}

BbCredence bb_credence(std::string_view history, std::string_view y_ordinary, std::string_view y_thermal,
                       std::uint64_t n_ordinary, std::uint64_t n_thermal, BbRule rule, const ToyMachineConfig& cfg) {
    if (n_ordinary == 0 && n_thermal == 0) throw Error(ErrorKind::InvalidArgument, "copy counts are both zero");
    const Rational no(static_cast<long long>(n_ordinary)), nb(static_cast<long long>(n_thermal));
    BbCredence out;
    Rational w_oo = no, w_bb = nb;
    if (rule == BbRule::Induction) {
        out.conditional_ordinary = conditional_M(history, y_ordinary, cfg);
        out.conditional_thermal = conditional_M(history, y_thermal, cfg);
        w_oo = no * out.conditional_ordinary;
        w_bb = nb * out.conditional_thermal;
    }
    const Rational total = w_oo + w_bb;
    if (total.is_zero()) throw Error(ErrorKind::ZeroBase, "both continuations have zero weight");
    out.ordinary = w_oo / total;
    out.thermal = w_bb / total;
    return out;
}

std::string random_bits(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::string s;
    for (std::size_t i = 0; i < n; ++i) s += rng.below(2) == 0 ? '0' : '1';
    return s;
}

}  // namespace jointdesc
