#include "jointdesc/duplication.hpp"

#include <cmath>
#include <sstream>

#include "jointdesc/error.hpp"
#include "jointdesc/random.hpp"

namespace jointdesc {

namespace {

Rational binomial(std::uint64_t n, std::uint64_t k) {
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return Rational(mpq_class(r));
}

Rational from_u64(std::uint64_t v) {
    mpz_class z;
    mpz_import(z.get_mpz_t(), 1, 1, sizeof v, 0, 0, &v);
    return Rational(mpq_class(z));
}

Rational custom_weight(const CredenceRule& rule, const std::string& label) {
    auto it = rule.weights.find(label);
    if (it == rule.weights.end()) return Rational(0);
    return it->second;
}

void check_custom(const CredenceRule& rule) {
    bool any = false;
    for (const auto& [label, w] : rule.weights) {
        if (w.sign() < 0) throw Error(ErrorKind::InvalidArgument, "custom weight for '" + label + "' is negative");
        any = any || !w.is_zero();
    }
    if (!any) throw Error(ErrorKind::InvalidArgument, "custom weights are all zero");
}

// Draws Heads with probability q exactly when q's denominator fits 64 bits.
class CoinSource {
public:
    explicit CoinSource(const Rational& q) {
        const mpz_class num = q.numerator(), den = q.denominator();
        exact_ = den.fits_ulong_p() && sizeof(unsigned long) == 8;
        if (exact_) {
            num_ = num.get_ui();
            den_ = den.get_ui();
        } else {
            q_ = q.to_double();
        }
    }

    bool heads(Rng& rng) const { return exact_ ? rng.below(den_) < num_ : rng.unit() < q_; }

private:
    bool exact_ = true;
    std::uint64_t num_ = 0, den_ = 1;
    double q_ = 0.5;
};

// Ratio estimator sum(num)/sum(den) with its delta-method standard error
// across runs.
Estimate ratio_estimate(const std::vector<double>& num, const std::vector<double>& den) {
    Estimate e;
    const std::size_t n = num.size();
    if (n == 0) return e;
    double sn = 0.0, sd = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sn += num[i];
        sd += den[i];
    }
    e.mean = sn / sd;
    if (n > 1) {
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = num[i] - e.mean * den[i];
            ss += r * r;
        }
        const double mean_den = sd / static_cast<double>(n);
        e.standard_error = std::sqrt(ss / static_cast<double>(n * (n - 1))) / mean_den;
    }
    return e;
}

}  // namespace

std::string_view to_string(Coin c) { return c == Coin::Heads ? "heads" : "tails"; }

std::string_view to_string(AgentRole r) { return r == AgentRole::Freya ? "freya" : "wigner"; }

DuplicationExperiment DuplicationExperiment::make(std::uint64_t labs, std::uint64_t multiplier, Rational q,
                                                  Rational epsilon) {
    DuplicationExperiment e;
    e.labs = labs;
    e.multiplier = multiplier;
    e.heads_probability = std::move(q);
    e.epsilon = std::move(epsilon);
    e.price = Rational(2, 3) - e.epsilon;
    e.validate();
    return e;
}

void DuplicationExperiment::validate() const {
    if (labs == 0) throw Error(ErrorKind::InvalidArgument, "N must be positive");
    if (multiplier == 0) throw Error(ErrorKind::InvalidArgument, "M must be positive");
    if (heads_probability < Rational(0) || heads_probability > Rational(1)) {
        throw Error(ErrorKind::InvalidArgument, "q must lie in [0, 1]");
    }
    if (epsilon.sign() <= 0) throw Error(ErrorKind::InvalidArgument, "epsilon must be positive");
    if (price.sign() <= 0 || price >= Rational(1)) throw Error(ErrorKind::InvalidArgument, "price must lie in (0, 1)");
}

CredenceRule CredenceRule::parse(std::string_view text) {
    if (text == "elga" || text == "elga-nui" || text == "thirder") return elga();
    if (text == "reflection" || text == "halfer") return reflection();
    constexpr std::string_view prefix = "custom:";
    if (text.substr(0, prefix.size()) == prefix) {
        std::map<std::string, Rational> weights;
        std::stringstream ss{std::string(text.substr(prefix.size()))};
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto eq = item.find('=');
            if (eq == std::string::npos || eq == 0) {
                throw Error(ErrorKind::ParseError, "custom weight '" + item + "' is not label=value");
            }
            weights[item.substr(0, eq)] = Rational::parse(item.substr(eq + 1));
        }
        CredenceRule rule = custom(std::move(weights));
        check_custom(rule);
        return rule;
    }
    throw Error(ErrorKind::ParseError, "unknown credence rule '" + std::string(text) + "'");
}

std::string CredenceRule::name() const {
    switch (kind) {
        case Kind::ElgaNUI: return "elga";
        case Kind::Reflection: return "reflection";
        case Kind::CustomWeights: break;
    }
    std::string s = "custom:";
    bool first = true;
    for (const auto& [label, w] : weights) {
        if (!first) s += ",";
        s += label + "=" + w.to_string();
        first = false;
    }
    return s;
}

LabelDistribution self_locate(const std::vector<std::pair<std::string, std::uint64_t>>& counts,
                              const CredenceRule& rule) {
    if (counts.empty()) throw Error(ErrorKind::EmptyCounts, "no centred worlds given");
    std::vector<Rational> weights;
    for (const auto& [label, count] : counts) {
        if (count == 0) throw Error(ErrorKind::InvalidArgument, "copy count for '" + label + "' must be positive");
        switch (rule.kind) {
            case CredenceRule::Kind::ElgaNUI: weights.push_back(from_u64(count)); break;
            case CredenceRule::Kind::Reflection: weights.emplace_back(1); break;
            case CredenceRule::Kind::CustomWeights: weights.push_back(custom_weight(rule, label)); break;
        }
    }
    if (rule.kind == CredenceRule::Kind::CustomWeights) check_custom(rule);
    Rational total;
    for (const auto& w : weights) total += w;
    if (total.is_zero()) throw Error(ErrorKind::InvalidArgument, "custom weights vanish on every label");
    LabelDistribution out;
    for (std::size_t i = 0; i < counts.size(); ++i) out.emplace_back(counts[i].first, weights[i] / total);
    return out;
}

CoinCredence credence_outcome(const CredenceRule& rule, const DuplicationExperiment& e, AgentRole role) {
    const Rational& q = e.heads_probability;
    const Rational p_tails = Rational(1) - q;
    Rational w_heads, w_tails;
    switch (rule.kind) {
        case CredenceRule::Kind::ElgaNUI:
            w_heads = (duplicated_on_heads(role) ? from_u64(e.multiplier) : Rational(1)) * q;
            w_tails = p_tails;
            break;
        case CredenceRule::Kind::Reflection:
            w_heads = q;
            w_tails = p_tails;
            break;
        case CredenceRule::Kind::CustomWeights:
            check_custom(rule);
            w_heads = custom_weight(rule, "heads") * q;
            w_tails = custom_weight(rule, "tails") * p_tails;
            break;
    }
    const Rational total = w_heads + w_tails;
    if (total.is_zero()) throw Error(ErrorKind::InvalidArgument, "credence weights vanish on both outcomes");
    return {w_heads / total, w_tails / total};
}

std::vector<Rational> heads_count_distribution(std::uint64_t labs, std::uint64_t multiplier, const Rational& q) {
    if (labs == 0 || multiplier == 0) throw Error(ErrorKind::InvalidArgument, "N and M must be positive");
    const Rational p = Rational(1) - q;
    const Rational n = from_u64(labs), m1 = from_u64(multiplier) - Rational(1);
    std::vector<Rational> out;
    Rational total;
    for (std::uint64_t k = 0; k <= labs; ++k) {
        Rational w = (n + m1 * from_u64(k)) * binomial(labs, k) * Rational::pow(q, static_cast<unsigned>(k)) *
                     Rational::pow(p, static_cast<unsigned>(labs - k));
        total += w;
        out.push_back(std::move(w));
    }
    for (auto& w : out) w /= total;
    return out;
}

BinomialCredence credence_via_binomial(std::uint64_t labs, std::uint64_t multiplier, const Rational& q) {
    if (labs == 0 || multiplier == 0) throw Error(ErrorKind::InvalidArgument, "N and M must be positive");
    const Rational p = Rational(1) - q;
    const Rational n = from_u64(labs), m = from_u64(multiplier);
    Rational total, heads, tails;
    for (std::uint64_t k = 0; k <= labs; ++k) {
        const Rational kk = from_u64(k);
        const Rational copies = n + (m - Rational(1)) * kk;
        const Rational world = copies * binomial(labs, k) * Rational::pow(q, static_cast<unsigned>(k)) *
                               Rational::pow(p, static_cast<unsigned>(labs - k));
        total += world;
        heads += world * (m * kk / copies);
        tails += world * ((n - kk) / copies);
    }
    const Rational c = Rational(1) / total;
    return {{heads * c, tails * c}, c};
}

bool SimulationResult::bookkeeping_ok() const {
    for (const auto& r : records) {
        const std::uint64_t tails_labs = experiment.labs - r.heads_labs;
        if (r.freya_copies != r.heads_labs * experiment.multiplier + tails_labs) return false;
        if (r.wigner_copies != experiment.labs) return false;
        if (r.freya_tails_copies != tails_labs || r.wigner_tails_copies != tails_labs) return false;
    }
    return records.size() == runs;
}

SimulationResult simulate_betting(const DuplicationExperiment& e, std::uint64_t runs, std::uint64_t seed) {
    e.validate();
    if (runs == 0) throw Error(ErrorKind::InvalidArgument, "runs must be at least 1");
    const CoinSource coin(e.heads_probability);
    const double price = e.price.to_double();

    SimulationResult res;
    res.experiment = e;
    res.runs = runs;
    res.seed = seed;
    res.records.reserve(runs);
    std::vector<double> f_copies, w_copies, f_tails, w_tails, f_profit, w_profit, heads, labs;
    for (std::uint64_t run = 0; run < runs; ++run) {
        Rng rng(mix_seed(seed, run));
        RunRecord r;
        for (std::uint64_t lab = 0; lab < e.labs; ++lab) {
            if (coin.heads(rng)) ++r.heads_labs;
        }
        const std::uint64_t tails_labs = e.labs - r.heads_labs;
        r.freya_copies = r.heads_labs * e.multiplier + tails_labs;
        r.wigner_copies = e.labs;
        r.freya_tails_copies = tails_labs;
        r.wigner_tails_copies = tails_labs;
        res.records.push_back(r);

        const double fc = static_cast<double>(r.freya_copies), wc = static_cast<double>(r.wigner_copies);
        f_copies.push_back(fc);
        w_copies.push_back(wc);
        f_tails.push_back(static_cast<double>(tails_labs));
        w_tails.push_back(static_cast<double>(tails_labs));
        f_profit.push_back(static_cast<double>(r.heads_labs * e.multiplier) - price * fc);
        w_profit.push_back(static_cast<double>(r.heads_labs) - price * wc);
        heads.push_back(static_cast<double>(r.heads_labs));
        labs.push_back(static_cast<double>(e.labs));
    }
    res.freya_tails_fraction = ratio_estimate(f_tails, f_copies);
    res.wigner_tails_fraction = ratio_estimate(w_tails, w_copies);
    res.freya_profit = ratio_estimate(f_profit, f_copies);
    res.wigner_profit = ratio_estimate(w_profit, w_copies);
    res.heads_fraction = ratio_estimate(heads, labs);

    const auto freya = credence_outcome(CredenceRule::elga(), e, AgentRole::Freya);
    const auto wigner = credence_outcome(CredenceRule::elga(), e, AgentRole::Wigner);
    res.expected_freya_tails = freya.tails;
    res.expected_wigner_tails = wigner.tails;
    res.expected_freya_profit = freya.heads - e.price;
    res.expected_wigner_profit = wigner.heads - e.price;
    return res;
}

void write_betting_trace(std::ostream& out, const DuplicationExperiment& e, std::uint64_t runs, std::uint64_t seed) {
    e.validate();
    const CoinSource coin(e.heads_probability);
    const Rational win = Rational(1) - e.price;
    const Rational loss = -e.price;
    const Rational m = from_u64(e.multiplier);
    out << "run,role,lab,outcome,copies,bought,profit\n";
    for (std::uint64_t run = 0; run < runs; ++run) {
        Rng rng(mix_seed(seed, run));
        for (std::uint64_t lab = 0; lab < e.labs; ++lab) {
            const bool h = coin.heads(rng);
            const std::string_view outcome = h ? "heads" : "tails";
            const std::uint64_t fc = h ? e.multiplier : 1;
            const Rational f_profit = h ? m * win : loss;
            const Rational w_profit = h ? win : loss;
            out << run << ",freya," << lab << ',' << outcome << ',' << fc << ',' << fc << ',' << f_profit << '\n';
            out << run << ",wigner," << lab << ',' << outcome << ",1,1," << w_profit << '\n';
        }
    }
}

ConsistencyReport check_cp_consistency(const CredenceRule& rule_f, const CredenceRule& rule_w,
                                       std::uint64_t multiplier, const Rational& q) {
    DuplicationExperiment e;
    e.labs = 1;
    e.multiplier = multiplier;
    e.heads_probability = q;
    e.validate();
    ConsistencyReport r;
    r.multiplier = multiplier;
    r.freya_tails = credence_outcome(rule_f, e, AgentRole::Freya).tails;
    r.wigner_tails = credence_outcome(rule_w, e, AgentRole::Wigner).tails;
    r.consistent = r.freya_tails == r.wigner_tails;
    return r;
}

}  // namespace jointdesc
