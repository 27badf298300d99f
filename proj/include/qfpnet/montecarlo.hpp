#ifndef QFPNET_MONTECARLO_HPP
#define QFPNET_MONTECARLO_HPP

// Pulse-level simulation of the protocol at desk scale.
//
// Codewords are budgeted exactly: each worst-case pattern class gets
// round(weight * m) positions. Clicks are independent Bernoulli draws per
// pulse and detector; within a class of equal per-pulse probability the draws
// are taken by geometric skipping, which is the same process. A trial never
// materialises the permuted codewords since position order does not change
// any count.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>
#include <variant>
#include <vector>

#include "qfpnet/core.hpp"
#include "qfpnet/decision.hpp"
#include "qfpnet/optics.hpp"

namespace qfpnet {

// ---------------------------------------------------------------------------
// Keyed counter-based generator: draw i of stream (seed, a, b, c) is a pure
// function of the key and i.
// ---------------------------------------------------------------------------

class KeyedRng {
public:
    KeyedRng(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0, std::uint64_t c = 0)
        : key_(mix(mix(mix(mix(seed) ^ a) ^ (b + 0x632be59bd9b4e019ULL)) ^ (c + 0x8cb92ba72f3d8dd7ULL))) {}

    std::uint64_t next() { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

    // Uniform on (0, 1).
    double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

    std::uint64_t below(std::uint64_t bound) { return static_cast<std::uint64_t>(uniform() * static_cast<double>(bound)); }

    std::uint64_t counter() const { return counter_; }

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// Number of successes among `trials` Bernoulli(p) draws.
inline std::uint64_t bernoulli_count(std::uint64_t trials, double p, KeyedRng& rng) {
    if (trials == 0 || p <= 0.0) return 0;
    if (p >= 1.0) return trials;
    const double lq = std::log1p(-p);
    std::uint64_t hits = 0;
    double pos = 0.0;
    const double n = static_cast<double>(trials);
    while (true) {
        pos += std::floor(std::log(rng.uniform()) / lq);
        if (pos >= n) break;
        ++hits;
        pos += 1.0;
    }
    return hits;
}

// ---------------------------------------------------------------------------
// Codewords
// ---------------------------------------------------------------------------

// Pattern classes with exact position counts; `flips` is over senders.
struct PatternBudget {
    std::uint32_t flips = 0;
    std::uint64_t positions = 0;
};

inline std::vector<PatternBudget> pattern_budget(const Relationship& rel, std::uint64_t m, double delta) {
    if (m < 10) throw DomainError("pattern_budget: m must be >= 10");
    const auto patterns = pattern_distribution(rel, delta);
    std::vector<PatternBudget> out;
    std::uint64_t used = 0;
    for (std::size_t k = 1; k < patterns.size(); ++k) {
        const auto c = static_cast<std::uint64_t>(std::llround(patterns[k].weight * static_cast<double>(m)));
        out.push_back({patterns[k].flips, c});
        used += c;
    }
    if (used > m) throw DomainError("pattern_budget: distance fractions do not fit in m positions");
    out.insert(out.begin(), PatternBudget{0u, m - used});
    return out;
}

// Codeword bits per sender, positions in random order.
struct Codewords {
    std::vector<std::vector<std::uint8_t>> bits;

    std::uint64_t distance(int a, int b) const {
        std::uint64_t d = 0;
        const auto& x = bits.at(static_cast<std::size_t>(a));
        const auto& y = bits.at(static_cast<std::size_t>(b));
        for (std::size_t j = 0; j < x.size(); ++j) d += x[j] != y[j];
        return d;
    }
};

inline Codewords synthesize_codewords(const Relationship& rel, const ProtocolParams& pp, KeyedRng& rng) {
    const auto budget = pattern_budget(rel, pp.m, pp.delta);
    std::vector<std::uint32_t> masks;
    masks.reserve(pp.m);
    for (const auto& b : budget) masks.insert(masks.end(), b.positions, b.flips);
    for (std::size_t j = masks.size(); j > 1; --j) std::swap(masks[j - 1], masks[rng.below(j)]);
    Codewords cw;
    cw.bits.assign(static_cast<std::size_t>(rel.size()), std::vector<std::uint8_t>(masks.size()));
    for (std::size_t j = 0; j < masks.size(); ++j) {
        const auto base = static_cast<std::uint8_t>(rng.next() & 1u);
        for (int s = 0; s < rel.size(); ++s)
            cw.bits[static_cast<std::size_t>(s)][j] = base ^ static_cast<std::uint8_t>((masks[j] >> s) & 1u);
    }
    return cw;
}

// ---------------------------------------------------------------------------
// Trials
// ---------------------------------------------------------------------------

struct TrialSpec {
    Relationship rel;
    ProtocolParams pp;
    ChannelModel ch;
    std::vector<RunConfig> runs;  // N=4: three runs; N=2, 3: one
    std::uint64_t trials = 1;
    std::uint64_t seed = 0;
};

struct DetectorStats {
    int run = 0;
    int detector = 0;
    std::uint64_t samples = 0;
    double mean = 0.0;
    double variance = 0.0;
    double expected_mean = 0.0;  // sum over pattern classes of positions * P
};

struct Interval {
    double lower = 0.0;
    double upper = 1.0;
};

struct TrialReport {
    std::uint64_t trials = 0;
    std::uint64_t correct = 0;
    std::uint64_t incorrect = 0;
    std::uint64_t inconsistent = 0;
    double empirical_correct_rate = 0.0;
    double empirical_incorrect_rate = 0.0;
    double empirical_inconsistent_rate = 0.0;
    double mean_runs_used = 0.0;
    Interval wilson_interval;
    std::vector<DetectorStats> per_detector_count_stats;
};

inline Interval wilson_interval(std::uint64_t successes, std::uint64_t n, double z = 1.959963985) {
    if (n == 0) return {0.0, 1.0};
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(successes) / nn;
    const double z2 = z * z;
    const double centre = (p + z2 / (2 * nn)) / (1 + z2 / nn);
    const double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / (1 + z2 / nn);
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

namespace detail {

// Per-run click probabilities of the observed detectors for each pattern
// class. Three senders use the four-port device with sender 1 on port 4.
struct RunModel {
    std::vector<int> detectors;                 // 1-based
    std::vector<std::uint64_t> positions;       // per class
    std::vector<std::vector<double>> p;         // [class][detector]
    std::vector<double> expected;               // per detector
};

inline RunModel build_run_model(const TrialSpec& spec, const std::vector<PatternBudget>& budget, int run_index) {
    const int n = spec.rel.size();
    const auto& rc = spec.runs[static_cast<std::size_t>(run_index)];
    const Pairing ports = n == 3 ? three_party_ports() : rc.pairing;
    const int width = static_cast<int>(ports.size());
    const double pulses = static_cast<double>(spec.pp.m);
    std::vector<double> scale;
    for (int s : ports)
        scale.push_back(std::sqrt(spec.ch.eta[static_cast<std::size_t>(s)]) * rc.alphas[static_cast<std::size_t>(s)] / std::sqrt(pulses));

    RunModel rm;
    for (int d = 2; d <= width; ++d) rm.detectors.push_back(d);
    rm.expected.assign(rm.detectors.size(), 0.0);
    for (const auto& b : budget) {
        std::vector<Field> phases;
        for (int s : ports) phases.push_back(((b.flips >> s) & 1u) ? -1.0 : 1.0);
        const auto det = tree_transfer(PulsePattern{phases, scale});
        std::vector<double> p;
        for (int d : rm.detectors) {
            const auto k = static_cast<std::size_t>(d - 1);
            p.push_back(click_probability(det.intensity[k], spec.ch.dark_count, spec.ch.visibility, det.complement[k]));
        }
        for (std::size_t k = 0; k < p.size(); ++k) rm.expected[k] += static_cast<double>(b.positions) * p[k];
        rm.positions.push_back(b.positions);
        rm.p.push_back(std::move(p));
    }
    return rm;
}

inline void validate_spec(const TrialSpec& spec) {
    const int n = spec.rel.size();
    if (n < 2 || n > 4) throw DomainError("simulate: two, three or four senders supported");
    if (spec.ch.senders() != n) throw DomainError("simulate: channel size differs from the relationship");
    if (spec.trials < 1) throw DomainError("simulate: trials must be >= 1");
    const std::size_t need = n == 4 ? 3 : 1;
    if (spec.runs.size() != need) throw DomainError("simulate: wrong number of run configurations");
    const std::size_t observed = n == 2 ? 1 : 3;
    for (std::size_t r = 0; r < spec.runs.size(); ++r) {
        const auto& rc = spec.runs[r];
        if (rc.encoding.variant != Encoding::SingleBit) throw DomainError("simulate: only single-bit encoding is simulated");
        if (rc.encoding.pulses_per_codeword != spec.pp.m) throw DomainError("simulate: run pulses differ from m");
        rc.validate(n);
        if (n == 4 && rc.pairing != run_pairing(static_cast<int>(r) + 1))
            throw DomainError("simulate: four-sender runs follow the swap schedule");
        if (rc.thresholds.size() != observed) throw DomainError("simulate: one threshold per observed detector");
    }
}

}  // namespace detail

inline TrialReport simulate(const TrialSpec& spec) {
    detail::validate_spec(spec);
    const int n = spec.rel.size();
    // Three inputs are simulated on the four-port device; the class masks
    // then cover the virtual port 4 through sender 1.
    const auto budget = pattern_budget(spec.rel, spec.pp.m, spec.pp.delta);
    std::vector<detail::RunModel> models;
    for (std::size_t r = 0; r < spec.runs.size(); ++r) models.push_back(detail::build_run_model(spec, budget, static_cast<int>(r)));

    struct Acc {
        std::uint64_t samples = 0;
        double sum = 0.0, sumsq = 0.0;
    };
    std::vector<std::vector<Acc>> acc(models.size());
    for (std::size_t r = 0; r < models.size(); ++r) acc[r].resize(models[r].detectors.size());

    TrialReport rep;
    rep.trials = spec.trials;
    std::uint64_t runs_total = 0;
    for (std::uint64_t t = 0; t < spec.trials; ++t) {
        auto do_run = [&](std::size_t r) {
            const auto& rm = models[r];
            std::vector<std::int64_t> counts;
            for (std::size_t d = 0; d < rm.detectors.size(); ++d) {
                KeyedRng rng(spec.seed, t, r, static_cast<std::uint64_t>(rm.detectors[d]));
                std::uint64_t c = 0;
                for (std::size_t k = 0; k < rm.positions.size(); ++k) c += bernoulli_count(rm.positions[k], rm.p[k][d], rng);
                const double x = static_cast<double>(c);
                acc[r][d].samples += 1;
                acc[r][d].sum += x;
                acc[r][d].sumsq += x * x;
                counts.push_back(static_cast<std::int64_t>(c));
            }
            ++runs_total;
            return outcome_bits(counts, spec.runs[r].thresholds);
        };

        try {
            Relationship got;
            if (n == 2) {
                got = do_run(0).bits[0] ? Relationship::parse("AB") : Relationship::parse("AA");
            } else if (n == 3) {
                got = resolve_three_party(do_run(0)).relationship;
            } else {
                std::vector<RunOutcome> outcomes;
                while (true) {
                    outcomes.push_back(do_run(outcomes.size()));
                    const auto res = resolve_f_r(outcomes);
                    if (const auto* d = std::get_if<DecisionOutcome>(&res)) {
                        got = d->relationship;
                        break;
                    }
                }
            }
            (got == spec.rel ? rep.correct : rep.incorrect) += 1;
        } catch (const InconsistentOutcome&) {
            rep.inconsistent += 1;
        }
    }

    const double nt = static_cast<double>(spec.trials);
    rep.empirical_correct_rate = static_cast<double>(rep.correct) / nt;
    rep.empirical_incorrect_rate = static_cast<double>(rep.incorrect) / nt;
    rep.empirical_inconsistent_rate = static_cast<double>(rep.inconsistent) / nt;
    rep.mean_runs_used = static_cast<double>(runs_total) / nt;
    rep.wilson_interval = wilson_interval(rep.correct, spec.trials);
    for (std::size_t r = 0; r < models.size(); ++r)
        for (std::size_t d = 0; d < models[r].detectors.size(); ++d) {
            const auto& a = acc[r][d];
            DetectorStats s{static_cast<int>(r) + 1, models[r].detectors[d], a.samples, 0.0, 0.0, models[r].expected[d]};
            if (a.samples > 0) {
                const double k = static_cast<double>(a.samples);
                s.mean = a.sum / k;
                s.variance = a.samples > 1 ? std::max(0.0, (a.sumsq - a.sum * a.sum / k) / (k - 1)) : 0.0;
            }
            rep.per_detector_count_stats.push_back(s);
        }
    return rep;
}

}  // namespace qfpnet

#endif
