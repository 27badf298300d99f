#ifndef QFPNET_OPTIMIZER_HPP
#define QFPNET_OPTIMIZER_HPP

// Amplitude and threshold search minimising Q^R subject to P_e <= epsilon.
//
// P_e is a maximum over runs and Q^R a sum over runs, so each run is searched
// on its own. Within a run the amplitude vector is written as s * w with
// w_0 = 1: for a fixed shape w the smallest feasible scale s is found by
// bisection on log s, and the shape is improved by coordinate descent on
// log w_k (coarse grid, then golden-section refinement).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "qfpnet/complexity.hpp"
#include "qfpnet/core.hpp"
#include "qfpnet/probmodel.hpp"
#include "qfpnet/stats.hpp"

namespace qfpnet {

struct AmplitudeGrid {
    double lower = 1.0;
    double upper = 1e4;
    int points = 24;             // coarse grid per coordinate
    double tolerance = 1e-3;     // golden-section width in log w
    double scale_tolerance = 1e-5;  // bisection width in log s
    int max_passes = 6;

    void validate() const {
        if (!(lower > 0.0) || !std::isfinite(upper) || !(upper >= lower))
            throw DomainError("AmplitudeGrid: bounds must be positive, finite and ordered");
        if (points < 3) throw DomainError("AmplitudeGrid: at least 3 grid points");
        if (!(tolerance > 0.0) || !(scale_tolerance > 0.0)) throw DomainError("AmplitudeGrid: tolerances must be > 0");
    }
};

struct OptimizationProblem {
    ProtocolParams pp;
    ChannelModel ch;
    EncodingScheme encoding;
    int runs = 1;
    AmplitudeGrid grid;

    static OptimizationProblem make(const ProtocolParams& pp, const ChannelModel& ch, Encoding enc, bool relationship,
                                    AmplitudeGrid grid = {}) {
        const int n = ch.senders();
        if (n != 2 && n != 4) throw DomainError("OptimizationProblem: two or four senders supported");
        if (pp.senders != n) throw DomainError("OptimizationProblem: sender count differs between protocol and channel");
        if (n == 4 && enc != Encoding::SingleBit)
            throw DomainError("OptimizationProblem: four senders use single-bit encoding only");
        grid.validate();
        const int runs = (n == 4 && relationship) ? 3 : 1;
        return {pp, ch, EncodingScheme::make(enc, pp.m), runs, grid};
    }

    int senders() const { return ch.senders(); }

    Pairing pairing(int run) const { return senders() == 4 ? run_pairing(run) : identity_pairing(senders()); }
};

struct TraceEntry {
    int run = 0;
    std::string stage;
    std::vector<double> alphas;
    double q = 0.0;
    double p_e = 1.0;
    bool feasible = false;
};

struct OptimizerTrace {
    std::vector<TraceEntry> entries;
    std::uint64_t evaluations = 0;
};

struct OptimizationResult {
    std::vector<RunConfig> per_run;
    double q_r = 0.0;
    double p_e = 1.0;
    bool feasible = false;
    std::vector<double> run_p_e;
    OptimizerTrace trace;
};

// Equal / Different profiles of run `run` (1-based) for the given amplitudes.
inline ConditionProfiles run_profiles(const OptimizationProblem& prob, int run, const std::vector<double>& alphas) {
    if (prob.senders() == 2) return two_party_asymmetric(alphas, prob.ch, prob.pp, prob.encoding.variant);
    RunConfig rc{alphas, run_pairing(run), {}, prob.encoding};
    return four_party_asymmetric(run, rc, prob.ch, prob.pp);
}

// Audit of given parameters. Runs without thresholds get the best ones.
inline OptimizationResult evaluate_fixed(std::vector<RunConfig> params, const OptimizationProblem& prob) {
    if (params.empty()) throw DomainError("evaluate_fixed: no runs given");
    if (static_cast<int>(params.size()) > prob.runs) throw DomainError("evaluate_fixed: more runs than the problem budgets");
    const std::size_t observed = prob.senders() == 4 ? 3 : 1;
    OptimizationResult out;
    for (std::size_t r = 0; r < params.size(); ++r) {
        auto& rc = params[r];
        const int run = static_cast<int>(r) + 1;
        if (rc.pairing.empty()) rc.pairing = prob.pairing(run);
        if (rc.encoding.pulses_per_codeword == 0) rc.encoding = prob.encoding;
        rc.validate(prob.senders());
        const auto profiles = run_profiles(prob, run, rc.alphas);
        if (rc.thresholds.empty())
            for (const auto& t : best_thresholds(profiles)) rc.thresholds.push_back(t.threshold);
        if (rc.thresholds.size() != observed) throw DomainError("evaluate_fixed: wrong number of thresholds");
        const RunEvidence ev{profiles, rc.thresholds};
        const double pe = error_probability(std::span<const RunEvidence>(&ev, 1));
        out.run_p_e.push_back(pe);
        out.p_e = r == 0 ? pe : std::max(out.p_e, pe);
    }
    out.q_r = q_total(params, prob.pp.n);
    out.feasible = out.p_e <= prob.pp.epsilon;
    out.per_run = std::move(params);
    return out;
}

namespace detail {

// Ordering of candidates: feasible before infeasible; feasible by Q, then
// infeasible by P_e; remaining ties by the amplitude vector.
struct Score {
    bool feasible = false;
    double q = std::numeric_limits<double>::infinity();
    double p_e = 1.0;
    std::vector<double> alphas;

    bool better_than(const Score& o) const {
        if (feasible != o.feasible) return feasible;
        const double a = feasible ? q : p_e, b = feasible ? o.q : o.p_e;
        if (a != b) return a < b;
        return alphas < o.alphas;
    }
};

class RunSearch {
public:
    RunSearch(const OptimizationProblem& prob, int run, OptimizerTrace& trace)
        : prob_(prob), run_(run), trace_(trace), log2n_(prob.pp.log2_n()) {}

    double run_error(const std::vector<double>& alphas) {
        ++trace_.evaluations;
        const auto profiles = run_profiles(prob_, run_, alphas);
        double pe = 0.0;
        for (const auto& t : best_thresholds(profiles)) pe = std::max(pe, t.error);
        return pe;
    }

    // Smallest feasible scale for shape w (log-coordinates, w_0 = 0).
    Score shape_score(const std::vector<double>& logw) {
        const auto& g = prob_.grid;
        double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
        for (double lw : logw) {
            lo = std::max(lo, std::log(g.lower) - lw);
            hi = std::min(hi, std::log(g.upper) - lw);
        }
        Score s;
        if (lo > hi + 1e-12) return s;  // shape cannot fit the bounds
        auto alphas_at = [&](double ls) {
            std::vector<double> a;
            for (double lw : logw) a.push_back(std::clamp(std::exp(ls + lw), g.lower, g.upper));
            return a;
        };
        const double eps = prob_.pp.epsilon;
        const double pe_lo = run_error(alphas_at(lo));
        if (pe_lo <= eps) return finish(alphas_at(lo), pe_lo);
        const double pe_hi = run_error(alphas_at(hi));
        if (pe_hi > eps) {
            s.alphas = alphas_at(pe_lo < pe_hi ? lo : hi);
            s.p_e = std::min(pe_lo, pe_hi);
            return s;
        }
        double pe_best = pe_hi;
        while (hi - lo > g.scale_tolerance) {
            const double mid = 0.5 * (lo + hi);
            const double pe = run_error(alphas_at(mid));
            if (pe <= eps) {
                hi = mid;
                pe_best = pe;
            } else {
                lo = mid;
            }
        }
        return finish(alphas_at(hi), pe_best);
    }

    // Coordinate descent from `seed` (log-amplitude shape, entry 0 ignored).
    Score descend(std::vector<double> logw, const std::string& label) {
        const auto& g = prob_.grid;
        const int n = static_cast<int>(logw.size());
        for (double& v : logw) v -= logw[0];
        Score best = shape_score(logw);
        record(label + ":seed", best);
        const double span = std::log(g.upper / g.lower);
        for (int pass = 0; pass < g.max_passes; ++pass) {
            const Score before = best;
            for (int k = 1; k < n; ++k) {
                // Coarse grid: the whole admissible ratio range on the first
                // pass, a narrower window around the current value later.
                const double half = pass == 0 ? span : span / std::pow(4.0, pass);
                const double a = pass == 0 ? -span : logw[k] - half;
                const double b = pass == 0 ? span : logw[k] + half;
                const double step = (b - a) / (g.points - 1);
                int best_i = -1;
                for (int i = 0; i < g.points; ++i) {
                    auto trial = logw;
                    trial[k] = a + step * i;
                    const Score s = shape_score(trial);
                    if (s.better_than(best)) {
                        best = s;
                        best_i = i;
                        logw = trial;
                    }
                }
                const double centre = best_i >= 0 ? a + step * best_i : logw[k];
                golden(logw, k, centre - step, centre + step, best);
            }
            record(label + ":pass" + std::to_string(pass + 1), best);
            if (!best.better_than(before)) break;
            if (before.feasible && best.feasible && before.q - best.q <= 1e-9 * before.q) break;
        }
        return best;
    }

private:
    Score finish(std::vector<double> alphas, double pe) {
        Score s;
        s.feasible = true;
        s.p_e = pe;
        double photons = 0.0;
        for (double a : alphas) photons += a * a;
        s.q = photons * log2n_;
        s.alphas = std::move(alphas);
        return s;
    }

    void golden(std::vector<double>& logw, int k, double a, double b, Score& best) {
        const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
        auto eval = [&](double x) {
            auto trial = logw;
            trial[static_cast<std::size_t>(k)] = x;
            return std::make_pair(shape_score(trial), trial);
        };
        double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
        auto f1 = eval(x1), f2 = eval(x2);
        while (b - a > prob_.grid.tolerance) {
            if (f1.first.better_than(f2.first)) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - invphi * (b - a);
                f1 = eval(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + invphi * (b - a);
                f2 = eval(x2);
            }
        }
        for (auto* f : {&f1, &f2})
            if (f->first.better_than(best)) {
                best = f->first;
                logw = f->second;
            }
    }

    void record(const std::string& stage, const Score& s) {
        trace_.entries.push_back({run_, stage, s.alphas, s.feasible ? s.q : 0.0, s.p_e, s.feasible});
    }

    const OptimizationProblem& prob_;
    int run_;
    OptimizerTrace& trace_;
    double log2n_;
};

}  // namespace detail

inline OptimizationResult optimize(const OptimizationProblem& prob) {
    prob.grid.validate();
    OptimizerTrace trace;
    std::vector<RunConfig> runs;
    for (int run = 1; run <= prob.runs; ++run) {
        detail::RunSearch search(prob, run, trace);
        const int n = prob.senders();
        // Seeds: equal received amplitude (alpha ~ 1/sqrt(eta)) and equal alpha.
        std::vector<double> balanced, flat(static_cast<std::size_t>(n), 0.0);
        for (int k = 0; k < n; ++k) {
            const double eta = prob.ch.eta[static_cast<std::size_t>(k)];
            balanced.push_back(eta > 0.0 ? -0.5 * std::log(eta) : 0.0);
        }
        detail::Score best = search.descend(balanced, "balanced");
        const detail::Score other = search.descend(flat, "flat");
        if (other.better_than(best)) best = other;
        runs.push_back(RunConfig{best.alphas, prob.pairing(run), {}, prob.encoding});
    }
    auto result = evaluate_fixed(std::move(runs), prob);
    result.trace = std::move(trace);
    return result;
}

// Best configuration restricted to equal amplitudes in every run (bisection
// on the common amplitude only).
inline OptimizationResult optimize_symmetric(const OptimizationProblem& prob) {
    prob.grid.validate();
    OptimizerTrace trace;
    std::vector<RunConfig> runs;
    for (int run = 1; run <= prob.runs; ++run) {
        detail::RunSearch search(prob, run, trace);
        const auto s = search.shape_score(std::vector<double>(static_cast<std::size_t>(prob.senders()), 0.0));
        runs.push_back(RunConfig{s.alphas, prob.pairing(run), {}, prob.encoding});
    }
    auto result = evaluate_fixed(std::move(runs), prob);
    result.trace = std::move(trace);
    return result;
}

}  // namespace qfpnet

#endif
