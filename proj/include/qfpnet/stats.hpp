#ifndef QFPNET_STATS_HPP
#define QFPNET_STATS_HPP

// Count distributions of the detectors, their tails, threshold selection and
// the protocol error probability.
//
// Decision convention: outcome 0 iff C < C_th, outcome 1 iff C >= C_th. The
// misclassification probabilities of a detector are therefore
//   Equal:     P(C >= C_th)   (= tail_above(C_th - 1))
//   Different: P(C <  C_th)   (= tail_below(C_th))

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/poisson.hpp>

#include "qfpnet/click_profile.hpp"
#include "qfpnet/core.hpp"

namespace qfpnet {

enum class CountLaw { BinomialExact, PoissonApprox, GaussianApprox };

struct CountModel {
    std::uint64_t pulses = 0;
    double p = 0.0;
    CountLaw law = CountLaw::BinomialExact;

    static constexpr std::uint64_t kPoissonPulses = 1'000'000;
    static constexpr double kPoissonMaxP = 1e-3;

    // Poisson once the exact binomial is impractical and the click
    // probability is small; exact binomial otherwise.
    static CountModel automatic(std::uint64_t pulses, double p) {
        const bool poisson = pulses >= kPoissonPulses && p <= kPoissonMaxP;
        return make(pulses, p, poisson ? CountLaw::PoissonApprox : CountLaw::BinomialExact);
    }

    static CountModel make(std::uint64_t pulses, double p, CountLaw law) {
        if (!(p >= 0.0 && p <= 1.0)) throw DomainError("CountModel: probability must lie in [0, 1]");
        return CountModel{pulses, p, law};
    }

    double mean() const { return static_cast<double>(pulses) * p; }

    double variance() const {
        const double mu = mean();
        return law == CountLaw::PoissonApprox ? mu : mu * (1.0 - p);
    }
};

namespace detail {

using boost_policy = boost::math::policies::policy<boost::math::policies::promote_double<false>>;

inline void check_threshold(const CountModel& m, std::int64_t t) {
    if (t < 0 || static_cast<std::uint64_t>(t) > m.pulses) throw DomainError("threshold must lie in [0, pulses]");
}

// P(C <= k) for k >= 0.
inline double cdf(const CountModel& m, std::int64_t k) {
    const double kk = static_cast<double>(k);
    if (k >= static_cast<std::int64_t>(m.pulses) && m.law != CountLaw::GaussianApprox) return 1.0;
    switch (m.law) {
        case CountLaw::BinomialExact: {
            if (m.p <= 0.0) return 1.0;
            if (m.p >= 1.0) return 0.0;
            boost::math::binomial_distribution<double, boost_policy> d(static_cast<double>(m.pulses), m.p);
            return boost::math::cdf(d, kk);
        }
        case CountLaw::PoissonApprox: {
            if (m.mean() <= 0.0) return 1.0;
            boost::math::poisson_distribution<double, boost_policy> d(m.mean());
            return boost::math::cdf(d, kk);
        }
        case CountLaw::GaussianApprox: {
            const double sd = std::sqrt(m.variance());
            if (sd <= 0.0) return kk + 0.5 >= m.mean() ? 1.0 : 0.0;
            boost::math::normal_distribution<double, boost_policy> d(m.mean(), sd);
            return boost::math::cdf(d, kk + 0.5);
        }
    }
    return 1.0;
}

// P(C > k) for k >= 0, computed from the upper tail directly.
inline double survival(const CountModel& m, std::int64_t k) {
    const double kk = static_cast<double>(k);
    if (k >= static_cast<std::int64_t>(m.pulses) && m.law != CountLaw::GaussianApprox) return 0.0;
    switch (m.law) {
        case CountLaw::BinomialExact: {
            if (m.p <= 0.0) return 0.0;
            if (m.p >= 1.0) return 1.0;
            boost::math::binomial_distribution<double, boost_policy> d(static_cast<double>(m.pulses), m.p);
            return boost::math::cdf(boost::math::complement(d, kk));
        }
        case CountLaw::PoissonApprox: {
            if (m.mean() <= 0.0) return 0.0;
            boost::math::poisson_distribution<double, boost_policy> d(m.mean());
            return boost::math::cdf(boost::math::complement(d, kk));
        }
        case CountLaw::GaussianApprox: {
            const double sd = std::sqrt(m.variance());
            if (sd <= 0.0) return kk + 0.5 < m.mean() ? 1.0 : 0.0;
            boost::math::normal_distribution<double, boost_policy> d(m.mean(), sd);
            return boost::math::cdf(boost::math::complement(d, kk + 0.5));
        }
    }
    return 0.0;
}

}  // namespace detail

// P(C > threshold).
inline double tail_above(const CountModel& model, std::int64_t threshold) {
    detail::check_threshold(model, threshold);
    return detail::survival(model, threshold);
}

// P(C < threshold).
inline double tail_below(const CountModel& model, std::int64_t threshold) {
    detail::check_threshold(model, threshold);
    if (threshold == 0) return 0.0;
    return detail::cdf(model, threshold - 1);
}

inline double pmf(const CountModel& model, std::int64_t k) {
    detail::check_threshold(model, k);
    switch (model.law) {
        case CountLaw::BinomialExact: {
            if (model.p <= 0.0) return k == 0 ? 1.0 : 0.0;
            if (model.p >= 1.0) return static_cast<std::uint64_t>(k) == model.pulses ? 1.0 : 0.0;
            boost::math::binomial_distribution<double, detail::boost_policy> d(static_cast<double>(model.pulses), model.p);
            return boost::math::pdf(d, static_cast<double>(k));
        }
        case CountLaw::PoissonApprox: {
            if (model.mean() <= 0.0) return k == 0 ? 1.0 : 0.0;
            boost::math::poisson_distribution<double, detail::boost_policy> d(model.mean());
            return boost::math::pdf(d, static_cast<double>(k));
        }
        case CountLaw::GaussianApprox:
            return 1.0 - detail::survival(model, k) - (k == 0 ? 0.0 : detail::cdf(model, k - 1));
    }
    return 0.0;
}

// Misclassification of the Equal hypothesis: P(C >= t).
inline double equal_error(const CountModel& equal, std::int64_t threshold) {
    detail::check_threshold(equal, threshold);
    return threshold == 0 ? 1.0 : detail::survival(equal, threshold - 1);
}

// Misclassification of the Different hypothesis: P(C < t).
inline double different_error(const CountModel& diff, std::int64_t threshold) {
    return tail_below(diff, threshold);
}

struct ThresholdChoice {
    std::int64_t threshold = 0;
    double error = 1.0;       // max of the two misclassification probabilities
    bool degenerate = false;  // Equal mean not below Different mean
};

// Integer threshold minimising max{P_E(C >= t), P_D(C < t)}. The first term
// is nonincreasing and the second nondecreasing in t, so the optimum sits at
// the crossing; ties go to the smaller threshold.
inline ThresholdChoice best_threshold(const CountModel& equal, const CountModel& diff) {
    if (equal.pulses != diff.pulses) throw DomainError("best_threshold: pulse counts differ");
    const auto top = static_cast<std::int64_t>(equal.pulses);
    auto objective = [&](std::int64_t t) { return std::max(equal_error(equal, t), different_error(diff, t)); };

    if (!(equal.mean() < diff.mean())) {
        const auto mid = std::clamp<std::int64_t>(std::llround(0.5 * (equal.mean() + diff.mean())), 0, top);
        return {mid, objective(mid), true};
    }

    // crossed(t): Equal error no longer exceeds the Different error.
    auto crossed = [&](std::int64_t t) { return equal_error(equal, t) <= different_error(diff, t); };
    std::int64_t lo = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(equal.mean())), 0, top);
    std::int64_t hi = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::ceil(diff.mean())) + 1, 0, top);
    if (crossed(lo)) lo = 0;
    if (!crossed(hi)) hi = top;
    // Invariant: !crossed(lo) or lo == 0; crossed(hi).
    if (crossed(lo)) {
        hi = lo;
    } else {
        while (hi - lo > 1) {
            const std::int64_t mid = lo + (hi - lo) / 2;
            (crossed(mid) ? hi : lo) = mid;
        }
    }
    ThresholdChoice best{hi, objective(hi), false};
    if (hi > 0) {
        const double below = objective(hi - 1);
        if (below <= best.error) best = {hi - 1, below, false};
    }
    return best;
}

// Equal/Different profiles of one run with one threshold per observed
// detector (in the profile's detector order).
struct RunEvidence {
    ConditionProfiles profiles;
    std::vector<std::int64_t> thresholds;
};

// Max over runs and detectors of the misclassification probabilities.
inline double error_probability(std::span<const RunEvidence> runs) {
    double pe = 0.0;
    for (const auto& run : runs) {
        const auto& eq = run.profiles.equal;
        const auto& df = run.profiles.different;
        if (eq.detectors != df.detectors || eq.pulses != df.pulses)
            throw DomainError("error_probability: Equal and Different profiles do not match");
        if (run.thresholds.size() != eq.detectors.size())
            throw DomainError("error_probability: one threshold per observed detector required");
        for (std::size_t k = 0; k < eq.detectors.size(); ++k) {
            const auto e = CountModel::automatic(eq.pulses, eq.per_detector[k]);
            const auto d = CountModel::automatic(df.pulses, df.per_detector[k]);
            pe = std::max({pe, equal_error(e, run.thresholds[k]), different_error(d, run.thresholds[k])});
        }
    }
    return pe;
}

// Per-detector optimal thresholds for one run.
inline std::vector<ThresholdChoice> best_thresholds(const ConditionProfiles& profiles) {
    const auto& eq = profiles.equal;
    const auto& df = profiles.different;
    if (eq.detectors != df.detectors || eq.pulses != df.pulses)
        throw DomainError("best_thresholds: Equal and Different profiles do not match");
    std::vector<ThresholdChoice> out;
    out.reserve(eq.detectors.size());
    for (std::size_t k = 0; k < eq.detectors.size(); ++k)
        out.push_back(best_threshold(CountModel::automatic(eq.pulses, eq.per_detector[k]),
                                     CountModel::automatic(df.pulses, df.per_detector[k])));
    return out;
}

}  // namespace qfpnet

#endif
