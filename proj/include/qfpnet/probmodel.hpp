#ifndef QFPNET_PROBMODEL_HPP
#define QFPNET_PROBMODEL_HPP

// Closed-form per-pulse click probabilities.
//
// Every expression is a weighted list of click terms (weight, I, I_c) where I
// is the mean photon number reaching the detector and I_c the intensity of
// the same BS's other port. apply_visibility turns each term into
// nu*(1-e^{-I}) + (1-nu)*(1-e^{-I_c}); at nu = 1 the lists reduce to the
// plain 1-e^{-I} forms.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "qfpnet/click_profile.hpp"
#include "qfpnet/core.hpp"

namespace qfpnet {

struct ClickTerm {
    double weight;
    double intensity;
    double complement;
};

inline double apply_visibility(std::span<const ClickTerm> terms, double dark, double visibility) {
    if (!(visibility > 0.0 && visibility <= 1.0)) throw DomainError("apply_visibility: visibility must lie in (0, 1]");
    double p = 0.0;
    for (const auto& t : terms) {
        double term = -visibility * std::expm1(-t.intensity);
        if (visibility < 1.0) term -= (1.0 - visibility) * std::expm1(-t.complement);
        p += t.weight * term;
    }
    return std::clamp(p + dark, 0.0, 1.0);
}

inline double apply_visibility(std::initializer_list<ClickTerm> terms, double dark, double visibility) {
    return apply_visibility(std::span<const ClickTerm>(terms.begin(), terms.size()), dark, visibility);
}

namespace detail {

inline ClickProfile make_profile(std::vector<int> detectors, std::vector<double> p, Condition c, std::uint64_t pulses) {
    ClickProfile out;
    out.detectors = std::move(detectors);
    out.per_detector = std::move(p);
    out.condition = c;
    out.pulses = pulses;
    return out;
}

inline void require_rate(const ProtocolParams& pp) {
    if (pp.m < 1) throw DomainError("probmodel: codeword length must be >= 1");
}

}  // namespace detail

// Symmetric four-party channel, all senders at total photon number mu.
// Detectors D1..D4 for relationship `rel` seen through `pairing`.
inline ClickProfile four_party_symmetric(const Relationship& rel, double mu, const ChannelModel& ch,
                                         const ProtocolParams& pp, const Pairing& pairing = {0, 1, 2, 3}) {
    if (rel.size() != 4 || ch.senders() != 4) throw DomainError("four_party_symmetric: four senders required");
    if (!ch.symmetric()) throw DomainError("four_party_symmetric: channel is asymmetric, use four_party_asymmetric");
    if (!(mu >= 0.0)) throw DomainError("four_party_symmetric: mu must be >= 0");
    detail::require_rate(pp);
    const auto f = relationship_profile(rel, pairing, pp.delta);
    const double a2 = ch.eta[0] * mu / static_cast<double>(pp.m);  // per-pulse intensity of one arm
    const double pd = ch.dark_count, nu = ch.visibility;
    const double same = 1.0 - f.tol;

    const double d1 = apply_visibility({{same, 4 * a2, 0.0}, {f.odd_one_out, a2, a2}, {f.pair_split, 0.0, 4 * a2}}, pd, nu);
    const double d2 = apply_visibility({{f.d12, 2 * a2, 0.0}, {1.0 - f.d12, 0.0, 2 * a2}}, pd, nu);
    const double d3 = apply_visibility({{same, 0.0, 4 * a2}, {f.odd_one_out, a2, a2}, {f.pair_split, 4 * a2, 0.0}}, pd, nu);
    const double d4 = apply_visibility({{f.d34, 2 * a2, 0.0}, {1.0 - f.d34, 0.0, 2 * a2}}, pd, nu);

    auto out = detail::make_profile({1, 2, 3, 4}, {d1, d2, d3, d4}, Condition::ByRelationship, pp.m);
    out.relationship = rel;
    return out;
}

// Equal / Different probabilities of D2, D3, D4 in the symmetric model; the
// Different case is the minimum-separation one (distance delta).
inline ConditionProfiles four_party_equal_diff(double mu, const ChannelModel& ch, const ProtocolParams& pp) {
    if (ch.senders() != 4) throw DomainError("four_party_equal_diff: four senders required");
    if (!ch.symmetric()) throw DomainError("four_party_equal_diff: symmetric channel required");
    if (!(mu >= 0.0)) throw DomainError("four_party_equal_diff: mu must be >= 0");
    detail::require_rate(pp);
    const double a2 = ch.eta[0] * mu / static_cast<double>(pp.m);
    const double pd = ch.dark_count, nu = ch.visibility, d = pp.delta;

    const double e2 = apply_visibility({{1.0, 0.0, 2 * a2}}, pd, nu);
    const double e3 = apply_visibility({{1.0, 0.0, 4 * a2}}, pd, nu);
    const double x2 = apply_visibility({{d, 2 * a2, 0.0}, {1.0 - d, 0.0, 2 * a2}}, pd, nu);
    const double x3 = apply_visibility({{d, a2, a2}, {1.0 - d, 0.0, 4 * a2}}, pd, nu);
    return {detail::make_profile({2, 3, 4}, {e2, e3, e2}, Condition::Equal, pp.m),
            detail::make_profile({2, 3, 4}, {x2, x3, x2}, Condition::Different, pp.m)};
}

// Two senders, arbitrary transmissivities and amplitudes, detector D2.
inline ConditionProfiles two_party_asymmetric(const std::vector<double>& alphas, const ChannelModel& ch,
                                              const ProtocolParams& pp, Encoding encoding = Encoding::SingleBit) {
    if (alphas.size() != 2 || ch.senders() != 2) throw DomainError("two_party_asymmetric: two senders required");
    detail::require_rate(pp);
    const auto scheme = EncodingScheme::make(encoding, pp.m);
    const double pulses = static_cast<double>(scheme.pulses_per_codeword);
    const double b1 = std::sqrt(ch.eta[0]) * alphas[0] / std::sqrt(pulses);
    const double b2 = std::sqrt(ch.eta[1]) * alphas[1] / std::sqrt(pulses);
    const double minus = (b1 - b2) * (b1 - b2) / 2.0;
    const double plus = (b1 + b2) * (b1 + b2) / 2.0;
    const double pd = ch.dark_count, nu = ch.visibility, d = pp.delta;

    const double pe = apply_visibility({{1.0, minus, plus}}, pd, nu);
    double pdiff;
    if (encoding == Encoding::SingleBit) {
        pdiff = apply_visibility({{d, plus, minus}, {1.0 - d, minus, plus}}, pd, nu);
    } else {
        // One differing bit of the pair rotates the phase by +-i.
        const double quad = (b1 * b1 + b2 * b2) / 2.0;
        pdiff = apply_visibility({{(1.0 - d) * (1.0 - d), minus, plus},
                                  {2.0 * d * (1.0 - d), quad, quad},
                                  {d * d, plus, minus}},
                                 pd, nu);
    }
    return {detail::make_profile({2}, {pe}, Condition::Equal, scheme.pulses_per_codeword),
            detail::make_profile({2}, {pdiff}, Condition::Different, scheme.pulses_per_codeword)};
}

// Smallest |field| sum over the four single-sender flips of the D3 input
// (-b_i - b_j + b_k + b_l), i.e. the weakest D3 signal when the pair sums
// differ by one codeword.
inline double d3_min_flip_amplitude(double bi, double bj, double bk, double bl) {
    return std::min({std::abs(bi - bj + bk + bl), std::abs(-bi + bj + bk + bl), std::abs(-bi - bj - bk + bl),
                     std::abs(-bi - bj + bk - bl)});
}

// Four senders, run s in {1,2,3}: ports carry senders (i,j,k,l) per the run
// schedule, amplitudes alpha^s, detectors D2, D3, D4.
inline ConditionProfiles four_party_asymmetric(int run, const RunConfig& rc, const ChannelModel& ch,
                                               const ProtocolParams& pp) {
    if (ch.senders() != 4) throw DomainError("four_party_asymmetric: four senders required");
    const Pairing pairing = run_pairing(run);
    if (!rc.pairing.empty() && rc.pairing != pairing)
        throw DomainError("four_party_asymmetric: pairing does not match the run schedule");
    if (rc.alphas.size() != 4) throw DomainError("four_party_asymmetric: four amplitudes required");
    if (rc.encoding.variant != Encoding::SingleBit)
        throw DomainError("four_party_asymmetric: only single-bit encoding is modelled for four senders");
    detail::require_rate(pp);
    const double pulses = static_cast<double>(pp.m);
    std::array<double, 4> b{};
    for (int p = 0; p < 4; ++p) {
        const auto s = static_cast<std::size_t>(pairing[static_cast<std::size_t>(p)]);
        if (!(rc.alphas[s] >= 0.0)) throw DomainError("four_party_asymmetric: amplitudes must be >= 0");
        b[static_cast<std::size_t>(p)] = std::sqrt(ch.eta[s]) * rc.alphas[s] / std::sqrt(pulses);
    }
    const double pd = ch.dark_count, nu = ch.visibility, d = pp.delta;
    auto sq = [](double x) { return x * x; };

    const double m12 = sq(b[0] - b[1]) / 2.0, p12 = sq(b[0] + b[1]) / 2.0;
    const double m34 = sq(b[2] - b[3]) / 2.0, p34 = sq(b[2] + b[3]) / 2.0;
    const double d3_equal = sq(-b[0] - b[1] + b[2] + b[3]) / 4.0;
    const double d3_equal_c = sq(b[0] + b[1] + b[2] + b[3]) / 4.0;

    // Weakest D3 click term over the single-flip patterns; its complement is
    // the D1 intensity of the same pattern.
    double d3_flip = std::numeric_limits<double>::infinity();
    for (int f = 0; f < 4; ++f) {
        auto c = b;
        c[static_cast<std::size_t>(f)] = -c[static_cast<std::size_t>(f)];
        const double i = sq(c[0] + c[1] - c[2] - c[3]) / 4.0;
        const double ic = sq(c[0] + c[1] + c[2] + c[3]) / 4.0;
        d3_flip = std::min(d3_flip, apply_visibility({{1.0, i, ic}}, 0.0, nu));
    }

    const double e2 = apply_visibility({{1.0, m12, p12}}, pd, nu);
    const double e3 = apply_visibility({{1.0, d3_equal, d3_equal_c}}, pd, nu);
    const double e4 = apply_visibility({{1.0, m34, p34}}, pd, nu);
    const double x2 = apply_visibility({{d, p12, m12}, {1.0 - d, m12, p12}}, pd, nu);
    const double x3 = std::clamp(d * d3_flip + (1.0 - d) * (e3 - pd) + pd, 0.0, 1.0);
    const double x4 = apply_visibility({{d, p34, m34}, {1.0 - d, m34, p34}}, pd, nu);
    return {detail::make_profile({2, 3, 4}, {e2, e3, e4}, Condition::Equal, pp.m),
            detail::make_profile({2, 3, 4}, {x2, x3, x4}, Condition::Different, pp.m)};
}

}  // namespace qfpnet

#endif
