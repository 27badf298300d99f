#ifndef QFPNET_OPTICS_HPP
#define QFPNET_OPTICS_HPP

// Linear-optics model of the balanced beam-splitter tree. Each internal BS
// combines the summed fields of its two halves u, v into (u+v)/sqrt2 (passed
// upward) and (u-v)/sqrt2 (sent to a detector). The root's sum port is D1.
// Detectors D2..DN are the internal nodes in in-order, so for N = 4:
//   D2 = (a1-a2)/sqrt2, D3 = (a1+a2-a3-a4)/2, D4 = (a3-a4)/sqrt2.
// This module is also the brute-force reference for the closed forms in
// probmodel.hpp.

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "qfpnet/click_profile.hpp"
#include "qfpnet/core.hpp"

namespace qfpnet {

using Field = std::complex<double>;

struct PulsePattern {
    std::vector<Field> phases;             // unit modulus, one per port
    std::vector<double> amplitude_scale;   // sqrt(eta_k)*alpha_k/sqrt(pulses)
};

// intensity: mean photon number per pulse at each detector (index 0 = D1).
// complement: what the detector would see with the second operand of its own
// BS sign-flipped; drives the visibility mixture.
struct DetectorIntensities {
    std::vector<double> intensity;
    std::vector<double> complement;
};

inline bool is_power_of_two(int n) { return n >= 2 && (n & (n - 1)) == 0; }

namespace detail {

inline Field combine_tree(const std::vector<Field>& in, int lo, int hi, DetectorIntensities& out, bool root) {
    if (hi - lo == 1) return in[static_cast<std::size_t>(lo)];
    const int mid = (lo + hi) / 2;
    const Field u = combine_tree(in, lo, mid, out, false);
    const Field v = combine_tree(in, mid, hi, out, false);
    const double diff = std::norm(u - v) / 2.0;
    const double sum = std::norm(u + v) / 2.0;
    out.intensity[static_cast<std::size_t>(mid)] = diff;
    out.complement[static_cast<std::size_t>(mid)] = sum;
    if (root) {
        out.intensity[0] = sum;
        out.complement[0] = diff;
    }
    return (u + v) / std::sqrt(2.0);
}

}  // namespace detail

inline DetectorIntensities tree_transfer(const PulsePattern& pattern) {
    const int n = static_cast<int>(pattern.phases.size());
    if (!is_power_of_two(n)) throw DomainError("tree_transfer: port count must be a power of two >= 2");
    if (pattern.amplitude_scale.size() != pattern.phases.size())
        throw DomainError("tree_transfer: one amplitude per port required");
    std::vector<Field> in(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const Field ph = pattern.phases[static_cast<std::size_t>(k)];
        if (std::abs(std::abs(ph) - 1.0) > 1e-12) throw DomainError("tree_transfer: phases must have unit modulus");
        const double a = pattern.amplitude_scale[static_cast<std::size_t>(k)];
        if (!(a >= 0.0)) throw DomainError("tree_transfer: amplitudes must be >= 0");
        in[static_cast<std::size_t>(k)] = ph * a;
    }
    DetectorIntensities out{std::vector<double>(static_cast<std::size_t>(n), 0.0),
                            std::vector<double>(static_cast<std::size_t>(n), 0.0)};
    detail::combine_tree(in, 0, n, out, true);
    return out;
}

// Real orthogonal matrix of the tree: detector field k = sum_j T[k][j] * input_j.
inline std::vector<std::vector<double>> transfer_matrix(int n) {
    if (!is_power_of_two(n)) throw DomainError("transfer_matrix: port count must be a power of two >= 2");
    std::vector<std::vector<double>> t(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
    for (int j = 0; j < n; ++j) t[0][static_cast<std::size_t>(j)] = 1.0 / std::sqrt(static_cast<double>(n));
    // Node spanning [lo, hi) writes row `mid`: +1/sqrt(len) on the left half,
    // -1/sqrt(len) on the right half.
    for (int len = 2; len <= n; len *= 2) {
        for (int lo = 0; lo < n; lo += len) {
            const int mid = lo + len / 2;
            const double w = 1.0 / std::sqrt(static_cast<double>(len));
            for (int j = lo; j < lo + len; ++j) t[static_cast<std::size_t>(mid)][static_cast<std::size_t>(j)] = j < mid ? w : -w;
        }
    }
    return t;
}

// Ports compared by each detector: left block versus right block (D1 has
// the whole range on the left and nothing on the right).
struct DetectorComparison {
    int detector;
    std::vector<int> left;
    std::vector<int> right;
};

inline std::vector<DetectorComparison> detector_comparisons(int n) {
    if (!is_power_of_two(n)) throw DomainError("detector_comparisons: port count must be a power of two >= 2");
    std::vector<DetectorComparison> out;
    DetectorComparison root{1, {}, {}};
    for (int j = 0; j < n; ++j) root.left.push_back(j);
    out.push_back(root);
    std::vector<DetectorComparison> nodes(static_cast<std::size_t>(n));
    for (int len = 2; len <= n; len *= 2) {
        for (int lo = 0; lo < n; lo += len) {
            const int mid = lo + len / 2;
            DetectorComparison c{mid + 1, {}, {}};
            for (int j = lo; j < mid; ++j) c.left.push_back(j);
            for (int j = mid; j < lo + len; ++j) c.right.push_back(j);
            nodes[static_cast<std::size_t>(mid)] = c;
        }
    }
    for (int k = 1; k < n; ++k) out.push_back(nodes[static_cast<std::size_t>(k)]);
    return out;
}

// nu*(1 - e^{-I}) + (1 - nu)*(1 - e^{-I_c}) + P_d, clamped to [0, 1].
inline double click_probability(double intensity, double dark, double visibility, double complement_intensity) {
    if (!(intensity >= 0.0) || !(complement_intensity >= 0.0))
        throw DomainError("click_probability: intensities must be >= 0");
    if (!(dark >= 0.0 && dark < 1.0)) throw DomainError("click_probability: dark count must lie in [0, 1)");
    if (!(visibility > 0.0 && visibility <= 1.0)) throw DomainError("click_probability: visibility must lie in (0, 1]");
    double p = -visibility * std::expm1(-intensity);
    if (visibility < 1.0) p += -(1.0 - visibility) * std::expm1(-complement_intensity);
    p += dark;
    return std::clamp(p, 0.0, 1.0);
}

namespace detail {

// Phase of a two-bit symbol: i^(b1 xor b2) * (-1)^b1.
inline Field two_bit_phase(bool b1, bool b2) {
    const Field i{0.0, 1.0};
    Field ph = (b1 != b2) ? i : Field{1.0, 0.0};
    return b1 ? -ph : ph;
}

}  // namespace detail

// Pattern-enumeration reference: fraction-weighted click probability of every
// detector for relationship `rel` under run configuration `rc`. Two-bit
// encoding pairs two code positions per pulse; the two positions are drawn
// independently from the single-bit pattern distribution.
inline ClickProfile oracle_click_profile(const Relationship& rel, const RunConfig& rc, const ChannelModel& ch,
                                         const ProtocolParams& pp) {
    const int n = rel.size();
    if (n != 2 && n != 4) throw DomainError("oracle_click_profile: two or four senders supported");
    if (ch.senders() != n) throw DomainError("oracle_click_profile: channel size mismatch");
    rc.validate(n);
    const Relationship ports = rel.at_ports(rc.pairing);
    const auto patterns = pattern_distribution(ports, pp.delta);
    const double pulses = static_cast<double>(rc.encoding.pulses_per_codeword);
    if (!(pulses > 0.0)) throw DomainError("oracle_click_profile: no pulses");

    std::vector<double> scale(static_cast<std::size_t>(n));
    for (int p = 0; p < n; ++p) {
        const int s = rc.pairing[static_cast<std::size_t>(p)];
        scale[static_cast<std::size_t>(p)] = std::sqrt(ch.eta[static_cast<std::size_t>(s)]) * rc.alphas[static_cast<std::size_t>(s)] / std::sqrt(pulses);
    }

    std::vector<double> acc(static_cast<std::size_t>(n), 0.0);
    auto accumulate = [&](const std::vector<Field>& phases, double w) {
        const auto det = tree_transfer(PulsePattern{phases, scale});
        for (int d = 0; d < n; ++d)
            acc[static_cast<std::size_t>(d)] +=
                w * click_probability(det.intensity[static_cast<std::size_t>(d)], 0.0, ch.visibility,
                                      det.complement[static_cast<std::size_t>(d)]);
    };

    std::vector<Field> phases(static_cast<std::size_t>(n));
    if (rc.encoding.variant == Encoding::SingleBit) {
        for (const auto& pat : patterns) {
            for (int p = 0; p < n; ++p) phases[static_cast<std::size_t>(p)] = ((pat.flips >> p) & 1u) ? -1.0 : 1.0;
            accumulate(phases, pat.weight);
        }
    } else {
        for (const auto& first : patterns)
            for (const auto& second : patterns) {
                for (int p = 0; p < n; ++p)
                    phases[static_cast<std::size_t>(p)] = detail::two_bit_phase((first.flips >> p) & 1u, (second.flips >> p) & 1u);
                accumulate(phases, first.weight * second.weight);
            }
    }

    ClickProfile out;
    out.condition = Condition::ByRelationship;
    out.relationship = rel;
    out.pulses = rc.encoding.pulses_per_codeword;
    for (int d = 0; d < n; ++d) {
        out.detectors.push_back(d + 1);
        out.per_detector.push_back(std::clamp(acc[static_cast<std::size_t>(d)] + ch.dark_count, 0.0, 1.0));
    }
    return out;
}

}  // namespace qfpnet

#endif
