#ifndef QFPNET_CORE_HPP
#define QFPNET_CORE_HPP

// Domain types shared by the whole toolkit: protocol parameters, channel
// model, relationships (set partitions of the senders), encodings and run
// configurations, plus the worst-case codeword pattern model.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qfpnet {

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// ---------------------------------------------------------------------------
// ProtocolParams
// ---------------------------------------------------------------------------

struct ProtocolParams {
    std::uint64_t n = 0;    // message length in bits
    double c = 0.0;         // ECC expansion factor
    std::uint64_t m = 0;    // codeword length, round(c*n)
    double delta = 0.0;     // minimum relative Hamming distance
    double epsilon = 0.0;   // error budget
    int senders = 0;

    static ProtocolParams make(std::uint64_t n, double c, double delta, double epsilon, int senders) {
        if (n < 1) throw DomainError("ProtocolParams: n must be positive");
        if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("ProtocolParams: c must be > 0");
        if (!(delta > 0.0 && delta < 1.0)) throw DomainError("ProtocolParams: delta must lie in (0, 1)");
        if (!(epsilon > 0.0 && epsilon <= 1.0)) throw DomainError("ProtocolParams: epsilon must lie in (0, 1]");
        if (senders < 2) throw DomainError("ProtocolParams: at least two senders required");
        const long double cn = static_cast<long double>(c) * static_cast<long double>(n);
        const auto m = static_cast<std::uint64_t>(std::llround(cn));
        if (m < 1) throw DomainError("ProtocolParams: codeword length round(c*n) must be >= 1");
        return ProtocolParams{n, c, m, delta, epsilon, senders};
    }

    // Desk-scale parameters with a prescribed codeword length. n is chosen so
    // that round(c*n) == m still holds.
    static ProtocolParams with_codeword_length(std::uint64_t m, double c, double delta, double epsilon,
                                               int senders) {
        if (m < 1) throw DomainError("ProtocolParams: m must be positive");
        if (!(c > 0.0)) throw DomainError("ProtocolParams: c must be > 0");
        const auto guess = static_cast<std::uint64_t>(std::llround(static_cast<long double>(m) / c));
        for (std::uint64_t d = 0; d < 4; ++d) {
            for (std::uint64_t n : {guess + d, guess > d ? guess - d : 1}) {
                if (n < 1) continue;
                auto pp = make(n, c, delta, epsilon, senders);
                if (pp.m == m) return pp;
            }
        }
        throw DomainError("ProtocolParams: no integer n gives round(c*n) == m");
    }

    double log2_n() const { return std::log2(static_cast<double>(n)); }

    std::vector<std::string> warnings() const {
        std::vector<std::string> out;
        if (c <= 1.0)
            out.emplace_back("expansion factor c <= 1: the codeword is not longer than the message");
        return out;
    }
};

// ---------------------------------------------------------------------------
// ChannelModel
// ---------------------------------------------------------------------------

struct ChannelModel {
    std::vector<double> eta;     // power transmissivity per sender
    double dark_count = 0.0;     // per pulse, per detector
    double visibility = 1.0;

    static ChannelModel make(std::vector<double> eta, double dark_count, double visibility = 1.0) {
        if (eta.empty()) throw DomainError("ChannelModel: no transmissivities given");
        for (double e : eta)
            if (!(e >= 0.0 && e <= 1.0)) throw DomainError("ChannelModel: eta must lie in [0, 1]");
        if (!(dark_count >= 0.0 && dark_count < 1.0))
            throw DomainError("ChannelModel: dark count must lie in [0, 1)");
        if (!(visibility > 0.0 && visibility <= 1.0))
            throw DomainError("ChannelModel: visibility must lie in (0, 1]");
        return ChannelModel{std::move(eta), dark_count, visibility};
    }

    static ChannelModel from_sqrt_eta(const std::vector<double>& sqrt_eta, double dark_count,
                                      double visibility = 1.0) {
        std::vector<double> eta;
        eta.reserve(sqrt_eta.size());
        for (double s : sqrt_eta) eta.push_back(s * s);
        return make(std::move(eta), dark_count, visibility);
    }

    static ChannelModel symmetric_channel(int senders, double eta, double dark_count, double visibility = 1.0) {
        return make(std::vector<double>(static_cast<std::size_t>(senders), eta), dark_count, visibility);
    }

    int senders() const { return static_cast<int>(eta.size()); }

    bool symmetric() const {
        return std::adjacent_find(eta.begin(), eta.end(), std::not_equal_to<>()) == eta.end();
    }
};

// ---------------------------------------------------------------------------
// Relationship: a set partition of the senders, stored as a restricted
// growth string (group index of each sender, first occurrence order).
// ---------------------------------------------------------------------------

class Relationship {
public:
    Relationship() = default;

    // Any group assignment; canonicalised on construction.
    explicit Relationship(std::vector<int> groups) : groups_(canonicalize(std::move(groups))) {
        if (groups_.empty()) throw DomainError("Relationship: empty");
    }

    static Relationship parse(std::string_view label) {
        if (label.empty()) throw DomainError("Relationship: empty label");
        std::vector<int> g;
        g.reserve(label.size());
        for (char ch : label) {
            if (ch < 'A' || ch > 'Z') throw DomainError("Relationship: labels use letters A-Z, got '" + std::string(label) + "'");
            g.push_back(ch - 'A');
        }
        return Relationship(std::move(g));
    }

    int size() const { return static_cast<int>(groups_.size()); }
    int group_of(int sender) const { return groups_.at(static_cast<std::size_t>(sender)); }
    const std::vector<int>& group_vector() const { return groups_; }

    int group_count() const {
        return groups_.empty() ? 0 : *std::max_element(groups_.begin(), groups_.end()) + 1;
    }

    std::vector<std::vector<int>> groups() const {
        std::vector<std::vector<int>> out(static_cast<std::size_t>(group_count()));
        for (int k = 0; k < size(); ++k) out[static_cast<std::size_t>(groups_[k])].push_back(k);
        return out;
    }

    // Sizes in descending order.
    std::vector<int> group_sizes() const {
        std::vector<int> sizes(static_cast<std::size_t>(group_count()), 0);
        for (int g : groups_) ++sizes[static_cast<std::size_t>(g)];
        std::sort(sizes.begin(), sizes.end(), std::greater<>());
        return sizes;
    }

    std::string label() const {
        std::string s;
        s.reserve(groups_.size());
        for (int g : groups_) s.push_back(static_cast<char>('A' + g));
        return s;
    }

    bool all_equal() const { return group_count() == 1; }

    bool exists_equal_pair() const {
        const auto sizes = group_sizes();
        return !sizes.empty() && sizes.front() >= 2;
    }

    bool same(int a, int b) const { return group_of(a) == group_of(b); }

    // Relationship seen at the device ports when port p is fed by sender
    // pairing[p].
    Relationship at_ports(const std::vector<int>& pairing) const;

    friend bool operator==(const Relationship& a, const Relationship& b) { return a.groups_ == b.groups_; }
    friend bool operator<(const Relationship& a, const Relationship& b) { return a.groups_ < b.groups_; }

private:
    static std::vector<int> canonicalize(std::vector<int> raw) {
        std::vector<int> map;
        std::vector<int> out;
        out.reserve(raw.size());
        for (int g : raw) {
            if (g < 0) throw DomainError("Relationship: negative group index");
            if (static_cast<std::size_t>(g) >= map.size()) map.resize(static_cast<std::size_t>(g) + 1, -1);
            if (map[static_cast<std::size_t>(g)] < 0)
                map[static_cast<std::size_t>(g)] = static_cast<int>(std::count_if(map.begin(), map.end(), [](int v) { return v >= 0; }));
            out.push_back(map[static_cast<std::size_t>(g)]);
        }
        return out;
    }

    std::vector<int> groups_;
};

// ---------------------------------------------------------------------------
// Pairings (port -> sender), zero-based.
// ---------------------------------------------------------------------------

using Pairing = std::vector<int>;

inline bool is_bijection(const Pairing& p, int n) {
    if (static_cast<int>(p.size()) != n) return false;
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (int v : p) {
        if (v < 0 || v >= n || seen[static_cast<std::size_t>(v)]) return false;
        seen[static_cast<std::size_t>(v)] = true;
    }
    return true;
}

inline Pairing identity_pairing(int n) {
    Pairing p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    return p;
}

// Four-party run schedule: run 1 (1,2)(3,4); run 2 swaps S2<->S3 giving
// (1,3)(2,4); run 3 additionally swaps S3<->S4 giving (1,4)(2,3).
inline Pairing run_pairing(int run) {
    switch (run) {
        case 1: return {0, 1, 2, 3};
        case 2: return {0, 2, 1, 3};
        case 3: return {0, 3, 1, 2};
        default: throw DomainError("run index must be 1, 2 or 3");
    }
}

inline Relationship Relationship::at_ports(const std::vector<int>& pairing) const {
    if (!is_bijection(pairing, size())) throw DomainError("pairing is not a bijection on the senders");
    std::vector<int> g;
    g.reserve(pairing.size());
    for (int sender : pairing) g.push_back(group_of(sender));
    return Relationship(std::move(g));
}

// All set partitions of {1..N} as restricted growth strings in
// lexicographic order.
inline std::vector<Relationship> enumerate_relationships(int n) {
    if (n < 2 || n > 12) throw DomainError("enumerate_relationships: N must lie in [2, 12]");
    std::vector<Relationship> out;
    std::vector<int> a(static_cast<std::size_t>(n), 0);
    std::vector<int> maxprefix(static_cast<std::size_t>(n), 0);  // max of a[0..i-1]
    // Iterative generation: increment the rightmost position that can grow.
    while (true) {
        out.emplace_back(a);
        int i = n - 1;
        while (i > 0) {
            const int mx = maxprefix[static_cast<std::size_t>(i)];
            if (a[static_cast<std::size_t>(i)] <= mx) break;
            --i;
        }
        if (i == 0) break;
        ++a[static_cast<std::size_t>(i)];
        for (int k = i + 1; k < n; ++k) {
            a[static_cast<std::size_t>(k)] = 0;
            maxprefix[static_cast<std::size_t>(k)] =
                std::max(maxprefix[static_cast<std::size_t>(k - 1)], a[static_cast<std::size_t>(k - 1)]);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Encoding and run configuration
// ---------------------------------------------------------------------------

enum class Encoding { SingleBit, TwoBit };

struct EncodingScheme {
    Encoding variant = Encoding::SingleBit;
    std::uint64_t pulses_per_codeword = 0;

    static EncodingScheme make(Encoding variant, std::uint64_t m) {
        if (variant == Encoding::TwoBit) {
            if (m % 2 != 0) throw DomainError("two-bit encoding needs an even codeword length");
            return {variant, m / 2};
        }
        return {variant, m};
    }
};

inline const char* to_string(Encoding e) { return e == Encoding::TwoBit ? "two_bit" : "single_bit"; }

struct RunConfig {
    std::vector<double> alphas;            // per sender, total amplitude
    Pairing pairing;                       // port -> sender
    std::vector<std::int64_t> thresholds;  // per observed detector
    EncodingScheme encoding;

    double mean_photons(int sender) const {
        const double a = alphas.at(static_cast<std::size_t>(sender));
        return a * a;
    }

    void validate(int senders) const {
        if (static_cast<int>(alphas.size()) != senders) throw DomainError("RunConfig: one amplitude per sender required");
        for (double a : alphas)
            if (!(a >= 0.0) || !std::isfinite(a)) throw DomainError("RunConfig: amplitudes must be finite and >= 0");
        if (!is_bijection(pairing, senders)) throw DomainError("RunConfig: pairing is not a bijection");
        for (auto t : thresholds)
            if (t < 0 || static_cast<std::uint64_t>(t) > encoding.pulses_per_codeword)
                throw DomainError("RunConfig: thresholds must lie in [0, pulses]");
    }
};

// ---------------------------------------------------------------------------
// Worst-case codeword pattern model
// ---------------------------------------------------------------------------

// One class of codeword positions: bit p of `flips` is set when slot p holds
// the complement of slot 0's code bit. `weight` is the fraction of positions.
struct PositionPattern {
    std::uint32_t flips = 0;
    double weight = 0.0;
};

// Minimum-distance worst case: with j distinct codewords, every nonempty
// subset S of the groups other than slot 0's group flips on a fraction
// delta / 2^(j-2) of the positions. Every pair of distinct codewords then
// differs on exactly delta*m positions. The all-equal pattern carries the
// remainder and is listed first.
inline std::vector<PositionPattern> pattern_distribution(const Relationship& rel, double delta) {
    if (rel.size() > 31) throw DomainError("pattern_distribution: too many slots");
    const int j = rel.group_count();
    if (j == 1) return {{0u, 1.0}};
    if (!(delta >= 0.0 && delta <= 1.0)) throw DomainError("pattern_distribution: delta must lie in [0, 1]");
    const int ref = rel.group_of(0);
    std::vector<int> others;
    for (int g = 0; g < j; ++g)
        if (g != ref) others.push_back(g);
    const double each = delta / std::ldexp(1.0, j - 2);
    const std::uint32_t subsets = (1u << (j - 1)) - 1u;
    if (static_cast<double>(subsets) * each > 1.0 + 1e-12)
        throw DomainError("pattern_distribution: minimum-distance fractions exceed 1 for " + rel.label());
    std::vector<PositionPattern> out;
    out.push_back({0u, 1.0 - static_cast<double>(subsets) * each});
    for (std::uint32_t s = 1; s <= subsets; ++s) {
        std::uint32_t mask = 0;
        for (int slot = 0; slot < rel.size(); ++slot) {
            for (std::size_t b = 0; b < others.size(); ++b)
                if ((s >> b) & 1u && rel.group_of(slot) == others[b]) mask |= 1u << slot;
        }
        out.push_back({mask, each});
    }
    if (out.front().weight < 0.0) out.front().weight = 0.0;
    return out;
}

// Four-slot position-class fractions used by the closed-form click model.
struct PatternFractions {
    double tol = 0.0;          // positions where not all four bits agree
    double d12 = 0.0;          // slots 1,2 differ
    double d34 = 0.0;          // slots 3,4 differ
    double odd_one_out = 0.0;  // exactly one slot differs from the other three
    double pair_split = 0.0;   // slots (1,2) agree, (3,4) agree, pairs differ
};

inline PatternFractions fractions_of(const std::vector<PositionPattern>& patterns) {
    PatternFractions f;
    for (const auto& p : patterns) {
        const std::uint32_t m = p.flips & 0xFu;
        if (m == 0u) continue;
        const bool b0 = m & 1u, b1 = m & 2u, b2 = m & 4u, b3 = m & 8u;
        f.tol += p.weight;
        if (b0 != b1) f.d12 += p.weight;
        if (b2 != b3) f.d34 += p.weight;
        const int pop = b0 + b1 + b2 + b3;
        if (pop == 1 || pop == 3) f.odd_one_out += p.weight;
        if (m == 0xCu || m == 0x3u) f.pair_split += p.weight;
    }
    return f;
}

inline PatternFractions relationship_profile(const Relationship& rel, const Pairing& pairing, double delta) {
    if (rel.size() != 4) throw DomainError("relationship_profile: four senders required");
    return fractions_of(pattern_distribution(rel.at_ports(pairing), delta));
}

}  // namespace qfpnet

#endif
