#ifndef QFPNET_INSTANCES_HPP
#define QFPNET_INSTANCES_HPP

// Published parameter sets and the desk-scale Monte Carlo instance.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qfpnet/core.hpp"
#include "qfpnet/optimizer.hpp"
#include "qfpnet/probmodel.hpp"
#include "qfpnet/stats.hpp"

namespace qfpnet {

struct ReferenceInstance {
    std::string id;
    std::string title;
    ProtocolParams pp;
    ChannelModel ch;
    Encoding encoding = Encoding::SingleBit;
    std::vector<RunConfig> paper_runs;  // alphas and thresholds as published
    double paper_q = 0.0;
    std::optional<double> paper_q_first_run;
    double paper_c_o = 0.0;  // 0 when not published for this instance
    double paper_c_l = 0.0;
    double q_tolerance = 0.005;  // relative, for the audit identity

    OptimizationProblem problem(AmplitudeGrid grid = {}) const {
        return OptimizationProblem::make(pp, ch, encoding, true, grid);
    }

    // Same instance with codeword length round(n / c) instead of round(c n).
    // Under this reading the published thresholds fall between the Equal and
    // Different mean counts.
    ReferenceInstance inverse_expansion() const {
        ReferenceInstance r = *this;
        r.pp = ProtocolParams::make(pp.n, 1.0 / pp.c, pp.delta, pp.epsilon, pp.senders);
        for (auto& rc : r.paper_runs) rc.encoding = EncodingScheme::make(encoding, r.pp.m);
        return r;
    }
};

namespace detail {

inline RunConfig paper_run(std::vector<double> alphas, std::vector<std::int64_t> thresholds, const ProtocolParams& pp,
                           Encoding enc, int run) {
    const int n = static_cast<int>(alphas.size());
    return RunConfig{std::move(alphas), n == 4 ? run_pairing(run) : identity_pairing(n), std::move(thresholds),
                     EncodingScheme::make(enc, pp.m)};
}

}  // namespace detail

inline ReferenceInstance instance_t3() {
    ReferenceInstance r;
    r.id = "T3";
    r.title = "four parties, symmetric channel, three detectors";
    r.pp = ProtocolParams::make(10'000'000'000'000ULL, 0.2, 0.22, 1e-2, 4);
    r.ch = ChannelModel::symmetric_channel(4, 0.1, 1e-11);
    const double a = std::sqrt(4961.0);
    for (int run = 1; run <= 3; ++run) r.paper_runs.push_back(detail::paper_run({a, a, a, a}, {602, 553, 602}, r.pp, r.encoding, run));
    r.paper_q = 2.57e6;
    r.paper_c_o = 1.29e10;
    r.paper_c_l = 3.04e6;
    return r;
}

inline ReferenceInstance instance_t4() {
    ReferenceInstance r;
    r.id = "T4";
    r.title = "two parties, asymmetric channel";
    r.pp = ProtocolParams::make(3'000'000'000'000ULL, 0.2, 0.22, 1e-5, 2);
    r.ch = ChannelModel::from_sqrt_eta({0.3, 0.4}, 1e-10);
    r.paper_runs.push_back(detail::paper_run({85, 78}, {1685}, r.pp, r.encoding, 1));
    r.paper_q = 5.52e5;
    r.paper_c_o = 1.24e10;
    r.paper_c_l = 1.46e6;
    return r;
}

inline ReferenceInstance instance_twobit() {
    ReferenceInstance r = instance_t4();
    r.id = "T_twobit";
    r.title = "two parties, asymmetric channel, two-bit encoding";
    r.encoding = Encoding::TwoBit;
    r.paper_runs = {detail::paper_run({69, 70}, {898}, r.pp, r.encoding, 1)};
    r.paper_q = 3.91e5;
    r.q_tolerance = 0.05;
    return r;
}

inline ReferenceInstance instance_visibility() {
    ReferenceInstance r = instance_t4();
    r.id = "T_vis";
    r.title = "two parties, asymmetric channel, visibility 0.99";
    r.ch = ChannelModel::from_sqrt_eta({0.3, 0.4}, 1e-10, 0.99);
    r.paper_runs = {detail::paper_run({88, 77}, {1695}, r.pp, r.encoding, 1)};
    r.paper_q = 5.67e5;
    return r;
}

inline ReferenceInstance instance_asym4() {
    ReferenceInstance r;
    r.id = "T_asym4";
    r.title = "four parties, asymmetric channel, per-run parameters";
    r.pp = ProtocolParams::make(100'000'000'000'000ULL, 0.2, 0.22, 1e-5, 4);
    r.ch = ChannelModel::from_sqrt_eta({0.3, 0.4, 0.5, 0.6}, 1e-11);
    r.paper_runs = {detail::paper_run({109, 109, 69, 69}, {5367, 5700, 5332}, r.pp, r.encoding, 1),
                    detail::paper_run({97, 77, 99, 78}, {5519, 5600, 5439}, r.pp, r.encoding, 2),
                    detail::paper_run({90, 84, 85, 91}, {5699, 5600, 5347}, r.pp, r.encoding, 3)};
    r.paper_q = 4.43e6;
    r.paper_q_first_run = 1.55e6;
    r.paper_c_o = 1.01e11;
    r.paper_c_l = 1.19e7;
    return r;
}

inline std::vector<ReferenceInstance> reference_instances() {
    return {instance_t3(), instance_t4(), instance_twobit(), instance_visibility(), instance_asym4()};
}

inline std::optional<ReferenceInstance> find_instance(std::string_view id) {
    for (auto& r : reference_instances())
        if (r.id == id) return r;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Desk scale
// ---------------------------------------------------------------------------

struct DeskInstance {
    ProtocolParams pp;
    ChannelModel ch;
    double mu = 0.0;
    std::vector<RunConfig> runs;  // four-sender schedule, shared thresholds
};

// Symmetric channel with Equal mean m*P_d and minimum D3 Different signal
// `d3_signal` counts above it: delta*m*(1 - e^{-eta mu/m}) = d3_signal.
inline DeskInstance desk_instance(int senders = 4, std::uint64_t m = 100'000, double dark = 5e-5, double d3_signal = 75.0,
                                  double eta = 0.1, double delta = 0.22, double epsilon = 1e-3) {
    if (senders < 2 || senders > 4) throw DomainError("desk_instance: two, three or four senders");
    DeskInstance d;
    d.pp = ProtocolParams::with_codeword_length(m, 0.2, delta, epsilon, senders);
    d.ch = ChannelModel::symmetric_channel(senders, eta, dark);
    const double frac = d3_signal / (delta * static_cast<double>(m));
    if (!(frac > 0.0 && frac < 1.0)) throw DomainError("desk_instance: signal does not fit the codeword");
    const double a2 = -std::log1p(-frac);
    d.mu = a2 * static_cast<double>(m) / eta;
    const double alpha = std::sqrt(d.mu);
    const auto enc = EncodingScheme::make(Encoding::SingleBit, m);

    std::vector<std::int64_t> th;
    if (senders == 2) {
        for (const auto& t : best_thresholds(two_party_asymmetric({alpha, alpha}, d.ch, d.pp))) th.push_back(t.threshold);
        d.runs.push_back(RunConfig{{alpha, alpha}, identity_pairing(2), th, enc});
        return d;
    }
    auto pp4 = d.pp;
    pp4.senders = 4;
    const auto ch4 = ChannelModel::symmetric_channel(4, eta, dark);
    for (const auto& t : best_thresholds(four_party_equal_diff(d.mu, ch4, pp4))) th.push_back(t.threshold);
    const int runs = senders == 4 ? 3 : 1;
    for (int run = 1; run <= runs; ++run)
        d.runs.push_back(RunConfig{std::vector<double>(static_cast<std::size_t>(senders), alpha),
                                   senders == 4 ? run_pairing(run) : identity_pairing(senders), th, enc});
    return d;
}

// ---------------------------------------------------------------------------
// Published decision tables, verbatim labels
// ---------------------------------------------------------------------------

struct PaperDecisionRow {
    const char* label;
    const char* r1;
    const char* r2;
    const char* r3;
    int f_r;
};

inline constexpr std::array<PaperDecisionRow, 14> kPaperFourPartyRows{{
    {"AAAA", "000", "", "", 14}, {"AAAB", "011", "011", "", 13}, {"AABA", "011", "110", "", 12},
    {"ABAA", "110", "011", "", 11}, {"BAAA", "110", "110", "", 10}, {"AABB", "010", "", "", 9},
    {"ABAB", "101", "010", "", 8}, {"ABBA", "101", "101", "", 7},  {"AABC", "011", "111", "", 6},
    {"ABAC", "111", "011", "", 5}, {"ABCA", "111", "111", "011", 4}, {"BAAC", "111", "111", "110", 3},
    {"BACA", "111", "110", "", 2}, {"BCAA", "110", "111", "", 1},
}};

inline constexpr std::array<std::array<const char*, 3>, 4> kPaperAbcdSignatures{{
    {"101", "111", ""}, {"111", "101", ""}, {"111", "111", "101"}, {"111", "111", "111"},
}};

inline constexpr std::array<PaperDecisionRow, 5> kPaperThreePartyRows{{
    {"AAAA", "000", "", "", 4}, {"AABA", "011", "", "", 3}, {"ABAA", "110", "", "", 2},
    {"BAAB", "101", "", "", 1}, {"ABCA", "111", "", "", 0},
}};

struct PaperRunCountRow {
    const char* label;
    int t_two_party;
    int t_multi_min;
    int t_multi_max;
};

inline constexpr std::array<PaperRunCountRow, 15> kPaperRunCounts{{
    {"AAAA", 3, 1, 1}, {"AAAB", 3, 2, 2}, {"AABA", 3, 2, 2}, {"ABAA", 3, 2, 2}, {"BAAA", 5, 2, 2},
    {"AABB", 4, 1, 1}, {"ABAB", 4, 2, 2}, {"ABBA", 4, 2, 2}, {"AABC", 4, 2, 2}, {"ABAC", 4, 2, 2},
    {"ABCA", 4, 3, 3}, {"BAAC", 5, 3, 3}, {"BACA", 5, 2, 2}, {"BCAA", 6, 2, 2}, {"ABCD", 6, 2, 3},
}};

}  // namespace qfpnet

#endif
