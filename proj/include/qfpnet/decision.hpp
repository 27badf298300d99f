#ifndef QFPNET_DECISION_HPP
#define QFPNET_DECISION_HPP

// Referee logic: outcome bits, the four-party adaptive lookup table, the
// three-party reuse of the four-party device, all-equality rules, run budgets
// and the pairwise-comparison run count.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qfpnet/core.hpp"
#include "qfpnet/probmodel.hpp"

namespace qfpnet {

class InconsistentOutcome : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Ordered bits of the observed detectors (D2, D3, D4 for the four-port
// device); 0 iff count < threshold.
struct RunOutcome {
    std::vector<std::uint8_t> bits;

    static RunOutcome parse(std::string_view s) {
        RunOutcome o;
        for (char ch : s) {
            if (ch != '0' && ch != '1') throw DomainError("RunOutcome: bits must be 0/1, got '" + std::string(s) + "'");
            o.bits.push_back(static_cast<std::uint8_t>(ch - '0'));
        }
        return o;
    }

    std::string str() const {
        std::string s;
        for (auto b : bits) s.push_back(b ? '1' : '0');
        return s;
    }

    friend bool operator==(const RunOutcome&, const RunOutcome&) = default;
};

inline RunOutcome outcome_bits(std::span<const std::int64_t> counts, std::span<const std::int64_t> thresholds) {
    if (counts.size() != thresholds.size()) throw DomainError("outcome_bits: one threshold per count required");
    RunOutcome o;
    for (std::size_t k = 0; k < counts.size(); ++k) o.bits.push_back(counts[k] < thresholds[k] ? 0 : 1);
    return o;
}

inline RunOutcome outcome_bits(const std::vector<std::int64_t>& counts, const std::vector<std::int64_t>& thresholds) {
    return outcome_bits(std::span<const std::int64_t>(counts), std::span<const std::int64_t>(thresholds));
}

struct DecisionOutcome {
    int f_r = 0;
    Relationship relationship;
    int runs_used = 0;
    bool f_ae = false;
    bool f_ee = false;
};

struct NeedMoreRuns {
    int next_run = 0;
    Pairing next_pairing;
};

using Resolution = std::variant<DecisionOutcome, NeedMoreRuns>;

// f^R values of the four-party table: label used in the table and the
// canonical relationship.
struct FrEntry {
    int f_r;
    const char* table_label;
    const char* canonical;
};

inline constexpr std::array<FrEntry, 15> kFourPartyValues{{
    {14, "AAAA", "AAAA"}, {13, "AAAB", "AAAB"}, {12, "AABA", "AABA"}, {11, "ABAA", "ABAA"}, {10, "BAAA", "ABBB"},
    {9, "AABB", "AABB"},  {8, "ABAB", "ABAB"},  {7, "ABBA", "ABBA"},  {6, "AABC", "AABC"},  {5, "ABAC", "ABAC"},
    {4, "ABCA", "ABCA"},  {3, "BAAC", "ABBC"},  {2, "BACA", "ABCB"},  {1, "BCAA", "ABCC"},  {0, "ABCD", "ABCD"},
}};

inline constexpr std::array<FrEntry, 5> kThreePartyValues{{
    {4, "AAAA", "AAA"}, {3, "AABA", "AAB"}, {2, "ABAA", "ABA"}, {1, "BAAB", "ABB"}, {0, "ABCA", "ABC"},
}};

inline DecisionOutcome make_decision(int f_r, std::string_view canonical, int runs_used) {
    DecisionOutcome d;
    d.f_r = f_r;
    d.relationship = Relationship::parse(canonical);
    d.runs_used = runs_used;
    d.f_ae = d.relationship.all_equal();
    d.f_ee = d.relationship.exists_equal_pair();
    return d;
}

inline int f_r_of(const Relationship& rel) {
    const auto label = rel.label();
    const auto& table = rel.size() == 4 ? std::span<const FrEntry>(kFourPartyValues) : std::span<const FrEntry>(kThreePartyValues);
    if (rel.size() != 4 && rel.size() != 3) throw DomainError("f_r_of: three or four senders supported");
    for (const auto& e : table)
        if (label == e.canonical) return e.f_r;
    throw DomainError("f_r_of: unknown relationship " + label);
}

namespace detail {

inline DecisionOutcome four_party_decision(int f_r, int runs) {
    for (const auto& e : kFourPartyValues)
        if (e.f_r == f_r) return make_decision(f_r, e.canonical, runs);
    throw DomainError("unknown f_r");
}

[[noreturn]] inline void inconsistent(std::span<const RunOutcome> outcomes) {
    std::string s;
    for (const auto& o : outcomes) s += (s.empty() ? "" : ",") + o.str();
    throw InconsistentOutcome("outcome sequence [" + s + "] matches no relationship");
}

}  // namespace detail

// Four-party adaptive lookup. Run 2 uses pairing (1,3)(2,4), run 3 (1,4)(2,3).
inline Resolution resolve_f_r(std::span<const RunOutcome> outcomes) {
    if (outcomes.empty()) return NeedMoreRuns{1, run_pairing(1)};
    for (const auto& o : outcomes)
        if (o.bits.size() != 3) throw DomainError("resolve_f_r: three detector bits per run required");
    const std::string r1 = outcomes[0].str();
    auto decide = [&](int f_r, std::size_t runs) -> Resolution {
        if (outcomes.size() > runs) detail::inconsistent(outcomes);
        return detail::four_party_decision(f_r, static_cast<int>(runs));
    };
    auto need = [&](std::size_t run) -> Resolution {
        return NeedMoreRuns{static_cast<int>(run), run_pairing(static_cast<int>(run))};
    };

    if (r1 == "000") return decide(14, 1);
    if (r1 == "010") return decide(9, 1);
    if (r1 != "011" && r1 != "110" && r1 != "101" && r1 != "111") detail::inconsistent(outcomes);
    if (outcomes.size() < 2) return need(2);
    const std::string r2 = outcomes[1].str();

    if (r1 == "011") {
        if (r2 == "011") return decide(13, 2);
        if (r2 == "110") return decide(12, 2);
        if (r2 == "111") return decide(6, 2);
    } else if (r1 == "110") {
        if (r2 == "011") return decide(11, 2);
        if (r2 == "110") return decide(10, 2);
        if (r2 == "111") return decide(1, 2);
    } else if (r1 == "101") {
        if (r2 == "010") return decide(8, 2);
        if (r2 == "101") return decide(7, 2);
        if (r2 == "111") return decide(0, 2);
    } else {  // 111
        if (r2 == "011") return decide(5, 2);
        if (r2 == "110") return decide(2, 2);
        if (r2 == "101") return decide(0, 2);
        if (r2 == "111") {
            if (outcomes.size() < 3) return need(3);
            const std::string r3 = outcomes[2].str();
            if (r3 == "011") return decide(4, 3);
            if (r3 == "110") return decide(3, 3);
            if (r3 == "101" || r3 == "111") return decide(0, 3);
        }
    }
    detail::inconsistent(outcomes);
}

inline Resolution resolve_f_r(const std::vector<RunOutcome>& outcomes) {
    return resolve_f_r(std::span<const RunOutcome>(outcomes));
}

// Three inputs on the four-port device, ports fed (x1, x2, x3, x1).
inline DecisionOutcome resolve_three_party(const RunOutcome& outcome) {
    if (outcome.bits.size() != 3) throw DomainError("resolve_three_party: three detector bits required");
    const std::string r = outcome.str();
    const char* rows[] = {"000", "011", "110", "101", "111"};
    for (std::size_t k = 0; k < 5; ++k)
        if (r == rows[k]) return make_decision(kThreePartyValues[k].f_r, kThreePartyValues[k].canonical, 1);
    throw InconsistentOutcome("three-party outcome " + r + " matches no relationship");
}

// Port arrangement used for three inputs: sender 1 also feeds port 4.
inline Pairing three_party_ports() { return {0, 1, 2, 0}; }

// ---------------------------------------------------------------------------
// All-equality rules
// ---------------------------------------------------------------------------

enum class AeRule { ReferenceDetector, SumDetectors, TwoDetector };

inline AeRule parse_ae_rule(std::string_view s) {
    if (s == "reference") return AeRule::ReferenceDetector;
    if (s == "sum") return AeRule::SumDetectors;
    if (s == "two_detector") return AeRule::TwoDetector;
    throw DomainError("unknown all-equality rule '" + std::string(s) + "'");
}

// ReferenceDetector: counts = {C1}, thresholds = {C1_th}; equal iff C1 >= C1_th.
// SumDetectors: counts = {C2..CN}, thresholds = {C_sum_th}; equal iff sum < C_sum_th.
// TwoDetector: two observed counts; equal iff both are below their thresholds.
inline bool resolve_f_ae(std::span<const std::int64_t> counts, std::span<const std::int64_t> thresholds, AeRule rule) {
    switch (rule) {
        case AeRule::ReferenceDetector:
            if (counts.size() != 1 || thresholds.size() != 1) throw DomainError("resolve_f_ae: one count and threshold for D1");
            return counts[0] >= thresholds[0];
        case AeRule::SumDetectors: {
            if (thresholds.size() != 1 || counts.empty()) throw DomainError("resolve_f_ae: sum rule needs counts and one threshold");
            std::int64_t sum = 0;
            for (auto c : counts) sum += c;
            return sum < thresholds[0];
        }
        case AeRule::TwoDetector:
            if (counts.size() != 2 || thresholds.size() != 2) throw DomainError("resolve_f_ae: two counts and thresholds required");
            return counts[0] < thresholds[0] && counts[1] < thresholds[1];
    }
    throw DomainError("resolve_f_ae: unknown rule");
}

inline bool resolve_f_ae(const std::vector<std::int64_t>& counts, const std::vector<std::int64_t>& thresholds, AeRule rule) {
    return resolve_f_ae(std::span<const std::int64_t>(counts), std::span<const std::int64_t>(thresholds), rule);
}

// ---------------------------------------------------------------------------
// Run budgets
// ---------------------------------------------------------------------------

enum class Target { AllEqual, Relationship };
enum class Scheme { MultiParty, TwoPartyPairwise };

inline int run_budget(int parties, Target target, Scheme scheme) {
    if (parties < 2) throw DomainError("run_budget: N must be >= 2");
    if (scheme == Scheme::MultiParty) {
        if ((parties & (parties - 1)) != 0) throw DomainError("run_budget: multi-party device needs N = 2^s");
        return target == Target::AllEqual ? 1 : parties - 1;
    }
    return target == Target::AllEqual ? parties - 1 : parties * (parties - 1) / 2;
}

// ---------------------------------------------------------------------------
// Forward model: noiseless outcome bits of a run
// ---------------------------------------------------------------------------

// A detector reports 1 exactly when the click model gives it a nonzero
// probability without dark counts.
inline RunOutcome ideal_outcome(const Relationship& rel, const Pairing& pairing, double delta = 0.22) {
    const auto pp = ProtocolParams::make(1000, 1.0, delta, 0.5, 4);
    const auto ch = ChannelModel::symmetric_channel(4, 1.0, 0.0, 1.0);
    const auto profile = four_party_symmetric(rel, 100.0, ch, pp, pairing);
    RunOutcome o;
    for (int d : {2, 3, 4}) o.bits.push_back(profile.at(d) > 0.0 ? 1 : 0);
    return o;
}

// Drives resolve_f_r with noiseless outcomes.
inline DecisionOutcome resolve_ideal(const Relationship& rel, double delta = 0.22) {
    if (rel.size() != 4) throw DomainError("resolve_ideal: four senders required");
    std::vector<RunOutcome> outcomes;
    for (int run = 1; run <= 3; ++run) {
        outcomes.push_back(ideal_outcome(rel, run_pairing(run), delta));
        auto r = resolve_f_r(outcomes);
        if (auto* d = std::get_if<DecisionOutcome>(&r)) return *d;
    }
    throw InconsistentOutcome("ideal outcomes did not resolve within three runs");
}

// ---------------------------------------------------------------------------
// Pairwise two-party scheme: comparisons (1,2),(1,3),(1,4),(2,3),(2,4),(3,4)
// in order, skipping any whose result already follows from earlier results.
// ---------------------------------------------------------------------------

struct RunCounts {
    int t_two_party = 0;
    int t_multi_party = 0;
};

inline int pairwise_comparisons_needed(const Relationship& rel) {
    const int n = rel.size();
    // known[a][b]: 0 unknown, 1 equal, 2 different; kept transitively closed.
    std::vector<std::vector<int>> known(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n), 0));
    auto at = [&](int a, int b) -> int& { return known[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]; };
    for (int a = 0; a < n; ++a) at(a, a) = 1;
    int runs = 0;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            if (at(a, b) != 0) continue;
            ++runs;
            const int v = rel.same(a, b) ? 1 : 2;
            at(a, b) = at(b, a) = v;
            bool changed = true;
            while (changed) {
                changed = false;
                for (int x = 0; x < n; ++x)
                    for (int y = 0; y < n; ++y)
                        for (int z = 0; z < n; ++z) {
                            if (at(x, y) == 1 && at(y, z) != 0 && at(x, z) == 0) {
                                at(x, z) = at(z, x) = at(y, z);
                                changed = true;
                            }
                        }
            }
        }
    return runs;
}

inline RunCounts pairwise_run_count(const Relationship& rel) {
    if (rel.size() != 4) throw DomainError("pairwise_run_count: four senders required");
    return {pairwise_comparisons_needed(rel), resolve_ideal(rel).runs_used};
}

// ---------------------------------------------------------------------------
// Exported decision tables
// ---------------------------------------------------------------------------

struct DecisionRow {
    std::string table_label;
    std::string canonical;
    std::vector<std::string> outcomes;  // R1, R2, R3 (absent runs empty)
    int f_r = 0;
    std::string kind;                   // "row" or "abcd_signature"
};

inline std::vector<DecisionRow> decision_table(int parties) {
    std::vector<DecisionRow> rows;
    if (parties == 4) {
        for (const auto& e : kFourPartyValues) {
            DecisionRow row{e.table_label, e.canonical, {}, e.f_r, "row"};
            if (e.f_r == 0) {
                row.outcomes = {"~R1", "~R2", "~R3"};
            } else {
                const auto d = resolve_ideal(Relationship::parse(e.canonical));
                for (int run = 1; run <= d.runs_used; ++run)
                    row.outcomes.push_back(ideal_outcome(Relationship::parse(e.canonical), run_pairing(run)).str());
            }
            rows.push_back(row);
        }
        const std::vector<std::vector<std::string>> sigs{{"101", "111"}, {"111", "101"}, {"111", "111", "101"}, {"111", "111", "111"}};
        for (const auto& s : sigs) rows.push_back({"ABCD", "ABCD", s, 0, "abcd_signature"});
        return rows;
    }
    if (parties == 3) {
        for (const auto& e : kThreePartyValues) {
            const auto rel3 = Relationship::parse(e.canonical);
            const auto rel4 = Relationship(std::vector<int>{rel3.group_of(0), rel3.group_of(1), rel3.group_of(2), rel3.group_of(0)});
            rows.push_back({e.table_label, e.canonical, {ideal_outcome(rel4, identity_pairing(4)).str()}, e.f_r, "row"});
        }
        return rows;
    }
    throw DomainError("decision_table: three or four parties supported");
}

}  // namespace qfpnet

#endif
