// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qfpnet/qfpnet.hpp"

using namespace qfpnet;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

struct Check {
    bool ok = true;
    std::ostringstream notes;
    void expect(bool cond, const std::string& what) {
        if (!cond) {
            if (ok) notes << " first failure: " << what;
            ok = false;
        }
    }
};

int failures = 0;

void criterion(int id, const char* name, const std::function<void(Check&)>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Check c;
    try {
        body(c);
    } catch (const std::exception& e) {
        c.ok = false;
        c.notes << " exception: " << e.what();
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %d %s (%.2f s)%s\n", c.ok ? "PASS" : "FAIL", id, name, s, c.notes.str().c_str());
    std::fflush(stdout);
    if (!c.ok) ++failures;
}

void audit_identities(Check& c) {
    for (const auto& inst : reference_instances()) {
        const double q = q_total(inst.paper_runs, inst.pp.n);
        c.expect(rel(q, inst.paper_q) < inst.q_tolerance, inst.id + " Q_R " + fmt6(q));
        c.notes << " " << inst.id << "=" << fmt6(q);
    }
    const auto a = instance_asym4();
    const std::vector<RunConfig> first{a.paper_runs.front()};
    const double q1 = q_total(first, a.pp.n);
    c.expect(rel(q1, 1.55e6) < 0.005, "asym4 first run " + fmt6(q1));
    const auto tb = instance_twobit();
    c.expect(rel(q_total(tb.paper_runs, tb.pp.n), 3.91e5) < 0.05, "two-bit within 5%");
}

void classical_captions(Check& c) {
    struct Row {
        std::uint64_t n;
        int parties;
        double pe, co, cl;
    };
    for (const Row& r : {Row{10'000'000'000'000ULL, 4, 1e-2, 1.29e10, 3.04e6}, Row{3'000'000'000'000ULL, 2, 1e-5, 1.24e10, 1.46e6},
                         Row{100'000'000'000'000ULL, 4, 1e-5, 1.01e11, 1.19e7}}) {
        const double co = classical_optimal_ae(r.n, r.parties, r.pe), cl = classical_limit_ae(r.n, r.parties, r.pe);
        c.expect(rel(co, r.co) < 0.01, "C_o " + fmt6(co));
        c.expect(rel(cl, r.cl) < 0.01, "C_l " + fmt6(cl));
    }
}

void combinatorics(Check& c) {
    c.expect(count_cases(8, 4, 3) == 490, "count_cases(8,4,3)");
    for (int n = 2; n <= 8; ++n) {
        std::uint64_t sum = 0;
        for (int j = 1; j <= n; ++j)
            for (int i = (n + j - 1) / j; i <= n - (j - 1); ++i) sum += count_cases(n, i, j);
        c.expect(sum == oracle::all_partitions(n).size(), "Bell sum at N=" + std::to_string(n));
        c.expect(sum == oracle::kBell[n], "Bell constant at N=" + std::to_string(n));
        c.expect(enumerate_relationships(n).size() == sum, "enumerate_relationships at N=" + std::to_string(n));
    }
}

void oracle_equivalence(Check& c) {
    double worst = 0.0;
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> mu_d(0.0, 3000.0), eta_d(0.05, 0.9), nu_d(0.9, 1.0), delta_d(0.05, 0.45);
    for (int draw = 0; draw < 100; ++draw) {
        const auto pp = ProtocolParams::with_codeword_length(5000, 0.2, delta_d(rng), 1e-3, 4);
        const auto ch = ChannelModel::symmetric_channel(4, eta_d(rng), 1e-6, draw % 2 ? 1.0 : nu_d(rng));
        const double mu = mu_d(rng), a = std::sqrt(mu);
        for (const auto& r : enumerate_relationships(4))
            for (int run = 1; run <= 3; ++run) {
                const auto pairing = run_pairing(run);
                const auto closed = four_party_symmetric(r, mu, ch, pp, pairing);
                const RunConfig rc{{a, a, a, a}, pairing, {}, EncodingScheme::make(Encoding::SingleBit, pp.m)};
                const auto ref = oracle_click_profile(r, rc, ch, pp);
                for (int d = 1; d <= 4; ++d) worst = std::max(worst, std::abs(closed.at(d) - ref.at(d)));
            }
    }
    std::uniform_real_distribution<double> al_d(0.0, 120.0), s_d(0.1, 0.9);
    for (int draw = 0; draw < 100; ++draw) {
        const auto pp = ProtocolParams::with_codeword_length(2000, 0.2, delta_d(rng), 1e-3, 2);
        const auto ch = ChannelModel::from_sqrt_eta({s_d(rng), s_d(rng)}, 1e-7, draw % 3 ? 1.0 : nu_d(rng));
        const std::vector<double> al{al_d(rng), al_d(rng)};
        for (auto enc : {Encoding::SingleBit, Encoding::TwoBit}) {
            const auto closed = two_party_asymmetric(al, ch, pp, enc);
            const RunConfig rc{al, {0, 1}, {}, EncodingScheme::make(enc, pp.m)};
            worst = std::max(worst, std::abs(closed.equal.at(2) - oracle_click_profile(Relationship::parse("AA"), rc, ch, pp).at(2)));
            worst = std::max(worst, std::abs(closed.different.at(2) - oracle_click_profile(Relationship::parse("AB"), rc, ch, pp).at(2)));
        }
    }
    c.notes << " max_abs_diff=" << worst;
    c.expect(worst <= 1e-10, "closed form vs oracle");
}

void decision_round_trip(Check& c) {
    for (const auto& r : enumerate_relationships(4)) c.expect(resolve_ideal(r).relationship == r, "round trip " + r.label());
    const auto rows = decision_table(4);
    c.expect(rows.size() == 19, "n=4 table size");
    std::size_t k = 0, sig = 0;
    for (const auto& row : rows) {
        std::vector<std::string> want;
        if (row.kind == "row") {
            ++k;
            if (row.table_label == "ABCD") {
                c.expect(row.f_r == 0, "ABCD row");
                continue;
            }
            bool found = false;
            for (const auto& p : kPaperFourPartyRows) {
                if (row.table_label != p.label) continue;
                found = true;
                for (const char* b : {p.r1, p.r2, p.r3})
                    if (*b) want.push_back(b);
                c.expect(row.f_r == p.f_r && row.outcomes == want, "table row " + row.table_label);
            }
            c.expect(found, "unexpected row " + row.table_label);
        } else if (row.kind == "abcd_signature") {
            for (const char* b : kPaperAbcdSignatures.at(sig++))
                if (*b) want.push_back(b);
            c.expect(row.outcomes == want, "ABCD signature");
        }
    }
    c.expect(k == 15, "fifteen rows");
    c.expect(sig == 4, "four ABCD signatures");
    const auto three = decision_table(3);
    c.expect(three.size() == kPaperThreePartyRows.size(), "n=3 table size");
    for (std::size_t i = 0; i < std::min(three.size(), kPaperThreePartyRows.size()); ++i)
        c.expect(three[i].table_label == kPaperThreePartyRows[i].label && three[i].outcomes.at(0) == kPaperThreePartyRows[i].r1 &&
                     three[i].f_r == kPaperThreePartyRows[i].f_r,
                 "n=3 row " + three[i].table_label);
    for (const auto& row : kPaperRunCounts) {
        const auto rc = pairwise_run_count(Relationship::parse(row.label));
        c.expect(rc.t_multi_party <= rc.t_two_party && rc.t_two_party == row.t_two_party, std::string("run counts ") + row.label);
    }
}

void optimizer_competitive(Check& c) {
    for (const char* id : {"T3", "T4", "T_twobit", "T_asym4"}) {
        const auto inst = *find_instance(id);
        const auto prob = inst.problem();
        const auto r = optimize(prob);
        // Re-verify P_e from the returned configuration.
        double pe = 0.0;
        for (std::size_t k = 0; k < r.per_run.size(); ++k) {
            const RunEvidence ev{run_profiles(prob, static_cast<int>(k) + 1, r.per_run[k].alphas), r.per_run[k].thresholds};
            pe = std::max(pe, error_probability(std::span<const RunEvidence>(&ev, 1)));
        }
        c.expect(r.feasible && pe <= inst.pp.epsilon, inst.id + " feasible");
        c.expect(r.q_r <= 1.05 * inst.paper_q, inst.id + " Q_R " + fmt6(r.q_r));
        const auto direct = evaluate_fixed(inst.paper_runs, prob);
        const auto inv = inst.inverse_expansion();
        const auto alt = evaluate_fixed(inv.paper_runs, inv.problem());
        c.notes << " " << inst.id << ":Q=" << fmt6(r.q_r) << "/" << fmt6(inst.paper_q) << ",paper_row_Pe=" << fmt6(direct.p_e)
                << (direct.feasible ? "(feasible)" : "(infeasible)") << ",m=n/c_Pe=" << fmt6(alt.p_e);
    }
}

void monte_carlo(Check& c) {
    const std::uint64_t trials = 10'000;
    const auto d = desk_instance();
    const auto prof = four_party_equal_diff(d.mu, d.ch, d.pp);
    c.notes << " means(D3)=" << fmt6(prof.equal.at(3) * 1e5) << "/" << fmt6(prof.different.at(3) * 1e5);
    double worst_rate = 1.0, worst_z = 0.0;
    for (const auto& r : enumerate_relationships(4)) {
        const TrialSpec spec{r, d.pp, d.ch, d.runs, trials, 17};
        const auto rep = simulate(spec);
        worst_rate = std::min(worst_rate, rep.empirical_correct_rate);
        c.expect(rep.empirical_correct_rate >= 1.0 - 1e-3, "correct rate " + r.label());
        for (const auto& s : rep.per_detector_count_stats) {
            if (s.samples < 30) continue;
            const double se = std::sqrt(s.variance / static_cast<double>(s.samples));
            const double z = se > 0 ? std::abs(s.mean - s.expected_mean) / se : (s.mean == s.expected_mean ? 0.0 : 1e9);
            worst_z = std::max(worst_z, z);
            c.expect(z <= 4.0, "count mean " + r.label() + " D" + std::to_string(s.detector));
        }
    }
    c.notes << " min_correct=" << worst_rate << " max_z=" << worst_z;
    const TrialSpec spec{Relationship::parse("ABCD"), d.pp, d.ch, d.runs, 2000, 99};
    c.expect(to_json(simulate(spec)).dump() == to_json(simulate(spec)).dump(), "byte-identical repeat");
}

}  // namespace

int main() {
    criterion(1, "complexity audit identities", audit_identities);
    criterion(2, "classical caption values", classical_captions);
    criterion(3, "combinatorics", combinatorics);
    criterion(4, "closed forms match optics oracle", oracle_equivalence);
    criterion(5, "decision table round trip", decision_round_trip);
    criterion(6, "optimizer feasible and competitive", optimizer_competitive);
    criterion(7, "monte carlo desk validation", monte_carlo);
    return failures == 0 ? 0 : 1;
}
