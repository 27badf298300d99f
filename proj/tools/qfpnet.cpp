// qfpnet command-line front end.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qfpnet/qfpnet.hpp"

namespace {

using namespace qfpnet;

enum Exit { kOk = 0, kUsage = 2, kIo = 3, kInfeasible = 4 };

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        std::cout.flush();
        if (!std::cout) throw IoError("cannot write to standard output");
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path + " for writing");
    f << content;
    f.close();
    if (!f) throw IoError("write to " + path + " failed");
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot read " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

std::string rel_diff(double value, double reference) {
    if (reference == 0.0) return "";
    return fmt6((value - reference) / reference);
}

void warn(const ProtocolParams& pp) {
    for (const auto& w : pp.warnings()) std::cerr << "warning: " << w << '\n';
}

// ---------------------------------------------------------------------------
// reproduce
// ---------------------------------------------------------------------------

std::string reproduce_instance(const ReferenceInstance& inst, bool run_optimizer) {
    CsvWriter csv({"quantity", "paper_value", "audited_value", "optimized_value", "relative_difference", "feasible"});
    const auto prob = inst.problem();
    const auto audit = evaluate_fixed(inst.paper_runs, prob);
    const auto inv = inst.inverse_expansion();
    const auto inv_audit = evaluate_fixed(inv.paper_runs, inv.problem());
    OptimizationResult opt;
    if (run_optimizer) opt = optimize(prob);
    const bool multi = inst.paper_runs.size() > 1;
    auto opt_cell = [&](auto getter) { return run_optimizer ? fmt6(getter()) : std::string(); };

    csv.row({"m", "", std::to_string(inst.pp.m), "", "", ""});
    csv.row({"pulses_per_run", "", std::to_string(prob.encoding.pulses_per_codeword), "", "", ""});
    for (std::size_t r = 0; r < inst.paper_runs.size(); ++r) {
        const auto& rc = inst.paper_runs[r];
        const std::string prefix = multi ? "run" + std::to_string(r + 1) + "." : "";
        for (std::size_t k = 0; k < rc.alphas.size(); ++k)
            csv.row({prefix + "alpha_" + std::to_string(k + 1), fmt6(rc.alphas[k]), fmt6(rc.alphas[k]),
                     opt_cell([&] { return opt.per_run[r].alphas[k]; }), "0", ""});
        for (std::size_t d = 0; d < rc.thresholds.size(); ++d)
            csv.row({prefix + "threshold_D" + std::to_string(d + 2), std::to_string(rc.thresholds[d]),
                     std::to_string(rc.thresholds[d]),
                     run_optimizer ? std::to_string(opt.per_run[r].thresholds[d]) : std::string(), "0", ""});
    }
    csv.row({"Q_R", fmt6(inst.paper_q), fmt6(audit.q_r), opt_cell([&] { return opt.q_r; }), rel_diff(audit.q_r, inst.paper_q),
             run_optimizer ? yes_no(opt.feasible) : ""});
    if (inst.paper_q_first_run) {
        const double q1 = q_total(std::vector<RunConfig>{inst.paper_runs.front()}, inst.pp.n);
        csv.row({"Q_R_first_run", fmt6(*inst.paper_q_first_run), fmt6(q1),
                 opt_cell([&] { return q_total(std::vector<RunConfig>{opt.per_run.front()}, inst.pp.n); }),
                 rel_diff(q1, *inst.paper_q_first_run), ""});
    }
    if (run_optimizer)
        csv.row({"Q_R_optimized_over_paper", "1", "", fmt6(opt.q_r / inst.paper_q), "", yes_no(opt.q_r <= 1.05 * inst.paper_q)});
    csv.row({"P_e", fmt6(inst.pp.epsilon), fmt6(audit.p_e), opt_cell([&] { return opt.p_e; }), "", yes_no(audit.feasible)});
    csv.row({"P_e_inverse_expansion", fmt6(inst.pp.epsilon), fmt6(inv_audit.p_e), "", "", yes_no(inv_audit.feasible)});
    if (inst.paper_c_o > 0.0) {
        const auto rep = complexity_report(0.0, run_optimizer ? opt.q_r : audit.q_r, inst.pp.n, inst.pp.senders, inst.pp.epsilon);
        csv.row({"C_o_AE", fmt6(inst.paper_c_o), fmt6(rep.c_o_ae), "", rel_diff(rep.c_o_ae, inst.paper_c_o), ""});
        csv.row({"C_l_AE", fmt6(inst.paper_c_l), fmt6(rep.c_l_ae), "", rel_diff(rep.c_l_ae, inst.paper_c_l), ""});
        csv.row({"ordering_Q_R<C_l<C_o", "", "", "", "", yes_no(rep.ordering_satisfied)});
    }
    return csv.str();
}

std::string reproduce_decision_three() {
    CsvWriter csv({"quantity", "paper_value", "audited_value", "optimized_value", "relative_difference", "feasible"});
    const auto rows = decision_table(3);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto& p = kPaperThreePartyRows[k];
        csv.row({std::string(p.label) + ".R1", p.r1, rows[k].outcomes[0], "", "", yes_no(rows[k].outcomes[0] == p.r1)});
        csv.row({std::string(p.label) + ".f_r", std::to_string(p.f_r), std::to_string(rows[k].f_r), "", "",
                 yes_no(rows[k].f_r == p.f_r)});
    }
    return csv.str();
}

std::string reproduce_run_counts() {
    CsvWriter csv({"quantity", "paper_value", "audited_value", "optimized_value", "relative_difference", "feasible"});
    for (const auto& p : kPaperRunCounts) {
        const auto rel = Relationship::parse(p.label);
        const auto c = pairwise_run_count(rel);
        const std::string tm = p.t_multi_min == p.t_multi_max
                                   ? std::to_string(p.t_multi_min)
                                   : std::to_string(p.t_multi_min) + " or " + std::to_string(p.t_multi_max);
        csv.row({std::string(p.label) + ".t_T", std::to_string(p.t_two_party), std::to_string(c.t_two_party), "", "",
                 yes_no(c.t_two_party == p.t_two_party)});
        csv.row({std::string(p.label) + ".t_M", tm, std::to_string(c.t_multi_party), "", "",
                 yes_no(c.t_multi_party >= p.t_multi_min && c.t_multi_party <= p.t_multi_max && c.t_multi_party <= c.t_two_party)});
    }
    return csv.str();
}

std::string reproduce_run_budgets() {
    CsvWriter csv({"quantity", "paper_value", "audited_value", "optimized_value", "relative_difference", "feasible"});
    for (int n : {2, 4, 8, 16}) {
        const std::string N = "N=" + std::to_string(n);
        const int rows[4][2] = {{1, run_budget(n, Target::AllEqual, Scheme::MultiParty)},
                                {n - 1, run_budget(n, Target::AllEqual, Scheme::TwoPartyPairwise)},
                                {n - 1, run_budget(n, Target::Relationship, Scheme::MultiParty)},
                                {n * (n - 1) / 2, run_budget(n, Target::Relationship, Scheme::TwoPartyPairwise)}};
        const char* names[4] = {"multi_party.AE", "two_party.AE", "multi_party.R", "two_party.R"};
        for (int k = 0; k < 4; ++k)
            csv.row({N + "." + names[k] + ".t_max", std::to_string(rows[k][0]), std::to_string(rows[k][1]), "", "",
                     yes_no(rows[k][0] == rows[k][1])});
    }
    return csv.str();
}

int cmd_reproduce(const std::string& table, const std::string& out, bool run_optimizer) {
    std::string body;
    if (table == "TE1") {
        body = reproduce_decision_three();
    } else if (table == "TC1") {
        body = reproduce_run_counts();
    } else if (table == "TV") {
        body = reproduce_run_budgets();
    } else if (const auto inst = find_instance(table)) {
        warn(inst->pp);
        body = reproduce_instance(*inst, run_optimizer);
    } else {
        std::cerr << "error: unknown table '" << table << "'\n";
        return kUsage;
    }
    const std::string head = "# qfpnet " + std::string(kVersion) + " reproduce " + table + " config_hash " +
                             hex64(fnv1a("reproduce:" + table)) + "\n";
    write_output(out, head + body);
    return kOk;
}

// ---------------------------------------------------------------------------
// optimize
// ---------------------------------------------------------------------------

int cmd_optimize(const std::string& config_path, const std::string& target, const std::string& out) {
    const auto doc = parse_config(read_file(config_path));
    warn(doc.pp);
    OptimizationProblem prob;
    try {
        prob = OptimizationProblem::make(doc.pp, doc.ch, doc.encoding, target == "r", doc.grid);
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    const auto result = optimize(prob);
    OrderedJson j;
    j["meta"] = meta_header("optimize", doc.hash);
    j["target"] = target;
    j["result"] = to_json(result);
    write_output(out, j.dump(2) + "\n");
    if (!out.empty() && out != "-")
        std::cout << (result.feasible ? "feasible" : "infeasible") << " q_r=" << fmt6(result.q_r) << " p_e=" << fmt6(result.p_e) << '\n';
    return result.feasible ? kOk : kInfeasible;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

int cmd_simulate(const std::string& config_path, const std::string& label, const std::string& out) {
    const auto doc = parse_config(read_file(config_path));
    const int n = doc.pp.senders;
    Relationship rel;
    try {
        rel = Relationship::parse(label);
    } catch (const DomainError& e) {
        std::cerr << "error: relationship: " << e.what() << '\n';
        return kUsage;
    }
    if (rel.size() != n) {
        std::cerr << "error: relationship '" << label << "' does not have " << n << " letters\n";
        return kUsage;
    }

    ProtocolParams pp = doc.pp;
    pp.m = doc.montecarlo.m;
    const auto enc = EncodingScheme::make(Encoding::SingleBit, pp.m);
    if (doc.encoding != Encoding::SingleBit) throw ConfigError("encoding.variant: simulation supports single_bit only");
    std::vector<RunConfig> runs = doc.montecarlo.runs;
    if (runs.empty()) {
        if (n == 3) throw ConfigError("montecarlo.runs: required for three senders");
        const auto result = optimize(OptimizationProblem::make(pp, doc.ch, Encoding::SingleBit, true, doc.grid));
        runs = result.per_run;
    }
    for (std::size_t r = 0; r < runs.size(); ++r) {
        runs[r].pairing = n == 4 ? run_pairing(static_cast<int>(r) + 1) : identity_pairing(n);
        runs[r].encoding = enc;
    }
    TrialSpec spec{rel, pp, doc.ch, runs, doc.montecarlo.trials, doc.montecarlo.seed};
    TrialReport rep;
    try {
        rep = simulate(spec);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("montecarlo: ") + e.what());
    }
    OrderedJson j;
    j["meta"] = meta_header("simulate", doc.hash);
    j["relationship"] = rel.label();
    j["seed"] = doc.montecarlo.seed;
    j["m"] = pp.m;
    OrderedJson rj = OrderedJson::array();
    for (const auto& rc : runs) rj.push_back(to_json(rc));
    j["runs"] = rj;
    j["report"] = to_json(rep);
    write_output(out, j.dump(2) + "\n");
    const bool to_file = !out.empty() && out != "-";
    (to_file ? std::cout : std::cerr) << "correct_rate " << fmt6(rep.empirical_correct_rate) << " wilson95 ["
                                      << fmt6(rep.wilson_interval.lower) << ", " << fmt6(rep.wilson_interval.upper) << "]\n";
    return kOk;
}

// ---------------------------------------------------------------------------
// decision-table
// ---------------------------------------------------------------------------

int cmd_decision_table(int n, const std::string& out) {
    CsvWriter csv({"label", "canonical", "R1", "R2", "R3", "f_r", "kind"});
    for (const auto& row : decision_table(n)) {
        std::vector<std::string> cells{row.table_label, row.canonical};
        for (std::size_t k = 0; k < 3; ++k) cells.push_back(k < row.outcomes.size() ? row.outcomes[k] : "");
        cells.push_back(std::to_string(row.f_r));
        cells.push_back(row.kind);
        csv.row(cells);
    }
    write_output(out, "# qfpnet " + std::string(kVersion) + " decision-table n=" + std::to_string(n) + "\n" + csv.str());
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-party quantum fingerprinting network toolkit"};
    app.set_version_flag("--version", std::string("qfpnet ") + kVersion);
    app.require_subcommand(1);

    std::string out;
    auto* rep = app.add_subcommand("reproduce", "Audit and re-optimize a published table");
    std::string table;
    bool no_opt = false;
    rep->add_option("table", table, "T3, T4, T_asym4, T_twobit, T_vis, TE1, TC1 or TV")->required();
    rep->add_option("--out", out, "Output CSV (default stdout)");
    rep->add_flag("--no-optimize", no_opt, "Skip the optimizer column");

    auto* opt = app.add_subcommand("optimize", "Minimise Q^R subject to P_e <= epsilon");
    std::string config, target = "r";
    opt->add_option("config", config, "JSON config")->required();
    opt->add_option("--target", target, "ae or r")->check(CLI::IsMember({"ae", "r"}));
    opt->add_option("--out", out, "Output JSON (default stdout)");

    auto* sim = app.add_subcommand("simulate", "Monte Carlo campaign");
    std::string label;
    sim->add_option("config", config, "JSON config")->required();
    sim->add_option("--relationship", label, "Relationship label, e.g. AABC")->required();
    sim->add_option("--out", out, "Output JSON (default stdout)");

    auto* dt = app.add_subcommand("decision-table", "Export the referee's decision table");
    int n = 4;
    dt->add_option("--n", n, "3 or 4")->check(CLI::IsMember({3, 4}));
    dt->add_option("--out", out, "Output CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*rep) return cmd_reproduce(table, out, !no_opt);
        if (*opt) return cmd_optimize(config, target, out);
        if (*sim) return cmd_simulate(config, label, out);
        if (*dt) return cmd_decision_table(n, out);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kUsage;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kIo;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}
