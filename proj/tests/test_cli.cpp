#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const std::string kBin = QFPNET_BIN;
const std::string kData = QFPNET_DATA;
const fs::path kWork = QFPNET_WORK;

std::string data(const std::string& name) { return kData + "/" + name; }

std::string work(const std::string& name) {
    fs::create_directories(kWork);
    return (kWork / name).string();
}

// Runs the CLI, returning the exit code; stdout and stderr go to files.
int run(const std::string& args, std::string* out = nullptr, std::string* err = nullptr) {
    const auto o = work("stdout.txt"), e = work("stderr.txt");
    const int status = std::system((kBin + " " + args + " >" + o + " 2>" + e).c_str());
    auto slurp = [](const std::string& p) {
        std::ifstream f(p);
        std::stringstream ss;
        ss << f.rdbuf();
        return ss.str();
    };
    if (out) *out = slurp(o);
    if (err) *err = slurp(e);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string l; std::getline(ss, l);) out.push_back(l);
    return out;
}

std::vector<std::string> data_rows(const std::string& csv) {
    std::vector<std::string> out;
    for (const auto& l : lines(csv))
        if (!l.empty() && l[0] != '#') out.push_back(l);
    return out;
}

}  // namespace

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run(""), 2);
    EXPECT_EQ(run("bogus"), 2);
    EXPECT_EQ(run("decision-table --n 5"), 2);
    EXPECT_EQ(run("reproduce T99"), 2);
    EXPECT_EQ(run("optimize " + data("t4.json") + " --target xyz"), 2);
    std::string out;
    EXPECT_EQ(run("--version", &out), 0);
    EXPECT_NE(out.find("qfpnet"), std::string::npos);
}

TEST(Cli, DecisionTables) {
    std::string out;
    ASSERT_EQ(run("decision-table --n 4", &out), 0);
    auto rows = data_rows(out);
    ASSERT_EQ(rows.size(), 1u + 15u + 4u);
    EXPECT_EQ(rows[0], "label,canonical,R1,R2,R3,f_r,kind");
    EXPECT_EQ(rows[1], "AAAA,AAAA,000,,,14,row");
    EXPECT_NE(out.find("BAAC,ABBC,111,111,110,3,row"), std::string::npos);
    ASSERT_EQ(run("decision-table --n 3", &out), 0);
    rows = data_rows(out);
    ASSERT_EQ(rows.size(), 6u);
    EXPECT_EQ(rows[5], "ABCA,ABC,111,,,0,row");
}

TEST(Cli, OptimizeExitCodes) {
    std::string out, err;
    const auto path = work("t4_opt.json");
    ASSERT_EQ(run("optimize " + data("t4.json") + " --target ae --out " + path, &out), 0);
    const auto j = nlohmann::json::parse(read(path));
    EXPECT_TRUE(j["result"]["feasible"].get<bool>());
    EXPECT_LE(j["result"]["q_r"].get<double>(), 1.05 * 5.52e5);
    EXPECT_EQ(j["meta"]["command"], "optimize");
    EXPECT_NE(out.find("feasible"), std::string::npos);

    ASSERT_EQ(run("optimize " + data("eps1.json"), &out), 0);
    const auto k = nlohmann::json::parse(out);
    for (const auto& a : k["result"]["per_run"][0]["alphas"]) EXPECT_EQ(a.get<double>(), 1.0);

    EXPECT_EQ(run("optimize " + data("infeasible.json") + " --out " + work("inf.json")), 4);
    EXPECT_FALSE(nlohmann::json::parse(read(work("inf.json")))["result"]["feasible"].get<bool>());
}

TEST(Cli, ConfigAndIoErrors) {
    std::string err;
    EXPECT_EQ(run("optimize " + data("malformed.json"), nullptr, &err), 2);
    EXPECT_NE(err.find("line 3"), std::string::npos) << err;
    EXPECT_EQ(run("optimize " + data("unknown_key.json"), nullptr, &err), 2);
    EXPECT_NE(err.find("protocol.parties"), std::string::npos) << err;
    EXPECT_EQ(run("optimize " + data("does_not_exist.json")), 3);
    EXPECT_EQ(run("decision-table --out /nonexistent_dir/x.csv"), 3);
}

TEST(Cli, ReproduceInstance) {
    const auto path = work("t4.csv");
    ASSERT_EQ(run("reproduce T4 --out " + path), 0);
    const auto csv = read(path);
    const auto all = lines(csv);
    ASSERT_FALSE(all.empty());
    EXPECT_EQ(all[0].rfind("# qfpnet", 0), 0u);
    EXPECT_EQ(all[1], "quantity,paper_value,audited_value,optimized_value,relative_difference,feasible");
    for (const char* row : {"alpha_1,85,85,", "alpha_2,78,78,", "threshold_D2,1685,1685,", "Q_R,552000,", "C_o_AE,1.24e+10,",
                            "C_l_AE,1.46e+06,", "P_e,1e-05,", "ordering_Q_R<C_l<C_o"})
        EXPECT_NE(csv.find(row), std::string::npos) << row;
    EXPECT_NE(csv.find("Q_R_optimized_over_paper"), std::string::npos);
}

TEST(Cli, ReproduceTables) {
    std::string out;
    ASSERT_EQ(run("reproduce TC1", &out), 0);
    EXPECT_EQ(data_rows(out).size(), 1u + 30u);
    EXPECT_EQ(out.find(",no\n"), std::string::npos);
    ASSERT_EQ(run("reproduce TE1", &out), 0);
    EXPECT_EQ(out.find(",no\n"), std::string::npos);
    ASSERT_EQ(run("reproduce TV", &out), 0);
    EXPECT_NE(out.find("N=4.two_party.R.t_max,6,6"), std::string::npos);
    ASSERT_EQ(run("reproduce T3 --no-optimize", &out), 0);
    EXPECT_NE(out.find("Q_R,2.57e+06"), std::string::npos);
}

TEST(Cli, SimulateIsDeterministic) {
    const auto a = work("sim_a.json"), b = work("sim_b.json");
    ASSERT_EQ(run("simulate " + data("desk4.json") + " --relationship AABC --out " + a), 0);
    ASSERT_EQ(run("simulate " + data("desk4.json") + " --relationship AABC --out " + b), 0);
    const auto ta = read(a);
    EXPECT_EQ(ta, read(b));
    const auto j = nlohmann::json::parse(ta);
    EXPECT_EQ(j["relationship"], "AABC");
    EXPECT_EQ(j["report"]["trials"].get<int>(), 200);
    EXPECT_GE(j["report"]["empirical_correct_rate"].get<double>(), 0.99);
}

TEST(Cli, SimulateOtherSenderCounts) {
    std::string out;
    ASSERT_EQ(run("simulate " + data("desk3.json") + " --relationship ABA", &out), 0);
    EXPECT_EQ(nlohmann::json::parse(out)["report"]["correct"].get<int>(), 200);
    ASSERT_EQ(run("simulate " + data("desk2_auto.json") + " --relationship AB", &out), 0);
    EXPECT_GE(nlohmann::json::parse(out)["report"]["empirical_correct_rate"].get<double>(), 0.99);
    EXPECT_EQ(run("simulate " + data("desk4.json") + " --relationship AB"), 2);
    EXPECT_EQ(run("simulate " + data("desk4.json") + " --relationship A1BC"), 2);
}
