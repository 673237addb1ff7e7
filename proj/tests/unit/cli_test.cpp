#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

#include "fixedprice/cli.hpp"
#include "fixedprice/instance_io.hpp"
#include "fixtures.hpp"

using namespace fixedprice;
using namespace fixedprice::testing;

namespace {

CliResult run(std::vector<std::string> args) { return run_cli(args); }

Json out_json(const CliResult& r) { return Json::parse(r.out); }

std::string fx(const std::string& name) { return fixture_path(name); }

struct Process {
  int exit_code = -1;
  std::string out;
};

Process run_binary(const std::string& args) {
  Process p;
  std::string cmd = std::string(FIXEDPRICE_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return p;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) p.out.append(buf.data(), got);
  int status = pclose(pipe);
  p.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return p;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("fixedprice_cli_test_" + name);
}

}  // namespace

TEST(Cli, SolveAssortment) {
  auto r = run({"solve", "--instance", fx("lottery_gap.json"), "--what", "assortment"});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  auto doc = out_json(r);
  EXPECT_EQ(doc["value"], "7/6");
  EXPECT_EQ(doc["assortment"], Json::parse(R"(["A","B"])"));
}

TEST(Cli, SolveMechanismAndLotteries) {
  auto mech = run({"solve", "--instance", fx("lottery_gap.json"), "--what", "mech"});
  ASSERT_EQ(mech.exit_code, 0) << mech.err;
  EXPECT_EQ(out_json(mech)["value"], "5/4");
  auto topk = run({"solve", "--instance", fx("lottery_gap.json"), "--what", "topk"});
  ASSERT_EQ(topk.exit_code, 0) << topk.err;
  EXPECT_EQ(out_json(topk)["value"], "5/4");
  auto policy = run({"solve", "--instance", fx("mixture_abc.json"), "--what", "policy"});
  ASSERT_EQ(policy.exit_code, 0) << policy.err;
  EXPECT_EQ(out_json(policy)["value"], "1");
}

TEST(Cli, HistoryMonotoneWitness) {
  auto r = run({"check", "--instance", fx("not_history_monotone.json"), "--what", "history-monotone"});
  EXPECT_EQ(r.exit_code, 2);
  auto doc = out_json(r);
  EXPECT_FALSE(doc["holds"].get<bool>());
  EXPECT_EQ(doc["witness"]["rho"], Json::parse(R"(["C","B"])"));
  EXPECT_EQ(doc["witness"]["rho_prime"], Json::parse(R"(["B"])"));
  EXPECT_EQ(doc["witness"]["S"], Json::parse(R"(["A"])"));
  EXPECT_EQ(doc["witness"]["j"], "A");

  auto relaxed = run({"check", "--instance", fx("not_history_monotone.json"), "--what", "history-monotone", "--tolerance", "1"});
  EXPECT_EQ(relaxed.exit_code, 0);
  auto passes = run({"check", "--instance", fx("tiers.json"), "--what", "history-monotone"});
  EXPECT_EQ(passes.exit_code, 0);
}

TEST(Cli, CheckIcOfOptimum) {
  auto r = run({"check", "--instance", fx("lottery_gap.json"), "--what", "ic"});
  EXPECT_EQ(r.exit_code, 0) << r.err;
  EXPECT_TRUE(out_json(r)["holds"].get<bool>());
}

TEST(Cli, CompareChain) {
  auto r = run({"compare", "--instance", fx("lottery_gap.json"), "--lps"});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  auto doc = out_json(r);
  EXPECT_TRUE(doc["chain_holds"].get<bool>());
  EXPECT_EQ(doc["OPT_S"]["value"], "7/6");
  EXPECT_EQ(doc["OPT_x"]["value"], "5/4");
}

TEST(Cli, RobustAndMultiBuyer) {
  auto menu = run({"robust", "--instance", fx("robust_gap.json"), "--params", fx("robust_gap_menu.json")});
  ASSERT_EQ(menu.exit_code, 0) << menu.err;
  EXPECT_EQ(out_json(menu)["robust_revenue"]["value"], "11/8");
  auto lp_menu = run({"robust", "--instance", fx("robust_gap.json")});
  ASSERT_EQ(lp_menu.exit_code, 0) << lp_menu.err;
  EXPECT_EQ(out_json(lp_menu)["robust_revenue"]["value"], "21/16");

  const std::string mb = fx("two_buyers.json");
  EXPECT_EQ(out_json(run({"multibuyer", "--instance", mb, "--what", "dsic"}))["value"], "16/9");
  EXPECT_EQ(out_json(run({"multibuyer", "--instance", mb, "--what", "bic"}))["value"], "16/9");
  EXPECT_EQ(out_json(run({"multibuyer", "--instance", mb, "--what", "ttc", "--params", fx("two_buyers_ttc.json")}))["value"],
            "16/9");
  EXPECT_EQ(out_json(run({"multibuyer", "--instance", mb, "--what", "ttc", "--params",
                          fx("two_buyers_ttc_reversed.json")}))["value"],
            "14/9");
  EXPECT_EQ(out_json(run({"multibuyer", "--instance", mb, "--what", "serial", "--params", R"({"order":[0,1]})"}))["value"],
            "5/3");
  auto bad = run({"multibuyer", "--instance", mb, "--what", "ttc", "--params", R"({"endowment":["A","A"]})"});
  EXPECT_EQ(bad.exit_code, 1);
}

TEST(Cli, GenIsByteStable) {
  auto r = run({"gen", "--model", fx("mnl_three_items_model.json")});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  std::string text = r.out.substr(0, r.out.find_last_not_of('\n') + 1);
  EXPECT_EQ(serialize_instance(parse_instance(text)), text);

  auto path = temp_file("gen.json");
  auto written = run({"gen", "--model", "mnl", "--params", fx("mnl_three_items_model.json"), "--out", path.string()});
  ASSERT_EQ(written.exit_code, 0) << written.err;
  std::ifstream f(path);
  std::string file_text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  EXPECT_EQ(file_text, text + "\n");
  std::filesystem::remove(path);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).exit_code, 1);
  EXPECT_EQ(run({"bogus"}).exit_code, 1);
  EXPECT_EQ(run({"solve", "--nonsense", "1"}).exit_code, 1);
  EXPECT_EQ(run({"solve", "--what", "assortment"}).exit_code, 1);
  EXPECT_EQ(run({"solve", "--instance", fx("lottery_gap.json"), "--what", "nothing"}).exit_code, 1);
  EXPECT_EQ(run({"solve", "--instance", "/nonexistent/instance.json", "--what", "assortment"}).exit_code, 1);
}

TEST(Cli, ProbabilitySumError) {
  auto path = temp_file("short.json");
  {
    std::ofstream f(path);
    f << R"({"items":[{"id":"A","price":1}],"lists":[{"items":["A"],"prob":"1/2"},{"items":[],"prob":"1/3"}]})";
  }
  auto r = run({"solve", "--instance", path.string(), "--what", "assortment"});
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.err.find("5/6"), std::string::npos) << r.err;
  std::filesystem::remove(path);
}

TEST(CliBinary, ExitCodesAndOutput) {
  auto ok = run_binary("solve --instance " + fx("lottery_gap.json") + " --what assortment");
  EXPECT_EQ(ok.exit_code, 0);
  EXPECT_EQ(Json::parse(ok.out)["value"], "7/6");
  EXPECT_EQ(run_binary("check --instance " + fx("not_history_monotone.json") + " --what history-monotone").exit_code, 2);
  EXPECT_EQ(run_binary("frobnicate").exit_code, 1);
}
