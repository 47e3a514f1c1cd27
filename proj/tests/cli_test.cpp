#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <gtest/gtest.h>

#include "actorgraph/bench.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int status = -1;
  std::string output;  // stdout and stderr interleaved
};

Result cli(const std::string& args) {
  const std::string cmd = std::string(ACTORGRAPH_CLI) + " " + args + " 2>&1";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.output.append(buf, n);
  const int raw = pclose(p);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / "actorgraph_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

// A serial record plus one scaling sweep for a single graph.
void write_scaling_csv(const fs::path& path, const std::string& system, double serial,
                       const std::vector<std::pair<std::size_t, double>>& table) {
  std::vector<actorgraph::BenchRecord> records{{"pagerank", "serial", "soc-LiveJournal1", 1, serial, 20, 0, "ok"}};
  for (auto [w, t] : table) records.push_back({"pagerank", system, "soc-LiveJournal1", w, t, 20, 0, "ok"});
  std::ofstream(path) << actorgraph::to_csv(records);
}

}  // namespace

TEST(Cli, HelpMatchesGolden) {
  auto r = cli("run --help");
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.output, slurp(fs::path(ACTORGRAPH_GOLDEN_DIR) / "run_help.txt"));
  for (const char* name : {"serial", "basic", "atomic", "pairs", "reduction", "sortdest"})
    EXPECT_NE(r.output.find(name), std::string::npos) << name;
}

TEST(Cli, RunWritesOneValuePerVertex) {
  for (const char* variant : {"serial", "sortdest"}) {
    auto out = scratch(std::string("ranks_") + variant + ".txt");
    auto r = cli(std::string("run --algo pagerank --variant ") + variant +
                 " --vertices 100 --edges 500 --seed 1 --workers 2 --out " + out.string());
    ASSERT_EQ(r.status, 0) << r.output;
    EXPECT_NE(r.output.find("runtime_s "), std::string::npos);
    EXPECT_NE(r.output.find("iterations_run 20"), std::string::npos);
    EXPECT_EQ(lines_of(slurp(out)).size(), 100u);
  }
  EXPECT_EQ(lines_of(slurp(scratch("ranks_serial.txt"))).front().substr(0, 3),
            lines_of(slurp(scratch("ranks_sortdest.txt"))).front().substr(0, 3));
}

TEST(Cli, RunWritesTrace) {
  auto trace = scratch("trace.csv");
  auto r = cli("run --algo labelprop --variant basic --vertices 100 --edges 300 --workers 2 --out " +
               scratch("labels.txt").string() + " --trace " + trace.string());
  ASSERT_EQ(r.status, 0) << r.output;
  auto rows = lines_of(slurp(trace));
  ASSERT_GT(rows.size(), 1u);
  EXPECT_EQ(rows[0], "ts_ns,worker,kind");
}

TEST(Cli, UnknownVariantIsUsageError) {
  auto r = cli("run --variant fast");
  EXPECT_EQ(r.status, 2);
  for (const char* name : {"serial", "basic", "atomic", "pairs", "reduction", "sortdest"})
    EXPECT_NE(r.output.find(name), std::string::npos) << name;
}

TEST(Cli, MissingSubcommandIsUsageError) { EXPECT_EQ(cli("").status, 2); }

TEST(Cli, MissingGraphFileFails) {
  auto r = cli("run --graph /nonexistent/graph.txt");
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.output.find("error"), std::string::npos);
}

TEST(Cli, VerifyLabelPropPasses) {
  auto r = cli("verify --algo labelprop --vertices 1000 --edges 5000 --seed 3 --workers 1,2,4");
  EXPECT_EQ(r.status, 0) << r.output;
  EXPECT_EQ(lines_of(r.output).size(), 15u) << r.output;
}

TEST(Cli, VerifyPageRankPasses) {
  auto r = cli("verify --algo pagerank --vertices 1000 --edges 5000 --seed 3 --workers 1,4");
  EXPECT_EQ(r.status, 0) << r.output;
}

TEST(Cli, VerifyReportsInjectedFault) {
  auto r = cli("verify --algo pagerank --vertices 1000 --edges 5000 --seed 3 --workers 2 --variants basic --inject-fault");
  EXPECT_EQ(r.status, 1) << r.output;
  EXPECT_NE(r.output.find("mismatch: variant basic workers 2 vertex "), std::string::npos) << r.output;
}

TEST(Cli, GenerateConvertRoundTrip) {
  auto text = scratch("g.txt"), bin = scratch("g.bin"), back = scratch("g2.txt");
  ASSERT_EQ(cli("generate --vertices 50 --edges 200 --seed 9 --out " + text.string()).status, 0);
  ASSERT_EQ(cli("convert --in " + text.string() + " --out " + bin.string()).status, 0);
  EXPECT_EQ(fs::file_size(bin), 200u * 8u);
  ASSERT_EQ(cli("convert --in " + bin.string() + " --in-format binary --out-format text --out " + back.string()).status,
            0);
  EXPECT_EQ(lines_of(slurp(text)), lines_of(slurp(back)));
}

TEST(Cli, BenchWritesCsvAndCostReadsIt) {
  auto csv = scratch("bench.csv");
  auto r = cli("bench --algo pagerank --vertices 500 --edges 3000 --workers 1,2 --variants basic,sortdest --reps 3 --csv " +
               csv.string());
  ASSERT_EQ(r.status, 0) << r.output;
  auto rows = lines_of(slurp(csv));
  ASSERT_FALSE(rows.empty());
  EXPECT_EQ(rows[0], actorgraph::kCsvHeader);
  EXPECT_GE(rows.size() - 1, 3u * (2 * 2 + 1));
  auto records = actorgraph::read_csv(csv.string());
  EXPECT_EQ(actorgraph::to_csv(records), slurp(csv));

  auto c = cli("cost --csv " + csv.string());
  EXPECT_EQ(c.status, 0) << c.output;
  EXPECT_NE(c.output.find("COST = "), std::string::npos);
  auto j = cli("cost --json --csv " + csv.string());
  EXPECT_EQ(j.status, 0);
  EXPECT_NE(j.output.find("\"cost\""), std::string::npos);
}

TEST(Cli, CostOnPublishedScaling) {
  auto ours = scratch("lj_scaling.csv");
  write_scaling_csv(ours, "sortdest", 3.18,
                    {{1, 2.33}, {2, 2.22}, {4, 1.90}, {8, 1.90}, {16, 1.35}, {32, 1.09}, {64, 1.13}, {128, 1.08}});
  auto r = cli("cost --csv " + ours.string());
  EXPECT_EQ(r.status, 0) << r.output;
  EXPECT_NE(r.output.find("COST = 1\n"), std::string::npos) << r.output;

  auto graphx = scratch("graphx.csv");
  write_scaling_csv(graphx, "graphx", 3.18, {{16, 130.0}, {64, 36.4}, {128, 27.9}});
  r = cli("cost --csv " + graphx.string());
  EXPECT_EQ(r.status, 0) << r.output;
  EXPECT_NE(r.output.find("COST = ∞"), std::string::npos) << r.output;
}

TEST(Cli, CostRejectsMalformedCsv) {
  auto bad = scratch("bad.csv");
  std::ofstream(bad) << actorgraph::kCsvHeader << "\npagerank,basic,g,1\n";
  auto r = cli("cost --csv " + bad.string());
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.output.find("row 2"), std::string::npos) << r.output;
}
