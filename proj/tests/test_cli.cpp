#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "ndorder/ndorder.hpp"

using namespace ndorder;
namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run cli(const std::string& args) {
  const std::string command = std::string(NDORDER_CLI) + " " + args + " 2>&1";
  Run run;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return run;
  std::array<char, 4096> buffer;
  while (std::fgets(buffer.data(), buffer.size(), pipe)) run.out += buffer.data();
  const int raw = pclose(pipe);
  run.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return run;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("ndorder_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string at(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, OrderWritesBijectionAndMetrics) {
  ASSERT_EQ(cli("gen path 7 -o " + at("p7.graph")).status, 0);
  const auto run = cli("order " + at("p7.graph") + " --procs 2 --seed 1 -o " + at("p.txt") + " --metrics");
  ASSERT_EQ(run.status, 0) << run.out;
  EXPECT_NE(run.out.find("NNZ="), std::string::npos);
  EXPECT_NE(run.out.find(" OPC="), std::string::npos);
  EXPECT_NE(run.out.find(" FILL="), std::string::npos);
  const auto perm = read_perm(slurp(at("p.txt")));
  EXPECT_EQ(perm.size(), 7u);
  EXPECT_TRUE(is_bijection(perm));
  EXPECT_EQ(slurp(at("p.txt")).substr(0, 2), "# ");
}

TEST_F(Cli, EvalIdentityOnCompleteGraph) {
  ASSERT_EQ(cli("gen complete 10 -o " + at("k10.mtx")).status, 0);
  std::ofstream(at("id.txt")) << "0\n1\n2\n3\n4\n5\n6\n7\n8\n9\n";
  const auto run = cli("eval " + at("k10.mtx") + " --perm " + at("id.txt"));
  ASSERT_EQ(run.status, 0) << run.out;
  EXPECT_NE(run.out.find("NNZ=55 OPC=385 FILL="), std::string::npos) << run.out;
}

TEST_F(Cli, CheckRejectsAsymmetricFile) {
  std::ofstream(at("bad.graph")) << "3 1\n2\n\n\n";
  EXPECT_EQ(cli("check " + at("bad.graph")).status, 1);
  ASSERT_EQ(cli("gen grid2d 3 -o " + at("g.graph")).status, 0);
  const auto ok = cli("check " + at("g.graph"));
  EXPECT_EQ(ok.status, 0);
  EXPECT_NE(ok.out.find("9 vertices, 12 edges"), std::string::npos);
}

TEST_F(Cli, MalformedInputsExitOne) {
  EXPECT_EQ(cli("check " + at("missing.graph")).status, 1);
  EXPECT_EQ(cli("order").status, 1);
  EXPECT_EQ(cli("gen spiral 3 -o " + at("x.graph")).status, 1);
  ASSERT_EQ(cli("gen path 4 -o " + at("p4.graph")).status, 0);
  std::ofstream(at("dup.txt")) << "0\n0\n1\n2\n";
  EXPECT_EQ(cli("eval " + at("p4.graph") + " --perm " + at("dup.txt")).status, 1);
  std::ofstream(at("short.txt")) << "0\n1\n";
  EXPECT_EQ(cli("eval " + at("p4.graph") + " --perm " + at("short.txt")).status, 1);
  EXPECT_EQ(cli("order " + at("p4.graph") + " --procs 0 -o " + at("o.txt")).status, 1);
}

TEST_F(Cli, ByteIdenticalRuns) {
  ASSERT_EQ(cli("gen grid2d 16 -o " + at("g.graph")).status, 0);
  const std::string base = "order " + at("g.graph") + " --procs 3 --seed 5 -o ";
  ASSERT_EQ(cli(base + at("a.txt")).status, 0);
  ASSERT_EQ(cli(base + at("b.txt")).status, 0);
  ASSERT_EQ(cli(base + at("c.txt") + " --schedule sequential").status, 0);
  EXPECT_EQ(slurp(at("a.txt")), slurp(at("b.txt")));
  EXPECT_EQ(slurp(at("a.txt")), slurp(at("c.txt")));
}
