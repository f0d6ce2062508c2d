#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "tumod/cli.hpp"

namespace tumod {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "tumod");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("tumod_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const auto path = (dir_ / name).string();
    std::ofstream(path) << text;
    return path;
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  static std::string slurp(const std::string& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

TEST_F(CliTest, CheckTuOnRefractorinessFile) {
  std::ostringstream m;
  write_int_matrix(m, refractoriness_matrix(6, 3));
  const auto d = write("d.txt", m.str());
  const auto r = run({"check-tu", "--matrix", d});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "TU\n");
  EXPECT_EQ(run({"check-tu", "--matrix", d, "--expect-tu"}).code, 0);
}

TEST_F(CliTest, CheckTuNotTuWitness) {
  const auto bad = write("bad.txt", "2 2\n1 1\n-1 1\n");
  const auto r = run({"check-tu", "--matrix", bad});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "NotTU\nwitness rows 1 2 cols 1 2 det 2\n");
  EXPECT_EQ(run({"check-tu", "--matrix", bad, "--expect-tu"}).code, 1);
  EXPECT_EQ(run({"check-tu", "--matrix", bad, "--exhaustive"}).out, r.out);
}

TEST_F(CliTest, CheckTuSaveRoundTrip) {
  const auto saved = path("saved.txt");
  EXPECT_EQ(run({"check-tu", "--refractoriness", "7,3", "--save", saved}).code, 0);
  std::ifstream in(saved);
  EXPECT_EQ(read_int_matrix(in), refractoriness_matrix(7, 3));
  EXPECT_EQ(run({"check-tu", "--matrix", saved}).out, "TU\n");
}

TEST_F(CliTest, CheckTuErrors) {
  EXPECT_EQ(run({"check-tu"}).code, 2);
  EXPECT_EQ(run({"check-tu", "--matrix", path("missing.txt")}).code, 1);
  EXPECT_EQ(run({"check-tu", "--matrix", write("junk.txt", "2 2\n1 x\n")}).code, 1);
  EXPECT_EQ(run({"check-tu", "--refractoriness", "3,5"}).code, 1);
}

TEST_F(CliTest, EnvelopeLatentGroup) {
  const auto g = write("g.txt", "3 2\n1 2\n2 3\n");
  const auto r = run({"envelope", "--model", "latent-group", "--groups", g, "--x", "1,0,1"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "2.000000\n");
  const auto v = run({"envelope", "--model", "latent-group", "--groups", g, "--x", "0.5,1,0.5", "--verbose"});
  EXPECT_EQ(v.out, "1.000000\nencoding TU\ns 0.500000,1.000000,0.500000\nomega 0.500000,0.500000\n");
  EXPECT_EQ(run({"envelope", "--model", "latent-group", "--groups", g, "--x", "2,0,0"}).out, "inf\n");
}

TEST_F(CliTest, PenaltyAndEnvelopeForEveryModelKind) {
  const auto g = write("g.txt", "3 2\n1 2\n2 3\n");
  struct Case {
    std::vector<std::string> model;
    std::string x, penalty, envelope;
  };
  const std::vector<Case> cases{
      {{"--model", "intersection", "--groups", g}, "0,1,0", "2.000000", "2.000000"},
      {{"--model", "tree", "--parents", "0,1,1"}, "0,1,0", "inf", "2.000000"},
      {{"--model", "tree", "--parents", "0,1,1"}, "1,1,1", "3.000000", "3.000000"},
      {{"--model", "knapsack", "--groups", g}, "0.5,0.5,0.5", "inf", "1.000000"},
      {{"--model", "dispersive", "--groups", g}, "1,0,1", "2.000000", "2.000000"},
      {{"--model", "pairwise", "--p", "3", "--edges", "1-2,2-3"}, "1,1,0", "1.000000", "1.000000"},
      {{"--model", "sparse-cover", "--groups", g, "--G", "1"}, "1,0,1", "inf", "inf"},
      {{"--model", "within-intersection", "--groups", g}, "1,1,1", "4.000000", "4.000000"},
      {{"--model", "within-cover", "--groups", g}, "1,0,0", "1.000000", "1.000000"},
  };
  for (const auto& c : cases) {
    auto pen = c.model, env = c.model;
    pen.insert(pen.begin(), "penalty");
    env.insert(env.begin(), "envelope");
    for (auto* a : {&pen, &env}) {
      a->push_back("--x");
      a->push_back(c.x);
    }
    EXPECT_EQ(run(pen).out, c.penalty + "\n") << c.model[1];
    EXPECT_EQ(run(env).out, c.envelope + "\n") << c.model[1];
  }
}

TEST_F(CliTest, GroupFileSaveRoundTrip) {
  const auto g = write("g.txt", "4 2\n1 2 2.5\n2 3 4\n");
  const auto saved = path("saved_groups.txt");
  ASSERT_EQ(run({"penalty", "--model", "intersection", "--groups", g, "--x", "1,0,0,0", "--save-groups", saved}).out,
            "2.500000\n");
  std::ifstream a(g), b(saved);
  EXPECT_EQ(read_groups(a), read_groups(b));
  const auto app = path("appendix.txt");
  std::string zeros = "0";
  for (int i = 1; i < 200; ++i) zeros += ",0";
  EXPECT_EQ(run({"penalty", "--model", "latent-group", "--groups", "appendix", "--x", zeros, "--save-groups", app}).out,
            "0.000000\n");
  std::ifstream c(app);
  EXPECT_EQ(read_groups(c), appendix_interval_groups());
}

TEST_F(CliTest, UsageErrors) {
  const auto g = write("g.txt", "3 2\n1 2\n2 3\n");
  auto r = run({"envelope", "--model", "latent-group", "--groups", g, "--x", "1,0,1", "--bogus"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--bogus"), std::string::npos);
  r = run({"envelope", "--model", "latent-group", "--groups", g});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--x"), std::string::npos);
  r = run({"envelope", "--model", "tree", "--x", "1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--parents"), std::string::npos);
  r = run({"envelope", "--model", "nonsense", "--x", "1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--model"), std::string::npos);
  r = run({"envelope", "--model", "latent-group", "--groups", g, "--x", "1,a,1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--x"), std::string::npos);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(CliTest, DomainErrors) {
  const auto g = write("g.txt", "3 2\n1 2\n2 3\n");
  EXPECT_EQ(run({"envelope", "--model", "latent-group", "--groups", g, "--x", "1,0"}).code, 1);
  EXPECT_EQ(run({"envelope", "--model", "tree", "--parents", "0,0", "--x", "1,0"}).code, 1);
  EXPECT_EQ(run({"penalty", "--model", "intersection", "--groups", write("bad.txt", "3 1\n4\n"), "--x", "1,0,0"}).code,
            1);
}

TEST_F(CliTest, NormballFigureLevels) {
  const auto g = write("g.txt", "3 2\n1 2\n2 3\n");
  const auto csv = path("ball.csv");
  ASSERT_EQ(run({"normball", "--model", "dispersive", "--groups", g, "--resolution", "5", "--levels", "1,1.5,2",
                 "--out", csv})
                .code,
            0);
  std::istringstream in(slurp(csv));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "x1,x2,x3,value,le_1,le_1.5,le_2");
  std::map<std::string, std::string> rows;
  std::size_t count = 0;
  while (std::getline(in, line)) {
    ++count;
    const auto split = line.find(',', line.find(',', line.find(',') + 1) + 1);
    rows[line.substr(0, split)] = line.substr(split + 1);
  }
  EXPECT_EQ(count, 125u);
  EXPECT_EQ(rows["0.500000,0.500000,0.500000"], "1.500000,0,1,1");
  EXPECT_EQ(rows["1.000000,0.000000,1.000000"], "2.000000,0,0,1");
  EXPECT_EQ(rows["1.000000,0.000000,0.000000"], "1.000000,1,1,1");
  EXPECT_EQ(rows["0.000000,0.000000,1.000000"], "1.000000,1,1,1");
  EXPECT_EQ(rows["0.000000,0.000000,0.000000"], "0.000000,1,1,1");
  EXPECT_EQ(rows["1.000000,1.000000,0.000000"], "inf,0,0,0");
}

TEST_F(CliTest, NormballOriginAndGrid) {
  for (const auto& model : std::vector<std::vector<std::string>>{
           {"--model", "intersection", "--groups", write("a.txt", "2 1\n1 2\n")},
           {"--model", "tree", "--parents", "0,1"},
           {"--model", "pairwise", "--p", "2", "--edges", "1-2"},
           {"--model", "latent-group", "--groups", write("b.txt", "2 2\n1\n2\n")}}) {
    auto args = model;
    args.insert(args.begin(), "normball");
    args.insert(args.end(), {"--resolution", "3"});
    const auto r = run(args);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("\n0.000000,0.000000,0.000000\n"), std::string::npos) << model[1];
    EXPECT_EQ(r.out.find("1.5"), std::string::npos);
  }
  EXPECT_EQ(run({"normball", "--model", "tree", "--parents", "0,1,1,1"}).code, 1);
  EXPECT_EQ(cli::normball_grid(2, 11).size(), 121u);
  for (const auto& x : cli::normball_grid(3, 4)) EXPECT_LE(x.cwiseAbs().maxCoeff(), 1.0);
}

TEST_F(CliTest, OracleCheck) {
  const auto g = write("g.txt", "3 2\n1 2\n2 3\n");
  auto r = run({"oracle-check", "--model", "latent-group", "--groups", g, "--samples", "5"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("encoding TU max_gap 0.000000"), std::string::npos);
  r = run({"oracle-check", "--model", "tree", "--parents", "0,1", "--x", "0,0.5"});
  EXPECT_EQ(r.out, "x 0.000000,0.500000 envelope 1.000000 biconjugate 1.000000 gap 0.000000\n"
                   "encoding TU max_gap 0.000000\n");
  r = run({"oracle-check", "--model", "within-cover", "--groups", g, "--samples", "5"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("encoding NotTU"), std::string::npos);
}

TEST_F(CliTest, ExperimentCsv) {
  const auto cfg = write("dispersive.cfg", "p=40\ndelta=8\nfracs=0.3,0.5\ntrials=2\nnoise_k=3\n");
  const auto csv = path("run.csv");
  const auto r = run({"experiment", "--config", cfg, "--out", csv});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto text = slurp(csv);
  EXPECT_EQ(text.substr(0, text.find('\n')), "solver,n,frac,trial,rel_err,status,ms");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 2 * 2 * 2);
  EXPECT_NE(text.find("\nbp,12,0.3,0,"), std::string::npos);
  EXPECT_NE(r.out.find("solver,frac,mean_rel_err"), std::string::npos);

  const auto again = run({"experiment", "--config", cfg, "--set", "trials=1", "--set", "solvers=bp"});
  EXPECT_EQ(again.code, 0);
  EXPECT_EQ(std::count(again.out.begin(), again.out.end(), '\n'), 1 + 2);
  EXPECT_EQ(run({"experiment", "--config", cfg, "--set", "colour=blue"}).code, 1);
  EXPECT_EQ(run({"experiment", "--config", cfg, "--set", "trials"}).code, 2);
}

TEST_F(CliTest, ExperimentSeedOverride) {
  const auto cfg = write("c.cfg", "p=30\ndelta=6\nfracs=0.4\ntrials=1\nnoise_k=2\nsolvers=bp\n");
  auto strip_ms = [](const std::string& csv) { return csv.substr(0, csv.rfind(',')); };
  const auto base = run({"experiment", "--config", cfg});
  ::setenv("TUMOD_SEED", "1", 1);
  const auto same = run({"experiment", "--config", cfg});
  ::setenv("TUMOD_SEED", "12345", 1);
  const auto other = run({"experiment", "--config", cfg});
  ::unsetenv("TUMOD_SEED");
  EXPECT_EQ(strip_ms(base.out), strip_ms(same.out));
  EXPECT_NE(strip_ms(base.out), strip_ms(other.out));
}

}  // namespace
}  // namespace tumod
