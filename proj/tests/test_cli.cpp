#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hypercone/io/binary.hpp"
#include "hypercone/io/dump.hpp"

namespace fs = std::filesystem;
using namespace hypercone;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    const auto d = fs::temp_directory_path() / ("hypercone_test_cli_" + std::to_string(getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args, const std::string& stdout_file = "") {
  std::string cmd = std::string(HYPERCONE_CLI) + " " + args;
  cmd += stdout_file.empty() ? " > /dev/null" : " > " + (workdir() / stdout_file).string();
  cmd += " 2> " + (workdir() / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read(const std::string& name) {
  std::ifstream in(workdir() / name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string path(const std::string& name) { return (workdir() / name).string(); }

const std::string kSmallTrain = "train --steps 30 --warmup 3 --batch 8 --depth 2 --branching 3 --latent-dim 6 --dim 4 --quiet";

}  // namespace

TEST(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("nonsense"), 1);
  EXPECT_EQ(run("train"), 1);
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run(kSmallTrain + " --steps 10 --warmup 10 --out " + path("bad.hyec")), 1);
  EXPECT_EQ(run("stats --dump " + path("missing.hypb")), 1);
}

TEST(Cli, HelpListsDefaults) {
  ASSERT_EQ(run("train --help", "help.txt"), 0);
  const auto help = read("help.txt");
  for (const char* flag : {"--seed", "--no-entailment", "--fixed-curvature", "--inner-product-logits", "--space",
                           "--lr", "--steps", "--warmup"}) {
    EXPECT_NE(help.find(flag), std::string::npos) << flag;
  }
  EXPECT_NE(help.find("0.005"), std::string::npos);
}

TEST(Cli, GradcheckExitCodes) {
  EXPECT_EQ(run("gradcheck --seeds 3", "gc.txt"), 0);
  EXPECT_NE(read("gc.txt").find("PASS"), std::string::npos);
  EXPECT_EQ(run("gradcheck --seeds 2 --rtol 0 --atol 0"), 2);
}

TEST(Cli, TrainTwiceIsIdentical) {
  ASSERT_EQ(run(kSmallTrain + " --seed 7 --out " + path("a.hyec") + " --dump " + path("a.hypb") + " --curve " +
                    path("a.csv"),
                "summary.json"),
            0);
  ASSERT_EQ(run(kSmallTrain + " --seed 7 --out " + path("b.hyec") + " --dump " + path("b.hypb")), 0);
  EXPECT_EQ(io::read_file(path("a.hyec")), io::read_file(path("b.hyec")));
  EXPECT_EQ(io::read_file(path("a.hypb")), io::read_file(path("b.hypb")));
  EXPECT_EQ(io::read_file(path("a.labels")), io::read_file(path("b.labels")));
  const auto summary = nlohmann::json::parse(read("summary.json"));
  EXPECT_EQ(summary["steps"], 30);
  EXPECT_EQ(read("a.csv").substr(0, 7), "step,co");

  ASSERT_EQ(run("embed --checkpoint " + path("a.hyec") + " --out " + path("c.hypb")), 0);
  EXPECT_EQ(io::read_file(path("a.hypb")), io::read_file(path("c.hypb")));
}

TEST(Cli, AnalysisSubcommands) {
  ASSERT_EQ(run(kSmallTrain + " --out " + path("m.hyec") + " --dump " + path("m.hypb")), 0);
  ASSERT_EQ(run("stats --dump " + path("m.hypb"), "stats.csv"), 0);
  const auto stats = read("stats.csv");
  EXPECT_EQ(stats.substr(0, stats.find('\n')), "class,count,mean,std,min,q25,median,q75,max");
  EXPECT_NE(stats.find("\ntext,12,"), std::string::npos);
  EXPECT_NE(stats.find("\nimage,36,"), std::string::npos);
  ASSERT_EQ(run("stats --histogram --bins 5 --dump " + path("m.hypb") + " --out " + path("hist.csv")), 0);
  EXPECT_EQ(read("hist.csv").substr(0, 21), "class,bin_lo,bin_hi,c");

  ASSERT_EQ(run("traverse --dump " + path("m.hypb") + " --row 20", "trav.csv"), 0);
  const auto trav = read("trav.csv");
  EXPECT_EQ(trav.substr(0, 15), "step,row,label\n");
  EXPECT_NE(trav.find("\n49,0,[ROOT]\n"), std::string::npos);
  EXPECT_EQ(run("traverse --dump " + path("m.hypb") + " --row 999"), 1);
  EXPECT_EQ(run("traverse --dump " + path("m.hypb") + " --vector 1,2"), 1);

  ASSERT_EQ(run("retrieve --dump " + path("m.hypb") + " --row 5 -k 3", "ret.json"), 0);
  const auto hits = nlohmann::json::parse(read("ret.json"));
  ASSERT_EQ(hits.size(), 3u);
  EXPECT_EQ(hits[0]["row"], 5);
  ASSERT_EQ(run("retrieve --dump " + path("m.hypb") + " --row 20 --class text -k 12 --calibrated", "cal.json"), 0);
  double total = 0.0;
  for (const auto& h : nlohmann::json::parse(read("cal.json"))) total += h["score"].get<double>();
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_EQ(run("retrieve --dump " + path("m.hypb") + " --row 0 -k 1000"), 1);
}

TEST(Cli, StatsOnOriginOnlyDump) {
  analysis::EmbeddingIndex index;
  index.rows = Matrix(1, 3, 0.0);
  index.labels = {{analysis::LabelClass::Root, "[ROOT]"}};
  io::write_dump(path("origin.hypb"), index);
  ASSERT_EQ(run("stats --dump " + path("origin.hypb"), "origin.csv"), 0);
  EXPECT_EQ(read("origin.csv"), "class,count,mean,std,min,q25,median,q75,max\nroot,1,0,0,0,0,0,0,0\n");
}

TEST(Cli, ClassifyFromSamples) {
  ASSERT_EQ(run(kSmallTrain + " --out " + path("k.hyec")), 0);
  {
    std::ofstream prompts(path("prompts.csv"));
    prompts << "text,cat,1,0,0,0,0,0\ntext,cat,0.9,0.1,0,0,0,0\ntext,dog,0,0,0,0,0,1\n";
    std::ofstream images(path("images.csv"));
    images << "image,img0,1,0.05,0,0,0,0\nimage,img1,0,0,0,0,0.1,1\n";
  }
  ASSERT_EQ(run("embed --checkpoint " + path("k.hyec") + " --samples " + path("prompts.csv") + " --out " +
                path("prompts.hypb")),
            0);
  ASSERT_EQ(run("embed --checkpoint " + path("k.hyec") + " --samples " + path("images.csv") + " --out " +
                path("images.hypb")),
            0);
  ASSERT_EQ(run("classify --prompts " + path("prompts.hypb") + " --images " + path("images.hypb"), "cls.json"), 0);
  const auto out = nlohmann::json::parse(read("cls.json"));
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0]["label"], "img0");
  EXPECT_TRUE(out[0]["scores"].contains("cat"));
  EXPECT_TRUE(out[0]["scores"].contains("dog"));
}

TEST(Cli, CorruptDumpExitsOne) {
  analysis::EmbeddingIndex index;
  index.rows = Matrix(1, 2, 0.0);
  index.labels = {{analysis::LabelClass::Root, "[ROOT]"}};
  io::write_dump(path("corrupt.hypb"), index);
  auto bytes = io::read_file(path("corrupt.hypb"));
  bytes[0] = 'Z';
  io::write_file_atomic(path("corrupt.hypb"), bytes);
  EXPECT_EQ(run("stats --dump " + path("corrupt.hypb")), 1);
  EXPECT_NE(read("stderr.txt").find("bad magic at offset 0"), std::string::npos);
}
