#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "lrd/dictionary.hpp"
#include "lrd/image_io.hpp"
#include "lrd/synthetic.hpp"

using namespace lrd;
namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(LRD_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() / "lrd_cli_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    write_pgm(synthetic_image(SyntheticKind::PiecewiseConstant, 24, 3), dir / "in.pgm");
  }
  void TearDown() override { fs::remove_all(dir); }
  std::string p(const std::string& name) const { return (dir / name).string(); }
  fs::path dir;
};

}  // namespace

TEST_F(Cli, MakeDictThenDenoise) {
  ASSERT_EQ(run("make-dict --kind dct --support 3,3 --count 9 --out " + p("bank.nt")), 0);
  EXPECT_EQ(load_bank(p("bank.nt")).size(), 9u);
  ASSERT_EQ(run("denoise --input " + p("in.pgm") + " --dict " + p("bank.nt") +
                " --rank 2 --gamma 0.1 --alpha 1e-12 --iters 2 --seed 1 --output " + p("out.pgm")),
            0);
  EXPECT_EQ(read_pgm(p("out.pgm")).shape(), (Shape{24, 24}));
}

TEST_F(Cli, ConfigFileAndOverride) {
  std::ofstream(p("run.cfg")) << "rank = 2\niters = 1\ngamma = not-a-number\n";
  EXPECT_EQ(run("denoise --config " + p("run.cfg") + " --input " + p("in.pgm") + " --output " + p("o.pgm")), 2);
  EXPECT_EQ(run("denoise --config " + p("run.cfg") + " --gamma 0.2 --input " + p("in.pgm") + " --output " +
                p("o.pgm")),
            0);
  std::ofstream(p("bench.cfg")) << "sigmas = 20 40\nsynthetic-size = 16\niters = 1\n";
  ASSERT_EQ(run("bench --config " + p("bench.cfg") + " --out " + p("b.csv")), 0);
  std::ifstream csv(p("b.csv"));
  std::string line;
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, 7);
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run("denoise --input " + p("missing.pgm") + " --output " + p("o.pgm")), 3);
  EXPECT_EQ(run("denoise --input " + p("in.pgm") + " --rank 0 --output " + p("o.pgm")), 2);
  EXPECT_EQ(run("make-dict --kind wavelet --support 3,3 --count 2 --out " + p("b.nt")), 2);
  EXPECT_EQ(run("nonsense"), 2);
  std::ofstream(p("bad.nt")) << "junk";
  EXPECT_EQ(run("denoise --input " + p("in.pgm") + " --dict " + p("bad.nt") + " --output " + p("o.pgm")), 3);
}
