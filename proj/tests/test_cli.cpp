#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "txlr/io.hpp"
#include "txlr/metrics.hpp"

using namespace txlr;
namespace fs = std::filesystem;

namespace {

const fs::path kDir = fs::temp_directory_path() / ("txlr_cli_" + std::to_string(::getpid()));

int run(const std::string &args) {
  const std::string cmd = std::string(TXLR_CLI) + " " + args + " >" + (kDir / "stdout.txt").string() + " 2>" +
                          (kDir / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string path(const std::string &name) { return (kDir / name).string(); }

struct Setup {
  Setup() {
    fs::remove_all(kDir);
    fs::create_directories(kDir);
  }
  ~Setup() { fs::remove_all(kDir); }
} setup;

}  // namespace

TEST_CASE("usage errors exit with status 2") {
  CHECK(run("") == 2);
  CHECK(slurp(kDir / "stderr.txt").find("generate") != std::string::npos);
  CHECK(run("frobnicate") == 2);
  CHECK(run("recon") == 2);
  CHECK(run("recon --in x.kten --method sense") != 0);
  CHECK(run("sweep --set colour=red") == 2);
  CHECK(run("--help") == 0);
}

TEST_CASE("generate, mask, recon, spectrum, maps") {
  REQUIRE(run("generate --out " + path("gt.kten") +
              " --size 16 --crop 12 --nrx 2 --ntx 2 --order 2 --phantom disc --seed 4") == 0);
  const KtenData gt = read_kten(path("gt.kten"));
  CHECK(gt.tensor.dims() == Dims4{12, 12, 2, 2});
  CHECK(gt.meta["flags"]["nrx"] == "2");
  CHECK(gt.meta["flags"]["phantom"] == "disc");

  REQUIRE(run("mask --out " + path("mask.kten") + " --nkx 12 --nky 12 --ntx 2 -R 3 --seed 5") == 0);
  const SamplingMask m = read_mask(path("mask.kten"));
  CHECK(m.ntx() == 2);
  CHECK(std::abs(m.r_achieved() - 3.0) <= 0.15);

  REQUIRE(run("recon --in " + path("gt.kten") + " --mask " + path("mask.kten") + " --out " + path("rec.kten") +
              " --method txlr --kernel 3x3 --rank 8,8 --iters 6 --truth " + path("gt.kten") + " --trace " +
              path("trace.csv")) == 0);
  const KtenData rec = read_kten(path("rec.kten"));
  CHECK(rec.tensor.dims() == gt.tensor.dims());
  CHECK(rec.meta["iterations_used"] == 6);
  CHECK(rec.meta["flags"]["method"] == "txlr");
  CHECK(rec.meta["flags"]["kernel"] == "3x3");
  CHECK(rec.meta["rmse"].get<double>() == doctest::Approx(rmse(rec.tensor, gt.tensor)));
  const std::string trace = slurp(path("trace.csv"));
  CHECK(trace.rfind("iteration,residual,chi,rmse\n", 0) == 0);
  CHECK(std::count(trace.begin(), trace.end(), '\n') == 7);

  CHECK(run("recon --in " + path("gt.kten") + " --out " + path("x.kten") + " --stop chisq") == 2);
  CHECK(run("recon --in " + path("missing.kten")) == 1);

  REQUIRE(run("spectrum --in " + path("gt.kten") + " --out " + path("spec.csv") + " --kernel 3x3 --unfolding tc") == 0);
  const std::string spec = slurp(path("spec.csv"));
  CHECK(spec.rfind("source,unfolding,rows,cols,index,value,normalized\n", 0) == 0);
  // Tc is 18 x 200: 18 data rows and 18 random-baseline rows
  CHECK(std::count(spec.begin(), spec.end(), '\n') == 1 + 2 * 18);

  REQUIRE(run("maps --in " + path("gt.kten") + " --out " + path("maps.kten")) == 0);
  const KtenData maps = read_kten(path("maps.kten"));
  CHECK(maps.tensor.dims() == Dims4{12, 12, 1, 2});
  CHECK(maps.meta["kind"] == "relative_tx_maps");
}

TEST_CASE("sweep from a config file") {
  std::ofstream(kDir / "sweep.cfg") << "slices = 1\nimage_size = 16\ncrop = 12\nnrx = 2\nntx = 2\norder = 2\n"
                                       "kernel = 3x3\nranks = 6\nrank_vc = 8\nR = 3\niters = 3\n";
  REQUIRE(run("sweep --config " + path("sweep.cfg") + " --set output=" + path("out") + " --set methods=primo") == 0);
  const std::string csv = slurp(kDir / "out" / "results.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
  CHECK(csv.find("\n0,primo,3,60,3x3,6,") != std::string::npos);
}
