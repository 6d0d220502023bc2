#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#ifndef IPEVO_SOURCE_DIR
#define IPEVO_SOURCE_DIR "."
#endif

namespace fs = std::filesystem;

namespace {

std::string cli() {
  const char* p = std::getenv("IPEVO_CLI");
  return p ? p : "ipevo";
}

fs::path scratch() {
  static fs::path d = [] {
    fs::path p = fs::temp_directory_path() / ("ipevo-cli-test-" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return d;
}

int run(const std::string& args, std::string* out = nullptr) {
  fs::path log = scratch() / "stdout.txt";
  std::string cmd = cli() + " " + args + " > " + log.string() + " 2> " + (scratch() / "stderr.txt").string();
  int rc = std::system(cmd.c_str());
  if (out) {
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    *out = ss.str();
  }
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path write(const std::string& name, const std::string& text) {
  fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kConfigs = std::string(IPEVO_SOURCE_DIR) + "/configs/";

}  // namespace

TEST_CASE("usage errors exit 2") {
  CHECK(run("check " + write("noseed.json", R"({"model": "besq"})").string()) == 2);
  CHECK(run("check " + write("badmodel.json", R"({"model": "nope", "seed": 1})").string()) == 2);
  CHECK(run("check " + write("badparam.json", R"({"model": "besq", "alpha": 3, "seed": 1})").string()) == 2);
  CHECK(run("check " + write("broken.json", "{").string()) == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("experiment no-such " + kConfigs + "metric-oracle.json") == 2);
}

TEST_CASE("check prints a report") {
  std::string out;
  CHECK(run("check --json " + kConfigs + "check-wright-fisher.json", &out) == 0);
  CHECK(out.find("bounded") != std::string::npos);
  // seed override satisfies a missing seed
  CHECK(run("--seed 3 check " + write("noseed2.json", R"({"model": "besq"})").string()) == 0);
}

TEST_CASE("metric between two CSVs") {
  fs::path a = write("a.csv", "ordinal,width\n0,2\n1,1\n");
  fs::path b = write("b.csv", "ordinal,width\n0,1\n1,2\n");
  std::string out;
  CHECK(run("metric " + a.string() + " " + b.string(), &out) == 0);
  CHECK(std::stod(out) == doctest::Approx(1.0));
  CHECK(run("metric " + a.string() + " " + write("bad.csv", "ordinal,width\n0,x\n").string()) != 0);
}

TEST_CASE("simulate then skewer") {
  fs::path dir = scratch() / "run";
  std::string cfg = slurp(kConfigs + "simulate.json");
  cfg.insert(cfg.rfind('}'), ", \"output_dir\": \"" + dir.string() + "\"");
  fs::path c = write("sim.json", cfg);
  REQUIRE(run("simulate " + c.string()) == 0);
  for (const char* f : {"run.json", "atoms.csv", "segments.csv", "slices.csv", "spindles.csv"}) CHECK(fs::exists(dir / f));
  std::string out;
  CHECK(run("skewer " + dir.string() + " --level 0", &out) == 0);
  CHECK(out.rfind("ordinal,width,spindle_id", 0) == 0);
  // level 0 is the starting partition
  CHECK(out.find(",0.6,") != std::string::npos);
  CHECK(out.find(",0.3,") != std::string::npos);
  CHECK(run("skewer " + dir.string() + " --level 0.5 --out " + (scratch() / "s.csv").string()) == 0);
  CHECK(fs::exists(scratch() / "s.csv"));
  CHECK(run("skewer " + (scratch() / "missing").string() + " --level 0.5") != 0);
}

TEST_CASE("experiment reruns are byte-identical") {
  fs::path d1 = scratch() / "e1", d2 = scratch() / "e2";
  auto cfg = [&](const fs::path& d) {
    return write(d.filename().string() + ".json",
                 R"({"pairs": 50, "max_blocks": 5, "seed": 5, "output_dir": ")" + d.string() + "\"}");
  };
  CHECK(run("experiment metric-oracle " + cfg(d1).string()) == 0);
  CHECK(run("experiment metric-oracle " + cfg(d2).string()) == 0);
  for (const auto& e : fs::directory_iterator(d1)) {
    if (e.path().extension() != ".csv") continue;
    CHECK(slurp(e.path()) == slurp(d2 / e.path().filename()));
  }
  CHECK(fs::exists(d1 / "summary.json"));
  CHECK(fs::exists(d1 / "plot.py"));
}
