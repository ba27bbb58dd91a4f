// End-to-end contract tests for the command-line binary. The binary path is
// supplied via the PRIINER_CLI environment variable (set by CTest).

#include <doctest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

std::string cli() {
  const char* p = std::getenv("PRIINER_CLI");
  REQUIRE_MESSAGE(p != nullptr, "PRIINER_CLI must point at the built binary");
  return p;
}

int run(const std::string& args, const fs::path& log) {
  const std::string cmd = cli() + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

std::size_t line_count(const fs::path& p) {
  std::ifstream f(p);
  std::string line;
  std::size_t n = 0;
  while (std::getline(f, line)) ++n;
  return n;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "priiner_cli_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_config(const fs::path& path, const fs::path& data,
                  const fs::path& out, int iterations,
                  const std::string& prior_kind = "lowpass_oracle") {
  nlohmann::json j;
  j["acceleration"] = 4;
  j["iterations"] = iterations;
  j["seed"] = 1;
  j["prior_kind"] = prior_kind;
  j["hash"] = {{"levels", 4}, {"table_size", 1024}, {"base_resolution", 4},
               {"max_resolution", 32}};
  j["paths"] = {{"kspace", (data / "kspace.npy").string()},
                {"mask", (data / "mask.npy").string()},
                {"truth", (data / "truth.npy").string()},
                {"output_dir", out.string()}};
  std::ofstream f(path);
  f << j.dump(2);
}

}  // namespace

TEST_CASE("simulate writes exactly the documented 5 files") {
  const fs::path d = scratch("sim5");
  const int rc = run("simulate --size 32 --coils 2 --acceleration 4 --seed 7 --out " +
                         (d / "out").string(),
                     d / "log.txt");
  CHECK(rc == 0);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(d / "out")) {
    (void)e;
    ++files;
  }
  CHECK(files == 5);
  for (const char* name :
       {"truth.npy", "csm.npy", "kspace.npy", "mask.npy", "manifest.json"})
    CHECK(fs::exists(d / "out" / name));
}

TEST_CASE("simulate rejects acceleration 0 with exit 2 naming the flag") {
  const fs::path d = scratch("simbad");
  const int rc = run("simulate --size 32 --acceleration 0 --out " +
                         (d / "out").string(),
                     d / "log.txt");
  CHECK(rc == 2);
  CHECK(slurp(d / "log.txt").find("acceleration") != std::string::npos);
}

TEST_CASE("simulate is deterministic: same flags give identical bytes") {
  const fs::path d = scratch("simdet");
  const std::string flags = "simulate --size 32 --coils 2 --acceleration 4 "
                            "--noise 0.01 --seed 3 --out ";
  REQUIRE(run(flags + (d / "a").string(), d / "la.txt") == 0);
  REQUIRE(run(flags + (d / "b").string(), d / "lb.txt") == 0);
  for (const char* name : {"truth.npy", "csm.npy", "kspace.npy", "mask.npy"})
    CHECK(slurp(d / "a" / name) == slurp(d / "b" / name));
}

TEST_CASE("reconstruct writes its file set and a full-length trace") {
  const fs::path d = scratch("recon");
  REQUIRE(run("simulate --size 32 --coils 2 --acceleration 4 --seed 1 --out " +
                  (d / "data").string(),
              d / "ls.txt") == 0);
  write_config(d / "cfg.json", d / "data", d / "out", 8);
  const int rc = run("reconstruct --config " + (d / "cfg.json").string(),
                     d / "lr.txt");
  CHECK(rc == 0);
  for (const char* name :
       {"image.npy", "csm.npy", "trace.csv", "manifest.json"})
    CHECK(fs::exists(d / "out" / name));
  CHECK(line_count(d / "out" / "trace.csv") == 9);  // header + 8 iterations
  // truth was supplied, so metrics are printed
  const std::string log = slurp(d / "lr.txt");
  CHECK(log.find("SSIM=") != std::string::npos);
  CHECK(log.find("PSNR=") != std::string::npos);
}

TEST_CASE("reconstruct with iterations=1 leaves a single-row trace") {
  const fs::path d = scratch("recon1");
  REQUIRE(run("simulate --size 32 --coils 2 --acceleration 4 --seed 1 --out " +
                  (d / "data").string(),
              d / "ls.txt") == 0);
  write_config(d / "cfg.json", d / "data", d / "out", 1);
  CHECK(run("reconstruct --config " + (d / "cfg.json").string(),
            d / "lr.txt") == 0);
  CHECK(line_count(d / "out" / "trace.csv") == 2);
}

TEST_CASE("manifests record the prior kind, distinguishing runs") {
  const fs::path d = scratch("reconpk");
  REQUIRE(run("simulate --size 32 --coils 2 --acceleration 4 --seed 1 --out " +
                  (d / "data").string(),
              d / "ls.txt") == 0);
  write_config(d / "cfg.json", d / "data", d / "a", 2);
  REQUIRE(run("reconstruct --config " + (d / "cfg.json").string(),
              d / "la.txt") == 0);
  REQUIRE(run("reconstruct --config " + (d / "cfg.json").string() +
                  " --prior-kind ground_truth_oracle --out " + (d / "b").string(),
              d / "lb.txt") == 0);
  const auto ja = nlohmann::json::parse(slurp(d / "a" / "manifest.json"));
  const auto jb = nlohmann::json::parse(slurp(d / "b" / "manifest.json"));
  CHECK(ja["config"]["prior_kind"] == "lowpass_oracle");
  CHECK(jb["config"]["prior_kind"] == "ground_truth_oracle");
}

TEST_CASE("reconstruct exits 1 on a missing input file") {
  const fs::path d = scratch("reconmiss");
  write_config(d / "cfg.json", d / "nonexistent", d / "out", 2);
  CHECK(run("reconstruct --config " + (d / "cfg.json").string(),
            d / "lr.txt") == 1);
}

TEST_CASE("evaluate emits per-case CSV and a mean/std summary") {
  const fs::path d = scratch("eval");
  REQUIRE(run("simulate --size 32 --coils 2 --acceleration 4 --seed 1 --out " +
                  (d / "data").string(),
              d / "ls.txt") == 0);
  const int rc = run("evaluate --test " + (d / "data" / "truth.npy").string() +
                         " --truth " + (d / "data" / "truth.npy").string() +
                         " --out " + (d / "out").string(),
                     d / "le.txt");
  CHECK(rc == 0);
  CHECK(fs::exists(d / "out" / "evaluate.csv"));
  const auto j = nlohmann::json::parse(slurp(d / "out" / "summary.json"));
  CHECK(j["cases"] == 1);
  CHECK(double(j["ssim"]["mean"]) == doctest::Approx(1.0));
  CHECK(double(j["psnr"]["mean"]) == doctest::Approx(100.0));
}

TEST_CASE("unknown subcommand exits 2") {
  const fs::path d = scratch("usage");
  CHECK(run("frobnicate", d / "log.txt") == 2);
}

TEST_CASE("benchmark single-cell plan yields a 1-row table") {
  const fs::path d = scratch("bench1");
  const int rc = run(
      "benchmark --accelerations 4 --methods zero_filled --seeds 1 --size 32 "
      "--iterations 2 --out " + (d / "out").string(),
      d / "log.txt");
  CHECK(rc == 0);
  CHECK(line_count(d / "out" / "report.csv") == 2);  // header + one row
}
