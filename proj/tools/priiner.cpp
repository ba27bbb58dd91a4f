// Command-line front end: simulate, reconstruct, evaluate, benchmark.
//
// Exit codes: 0 success, 1 I/O failure, 2 usage/validation error,
// 3 numerical failure.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "priiner/config.hpp"
#include "priiner/io.hpp"
#include "priiner/metrics.hpp"
#include "priiner/priors.hpp"
#include "priiner/reconstruct.hpp"
#include "priiner/simulate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace priiner;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

std::vector<double> magnitudes(const ComplexGrid2D& g) {
  std::vector<double> out(g.v.size());
  for (std::size_t i = 0; i < g.v.size(); ++i) out[i] = std::abs(g.v[i]);
  return out;
}

void write_json(const json& j, const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path.string());
  f << j.dump(2) << '\n';
}

std::string fmt(double x) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(6);
  os << x;
  return os.str();
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::size_t size = 128;
  std::size_t coils = 4;
  int acceleration = 4;
  double center_fraction = 0.08;
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_simulate(const SimulateArgs& a) {
  const ComplexGrid2D truth = make_phantom(default_phantom(a.size));
  const CoilMaps csm = make_synthetic_csm(a.coils, a.size, a.size);
  AcquisitionSpec acq;
  acq.coils = a.coils;
  acq.acceleration = a.acceleration;
  acq.center_fraction = a.center_fraction;
  acq.noise_sigma = a.noise;
  acq.seed = a.seed;
  auto [y, mask] = acquire(truth, csm, acq);

  const fs::path dir(a.out);
  fs::create_directories(dir);
  save_grid(truth, (dir / "truth.npy").string(), npy::Dtype::c16);
  save_coil_stack(csm.coils, csm.H, csm.W, csm.v, (dir / "csm.npy").string());
  save_coil_stack(y.coils, y.H, y.W, y.v, (dir / "kspace.npy").string());
  save_mask(mask, (dir / "mask.npy").string());

  json m;
  m["command"] = "simulate";
  m["size"] = a.size;
  m["coils"] = a.coils;
  m["acceleration"] = a.acceleration;
  m["center_fraction"] = a.center_fraction;
  m["noise"] = a.noise;
  m["seed"] = a.seed;
  m["mask"] = {{"acceleration", mask.acceleration},
               {"center_fraction", mask.center_fraction},
               {"sampled_count", mask.sampled_count()},
               {"width", mask.W}};
  m["files"] = {"truth.npy", "csm.npy", "kspace.npy", "mask.npy",
                "manifest.json"};
  write_json(m, dir / "manifest.json");
  std::cout << "simulate: wrote 5 files to " << dir.string() << "\n";
  return kExitOk;
}

// -------------------------------------------------------------- reconstruct

struct ReconstructArgs {
  std::string config;
  std::string kspace, mask_path, truth, prior, maps, out, prior_kind;
  int iterations = -1;
  long seed = -1;
  bool dc_only = false;
  bool dc_only_set = false;
};

void write_recon_outputs(const fs::path& dir, const ReconConfig& cfg,
                         const ReconResult& r, const json& extra) {
  fs::create_directories(dir);
  save_grid(r.image, (dir / "image.npy").string(), npy::Dtype::c16);
  save_coil_stack(r.maps.coils, r.maps.H, r.maps.W, r.maps.v,
                  (dir / "csm.npy").string());
  save_trace_csv(r.trace, (dir / "trace.csv").string());
  json m;
  m["command"] = "reconstruct";
  m["config"] = config_to_json(cfg);
  m["iterations_run"] = r.iterations_run;
  m["wall_seconds"] = r.wall_seconds;
  if (!r.trace.empty()) {
    const LossBreakdown& b = r.trace.back();
    m["final_loss"] = {{"l_dc", b.l_dc},
                       {"l_prior", b.l_prior},
                       {"l_tv", b.l_tv},
                       {"total", b.total}};
  }
  for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = *it;
  m["files"] = {"image.npy", "csm.npy", "trace.csv", "manifest.json"};
  write_json(m, dir / "manifest.json");
}

int cmd_reconstruct(const ReconstructArgs& a) {
  ReconConfig cfg = load_config(a.config);
  if (!a.kspace.empty()) cfg.kspace_path = a.kspace;
  if (!a.mask_path.empty()) cfg.mask_path = a.mask_path;
  if (!a.truth.empty()) cfg.truth_path = a.truth;
  if (!a.prior.empty()) cfg.prior_path = a.prior;
  if (!a.out.empty()) cfg.output_dir = a.out;
  if (!a.prior_kind.empty()) cfg.prior_kind = prior_kind_from_string(a.prior_kind);
  if (a.iterations > 0) cfg.iterations = a.iterations;
  if (a.seed >= 0) cfg.seed = a.seed;
  if (a.dc_only_set) cfg.dc_only = a.dc_only;
  cfg.validate();
  if (cfg.kspace_path.empty())
    throw ValidationError("reconstruct: a k-space path is required");
  if (cfg.mask_path.empty())
    throw ValidationError("reconstruct: a mask path is required");
  if (cfg.output_dir.empty())
    throw ValidationError("reconstruct: an output directory is required");

  const MultiCoilKSpace y = load_kspace(cfg.kspace_path);
  const SamplingMask mask =
      load_mask(cfg.mask_path, cfg.acceleration, cfg.center_fraction);
  if (mask.W != y.W)
    throw ValidationError("reconstruct: mask width does not match k-space");

  ComplexGrid2D truth(0, 0);
  const bool have_truth = !cfg.truth_path.empty();
  if (have_truth) truth = load_grid(cfg.truth_path);

  CoilMaps prior_maps(0, 0, 0);
  if (cfg.prior_kind == PriorKind::zero_filled) {
    if (a.maps.empty())
      throw ValidationError(
          "reconstruct: --maps is required for the zero_filled prior kind");
    prior_maps = load_coil_maps(a.maps);
  }

  PriorSpec pspec;
  pspec.kind = cfg.prior_kind;
  pspec.path = cfg.prior_path;
  pspec.rho = cfg.prior_rho;
  const ComplexGrid2D prior =
      cfg.dc_only
          ? ComplexGrid2D(y.H, y.W)  // unused by the objective in dc_only mode
          : make_prior(pspec, y, mask, prior_maps,
                       have_truth ? &truth : nullptr);

  const fs::path dir(cfg.output_dir);
  ReconResult result;
  try {
    result = reconstruct(cfg, y, mask, prior);
  } catch (const DivergenceError& e) {
    fs::create_directories(dir);
    save_trace_csv(e.trace, (dir / "trace.csv").string());
    std::cerr << "error: " << e.what() << " (partial trace written)\n";
    return kExitNumerical;
  }

  json extra;
  if (have_truth) {
    const std::vector<double> mt = magnitudes(truth);
    const std::vector<double> mi = magnitudes(result.image);
    const double s = ssim(mi, mt, y.H, y.W);
    const double p = psnr(mi, mt);
    extra["metrics"] = {{"ssim", s}, {"psnr", p}};
    std::cout << "SSIM=" << fmt(s) << " PSNR=" << fmt(p) << "\n";
  }
  write_recon_outputs(dir, cfg, result, extra);
  std::cout << "reconstruct: wrote results to " << dir.string() << " ("
            << result.iterations_run << " iterations)\n";
  return kExitOk;
}

// ---------------------------------------------------------------- evaluate

std::vector<std::pair<std::string, std::string>> pair_inputs(
    const std::string& test, const std::string& truth) {
  if (fs::is_directory(test) != fs::is_directory(truth))
    throw ValidationError("evaluate: test and truth must both be files or both directories");
  if (!fs::is_directory(test)) return {{test, truth}};
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(test))
    if (e.path().extension() == ".npy") names.push_back(e.path().filename().string());
  std::sort(names.begin(), names.end());
  if (names.empty()) throw ValidationError("evaluate: no .npy files in " + test);
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& n : names) {
    const fs::path t = fs::path(truth) / n;
    if (!fs::exists(t))
      throw ValidationError("evaluate: missing truth counterpart for " + n);
    pairs.emplace_back((fs::path(test) / n).string(), t.string());
  }
  return pairs;
}

int cmd_evaluate(const std::string& test, const std::string& truth,
                 const std::string& out) {
  const auto pairs = pair_inputs(test, truth);
  std::vector<double> ssims, psnrs;
  const fs::path dir(out);
  fs::create_directories(dir);
  std::ofstream csv(dir / "evaluate.csv");
  if (!csv) throw IoError("evaluate: cannot write CSV in " + out);
  csv << "case,ssim,psnr\n";
  for (const auto& [tp, gp] : pairs) {
    const ComplexGrid2D ti = load_grid(tp);
    const ComplexGrid2D gi = load_grid(gp);
    if (ti.H != gi.H || ti.W != gi.W)
      throw ValidationError("evaluate: shape mismatch for " + tp);
    const double s = ssim(magnitudes(ti), magnitudes(gi), ti.H, ti.W);
    const double p = psnr(magnitudes(ti), magnitudes(gi));
    ssims.push_back(s);
    psnrs.push_back(p);
    csv << fs::path(tp).filename().string() << ',' << fmt(s) << ',' << fmt(p)
        << '\n';
  }
  const auto [ms, ds] = mean_std(ssims);
  const auto [mp, dp] = mean_std(psnrs);
  json summary;
  summary["cases"] = pairs.size();
  summary["ssim"] = {{"mean", ms}, {"std", ds}};
  summary["psnr"] = {{"mean", mp}, {"std", dp}};
  write_json(summary, dir / "summary.json");
  std::cout << "SSIM " << fmt(ms) << " +- " << fmt(ds) << "  PSNR " << fmt(mp)
            << " +- " << fmt(dp) << "  (" << pairs.size() << " case"
            << (pairs.size() == 1 ? "" : "s") << ")\n";
  return kExitOk;
}

// ---------------------------------------------------------------- benchmark

struct BenchmarkPlan {
  std::vector<int> accelerations = {4, 6, 8, 10};
  std::vector<std::string> methods = {"zero_filled", "dc_only", "dual_dc"};
  std::vector<long> seeds = {1, 2, 3, 4, 5};
  std::size_t size = 128;
  std::size_t coils = 4;
  double center_fraction = 0.08;
  double noise = 0.15;
  double rho = 0.25;
  double lambda_tv = 0.01;
  int iterations = 250;
  unsigned jobs = 1;
  std::string out;

  void validate() const {
    if (accelerations.empty() || methods.empty() || seeds.empty())
      throw ValidationError("benchmark: accelerations, methods and seeds must be nonempty");
    for (int r : accelerations)
      if (r < 1) throw ValidationError("benchmark: acceleration must be positive");
    for (const auto& m : methods)
      if (m != "zero_filled" && m != "dc_only" && m != "dual_dc")
        throw ValidationError("benchmark: unknown method '" + m + "'");
    std::vector<long> s = seeds;
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end())
      throw ValidationError("benchmark: seeds must be distinct");
    if (iterations < 1)
      throw ValidationError("benchmark: iterations must be positive");
  }
};

struct CellResult {
  bool ok = false;
  std::string error;
  // per method present in the plan: ssim/psnr
  std::vector<double> ssim, psnr;
};

int cmd_benchmark(const BenchmarkPlan& plan) {
  plan.validate();
  const fs::path dir(plan.out);
  fs::create_directories(dir);

  struct Cell {
    int r;
    long seed;
  };
  std::vector<Cell> cells;
  for (int r : plan.accelerations)
    for (long s : plan.seeds) cells.push_back({r, s});

  std::vector<CellResult> results(cells.size());

  auto run_cell = [&](std::size_t idx) {
    const Cell& c = cells[idx];
    CellResult& out = results[idx];
    try {
      const ComplexGrid2D truth = make_phantom(default_phantom(plan.size));
      const CoilMaps csm = make_synthetic_csm(plan.coils, plan.size, plan.size);
      AcquisitionSpec acq;
      acq.coils = plan.coils;
      acq.acceleration = c.r;
      acq.center_fraction = plan.center_fraction;
      acq.noise_sigma = plan.noise;
      acq.seed = std::uint64_t(c.seed);
      auto [y, mask] = acquire(truth, csm, acq);
      const std::vector<double> mt = magnitudes(truth);
      const double tmax = *std::max_element(mt.begin(), mt.end());
      const bool first_seed = c.seed == plan.seeds.front();

      for (const std::string& method : plan.methods) {
        ComplexGrid2D img(0, 0);
        if (method == "zero_filled") {
          img = zero_filled_adjoint(y, csm, mask);
        } else {
          ReconConfig cfg;
          cfg.acceleration = c.r;
          cfg.center_fraction = plan.center_fraction;
          cfg.iterations = plan.iterations;
          cfg.lambda_tv = plan.lambda_tv;
          cfg.seed = c.seed;
          cfg.dc_only = method == "dc_only";
          cfg.prior_kind = PriorKind::lowpass_oracle;
          cfg.prior_rho = plan.rho;
          const ComplexGrid2D prior = cfg.dc_only
                                          ? ComplexGrid2D(y.H, y.W)
                                          : lowpass_prior(truth, plan.rho);
          img = reconstruct(cfg, y, mask, prior).image;
        }
        const std::vector<double> mi = magnitudes(img);
        out.ssim.push_back(ssim(mi, mt, truth.H, truth.W));
        out.psnr.push_back(psnr(mi, mt));
        if (first_seed) {
          std::vector<double> diff(mi.size());
          for (std::size_t p = 0; p < mi.size(); ++p)
            diff[p] = std::abs(mi[p] - mt[p]);
          const std::string stem =
              "R" + std::to_string(c.r) + "_" + method;
          save_pgm(diff, truth.H, truth.W, (dir / ("diff_" + stem + ".pgm")).string(),
                   0.0, tmax);
          save_pgm(mi, truth.H, truth.W, (dir / ("recon_" + stem + ".pgm")).string(),
                   0.0, tmax);
        }
      }
      out.ok = true;
    } catch (const std::exception& e) {
      out.ok = false;
      out.error = e.what();
    }
  };

  const unsigned jobs = std::max(1u, plan.jobs);
  if (jobs <= 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) run_cell(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < std::min<std::size_t>(jobs, cells.size()); ++t)
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= cells.size()) return;
          run_cell(i);
        }
      });
    for (auto& th : pool) th.join();
  }

  std::size_t failed = 0;
  for (std::size_t i = 0; i < cells.size(); ++i)
    if (!results[i].ok) {
      ++failed;
      std::cerr << "cell R=" << cells[i].r << " seed=" << cells[i].seed
                << " failed: " << results[i].error << "\n";
    }
  if (failed == cells.size()) {
    std::cerr << "benchmark: all cells failed\n";
    return kExitNumerical;
  }

  // Per-(R, method) aggregate table.
  std::ofstream csv(dir / "report.csv");
  if (!csv) throw IoError("benchmark: cannot write report.csv");
  csv << "acceleration,method,cases,mean_ssim,std_ssim,mean_psnr,std_psnr\n";
  for (int r : plan.accelerations) {
    for (std::size_t m = 0; m < plan.methods.size(); ++m) {
      std::vector<double> ss, ps;
      for (std::size_t i = 0; i < cells.size(); ++i)
        if (cells[i].r == r && results[i].ok) {
          ss.push_back(results[i].ssim[m]);
          ps.push_back(results[i].psnr[m]);
        }
      if (ss.empty()) continue;
      const auto [ms, ds] = mean_std(ss);
      const auto [mp, dp] = mean_std(ps);
      csv << r << ',' << plan.methods[m] << ',' << ss.size() << ',' << fmt(ms)
          << ',' << fmt(ds) << ',' << fmt(mp) << ',' << fmt(dp) << '\n';
    }
  }

  // Paired Wilcoxon p-values on SSIM between method pairs, per R and pooled.
  std::ofstream pcsv(dir / "pvalues.csv");
  if (!pcsv) throw IoError("benchmark: cannot write pvalues.csv");
  pcsv << "acceleration,method_a,method_b,pairs,p_value\n";
  auto emit_pair = [&](const std::string& label, std::size_t ma, std::size_t mb,
                       const std::vector<std::size_t>& idxs) {
    std::vector<double> a, b;
    for (std::size_t i : idxs)
      if (results[i].ok) {
        a.push_back(results[i].ssim[ma]);
        b.push_back(results[i].ssim[mb]);
      }
    if (a.size() < 5) return;
    try {
      const double p = wilcoxon_signed_rank(a, b);
      pcsv << label << ',' << plan.methods[ma] << ',' << plan.methods[mb] << ','
           << a.size() << ',' << fmt(p) << '\n';
    } catch (const ValidationError&) {
      // degenerate pair (all differences zero): skip the row
    }
  };
  std::vector<std::size_t> all_idx(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) all_idx[i] = i;
  for (std::size_t ma = 0; ma < plan.methods.size(); ++ma)
    for (std::size_t mb = ma + 1; mb < plan.methods.size(); ++mb) {
      for (int r : plan.accelerations) {
        std::vector<std::size_t> idxs;
        for (std::size_t i = 0; i < cells.size(); ++i)
          if (cells[i].r == r) idxs.push_back(i);
        emit_pair(std::to_string(r), ma, mb, idxs);
      }
      emit_pair("all", ma, mb, all_idx);
    }

  json m;
  m["command"] = "benchmark";
  m["accelerations"] = plan.accelerations;
  m["methods"] = plan.methods;
  m["seeds"] = plan.seeds;
  m["size"] = plan.size;
  m["coils"] = plan.coils;
  m["center_fraction"] = plan.center_fraction;
  m["noise"] = plan.noise;
  m["rho"] = plan.rho;
  m["lambda_tv"] = plan.lambda_tv;
  m["iterations"] = plan.iterations;
  m["failed_cells"] = failed;
  write_json(m, dir / "manifest.json");

  std::cout << "benchmark: " << cells.size() - failed << "/" << cells.size()
            << " cells completed; report in " << dir.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PrIINeR-style instance-wise MRI reconstruction toolkit"};
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* s = app.add_subcommand("simulate", "Generate a synthetic multi-coil case");
  s->add_option("--size", sim.size, "Image size (even, H == W)");
  s->add_option("--coils", sim.coils, "Number of coils");
  s->add_option("--acceleration", sim.acceleration, "Acceleration factor R");
  s->add_option("--center-fraction", sim.center_fraction, "Fully sampled center fraction");
  s->add_option("--noise", sim.noise, "Complex Gaussian noise std");
  s->add_option("--seed", sim.seed, "RNG seed");
  s->add_option("--out", sim.out, "Output directory")->required();

  ReconstructArgs rec;
  CLI::App* r = app.add_subcommand("reconstruct", "Run the instance optimization");
  r->add_option("--config", rec.config, "ReconConfig JSON file")->required();
  r->add_option("--kspace", rec.kspace, "Override k-space NPY path");
  r->add_option("--mask", rec.mask_path, "Override mask NPY path");
  r->add_option("--truth", rec.truth, "Override truth NPY path (enables metrics)");
  r->add_option("--prior", rec.prior, "Override prior NPY path (file kind)");
  r->add_option("--maps", rec.maps, "Coil maps NPY (zero_filled prior kind)");
  r->add_option("--out", rec.out, "Override output directory");
  r->add_option("--prior-kind", rec.prior_kind, "Override prior kind");
  r->add_option("--iterations", rec.iterations, "Override iteration count");
  r->add_option("--seed", rec.seed, "Override seed");
  r->add_flag("--dc-only,!--no-dc-only",
              [&rec](std::int64_t v) {
                rec.dc_only = v > 0;
                rec.dc_only_set = true;
              },
              "Drop the prior consistency term");

  std::string ev_test, ev_truth, ev_out = ".";
  CLI::App* e = app.add_subcommand("evaluate", "SSIM/PSNR for images or directories");
  e->add_option("--test", ev_test, "Test image NPY or directory")->required();
  e->add_option("--truth", ev_truth, "Truth image NPY or directory")->required();
  e->add_option("--out", ev_out, "Output directory for CSV/JSON");

  BenchmarkPlan plan;
  CLI::App* b = app.add_subcommand("benchmark", "Simulate/reconstruct/evaluate grid");
  b->add_option("--out", plan.out, "Output directory")->required();
  b->add_option("--accelerations", plan.accelerations, "Acceleration factors");
  b->add_option("--methods", plan.methods,
                "Methods: zero_filled, dc_only, dual_dc");
  b->add_option("--seeds", plan.seeds, "Distinct seeds (one cell per R x seed)");
  b->add_option("--size", plan.size, "Image size");
  b->add_option("--coils", plan.coils, "Number of coils");
  b->add_option("--center-fraction", plan.center_fraction, "Center fraction");
  b->add_option("--noise", plan.noise, "Acquisition noise std");
  b->add_option("--rho", plan.rho, "Lowpass prior keep-fraction");
  b->add_option("--lambda-tv", plan.lambda_tv, "TV weight for reconstructions");
  b->add_option("--iterations", plan.iterations, "Iterations per reconstruction");
  b->add_option("--jobs", plan.jobs, "Max concurrent benchmark cells");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return kExitUsage;
  }

  try {
    if (s->parsed()) return cmd_simulate(sim);
    if (r->parsed()) return cmd_reconstruct(rec);
    if (e->parsed()) return cmd_evaluate(ev_test, ev_truth, ev_out);
    if (b->parsed()) return cmd_benchmark(plan);
  } catch (const ValidationError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const FormatError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const IoError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitIo;
  } catch (const NumericalError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}
