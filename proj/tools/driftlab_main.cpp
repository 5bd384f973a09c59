// driftlab: command-line surface for the lattice opinion-dynamics library.
//
// Subcommands: simulate, continue, spectral, predict, verify, export-branch.
// Every command reads a flat "[section] key = value" config, writes its
// artifacts into --out-dir, and records a manifest.json listing the resolved
// inputs (defaults included) and a digest of every produced file.
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "driftlab/accept.hpp"
#include "driftlab/asym.hpp"
#include "driftlab/branch_io.hpp"
#include "driftlab/config.hpp"
#include "driftlab/csv.hpp"
#include "driftlab/dynamics.hpp"
#include "driftlab/errors.hpp"
#include "driftlab/model.hpp"
#include "driftlab/spectral.hpp"
#include "driftlab/tw.hpp"

namespace {

using namespace driftlab;

constexpr const char* kVersion = "1.0.0";

// ---------------------------------------------------------------------------
// Small utilities
// ---------------------------------------------------------------------------

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Comma list ("0.1,0.2") or linspace "lo:hi:count".
std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    double lo = 0.0, hi = 0.0;
    int count = 0;
    char c1 = 0, c2 = 0;
    std::istringstream is(text);
    if (!(is >> lo >> c1 >> hi >> c2 >> count) || c1 != ':' || c2 != ':' ||
        count < 1)
      throw ConfigError("bad grid spec '" + text + "' (want lo:hi:count)");
    for (int i = 0; i < count; ++i)
      out.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
    return out;
  }
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("bad number '" + item + "' in grid spec");
    }
  }
  return out;
}

// Splits [0, n) into contiguous chunks and runs them on `threads` workers.
// Each chunk is processed in index order, so algorithms that seed point i+1
// from point i stay well-conditioned within a chunk.
void parallel_chunks(std::size_t n, int threads,
                     const std::function<void(std::size_t, std::size_t)>& fn) {
  if (threads <= 1 || n <= 1) {
    if (n > 0) fn(0, n);
    return;
  }
  std::size_t nchunks = std::min<std::size_t>(threads, n);
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(nchunks);
  for (std::size_t c = 0; c < nchunks; ++c) {
    std::size_t lo = n * c / nchunks, hi = n * (c + 1) / nchunks;
    pool.emplace_back([&, c, lo, hi] {
      try {
        fn(lo, hi);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------------------
// Config access that records every resolved value (defaults included) so the
// manifest reflects exactly what the run used.
// ---------------------------------------------------------------------------

struct Settings {
  config::Config cfg;
  std::map<std::string, std::string> used;

  std::string str(const std::string& sec, const std::string& key,
                  const std::string& fallback) {
    std::string v = cfg.get_or(sec, key, fallback);
    used[sec + "." + key] = v;
    return v;
  }
  double num(const std::string& sec, const std::string& key, double fallback) {
    double v = cfg.get_double_or(sec, key, fallback);
    used[sec + "." + key] = csv::format_double(v);
    return v;
  }
  int integer(const std::string& sec, const std::string& key, int fallback) {
    int v = cfg.get_int_or(sec, key, fallback);
    used[sec + "." + key] = std::to_string(v);
    return v;
  }
};

struct RunContext {
  std::string command;
  std::string config_path;
  std::string out_dir = ".";
  int threads = 1;
  unsigned long seed = 12345;  // recorded for reproducibility bookkeeping
  Settings settings;
  std::string config_hash = hex64(fnv1a64(""));
  std::vector<std::pair<std::string, std::string>> outputs;  // path, digest

  std::string out_path(const std::string& name) const {
    return (std::filesystem::path(out_dir) / name).string();
  }
  void record_output(const std::string& path) {
    outputs.emplace_back(path, hex64(fnv1a64(read_file_bytes(path))));
  }
  void write_csv(const std::string& name, const csv::Table& t) {
    std::string path = out_path(name);
    csv::write(path, t);
    record_output(path);
  }
  void write_manifest() {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["tool_version"] = kVersion;
    j["timestamp"] = utc_timestamp();
    j["config"] = config_path.empty() ? "<none>" : config_path;
    j["config_hash"] = config_hash;
    j["threads"] = threads;
    j["seed"] = seed;
    nlohmann::ordered_json in = nlohmann::ordered_json::object();
    for (const auto& [k, v] : settings.used) in[k] = v;
    j["inputs"] = in;
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& [path, digest] : outputs)
      out.push_back({{"path", path}, {"digest", digest}});
    j["outputs"] = out;
    std::ofstream f(out_path("manifest.json"), std::ios::binary);
    if (!f) throw ConfigError("cannot write manifest in " + out_dir);
    f << j.dump(2) << '\n';
  }

  void load_config() {
    if (config_path.empty()) return;
    std::string text = read_file_bytes(config_path);
    config_hash = hex64(fnv1a64(text));
    settings.cfg = config::Config::parse_string(text, config_path);
  }
};

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

void cmd_simulate(RunContext& ctx) {
  Settings& s = ctx.settings;

  model::BiasModel bias;
  bias.kind = model::bias_from_name(s.str("model", "bias", "self-incitement"));
  bias.beta = s.num("model", "beta", 0.35);
  bias.range = s.integer("model", "range", 1);
  bias.validate();

  model::LatticeState state;
  std::string init = s.str("initial", "kind", "two-site");
  if (init == "two-site") {
    model::TwoSiteParty party;
    party.site = s.integer("initial", "site", 0);
    party.alpha = s.num("initial", "alpha", 0.5);
    party.mass = s.num("initial", "mass", 1.0);
    state = party.to_state(s.integer("initial", "pad", 12));
  } else if (init == "perturbed-uniform") {
    int window = s.integer("initial", "window", 400);
    double m = s.num("initial", "m", 1.0);
    double eps = s.num("initial", "epsilon", 1e-3);
    if (window < 8) throw ConfigError("initial.window must be >= 8");
    state.values.assign(window, m);
    state.origin_index = -window / 2;
    state.boundary = model::Boundary::Periodic;
    state.values[window / 2] += eps;  // single-site perturbation at n = 0
  } else {
    throw ConfigError("initial.kind must be two-site or perturbed-uniform");
  }

  dynamics::IntegratorConfig cfg;
  cfg.dt = s.num("integrate", "dt", 0.0);
  cfg.t_end = s.num("integrate", "t_end", 10.0);
  std::string method = s.str("integrate", "method", "rk4");
  if (method == "rk4")
    cfg.method = dynamics::Method::RK4;
  else if (method == "rk45")
    cfg.method = dynamics::Method::RK45;
  else
    throw ConfigError("integrate.method must be rk4 or rk45");
  cfg.rtol = s.num("integrate", "rtol", 1e-8);
  cfg.atol = s.num("integrate", "atol", 1e-10);
  std::string frame = s.str("integrate", "frame", "fixed");
  if (frame == "fixed")
    cfg.frame = dynamics::Frame::Fixed;
  else if (frame == "adaptive-peak")
    cfg.frame = dynamics::Frame::AdaptivePeak;
  else
    throw ConfigError("integrate.frame must be fixed or adaptive-peak");
  cfg.out_dt = s.num("integrate", "out_dt", 0.0);
  cfg.validate();

  auto rec = dynamics::integrate(state, bias, cfg);

  // snapshots.csv: long form (t, n, P)
  csv::Table snap;
  snap.header = {"t", "n", "P"};
  for (std::size_t i = 0; i < rec.times.size(); ++i) {
    const auto& st = rec.snapshots[i];
    for (long j = 0; j < st.size(); ++j)
      snap.rows.push_back({rec.times[i],
                           static_cast<double>(st.origin_index + j),
                           st.values[static_cast<std::size_t>(j)]});
  }
  ctx.write_csv("snapshots.csv", snap);

  // spacetime.csv: dense t x n grid over the union of all snapshot windows
  long lo = 0, hi = 0;
  for (const auto& st : rec.snapshots) {
    lo = std::min(lo, st.origin_index);
    hi = std::max(hi, st.origin_index + st.size());
  }
  csv::Table dense;
  dense.header.push_back("t");
  for (long n = lo; n < hi; ++n)
    dense.header.push_back("P_" + std::to_string(n));
  for (std::size_t i = 0; i < rec.times.size(); ++i) {
    std::vector<double> row;
    row.reserve(static_cast<std::size_t>(hi - lo) + 1);
    row.push_back(rec.times[i]);
    for (long n = lo; n < hi; ++n) row.push_back(rec.snapshots[i].at(n));
    dense.rows.push_back(std::move(row));
  }
  ctx.write_csv("spacetime.csv", dense);

  csv::Table diag;
  diag.header = {"t",          "mean_opinion",  "peak_pos",
                 "mass_party", "mass_trailing", "mass_leading"};
  for (std::size_t i = 0; i < rec.times.size(); ++i)
    diag.rows.push_back({rec.times[i], rec.mean_opinions[i],
                         rec.peak_positions[i], rec.mass_partitions[i].party,
                         rec.mass_partitions[i].trailing,
                         rec.mass_partitions[i].leading});
  ctx.write_csv("diagnostics.csv", diag);
}

// ---------------------------------------------------------------------------
// continue
// ---------------------------------------------------------------------------

void append_speed_rows(csv::Table& t, const tw::Branch& branch,
                       const std::string& audit_mode) {
  const double nan = std::nan("");
  for (std::size_t i = 0; i < branch.points.size(); ++i) {
    const auto& pt = branch.points[i];
    double h_err = nan, l_err = nan;
    bool do_audit = audit_mode == "all" ||
                    (audit_mode == "endpoints" &&
                     (i == 0 || i + 1 == branch.points.size()));
    if (do_audit) {
      auto audit = tw::error_audit(pt.profile);
      h_err = audit.h_error;
      l_err = audit.L_error;
    }
    t.rows.push_back({pt.beta, pt.c, pt.m_infinity, pt.profile.peak(),
                      static_cast<double>(pt.profile.grid.N),
                      pt.profile.grid.L, h_err, l_err});
  }
}

void cmd_continue(RunContext& ctx) {
  Settings& s = ctx.settings;
  double m = s.num("branch", "m", 1.0);
  double L = s.num("branch", "L", 160.0);
  int ell = s.integer("branch", "ell", 5);
  double beta_start = s.num("branch", "beta_start", 1.95);
  double dbeta0 = s.num("branch", "dbeta0", 0.01);
  std::string targets_text = s.str("branch", "targets", "1.9");
  std::string norm_name = s.str("branch", "normalization", "background-mass");
  std::string audit_mode = s.str("branch", "audit", "endpoints");
  if (audit_mode != "endpoints" && audit_mode != "all" && audit_mode != "none")
    throw ConfigError("branch.audit must be endpoints, all or none");
  tw::Normalization norm = tw::normalization_from_name(norm_name);

  std::vector<double> targets = parse_grid(targets_text);
  if (targets.empty()) throw ConfigError("branch.targets is empty");
  for (double t : targets)
    if (!(t > 0.0))
      throw DomainError("branch target beta must be > 0 (party mass diverges "
                        "as beta -> 0)");
  if (!(beta_start > 0.0 && beta_start < 2.0))
    throw DomainError("branch.beta_start must lie in (0, 2)");

  // Seed from the near-threshold asymptotics with the background pinned, then
  // hand over to the requested mass normalization (keeping the seed's mass).
  auto grid = tw::Grid::make(L, ell);
  tw::WaveProfile p = tw::newton_solve(tw::theorem1_seed(beta_start, m, grid));
  if (norm != tw::Normalization::BackgroundMass) {
    p.normalization = norm;
    double band = p.far_field();
    p.M = norm == tw::Normalization::TotalMass
              ? p.m * p.grid.L + p.q.sum() * p.grid.h
              : p.q.sum() * p.grid.h - p.grid.L * band;
    p = tw::newton_solve(p);
  }

  tw::Branch full;
  full.points.push_back({p.beta, p.c, p.m_infinity(), p});
  bool truncated = false;
  std::string truncation_msg;
  for (double target : targets) {
    try {
      auto seg = tw::continue_branch(p, target, dbeta0);
      for (std::size_t i = 1; i < seg.points.size(); ++i)
        full.points.push_back(seg.points[i]);
      for (const auto& ev : seg.history) full.history.push_back(ev);
      p = full.points.back().profile;
    } catch (const tw::BranchTruncated& e) {
      for (std::size_t i = 1; i < e.partial.points.size(); ++i)
        full.points.push_back(e.partial.points[i]);
      for (const auto& ev : e.partial.history) full.history.push_back(ev);
      truncated = true;
      truncation_msg = e.what();
      break;
    }
  }

  std::string branch_path = ctx.out_path("branch.bin");
  branch_io::write_branch(branch_path, full);
  ctx.record_output(branch_path);

  csv::Table speeds;
  speeds.header = {"beta", "c",      "m_infinity", "peak",
                   "N",    "L",      "h_error",    "L_error"};
  append_speed_rows(speeds, full, audit_mode);
  ctx.write_csv("speeds.csv", speeds);
  ctx.write_manifest();

  if (truncated)
    throw BranchEndError("branch truncated at beta=" +
                         csv::format_double(full.points.back().beta) + ": " +
                         truncation_msg);
}

// ---------------------------------------------------------------------------
// spectral
// ---------------------------------------------------------------------------

void cmd_spectral(RunContext& ctx) {
  Settings& s = ctx.settings;
  std::string mode = s.str("spectral", "m_mode", "fixed");
  std::string dir_name = s.str("spectral", "direction", "right");
  spectral::Direction dir;
  if (dir_name == "right")
    dir = spectral::Direction::Right;
  else if (dir_name == "left")
    dir = spectral::Direction::Left;
  else
    throw ConfigError("spectral.direction must be right or left");

  csv::Table t;
  if (mode == "fixed") {
    double m = s.num("spectral", "m", 1.0);
    std::vector<double> betas =
        parse_grid(s.str("spectral", "beta_grid", "0.0:1.9:20"));
    if (betas.empty()) throw ConfigError("spectral.beta_grid is empty");
    t.header = {"beta", "m", "re_sigma", "im_sigma", "v", "residual"};
    std::vector<spectral::SaddlePoint> pts(betas.size());
    parallel_chunks(betas.size(), ctx.threads,
                    [&](std::size_t lo, std::size_t hi) {
                      std::vector<double> chunk(betas.begin() + lo,
                                                betas.begin() + hi);
                      auto res = spectral::spreading_speed_sweep(chunk, m, dir);
                      for (std::size_t i = lo; i < hi; ++i) pts[i] = res[i - lo];
                    });
    for (std::size_t i = 0; i < betas.size(); ++i)
      t.rows.push_back({betas[i], m, pts[i].sigma.real(), pts[i].sigma.imag(),
                        pts[i].v, pts[i].residual});
  } else if (mode == "from-branch") {
    std::string branch_path = s.str("spectral", "branch", "branch.bin");
    auto branch = branch_io::read_branch(branch_path);
    if (branch.points.empty()) throw ConfigError("branch file has no points");
    t.header = {"beta", "m", "re_sigma", "im_sigma", "v", "residual", "c"};
    std::size_t n = branch.points.size();
    std::vector<spectral::SaddlePoint> pts(n);
    parallel_chunks(n, ctx.threads, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        const auto& bp = branch.points[i];
        // chain the seed within a chunk for robustness
        auto seed = i > lo ? pts[i - 1].sigma
                           : model::Complex(1.0471975511965976, 0.5);
        pts[i] = spectral::spreading_speed(bp.beta, bp.m_infinity, seed, dir);
      }
    });
    for (std::size_t i = 0; i < n; ++i)
      t.rows.push_back({branch.points[i].beta, branch.points[i].m_infinity,
                        pts[i].sigma.real(), pts[i].sigma.imag(), pts[i].v,
                        pts[i].residual, branch.points[i].c});
  } else {
    throw ConfigError("spectral.m_mode must be fixed or from-branch");
  }
  ctx.write_csv("spreading.csv", t);
}

// ---------------------------------------------------------------------------
// predict
// ---------------------------------------------------------------------------

void cmd_predict(RunContext& ctx) {
  Settings& s = ctx.settings;
  double m = s.num("predict", "m", 1.0);
  std::vector<double> betas =
      parse_grid(s.str("predict", "beta_grid", "0.05:1.95:39"));
  if (betas.empty()) throw ConfigError("predict.beta_grid is empty");
  csv::Table t;
  t.header = {"beta", "c_small_beta", "c_theorem1", "peak", "decay"};
  t.rows.resize(betas.size());
  parallel_chunks(betas.size(), ctx.threads,
                  [&](std::size_t lo, std::size_t hi) {
                    for (std::size_t i = lo; i < hi; ++i) {
                      double beta = betas[i];
                      auto prof = asym::theorem1_profile(beta, m);
                      t.rows[i] = {beta,
                                   asym::small_beta_speed(beta, m, true),
                                   prof.c, prof.peak, prof.decay};
                    }
                  });
  ctx.write_csv("predictions.csv", t);
}

// ---------------------------------------------------------------------------
// verify / export-branch
// ---------------------------------------------------------------------------

int cmd_verify(RunContext& ctx, const std::vector<int>& only) {
  std::ostringstream report;
  int failures = accept::run_and_print(report, only);
  std::cout << report.str();
  std::string path = ctx.out_path("verify_report.txt");
  std::ofstream f(path, std::ios::binary);
  f << report.str();
  f.close();
  ctx.record_output(path);
  ctx.write_manifest();
  return failures;
}

void cmd_export_branch(RunContext& ctx, const std::string& input,
                       const std::string& output) {
  auto branch = branch_io::read_branch(input);
  ctx.settings.used["export.input"] = input;
  std::string path = output.empty() ? ctx.out_path("branch.csv") : output;
  branch_io::write_branch_csv(path, branch);
  ctx.record_output(path);
}

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("DRIFTLAB_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"driftlab: biased bounded-confidence opinion dynamics toolkit"};
  app.require_subcommand(1);

  RunContext ctx;
  int threads_flag = 0;
  app.add_option("--config", ctx.config_path, "configuration file (INI-style)");
  app.add_option("--out-dir", ctx.out_dir, "output directory");
  app.add_option("--threads", threads_flag,
                 "worker threads for parameter sweeps (default: "
                 "DRIFTLAB_THREADS or 1)");
  app.add_option("--seed", ctx.seed, "seed recorded in the manifest");

  auto* sim = app.add_subcommand("simulate", "integrate the lattice model");
  auto* cont =
      app.add_subcommand("continue", "traveling-wave branch continuation");
  auto* spec = app.add_subcommand("spectral", "linear spreading speeds");
  auto* pred = app.add_subcommand("predict", "asymptotic prediction tables");
  auto* verify = app.add_subcommand("verify", "run the verification suite");
  std::vector<int> only;
  verify->add_option("--only", only, "criterion numbers to run");
  auto* exportb =
      app.add_subcommand("export-branch", "convert a branch file to CSV");
  std::string export_in, export_out;
  exportb->add_option("--input", export_in, "branch file (binary)")->required();
  exportb->add_option("--output", export_out, "output CSV path");

  // let --config/--out-dir/--threads/--seed appear after the subcommand too
  for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  ctx.threads = resolve_threads(threads_flag);
  try {
    std::filesystem::create_directories(ctx.out_dir);
    ctx.load_config();
    if (sim->parsed()) {
      ctx.command = "simulate";
      cmd_simulate(ctx);
      ctx.write_manifest();
    } else if (cont->parsed()) {
      ctx.command = "continue";
      cmd_continue(ctx);  // writes its own manifest (partial-branch path)
    } else if (spec->parsed()) {
      ctx.command = "spectral";
      cmd_spectral(ctx);
      ctx.write_manifest();
    } else if (pred->parsed()) {
      ctx.command = "predict";
      cmd_predict(ctx);
      ctx.write_manifest();
    } else if (verify->parsed()) {
      ctx.command = "verify";
      int failures = cmd_verify(ctx, only);
      return failures == 0 ? 0 : 1;
    } else if (exportb->parsed()) {
      ctx.command = "export-branch";
      cmd_export_branch(ctx, export_in, export_out);
      ctx.write_manifest();
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const ConvergenceError& e) {
    std::cerr << "convergence error: " << e.what() << '\n';
    return 3;
  } catch (const BranchEndError& e) {
    std::cerr << "branch end: " << e.what() << '\n';
    return 3;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return 4;
  } catch (const GridError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
