// bml: command-line driver for the Boussinesq measure lab.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "bml/config.hpp"
#include "bml/error.hpp"
#include "bml/lagrangian.hpp"
#include "bml/littlewood_paley.hpp"
#include "bml/manifest.hpp"
#include "bml/parallel.hpp"
#include "bml/scenarios.hpp"
#include "bml/snapshot_io.hpp"
#include "bml/spectral_ops.hpp"
#include "bml/suites.hpp"

namespace fs = std::filesystem;
using namespace bml;

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kSuite = 3, kAbort = 4 };

struct Loaded {
  RunConfig config;
  std::string hash;
  std::string path;
};

Loaded load(const std::string& path) {
  Loaded l;
  if (path.empty()) {
    l.hash = fnv1a_hex(serialize_config(l.config));
    return l;
  }
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DomainError("cannot read config file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  l.config = parse_config(ss.str());
  l.hash = fnv1a_hex(ss.str());
  l.path = path;
  return l;
}

Manifest start_manifest(const std::string& command, const Loaded& l) {
  Manifest m;
  m.command = command;
  m.config_hash = l.hash;
  m.config_path = l.path;
  m.started = utc_timestamp();
  return m;
}

void finish(Manifest& m, const fs::path& dir) {
  m.finished = utc_timestamp();
  fs::create_directories(dir);
  write_manifest(dir / "manifest.json", m);
}

// simulate ---------------------------------------------------------------

int cmd_simulate(const Loaded& l) {
  const auto& c = l.config;
  const fs::path dir = c.output_dir;
  fs::create_directories(dir);
  auto m = start_manifest("simulate", l);

  const Grid g(c.grid_n, c.grid_L);
  RunSettings rs;
  rs.T = c.time_T;
  rs.step.dt = c.time_dt;
  rs.step.mollify_n = c.mollify_n;
  rs.sigma = c.sigma;
  rs.cadence = c.output_cadence;
  rs.output_dir = dir;
  const auto init = make_scenario(c.scenario, g);

  int code = kOk;
  try {
    const auto res = run(init, rs);
    write_diagnostics_csv(dir / "diagnostics.csv", res.rows);
    write_measure_csv(dir / "atoms_final.csv", res.final_state.atoms);
    m.artifacts.push_back({"diagnostics", "diagnostics.csv"});
    m.artifacts.push_back({"measure", "atoms_final.csv"});
    std::printf("simulate: %zu steps to t = %.6g, final support radius %.6g\n", res.steps,
                res.final_state.t, res.rows.back().support_radius);
  } catch (const NumericalAbort& e) {
    m.status = std::string("numerical abort: ") + e.what();
    std::fprintf(stderr, "bml simulate: %s\n", e.what());
    code = kAbort;
  }
  finish(m, dir);
  return code;
}

// verify -----------------------------------------------------------------

void write_verify_csv(const fs::path& path, const std::vector<SuiteResult>& results) {
  std::ostringstream os;
  os << "id,variant,lhs,rhs,ratio,grid_n\n";
  char buf[256];
  for (const auto& r : results) {
    for (const auto& row : r.rows) {
      std::snprintf(buf, sizeof buf, "%s/%s,%d,%.17g,%.17g,%.17g,%zu\n", r.name.c_str(),
                    row.id.c_str(), row.variant, row.lhs, row.rhs, row.ratio, row.grid_n);
      os << buf;
    }
  }
  write_file_atomic(path, os.str());
}

void write_margins_csv(const fs::path& path, const SuiteResult& r) {
  std::ostringstream os;
  os << "suite,metric,value,threshold,kind,passed\n";
  char buf[512];
  for (const auto& mt : r.metrics) {
    std::snprintf(buf, sizeof buf, "%s,%s,%.17g,%.17g,%s,%d\n", r.name.c_str(), mt.name.c_str(),
                  mt.value, mt.threshold, mt.upper ? "max" : "min", mt.passed ? 1 : 0);
    os << buf;
  }
  write_file_atomic(path, os.str());
}

int cmd_verify(const Loaded& l) {
  const auto& c = l.config;
  const fs::path dir = c.output_dir;
  fs::create_directories(dir);
  auto m = start_manifest("verify", l);

  std::vector<std::string> names;
  for (const auto& s : c.verify_suites) {
    if (s == "all") {
      for (const auto& d : default_suites()) names.push_back(d);
    } else {
      names.push_back(s);
    }
  }

  SuiteOptions opt;
  opt.seed = c.seed;
  opt.flip_bony_remainder = c.inject_fault == "bony_sign_flip";
  std::vector<SuiteResult> results(names.size());
  std::vector<std::string> errors(names.size());
  parallel_for(names.size(), [&](std::size_t i) {
    try {
      results[i] = run_suite(names[i], opt);
    } catch (const std::exception& e) {
      results[i].name = names[i];
      results[i].passed = false;
      errors[i] = e.what();
      results[i].notes.push_back(std::string("error: ") + e.what());
    }
  });

  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    const fs::path sub = dir / "suites" / r.name;
    fs::create_directories(sub);
    write_margins_csv(sub / "margins.csv", r);
    m.artifacts.push_back({"margins", (fs::path("suites") / r.name / "margins.csv").string()});
    std::printf("%-18s %s  (%.1f s)\n", r.name.c_str(), r.passed ? "PASS" : "FAIL", r.seconds);
    for (const auto& mt : r.metrics) {
      if (!mt.passed) {
        std::printf("    %s = %.6g (%s %.6g)\n", mt.name.c_str(), mt.value,
                    mt.upper ? "<=" : ">=", mt.threshold);
      }
    }
    if (!errors[i].empty()) std::printf("    error: %s\n", errors[i].c_str());
  }
  write_verify_csv(dir / "verify.csv", results);
  m.artifacts.push_back({"inequality_rows", "verify.csv"});
  m.suites = std::move(results);
  const bool ok = m.passed();
  m.status = ok ? "ok" : "suite failure";
  finish(m, dir);
  return ok ? kOk : kSuite;
}

// besov ------------------------------------------------------------------

int cmd_besov(const std::string& file, double s, double p, double r, bool shells) {
  BesovParams bp{s, p, r};
  bp.validate();
  const auto snap = read_snapshot(file);
  const DyadicPartition partition(snap.field.grid());
  const auto norms = shell_lp_norms(decompose(snap.field, partition), p);
  if (shells) {
    for (std::size_t i = 0; i < norms.size(); ++i) {
      std::printf("shell %d  %.17g\n", static_cast<int>(i) - 1, norms[i]);
    }
  }
  std::printf("%.17g\n", besov_from_shell_norms(norms, s, r));
  return kOk;
}

// flowmap ----------------------------------------------------------------

int cmd_flowmap(const Loaded& l, std::size_t stride, double fraction) {
  const auto& c = l.config;
  const fs::path dir = c.output_dir;
  fs::create_directories(dir);
  auto m = start_manifest("flowmap", l);

  const Grid g(c.grid_n, c.grid_L);
  auto init = make_scenario(c.scenario, g);
  auto seeds = seed_lattice(g, stride, fraction);
  const std::size_t first_atom = seeds.size();
  for (const auto& a : init.atoms.atoms()) seeds.push_back(a.position);

  RunSettings rs;
  rs.T = c.time_T;
  rs.step.dt = c.time_dt;
  rs.step.mollify_n = c.mollify_n;
  rs.sigma = c.sigma;
  rs.full_diagnostics = false;

  SpectralVelocityTimeline tl(g);
  {
    const auto v = biot_savart(init.omega);
    tl.push(init.t, v.v1, v.v2);
  }
  auto fm = identity_flow(seeds, init.t);
  auto carried = init.atoms;
  const auto mu0 = init.atoms;
  int code = kOk;
  try {
    run(init, rs, [&](const SolverState& before, const SolverState& after, const StepReport&) {
      const auto v = biot_savart(after.omega);
      tl.push(after.t, v.v1, v.v2);
      carried = transport_atoms(carried, tl, before.t, after.t, rs.step.dt);
      advance_flow(fm, tl, after.t, rs.step.dt);
      tl.drop_before(after.t);
    });
  } catch (const NumericalAbort& e) {
    m.status = std::string("numerical abort: ") + e.what();
    std::fprintf(stderr, "bml flowmap: %s\n", e.what());
    code = kAbort;
  }
  if (code == kOk) {
    write_flowmap_csv(dir / "flowmap.csv", fm);
    m.artifacts.push_back({"flowmap", "flowmap.csv"});
    const auto gb = gradient_bound_check(fm);
    std::printf("seeds %zu  max|G| %.6g  bound %.6g\n", fm.seeds.size(), gb.lhs, gb.bound);
    if (!mu0.empty()) {
      std::printf("source check discrepancy %.3g\n",
                  lagrangian_source_check(mu0, carried, fm, first_atom));
    }
  }
  finish(m, dir);
  return code;
}

// distance ---------------------------------------------------------------

int cmd_distance(const std::string& a, const std::string& b) {
  std::printf("%.12g\n", bl_distance(read_measure_csv(fs::path(a)), read_measure_csv(fs::path(b))));
  return kOk;
}

// ladder -----------------------------------------------------------------

int cmd_ladder(const Loaded& l, LadderSettings s) {
  const fs::path dir = l.config.output_dir;
  fs::create_directories(dir);
  auto m = start_manifest("ladder", l);
  int code = kOk;
  try {
    const auto rep = ladder_study(s);
    write_ladder_csv(dir, rep);
    m.artifacts.push_back({"ladder", "ladder.csv"});
    m.artifacts.push_back({"ladder_atoms", "ladder_atoms.csv"});
    for (std::size_t i = 0; i < rep.cauchy.size(); ++i) {
      std::printf("sup d(mu_%d, mu_%d) = %.6g\n", rep.runs[i].level, rep.runs[i + 1].level,
                  rep.cauchy[i]);
    }
    std::printf("equicontinuity excess %.3g\n", rep.equicontinuity_excess);
  } catch (const NumericalAbort& e) {
    m.status = std::string("numerical abort: ") + e.what();
    std::fprintf(stderr, "bml ladder: %s\n", e.what());
    code = kAbort;
  }
  finish(m, dir);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bml: Boussinesq flows with a measure-valued heat source"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;

  auto add_config = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "configuration file")->check(CLI::ExistingFile);
    sub->add_option("-o,--out", out_dir, "output directory (overrides output.dir)");
  };

  auto* simulate = app.add_subcommand("simulate", "run a scenario and write diagnostics");
  add_config(simulate);

  auto* verify = app.add_subcommand("verify", "run verification suites");
  add_config(verify);
  std::vector<std::string> suites;
  std::string fault;
  verify->add_option("--suites", suites, "suite names (overrides verify.suites)")->delimiter(',');
  verify->add_option("--inject-fault", fault, "none | bony_sign_flip");

  auto* besov = app.add_subcommand("besov", "Besov norm of a field snapshot");
  std::string snapshot;
  double bs = 0.0, bp = 2.0, br = std::numeric_limits<double>::infinity();
  bool shells = false;
  besov->add_option("snapshot", snapshot, "BMLF snapshot")->required()->check(CLI::ExistingFile);
  besov->add_option("-s", bs, "regularity");
  besov->add_option("-p", bp, "integrability");
  besov->add_option("-r", br, "summability (inf allowed)");
  besov->add_flag("--shells", shells, "also print shell L^p norms");

  auto* flowmap = app.add_subcommand("flowmap", "flow map and gradients along a simulation");
  add_config(flowmap);
  std::size_t stride = 32;
  double fraction = 0.5;
  flowmap->add_option("--stride", stride, "seed lattice stride in grid cells");
  flowmap->add_option("--fraction", fraction, "seed region |x|_inf <= fraction * L");

  auto* distance = app.add_subcommand("distance", "bounded Lipschitz distance of two measures");
  std::string ma, mb;
  distance->add_option("mu", ma, "measure CSV")->required()->check(CLI::ExistingFile);
  distance->add_option("nu", mb, "measure CSV")->required()->check(CLI::ExistingFile);

  auto* ladder = app.add_subcommand("ladder", "mollification-parameter sweep");
  add_config(ladder);
  LadderSettings ls;
  ladder->add_option("--levels", ls.levels, "mollification levels")->delimiter(',');
  ladder->add_option("--grid-n", ls.grid_n, "grid size");
  ladder->add_option("--L", ls.L, "box half-length");
  ladder->add_option("--T", ls.T, "final time");
  ladder->add_option("--dt", ls.dt, "time step");
  ladder->add_option("--cadence", ls.cadence, "steps between compared outputs");
  ladder->add_option("--scenario", ls.scenario, "scenario name");

  CLI11_PARSE(app, argc, argv);

  try {
    if (besov->parsed()) return cmd_besov(snapshot, bs, bp, br, shells);
    if (distance->parsed()) return cmd_distance(ma, mb);

    auto l = load(config_path);
    if (!out_dir.empty()) l.config.output_dir = out_dir;
    if (verify->parsed()) {
      if (verify->count("--suites")) l.config.verify_suites = suites;
      if (!fault.empty()) l.config.inject_fault = fault;
    }
    validate_config(l.config);

    if (simulate->parsed()) return cmd_simulate(l);
    if (verify->parsed()) return cmd_verify(l);
    if (flowmap->parsed()) return cmd_flowmap(l, stride, fraction);
    if (ladder->parsed()) return cmd_ladder(l, ls);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "bml: config error at %zu:%zu (%s): %s\n", e.line(), e.column(),
                 e.key().c_str(), e.what());
    return kConfig;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "bml: %s\n", e.what());
    return kConfig;
  } catch (const NumericalAbort& e) {
    std::fprintf(stderr, "bml: numerical abort: %s\n", e.what());
    return kAbort;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "bml: %s\n", e.what());
    return kFailure;
  }
  return kFailure;
}
