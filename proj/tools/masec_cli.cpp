#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "acceptance.hpp"
#include "masec/experiment.hpp"
#include "masec/scenario.hpp"
#include "masec/schemes.hpp"
#include "masec/serialize.hpp"

using namespace masec;

namespace {

struct ConfigFlags {
  std::string file;
  bool table1 = false;
  std::optional<double> region_size, si_loss_db, p_max_dl_dbm;
  std::optional<int> antennas, k_ul, k_dl, k_eve, paths, particles, swarm_iterations, ao_iterations, sca_iterations;

  void attach(CLI::App* app) {
    app->add_option("-c,--config", file, "JSON config (SystemConfig field names)")->check(CLI::ExistingFile);
    app->add_flag("--table1", table1, "start from the full-scale defaults instead of the desk config");
    app->add_option("--region-size", region_size, "moving region side A in wavelengths");
    app->add_option("--antennas", antennas, "antennas per side");
    app->add_option("--k-ul", k_ul, "UL users");
    app->add_option("--k-dl", k_dl, "DL users");
    app->add_option("--k-eve", k_eve, "eavesdroppers");
    app->add_option("--paths", paths, "propagation paths L");
    app->add_option("--si-loss-db", si_loss_db, "self-interference loss in dB");
    app->add_option("--p-max-dl-dbm", p_max_dl_dbm, "DL power budget in dBm");
    app->add_option("--particles", particles, "swarm size N");
    app->add_option("--swarm-iterations", swarm_iterations, "swarm iterations Q");
    app->add_option("--sca-iterations", sca_iterations, "SCA iterations M");
    app->add_option("--ao-iterations", ao_iterations, "AO iterations C");
  }

  SystemConfig build(const SystemConfig& fallback) const {
    SystemConfig c = table1 ? table1_config() : fallback;
    if (!file.empty()) {
      std::ifstream in(file);
      nlohmann::json doc;
      try {
        in >> doc;
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError(file + ": " + e.what());
      }
      c = config_from_json(doc, c);
    }
    if (region_size) c.region_size = *region_size * c.wavelength;
    if (antennas) c.num_tx = c.num_rx = *antennas;
    if (k_ul) c.k_ul = *k_ul;
    if (k_dl) c.k_dl = *k_dl;
    if (k_eve) c.k_eve = *k_eve;
    if (paths) c.num_paths = *paths;
    if (si_loss_db) c.si_loss = db_to_linear(*si_loss_db);
    if (p_max_dl_dbm) c.p_max_dl = dbm_to_watts(*p_max_dl_dbm);
    if (particles) c.swarm.particles = *particles;
    if (swarm_iterations) c.swarm.iterations = *swarm_iterations;
    if (sca_iterations) c.sca.max_iterations = *sca_iterations;
    if (ao_iterations) c.ao.max_iterations = *ao_iterations;
    c.validate();
    return c;
  }
};

struct ExperimentFlags {
  std::string spec_file;
  ConfigFlags config;
  std::optional<std::string> parameter, fri_kind, output;
  std::vector<double> values;
  std::vector<std::string> schemes, links;
  std::optional<int> trials, parallelism, terminal;
  std::optional<std::uint64_t> seed;
  std::optional<double> step;

  void attach(CLI::App* app, ExperimentKind kind) {
    app->add_option("--spec", spec_file, "experiment JSON (flags override it)")->check(CLI::ExistingFile);
    config.attach(app);
    app->add_option("-o,--output", output, "output directory");
    app->add_option("--seed", seed, "master seed");
    if (kind == ExperimentKind::kGainmap) {
      app->add_option("--links", links, "links among ub, bd, be")->delimiter(',');
      app->add_option("--terminal", terminal, "terminal index");
      app->add_option("--step", step, "raster step in wavelengths");
      return;
    }
    app->add_option("-p,--parameter", parameter,
                    "region_size, num_antennas, K_U, K_D, K_E, si_loss_db or fri_error");
    app->add_option("-v,--values", values, "sweep values")->delimiter(',');
    app->add_option("--fri-kind", fri_kind, "path_response, departure_angle or arrival_angle");
    app->add_option("-s,--schemes", schemes, "schemes, e.g. Proposed,FPA")->delimiter(',');
    app->add_option("-n,--trials", trials, "Monte-Carlo trials");
    app->add_option("-j,--parallelism", parallelism, "worker threads");
  }

  ExperimentSpec build(ExperimentKind kind) const {
    ExperimentSpec s;
    if (!spec_file.empty()) {
      std::ifstream in(spec_file);
      nlohmann::json doc;
      try {
        in >> doc;
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError(spec_file + ": " + e.what());
      }
      s = spec_from_json(doc);
    }
    s.kind = kind;
    s.config = config.build(s.config);
    if (parameter) s.parameter = parse_parameter(*parameter);
    if (!values.empty()) s.values = values;
    if (fri_kind) s.fri_kind = parse_fri_kind(*fri_kind);
    if (!schemes.empty()) {
      s.schemes.clear();
      for (const auto& n : schemes) s.schemes.push_back(parse_scheme(n));
    }
    if (!links.empty()) s.links = links;
    if (trials) s.trials = *trials;
    if (parallelism) s.parallelism = *parallelism;
    if (terminal) s.terminal = *terminal;
    if (seed) s.seed = *seed;
    if (step) s.step = *step;
    if (output) s.output = *output;
    s.validate();
    return s;
  }
};

void print_breakdown(const TrialResult& r, const SsrBreakdown* b) {
  std::printf("scheme %s  seed %llu  iterations %d  converged %s\n", std::string(scheme_name(r.scheme)).c_str(),
              static_cast<unsigned long long>(r.seed), r.iterations, r.converged ? "yes" : "no");
  if (b) {
    for (size_t k = 0; k < b->ul.size(); ++k)
      std::printf("  UL %zu  rate %.6f  eve %.6f  secrecy %.6f\n", k, b->ul[k].rate, b->ul[k].eve_rate,
                  b->ul[k].secrecy);
    for (size_t k = 0; k < b->dl.size(); ++k)
      std::printf("  DL %zu  rate %.6f  eve %.6f  secrecy %.6f\n", k, b->dl[k].rate, b->dl[k].eve_rate,
                  b->dl[k].secrecy);
  }
  std::printf("SSR %.6f bit/s/Hz  (UL %.6f, DL %.6f)\n", r.ssr, r.ul_ssr, r.dl_ssr);
}

void report(const ExperimentSpec& spec, const ExperimentOutcome& out) {
  for (const auto& f : out.files) std::printf("%s/%s\n", spec.output.c_str(), f.c_str());
  if (out.failures > 0) std::fprintf(stderr, "%d trial(s) failed; see manifest.json\n", out.failures);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secure full-duplex movable-antenna simulator"};
  app.require_subcommand(1);

  ConfigFlags run_cfg;
  std::string run_scheme_name = "Proposed";
  std::uint64_t run_seed = 1;
  std::optional<double> run_fri;
  std::string run_fri_kind = "path_response", run_json;
  auto* run = app.add_subcommand("run", "single trial; prints the SSR breakdown");
  run_cfg.attach(run);
  run->add_option("--scheme", run_scheme_name, "scheme name");
  run->add_option("--seed", run_seed, "scenario seed");
  run->add_option("--fri-error", run_fri, "FRI error magnitude");
  run->add_option("--fri-kind", run_fri_kind, "path_response, departure_angle or arrival_angle");
  run->add_option("--scenario-out", run_json, "write the scenario as JSON");

  ExperimentFlags sweep_f, conv_f, gain_f;
  auto* sweep = app.add_subcommand("sweep", "per-point, per-scheme SSR statistics");
  sweep_f.attach(sweep, ExperimentKind::kSweep);
  auto* conv = app.add_subcommand("convergence", "per-iteration AO, swarm and SCA traces");
  conv_f.attach(conv, ExperimentKind::kConvergence);
  auto* gain = app.add_subcommand("gainmap", "channel power gain raster over the moving region");
  gain_f.attach(gain, ExperimentKind::kGainmap);

  acceptance::SuiteOptions suite;
  auto* self = app.add_subcommand("selftest", "runs the acceptance property suite");
  self->add_option("--criteria", suite.criteria, "subset of criteria (1-10)")->delimiter(',');
  self->add_option("--seeds", suite.seeds, "seeds for the Monte-Carlo criteria");
  self->add_option("-j,--parallelism", suite.parallelism, "worker threads");
  self->add_option("--workdir", suite.workdir, "scratch directory");

  std::string manifest, replay_out;
  int replay_par = 0;
  auto* replay = app.add_subcommand("replay", "reruns an experiment from its manifest.json");
  replay->add_option("manifest", manifest, "manifest.json")->required()->check(CLI::ExistingFile);
  replay->add_option("-o,--output", replay_out, "output directory (default: the manifest's)");
  replay->add_option("-j,--parallelism", replay_par, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run) {
      const SystemConfig c = run_cfg.build(desk_config());
      const Scenario sc = build_scenario(c, run_seed);
      if (!run_json.empty()) {
        std::ofstream out(run_json);
        out << to_json(sc).dump(2) << '\n';
      }
      SchemeOptions opt;
      if (run_fri) opt.fri_error = FriError{parse_fri_kind(run_fri_kind), *run_fri};
      const SchemeRun r = run_scheme_detailed(parse_scheme(run_scheme_name), sc, opt);
      if (!r.result.ok) throw SolverError(r.result.error);
      print_breakdown(r.result, r.ao ? &r.ao->breakdown : nullptr);
    } else if (*sweep || *conv || *gain) {
      const ExperimentKind kind = *sweep  ? ExperimentKind::kSweep
                                  : *conv ? ExperimentKind::kConvergence
                                          : ExperimentKind::kGainmap;
      const ExperimentFlags& f = *sweep ? sweep_f : *conv ? conv_f : gain_f;
      const ExperimentSpec spec = f.build(kind);
      report(spec, run_experiment(spec));
    } else if (*self) {
      const auto results = acceptance::run_suite(suite, std::cout);
      for (const auto& r : results)
        if (!r.pass) return 2;
    } else if (*replay) {
      const auto out = replay_manifest(manifest, replay_out, replay_par);
      for (const auto& f : out.files) std::printf("%s\n", f.c_str());
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const DimensionError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const SolverError& e) {
    std::fprintf(stderr, "solver failure: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "solver failure: %s\n", e.what());
    return 2;
  }
  return 0;
}
