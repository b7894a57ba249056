#include "masec/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "masec/ao.hpp"
#include "masec/receiver.hpp"
#include "masec/scenario.hpp"
#include "masec/serialize.hpp"

namespace masec {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

double current_value(const ExperimentSpec& s) {
  const auto& c = s.config;
  switch (s.parameter) {
    case SweepParameter::kRegionSize: return c.region_size / c.wavelength;
    case SweepParameter::kNumAntennas: return c.num_tx;
    case SweepParameter::kKUl: return c.k_ul;
    case SweepParameter::kKDl: return c.k_dl;
    case SweepParameter::kKEve: return c.k_eve;
    case SweepParameter::kSiLossDb: return linear_to_db(c.si_loss);
    case SweepParameter::kFriError: return 0.0;
  }
  return 0.0;
}

std::vector<double> points_of(const ExperimentSpec& s) {
  return s.values.empty() ? std::vector<double>{current_value(s)} : s.values;
}

SchemeOptions options_for(const ExperimentSpec& s, double value) {
  SchemeOptions o;
  if (s.parameter == SweepParameter::kFriError && value > 0.0) o.fri_error = FriError{s.fri_kind, value};
  return o;
}

// Runs fn(i) for i in [0, n) over `threads` workers.
template <class F>
void parallel_for(int n, int threads, F fn) {
  threads = std::clamp(threads, 1, std::max(n, 1));
  std::vector<std::thread> pool;
  auto worker = [&](int t) {
    for (int i = t; i < n; i += threads) fn(i);
  };
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker, t);
  worker(0);
  for (auto& th : pool) th.join();
}

std::ofstream open_csv(const fs::path& dir, const std::string& name, std::vector<std::string>& files) {
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + (dir / name).string());
  files.push_back(name);
  return out;
}

int run_sweep(const ExperimentSpec& spec, const fs::path& dir, std::vector<std::string>& files) {
  const std::string col(parameter_column(spec.parameter));
  std::ofstream sweep = open_csv(dir, "sweep.csv", files);
  std::ofstream trials = open_csv(dir, "trials.csv", files);
  sweep << col << ",scheme,mean_ssr,std_ssr,n\n";
  trials << col << ",trial,seed,scheme,ssr,ul_ssr,dl_ssr,iterations,converged,max_rank_residual,ok,error\n";
  int failures = 0;
  for (double v : points_of(spec)) {
    const SystemConfig c = apply_sweep_value(spec, v);
    const MonteCarloStats st = monte_carlo(c, spec.schemes, spec.trials, spec.parallelism, spec.seed,
                                           options_for(spec, v));
    for (const auto& s : st.schemes) {
      sweep << format_double(v) << ',' << scheme_name(s.scheme) << ',' << format_double(s.mean) << ','
            << format_double(s.std) << ',' << s.n << '\n';
      failures += s.failures;
    }
    std::ostringstream rows;
    write_trials_csv(rows, st.trials, false);
    std::istringstream in(rows.str());
    for (std::string line; std::getline(in, line);) trials << format_double(v) << ',' << line << '\n';
  }
  return failures;
}

int run_convergence(const ExperimentSpec& spec, const fs::path& dir, std::vector<std::string>& files) {
  const std::string col(parameter_column(spec.parameter));
  std::ofstream ao = open_csv(dir, "convergence_ao.csv", files);
  std::ofstream pso = open_csv(dir, "convergence_mvpso.csv", files);
  std::ofstream sca = open_csv(dir, "convergence_sca.csv", files);
  ao << col << ",trial,iteration,ssr_positions,ssr_transmit,ssr_receive,penalty,max_rank_residual\n";
  pso << col << ",trial,iteration,gbest_fitness,gbest_penalty\n";
  sca << col << ",trial,iteration,F_tilde,max_rank_residual\n";
  const SchemeId scheme = spec.schemes.front();
  int failures = 0;
  for (double v : points_of(spec)) {
    const SystemConfig c = apply_sweep_value(spec, v);
    SchemeOptions opt = options_for(spec, v);
    opt.keep_trace = true;
    std::vector<std::string> ao_rows(spec.trials), pso_rows(spec.trials), sca_rows(spec.trials);
    std::vector<int> failed(spec.trials, 0);
    parallel_for(spec.trials, spec.parallelism, [&](int t) {
      try {
        const Scenario sc = build_scenario(c, trial_seed(spec.seed, t));
        const SchemeRun run = run_scheme_detailed(scheme, sc, opt);
        const std::string prefix = format_double(v) + ',' + std::to_string(t) + ',';
        std::ostringstream a, p, s;
        if (run.ao) {
          std::ostringstream body;
          write_ao_trace_csv(body, *run.ao);
          std::istringstream in(body.str());
          std::string line;
          std::getline(in, line);
          while (std::getline(in, line)) a << prefix << line << '\n';
          if (!run.ao->swarms.empty()) {
            std::ostringstream sw;
            write_swarm_trace_csv(sw, run.ao->swarms.front());
            std::istringstream sin(sw.str());
            std::getline(sin, line);
            while (std::getline(sin, line)) p << prefix << line << '\n';
          }
        }
        // Standalone SCA from the default start at the grid layout.
        const ChannelSet ch = materialize(grid_layout(c), sc.gains, c.wavelength);
        std::vector<CVec> b;
        for (const auto& h : ch.h_ub) b.push_back(mrc_receiver(h));
        const ScaResult r = optimize_tx(ch, b, default_sca_init(ch, c), c);
        std::ostringstream sb;
        write_sca_trace_csv(sb, r);
        std::istringstream sin(sb.str());
        std::string line;
        std::getline(sin, line);
        while (std::getline(sin, line)) s << prefix << line << '\n';
        ao_rows[t] = a.str();
        pso_rows[t] = p.str();
        sca_rows[t] = s.str();
      } catch (const std::exception&) {
        failed[t] = 1;
      }
    });
    for (int t = 0; t < spec.trials; ++t) {
      ao << ao_rows[t];
      pso << pso_rows[t];
      sca << sca_rows[t];
      failures += failed[t];
    }
  }
  return failures;
}

int run_gainmap(const ExperimentSpec& spec, const fs::path& dir, std::vector<std::string>& files) {
  const SystemConfig& c = spec.config;
  const Scenario sc = build_scenario(c, trial_seed(spec.seed, 0));
  const int n = static_cast<int>(std::llround(c.region_size / spec.step)) + 1;
  const double h = c.region_size / 2.0;
  for (const auto& link : spec.links) {
    const LinkAngles* angles = nullptr;
    const CVec* prv = nullptr;
    LinkSide side = LinkSide::kTransmit;
    const int k = spec.terminal;
    if (link == "ub") {
      if (k >= sc.gains.k_ul()) throw ConfigError("gain map terminal index out of range for ub");
      angles = &sc.gains.ub_angles[k];
      prv = &sc.gains.ub_prv[k];
      side = LinkSide::kReceive;
    } else if (link == "bd") {
      if (k >= sc.gains.k_dl()) throw ConfigError("gain map terminal index out of range for bd");
      angles = &sc.gains.bd_angles[k];
      prv = &sc.gains.bd_prv[k];
    } else if (link == "be") {
      if (k >= sc.gains.k_eve()) throw ConfigError("gain map terminal index out of range for be");
      angles = &sc.gains.be_angles[k];
      prv = &sc.gains.be_prv[k];
    } else {
      throw ConfigError("unknown gain map link '" + link + "' (use ub, bd or be)");
    }
    std::ofstream out = open_csv(dir, "gainmap_" + link + ".csv", files);
    out << "x,y,gain_db\n";
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const Point2 p{-h + i * spec.step, -h + j * spec.step};
        const CVec hv = assemble_link_channel(std::span<const Point2>(&p, 1), *angles, *prv, side, c.wavelength);
        out << format_double(p.x) << ',' << format_double(p.y) << ','
            << format_double(linear_to_db(std::norm(hv[0]))) << '\n';
      }
    }
  }
  return 0;
}

}  // namespace

std::string_view fri_kind_name(FriErrorKind k) {
  switch (k) {
    case FriErrorKind::kPathResponse: return "path_response";
    case FriErrorKind::kDepartureAngle: return "departure_angle";
    case FriErrorKind::kArrivalAngle: return "arrival_angle";
  }
  return "?";
}

FriErrorKind parse_fri_kind(std::string_view s) {
  const std::string n = lower(s);
  if (n == "path_response" || n == "prm" || n == "prv") return FriErrorKind::kPathResponse;
  if (n == "departure_angle" || n == "aod") return FriErrorKind::kDepartureAngle;
  if (n == "arrival_angle" || n == "aoa") return FriErrorKind::kArrivalAngle;
  throw ConfigError("unknown FRI error kind '" + std::string(s) + "'");
}

std::string_view kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::kConvergence: return "convergence";
    case ExperimentKind::kGainmap: return "gainmap";
    case ExperimentKind::kSweep: return "sweep";
  }
  return "?";
}

ExperimentKind parse_kind(std::string_view name) {
  const std::string n = lower(name);
  for (auto k : {ExperimentKind::kConvergence, ExperimentKind::kGainmap, ExperimentKind::kSweep})
    if (kind_name(k) == n) return k;
  throw ConfigError("unknown experiment kind '" + std::string(name) + "'");
}

std::string_view parameter_name(SweepParameter p) {
  switch (p) {
    case SweepParameter::kRegionSize: return "region_size";
    case SweepParameter::kNumAntennas: return "num_antennas";
    case SweepParameter::kKUl: return "K_U";
    case SweepParameter::kKDl: return "K_D";
    case SweepParameter::kKEve: return "K_E";
    case SweepParameter::kSiLossDb: return "si_loss_db";
    case SweepParameter::kFriError: return "fri_error";
  }
  return "?";
}

SweepParameter parse_parameter(std::string_view name) {
  const std::string n = lower(name);
  for (auto p : {SweepParameter::kRegionSize, SweepParameter::kNumAntennas, SweepParameter::kKUl,
                 SweepParameter::kKDl, SweepParameter::kKEve, SweepParameter::kSiLossDb, SweepParameter::kFriError})
    if (lower(parameter_name(p)) == n) return p;
  throw ConfigError("unknown sweep parameter '" + std::string(name) + "'");
}

std::string_view parameter_column(SweepParameter p) {
  return p == SweepParameter::kRegionSize ? "A_over_lambda" : parameter_name(p);
}

void ExperimentSpec::validate() const {
  config.validate();
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (parallelism < 1) throw ConfigError("parallelism must be >= 1");
  if (schemes.empty()) throw ConfigError("at least one scheme is required");
  if (output.empty()) throw ConfigError("output directory must be set");
  if (values.size() > 1) {
    const bool up = values[1] > values[0];
    for (size_t i = 1; i < values.size(); ++i)
      if (up ? !(values[i] > values[i - 1]) : !(values[i] < values[i - 1]))
        throw ConfigError("sweep values must be strictly monotone");
  }
  if (kind == ExperimentKind::kSweep && values.empty()) throw ConfigError("a sweep needs values");
  if (kind == ExperimentKind::kGainmap) {
    if (!(step > 0.0)) throw ConfigError("gain map step must be positive");
    if (links.empty()) throw ConfigError("gain map needs at least one link");
    if (!values.empty()) throw ConfigError("gain maps do not take sweep values");
  }
  for (double v : values) apply_sweep_value(*this, v).validate();
}

SystemConfig apply_sweep_value(const ExperimentSpec& spec, double v) {
  SystemConfig c = spec.config;
  auto count = [&](double x) {
    if (x < 0 || std::floor(x) != x) throw ConfigError("count sweep values must be non-negative integers");
    return static_cast<int>(x);
  };
  switch (spec.parameter) {
    case SweepParameter::kRegionSize:
      if (!(v > 0)) throw ConfigError("region size must be positive");
      c.region_size = v * c.wavelength;
      break;
    case SweepParameter::kNumAntennas: c.num_tx = c.num_rx = count(v); break;
    case SweepParameter::kKUl: c.k_ul = count(v); break;
    case SweepParameter::kKDl: c.k_dl = count(v); break;
    case SweepParameter::kKEve: c.k_eve = count(v); break;
    case SweepParameter::kSiLossDb: c.si_loss = db_to_linear(v); break;
    case SweepParameter::kFriError:
      if (v < 0) throw ConfigError("FRI error magnitude must be non-negative");
      break;
  }
  return c;
}

nlohmann::json spec_to_json(const ExperimentSpec& s) {
  json j;
  j["kind"] = kind_name(s.kind);
  j["config"] = config_to_json(s.config);
  j["parameter"] = parameter_name(s.parameter);
  j["values"] = s.values;
  j["fri_kind"] = fri_kind_name(s.fri_kind);
  json schemes = json::array();
  for (auto id : s.schemes) schemes.push_back(scheme_name(id));
  j["schemes"] = schemes;
  j["trials"] = s.trials;
  j["seed"] = s.seed;
  j["parallelism"] = s.parallelism;
  j["output"] = s.output;
  j["links"] = s.links;
  j["terminal"] = s.terminal;
  j["step"] = s.step;
  return j;
}

ExperimentSpec spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("experiment spec must be a JSON object");
  ExperimentSpec s;
  try {
    if (j.contains("kind")) s.kind = parse_kind(j.at("kind").get<std::string>());
    if (j.contains("config")) s.config = config_from_json(j.at("config"), desk_config());
    if (j.contains("parameter")) s.parameter = parse_parameter(j.at("parameter").get<std::string>());
    if (j.contains("values")) s.values = j.at("values").get<std::vector<double>>();
    if (j.contains("fri_kind")) s.fri_kind = parse_fri_kind(j.at("fri_kind").get<std::string>());
    if (j.contains("schemes")) {
      s.schemes.clear();
      for (const auto& n : j.at("schemes")) s.schemes.push_back(parse_scheme(n.get<std::string>()));
    }
    if (j.contains("trials")) s.trials = j.at("trials").get<int>();
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("parallelism")) s.parallelism = j.at("parallelism").get<int>();
    if (j.contains("output")) s.output = j.at("output").get<std::string>();
    if (j.contains("links")) s.links = j.at("links").get<std::vector<std::string>>();
    if (j.contains("terminal")) s.terminal = j.at("terminal").get<int>();
    if (j.contains("step")) s.step = j.at("step").get<double>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed experiment spec: ") + e.what());
  }
  s.validate();
  return s;
}

ExperimentOutcome run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path dir(spec.output);
  fs::create_directories(dir);
  ExperimentOutcome out;
  switch (spec.kind) {
    case ExperimentKind::kSweep: out.failures = run_sweep(spec, dir, out.files); break;
    case ExperimentKind::kConvergence: out.failures = run_convergence(spec, dir, out.files); break;
    case ExperimentKind::kGainmap: out.failures = run_gainmap(spec, dir, out.files); break;
  }
  json m;
  m["version"] = kVersion;
  m["spec"] = spec_to_json(spec);
  m["files"] = out.files;
  m["failures"] = out.failures;
  m["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ofstream mf(dir / "manifest.json");
  if (!mf) throw ConfigError("cannot write manifest in " + dir.string());
  mf << m.dump(2) << '\n';
  return out;
}

ExperimentOutcome replay_manifest(const fs::path& manifest, const std::string& output, int parallelism) {
  std::ifstream in(manifest);
  if (!in) throw ConfigError("cannot read manifest " + manifest.string());
  json m;
  try {
    in >> m;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed manifest: ") + e.what());
  }
  if (!m.contains("spec")) throw ConfigError("manifest has no spec");
  ExperimentSpec spec = spec_from_json(m.at("spec"));
  spec.output = output.empty() ? manifest.parent_path().string() : output;
  if (spec.output.empty()) spec.output = ".";
  if (parallelism > 0) spec.parallelism = parallelism;
  return run_experiment(spec);
}

}  // namespace masec
