#include "masec/config.hpp"

#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

namespace masec {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("invalid config: " + what);
}

// Reads `key`, `key_db` or `key_dbm` (whichever is present) into `out`.
void read_level(const nlohmann::json& doc, const std::string& key, double& out, bool is_power) {
  if (doc.contains(key)) out = doc.at(key).get<double>();
  if (!is_power && doc.contains(key + "_db")) out = db_to_linear(doc.at(key + "_db").get<double>());
  if (is_power && doc.contains(key + "_dbm")) out = dbm_to_watts(doc.at(key + "_dbm").get<double>());
}

template <typename T>
void read(const nlohmann::json& doc, const char* key, T& out) {
  if (doc.contains(key)) out = doc.at(key).get<T>();
}

}  // namespace

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double linear_to_db(double x) { return 10.0 * std::log10(x); }

void SystemConfig::validate() const {
  require(wavelength > 0, "wavelength must be positive");
  require(region_size > 0, "region_size must be positive");
  require(min_distance > 0 && min_distance < region_size, "need 0 < min_distance < region_size");
  require(num_tx >= 1 && num_rx >= 1, "antenna counts must be >= 1");
  require(num_paths >= 1, "num_paths must be >= 1");
  require(si_loss >= 0 && si_loss < 1, "si_loss must lie in [0, 1)");
  require(ref_path_loss > 0, "ref_path_loss must be positive");
  require(path_loss_exp > 0, "path_loss_exp must be positive");
  require(cell_radius > 0, "cell_radius must be positive");
  require(noise_ul > 0 && noise_dl > 0 && noise_eve > 0, "noise powers must be positive");
  require(p_max_dl > 0 && p_max_ul > 0, "power budgets must be positive");
  require(k_ul >= 0 && k_dl >= 0 && k_eve >= 0, "terminal counts must be >= 0");
  require(k_ul + k_dl >= 1, "need at least one legitimate user");
  require(swarm.particles >= 1 && swarm.iterations >= 1, "swarm needs N >= 1 and Q >= 1");
  require(swarm.components() >= 1, "need at least one velocity component");
  require(swarm.candidates() >= 1, "need at least one candidate velocity");
  for (const auto& c : swarm.combination_weights) {
    require(static_cast<int>(c.size()) == swarm.components(),
            "each combination weight vector needs one entry per velocity component");
  }
  require(swarm.tau_t > 0 && swarm.tau_r > 0, "penalty factors must be positive");
  require(swarm.threads >= 1, "swarm.threads must be >= 1");
  require(sca.max_iterations >= 1 && sca.tolerance > 0, "invalid SCA limits");
  require(sca.inner_max_iterations >= 1 && sca.inner_tolerance > 0, "invalid inner solver limits");
  require(ao.max_iterations >= 1 && ao.tolerance > 0, "invalid AO limits");
}

SystemConfig table1_config() { return SystemConfig{}; }

SystemConfig desk_config() {
  SystemConfig c;
  c.num_tx = c.num_rx = 4;
  c.k_ul = c.k_dl = c.k_eve = 2;
  c.swarm.particles = 50;
  c.swarm.iterations = 50;
  c.sca.max_iterations = 30;
  c.ao.max_iterations = 30;
  return c;
}

SystemConfig config_from_json(const nlohmann::json& doc, const SystemConfig& base) {
  if (!doc.is_object()) throw ConfigError("config document must be a JSON object");
  SystemConfig c = base;
  try {
    read(doc, "wavelength", c.wavelength);
    read(doc, "region_size", c.region_size);
    read(doc, "min_distance", c.min_distance);
    if (doc.contains("num_antennas")) c.num_tx = c.num_rx = doc.at("num_antennas").get<int>();
    read(doc, "num_tx", c.num_tx);
    read(doc, "num_rx", c.num_rx);
    read(doc, "num_paths", c.num_paths);
    read_level(doc, "si_loss", c.si_loss, false);
    read_level(doc, "ref_path_loss", c.ref_path_loss, false);
    read(doc, "path_loss_exp", c.path_loss_exp);
    read(doc, "cell_radius", c.cell_radius);
    read_level(doc, "noise_ul", c.noise_ul, true);
    read_level(doc, "noise_dl", c.noise_dl, true);
    read_level(doc, "noise_eve", c.noise_eve, true);
    read_level(doc, "p_max_dl", c.p_max_dl, true);
    read_level(doc, "p_max_ul", c.p_max_ul, true);
    read(doc, "k_ul", c.k_ul);
    read(doc, "k_dl", c.k_dl);
    read(doc, "k_eve", c.k_eve);
    read(doc, "seed", c.seed);
    if (doc.contains("swarm")) {
      const auto& s = doc.at("swarm");
      read(s, "particles", c.swarm.particles);
      read(s, "iterations", c.swarm.iterations);
      read(s, "component_inertia", c.swarm.component_inertia);
      read(s, "combination_weights", c.swarm.combination_weights);
      read(s, "c1", c.swarm.c1);
      read(s, "c2", c.swarm.c2);
      read(s, "tau_t", c.swarm.tau_t);
      read(s, "tau_r", c.swarm.tau_r);
      read(s, "omega_max", c.swarm.omega_max);
      read(s, "omega_min", c.swarm.omega_min);
      read(s, "random_initial_velocity", c.swarm.random_initial_velocity);
      read(s, "parallel_update", c.swarm.parallel_update);
      read(s, "threads", c.swarm.threads);
    }
    if (doc.contains("sca")) {
      const auto& s = doc.at("sca");
      read(s, "max_iterations", c.sca.max_iterations);
      read(s, "tolerance", c.sca.tolerance);
      read(s, "inner_max_iterations", c.sca.inner_max_iterations);
      read(s, "inner_tolerance", c.sca.inner_tolerance);
      read(s, "rank_tolerance", c.sca.rank_tolerance);
    }
    if (doc.contains("ao")) {
      const auto& s = doc.at("ao");
      read(s, "max_iterations", c.ao.max_iterations);
      read(s, "tolerance", c.ao.tolerance);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::json config_to_json(const SystemConfig& c) {
  nlohmann::json doc;
  doc["wavelength"] = c.wavelength;
  doc["region_size"] = c.region_size;
  doc["min_distance"] = c.min_distance;
  doc["num_tx"] = c.num_tx;
  doc["num_rx"] = c.num_rx;
  doc["num_paths"] = c.num_paths;
  doc["si_loss"] = c.si_loss;
  doc["ref_path_loss"] = c.ref_path_loss;
  doc["path_loss_exp"] = c.path_loss_exp;
  doc["cell_radius"] = c.cell_radius;
  doc["noise_ul"] = c.noise_ul;
  doc["noise_dl"] = c.noise_dl;
  doc["noise_eve"] = c.noise_eve;
  doc["p_max_dl"] = c.p_max_dl;
  doc["p_max_ul"] = c.p_max_ul;
  doc["k_ul"] = c.k_ul;
  doc["k_dl"] = c.k_dl;
  doc["k_eve"] = c.k_eve;
  doc["seed"] = c.seed;
  doc["swarm"] = {
      {"particles", c.swarm.particles},
      {"iterations", c.swarm.iterations},
      {"component_inertia", c.swarm.component_inertia},
      {"combination_weights", c.swarm.combination_weights},
      {"c1", c.swarm.c1},
      {"c2", c.swarm.c2},
      {"tau_t", c.swarm.tau_t},
      {"tau_r", c.swarm.tau_r},
      {"omega_max", c.swarm.omega_max},
      {"omega_min", c.swarm.omega_min},
      {"random_initial_velocity", c.swarm.random_initial_velocity},
      {"parallel_update", c.swarm.parallel_update},
      {"threads", c.swarm.threads},
  };
  doc["sca"] = {
      {"max_iterations", c.sca.max_iterations},
      {"tolerance", c.sca.tolerance},
      {"inner_max_iterations", c.sca.inner_max_iterations},
      {"inner_tolerance", c.sca.inner_tolerance},
      {"rank_tolerance", c.sca.rank_tolerance},
  };
  doc["ao"] = {{"max_iterations", c.ao.max_iterations}, {"tolerance", c.ao.tolerance}};
  return doc;
}

}  // namespace masec
