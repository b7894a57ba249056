#include "masec/serialize.hpp"

#include <charconv>
#include <ostream>

namespace masec {

namespace {

using nlohmann::json;

json cplx(cd z) { return json::array({z.real(), z.imag()}); }
cd cplx_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

json vec(const CVec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(cplx(v[i]));
  return a;
}

CVec vec_from(const json& j) {
  CVec v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = cplx_from(j[i]);
  return v;
}

json mat(const CMat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(cplx(m(r, c)));
    rows.push_back(row);
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

CMat mat_from(const json& j) {
  CMat m(j.at("rows").get<Eigen::Index>(), j.at("cols").get<Eigen::Index>());
  const auto& d = j.at("data");
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = cplx_from(d.at(r).at(c));
  return m;
}

json angles(const LinkAngles& a) { return json{{"elevation", a.elevation}, {"azimuth", a.azimuth}}; }

LinkAngles angles_from(const json& j) {
  return {j.at("elevation").get<std::vector<double>>(), j.at("azimuth").get<std::vector<double>>()};
}

json points(const std::vector<Point2>& p) {
  json a = json::array();
  for (const auto& x : p) a.push_back(json::array({x.x, x.y}));
  return a;
}

std::vector<Point2> points_from(const json& j) {
  std::vector<Point2> p;
  for (const auto& x : j) p.push_back({x.at(0).get<double>(), x.at(1).get<double>()});
  return p;
}

json rmat(const RMat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

RMat rmat_from(const json& j) {
  RMat m(j.at("rows").get<Eigen::Index>(), j.at("cols").get<Eigen::Index>());
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = j.at("data").at(r).at(c).get<double>();
  return m;
}

template <class T, class F>
json list(const std::vector<T>& v, F f) {
  json a = json::array();
  for (const auto& x : v) a.push_back(f(x));
  return a;
}

template <class T, class F>
std::vector<T> list_from(const json& j, F f) {
  std::vector<T> v;
  for (const auto& x : j) v.push_back(f(x));
  return v;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, r.ptr);
}

nlohmann::json to_json(const ChannelGains& g) {
  json j;
  j["si_tx"] = angles(g.si_tx);
  j["si_rx"] = angles(g.si_rx);
  j["si_prm"] = mat(g.si_prm);
  j["ub_angles"] = list(g.ub_angles, angles);
  j["ub_prv"] = list(g.ub_prv, vec);
  j["bd_angles"] = list(g.bd_angles, angles);
  j["bd_prv"] = list(g.bd_prv, vec);
  j["be_angles"] = list(g.be_angles, angles);
  j["be_prv"] = list(g.be_prv, vec);
  j["h_ud"] = mat(g.h_ud);
  j["h_ue"] = mat(g.h_ue);
  j["si_prm_variance"] = g.si_prm_variance;
  j["ub_variance"] = g.ub_variance;
  j["bd_variance"] = g.bd_variance;
  j["be_variance"] = g.be_variance;
  return j;
}

ChannelGains gains_from_json(const nlohmann::json& j) {
  try {
    ChannelGains g;
    g.si_tx = angles_from(j.at("si_tx"));
    g.si_rx = angles_from(j.at("si_rx"));
    g.si_prm = mat_from(j.at("si_prm"));
    g.ub_angles = list_from<LinkAngles>(j.at("ub_angles"), angles_from);
    g.ub_prv = list_from<CVec>(j.at("ub_prv"), vec_from);
    g.bd_angles = list_from<LinkAngles>(j.at("bd_angles"), angles_from);
    g.bd_prv = list_from<CVec>(j.at("bd_prv"), vec_from);
    g.be_angles = list_from<LinkAngles>(j.at("be_angles"), angles_from);
    g.be_prv = list_from<CVec>(j.at("be_prv"), vec_from);
    g.h_ud = mat_from(j.at("h_ud"));
    g.h_ue = mat_from(j.at("h_ue"));
    g.si_prm_variance = j.at("si_prm_variance").get<double>();
    g.ub_variance = j.at("ub_variance").get<std::vector<double>>();
    g.bd_variance = j.at("bd_variance").get<std::vector<double>>();
    g.be_variance = j.at("be_variance").get<std::vector<double>>();
    return g;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed channel document: ") + e.what());
  }
}

nlohmann::json to_json(const Scenario& s) {
  json j;
  j["config"] = config_to_json(s.config);
  j["seed"] = s.seed;
  j["ul_users"] = points(s.ul_users);
  j["dl_users"] = points(s.dl_users);
  j["eves"] = points(s.eves);
  j["distances"] = {{"ul", s.distances.ul},
                    {"dl", s.distances.dl},
                    {"eve", s.distances.eve},
                    {"ul_to_dl", rmat(s.distances.ul_to_dl)},
                    {"ul_to_eve", rmat(s.distances.ul_to_eve)}};
  j["gains"] = to_json(s.gains);
  return j;
}

Scenario scenario_from_json(const nlohmann::json& j) {
  try {
    Scenario s;
    s.config = config_from_json(j.at("config"));
    s.seed = j.at("seed").get<std::uint64_t>();
    s.ul_users = points_from(j.at("ul_users"));
    s.dl_users = points_from(j.at("dl_users"));
    s.eves = points_from(j.at("eves"));
    const auto& d = j.at("distances");
    s.distances.ul = d.at("ul").get<std::vector<double>>();
    s.distances.dl = d.at("dl").get<std::vector<double>>();
    s.distances.eve = d.at("eve").get<std::vector<double>>();
    s.distances.ul_to_dl = rmat_from(d.at("ul_to_dl"));
    s.distances.ul_to_eve = rmat_from(d.at("ul_to_eve"));
    s.gains = gains_from_json(j.at("gains"));
    return s;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed scenario document: ") + e.what());
  }
}

nlohmann::json to_json(const AntennaLayout& l) { return json{{"tx", points(l.tx)}, {"rx", points(l.rx)}}; }

AntennaLayout layout_from_json(const nlohmann::json& j) {
  try {
    return {points_from(j.at("tx")), points_from(j.at("rx"))};
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed layout document: ") + e.what());
  }
}

void write_ao_trace_csv(std::ostream& out, const AoResult& r) {
  out << "iteration,ssr_positions,ssr_transmit,ssr_receive,penalty,max_rank_residual\n";
  const std::string s0 = format_double(r.initial_ssr);
  out << 0 << ',' << s0 << ',' << s0 << ',' << s0 << ",0,0\n";
  for (const auto& rec : r.trace)
    out << rec.iteration << ',' << format_double(rec.ssr_positions) << ',' << format_double(rec.ssr_transmit)
        << ',' << format_double(rec.ssr_receive) << ',' << format_double(rec.penalty) << ','
        << format_double(rec.max_rank_residual) << '\n';
}

void write_swarm_trace_csv(std::ostream& out, const SwarmResult& r) {
  out << "iteration,gbest_fitness,gbest_penalty\n";
  for (size_t q = 0; q < r.fitness_trace.size(); ++q)
    out << q << ',' << format_double(r.fitness_trace[q]) << ',' << format_double(r.penalty_trace[q]) << '\n';
}

void write_sca_trace_csv(std::ostream& out, const ScaResult& r) {
  out << "iteration,F_tilde,max_rank_residual\n";
  for (size_t m = 0; m < r.objective_trace.size(); ++m)
    out << m + 1 << ',' << format_double(r.objective_trace[m]) << ','
        << format_double(m + 1 == r.objective_trace.size() ? r.max_rank_residual : 0.0) << '\n';
}

void write_trials_csv(std::ostream& out, const std::vector<TrialResult>& trials, bool header) {
  if (header) out << "trial,seed,scheme,ssr,ul_ssr,dl_ssr,iterations,converged,max_rank_residual,ok,error\n";
  for (const auto& t : trials) {
    std::string err = t.error;
    for (char& c : err)
      if (c == ',' || c == '\n' || c == '"') c = ' ';
    out << t.trial << ',' << t.seed << ',' << scheme_name(t.scheme) << ',' << format_double(t.ssr) << ','
        << format_double(t.ul_ssr) << ',' << format_double(t.dl_ssr) << ',' << t.iterations << ','
        << (t.converged ? 1 : 0) << ',' << format_double(t.max_rank_residual) << ',' << (t.ok ? 1 : 0) << ','
        << err << '\n';
  }
}

}  // namespace masec
