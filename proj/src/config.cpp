#include "spincharge/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace spincharge {

using nlohmann::json;

namespace {

json vec(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

Vec3 to_vec(const json& j, const char* key) {
  if (!j.is_array() || j.size() != 3) throw PreconditionError(std::string("config: ") + key + " must be a 3-vector");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw PreconditionError("config: " + where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) throw PreconditionError("config: unknown key '" + it.key() + "' in " + where);
}

template <class T>
void get(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

json to_json(const RunConfig& c) {
  const IntegratorSpec& it = c.integrator;
  const PerturbationSpec& p = c.perturbation;
  return json{
      {"schema_version", c.schema_version},
      {"profile",
       {{"kind", to_string(c.profile.kind)},
        {"support_radius", c.profile.support_radius},
        {"quadrature_points", c.profile.quadrature_points}}},
      {"grid", {{"n_per_axis", c.grid.n}, {"k_max", c.grid.k_max}}},
      {"integrator",
       {{"dt", it.dt},
        {"t_end", it.t_end},
        {"projection_every", it.projection_every},
        {"corrector_sweeps", it.corrector_sweeps},
        {"energy_tol", it.energy_tol},
        {"record_every", it.record_every},
        {"snapshot_times", it.snapshot_times}}},
      {"omega", vec(c.omega)},
      {"init", c.init},
      {"perturbation",
       {{"R", p.R},
        {"bump_radius", p.bump_radius},
        {"pairs", p.pairs},
        {"omega_fraction", p.omega_fraction},
        {"fields", p.fields},
        {"delta", c.delta}}},
      {"volterra",
       {{"dt", c.volterra.dt},
        {"t_end", c.volterra.t_end},
        {"max_iterations", c.volterra.max_iterations},
        {"iteration_tol", c.volterra.iteration_tol},
        {"fields", c.volterra_fields},
        {"omega0", vec(c.volterra_omega0)}}},
      {"stability", {{"deltas", c.stability_deltas}}},
      {"instability", {{"epsilon", c.epsilon}, {"c_list", c.c_list}}},
      {"out_dir", c.out_dir},
      {"seed", c.seed},
      {"threads", c.threads},
  };
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  try {
    reject_unknown(j,
                   {"schema_version", "profile", "grid", "integrator", "omega", "init", "perturbation", "volterra",
                    "stability", "instability", "out_dir", "seed", "threads"},
                   "config");
    get(j, "schema_version", c.schema_version);
    if (c.schema_version != config_schema_version)
      throw PreconditionError("config: schema_version " + std::to_string(c.schema_version) + " is not supported (expected " +
                              std::to_string(config_schema_version) + ")");
    if (j.contains("profile")) {
      const json& p = j["profile"];
      reject_unknown(p, {"kind", "support_radius", "quadrature_points"}, "profile");
      if (p.contains("kind")) c.profile.kind = profile_kind_from_string(p["kind"].get<std::string>());
      get(p, "support_radius", c.profile.support_radius);
      get(p, "quadrature_points", c.profile.quadrature_points);
    }
    if (j.contains("grid")) {
      const json& g = j["grid"];
      reject_unknown(g, {"n_per_axis", "k_max"}, "grid");
      get(g, "n_per_axis", c.grid.n);
      get(g, "k_max", c.grid.k_max);
    }
    if (j.contains("integrator")) {
      const json& g = j["integrator"];
      reject_unknown(g,
                     {"dt", "t_end", "projection_every", "corrector_sweeps", "energy_tol", "record_every",
                      "snapshot_times"},
                     "integrator");
      IntegratorSpec& it = c.integrator;
      get(g, "dt", it.dt);
      get(g, "t_end", it.t_end);
      get(g, "projection_every", it.projection_every);
      get(g, "corrector_sweeps", it.corrector_sweeps);
      get(g, "energy_tol", it.energy_tol);
      get(g, "record_every", it.record_every);
      get(g, "snapshot_times", it.snapshot_times);
    }
    if (j.contains("omega")) c.omega = to_vec(j["omega"], "omega");
    get(j, "init", c.init);
    if (j.contains("perturbation")) {
      const json& g = j["perturbation"];
      reject_unknown(g, {"R", "bump_radius", "pairs", "omega_fraction", "fields", "delta"}, "perturbation");
      get(g, "R", c.perturbation.R);
      get(g, "bump_radius", c.perturbation.bump_radius);
      get(g, "pairs", c.perturbation.pairs);
      get(g, "omega_fraction", c.perturbation.omega_fraction);
      get(g, "fields", c.perturbation.fields);
      get(g, "delta", c.delta);
    }
    if (j.contains("volterra")) {
      const json& g = j["volterra"];
      reject_unknown(g, {"dt", "t_end", "max_iterations", "iteration_tol", "fields", "omega0"}, "volterra");
      get(g, "dt", c.volterra.dt);
      get(g, "t_end", c.volterra.t_end);
      get(g, "max_iterations", c.volterra.max_iterations);
      get(g, "iteration_tol", c.volterra.iteration_tol);
      get(g, "fields", c.volterra_fields);
      if (g.contains("omega0")) c.volterra_omega0 = to_vec(g["omega0"], "volterra.omega0");
    }
    if (j.contains("stability")) {
      reject_unknown(j["stability"], {"deltas"}, "stability");
      get(j["stability"], "deltas", c.stability_deltas);
    }
    if (j.contains("instability")) {
      reject_unknown(j["instability"], {"epsilon", "c_list"}, "instability");
      get(j["instability"], "epsilon", c.epsilon);
      get(j["instability"], "c_list", c.c_list);
    }
    get(j, "out_dir", c.out_dir);
    get(j, "seed", c.seed);
    get(j, "threads", c.threads);
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw PreconditionError(e.what());
  }
  c.perturbation.seed = c.seed;
  validate(c);
  return c;
}

void validate(const RunConfig& c) {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw PreconditionError(std::string("config: ") + what + " must be positive");
  };
  positive(c.profile.support_radius, "profile.support_radius");
  if (c.profile.quadrature_points < 16) throw PreconditionError("config: profile.quadrature_points must be >= 16");
  if (c.grid.n < 2 || c.grid.n % 2 != 0) throw PreconditionError("config: grid.n_per_axis must be even and >= 2");
  positive(c.grid.k_max, "grid.k_max");
  positive(c.integrator.dt, "integrator.dt");
  positive(c.integrator.t_end, "integrator.t_end");
  positive(c.integrator.energy_tol, "integrator.energy_tol");
  if (c.integrator.projection_every < 1 || c.integrator.corrector_sweeps < 1 || c.integrator.record_every < 1)
    throw PreconditionError("config: projection_every, corrector_sweeps and record_every must be >= 1");
  positive(c.volterra.dt, "volterra.dt");
  positive(c.volterra.t_end, "volterra.t_end");
  positive(c.delta, "perturbation.delta");
  positive(c.perturbation.R, "perturbation.R");
  positive(c.perturbation.bump_radius, "perturbation.bump_radius");
  if (c.init != "zero" && c.init != "perturbation" && c.init != "soliton")
    throw PreconditionError("config: init must be zero, perturbation or soliton");
  for (double d : c.stability_deltas) positive(d, "stability.deltas entries");
  for (double v : c.c_list) positive(v, "instability.c_list entries");
  if (c.epsilon < 0.0) throw PreconditionError("config: instability.epsilon must be >= 0");
  if (c.threads < 1) throw PreconditionError("config: threads must be >= 1");
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string emit(const RunConfig& c) { return to_json(c).dump(2); }

RunConfig parse(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("config: invalid JSON: ") + e.what());
  }
  return config_from_json(j);
}

std::string config_hash(const RunConfig& c) {
  const std::string s = to_json(c).dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace spincharge
