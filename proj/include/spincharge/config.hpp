#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "spincharge/charge_profile.hpp"
#include "spincharge/dynamics.hpp"
#include "spincharge/experiments.hpp"
#include "spincharge/kgrid.hpp"
#include "spincharge/volterra.hpp"

namespace spincharge {

inline constexpr int config_schema_version = 1;

struct RunConfig {
  int schema_version = config_schema_version;
  ProfileSpec profile;
  KGrid grid{32, 8.0};
  IntegratorSpec integrator;
  Vec3 omega = Vec3(0.0, 0.0, 1.0);

  // evolve: "zero", "perturbation" (generator below) or "soliton" (absolute run from the exact soliton)
  std::string init = "zero";
  PerturbationSpec perturbation;
  double delta = 1e-3;

  VolterraSpec volterra;
  std::string volterra_fields;  // .fst path; empty means zero fields
  Vec3 volterra_omega0 = Vec3(1e-3, 0.0, 0.0);

  std::vector<double> stability_deltas{0.1, 0.05, 0.025};

  double epsilon = 0.0;  // 0: I omega_1^2 / 4
  std::vector<double> c_list{8, 16, 32, 64, 128, 256, 512, 1024, 2048};

  std::string out_dir = "out";
  std::uint64_t seed = 1;
  int threads = 1;
};

nlohmann::json to_json(const RunConfig& c);
// Unknown keys, wrong types, a schema mismatch or non-positive physical parameters
// raise PreconditionError. Missing keys keep their defaults.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
void validate(const RunConfig& c);

// Canonical serialisation; parse(emit(c)) emits the same text again.
std::string emit(const RunConfig& c);
RunConfig parse(const std::string& text);

// FNV-1a 64-bit hash of the canonical serialisation, as 16 hex digits.
std::string config_hash(const RunConfig& c);

}  // namespace spincharge
