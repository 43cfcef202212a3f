#include "spincharge/output.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "spincharge/charge_profile.hpp"
#include "spincharge/kgrid.hpp"

namespace spincharge {

using nlohmann::json;

json make_manifest(const RunConfig& c, const std::string& command, double wall_seconds) {
  const ChargeProfile prof(c.profile);
  return json{
      {"command", command},
      {"schema_version", c.schema_version},
      {"config_hash", config_hash(c)},
      {"profile",
       {{"kind", to_string(prof.kind())},
        {"support_radius", prof.support_radius()},
        {"quadrature_points", prof.quadrature_points()},
        {"amplitude", prof.amplitude()},
        {"neutralizer", prof.neutralizer()},
        {"moment_of_inertia", prof.moment_of_inertia()}}},
      {"grid",
       {{"n_per_axis", c.grid.n}, {"k_max", c.grid.k_max}, {"dk", c.grid.dk()}, {"decay_ratio", decay_ratio(c.grid, prof)}}},
      {"tolerances",
       {{"energy_tol", c.integrator.energy_tol},
        {"drift_abort", 100.0 * c.integrator.energy_tol},
        {"volterra_iteration_tol", c.volterra.iteration_tol}}},
      {"seed", c.seed},
      {"threads", c.threads},
      {"wall_time_s", wall_seconds},
  };
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header, const json& manifest)
    : out_(path, std::ios::binary), columns_(header.size()) {
  if (!out_) throw PreconditionError("cannot write " + path);
  out_ << "# manifest: " << manifest.dump() << "\r\n";
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << csv_quote(header[i]);
  out_ << "\r\n";
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_) throw std::logic_error("CsvWriter: column count mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_double(values[i]);
  out_ << "\r\n";
}

void write_report(const std::string& path, json report, const json& manifest) {
  report["manifest"] = manifest;
  std::ofstream out(path);
  if (!out) throw PreconditionError("cannot write " + path);
  out << report.dump(2) << "\n";
}

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

void put_double(std::ostream& out, double v) {
  std::uint64_t u;
  std::memcpy(&u, &v, 8);
  if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap64(u);
  out.write(reinterpret_cast<const char*>(&u), 8);
}

double get_double(std::istream& in) {
  std::uint64_t u = 0;
  in.read(reinterpret_cast<char*>(&u), 8);
  if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap64(u);
  double v;
  std::memcpy(&v, &u, 8);
  return v;
}

}  // namespace

void write_fst(const std::string& path, const FieldState& state, const json& manifest) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PreconditionError("cannot write " + path);
  json header{{"n_per_axis", state.grid.n},
              {"k_max", state.grid.k_max},
              {"time", state.time},
              {"omega_pert", {state.omega_pert[0], state.omega_pert[1], state.omega_pert[2]}},
              {"arrays", {"e_hat", "b_hat"}},
              {"layout", "little-endian float64, per node (x_re, x_im, y_re, y_im, z_re, z_im), flat index (i n + j) n + l"}};
  if (!manifest.is_null()) header["manifest"] = manifest;
  out << header.dump() << "\n";
  for (const auto* arr : {&state.e_hat, &state.b_hat})
    for (const CVec3& v : *arr)
      for (int c = 0; c < 3; ++c) {
        put_double(out, v[c].real());
        put_double(out, v[c].imag());
      }
  if (!out) throw PreconditionError("failed writing " + path);
}

FieldState read_fst(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("cannot open snapshot " + path);
  std::string line;
  std::getline(in, line);
  json h;
  try {
    h = json::parse(line);
  } catch (const json::exception& e) {
    throw PreconditionError("snapshot " + path + ": bad header: " + e.what());
  }
  const int n = h.at("n_per_axis").get<int>();
  const double kmax = h.at("k_max").get<double>();
  if (n < 2 || n % 2 != 0 || !(kmax > 0.0)) throw PreconditionError("snapshot " + path + ": invalid grid");
  FieldState st = FieldState::zero(KGrid(n, kmax));
  st.time = h.at("time").get<double>();
  const auto& w = h.at("omega_pert");
  st.omega_pert = Vec3(w[0].get<double>(), w[1].get<double>(), w[2].get<double>());
  for (auto* arr : {&st.e_hat, &st.b_hat})
    for (CVec3& v : *arr)
      for (int c = 0; c < 3; ++c) {
        const double re = get_double(in);
        const double im = get_double(in);
        v[c] = cplx(re, im);
      }
  if (!in) throw PreconditionError("snapshot " + path + ": truncated data");
  return st;
}

}  // namespace spincharge
