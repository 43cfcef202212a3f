#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "spincharge/cli.hpp"
#include "spincharge/config.hpp"
#include "spincharge/output.hpp"

using namespace spincharge;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("spincharge_unit_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "spincharge");
  return run(args);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// CSV body without the leading manifest comment (which carries the wall time)
std::string csv_body(const fs::path& p) {
  const std::string s = slurp(p);
  REQUIRE(s.rfind("# manifest: ", 0) == 0);
  return s.substr(s.find('\n') + 1);
}

void write_text(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("config round trip and hash") {
  RunConfig c;
  c.grid = KGrid(24, 7.5);
  c.omega = Vec3(0.1, -0.2, 0.3);
  c.integrator.snapshot_times = {0.5, 1.0};
  c.profile.kind = ProfileKind::neutral;
  c.c_list = {8, 16};
  const RunConfig back = parse(emit(c));
  CHECK(emit(back) == emit(c));
  CHECK(config_hash(back) == config_hash(c));
  CHECK(config_hash(c).size() == 16);
  RunConfig d = c;
  d.seed = 2;
  CHECK(config_hash(d) != config_hash(c));
  CHECK(parse("{}").grid == RunConfig{}.grid);
}

TEST_CASE("config rejects unknown keys, bad schema and bad values") {
  CHECK_THROWS_AS(parse(R"({"grid": {"n_per_axis": 16, "kmax": 4}})"), PreconditionError);
  CHECK_THROWS_AS(parse(R"({"colour": 1})"), PreconditionError);
  CHECK_THROWS_AS(parse(R"({"schema_version": 99})"), PreconditionError);
  CHECK_THROWS_AS(parse(R"({"grid": {"n_per_axis": 15}})"), PreconditionError);
  CHECK_THROWS_AS(parse(R"({"integrator": {"dt": -1}})"), PreconditionError);
  CHECK_THROWS_AS(parse(R"({"omega": [1, 2]})"), PreconditionError);
  CHECK_THROWS_AS(parse(R"({"init": "random"})"), PreconditionError);
  CHECK_THROWS_AS(parse("{not json"), PreconditionError);
}

TEST_CASE("CSV formatting") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(-2.0) == "-2");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(csv_quote("plain") == "plain");
  CHECK(csv_quote("a,b") == "\"a,b\"");
  CHECK(csv_quote("say \"hi\"") == "\"say \"\"hi\"\"\"");
}

TEST_CASE(".fst snapshot round trip") {
  const fs::path dir = scratch("fst");
  FieldState s = testutil::random_state(KGrid(8, 3.0), 13);
  s.time = 1.25;
  s.omega_pert = Vec3(1e-3, -2e-3, 0.5);
  write_fst((dir / "a.fst").string(), s, nlohmann::json{{"command", "test"}});
  const FieldState r = read_fst((dir / "a.fst").string());
  CHECK(r.grid == s.grid);
  CHECK(r.time == s.time);
  CHECK(r.omega_pert == s.omega_pert);
  CHECK(r.e_hat == s.e_hat);
  CHECK(r.b_hat == s.b_hat);
  // header is one JSON line, then 2 arrays x nodes x 3 components x (re, im) x 8 bytes
  const std::string raw = slurp(dir / "a.fst");
  const std::size_t nl = raw.find('\n');
  const auto h = nlohmann::json::parse(raw.substr(0, nl));
  CHECK(h.at("n_per_axis") == 8);
  CHECK(raw.size() - nl - 1 == 2 * 512 * 3 * 2 * 8);
  write_text(dir / "bad.fst", raw.substr(0, raw.size() - 8));
  CHECK_THROWS_AS(read_fst((dir / "bad.fst").string()), PreconditionError);
}

TEST_CASE("cli exit codes") {
  const fs::path dir = scratch("codes");
  CHECK(cli({"--bogus", "soliton"}) == 2);
  CHECK(cli({}) == 2);
  CHECK(cli({"evolve", "--init", "sideways", "--out", (dir / "x").string()}) == 2);
  CHECK(cli({"--omega", "1,2", "soliton"}) == 2);
  write_text(dir / "unknown.json", R"({"schema_version": 1, "gird": {}})");
  CHECK(cli({"--config", (dir / "unknown.json").string(), "soliton"}) == 2);
  write_text(dir / "schema.json", R"({"schema_version": 7})");
  CHECK(cli({"--config", (dir / "schema.json").string(), "soliton"}) == 2);
  CHECK(cli({"--config", (dir / "missing.json").string(), "soliton"}) == 2);
  CHECK(cli({"--out", (dir / "i").string(), "instability"}) == 2);  // charged default profile
  // a drift tolerance nobody can meet aborts with 3
  write_text(dir / "drift.json",
             R"({"grid": {"n_per_axis": 8, "k_max": 4}, "integrator": {"dt": 0.1, "t_end": 1, "energy_tol": 1e-19},
                 "init": "perturbation", "perturbation": {"delta": 0.1}})");
  CHECK(cli({"--config", (dir / "drift.json").string(), "--out", (dir / "d").string(), "evolve"}) == 3);
  CHECK(cli({"--out", (dir / "s").string(), "--grid", "8", "--k-max", "4", "soliton"}) == 0);
  CHECK(fs::exists(dir / "s" / "report.json"));
}

TEST_CASE("evolve --init zero writes an identically zero trajectory") {
  const fs::path dir = scratch("zero");
  REQUIRE(cli({"--out", dir.string(), "--grid", "8", "--k-max", "4", "--t-end", "0.2", "--omega", "0,0,1",
               "evolve", "--init", "zero"}) == 0);
  std::istringstream body(csv_body(dir / "trajectory.csv"));
  std::string line;
  std::getline(body, line);
  CHECK(line == "t,Omega_1,Omega_2,Omega_3,H_total,H_pert,norm_e,norm_b\r");
  int rows = 0;
  while (std::getline(body, line)) {
    ++rows;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    REQUIRE(cells.size() == 8);
    for (int i : {1, 2, 3, 5, 6, 7}) CHECK(std::stod(cells[i]) == 0.0);
  }
  CHECK(rows == 21);
  const auto rep = nlohmann::json::parse(slurp(dir / "report.json"));
  CHECK(rep.contains("manifest"));
  CHECK(rep["manifest"]["schema_version"] == 1);
}

TEST_CASE("outputs are bit-identical across worker counts") {
  const fs::path a = scratch("t1"), b = scratch("t3");
  const std::vector<std::string> common{"--grid", "16", "--k-max", "5", "--t-end", "0.3", "--seed", "4"};
  auto with = [&](const fs::path& out, const char* threads) {
    std::vector<std::string> v = common;
    v.insert(v.end(), {"--out", out.string(), "--threads", threads, "evolve", "--init", "perturbation"});
    return cli(v);
  };
  REQUIRE(with(a, "1") == 0);
  REQUIRE(with(b, "3") == 0);
  CHECK(csv_body(a / "trajectory.csv") == csv_body(b / "trajectory.csv"));
}

TEST_CASE("volterra reads an evolve snapshot") {
  const fs::path dir = scratch("snap");
  write_text(dir / "cfg.json",
             R"({"grid": {"n_per_axis": 8, "k_max": 4}, "integrator": {"dt": 0.05, "t_end": 0.1, "snapshot_times": [0]},
                 "init": "perturbation", "volterra": {"dt": 0.05, "t_end": 0.5}})");
  REQUIRE(cli({"--config", (dir / "cfg.json").string(), "--out", (dir / "e").string(), "evolve"}) == 0);
  std::vector<fs::path> snaps;
  for (const auto& entry : fs::directory_iterator(dir / "e"))
    if (entry.path().extension() == ".fst") snaps.push_back(entry.path());
  REQUIRE(snaps.size() == 1);
  CHECK(cli({"--config", (dir / "cfg.json").string(), "--out", (dir / "v").string(), "volterra", "--fields",
             snaps[0].string()}) == 0);
  CHECK(fs::exists(dir / "v" / "trajectory.csv"));
}
