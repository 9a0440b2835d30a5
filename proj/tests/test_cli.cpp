#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

#include "grslab/io.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

const std::string kCli = GRSLAB_CLI_PATH;
const std::string kSchemaPath = GRSLAB_SCHEMA_PATH;

fs::path tmp_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("grslab_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run_cli(const std::string& args) {
  std::string cmd = kCli + " " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

Json read_json(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  return Json::parse(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

// Checker for the subset of JSON Schema the shipped schema uses: type, enum,
// required, properties, items, anyOf, and $ref into #/definitions.
bool validate(const Json& schema, const Json& value, const Json& root);

bool type_matches(const std::string& t, const Json& v) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "number") return v.is_number();
  if (t == "integer") return v.is_number_integer();
  if (t == "boolean") return v.is_boolean();
  if (t == "null") return v.is_null();
  return false;
}

bool validate(const Json& schema, const Json& value, const Json& root) {
  if (schema.contains("$ref")) {
    std::string ref = schema["$ref"];
    REQUIRE(ref.rfind("#/definitions/", 0) == 0);
    return validate(root["definitions"][ref.substr(14)], value, root);
  }
  if (schema.contains("type") && !type_matches(schema["type"], value)) return false;
  if (schema.contains("enum")) {
    bool hit = false;
    for (const auto& e : schema["enum"])
      if (e == value) hit = true;
    if (!hit) return false;
  }
  if (schema.contains("required")) {
    for (const auto& key : schema["required"])
      if (!value.contains(key.get<std::string>())) return false;
  }
  if (schema.contains("properties") && value.is_object()) {
    for (const auto& [key, sub] : schema["properties"].items())
      if (value.contains(key) && !validate(sub, value[key], root)) return false;
  }
  if (schema.contains("items") && value.is_array()) {
    for (const auto& item : value)
      if (!validate(schema["items"], item, root)) return false;
  }
  if (schema.contains("anyOf")) {
    for (const auto& alt : schema["anyOf"])
      if (validate(alt, value, root)) return true;
    return false;
  }
  return true;
}

void check_report_schema(const fs::path& report_path) {
  Json schema = read_json(kSchemaPath);
  Json report = read_json(report_path);
  CHECK(validate(schema, report, schema));
}

}  // namespace

TEST_CASE("exit codes follow the verdicts") {
  CHECK(run_cli("grs-check --weight polynomial:r=2") == 0);
  CHECK(run_cli("grs-check --weight subexp:c=1,s=1") == 1);  // fails both checks
  CHECK(run_cli("grs-check --weight subexp:c=2,s=0.5") == 0);
  CHECK(run_cli("grs-check") == 0);  // battery mode: verdict agreement
}

TEST_CASE("usage errors exit 2") {
  CHECK(run_cli("unknown-subcommand") == 2);
  CHECK(run_cli("grs-check --no-such-flag") == 2);
  CHECK(run_cli("") == 2);
  CHECK(run_cli("grs-check --weight gaussian:c=1") == 2);
  CHECK(run_cli("grs-check --config /nonexistent/config.ini") == 2);
  CHECK(run_cli("seq-identity --battery subexp:c=1,s=1") == 2);  // non-conforming battery
}

TEST_CASE("config files are strict and flags override them") {
  fs::path cfg = tmp_dir() / "scan.ini";
  std::ofstream(cfg) << "radius=400\ntol=0.02\n";
  fs::path out = tmp_dir() / "cfg_report.json";
  CHECK(run_cli("grs-check --weight polynomial:r=1 --config " + cfg.string() +
                " --tol 0.05 --out " + out.string()) == 0);
  Json rep = read_json(out);
  CHECK(rep["config"]["radius"] == 400.0);
  CHECK(rep["config"]["tol"] == 0.05);  // flag wins

  fs::path bad = tmp_dir() / "bad.ini";
  std::ofstream(bad) << "radius=400\nunknown_key=7\n";
  CHECK(run_cli("grs-check --config " + bad.string()) == 2);
}

TEST_CASE("reports validate against the shipped schema") {
  fs::path d = tmp_dir();
  CHECK(run_cli("grs-check --weight subexp:c=0.5,s=0.9 --out " + (d / "a.json").string()) == 0);
  check_report_schema(d / "a.json");
  CHECK(run_cli("grs-check --weight subexp:c=1,s=1 --out " + (d / "af.json").string()) == 1);
  check_report_schema(d / "af.json");
  CHECK(run_cli("seq-identity --half-width 256 --out " + (d / "b.json").string()) == 0);
  check_report_schema(d / "b.json");
  CHECK(run_cli("inverse-closedness --half-width 48 --seed 4 --out " + (d / "c.json").string()) ==
        0);
  check_report_schema(d / "c.json");
  CHECK(run_cli("modspace-identity --out " + (d / "e.json").string()) == 0);
  check_report_schema(d / "e.json");
  CHECK(run_cli("gs-probe --hermite 0 --s 0.5 --out " + (d / "f.json").string()) == 0);
  check_report_schema(d / "f.json");
}

TEST_CASE("identical configs reproduce byte-identical reports") {
  fs::path d = tmp_dir();
  auto canonical = [&](const fs::path& p) {
    Json rep = read_json(p);
    CHECK(rep.contains("metadata"));
    CHECK(rep["metadata"].contains("timestamp"));
    rep.erase("metadata");  // timestamps live only here
    return rep.dump();
  };

  CHECK(run_cli("inverse-closedness --half-width 48 --seed 11 --out " +
                (d / "d1.json").string()) == 0);
  CHECK(run_cli("inverse-closedness --half-width 48 --seed 11 --out " +
                (d / "d2.json").string()) == 0);
  CHECK(canonical(d / "d1.json") == canonical(d / "d2.json"));

  CHECK(run_cli("grs-check --out " + (d / "g1.json").string()) == 0);
  CHECK(run_cli("grs-check --out " + (d / "g2.json").string()) == 0);
  CHECK(canonical(d / "g1.json") == canonical(d / "g2.json"));

  CHECK(run_cli("modspace-identity --out " + (d / "m1.json").string()) == 0);
  CHECK(run_cli("modspace-identity --out " + (d / "m2.json").string()) == 0);
  CHECK(canonical(d / "m1.json") == canonical(d / "m2.json"));

  // A different seed must change the generated instance.
  CHECK(run_cli("inverse-closedness --half-width 48 --seed 12 --out " +
                (d / "d3.json").string()) == 0);
  CHECK(canonical(d / "d1.json") != canonical(d / "d3.json"));
}

TEST_CASE("csv report format") {
  fs::path out = tmp_dir() / "battery.csv";
  CHECK(run_cli("grs-check --format csv --out " + out.string()) == 0);
  std::string csv = slurp(out);
  CHECK(csv.rfind("weight_id,via_limit,via_subexp,agree", 0) == 0);
  CHECK(csv.find("subexp:c=1,s=1,fail,fail,true") != std::string::npos);
  CHECK(csv.find("polynomial:r=5,pass,pass,true") != std::string::npos);
}

TEST_CASE("stft-dump writes the grid and its sidecar") {
  fs::path csv = tmp_dir() / "stft.csv";
  fs::path side = tmp_dir() / "stft.json";
  CHECK(run_cli("stft-dump --r-x 4 --r-xi 4 --out " + csv.string() + " --sidecar " +
                side.string()) == 0);
  Json sidecar = read_json(side);
  CHECK(sidecar["spacing_x"] == 0.25);
  CHECK(sidecar["extent_x"] == 4.0);
  CHECK(sidecar["window_id"] == "gauss_unit");
  std::string header = slurp(csv).substr(0, 11);
  CHECK(header == "x,xi,re,im\n");
}

TEST_CASE("csv loaders round-trip the external formats") {
  fs::path d = tmp_dir();

  fs::path wpath = d / "weight.csv";
  {
    std::ofstream f(wpath);
    f.precision(17);
    f << "x_1,value\n";
    for (int i = -4; i <= 4; ++i) f << 0.5 * i << "," << std::exp(0.25 * i * i) << "\n";
  }
  grslab::Weight w = grslab::io::load_weight_csv(wpath.string());
  CHECK(w.dim() == 1);
  CHECK(w.eval1(1.0) == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
  CHECK_THROWS(w.eval1(3.0));

  fs::path spath = d / "seq.csv";
  {
    std::ofstream f(spath);
    f << "k_1,value\n";
    for (int k = -3; k <= 3; ++k) f << k << "," << 1.0 / (1 + k * k) << "\n";
  }
  auto seq = grslab::io::load_seq_csv(spath.string());
  CHECK(seq.half_width() == 3);
  CHECK(seq.at(-2) == doctest::Approx(0.2));

  fs::path mpath = d / "mat.csv";
  {
    std::ofstream f(mpath);
    f << "j,k,value\n";
    for (int j = -2; j <= 2; ++j) f << j << "," << j << ",1\n";
    f << "0,1,0.5\n";
  }
  auto mat = grslab::io::load_matrix_csv(mpath.string());
  CHECK(mat.half_width() == 2);
  CHECK(mat.at(0, 1) == 0.5);
  CHECK(mat.at(1, 1) == 1.0);
  CHECK(mat.at(1, 0) == 0.0);

  fs::path gpath = d / "sig.csv";
  {
    std::ofstream f(gpath);
    f << "x,re,im\n";
    for (int i = -8; i <= 8; ++i) f << 0.25 * i << "," << std::exp(-0.03 * i * i) << ",0\n";
  }
  auto sig = grslab::io::load_signal_csv(gpath.string());
  CHECK(sig.extent == doctest::Approx(2.0));
  CHECK(sig.spacing == doctest::Approx(0.25));
  CHECK(sig.samples[8].real() == doctest::Approx(1.0));

  // Missing grid points are rejected, not filled.
  fs::path holes = d / "holes.csv";
  {
    std::ofstream f(holes);
    f << "k_1,value\n-2,1\n0,1\n1,1\n2,1\n";
  }
  CHECK_THROWS(grslab::io::load_seq_csv(holes.string()));
}
