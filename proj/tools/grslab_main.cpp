#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "grslab/io.hpp"
#include "grslab/matalg.hpp"
#include "grslab/seqspace.hpp"
#include "grslab/tfa.hpp"
#include "grslab/weightlab.hpp"

namespace {

using grslab::io::Json;
using grslab::Verdict;

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

struct Output {
  std::string path;     // empty = stdout
  std::string format;   // json or csv
};

void emit(const Output& out, const std::string& command, const Json& config,
          const Json& results, bool pass, const std::vector<std::string>& csv_lines) {
  std::string payload;
  if (out.format == "csv") {
    for (const auto& line : csv_lines) payload += line + "\n";
  } else {
    Json report;
    report["command"] = command;
    report["config"] = config;
    report["metadata"] = {{"timestamp", utc_timestamp()}};
    report["results"] = results;
    report["pass"] = pass;
    payload = report.dump(2) + "\n";
  }
  if (out.path.empty()) {
    std::cout << payload;
  } else {
    std::ofstream f(out.path);
    if (!f) throw std::runtime_error("cannot write report to " + out.path);
    f << payload;
  }
}

std::string verdict_str(Verdict v) { return grslab::to_string(v); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "grslab - weighted sequence spaces, inverse-closed matrix algebras and "
      "time-frequency membership probes"};
  app.require_subcommand(1);
  app.fallthrough();  // common flags may follow the subcommand
  app.set_config("--config", "", "config file with key=value lines; flags override");
  app.allow_config_extras(false);
  app.footer(
      "Weight literals: constant | polynomial:r=2 | subexp:c=0.5,s=0.9 |\n"
      "product:<w>*<w> | tabulated:<csv path>; add dim=2 for weights on R^2.\n"
      "GRSLAB_THREADS caps internal parallelism.");

  Output out{"", "json"};
  app.add_option("--out", out.path, "report file (default: stdout)");
  app.add_option("--format", out.format, "report format")
      ->check(CLI::IsMember({"json", "csv"}));

  std::uint64_t seed = 1;
  double tol = 0.01, radius = 1000.0, step = 0.5;
  int ell_max = 10000, windows = 8;
  double p = 1.0, q = 1.0;
  std::vector<double> eps_list;
  app.add_option("--seed", seed, "seed for generated instances");
  app.add_option("--tol", tol, "closeness-to-1 tolerance for limit checks");
  app.add_option("--radius", radius, "scan radius");
  app.add_option("--step", step, "scan grid step");
  app.add_option("--ell-max", ell_max, "samples of the limit sequence");
  app.add_option("--windows", windows, "nested windows for tail probes");
  app.add_option("--p", p, "integrability exponent p (inf accepted)");
  app.add_option("--q", q, "integrability exponent q (inf accepted)");
  app.add_option("--eps", eps_list, "epsilon values for growth comparisons");

  // grs-check
  auto* grs = app.add_subcommand("grs-check",
                                 "run both growth characterizations on a weight or the "
                                 "built-in battery");
  std::string weight_literal;
  grs->add_option("--weight", weight_literal,
                  "weight literal (omit to run the 14-weight battery)");

  // seq-identity
  auto* seq = app.add_subcommand(
      "seq-identity", "probe the union/intersection identity on the shipped sequences");
  int seq_half_width = 512;
  std::vector<std::string> seq_battery;
  seq->add_option("--half-width", seq_half_width, "lattice section half-width");
  seq->add_option("--battery", seq_battery, "weight literals replacing the default battery");

  // inverse-closedness
  auto* invc = app.add_subcommand("inverse-closedness",
                                  "invert a generated decay matrix and compare rates");
  std::string kind = "diag_dominant";
  int half_width = 128;
  double rate_c = 1.0, rate_s = 1.0;
  invc->add_option("--kind", kind, "instance kind")
      ->check(CLI::IsMember({"toeplitz", "random_sign", "diag_dominant"}));
  invc->add_option("--half-width", half_width, "matrix section half-width N");
  invc->add_option("--c", rate_c, "off-diagonal decay rate");
  invc->add_option("--s", rate_s, "off-diagonal decay exponent");

  // modspace-identity
  auto* mods = app.add_subcommand(
      "modspace-identity", "probe modulation-space membership on the shipped functions");
  double signal_extent = 12.0, signal_spacing = 0.05;
  mods->add_option("--signal-extent", signal_extent, "sample extent of the test functions");
  mods->add_option("--signal-spacing", signal_spacing, "sample spacing of the test functions");

  // gs-probe
  auto* gsp = app.add_subcommand("gs-probe", "decay-class membership of a Hermite expansion");
  int hermite_index = 0;
  std::vector<double> gs_coeffs, h_grid;
  double gs_s = 1.0;
  gsp->add_option("--hermite", hermite_index, "probe the m-th Hermite function");
  gsp->add_option("--coeffs", gs_coeffs, "explicit Hermite coefficients (overrides --hermite)");
  gsp->add_option("--s", gs_s, "regularity index s");
  gsp->add_option("--h-grid", h_grid, "increasing h grid");

  // stft-dump
  auto* dump = app.add_subcommand("stft-dump", "write an STFT grid as CSV plus JSON sidecar");
  std::string signal_path, window_name = "gauss_unit", sidecar_path = "stft_sidecar.json";
  double dump_hx = 0.25, dump_hxi = 0.25, dump_rx = 8.0, dump_rxi = 8.0;
  dump->add_option("--signal", signal_path, "signal CSV (default: unit gaussian)");
  dump->add_option("--window", window_name, "analysis window")
      ->check(CLI::IsMember({"gauss_unit", "gauss_width2"}));
  dump->add_option("--h-x", dump_hx, "stft x spacing");
  dump->add_option("--h-xi", dump_hxi, "stft xi spacing");
  dump->add_option("--r-x", dump_rx, "stft x extent");
  dump->add_option("--r-xi", dump_rxi, "stft xi extent");
  dump->add_option("--sidecar", sidecar_path, "sidecar JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    Json config;
    config["seed"] = seed;
    config["tol"] = tol;
    config["radius"] = radius;
    config["step"] = step;
    config["ell_max"] = ell_max;
    config["windows"] = windows;
    config["p"] = std::isinf(p) ? Json("inf") : Json(p);
    config["q"] = std::isinf(q) ? Json("inf") : Json(q);

    namespace wl = grslab::weightlab;
    wl::ScanParams scan;
    scan.radius = radius;
    scan.step = step;
    scan.tol = tol;
    scan.ell_max = ell_max;
    if (!eps_list.empty()) scan.eps_list = eps_list;
    config["eps"] = scan.eps_list;

    if (grs->parsed()) {
      bool single = !weight_literal.empty();
      std::vector<grslab::Weight> weights;
      if (single)
        weights.push_back(grslab::io::load_weight(weight_literal));
      else
        weights = wl::builtin_battery();
      config["weight"] = single ? Json(weight_literal) : Json("builtin battery");

      Json rows = Json::array();
      std::vector<std::string> csv{"weight_id,via_limit,via_subexp,agree"};
      bool pass = true;
      for (const auto& w : weights) {
        auto lim = wl::check_grs_via_limit(w, scan);
        auto sub = wl::check_grs_via_subexp(w, scan);
        bool agree = lim.verdict == sub.verdict;
        bool decisive = lim.verdict != Verdict::inconclusive &&
                        sub.verdict != Verdict::inconclusive;
        if (single)
          pass = pass && lim.passed() && sub.passed();
        else
          pass = pass && agree && decisive;
        Json row;
        row["weight_id"] = w.id();
        row["via_limit"] = grslab::io::to_json(lim);
        row["via_subexp"] = grslab::io::to_json(sub);
        row["agree"] = agree;
        rows.push_back(std::move(row));
        csv.push_back(w.id() + "," + verdict_str(lim.verdict) + "," +
                      verdict_str(sub.verdict) + "," + (agree ? "true" : "false"));
      }
      Json results;
      results["weights"] = std::move(rows);
      emit(out, "grs-check", config, results, pass, csv);
      return pass ? 0 : 1;
    }

    if (seq->parsed()) {
      namespace ss = grslab::seqspace;
      std::vector<grslab::Weight> battery;
      if (seq_battery.empty()) {
        battery = ss::default_identity_battery();
        config["battery"] = "default";
      } else {
        Json ids = Json::array();
        for (const auto& lit : seq_battery) {
          battery.push_back(grslab::io::load_weight(lit));
          ids.push_back(battery.back().id());
        }
        config["battery"] = std::move(ids);
      }
      config["half_width"] = seq_half_width;
      auto rep = ss::identity_experiment(ss::shipped_sequences(seq_half_width), battery,
                                         scan.eps_list, p, windows);
      std::vector<std::string> csv{"sequence_id,verdict_left,verdict_right"};
      for (const auto& row : rep.rows)
        csv.push_back(row.sequence_id + "," + ss::to_string(row.left) + "," +
                      ss::to_string(row.right));
      emit(out, "seq-identity", config, grslab::io::to_json(rep), rep.all_agree, csv);
      return rep.all_agree ? 0 : 1;
    }

    if (invc->parsed()) {
      namespace ma = grslab::matalg;
      ma::MatrixKind mk = kind == "toeplitz"      ? ma::MatrixKind::toeplitz
                          : kind == "random_sign" ? ma::MatrixKind::random_sign
                                                  : ma::MatrixKind::diag_dominant;
      config["kind"] = kind;
      config["half_width"] = half_width;
      config["c"] = rate_c;
      config["s"] = rate_s;
      auto A = ma::generate_decay_matrix(mk, half_width, rate_c, rate_s, seed);
      auto rep = ma::inverse_closedness_experiment(A, rate_c, ma::default_inverse_battery(),
                                                   scan.eps_list);
      bool pass = rep.c2_positive && rep.norms_finite;
      std::vector<std::string> csv{"weight_id,norm_A,norm_Ainv"};
      for (const auto& row : rep.norms) {
        char line[160];
        std::snprintf(line, sizeof line, "%s,%.17g,%.17g", row.weight_id.c_str(), row.norm_a,
                      row.norm_inverse);
        csv.push_back(line);
      }
      emit(out, "inverse-closedness", config, grslab::io::to_json(rep), pass, csv);
      return pass ? 0 : 1;
    }

    if (mods->parsed()) {
      namespace tf = grslab::tfa;
      config["signal_extent"] = signal_extent;
      config["signal_spacing"] = signal_spacing;
      std::vector<double> mod_eps = eps_list.empty() ? tf::default_modspace_eps() : eps_list;
      config["eps"] = mod_eps;
      auto rep = tf::modspace_identity_experiment(
          tf::shipped_test_functions(signal_extent, signal_spacing),
          wl::default_battery_2d(), mod_eps, p, q);
      std::vector<std::string> csv{"fn_id,verdict_GS1,verdict_all_GRS,verdict_some_eps"};
      for (const auto& row : rep.rows)
        csv.push_back(row.fn_id + "," + verdict_str(row.gs1) + "," +
                      verdict_str(row.all_grs) + "," + verdict_str(row.some_eps));
      emit(out, "modspace-identity", config, grslab::io::to_json(rep), rep.consistent, csv);
      return rep.consistent ? 0 : 1;
    }

    if (gsp->parsed()) {
      namespace tf = grslab::tfa;
      tf::GSFunction f = gs_coeffs.empty() ? tf::GSFunction::hermite(hermite_index)
                                           : tf::GSFunction(gs_coeffs);
      if (h_grid.empty()) h_grid = {0.25, 0.5, 1.0, 2.0};
      config["s"] = gs_s;
      config["h_grid"] = h_grid;
      config["coeffs"] = f.coeffs();
      auto rep = tf::gs_membership_probe(f, gs_s, h_grid);
      std::vector<std::string> csv{"h,seminorm_low_order,seminorm_high_order"};
      for (std::size_t i = 0; i < rep.seminorms_lo.size(); ++i) {
        char line[120];
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g", rep.seminorms_lo[i].first,
                      rep.seminorms_lo[i].second, rep.seminorms_hi[i].second);
        csv.push_back(line);
      }
      emit(out, "gs-probe", config, grslab::io::to_json(rep), rep.member, csv);
      return rep.member ? 0 : 1;
    }

    if (dump->parsed()) {
      namespace tf = grslab::tfa;
      tf::SampledSignal f = signal_path.empty()
                                ? tf::default_window(signal_extent, signal_spacing)
                                : grslab::io::load_signal_csv(signal_path);
      tf::SampledSignal w = window_name == "gauss_unit"
                                ? tf::default_window(f.extent, f.spacing)
                                : tf::wide_window(f.extent, f.spacing);
      auto V = tf::stft(f, w, dump_hx, dump_hxi, dump_rx, dump_rxi);
      std::string csv_path = out.path.empty() ? "stft.csv" : out.path;
      grslab::io::write_stft_csv(V, csv_path, sidecar_path);
      config["signal"] = signal_path.empty() ? "gauss_unit (builtin)" : signal_path;
      config["window"] = window_name;
      std::cerr << "wrote " << csv_path << " and " << sidecar_path << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
