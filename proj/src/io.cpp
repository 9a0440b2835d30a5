#include "grslab/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace grslab::io {

namespace {

Json verdict_json(Verdict v) { return to_string(v); }

Json tail_json(seqspace::TailVerdict v) { return seqspace::to_string(v); }

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  for (auto& s : out) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
  }
  return out;
}

bool parse_double(const std::string& s, double& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

std::vector<std::vector<double>> read_numeric_csv(const std::string& path, int& columns,
                                                  bool header_required) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open CSV file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  columns = -1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    std::vector<double> row(cells.size());
    bool numeric = true;
    for (std::size_t i = 0; i < cells.size(); ++i)
      if (!parse_double(cells[i], row[i])) numeric = false;
    if (first) {
      first = false;
      if (!numeric) {
        columns = static_cast<int>(cells.size());
        continue;  // header line
      }
      if (header_required) throw std::runtime_error("CSV header required in " + path);
    }
    if (!numeric) throw std::runtime_error("non-numeric CSV row in " + path);
    if (columns == -1) columns = static_cast<int>(cells.size());
    if (static_cast<int>(cells.size()) != columns)
      throw std::runtime_error("ragged CSV rows in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("CSV has no data rows: " + path);
  return rows;
}

std::string num(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, p);
}

/// Recovers (spacing, half count) of a centered uniform grid from sorted
/// distinct coordinates.
std::pair<double, int> uniform_centered_axis(const std::set<double>& coords,
                                             const std::string& path) {
  std::vector<double> xs(coords.begin(), coords.end());
  if (xs.size() < 3 || xs.size() % 2 == 0)
    throw std::runtime_error("grid must be centered with an odd point count: " + path);
  int half = static_cast<int>(xs.size() / 2);
  double spacing = xs[1] - xs[0];
  if (!(spacing > 0.0)) throw std::runtime_error("grid spacing must be positive: " + path);
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (std::abs(xs[i] - xs[i - 1] - spacing) > 1e-9 * std::max(1.0, spacing))
      throw std::runtime_error("grid is not uniform: " + path);
  if (std::abs(xs[half]) > 1e-9) throw std::runtime_error("grid is not centered at 0: " + path);
  return {spacing, half};
}

}  // namespace

Json to_json(const ConditionReport& rep) {
  Json j;
  j["verdict"] = verdict_json(rep.verdict);
  if (rep.witness) {
    j["witness"] = Json::object();
    j["witness"]["points"] = rep.witness->points;
    j["witness"]["values"] = rep.witness->values;
  } else {
    j["witness"] = nullptr;
  }
  j["scan_radius"] = rep.scan_radius;
  j["tolerance"] = rep.tolerance;
  Json diags = Json::array();
  for (const auto& [name, value] : rep.diagnostics) diags.push_back(Json::array({name, value}));
  j["diagnostics"] = std::move(diags);
  return j;
}

Json to_json(const matalg::ExpFit& fit) {
  Json j;
  j["rate"] = std::isinf(fit.rate) ? Json("inf") : Json(fit.rate);
  j["amplitude"] = fit.amplitude;
  j["r_squared"] = fit.r_squared;
  j["band"] = Json::array({fit.band_lo, fit.band_hi});
  j["valid"] = fit.valid;
  return j;
}

Json to_json(const matalg::DecayProfile& prof) {
  Json j;
  j["half_width"] = prof.half_width;
  j["fit"] = to_json(prof.fit);
  j["values"] = prof.values;
  return j;
}

Json to_json(const matalg::InverseClosednessReport& rep) {
  Json j;
  j["c1"] = rep.c1;
  j["c2"] = std::isinf(rep.fit_inverse.rate) ? Json("inf") : Json(rep.fit_inverse.rate);
  j["r2"] = rep.fit_inverse.r_squared;
  j["fit_a"] = to_json(rep.fit_a);
  j["fit_inverse"] = to_json(rep.fit_inverse);
  j["residual"] = rep.residual;
  Json norms = Json::array();
  for (const auto& row : rep.norms) {
    Json r;
    r["weight_id"] = row.weight_id;
    r["norm_A"] = std::isfinite(row.norm_a) ? Json(row.norm_a) : Json("inf");
    r["norm_Ainv"] = std::isfinite(row.norm_inverse) ? Json(row.norm_inverse) : Json("inf");
    norms.push_back(std::move(r));
  }
  j["norms"] = std::move(norms);
  j["flags"] = {{"c2_positive", rep.c2_positive},
                {"c2_within", rep.c2_within},
                {"norms_finite", rep.norms_finite}};
  return j;
}

Json to_json(const seqspace::IdentityReport& rep) {
  Json rows = Json::array();
  for (const auto& row : rep.rows) {
    Json r;
    r["sequence_id"] = row.sequence_id;
    r["verdict_left"] = tail_json(row.left);
    r["verdict_right"] = tail_json(row.right);
    Json pw = Json::object();
    for (const auto& [id, v] : row.per_weight) pw[id] = tail_json(v);
    r["per_weight"] = std::move(pw);
    Json pe = Json::object();
    for (const auto& [id, v] : row.per_eps) pe[id] = tail_json(v);
    r["per_eps"] = std::move(pe);
    rows.push_back(std::move(r));
  }
  Json j;
  j["rows"] = std::move(rows);
  j["decisive_rows"] = rep.decisive_rows;
  j["agreeing_rows"] = rep.agreeing_rows;
  j["all_agree"] = rep.all_agree;
  return j;
}

Json to_json(const tfa::ModspaceReport& rep) {
  Json rows = Json::array();
  for (const auto& row : rep.rows) {
    Json r;
    r["fn_id"] = row.fn_id;
    r["verdict_GS1"] = verdict_json(row.gs1);
    r["verdict_all_GRS"] = verdict_json(row.all_grs);
    r["verdict_some_eps"] = verdict_json(row.some_eps);
    r["unweighted_norm"] = row.unweighted_norm;
    Json pw = Json::object();
    for (const auto& [id, v] : row.per_weight) pw[id] = tail_json(v);
    r["per_weight"] = std::move(pw);
    Json pe = Json::object();
    for (const auto& [id, v] : row.per_eps) pe[id] = tail_json(v);
    r["per_eps"] = std::move(pe);
    rows.push_back(std::move(r));
  }
  Json j;
  j["rows"] = std::move(rows);
  j["decisive_rows"] = rep.decisive_rows;
  j["agreeing_rows"] = rep.agreeing_rows;
  j["consistent"] = rep.consistent;
  return j;
}

Json to_json(const tfa::GsProbeResult& rep) {
  Json j;
  j["member"] = rep.member;
  j["h_min"] = rep.h_min;
  Json lo = Json::array(), hi = Json::array();
  for (const auto& [h, v] : rep.seminorms_lo) lo.push_back(Json::array({h, v}));
  for (const auto& [h, v] : rep.seminorms_hi) hi.push_back(Json::array({h, v}));
  j["seminorms_low_order"] = std::move(lo);
  j["seminorms_high_order"] = std::move(hi);
  return j;
}

Weight load_weight_csv(const std::string& path) {
  int columns = 0;
  auto rows = read_numeric_csv(path, columns, /*header_required=*/true);
  if (columns != 2 && columns != 3)
    throw std::runtime_error("weight CSV needs columns x_1[,x_2],value: " + path);
  int dim = columns - 1;

  std::set<double> axis[2];
  for (const auto& row : rows)
    for (int a = 0; a < dim; ++a) axis[a].insert(row[a]);

  Weight::Table t;
  t.dim = dim;
  for (int a = 0; a < dim; ++a) {
    auto [spacing, half] = uniform_centered_axis(axis[a], path);
    t.spacing[a] = spacing;
    t.half_count[a] = half;
  }

  int n2 = dim == 2 ? 2 * t.half_count[1] + 1 : 1;
  std::size_t total = static_cast<std::size_t>(2 * t.half_count[0] + 1) * n2;
  if (rows.size() != total)
    throw std::runtime_error("weight CSV does not cover the full grid once: " + path);
  t.values.assign(total, -1.0);
  for (const auto& row : rows) {
    int i = static_cast<int>(std::llround(row[0] / t.spacing[0])) + t.half_count[0];
    int j = dim == 2 ? static_cast<int>(std::llround(row[1] / t.spacing[1])) + t.half_count[1] : 0;
    std::size_t idx = static_cast<std::size_t>(i) * n2 + j;
    if (t.values[idx] >= 0.0) throw std::runtime_error("duplicate grid point in " + path);
    t.values[idx] = row[dim];
  }
  return Weight::tabulated(std::move(t));
}

Weight load_weight(const std::string& literal) {
  if (literal.rfind("tabulated:", 0) == 0) return load_weight_csv(literal.substr(10));
  return Weight::parse(literal);
}

seqspace::LatticeSeq load_seq_csv(const std::string& path) {
  int columns = 0;
  auto rows = read_numeric_csv(path, columns, /*header_required=*/true);
  if (columns != 2 && columns != 3)
    throw std::runtime_error("sequence CSV needs columns k_1[,k_2],value: " + path);
  int dim = columns - 1;
  int K = 0;
  for (const auto& row : rows)
    for (int a = 0; a < dim; ++a) {
      if (std::abs(row[a] - std::llround(row[a])) > 1e-9)
        throw std::runtime_error("sequence indices must be integers: " + path);
      K = std::max(K, static_cast<int>(std::llround(std::abs(row[a]))));
    }
  std::size_t expect = dim == 1 ? 2 * static_cast<std::size_t>(K) + 1
                                : (2 * static_cast<std::size_t>(K) + 1) * (2 * K + 1);
  if (rows.size() != expect)
    throw std::runtime_error("sequence CSV must cover the centered cube exactly: " + path);
  seqspace::LatticeSeq seq(dim, K);
  for (const auto& row : rows) {
    int k1 = static_cast<int>(std::llround(row[0]));
    int k2 = dim == 2 ? static_cast<int>(std::llround(row[1])) : 0;
    seq.at(k1, k2) = row[dim];
  }
  return seq;
}

matalg::LatticeMatrix load_matrix_csv(const std::string& path) {
  int columns = 0;
  auto rows = read_numeric_csv(path, columns, /*header_required=*/false);
  if (columns != 3) throw std::runtime_error("matrix CSV needs columns j,k,value: " + path);
  int N = 1;
  for (const auto& row : rows) {
    for (int a = 0; a < 2; ++a) {
      if (std::abs(row[a] - std::llround(row[a])) > 1e-9)
        throw std::runtime_error("matrix indices must be integers: " + path);
      N = std::max(N, static_cast<int>(std::llround(std::abs(row[a]))));
    }
  }
  matalg::LatticeMatrix m(N);
  for (const auto& row : rows)
    m.at(static_cast<int>(std::llround(row[0])), static_cast<int>(std::llround(row[1]))) =
        row[2];
  return m;
}

tfa::SampledSignal load_signal_csv(const std::string& path) {
  int columns = 0;
  auto rows = read_numeric_csv(path, columns, /*header_required=*/true);
  if (columns != 3) throw std::runtime_error("signal CSV needs columns x,re,im: " + path);
  std::map<double, tfa::Complex> samples;
  std::set<double> xs;
  for (const auto& row : rows) {
    xs.insert(row[0]);
    samples[row[0]] = tfa::Complex(row[1], row[2]);
  }
  if (samples.size() != rows.size()) throw std::runtime_error("duplicate x in " + path);
  auto [spacing, half] = uniform_centered_axis(xs, path);
  std::vector<tfa::Complex> values;
  values.reserve(samples.size());
  for (const auto& [x, v] : samples) values.push_back(v);
  return tfa::SampledSignal(half * spacing, spacing, std::move(values), path);
}

void write_stft_csv(const tfa::STFTGrid& grid, const std::string& csv_path,
                    const std::string& sidecar_path) {
  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot write " + csv_path);
  csv << "x,xi,re,im\n";
  for (int m = 0; m < grid.nx; ++m)
    for (int n = 0; n < grid.nxi; ++n) {
      tfa::Complex v = grid.at(m, n);
      csv << num(grid.x_at(m)) << ',' << num(grid.xi_at(n)) << ',' << num(v.real()) << ','
          << num(v.imag()) << '\n';
    }
  Json side;
  side["spacing_x"] = grid.spacing_x;
  side["spacing_xi"] = grid.spacing_xi;
  side["extent_x"] = grid.extent_x;
  side["extent_xi"] = grid.extent_xi;
  side["nx"] = grid.nx;
  side["nxi"] = grid.nxi;
  side["window_id"] = grid.window_id;
  std::ofstream sc(sidecar_path);
  if (!sc) throw std::runtime_error("cannot write " + sidecar_path);
  sc << side.dump(2) << '\n';
}

}  // namespace grslab::io
