#include "grslab/weight.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "grslab/report.hpp"

namespace grslab {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    default: return "inconclusive";
  }
}

namespace {

std::string num(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, p);
}

double euclid(std::span<const double> x) {
  double s = 0.0;
  for (double xi : x) s += xi * xi;
  return std::sqrt(s);
}

void check_dim(int dim) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("weight dim must be 1 or 2");
}

}  // namespace

Weight Weight::constant(int dim) {
  check_dim(dim);
  Weight w;
  w.family_ = Family::constant;
  w.dim_ = dim;
  w.id_ = dim == 1 ? "constant" : "constant:dim=2";
  return w;
}

Weight Weight::polynomial(double r, int dim) {
  check_dim(dim);
  if (!(r >= 0.0) || !std::isfinite(r))
    throw std::invalid_argument("polynomial weight needs r >= 0");
  Weight w;
  w.family_ = Family::polynomial;
  w.dim_ = dim;
  w.r_ = r;
  w.id_ = "polynomial:r=" + num(r) + (dim == 2 ? ",dim=2" : "");
  return w;
}

Weight Weight::subexp(double c, double s, int dim) {
  check_dim(dim);
  if (!(c >= 0.0) || !std::isfinite(c))
    throw std::invalid_argument("subexp weight needs c >= 0");
  if (!(s >= 0.0 && s <= 1.0))
    throw std::invalid_argument("subexp weight needs s in [0, 1]");
  Weight w;
  w.family_ = Family::subexp;
  w.dim_ = dim;
  w.c_ = c;
  w.s_ = s;
  w.id_ = "subexp:c=" + num(c) + ",s=" + num(s) + (dim == 2 ? ",dim=2" : "");
  return w;
}

Weight Weight::product(std::vector<Weight> factors) {
  if (factors.empty()) throw std::invalid_argument("product weight needs factors");
  int d = factors.front().dim();
  for (const auto& f : factors)
    if (f.dim() != d) throw std::invalid_argument("product factors must share dim");
  Weight w;
  w.family_ = Family::product;
  w.dim_ = d;
  w.id_ = "product:";
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (i) w.id_ += '*';
    w.id_ += factors[i].id();
  }
  w.factors_ = std::move(factors);
  return w;
}

Weight Weight::tabulated(Table table) {
  check_dim(table.dim);
  std::size_t expect = 1;
  for (int a = 0; a < table.dim; ++a) {
    if (table.half_count[a] < 1) throw std::invalid_argument("tabulated grid too small");
    if (!(table.spacing[a] > 0.0)) throw std::invalid_argument("tabulated spacing must be > 0");
    expect *= static_cast<std::size_t>(2 * table.half_count[a] + 1);
  }
  if (table.values.size() != expect)
    throw std::invalid_argument("tabulated value count does not match grid");
  for (double v : table.values)
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument("tabulated weight values must be positive and finite");

  // Symmetrize, then switch to log storage.  The grid is centered, so -x is
  // always a grid point.
  std::vector<double> sym = table.values;
  auto flat = [&](int i, int j) {
    int n2 = table.dim == 2 ? 2 * table.half_count[1] + 1 : 1;
    return static_cast<std::size_t>((i + table.half_count[0]) * n2 +
                                    (table.dim == 2 ? j + table.half_count[1] : 0));
  };
  for (int i = -table.half_count[0]; i <= table.half_count[0]; ++i) {
    int jmax = table.dim == 2 ? table.half_count[1] : 0;
    for (int j = -jmax; j <= jmax; ++j) {
      double a = table.values[flat(i, j)];
      double b = table.values[flat(-i, -j)];
      sym[flat(i, j)] = 0.5 * (a + b);
    }
  }
  for (double& v : sym) v = std::log(v);
  table.values = std::move(sym);

  Weight w;
  w.family_ = Family::tabulated;
  w.dim_ = table.dim;
  w.table_ = std::make_shared<const Table>(std::move(table));
  w.id_ = "tabulated";
  return w;
}

double Weight::log_eval(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_)
    throw std::invalid_argument("weight evaluated with wrong dimension");
  for (double xi : x)
    if (!std::isfinite(xi)) throw std::invalid_argument("weight evaluated at non-finite point");
  switch (family_) {
    case Family::constant:
      return 0.0;
    case Family::polynomial:
      return r_ * std::log1p(euclid(x));
    case Family::subexp: {
      double n = euclid(x);
      return n == 0.0 ? 0.0 : c_ * std::pow(n, s_);
    }
    case Family::product: {
      double s = 0.0;
      for (const auto& f : factors_) s += f.log_eval(x);
      return s;
    }
    case Family::tabulated:
      return table_log_interp(x);
  }
  return 0.0;
}

double Weight::eval(std::span<const double> x) const { return std::exp(log_eval(x)); }

double Weight::log_eval1(double x) const { return log_eval(std::span<const double>(&x, 1)); }

double Weight::eval1(double x) const { return std::exp(log_eval1(x)); }

double Weight::hull_radius() const {
  switch (family_) {
    case Family::tabulated: {
      double r = table_->half_count[0] * table_->spacing[0];
      if (table_->dim == 2) r = std::min(r, table_->half_count[1] * table_->spacing[1]);
      return r;
    }
    case Family::product: {
      double r = std::numeric_limits<double>::infinity();
      for (const auto& f : factors_) r = std::min(r, f.hull_radius());
      return r;
    }
    default:
      return std::numeric_limits<double>::infinity();
  }
}

double Weight::table_log_interp(std::span<const double> x) const {
  const Table& t = *table_;
  const double kHullSlack = 1e-9;
  // Per-axis cell lookup with clamped interpolation inside the hull.
  double pos[2] = {0.0, 0.0};
  int cell[2] = {0, 0};
  for (int a = 0; a < t.dim; ++a) {
    double g = x[a] / t.spacing[a];
    if (std::abs(g) > t.half_count[a] + kHullSlack)
      throw std::domain_error("tabulated weight evaluated outside grid hull");
    g = std::clamp(g, -static_cast<double>(t.half_count[a]),
                   static_cast<double>(t.half_count[a]));
    double f = std::floor(g);
    cell[a] = static_cast<int>(f);
    if (cell[a] >= t.half_count[a]) cell[a] = t.half_count[a] - 1;
    pos[a] = g - cell[a];
  }
  int n2 = t.dim == 2 ? 2 * t.half_count[1] + 1 : 1;
  auto val = [&](int i, int j) {
    return t.values[static_cast<std::size_t>((i + t.half_count[0]) * n2 +
                                             (t.dim == 2 ? j + t.half_count[1] : 0))];
  };
  if (t.dim == 1) {
    return (1.0 - pos[0]) * val(cell[0], 0) + pos[0] * val(cell[0] + 1, 0);
  }
  double v00 = val(cell[0], cell[1]);
  double v01 = val(cell[0], cell[1] + 1);
  double v10 = val(cell[0] + 1, cell[1]);
  double v11 = val(cell[0] + 1, cell[1] + 1);
  double lo = (1.0 - pos[1]) * v00 + pos[1] * v01;
  double hi = (1.0 - pos[1]) * v10 + pos[1] * v11;
  return (1.0 - pos[0]) * lo + pos[0] * hi;
}

Weight Weight::axis_restrict(int axis) const {
  if (axis < 0 || axis >= dim_) throw std::invalid_argument("axis out of range");
  if (dim_ == 1) return *this;
  switch (family_) {
    case Family::constant:
      return constant(1);
    case Family::polynomial:
      return polynomial(r_, 1);
    case Family::subexp:
      return subexp(c_, s_, 1);
    case Family::product: {
      std::vector<Weight> fs;
      fs.reserve(factors_.size());
      for (const auto& f : factors_) fs.push_back(f.axis_restrict(axis));
      return product(std::move(fs));
    }
    case Family::tabulated: {
      // Sample the stored values along the axis through the origin.
      const Table& t = *table_;
      Table out;
      out.dim = 1;
      out.half_count = {t.half_count[axis], 0};
      out.spacing = {t.spacing[axis], 1.0};
      int n = t.half_count[axis];
      out.values.reserve(2 * n + 1);
      int n2 = 2 * t.half_count[1] + 1;
      for (int i = -n; i <= n; ++i) {
        std::size_t idx = axis == 0
                              ? static_cast<std::size_t>((i + t.half_count[0]) * n2 + t.half_count[1])
                              : static_cast<std::size_t>(t.half_count[0] * n2 + i + t.half_count[1]);
        out.values.push_back(std::exp(t.values[idx]));
      }
      return tabulated(std::move(out));
    }
  }
  return constant(1);
}

namespace {

double parse_num(const std::string& s) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw std::invalid_argument("bad number in weight literal: '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

Weight parse_single(const std::string& literal);

}  // namespace

Weight Weight::parse(const std::string& literal) {
  if (literal.rfind("product:", 0) == 0) {
    std::vector<Weight> fs;
    for (const auto& part : split(literal.substr(8), '*')) fs.push_back(parse_single(part));
    return product(std::move(fs));
  }
  return parse_single(literal);
}

namespace {

Weight parse_single(const std::string& literal) {
  std::size_t colon = literal.find(':');
  std::string fam = literal.substr(0, colon);
  std::string rest = colon == std::string::npos ? "" : literal.substr(colon + 1);

  if (fam == "tabulated") {
    // Handled by the IO layer (needs a CSV read); Weight::parse only sees
    // parametric literals.
    throw std::invalid_argument("tabulated weights load from CSV; use the tabulated loader");
  }

  int dim = 1;
  double r = 0.0, c = 0.0, s = 1.0;
  bool has_r = false, has_c = false, has_s = false;
  if (!rest.empty()) {
    for (const auto& kv : split(rest, ',')) {
      std::size_t eq = kv.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("weight literal key without value: '" + kv + "'");
      std::string key = kv.substr(0, eq);
      std::string val = kv.substr(eq + 1);
      if (key == "dim") {
        dim = static_cast<int>(parse_num(val));
      } else if (key == "r") {
        r = parse_num(val);
        has_r = true;
      } else if (key == "c") {
        c = parse_num(val);
        has_c = true;
      } else if (key == "s") {
        s = parse_num(val);
        has_s = true;
      } else {
        throw std::invalid_argument("unknown weight literal key: '" + key + "'");
      }
    }
  }

  if (fam == "constant") {
    if (has_r || has_c || has_s) throw std::invalid_argument("constant takes no parameters");
    return Weight::constant(dim);
  }
  if (fam == "polynomial" || fam == "poly") {
    if (!has_r) throw std::invalid_argument("polynomial literal needs r=");
    return Weight::polynomial(r, dim);
  }
  if (fam == "subexp") {
    if (!has_c || !has_s) throw std::invalid_argument("subexp literal needs c= and s=");
    return Weight::subexp(c, s, dim);
  }
  throw std::invalid_argument("unknown weight family: '" + fam + "'");
}

}  // namespace

}  // namespace grslab
