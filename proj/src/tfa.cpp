#include "grslab/tfa.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "grslab/parallel.hpp"
#include "grslab/weightlab.hpp"

namespace grslab::tfa {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;  // (2 pi)^{-1/2}

bool near_int(double v) { return std::abs(v - std::llround(v)) < 1e-9; }

}  // namespace

SampledSignal::SampledSignal(double R, double h, std::vector<Complex> values,
                             std::string name)
    : extent(R), spacing(h), samples(std::move(values)), label(std::move(name)) {
  if (!(R > 0.0) || !(h > 0.0)) throw std::invalid_argument("signal needs R > 0 and h > 0");
  if (!near_int(2.0 * R / h)) throw std::invalid_argument("signal extent must be a multiple of the spacing");
  int expect = static_cast<int>(std::llround(2.0 * R / h)) + 1;
  if (static_cast<int>(samples.size()) != expect)
    throw std::invalid_argument("signal sample count does not match extent and spacing");
}

SampledSignal dft(const SampledSignal& f) {
  const int n = f.size();
  std::vector<Complex> out(n);
  parallel_for(n, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t k = lo; k < hi; ++k) {
      double xi = f.x_at(static_cast<int>(k));
      Complex acc = 0.0;
      for (int i = 0; i < n; ++i) {
        double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        acc += w * f.samples[i] * std::polar(1.0, -f.x_at(i) * xi);
      }
      out[k] = kInvSqrt2Pi * f.spacing * acc;
    }
  });
  return SampledSignal(f.extent, f.spacing, std::move(out), f.label);
}

STFTGrid stft(const SampledSignal& f, const SampledSignal& phi, double h_x, double h_xi,
              double R_x, double R_xi) {
  if (f.spacing != phi.spacing || f.extent != phi.extent)
    throw std::invalid_argument("signal and window must share one grid");
  bool window_zero = true;
  for (const Complex& v : phi.samples)
    if (v != Complex{0.0, 0.0}) window_zero = false;
  if (window_zero) throw std::invalid_argument("window must not vanish identically");
  if (!(h_x > 0.0) || !(h_xi > 0.0) || !(R_x > 0.0) || !(R_xi > 0.0))
    throw std::invalid_argument("stft needs positive spacings and extents");
  if (!near_int(h_x / f.spacing) || !near_int(R_x / f.spacing))
    throw std::invalid_argument("stft x grid is not commensurate with the signal spacing");
  if (!near_int(2.0 * R_x / h_x) || !near_int(2.0 * R_xi / h_xi))
    throw std::invalid_argument("stft extents must be multiples of the spacings");

  STFTGrid grid;
  grid.spacing_x = h_x;
  grid.spacing_xi = h_xi;
  grid.extent_x = R_x;
  grid.extent_xi = R_xi;
  grid.nx = static_cast<int>(std::llround(2.0 * R_x / h_x)) + 1;
  grid.nxi = static_cast<int>(std::llround(2.0 * R_xi / h_xi)) + 1;
  grid.values.assign(static_cast<std::size_t>(grid.nx) * grid.nxi, Complex{});
  grid.window_id = phi.label;

  const int S = f.size();
  const int step = static_cast<int>(std::llround(h_x / f.spacing));
  const int base_shift = static_cast<int>(std::llround(-R_x / f.spacing));

  parallel_for(grid.nx, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t m = lo; m < hi; ++m) {
      int shift = base_shift + static_cast<int>(m) * step;
      int i_lo = std::max(0, shift);
      int i_hi = std::min(S - 1, S - 1 + shift);
      for (int n = 0; n < grid.nxi; ++n) {
        double xi = grid.xi_at(n);
        Complex acc = 0.0;
        for (int i = i_lo; i <= i_hi; ++i) {
          double w = (i == i_lo || i == i_hi) ? 0.5 : 1.0;
          acc += w * f.samples[i] * std::conj(phi.samples[i - shift]) *
                 std::polar(1.0, -f.x_at(i) * xi);
        }
        grid.at(static_cast<int>(m), n) = kInvSqrt2Pi * f.spacing * acc;
      }
    }
  });
  return grid;
}

double modulation_norm(const STFTGrid& V, const Weight& omega, double p, double q) {
  if (omega.dim() != 2) throw std::invalid_argument("modulation norm needs a dim-2 weight");
  if (!(p > 0.0) || !(q > 0.0)) throw std::invalid_argument("modulation norm needs p, q > 0");
  const bool p_inf = std::isinf(p), q_inf = std::isinf(q);

  double outer_sum = 0.0, outer_sup = 0.0;
  std::vector<double> pt(2);
  for (int n = 0; n < V.nxi; ++n) {
    double inner_sum = 0.0, inner_sup = 0.0;
    pt[1] = V.xi_at(n);
    for (int m = 0; m < V.nx; ++m) {
      pt[0] = V.x_at(m);
      double t = std::abs(V.at(m, n)) * omega.eval(pt);
      if (p_inf)
        inner_sup = std::max(inner_sup, t);
      else
        inner_sum += std::pow(t, p) * V.spacing_x;
    }
    double inner = p_inf ? inner_sup : std::pow(inner_sum, 1.0 / p);
    if (q_inf)
      outer_sup = std::max(outer_sup, inner);
    else
      outer_sum += std::pow(inner, q) * V.spacing_xi;
  }
  return q_inf ? outer_sup : std::pow(outer_sum, 1.0 / q);
}

CubeCoeffSeq cube_coefficients(const STFTGrid& V, double p) {
  if (!(p > 0.0)) throw std::invalid_argument("cube coefficients need p > 0");
  if (!near_int(1.0 / V.spacing_x) || !near_int(1.0 / V.spacing_xi))
    throw std::invalid_argument("stft spacing must divide 1 for cube alignment");

  int cap = static_cast<int>(std::ceil(std::max(V.extent_x, V.extent_xi))) ;
  CubeCoeffSeq out;
  out.p = p;
  out.values = seqspace::LatticeSeq(2, std::max(1, cap));

  const bool sup_form = std::isinf(p);
  const double cell = V.spacing_x * V.spacing_xi;
  // One pass over the grid, accumulating into the owning cube [n, n+1).
  for (int m = 0; m < V.nx; ++m) {
    int n1 = static_cast<int>(std::floor(V.x_at(m) + 1e-9));
    for (int n = 0; n < V.nxi; ++n) {
      int n2 = static_cast<int>(std::floor(V.xi_at(n) + 1e-9));
      double t = std::abs(V.at(m, n));
      double& slot = out.values.at(n1, n2);
      if (sup_form)
        slot = std::max(slot, t);
      else
        slot += std::pow(t, p) * cell;
    }
  }
  if (!sup_form) {
    for (int n1 = -out.values.half_width(); n1 <= out.values.half_width(); ++n1)
      for (int n2 = -out.values.half_width(); n2 <= out.values.half_width(); ++n2) {
        double& slot = out.values.at(n1, n2);
        slot = slot > 0.0 ? std::pow(slot, 1.0 / p) : 0.0;
      }
  }
  return out;
}

seqspace::TailVerdict cube_membership(const CubeCoeffSeq& cubes, const Weight& omega,
                                      int windows) {
  return seqspace::tail_growth_probe(cubes.values, omega, cubes.p, windows);
}

seqspace::TailVerdict membership_probe_modulation(const SampledSignal& f,
                                                  const SampledSignal& phi,
                                                  const Weight& omega, double p,
                                                  const StftParams& grid, int windows) {
  STFTGrid V = stft(f, phi, grid.h_x, grid.h_xi, grid.R_x, grid.R_xi);
  return cube_membership(cube_coefficients(V, p), omega, windows);
}

GSFunction::GSFunction(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw std::invalid_argument("hermite expansion needs coefficients");
  if (order() > kMaxOrder) throw std::invalid_argument("hermite expansion order over cap");
  for (double c : coeffs_)
    if (!std::isfinite(c)) throw std::invalid_argument("hermite coefficients must be finite");
}

GSFunction GSFunction::hermite(int m) {
  if (m < 0 || m > kMaxOrder) throw std::invalid_argument("hermite index out of range");
  std::vector<double> c(m + 1, 0.0);
  c[m] = 1.0;
  return GSFunction(std::move(c));
}

double hermite_eval(int m, double x) {
  double h0 = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
  if (m == 0) return h0;
  double h1 = std::sqrt(2.0) * x * h0;
  for (int k = 1; k < m; ++k) {
    double h2 = x * std::sqrt(2.0 / (k + 1)) * h1 - std::sqrt(k / (k + 1.0)) * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

double GSFunction::eval(double x) const {
  // One upward pass of the three-term recurrence.
  double h_prev = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
  double acc = coeffs_[0] * h_prev;
  if (coeffs_.size() == 1) return acc;
  double h_cur = std::sqrt(2.0) * x * h_prev;
  acc += coeffs_[1] * h_cur;
  for (std::size_t m = 1; m + 1 < coeffs_.size(); ++m) {
    double h_next = x * std::sqrt(2.0 / (m + 1)) * h_cur - std::sqrt(m / (m + 1.0)) * h_prev;
    h_prev = h_cur;
    h_cur = h_next;
    acc += coeffs_[m + 1] * h_cur;
  }
  return acc;
}

GSFunction GSFunction::derivative() const {
  // h_m' = sqrt(m/2) h_{m-1} - sqrt((m+1)/2) h_{m+1}, so the coefficient of
  // h_k in f' is sqrt((k+1)/2) c_{k+1} - sqrt(k/2) c_{k-1}.
  std::size_t n = coeffs_.size();
  std::vector<double> d(n + 1, 0.0);
  for (std::size_t k = 0; k < n + 1; ++k) {
    double acc = 0.0;
    if (k + 1 < n) acc += std::sqrt((k + 1) / 2.0) * coeffs_[k + 1];
    if (k >= 1) acc -= std::sqrt(k / 2.0) * coeffs_[k - 1];
    d[k] = acc;
  }
  return GSFunction(Unchecked{}, std::move(d));
}

double gs_seminorm(const GSFunction& f, double s, double h, int alpha_max, int beta_max,
                   double R, double h_x) {
  // s below 1/2 is allowed so triviality can be probed; the membership
  // notion is only non-trivial from 1/2 up.
  if (!(s > 0.0)) throw std::invalid_argument("gs_seminorm needs s > 0");
  if (!(h > 0.0)) throw std::invalid_argument("gs_seminorm needs h > 0");
  if (alpha_max < 0 || beta_max < 0 || alpha_max > kMaxSeminormOrder ||
      beta_max > kMaxSeminormOrder)
    throw std::invalid_argument("truncation orders above cap");
  if (!(R > 0.0) || !(h_x > 0.0)) throw std::invalid_argument("gs_seminorm needs R, h_x > 0");

  const double log_h = std::log(h);
  double best_log = -std::numeric_limits<double>::infinity();

  GSFunction deriv = f;
  for (int alpha = 0; alpha <= alpha_max; ++alpha) {
    if (alpha > 0) deriv = deriv.derivative();
    double alpha_part = -alpha * log_h - s * std::lgamma(alpha + 1.0);
    int n = static_cast<int>(std::floor(R / h_x + 1e-9));
    for (int i = -n; i <= n; ++i) {
      double x = i * h_x;
      double fx = std::abs(deriv.eval(x));
      if (fx == 0.0) continue;
      double log_fx = std::log(fx);
      double log_ax = x == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(std::abs(x));
      for (int beta = 0; beta <= beta_max; ++beta) {
        if (beta > 0 && x == 0.0) break;
        double q = log_fx + beta * log_ax + alpha_part - beta * log_h -
                   s * std::lgamma(beta + 1.0);
        best_log = std::max(best_log, q);
      }
    }
  }
  return std::isinf(best_log) ? 0.0 : std::exp(best_log);
}

GsProbeResult gs_membership_probe(const GSFunction& f, double s,
                                  const std::vector<double>& h_grid,
                                  const GsProbeParams& params) {
  if (h_grid.empty()) throw std::invalid_argument("h grid must be non-empty");
  for (std::size_t i = 1; i < h_grid.size(); ++i)
    if (!(h_grid[i] > h_grid[i - 1]))
      throw std::invalid_argument("h grid must be strictly increasing");

  GsProbeResult out;
  for (double h : h_grid) {
    double lo = gs_seminorm(f, s, h, params.order_lo, params.order_lo, params.R, params.h_x);
    double hi = gs_seminorm(f, s, h, params.order_hi, params.order_hi, params.R, params.h_x);
    out.seminorms_lo.emplace_back(h, lo);
    out.seminorms_hi.emplace_back(h, hi);
    if (!out.member && std::isfinite(hi) && hi <= lo * (1.0 + params.stab_tol)) {
      out.member = true;
      out.h_min = h;
    }
  }
  return out;
}

ModspaceReport modspace_identity_experiment(const std::vector<TestFunction>& test_fns,
                                            const std::vector<Weight>& grs_battery_2d,
                                            const std::vector<double>& eps_list, double p,
                                            double q, const StftParams& grid) {
  if (grs_battery_2d.empty()) throw std::invalid_argument("battery must be non-empty");
  weightlab::ScanParams checks;
  for (const auto& w : grs_battery_2d) {
    if (w.dim() != 2) throw std::invalid_argument("modspace battery weights must be dim-2");
    if (!weightlab::check_grs_via_limit(w, checks).passed() ||
        !weightlab::check_grs_via_subexp(w, checks).passed())
      throw std::invalid_argument("modspace battery contains a weight failing the growth checks: " +
                                  w.id());
  }

  SampledSignal window;
  bool have_window = false;

  ModspaceReport rep;
  for (const auto& fn : test_fns) {
    if (!have_window) {
      window = default_window(fn.samples.extent, fn.samples.spacing);
      have_window = true;
    }
    ModspaceRow row;
    row.fn_id = fn.id;

    STFTGrid V = stft(fn.samples, window, grid.h_x, grid.h_xi, grid.R_x, grid.R_xi);
    row.unweighted_norm = modulation_norm(V, Weight::constant(2), p, q);
    CubeCoeffSeq cubes = cube_coefficients(V, p);

    int w_summable = 0, w_divergent = 0;
    for (const auto& w : grs_battery_2d) {
      seqspace::TailVerdict v = cube_membership(cubes, w);
      row.per_weight.emplace_back(w.id(), v);
      if (v == seqspace::TailVerdict::summable) ++w_summable;
      if (v == seqspace::TailVerdict::divergent) ++w_divergent;
    }
    if (w_divergent > 0)
      row.all_grs = Verdict::fail;
    else if (w_summable == static_cast<int>(grs_battery_2d.size()))
      row.all_grs = Verdict::pass;

    int e_summable = 0, e_divergent = 0;
    for (double eps : eps_list) {
      Weight v_eps = Weight::subexp(eps, 1.0, 2);
      seqspace::TailVerdict v = cube_membership(cubes, v_eps);
      row.per_eps.emplace_back(v_eps.id(), v);
      if (v == seqspace::TailVerdict::summable) ++e_summable;
      if (v == seqspace::TailVerdict::divergent) ++e_divergent;
    }
    if (e_summable > 0)
      row.some_eps = Verdict::pass;
    else if (e_divergent == static_cast<int>(eps_list.size()))
      row.some_eps = Verdict::fail;

    if (fn.hermite) {
      GsProbeResult gs = gs_membership_probe(*fn.hermite, 1.0, {0.25, 0.5, 1.0, 2.0});
      row.gs1 = gs.member ? Verdict::pass : Verdict::fail;
    }

    if (row.all_grs != Verdict::inconclusive && row.some_eps != Verdict::inconclusive) {
      ++rep.decisive_rows;
      if (row.all_grs == row.some_eps)
        ++rep.agreeing_rows;
      else
        rep.consistent = false;
    }
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

SampledSignal default_window(double R, double h) {
  return SampledSignal::from_fn(
      R, h, [](double y) { return std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * y * y); },
      "gauss_unit");
}

SampledSignal wide_window(double R, double h) {
  return SampledSignal::from_fn(
      R, h,
      [](double y) {
        return std::pow(4.0 * std::numbers::pi, -0.25) * std::exp(-y * y / 8.0);
      },
      "gauss_width2");
}

std::vector<TestFunction> shipped_test_functions(double R, double h) {
  std::vector<TestFunction> fns;
  fns.push_back({"gauss0",
                 SampledSignal::from_fn(R, h, [](double x) { return hermite_eval(0, x); },
                                        "gauss0"),
                 GSFunction::hermite(0)});
  fns.push_back({"hermite2",
                 SampledSignal::from_fn(R, h, [](double x) { return hermite_eval(2, x); },
                                        "hermite2"),
                 GSFunction::hermite(2)});
  fns.push_back({"mod_gauss_xi2",
                 SampledSignal::from_fn(
                     R, h,
                     [](double x) {
                       return hermite_eval(0, x) * std::polar(1.0, 2.0 * x);
                     },
                     "mod_gauss_xi2"),
                 std::nullopt});
  fns.push_back({"polydecay3",
                 SampledSignal::from_fn(
                     R, h, [](double x) { return std::pow(1.0 + std::abs(x), -3.0); },
                     "polydecay3"),
                 std::nullopt});
  fns.push_back({"zero",
                 SampledSignal::from_fn(R, h, [](double) { return 0.0; }, "zero"),
                 GSFunction({0.0})});
  return fns;
}

std::vector<double> default_modspace_eps() { return {1.0, 2.0}; }

}  // namespace grslab::tfa
