#include "grslab/weightlab.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace grslab::weightlab {

namespace {

constexpr double kSlack = 1e-12;

std::vector<double> axis_point(int dim, int axis, double value) {
  std::vector<double> p(dim, 0.0);
  p[axis] = value;
  return p;
}

/// Grid points inside the Euclidean ball, enumerated axis-lexicographically.
/// shell = max |index| (used for running-sup stabilization bookkeeping).
struct ScanPoint {
  std::vector<double> x;
  int shell;
};

std::vector<ScanPoint> ball_grid(int dim, double radius, double step) {
  if (!(radius > 0.0) || !(step > 0.0))
    throw std::invalid_argument("scan needs radius > 0 and step > 0");
  int n = static_cast<int>(std::floor(radius / step + 1e-9));
  std::vector<ScanPoint> pts;
  if (dim == 1) {
    pts.reserve(2 * n + 1);
    for (int i = -n; i <= n; ++i) pts.push_back({{i * step}, std::abs(i)});
    return pts;
  }
  for (int i = -n; i <= n; ++i)
    for (int j = -n; j <= n; ++j) {
      double x = i * step, y = j * step;
      if (x * x + y * y <= radius * radius + 1e-9)
        pts.push_back({{x, y}, std::max(std::abs(i), std::abs(j))});
    }
  return pts;
}

/// Log-values of w along the positive half-axis, x_i = i * step up to radius.
struct AxisTrace {
  std::vector<double> x, u;
};

AxisTrace axis_trace(const Weight& w, int axis, double radius, double step) {
  Weight u = w.axis_restrict(axis);
  int n = static_cast<int>(std::floor(radius / step + 1e-9));
  AxisTrace t;
  t.x.reserve(n + 1);
  t.u.reserve(n + 1);
  for (int i = 0; i <= n; ++i) {
    t.x.push_back(i * step);
    t.u.push_back(u.log_eval1(i * step));
  }
  return t;
}

/// Mean slopes of u over the outer two octaves of the scan, and their ratio.
/// ratio <= decay_ratio reads as "the slope is still draining to zero".
struct SlopeTrend {
  double outer = 0.0;  // mean slope on [R/2, R]
  double inner = 0.0;  // mean slope on [R/4, R/2]
  double ratio = 0.0;
};

SlopeTrend slope_trend(const AxisTrace& t) {
  std::size_t n = t.x.size() - 1;
  std::size_t h = n / 2, q = n / 4;
  SlopeTrend s;
  if (q == 0 || h == q || n == h) {
    s.ratio = 1.0;  // scan too small to measure a trend: treat as plateau
    return s;
  }
  s.outer = (t.u[n] - t.u[h]) / (t.x[n] - t.x[h]);
  s.inner = (t.u[h] - t.u[q]) / (t.x[h] - t.x[q]);
  if (s.inner > 1e-15)
    s.ratio = s.outer / s.inner;
  else
    s.ratio = s.outer > 1e-15 ? 2.0 : 0.0;
  return s;
}

/// Tail analysis of one limit sequence a_l = w(l x)^{1/l}.
struct LimitTrace {
  double endpoint = 1.0;   // a at l = ell_max
  double log_ratio = 0.0;  // log a_L / log a_{L/2}
  bool tail_non_increasing = true;
};

LimitTrace limit_trace(const std::vector<double>& seq) {
  LimitTrace t;
  std::size_t L = seq.size();
  t.endpoint = seq.back();
  std::size_t tail_start = (3 * L) / 4;
  for (std::size_t i = tail_start; i + 1 < L; ++i)
    if (seq[i + 1] > seq[i] + kSlack * std::max(1.0, seq[i])) {
      t.tail_non_increasing = false;
      break;
    }
  if (L >= 8) {
    double b_end = std::log(seq[L - 1]);
    double b_half = std::log(seq[L / 2 - 1]);
    if (b_half > 1e-12)
      t.log_ratio = b_end / b_half;
    else
      t.log_ratio = b_end > 1e-12 ? 2.0 : 1.0;
  } else {
    t.log_ratio = 1.0;
  }
  return t;
}

}  // namespace

double eval_weight(const Weight& w, std::span<const double> x) { return w.eval(x); }

ConditionReport check_submultiplicative(const Weight& w, double radius, double step,
                                        double tol) {
  auto pts = ball_grid(w.dim(), radius, step);
  std::vector<double> logw(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) logw[i] = w.log_eval(pts[i].x);

  double max_excess = -std::numeric_limits<double>::infinity();
  std::size_t arg_i = 0, arg_j = 0;
  std::vector<double> sum(w.dim());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) {
      for (int a = 0; a < w.dim(); ++a) sum[a] = pts[i].x[a] + pts[j].x[a];
      double excess = w.log_eval(sum) - logw[i] - logw[j];
      if (excess > max_excess) {
        max_excess = excess;
        arg_i = i;
        arg_j = j;
      }
    }
  }

  ConditionReport rep;
  rep.scan_radius = radius;
  rep.tolerance = tol;
  rep.note("max_log_excess", max_excess);
  if (max_excess <= tol) {
    rep.verdict = Verdict::pass;
  } else {
    rep.verdict = Verdict::fail;
    rep.witness = Witness{{pts[arg_i].x, pts[arg_j].x}, {max_excess}};
  }
  return rep;
}

std::vector<double> grs_limit_sequence(const Weight& w, std::span<const double> x,
                                       int ell_max) {
  if (ell_max < 1) throw std::invalid_argument("ell_max must be >= 1");
  std::vector<double> seq;
  seq.reserve(ell_max);
  std::vector<double> lx(x.begin(), x.end());
  for (int l = 1; l <= ell_max; ++l) {
    for (std::size_t a = 0; a < lx.size(); ++a) lx[a] = l * x[a];
    seq.push_back(std::exp(w.log_eval(lx) / l));
  }
  return seq;
}

ConditionReport check_grs_via_limit(const Weight& w, const ScanParams& p) {
  std::vector<std::vector<double>> dirs;
  for (int a = 0; a < w.dim(); ++a) {
    dirs.push_back(axis_point(w.dim(), a, 1.0));
    dirs.push_back(axis_point(w.dim(), a, -1.0));
  }
  return check_grs_via_limit(w, dirs, p.ell_max, p.tol, p.decay_ratio);
}

ConditionReport check_grs_via_limit(const Weight& w,
                                    const std::vector<std::vector<double>>& directions,
                                    int ell_max, double tol, double decay_ratio) {
  if (directions.empty()) throw std::invalid_argument("directions must be non-empty");
  ConditionReport rep;
  rep.scan_radius = static_cast<double>(ell_max);
  rep.tolerance = tol;

  bool all_pass = true;
  for (const auto& dir : directions) {
    auto seq = grs_limit_sequence(w, dir, ell_max);
    LimitTrace t = limit_trace(seq);
    rep.note("endpoint", t.endpoint);
    rep.note("log_ratio", t.log_ratio);

    Verdict v;
    if (t.tail_non_increasing && std::abs(t.endpoint - 1.0) <= tol)
      v = Verdict::pass;
    else if (t.endpoint >= 1.0 + 10.0 * tol && t.log_ratio > decay_ratio)
      v = Verdict::fail;
    else if (t.tail_non_increasing && t.log_ratio <= decay_ratio)
      v = Verdict::pass;
    else
      v = Verdict::inconclusive;

    if (v == Verdict::fail) {
      rep.verdict = Verdict::fail;
      rep.witness = Witness{{dir}, {t.endpoint}};
      return rep;
    }
    if (v != Verdict::pass) all_pass = false;
  }
  rep.verdict = all_pass ? Verdict::pass : Verdict::inconclusive;
  return rep;
}

ConditionReport check_grs_via_subexp(const Weight& w, const ScanParams& p) {
  return check_grs_via_subexp(w, p.eps_list, p.radius, p.step, p.decay_ratio);
}

ConditionReport check_grs_via_subexp(const Weight& w, const std::vector<double>& eps_list,
                                     double radius, double step, double decay_ratio) {
  if (eps_list.empty()) throw std::invalid_argument("eps_list must be non-empty");
  ConditionReport rep;
  rep.scan_radius = radius;
  rep.tolerance = 0.0;

  std::vector<AxisTrace> traces;
  std::vector<SlopeTrend> trends;
  for (int a = 0; a < w.dim(); ++a) {
    traces.push_back(axis_trace(w, a, radius, step));
    trends.push_back(slope_trend(traces.back()));
  }

  bool all_pass = true;
  for (double eps : eps_list) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps values must be positive");
    Verdict eps_verdict = Verdict::pass;
    double c_eps = 0.0;
    int fail_axis = -1;
    for (int a = 0; a < w.dim(); ++a) {
      const AxisTrace& t = traces[a];
      double gmax = -std::numeric_limits<double>::infinity();
      double last_improvement = 0.0;
      for (std::size_t i = 0; i < t.x.size(); ++i) {
        double g = t.u[i] - eps * t.x[i];
        if (g > gmax + kSlack) {
          gmax = g;
          last_improvement = t.x[i];
        }
      }
      c_eps = std::max(c_eps, gmax);
      bool stagnant = last_improvement <= radius / 2.0;
      bool draining = trends[a].ratio <= decay_ratio;

      Verdict v;
      if (stagnant || draining)
        v = Verdict::pass;
      else if (trends[a].outer > eps)
        v = Verdict::fail;
      else
        v = Verdict::inconclusive;

      if (v == Verdict::fail) {
        eps_verdict = Verdict::fail;
        fail_axis = a;
        break;
      }
      if (v == Verdict::inconclusive && eps_verdict == Verdict::pass)
        eps_verdict = Verdict::inconclusive;
    }

    rep.note("eps", eps);
    rep.note("C", std::exp(c_eps));
    rep.note("slope_outer", trends[0].outer);
    rep.note("slope_ratio", trends[0].ratio);

    if (eps_verdict == Verdict::fail) {
      rep.verdict = Verdict::fail;
      const AxisTrace& t = traces[fail_axis];
      double xb = t.x.back();
      rep.note("witness_eps", eps);
      rep.witness = Witness{{axis_point(w.dim(), fail_axis, xb)}, {t.u.back() - eps * xb}};
      return rep;
    }
    if (eps_verdict != Verdict::pass) all_pass = false;
  }
  rep.verdict = all_pass ? Verdict::pass : Verdict::inconclusive;
  return rep;
}

ConditionReport check_moderate(const Weight& omega, const Weight& v, double radius,
                               double step) {
  if (omega.dim() != v.dim())
    throw std::invalid_argument("moderate check needs weights of equal dim");
  auto pts = ball_grid(omega.dim(), radius, step);
  std::vector<double> log_omega(pts.size()), log_v(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    log_omega[i] = omega.log_eval(pts[i].x);
    log_v[i] = v.log_eval(pts[i].x);
  }

  int max_shell = 0;
  for (const auto& p : pts) max_shell = std::max(max_shell, p.shell);

  double running = -std::numeric_limits<double>::infinity();
  double running_at_mid = running;
  std::size_t arg_i = 0, arg_j = 0;
  std::vector<double> sum(omega.dim());
  for (int shell = 0; shell <= max_shell; ++shell) {
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (pts[i].shell > shell) continue;
      for (std::size_t j = 0; j < pts.size(); ++j) {
        if (std::max(pts[i].shell, pts[j].shell) != shell) continue;
        for (int a = 0; a < omega.dim(); ++a) sum[a] = pts[i].x[a] + pts[j].x[a];
        double log_ratio = omega.log_eval(sum) - log_omega[i] - log_v[j];
        if (log_ratio > running) {
          running = log_ratio;
          arg_i = i;
          arg_j = j;
        }
      }
    }
    if (shell == max_shell / 2) running_at_mid = running;
  }

  ConditionReport rep;
  rep.scan_radius = radius;
  rep.tolerance = 1e-9;
  rep.note("C", std::exp(running));
  rep.note("C_mid_scan", std::exp(running_at_mid));
  double drift = running - running_at_mid;
  if (drift <= 1e-9) {
    rep.verdict = Verdict::pass;
  } else if (drift >= std::log(1.01)) {
    rep.verdict = Verdict::fail;
    rep.witness = Witness{{pts[arg_i].x, pts[arg_j].x}, {std::exp(running)}};
  } else {
    rep.verdict = Verdict::inconclusive;
  }
  return rep;
}

ExpEnvelope min_exp_envelope(const Weight& w, double radius, double step) {
  double band_lo = radius / 2.0;
  ExpEnvelope env;
  env.rate = 0.0;
  int band_points = 0;
  std::vector<AxisTrace> traces;
  for (int a = 0; a < w.dim(); ++a) {
    traces.push_back(axis_trace(w, a, radius, step));
    const AxisTrace& t = traces.back();
    for (std::size_t i = 1; i < t.x.size(); ++i) {
      if (t.x[i] < band_lo - 1e-9) continue;
      ++band_points;
      env.rate = std::max(env.rate, t.u[i] / t.x[i]);
    }
  }
  if (band_points < 16)
    throw std::invalid_argument("envelope scan needs at least 16 outer-band grid points");
  double log_c = 0.0;
  for (const auto& t : traces)
    for (std::size_t i = 0; i < t.x.size(); ++i)
      log_c = std::max(log_c, t.u[i] - env.rate * t.x[i]);
  env.amplitude = std::exp(log_c);
  return env;
}

SeqWeightsResult seq_weights_condition(const std::vector<Weight>& ws,
                                       const std::vector<double>& eps_list, int ell_max,
                                       double radius) {
  if (ws.empty()) throw std::invalid_argument("weight sequence must be non-empty");
  if (eps_list.empty()) throw std::invalid_argument("eps_list must be non-empty");
  const int dim = ws.front().dim();
  for (const auto& w : ws)
    if (w.dim() != dim) throw std::invalid_argument("weight sequence must share dim");

  const double step = 0.5;
  const double tol = 0.01;
  const double decay_ratio = 0.98;

  // Monotonicity precondition: w_{n+1} <= w_n pointwise on the axis grid.
  for (int a = 0; a < dim; ++a) {
    auto prev = axis_trace(ws[0], a, radius, step);
    for (std::size_t n = 1; n < ws.size(); ++n) {
      auto cur = axis_trace(ws[n], a, radius, step);
      for (std::size_t i = 0; i < cur.u.size(); ++i)
        if (cur.u[i] > prev.u[i] + 1e-12)
          throw std::invalid_argument("weight sequence is not pointwise non-increasing");
      prev = std::move(cur);
    }
  }

  const std::size_t last = ws.size() - 1;
  const std::size_t mid = ws.size() >= 2 ? ws.size() / 2 - 1 : 0;

  // cond1: inf over n of the per-direction limit, with trend extrapolation
  // across n (the list is a finite truncation of the sequence).
  ConditionReport cond1;
  cond1.scan_radius = static_cast<double>(ell_max);
  cond1.tolerance = tol;
  bool c1_all_pass = true;
  for (int a = 0; a < dim && cond1.verdict != Verdict::fail; ++a) {
    std::vector<double> est(ws.size());
    auto dir = axis_point(dim, a, 1.0);
    for (std::size_t n = 0; n < ws.size(); ++n) {
      auto seq = grs_limit_sequence(ws[n], dir, ell_max);
      LimitTrace t = limit_trace(seq);
      est[n] = (t.tail_non_increasing && t.log_ratio <= decay_ratio) ? 1.0 : t.endpoint;
      if (a == 0) cond1.note("limit_estimate", est[n]);
    }
    double m = *std::min_element(est.begin(), est.end());
    double trend = 1.0;
    if (ws.size() >= 2 && est[mid] > 1.0 + kSlack)
      trend = (est[last] - 1.0) / (est[mid] - 1.0);
    if (a == 0) cond1.note("n_trend", trend);

    Verdict v;
    if (m <= 1.0 + tol)
      v = Verdict::pass;
    else if (est[last] <= est[mid] + kSlack && trend <= 0.9)
      v = Verdict::pass;
    else if (m >= 1.0 + 10.0 * tol && trend > decay_ratio)
      v = Verdict::fail;
    else
      v = Verdict::inconclusive;

    if (v == Verdict::fail) {
      cond1.verdict = Verdict::fail;
      cond1.witness = Witness{{dir}, {m}};
    } else if (v != Verdict::pass) {
      c1_all_pass = false;
    }
  }
  if (cond1.verdict != Verdict::fail)
    cond1.verdict = c1_all_pass ? Verdict::pass : Verdict::inconclusive;

  // cond2: for each eps, some n must make w_n e^{-eps|x|} bounded; when no
  // listed n is, extrapolate from how fast the slope excess drains with n.
  ConditionReport cond2;
  cond2.scan_radius = radius;
  cond2.tolerance = 0.0;
  bool c2_all_pass = true;

  std::vector<char> bounded(ws.size(), 0);
  std::vector<double> slope(ws.size(), 0.0);
  for (std::size_t n = 0; n < ws.size(); ++n) {
    bool all_axes_bounded = true;
    double worst_slope = 0.0;
    for (int a = 0; a < dim; ++a) {
      AxisTrace t = axis_trace(ws[n], a, radius, step);
      SlopeTrend s = slope_trend(t);
      // Boundedness heuristic independent of eps: log w flat on the outer
      // half, or its slope still contracting octave over octave.
      double u_drift = t.u.back() - t.u[t.u.size() / 2];
      bool flat = u_drift <= kSlack;
      bool draining = s.ratio <= decay_ratio;
      if (!(flat || draining)) all_axes_bounded = false;
      worst_slope = std::max(worst_slope, s.outer);
    }
    bounded[n] = all_axes_bounded ? 1 : 0;
    slope[n] = worst_slope;
  }

  for (double eps : eps_list) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps values must be positive");
    Verdict v = Verdict::inconclusive;
    bool direct = false;
    for (std::size_t n = 0; n < ws.size(); ++n) {
      if (bounded[n] || slope[n] <= eps + kSlack) {
        direct = true;
        break;
      }
    }
    double ex_last = std::max(0.0, slope[last] - eps);
    double ex_mid = std::max(0.0, slope[mid] - eps);
    double trend = ex_mid > 1e-15 ? ex_last / ex_mid : (ex_last > 1e-15 ? 2.0 : 0.0);
    if (direct)
      v = Verdict::pass;
    else if (trend <= 0.9)
      v = Verdict::pass;
    else if (trend >= decay_ratio && ex_last > 1e-15)
      v = Verdict::fail;

    cond2.note("eps", eps);
    cond2.note("excess_last", ex_last);
    cond2.note("excess_trend", trend);

    if (v == Verdict::fail) {
      cond2.verdict = Verdict::fail;
      cond2.note("witness_eps", eps);
      AxisTrace t = axis_trace(ws[last], 0, radius, step);
      cond2.witness =
          Witness{{axis_point(dim, 0, t.x.back())}, {t.u.back() - eps * t.x.back()}};
      break;
    }
    if (v != Verdict::pass) c2_all_pass = false;
  }
  if (cond2.verdict != Verdict::fail)
    cond2.verdict = c2_all_pass ? Verdict::pass : Verdict::inconclusive;

  return {std::move(cond1), std::move(cond2)};
}

std::vector<Weight> builtin_battery() {
  std::vector<Weight> b;
  b.push_back(Weight::constant());
  b.push_back(Weight::polynomial(0.0));
  b.push_back(Weight::polynomial(1.0));
  b.push_back(Weight::polynomial(5.0));
  for (double c : {0.5, 2.0})
    for (double s : {0.3, 0.5, 0.9}) b.push_back(Weight::subexp(c, s));
  b.push_back(Weight::subexp(0.1, 1.0));
  b.push_back(Weight::subexp(1.0, 1.0));
  b.push_back(Weight::product({Weight::polynomial(5.0), Weight::subexp(0.5, 0.5)}));
  b.push_back(Weight::product({Weight::polynomial(1.0), Weight::subexp(2.0, 0.9)}));
  return b;
}

std::vector<Weight> builtin_battery_grs() {
  std::vector<Weight> b;
  b.push_back(Weight::constant());
  b.push_back(Weight::polynomial(0.0));
  b.push_back(Weight::polynomial(1.0));
  b.push_back(Weight::polynomial(5.0));
  for (double c : {0.5, 2.0})
    for (double s : {0.3, 0.5, 0.9}) b.push_back(Weight::subexp(c, s));
  b.push_back(Weight::product({Weight::polynomial(5.0), Weight::subexp(0.5, 0.5)}));
  b.push_back(Weight::product({Weight::polynomial(1.0), Weight::subexp(2.0, 0.9)}));
  return b;
}

std::vector<Weight> default_battery_2d() {
  return {Weight::constant(2), Weight::polynomial(2.0, 2), Weight::polynomial(4.0, 2),
          Weight::subexp(1.0, 0.5, 2), Weight::subexp(0.5, 0.9, 2)};
}

}  // namespace grslab::weightlab
