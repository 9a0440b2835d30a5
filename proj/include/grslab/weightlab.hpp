#pragma once

#include <span>
#include <vector>

#include "grslab/report.hpp"
#include "grslab/weight.hpp"

namespace grslab::weightlab {

/// Shared scan defaults.  `decay_ratio` is the log-domain contraction
/// threshold that separates tails still draining to zero from tails that
/// have plateaued: a quantity whose outer-octave decrease is at most
/// decay_ratio times the previous octave's counts as decaying.
struct ScanParams {
  double radius = 1000.0;
  double step = 0.5;
  double tol = 0.01;        // closeness-to-1 target for limit checks
  double decay_ratio = 0.98;
  int ell_max = 10000;
  std::vector<double> eps_list = {1.0, 0.5, 0.1, 0.05, 0.01};
};

double eval_weight(const Weight& w, std::span<const double> x);

/// Scans x, y over the step-grid inside the ball of the given radius and
/// reports the largest log w(x+y) - log w(x) - log w(y).  Pass iff that
/// excess stays within tol (default 1e-9).
ConditionReport check_submultiplicative(const Weight& w, double radius, double step,
                                        double tol = 1e-9);

/// The sequence (w(l x)^{1/l})_{l=1..ell_max}, evaluated as
/// exp(log w(l x) / l).
std::vector<double> grs_limit_sequence(const Weight& w, std::span<const double> x,
                                       int ell_max);

/// Limit-form check: along each direction the sequence above must head to 1.
/// Per direction, with a = endpoint value and rho = contraction of
/// log-values between ell_max/2 and ell_max:
///   pass          |a - 1| <= tol with a non-increasing tail, or the tail is
///                 non-increasing and still contracting (rho <= decay_ratio)
///   fail          a >= 1 + 10 tol and the tail has plateaued
///   inconclusive  otherwise
/// Default directions are +-e_j.
ConditionReport check_grs_via_limit(const Weight& w, const ScanParams& p = {});
ConditionReport check_grs_via_limit(const Weight& w,
                                    const std::vector<std::vector<double>>& directions,
                                    int ell_max, double tol, double decay_ratio = 0.98);

/// Growth-form check: for each epsilon, scans g(x) = log w(x) - eps |x|
/// along the axes.  Per epsilon:
///   pass          the running max of g stops improving on the outer half of
///                 the scan, or the axis slope of log w is still contracting
///                 octave over octave (rho <= decay_ratio)
///   fail          g is still climbing at the boundary, the slope has
///                 plateaued, and it exceeds eps
///   inconclusive  otherwise
/// Reports C_eps = exp(max g) per epsilon.  Overall verdict: pass iff every
/// epsilon passes, fail iff any epsilon fails.
ConditionReport check_grs_via_subexp(const Weight& w, const ScanParams& p = {});
ConditionReport check_grs_via_subexp(const Weight& w, const std::vector<double>& eps_list,
                                     double radius, double step, double decay_ratio = 0.98);

/// Estimates C = sup omega(x+y) / (omega(x) v(y)) over the scan grid.  Pass
/// iff the running sup stabilizes over the outer shells.
ConditionReport check_moderate(const Weight& omega, const Weight& v, double radius,
                               double step);

struct ExpEnvelope {
  double rate = 0.0;       // c_hat: outer-band max of log w(x) / |x|
  double amplitude = 1.0;  // C_hat: exp(max over the grid of log w(x) - c_hat |x|)
};
ExpEnvelope min_exp_envelope(const Weight& w, double radius, double step);

/// The two conditions on a pointwise non-increasing list of weights:
/// cond1 tests inf_n lim_l w_n(l x)^{1/l} = 1, cond2 tests that each epsilon
/// admits some n with w_n(x) e^{-eps |x|} bounded.  Both use the same
/// trend-extrapolation in n that the single-weight checks use in l / x,
/// since the list is a finite truncation of the sequence.
struct SeqWeightsResult {
  ConditionReport cond1;
  ConditionReport cond2;
};
SeqWeightsResult seq_weights_condition(const std::vector<Weight>& ws,
                                       const std::vector<double>& eps_list, int ell_max,
                                       double radius);

/// The 14-weight scan battery: constant, (1+|x|)^r for r in {0,1,5},
/// exp(c|x|^s) over {0.5,2} x {0.3,0.5,0.9} and {0.1,1} x {1}, and two
/// products of members that satisfy the growth condition.
std::vector<Weight> builtin_battery();
/// The battery members that satisfy the limit condition (everything except
/// the two s = 1 exponentials).
std::vector<Weight> builtin_battery_grs();
/// Dim-2 battery used by the modulation-space experiments.
std::vector<Weight> default_battery_2d();

}  // namespace grslab::weightlab
