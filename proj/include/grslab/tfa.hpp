#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "grslab/report.hpp"
#include "grslab/seqspace.hpp"
#include "grslab/weight.hpp"

namespace grslab::tfa {

using Complex = std::complex<double>;

/// Complex samples on the uniform grid -R, -R+h, ..., R.
struct SampledSignal {
  double extent = 0.0;   // R
  double spacing = 0.0;  // h
  std::vector<Complex> samples;
  std::string label;

  SampledSignal() = default;
  SampledSignal(double R, double h, std::vector<Complex> values, std::string name = "");

  template <typename Fn>
  static SampledSignal from_fn(double R, double h, Fn&& fn, std::string name = "") {
    int n = static_cast<int>(std::llround(2.0 * R / h)) + 1;
    std::vector<Complex> v(n);
    for (int i = 0; i < n; ++i) v[i] = fn(-R + i * h);
    return SampledSignal(R, h, std::move(v), std::move(name));
  }

  int size() const { return static_cast<int>(samples.size()); }
  double x_at(int i) const { return -extent + i * spacing; }
};

/// V(x_m, xi_n) on the product grid; values stored x-major.
struct STFTGrid {
  double spacing_x = 0.0, spacing_xi = 0.0;
  double extent_x = 0.0, extent_xi = 0.0;
  int nx = 0, nxi = 0;
  std::vector<Complex> values;
  std::string window_id;

  Complex at(int m, int n) const { return values[static_cast<std::size_t>(m) * nxi + n]; }
  Complex& at(int m, int n) { return values[static_cast<std::size_t>(m) * nxi + n]; }
  double x_at(int m) const { return -extent_x + m * spacing_x; }
  double xi_at(int n) const { return -extent_xi + n * spacing_xi; }
};

/// Trapezoid discretization of (2 pi)^{-1/2} int f(x) e^{-i x xi} dx on the
/// input's own grid.
SampledSignal dft(const SampledSignal& f);

/// Trapezoid discretization of
///   V(x, xi) = (2 pi)^{-1/2} int f(y) conj(phi(y - x)) e^{-i y xi} dy
/// with the window translated by whole sample steps (h_x must be a multiple
/// of the signal spacing).  Columns are computed independently (parallelized
/// under the GRSLAB_THREADS cap) and deterministically.
STFTGrid stft(const SampledSignal& f, const SampledSignal& phi, double h_x, double h_xi,
              double R_x, double R_xi);

/// Mixed-norm Riemann discretization of the weighted (p, q) norm of V;
/// sup over grid points replaces the corresponding integral when p or q is
/// infinite.  omega must live on R^2.
double modulation_norm(const STFTGrid& V, const Weight& omega, double p, double q);

/// Per-unit-cube p-integrals of |V|: value at n is the Riemann p-integral
/// over [n1, n1+1) x [n2, n2+1), to the power 1/p (cube sup for p = inf).
/// Grid spacings must divide 1 exactly so cubes align with grid cells.
struct CubeCoeffSeq {
  double p = 1.0;
  seqspace::LatticeSeq values{2, 1};
};
CubeCoeffSeq cube_coefficients(const STFTGrid& V, double p);

struct StftParams {
  double h_x = 0.25, h_xi = 0.25;
  double R_x = 8.0, R_xi = 8.0;
};

/// Nested-window verdict on the weighted cube-coefficient sequence.
seqspace::TailVerdict cube_membership(const CubeCoeffSeq& cubes, const Weight& omega,
                                      int windows = 4);

/// STFT -> cube coefficients -> tail probe; summable reads as "finite".
seqspace::TailVerdict membership_probe_modulation(const SampledSignal& f,
                                                  const SampledSignal& phi,
                                                  const Weight& omega, double p,
                                                  const StftParams& grid = {},
                                                  int windows = 4);

/// Finite Hermite-basis combination sum c_m h_m with exact derivatives via
/// the recurrence h_m' = sqrt(m/2) h_{m-1} - sqrt((m+1)/2) h_{m+1}.
class GSFunction {
 public:
  explicit GSFunction(std::vector<double> coeffs);
  static GSFunction hermite(int m);

  double eval(double x) const;
  GSFunction derivative() const;
  int order() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<double>& coeffs() const { return coeffs_; }

  static constexpr int kMaxOrder = 64;

 private:
  struct Unchecked {};
  GSFunction(Unchecked, std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {}

  std::vector<double> coeffs_;
};

/// L^2-normalized Hermite function h_m(x).
double hermite_eval(int m, double x);

inline constexpr int kMaxSeminormOrder = 12;

/// sup over alpha <= alpha_max, beta <= beta_max and grid |x| <= R of
///   |x^beta f^(alpha)(x)| / (h^{alpha+beta} alpha!^s beta!^s),
/// with the quotient assembled in the log domain.
double gs_seminorm(const GSFunction& f, double s, double h, int alpha_max, int beta_max,
                   double R, double h_x);

struct GsProbeParams {
  int order_lo = 6;
  int order_hi = 12;
  double R = 10.0;
  double h_x = 0.05;
  double stab_tol = 0.05;  // relative growth allowed between truncation orders
};

struct GsProbeResult {
  bool member = false;
  double h_min = 0.0;  // smallest stabilizing h (0 when non-member)
  std::vector<std::pair<double, double>> seminorms_lo;  // (h, value at order_lo)
  std::vector<std::pair<double, double>> seminorms_hi;  // (h, value at order_hi)
};

/// Membership verdict for the union over h of the seminorm balls: member iff
/// the seminorm stops growing (within stab_tol) between the two truncation
/// orders at some h in the increasing grid.  Growth detection needs h below
/// the function's critical scale; the truncation cap hides growth that only
/// starts at orders beyond it.
GsProbeResult gs_membership_probe(const GSFunction& f, double s,
                                  const std::vector<double>& h_grid,
                                  const GsProbeParams& params = {});

struct TestFunction {
  std::string id;
  SampledSignal samples;
  std::optional<GSFunction> hermite;
};

struct ModspaceRow {
  std::string fn_id;
  Verdict gs1 = Verdict::inconclusive;      // seminorm probe at s = 1
  Verdict all_grs = Verdict::inconclusive;  // finite for every battery weight
  Verdict some_eps = Verdict::inconclusive; // finite for some v_eps
  double unweighted_norm = 0.0;             // modulation norm at (p, q), omega = 1
  std::vector<std::pair<std::string, seqspace::TailVerdict>> per_weight;
  std::vector<std::pair<std::string, seqspace::TailVerdict>> per_eps;
};

struct ModspaceReport {
  std::vector<ModspaceRow> rows;
  int decisive_rows = 0;   // rows where all_grs and some_eps are decisive
  int agreeing_rows = 0;
  bool consistent = true;  // all_grs tracks some_eps on decisive rows
};

/// Probes the intersection-over-admissible-weights identity on a finite
/// function battery.  Battery members must pass both growth checks.
ModspaceReport modspace_identity_experiment(const std::vector<TestFunction>& test_fns,
                                            const std::vector<Weight>& grs_battery_2d,
                                            const std::vector<double>& eps_list, double p,
                                            double q, const StftParams& grid = {});

std::vector<TestFunction> shipped_test_functions(double R = 12.0, double h = 0.05);
SampledSignal default_window(double R = 12.0, double h = 0.05);
SampledSignal wide_window(double R = 12.0, double h = 0.05);
/// Default eps values for the modulation experiments; matched to the default
/// grid extent (small eps cannot be resolved on a +-8 window).
std::vector<double> default_modspace_eps();

}  // namespace grslab::tfa
