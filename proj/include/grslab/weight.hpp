#pragma once

#include <array>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace grslab {

/// Positive, even weight function on R^d (d = 1 or 2).
///
/// Families:
///   constant                    w(x) = 1
///   polynomial(r)               w(x) = (1 + |x|)^r,        r >= 0
///   subexp(c, s)                w(x) = exp(c |x|^s),       c >= 0, 0 <= s <= 1
///   product(factors)            pointwise product of weights of equal dim
///   tabulated(table)            log-linear interpolation on a symmetric
///                               uniform grid; no extrapolation outside the hull
///
/// All evaluation happens in the log domain: exp(c|x|) at |x| ~ 1e4 would
/// overflow long before the scans that need it are done.  |x| is Euclidean.
/// Weights are immutable after construction and cheap to copy.
class Weight {
 public:
  enum class Family { constant, polynomial, subexp, product, tabulated };

  /// Tabulated values on the centered uniform grid {-n..n} (per axis) with
  /// the given spacing.  `values` holds w > 0 in row-major axis order for
  /// dim = 2, plain order for dim = 1.  Evenness is enforced at construction
  /// by symmetrizing: w(x) <- (w(x) + w(-x)) / 2.
  struct Table {
    int dim = 1;
    std::array<int, 2> half_count{0, 0};
    std::array<double, 2> spacing{1.0, 1.0};
    std::vector<double> values;
  };

  static Weight constant(int dim = 1);
  static Weight polynomial(double r, int dim = 1);
  static Weight subexp(double c, double s, int dim = 1);
  static Weight product(std::vector<Weight> factors);
  static Weight tabulated(Table table);

  /// Parses the compact literal grammar used by reports and the CLI:
  ///   constant | polynomial:r=2 | subexp:c=0.5,s=0.9 | tabulated:<csv path>
  /// with an optional dim=2 key for parametric families, and products written
  /// as product:<factor>*<factor>.  "poly" is accepted for "polynomial".
  static Weight parse(const std::string& literal);

  double log_eval(std::span<const double> x) const;
  double eval(std::span<const double> x) const;
  /// Convenience for dim-1 weights (and axis values of radial families).
  double log_eval1(double x) const;
  double eval1(double x) const;

  int dim() const { return dim_; }
  Family family() const { return family_; }
  /// Largest axis radius at which evaluation is defined; +inf for
  /// parametric families.
  double hull_radius() const;
  /// The dim-1 weight t -> w(t e_axis).
  Weight axis_restrict(int axis) const;
  /// Canonical literal; parse(id()) reconstructs an equivalent weight.
  const std::string& id() const { return id_; }

 private:
  Weight() = default;

  Family family_ = Family::constant;
  int dim_ = 1;
  double r_ = 0.0;              // polynomial exponent
  double c_ = 0.0, s_ = 1.0;    // subexp parameters
  std::vector<Weight> factors_; // product family
  std::shared_ptr<const Table> table_;  // log-domain values after load
  std::string id_;

  double table_log_interp(std::span<const double> x) const;
};

}  // namespace grslab
