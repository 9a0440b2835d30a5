#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace grslab {

enum class Verdict { pass, fail, inconclusive };

const char* to_string(Verdict v);

/// Point(s) and value(s) realizing the extremal quantity of a scan.
/// Re-evaluating the scanned expression at the recorded point reproduces
/// the recorded value.
struct Witness {
  std::vector<std::vector<double>> points;
  std::vector<double> values;
};

/// Outcome of a finite-scan condition check.  A fail verdict always carries
/// a witness.  `diagnostics` holds (name, value) pairs in deterministic scan
/// order; names may repeat (one entry per epsilon, per direction, ...).
struct ConditionReport {
  Verdict verdict = Verdict::inconclusive;
  std::optional<Witness> witness;
  double scan_radius = 0.0;
  double tolerance = 0.0;
  std::vector<std::pair<std::string, double>> diagnostics;

  void note(std::string name, double value) {
    diagnostics.emplace_back(std::move(name), value);
  }
  bool passed() const { return verdict == Verdict::pass; }
  bool failed() const { return verdict == Verdict::fail; }
};

}  // namespace grslab
