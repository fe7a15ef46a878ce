#pragma once

// Closed-form fits of metric-vs-size series against the candidate grid.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rtheta/complexity_model.hpp"

namespace rtheta {

/// One metric reading at input size n.
struct Sample {
  std::int64_t n = 1;
  double value = 0.0;

  friend bool operator==(const Sample&, const Sample&) = default;
};

/// (FEATURE_TYPE, FEATURE_CONFIG, INTERCEPT, R-VAL) for one metric.
struct FitQuadruple {
  FamilyKind feature_type = FamilyKind::LogPolynomial;
  double feature_config = 0.0;
  double intercept = 0.0;
  double r_val = 0.0;

  CandidateBasis basis() const noexcept { return {feature_type, feature_config}; }
  friend bool operator==(const FitQuadruple&, const FitQuadruple&) = default;
};

struct FitScore {
  /// RMS residual over mean |value|; 0 when every observation is 0.
  double nrmse = 0.0;
  /// Sum of squared residuals.
  double sse = 0.0;
  std::size_t n_points = 0;
};

enum class RejectReason {
  too_few_samples,
  zero_variance,
  overflow,
  non_positive_slope,
};

std::string_view to_string(RejectReason reason) noexcept;

struct CandidateFit {
  CandidateBasis basis;
  double r = 0.0;
  double intercept = 0.0;
  FitScore score;
};

/// Either a fit or the reason the candidate was rejected.
struct CandidateOutcome {
  std::optional<CandidateFit> fit;
  RejectReason reason = RejectReason::too_few_samples;

  explicit operator bool() const noexcept { return fit.has_value(); }
};

/// Least squares of value on g(n) over the samples inside the basis domain.
/// A constant basis reports r = mean(value), X = 0.
CandidateOutcome fit_candidate(std::span<const Sample> samples, const CandidateBasis& basis);

struct SelectOptions {
  /// Absolute NRMSE band inside which candidates count as tied.
  double tie_tolerance = 1e-9;
  /// Family-wise significance level of the constant-vs-growth F test.
  /// The best growing candidate replaces the constant model only when its
  /// SSE reduction is significant at this level (Bonferroni over the
  /// non-constant grid members).
  double constant_gate_alpha = 0.05;
};

struct Selection {
  FitQuadruple quadruple;
  FitScore score;
};

/// Fits every grid candidate and keeps the best one. Throws InsufficientData
/// when fewer than 3 distinct sizes are present.
Selection select_best(std::span<const Sample> samples, const SelectOptions& options = {});

/// Collapses repeated sizes to their median and sorts by n.
std::vector<Sample> aggregate_repeats(std::span<const Sample> samples);

}  // namespace rtheta
