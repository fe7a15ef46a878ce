#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rtheta::classify {

struct ClassScores {
  std::string name;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;

  friend bool operator==(const ClassScores&, const ClassScores&) = default;
};

struct EvalReport {
  std::vector<ClassScores> classes;
  /// "micro avg", "macro avg", "weighted avg", "samples avg", in that order.
  std::vector<ClassScores> averages;
  /// Fraction of rows whose predicted mask equals the true mask; set for
  /// two-class reports.
  std::optional<double> accuracy;
  /// Number of precision/recall/F1 values that hit a zero denominator and
  /// were reported as 0.
  std::size_t zero_division = 0;
  std::size_t n_rows = 0;

  const ClassScores& average(std::string_view name) const;
  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

/// Scores predicted against true label masks over `class_names.size()` bits.
EvalReport evaluate(std::span<const std::uint32_t> predicted, std::span<const std::uint32_t> truth,
                    std::span<const std::string> class_names);

/// Binary task: labels 0/1 become one-hot masks over {negative, positive}.
EvalReport evaluate_binary(std::span<const int> predicted, std::span<const int> truth,
                           const std::string& negative_name, const std::string& positive_name);

/// Fixed-width text table: one row per class, then the averages and accuracy.
std::string format_report_table(const EvalReport& report, int digits = 2);

}  // namespace rtheta::classify
