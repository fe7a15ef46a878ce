#include "rtheta/fitter.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/distributions/students_t.hpp>

#include "rtheta/errors.hpp"

namespace rtheta {

namespace {

// Accumulations run in extended precision: grid members reach 1e60 and
// beyond while intercepts of order 1 must survive the subtraction.
using Wide = long double;

std::size_t count_distinct_n(std::span<const Sample> sorted_or_not) {
  std::vector<std::int64_t> ns;
  ns.reserve(sorted_or_not.size());
  for (const Sample& s : sorted_or_not) ns.push_back(s.n);
  std::sort(ns.begin(), ns.end());
  return static_cast<std::size_t>(std::unique(ns.begin(), ns.end()) - ns.begin());
}

FitScore score_residuals(std::span<const Wide> residuals, std::span<const Sample> used) {
  Wide sse = 0, abs_sum = 0;
  for (Wide r : residuals) sse += r * r;
  for (const Sample& s : used) abs_sum += std::fabs(static_cast<Wide>(s.value));
  const auto m = static_cast<Wide>(used.size());
  FitScore score;
  score.sse = static_cast<double>(sse);
  score.n_points = used.size();
  const Wide mean_abs = abs_sum / m;
  score.nrmse = mean_abs == 0 ? 0.0 : static_cast<double>(std::sqrt(sse / m) / mean_abs);
  return score;
}

CandidateOutcome reject(RejectReason reason) { return {std::nullopt, reason}; }

// Two-sided critical value of F(1, dof) at the Bonferroni-corrected level.
double constant_gate_threshold(double alpha, std::size_t dof) {
  constexpr double kGrowthMembers = static_cast<double>(kGridSize - 2);
  const boost::math::students_t dist(static_cast<double>(dof));
  const double t = boost::math::quantile(dist, 1.0 - alpha / (2.0 * kGrowthMembers));
  return t * t;
}

}  // namespace

std::string_view to_string(RejectReason reason) noexcept {
  switch (reason) {
    case RejectReason::too_few_samples:
      return "too_few_samples";
    case RejectReason::zero_variance:
      return "zero_variance";
    case RejectReason::overflow:
      return "overflow";
    case RejectReason::non_positive_slope:
      return "non_positive_slope";
  }
  return "unknown";
}

CandidateOutcome fit_candidate(std::span<const Sample> samples, const CandidateBasis& basis) {
  const std::int64_t lo = min_domain(basis);
  std::vector<Sample> used;
  used.reserve(samples.size());
  std::copy_if(samples.begin(), samples.end(), std::back_inserter(used),
               [lo](const Sample& s) { return s.n >= lo; });
  if (count_distinct_n(used) < 3) return reject(RejectReason::too_few_samples);

  const auto m = static_cast<Wide>(used.size());
  std::vector<Wide> residuals(used.size());
  Wide y_mean = 0;
  for (const Sample& s : used) y_mean += s.value;
  y_mean /= m;

  if (basis.is_constant()) {
    for (std::size_t i = 0; i < used.size(); ++i) residuals[i] = used[i].value - y_mean;
    return {CandidateFit{basis, static_cast<double>(y_mean), 0.0, score_residuals(residuals, used)},
            {}};
  }

  std::vector<Wide> g(used.size());
  Wide g_mean = 0;
  for (std::size_t i = 0; i < used.size(); ++i) {
    const BasisValue v = try_evaluate_basis(basis, used[i].n);
    if (v.status != BasisStatus::ok) return reject(RejectReason::overflow);
    g[i] = v.value;
    g_mean += g[i];
  }
  g_mean /= m;

  Wide sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < used.size(); ++i) {
    const Wide dg = g[i] - g_mean;
    sxx += dg * dg;
    sxy += dg * (used[i].value - y_mean);
  }
  if (!std::isfinite(sxx) || !std::isfinite(sxy)) return reject(RejectReason::overflow);
  if (sxx == 0) return reject(RejectReason::zero_variance);

  const Wide r = sxy / sxx;
  if (!(r > 0)) return reject(RejectReason::non_positive_slope);
  const Wide intercept = y_mean - r * g_mean;
  for (std::size_t i = 0; i < used.size(); ++i)
    residuals[i] = used[i].value - (r * g[i] + intercept);

  const double r_out = static_cast<double>(r);
  if (!(r_out > 0) || !std::isfinite(r_out)) return reject(RejectReason::non_positive_slope);
  return {CandidateFit{basis, r_out, static_cast<double>(intercept),
                       score_residuals(residuals, used)},
          {}};
}

Selection select_best(std::span<const Sample> samples, const SelectOptions& options) {
  std::vector<Sample> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end(), [](const Sample& a, const Sample& b) {
    return a.n != b.n ? a.n < b.n : a.value < b.value;
  });
  if (count_distinct_n(sorted) < 3)
    throw InsufficientData("need at least 3 distinct input sizes, got " +
                           std::to_string(count_distinct_n(sorted)));

  std::vector<CandidateFit> growth;
  for (const CandidateBasis& basis : candidate_grid()) {
    if (basis.is_constant()) continue;
    if (auto outcome = fit_candidate(sorted, basis)) growth.push_back(*outcome.fit);
  }

  const CandidateOutcome constant = fit_candidate(sorted, kConstantBasis);
  auto constant_selection = [&]() {
    if (constant) return Selection{{kConstantBasis.kind, 0.0, 0.0, constant.fit->r}, constant.fit->score};
    Wide mean = 0;
    for (const Sample& s : sorted) mean += s.value;
    mean /= static_cast<Wide>(sorted.size());
    return Selection{{kConstantBasis.kind, 0.0, 0.0, static_cast<double>(mean)}, {}};
  };
  if (growth.empty()) return constant_selection();

  double best_nrmse = growth.front().score.nrmse;
  for (const CandidateFit& f : growth) best_nrmse = std::min(best_nrmse, f.score.nrmse);
  const CandidateFit* best = nullptr;
  for (const CandidateFit& f : growth) {
    if (f.score.nrmse > best_nrmse + options.tie_tolerance) continue;
    if (best == nullptr || compare_simplicity(f.basis, best->basis) < 0) best = &f;
  }

  if (!constant) return {{best->basis.kind, best->basis.param, best->intercept, best->r}, best->score};

  // The constant model is nested in every growth model, so it can only lose
  // on raw error. Keep it unless the growth model is a tie-free improvement
  // that is also statistically significant on the same samples.
  if (constant.fit->score.nrmse <= best->score.nrmse + options.tie_tolerance)
    return constant_selection();

  std::vector<Sample> domain;
  std::copy_if(sorted.begin(), sorted.end(), std::back_inserter(domain),
               [lo = min_domain(best->basis)](const Sample& s) { return s.n >= lo; });
  const CandidateOutcome same_domain = fit_candidate(domain, kConstantBasis);
  const double sse_constant = same_domain ? same_domain.fit->score.sse : constant.fit->score.sse;
  const double sse_growth = best->score.sse;
  const std::size_t dof = best->score.n_points - 2;

  bool significant = sse_constant > sse_growth;
  if (significant && sse_growth > 0) {
    const double f_stat = (sse_constant - sse_growth) / (sse_growth / static_cast<double>(dof));
    significant = f_stat > constant_gate_threshold(options.constant_gate_alpha, dof);
  }
  if (!significant) return constant_selection();
  return {{best->basis.kind, best->basis.param, best->intercept, best->r}, best->score};
}

std::vector<Sample> aggregate_repeats(std::span<const Sample> samples) {
  std::vector<Sample> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end(), [](const Sample& a, const Sample& b) {
    return a.n != b.n ? a.n < b.n : a.value < b.value;
  });
  std::vector<Sample> out;
  for (auto first = sorted.begin(); first != sorted.end();) {
    auto last = std::find_if(first, sorted.end(), [n = first->n](const Sample& s) { return s.n != n; });
    const auto count = last - first;
    const auto mid = first + count / 2;
    const double median = count % 2 == 1 ? mid->value : (std::prev(mid)->value + mid->value) / 2.0;
    out.push_back({first->n, median});
    first = last;
  }
  return out;
}

}  // namespace rtheta
