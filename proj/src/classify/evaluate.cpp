#include "rtheta/classify/evaluate.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <stdexcept>

namespace rtheta::classify {

namespace {

struct Ratio {
  double value;
  bool undefined;
};

Ratio safe_div(double num, double den) { return den == 0 ? Ratio{0.0, true} : Ratio{num / den, false}; }

struct Prf {
  double p, r, f;
};

Prf prf(double tp, double fp, double fn, std::size_t& zero_division) {
  const Ratio p = safe_div(tp, tp + fp);
  const Ratio r = safe_div(tp, tp + fn);
  const Ratio f = safe_div(2 * p.value * r.value, p.value + r.value);
  zero_division += p.undefined + r.undefined + f.undefined;
  return {p.value, r.value, f.value};
}

}  // namespace

const ClassScores& EvalReport::average(std::string_view name) const {
  for (const auto& a : averages)
    if (a.name == name) return a;
  throw std::out_of_range("no average named " + std::string(name));
}

EvalReport evaluate(std::span<const std::uint32_t> predicted, std::span<const std::uint32_t> truth,
                    std::span<const std::string> class_names) {
  if (predicted.size() != truth.size()) throw std::invalid_argument("prediction and truth lengths differ");
  const std::size_t k = class_names.size();
  if (k == 0 || k > 32) throw std::invalid_argument("class count must be in [1, 32]");
  const std::uint32_t keep = k == 32 ? ~0u : ((1u << k) - 1u);

  EvalReport report;
  report.n_rows = truth.size();
  std::vector<double> tp(k, 0), fp(k, 0), fn(k, 0);
  double samples_p = 0, samples_r = 0, samples_f = 0;
  std::size_t exact = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const std::uint32_t p = predicted[i] & keep, t = truth[i] & keep;
    exact += p == t;
    for (std::size_t c = 0; c < k; ++c) {
      const bool pc = (p >> c) & 1u, tc = (t >> c) & 1u;
      tp[c] += pc && tc;
      fp[c] += pc && !tc;
      fn[c] += !pc && tc;
    }
    const double inter = std::popcount(p & t);
    const Prf row = prf(inter, std::popcount(p) - inter, std::popcount(t) - inter, report.zero_division);
    samples_p += row.p;
    samples_r += row.r;
    samples_f += row.f;
  }

  std::size_t total_support = 0;
  double macro_p = 0, macro_r = 0, macro_f = 0, weighted_p = 0, weighted_r = 0, weighted_f = 0;
  for (std::size_t c = 0; c < k; ++c) {
    const Prf s = prf(tp[c], fp[c], fn[c], report.zero_division);
    const auto support = static_cast<std::size_t>(tp[c] + fn[c]);
    report.classes.push_back({class_names[c], s.p, s.r, s.f, support});
    total_support += support;
    macro_p += s.p;
    macro_r += s.r;
    macro_f += s.f;
    weighted_p += s.p * static_cast<double>(support);
    weighted_r += s.r * static_cast<double>(support);
    weighted_f += s.f * static_cast<double>(support);
  }

  double tp_all = 0, fp_all = 0, fn_all = 0;
  for (std::size_t c = 0; c < k; ++c) {
    tp_all += tp[c];
    fp_all += fp[c];
    fn_all += fn[c];
  }
  const Prf micro = prf(tp_all, fp_all, fn_all, report.zero_division);
  const double kk = static_cast<double>(k);
  const double ts = static_cast<double>(total_support);
  const double rows = truth.empty() ? 1.0 : static_cast<double>(truth.size());
  report.averages = {
      {"micro avg", micro.p, micro.r, micro.f, total_support},
      {"macro avg", macro_p / kk, macro_r / kk, macro_f / kk, total_support},
      {"weighted avg", ts == 0 ? 0.0 : weighted_p / ts, ts == 0 ? 0.0 : weighted_r / ts,
       ts == 0 ? 0.0 : weighted_f / ts, total_support},
      {"samples avg", samples_p / rows, samples_r / rows, samples_f / rows, total_support},
  };
  if (k == 2) report.accuracy = truth.empty() ? 0.0 : static_cast<double>(exact) / rows;
  return report;
}

EvalReport evaluate_binary(std::span<const int> predicted, std::span<const int> truth,
                           const std::string& negative_name, const std::string& positive_name) {
  if (predicted.size() != truth.size()) throw std::invalid_argument("prediction and truth lengths differ");
  std::vector<std::uint32_t> p(predicted.size()), t(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    p[i] = predicted[i] ? 2u : 1u;
    t[i] = truth[i] ? 2u : 1u;
  }
  const std::vector<std::string> names{negative_name, positive_name};
  return evaluate(p, t, names);
}

std::string format_report_table(const EvalReport& report, int digits) {
  std::size_t width = 12;
  for (const auto& c : report.classes) width = std::max(width, c.name.size());
  for (const auto& a : report.averages) width = std::max(width, a.name.size());
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%*s %10s %10s %10s %10s\n", static_cast<int>(width), "", "precision",
                "recall", "f1-score", "support");
  out += buf;
  auto line = [&](const ClassScores& s) {
    std::snprintf(buf, sizeof buf, "%*s %10.*f %10.*f %10.*f %10zu\n", static_cast<int>(width),
                  s.name.c_str(), digits, s.precision, digits, s.recall, digits, s.f1, s.support);
    out += buf;
  };
  for (const auto& c : report.classes) line(c);
  out += '\n';
  for (const auto& a : report.averages) line(a);
  if (report.accuracy) {
    std::snprintf(buf, sizeof buf, "%*s %10s %10s %10.*f %10zu\n", static_cast<int>(width), "accuracy", "",
                  "", digits, *report.accuracy, report.n_rows);
    out += buf;
  }
  return out;
}

}  // namespace rtheta::classify
