#include "rtheta/complexity_model.hpp"

#include <array>
#include <cfloat>
#include <cmath>
#include <string>

#include "rtheta/errors.hpp"

namespace rtheta {

namespace {

constexpr std::array<CandidateBasis, kGridSize> make_grid() {
  std::array<CandidateBasis, kGridSize> grid{};
  std::size_t i = 0;
  for (double p : {0.0, 1.0, 2.0, 3.0}) grid[i++] = {FamilyKind::LoglogPolynomial, p};
  for (int p = 0; p <= 10; ++p) grid[i++] = {FamilyKind::LogPolynomial, static_cast<double>(p)};
  for (double p : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9})
    grid[i++] = {FamilyKind::FractionalPower, p};
  for (double p : {1.0, 1.3, 1.5, 1.7, 2.0, 2.5, 2.7, 3.0, 3.5, 4.0, 4.5, 5.0, 5.5, 6.0, 7.0, 8.0,
                   9.0, 10.0})
    grid[i++] = {FamilyKind::Polynomial, p};
  for (double p : {1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 5.0}) grid[i++] = {FamilyKind::Power, p};
  grid[i++] = {FamilyKind::Factorial, 1.0};
  return grid;
}

constexpr auto kGrid = make_grid();

const double kLogMax = std::log(DBL_MAX);

// x^p with the convention 0^0 = 1, which keeps p = 0 members constant at
// the domain boundary.
double pow0(double x, double p) { return p == 0.0 ? 1.0 : std::pow(x, p); }

constexpr std::array<std::string_view, kFamilyKindCount> kNames = {
    "LOGLOG_POLYNOMIAL", "LOG_POLYNOMIAL", "FRACTIONAL_POWER", "POLYNOMIAL", "POWER", "FACTORIAL"};

}  // namespace

std::span<const CandidateBasis> candidate_grid() noexcept { return kGrid; }

std::int64_t min_domain(const CandidateBasis& basis) noexcept {
  return basis.kind == FamilyKind::LoglogPolynomial ? 2 : 1;
}

BasisValue try_evaluate_basis(const CandidateBasis& basis, std::int64_t n) noexcept {
  if (n < min_domain(basis)) return {BasisStatus::domain_error, 0.0};
  const auto x = static_cast<double>(n);
  switch (basis.kind) {
    case FamilyKind::LoglogPolynomial:
      return {BasisStatus::ok, pow0(std::log2(std::log2(x)), basis.param)};
    case FamilyKind::LogPolynomial:
      return {BasisStatus::ok, pow0(std::log2(x), basis.param)};
    case FamilyKind::Polynomial: {
      const double v = std::pow(x, basis.param);
      if (!std::isfinite(v)) return {BasisStatus::overflow, 0.0};
      return {BasisStatus::ok, v};
    }
    case FamilyKind::FractionalPower:
    case FamilyKind::Power:
      if (x * std::log(basis.param) > kLogMax) return {BasisStatus::overflow, 0.0};
      return {BasisStatus::ok, std::pow(basis.param, x)};
    case FamilyKind::Factorial:
      if (std::lgamma(x) > kLogMax) return {BasisStatus::overflow, 0.0};
      return {BasisStatus::ok, std::tgamma(x)};
  }
  return {BasisStatus::domain_error, 0.0};
}

double evaluate_basis(const CandidateBasis& basis, std::int64_t n) {
  const BasisValue v = try_evaluate_basis(basis, n);
  switch (v.status) {
    case BasisStatus::ok:
      return v.value;
    case BasisStatus::domain_error:
      throw DomainError(std::string(to_string(basis.kind)) + " is undefined at n=" +
                        std::to_string(n));
    case BasisStatus::overflow:
      break;
  }
  throw OverflowError(std::string(to_string(basis.kind)) + " overflows at n=" + std::to_string(n));
}

FamilyKind decode_feature_type(int ordinal) {
  if (ordinal < 0 || ordinal >= kFamilyKindCount)
    throw DomainError("feature type ordinal out of range: " + std::to_string(ordinal));
  return static_cast<FamilyKind>(ordinal);
}

std::string_view to_string(FamilyKind kind) noexcept {
  return kNames[static_cast<std::size_t>(encode_feature_type(kind))];
}

FamilyKind family_kind_from_string(std::string_view name) {
  for (int i = 0; i < kFamilyKindCount; ++i)
    if (kNames[static_cast<std::size_t>(i)] == name) return static_cast<FamilyKind>(i);
  throw DomainError("unknown feature type: " + std::string(name));
}

std::weak_ordering compare_simplicity(const CandidateBasis& a, const CandidateBasis& b) noexcept {
  const CandidateBasis ca = canonicalize(a);
  const CandidateBasis cb = canonicalize(b);
  if (auto c = encode_feature_type(ca.kind) <=> encode_feature_type(cb.kind); c != 0) return c;
  if (ca.param < cb.param) return std::weak_ordering::less;
  if (ca.param > cb.param) return std::weak_ordering::greater;
  return std::weak_ordering::equivalent;
}

}  // namespace rtheta
