#pragma once

// The discrete family of candidate complexity functions g(n) that measured
// metric series are fitted against.

#include <compare>
#include <cstdint>
#include <span>
#include <string_view>

namespace rtheta {

/// Function families, ordered by asymptotic growth. The numeric values are
/// the ordinals written into code embeddings and must never change.
enum class FamilyKind : int {
  LoglogPolynomial = 0,  // log2^p(log2 n)
  LogPolynomial = 1,     // log2^p(n)
  FractionalPower = 2,   // p^n, p < 1
  Polynomial = 3,        // n^p
  Power = 4,             // p^n, p > 1
  Factorial = 5,         // Gamma(n)
};

inline constexpr int kFamilyKindCount = 6;

struct CandidateBasis {
  FamilyKind kind = FamilyKind::LogPolynomial;
  double param = 0.0;

  /// True for the two members that reduce to g(n) = 1.
  constexpr bool is_constant() const noexcept {
    return param == 0.0 &&
           (kind == FamilyKind::LoglogPolynomial || kind == FamilyKind::LogPolynomial);
  }

  friend constexpr bool operator==(const CandidateBasis&, const CandidateBasis&) = default;
};

/// Number of members in the candidate grid.
inline constexpr std::size_t kGridSize = 50;

/// The 50 candidates in canonical order (family, then parameter ascending).
std::span<const CandidateBasis> candidate_grid() noexcept;

/// The basis every constant fit is reported as: LOG_POLYNOMIAL with p = 0.
inline constexpr CandidateBasis kConstantBasis{FamilyKind::LogPolynomial, 0.0};

/// Smallest n at which the basis is defined.
std::int64_t min_domain(const CandidateBasis& basis) noexcept;

enum class BasisStatus { ok, domain_error, overflow };

struct BasisValue {
  BasisStatus status = BasisStatus::ok;
  double value = 0.0;
};

/// Non-throwing evaluation used on the fitting hot path.
BasisValue try_evaluate_basis(const CandidateBasis& basis, std::int64_t n) noexcept;

/// g(n) for the basis. Throws DomainError below the basis domain and
/// OverflowError when the value does not fit a double.
double evaluate_basis(const CandidateBasis& basis, std::int64_t n);

constexpr int encode_feature_type(FamilyKind kind) noexcept { return static_cast<int>(kind); }

/// Inverse of encode_feature_type. Throws DomainError for ordinals outside [0, 5].
FamilyKind decode_feature_type(int ordinal);

/// Upper-case symbolic name, e.g. "LOG_POLYNOMIAL".
std::string_view to_string(FamilyKind kind) noexcept;

/// Inverse of to_string. Throws DomainError on unknown names.
FamilyKind family_kind_from_string(std::string_view name);

/// Maps both constant members onto kConstantBasis; identity otherwise.
constexpr CandidateBasis canonicalize(const CandidateBasis& b) noexcept {
  return b.is_constant() ? kConstantBasis : b;
}

/// Total order used for tie-breaking: family ordinal, then parameter.
/// Constant members compare equal to each other.
std::weak_ordering compare_simplicity(const CandidateBasis& a, const CandidateBasis& b) noexcept;

}  // namespace rtheta
