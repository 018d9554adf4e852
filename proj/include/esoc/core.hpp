#pragma once

// Ambient space R^p x R^q, the extended second order cone L, its dual M,
// and the Moreau decomposition certificate used to validate projections.
//
//   L = { (x,u) : x >= ||u|| e }
//   M = { (x,u) : <x,e> >= ||u||, x >= 0 }

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace esoc {

using Vector = std::vector<double>;

enum class ErrorCode {
  invalid_argument,
  dimension_mismatch,
  negative_lambda,
  no_consistent_pattern,
  solver_failure,
  internal_inconsistency,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ConeDims {
 public:
  /// Throws Error(invalid_argument) unless p >= 1 and q >= 1.
  ConeDims(std::size_t p, std::size_t q);

  std::size_t p() const noexcept { return p_; }
  std::size_t q() const noexcept { return q_; }

  friend bool operator==(const ConeDims&, const ConeDims&) = default;

 private:
  std::size_t p_;
  std::size_t q_;
};

/// A point (z, w) with z in R^p (order block) and w in R^q (norm block).
/// Entries are finite and both blocks are non-empty.
class AmbientPoint {
 public:
  AmbientPoint(Vector z, Vector w);

  /// Origin of R^p x R^q.
  static AmbientPoint zero(const ConeDims& dims);

  std::span<const double> z() const noexcept { return z_; }
  std::span<const double> w() const noexcept { return w_; }
  ConeDims dims() const { return ConeDims(z_.size(), w_.size()); }

  /// ||w||
  double w_norm() const;
  /// ||(z,w)||
  double norm() const;

 private:
  Vector z_;
  Vector w_;
};

// Elementwise kernels.

/// Componentwise max(v_i, 0), the projection onto the nonnegative orthant.
Vector pos_part(std::span<const double> v);
/// Componentwise max(-v_i, 0).
Vector neg_part(std::span<const double> v);

double sum(std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);

/// Euclidean norm, scaled by the max-abs entry before squaring so that
/// large entries do not overflow.
double stable_norm(std::span<const double> v);

/// Euclidean norm of the concatenation (a, b).
double stable_norm(std::span<const double> a, std::span<const double> b);

double dot(const AmbientPoint& a, const AmbientPoint& b);
AmbientPoint operator+(const AmbientPoint& a, const AmbientPoint& b);
AmbientPoint operator-(const AmbientPoint& a, const AmbientPoint& b);
AmbientPoint operator-(const AmbientPoint& a);
AmbientPoint operator*(double t, const AmbientPoint& a);

/// Throws Error(dimension_mismatch) when the shapes differ.
void require_same_dims(const AmbientPoint& a, const AmbientPoint& b);

struct Membership {
  bool member;
  /// Signed margin; negative means the point lies outside the cone.
  double margin;
};

/// Membership in L. Margin is min_i z_i - ||w||; passes iff
/// margin >= -tol * (1 + ||a||).
Membership in_L(const AmbientPoint& a, double tol = 0.0);

/// Membership in M. Margin is min(min_i z_i, <z,e> - ||w||); passes iff
/// margin >= -tol * (1 + ||a||).
Membership in_M(const AmbientPoint& a, double tol = 0.0);

struct MoreauCertificate {
  double decomposition_residual = 0.0;  // ||original - primal + dual||
  double orthogonality_residual = 0.0;  // |<primal, dual>|
  double primal_feasibility = 0.0;      // violation of primal in L
  double dual_feasibility = 0.0;        // violation of dual in M
  double original_norm = 0.0;           // ||original||

  double max_residual() const;

  /// True iff every residual is <= tau * (1 + ||original||).
  bool passes(double tau) const;
};

/// Residuals of the Moreau decomposition original = primal - dual with
/// primal in L, dual in M and primal orthogonal to dual. All four vanish
/// exactly when primal = P_L(original) and dual = P_M(-original).
MoreauCertificate moreau_certificate(const AmbientPoint& original,
                                     const AmbientPoint& primal,
                                     const AmbientPoint& dual);

}  // namespace esoc
