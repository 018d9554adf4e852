#include "esoc/core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace esoc {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::negative_lambda: return "negative_lambda";
    case ErrorCode::no_consistent_pattern: return "no_consistent_pattern";
    case ErrorCode::solver_failure: return "solver_failure";
    case ErrorCode::internal_inconsistency: return "internal_inconsistency";
  }
  return "unknown";
}

ConeDims::ConeDims(std::size_t p, std::size_t q) : p_(p), q_(q) {
  if (p == 0 || q == 0) {
    throw Error(ErrorCode::invalid_argument,
                "cone dimensions require p >= 1 and q >= 1, got p=" +
                    std::to_string(p) + " q=" + std::to_string(q));
  }
}

namespace {

void require_finite(std::span<const double> v, const char* block) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw Error(ErrorCode::invalid_argument,
                  std::string("non-finite entry in ") + block + " block");
    }
  }
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double scaled_square_sum(std::span<const double> v, double scale) {
  double s = 0.0;
  for (double x : v) {
    const double r = x / scale;
    s += r * r;
  }
  return s;
}

}  // namespace

AmbientPoint::AmbientPoint(Vector z, Vector w) : z_(std::move(z)), w_(std::move(w)) {
  ConeDims(z_.size(), w_.size());
  require_finite(z_, "z");
  require_finite(w_, "w");
}

AmbientPoint AmbientPoint::zero(const ConeDims& dims) {
  return AmbientPoint(Vector(dims.p(), 0.0), Vector(dims.q(), 0.0));
}

double AmbientPoint::w_norm() const { return stable_norm(w_); }

double AmbientPoint::norm() const { return stable_norm(z_, w_); }

Vector pos_part(std::span<const double> v) {
  Vector out(v.size());
  std::transform(v.begin(), v.end(), out.begin(),
                 [](double x) { return x > 0.0 ? x : 0.0; });
  return out;
}

Vector neg_part(std::span<const double> v) {
  Vector out(v.size());
  std::transform(v.begin(), v.end(), out.begin(),
                 [](double x) { return x < 0.0 ? -x : 0.0; });
  return out;
}

double sum(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::dimension_mismatch, "dot: length mismatch");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double stable_norm(std::span<const double> v) {
  const double scale = max_abs(v);
  if (scale == 0.0) return 0.0;
  return scale * std::sqrt(scaled_square_sum(v, scale));
}

double stable_norm(std::span<const double> a, std::span<const double> b) {
  const double scale = std::max(max_abs(a), max_abs(b));
  if (scale == 0.0) return 0.0;
  return scale * std::sqrt(scaled_square_sum(a, scale) + scaled_square_sum(b, scale));
}

void require_same_dims(const AmbientPoint& a, const AmbientPoint& b) {
  if (a.z().size() != b.z().size() || a.w().size() != b.w().size()) {
    throw Error(ErrorCode::dimension_mismatch,
                "points live in different spaces: (" + std::to_string(a.z().size()) +
                    "," + std::to_string(a.w().size()) + ") vs (" +
                    std::to_string(b.z().size()) + "," +
                    std::to_string(b.w().size()) + ")");
  }
}

double dot(const AmbientPoint& a, const AmbientPoint& b) {
  require_same_dims(a, b);
  return dot(a.z(), b.z()) + dot(a.w(), b.w());
}

namespace {

template <class Op>
Vector zip(std::span<const double> a, std::span<const double> b, Op op) {
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = op(a[i], b[i]);
  return out;
}

}  // namespace

AmbientPoint operator+(const AmbientPoint& a, const AmbientPoint& b) {
  require_same_dims(a, b);
  return AmbientPoint(zip(a.z(), b.z(), std::plus<>{}), zip(a.w(), b.w(), std::plus<>{}));
}

AmbientPoint operator-(const AmbientPoint& a, const AmbientPoint& b) {
  require_same_dims(a, b);
  return AmbientPoint(zip(a.z(), b.z(), std::minus<>{}),
                      zip(a.w(), b.w(), std::minus<>{}));
}

AmbientPoint operator-(const AmbientPoint& a) { return -1.0 * a; }

AmbientPoint operator*(double t, const AmbientPoint& a) {
  Vector z(a.z().begin(), a.z().end());
  Vector w(a.w().begin(), a.w().end());
  for (double& x : z) x *= t;
  for (double& x : w) x *= t;
  return AmbientPoint(std::move(z), std::move(w));
}

Membership in_L(const AmbientPoint& a, double tol) {
  const auto z = a.z();
  const double margin = *std::min_element(z.begin(), z.end()) - a.w_norm();
  return {margin >= -tol * (1.0 + a.norm()), margin};
}

Membership in_M(const AmbientPoint& a, double tol) {
  const auto z = a.z();
  const double margin =
      std::min(*std::min_element(z.begin(), z.end()), sum(z) - a.w_norm());
  return {margin >= -tol * (1.0 + a.norm()), margin};
}

double MoreauCertificate::max_residual() const {
  return std::max({decomposition_residual, orthogonality_residual, primal_feasibility,
                   dual_feasibility});
}

bool MoreauCertificate::passes(double tau) const {
  return max_residual() <= tau * (1.0 + original_norm);
}

MoreauCertificate moreau_certificate(const AmbientPoint& original,
                                     const AmbientPoint& primal,
                                     const AmbientPoint& dual) {
  require_same_dims(original, primal);
  require_same_dims(original, dual);

  MoreauCertificate cert;
  cert.decomposition_residual = (original - primal + dual).norm();
  cert.orthogonality_residual = std::abs(dot(primal, dual));
  cert.primal_feasibility = std::max(0.0, -in_L(primal).margin);
  cert.dual_feasibility = std::max(0.0, -in_M(dual).margin);
  cert.original_norm = original.norm();
  return cert;
}

}  // namespace esoc
