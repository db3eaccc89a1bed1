#include "lightons/conversion.h"

#include <algorithm>
#include <stdexcept>

namespace lightons {

namespace {
constexpr double kDegenerateGap = 1e-14;
}  // namespace

SurrogatePair surrogate_pair(const Vector& grad_f, const Vector& x, const Vector& y) {
  if (grad_f.size() != x.size() || x.size() != y.size()) {
    throw std::invalid_argument("surrogate_gradient: dimension mismatch");
  }
  SurrogatePair out{x, y, grad_f, grad_f, 0.0};
  const Vector gap = y - x;
  const double gap_norm = gap.norm();
  if (gap_norm < kDegenerateGap) return out;
  out.hinge_coeff = std::max(0.0, -grad_f.dot(gap)) / (gap_norm * gap_norm);
  if (out.hinge_coeff > 0.0) out.grad_g += out.hinge_coeff * gap;
  return out;
}

Vector surrogate_gradient(const Vector& grad_f, const Vector& x, const Vector& y) {
  return surrogate_pair(grad_f, x, y).grad_g;
}

double surrogate_value(const ConvexDomain& domain, const Vector& grad_f,
                       const Vector& x, const Vector& y, const Vector& w) {
  const Vector gap = y - x;
  const double gap_norm = gap.norm();
  double value = grad_f.dot(w);
  if (gap_norm < kDegenerateGap) return value;
  const double coeff = std::max(0.0, -grad_f.dot(gap)) / gap_norm;
  return value + coeff * (w - domain.project(w)).norm();
}

}  // namespace lightons
