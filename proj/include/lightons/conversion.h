#ifndef LIGHTONS_CONVERSION_H_
#define LIGHTONS_CONVERSION_H_

#include "lightons/domain.h"
#include "lightons/linalg.h"

namespace lightons {

// Improper-to-proper domain conversion with c_f = c_g = 1.
//
// The core learner plays y on an enlarged ball while the proper decision is
// x = Pi_X[y]. The surrogate gradient
//
//   grad_g = grad_f + ([-grad_f^T (y - x)]_+ / ||y - x||^2) (y - x)
//
// removes the component of grad_f that would push y further away from X. It
// satisfies ||grad_g|| <= ||grad_f|| and
// grad_f^T (x - u) <= grad_g^T (y - u) for every u in X.
inline constexpr double kConversionCf = 1.0;
inline constexpr double kConversionCg = 1.0;

struct SurrogatePair {
  Vector x;
  Vector y;
  Vector grad_f;
  Vector grad_g;
  double hinge_coeff = 0.0;
};

// Returns grad_f unchanged when ||y - x|| < 1e-14.
Vector surrogate_gradient(const Vector& grad_f, const Vector& x, const Vector& y);
SurrogatePair surrogate_pair(const Vector& grad_f, const Vector& x, const Vector& y);

// g(w) = grad_f^T w + ([-grad_f^T (y - x)]_+ / ||y - x||) * ||w - Pi_X[w]||.
// Only used by tests; the learner needs the gradient alone.
double surrogate_value(const ConvexDomain& domain, const Vector& grad_f,
                       const Vector& x, const Vector& y, const Vector& w);

}  // namespace lightons

#endif  // LIGHTONS_CONVERSION_H_
