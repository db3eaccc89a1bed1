#ifndef LIGHTONS_PROJECTION_H_
#define LIGHTONS_PROJECTION_H_

#include <cstdint>

#include "lightons/domain.h"
#include "lightons/linalg.h"

namespace lightons {

// How FastProj evaluates rho(mu).
//   kDense:       p = A u, rho(mu) = ||(A + mu I)^{-1} p||^2 - R^2, one
//                 Cholesky solve per bisection step.
//   kTridiagonal: Q C Q^T = A once, q = C Q^T u, each step is an O(d)
//                 shifted tridiagonal solve.
enum class ProjectionBackend { kDense, kTridiagonal };

// Approximate Mahalanobis projection of `point` onto B(radius) under the
// metric A. `lambda_lo <= eig(A) <= lambda_hi` is the caller's promise.
struct ProjectionRequest {
  const Matrix* metric = nullptr;
  Vector point;
  double radius = 1.0;
  double tolerance = 1e-8;
  double lambda_lo = 1.0;
  double lambda_hi = 1.0;
};

struct ProjectionResult {
  Vector v;
  double mu = 0.0;         // bracket midpoint used for the final solve
  int bisection_steps = 0;
};

// Evaluates rho(mu); decreasing on [0, inf).
double rho_eval(const ProjectionRequest& request, double mu,
                ProjectionBackend backend = ProjectionBackend::kDense);

// Number of bisection steps FastProj takes for the request, clamped at 0.
int fast_proj_iterations(const ProjectionRequest& request);

// Bisection on rho over the bracket
//   [(|u|/R - 1) lambda_lo, (|u|/R - 1) lambda_hi]
// followed by a radial rescale of (A + mu I)^{-1} A u onto the sphere.
// The output lies in B(R) exactly and within `tolerance` of the exact
// projection. Throws std::invalid_argument if |u| <= R or lambda_lo <= 0.
ProjectionResult fast_proj_detailed(const ProjectionRequest& request,
                                    ProjectionBackend backend);
Vector fast_proj(const ProjectionRequest& request, ProjectionBackend backend);

// Same as fast_proj with a precomputed tridiagonalization of the metric.
ProjectionResult fast_proj_tridiag(const TridiagFactorization& metric,
                                   const ProjectionRequest& request);

// Exact projection via full eigendecomposition and scalar bisection to
// machine precision. Test oracle.
Vector exact_ellipsoid_project_oracle(const Matrix& a, const Vector& u,
                                      double radius);
// Also returns the multiplier mu*.
Vector exact_ellipsoid_project_oracle(const Matrix& a, const Vector& u,
                                      double radius, double* mu_star);

// Mahalanobis projection onto an arbitrary ConvexDomain by accelerated
// projected gradient on (x - y)^T A (x - y). Baseline plumbing for ONS on
// non-ball domains; for balls prefer fast_proj.
Vector mahalanobis_project_generic(const ConvexDomain& domain, const Matrix& a,
                                   const Vector& y, double tol = 1e-12,
                                   int max_iters = 100000);

}  // namespace lightons

#endif  // LIGHTONS_PROJECTION_H_
