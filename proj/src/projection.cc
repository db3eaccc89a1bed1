#include "lightons/projection.h"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace lightons {

namespace {

void validate(const ProjectionRequest& r) {
  if (r.metric == nullptr) throw std::invalid_argument("fast_proj: missing metric");
  const Eigen::Index d = r.point.size();
  if (r.metric->rows() != d || r.metric->cols() != d) {
    throw std::invalid_argument("fast_proj: metric/point dimension mismatch");
  }
  if (!(r.radius > 0.0)) throw std::invalid_argument("fast_proj: radius must be positive");
  if (!(r.tolerance > 0.0)) throw std::invalid_argument("fast_proj: tolerance must be positive");
  if (!(r.lambda_lo > 0.0)) throw std::invalid_argument("fast_proj: lambda_lo must be positive");
  if (r.lambda_hi < r.lambda_lo) throw std::invalid_argument("fast_proj: lambda_hi < lambda_lo");
  if (!(r.point.norm() > r.radius)) {
    throw std::invalid_argument("fast_proj: point already inside the ball");
  }
}

Vector dense_shifted_solve(const Matrix& a, double mu, const Vector& rhs) {
  Matrix shifted = a;
  shifted.diagonal().array() += mu;
  Eigen::LLT<Matrix> llt(shifted);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("fast_proj: A + mu I is not positive definite");
  }
  return llt.solve(rhs);
}

// Runs the bisection against an arbitrary rho and returns the final bracket
// midpoint together with the step count.
template <typename Rho>
std::pair<double, int> bisect(const ProjectionRequest& r, Rho&& rho) {
  const double ratio = r.point.norm() / r.radius - 1.0;
  double lo = ratio * r.lambda_lo;
  double hi = ratio * r.lambda_hi;
  const int n = fast_proj_iterations(r);
  int steps = 0;
  for (int i = 0; i < n; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket exhausted in floating point
    ++steps;
    if (rho(mid) >= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {0.5 * (lo + hi), steps};
}

Vector rescale_to_sphere(const Vector& v, double radius) {
  const double n = v.norm();
  if (!(n > 0.0)) throw NumericalError("fast_proj: degenerate projected point");
  return scale_to_radius(v, radius);
}

}  // namespace

int fast_proj_iterations(const ProjectionRequest& r) {
  const double unorm = r.point.norm();
  const double arg = (1.0 / r.tolerance) * (r.lambda_hi / r.lambda_lo - 1.0) *
                     unorm * (unorm / r.radius - 1.0);
  if (!(arg > 1.0)) return 0;
  const double n = std::ceil(std::log2(arg));
  // Beyond ~1100 halvings a double bracket cannot shrink further.
  return n > 2000.0 ? 2000 : static_cast<int>(n);
}

double rho_eval(const ProjectionRequest& r, double mu, ProjectionBackend backend) {
  if (r.metric == nullptr) throw std::invalid_argument("rho_eval: missing metric");
  const Matrix& a = *r.metric;
  const double r2 = r.radius * r.radius;
  if (backend == ProjectionBackend::kDense) {
    return dense_shifted_solve(a, mu, a * r.point).squaredNorm() - r2;
  }
  const TridiagFactorization tri = tridiagonalize(a);
  const Vector q = tri.apply_c(tri.q.transpose() * r.point);
  return tridiag_shifted_solve(tri, mu, q).squaredNorm() - r2;
}

ProjectionResult fast_proj_tridiag(const TridiagFactorization& tri,
                                   const ProjectionRequest& r) {
  validate(r);
  const double r2 = r.radius * r.radius;
  const Vector q = tri.apply_c(tri.q.transpose() * r.point);
  auto rho = [&](double mu) { return tridiag_shifted_solve(tri, mu, q).squaredNorm() - r2; };
  const auto [mu, steps] = bisect(r, rho);
  ProjectionResult out;
  out.mu = mu;
  out.bisection_steps = steps;
  out.v = rescale_to_sphere(tri.q * tridiag_shifted_solve(tri, mu, q), r.radius);
  return out;
}

ProjectionResult fast_proj_detailed(const ProjectionRequest& r,
                                    ProjectionBackend backend) {
  validate(r);
  if (backend == ProjectionBackend::kTridiagonal) {
    return fast_proj_tridiag(tridiagonalize(*r.metric), r);
  }
  const Matrix& a = *r.metric;
  const double r2 = r.radius * r.radius;
  const Vector p = a * r.point;
  auto rho = [&](double mu) { return dense_shifted_solve(a, mu, p).squaredNorm() - r2; };
  const auto [mu, steps] = bisect(r, rho);
  ProjectionResult out;
  out.mu = mu;
  out.bisection_steps = steps;
  out.v = rescale_to_sphere(dense_shifted_solve(a, mu, p), r.radius);
  return out;
}

Vector fast_proj(const ProjectionRequest& request, ProjectionBackend backend) {
  return fast_proj_detailed(request, backend).v;
}

Vector exact_ellipsoid_project_oracle(const Matrix& a, const Vector& u,
                                      double radius, double* mu_star) {
  const double unorm = u.norm();
  if (!(unorm > radius)) {
    throw std::invalid_argument("exact_ellipsoid_project_oracle: point inside ball");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("exact_ellipsoid_project_oracle: eigensolve failed");
  }
  const Vector& lam = eig.eigenvalues();  // ascending
  if (!(lam(0) > 0.0)) {
    throw NumericalError("exact_ellipsoid_project_oracle: metric not positive definite");
  }
  const Vector v = eig.eigenvectors().transpose() * u;
  const double r2 = radius * radius;
  auto rho = [&](double mu) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
      const double f = lam(i) / (lam(i) + mu);
      s += v(i) * v(i) * f * f;
    }
    return s - r2;
  };
  const double ratio = unorm / radius - 1.0;
  double lo = ratio * lam(0);
  double hi = ratio * lam(lam.size() - 1);
  // Widen slightly so rounding in the eigenvalues cannot exclude the root.
  lo = std::max(0.0, lo * (1.0 - 1e-12));
  hi = hi * (1.0 + 1e-12);
  for (int i = 0; i < 4000; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (rho(mid) >= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double mu = 0.5 * (lo + hi);
  if (mu_star != nullptr) *mu_star = mu;
  Vector scaled(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i) scaled(i) = v(i) * lam(i) / (lam(i) + mu);
  return eig.eigenvectors() * scaled;
}

Vector exact_ellipsoid_project_oracle(const Matrix& a, const Vector& u,
                                      double radius) {
  return exact_ellipsoid_project_oracle(a, u, radius, nullptr);
}

Vector mahalanobis_project_generic(const ConvexDomain& domain, const Matrix& a,
                                   const Vector& y, double tol, int max_iters) {
  if (domain.contains(y, 0.0)) return y;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a, Eigen::EigenvaluesOnly);
  const double lipschitz = eig.eigenvalues().maxCoeff();
  if (!(lipschitz > 0.0)) throw NumericalError("mahalanobis_project_generic: bad metric");

  // FISTA with gradient restart on 1/2 (x - y)^T A (x - y).
  Vector x = domain.project(y);
  Vector z = x;
  double theta = 1.0;
  for (int it = 0; it < max_iters; ++it) {
    const Vector grad = a * (z - y);
    const Vector next = domain.project(z - grad / lipschitz);
    const double move = (next - x).norm();
    const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
    if ((z - next).dot(next - x) > 0.0) {
      z = next;
      theta = 1.0;
    } else {
      z = next + ((theta - 1.0) / theta_next) * (next - x);
      theta = theta_next;
    }
    x = next;
    if (move <= tol * std::max(1.0, x.norm())) break;
  }
  return x;
}

}  // namespace lightons
