#include "lightons/linalg.h"

#include <cmath>

namespace lightons {

PdPairState pd_pair_init(int dim, double epsilon) {
  if (dim < 1) throw std::invalid_argument("pd_pair_init: dim must be >= 1");
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("pd_pair_init: epsilon must be positive");
  }
  PdPairState s;
  s.dim = dim;
  s.epsilon = epsilon;
  s.a = epsilon * Matrix::Identity(dim, dim);
  s.v = (1.0 / epsilon) * Matrix::Identity(dim, dim);
  return s;
}

bool rank_one_update(PdPairState& state, const Vector& g) {
  if (g.size() != state.dim) {
    throw std::invalid_argument("rank_one_update: dimension mismatch");
  }
  if (g.norm() < kDegenerateGradient) return false;

  const Vector vg = state.v * g;
  const double denom = 1.0 + g.dot(vg);
  state.a.noalias() += g * g.transpose();
  state.v.noalias() -= (vg * vg.transpose()) / denom;
  ++state.update_count;

  if (state.refresh_every > 0 && state.update_count % state.refresh_every == 0) {
    state.v = dense_inverse(state.a);
  }
  return true;
}

double inverse_drift(const PdPairState& state) {
  return (state.v * state.a - Matrix::Identity(state.dim, state.dim)).norm();
}

namespace {

Eigen::LLT<Matrix> checked_cholesky(const Matrix& a, const char* who) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument(std::string(who) + ": matrix must be square");
  }
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) {
    throw NumericalError(std::string(who) + ": matrix is not positive definite");
  }
  return llt;
}

}  // namespace

Matrix dense_inverse(const Matrix& a) {
  auto llt = checked_cholesky(a, "dense_inverse");
  return llt.solve(Matrix::Identity(a.rows(), a.cols()));
}

double log_det(const Matrix& a) {
  auto llt = checked_cholesky(a, "log_det");
  const Matrix& l = llt.matrixLLT();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) acc += std::log(l(i, i));
  return 2.0 * acc;
}

double asymmetry(const Matrix& a) {
  return (a - a.transpose()).cwiseAbs().maxCoeff();
}

Matrix TridiagFactorization::dense_c() const {
  const Eigen::Index d = diag.size();
  Matrix c = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    c(i, i) = diag(i);
    if (i + 1 < d) {
      c(i, i + 1) = offdiag(i);
      c(i + 1, i) = offdiag(i);
    }
  }
  return c;
}

Vector TridiagFactorization::apply_c(const Vector& x) const {
  const Eigen::Index d = diag.size();
  Vector out = diag.cwiseProduct(x);
  for (Eigen::Index i = 0; i + 1 < d; ++i) {
    out(i) += offdiag(i) * x(i + 1);
    out(i + 1) += offdiag(i) * x(i);
  }
  return out;
}

TridiagFactorization tridiagonalize(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw std::invalid_argument("tridiagonalize: matrix must be square");
  }
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if (asymmetry(a) > 1e-10 * scale) {
    throw std::invalid_argument("tridiagonalize: matrix is not symmetric");
  }

  const Eigen::Index d = a.rows();
  Matrix work = 0.5 * (a + a.transpose());
  Matrix q = Matrix::Identity(d, d);

  // Column k: reflect entries k+1..d-1 onto a multiple of e_{k+1}.
  for (Eigen::Index k = 0; k + 2 < d; ++k) {
    const Eigen::Index m = d - k - 1;
    Vector x = work.col(k).tail(m);
    const double alpha_norm = x.norm();
    if (x.tail(m - 1).norm() <= 1e-300 || alpha_norm == 0.0) continue;

    const double alpha = x(0) >= 0.0 ? -alpha_norm : alpha_norm;
    Vector w = x;
    w(0) -= alpha;
    const double wn = w.norm();
    if (wn == 0.0) continue;
    w /= wn;

    // H = I - 2 w w^T applied from both sides on the trailing block.
    auto block = work.bottomRightCorner(m, m);
    const Vector p = block * w;
    const double kappa = w.dot(p);
    const Vector r = 2.0 * (p - kappa * w);
    block.noalias() -= w * r.transpose() + r * w.transpose();

    work.col(k).tail(m).setZero();
    work(k + 1, k) = alpha;
    work.row(k).tail(m).setZero();
    work(k, k + 1) = alpha;

    // Q <- Q H, acting on the trailing columns.
    auto qcols = q.rightCols(m);
    const Vector qw = qcols * w;
    qcols.noalias() -= 2.0 * qw * w.transpose();
  }

  TridiagFactorization out;
  out.q = std::move(q);
  out.diag = work.diagonal();
  out.offdiag = d > 1 ? Vector(work.diagonal(1)) : Vector(0);
  return out;
}

Vector tridiag_shifted_solve(const Vector& diag, const Vector& offdiag,
                             double mu, const Vector& q) {
  const Eigen::Index d = diag.size();
  if (q.size() != d || (d > 0 && offdiag.size() != d - 1)) {
    throw std::invalid_argument("tridiag_shifted_solve: dimension mismatch");
  }
  if (d == 0) return Vector(0);

  // Symmetric LDL^T via the Thomas recurrence; every pivot must be positive.
  Vector pivot(d);
  Vector rhs(d);
  pivot(0) = diag(0) + mu;
  rhs(0) = q(0);
  const double tiny = 1e-300;
  if (!(pivot(0) > tiny)) {
    throw NumericalError("tridiag_shifted_solve: system is not positive definite");
  }
  for (Eigen::Index i = 1; i < d; ++i) {
    const double l = offdiag(i - 1) / pivot(i - 1);
    pivot(i) = diag(i) + mu - l * offdiag(i - 1);
    rhs(i) = q(i) - l * rhs(i - 1);
    if (!(pivot(i) > tiny)) {
      throw NumericalError("tridiag_shifted_solve: system is not positive definite");
    }
  }
  Vector z(d);
  z(d - 1) = rhs(d - 1) / pivot(d - 1);
  for (Eigen::Index i = d - 2; i >= 0; --i) {
    z(i) = (rhs(i) - offdiag(i) * z(i + 1)) / pivot(i);
  }
  return z;
}

Vector tridiag_shifted_solve(const TridiagFactorization& c, double mu,
                             const Vector& q) {
  return tridiag_shifted_solve(c.diag, c.offdiag, mu, q);
}

}  // namespace lightons
