#ifndef LIGHTONS_LINALG_H_
#define LIGHTONS_LINALG_H_

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace lightons {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Raised when a factorization or solve meets a singular or indefinite system.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Gradients with norm below this are treated as zero and skip the update.
inline constexpr double kDegenerateGradient = 1e-14;

// A positive-definite matrix A together with its maintained inverse V.
//
// The pair is updated in lockstep by rank_one_update: A <- A + g g^T and
// V <- V - (V g g^T V) / (1 + g^T V g). No re-inversion happens unless
// refresh_every is set, in which case V is recomputed from A by
// dense_inverse every refresh_every effective updates.
struct PdPairState {
  int dim = 0;
  double epsilon = 0.0;
  Matrix a;
  Matrix v;
  std::int64_t update_count = 0;
  std::int64_t refresh_every = 0;  // 0 disables refresh.
};

PdPairState pd_pair_init(int dim, double epsilon);

// In-place Sherman-Morrison update. Returns false when g was skipped as
// degenerate (||g|| < kDegenerateGradient).
bool rank_one_update(PdPairState& state, const Vector& g);

// ||V A - I||_F, the drift of the maintained inverse.
double inverse_drift(const PdPairState& state);

// Direct Cholesky-based inverse of an SPD matrix. Test oracle; independent of
// rank_one_update. Throws NumericalError for non-SPD input.
Matrix dense_inverse(const Matrix& a);

// log det(A) from a Cholesky factorization. Throws NumericalError if A is not
// SPD.
double log_det(const Matrix& a);

// Q C Q^T = A with Q orthogonal and C symmetric tridiagonal.
struct TridiagFactorization {
  Matrix q;
  Vector diag;     // size d
  Vector offdiag;  // size d-1, offdiag[i] = C(i, i+1) = C(i+1, i)

  Matrix dense_c() const;
  // C * x in O(d).
  Vector apply_c(const Vector& x) const;
};

// Householder reduction to tridiagonal form, O(d^3).
// Throws std::invalid_argument if A is not symmetric within 1e-10 relative.
TridiagFactorization tridiagonalize(const Matrix& a);

// Solves (C + mu I) z = q with the Thomas algorithm, O(d). Throws
// NumericalError when a pivot is non-positive (C + mu I not positive
// definite) or vanishes.
Vector tridiag_shifted_solve(const TridiagFactorization& c, double mu,
                             const Vector& q);
Vector tridiag_shifted_solve(const Vector& diag, const Vector& offdiag,
                             double mu, const Vector& q);

// Max absolute asymmetry max_ij |A_ij - A_ji|.
double asymmetry(const Matrix& a);

}  // namespace lightons

#endif  // LIGHTONS_LINALG_H_
