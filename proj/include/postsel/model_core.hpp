#pragma once

// Regression design, nested model family, target functional, and the
// deterministic moment quantities of the restricted least-squares fits.
//
// Every quantity here depends on the regressors only through the Gram
// matrix X'X/n, so each operation has an overload on a bare `Gram`. The
// large-sample code reuses those overloads with the limit matrix Q.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace postsel {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

/// Invalid argument to a model-level operation (bad shape, out-of-range order, ...).
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A matrix that must be inverted is numerically singular.
class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File missing or unreadable.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rank from singular values above max(rows, cols) * eps * largest singular value.
int numerical_rank(const Matrix& m);

/// Moore-Penrose inverse with the same rank cutoff as `numerical_rank`.
Matrix pseudo_inverse(const Matrix& m);

/// Symmetric positive-definite matrix playing the role of X'X/n (or its limit Q).
class Gram {
 public:
  explicit Gram(Matrix m);

  [[nodiscard]] const Matrix& matrix() const { return m_; }
  [[nodiscard]] int size() const { return static_cast<int>(m_.rows()); }

  /// Inverse of the leading p x p block.
  [[nodiscard]] Matrix leading_inverse(int p) const;

 private:
  Matrix m_;
};

class RegressionDesign {
 public:
  /// Requires n > P >= 1 and full column rank.
  explicit RegressionDesign(Matrix x);

  /// Rows are observations, comma-separated, no header.
  static RegressionDesign from_csv(const std::string& path);

  [[nodiscard]] const Matrix& x() const { return x_; }
  [[nodiscard]] int n() const { return static_cast<int>(x_.rows()); }
  [[nodiscard]] int regressors() const { return static_cast<int>(x_.cols()); }
  [[nodiscard]] const Gram& gram() const { return gram_; }

 private:
  Matrix x_;
  Gram gram_;
};

/// n x P design whose X'X/n equals `gram` up to rounding.
///
/// X = U R with R the Cholesky factor of n * gram and U an orthonormal
/// basis drawn from a seeded Gaussian matrix.
RegressionDesign synthetic_design(int n, const Matrix& gram, std::uint64_t seed);

/// Nested family M_O, ..., M_P with critical values c_{O+1}, ..., c_P.
class SelectionFamily {
 public:
  SelectionFamily(int min_order, std::vector<double> criticals);

  [[nodiscard]] int min_order() const { return min_order_; }
  [[nodiscard]] int max_order() const { return min_order_ + static_cast<int>(criticals_.size()); }
  /// c_p; zero for p = O.
  [[nodiscard]] double critical(int p) const;
  [[nodiscard]] const std::vector<double>& criticals() const { return criticals_; }

 private:
  int min_order_;
  std::vector<double> criticals_;
};

/// k x P matrix A of rank k.
class TargetFunctional {
 public:
  explicit TargetFunctional(Matrix a);

  [[nodiscard]] const Matrix& a() const { return a_; }
  [[nodiscard]] int k() const { return static_cast<int>(a_.rows()); }
  [[nodiscard]] int regressors() const { return static_cast<int>(a_.cols()); }

 private:
  Matrix a_;
};

struct ParameterPoint {
  ParameterPoint(Vector theta, double sigma);

  Vector theta;
  double sigma;
};

/// Centered Gaussian measure on R^k given through a rank factor, together
/// with the shift at which the owning mixture term evaluates it.
class GaussianComponent {
 public:
  GaussianComponent(Vector mean_shift, Matrix covariance);

  [[nodiscard]] const Vector& mean_shift() const { return mean_shift_; }
  [[nodiscard]] const Matrix& covariance() const { return covariance_; }
  /// k x rank matrix L with L L' = covariance.
  [[nodiscard]] const Matrix& factor() const { return factor_; }
  [[nodiscard]] int rank() const { return rank_; }
  [[nodiscard]] int dimension() const { return static_cast<int>(covariance_.rows()); }
  [[nodiscard]] bool has_density() const { return rank_ == dimension(); }

  /// Lebesgue density of the centered measure at z; requires `has_density()`.
  [[nodiscard]] double density(const Vector& z) const;

 private:
  Vector mean_shift_;
  Matrix covariance_;
  Matrix factor_;
  int rank_ = 0;
  Matrix precision_;
  double log_norm_ = 0.0;
};

/// eta_n(p): mean of the order-p restricted least-squares estimator.
Vector restricted_ls_mean(const Gram& gram, const Vector& theta, int p);
Vector restricted_ls_mean(const RegressionDesign& design, const Vector& theta, int p);

/// xi_{n,p}: root of the last diagonal entry of the inverse leading p-block.
double xi(const Gram& gram, int p);
double xi(const RegressionDesign& design, int p);

/// A[p] (X[p]'X[p]/n)^{-1} A[p]'.
Matrix projected_covariance(const Gram& gram, const TargetFunctional& target, int p);

struct ConditionalQuantities {
  Vector c;        // A[p] (X[p]'X[p]/n)^{-1} e_p
  RowVector b;     // c' pinv(projected_covariance)
  double zeta_sq;  // xi^2 - b c, clamped at zero
};

ConditionalQuantities conditional_quantities(const Gram& gram, const TargetFunctional& target,
                                             int p);
ConditionalQuantities conditional_quantities(const RegressionDesign& design,
                                             const TargetFunctional& target, int p);

/// p_0(theta): index of the last nonzero entry, 0 for the zero vector.
int order_of(const Vector& theta);

/// Component of order p: covariance sigma^2 A[p](X[p]'X[p]/n)^{-1}A[p]',
/// mean shift sqrt(n) A (eta_n(p) - theta). Order 0 is the point mass.
GaussianComponent gaussian_component(const RegressionDesign& design,
                                     const TargetFunctional& target,
                                     const ParameterPoint& params, int p);

}  // namespace postsel
