#include "postsel/model_core.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "postsel/random_stream.hpp"

namespace postsel {

namespace {

double rank_cutoff(const Eigen::JacobiSVD<Matrix>& svd, const Matrix& m) {
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0.0;
  const double largest = sv(0);
  return static_cast<double>(std::max(m.rows(), m.cols())) *
         std::numeric_limits<double>::epsilon() * largest;
}

void check_order(int p, int lo, int hi, const char* what) {
  if (p < lo || p > hi) {
    std::ostringstream msg;
    msg << what << ": order " << p << " outside [" << lo << ", " << hi << "]";
    throw ModelError(msg.str());
  }
}

}  // namespace

int numerical_rank(const Matrix& m) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const double cutoff = rank_cutoff(svd, m);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) ++rank;
  }
  return rank;
}

Matrix pseudo_inverse(const Matrix& m) {
  Matrix out = Matrix::Zero(m.cols(), m.rows());
  if (m.size() == 0) return out;
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double cutoff = rank_cutoff(svd, m);
  const auto& sv = svd.singularValues();
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) {
      out += svd.matrixV().col(i) * (1.0 / sv(i)) * svd.matrixU().col(i).transpose();
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

Gram::Gram(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0) {
    throw ModelError("Gram matrix must be square and non-empty");
  }
  if (!m_.allFinite()) throw ModelError("Gram matrix has non-finite entries");
  const double scale = m_.cwiseAbs().maxCoeff();
  if ((m_ - m_.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, scale)) {
    throw ModelError("Gram matrix is not symmetric");
  }
  m_ = 0.5 * (m_ + m_.transpose()).eval();
  Eigen::LLT<Matrix> llt(m_);
  if (llt.info() != Eigen::Success) {
    throw SingularMatrixError("Gram matrix is not positive definite");
  }
}

Matrix Gram::leading_inverse(int p) const {
  check_order(p, 1, size(), "leading_inverse");
  const Matrix block = m_.topLeftCorner(p, p);
  Eigen::LLT<Matrix> llt(block);
  if (llt.info() != Eigen::Success || llt.rcond() < 1e-14) {
    throw SingularMatrixError("leading " + std::to_string(p) + "x" + std::to_string(p) +
                              " block of the Gram matrix is numerically singular");
  }
  return llt.solve(Matrix::Identity(p, p));
}

// ---------------------------------------------------------------------------

namespace {

Gram gram_of(const Matrix& x) {
  if (x.cols() < 1) throw ModelError("design needs at least one regressor");
  if (x.rows() <= x.cols()) {
    throw ModelError("design needs more observations than regressors (n > P)");
  }
  if (!x.allFinite()) throw ModelError("design has non-finite entries");
  if (numerical_rank(x) != x.cols()) throw ModelError("design matrix is rank deficient");
  return Gram(x.transpose() * x / static_cast<double>(x.rows()));
}

}  // namespace

RegressionDesign::RegressionDesign(Matrix x) : x_(std::move(x)), gram_(gram_of(x_)) {}

RegressionDesign RegressionDesign::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open design file '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (start <= line.size()) {
      const std::size_t end = std::min(line.find(',', start), line.size());
      std::string field = line.substr(start, end - start);
      const auto first = field.find_first_not_of(" \t");
      const auto last = field.find_last_not_of(" \t");
      field = first == std::string::npos ? "" : field.substr(first, last - first + 1);
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
      if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
        throw ModelError(path + ":" + std::to_string(line_no) + ": cannot parse '" + field +
                         "' as a number");
      }
      row.push_back(value);
      start = end + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ModelError(path + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(rows.front().size()) + " columns, found " +
                       std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (in.bad()) throw IoError("error while reading '" + path + "'");
  if (rows.empty()) throw ModelError(path + ": design file is empty");
  Matrix x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return RegressionDesign(std::move(x));
}

RegressionDesign synthetic_design(int n, const Matrix& gram, std::uint64_t seed) {
  const Gram g(gram);
  const int regressors = g.size();
  if (n <= regressors) throw ModelError("synthetic design needs n > P");
  RandomStream stream(seed);
  Matrix draws(n, regressors);
  for (int j = 0; j < regressors; ++j) {
    for (int i = 0; i < n; ++i) draws(i, j) = stream.normal();
  }
  Eigen::HouseholderQR<Matrix> qr(draws);
  const Matrix basis = qr.householderQ() * Matrix::Identity(n, regressors);
  Eigen::LLT<Matrix> llt(static_cast<double>(n) * g.matrix());
  return RegressionDesign(basis * Matrix(llt.matrixL()).transpose());
}

// ---------------------------------------------------------------------------

SelectionFamily::SelectionFamily(int min_order, std::vector<double> criticals)
    : min_order_(min_order), criticals_(std::move(criticals)) {
  if (min_order_ < 0) throw ModelError("minimal order O must be nonnegative");
  if (criticals_.empty()) throw ModelError("need at least one critical value (O < P)");
  for (double c : criticals_) {
    if (!(c > 0.0) || !std::isfinite(c)) {
      throw ModelError("critical values must be positive and finite");
    }
  }
}

double SelectionFamily::critical(int p) const {
  check_order(p, min_order_, max_order(), "critical");
  if (p == min_order_) return 0.0;
  return criticals_[static_cast<std::size_t>(p - min_order_ - 1)];
}

TargetFunctional::TargetFunctional(Matrix a) : a_(std::move(a)) {
  if (a_.rows() < 1 || a_.rows() > a_.cols()) {
    throw ModelError("target matrix must be k x P with 1 <= k <= P");
  }
  if (!a_.allFinite()) throw ModelError("target matrix has non-finite entries");
  if (numerical_rank(a_) != a_.rows()) throw ModelError("target matrix must have rank k");
}

ParameterPoint::ParameterPoint(Vector theta_in, double sigma_in)
    : theta(std::move(theta_in)), sigma(sigma_in) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ModelError("sigma must be positive and finite");
  if (!theta.allFinite()) throw ModelError("theta has non-finite entries");
}

// ---------------------------------------------------------------------------

GaussianComponent::GaussianComponent(Vector mean_shift, Matrix covariance)
    : mean_shift_(std::move(mean_shift)), covariance_(std::move(covariance)) {
  const auto k = covariance_.rows();
  if (covariance_.cols() != k || mean_shift_.size() != k || k == 0) {
    throw ModelError("Gaussian component: inconsistent dimensions");
  }
  covariance_ = 0.5 * (covariance_ + covariance_.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(covariance_);
  const Vector& values = eig.eigenvalues();
  const double largest = values.cwiseAbs().maxCoeff();
  const double cutoff =
      static_cast<double>(k) * std::numeric_limits<double>::epsilon() * largest;
  if (values.minCoeff() < -std::max(cutoff, 1e-12 * largest)) {
    throw ModelError("Gaussian component covariance is not positive semidefinite");
  }
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = 0; i < k; ++i) {
    if (largest > 0.0 && values(i) > cutoff) kept.push_back(i);
  }
  rank_ = static_cast<int>(kept.size());
  factor_ = Matrix::Zero(k, rank_);
  for (int j = 0; j < rank_; ++j) {
    const auto i = kept[static_cast<std::size_t>(j)];
    factor_.col(j) = eig.eigenvectors().col(i) * std::sqrt(values(i));
  }
  if (rank_ == k) {
    precision_ = eig.eigenvectors() * values.cwiseInverse().asDiagonal() *
                 eig.eigenvectors().transpose();
    log_norm_ = -0.5 * (static_cast<double>(k) * std::log(2.0 * std::numbers::pi) +
                        values.array().log().sum());
  }
}

double GaussianComponent::density(const Vector& z) const {
  if (!has_density()) throw ModelError("Gaussian component is singular; no Lebesgue density");
  return std::exp(log_norm_ - 0.5 * z.dot(precision_ * z));
}

// ---------------------------------------------------------------------------

Vector restricted_ls_mean(const Gram& gram, const Vector& theta, int p) {
  const int regressors = gram.size();
  if (theta.size() != regressors) throw ModelError("theta length does not match P");
  check_order(p, 0, regressors, "restricted_ls_mean");
  Vector eta = Vector::Zero(regressors);
  if (p == 0) return eta;
  if (p == regressors) return theta;
  const int rest = regressors - p;
  eta.head(p) = theta.head(p) + gram.leading_inverse(p) *
                                    (gram.matrix().block(0, p, p, rest) * theta.tail(rest));
  return eta;
}

Vector restricted_ls_mean(const RegressionDesign& design, const Vector& theta, int p) {
  return restricted_ls_mean(design.gram(), theta, p);
}

double xi(const Gram& gram, int p) {
  check_order(p, 1, gram.size(), "xi");
  return std::sqrt(gram.leading_inverse(p)(p - 1, p - 1));
}

double xi(const RegressionDesign& design, int p) { return xi(design.gram(), p); }

Matrix projected_covariance(const Gram& gram, const TargetFunctional& target, int p) {
  if (target.regressors() != gram.size()) throw ModelError("target width does not match P");
  check_order(p, 0, gram.size(), "projected_covariance");
  if (p == 0) return Matrix::Zero(target.k(), target.k());
  const Matrix ap = target.a().leftCols(p);
  return ap * gram.leading_inverse(p) * ap.transpose();
}

ConditionalQuantities conditional_quantities(const Gram& gram, const TargetFunctional& target,
                                             int p) {
  if (target.regressors() != gram.size()) throw ModelError("target width does not match P");
  check_order(p, 1, gram.size(), "conditional_quantities");
  const Matrix inv = gram.leading_inverse(p);
  const Matrix ap = target.a().leftCols(p);
  ConditionalQuantities out;
  out.c = ap * inv.col(p - 1);
  const Matrix s = ap * inv * ap.transpose();
  out.b = out.c.transpose() * pseudo_inverse(s);
  const double xi_sq = inv(p - 1, p - 1);
  double zeta_sq = xi_sq - out.b.dot(out.c);
  if (zeta_sq < 0.0) {
    if (zeta_sq < -1e-12 * std::max(1.0, xi_sq)) {
      throw SingularMatrixError("conditional variance is negative beyond rounding");
    }
    zeta_sq = 0.0;
  }
  out.zeta_sq = zeta_sq;
  return out;
}

ConditionalQuantities conditional_quantities(const RegressionDesign& design,
                                             const TargetFunctional& target, int p) {
  return conditional_quantities(design.gram(), target, p);
}

int order_of(const Vector& theta) {
  for (Eigen::Index j = theta.size(); j > 0; --j) {
    if (theta(j - 1) != 0.0) return static_cast<int>(j);
  }
  return 0;
}

GaussianComponent gaussian_component(const RegressionDesign& design,
                                     const TargetFunctional& target,
                                     const ParameterPoint& params, int p) {
  if (params.theta.size() != design.regressors()) throw ModelError("theta length does not match P");
  const double root_n = std::sqrt(static_cast<double>(design.n()));
  const Vector eta = restricted_ls_mean(design, params.theta, p);
  Vector shift = root_n * (target.a() * (eta - params.theta));
  Matrix cov = params.sigma * params.sigma * projected_covariance(design.gram(), target, p);
  return GaussianComponent(std::move(shift), std::move(cov));
}

}  // namespace postsel
