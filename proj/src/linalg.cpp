#include "gpcorrect/linalg.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "gpcorrect/errors.hpp"

namespace gpc {
namespace {

bool factor_ok(const Eigen::LLT<Matrix>& llt) {
  if (llt.info() != Eigen::Success) return false;
  const auto& m = llt.matrixLLT();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double d = m(i, i);
    if (!std::isfinite(d) || d <= 0.0) return false;
  }
  return true;
}

}  // namespace

double CholeskyFactor::log_det() const {
  const auto& m = llt.matrixLLT();
  double s = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) s += std::log(m(i, i));
  return 2.0 * s;
}

CholeskyFactor cholesky_with_jitter(const Matrix& a, double scale,
                                    std::string_view context,
                                    const JitterPolicy& policy) {
  if (a.rows() != a.cols()) {
    throw ArgumentError(std::string(context) + ": matrix is not square");
  }
  if (!a.allFinite()) {
    throw ArgumentError(std::string(context) + ": matrix has non-finite entries");
  }
  CholeskyFactor out;
  out.llt.compute(a);
  if (factor_ok(out.llt)) return out;

  double jitter = policy.start * scale;
  const double last = policy.max * scale * (1.0 + 1e-12);
  Matrix work = a;
  while (jitter <= last) {
    work = a;
    work.diagonal().array() += jitter;
    out.llt.compute(work);
    if (factor_ok(out.llt)) {
      out.jitter = jitter;
      return out;
    }
    jitter *= policy.factor;
  }
  std::ostringstream msg;
  msg << context << ": Cholesky failed after jitter escalation to "
      << policy.max * scale;
  throw IllConditionedError(msg.str(), policy.max * scale);
}

double log_det_spd(const Matrix& a, double scale, std::string_view context) {
  return cholesky_with_jitter(a, scale, context).log_det();
}

double min_eigenvalue_symmetric(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Matrix matrix_exponential(const Matrix& a) {
  if (a.rows() != a.cols()) throw ArgumentError("matrix_exponential: matrix is not square");
  if (!a.allFinite()) throw ArgumentError("matrix_exponential: non-finite entries");
  const Eigen::Index n = a.rows();
  if (n == 0) return a;

  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
  const Matrix x = a / std::ldexp(1.0, squarings);

  // Pade [6/6]: c_k = c_{k-1} (p - k + 1) / (k (2p - k + 1)).
  constexpr int p = 6;
  const Matrix id = Matrix::Identity(n, n);
  Matrix num = id;
  Matrix den = id;
  Matrix power = id;
  double c = 1.0;
  for (int k = 1; k <= p; ++k) {
    c *= static_cast<double>(p - k + 1) / (k * (2.0 * p - k + 1));
    power = power * x;
    num += c * power;
    den += ((k % 2) ? -c : c) * power;
  }
  Matrix result = den.partialPivLu().solve(num);
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

}  // namespace gpc
