#pragma once

#include <string_view>

#include <Eigen/Cholesky>

#include "gpcorrect/types.hpp"

namespace gpc {

/// Diagonal jitter schedule, relative to a caller-supplied scale
/// (normally the kernel signal variance).  The first attempt adds nothing;
/// after that the jitter starts at `start` and grows by `factor` up to `max`.
struct JitterPolicy {
  double start = 1e-12;
  double max = 1e-4;
  double factor = 10.0;
};

struct CholeskyFactor {
  Eigen::LLT<Matrix> llt;
  double jitter = 0.0;  // absolute value added to the diagonal

  Eigen::Index size() const { return llt.rows(); }
  Matrix lower() const { return llt.matrixL(); }
  double log_det() const;
};

/// Factor a symmetric positive (semi)definite matrix, escalating diagonal
/// jitter on failure.  Throws IllConditionedError naming `context` and the
/// last jitter tried.
CholeskyFactor cholesky_with_jitter(const Matrix& a, double scale,
                                    std::string_view context,
                                    const JitterPolicy& policy = {});

/// log det of an SPD matrix via jittered Cholesky.
double log_det_spd(const Matrix& a, double scale, std::string_view context);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue_symmetric(const Matrix& a);

/// e^{A}, scaling and squaring around a [6/6] Pade approximant, squaring
/// until ||A / 2^s||_1 <= 0.5.
Matrix matrix_exponential(const Matrix& a);

}  // namespace gpc
