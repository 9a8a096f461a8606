#pragma once

#include <string>

#include "gpcorrect/types.hpp"

namespace gpc {

enum class KernelFamily { gaussian_rbf, polynomial };

std::string to_string(KernelFamily family);
KernelFamily kernel_family_from_string(const std::string& name);

/// Scalar covariance shared by every output component.
///   gaussian_rbf: k(y, y') = sf2 * exp(-|y - y'|^2 / (2 * bandwidth))
///   polynomial:   k(y, y') = sf2 * (1 + <y, y'>)^order
struct KernelConfig {
  KernelFamily family = KernelFamily::gaussian_rbf;
  double bandwidth = 1.0;        // sigma_k^2, gaussian_rbf only
  int order = 0;                 // polynomial only
  double signal_variance = 1.0;  // sigma_f^2

  static KernelConfig rbf(double bandwidth, double signal_variance = 1.0);
  static KernelConfig polynomial(int order, double signal_variance = 1.0);

  void validate() const;
};

double kernel_eval(const KernelConfig& config, const State& a, const State& b);

/// |rows| x |cols| matrix of kernel_eval.  Row-parallel.
Matrix kernel_matrix(const KernelConfig& config, const StateList& rows, const StateList& cols);

/// Symmetric |points| x |points| matrix; only the upper triangle is computed.
Matrix kernel_matrix(const KernelConfig& config, const StateList& points);

/// Lipschitz constant of r -> k(r) for the RBF: max |dk/dr| = sf2 / (sigma_k sqrt(e)).
double rbf_lipschitz(const KernelConfig& config);

namespace serial {
Matrix kernel_matrix(const KernelConfig& config, const StateList& rows, const StateList& cols);
Matrix kernel_matrix(const KernelConfig& config, const StateList& points);
}  // namespace serial

}  // namespace gpc
