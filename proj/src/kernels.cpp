#include "gpcorrect/kernels.hpp"

#include <cmath>

#include "gpcorrect/errors.hpp"
#include "gpcorrect/parallel.hpp"

namespace gpc {

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::gaussian_rbf: return "gaussian_rbf";
    case KernelFamily::polynomial: return "polynomial";
  }
  return "unknown";
}

KernelFamily kernel_family_from_string(const std::string& name) {
  if (name == "gaussian_rbf") return KernelFamily::gaussian_rbf;
  if (name == "polynomial") return KernelFamily::polynomial;
  throw ArgumentError("unknown kernel family '" + name + "'");
}

KernelConfig KernelConfig::rbf(double bandwidth, double signal_variance) {
  KernelConfig c{KernelFamily::gaussian_rbf, bandwidth, 0, signal_variance};
  c.validate();
  return c;
}

KernelConfig KernelConfig::polynomial(int order, double signal_variance) {
  KernelConfig c{KernelFamily::polynomial, 0.0, order, signal_variance};
  c.validate();
  return c;
}

void KernelConfig::validate() const {
  if (!(signal_variance > 0.0) || !std::isfinite(signal_variance)) {
    throw ArgumentError("KernelConfig: signal_variance must be positive");
  }
  if (family == KernelFamily::gaussian_rbf) {
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
      throw ArgumentError("KernelConfig: bandwidth must be positive");
    }
  } else if (order < 1) {
    throw ArgumentError("KernelConfig: polynomial order must be >= 1");
  }
}

double kernel_eval(const KernelConfig& config, const State& a, const State& b) {
  if (a.size() != b.size()) throw ArgumentError("kernel_eval: dimension mismatch");
  if (config.family == KernelFamily::gaussian_rbf) {
    return config.signal_variance * std::exp(-(a - b).squaredNorm() / (2.0 * config.bandwidth));
  }
  return config.signal_variance * std::pow(1.0 + a.dot(b), config.order);
}

double rbf_lipschitz(const KernelConfig& config) {
  if (config.family != KernelFamily::gaussian_rbf) {
    throw UnsupportedKernelError("rbf_lipschitz: kernel is not gaussian_rbf");
  }
  return config.signal_variance / (std::sqrt(config.bandwidth) * std::sqrt(std::exp(1.0)));
}

namespace {

void check_lists(const StateList& rows, const StateList& cols) {
  if (rows.empty() || cols.empty()) throw ArgumentError("kernel_matrix: empty point list");
  const auto d = rows.front().size();
  for (const auto& p : rows) {
    if (p.size() != d) throw ArgumentError("kernel_matrix: dimension mismatch");
  }
  for (const auto& p : cols) {
    if (p.size() != d) throw ArgumentError("kernel_matrix: dimension mismatch");
  }
}

template <class Loop>
Matrix cross(const KernelConfig& config, const StateList& rows, const StateList& cols,
             Loop&& loop) {
  check_lists(rows, cols);
  Matrix k(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  loop(rows.size(), [&](std::size_t i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          kernel_eval(config, rows[i], cols[j]);
    }
  });
  return k;
}

template <class Loop>
Matrix symmetric(const KernelConfig& config, const StateList& points, Loop&& loop) {
  check_lists(points, points);
  const auto n = static_cast<Eigen::Index>(points.size());
  Matrix k(n, n);
  loop(points.size(), [&](std::size_t i) {
    const auto ii = static_cast<Eigen::Index>(i);
    for (Eigen::Index j = ii; j < n; ++j) {
      k(ii, j) = kernel_eval(config, points[i], points[static_cast<std::size_t>(j)]);
    }
  });
  k.triangularView<Eigen::StrictlyLower>() = k.transpose();
  return k;
}

auto parallel_loop = [](std::size_t n, auto&& body) { parallel_for(n, body); };
auto serial_loop = [](std::size_t n, auto&& body) { serial_for(n, body); };

}  // namespace

Matrix kernel_matrix(const KernelConfig& config, const StateList& rows, const StateList& cols) {
  return cross(config, rows, cols, parallel_loop);
}

Matrix kernel_matrix(const KernelConfig& config, const StateList& points) {
  return symmetric(config, points, parallel_loop);
}

namespace serial {
Matrix kernel_matrix(const KernelConfig& config, const StateList& rows, const StateList& cols) {
  return cross(config, rows, cols, serial_loop);
}
Matrix kernel_matrix(const KernelConfig& config, const StateList& points) {
  return symmetric(config, points, serial_loop);
}
}  // namespace serial

}  // namespace gpc
