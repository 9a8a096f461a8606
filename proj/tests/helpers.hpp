#pragma once

#include <cstdint>

#include "gpcorrect/dynamics.hpp"
#include "gpcorrect/rng.hpp"
#include "gpcorrect/types.hpp"

namespace gpc::test {

inline Box square(int d, double half) {
  return Box{State::Constant(d, -half), State::Constant(d, half)};
}

/// dy/dt = A y (+ c .* y.^2 when coeffs given).
inline SystemSpec linear_system(const Matrix& a, const State& coeffs = State(), double half = 1.0) {
  SystemSpec s;
  s.dim = static_cast<int>(a.rows());
  s.known_term = [a](const State& y) -> State { return a * y; };
  if (coeffs.size() > 0) {
    s.true_correction = [coeffs](const State& y) -> State { return coeffs.cwiseProduct(y.cwiseAbs2()); };
  }
  s.domain = square(s.dim, half);
  return s;
}

inline StateList random_points(std::size_t n, int d, std::uint64_t seed, double half = 1.0) {
  Rng rng(seed);
  StateList out;
  for (std::size_t i = 0; i < n; ++i) {
    State p(d);
    for (int j = 0; j < d; ++j) p(j) = rng.uniform(-half, half);
    out.push_back(p);
  }
  return out;
}

}  // namespace gpc::test
