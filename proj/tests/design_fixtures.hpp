#pragma once

#include "gpcorrect/design.hpp"
#include "helpers.hpp"

namespace gpc::test {

/// Random linear-system design instance on [-1, 1]^2.
inline DesignProblem random_problem(std::size_t candidates, std::size_t budget, std::size_t samples,
                                    std::uint64_t seed, double noise_var = 0.1,
                                    KernelConfig kernel = KernelConfig::rbf(0.3)) {
  Matrix a(2, 2);
  a << 0.02, 0.1, -0.1, -0.06;
  DesignProblem p;
  p.candidate_seeds = random_points(candidates, 2, seed);
  p.budget = budget;
  p.grid = TimeGrid::uniform(0.0, 1.0, samples);
  p.kernel = kernel;
  p.noise = NoiseModel::isotropic(2, noise_var);
  p.system = linear_system(a);
  p.substeps = 20;
  return p;
}

}  // namespace gpc::test
