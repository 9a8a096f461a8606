#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace gpc {

using State = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using StateList = std::vector<State>;

/// Map R^n -> R^m.  Used for vector fields and learned corrections.
using VectorField = std::function<State(const State&)>;

}  // namespace gpc
