#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace spatlasso {

// Dense matrices are row-major throughout; panels are small (n in the low
// hundreds), so no sparse storage at this level.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using IntVector = Eigen::VectorXi;

// Input that violates a documented precondition.
struct InvalidInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A numeric routine failed (non-convergence, singular system, ...).
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace spatlasso
