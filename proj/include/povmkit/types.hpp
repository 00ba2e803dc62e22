#pragma once

#include <complex>

#include <Eigen/Dense>

namespace povmkit {

using Complex = std::complex<double>;

// Operators on a d-dimensional Hilbert space are dense complex matrices.
using Matrix = Eigen::MatrixXcd;

// A vectorized operator lives in C^{d^2}; see vectorize() for the layout.
using Vector = Eigen::VectorXcd;

using RealVector = Eigen::VectorXd;

} // namespace povmkit
