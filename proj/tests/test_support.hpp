#pragma once

// Shared helpers for the test binaries: fixed operators, random problem
// instances, and closeness checks. All randomness goes through the library's
// own deterministic stream so every test run sees identical instances.

#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "povmkit/measurement.hpp"
#include "povmkit/monte_carlo.hpp"
#include "povmkit/types.hpp"

namespace testkit {

using povmkit::Complex;
using povmkit::Matrix;
using povmkit::RandomStream;
using povmkit::Vector;

inline Matrix mat2(Complex a, Complex b, Complex c, Complex d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

inline Matrix pauli_x() { return mat2({0, 0}, {1, 0}, {1, 0}, {0, 0}); }
inline Matrix pauli_y() { return mat2({0, 0}, {0, -1}, {0, 1}, {0, 0}); }
inline Matrix pauli_z() { return mat2({1, 0}, {0, 0}, {0, 0}, {-1, 0}); }

inline Matrix basis_projector(int dim, int k) {
    Matrix m = Matrix::Zero(dim, dim);
    m(k, k) = Complex(1, 0);
    return m;
}

inline bool matrix_close(const Matrix& a, const Matrix& b, double tol) {
    return a.rows() == b.rows() && a.cols() == b.cols() && (a - b).norm() <= tol;
}

inline Matrix random_complex_matrix(int rows, int cols, RandomStream& rng) {
    Matrix m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            m(r, c) = rng.complex_gaussian();
        }
    }
    return m;
}

inline Matrix random_hermitian(int dim, RandomStream& rng) {
    const Matrix g = random_complex_matrix(dim, dim, rng);
    return 0.5 * (g + g.adjoint());
}

inline Matrix random_density(int dim, RandomStream& rng) {
    const Matrix g = random_complex_matrix(dim, dim, rng);
    Matrix rho = g * g.adjoint();
    return rho / rho.trace().real();
}

// Random POVM: positive parts squeezed through the inverse square root of
// their sum, so they are Hermitian, PSD and sum to the identity exactly up
// to roundoff. With count >= dim^2 the result is informationally complete
// for generic draws.
inline std::vector<Matrix> random_povm_elements(int dim, int count, RandomStream& rng) {
    std::vector<Matrix> parts;
    Matrix total = Matrix::Zero(dim, dim);
    for (int i = 0; i < count; ++i) {
        const Matrix g = random_complex_matrix(dim, dim, rng);
        parts.push_back(g * g.adjoint());
        total += parts.back();
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(total);
    const Matrix root_inv = es.eigenvectors() *
                            es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                            es.eigenvectors().adjoint();
    for (Matrix& p : parts) {
        p = root_inv * p * root_inv;
        p = 0.5 * (p + p.adjoint());
    }
    return parts;
}

inline povmkit::Povm random_povm(int dim, int count, RandomStream& rng) {
    return povmkit::Povm::validate(random_povm_elements(dim, count, rng),
                                   povmkit::ValidationMode::strict);
}

inline povmkit::Ensemble random_ensemble(int dim, int members, RandomStream& rng) {
    std::vector<povmkit::Ensemble::Member> ms;
    std::vector<double> weights(static_cast<std::size_t>(members));
    double total = 0.0;
    for (double& w : weights) {
        w = 0.1 + rng.uniform();
        total += w;
    }
    // Renormalize through the same subtraction the validator performs so the
    // weights sum to one exactly.
    double acc = 0.0;
    for (int k = 0; k < members; ++k) {
        double w = weights[static_cast<std::size_t>(k)] / total;
        if (k == members - 1) {
            w = 1.0 - acc;
        }
        acc += w;
        ms.push_back({random_density(dim, rng), w});
    }
    return povmkit::Ensemble::from_members(std::move(ms));
}

// Random operator inside span{P_i}: an explicit complex combination of the
// elements, so membership is exact by construction.
inline Matrix random_in_span(const std::vector<Matrix>& elements, RandomStream& rng) {
    Matrix x = Matrix::Zero(elements.front().rows(), elements.front().cols());
    for (const Matrix& p : elements) {
        x += rng.complex_gaussian() * p;
    }
    return x;
}

// Symmetric informationally complete qubit POVM from the tetrahedron
// directions; every element has trace 1/2, so the uniform ensemble weights
// all outcomes equally.
inline std::vector<Matrix> tetrahedron_povm_elements() {
    const double s = 1.0 / std::sqrt(3.0);
    const double axes[4][3] = {
        {s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}};
    std::vector<Matrix> elements;
    for (const double* n : axes) {
        const Matrix bloch = n[0] * pauli_x() + n[1] * pauli_y() + n[2] * pauli_z();
        elements.push_back(0.25 * (Matrix::Identity(2, 2) + bloch));
    }
    return elements;
}

} // namespace testkit
