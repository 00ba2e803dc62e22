#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <limits>

#include <Eigen/Eigenvalues>

#include "povmkit/operator_algebra.hpp"
#include "povmkit/reference_example.hpp"
#include "test_support.hpp"

using namespace povmkit;
using namespace testkit;

TEST_CASE("hs_inner on identities and Paulis") {
    const Matrix id2 = Matrix::Identity(2, 2);
    CHECK(hs_inner(id2, id2) == Complex(2.0, 0.0));
    CHECK(std::abs(hs_inner(pauli_x(), pauli_y())) == 0.0);
    CHECK(std::abs(hs_inner(pauli_x(), pauli_x()) - Complex(2.0, 0.0)) == 0.0);
    CHECK(std::abs(hs_inner(pauli_y(), pauli_z())) == 0.0);
}

TEST_CASE("hs_inner of the first two reference elements, exact integer cross-check") {
    // Entries of the reference elements are Gaussian integers over 1197, so
    // Tr[P1^dag P2] can be accumulated exactly in 64-bit integers. P1 has
    // rows (64, -16), (-16, 40); P2 has rows (34, 2-32i), (2+32i, 34).
    const std::int64_t p1[4][2] = {{64, 0}, {-16, 0}, {-16, 0}, {40, 0}};
    const std::int64_t p2[4][2] = {{34, 0}, {2, -32}, {2, 32}, {34, 0}};
    std::int64_t re = 0;
    std::int64_t im = 0;
    for (int k = 0; k < 4; ++k) {
        // conj(p1[k]) * p2[k]
        re += p1[k][0] * p2[k][0] + p1[k][1] * p2[k][1];
        im += p1[k][0] * p2[k][1] - p1[k][1] * p2[k][0];
    }
    CHECK(re == 3472);
    CHECK(im == 0);
    const auto& elements = reference_example().povm_elements;
    const Complex got = hs_inner(elements[0], elements[1]);
    CHECK(std::abs(got.real() - static_cast<double>(re) / (1197.0 * 1197.0)) < 1e-15);
    CHECK(std::abs(got.imag()) < 1e-18);
}

TEST_CASE("hs_inner is an inner product") {
    RandomStream rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 2 + static_cast<int>(rng.next_u64() % 4);
        const Matrix a = random_complex_matrix(d, d, rng);
        const Matrix b = random_complex_matrix(d, d, rng);
        // conjugate symmetry
        const Complex ab = hs_inner(a, b);
        const Complex ba = hs_inner(b, a);
        CHECK(std::abs(ab - std::conj(ba)) < 1e-12);
        // positivity, consistency with the norm
        const Complex aa = hs_inner(a, a);
        CHECK(aa.real() > 0.0);
        CHECK(std::abs(aa.imag()) < 1e-12);
        CHECK(std::abs(std::sqrt(aa.real()) - hs_norm(a)) < 1e-12);
    }
    CHECK(hs_inner(Matrix::Zero(3, 3), Matrix::Zero(3, 3)) == Complex(0.0, 0.0));
}

TEST_CASE("hs_inner rejects mismatched shapes") {
    CHECK_THROWS_AS(hs_inner(Matrix::Identity(2, 2), Matrix::Identity(3, 3)),
                    DimensionError);
}

TEST_CASE("vectorize layout is row-major") {
    // |0><1| has a single 1 in row 0, column 1, which must land at index 1.
    Matrix ket01 = Matrix::Zero(2, 2);
    ket01(0, 1) = Complex(1, 0);
    const Vector v = vectorize(ket01);
    CHECK(v(0) == Complex(0, 0));
    CHECK(v(1) == Complex(1, 0));
    CHECK(v(2) == Complex(0, 0));
    CHECK(v(3) == Complex(0, 0));

    Vector w(4);
    w << Complex(1, 0), Complex(0, 0), Complex(0, 0), Complex(1, 0);
    CHECK(matrix_close(devectorize(w), Matrix::Identity(2, 2), 0.0));
}

TEST_CASE("vectorize preserves the norm of the reference observable") {
    // Direct sum of squared entry magnitudes:
    // 1 + (2.24^2 + 1) + (2.24^2 + 1) + 1 = 14.0352.
    const Matrix x = reference_example().observable;
    double direct = 0.0;
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            direct += std::norm(x(r, c));
        }
    }
    CHECK(direct == doctest::Approx(14.0352).epsilon(1e-14));
    CHECK(vectorize(x).norm() == doctest::Approx(std::sqrt(14.0352)).epsilon(1e-14));
}

TEST_CASE("vectorize and devectorize are inverse bijections") {
    RandomStream rng(12);
    for (int d = 2; d <= 5; ++d) {
        const Matrix a = random_complex_matrix(d, d, rng);
        CHECK(matrix_close(devectorize(vectorize(a)), a, 0.0));
        Vector v(d * d);
        for (int k = 0; k < d * d; ++k) {
            v(k) = rng.complex_gaussian();
        }
        CHECK((vectorize(devectorize(v)) - v).norm() == 0.0);
    }
}

TEST_CASE("devectorize rejects non-square lengths") {
    Vector v(3);
    v.setZero();
    CHECK_THROWS_AS(devectorize(v), DimensionError);
    CHECK_THROWS_AS(vectorize(Matrix::Zero(2, 3)), DimensionError);
}

TEST_CASE("moore_penrose on simple diagonal cases") {
    Matrix z = Matrix::Zero(2, 2);
    z(0, 0) = Complex(2, 0);
    const Matrix pinv = moore_penrose(z);
    CHECK(std::abs(pinv(0, 0) - Complex(0.5, 0)) < 1e-15);
    CHECK(std::abs(pinv(1, 1)) == 0.0);
    CHECK(matrix_close(moore_penrose(Matrix::Identity(4, 4)), Matrix::Identity(4, 4), 1e-14));
}

TEST_CASE("moore_penrose of a rank-deficient Hermitian matrix matches its spectral inverse") {
    // Independent oracle: pseudoinvert through the eigendecomposition and
    // compare the full matrices.
    RandomStream rng(13);
    const Matrix g = random_complex_matrix(4, 2, rng);
    const Matrix a = g * g.adjoint(); // Hermitian, rank 2
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    Matrix oracle = Matrix::Zero(4, 4);
    for (int k = 0; k < 4; ++k) {
        const double w = es.eigenvalues()(k);
        if (w > 1e-10) {
            oracle += (1.0 / w) * es.eigenvectors().col(k) * es.eigenvectors().col(k).adjoint();
        }
    }
    CHECK(matrix_close(moore_penrose(a), oracle, 1e-12));
}

TEST_CASE("moore_penrose satisfies the four Penrose identities") {
    RandomStream rng(14);
    for (int trial = 0; trial < 100; ++trial) {
        const int rows = 2 + static_cast<int>(rng.next_u64() % 5);
        const int cols = 2 + static_cast<int>(rng.next_u64() % 5);
        const int rank = 1 + static_cast<int>(rng.next_u64() %
                                              static_cast<std::uint64_t>(std::min(rows, cols)));
        // Random matrix with controlled rank.
        const Matrix z = random_complex_matrix(rows, rank, rng) *
                         random_complex_matrix(rank, cols, rng);
        const Matrix p = moore_penrose(z);
        const double scale = std::max(1.0, z.norm());
        CHECK((z * p * z - z).norm() / scale < 1e-11);
        CHECK((p * z * p - p).norm() / std::max(1.0, p.norm()) < 1e-11);
        const Matrix zp = z * p;
        const Matrix pz = p * z;
        CHECK((zp - zp.adjoint()).norm() < 1e-11);
        CHECK((pz - pz.adjoint()).norm() < 1e-11);
    }
}

TEST_CASE("moore_penrose of an orthogonal projector is itself") {
    RandomStream rng(15);
    const Matrix g = random_complex_matrix(5, 2, rng);
    Eigen::JacobiSVD<Matrix> svd(g, Eigen::ComputeThinU);
    const Matrix proj = svd.matrixU() * svd.matrixU().adjoint();
    CHECK(matrix_close(moore_penrose(proj), proj, 1e-12));
}

TEST_CASE("moore_penrose rejects non-finite input") {
    Matrix z = Matrix::Identity(2, 2);
    z(0, 0) = Complex(std::numeric_limits<double>::quiet_NaN(), 0);
    CHECK_THROWS_AS(moore_penrose(z), NumericalError);
}

TEST_CASE("span_projector of a full operator basis is the identity") {
    const std::vector<Matrix> basis = {Matrix::Identity(2, 2), pauli_x(), pauli_y(),
                                       pauli_z()};
    CHECK(matrix_close(span_projector(basis), Matrix::Identity(4, 4), 1e-12));
}

TEST_CASE("span_projector of a single operator is the rank-one projector onto it") {
    const Matrix p = basis_projector(2, 0);
    const Vector v = vectorize(p);
    const Matrix expected = v * v.adjoint() / v.squaredNorm();
    CHECK(matrix_close(span_projector({p}), expected, 1e-14));
}

TEST_CASE("span_projector rank of the reference elements, SVD oracle") {
    const auto& elements = reference_example().povm_elements;
    // Oracle: count singular values of the stacked vectorizations directly.
    Matrix columns(4, 5);
    for (int i = 0; i < 5; ++i) {
        columns.col(i) = vectorize(elements[static_cast<std::size_t>(i)]);
    }
    Eigen::JacobiSVD<Matrix> svd(columns);
    const auto& s = svd.singularValues();
    int rank = 0;
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        if (s(k) > 5 * 1e-15 * s(0)) {
            ++rank;
        }
    }
    CHECK(rank == 4);
    const Matrix proj = span_projector(elements);
    CHECK(std::abs(proj.trace().real() - 4.0) < 1e-10);
    CHECK(matrix_close(proj, Matrix::Identity(4, 4), 1e-10));
}

TEST_CASE("span_projector is an orthogonal projector, invariant under permutation") {
    RandomStream rng(16);
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 2 + static_cast<int>(rng.next_u64() % 2);
        const int n = 2 + static_cast<int>(rng.next_u64() % 5);
        std::vector<Matrix> ops;
        for (int i = 0; i < n; ++i) {
            ops.push_back(random_complex_matrix(d, d, rng));
        }
        const Matrix proj = span_projector(ops);
        CHECK((proj * proj - proj).norm() < 1e-10);
        CHECK((proj - proj.adjoint()).norm() < 1e-10);
        // Same span after reversing the list.
        std::vector<Matrix> reversed(ops.rbegin(), ops.rend());
        CHECK(matrix_close(span_projector(reversed), proj, 1e-10));
        // Every generator is fixed by the projector.
        for (const Matrix& op : ops) {
            const Vector v = vectorize(op);
            CHECK((proj * v - v).norm() < 1e-10 * std::max(1.0, v.norm()));
        }
    }
}

TEST_CASE("span_projector rejects empty and zero inputs") {
    CHECK_THROWS_AS(span_projector({}), DimensionError);
    CHECK_THROWS_AS(span_projector({Matrix::Zero(2, 2)}), ValidationError);
}

TEST_CASE("hermiticity and minimum-eigenvalue predicates") {
    CHECK(is_hermitian(pauli_y()));
    Matrix almost = pauli_y();
    almost(0, 1) += Complex(0, 2e-10);
    CHECK(!is_hermitian(almost, 1e-10));
    CHECK(is_hermitian(almost, 1e-8));
    CHECK(min_eigenvalue(pauli_z()) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(min_eigenvalue(Matrix::Identity(3, 3)) == doctest::Approx(1.0).epsilon(1e-12));
}
