#include "povmkit/operator_algebra.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace povmkit {

namespace {

void require_square(const Matrix& a, const char* who) {
    if (a.rows() != a.cols()) {
        throw DimensionError(std::string(who) + ": operator must be square, got " +
                             std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
    }
}

void require_finite(const Matrix& a, const char* who) {
    if (!a.allFinite()) {
        throw NumericalError(std::string(who) + ": matrix contains non-finite entries");
    }
}

} // namespace

Complex hs_inner(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError("hs_inner: incompatible shapes " +
                             std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " vs " +
                             std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    }
    // Tr[A^dag B] without forming the product matrix.
    return (a.array().conjugate() * b.array()).sum();
}

double hs_norm(const Matrix& a) {
    return a.norm();
}

Vector vectorize(const Matrix& a) {
    require_square(a, "vectorize");
    const Eigen::Index d = a.rows();
    Vector v(d * d);
    for (Eigen::Index m = 0; m < d; ++m) {
        for (Eigen::Index n = 0; n < d; ++n) {
            v(m * d + n) = a(m, n);
        }
    }
    return v;
}

Matrix devectorize(const Vector& v) {
    const auto len = v.size();
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(len))));
    if (d * d != len) {
        throw DimensionError("devectorize: length " + std::to_string(len) +
                             " is not a perfect square");
    }
    Matrix a(d, d);
    for (Eigen::Index m = 0; m < d; ++m) {
        for (Eigen::Index n = 0; n < d; ++n) {
            a(m, n) = v(m * d + n);
        }
    }
    return a;
}

double svd_rank_tolerance(Eigen::Index rows, Eigen::Index cols, double sigma_max) {
    const double dim = static_cast<double>(std::max(rows, cols));
    return dim * std::numeric_limits<double>::epsilon() * sigma_max;
}

Matrix moore_penrose(const Matrix& z, double rank_tol) {
    require_finite(z, "moore_penrose");
    if (z.size() == 0) {
        throw DimensionError("moore_penrose: empty matrix");
    }
    Eigen::JacobiSVD<Matrix> svd(z, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    const double tol = rank_tol > 0.0 ? rank_tol : svd_rank_tolerance(z.rows(), z.cols(), s(0));
    RealVector inv = RealVector::Zero(s.size());
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        if (s(k) > tol) {
            inv(k) = 1.0 / s(k);
        }
    }
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

Matrix span_projector(const std::vector<Matrix>& ops) {
    if (ops.empty()) {
        throw DimensionError("span_projector: need at least one operator");
    }
    const Eigen::Index d = ops.front().rows();
    Matrix columns(d * d, static_cast<Eigen::Index>(ops.size()));
    for (std::size_t i = 0; i < ops.size(); ++i) {
        if (ops[i].rows() != d || ops[i].cols() != d) {
            throw DimensionError("span_projector: operator " + std::to_string(i) +
                                 " has mismatched dimension");
        }
        columns.col(static_cast<Eigen::Index>(i)) = vectorize(ops[i]);
    }
    require_finite(columns, "span_projector");
    Eigen::JacobiSVD<Matrix> svd(columns, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) <= 0.0) {
        throw ValidationError("span_projector: all operators are numerically zero");
    }
    const double tol = svd_rank_tolerance(columns.rows(), columns.cols(), s(0));
    Eigen::Index rank = 0;
    while (rank < s.size() && s(rank) > tol) {
        ++rank;
    }
    if (rank == 0) {
        throw ValidationError("span_projector: all operators are numerically zero");
    }
    const Matrix basis = svd.matrixU().leftCols(rank);
    return basis * basis.adjoint();
}

bool is_hermitian(const Matrix& a, double tol) {
    if (a.rows() != a.cols()) {
        return false;
    }
    return (a - a.adjoint()).norm() <= tol;
}

double min_eigenvalue(const Matrix& a) {
    require_square(a, "min_eigenvalue");
    require_finite(a, "min_eigenvalue");
    const Matrix herm = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

} // namespace povmkit
