#include "povmkit/frame.hpp"

#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "povmkit/operator_algebra.hpp"

namespace povmkit {

namespace {

// Pseudoinverse of A = H pi H where H is an orthogonal projector and pi a
// nonnegative diagonal. A generic SVD pseudoinverse is fragile here: H
// carries O(eps) noise from upstream factorizations, and the default rank
// cutoff can keep noise directions whose inverses then dominate the result.
// Restricting to range(H) first makes the inverted block positive definite
// by construction.
Matrix projected_weighted_pinv(const Matrix& h, const RealVector& pi) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    if (es.info() != Eigen::Success) {
        throw NumericalError("optimal dual: eigendecomposition of the Gram complement failed");
    }
    const RealVector& w = es.eigenvalues();
    const double cutoff = 1e-12 * std::max(1.0, w(w.size() - 1));
    Eigen::Index first = 0;
    while (first < w.size() && w(first) <= cutoff) {
        ++first;
    }
    const Eigen::Index kept = w.size() - first;
    if (kept == 0) {
        // H is numerically zero: the canonical dual is the only dual.
        return Matrix::Zero(h.rows(), h.cols());
    }
    const Matrix basis = es.eigenvectors().rightCols(kept);
    const Matrix a = h * pi.asDiagonal() * h;
    const Matrix block = basis.adjoint() * a * basis;
    return basis * moore_penrose(block) * basis.adjoint();
}

// Gather the support indices of a metric, in order.
std::vector<Eigen::Index> support_indices(const Metric& metric) {
    std::vector<Eigen::Index> idx;
    for (std::size_t i = 0; i < metric.support.size(); ++i) {
        if (metric.support[i]) {
            idx.push_back(static_cast<Eigen::Index>(i));
        }
    }
    return idx;
}

void check_metric_size(const Metric& metric, int count, const char* who) {
    if (metric.diag.size() != count ||
        metric.support.size() != static_cast<std::size_t>(count)) {
        throw DimensionError(std::string(who) + ": metric has " +
                             std::to_string(metric.diag.size()) + " weights, expected " +
                             std::to_string(count));
    }
}

DualFrame make_dual(const FrameData& frame, Matrix stack, DualKind kind) {
    DualFrame dual;
    dual.kind = kind;
    dual.gamma = stack.adjoint();
    dual.span_proj = frame.span_proj;
    dual.duals.reserve(static_cast<std::size_t>(frame.count));
    for (int i = 0; i < frame.count; ++i) {
        dual.duals.push_back(devectorize(stack.col(i)));
    }
    return dual;
}

Matrix dual_stack(const DualFrame& dual) {
    return dual.gamma.adjoint();
}

} // namespace

Matrix complement_weighted_pinv(const Matrix& m, const RealVector& pi) {
    if (m.rows() != m.cols()) {
        throw DimensionError("complement_weighted_pinv: projector must be square");
    }
    if (pi.size() != m.rows()) {
        throw DimensionError("complement_weighted_pinv: weight count does not match");
    }
    const Matrix h = Matrix::Identity(m.rows(), m.cols()) - m;
    return projected_weighted_pinv(h, pi);
}

FrameData build_frame(const Povm& povm) {
    FrameData fd;
    fd.dim = povm.dim();
    fd.count = povm.size();
    const Eigen::Index dd = static_cast<Eigen::Index>(fd.dim) * fd.dim;
    fd.lambda.resize(dd, fd.count);
    for (int i = 0; i < fd.count; ++i) {
        fd.lambda.col(i) = vectorize(povm.element(i));
    }
    Eigen::JacobiSVD<Matrix> svd(fd.lambda, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) <= 0.0) {
        throw ValidationError("build_frame: POVM spans the zero subspace");
    }
    const double tol = svd_rank_tolerance(fd.lambda.rows(), fd.lambda.cols(), s(0));
    Eigen::Index rank = 0;
    while (rank < s.size() && s(rank) > tol) {
        ++rank;
    }
    if (rank == 0) {
        throw ValidationError("build_frame: POVM spans the zero subspace");
    }
    fd.span_rank = static_cast<int>(rank);
    fd.u = svd.matrixU().leftCols(rank);
    fd.s = s.head(rank);
    fd.v = svd.matrixV().leftCols(rank);
    fd.frame_op = fd.lambda * fd.lambda.adjoint();
    fd.span_proj = fd.u * fd.u.adjoint();
    // Frame bounds: extreme nonzero eigenvalues of the frame operator, which
    // are the squared extreme kept singular values.
    fd.bound_lower = fd.s(rank - 1) * fd.s(rank - 1);
    fd.bound_upper = fd.s(0) * fd.s(0);
    return fd;
}

DualFrame canonical_dual(const FrameData& frame) {
    // F^+ lambda collapses to u diag(1/s) v^dag on the SVD factors, which
    // avoids squaring the condition number through the frame operator.
    const Matrix stack = frame.u * frame.s.cwiseInverse().asDiagonal() * frame.v.adjoint();
    return make_dual(frame, stack, DualKind::canonical);
}

GramProjector gram_projector(const FrameData& frame, const DualFrame& canonical) {
    if (canonical.kind != DualKind::canonical) {
        throw ValidationError("gram_projector: expected the canonical dual");
    }
    if (canonical.gamma.rows() != frame.count) {
        throw DimensionError("gram_projector: dual frame size does not match");
    }
    // Algebraically M_ij = <<Delta_i|P_j>> = (gamma lambda)_ij; forming it
    // from the right singular vectors gives the same matrix as an exact
    // projector instead of one polluted by the frame's condition number.
    GramProjector gp;
    gp.m = frame.v * frame.v.adjoint();
    // Hermitian frame elements force a real Gram projector; complain loudly
    // if roundoff says otherwise rather than silently carrying junk.
    if (gp.m.imag().cwiseAbs().maxCoeff() > 1e-10) {
        throw NumericalError("gram_projector: unexpected imaginary part for a POVM frame");
    }
    return gp;
}

DualFrame alternate_dual(const FrameData& frame, const DualFrame& canonical,
                         const std::vector<Matrix>& ys) {
    if (canonical.kind != DualKind::canonical) {
        throw ValidationError("alternate_dual: expected the canonical dual");
    }
    if (static_cast<int>(ys.size()) != frame.count) {
        throw DimensionError("alternate_dual: got " + std::to_string(ys.size()) +
                             " free operators, expected " + std::to_string(frame.count));
    }
    const Eigen::Index dd = static_cast<Eigen::Index>(frame.dim) * frame.dim;
    Matrix ystack(dd, frame.count);
    for (int i = 0; i < frame.count; ++i) {
        if (ys[static_cast<std::size_t>(i)].rows() != frame.dim ||
            ys[static_cast<std::size_t>(i)].cols() != frame.dim) {
            throw DimensionError("alternate_dual: free operator " + std::to_string(i) +
                                 " has mismatched dimension");
        }
        // Keep the parametrization inside S.
        ystack.col(i) = frame.span_proj * vectorize(ys[static_cast<std::size_t>(i)]);
    }
    const Matrix m = frame.v * frame.v.adjoint();
    const Matrix complement = Matrix::Identity(frame.count, frame.count) - m;
    const Matrix stack = dual_stack(canonical) + ystack * complement;
    return make_dual(frame, stack, DualKind::alternate);
}

DualFrame optimal_dual(const FrameData& frame, const DualFrame& canonical,
                       const GramProjector& gram, const Metric& metric) {
    if (canonical.kind != DualKind::canonical) {
        throw ValidationError("optimal_dual: expected the canonical dual");
    }
    check_metric_size(metric, frame.count, "optimal_dual");
    if (gram.m.rows() != frame.count || gram.m.cols() != frame.count) {
        throw DimensionError("optimal_dual: Gram projector size does not match");
    }
    const std::vector<Eigen::Index> idx = support_indices(metric);
    if (idx.empty()) {
        throw ValidationError("optimal_dual: the metric has empty support, "
                              "no outcome carries ensemble weight");
    }
    const Eigen::Index ns = static_cast<Eigen::Index>(idx.size());

    // Work on the support block only; outside it the variance functional is
    // blind and the canonical elements are kept as-is.
    Matrix msup(ns, ns);
    RealVector pisup(ns);
    for (Eigen::Index a = 0; a < ns; ++a) {
        pisup(a) = metric.diag(idx[static_cast<std::size_t>(a)]);
        for (Eigen::Index b = 0; b < ns; ++b) {
            msup(a, b) = gram.m(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
        }
    }
    const Matrix apinv = complement_weighted_pinv(msup, pisup);

    // Closed-form variance minimizer: Dhat = Delta (I - pi [(I-M) pi (I-M)]^+)
    // on the support block. Equivalent to solving the stationarity equations
    // of the weighted dual norm, but in one factored step.
    const Matrix correction = pisup.asDiagonal() * apinv;

    Matrix stack = dual_stack(canonical);
    Matrix delta_sup(stack.rows(), ns);
    for (Eigen::Index a = 0; a < ns; ++a) {
        delta_sup.col(a) = stack.col(idx[static_cast<std::size_t>(a)]);
    }
    const Matrix opt_sup = delta_sup * (Matrix::Identity(ns, ns) - correction);
    for (Eigen::Index a = 0; a < ns; ++a) {
        stack.col(idx[static_cast<std::size_t>(a)]) = opt_sup.col(a);
    }
    return make_dual(frame, stack, DualKind::optimal);
}

MinNormReport verify_min_norm(const FrameData& frame, const DualFrame& dual,
                              const Metric& metric) {
    check_metric_size(metric, frame.count, "verify_min_norm");
    if (dual.gamma.rows() != frame.count) {
        throw DimensionError("verify_min_norm: dual frame size does not match");
    }
    MinNormReport report;
    const Matrix gl = dual.gamma * frame.lambda;
    report.generalized_inverse = (frame.lambda * gl - frame.lambda).norm();
    const Matrix pgl = metric.diag.asDiagonal() * gl;
    report.min_norm = (pgl - pgl.adjoint()).norm();
    if (dual.kind == DualKind::optimal) {
        // The optimal dual also satisfies pi gamma lambda =
        // pi - pi [(I-M) pi (I-M)]^+ pi on the support block.
        const std::vector<Eigen::Index> idx = support_indices(metric);
        const Eigen::Index ns = static_cast<Eigen::Index>(idx.size());
        const Matrix m = frame.v * frame.v.adjoint();
        Matrix msup(ns, ns), pglsup(ns, ns);
        RealVector pisup(ns);
        for (Eigen::Index a = 0; a < ns; ++a) {
            pisup(a) = metric.diag(idx[static_cast<std::size_t>(a)]);
            for (Eigen::Index b = 0; b < ns; ++b) {
                msup(a, b) = m(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
                pglsup(a, b) = pgl(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
            }
        }
        const Matrix apinv = complement_weighted_pinv(msup, pisup);
        const Matrix target = Matrix(pisup.asDiagonal()) -
                              pisup.asDiagonal() * apinv * pisup.asDiagonal();
        report.closed_form = (pglsup - target).norm();
    }
    return report;
}

} // namespace povmkit
