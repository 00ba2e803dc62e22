#pragma once

#include <optional>
#include <vector>

#include "povmkit/errors.hpp"
#include "povmkit/measurement.hpp"
#include "povmkit/types.hpp"

namespace povmkit {

// Frame-theoretic view of a POVM. The synthesis matrix packs the vectorized
// elements as columns, lambda(:, i) = vectorize(P_i), so it is d^2 x N. The
// frame operator F = lambda lambda^dag acts on vectorized operators, and the
// span projector is the orthogonal projector onto S = span{P_i}. The thin,
// rank-truncated SVD factors lambda = u * diag(s) * v^dag are kept because
// duals and Gram projectors built from them stay accurate even when the
// frame operator is badly conditioned.
struct FrameData {
    int dim = 0;
    int count = 0;
    Matrix lambda;
    Matrix frame_op;
    Matrix span_proj;
    int span_rank = 0;
    double bound_lower = 0.0;
    double bound_upper = 0.0;
    Matrix u;
    RealVector s;
    Matrix v;
};

FrameData build_frame(const Povm& povm);

enum class DualKind { canonical, alternate, optimal };

// A dual frame {D_i}: any family with sum_i |P_i>><<D_i| acting as the
// identity on S. Rows of gamma are the dual vectors' adjoints, so that
// gamma * vectorize(X) yields the coefficient vector f_i[X] directly.
struct DualFrame {
    std::vector<Matrix> duals;
    DualKind kind = DualKind::canonical;
    Matrix gamma;
    Matrix span_proj;
};

// Canonical dual D_i = F^+ applied to P_i (in vectorized form).
DualFrame canonical_dual(const FrameData& frame);

// Gram projector M_ij = <<Delta_i|P_j>>, an N x N orthogonal projector onto
// the coefficient range; its complement I - M parametrizes every other dual.
struct GramProjector {
    Matrix m;
};

GramProjector gram_projector(const FrameData& frame, const DualFrame& canonical);

// Alternate dual from free operators Y_i (one per element, projected onto S):
// D_i = Delta_i + Y_i - sum_j Y_j M_ji.
DualFrame alternate_dual(const FrameData& frame, const DualFrame& canonical,
                         const std::vector<Matrix>& ys);

// Dual minimizing the ensemble-averaged estimator variance for every target
// operator at once, in closed form. Indices outside the metric's support
// keep their canonical dual element.
DualFrame optimal_dual(const FrameData& frame, const DualFrame& canonical,
                       const GramProjector& gram, const Metric& metric);

// [(I - M) pi (I - M)]^+ for a Hermitian projector M and nonnegative weights
// pi. Computed by restriction to range(I - M): a generic SVD pseudoinverse
// can promote projector roundoff into huge inverse directions, while the
// restricted block is positive definite by construction. Both the optimal
// dual and the variance-correction functional are built from this kernel.
Matrix complement_weighted_pinv(const Matrix& m, const RealVector& pi);

// Residuals of the defining equations, for diagnostics and tests:
//   generalized_inverse: || lambda gamma lambda - lambda ||, zero for any dual;
//   min_norm: || pi gamma lambda - (pi gamma lambda)^dag ||, zero exactly when
//     the dual is the variance-optimal one for this metric;
//   closed_form (optimal duals only): distance of pi gamma lambda from its
//     closed-form value on the support block.
struct MinNormReport {
    double generalized_inverse = 0.0;
    double min_norm = 0.0;
    std::optional<double> closed_form;
};

MinNormReport verify_min_norm(const FrameData& frame, const DualFrame& dual,
                              const Metric& metric);

} // namespace povmkit
