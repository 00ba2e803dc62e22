#pragma once

#include <optional>
#include <vector>

#include "povmkit/errors.hpp"
#include "povmkit/frame.hpp"
#include "povmkit/measurement.hpp"
#include "povmkit/types.hpp"

namespace povmkit {

// Data-processing coefficients f_i[X] = <<D_i|X>> turning measured outcome
// frequencies into an estimate of <X>. Only defined when X lies in the span
// of the POVM elements; otherwise no unbiased processing exists.
struct ProcessingRule {
    Vector coeffs;
    DualKind dual_kind = DualKind::canonical;
    Matrix target;
};

// Relative distance of X from the span must stay below this for a rule to
// exist (relative to ||X||, so scaling X is harmless).
inline constexpr double kSpanResidualTol = 1e-8;

ProcessingRule coefficients(const DualFrame& dual, const Matrix& x);

// Exact expectation sum_i f_i p_i reproduced from a given outcome
// distribution; equals Tr[rho X] whenever the probabilities obey the Born
// rule for a state and X is in the span.
Complex expected_value(const ProcessingRule& rule, const std::vector<double>& probs);

// Ensemble-averaged second moment of the single-shot estimator,
// Sigma_D(X) = sum_i |f_i[X]|^2 pi_ii.
double sigma_functional(const DualFrame& dual, const Matrix& x, const Metric& metric);

// Variance bundle for one dual and one target operator. delta is the
// ensemble-averaged estimator variance Sigma - second moment; psi and
// epsilon are only populated by comparison runs.
struct VarianceReport {
    double sigma = 0.0;
    double moment = 0.0;
    double delta = 0.0;
    std::optional<double> psi;
    std::optional<double> epsilon;
};

VarianceReport delta_variance(const DualFrame& dual, const Matrix& x,
                              const Povm& povm, const Ensemble& ensemble);

// Variance saved by switching from the canonical to the optimal dual,
// Psi(X) = g^dag (pi [(I-M) pi (I-M)]^+ pi) g with g the canonical
// coefficients. Always nonnegative.
double psi_correction(const DualFrame& canonical, const GramProjector& gram,
                      const Metric& metric, const Matrix& x);

// Full canonical-versus-optimal comparison for one target operator.
struct ComparisonReport {
    VarianceReport canonical;
    VarianceReport optimal;
    double psi = 0.0;
    double epsilon = 0.0;
};

ComparisonReport compare_duals(const Matrix& x, const Povm& povm, const Ensemble& ensemble);

// Relative variance excess of the canonical dual over the optimal one,
// epsilon = Psi / (Sigma_can - Psi - moment). Errors when the optimal
// variance is numerically zero (a deterministic estimation setting).
double epsilon_relative(const Matrix& x, const Povm& povm, const Ensemble& ensemble);

} // namespace povmkit
