#include "povmkit/estimation.hpp"

#include <cmath>
#include <sstream>

#include "povmkit/operator_algebra.hpp"

namespace povmkit {

namespace {

// Same support-block pseudoinverse the optimal dual uses, reproduced here
// through the public residual-free pieces: Psi only needs quadratic forms,
// so it goes through optimal coefficients rather than duplicating the
// factorization (see psi_correction).
Vector canonical_coeffs(const DualFrame& dual, const Matrix& x) {
    return dual.gamma * vectorize(x);
}

} // namespace

ProcessingRule coefficients(const DualFrame& dual, const Matrix& x) {
    if (x.rows() != x.cols()) {
        throw DimensionError("coefficients: target operator must be square");
    }
    if (x.rows() * x.cols() != dual.span_proj.rows()) {
        throw DimensionError("coefficients: target dimension does not match the frame");
    }
    if (!x.allFinite()) {
        throw NumericalError("coefficients: target operator has non-finite entries");
    }
    const Vector vx = vectorize(x);
    const double scale = vx.norm();
    if (scale > 0.0) {
        const double residual = (vx - dual.span_proj * vx).norm() / scale;
        if (residual > kSpanResidualTol) {
            std::ostringstream msg;
            msg << "coefficients: target operator lies outside the measurement span, "
                << "relative residual " << residual << " exceeds " << kSpanResidualTol
                << "; no unbiased processing exists for it";
            throw ValidationError(msg.str());
        }
    }
    ProcessingRule rule;
    rule.coeffs = canonical_coeffs(dual, x);
    rule.dual_kind = dual.kind;
    rule.target = x;
    return rule;
}

Complex expected_value(const ProcessingRule& rule, const std::vector<double>& probs) {
    if (static_cast<Eigen::Index>(probs.size()) != rule.coeffs.size()) {
        throw DimensionError("expected_value: got " + std::to_string(probs.size()) +
                             " probabilities for " + std::to_string(rule.coeffs.size()) +
                             " coefficients");
    }
    Complex acc(0.0, 0.0);
    for (Eigen::Index i = 0; i < rule.coeffs.size(); ++i) {
        acc += rule.coeffs(i) * probs[static_cast<std::size_t>(i)];
    }
    return acc;
}

double sigma_functional(const DualFrame& dual, const Matrix& x, const Metric& metric) {
    if (metric.diag.size() != dual.gamma.rows()) {
        throw DimensionError("sigma_functional: metric size does not match the dual frame");
    }
    const Vector f = canonical_coeffs(dual, x);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        acc += metric.diag(i) * std::norm(f(i));
    }
    return acc;
}

VarianceReport delta_variance(const DualFrame& dual, const Matrix& x,
                              const Povm& povm, const Ensemble& ensemble) {
    const Metric metric = metric_from_ensemble(povm, ensemble);
    VarianceReport report;
    report.sigma = sigma_functional(dual, x, metric);
    report.moment = ensemble.second_moment(x);
    report.delta = report.sigma - report.moment;
    return report;
}

double psi_correction(const DualFrame& canonical, const GramProjector& gram,
                      const Metric& metric, const Matrix& x) {
    if (canonical.kind != DualKind::canonical) {
        throw ValidationError("psi_correction: expected the canonical dual");
    }
    if (metric.diag.size() != canonical.gamma.rows()) {
        throw DimensionError("psi_correction: metric size does not match the dual frame");
    }
    if (gram.m.rows() != canonical.gamma.rows()) {
        throw DimensionError("psi_correction: Gram projector size does not match");
    }
    const Vector g = canonical_coeffs(canonical, x);
    // Psi = g^dag pi [(I-M) pi (I-M)]^+ pi g, restricted to the support.
    std::vector<Eigen::Index> idx;
    for (std::size_t i = 0; i < metric.support.size(); ++i) {
        if (metric.support[i]) {
            idx.push_back(static_cast<Eigen::Index>(i));
        }
    }
    if (idx.empty()) {
        throw ValidationError("psi_correction: the metric has empty support");
    }
    const Eigen::Index ns = static_cast<Eigen::Index>(idx.size());
    Matrix msup(ns, ns);
    RealVector pisup(ns);
    Vector gsup(ns);
    for (Eigen::Index a = 0; a < ns; ++a) {
        pisup(a) = metric.diag(idx[static_cast<std::size_t>(a)]);
        gsup(a) = g(idx[static_cast<std::size_t>(a)]);
        for (Eigen::Index b = 0; b < ns; ++b) {
            msup(a, b) = gram.m(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
        }
    }
    const Matrix apinv = complement_weighted_pinv(msup, pisup);
    const Vector weighted = pisup.asDiagonal() * gsup;
    const double psi = (weighted.adjoint() * apinv * weighted).real()(0, 0);
    // The correction is a quadratic form in a PSD kernel; clamp roundoff.
    return psi < 0.0 ? 0.0 : psi;
}

ComparisonReport compare_duals(const Matrix& x, const Povm& povm, const Ensemble& ensemble) {
    const FrameData frame = build_frame(povm);
    const DualFrame can = canonical_dual(frame);
    const GramProjector gram = gram_projector(frame, can);
    const Metric metric = metric_from_ensemble(povm, ensemble);
    const DualFrame opt = optimal_dual(frame, can, gram, metric);

    // Fail early (with the span diagnostic) if X is not estimable at all.
    coefficients(can, x);

    const double moment = ensemble.second_moment(x);
    ComparisonReport report;
    report.canonical.sigma = sigma_functional(can, x, metric);
    report.canonical.moment = moment;
    report.canonical.delta = report.canonical.sigma - moment;
    report.optimal.sigma = sigma_functional(opt, x, metric);
    report.optimal.moment = moment;
    report.optimal.delta = report.optimal.sigma - moment;
    report.psi = psi_correction(can, gram, metric, x);
    report.optimal.psi = report.psi;

    const double denom = report.canonical.sigma - report.psi - moment;
    if (denom <= 1e-12) {
        throw NumericalError("epsilon: optimal variance is numerically zero, "
                             "the estimation setting is deterministic");
    }
    report.epsilon = report.psi / denom;
    report.optimal.epsilon = report.epsilon;
    return report;
}

double epsilon_relative(const Matrix& x, const Povm& povm, const Ensemble& ensemble) {
    return compare_duals(x, povm, ensemble).epsilon;
}

} // namespace povmkit
