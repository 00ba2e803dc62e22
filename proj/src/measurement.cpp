#include "povmkit/measurement.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "povmkit/operator_algebra.hpp"

namespace povmkit {

Povm Povm::validate(std::vector<Matrix> elements, ValidationMode mode) {
    if (elements.empty()) {
        throw ValidationError("POVM must have at least one element");
    }
    const Eigen::Index d = elements.front().rows();
    if (d < 1) {
        throw DimensionError("POVM elements must be non-empty square matrices");
    }
    for (std::size_t i = 0; i < elements.size(); ++i) {
        const Matrix& p = elements[i];
        if (p.rows() != d || p.cols() != d) {
            std::ostringstream msg;
            msg << "POVM element " << i << " is " << p.rows() << "x" << p.cols()
                << ", expected " << d << "x" << d;
            throw DimensionError(msg.str());
        }
        if (!p.allFinite()) {
            throw ValidationError("POVM element " + std::to_string(i) +
                                  " has non-finite entries");
        }
        if (!is_hermitian(p, kHermitianTol)) {
            std::ostringstream msg;
            msg << "POVM element " << i << " is not Hermitian: ||P - P^dag|| = "
                << (p - p.adjoint()).norm();
            throw ValidationError(msg.str());
        }
        const double lo = min_eigenvalue(p);
        if (lo < kPositiveTol) {
            std::ostringstream msg;
            msg << "POVM element " << i
                << " is not positive semidefinite: min eigenvalue " << lo;
            throw ValidationError(msg.str());
        }
    }
    Matrix sum = Matrix::Zero(d, d);
    for (const Matrix& p : elements) {
        sum += p;
    }
    const double defect = (sum - Matrix::Identity(d, d)).norm();
    if (mode == ValidationMode::strict && defect > kCompletenessTol) {
        std::ostringstream msg;
        msg << "POVM elements do not sum to the identity: completeness defect "
            << defect << " exceeds " << kCompletenessTol
            << " (use permissive mode to record the defect instead)";
        throw ValidationError(msg.str());
    }
    return Povm(std::move(elements), static_cast<int>(d), defect);
}

bool is_density_operator(const Matrix& rho, double tol) {
    if (rho.rows() != rho.cols() || rho.size() == 0 || !rho.allFinite()) {
        return false;
    }
    if (!is_hermitian(rho, tol)) {
        return false;
    }
    if (std::abs(rho.trace() - Complex(1.0, 0.0)) > tol) {
        return false;
    }
    return min_eigenvalue(rho) >= -tol;
}

std::vector<double> born_probabilities(const Povm& povm, const Matrix& rho) {
    if (rho.rows() != povm.dim() || rho.cols() != povm.dim()) {
        throw DimensionError("born_probabilities: state dimension " +
                             std::to_string(rho.rows()) + " does not match POVM dimension " +
                             std::to_string(povm.dim()));
    }
    if (!is_density_operator(rho)) {
        throw ValidationError("born_probabilities: rho is not a density operator");
    }
    std::vector<double> probs(static_cast<std::size_t>(povm.size()));
    for (int i = 0; i < povm.size(); ++i) {
        probs[static_cast<std::size_t>(i)] = hs_inner(povm.element(i), rho).real();
    }
    return probs;
}

Ensemble Ensemble::uniform(int dim) {
    if (dim < 1) {
        throw DimensionError("Ensemble::uniform: dimension must be positive");
    }
    Ensemble e;
    e.uniform_ = true;
    e.dim_ = dim;
    e.average_ = Matrix::Identity(dim, dim) / static_cast<double>(dim);
    return e;
}

Ensemble Ensemble::from_members(std::vector<Member> members) {
    if (members.empty()) {
        throw ValidationError("Ensemble must have at least one member");
    }
    const Eigen::Index d = members.front().state.rows();
    double total = 0.0;
    for (std::size_t k = 0; k < members.size(); ++k) {
        const Member& m = members[k];
        if (m.state.rows() != d || m.state.cols() != d) {
            throw DimensionError("Ensemble member " + std::to_string(k) +
                                 " has mismatched dimension");
        }
        if (!is_density_operator(m.state)) {
            throw ValidationError("Ensemble member " + std::to_string(k) +
                                  " is not a density operator");
        }
        if (!(m.weight >= 0.0) || !std::isfinite(m.weight)) {
            throw ValidationError("Ensemble member " + std::to_string(k) +
                                  " has negative or non-finite weight");
        }
        total += m.weight;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw ValidationError("Ensemble weights sum to " + std::to_string(total) +
                              ", expected 1");
    }
    Ensemble e;
    e.uniform_ = false;
    e.dim_ = static_cast<int>(d);
    e.average_ = Matrix::Zero(d, d);
    for (const Member& m : members) {
        e.average_ += m.weight * m.state;
    }
    e.members_ = std::move(members);
    return e;
}

double Ensemble::second_moment(const Matrix& x) const {
    if (x.rows() != dim_ || x.cols() != dim_) {
        throw DimensionError("Ensemble::second_moment: operator dimension mismatch");
    }
    if (uniform_) {
        return uniform_ensemble_moment(x);
    }
    double acc = 0.0;
    for (const Member& m : members_) {
        acc += m.weight * std::norm((m.state * x).trace());
    }
    return acc;
}

double uniform_ensemble_moment(const Matrix& x) {
    if (x.rows() != x.cols() || x.size() == 0) {
        throw DimensionError("uniform_ensemble_moment: operator must be square");
    }
    const double d = static_cast<double>(x.rows());
    const double frob = x.squaredNorm();
    const double tr = std::norm(x.trace());
    return (frob + tr) / (d * (d + 1.0));
}

int Metric::support_size() const {
    int n = 0;
    for (bool inside : support) {
        if (inside) {
            ++n;
        }
    }
    return n;
}

Metric metric_from_ensemble(const Povm& povm, const Ensemble& ensemble) {
    if (ensemble.dim() != povm.dim()) {
        throw DimensionError("metric_from_ensemble: ensemble dimension " +
                             std::to_string(ensemble.dim()) + " does not match POVM dimension " +
                             std::to_string(povm.dim()));
    }
    const Matrix& avg = ensemble.average_state();
    Metric metric;
    metric.diag.resize(povm.size());
    metric.support.resize(static_cast<std::size_t>(povm.size()));
    for (int i = 0; i < povm.size(); ++i) {
        double w = hs_inner(povm.element(i), avg).real();
        // Tiny negative values are roundoff from PSD factors; anything worse
        // cannot come from valid inputs.
        if (w < 0.0) {
            if (w < -1e-12) {
                throw NumericalError("metric_from_ensemble: weight " + std::to_string(i) +
                                     " is negative: " + std::to_string(w));
            }
            w = 0.0;
        }
        metric.diag(i) = w;
        metric.support[static_cast<std::size_t>(i)] = w > Metric::kSupportThreshold;
    }
    return metric;
}

} // namespace povmkit
