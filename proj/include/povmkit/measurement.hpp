#pragma once

#include <vector>

#include "povmkit/errors.hpp"
#include "povmkit/types.hpp"

namespace povmkit {

enum class ValidationMode { strict, permissive };

// A validated positive operator-valued measure. Elements are always checked
// for Hermiticity and positive semidefiniteness; strict mode additionally
// requires the elements to sum to the identity. Permissive mode records the
// completeness defect instead of rejecting, which is what lets deliberately
// defective published matrices through for forensic runs.
class Povm {
public:
    static constexpr double kHermitianTol = 1e-10;
    static constexpr double kPositiveTol = -1e-10;
    static constexpr double kCompletenessTol = 1e-9;

    static Povm validate(std::vector<Matrix> elements, ValidationMode mode);

    int dim() const { return dim_; }
    int size() const { return static_cast<int>(elements_.size()); }
    const std::vector<Matrix>& elements() const { return elements_; }
    const Matrix& element(int i) const { return elements_.at(static_cast<std::size_t>(i)); }

    // Hilbert-Schmidt norm of (sum_i P_i - I). Zero for a complete POVM.
    double completeness_defect() const { return completeness_defect_; }

private:
    Povm(std::vector<Matrix> elements, int dim, double defect)
        : elements_(std::move(elements)), dim_(dim), completeness_defect_(defect) {}

    std::vector<Matrix> elements_;
    int dim_ = 0;
    double completeness_defect_ = 0.0;
};

// True when rho is Hermitian, positive semidefinite and has unit trace,
// all within tol.
bool is_density_operator(const Matrix& rho, double tol = 1e-10);

// Outcome distribution p(i) = Tr[P_i rho]. Requires rho to be a density
// operator of matching dimension. Note the probabilities only sum to one
// up to the POVM's completeness defect.
std::vector<double> born_probabilities(const Povm& povm, const Matrix& rho);

// A finite ensemble of quantum states with weights, or the uniform (Haar)
// ensemble over pure states, which is the default reference ensemble and
// the one with closed-form moments.
class Ensemble {
public:
    struct Member {
        Matrix state;
        double weight;
    };

    static Ensemble uniform(int dim);
    static Ensemble from_members(std::vector<Member> members);

    bool is_uniform() const { return uniform_; }
    int dim() const { return dim_; }
    const std::vector<Member>& members() const { return members_; }

    // Ensemble average state; I/d for the uniform ensemble.
    const Matrix& average_state() const { return average_; }

    // Ensemble second moment of the expectation value, mean of |Tr[rho X]|^2.
    double second_moment(const Matrix& x) const;

private:
    Ensemble() = default;

    bool uniform_ = false;
    int dim_ = 0;
    std::vector<Member> members_;
    Matrix average_;
};

// Mean of |Tr[rho X]|^2 over Haar-random pure states,
// (Tr[X^dag X] + |Tr X|^2) / (d (d + 1)).
double uniform_ensemble_moment(const Matrix& x);

// Diagonal weights pi_ii = Tr[rho_E P_i] that the variance functionals use.
// Indices whose weight falls at or below kSupportThreshold are outside the
// support and are frozen at their canonical value by the optimizer.
struct Metric {
    static constexpr double kSupportThreshold = 1e-12;

    RealVector diag;
    std::vector<bool> support;

    int support_size() const;
};

Metric metric_from_ensemble(const Povm& povm, const Ensemble& ensemble);

} // namespace povmkit
