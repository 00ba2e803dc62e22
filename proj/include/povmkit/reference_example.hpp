#pragma once

#include <cstddef>
#include <vector>

#include "povmkit/types.hpp"

namespace povmkit {

// Published target values the reproduction harness checks against, with the
// tolerances the checks use (relative for the variance numbers, absolute
// for the ratio and the ensemble moment).
struct ReferenceTargets {
    double sigma_canonical = 799.66;
    double sigma_canonical_rel_tol = 0.005;
    double psi = 133.05;
    double psi_rel_tol = 0.005;
    double epsilon = 0.20;
    double epsilon_abs_tol = 0.01;
    double second_moment = 2.34;
    double second_moment_abs_tol = 0.005;
};

// The worked qubit example this toolkit reproduces: a five-element POVM
// given as exact rationals over 1197 and one non-trivial target observable.
// The element list is kept exactly as published; the published matrices do
// NOT quite sum to the identity (the defect is visible and intentional
// here), which is what the reproduction harness investigates.
struct ReferenceExample {
    std::vector<Matrix> povm_elements;
    Matrix observable;
    ReferenceTargets targets;
};

const ReferenceExample& reference_example();

// Copy of the element list with element `index` complex-conjugated
// entrywise (transposition of a Hermitian matrix).
std::vector<Matrix> conjugated_variant(const std::vector<Matrix>& elements,
                                       std::size_t index);

// Indices whose single-element conjugation makes the elements sum to the
// identity within 1e-9. For the reference example this finds exactly the
// two repairs consistent with a sign slip in the published table.
std::vector<std::size_t> completeness_restoring_indices(
    const std::vector<Matrix>& elements);

} // namespace povmkit
