#include "povmkit/reference_example.hpp"

#include <string>

#include "povmkit/errors.hpp"

namespace povmkit {

namespace {

Matrix qubit(Complex a00, Complex a01, Complex a10, Complex a11) {
    Matrix m(2, 2);
    m << a00, a01, a10, a11;
    return m;
}

ReferenceExample build() {
    ReferenceExample ex;
    // Each entry is divided individually so the stored doubles agree bit for
    // bit with parsing the "p/1197" rationals from the shipped data files.
    const double d = 1197.0;
    ex.povm_elements = {
        qubit({64 / d, 0}, {-16 / d, 0}, {-16 / d, 0}, {40 / d, 0}),
        qubit({34 / d, 0}, {2 / d, -32 / d}, {2 / d, 32 / d}, {34 / d, 0}),
        qubit({843 / d, 0}, {-18 / d, 32 / d}, {-18 / d, -32 / d}, {867 / d, 0}),
        qubit({192 / d, 0}, {64 / d, -64 / d}, {64 / d, 64 / d}, {96 / d, 0}),
        qubit({64 / d, 0}, {-32 / d, -64 / d}, {-32 / d, 64 / d}, {160 / d, 0}),
    };
    ex.observable = qubit({1, 0}, {-2.24, 1}, {-2.24, -1}, {-1, 0});
    return ex;
}

} // namespace

const ReferenceExample& reference_example() {
    static const ReferenceExample ex = build();
    return ex;
}

std::vector<Matrix> conjugated_variant(const std::vector<Matrix>& elements,
                                       std::size_t index) {
    if (index >= elements.size()) {
        throw DimensionError("conjugated_variant: index " + std::to_string(index) +
                             " out of range for " + std::to_string(elements.size()) +
                             " elements");
    }
    std::vector<Matrix> variant = elements;
    variant[index] = variant[index].conjugate();
    return variant;
}

std::vector<std::size_t> completeness_restoring_indices(
    const std::vector<Matrix>& elements) {
    std::vector<std::size_t> found;
    if (elements.empty()) {
        return found;
    }
    const Eigen::Index d = elements.front().rows();
    Matrix sum = Matrix::Zero(d, d);
    for (const Matrix& p : elements) {
        sum += p;
    }
    for (std::size_t k = 0; k < elements.size(); ++k) {
        const Matrix repaired = sum - elements[k] + elements[k].conjugate();
        if ((repaired - Matrix::Identity(d, d)).norm() <= 1e-9) {
            found.push_back(k);
        }
    }
    return found;
}

} // namespace povmkit
