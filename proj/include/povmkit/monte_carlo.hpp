#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "povmkit/errors.hpp"
#include "povmkit/estimation.hpp"
#include "povmkit/measurement.hpp"
#include "povmkit/types.hpp"

namespace povmkit {

// Deterministic random stream: a 64-bit Mersenne engine fed through
// portable transformations so the exact same numbers come out on every
// platform (the library's reproducibility contract is bitwise).
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed);

    // Uniform double in [0, 1), 53-bit resolution.
    double uniform();

    // Standard normal via Box-Muller (cached spare).
    double gaussian();

    // Complex standard normal: independent N(0,1) real and imaginary parts.
    Complex complex_gaussian();

    std::uint64_t next_u64();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Decorrelated per-stream seed from a master seed and a stream index,
// splitmix64-style mixing. Stream 0 with master m differs from the plain
// master-seeded stream, so substreams never collide with the parent.
std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t stream);

enum class StateSource { fixed_state, ensemble_sampled, haar_uniform };

struct SimulationConfig {
    std::uint64_t shots = 1;
    std::uint64_t seed = 0;
    StateSource source = StateSource::fixed_state;
    // Independent substreams; outcomes are concatenated in stream order so
    // the result is reproducible regardless of how work would be divided.
    int streams = 1;
};

// Haar-random pure state as a density matrix, from a normalized vector of
// complex Gaussians.
Matrix sample_haar_state(int dim, RandomStream& rng);

// Born probabilities normalized for sampling. Tolerates a completeness
// defect up to |sum - 1| <= 1e-6 by renormalizing; beyond that the input is
// considered broken and an error is thrown.
std::vector<double> sampling_distribution(const Povm& povm, const Matrix& rho);

// Outcome indices for a fixed preparation.
std::vector<int> sample_outcomes(const Povm& povm, const Matrix& rho,
                                 const SimulationConfig& config);

// Outcome indices with the preparation redrawn every shot from the
// ensemble (Haar pure states for the uniform ensemble, the weighted
// members otherwise). config.source must not be fixed_state.
std::vector<int> sample_outcomes(const Povm& povm, const Ensemble& ensemble,
                                 const SimulationConfig& config);

// Plug observed outcomes into a processing rule: mean of f over the
// outcome sequence, its sample variance, and the standard error of the
// mean.
struct EmpiricalReport {
    Complex mean_estimate{0.0, 0.0};
    double empirical_variance = 0.0;
    double standard_error = 0.0;
    std::uint64_t shots_used = 0;
};

EmpiricalReport empirical_estimate(const ProcessingRule& rule,
                                   const std::vector<int>& outcomes);

} // namespace povmkit
