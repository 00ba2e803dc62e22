#include "povmkit/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace povmkit {

namespace {

constexpr double kSumTolerance = 1e-6;

// Normalize a nonnegative weight vector for inverse-CDF sampling. The slack
// absorbs a small completeness defect in the POVM without letting grossly
// wrong inputs through.
std::vector<double> normalize_for_sampling(std::vector<double> probs) {
    double sum = 0.0;
    for (double& p : probs) {
        if (p < 0.0) {
            // Roundoff from PSD quadratic forms; anything materially negative
            // was already rejected upstream.
            p = 0.0;
        }
        sum += p;
    }
    if (sum <= 0.0) {
        throw ValidationError("sampling: all outcome probabilities vanish");
    }
    if (std::abs(sum - 1.0) > kSumTolerance) {
        std::ostringstream msg;
        msg << "sampling: outcome probabilities sum to " << sum
            << ", more than " << kSumTolerance << " away from 1; "
            << "the preparation and measurement are inconsistent";
        throw ValidationError(msg.str());
    }
    for (double& p : probs) {
        p /= sum;
    }
    return probs;
}

std::vector<double> cumulative(const std::vector<double>& probs) {
    std::vector<double> cdf(probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        cdf[i] = acc;
    }
    return cdf;
}

// Smallest index i with u <= cdf[i]; ties resolve to the lower index. The
// final bucket catches u beyond the last cumulative value (roundoff).
int pick_index(const std::vector<double>& cdf, double u) {
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) {
        return static_cast<int>(cdf.size()) - 1;
    }
    return static_cast<int>(it - cdf.begin());
}

Vector haar_vector(int dim, RandomStream& rng) {
    Vector psi(dim);
    double norm2 = 0.0;
    do {
        for (int k = 0; k < dim; ++k) {
            psi(k) = rng.complex_gaussian();
        }
        norm2 = psi.squaredNorm();
    } while (norm2 <= 0.0);
    return psi / std::sqrt(norm2);
}

std::vector<double> haar_state_distribution(const Povm& povm, const Vector& psi) {
    std::vector<double> probs(static_cast<std::size_t>(povm.size()));
    for (int i = 0; i < povm.size(); ++i) {
        probs[static_cast<std::size_t>(i)] =
            (psi.adjoint() * povm.element(i) * psi).real()(0, 0);
    }
    return normalize_for_sampling(std::move(probs));
}

// Shots for stream t out of n, first (shots mod n) streams take one extra.
std::uint64_t stream_share(std::uint64_t shots, int streams, int t) {
    const std::uint64_t base = shots / static_cast<std::uint64_t>(streams);
    const std::uint64_t extra = shots % static_cast<std::uint64_t>(streams);
    return base + (static_cast<std::uint64_t>(t) < extra ? 1 : 0);
}

void check_config(const SimulationConfig& config) {
    if (config.shots == 0) {
        throw ValidationError("simulation: shot count must be positive");
    }
    if (config.streams < 1) {
        throw ValidationError("simulation: stream count must be positive");
    }
}

} // namespace

RandomStream::RandomStream(std::uint64_t seed) : engine_(seed) {}

double RandomStream::uniform() {
    // Top 53 bits of the engine output, the usual portable double recipe.
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // Box-Muller; shift the first uniform into (0, 1] to keep the log finite.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

Complex RandomStream::complex_gaussian() {
    const double re = gaussian();
    const double im = gaussian();
    return Complex(re, im);
}

std::uint64_t RandomStream::next_u64() {
    return engine_();
}

std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t stream) {
    // splitmix64 finalizer on master advanced by (stream + 1) increments of
    // the golden-gamma; the +1 keeps substream 0 distinct from the master.
    std::uint64_t z = master + (stream + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Matrix sample_haar_state(int dim, RandomStream& rng) {
    if (dim < 1) {
        throw DimensionError("sample_haar_state: dimension must be positive");
    }
    const Vector psi = haar_vector(dim, rng);
    return psi * psi.adjoint();
}

std::vector<double> sampling_distribution(const Povm& povm, const Matrix& rho) {
    return normalize_for_sampling(born_probabilities(povm, rho));
}

std::vector<int> sample_outcomes(const Povm& povm, const Matrix& rho,
                                 const SimulationConfig& config) {
    check_config(config);
    const std::vector<double> cdf = cumulative(sampling_distribution(povm, rho));
    std::vector<int> outcomes;
    outcomes.reserve(static_cast<std::size_t>(config.shots));
    for (int t = 0; t < config.streams; ++t) {
        RandomStream rng(derive_stream_seed(config.seed, static_cast<std::uint64_t>(t)));
        const std::uint64_t share = stream_share(config.shots, config.streams, t);
        for (std::uint64_t k = 0; k < share; ++k) {
            outcomes.push_back(pick_index(cdf, rng.uniform()));
        }
    }
    return outcomes;
}

std::vector<int> sample_outcomes(const Povm& povm, const Ensemble& ensemble,
                                 const SimulationConfig& config) {
    check_config(config);
    if (config.source == StateSource::fixed_state) {
        throw ValidationError("simulation: ensemble sampling requested with a "
                              "fixed-state configuration");
    }
    if (ensemble.dim() != povm.dim()) {
        throw DimensionError("simulation: ensemble dimension does not match the POVM");
    }
    const bool haar = config.source == StateSource::haar_uniform || ensemble.is_uniform();

    // Finite ensembles reuse one outcome distribution per member.
    std::vector<std::vector<double>> member_cdf;
    std::vector<double> weight_cdf;
    if (!haar) {
        std::vector<double> weights;
        for (const Ensemble::Member& m : ensemble.members()) {
            member_cdf.push_back(cumulative(sampling_distribution(povm, m.state)));
            weights.push_back(m.weight);
        }
        weight_cdf = cumulative(weights);
    }

    std::vector<int> outcomes;
    outcomes.reserve(static_cast<std::size_t>(config.shots));
    for (int t = 0; t < config.streams; ++t) {
        RandomStream rng(derive_stream_seed(config.seed, static_cast<std::uint64_t>(t)));
        const std::uint64_t share = stream_share(config.shots, config.streams, t);
        for (std::uint64_t k = 0; k < share; ++k) {
            if (haar) {
                const Vector psi = haar_vector(povm.dim(), rng);
                const std::vector<double> cdf = cumulative(haar_state_distribution(povm, psi));
                outcomes.push_back(pick_index(cdf, rng.uniform()));
            } else {
                const int member = pick_index(weight_cdf, rng.uniform());
                outcomes.push_back(
                    pick_index(member_cdf[static_cast<std::size_t>(member)], rng.uniform()));
            }
        }
    }
    return outcomes;
}

EmpiricalReport empirical_estimate(const ProcessingRule& rule,
                                   const std::vector<int>& outcomes) {
    if (outcomes.empty()) {
        throw ValidationError("empirical_estimate: no outcomes supplied");
    }
    const Eigen::Index n_outcomes = rule.coeffs.size();
    Complex mean(0.0, 0.0);
    for (int o : outcomes) {
        if (o < 0 || o >= n_outcomes) {
            throw ValidationError("empirical_estimate: outcome index " + std::to_string(o) +
                                  " is out of range for " + std::to_string(n_outcomes) +
                                  " coefficients");
        }
        mean += rule.coeffs(o);
    }
    const double n = static_cast<double>(outcomes.size());
    mean /= n;

    double ss = 0.0;
    for (int o : outcomes) {
        ss += std::norm(rule.coeffs(o) - mean);
    }
    EmpiricalReport report;
    report.mean_estimate = mean;
    report.empirical_variance = outcomes.size() > 1 ? ss / (n - 1.0) : 0.0;
    report.standard_error = std::sqrt(report.empirical_variance / n);
    report.shots_used = static_cast<std::uint64_t>(outcomes.size());
    return report;
}

} // namespace povmkit
