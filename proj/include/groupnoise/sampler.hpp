#pragma once

#include "groupnoise/measure.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace groupnoise {

using Engine = std::mt19937_64;

/// Independent stream for replicate `index` of a run seeded with `seed`.
Engine replicate_engine(std::uint64_t seed, std::uint64_t index);
/// Uniform double in [0, 1) with 53 random bits.
double uniform01(Engine& rng);

/// Inverse-CDF sampler over the atoms of a measure.
class MeasureSampler {
public:
    explicit MeasureSampler(const SparseMeasure& mu);

    std::size_t index(Engine& rng) const;
    const Element& operator()(Engine& rng) const { return atoms_[index(rng)]; }
    const std::vector<Element>& support() const noexcept { return atoms_; }
    const GroupPtr& group() const noexcept { return group_; }

private:
    GroupPtr group_;
    std::vector<Element> atoms_;
    std::vector<double> cumulative_;
};

struct WalkSample {
    std::vector<Element> increments;  // s_1..s_n
    std::vector<bool> mask;           // true where s_k was refreshed
    std::vector<Element> refreshed;   // r_1..r_n
    Element x;                        // s_1...s_n
    Element y;                        // r_1...r_n
};

struct EstimateResult {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t reps = 0;
    std::uint64_t seed = 0;
    std::string label;
};

/// Mean and standard error of per-replicate values, summed in index order.
EstimateResult summarize(const std::vector<double>& values, std::uint64_t seed, std::string label);
/// num / den for independent estimates, delta-method error.
EstimateResult ratio_of(const EstimateResult& num, const EstimateResult& den, std::string label);
/// Seed of an auxiliary stream derived from a run seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

WalkSample sample_pair(const SparseMeasure& mu, double rho, int n, std::uint64_t seed,
                       std::uint64_t replicate = 0);

/// E d(X_n, Y_n^rho), or E d(X_n, X'_n) when `rho` is empty.
EstimateResult mean_distance(const SparseMeasure& mu, std::optional<double> rho, int n,
                             std::size_t reps, std::uint64_t seed);
/// E d(X_n, Y_n^rho) / E d(X_n, X'_n) with delta-method error; the
/// denominator runs on derive_seed(seed, 1).
EstimateResult distance_ns_ratio(const SparseMeasure& mu, double rho, int n, std::size_t reps,
                                 std::uint64_t seed);

using PairEvent = std::function<bool(const Element&, const Element&)>;

/// Lower bound on || pi_n^rho - mu_n x mu_n ||_1 from one event A:
/// max(0, 2 (|pi(A) - mu^2(A)| - 2 se)), estimated from paired replicates.
/// `std_error` is the standard error of 2 |pi(A) - mu^2(A)|.
EstimateResult tv_event_lower_bound(const SparseMeasure& mu, double rho, int n, const PairEvent& event,
                                    std::size_t reps, std::uint64_t seed);

/// E d(e, X_n) / n.
EstimateResult speed_estimate(const SparseMeasure& mu, int n, std::size_t reps, std::uint64_t seed);

/// Events.
PairEvent equal_event();
/// Reduced words of a free group start with the same letter (both nonempty).
PairEvent first_letter_event();

}  // namespace groupnoise
