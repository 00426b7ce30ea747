#pragma once

#include "groupnoise/measure.hpp"
#include "groupnoise/sampler.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace groupnoise {

// ---------------------------------------------------------------------------
// Lamplighter Z/2 wr Z, switch-walk-switch

/// uniform{e, s} * uniform{t, t^-1} * uniform{e, s}; eight atoms of mass 1/8.
SparseMeasure sws_measure();

struct LamplighterTrace {
    std::vector<std::int64_t> positions;                      // x_0..x_n
    std::map<std::int64_t, std::vector<int>> local_times;    // Loc(x, n)
    std::vector<bool> mask;                                   // mask[k-1] for increment k
    std::vector<std::int64_t> range;                          // sorted
    std::vector<std::int64_t> refreshed_range;                // sorted subset of range
};

/// Projected path of one replicate with its refresh mask. Visit time t >= 1
/// is carried by increment t and t = 0 by increment 1; a site is refreshed
/// when one of its visit times is carried by a refreshed increment.
LamplighterTrace lamplighter_trace(double rho, int n, std::uint64_t seed, std::uint64_t replicate = 0);

struct RangeStats {
    EstimateResult range;            // E|R_n|
    EstimateResult refreshed_range;  // E|R_n^ref|
};

/// Masks use their own uniforms, so refreshed sets are nested in rho for a
/// fixed seed.
RangeStats lamplighter_range_stats(double rho, int n, std::size_t reps, std::uint64_t seed);

struct LamplighterRatio {
    EstimateResult ratio;   // E|R^ref| / E|R|
    double log_correction;  // log2(n) / E|R|
};
LamplighterRatio entropy_ns_ratio_lamplighter(double rho, int n, std::size_t reps, std::uint64_t seed);

// ---------------------------------------------------------------------------
// First Grigorchuk group acting on the boundary of the binary tree

enum class GrigLetter : std::uint8_t { e, a, b, c, d };

/// Ray of the binary tree: explicit prefix then 1 forever. Canonical form has
/// no trailing 1 in the prefix; the empty prefix is 1^inf.
struct BoundaryPoint {
    std::vector<std::uint8_t> prefix;

    void canonicalize();
    friend bool operator==(const BoundaryPoint&, const BoundaryPoint&) = default;
    friend bool operator<(const BoundaryPoint& x, const BoundaryPoint& y) { return x.prefix < y.prefix; }
};

BoundaryPoint grig_apply(BoundaryPoint p, GrigLetter g);
void grig_apply_inplace(BoundaryPoint& p, GrigLetter g);

/// Factored switch-walk increment lambda * h * s; lambda moves no point.
struct GrigIncrement {
    std::uint8_t lamp = 0;
    GrigLetter h = GrigLetter::e;  // e, b, c or d
    GrigLetter s = GrigLetter::e;  // e or a
};

struct InvertedOrbit {
    std::vector<BoundaryPoint> points;     // sorted
    std::vector<BoundaryPoint> refreshed;  // sorted subset
};

/// O(w) = { o, o.g_n, o.g_{n-1}g_n, ..., o.g_1...g_n } for o = 1^inf under the
/// right action. p_k = o.g_k...g_n is carried by increment k and p_{n+1} = o
/// by increment n; with a mask, `refreshed` holds the points carried by at
/// least one masked increment.
InvertedOrbit inverted_orbit(const std::vector<GrigIncrement>& word,
                             const std::optional<std::vector<bool>>& mask = std::nullopt);

struct OrbitStats {
    int n = 0;
    double rho = 0.0;
    double mean_orbit = 0.0;
    double mean_refreshed = 0.0;
    double se_orbit = 0.0;
    double se_refreshed = 0.0;
    double lambda_entropy = 1.0;  // H(mu_Lambda) in bits, Lambda = Z/2 uniform
    std::size_t reps = 0;
    std::uint64_t seed = 0;
};

/// Uniform independent factors: lambda in Z/2, h in {e,b,c,d}, s in {e,a}.
std::vector<GrigIncrement> sample_grig_word(int n, Engine& rng);
OrbitStats grigorchuk_orbit_stats(double rho, int n, std::size_t reps, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Bounds

/// rho * H_Lambda * E|O(X_n)|.
double lemma_entropy_lower_bound(double rho, double lambda_entropy, double mean_orbit);

struct RefreshRecursion {
    double rho1 = 0.0;   // one application of the recursion
    int iterations = 0;  // applications needed to reach >= 1/2
};
/// rho_1 = 1 - (1 - rho) / (1 + rho / (d0 - 1)).
RefreshRecursion refresh_recursion(double rho, int d0);

}  // namespace groupnoise
