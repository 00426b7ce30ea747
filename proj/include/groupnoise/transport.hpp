#pragma once

#include "groupnoise/measure.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace groupnoise {

using DistanceFn = std::function<double(const Element&, const Element&)>;

inline constexpr std::int64_t kDefaultQuantization = 1'000'000'000'000;  // 1e12
inline constexpr std::size_t kMaxFlowAtoms = 10'000;
inline constexpr std::size_t kMinCostAtoms = 2'000;

struct TransportInstance {
    SparseMeasure first;
    SparseMeasure second;
    DistanceFn distance;
    double s = 1.0;
    std::int64_t quantization = kDefaultQuantization;
};

/// Word distance of the group both measures live on.
DistanceFn word_metric(GroupPtr group);
/// Sum metric on G x G: d(x,x') + d(y,y').
DistanceFn sum_metric(GroupPtr product);

/// Integer masses summing exactly to `scale`, by largest remainder.
std::vector<std::int64_t> quantize(const SparseMeasure& xi, std::int64_t scale);

/// inf over couplings nu of nu(d(x,y) >= s).
double u_s_exact(const TransportInstance& inst);
/// Exact W_1 on the quantized instance.
double w1_exact(const TransportInstance& inst);
/// inf over couplings nu of nu(x != y) = 1 - sum_x min(xi1(x), xi2(x)).
double coupling_tv(const SparseMeasure& first, const SparseMeasure& second);

}  // namespace groupnoise
