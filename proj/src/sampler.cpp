#include "groupnoise/sampler.hpp"

#include "groupnoise/errors.hpp"
#include "groupnoise/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace groupnoise {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::size_t kMinReps = 100;

void check_mc(double rho, int n, std::size_t reps) {
    if (!(rho >= 0.0 && rho <= 1.0)) throw ConfigError("rho must lie in [0,1]");
    if (n < 0) throw ConfigError("n must be >= 0");
    if (reps < kMinReps) throw ConfigError("Monte Carlo estimates need at least 100 replicates");
}

// One replicate of the refreshed pair; only endpoints are kept.
void walk_pair(const MeasureSampler& sampler, double rho, int n, Engine& rng, Element& x, Element& y) {
    const Group& g = *sampler.group();
    x = g.identity();
    y = x;
    for (int k = 0; k < n; ++k) {
        const Element& s = sampler(rng);
        g.right_multiply(x, s);
        if (uniform01(rng) < rho) {
            g.right_multiply(y, sampler(rng));
        } else {
            g.right_multiply(y, s);
        }
    }
}

Element walk(const MeasureSampler& sampler, int n, Engine& rng) {
    const Group& g = *sampler.group();
    Element x = g.identity();
    for (int k = 0; k < n; ++k) g.right_multiply(x, sampler(rng));
    return x;
}

std::vector<double> per_replicate(std::size_t reps, const std::function<double(std::size_t)>& f) {
    std::vector<double> values(reps);
    parallel_for(reps, [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) values[r] = f(r);
    });
    return values;
}

}  // namespace

Engine replicate_engine(std::uint64_t seed, std::uint64_t index) {
    return Engine(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

double uniform01(Engine& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

MeasureSampler::MeasureSampler(const SparseMeasure& mu) : group_(mu.group()) {
    double acc = 0.0;
    for (const auto& [e, m] : mu.atoms()) {
        atoms_.push_back(e);
        acc += m;
        cumulative_.push_back(acc);
    }
    if (atoms_.empty()) throw ConfigError("cannot sample from an empty measure");
    cumulative_.back() = std::numeric_limits<double>::infinity();
}

std::size_t MeasureSampler::index(Engine& rng) const {
    if (atoms_.size() == 1) return 0;
    const double u = uniform01(rng);
    return static_cast<std::size_t>(std::upper_bound(cumulative_.begin(), cumulative_.end(), u) -
                                    cumulative_.begin());
}

EstimateResult summarize(const std::vector<double>& values, std::uint64_t seed, std::string label) {
    EstimateResult out;
    out.reps = values.size();
    out.seed = seed;
    out.label = std::move(label);
    if (values.empty()) return out;
    double sum = 0.0;
    for (double v : values) sum += v;
    out.mean = sum / static_cast<double>(values.size());
    if (values.size() >= 2) {
        double ss = 0.0;
        for (double v : values) ss += (v - out.mean) * (v - out.mean);
        const double var = ss / static_cast<double>(values.size() - 1);
        out.std_error = std::sqrt(var / static_cast<double>(values.size()));
    }
    return out;
}

EstimateResult ratio_of(const EstimateResult& num, const EstimateResult& den, std::string label) {
    if (!(den.mean > 0.0)) throw ConfigError("degenerate denominator in ratio estimate");
    EstimateResult out;
    out.mean = num.mean / den.mean;
    out.std_error = std::hypot(num.std_error / den.mean, out.mean * den.std_error / den.mean);
    out.reps = std::min(num.reps, den.reps);
    out.seed = num.seed;
    out.label = std::move(label);
    return out;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
    return splitmix64(seed ^ splitmix64(tag ^ 0xd1b54a32d192ed03ULL));
}

WalkSample sample_pair(const SparseMeasure& mu, double rho, int n, std::uint64_t seed,
                       std::uint64_t replicate) {
    if (!(rho >= 0.0 && rho <= 1.0)) throw ConfigError("rho must lie in [0,1]");
    if (n < 0) throw ConfigError("n must be >= 0");
    const MeasureSampler sampler(mu);
    const Group& g = *mu.group();
    Engine rng = replicate_engine(seed, replicate);
    WalkSample out;
    out.x = g.identity();
    out.y = g.identity();
    for (int k = 0; k < n; ++k) {
        const Element& s = sampler(rng);
        const bool refresh = uniform01(rng) < rho;
        const Element& r = refresh ? sampler(rng) : s;
        out.increments.push_back(s);
        out.mask.push_back(refresh);
        out.refreshed.push_back(r);
        g.right_multiply(out.x, s);
        g.right_multiply(out.y, r);
    }
    return out;
}

EstimateResult mean_distance(const SparseMeasure& mu, std::optional<double> rho, int n, std::size_t reps,
                             std::uint64_t seed) {
    check_mc(rho.value_or(1.0), n, reps);
    const MeasureSampler sampler(mu);
    const Group& g = *mu.group();
    auto values = per_replicate(reps, [&](std::size_t r) {
        Engine rng = replicate_engine(seed, r);
        Element x, y;
        if (rho) {
            walk_pair(sampler, *rho, n, rng, x, y);
        } else {
            x = walk(sampler, n, rng);
            y = walk(sampler, n, rng);
        }
        return static_cast<double>(g.distance(x, y));
    });
    return summarize(values, seed, rho ? "mean_distance" : "mean_distance_independent");
}

EstimateResult distance_ns_ratio(const SparseMeasure& mu, double rho, int n, std::size_t reps,
                                 std::uint64_t seed) {
    const EstimateResult num = mean_distance(mu, rho, n, reps, seed);
    const EstimateResult den = mean_distance(mu, std::nullopt, n, reps, derive_seed(seed, 1));
    return ratio_of(num, den, "distance_ns_ratio");
}

EstimateResult tv_event_lower_bound(const SparseMeasure& mu, double rho, int n, const PairEvent& event,
                                    std::size_t reps, std::uint64_t seed) {
    check_mc(rho, n, reps);
    const MeasureSampler sampler(mu);
    auto values = per_replicate(reps, [&](std::size_t r) {
        Engine rng = replicate_engine(seed, r);
        Element x, y;
        walk_pair(sampler, rho, n, rng, x, y);
        const Element z = walk(sampler, n, rng);
        return (event(x, y) ? 1.0 : 0.0) - (event(x, z) ? 1.0 : 0.0);
    });
    const EstimateResult diff = summarize(values, seed, "");
    EstimateResult out;
    out.mean = std::max(0.0, 2.0 * (std::abs(diff.mean) - 2.0 * diff.std_error));
    out.std_error = 2.0 * diff.std_error;
    out.reps = reps;
    out.seed = seed;
    out.label = "tv_event_lower_bound";
    return out;
}

EstimateResult speed_estimate(const SparseMeasure& mu, int n, std::size_t reps, std::uint64_t seed) {
    check_mc(0.0, n, reps);
    if (n < 1) throw ConfigError("speed needs n >= 1");
    const MeasureSampler sampler(mu);
    const Group& g = *mu.group();
    auto values = per_replicate(reps, [&](std::size_t r) {
        Engine rng = replicate_engine(seed, r);
        return static_cast<double>(g.length(walk(sampler, n, rng))) / n;
    });
    return summarize(values, seed, "speed");
}

PairEvent equal_event() {
    return [](const Element& a, const Element& b) { return a == b; };
}

PairEvent first_letter_event() {
    return [](const Element& a, const Element& b) {
        return !a.code.empty() && !b.code.empty() && a.code.front() == b.code.front();
    };
}

}  // namespace groupnoise
