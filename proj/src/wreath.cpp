#include "groupnoise/wreath.hpp"

#include "groupnoise/errors.hpp"
#include "groupnoise/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace groupnoise {

namespace {

constexpr std::uint64_t kMaskStream = 0x5851f42d4c957f2dULL;

void check_rho(double rho) {
    if (!(rho >= 0.0 && rho <= 1.0)) throw ConfigError("rho must lie in [0,1]");
}

void check_reps(std::size_t reps) {
    if (reps < 100) throw ConfigError("Monte Carlo estimates need at least 100 replicates");
}

Engine mask_engine(std::uint64_t seed, std::uint64_t replicate) {
    return replicate_engine(seed ^ kMaskStream, replicate);
}

struct RangeSample {
    std::vector<double> range, refreshed;
};

RangeSample sample_ranges(double rho, int n, std::size_t reps, std::uint64_t seed) {
    check_rho(rho);
    if (n < 0) throw ConfigError("n must be >= 0");
    check_reps(reps);
    RangeSample out{std::vector<double>(reps), std::vector<double>(reps)};
    const auto width = static_cast<std::size_t>(2 * n + 1);
    parallel_for(reps, [&](std::size_t begin, std::size_t end) {
        std::vector<std::uint32_t> seen(width, 0), hit(width, 0);
        std::vector<bool> mask(static_cast<std::size_t>(n) + 1);
        for (std::size_t r = begin; r < end; ++r) {
            const auto stamp = static_cast<std::uint32_t>(r - begin + 1);
            Engine path = replicate_engine(seed, r);
            Engine masks = mask_engine(seed, r);
            for (int k = 1; k <= n; ++k) mask[static_cast<std::size_t>(k)] = uniform01(masks) < rho;
            std::int64_t x = 0;
            std::size_t range = 0, refreshed = 0;
            for (int t = 0; t <= n; ++t) {
                if (t > 0) x += (path() >> 63) ? 1 : -1;
                const auto cell = static_cast<std::size_t>(x + n);
                if (seen[cell] != stamp) {
                    seen[cell] = stamp;
                    ++range;
                }
                const int carrier = std::max(t, 1);
                if (carrier <= n && mask[static_cast<std::size_t>(carrier)] && hit[cell] != stamp) {
                    hit[cell] = stamp;
                    ++refreshed;
                }
            }
            out.range[r] = static_cast<double>(range);
            out.refreshed[r] = static_cast<double>(refreshed);
        }
    });
    return out;
}

GrigLetter next_directed(GrigLetter g) {
    switch (g) {
        case GrigLetter::b: return GrigLetter::c;
        case GrigLetter::c: return GrigLetter::d;
        default: return GrigLetter::b;
    }
}

}  // namespace

SparseMeasure sws_measure() {
    GroupPtr g = Group::lamplighter();
    const Element e = g->identity();
    const Element sw = lamplighter_element({0}, 0);
    const std::vector<Element> switches{e, sw};
    const std::vector<Element> moves{lamplighter_element({}, 1), lamplighter_element({}, -1)};
    const SparseMeasure mu1 = SparseMeasure::uniform(g, switches);
    const SparseMeasure mu2 = SparseMeasure::uniform(g, moves);
    return convolve(convolve(mu1, mu2), mu1);
}

LamplighterTrace lamplighter_trace(double rho, int n, std::uint64_t seed, std::uint64_t replicate) {
    check_rho(rho);
    if (n < 0) throw ConfigError("n must be >= 0");
    LamplighterTrace tr;
    Engine path = replicate_engine(seed, replicate);
    Engine masks = mask_engine(seed, replicate);
    for (int k = 1; k <= n; ++k) tr.mask.push_back(uniform01(masks) < rho);
    std::int64_t x = 0;
    for (int t = 0; t <= n; ++t) {
        if (t > 0) x += (path() >> 63) ? 1 : -1;
        tr.positions.push_back(x);
        tr.local_times[x].push_back(t);
    }
    for (const auto& [site, times] : tr.local_times) {
        tr.range.push_back(site);
        const bool refreshed = std::any_of(times.begin(), times.end(), [&](int t) {
            const int carrier = std::max(t, 1);
            return carrier <= n && tr.mask[static_cast<std::size_t>(carrier - 1)];
        });
        if (refreshed) tr.refreshed_range.push_back(site);
    }
    return tr;
}

RangeStats lamplighter_range_stats(double rho, int n, std::size_t reps, std::uint64_t seed) {
    const RangeSample s = sample_ranges(rho, n, reps, seed);
    return {summarize(s.range, seed, "range"), summarize(s.refreshed, seed, "refreshed_range")};
}

LamplighterRatio entropy_ns_ratio_lamplighter(double rho, int n, std::size_t reps, std::uint64_t seed) {
    const RangeSample s = sample_ranges(rho, n, reps, seed);
    const EstimateResult range = summarize(s.range, seed, "range");
    const EstimateResult refreshed = summarize(s.refreshed, seed, "refreshed_range");
    LamplighterRatio out;
    out.ratio.mean = refreshed.mean / range.mean;
    double ss = 0.0;
    for (std::size_t i = 0; i < reps; ++i) {
        const double resid = s.refreshed[i] - out.ratio.mean * s.range[i];
        ss += resid * resid;
    }
    out.ratio.std_error = std::sqrt(ss / static_cast<double>(reps - 1) / static_cast<double>(reps)) / range.mean;
    out.ratio.reps = reps;
    out.ratio.seed = seed;
    out.ratio.label = "refreshed_range_ratio";
    out.log_correction = n > 1 ? std::log2(static_cast<double>(n)) / range.mean : 0.0;
    return out;
}

// ---------------------------------------------------------------------------

void BoundaryPoint::canonicalize() {
    while (!prefix.empty() && prefix.back() == 1) prefix.pop_back();
}

void grig_apply_inplace(BoundaryPoint& p, GrigLetter g) {
    auto& bits = p.prefix;
    auto flip = [&](std::size_t i) {
        if (i == bits.size()) {
            bits.push_back(0);  // tail bit 1 becomes 0
        } else {
            bits[i] ^= 1;
            p.canonicalize();
        }
    };
    switch (g) {
        case GrigLetter::e: return;
        case GrigLetter::a: flip(0); return;
        default: break;
    }
    GrigLetter state = g;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] == 0) {
            if (state != GrigLetter::d) flip(i + 1);
            return;
        }
        state = next_directed(state);
    }
    // Directed generators fix the all-1 tail.
}

BoundaryPoint grig_apply(BoundaryPoint p, GrigLetter g) {
    grig_apply_inplace(p, g);
    return p;
}

InvertedOrbit inverted_orbit(const std::vector<GrigIncrement>& word, const std::optional<std::vector<bool>>& mask) {
    const std::size_t n = word.size();
    if (mask && mask->size() != n) throw ConfigError("refresh mask length differs from word length");
    struct Trajectory {
        BoundaryPoint point;
        bool refreshed;
    };
    std::vector<Trajectory> active;
    // Trajectories started at different times stay distinct or stay merged,
    // since each increment acts bijectively; only o itself can be re-entered.
    auto enter_base = [&](bool carried) {
        for (auto& tr : active) {
            if (tr.point.prefix.empty()) {
                tr.refreshed = tr.refreshed || carried;
                return;
            }
        }
        active.push_back({BoundaryPoint{}, carried});
    };
    for (std::size_t k = 0; k < n; ++k) {
        enter_base(mask && (*mask)[k]);
        for (auto& tr : active) {
            grig_apply_inplace(tr.point, word[k].h);
            grig_apply_inplace(tr.point, word[k].s);
        }
    }
    enter_base(mask && n > 0 && (*mask)[n - 1]);

    InvertedOrbit out;
    for (const auto& tr : active) {
        out.points.push_back(tr.point);
        if (tr.refreshed) out.refreshed.push_back(tr.point);
    }
    std::sort(out.points.begin(), out.points.end());
    std::sort(out.refreshed.begin(), out.refreshed.end());
    return out;
}

std::vector<GrigIncrement> sample_grig_word(int n, Engine& rng) {
    static constexpr GrigLetter kH[] = {GrigLetter::e, GrigLetter::b, GrigLetter::c, GrigLetter::d};
    std::vector<GrigIncrement> word(static_cast<std::size_t>(std::max(n, 0)));
    for (auto& inc : word) {
        const std::uint64_t bits = rng();
        inc.lamp = static_cast<std::uint8_t>(bits >> 63);
        inc.h = kH[(bits >> 61) & 3];
        inc.s = ((bits >> 60) & 1) ? GrigLetter::a : GrigLetter::e;
    }
    return word;
}

OrbitStats grigorchuk_orbit_stats(double rho, int n, std::size_t reps, std::uint64_t seed) {
    check_rho(rho);
    if (n < 0) throw ConfigError("n must be >= 0");
    check_reps(reps);
    std::vector<double> orbit(reps), refreshed(reps);
    parallel_for(reps, [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            Engine rng = replicate_engine(seed, r);
            Engine masks = mask_engine(seed, r);
            const auto word = sample_grig_word(n, rng);
            std::vector<bool> mask(word.size());
            for (std::size_t k = 0; k < word.size(); ++k) mask[k] = uniform01(masks) < rho;
            const InvertedOrbit o = inverted_orbit(word, mask);
            orbit[r] = static_cast<double>(o.points.size());
            refreshed[r] = static_cast<double>(o.refreshed.size());
        }
    });
    const EstimateResult eo = summarize(orbit, seed, "orbit");
    const EstimateResult er = summarize(refreshed, seed, "refreshed_orbit");
    OrbitStats out;
    out.n = n;
    out.rho = rho;
    out.mean_orbit = eo.mean;
    out.mean_refreshed = er.mean;
    out.se_orbit = eo.std_error;
    out.se_refreshed = er.std_error;
    out.reps = reps;
    out.seed = seed;
    return out;
}

// ---------------------------------------------------------------------------

double lemma_entropy_lower_bound(double rho, double lambda_entropy, double mean_orbit) {
    check_rho(rho);
    if (!(lambda_entropy >= 0.0) || !(mean_orbit >= 0.0))
        throw ConfigError("entropy and orbit size must be >= 0");
    return rho * lambda_entropy * mean_orbit;
}

RefreshRecursion refresh_recursion(double rho, int d0) {
    if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("refresh recursion needs rho in (0,1)");
    if (d0 < 2) throw ConfigError("refresh recursion needs d0 >= 2");
    auto step = [d0](double r) { return 1.0 - (1.0 - r) / (1.0 + r / (d0 - 1)); };
    RefreshRecursion out;
    out.rho1 = step(rho);
    double r = rho;
    while (r < 0.5) {
        r = step(r);
        if (++out.iterations > 100'000'000) throw Error("refresh recursion did not reach 1/2");
    }
    return out;
}

}  // namespace groupnoise
