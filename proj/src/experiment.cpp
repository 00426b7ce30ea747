#include "groupnoise/experiment.hpp"

#include "groupnoise/dense_measure.hpp"
#include "groupnoise/errors.hpp"
#include "groupnoise/report.hpp"
#include "groupnoise/sampler.hpp"
#include "groupnoise/transport.hpp"
#include "groupnoise/wreath.hpp"

#include <chrono>
#include <cmath>
#include <functional>

namespace groupnoise {

namespace {

using Clock = std::chrono::steady_clock;

class RowSink {
public:
    RowSink(const ExperimentConfig& cfg, std::vector<ReportRow>& rows) : cfg_(cfg), rows_(rows) {}

    void begin(ExperimentKind kind, std::string group) {
        kind_ = std::string(kind_name(kind));
        group_ = std::move(group);
        start_ = Clock::now();
    }
    void restart() { start_ = Clock::now(); }

    void exact(std::optional<double> rho, std::optional<int> n, std::string metric, double value) {
        push(rho, n, std::move(metric), value, std::nullopt, false);
    }
    void estimate(std::optional<double> rho, std::optional<int> n, std::string metric, const EstimateResult& e) {
        push(rho, n, std::move(metric), e.mean, e.std_error, true, e.reps, e.seed);
    }
    void estimate(std::optional<double> rho, std::optional<int> n, std::string metric, double value, double se,
                  std::size_t reps, std::uint64_t seed) {
        push(rho, n, std::move(metric), value, se, true, reps, seed);
    }

private:
    void push(std::optional<double> rho, std::optional<int> n, std::string metric, double value,
              std::optional<double> se, bool mc, std::size_t reps = 0, std::uint64_t seed = 0) {
        ReportRow row;
        row.kind = kind_;
        row.group = group_;
        row.rho = rho;
        row.n = n;
        row.metric = std::move(metric);
        row.value = value;
        row.std_error = se;
        if (mc) {
            row.reps = reps;
            row.seed = seed;
        }
        if (cfg_.timing)
            row.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
        rows_.push_back(std::move(row));
    }

    const ExperimentConfig& cfg_;
    std::vector<ReportRow>& rows_;
    std::string kind_, group_;
    Clock::time_point start_;
};

std::string with_param(const char* metric, const char* param, double v) {
    return std::string(metric) + "[" + param + "=" + format_number(v) + "]";
}

// Visits pi_n^rho (sparse) along the n schedule; dense when possible.
void for_each_pair_law(const SparseMeasure& mu, double rho, const std::vector<int>& schedule, std::size_t budget,
                       const std::function<void(int, const SparseMeasure&)>& f) {
    const PairMeasure step = noise_step_measure(mu, rho);
    if (step.group()->affine_layout()) {
        ConvolutionPower power(step, budget);
        for (int n : schedule) f(n, power.advance_to(n).to_sparse());
        return;
    }
    SparseMeasure current = SparseMeasure::dirac(step.group(), step.group()->identity());
    int steps = 0;
    for (int n : schedule) {
        while (steps < n) {
            if (current.size() * step.size() > budget)
                throw BudgetExceeded("pair law exceeds atom budget", static_cast<std::size_t>(steps),
                                     current.size() * step.size());
            current = convolve(current, step, budget);
            ++steps;
        }
        f(n, current);
    }
}

SparseMeasure walk_law(const SparseMeasure& mu, int n, std::size_t budget) {
    if (mu.group()->affine_layout()) {
        ConvolutionPower power(mu, budget);
        return power.advance_to(n).to_sparse();
    }
    return nth_convolution(mu, n, budget);
}

void run_exact_l1(const ExperimentConfig& cfg, const SparseMeasure& mu, RowSink& out) {
    const bool finite = mu.group()->order().has_value();
    for (double rho : cfg.rho) {
        const PairMeasure step = noise_step_measure(mu, rho);
        if (step.group()->affine_layout()) {
            ConvolutionPower power(step, cfg.budget);
            for (int n : cfg.n) {
                const DenseMeasure& pi = power.advance_to(n);
                const DenseMeasure first = marginal(pi, Side::First);
                const DenseMeasure second = marginal(pi, Side::Second);
                out.exact(rho, n, "l1_product", l1_to_product(pi, first, second));
                if (finite) out.exact(rho, n, "l1_uniform", l1_to_uniform(pi));
                out.restart();
            }
            continue;
        }
        for_each_pair_law(mu, rho, cfg.n, cfg.budget, [&](int n, const SparseMeasure& pi) {
            const SparseMeasure product = product_measure(marginal(pi, Side::First), marginal(pi, Side::Second));
            out.exact(rho, n, "l1_product", l1_distance(pi, product));
            out.restart();
        });
    }
}

void run_entropy_ns(const ExperimentConfig& cfg, const SparseMeasure& mu, RowSink& out) {
    std::vector<double> walk_entropy;
    if (mu.group()->affine_layout()) {
        ConvolutionPower power(mu, cfg.budget);
        for (int n : cfg.n) walk_entropy.push_back(entropy(power.advance_to(n)));
    } else {
        SparseMeasure current = SparseMeasure::dirac(mu.group(), mu.group()->identity());
        int steps = 0;
        for (int n : cfg.n) {
            for (; steps < n; ++steps) {
                if (current.size() * mu.size() > cfg.budget)
                    throw BudgetExceeded("walk law exceeds atom budget", static_cast<std::size_t>(steps),
                                         current.size() * mu.size());
                current = convolve(current, mu, cfg.budget);
            }
            walk_entropy.push_back(entropy(current));
        }
    }
    for (double rho : cfg.rho) {
        const PairMeasure step = noise_step_measure(mu, rho);
        std::size_t i = 0;
        auto emit = [&](int n, double pair_entropy) {
            const double hx = walk_entropy[i++];
            const double cond = pair_entropy - hx;
            out.exact(rho, n, "entropy_walk", hx);
            out.exact(rho, n, "entropy_conditional", cond);
            if (hx > 0.0) out.exact(rho, n, "entropy_ratio", cond / hx);
            out.restart();
        };
        if (step.group()->affine_layout()) {
            ConvolutionPower power(step, cfg.budget);
            for (int n : cfg.n) emit(n, entropy(power.advance_to(n)));
        } else {
            for_each_pair_law(mu, rho, cfg.n, cfg.budget, [&](int n, const SparseMeasure& pi) { emit(n, entropy(pi)); });
        }
    }
}

void run_u_scale(const ExperimentConfig& cfg, const SparseMeasure& mu, RowSink& out) {
    for (double rho : cfg.rho) {
        for_each_pair_law(mu, rho, cfg.n, cfg.budget, [&](int n, const SparseMeasure& pi) {
            const SparseMeasure product = product_measure(marginal(pi, Side::First), marginal(pi, Side::Second));
            TransportInstance inst{pi, product, sum_metric(pi.group()), 1.0};
            for (double s : cfg.scales) {
                inst.s = s;
                out.exact(rho, n, with_param("U", "s", s), u_s_exact(inst));
            }
            if (pi.size() + product.size() <= kMinCostAtoms) out.exact(rho, n, "W1", w1_exact(inst));
            out.exact(rho, n, "tv", coupling_tv(pi, product));
            out.restart();
        });
    }
}

void run_homogeneity(const ExperimentConfig& cfg, const SparseMeasure& mu, RowSink& out) {
    for (int n : cfg.n) {
        const SparseMeasure law = walk_law(mu, n, cfg.budget);
        if (entropy(law) > 0.0) {
            for (double eps : cfg.eps) {
                const HomogeneityValue h = entropy_homogeneity(law, eps);
                out.exact(std::nullopt, n, with_param("h", "eps", eps), h.value);
                out.exact(std::nullopt, n, with_param("h_gap", "eps", eps), h.gap);
            }
        }
        out.restart();
    }
    for (double rho : cfg.rho) {
        if (rho == 0.0) continue;
        for_each_pair_law(mu, rho, cfg.n, cfg.budget, [&](int n, const SparseMeasure& pi) {
            if (n == 0) return;
            for (double eps : cfg.eps) {
                const HomogeneityValue f = spread_homogeneity(pi, eps);
                out.exact(rho, n, with_param("f", "eps", eps), f.value);
                out.exact(rho, n, with_param("f_gap", "eps", eps), f.gap);
            }
            out.restart();
        });
    }
}

void run_avg_distance(const ExperimentConfig& cfg, const SparseMeasure& mu, RowSink& out) {
    for (int n : cfg.n) {
        const EstimateResult independent = mean_distance(mu, std::nullopt, n, cfg.reps, derive_seed(cfg.seed, 1));
        for (double rho : cfg.rho) {
            const EstimateResult noisy = mean_distance(mu, rho, n, cfg.reps, cfg.seed);
            out.estimate(rho, n, "mean_distance", noisy);
            out.estimate(rho, n, "mean_distance_independent", independent);
            out.estimate(rho, n, "distance_ratio", ratio_of(noisy, independent, "distance_ratio"));
            out.restart();
        }
    }
}

void run_tv_event(const ExperimentConfig& cfg, const SparseMeasure& mu, RowSink& out) {
    PairEvent event;
    if (cfg.event == "first-letter") {
        if (mu.group()->kind() != GroupKind::Free) throw ConfigError("first-letter event needs a free group");
        event = first_letter_event();
    } else if (cfg.event == "equal") {
        event = equal_event();
    } else {
        throw ConfigError("unknown event '" + cfg.event + "'");
    }
    for (int n : cfg.n)
        for (double rho : cfg.rho) {
            out.estimate(rho, n, "tv_lower_bound[" + cfg.event + "]",
                         tv_event_lower_bound(mu, rho, n, event, cfg.reps, cfg.seed));
            out.restart();
        }
}

void run_speed(const ExperimentConfig& cfg, const SparseMeasure& mu, RowSink& out) {
    for (int n : cfg.n) {
        out.estimate(std::nullopt, n, "speed", speed_estimate(mu, n, cfg.reps, cfg.seed));
        out.restart();
    }
}

void run_lamplighter(const ExperimentConfig& cfg, RowSink& out) {
    for (double rho : cfg.rho)
        for (int n : cfg.n) {
            const RangeStats stats = lamplighter_range_stats(rho, n, cfg.reps, cfg.seed);
            const LamplighterRatio ratio = entropy_ns_ratio_lamplighter(rho, n, cfg.reps, cfg.seed);
            out.estimate(rho, n, "range", stats.range);
            out.estimate(rho, n, "refreshed_range", stats.refreshed_range);
            out.estimate(rho, n, "refreshed_ratio", ratio.ratio);
            out.exact(rho, n, "log_correction", ratio.log_correction);
            out.restart();
        }
}

void run_grigorchuk(const ExperimentConfig& cfg, RowSink& out) {
    for (double rho : cfg.rho) {
        for (int n : cfg.n) {
            const OrbitStats s = grigorchuk_orbit_stats(rho, n, cfg.reps, cfg.seed);
            out.estimate(rho, n, "orbit", s.mean_orbit, s.se_orbit, s.reps, s.seed);
            out.estimate(rho, n, "refreshed_orbit", s.mean_refreshed, s.se_refreshed, s.reps, s.seed);
            if (n > 0) out.estimate(rho, n, "orbit_per_n", s.mean_orbit / n, s.se_orbit / n, s.reps, s.seed);
            out.estimate(rho, n, "lemma_bound", lemma_entropy_lower_bound(rho, s.lambda_entropy, s.mean_orbit),
                         rho * s.lambda_entropy * s.se_orbit, s.reps, s.seed);
            out.restart();
        }
        if (cfg.d0 >= 2 && rho > 0.0 && rho < 1.0) {
            const RefreshRecursion r = refresh_recursion(rho, cfg.d0);
            out.exact(rho, std::nullopt, with_param("refresh_rho1", "d0", cfg.d0), r.rho1);
            out.exact(rho, std::nullopt, with_param("refresh_iterations", "d0", cfg.d0), r.iterations);
            out.restart();
        }
    }
}

}  // namespace

std::vector<ReportRow> run_experiment(const ExperimentConfig& cfg) {
    validate(cfg);
    std::vector<ReportRow> rows;
    RowSink out(cfg, rows);
    for (ExperimentKind kind : cfg.kinds) {
        if (kind == ExperimentKind::Grigorchuk) {
            out.begin(kind, "Grigorchuk");
            run_grigorchuk(cfg, out);
            continue;
        }
        if (kind == ExperimentKind::Lamplighter) {
            out.begin(kind, "lamplighter:sws");
            run_lamplighter(cfg, out);
            continue;
        }
        const GroupPtr group = parse_group_spec(cfg.group);
        for (const auto& preset : cfg.measures) {
            const SparseMeasure mu = make_measure(group, preset, cfg.atoms);
            out.begin(kind, group->name() + ":" + preset);
            switch (kind) {
                case ExperimentKind::ExactL1: run_exact_l1(cfg, mu, out); break;
                case ExperimentKind::EntropyNs: run_entropy_ns(cfg, mu, out); break;
                case ExperimentKind::UScale: run_u_scale(cfg, mu, out); break;
                case ExperimentKind::Homogeneity: run_homogeneity(cfg, mu, out); break;
                case ExperimentKind::AvgDistance: run_avg_distance(cfg, mu, out); break;
                case ExperimentKind::TvEvent: run_tv_event(cfg, mu, out); break;
                case ExperimentKind::Speed: run_speed(cfg, mu, out); break;
                default: break;
            }
        }
    }
    return rows;
}

}  // namespace groupnoise
