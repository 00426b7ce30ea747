#pragma once

#include "groupnoise/measure.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace groupnoise {

enum class ExperimentKind {
    ExactL1,
    EntropyNs,
    UScale,
    AvgDistance,
    TvEvent,
    Lamplighter,
    Grigorchuk,
    Homogeneity,
    Speed,
};

std::string_view kind_name(ExperimentKind kind);
ExperimentKind parse_kind(std::string_view name);

struct ExperimentConfig {
    std::vector<ExperimentKind> kinds;
    std::string group = "Z";
    std::vector<std::string> measures{"simple"};
    std::string atoms;  // custom atom list: "[c ...]:mass; ..."
    std::vector<double> rho;
    std::vector<int> n;
    std::size_t reps = 1000;
    std::uint64_t seed = 1;
    std::size_t budget = kDefaultAtomBudget;
    std::vector<double> eps{0.1};
    std::vector<double> scales{1.0};
    std::string event = "first-letter";
    int d0 = 0;  // refresh recursion branching; 0 disables those rows
    bool timing = false;
    std::string out;
    std::string format = "csv";
};

/// Flat `key = value` text; `#` starts a comment. Later keys win.
ExperimentConfig parse_config(std::string_view text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path);
void apply_setting(ExperimentConfig& cfg, std::string_view key_value);
void validate(const ExperimentConfig& cfg);

/// "Z", "Z^3", "Z/5", "D_inf", "lamplighter", "F2", "table:<path>",
/// and "A x B" for direct products.
GroupPtr parse_group_spec(std::string_view spec);
/// simple: uniform on generators; lazy: uniform on generators and e;
/// sws: switch-walk-switch on the lamplighter; custom: `atoms`.
SparseMeasure make_measure(const GroupPtr& group, std::string_view preset, std::string_view atoms = {});

struct ReportRow {
    std::string kind;
    std::string group;
    std::optional<double> rho;
    std::optional<int> n;
    std::string metric;
    double value = 0.0;
    std::optional<double> std_error;
    std::optional<std::size_t> reps;
    std::optional<std::uint64_t> seed;
    std::optional<double> wall_ms;

    friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

std::vector<ReportRow> run_experiment(const ExperimentConfig& cfg);

std::vector<std::string> preset_names();
/// Config text of a named preset.
std::string preset_text(std::string_view name);
ExperimentConfig preset_config(std::string_view name);

}  // namespace groupnoise
