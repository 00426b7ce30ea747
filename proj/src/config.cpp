#include "groupnoise/experiment.hpp"

#include "groupnoise/errors.hpp"
#include "groupnoise/wreath.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace groupnoise {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    for (;;) {
        const auto at = s.find(sep);
        out.push_back(trim(s.substr(0, at)));
        if (at == std::string_view::npos) break;
        s.remove_prefix(at + 1);
    }
    return out;
}

std::vector<std::string_view> split_list(std::string_view s) {
    std::vector<std::string_view> out;
    for (auto item : split(s, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

double parse_double(std::string_view s, std::string_view key) {
    s = trim(s);
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty())
        throw ConfigError("bad number for " + std::string(key) + ": '" + std::string(s) + "'");
    return v;
}

template <class Int>
Int parse_int(std::string_view s, std::string_view key) {
    s = trim(s);
    Int v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty())
        throw ConfigError("bad integer for " + std::string(key) + ": '" + std::string(s) + "'");
    return v;
}

// "p/q" or a decimal.
double parse_mass(std::string_view s) {
    const auto slash = s.find('/');
    if (slash == std::string_view::npos) return parse_double(s, "atom mass");
    const double den = parse_double(s.substr(slash + 1), "atom mass");
    if (den == 0.0) throw ConfigError("atom mass with zero denominator");
    return parse_double(s.substr(0, slash), "atom mass") / den;
}

bool parse_bool(std::string_view s, std::string_view key) {
    s = trim(s);
    if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
    if (s == "0" || s == "false" || s == "no" || s == "off") return false;
    throw ConfigError("bad boolean for " + std::string(key));
}

struct Preset {
    const char* name;
    const char* text;
};

constexpr Preset kPresets[] = {
    {"finite-mixing",
     "kind = exact-l1\ngroup = Z/5\nmeasure = lazy\nrho = 0.2\nn = 10, 25, 50, 100, 150, 200\n"},
    {"abelian-l1", "kind = exact-l1\ngroup = Z\nmeasure = simple\nrho = 0.3\nn = 8, 64, 256, 1024\n"},
    {"abelian-entropy", "kind = entropy-ns\ngroup = Z\nmeasure = simple\nrho = 0.3\nn = 64, 256, 1024\n"},
    {"abelian-distance",
     "kind = avg-distance\ngroup = Z\nmeasure = simple\nrho = 0.25\nn = 10000\nreps = 100000\n"},
    {"dihedral-dichotomy",
     "kind = exact-l1\ngroup = D_inf\nmeasure = simple, lazy\nrho = 0.3\nn = 256, 1024, 4096\n"},
    {"lamplighter-ens", "kind = lamplighter\ngroup = lamplighter\nmeasure = sws\nrho = 0.1\nn = 2500, 10000\nreps = 10000\n"},
    {"grigorchuk-partial-ens",
     "kind = grigorchuk\nrho = 0.05, 0.2\nn = 256, 512, 1024, 2048, 4096\nreps = 200\nd0 = 2\n"},
    {"free-group-witness",
     "kind = avg-distance, tv-event\ngroup = F2\nmeasure = simple\nrho = 0.2\nn = 2000\nreps = 2000\n"
     "event = first-letter\n"},
};

}  // namespace

std::string_view kind_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::ExactL1: return "exact-l1";
        case ExperimentKind::EntropyNs: return "entropy-ns";
        case ExperimentKind::UScale: return "u-scale";
        case ExperimentKind::AvgDistance: return "avg-distance";
        case ExperimentKind::TvEvent: return "tv-event";
        case ExperimentKind::Lamplighter: return "lamplighter";
        case ExperimentKind::Grigorchuk: return "grigorchuk";
        case ExperimentKind::Homogeneity: return "homogeneity";
        case ExperimentKind::Speed: return "speed";
    }
    return "?";
}

ExperimentKind parse_kind(std::string_view name) {
    for (int k = 0; k <= static_cast<int>(ExperimentKind::Speed); ++k) {
        const auto kind = static_cast<ExperimentKind>(k);
        if (kind_name(kind) == name) return kind;
    }
    throw ConfigError("unknown experiment kind '" + std::string(name) + "'");
}

void apply_setting(ExperimentConfig& cfg, std::string_view key_value) {
    const auto eq = key_value.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected key=value, got '" + std::string(key_value) + "'");
    const std::string_view key = trim(key_value.substr(0, eq));
    const std::string_view value = trim(key_value.substr(eq + 1));

    if (key == "kind") {
        cfg.kinds.clear();
        for (auto k : split_list(value)) cfg.kinds.push_back(parse_kind(k));
    } else if (key == "group") {
        cfg.group = std::string(value);
    } else if (key == "measure") {
        cfg.measures.clear();
        for (auto m : split_list(value)) cfg.measures.emplace_back(m);
    } else if (key == "atoms") {
        cfg.atoms = std::string(value);
    } else if (key == "rho") {
        cfg.rho.clear();
        for (auto r : split_list(value)) cfg.rho.push_back(parse_double(r, key));
    } else if (key == "n") {
        cfg.n.clear();
        for (auto r : split_list(value)) cfg.n.push_back(parse_int<int>(r, key));
    } else if (key == "reps") {
        cfg.reps = parse_int<std::size_t>(value, key);
    } else if (key == "seed") {
        cfg.seed = parse_int<std::uint64_t>(value, key);
    } else if (key == "budget") {
        cfg.budget = parse_int<std::size_t>(value, key);
    } else if (key == "eps") {
        cfg.eps.clear();
        for (auto r : split_list(value)) cfg.eps.push_back(parse_double(r, key));
    } else if (key == "s") {
        cfg.scales.clear();
        for (auto r : split_list(value)) cfg.scales.push_back(parse_double(r, key));
    } else if (key == "event") {
        cfg.event = std::string(value);
    } else if (key == "d0") {
        cfg.d0 = parse_int<int>(value, key);
    } else if (key == "timing") {
        cfg.timing = parse_bool(value, key);
    } else if (key == "out") {
        cfg.out = std::string(value);
    } else if (key == "format") {
        cfg.format = std::string(value);
    } else {
        throw ConfigError("unknown config key '" + std::string(key) + "'");
    }
}

ExperimentConfig parse_config(std::string_view text, ExperimentConfig base) {
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view v = line;
        if (const auto hash = v.find('#'); hash != std::string_view::npos) v = v.substr(0, hash);
        v = trim(v);
        if (v.empty()) continue;
        try {
            apply_setting(base, v);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return base;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void validate(const ExperimentConfig& cfg) {
    if (cfg.kinds.empty()) throw ConfigError("no experiment kind given");
    if (cfg.n.empty()) throw ConfigError("empty n schedule");
    for (std::size_t i = 0; i < cfg.n.size(); ++i) {
        if (cfg.n[i] < 0) throw ConfigError("n values must be >= 0");
        if (i > 0 && cfg.n[i] <= cfg.n[i - 1]) throw ConfigError("n schedule must be strictly increasing");
    }
    for (double r : cfg.rho)
        if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("rho values must lie in [0,1]");
    for (double e : cfg.eps)
        if (!(e >= 0.0 && e <= 1.0)) throw ConfigError("eps values must lie in [0,1]");
    for (double s : cfg.scales)
        if (!(s > 0.0)) throw ConfigError("scales s must be > 0");
    if (cfg.measures.empty()) throw ConfigError("no measure given");
    if (cfg.budget == 0) throw ConfigError("atom budget must be positive");
    if (cfg.format != "csv" && cfg.format != "json") throw ConfigError("format must be csv or json");
    const bool needs_rho = std::any_of(cfg.kinds.begin(), cfg.kinds.end(), [](ExperimentKind k) {
        return k != ExperimentKind::Speed;
    });
    if (needs_rho && cfg.rho.empty()) throw ConfigError("empty rho list");
    const bool monte_carlo = std::any_of(cfg.kinds.begin(), cfg.kinds.end(), [](ExperimentKind k) {
        return k == ExperimentKind::AvgDistance || k == ExperimentKind::TvEvent || k == ExperimentKind::Lamplighter ||
               k == ExperimentKind::Grigorchuk || k == ExperimentKind::Speed;
    });
    if (monte_carlo && cfg.reps < 2) throw ConfigError("Monte Carlo kinds need reps >= 2");
}

GroupPtr parse_group_spec(std::string_view spec) {
    spec = trim(spec);
    if (const auto at = spec.rfind(" x "); at != std::string_view::npos)
        return Group::product(parse_group_spec(spec.substr(0, at)), parse_group_spec(spec.substr(at + 3)));
    if (spec == "Z") return Group::lattice(1);
    if (spec.starts_with("Z^")) return Group::lattice(parse_int<int>(spec.substr(2), "group"));
    if (spec.starts_with("Z/")) return Group::cyclic(parse_int<int>(spec.substr(2), "group"));
    if (spec == "D_inf" || spec == "Dinf") return Group::dihedral();
    if (spec == "lamplighter") return Group::lamplighter();
    if (spec.starts_with("free:")) return Group::free(parse_int<int>(spec.substr(5), "group"));
    if (spec.size() > 1 && spec[0] == 'F') return Group::free(parse_int<int>(spec.substr(1), "group"));
    if (spec.starts_with("table:")) return Group::load_table(std::string(trim(spec.substr(6))));
    throw ConfigError("unknown group spec '" + std::string(spec) + "'");
}

SparseMeasure make_measure(const GroupPtr& group, std::string_view preset, std::string_view atoms) {
    std::vector<Element> support;
    for (const auto& g : group->generators())
        if (std::find(support.begin(), support.end(), g.element) == support.end()) support.push_back(g.element);
    if (preset == "simple" || preset == "lazy") {
        if (preset == "lazy") support.push_back(group->identity());
        if (support.empty()) throw ConfigError(group->name() + " has no generators");
        return SparseMeasure::uniform(group, support);
    }
    if (preset == "sws") {
        if (group->kind() != GroupKind::Lamplighter) throw ConfigError("sws measure needs the lamplighter group");
        return sws_measure();
    }
    if (preset == "custom") {
        std::vector<SparseMeasure::Atom> list;
        for (auto item : split(atoms, ';')) {
            if (item.empty()) continue;
            const auto close = item.rfind(']');
            const auto colon = item.find(':', close == std::string_view::npos ? 0 : close);
            if (close == std::string_view::npos || colon == std::string_view::npos)
                throw ConfigError("bad atom '" + std::string(item) + "', expected [code]:mass");
            list.emplace_back(group->parse_text(trim(item.substr(0, close + 1))), parse_mass(trim(item.substr(colon + 1))));
        }
        return SparseMeasure::from_atoms(group, std::move(list));
    }
    throw ConfigError("unknown measure preset '" + std::string(preset) + "'");
}

std::vector<std::string> preset_names() {
    std::vector<std::string> out;
    for (const auto& p : kPresets) out.emplace_back(p.name);
    return out;
}

std::string preset_text(std::string_view name) {
    for (const auto& p : kPresets)
        if (name == p.name) return p.text;
    throw ConfigError("unknown preset '" + std::string(name) + "'");
}

ExperimentConfig preset_config(std::string_view name) { return parse_config(preset_text(name)); }

}  // namespace groupnoise
