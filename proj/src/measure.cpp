#include "groupnoise/measure.hpp"

#include "groupnoise/dense_measure.hpp"
#include "groupnoise/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>
#include <unordered_map>

namespace groupnoise {

namespace {

using AtomMap = std::unordered_map<Element, double, ElementHash>;

std::vector<SparseMeasure::Atom> sorted_atoms(AtomMap&& map) {
    std::vector<SparseMeasure::Atom> atoms;
    atoms.reserve(map.size());
    for (auto& [e, m] : map)
        if (m > 0.0) atoms.emplace_back(e, m);
    std::sort(atoms.begin(), atoms.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return atoms;
}

void renormalise(std::vector<SparseMeasure::Atom>& atoms, double tolerance) {
    double total = 0.0;
    for (const auto& a : atoms) total += a.second;
    if (!(std::abs(total - 1.0) <= tolerance))
        throw Error("measure total mass drifted to " + std::to_string(total));
    if (total != 1.0)
        for (auto& a : atoms) a.second /= total;
}

double plogp_bits(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

void check_probability(double rho, const char* what) {
    if (!(rho >= 0.0 && rho <= 1.0))
        throw ConfigError(std::string(what) + " must lie in [0,1], got " + std::to_string(rho));
}

}  // namespace

void require_same_group(const Group& a, const Group& b) {
    if (!a.same_as(b)) throw SpecMismatch("group mismatch: " + a.name() + " vs " + b.name());
}

// ---------------------------------------------------------------------------

SparseMeasure SparseMeasure::dirac(GroupPtr group, Element at) {
    group->check(at);
    SparseMeasure m;
    m.group_ = std::move(group);
    m.atoms_.emplace_back(std::move(at), 1.0);
    return m;
}

SparseMeasure SparseMeasure::uniform(GroupPtr group, std::span<const Element> support) {
    if (support.empty()) throw ConfigError("uniform measure on empty support");
    std::vector<Atom> atoms;
    const double w = 1.0 / static_cast<double>(support.size());
    for (const auto& e : support) atoms.emplace_back(e, w);
    return from_atoms(std::move(group), std::move(atoms));
}

SparseMeasure SparseMeasure::from_atoms(GroupPtr group, std::vector<Atom> atoms) {
    AtomMap map;
    for (auto& [e, m] : atoms) {
        group->check(e);
        if (!(m >= 0.0) || !std::isfinite(m)) throw ConfigError("negative or non-finite mass");
        map[e] += m;
    }
    SparseMeasure out;
    out.group_ = std::move(group);
    out.atoms_ = sorted_atoms(std::move(map));
    if (out.atoms_.empty()) throw ConfigError("measure has no positive atoms");
    double total = 0.0;
    for (const auto& a : out.atoms_) total += a.second;
    if (std::abs(total - 1.0) > kMassTolerance)
        throw ConfigError("measure total mass " + std::to_string(total) + " is not 1");
    renormalise(out.atoms_, kMassTolerance);
    return out;
}

double SparseMeasure::mass(const Element& e) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), e,
                               [](const Atom& a, const Element& key) { return a.first < key; });
    return it != atoms_.end() && it->first == e ? it->second : 0.0;
}

double SparseMeasure::total_mass() const {
    double total = 0.0;
    for (const auto& a : atoms_) total += a.second;
    return total;
}

// ---------------------------------------------------------------------------

SparseMeasure convolve(const SparseMeasure& lhs, const SparseMeasure& rhs, std::size_t budget) {
    require_same_group(*lhs.group(), *rhs.group());
    const std::size_t projected = lhs.size() * rhs.size();
    if (projected > budget) throw BudgetExceeded("convolution exceeds atom budget", 0, projected);
    const Group& g = *lhs.group();
    AtomMap map;
    map.reserve(projected);
    for (const auto& [x, px] : lhs.atoms()) {
        for (const auto& [y, py] : rhs.atoms()) map[g.mul(x, y)] += px * py;
    }
    auto atoms = sorted_atoms(std::move(map));
    renormalise(atoms, 1e-9);
    return SparseMeasure::from_atoms(lhs.group(), std::move(atoms));
}

SparseMeasure nth_convolution(const SparseMeasure& step, int n, std::size_t budget) {
    if (n < 0) throw ConfigError("convolution power must be >= 0");
    SparseMeasure out = SparseMeasure::dirac(step.group(), step.group()->identity());
    for (int i = 1; i <= n; ++i) {
        const std::size_t projected = out.size() * step.size();
        if (projected > budget)
            throw BudgetExceeded("convolution power exceeds atom budget",
                                 static_cast<std::size_t>(i - 1), projected);
        out = convolve(out, step, budget);
    }
    return out;
}

PairMeasure noise_step_measure(const SparseMeasure& mu, double rho) {
    check_probability(rho, "noise parameter rho");
    GroupPtr pair_group = product_group(mu.group(), mu.group());
    std::vector<SparseMeasure::Atom> atoms;
    atoms.reserve(mu.size() * mu.size());
    for (const auto& [x, px] : mu.atoms()) {
        for (const auto& [y, py] : mu.atoms()) {
            double m = rho * px * py;
            if (x == y) m += (1.0 - rho) * px;
            if (m > 0.0) atoms.emplace_back(pair_group->pair(x, y), m);
        }
    }
    return SparseMeasure::from_atoms(std::move(pair_group), std::move(atoms));
}

PairMeasure product_measure(const SparseMeasure& first, const SparseMeasure& second) {
    GroupPtr pair_group = product_group(first.group(), second.group());
    std::vector<SparseMeasure::Atom> atoms;
    atoms.reserve(first.size() * second.size());
    for (const auto& [x, px] : first.atoms())
        for (const auto& [y, py] : second.atoms()) atoms.emplace_back(pair_group->pair(x, y), px * py);
    return SparseMeasure::from_atoms(std::move(pair_group), std::move(atoms));
}

SparseMeasure marginal(const PairMeasure& pair, Side side) {
    const Group& g = *pair.group();
    GroupPtr target = side == Side::First ? g.first() : g.second();
    AtomMap map;
    for (const auto& [e, m] : pair.atoms()) {
        auto [x, y] = g.split(e);
        map[side == Side::First ? x : y] += m;
    }
    return SparseMeasure::from_atoms(std::move(target), sorted_atoms(std::move(map)));
}

SparseMeasure pushforward(const SparseMeasure& xi, GroupPtr target,
                          const std::function<Element(const Element&)>& map_fn) {
    AtomMap map;
    for (const auto& [e, m] : xi.atoms()) map[map_fn(e)] += m;
    return SparseMeasure::from_atoms(std::move(target), sorted_atoms(std::move(map)));
}

double entropy(const SparseMeasure& xi) {
    double h = 0.0;
    for (const auto& a : xi.atoms()) h += plogp_bits(a.second);
    return h;
}

double l1_distance(const SparseMeasure& lhs, const SparseMeasure& rhs) {
    require_same_group(*lhs.group(), *rhs.group());
    const auto& a = lhs.atoms();
    const auto& b = rhs.atoms();
    double sum = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
            sum += a[i++].second;
        } else if (i == a.size() || b[j].first < a[i].first) {
            sum += b[j++].second;
        } else {
            sum += std::abs(a[i++].second - b[j++].second);
        }
    }
    return sum;
}

double conditional_entropy_exact(const SparseMeasure& mu, double rho, int n, std::size_t budget) {
    check_probability(rho, "noise parameter rho");
    if (n < 0) throw ConfigError("n must be >= 0");
    const PairMeasure step = noise_step_measure(mu, rho);
    if (mu.group()->affine_layout()) {
        ConvolutionPower walk(mu, budget);
        ConvolutionPower pair(step, budget);
        return entropy(pair.advance_to(n)) - entropy(walk.advance_to(n));
    }
    return entropy(nth_convolution(step, n, budget)) - entropy(nth_convolution(mu, n, budget));
}

// ---------------------------------------------------------------------------

namespace {

struct Scored {
    double weight;
    double score;  // value per unit weight
};

HomogeneityValue greedy_share(std::vector<Scored> items, double eps, double normaliser) {
    // Fractional-knapsack order: best value per unit mass first.
    std::stable_sort(items.begin(), items.end(),
                     [](const Scored& a, const Scored& b) { return a.score > b.score; });
    HomogeneityValue out;
    double used = 0.0, value = 0.0;
    std::size_t k = 0;
    for (; k < items.size(); ++k) {
        if (used + items[k].weight > eps * (1.0 + 1e-12) + 1e-15) break;
        used += items[k].weight;
        value += items[k].weight * items[k].score;
    }
    out.value = value / normaliser;
    if (k < items.size()) out.gap = std::max(0.0, eps - used) * items[k].score / normaliser;
    return out;
}

}  // namespace

HomogeneityValue entropy_homogeneity(const SparseMeasure& xi, double eps) {
    check_probability(eps, "epsilon");
    const double h = entropy(xi);
    if (!(h > 0.0)) throw ConfigError("entropy homogeneity of a zero-entropy measure");
    std::vector<Scored> items;
    items.reserve(xi.size());
    for (const auto& [e, m] : xi.atoms()) items.push_back({m, -std::log2(m)});
    return greedy_share(std::move(items), eps, h);
}

HomogeneityValue spread_homogeneity(const PairMeasure& pair, double eps) {
    check_probability(eps, "epsilon");
    const Group& g = *pair.group();
    const Group& base = *g.first();
    std::vector<Scored> items;
    items.reserve(pair.size());
    double mean = 0.0;
    for (const auto& [e, m] : pair.atoms()) {
        auto [x, y] = g.split(e);
        const auto d = static_cast<double>(base.distance(x, y));
        items.push_back({m, d});
        mean += m * d;
    }
    if (!(mean > 0.0)) throw ConfigError("spread homogeneity of a zero-spread measure");
    return greedy_share(std::move(items), eps, mean);
}

std::vector<ProfilePoint> asymptotic_entropy_profile(const SparseMeasure& mu,
                                                     std::span<const int> n_list,
                                                     std::size_t budget) {
    std::vector<ProfilePoint> out;
    int last = 0;
    for (int n : n_list) {
        if (n <= last) throw ConfigError("profile schedule must be strictly increasing and >= 1");
        last = n;
    }
    if (mu.group()->affine_layout()) {
        ConvolutionPower walk(mu, budget);
        for (int n : n_list) out.push_back({n, entropy(walk.advance_to(n)) / n});
        return out;
    }
    SparseMeasure current = SparseMeasure::dirac(mu.group(), mu.group()->identity());
    int steps = 0;
    for (int n : n_list) {
        while (steps < n) {
            if (current.size() * mu.size() > budget)
                throw BudgetExceeded("entropy profile exceeds atom budget",
                                     static_cast<std::size_t>(steps), current.size() * mu.size());
            current = convolve(current, mu, budget);
            ++steps;
        }
        out.push_back({n, entropy(current) / n});
    }
    return out;
}

// ---------------------------------------------------------------------------

void write_atoms(std::ostream& os, const SparseMeasure& xi) {
    char buf[64];
    for (const auto& [e, m] : xi.atoms()) {
        std::snprintf(buf, sizeof buf, "%.17g", m);
        os << Group::encode_text(e) << '\t' << buf << '\n';
    }
}

SparseMeasure read_atoms(std::istream& is, GroupPtr group) {
    std::vector<SparseMeasure::Atom> atoms;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto close = line.find(']');
        if (close == std::string::npos) throw ConfigError("bad atom line: " + line);
        Element e = group->parse_text(std::string_view(line).substr(0, close + 1));
        double m = 0.0;
        try {
            m = std::stod(line.substr(close + 1));
        } catch (const std::exception&) {
            throw ConfigError("bad atom mass: " + line);
        }
        atoms.emplace_back(std::move(e), m);
    }
    return SparseMeasure::from_atoms(std::move(group), std::move(atoms));
}

}  // namespace groupnoise
