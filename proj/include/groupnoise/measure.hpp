#pragma once

#include "groupnoise/group.hpp"

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace groupnoise {

inline constexpr std::size_t kDefaultAtomBudget = 50'000'000;
inline constexpr double kMassTolerance = 1e-12;

/// Finitely supported probability measure on a group.
///
/// Atoms are kept sorted by element code with strictly positive masses.
/// A measure on a product group G x G plays the role of a pair measure.
class SparseMeasure {
public:
    using Atom = std::pair<Element, double>;

    SparseMeasure() = default;

    static SparseMeasure dirac(GroupPtr group, Element at);
    static SparseMeasure uniform(GroupPtr group, std::span<const Element> support);
    /// Duplicate atoms are merged, zero atoms dropped; the total must be within
    /// kMassTolerance of 1 and is renormalised exactly.
    static SparseMeasure from_atoms(GroupPtr group, std::vector<Atom> atoms);

    const GroupPtr& group() const noexcept { return group_; }
    const std::vector<Atom>& atoms() const noexcept { return atoms_; }
    std::size_t size() const noexcept { return atoms_.size(); }
    double mass(const Element& e) const;
    double total_mass() const;

private:
    GroupPtr group_;
    std::vector<Atom> atoms_;
};

using PairMeasure = SparseMeasure;

enum class Side { First, Second };

struct HomogeneityValue {
    double value = 0.0;
    /// Upper bound on how far the greedy value may sit below the supremum.
    double gap = 0.0;
};

SparseMeasure convolve(const SparseMeasure& lhs, const SparseMeasure& rhs,
                       std::size_t budget = kDefaultAtomBudget);
/// step^{*n} by linear iteration; n = 0 gives the identity Dirac mass.
SparseMeasure nth_convolution(const SparseMeasure& step, int n,
                              std::size_t budget = kDefaultAtomBudget);
/// One-step law (1-rho) mu^diag + rho mu x mu on G x G.
PairMeasure noise_step_measure(const SparseMeasure& mu, double rho);
PairMeasure product_measure(const SparseMeasure& first, const SparseMeasure& second);
SparseMeasure marginal(const PairMeasure& pair, Side side);
SparseMeasure pushforward(const SparseMeasure& xi, GroupPtr target,
                          const std::function<Element(const Element&)>& map);

/// Shannon entropy in bits.
double entropy(const SparseMeasure& xi);
double l1_distance(const SparseMeasure& lhs, const SparseMeasure& rhs);

/// H(Y_n | X_n) = H(pi_n) - H(mu_n), in bits. Uses the dense engine when
/// the group has an affine layout.
double conditional_entropy_exact(const SparseMeasure& mu, double rho, int n,
                                 std::size_t budget = kDefaultAtomBudget);

/// Greedy share of the entropy carried by the least likely atoms of total
/// mass at most eps.
HomogeneityValue entropy_homogeneity(const SparseMeasure& xi, double eps);
/// Greedy share of the mean pair distance carried by the farthest pairs of
/// total mass at most eps. `pair` lives on G x G; distances are taken in G.
HomogeneityValue spread_homogeneity(const PairMeasure& pair, double eps);

struct ProfilePoint {
    int n = 0;
    double entropy_rate = 0.0;  // H(mu_n)/n in bits
};
std::vector<ProfilePoint> asymptotic_entropy_profile(const SparseMeasure& mu,
                                                     std::span<const int> n_list,
                                                     std::size_t budget = kDefaultAtomBudget);

/// One atom per line: canonical element text, a tab, mass with 17 significant
/// digits.
void write_atoms(std::ostream& os, const SparseMeasure& xi);
SparseMeasure read_atoms(std::istream& is, GroupPtr group);

void require_same_group(const Group& a, const Group& b);

}  // namespace groupnoise
