#pragma once

#include <boost/container/small_vector.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace groupnoise {

/// Normal-form value of a group element.
///
/// The integer code is interpreted by the owning Group:
///   lattice(d)   d coordinates
///   finite       one index into the multiplication table
///   dihedral     (k, eps), the isometry x -> eps*x + k of the integer line
///   lamplighter  (position, lit lamps in increasing order)
///   free(r)      reduced word, letters +-(i+1) for generator i and its inverse
///   product      first component then second; the first is length-prefixed
///                only when its width is not fixed
struct Element {
    using Code = boost::container::small_vector<std::int64_t, 4>;
    Code code;

    Element() = default;
    Element(std::initializer_list<std::int64_t> values) : code(values) {}
    explicit Element(Code c) : code(std::move(c)) {}

    friend bool operator==(const Element& a, const Element& b) { return a.code == b.code; }
    friend bool operator<(const Element& a, const Element& b) {
        return std::lexicographical_compare(a.code.begin(), a.code.end(), b.code.begin(),
                                            b.code.end());
    }
};

struct ElementHash {
    std::size_t operator()(const Element& e) const noexcept;
};

enum class GroupKind { Lattice, Finite, Dihedral, Lamplighter, Free, Product };

struct Generator {
    std::string label;
    Element element;
};

/// Shape of a group of the form Z^dims x| F with F finite: every element is a
/// (layer, coordinates) pair and right multiplication by a fixed element maps
/// layer l to a fixed layer and translates coordinates by a vector depending
/// only on l. Lattices, finite groups, the infinite dihedral group and their
/// products have this form.
struct AffineLayout {
    int layers = 1;
    int dims = 0;
};

class Group;
using GroupPtr = std::shared_ptr<const Group>;

class Group {
public:
    static GroupPtr lattice(int dim);
    /// `table[i][j]` is the index of i*j. Empty `generators` means every
    /// non-identity element.
    static GroupPtr finite(std::vector<std::vector<int>> table, std::vector<int> generators = {},
                           std::string name = "finite");
    static GroupPtr cyclic(int order);
    /// Plain text: order m on the first line, then m rows of m indices.
    static GroupPtr load_table(const std::filesystem::path& path);
    static GroupPtr dihedral();
    static GroupPtr lamplighter();
    static GroupPtr free(int rank);
    static GroupPtr product(GroupPtr first, GroupPtr second);

    GroupKind kind() const noexcept { return kind_; }
    const std::string& name() const noexcept { return name_; }
    const std::vector<Generator>& generators() const noexcept { return generators_; }

    Element identity() const;
    Element mul(const Element& a, const Element& b) const;
    /// acc <- acc * g
    void right_multiply(Element& acc, const Element& g) const;
    Element inverse(const Element& a) const;
    /// Word length with respect to generators().
    std::int64_t length(const Element& a) const;
    std::int64_t distance(const Element& a, const Element& b) const;
    bool is_valid(const Element& a) const;
    void check(const Element& a) const;

    /// Width of every element code, when constant.
    std::optional<std::size_t> fixed_width() const noexcept { return width_; }
    std::optional<std::size_t> order() const;

    // Product accessors.
    const GroupPtr& first() const;
    const GroupPtr& second() const;
    Element pair(const Element& a, const Element& b) const;
    std::pair<Element, Element> split(const Element& a) const;

    // Finite accessors.
    const std::vector<std::vector<int>>& table() const;

    // Lattice dimension or free rank.
    int rank() const noexcept { return rank_; }

    std::optional<AffineLayout> affine_layout() const noexcept { return affine_; }
    void encode_affine(const Element& a, int& layer, std::span<std::int64_t> coords) const;
    Element decode_affine(int layer, std::span<const std::int64_t> coords) const;

    /// Human-readable form: "(3,-1)", "xyX", "({0,2},1)", ...
    std::string format(const Element& a) const;
    /// Canonical serialisation "[c0 c1 ...]" of the code vector.
    static std::string encode_text(const Element& a);
    Element parse_text(std::string_view text) const;

    bool same_as(const Group& other) const;

private:
    Group() = default;
    void finish();
    std::int64_t finite_index(const Element& a) const;

    GroupKind kind_ = GroupKind::Lattice;
    std::string name_;
    int rank_ = 0;
    std::vector<Generator> generators_;
    std::optional<std::size_t> width_;
    std::optional<AffineLayout> affine_;

    // finite
    std::vector<std::vector<int>> table_;
    std::vector<int> inverse_;
    std::vector<std::int64_t> finite_length_;
    int identity_index_ = 0;

    // product
    GroupPtr first_, second_;
};

// Free-function surface.

Element mul(const Group& g, const Element& a, const Element& b);
Element inverse(const Group& g, const Element& a);
std::int64_t word_distance(const Group& g, const Element& a, const Element& b);
/// Reduce a sequence of letters +-(i+1) to free-group normal form.
Element free_reduce(const Group& g, std::span<const std::int64_t> letters);
GroupPtr product_group(GroupPtr first, GroupPtr second);
/// Vertex index of a dihedral element on the line Cayley graph: (ab)^k sits
/// at 2k and (ab)^k a at 2k+1.
std::int64_t dihedral_position(const Group& g, const Element& a);
Element dihedral_from_position(const Group& g, std::int64_t position);

// Named elements.
Element dihedral_a();
Element dihedral_b();
Element lamplighter_element(std::vector<std::int64_t> lit, std::int64_t position);
std::vector<std::int64_t> lamplighter_lamps(const Element& a);
std::int64_t lamplighter_position(const Element& a);

}  // namespace groupnoise
