#include "groupnoise/group.hpp"

#include "groupnoise/errors.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <fstream>
#include <sstream>

namespace groupnoise {

namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t out;
    if (__builtin_add_overflow(a, b, &out)) throw OverflowError("64-bit overflow in group law");
    return out;
}

std::int64_t checked_neg(std::int64_t a) {
    if (a == INT64_MIN) throw OverflowError("64-bit overflow in group law");
    return -a;
}

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::string free_letter(int rank, std::int64_t letter) {
    static constexpr char kNames[] = {'x', 'y', 'z', 'w'};
    const auto index = static_cast<int>(std::abs(letter)) - 1;
    if (rank <= 4) {
        char c = kNames[index];
        if (letter < 0) c = static_cast<char>(c - 'a' + 'A');
        return std::string(1, c);
    }
    return (letter < 0 ? "G" : "g") + std::to_string(index + 1);
}

// Symmetric difference of two sorted lamp sets, the second shifted by `shift`.
void toggle_shifted(Element::Code& out, std::span<const std::int64_t> lhs,
                    std::span<const std::int64_t> rhs, std::int64_t shift) {
    std::size_t i = 0, j = 0;
    while (i < lhs.size() || j < rhs.size()) {
        if (j == rhs.size()) {
            out.push_back(lhs[i++]);
            continue;
        }
        const std::int64_t r = checked_add(rhs[j], shift);
        if (i == lhs.size() || r < lhs[i]) {
            out.push_back(r);
            ++j;
        } else if (lhs[i] < r) {
            out.push_back(lhs[i++]);
        } else {
            ++i;
            ++j;
        }
    }
}

}  // namespace

std::size_t ElementHash::operator()(const Element& e) const noexcept {
    std::uint64_t h = 0x84222325cbf29ce4ULL ^ e.code.size();
    for (auto v : e.code) h = mix64(h ^ static_cast<std::uint64_t>(v));
    return static_cast<std::size_t>(h);
}

// ---------------------------------------------------------------------------
// Construction

GroupPtr Group::lattice(int dim) {
    if (dim < 1) throw ConfigError("lattice dimension must be >= 1");
    std::shared_ptr<Group> g(new Group);
    g->kind_ = GroupKind::Lattice;
    g->rank_ = dim;
    g->name_ = dim == 1 ? "Z" : "Z^" + std::to_string(dim);
    for (int i = 0; i < dim; ++i) {
        for (int sign : {+1, -1}) {
            Element e;
            e.code.assign(static_cast<std::size_t>(dim), 0);
            e.code[static_cast<std::size_t>(i)] = sign;
            std::string label = dim == 1 ? (sign > 0 ? "+1" : "-1")
                                         : (sign > 0 ? "+e" : "-e") + std::to_string(i + 1);
            g->generators_.push_back({std::move(label), std::move(e)});
        }
    }
    g->width_ = static_cast<std::size_t>(dim);
    g->affine_ = AffineLayout{1, dim};
    return g;
}

GroupPtr Group::finite(std::vector<std::vector<int>> table, std::vector<int> generators,
                       std::string name) {
    const auto m = static_cast<int>(table.size());
    if (m < 1) throw ConfigError("finite group table is empty");
    for (const auto& row : table) {
        if (static_cast<int>(row.size()) != m) throw ConfigError("finite group table is not square");
        std::vector<bool> seen(static_cast<std::size_t>(m), false);
        for (int v : row) {
            if (v < 0 || v >= m || seen[static_cast<std::size_t>(v)])
                throw ConfigError("finite group table is not a Latin square");
            seen[static_cast<std::size_t>(v)] = true;
        }
    }
    for (int j = 0; j < m; ++j) {
        std::vector<bool> seen(static_cast<std::size_t>(m), false);
        for (int i = 0; i < m; ++i) {
            const int v = table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (seen[static_cast<std::size_t>(v)])
                throw ConfigError("finite group table is not a Latin square");
            seen[static_cast<std::size_t>(v)] = true;
        }
    }
    int identity = -1;
    for (int e = 0; e < m && identity < 0; ++e) {
        bool ok = true;
        for (int i = 0; i < m && ok; ++i) {
            ok = table[static_cast<std::size_t>(e)][static_cast<std::size_t>(i)] == i &&
                 table[static_cast<std::size_t>(i)][static_cast<std::size_t>(e)] == i;
        }
        if (ok) identity = e;
    }
    if (identity < 0) throw ConfigError("finite group table has no identity row/column");

    std::shared_ptr<Group> g(new Group);
    g->kind_ = GroupKind::Finite;
    g->name_ = std::move(name);
    g->identity_index_ = identity;
    g->table_ = std::move(table);
    g->inverse_.assign(static_cast<std::size_t>(m), -1);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            if (g->table_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] == identity) {
                g->inverse_[static_cast<std::size_t>(i)] = j;
            }
        }
    }
    if (generators.empty()) {
        for (int i = 0; i < m; ++i)
            if (i != identity) generators.push_back(i);
    }
    for (int s : generators) {
        if (s < 0 || s >= m) throw ConfigError("finite generator out of range");
        g->generators_.push_back({std::to_string(s), Element{s}});
    }

    // Word lengths by breadth-first search over right multiplication.
    g->finite_length_.assign(static_cast<std::size_t>(m), -1);
    g->finite_length_[static_cast<std::size_t>(identity)] = 0;
    std::deque<int> queue{identity};
    while (!queue.empty()) {
        const int x = queue.front();
        queue.pop_front();
        for (int s : generators) {
            const int y = g->table_[static_cast<std::size_t>(x)][static_cast<std::size_t>(s)];
            if (g->finite_length_[static_cast<std::size_t>(y)] < 0) {
                g->finite_length_[static_cast<std::size_t>(y)] =
                    g->finite_length_[static_cast<std::size_t>(x)] + 1;
                queue.push_back(y);
            }
        }
    }
    if (std::any_of(g->finite_length_.begin(), g->finite_length_.end(),
                    [](std::int64_t d) { return d < 0; }))
        throw ConfigError("finite generators do not generate the group");

    g->width_ = 1;
    g->affine_ = AffineLayout{m, 0};
    return g;
}

GroupPtr Group::cyclic(int order) {
    if (order < 1) throw ConfigError("cyclic order must be >= 1");
    std::vector<std::vector<int>> table(static_cast<std::size_t>(order),
                                        std::vector<int>(static_cast<std::size_t>(order)));
    for (int i = 0; i < order; ++i)
        for (int j = 0; j < order; ++j)
            table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = (i + j) % order;
    std::vector<int> gens;
    if (order > 1) gens.push_back(1);
    if (order > 2) gens.push_back(order - 1);
    return finite(std::move(table), std::move(gens), "Z/" + std::to_string(order));
}

GroupPtr Group::load_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open group table " + path.string());
    int m = 0;
    if (!(in >> m) || m < 1) throw ConfigError("group table: bad order line");
    std::vector<std::vector<int>> table(static_cast<std::size_t>(m),
                                        std::vector<int>(static_cast<std::size_t>(m)));
    for (auto& row : table)
        for (auto& v : row)
            if (!(in >> v)) throw ConfigError("group table: truncated table");
    return finite(std::move(table), {}, path.filename().string());
}

GroupPtr Group::dihedral() {
    std::shared_ptr<Group> g(new Group);
    g->kind_ = GroupKind::Dihedral;
    g->name_ = "D_inf";
    g->generators_ = {{"a", dihedral_a()}, {"b", dihedral_b()}};
    g->width_ = 2;
    g->affine_ = AffineLayout{2, 1};
    return g;
}

GroupPtr Group::lamplighter() {
    std::shared_ptr<Group> g(new Group);
    g->kind_ = GroupKind::Lamplighter;
    g->name_ = "lamplighter";
    g->generators_ = {{"t", lamplighter_element({}, 1)},
                      {"T", lamplighter_element({}, -1)},
                      {"s", lamplighter_element({0}, 0)}};
    return g;
}

GroupPtr Group::free(int rank) {
    if (rank < 1) throw ConfigError("free group rank must be >= 1");
    std::shared_ptr<Group> g(new Group);
    g->kind_ = GroupKind::Free;
    g->rank_ = rank;
    g->name_ = "F" + std::to_string(rank);
    for (int i = 1; i <= rank; ++i) {
        g->generators_.push_back({free_letter(rank, i), Element{i}});
        g->generators_.push_back({free_letter(rank, -i), Element{-i}});
    }
    return g;
}

GroupPtr Group::product(GroupPtr first, GroupPtr second) {
    if (!first || !second) throw ConfigError("product of null group");
    std::shared_ptr<Group> g(new Group);
    g->kind_ = GroupKind::Product;
    g->name_ = first->name() + " x " + second->name();
    g->first_ = std::move(first);
    g->second_ = std::move(second);
    const Element e1 = g->first_->identity();
    const Element e2 = g->second_->identity();
    for (const auto& s : g->first_->generators())
        g->generators_.push_back({"(" + s.label + ",e)", g->pair(s.element, e2)});
    for (const auto& s : g->second_->generators())
        g->generators_.push_back({"(e," + s.label + ")", g->pair(e1, s.element)});
    if (g->first_->width_ && g->second_->width_) g->width_ = *g->first_->width_ + *g->second_->width_;
    if (g->first_->affine_ && g->second_->affine_) {
        g->affine_ = AffineLayout{g->first_->affine_->layers * g->second_->affine_->layers,
                                  g->first_->affine_->dims + g->second_->affine_->dims};
    }
    return g;
}

// ---------------------------------------------------------------------------
// Accessors

const GroupPtr& Group::first() const {
    if (kind_ != GroupKind::Product) throw SpecMismatch(name_ + " is not a product group");
    return first_;
}

const GroupPtr& Group::second() const {
    if (kind_ != GroupKind::Product) throw SpecMismatch(name_ + " is not a product group");
    return second_;
}

const std::vector<std::vector<int>>& Group::table() const {
    if (kind_ != GroupKind::Finite) throw SpecMismatch(name_ + " is not a finite group");
    return table_;
}

std::optional<std::size_t> Group::order() const {
    switch (kind_) {
        case GroupKind::Finite: return table_.size();
        case GroupKind::Product: {
            auto a = first_->order();
            auto b = second_->order();
            if (a && b) return *a * *b;
            return std::nullopt;
        }
        default: return std::nullopt;
    }
}

bool Group::same_as(const Group& other) const {
    if (this == &other) return true;
    if (kind_ != other.kind_ || rank_ != other.rank_) return false;
    switch (kind_) {
        case GroupKind::Finite:
            return table_ == other.table_ && finite_length_ == other.finite_length_;
        case GroupKind::Product:
            return first_->same_as(*other.first_) && second_->same_as(*other.second_);
        default: return true;
    }
}

Element Group::pair(const Element& a, const Element& b) const {
    if (kind_ != GroupKind::Product) throw SpecMismatch(name_ + " is not a product group");
    Element out;
    if (!first_->width_) out.code.push_back(static_cast<std::int64_t>(a.code.size()));
    out.code.insert(out.code.end(), a.code.begin(), a.code.end());
    out.code.insert(out.code.end(), b.code.begin(), b.code.end());
    return out;
}

std::pair<Element, Element> Group::split(const Element& a) const {
    if (kind_ != GroupKind::Product) throw SpecMismatch(name_ + " is not a product group");
    std::size_t offset = 0, len = 0;
    if (first_->width_) {
        len = *first_->width_;
    } else {
        if (a.code.empty()) throw SpecMismatch("malformed product element");
        len = static_cast<std::size_t>(a.code[0]);
        offset = 1;
    }
    if (offset + len > a.code.size()) throw SpecMismatch("malformed product element");
    std::pair<Element, Element> out;
    out.first.code.assign(a.code.begin() + static_cast<std::ptrdiff_t>(offset),
                          a.code.begin() + static_cast<std::ptrdiff_t>(offset + len));
    out.second.code.assign(a.code.begin() + static_cast<std::ptrdiff_t>(offset + len), a.code.end());
    return out;
}

std::int64_t Group::finite_index(const Element& a) const {
    if (a.code.size() != 1 || a.code[0] < 0 ||
        a.code[0] >= static_cast<std::int64_t>(table_.size()))
        throw SpecMismatch("element is not in " + name_);
    return a.code[0];
}

// ---------------------------------------------------------------------------
// Group law

Element Group::identity() const {
    switch (kind_) {
        case GroupKind::Lattice: {
            Element e;
            e.code.assign(static_cast<std::size_t>(rank_), 0);
            return e;
        }
        case GroupKind::Finite: return Element{identity_index_};
        case GroupKind::Dihedral: return Element{0, 1};
        case GroupKind::Lamplighter: return Element{0};
        case GroupKind::Free: return Element{};
        case GroupKind::Product: return pair(first_->identity(), second_->identity());
    }
    return {};
}

void Group::right_multiply(Element& acc, const Element& g) const {
    switch (kind_) {
        case GroupKind::Lattice:
            if (acc.code.size() != g.code.size() || acc.code.size() != static_cast<std::size_t>(rank_))
                throw SpecMismatch("element is not in " + name_);
            for (std::size_t i = 0; i < acc.code.size(); ++i)
                acc.code[i] = checked_add(acc.code[i], g.code[i]);
            return;
        case GroupKind::Dihedral:
            if (acc.code.size() != 2 || g.code.size() != 2)
                throw SpecMismatch("element is not in " + name_);
            acc.code[0] = checked_add(acc.code[0], acc.code[1] > 0 ? g.code[0] : checked_neg(g.code[0]));
            acc.code[1] *= g.code[1];
            return;
        case GroupKind::Free: {
            for (auto letter : g.code) {
                if (!acc.code.empty() && acc.code.back() == -letter) {
                    acc.code.pop_back();
                } else {
                    acc.code.push_back(letter);
                }
            }
            return;
        }
        default: acc = mul(acc, g); return;
    }
}

Element Group::mul(const Element& a, const Element& b) const {
    switch (kind_) {
        case GroupKind::Lattice:
        case GroupKind::Dihedral:
        case GroupKind::Free: {
            Element out = a;
            right_multiply(out, b);
            return out;
        }
        case GroupKind::Finite: {
            const auto i = finite_index(a), j = finite_index(b);
            return Element{table_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]};
        }
        case GroupKind::Lamplighter: {
            if (a.code.empty() || b.code.empty()) throw SpecMismatch("element is not in lamplighter");
            // (f,t)(f',t') = (f + f'(. - t), t + t')
            Element out;
            out.code.push_back(checked_add(a.code[0], b.code[0]));
            toggle_shifted(out.code, std::span<const std::int64_t>(a.code.data(), a.code.size()).subspan(1),
                           std::span<const std::int64_t>(b.code.data(), b.code.size()).subspan(1),
                           a.code[0]);
            return out;
        }
        case GroupKind::Product: {
            auto [a1, a2] = split(a);
            auto [b1, b2] = split(b);
            return pair(first_->mul(a1, b1), second_->mul(a2, b2));
        }
    }
    return {};
}

Element Group::inverse(const Element& a) const {
    switch (kind_) {
        case GroupKind::Lattice: {
            Element out = a;
            for (auto& v : out.code) v = checked_neg(v);
            return out;
        }
        case GroupKind::Finite:
            return Element{inverse_[static_cast<std::size_t>(finite_index(a))]};
        case GroupKind::Dihedral:
            // (k,e)^-1 = (-e k, e)
            if (a.code[1] > 0) return Element{checked_neg(a.code[0]), 1};
            return a;
        case GroupKind::Lamplighter: {
            Element out;
            const std::int64_t t = a.code[0];
            out.code.push_back(checked_neg(t));
            for (std::size_t i = 1; i < a.code.size(); ++i) out.code.push_back(checked_add(a.code[i], checked_neg(t)));
            return out;
        }
        case GroupKind::Free: {
            Element out;
            for (auto it = a.code.rbegin(); it != a.code.rend(); ++it) out.code.push_back(-*it);
            return out;
        }
        case GroupKind::Product: {
            auto [a1, a2] = split(a);
            return pair(first_->inverse(a1), second_->inverse(a2));
        }
    }
    return {};
}

std::int64_t Group::length(const Element& a) const {
    switch (kind_) {
        case GroupKind::Lattice: {
            std::int64_t s = 0;
            for (auto v : a.code) s = checked_add(s, v < 0 ? checked_neg(v) : v);
            return s;
        }
        case GroupKind::Finite: return finite_length_[static_cast<std::size_t>(finite_index(a))];
        case GroupKind::Dihedral: return std::abs(dihedral_position(*this, a));
        case GroupKind::Lamplighter: {
            // Lighter tour from 0 through every lit lamp to the final position,
            // plus one switch per lit lamp.
            const std::int64_t t = a.code[0];
            std::int64_t lo = std::min<std::int64_t>(0, t), hi = std::max<std::int64_t>(0, t);
            if (a.code.size() > 1) {
                lo = std::min(lo, a.code[1]);
                hi = std::max(hi, a.code.back());
            }
            const std::int64_t span = hi - lo;
            const std::int64_t tour = span + std::min((0 - lo) + (hi - t), (hi - 0) + (t - lo));
            return tour + static_cast<std::int64_t>(a.code.size() - 1);
        }
        case GroupKind::Free: return static_cast<std::int64_t>(a.code.size());
        case GroupKind::Product: {
            auto [a1, a2] = split(a);
            return checked_add(first_->length(a1), second_->length(a2));
        }
    }
    return 0;
}

std::int64_t Group::distance(const Element& a, const Element& b) const {
    if (kind_ == GroupKind::Free) {
        // |a^-1 b| = |a| + |b| - 2 * common prefix
        std::size_t p = 0;
        while (p < a.code.size() && p < b.code.size() && a.code[p] == b.code[p]) ++p;
        return static_cast<std::int64_t>(a.code.size() + b.code.size() - 2 * p);
    }
    if (kind_ == GroupKind::Lattice) {
        std::int64_t s = 0;
        for (std::size_t i = 0; i < a.code.size(); ++i) {
            const std::int64_t d = checked_add(b.code[i], checked_neg(a.code[i]));
            s = checked_add(s, d < 0 ? -d : d);
        }
        return s;
    }
    return length(mul(inverse(a), b));
}

bool Group::is_valid(const Element& a) const {
    switch (kind_) {
        case GroupKind::Lattice: return a.code.size() == static_cast<std::size_t>(rank_);
        case GroupKind::Finite:
            return a.code.size() == 1 && a.code[0] >= 0 &&
                   a.code[0] < static_cast<std::int64_t>(table_.size());
        case GroupKind::Dihedral: return a.code.size() == 2 && (a.code[1] == 1 || a.code[1] == -1);
        case GroupKind::Lamplighter:
            if (a.code.empty()) return false;
            for (std::size_t i = 2; i < a.code.size(); ++i)
                if (a.code[i - 1] >= a.code[i]) return false;
            return true;
        case GroupKind::Free:
            for (std::size_t i = 0; i < a.code.size(); ++i) {
                const auto v = a.code[i];
                if (v == 0 || v > rank_ || v < -rank_) return false;
                if (i > 0 && a.code[i - 1] == -v) return false;
            }
            return true;
        case GroupKind::Product: {
            if (first_->width_) {
                if (a.code.size() < *first_->width_) return false;
            } else if (a.code.empty() || a.code[0] < 0 ||
                       static_cast<std::size_t>(a.code[0]) + 1 > a.code.size()) {
                return false;
            }
            auto [a1, a2] = split(a);
            return first_->is_valid(a1) && second_->is_valid(a2);
        }
    }
    return false;
}

void Group::check(const Element& a) const {
    if (!is_valid(a)) throw SpecMismatch("element " + encode_text(a) + " is not in " + name_);
}

// ---------------------------------------------------------------------------
// Affine layout

void Group::encode_affine(const Element& a, int& layer, std::span<std::int64_t> coords) const {
    switch (kind_) {
        case GroupKind::Lattice:
            layer = 0;
            std::copy(a.code.begin(), a.code.end(), coords.begin());
            return;
        case GroupKind::Finite: layer = static_cast<int>(finite_index(a)); return;
        case GroupKind::Dihedral:
            layer = a.code[1] > 0 ? 0 : 1;
            coords[0] = a.code[0];
            return;
        case GroupKind::Product: {
            auto [a1, a2] = split(a);
            const int d1 = first_->affine_->dims;
            int l1 = 0, l2 = 0;
            first_->encode_affine(a1, l1, coords.subspan(0, static_cast<std::size_t>(d1)));
            second_->encode_affine(a2, l2, coords.subspan(static_cast<std::size_t>(d1)));
            layer = l1 * second_->affine_->layers + l2;
            return;
        }
        default: throw SpecMismatch(name_ + " has no affine layout");
    }
}

Element Group::decode_affine(int layer, std::span<const std::int64_t> coords) const {
    switch (kind_) {
        case GroupKind::Lattice: {
            Element e;
            e.code.assign(coords.begin(), coords.begin() + rank_);
            return e;
        }
        case GroupKind::Finite: return Element{layer};
        case GroupKind::Dihedral: return Element{coords[0], layer == 0 ? 1 : -1};
        case GroupKind::Product: {
            const int d1 = first_->affine_->dims;
            const int l2n = second_->affine_->layers;
            return pair(first_->decode_affine(layer / l2n, coords.subspan(0, static_cast<std::size_t>(d1))),
                        second_->decode_affine(layer % l2n, coords.subspan(static_cast<std::size_t>(d1))));
        }
        default: throw SpecMismatch(name_ + " has no affine layout");
    }
}

// ---------------------------------------------------------------------------
// Text

std::string Group::format(const Element& a) const {
    std::ostringstream os;
    switch (kind_) {
        case GroupKind::Lattice:
            if (rank_ == 1) return std::to_string(a.code[0]);
            os << '(';
            for (std::size_t i = 0; i < a.code.size(); ++i) os << (i ? "," : "") << a.code[i];
            os << ')';
            return os.str();
        case GroupKind::Finite: return std::to_string(a.code[0]);
        case GroupKind::Dihedral:
            os << '(' << a.code[0] << ',' << (a.code[1] > 0 ? "+1" : "-1") << ')';
            return os.str();
        case GroupKind::Lamplighter:
            os << "({";
            for (std::size_t i = 1; i < a.code.size(); ++i) os << (i > 1 ? "," : "") << a.code[i];
            os << "}," << a.code[0] << ')';
            return os.str();
        case GroupKind::Free:
            if (a.code.empty()) return "e";
            for (auto v : a.code) os << free_letter(rank_, v);
            return os.str();
        case GroupKind::Product: {
            auto [a1, a2] = split(a);
            return "(" + first_->format(a1) + "," + second_->format(a2) + ")";
        }
    }
    return {};
}

std::string Group::encode_text(const Element& a) {
    std::string out = "[";
    for (std::size_t i = 0; i < a.code.size(); ++i) {
        if (i) out += ' ';
        out += std::to_string(a.code[i]);
    }
    out += ']';
    return out;
}

Element Group::parse_text(std::string_view text) const {
    auto fail = [&] { return ConfigError("cannot parse element '" + std::string(text) + "'"); };
    const auto open = text.find('[');
    const auto close = text.rfind(']');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open) throw fail();
    Element e;
    std::string_view body = text.substr(open + 1, close - open - 1);
    while (!body.empty()) {
        while (!body.empty() && (body.front() == ' ' || body.front() == ',')) body.remove_prefix(1);
        if (body.empty()) break;
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
        if (ec != std::errc()) throw fail();
        e.code.push_back(v);
        body.remove_prefix(static_cast<std::size_t>(ptr - body.data()));
    }
    if (!is_valid(e)) throw fail();
    return e;
}

// ---------------------------------------------------------------------------
// Free functions

Element mul(const Group& g, const Element& a, const Element& b) { return g.mul(a, b); }
Element inverse(const Group& g, const Element& a) { return g.inverse(a); }
std::int64_t word_distance(const Group& g, const Element& a, const Element& b) {
    return g.distance(a, b);
}

Element free_reduce(const Group& g, std::span<const std::int64_t> letters) {
    if (g.kind() != GroupKind::Free) throw SpecMismatch(g.name() + " is not a free group");
    Element out;
    for (auto letter : letters) {
        if (letter == 0 || letter > g.rank() || letter < -g.rank())
            throw SpecMismatch("letter out of range for " + g.name());
        if (!out.code.empty() && out.code.back() == -letter) {
            out.code.pop_back();
        } else {
            out.code.push_back(letter);
        }
    }
    return out;
}

GroupPtr product_group(GroupPtr first, GroupPtr second) {
    return Group::product(std::move(first), std::move(second));
}

std::int64_t dihedral_position(const Group& g, const Element& a) {
    if (g.kind() != GroupKind::Dihedral) throw SpecMismatch(g.name() + " is not D_inf");
    g.check(a);
    // (ab)^k = (-k,+1) and (ab)^k a = (-k,-1)
    const std::int64_t twice = checked_neg(checked_add(a.code[0], a.code[0]));
    return a.code[1] > 0 ? twice : checked_add(twice, 1);
}

Element dihedral_from_position(const Group& g, std::int64_t position) {
    if (g.kind() != GroupKind::Dihedral) throw SpecMismatch(g.name() + " is not D_inf");
    const std::int64_t even = position - (((position % 2) + 2) % 2);
    return Element{-even / 2, position == even ? 1 : -1};
}

Element dihedral_a() { return Element{0, -1}; }
Element dihedral_b() { return Element{1, -1}; }

Element lamplighter_element(std::vector<std::int64_t> lit, std::int64_t position) {
    std::sort(lit.begin(), lit.end());
    Element e;
    e.code.push_back(position);
    // Lamps live in Z/2: repeated entries cancel in pairs.
    for (std::size_t i = 0; i < lit.size();) {
        std::size_t j = i;
        while (j < lit.size() && lit[j] == lit[i]) ++j;
        if ((j - i) % 2 == 1) e.code.push_back(lit[i]);
        i = j;
    }
    return e;
}

std::vector<std::int64_t> lamplighter_lamps(const Element& a) {
    return {a.code.begin() + 1, a.code.end()};
}

std::int64_t lamplighter_position(const Element& a) { return a.code.at(0); }

}  // namespace groupnoise
