#include "groupnoise/dense_measure.hpp"

#include "groupnoise/errors.hpp"
#include "groupnoise/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#if defined(__SSE__)
#include <xmmintrin.h>
#endif

namespace groupnoise {

namespace {

// Flush-to-zero / denormals-are-zero for the current thread.
class FlushDenormals {
public:
    FlushDenormals() {
#if defined(__SSE__)
        saved_ = _mm_getcsr();
        _mm_setcsr(saved_ | 0x8040u);
#endif
    }
    ~FlushDenormals() {
#if defined(__SSE__)
        _mm_setcsr(saved_);
#endif
    }
    FlushDenormals(const FlushDenormals&) = delete;
    FlushDenormals& operator=(const FlushDenormals&) = delete;

private:
    unsigned saved_ = 0;
};

AffineLayout layout_of(const Group& g) {
    if (!g.affine_layout()) throw SpecMismatch(g.name() + " has no affine layout");
    return *g.affine_layout();
}

using Coords = std::vector<std::int64_t>;

using detail::ConvolutionPlan;

ConvolutionPlan make_plan(const Group& g, int dims, const SparseMeasure& step) {
    const AffineLayout lay = layout_of(g);
    const auto gd = static_cast<std::size_t>(lay.dims);
    ConvolutionPlan plan(static_cast<std::size_t>(lay.layers));
    const Coords zeros(gd, 0);
    for (int s = 0; s < lay.layers; ++s) {
        const Element base = g.decode_affine(s, zeros);
        for (const auto& [y, w] : step.atoms()) {
            const Element prod = g.mul(base, y);
            int t = 0;
            Coords shift(static_cast<std::size_t>(dims), 0);
            g.encode_affine(prod, t, std::span<std::int64_t>(shift.data(), gd));
            plan[static_cast<std::size_t>(t)].push_back({s, w, std::move(shift)});
        }
    }
    return plan;
}

void set_compact(DenseMeasure::Layer& L, const Coords& lo, const Coords& extent) {
    const std::size_t d = lo.size();
    L.lo = lo;
    L.extent = extent;
    L.stride.assign(d, 1);
    for (std::size_t k = d - 1; k-- > 0;)
        L.stride[k] = L.stride[k + 1] * static_cast<std::size_t>(extent[k + 1]);
    L.offset = 0;
    L.data.assign(L.volume(), 0.0);
}

void make_empty(DenseMeasure::Layer& L, std::size_t d) {
    L.lo.assign(d, 0);
    L.extent.assign(d, 0);
    L.stride.assign(d, 0);
    L.offset = 0;
    L.data.clear();
    L.data.shrink_to_fit();
}

// Shrink the active box to the bounding box of nonzero cells.
void trim(DenseMeasure::Layer& L) {
    if (L.empty()) return;
    const std::size_t d = L.lo.size();
    const std::int64_t last = L.extent[d - 1];
    const std::size_t rows = L.volume() / static_cast<std::size_t>(last);
    Coords mn(d, std::numeric_limits<std::int64_t>::max()), mx(d, -1);
    Coords idx(d, 0);
    for (std::size_t r = 0; r < rows; ++r) {
        std::size_t base = L.offset;
        for (std::size_t k = 0; k + 1 < d; ++k) base += static_cast<std::size_t>(idx[k]) * L.stride[k];
        const double* row = L.data.data() + base;
        std::int64_t first = 0;
        while (first < last && row[first] == 0.0) ++first;
        if (first < last) {
            std::int64_t end = last - 1;
            while (row[end] == 0.0) --end;
            mn[d - 1] = std::min(mn[d - 1], first);
            mx[d - 1] = std::max(mx[d - 1], end);
            for (std::size_t k = 0; k + 1 < d; ++k) {
                mn[k] = std::min(mn[k], idx[k]);
                mx[k] = std::max(mx[k], idx[k]);
            }
        }
        for (std::size_t k = d - 1; k-- > 0;) {
            if (++idx[k] < L.extent[k]) break;
            idx[k] = 0;
        }
    }
    if (mx[d - 1] < 0) {
        make_empty(L, d);
        return;
    }
    for (std::size_t k = 0; k < d; ++k) {
        L.offset += static_cast<std::size_t>(mn[k]) * L.stride[k];
        L.lo[k] += mn[k];
        L.extent[k] = mx[k] - mn[k] + 1;
    }
}

// Buffer index of `coords` in L, or npos when outside the active box.
constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

std::size_t locate(const DenseMeasure::Layer& L, std::span<const std::int64_t> coords) {
    if (L.empty()) return npos;
    std::size_t at = L.offset;
    for (std::size_t k = 0; k < coords.size(); ++k) {
        const std::int64_t i = coords[k] - L.lo[k];
        if (i < 0 || i >= L.extent[k]) return npos;
        at += static_cast<std::size_t>(i) * L.stride[k];
    }
    return at;
}

double plogp_bits(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

}  // namespace

bool DenseMeasure::Layer::empty() const noexcept {
    return extent.empty() || std::any_of(extent.begin(), extent.end(), [](auto e) { return e <= 0; });
}

std::size_t DenseMeasure::Layer::volume() const noexcept {
    if (empty()) return 0;
    std::size_t v = 1;
    for (auto e : extent) v *= static_cast<std::size_t>(e);
    return v;
}

DenseMeasure DenseMeasure::empty_like(GroupPtr group) {
    const AffineLayout lay = layout_of(*group);
    DenseMeasure m;
    m.group_ = std::move(group);
    m.dims_ = std::max(1, lay.dims);
    m.layers_.resize(static_cast<std::size_t>(lay.layers));
    for (auto& L : m.layers_) make_empty(L, static_cast<std::size_t>(m.dims_));
    return m;
}

DenseMeasure::Layer& DenseMeasure::layer_for(int layer) {
    return layers_.at(static_cast<std::size_t>(layer));
}

DenseMeasure DenseMeasure::dirac_identity(GroupPtr group) {
    DenseMeasure m = empty_like(group);
    const auto gd = static_cast<std::size_t>(layout_of(*group).dims);
    Coords c(static_cast<std::size_t>(m.dims_), 0);
    int layer = 0;
    group->encode_affine(group->identity(), layer, std::span<std::int64_t>(c.data(), gd));
    Layer& L = m.layer_for(layer);
    set_compact(L, c, Coords(c.size(), 1));
    L.data[0] = 1.0;
    return m;
}

DenseMeasure DenseMeasure::from_sparse(const SparseMeasure& xi) {
    DenseMeasure m = empty_like(xi.group());
    const Group& g = *xi.group();
    const auto d = static_cast<std::size_t>(m.dims_);
    const auto gd = static_cast<std::size_t>(layout_of(g).dims);
    std::vector<std::pair<int, Coords>> placed;
    placed.reserve(xi.size());
    std::vector<Coords> lo(m.layers_.size(), Coords(d, std::numeric_limits<std::int64_t>::max()));
    std::vector<Coords> hi(m.layers_.size(), Coords(d, std::numeric_limits<std::int64_t>::min()));
    for (const auto& [e, w] : xi.atoms()) {
        Coords c(d, 0);
        int layer = 0;
        g.encode_affine(e, layer, std::span<std::int64_t>(c.data(), gd));
        const auto l = static_cast<std::size_t>(layer);
        for (std::size_t k = 0; k < d; ++k) {
            lo[l][k] = std::min(lo[l][k], c[k]);
            hi[l][k] = std::max(hi[l][k], c[k]);
        }
        placed.emplace_back(layer, std::move(c));
    }
    for (std::size_t l = 0; l < m.layers_.size(); ++l) {
        if (hi[l][0] < lo[l][0]) continue;
        Coords ext(d);
        for (std::size_t k = 0; k < d; ++k) ext[k] = hi[l][k] - lo[l][k] + 1;
        set_compact(m.layers_[l], lo[l], ext);
    }
    for (std::size_t i = 0; i < placed.size(); ++i) {
        Layer& L = m.layer_for(placed[i].first);
        L.data[locate(L, placed[i].second)] += xi.atoms()[i].second;
    }
    return m;
}

SparseMeasure DenseMeasure::to_sparse() const {
    std::vector<SparseMeasure::Atom> atoms;
    for_each_cell([&](int layer, std::span<const std::int64_t> c, double w) {
        if (w > 0.0) atoms.emplace_back(element_at(layer, c), w);
    });
    return SparseMeasure::from_atoms(group_, std::move(atoms));
}

Element DenseMeasure::element_at(int layer, std::span<const std::int64_t> coords) const {
    const auto gd = static_cast<std::size_t>(layout_of(*group_).dims);
    return group_->decode_affine(layer, coords.subspan(0, gd));
}

double DenseMeasure::mass(const Element& e) const {
    const auto gd = static_cast<std::size_t>(layout_of(*group_).dims);
    Coords c(static_cast<std::size_t>(dims_), 0);
    int layer = 0;
    group_->encode_affine(e, layer, std::span<std::int64_t>(c.data(), gd));
    const Layer& L = layers_.at(static_cast<std::size_t>(layer));
    const std::size_t at = locate(L, c);
    return at == npos ? 0.0 : L.data[at];
}

double DenseMeasure::total_mass() const {
    double total = 0.0;
    for_each_cell([&](int, std::span<const std::int64_t>, double w) { total += w; });
    return total;
}

std::size_t DenseMeasure::cell_count() const {
    std::size_t n = 0;
    for (const auto& L : layers_) n += L.volume();
    return n;
}

std::size_t DenseMeasure::atom_count() const {
    std::size_t n = 0;
    for_each_cell([&](int, std::span<const std::int64_t>, double w) { n += w > 0.0; });
    return n;
}

// ---------------------------------------------------------------------------
// Convolution kernel

struct detail::DenseKernel {
    static DenseMeasure apply(const DenseMeasure& src, const ConvolutionPlan& plan, std::size_t budget,
                              std::size_t steps_done);
    static DenseMeasure marginal(const DenseMeasure& pair, Side side);
};

DenseMeasure detail::DenseKernel::apply(const DenseMeasure& src, const ConvolutionPlan& plan,
                                        std::size_t budget, std::size_t steps_done) {
    DenseMeasure out = DenseMeasure::empty_like(src.group());
    const auto d = static_cast<std::size_t>(src.dims());
    const auto& in = src.layers();

    std::vector<Coords> lo(plan.size()), ext(plan.size());
    std::size_t cells = 0;
    for (std::size_t t = 0; t < plan.size(); ++t) {
        Coords mn(d, std::numeric_limits<std::int64_t>::max());
        Coords mx(d, std::numeric_limits<std::int64_t>::min());
        bool any = false;
        for (const auto& c : plan[t]) {
            const auto& S = in[static_cast<std::size_t>(c.source_layer)];
            if (S.empty()) continue;
            any = true;
            for (std::size_t k = 0; k < d; ++k) {
                mn[k] = std::min(mn[k], S.lo[k] + c.shift[k]);
                mx[k] = std::max(mx[k], S.lo[k] + S.extent[k] - 1 + c.shift[k]);
            }
        }
        if (!any) continue;
        Coords e(d);
        std::size_t vol = 1;
        for (std::size_t k = 0; k < d; ++k) {
            e[k] = mx[k] - mn[k] + 1;
            vol *= static_cast<std::size_t>(e[k]);
        }
        cells += vol;
        lo[t] = std::move(mn);
        ext[t] = std::move(e);
    }
    if (cells > budget)
        throw BudgetExceeded("dense convolution exceeds atom budget", steps_done, cells);

    for (std::size_t t = 0; t < plan.size(); ++t) {
        auto& O = out.layers_[t];
        if (ext[t].empty()) {
            make_empty(O, d);
            continue;
        }
        set_compact(O, lo[t], ext[t]);
        const std::int64_t last = O.extent[d - 1];
        const std::size_t rows = O.volume() / static_cast<std::size_t>(last);
        const auto& contributions = plan[t];

        parallel_for(rows, [&](std::size_t begin, std::size_t end) {
            FlushDenormals guard;
            Coords idx(d, 0);
            std::size_t rem = begin;
            for (std::size_t k = d - 1; k-- > 0;) {
                idx[k] = static_cast<std::int64_t>(rem % static_cast<std::size_t>(O.extent[k]));
                rem /= static_cast<std::size_t>(O.extent[k]);
            }
            for (std::size_t r = begin; r < end; ++r) {
                double* __restrict dst = O.data.data() + r * static_cast<std::size_t>(last);
                for (const auto& c : contributions) {
                    const auto& S = in[static_cast<std::size_t>(c.source_layer)];
                    if (S.empty()) continue;
                    std::size_t base = S.offset;
                    bool inside = true;
                    for (std::size_t k = 0; k + 1 < d; ++k) {
                        const std::int64_t i = O.lo[k] + idx[k] - c.shift[k] - S.lo[k];
                        if (i < 0 || i >= S.extent[k]) {
                            inside = false;
                            break;
                        }
                        base += static_cast<std::size_t>(i) * S.stride[k];
                    }
                    if (!inside) continue;
                    const double* __restrict from = S.data.data() + base;
                    double* __restrict to = dst + (S.lo[d - 1] + c.shift[d - 1] - O.lo[d - 1]);
                    const double w = c.weight;
                    const std::int64_t len = S.extent[d - 1];
                    for (std::int64_t j = 0; j < len; ++j) to[j] += w * from[j];
                }
                for (std::size_t k = d - 1; k-- > 0;) {
                    if (++idx[k] < O.extent[k]) break;
                    idx[k] = 0;
                }
            }
        });
        trim(O);
    }
    return out;
}

DenseMeasure convolve(const DenseMeasure& big, const SparseMeasure& step, std::size_t budget) {
    require_same_group(*big.group(), *step.group());
    return detail::DenseKernel::apply(big, make_plan(*big.group(), big.dims(), step), budget, 0);
}

ConvolutionPower::ConvolutionPower(SparseMeasure step, std::size_t budget)
    : step_(std::move(step)), budget_(budget) {
    current_ = DenseMeasure::dirac_identity(step_.group());
    plan_ = make_plan(*step_.group(), current_.dims(), step_);
}

const DenseMeasure& ConvolutionPower::advance_to(int n) {
    if (n < steps_) throw ConfigError("convolution power schedule must be nondecreasing");
    while (steps_ < n) step_once();
    return current_;
}

void ConvolutionPower::step_once() {
    current_ = detail::DenseKernel::apply(current_, plan_, budget_, static_cast<std::size_t>(steps_));
    ++steps_;
}

// ---------------------------------------------------------------------------
// Functionals

DenseMeasure marginal(const DenseMeasure& pair, Side side) {
    return detail::DenseKernel::marginal(pair, side);
}

DenseMeasure detail::DenseKernel::marginal(const DenseMeasure& pair, Side side) {
    const Group& g = *pair.group();
    if (g.kind() != GroupKind::Product) throw SpecMismatch("marginal of a non-product measure");
    const GroupPtr& target = side == Side::First ? g.first() : g.second();
    const AffineLayout l1 = layout_of(*g.first());
    const AffineLayout l2 = layout_of(*g.second());
    const std::size_t from = side == Side::First ? 0 : static_cast<std::size_t>(l1.dims);
    const auto td = static_cast<std::size_t>(side == Side::First ? l1.dims : l2.dims);

    DenseMeasure out = DenseMeasure::empty_like(target);
    const auto od = static_cast<std::size_t>(out.dims());
    auto project_layer = [&](int layer) { return side == Side::First ? layer / l2.layers : layer % l2.layers; };

    std::vector<Coords> lo(out.layers_.size(), Coords(od, std::numeric_limits<std::int64_t>::max()));
    std::vector<Coords> hi(out.layers_.size(), Coords(od, std::numeric_limits<std::int64_t>::min()));
    for (std::size_t l = 0; l < pair.layers().size(); ++l) {
        const auto& L = pair.layers()[l];
        if (L.empty()) continue;
        const auto t = static_cast<std::size_t>(project_layer(static_cast<int>(l)));
        for (std::size_t k = 0; k < od; ++k) {
            const std::int64_t a = k < td ? L.lo[from + k] : 0;
            const std::int64_t b = k < td ? L.lo[from + k] + L.extent[from + k] - 1 : 0;
            lo[t][k] = std::min(lo[t][k], a);
            hi[t][k] = std::max(hi[t][k], b);
        }
    }
    for (std::size_t t = 0; t < out.layers_.size(); ++t) {
        if (hi[t][0] < lo[t][0]) continue;
        Coords e(od);
        for (std::size_t k = 0; k < od; ++k) e[k] = hi[t][k] - lo[t][k] + 1;
        set_compact(out.layers_[t], lo[t], e);
    }
    Coords c(od, 0);
    pair.for_each_cell([&](int layer, std::span<const std::int64_t> coords, double w) {
        if (w == 0.0) return;
        for (std::size_t k = 0; k < td; ++k) c[k] = coords[from + k];
        auto& O = out.layers_[static_cast<std::size_t>(project_layer(layer))];
        O.data[locate(O, c)] += w;
    });
    for (auto& L : out.layers_) trim(L);
    return out;
}

double entropy(const DenseMeasure& xi) {
    double h = 0.0;
    xi.for_each_cell([&](int, std::span<const std::int64_t>, double w) { h += plogp_bits(w); });
    return h;
}

double l1_distance(const DenseMeasure& lhs, const DenseMeasure& rhs) {
    require_same_group(*lhs.group(), *rhs.group());
    double sum = 0.0;
    lhs.for_each_cell([&](int layer, std::span<const std::int64_t> c, double a) {
        const auto& R = rhs.layers()[static_cast<std::size_t>(layer)];
        const std::size_t at = locate(R, c);
        sum += std::abs(a - (at == npos ? 0.0 : R.data[at]));
    });
    rhs.for_each_cell([&](int layer, std::span<const std::int64_t> c, double b) {
        if (locate(lhs.layers()[static_cast<std::size_t>(layer)], c) == npos) sum += b;
    });
    return sum;
}

double l1_to_product(const DenseMeasure& pair, const DenseMeasure& first, const DenseMeasure& second) {
    const Group& g = *pair.group();
    if (g.kind() != GroupKind::Product) throw SpecMismatch("l1_to_product needs a product measure");
    require_same_group(*g.first(), *first.group());
    require_same_group(*g.second(), *second.group());
    const auto d1 = static_cast<std::size_t>(layout_of(*g.first()).dims);
    const auto d2 = static_cast<std::size_t>(layout_of(*g.second()).dims);
    const int layers2 = layout_of(*g.second()).layers;
    const auto pd = static_cast<std::size_t>(pair.dims());

    // Rows of the product: one first-cell times one row of `second`.
    struct Cell {
        int layer;
        Coords coords;
        double mass;
    };
    std::vector<Cell> firsts;
    first.for_each_cell([&](int layer, std::span<const std::int64_t> c, double w) {
        if (w > 0.0) firsts.push_back({layer, Coords(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(d1)), w});
    });

    std::vector<double> partial(firsts.size(), 0.0), inside(firsts.size(), 0.0);
    parallel_for(firsts.size(), [&](std::size_t begin, std::size_t end) {
        Coords pc(pd, 0);
        for (std::size_t i = begin; i < end; ++i) {
            const Cell& a = firsts[i];
            std::copy(a.coords.begin(), a.coords.end(), pc.begin());
            double s = 0.0, in = 0.0;
            second.for_each_cell([&](int layer, std::span<const std::int64_t> c, double b) {
                std::copy(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(d2),
                          pc.begin() + static_cast<std::ptrdiff_t>(d1));
                const auto& P = pair.layers()[static_cast<std::size_t>(a.layer * layers2 + layer)];
                const std::size_t at = locate(P, pc);
                const double p = at == npos ? 0.0 : P.data[at];
                s += std::abs(p - a.mass * b);
                in += p;
            });
            partial[i] = s;
            inside[i] = in;
        }
    });
    // Pair mass outside supp(first) x supp(second).
    const double covered = std::accumulate(inside.begin(), inside.end(), 0.0);
    const double total = pair.total_mass();
    return std::accumulate(partial.begin(), partial.end(), 0.0) + std::max(0.0, total - covered);
}

double l1_to_uniform(const DenseMeasure& xi) {
    const auto order = xi.group()->order();
    if (!order) throw SpecMismatch(xi.group()->name() + " is not finite");
    const double u = 1.0 / static_cast<double>(*order);
    double sum = 0.0;
    std::size_t seen = 0;
    xi.for_each_cell([&](int, std::span<const std::int64_t>, double w) {
        sum += std::abs(w - u);
        ++seen;
    });
    return sum + static_cast<double>(*order - seen) * u;
}

}  // namespace groupnoise
