#pragma once

#include "groupnoise/measure.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace groupnoise {

namespace detail {
struct Contribution {
    int source_layer;
    double weight;
    std::vector<std::int64_t> shift;
};
using ConvolutionPlan = std::vector<std::vector<Contribution>>;  // by target layer
struct DenseKernel;
}  // namespace detail

/// Probability measure on a group with an affine layout, stored as one dense
/// box of cells per layer. Right multiplication by a fixed element maps each
/// layer to another layer by a pure translation, so convolving with a small
/// step measure is a sum of shifted row-wise axpy passes.
///
/// Cells are doubles; values that underflow below the smallest normal double
/// are flushed to zero during convolution and the boxes are trimmed to their
/// nonzero extent after every step.
class DenseMeasure {
public:
    struct Layer {
        std::vector<std::int64_t> lo;      // active lower corner
        std::vector<std::int64_t> extent;  // active extents; all zero when empty
        std::vector<std::size_t> stride;   // buffer strides
        std::size_t offset = 0;            // buffer index of `lo`
        std::vector<double> data;

        bool empty() const noexcept;
        std::size_t volume() const noexcept;
    };

    DenseMeasure() = default;

    static DenseMeasure dirac_identity(GroupPtr group);
    static DenseMeasure from_sparse(const SparseMeasure& xi);
    SparseMeasure to_sparse() const;

    const GroupPtr& group() const noexcept { return group_; }
    /// Coordinate dimensions as stored (at least 1).
    int dims() const noexcept { return dims_; }
    const std::vector<Layer>& layers() const noexcept { return layers_; }

    double mass(const Element& e) const;
    double total_mass() const;
    /// Cells inside the active boxes, including interior zeros.
    std::size_t cell_count() const;
    /// Cells with positive mass.
    std::size_t atom_count() const;

    /// Visit every cell of the active boxes; `f(layer, coords, mass)`.
    /// Zero cells inside a box are visited too.
    template <class F>
    void for_each_cell(F&& f) const;

    Element element_at(int layer, std::span<const std::int64_t> coords) const;

private:
    friend struct detail::DenseKernel;

    static DenseMeasure empty_like(GroupPtr group);
    Layer& layer_for(int layer);

    GroupPtr group_;
    int dims_ = 1;
    std::vector<Layer> layers_;
};

DenseMeasure convolve(const DenseMeasure& big, const SparseMeasure& step,
                      std::size_t budget = kDefaultAtomBudget);
DenseMeasure marginal(const DenseMeasure& pair, Side side);
double entropy(const DenseMeasure& xi);
double l1_distance(const DenseMeasure& lhs, const DenseMeasure& rhs);
/// || pair - first x second ||_1 without materialising the product.
double l1_to_product(const DenseMeasure& pair, const DenseMeasure& first,
                     const DenseMeasure& second);
/// || xi - uniform ||_1 for a measure on a finite group.
double l1_to_uniform(const DenseMeasure& xi);

/// step^{*n} by linear iteration (current * step), resumable across an
/// increasing schedule of n.
class ConvolutionPower {
public:
    explicit ConvolutionPower(SparseMeasure step, std::size_t budget = kDefaultAtomBudget);

    const DenseMeasure& advance_to(int n);
    const DenseMeasure& current() const noexcept { return current_; }
    int steps() const noexcept { return steps_; }

private:
    void step_once();

    SparseMeasure step_;
    std::size_t budget_;
    detail::ConvolutionPlan plan_;
    DenseMeasure current_;
    int steps_ = 0;
};

// ---------------------------------------------------------------------------

template <class F>
void DenseMeasure::for_each_cell(F&& f) const {
    std::vector<std::int64_t> coords(static_cast<std::size_t>(dims_));
    const auto d = static_cast<std::size_t>(dims_);
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const Layer& L = layers_[l];
        if (L.empty()) continue;
        std::vector<std::int64_t> idx(d, 0);
        const std::size_t rows = L.volume() / static_cast<std::size_t>(L.extent[d - 1]);
        for (std::size_t r = 0; r < rows; ++r) {
            std::size_t base = L.offset;
            for (std::size_t k = 0; k + 1 < d; ++k) {
                coords[k] = L.lo[k] + idx[k];
                base += static_cast<std::size_t>(idx[k]) * L.stride[k];
            }
            for (std::int64_t j = 0; j < L.extent[d - 1]; ++j) {
                coords[d - 1] = L.lo[d - 1] + j;
                f(static_cast<int>(l), std::span<const std::int64_t>(coords),
                  L.data[base + static_cast<std::size_t>(j)]);
            }
            for (std::size_t k = d - 1; k-- > 0;) {
                if (++idx[k] < L.extent[k]) break;
                idx[k] = 0;
            }
        }
    }
}

}  // namespace groupnoise
