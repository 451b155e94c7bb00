#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

namespace hjleak {

using Index = std::size_t;

struct GridPoint {
  Index linear = 0;
  std::vector<Index> multi;
};

// Disjoint state / control partitions of a two-subsystem decomposition.
struct PartitionSchema {
  std::vector<Index> z1_dims, z2_dims, zc_dims;
  std::vector<Index> u1_idx, u2_idx, uc_idx;

  // Throws ConfigError unless the partitions cover {0..n-1} / {0..m-1} exactly.
  void validate(Index n, Index m) const;

  // Full-grid dimensions of subsystem `which` in subsystem order: (z_i, z_c).
  std::vector<Index> subsystem_dims(int which) const;
  // Control indices of subsystem `which` in subsystem order: (u_i, u_c).
  std::vector<Index> subsystem_controls(int which) const;
  const std::vector<Index>& exclusive_controls(int which) const;
  const std::vector<Index>& exclusive_dims(int which) const;
};

/// Uniform rectangular grid with row-major linear indexing (last dimension
/// contiguous). Immutable after construction.
class Grid {
 public:
  Grid() = default;
  Grid(std::vector<double> mins, std::vector<double> maxs, std::vector<Index> counts);

  Index dims() const { return counts_.size(); }
  Index size() const { return size_; }
  const std::vector<double>& mins() const { return mins_; }
  const std::vector<double>& maxs() const { return maxs_; }
  const std::vector<Index>& counts() const { return counts_; }
  const std::vector<double>& spacings() const { return spacings_; }
  const std::vector<Index>& strides() const { return strides_; }

  Index linear(std::span<const Index> multi) const;
  std::vector<Index> multi(Index linear) const;
  void multi(Index linear, std::span<Index> out) const;
  GridPoint point(Index linear) const;
  GridPoint point(std::span<const Index> multi) const;

  bool valid(const GridPoint& p) const;
  double coordinate(Index dim, Index i) const { return mins_[dim] + static_cast<double>(i) * spacings_[dim]; }

  std::vector<double> index_to_state(const GridPoint& p) const;
  void state_at(Index linear, std::span<double> out) const;
  // Nearest node per dimension, clamped to the grid.
  GridPoint state_to_nearest_index(std::span<const double> state) const;
  bool contains(std::span<const double> state) const;

  // Face-adjacent points (±1 along exactly one dimension), clipped at the boundary.
  std::vector<Index> neighbors(Index linear) const;
  template <typename F>
  void for_each_neighbor(Index linear, F&& f) const;

  // Grid over the selected dimensions with the same bounds and counts.
  Grid restrict_to(std::span<const Index> dims) const;

  bool operator==(const Grid& other) const;

 private:
  std::vector<double> mins_, maxs_, spacings_;
  std::vector<Index> counts_, strides_;
  Index size_ = 0;
};

template <typename F>
void Grid::for_each_neighbor(Index linear, F&& f) const {
  for (Index d = 0; d < dims(); ++d) {
    const Index i = (linear / strides_[d]) % counts_[d];
    if (i > 0) f(linear - strides_[d]);
    if (i + 1 < counts_[d]) f(linear + strides_[d]);
  }
}

// Subsystem point for a full-grid point: the multi-index restricted to
// schema.subsystem_dims(which), re-linearized on `sub_grid`.
GridPoint project_point(const Grid& grid, const PartitionSchema& schema, const GridPoint& p, int which);

/// Maps full-grid linear indices to linear indices of a grid restricted to
/// `dims`. Pure index arithmetic.
class Projection {
 public:
  Projection(const Grid& full, std::vector<Index> dims);

  Index operator()(Index full_linear) const {
    Index out = 0;
    for (Index k = 0; k < dims_.size(); ++k) {
      const Index i = (full_linear / full_strides_[k]) % full_counts_[k];
      out += i * sub_strides_[k];
    }
    return out;
  }
  // Calls f(full_linear, sub_linear) for full_linear in [begin, end), in order.
  template <typename F>
  void for_each(Index begin, Index end, F&& f) const {
    for_each_pair(*this, *this, begin, end, [&](Index i, Index a, Index) { f(i, a); });
  }

  // Walks two projections of the same full grid together: f(full, sub_a, sub_b).
  template <typename F>
  static void for_each_pair(const Projection& pa, const Projection& pb, Index begin, Index end, F&& f) {
    if (begin >= end) return;
    const auto& counts = pa.counts_;
    const auto& strides = pa.strides_;
    const auto& ca = pa.coef_;
    const auto& cb = pb.coef_;
    const Index nd = counts.size();
    std::vector<Index> idx(nd);
    Index a = 0, b = 0;
    for (Index d = 0; d < nd; ++d) {
      idx[d] = (begin / strides[d]) % counts[d];
      a += idx[d] * ca[d];
      b += idx[d] * cb[d];
    }
    const Index last = nd - 1;
    for (Index i = begin; i < end;) {
      // Run along the contiguous dimension, then carry.
      const Index run = std::min(counts[last] - idx[last], end - i);
      for (Index r = 0; r < run; ++r) f(i + r, a + r * ca[last], b + r * cb[last]);
      i += run;
      a += run * ca[last];
      b += run * cb[last];
      idx[last] += run;
      for (Index d = last; d > 0 && idx[d] == counts[d]; --d) {
        a -= counts[d] * ca[d];
        b -= counts[d] * cb[d];
        idx[d] = 0;
        ++idx[d - 1];
        a += ca[d - 1];
        b += cb[d - 1];
      }
    }
  }

  const Grid& sub_grid() const { return sub_; }
  const std::vector<Index>& dims() const { return dims_; }

 private:
  std::vector<Index> dims_;
  std::vector<Index> full_strides_, full_counts_, sub_strides_;
  std::vector<Index> strides_, counts_, coef_;  // per full dimension; coef_ is 0 off the projection
  Grid sub_;
};

}  // namespace hjleak
