#include "hjleak/grid.hpp"

#include <algorithm>
#include <initializer_list>
#include <cmath>
#include <numeric>
#include <string>

#include "hjleak/errors.hpp"

namespace hjleak {

namespace {

void check_cover(std::initializer_list<const std::vector<Index>*> parts, Index total, const char* what) {
  std::vector<int> seen(total, 0);
  for (const auto* part : parts) {
    for (Index i : *part) {
      if (i >= total) throw ConfigError(std::string(what) + " index " + std::to_string(i) + " out of range");
      if (seen[i]++) throw ConfigError(std::string(what) + " index " + std::to_string(i) + " appears twice");
    }
  }
  for (Index i = 0; i < total; ++i)
    if (!seen[i]) throw ConfigError(std::string(what) + " index " + std::to_string(i) + " not assigned to a partition");
}

}  // namespace

void PartitionSchema::validate(Index n, Index m) const {
  if (z1_dims.empty() || z2_dims.empty()) throw ConfigError("state partitions z1 and z2 must be nonempty");
  check_cover({&z1_dims, &z2_dims, &zc_dims}, n, "state");
  check_cover({&u1_idx, &u2_idx, &uc_idx}, m, "control");
}

std::vector<Index> PartitionSchema::subsystem_dims(int which) const {
  std::vector<Index> out = exclusive_dims(which);
  out.insert(out.end(), zc_dims.begin(), zc_dims.end());
  return out;
}

std::vector<Index> PartitionSchema::subsystem_controls(int which) const {
  std::vector<Index> out = exclusive_controls(which);
  out.insert(out.end(), uc_idx.begin(), uc_idx.end());
  return out;
}

const std::vector<Index>& PartitionSchema::exclusive_controls(int which) const {
  if (which == 1) return u1_idx;
  if (which == 2) return u2_idx;
  throw DomainError("subsystem must be 1 or 2");
}

const std::vector<Index>& PartitionSchema::exclusive_dims(int which) const {
  if (which == 1) return z1_dims;
  if (which == 2) return z2_dims;
  throw DomainError("subsystem must be 1 or 2");
}

Grid::Grid(std::vector<double> mins, std::vector<double> maxs, std::vector<Index> counts)
    : mins_(std::move(mins)), maxs_(std::move(maxs)), counts_(std::move(counts)) {
  if (counts_.empty()) throw ConfigError("grid needs at least one dimension");
  if (mins_.size() != counts_.size() || maxs_.size() != counts_.size())
    throw ConfigError("grid mins, maxs and counts must have equal length");
  spacings_.resize(dims());
  strides_.resize(dims());
  for (Index d = 0; d < dims(); ++d) {
    if (counts_[d] < 2) throw ConfigError("grid dimension " + std::to_string(d) + " needs at least 2 points");
    if (!(mins_[d] < maxs_[d])) throw ConfigError("grid dimension " + std::to_string(d) + " needs min < max");
    spacings_[d] = (maxs_[d] - mins_[d]) / static_cast<double>(counts_[d] - 1);
  }
  Index stride = 1;
  for (Index d = dims(); d-- > 0;) {
    strides_[d] = stride;
    stride *= counts_[d];
  }
  size_ = stride;
}

Index Grid::linear(std::span<const Index> multi) const {
  if (multi.size() != dims()) throw DomainError("multi-index has wrong dimension");
  Index out = 0;
  for (Index d = 0; d < dims(); ++d) {
    if (multi[d] >= counts_[d]) throw DomainError("multi-index out of range in dimension " + std::to_string(d));
    out += multi[d] * strides_[d];
  }
  return out;
}

std::vector<Index> Grid::multi(Index linear) const {
  std::vector<Index> out(dims());
  multi(linear, out);
  return out;
}

void Grid::multi(Index linear, std::span<Index> out) const {
  if (linear >= size_) throw DomainError("linear index out of range");
  for (Index d = 0; d < dims(); ++d) out[d] = (linear / strides_[d]) % counts_[d];
}

GridPoint Grid::point(Index linear) const { return GridPoint{linear, multi(linear)}; }

GridPoint Grid::point(std::span<const Index> multi) const {
  return GridPoint{linear(multi), std::vector<Index>(multi.begin(), multi.end())};
}

bool Grid::valid(const GridPoint& p) const {
  if (p.multi.size() != dims() || p.linear >= size_) return false;
  Index lin = 0;
  for (Index d = 0; d < dims(); ++d) {
    if (p.multi[d] >= counts_[d]) return false;
    lin += p.multi[d] * strides_[d];
  }
  return lin == p.linear;
}

std::vector<double> Grid::index_to_state(const GridPoint& p) const {
  if (!valid(p)) throw DomainError("grid point out of range");
  std::vector<double> out(dims());
  for (Index d = 0; d < dims(); ++d) out[d] = coordinate(d, p.multi[d]);
  return out;
}

void Grid::state_at(Index linear, std::span<double> out) const {
  for (Index d = 0; d < dims(); ++d) out[d] = coordinate(d, (linear / strides_[d]) % counts_[d]);
}

GridPoint Grid::state_to_nearest_index(std::span<const double> state) const {
  if (state.size() != dims()) throw DomainError("state has wrong dimension");
  std::vector<Index> m(dims());
  for (Index d = 0; d < dims(); ++d) {
    const double r = std::round((state[d] - mins_[d]) / spacings_[d]);
    m[d] = static_cast<Index>(std::clamp(r, 0.0, static_cast<double>(counts_[d] - 1)));
  }
  return point(m);
}

bool Grid::contains(std::span<const double> state) const {
  if (state.size() != dims()) return false;
  for (Index d = 0; d < dims(); ++d) {
    const double tol = 1e-12 * std::max(1.0, std::abs(maxs_[d] - mins_[d]));
    if (state[d] < mins_[d] - tol || state[d] > maxs_[d] + tol) return false;
  }
  return true;
}

std::vector<Index> Grid::neighbors(Index linear) const {
  if (linear >= size_) throw DomainError("linear index out of range");
  std::vector<Index> out;
  out.reserve(2 * dims());
  for_each_neighbor(linear, [&](Index n) { out.push_back(n); });
  return out;
}

Grid Grid::restrict_to(std::span<const Index> dims_sel) const {
  std::vector<double> mins, maxs;
  std::vector<Index> counts;
  for (Index d : dims_sel) {
    if (d >= dims()) throw DomainError("restricted dimension out of range");
    mins.push_back(mins_[d]);
    maxs.push_back(maxs_[d]);
    counts.push_back(counts_[d]);
  }
  return Grid(std::move(mins), std::move(maxs), std::move(counts));
}

bool Grid::operator==(const Grid& other) const {
  return mins_ == other.mins_ && maxs_ == other.maxs_ && counts_ == other.counts_;
}

GridPoint project_point(const Grid& grid, const PartitionSchema& schema, const GridPoint& p, int which) {
  if (!grid.valid(p)) throw DomainError("grid point out of range");
  const auto dims = schema.subsystem_dims(which);
  const Grid sub = grid.restrict_to(dims);
  std::vector<Index> m;
  m.reserve(dims.size());
  for (Index d : dims) m.push_back(p.multi[d]);
  return sub.point(m);
}

Projection::Projection(const Grid& full, std::vector<Index> dims)
    : dims_(std::move(dims)), sub_(full.restrict_to(dims_)) {
  for (Index k = 0; k < dims_.size(); ++k) {
    full_strides_.push_back(full.strides()[dims_[k]]);
    full_counts_.push_back(full.counts()[dims_[k]]);
    sub_strides_.push_back(sub_.strides()[k]);
  }
  strides_ = full.strides();
  counts_ = full.counts();
  coef_.assign(full.dims(), 0);
  for (Index k = 0; k < dims_.size(); ++k) coef_[dims_[k]] = sub_strides_[k];
}

}  // namespace hjleak
