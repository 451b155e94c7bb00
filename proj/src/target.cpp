#include "hjleak/target.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hjleak/errors.hpp"

namespace hjleak {

TargetSpec TargetSpec::axis(Index dim, bool absolute, double scale, double offset) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Axis;
  n->dim = dim;
  n->absolute = absolute;
  n->scale = scale;
  n->offset = offset;
  return TargetSpec(std::move(n));
}

TargetSpec TargetSpec::box(std::vector<double> lo, std::vector<double> hi) {
  if (lo.empty() || lo.size() != hi.size()) throw ConfigError("box target needs matching nonempty lo/hi");
  for (Index d = 0; d < lo.size(); ++d)
    if (!(lo[d] <= hi[d])) throw ConfigError("box target needs lo <= hi");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Box;
  n->lo = std::move(lo);
  n->hi = std::move(hi);
  return TargetSpec(std::move(n));
}

TargetSpec TargetSpec::max_of(std::vector<TargetSpec> parts) {
  if (parts.empty()) throw ConfigError("max target needs at least one part");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Max;
  n->parts = std::move(parts);
  return TargetSpec(std::move(n));
}

TargetSpec TargetSpec::min_of(std::vector<TargetSpec> parts) {
  if (parts.empty()) throw ConfigError("min target needs at least one part");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Min;
  n->parts = std::move(parts);
  return TargetSpec(std::move(n));
}

double TargetSpec::operator()(std::span<const double> z) const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::Axis: {
      const double v = z[n.dim];
      return n.scale * (n.absolute ? std::abs(v) : v) + n.offset;
    }
    case Kind::Box: {
      // outside: Euclidean distance to the box; inside: minus distance to the boundary
      double outside = 0.0, inside = -std::numeric_limits<double>::infinity();
      for (Index d = 0; d < n.lo.size(); ++d) {
        const double q = std::max(n.lo[d] - z[d], z[d] - n.hi[d]);
        outside += std::max(q, 0.0) * std::max(q, 0.0);
        inside = std::max(inside, q);
      }
      return outside > 0.0 ? std::sqrt(outside) : inside;
    }
    case Kind::Max: {
      double out = -std::numeric_limits<double>::infinity();
      for (const auto& p : n.parts) out = std::max(out, p(z));
      return out;
    }
    case Kind::Min: {
      double out = std::numeric_limits<double>::infinity();
      for (const auto& p : n.parts) out = std::min(out, p(z));
      return out;
    }
  }
  return 0.0;
}

std::vector<double> TargetSpec::evaluate(const Grid& grid) const {
  if (required_dims() > grid.dims()) throw ConfigError("target references a dimension the grid does not have");
  const Node& n = *node_;
  std::vector<double> out(grid.size());
  switch (n.kind) {
    case Kind::Axis: {
      // Constant along every dimension but one: fill blocks of the row-major layout.
      const Index count = grid.counts()[n.dim], stride = grid.strides()[n.dim];
      std::vector<double> values(count);
      for (Index c = 0; c < count; ++c) {
        const double x = grid.coordinate(n.dim, c);
        values[c] = n.scale * (n.absolute ? std::abs(x) : x) + n.offset;
      }
      for (Index base = 0; base < out.size(); base += count * stride) {
        if (stride == 1)
          std::copy(values.begin(), values.end(), out.begin() + base);
        else
          for (Index c = 0; c < count; ++c) std::fill_n(out.begin() + base + c * stride, stride, values[c]);
      }
      break;
    }
    case Kind::Box: {
      std::vector<double> z(grid.dims());
      for (Index i = 0; i < grid.size(); ++i) {
        grid.state_at(i, z);
        out[i] = (*this)(z);
      }
      break;
    }
    case Kind::Max:
    case Kind::Min: {
      out = n.parts.front().evaluate(grid);
      for (Index p = 1; p < n.parts.size(); ++p) {
        const auto other = n.parts[p].evaluate(grid);
        if (n.kind == Kind::Max)
          for (Index i = 0; i < out.size(); ++i) out[i] = std::max(out[i], other[i]);
        else
          for (Index i = 0; i < out.size(); ++i) out[i] = std::min(out[i], other[i]);
      }
      break;
    }
  }
  return out;
}

Index TargetSpec::required_dims() const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::Axis: return n.dim + 1;
    case Kind::Box: return n.lo.size();
    default: {
      Index out = 0;
      for (const auto& p : n.parts) out = std::max(out, p.required_dims());
      return out;
    }
  }
}

}  // namespace hjleak
