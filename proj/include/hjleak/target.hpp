#pragma once

#include <memory>
#include <span>
#include <vector>

#include "hjleak/grid.hpp"

namespace hjleak {

/// Implicit-surface terminal cost l(z); the target set is {z : l(z) <= 0}.
/// Built from axis functions and signed-distance boxes composed by pointwise
/// max (intersection) and min (union).
class TargetSpec {
 public:
  enum class Kind { Axis, Box, Max, Min };

  // scale * z[dim] + offset, or scale * |z[dim]| + offset when `absolute`.
  static TargetSpec axis(Index dim, bool absolute = false, double scale = 1.0, double offset = 0.0);
  // Euclidean signed distance to the box [lo, hi] over the leading dimensions.
  static TargetSpec box(std::vector<double> lo, std::vector<double> hi);
  static TargetSpec max_of(std::vector<TargetSpec> parts);
  static TargetSpec min_of(std::vector<TargetSpec> parts);

  double operator()(std::span<const double> z) const;
  std::vector<double> evaluate(const Grid& grid) const;
  // Smallest state dimension this expression can be evaluated on.
  Index required_dims() const;

  Kind kind() const { return node_->kind; }
  Index dim() const { return node_->dim; }
  bool absolute() const { return node_->absolute; }
  double scale() const { return node_->scale; }
  double offset() const { return node_->offset; }
  const std::vector<double>& lo() const { return node_->lo; }
  const std::vector<double>& hi() const { return node_->hi; }
  const std::vector<TargetSpec>& parts() const { return node_->parts; }

 private:
  struct Node {
    Kind kind = Kind::Axis;
    Index dim = 0;
    bool absolute = false;
    double scale = 1.0;
    double offset = 0.0;
    std::vector<double> lo, hi;
    std::vector<TargetSpec> parts;
  };
  explicit TargetSpec(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

}  // namespace hjleak
