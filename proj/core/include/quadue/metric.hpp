#pragma once

// Hypervolume tightness of an underestimator relative to a linear baseline:
//   M = integral(q - l) / integral(f - l)
// with every integral replaced by the same equal-weight quadrature.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "quadue/dc_function.hpp"
#include "quadue/underestimator.hpp"

namespace quadue {

enum class Baseline { Linear, ShiftedLinear };

struct MetricResult {
  double value = 0.0;
  Baseline baseline = Baseline::Linear;
  int points = 0;
};

// Quadrature nodes on the box of f with f cached at each node. n <= 2 uses a
// midpoint grid (65536 cells in 1D, 256^2 in 2D); higher dimensions use 2^16
// scrambled Halton points. A positive count overrides the node count (cells
// per dimension for the grid, total points otherwise).
class MetricIntegrator {
 public:
  explicit MetricIntegrator(const DcFunction& f, std::uint64_t seed = 0, int count = 0);

  const std::vector<Eigen::VectorXd>& points() const { return points_; }
  const std::vector<double>& f_values() const { return f_values_; }
  double volume() const { return volume_; }

 private:
  std::vector<Eigen::VectorXd> points_;
  std::vector<double> f_values_;
  double volume_ = 0.0;
};

// Baseline is the tangent at u.x0 shifted down by baseline_gamma. Throws
// DegenerateDenominator when the integral of f minus the baseline is below
// 1e-10.
MetricResult metric(const QuadUnderestimator& u, const MetricIntegrator& rule, double baseline_gamma = 0.0);

}  // namespace quadue
