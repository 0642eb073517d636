#include "quadue/metric.hpp"

#include "quadue/error.hpp"
#include "quadue/sampling.hpp"

namespace quadue {

MetricIntegrator::MetricIntegrator(const DcFunction& f, std::uint64_t seed, int count) : volume_(f.box().volume()) {
  const int n = f.dim();
  if (n == 1)
    points_ = midpoint_grid(f.box(), count > 0 ? count : 65536);
  else if (n == 2)
    points_ = midpoint_grid(f.box(), count > 0 ? count : 256);
  else
    points_ = scrambled_halton(f.box(), count > 0 ? count : 1 << 16, seed);
  f_values_.reserve(points_.size());
  for (const auto& p : points_) f_values_.push_back(f.value(p));
}

MetricResult metric(const QuadUnderestimator& u, const MetricIntegrator& rule, double baseline_gamma) {
  QuadUnderestimator base = u;
  base.A.setZero();
  base.gamma = baseline_gamma;
  double num = 0.0;
  double den = 0.0;
  const auto& pts = rule.points();
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const double l = q_eval(base, pts[k]);
    num += q_eval(u, pts[k]) - l;
    den += rule.f_values()[k] - l;
  }
  const double w = rule.volume() / static_cast<double>(pts.size());
  if (den * w < 1e-10) throw Error(ErrorKind::DegenerateDenominator, "f does not rise above the baseline");
  MetricResult r;
  r.value = num / den;
  r.baseline = baseline_gamma != 0.0 ? Baseline::ShiftedLinear : Baseline::Linear;
  r.points = static_cast<int>(pts.size());
  return r;
}

}  // namespace quadue
