#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "cpm/state.hpp"

namespace cpm {

// Two neighboring particles and the conservative interpolant between them:
// x(u) = x1 + (f'(u) - f'(u1)) / (f'(u2) - f'(u1)) * (x2 - x1).
// The interpolant is itself a solution of the conservation law, so any piece of it
// between two of its points is again the interpolant between those points.
struct Segment {
  Particle left;
  Particle right;
  const FluxModel* flux = nullptr;

  Segment(const Particle& l, const Particle& r, const FluxModel& f) : left(l), right(r), flux(&f) {}

  double length() const { return right.x - left.x; }
  bool constant() const { return left.u == right.u; }
};

double x_of_u(const Segment& seg, double u);

// Inverse of x_of_u. Returns left.u on zero-length segments.
double u_of_x(const Segment& seg, double x);

// (x2 - x1) * a(u1, u2)
double segment_area(const Segment& seg);

// Integral of the interpolant over [p, q], a sub-interval of the segment.
double segment_area_between(const Segment& seg, double p, double q);

double segment_entropy(const Segment& seg, double k);

// Area between the first and last particle.
double total_area(const ParticleField& field);
double total_variation(const ParticleField& field);
// Integral of |u(x) - k| between the first and last particle.
double kruzkov_entropy(const ParticleField& field, double k);

struct CurvePoint {
  double x;
  double u;
};

std::vector<CurvePoint> sample_curve(const ParticleField& field, std::size_t points_per_segment);

// Ordered nodes joined by the conservative interpolant; two nodes at the same x form a
// jump. Right-continuous at jumps.
class PiecewiseSolution {
 public:
  PiecewiseSolution(std::vector<CurvePoint> nodes, std::shared_ptr<const FluxModel> flux);
  static PiecewiseSolution from_field(const ParticleField& field);

  const std::vector<CurvePoint>& nodes() const { return nodes_; }
  const FluxModel& flux() const { return *flux_; }
  double x_min() const { return nodes_.front().x; }
  double x_max() const { return nodes_.back().x; }

  double value(double x) const;
  // Integral over [a, b] clipped to the support.
  double integral(double a, double b) const;
  std::vector<double> breakpoints() const;

 private:
  std::vector<CurvePoint> nodes_;
  std::shared_ptr<const FluxModel> flux_;
};

}  // namespace cpm
