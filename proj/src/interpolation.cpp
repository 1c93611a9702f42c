#include "cpm/interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cpm/dynamics.hpp"
#include "cpm/errors.hpp"
#include "cpm/numerics.hpp"

namespace cpm {

namespace {

bool parallel(double s1, double s2) {
  return std::abs(s2 - s1) <= kParallelSpeedTol * std::max({1.0, std::abs(s1), std::abs(s2)});
}

Particle at(double x, double u) { return Particle{x, u, false, false}; }

}  // namespace

double x_of_u(const Segment& seg, double u) {
  const double u1 = seg.left.u;
  const double u2 = seg.right.u;
  if (u == u1) return seg.left.x;
  if (u == u2) return seg.right.x;
  if (!(u >= std::min(u1, u2) && u <= std::max(u1, u2))) {
    std::ostringstream msg;
    msg << "u=" << u << " outside the segment values [" << std::min(u1, u2) << ", "
        << std::max(u1, u2) << "]";
    throw DomainError(msg.str());
  }
  const FluxModel& f = *seg.flux;
  const double s1 = f.df(u1);
  const double s2 = f.df(u2);
  const double frac = parallel(s1, s2) ? (u - u1) / (u2 - u1) : (f.df(u) - s1) / (s2 - s1);
  return std::clamp(seg.left.x + frac * seg.length(), seg.left.x, seg.right.x);
}

double u_of_x(const Segment& seg, double x) {
  const double x1 = seg.left.x;
  const double x2 = seg.right.x;
  if (!(x >= x1 && x <= x2)) {
    std::ostringstream msg;
    msg << "x=" << x << " outside the segment [" << x1 << ", " << x2 << "]";
    throw DomainError(msg.str());
  }
  const double u1 = seg.left.u;
  const double u2 = seg.right.u;
  if (x == x1 || u1 == u2) return u1;
  if (x == x2) return u2;
  const FluxModel& f = *seg.flux;
  const double s1 = f.df(u1);
  const double s2 = f.df(u2);
  const double frac = (x - x1) / (x2 - x1);
  if (parallel(s1, s2)) return u1 + frac * (u2 - u1);
  const double target = s1 + frac * (s2 - s1);
  const auto root = numerics::safeguarded_newton([&](double u) { return f.df(u) - target; },
                                                 [&](double u) { return f.ddf(u); }, u1, u2,
                                                 u1 + frac * (u2 - u1), 1e-14, 200);
  if (!root) return u1 + frac * (u2 - u1);
  return root->root;
}

double segment_area(const Segment& seg) {
  return seg.length() * seg.flux->average(seg.left.u, seg.right.u);
}

double segment_area_between(const Segment& seg, double p, double q) {
  if (p == q) return 0.0;
  const double up = u_of_x(seg, p);
  const double uq = u_of_x(seg, q);
  return (q - p) * seg.flux->average(up, uq);
}

double segment_entropy(const Segment& seg, double k) {
  const FluxModel& f = *seg.flux;
  const double u1 = seg.left.u;
  const double u2 = seg.right.u;
  const double lo = std::min(u1, u2);
  const double hi = std::max(u1, u2);
  if (k <= lo || k >= hi) return seg.length() * std::abs(f.average(u1, u2) - k);
  const double xk = x_of_u(seg, k);
  const double x_lo = u1 < u2 ? seg.left.x : seg.right.x;
  const double x_hi = u1 < u2 ? seg.right.x : seg.left.x;
  return std::abs(xk - x_lo) * (k - f.average(lo, k)) + std::abs(x_hi - xk) * (f.average(k, hi) - k);
}

double total_area(const ParticleField& field) {
  double sum = 0.0;
  const auto& ps = field.particles;
  for (std::size_t i = 0; i + 1 < ps.size(); ++i) sum += segment_area(Segment(ps[i], ps[i + 1], *field.flux));
  return sum;
}

double total_variation(const ParticleField& field) {
  double sum = 0.0;
  const auto& ps = field.particles;
  for (std::size_t i = 0; i + 1 < ps.size(); ++i) sum += std::abs(ps[i + 1].u - ps[i].u);
  return sum;
}

double kruzkov_entropy(const ParticleField& field, double k) {
  double sum = 0.0;
  const auto& ps = field.particles;
  for (std::size_t i = 0; i + 1 < ps.size(); ++i) {
    sum += segment_entropy(Segment(ps[i], ps[i + 1], *field.flux), k);
  }
  return sum;
}

std::vector<CurvePoint> sample_curve(const ParticleField& field, std::size_t points_per_segment) {
  if (points_per_segment < 2) throw PreconditionError("sample_curve needs at least 2 points per segment");
  std::vector<CurvePoint> out;
  const auto& ps = field.particles;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    out.push_back({ps[i].x, ps[i].u});
    if (i + 1 == ps.size()) break;
    const Segment seg(ps[i], ps[i + 1], *field.flux);
    if (seg.constant()) continue;
    for (std::size_t j = 1; j + 1 < points_per_segment; ++j) {
      const double u = seg.left.u + (seg.right.u - seg.left.u) * static_cast<double>(j) /
                                         static_cast<double>(points_per_segment - 1);
      out.push_back({x_of_u(seg, u), u});
    }
  }
  return out;
}

PiecewiseSolution::PiecewiseSolution(std::vector<CurvePoint> nodes,
                                     std::shared_ptr<const FluxModel> flux)
    : nodes_(std::move(nodes)), flux_(std::move(flux)) {
  if (nodes_.empty()) throw PreconditionError("piecewise solution needs at least one node");
  if (!flux_) throw PreconditionError("piecewise solution needs a flux");
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (nodes_[i].x < nodes_[i - 1].x) throw PreconditionError("piecewise solution nodes out of order");
  }
}

PiecewiseSolution PiecewiseSolution::from_field(const ParticleField& field) {
  std::vector<CurvePoint> nodes;
  nodes.reserve(field.size());
  for (const auto& p : field.particles) nodes.push_back({p.x, p.u});
  return PiecewiseSolution(std::move(nodes), field.flux);
}

double PiecewiseSolution::value(double x) const {
  if (x <= nodes_.front().x) return nodes_.front().u;
  if (x >= nodes_.back().x) return nodes_.back().u;
  // first node strictly right of x; its predecessor is the last node at or left of x
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x,
                                   [](double v, const CurvePoint& n) { return v < n.x; });
  const auto& r = *it;
  const auto& l = *(it - 1);
  if (l.x == x) return l.u;
  return u_of_x(Segment(at(l.x, l.u), at(r.x, r.u), *flux_), x);
}

double PiecewiseSolution::integral(double a, double b) const {
  a = std::max(a, x_min());
  b = std::min(b, x_max());
  double sum = 0.0;
  if (!(b > a)) return sum;
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), a,
                             [](double v, const CurvePoint& n) { return v < n.x; });
  std::size_t first = static_cast<std::size_t>(it - nodes_.begin());
  first = first > 0 ? first - 1 : 0;
  for (std::size_t i = first; i + 1 < nodes_.size() && nodes_[i].x < b; ++i) {
    const auto& l = nodes_[i];
    const auto& r = nodes_[i + 1];
    const double p = std::max(a, l.x);
    const double q = std::min(b, r.x);
    if (!(q > p)) continue;
    const Segment seg(at(l.x, l.u), at(r.x, r.u), *flux_);
    if (p == l.x && q == r.x) {
      sum += segment_area(seg);
    } else {
      sum += segment_area_between(seg, p, q);
    }
  }
  return sum;
}

std::vector<double> PiecewiseSolution::breakpoints() const {
  std::vector<double> xs;
  xs.reserve(nodes_.size());
  for (const auto& n : nodes_) {
    if (xs.empty() || xs.back() != n.x) xs.push_back(n.x);
  }
  return xs;
}

}  // namespace cpm
