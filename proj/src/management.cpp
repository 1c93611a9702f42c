#include "cpm/management.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "cpm/dynamics.hpp"
#include "cpm/errors.hpp"
#include "cpm/numerics.hpp"

namespace cpm {

namespace {

bool parallel(double s1, double s2) {
  return std::abs(s2 - s1) <= kParallelSpeedTol * std::max({1.0, std::abs(s1), std::abs(s2)});
}

bool colliding(const FluxModel& f, const Particle& a, const Particle& b) {
  const double sa = f.df(a.u);
  const double sb = f.df(b.u);
  return sa > sb && !parallel(sa, sb);
}

bool deviating(const FluxModel& f, const Particle& a, const Particle& b) {
  const double sa = f.df(a.u);
  const double sb = f.df(b.u);
  return sa < sb && !parallel(sa, sb);
}

constexpr double kClusterTol = 1e-12;

// d/du a(v, u)
double average_slope(const FluxModel& f, double v, double u) {
  const double sv = f.df(v);
  const double su = f.df(u);
  if (u == v || parallel(sv, su)) return 0.5;
  return f.ddf(u) * (u - f.average(v, u)) / (su - sv);
}

Particle fresh(const FluxModel& f, double x, double u, bool merged) {
  return Particle{x, u, f.is_inflection_value(u), merged};
}

void emit(const ParticleField& field, EventLog* log, const ManagementHooks* hooks, Event e) {
  if (hooks && hooks->after_event) hooks->after_event(field, e);
  if (log) log->events.push_back(std::move(e));
}

// Midpoint insertion on the interpolant; false for zero-length gaps.
bool split_midpoint(ParticleField& field, std::size_t i) {
  const Particle l = field[i];
  const Particle r = field[i + 1];
  if (!(r.x > l.x)) return false;
  const double xm = 0.5 * (l.x + r.x);
  const double um = u_of_x(Segment(l, r, *field.flux), xm);
  field.particles.insert(field.particles.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                         fresh(*field.flux, xm, um, false));
  return true;
}

std::string describe_pair(const ParticleField& field, std::size_t i) {
  std::ostringstream msg;
  msg << "t=" << field.t << ", pair " << i << ": (" << field[i].x << ", " << field[i].u << ") and ("
      << field[i + 1].x << ", " << field[i + 1].u << ")";
  return msg.str();
}

// Ratio min|f''| / max|f''| over [lo, hi]; zero when f'' vanishes or changes sign there.
double curvature_ratio(const FluxModel& f, double lo, double hi) {
  constexpr int kSamples = 64;
  double min_abs = std::numeric_limits<double>::infinity();
  double max_abs = 0.0;
  int sign = 0;
  for (int k = 0; k <= kSamples; ++k) {
    const double u = lo + (hi - lo) * k / kSamples;
    const double c = f.ddf(u);
    if (c == 0.0) return 0.0;
    const int s = c > 0.0 ? 1 : -1;
    if (sign != 0 && s != sign) return 0.0;
    sign = s;
    min_abs = std::min(min_abs, std::abs(c));
    max_abs = std::max(max_abs, std::abs(c));
  }
  return min_abs / max_abs;
}

}  // namespace

const char* to_string(Event::Type type) {
  switch (type) {
    case Event::Type::insert: return "insert";
    case Event::Type::merge: return "merge";
    case Event::Type::inflection_merge: return "inflection_merge";
    case Event::Type::fix_retry: return "fix_retry";
  }
  return "unknown";
}

std::size_t EventLog::count(Event::Type type) const {
  return static_cast<std::size_t>(
      std::count_if(events.begin(), events.end(), [&](const Event& e) { return e.type == type; }));
}

void EventLog::write_jsonl(std::ostream& out) const {
  for (const auto& e : events) {
    nlohmann::json j;
    j["type"] = to_string(e.type);
    j["t"] = e.t;
    j["indices"] = e.indices;
    j["x"] = e.xs;
    j["u"] = e.us;
    if (e.type == Event::Type::merge) {
      j["tv_safe"] = e.tv_safe;
      j["entropy_safe"] = e.entropy_safe;
    }
    if (e.step != 0) j["step"] = e.step;
    out << j.dump() << '\n';
  }
}

void insert_between(ParticleField& field, std::size_t i, const ManagementConfig&, EventLog* log) {
  if (i + 1 >= field.size()) throw PreconditionError("insert_between: no pair at this index");
  if (colliding(*field.flux, field[i], field[i + 1])) {
    throw PreconditionError("insert_between: pair is colliding, " + describe_pair(field, i));
  }
  if (!split_midpoint(field, i)) return;
  emit(field, log, nullptr,
       Event{Event::Type::insert, field.t, {i, i + 1}, {field[i + 1].x}, {field[i + 1].u}});
}

MergeOutcome merge_value(const ParticleField& field, std::size_t i, const ManagementConfig& cfg) {
  if (i + 1 >= field.size()) throw PreconditionError("merge_value: no pair at this index");
  const FluxModel& f = *field.flux;
  const Particle& p2 = field[i];
  const Particle& p3 = field[i + 1];
  const std::optional<Particle> p1 = i > 0 ? std::optional<Particle>(field[i - 1]) : std::nullopt;
  const std::optional<Particle> p4 =
      i + 2 < field.size() ? std::optional<Particle>(field[i + 2]) : std::nullopt;

  MergeOutcome out;
  out.removed = {i, i + 1};
  // a boundary pair keeps its outer position so the support does not shrink
  out.x23 = 0.5 * (p2.x + p3.x);
  if (!p1 && p4) out.x23 = p2.x;
  if (p1 && !p4) out.x23 = p3.x;

  // Inside a cluster of coincident particles the merge keeps the cluster's end values, so
  // the represented function does not change and neither do its TV and entropies.
  // Positions a few roundings apart still count as one cluster for the safety flags.
  const auto near = [](double a, double b) {
    return std::abs(a - b) <= kClusterTol * std::max({1.0, std::abs(a), std::abs(b)});
  };
  // A coincident pair at either end of the support is the same situation: the outer value
  // only lives on a zero-width piece.
  const bool at_end = !p1 || !p4;
  const bool unchanged = near(p2.x, p3.x) && (p1 || p4) &&
                         (at_end || near(p1->x, p2.x) || near(p3.x, p4->x));
  const bool exact_pair = (p1 || p4) && p2.x == p3.x;
  const bool left_flat = exact_pair && (!p1 || p1->x == p2.x);
  const bool right_flat = exact_pair && (!p4 || p4->x == p3.x);

  if (p2.u == p3.u) {
    out.u23 = p2.u;
  } else if (right_flat && !left_flat) {
    out.u23 = p2.u;
  } else if (left_flat && !right_flat) {
    out.u23 = p3.u;
  } else {
    double rhs = (p3.x - p2.x) * f.average(p2.u, p3.u);
    double w1 = 0.0;
    double w4 = 0.0;
    double lo = std::min(p2.u, p3.u);
    double hi = std::max(p2.u, p3.u);
    if (p1) {
      rhs += (p2.x - p1->x) * f.average(p1->u, p2.u);
      w1 = out.x23 - p1->x;
      lo = std::min(lo, p1->u);
      hi = std::max(hi, p1->u);
    }
    if (p4) {
      rhs += (p4->x - p3.x) * f.average(p3.u, p4->u);
      w4 = p4->x - out.x23;
      lo = std::min(lo, p4->u);
      hi = std::max(hi, p4->u);
    }
    if (!(w1 + w4 > 0.0)) {
      out.u23 = f.average(p2.u, p3.u);
    } else {
      const auto balance = [&](double u) {
        double s = -rhs;
        if (p1) s += w1 * f.average(p1->u, u);
        if (p4) s += w4 * f.average(u, p4->u);
        return s;
      };
      const auto slope = [&](double u) {
        double s = 0.0;
        if (p1) s += w1 * average_slope(f, p1->u, u);
        if (p4) s += w4 * average_slope(f, p4->u, u);
        return s;
      };
      const auto root = numerics::safeguarded_newton(balance, slope, lo, hi, 0.5 * (p2.u + p3.u),
                                                     cfg.newton_tol, cfg.newton_max_iter);
      if (!root && unchanged) {
        // positions a few roundings apart can push the root just past the bracket
        out.u23 = std::abs(balance(lo)) < std::abs(balance(hi)) ? lo : hi;
      } else if (!root) {
        throw MergeInfeasibleError("no merged value balances the area, " + describe_pair(field, i));
      } else {
        out.u23 = root->root;
        out.iterations = root->iterations;
      }
    }
  }
  out.tv_safe = unchanged || tvd_safety_check(p1, p2, p3, p4, f);
  out.entropy_safe = unchanged || entropy_check(p1 ? std::optional<double>(p1->u) : std::nullopt,
                                                out.u23, p4 ? std::optional<double>(p4->u) : std::nullopt,
                                                p2.u, p3.u);
  return out;
}

bool tvd_safety_check(const std::optional<Particle>& p1, const Particle& p2, const Particle& p3,
                      const std::optional<Particle>& p4, const FluxModel& flux) {
  if (p2.x == p3.x || p2.u == p3.u) return true;
  double span = std::numeric_limits<double>::infinity();
  double lo = std::min(p2.u, p3.u);
  double hi = std::max(p2.u, p3.u);
  double outer_min = std::numeric_limits<double>::infinity();
  if (p4) {
    span = std::min(span, p4->x - p2.x);
    outer_min = std::min(outer_min, p4->u);
    lo = std::min(lo, p4->u);
    hi = std::max(hi, p4->u);
  }
  if (p1) {
    span = std::min(span, p3.x - p1->x);
    outer_min = std::min(outer_min, p1->u);
    lo = std::min(lo, p1->u);
    hi = std::max(hi, p1->u);
  }
  if (!std::isfinite(span)) return true;
  const double value_span = std::abs(std::max(p2.u, p3.u) - outer_min);
  if (value_span == 0.0) return true;
  const double ratio = curvature_ratio(flux, lo, hi);
  const double lhs = (p3.x - p2.x) / std::abs(p3.u - p2.u);
  const double rhs = std::pow(ratio, 6) / 16.0 * span / value_span;
  return lhs <= rhs;
}

bool entropy_check(std::optional<double> u1, double u23, std::optional<double> u4, double u2,
                   double u3) {
  if (u2 > u3) return (!u1 || *u1 >= u23) && (!u4 || u23 >= *u4);
  if (u2 < u3) return (!u1 || *u1 <= u23) && (!u4 || u23 <= *u4);
  return true;
}

void merge_with_fix(ParticleField& field, std::size_t i, const ManagementConfig& cfg, EventLog* log,
                    const ManagementHooks* hooks) {
  const FluxModel& f = *field.flux;
  for (int round = 0;; ++round) {
    std::optional<MergeOutcome> out;
    try {
      out = merge_value(field, i, cfg);
    } catch (const MergeInfeasibleError&) {
      if (!cfg.entropy_fix_enabled) throw;
    }
    if (out && (out->entropy_safe || !cfg.entropy_fix_enabled)) {
      if (hooks && hooks->before_merge) hooks->before_merge(field, i);
      field[i] = fresh(f, out->x23, out->u23, true);
      field.particles.erase(field.particles.begin() + static_cast<std::ptrdiff_t>(i) + 1);
      Event e{Event::Type::merge, field.t, {i, i + 1}, {out->x23}, {out->u23}};
      e.tv_safe = out->tv_safe;
      e.entropy_safe = out->entropy_safe;
      e.step = round;
      emit(field, log, hooks, std::move(e));
      return;
    }
    if (round >= cfg.max_fix_rounds) {
      throw UnresolvedMergeError("entropy fix gave up after " + std::to_string(round) +
                                 " insertion rounds, " + describe_pair(field, i));
    }
    Event e{Event::Type::fix_retry, field.t, {}, {}, {}};
    e.step = round + 1;
    if (i + 2 < field.size() && split_midpoint(field, i + 1)) {
      e.indices.push_back(i + 2);
      e.xs.push_back(field[i + 2].x);
      e.us.push_back(field[i + 2].u);
    }
    if (i > 0 && split_midpoint(field, i - 1)) {
      e.indices.push_back(i);
      e.xs.push_back(field[i].x);
      e.us.push_back(field[i].u);
      ++i;
    }
    if (e.indices.empty()) {
      throw UnresolvedMergeError("entropy fix has no flank to refine, " + describe_pair(field, i));
    }
    emit(field, log, hooks, std::move(e));
  }
}

void inflection_merge(ParticleField& field, std::size_t i, const ManagementConfig& cfg,
                      EventLog* log, const ManagementHooks* hooks) {
  if (i + 1 >= field.size()) throw PreconditionError("inflection_merge: no pair at this index");
  const FluxModel& f = *field.flux;
  const bool left_infl = field[i].is_inflection;
  const bool right_infl = field[i + 1].is_inflection;
  if (left_infl && right_infl) {
    throw UnsupportedCaseError("two inflection particles collide, " + describe_pair(field, i));
  }
  if (!left_infl && !right_infl) {
    throw PreconditionError("inflection_merge: no inflection particle in the pair");
  }

  // Canonical frame: the inflection particle is particle 3, particle 2 hits it from the
  // left and lies below it in value. x is reflected when the inflection particle is the
  // left member, u when particle 2 lies above it.
  const int rx = right_infl ? 1 : -1;
  const auto index_of = [&](int k) {
    return static_cast<std::ptrdiff_t>(i) + (rx > 0 ? k - 2 : 3 - k);
  };
  for (int k = 1; k <= 5; ++k) {
    const auto j = index_of(k);
    if (j < 0 || j >= static_cast<std::ptrdiff_t>(field.size())) {
      throw UnsupportedCaseError("inflection merge too close to the boundary, " +
                                 describe_pair(field, i));
    }
  }
  const double ustar = field[static_cast<std::size_t>(index_of(3))].u;
  const int ru = field[static_cast<std::size_t>(index_of(2))].u < ustar ? 1 : -1;
  const FluxModel g = f.transformed(rx, ru);

  std::array<double, 6> X{};
  std::array<double, 6> U{};
  for (int k = 1; k <= 5; ++k) {
    const Particle& p = field[static_cast<std::size_t>(index_of(k))];
    X[k] = rx * p.x;
    U[k] = ru * p.u;
  }
  const double us = U[3];

  if (U[4] <= us) {
    // particle 4 sits on the same side as particle 2, so the inflection particle is not
    // needed to separate them
    merge_with_fix(field, i, cfg, log, hooks);
    return;
  }
  for (auto [a, b] : {std::pair{U[1], us}, std::pair{us, U[4]}, std::pair{U[4], U[5]}}) {
    if (g.straddles_inflection(a, b)) {
      throw UnsupportedCaseError("inflection merge spans a second inflection point, " +
                                 describe_pair(field, i));
    }
  }

  const double A = (X[2] - X[1]) * g.average(U[1], U[2]) + (X[3] - X[2]) * g.average(U[2], us) +
                   (X[4] - X[3]) * g.average(us, U[4]) + (X[5] - X[4]) * g.average(U[4], U[5]);
  const double a13 = g.average(U[1], us);
  const double a34 = g.average(us, U[4]);
  const double a45 = g.average(U[4], U[5]);

  struct Node {
    int k;
    double x;
    double u;
  };
  std::vector<Node> result;
  int step = 0;

  const double den1 = a13 - a34;
  if (den1 != 0.0) {
    const double y = (A + X[1] * a13 - X[4] * a34 - (X[5] - X[4]) * a45) / den1;
    if (y >= X[1] && y <= X[4]) {
      step = 1;
      result = {{1, X[1], U[1]}, {3, y, us}, {4, X[4], U[4]}, {5, X[5], U[5]}};
    }
  }
  if (step == 0) {
    const double den2 = a13 - a45;
    if (den2 != 0.0) {
      const double y = (A + X[1] * a13 - X[5] * a45) / den2;
      if (y >= X[4] && y <= X[5]) {
        step = 2;
        result = {{1, X[1], U[1]}, {3, y, us}, {4, y, U[4]}, {5, X[5], U[5]}};
      }
    }
  }
  if (step == 0) {
    const double w1 = X[2] - X[1];
    const double w2 = X[5] - X[2];
    const auto balance = [&](double v) { return w1 * g.average(U[1], v) + w2 * g.average(v, us) - A; };
    const auto slope = [&](double v) {
      return w1 * average_slope(g, U[1], v) + w2 * average_slope(g, us, v);
    };
    const ValueInterval branch = g.convex_branch(us, -1);
    double lo = std::min(U[1], U[2]);
    for (int expand = 0; expand < 60 && balance(lo) > 0.0 && lo > branch.lo; ++expand) {
      lo = std::max(branch.lo, lo - 2.0 * (us - lo) - 1e-3);
    }
    const auto root = numerics::safeguarded_newton(balance, slope, lo, us, 0.5 * (U[2] + us),
                                                   cfg.newton_tol, cfg.newton_max_iter);
    if (!root) {
      throw MergeInfeasibleError("inflection merge found no value for particle 2, " +
                                 describe_pair(field, i));
    }
    step = 3;
    result = {{1, X[1], U[1]}, {2, X[2], root->root}, {3, X[5], us}, {5, X[5], U[5]}};
  }

  if (hooks && hooks->before_merge) hooks->before_merge(field, i);

  std::vector<Particle> replaced;
  for (const Node& n : result) {
    const Particle& old = field[static_cast<std::size_t>(index_of(n.k))];
    Particle p{rx * n.x, ru * n.u, false, false};
    p.is_inflection = f.is_inflection_value(p.u);
    p.merged_origin = (n.u == U[n.k]) ? old.merged_origin : false;
    replaced.push_back(p);
  }
  if (rx < 0) std::reverse(replaced.begin(), replaced.end());
  const auto first = std::min(index_of(1), index_of(5));
  auto& ps = field.particles;
  ps.erase(ps.begin() + first, ps.begin() + first + 5);
  ps.insert(ps.begin() + first, replaced.begin(), replaced.end());

  Event e{Event::Type::inflection_merge, field.t, {}, {}, {}};
  e.step = step;
  for (std::size_t j = 0; j < replaced.size(); ++j) {
    e.indices.push_back(static_cast<std::size_t>(first) + j);
    e.xs.push_back(replaced[j].x);
    e.us.push_back(replaced[j].u);
  }
  emit(field, log, hooks, std::move(e));
}

void management_pass(ParticleField& field, const ManagementConfig& cfg, EventLog* log,
                     const ManagementHooks* hooks) {
  const FluxModel& f = *field.flux;
  if (hooks && hooks->before_pass) hooks->before_pass(field);
  for (std::size_t i = 0; i + 1 < field.size();) {
    if (field[i + 1].x - field[i].x > cfg.d_max && deviating(f, field[i], field[i + 1])) {
      split_midpoint(field, i);
      emit(field, log, hooks,
           Event{Event::Type::insert, field.t, {i, i + 1}, {field[i + 1].x}, {field[i + 1].u}});
      continue;
    }
    ++i;
  }

  for (std::size_t i = 0; i + 1 < field.size();) {
    const Particle& l = field[i];
    const Particle& r = field[i + 1];
    bool due = false;
    if (colliding(f, l, r)) {
      const double gap = r.x - l.x;
      due = gap <= cfg.d_min || gap <= cfg.tie_time * (f.df(l.u) - f.df(r.u));
    }
    if (!due) {
      ++i;
      continue;
    }
    if (l.is_inflection || r.is_inflection) {
      inflection_merge(field, i, cfg, log, hooks);
    } else {
      merge_with_fix(field, i, cfg, log, hooks);
    }
    // a merge changes neighbors on both sides, and fix insertions shift indices
    i = i >= 3 ? i - 3 : 0;
  }
}

namespace {

// Value at x on the interpolant of (a, b) continued past b.
double extended_value(const FluxModel& f, const Particle& a, const Particle& b, double x) {
  if (a.u == b.u || a.x == b.x) return b.u;
  const double sa = f.df(a.u);
  const double sb = f.df(b.u);
  if (parallel(sa, sb)) return b.u;
  const double target = sa + (x - a.x) / (b.x - a.x) * (sb - sa);
  const ValueInterval branch = f.convex_branch(b.u, b.u > a.u ? 1 : -1);
  return inverse_speed(f, target, branch);
}

}  // namespace

PostprocessResult postprocess_shocks(const ParticleField& field) {
  const auto& ps = field.particles;
  const FluxModel& f = *field.flux;
  std::vector<std::size_t> merged;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (ps[i].merged_origin) merged.push_back(i);
  }

  std::vector<CurvePoint> nodes;
  std::vector<std::string> warnings;
  std::size_t reconstructed = 0;
  std::size_t next = 0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const bool is_merged = next < merged.size() && merged[next] == i;
    if (!is_merged) {
      nodes.push_back({ps[i].x, ps[i].u});
      continue;
    }
    const bool crowded = (next > 0 && i - merged[next - 1] <= 2) ||
                         (next + 1 < merged.size() && merged[next + 1] - i <= 2);
    ++next;
    std::ostringstream where;
    where << "merged particle at x=" << ps[i].x;
    if (crowded) {
      warnings.push_back(where.str() + " overlaps a neighboring reconstruction; left as is");
      nodes.push_back({ps[i].x, ps[i].u});
      continue;
    }
    if (i == 0 || i + 1 == ps.size() || !(ps[i + 1].x > ps[i - 1].x)) {
      warnings.push_back(where.str() + " has no room for a jump; left as is");
      nodes.push_back({ps[i].x, ps[i].u});
      continue;
    }
    const Particle& L = ps[i - 1];
    const Particle& R = ps[i + 1];
    const Particle& LL = i >= 2 ? ps[i - 2] : L;
    const Particle& RR = i + 2 < ps.size() ? ps[i + 2] : R;
    const auto left_curve = [&](double x) { return extended_value(f, LL, L, x); };
    const auto right_curve = [&](double x) { return extended_value(f, RR, R, x); };
    const double local = segment_area(Segment(L, ps[i], f)) + segment_area(Segment(ps[i], R, f));
    const auto imbalance = [&](double xs) {
      return (xs - L.x) * f.average(L.u, left_curve(xs)) +
             (R.x - xs) * f.average(right_curve(xs), R.u) - local;
    };
    std::optional<double> xs;
    try {
      xs = numerics::bracketed_root(imbalance, L.x, R.x);
    } catch (const std::exception&) {
      xs.reset();
    }
    if (!xs) {
      warnings.push_back(where.str() + ": no area-preserving jump position; left as is");
      nodes.push_back({ps[i].x, ps[i].u});
      continue;
    }
    nodes.push_back({*xs, left_curve(*xs)});
    nodes.push_back({*xs, right_curve(*xs)});
    ++reconstructed;
  }
  if (nodes.empty()) {
    return PostprocessResult{PiecewiseSolution({{0.0, 0.0}}, field.flux), 0, std::move(warnings)};
  }
  return PostprocessResult{PiecewiseSolution(std::move(nodes), field.flux), reconstructed,
                           std::move(warnings)};
}

}  // namespace cpm
