#include "cpm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <json.hpp>

#include "cpm/errors.hpp"
#include "cpm/io.hpp"
#include "cpm/numerics.hpp"

namespace cpm {

void DiagnosticsSeries::count_events(const EventLog& log) {
  for (const auto& e : log.events) ++event_counts[to_string(e.type)];
}

void DiagnosticsSeries::write_csv(std::ostream& out) const {
  out << "t,area,tv";
  for (std::size_t k = 0; k < entropy_grid.size(); ++k) out << ",entropy_k" << k + 1;
  out << '\n';
  for (std::size_t r = 0; r < times.size(); ++r) {
    out << io::format_double(times[r]) << ',' << io::format_double(area[r]) << ','
        << io::format_double(tv[r]);
    for (double e : entropy[r]) out << ',' << io::format_double(e);
    out << '\n';
  }
}

void DiagnosticsSeries::write_json(std::ostream& out) const {
  nlohmann::json j;
  j["times"] = times;
  j["area"] = area;
  j["tv"] = tv;
  j["entropy_grid"] = entropy_grid;
  j["entropy"] = entropy;
  j["event_counts"] = event_counts;
  out << j.dump(2) << '\n';
}

std::vector<double> default_entropy_grid(const ParticleField& field, std::size_t count) {
  if (field.empty() || count == 0) return {};
  const auto [lo_it, hi_it] = std::minmax_element(
      field.particles.begin(), field.particles.end(),
      [](const Particle& a, const Particle& b) { return a.u < b.u; });
  const double range = hi_it->u - lo_it->u;
  const double lo = lo_it->u - 0.1 * range;
  const double hi = hi_it->u + 0.1 * range;
  std::vector<double> grid(count);
  for (std::size_t k = 0; k < count; ++k) {
    grid[k] = count == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
  }
  return grid;
}

void record(const ParticleField& field, DiagnosticsSeries& series) {
  series.times.push_back(field.t);
  series.area.push_back(total_area(field));
  series.tv.push_back(total_variation(field));
  std::vector<double> row;
  row.reserve(series.entropy_grid.size());
  for (double k : series.entropy_grid) row.push_back(kruzkov_entropy(field, k));
  series.entropy.push_back(std::move(row));
}

GridFunction::GridFunction(std::vector<double> xs_, std::vector<double> us_, Convention c)
    : xs(std::move(xs_)), us(std::move(us_)), convention(c) {
  if (xs.size() != us.size()) throw PreconditionError("grid function needs as many values as positions");
  if (xs.size() < 2) throw PreconditionError("grid function needs at least two positions");
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) throw PreconditionError("grid positions must be strictly increasing");
  }
}

double GridFunction::cell_edge(std::size_t k) const {
  const std::size_t n = xs.size();
  if (k == 0) return xs[0] - 0.5 * (xs[1] - xs[0]);
  if (k == n) return xs[n - 1] + 0.5 * (xs[n - 1] - xs[n - 2]);
  return 0.5 * (xs[k - 1] + xs[k]);
}

double GridFunction::x_min() const {
  return convention == Convention::cell_average ? cell_edge(0) : xs.front();
}

double GridFunction::x_max() const {
  return convention == Convention::cell_average ? cell_edge(xs.size()) : xs.back();
}

double GridFunction::value(double x) const {
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t j = static_cast<std::size_t>(it - xs.begin());  // xs[j-1] <= x < xs[j]
  if (convention == Convention::pointwise) {
    if (j == 0) return us.front();
    if (j == xs.size()) return us.back();
    const double s = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
    return us[j - 1] + s * (us[j] - us[j - 1]);
  }
  if (j == 0) return us.front();
  if (j == xs.size()) return us.back();
  return x < cell_edge(j) ? us[j - 1] : us[j];
}

double GridFunction::integral(double a, double b) const {
  a = std::max(a, x_min());
  b = std::min(b, x_max());
  if (!(b > a)) return 0.0;
  double sum = 0.0;
  if (convention == Convention::pointwise) {
    auto j = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), a) - xs.begin());
    j = std::max<std::size_t>(j, 1);
    for (; j < xs.size() && xs[j - 1] < b; ++j) {
      const double p = std::max(a, xs[j - 1]);
      const double q = std::min(b, xs[j]);
      if (q > p) sum += (q - p) * 0.5 * (value(p) + value(q));
    }
    return sum;
  }
  auto k = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), a) - xs.begin());
  k = k > 0 ? k - 1 : 0;
  for (; k < xs.size() && cell_edge(k) < b; ++k) {
    const double p = std::max(a, cell_edge(k));
    const double q = std::min(b, cell_edge(k + 1));
    if (q > p) sum += (q - p) * us[k];
  }
  return sum;
}

std::vector<double> GridFunction::breakpoints() const {
  if (convention == Convention::pointwise) return xs;
  std::vector<double> edges(xs.size() + 1);
  for (std::size_t k = 0; k <= xs.size(); ++k) edges[k] = cell_edge(k);
  return edges;
}

void GridFunction::write_csv(std::ostream& out) const {
  out << "x_center,u\n";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out << io::format_double(xs[i]) << ',' << io::format_double(us[i]) << '\n';
  }
}

FunctionProfile::FunctionProfile(std::function<double(double)> fn, double lo, double hi,
                                 std::vector<double> kinks)
    : fn_(std::move(fn)), lo_(lo), hi_(hi), kinks_(std::move(kinks)) {
  std::sort(kinks_.begin(), kinks_.end());
}

double FunctionProfile::integral(double a, double b) const {
  a = std::max(a, lo_);
  b = std::min(b, hi_);
  if (!(b > a)) return 0.0;
  double sum = 0.0;
  double p = a;
  for (double k : kinks_) {
    if (k <= p || k >= b) continue;
    sum += numerics::integrate(fn_, p, k);
    p = k;
  }
  return sum + numerics::integrate(fn_, p, b);
}

std::vector<double> FunctionProfile::breakpoints() const {
  std::vector<double> out{lo_};
  for (double k : kinks_) {
    if (k > lo_ && k < hi_) out.push_back(k);
  }
  out.push_back(hi_);
  return out;
}

namespace {

// |a - b| integrated over [p, q], where both profiles are smooth. Sign changes of the
// difference are located from a few samples and refined by bisection.
double piece_l1(const Profile& a, const Profile& b, double p, double q) {
  constexpr int kSamples = 6;
  const auto diff = [&](double x) { return a.value(x) - b.value(x); };
  std::vector<double> cuts{p};
  double prev_x = p + (q - p) * 0.5 / kSamples;
  double prev = diff(prev_x);
  for (int j = 1; j < kSamples; ++j) {
    const double x = p + (q - p) * (j + 0.5) / kSamples;
    const double v = diff(x);
    if ((prev < 0.0 && v > 0.0) || (prev > 0.0 && v < 0.0)) {
      double lo = prev_x;
      double hi = x;
      const bool rising = prev < 0.0;
      for (int it = 0; it < 100 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if ((diff(mid) < 0.0) == rising) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      cuts.push_back(0.5 * (lo + hi));
    }
    prev = v;
    prev_x = x;
  }
  cuts.push_back(q);
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    sum += std::abs(a.integral(cuts[k], cuts[k + 1]) - b.integral(cuts[k], cuts[k + 1]));
  }
  return sum;
}

}  // namespace

double l1_error(const Profile& a, const Profile& b) {
  const double lo = std::max(a.x_min(), b.x_min());
  const double hi = std::min(a.x_max(), b.x_max());
  if (!(hi > lo)) throw DomainError("l1_error: the supports do not overlap");
  std::vector<double> cuts = a.breakpoints();
  const std::vector<double> other = b.breakpoints();
  cuts.insert(cuts.end(), other.begin(), other.end());
  cuts.push_back(lo);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double sum = 0.0;
  double p = lo;
  for (double c : cuts) {
    if (c <= p) continue;
    if (c > hi) break;
    sum += piece_l1(a, b, p, c);
    p = c;
  }
  return sum;
}

double l1_error(const ParticleField& field, const GridFunction& ref) {
  return l1_error(PiecewiseSolution::from_field(field), ref);
}

double l1_error(const PiecewiseSolution& solution, const GridFunction& ref) {
  return l1_error(SolutionProfile(solution), GridProfile(ref));
}

double l1_error(const PiecewiseSolution& a, const PiecewiseSolution& b) {
  return l1_error(SolutionProfile(a), SolutionProfile(b));
}

double fit_slope(const std::vector<double>& h, const std::vector<double>& error) {
  if (h.size() != error.size() || h.size() < 2) {
    throw PreconditionError("slope fit needs at least two (h, error) pairs");
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double x = std::log(h[i]);
    const double y = std::log(error[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace cpm
