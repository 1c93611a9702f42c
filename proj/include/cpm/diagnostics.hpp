#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cpm/interpolation.hpp"
#include "cpm/management.hpp"
#include "cpm/state.hpp"

namespace cpm {

struct DiagnosticsSeries {
  std::vector<double> times;
  std::vector<double> area;
  std::vector<double> tv;
  std::vector<double> entropy_grid;
  std::vector<std::vector<double>> entropy;  // [time][k]
  std::map<std::string, std::size_t> event_counts;

  std::size_t size() const { return times.size(); }
  void count_events(const EventLog& log);
  void write_csv(std::ostream& out) const;
  void write_json(std::ostream& out) const;
};

// 17 equally spaced k over the value range of the field widened by 10% on each side.
std::vector<double> default_entropy_grid(const ParticleField& field, std::size_t count = 17);

void record(const ParticleField& field, DiagnosticsSeries& series);

// Gridded data: cell averages around the xs (cells end halfway to the neighbors) or
// point values joined linearly.
struct GridFunction {
  enum class Convention { cell_average, pointwise };

  std::vector<double> xs;
  std::vector<double> us;
  Convention convention = Convention::cell_average;

  GridFunction() = default;
  GridFunction(std::vector<double> xs_, std::vector<double> us_, Convention c);

  double x_min() const;
  double x_max() const;
  double value(double x) const;
  double integral(double a, double b) const;
  std::vector<double> breakpoints() const;
  void write_csv(std::ostream& out) const;

 private:
  double cell_edge(std::size_t k) const;  // k in [0, n]
};

// Anything with a support, pointwise values and exact integrals.
class Profile {
 public:
  virtual ~Profile() = default;
  virtual double x_min() const = 0;
  virtual double x_max() const = 0;
  virtual double value(double x) const = 0;
  virtual double integral(double a, double b) const = 0;
  virtual std::vector<double> breakpoints() const = 0;
};

class SolutionProfile : public Profile {
 public:
  explicit SolutionProfile(const PiecewiseSolution& s) : s_(s) {}
  double x_min() const override { return s_.x_min(); }
  double x_max() const override { return s_.x_max(); }
  double value(double x) const override { return s_.value(x); }
  double integral(double a, double b) const override { return s_.integral(a, b); }
  std::vector<double> breakpoints() const override { return s_.breakpoints(); }

 private:
  const PiecewiseSolution& s_;
};

class GridProfile : public Profile {
 public:
  explicit GridProfile(const GridFunction& g) : g_(g) {}
  double x_min() const override { return g_.x_min(); }
  double x_max() const override { return g_.x_max(); }
  double value(double x) const override { return g_.value(x); }
  double integral(double a, double b) const override { return g_.integral(a, b); }
  std::vector<double> breakpoints() const override { return g_.breakpoints(); }

 private:
  const GridFunction& g_;
};

// A function given pointwise, smooth between the listed breakpoints; integrated by quadrature.
class FunctionProfile : public Profile {
 public:
  FunctionProfile(std::function<double(double)> fn, double lo, double hi, std::vector<double> kinks = {});
  double x_min() const override { return lo_; }
  double x_max() const override { return hi_; }
  double value(double x) const override { return fn_(x); }
  double integral(double a, double b) const override;
  std::vector<double> breakpoints() const override;

 private:
  std::function<double(double)> fn_;
  double lo_;
  double hi_;
  std::vector<double> kinks_;
};

// Integral of |a - b| over the common support. Throws DomainError if the supports are disjoint.
double l1_error(const Profile& a, const Profile& b);
double l1_error(const ParticleField& field, const GridFunction& ref);
double l1_error(const PiecewiseSolution& solution, const GridFunction& ref);
double l1_error(const PiecewiseSolution& a, const PiecewiseSolution& b);

// Least-squares slope of log(error) against log(h).
double fit_slope(const std::vector<double>& h, const std::vector<double>& error);

}  // namespace cpm
