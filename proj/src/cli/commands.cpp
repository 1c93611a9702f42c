#include "cpm/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "cpm/cli/config.hpp"
#include "cpm/dynamics.hpp"
#include "cpm/errors.hpp"
#include "cpm/interpolation.hpp"
#include "cpm/io.hpp"

namespace cpm::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Loaded {
  json config;
  RunConfig run;
};

Loaded load(const CommandOptions& opts) {
  Loaded l;
  l.config = load_config(opts.config);
  for (const auto& o : opts.overrides) apply_override(l.config, o);
  l.run = run_config_from(l.config);
  return l;
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw ConfigError("cannot create output directory " + dir.string());
  }
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

void write_json_file(const fs::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

std::string time_tag(double t) { return io::format_double(t); }

template <class Body>
int guarded(const CommandOptions& opts, std::ostream& log, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    log << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const json::exception& e) {
    log << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const RunError& e) {
    const fs::path path = opts.out_dir / "events.jsonl";
    std::ofstream out(path);
    if (out) e.log().write_jsonl(out);
    log << "solver error: " << e.what() << "\nevent log: " << path.string() << '\n';
    return kFailure;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kFailure;
  }
}

std::vector<double> times_or_outputs(const json& times, const RunConfig& run) {
  auto ts = times.get<std::vector<double>>();
  if (ts.empty()) ts = run.output_times;
  if (ts.empty()) ts = {run.t_end};
  std::sort(ts.begin(), ts.end());
  return ts;
}

}  // namespace

int cmd_run(const CommandOptions& opts, std::ostream& log) {
  return guarded(opts, log, [&] {
    const Loaded l = load(opts);
    prepare_dir(opts.out_dir);
    write_json_file(opts.out_dir / "effective_config.json", l.config);

    const RunResult r = run(l.run);
    const auto points = l.config.at("curve_points").get<std::size_t>();

    {
      auto out = open_out(opts.out_dir / "snapshots.csv");
      write_snapshot_header(out);
      for (const auto& s : r.snapshots) write_snapshot_rows(out, s);
    }
    for (std::size_t k = 0; k < r.snapshots.size(); ++k) {
      const auto& s = r.snapshots[k];
      auto out = open_out(opts.out_dir / ("curve_t" + time_tag(s.t) + ".csv"));
      out << "x,u\n";
      for (const auto& p : sample_curve(s, std::max<std::size_t>(points, 2))) {
        out << io::format_double(p.x) << ',' << io::format_double(p.u) << '\n';
      }
      if (k < r.postprocessed.size()) {
        auto pp = open_out(opts.out_dir / ("postprocessed_t" + time_tag(s.t) + ".csv"));
        pp << "x,u\n";
        for (const auto& n : r.postprocessed[k].solution.nodes()) {
          pp << io::format_double(n.x) << ',' << io::format_double(n.u) << '\n';
        }
        for (const auto& w : r.postprocessed[k].warnings) log << "warning (t=" << s.t << "): " << w << '\n';
      }
    }
    {
      auto out = open_out(opts.out_dir / "diagnostics.csv");
      r.diagnostics.write_csv(out);
    }
    {
      auto out = open_out(opts.out_dir / "diagnostics.json");
      r.diagnostics.write_json(out);
    }
    {
      auto out = open_out(opts.out_dir / "events.jsonl");
      r.events.write_jsonl(out);
    }
    log << "run finished at t=" << r.final_field.t << " (" << r.stop_reason << "), "
        << r.collision_events << " collision events, " << r.final_field.size() << " particles\n";
    return static_cast<int>(kSuccess);
  });
}

int cmd_converge(const CommandOptions& opts, std::ostream& log) {
  return guarded(opts, log, [&] {
    const Loaded l = load(opts);
    const json& cc = l.config.at("converge");
    auto hs = cc.at("resolutions").get<std::vector<double>>();
    if (hs.size() < 3) throw ConfigError("converge.resolutions needs at least 3 values of h");
    std::sort(hs.begin(), hs.end(), std::greater<>());
    const std::vector<double> times = times_or_outputs(cc.at("times"), l.run);
    prepare_dir(opts.out_dir);
    write_json_file(opts.out_dir / "effective_config.json", l.config);

    const double length = l.run.ic.domain.length();
    auto config_for = [&](double h) {
      RunConfig c = l.run;
      c.n = static_cast<std::size_t>(std::llround(length / h)) + 1;
      c.output_times = times;
      c.t_end = times.back();
      c.postprocess = true;
      return c;
    };

    std::vector<std::future<RunResult>> jobs;
    for (double h : hs) {
      jobs.push_back(std::async(std::launch::async, [c = config_for(h)] { return run(c); }));
    }

    const std::string reference = cc.at("reference").get<std::string>();
    std::vector<PiecewiseSolution> particle_ref;
    std::vector<GridFunction> fv_ref;
    if (reference == "particle") {
      const double h_ref = hs.back() / cc.at("reference_factor").get<double>();
      const RunResult ref = run(config_for(h_ref));
      for (const auto& p : ref.postprocessed) particle_ref.push_back(p.solution);
    } else if (reference == "fv") {
      json fv_spec{{"cells", cc.at("fv_cells")}, {"cfl", cc.at("fv_cfl")}};
      const FvConfig fv = fv_config_from(fv_spec, l.run.ic.domain);
      fv_ref = fv_solve(l.run.ic, *resolve_flux(l.run), fv, times);
    } else {
      throw ConfigError("converge.reference must be 'particle' or 'fv'");
    }

    auto errors_csv = open_out(opts.out_dir / "errors.csv");
    errors_csv << "h,t,raw_error,postprocessed_error\n";
    std::vector<std::vector<double>> raw(times.size());
    std::vector<std::vector<double>> post(times.size());
    for (std::size_t j = 0; j < hs.size(); ++j) {
      const RunResult r = jobs[j].get();
      for (std::size_t k = 0; k < times.size(); ++k) {
        const auto field_solution = PiecewiseSolution::from_field(r.snapshots[k]);
        const auto& pp = r.postprocessed[k].solution;
        double e_raw = 0.0;
        double e_pp = 0.0;
        if (!particle_ref.empty()) {
          e_raw = l1_error(field_solution, particle_ref[k]);
          e_pp = l1_error(pp, particle_ref[k]);
        } else {
          e_raw = l1_error(field_solution, fv_ref[k]);
          e_pp = l1_error(pp, fv_ref[k]);
        }
        raw[k].push_back(e_raw);
        post[k].push_back(e_pp);
        errors_csv << io::format_double(hs[j]) << ',' << io::format_double(times[k]) << ','
                   << io::format_double(e_raw) << ',' << io::format_double(e_pp) << '\n';
      }
    }

    // slopes over the three finest resolutions
    const std::vector<double> fine_h(hs.end() - 3, hs.end());
    auto slopes_csv = open_out(opts.out_dir / "slopes.csv");
    slopes_csv << "t,raw_slope,postprocessed_slope\n";
    json slopes = json::array();
    for (std::size_t k = 0; k < times.size(); ++k) {
      const double s_raw = fit_slope(fine_h, {raw[k].end() - 3, raw[k].end()});
      const double s_pp = fit_slope(fine_h, {post[k].end() - 3, post[k].end()});
      slopes_csv << io::format_double(times[k]) << ',' << io::format_double(s_raw) << ','
                 << io::format_double(s_pp) << '\n';
      slopes.push_back({{"t", times[k]}, {"raw_slope", s_raw}, {"postprocessed_slope", s_pp}});
      log << "t=" << times[k] << ": slope " << s_raw << " raw, " << s_pp << " postprocessed\n";
    }
    write_json_file(opts.out_dir / "slopes.json", slopes);
    return static_cast<int>(kSuccess);
  });
}

int cmd_compare(const CommandOptions& opts, std::ostream& log) {
  return guarded(opts, log, [&] {
    const Loaded l = load(opts);
    const json& cc = l.config.at("compare");
    const std::vector<double> times = times_or_outputs(cc.at("times"), l.run);
    prepare_dir(opts.out_dir);
    write_json_file(opts.out_dir / "effective_config.json", l.config);

    RunConfig particle = l.run;
    particle.output_times = times;
    particle.t_end = times.back();
    const RunResult r = run(particle);

    const auto flux = resolve_flux(l.run);
    const FvConfig coarse = fv_config_from(cc.at("fv"), l.run.ic.domain);
    const FvConfig fine = fv_config_from(cc.at("reference"), l.run.ic.domain);
    const auto coarse_sol = fv_solve(l.run.ic, *flux, coarse, times);
    const auto fine_sol = fv_solve(l.run.ic, *flux, fine, times);

    auto out = open_out(opts.out_dir / "compare.csv");
    out << "t,particles,particle_error,fv_cells,fv_error\n";
    for (std::size_t k = 0; k < times.size(); ++k) {
      const PiecewiseSolution sol = particle.postprocess ? r.postprocessed[k].solution
                                                         : PiecewiseSolution::from_field(r.snapshots[k]);
      const double e_particle = l1_error(sol, fine_sol[k]);
      const double e_fv = l1_error(GridProfile(coarse_sol[k]), GridProfile(fine_sol[k]));
      out << io::format_double(times[k]) << ',' << r.snapshots[k].size() << ','
          << io::format_double(e_particle) << ',' << coarse.cells << ',' << io::format_double(e_fv)
          << '\n';
      log << "t=" << times[k] << ": particle " << e_particle << " (" << r.snapshots[k].size()
          << " particles), finite volume " << e_fv << " (" << coarse.cells << " cells)\n";
    }
    return static_cast<int>(kSuccess);
  });
}

namespace {

struct Audit {
  json violations = json::array();
  json flags = json::array();
  std::size_t merges = 0;
  std::size_t inserts = 0;
  std::size_t inflection_merges = 0;

  void violation(const std::string& kind, double t, const std::string& detail) {
    violations.push_back({{"kind", kind}, {"t", t}, {"detail", detail}});
  }
};

void check_averages(const FluxModel& flux, double lo, double hi, std::uint64_t seed, Audit& audit) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pick(lo, hi);
  for (int trial = 0; trial < 200; ++trial) {
    double u1 = pick(rng);
    double u2 = pick(rng);
    if (u1 == u2 || flux.straddles_inflection(u1, u2)) continue;
    const double a12 = flux.average(u1, u2);
    const double a21 = flux.average(u2, u1);
    if (std::abs(a12 - a21) > 1e-12 * std::max(1.0, std::abs(a12))) {
      audit.violation("average_symmetry", 0.0, "a(u1,u2) != a(u2,u1)");
    }
    if (!(a12 > std::min(u1, u2) && a12 < std::max(u1, u2)) && std::abs(u1 - u2) > 1e-8) {
      audit.violation("average_mean", 0.0, "a(u1,u2) not strictly between u1 and u2");
    }
    const double u3 = u2 + 0.25 * (u2 - u1);
    if (!flux.straddles_inflection(u1, u3) && flux.admissible().contains(u3)) {
      const double a13 = flux.average(u1, u3);
      if ((u3 > u2 && a13 < a12) || (u3 < u2 && a13 > a12)) {
        audit.violation("average_monotone", 0.0, "a(u1, .) not monotone");
      }
    }
  }
}

void check_interpolant(const ParticleField& field, Audit& audit) {
  const FluxModel& f = *field.flux;
  for (std::size_t i = 0; i + 1 < field.size(); ++i) {
    const Segment before(field[i], field[i + 1], f);
    if (before.constant() || !(before.length() > 0.0)) continue;
    ParticleField pair;
    pair.flux = field.flux;
    pair.d_max = field.d_max;
    pair.d_min = field.d_min;
    pair.particles = {field[i], field[i + 1]};
    const auto horizon = next_event(pair);
    const double dt = std::min(0.1, 0.5 * horizon.dt_s);
    advance(pair, dt);
    const Segment after(pair[0], pair[1], f);
    for (int k = 1; k < 4; ++k) {
      const double u = before.left.u + (before.right.u - before.left.u) * k / 4.0;
      const double expected = x_of_u(before, u) + f.df(u) * dt;
      const double got = x_of_u(after, u);
      if (std::abs(got - expected) > 1e-12 * std::max(1.0, std::abs(expected))) {
        audit.violation("interpolant_pde", field.t, "segment " + std::to_string(i));
      }
    }
  }
}

}  // namespace

int cmd_validate(const CommandOptions& opts, std::ostream& log) {
  return guarded(opts, log, [&] {
    const Loaded l = load(opts);
    prepare_dir(opts.out_dir);
    Audit audit;

    const auto flux = resolve_flux(l.run);
    const double h = l.run.ic.domain.length() / static_cast<double>(l.run.n - 1);
    const ParticleField initial = sample_initial(l.run.ic, l.run.n, flux, l.run.d_max_factor * h, l.run.d_min);
    const std::vector<double> grid = default_entropy_grid(initial);
    if (!initial.empty()) {
      const auto [lo, hi] = std::minmax_element(initial.particles.begin(), initial.particles.end(),
                                                [](const Particle& a, const Particle& b) { return a.u < b.u; });
      if (hi->u > lo->u) check_averages(*flux, lo->u, hi->u, l.run.seed, audit);
      check_interpolant(initial, audit);
    }
    for (const auto& v : validate(initial)) {
      audit.violation(std::string("field_") + to_string(v.kind), 0.0, v.message);
    }

    double area = 0.0;
    double tv = 0.0;
    std::vector<double> entropy;
    const auto measure = [&](const ParticleField& f) {
      area = total_area(f);
      tv = total_variation(f);
      entropy.clear();
      for (double k : grid) entropy.push_back(kruzkov_entropy(f, k));
    };
    RunHooks hooks;
    hooks.management.before_merge = [&](const ParticleField& f, std::size_t) { measure(f); };
    double last_area = total_area(initial);
    const double scale = std::max(std::abs(last_area), kruzkov_entropy(initial, 0.0));
    hooks.management.before_pass = [&](const ParticleField& f) { last_area = total_area(f); };
    hooks.management.after_event = [&](const ParticleField& f, const Event& e) {
      const double now = total_area(f);
      if (std::abs(now - last_area) > 1e-12 * std::max(scale, 1e-300)) {
        std::ostringstream d;
        d << to_string(e.type) << " changed the area by " << now - last_area;
        audit.violation("conservation", f.t, d.str());
      }
      last_area = now;
      if (e.type == Event::Type::insert) ++audit.inserts;
      if (e.type == Event::Type::inflection_merge) ++audit.inflection_merges;
      if (e.type != Event::Type::merge) return;
      ++audit.merges;
      if (e.tv_safe && total_variation(f) > tv + 1e-12) {
        audit.violation("tvd", f.t, "total variation increased across a merge");
      }
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const double after = kruzkov_entropy(f, grid[k]);
        if (after <= entropy[k] + 1e-10) continue;
        std::ostringstream d;
        d << "entropy for k=" << grid[k] << " rose by " << after - entropy[k];
        if (e.entropy_safe) {
          audit.violation("entropy", f.t, d.str());
        } else {
          audit.flags.push_back({{"kind", "entropy_increase"}, {"t", f.t}, {"detail", d.str()}});
        }
      }
    };

    std::string stop = "not run";
    try {
      const RunResult r = run(l.run, &hooks);
      stop = r.stop_reason;
    } catch (const RunError& e) {
      audit.violation("solver_error", 0.0, e.what());
    }

    const bool passed = audit.violations.empty();
    json report{{"passed", passed},
                {"stop_reason", stop},
                {"merges", audit.merges},
                {"inserts", audit.inserts},
                {"inflection_merges", audit.inflection_merges},
                {"violations", audit.violations},
                {"flags", audit.flags}};
    write_json_file(opts.out_dir / "validate_report.json", report);
    log << (passed ? "validation passed" : "validation FAILED") << ": " << audit.violations.size()
        << " violations, " << audit.flags.size() << " flags, " << audit.merges << " merges\n";
    return static_cast<int>(passed ? kSuccess : kFailure);
  });
}

}  // namespace cpm::cli
