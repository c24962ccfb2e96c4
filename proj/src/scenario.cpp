#include "kickjt/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "kickjt/bifurcation.hpp"
#include "kickjt/error.hpp"
#include "kickjt/observables.hpp"

namespace kickjt {

namespace {

struct NamedCommand {
  Subcommand cmd;
  const char* name;
};

constexpr NamedCommand kCommands[] = {
    {Subcommand::CriticalCouplings, "critical-couplings"},
    {Subcommand::FixedPoints, "fixed-points"},
    {Subcommand::Portrait, "portrait"},
    {Subcommand::TrackPgs, "track-pgs"},
    {Subcommand::TrackPes, "track-pes"},
    {Subcommand::HusimiSection, "husimi-section"},
    {Subcommand::EntanglementCurves, "entanglement-curves"},
    {Subcommand::DetectionProb, "detection-prob"},
};

const char* branch_name(Branch b) { return b == Branch::Plus ? "plus" : "minus"; }

TrackOptions track_options(const ScenarioConfig& sc, std::vector<double> waypoints) {
  TrackOptions o;
  o.initial_step = sc.tracking.initial_step;
  o.max_step = sc.tracking.max_step;
  o.min_step = sc.tracking.min_step;
  o.waypoints = std::move(waypoints);
  return o;
}

// Eigenstate continued from lambda = 0; the returned path visits every target.
TrackedPath track_from_zero(const ScenarioConfig& sc, const QuantumState& seed, const std::vector<double>& targets) {
  const ValidatedConfig cfg = sc.validated();
  const double end = *std::max_element(targets.begin(), targets.end());
  if (end == 0.0) {
    // Nothing to continue: the seed is already an eigenstate of U(0).
    const FockBasis basis(cfg.truncation());
    const Eigen::VectorXcd u_seed = floquet_operator(cfg.with_lambda(0.0), basis).matrix * seed.amplitudes;
    const double leak_o = sector_leakage(seed, basis, Parity::O);
    TrackedPath path;
    path.sector = leak_o < 0.5 ? Parity::O : Parity::E;
    path.points.push_back({0.0, seed, std::arg(seed.amplitudes.dot(u_seed)), 0.0, 1.0, std::min(leak_o, 1.0 - leak_o)});
    return path;
  }
  return track_eigenstate(0.0, end, seed, cfg, track_options(sc, targets));
}

const TrackPoint& point_at(const TrackedPath& path, double lambda) {
  const TrackPoint* p = path.at(lambda);
  if (!p) throw Error("tracked path does not visit lambda = " + format_double(lambda));
  return *p;
}

ScenarioResult critical_couplings_scenario(const ScenarioConfig& sc) {
  const ValidatedConfig cfg = sc.validated();
  CsvTable t{{"branch", "lambda_b"}, {}};
  std::ostringstream out;
  out << "branch  lambda_b\n";
  for (const auto& c : critical_couplings(cfg.omega(), cfg.delta())) {
    t.add_row({std::string(branch_name(c.branch)), c.value});
    out << branch_name(c.branch) << "    " << format_double(c.value) << '\n';
  }
  if (t.rows.empty()) out << "(no real positive critical coupling)\n";
  return {{{"critical_couplings.csv", std::move(t)}}, out.str()};
}

ScenarioResult fixed_points_scenario(const ScenarioConfig& sc) {
  const ValidatedConfig cfg = sc.validated();
  CsvTable t{{"lambda", "branch_id", "q_x", "p_x", "q_y", "p_y", "s_x", "s_y", "s_z", "classification",
              "hyperbolic_pairs", "krein_definite", "max_multiplier_modulus", "residual"},
             {}};
  std::ostringstream out;
  for (const auto& row : branch_scan(cfg, sc.lambdas)) {
    out << "lambda " << format_double(row.lambda) << ": " << row.points.size() << " fixed points\n";
    for (const auto& bp : row.points) {
      const auto& f = bp.fixed_point;
      const auto& o = f.point.osc;
      const auto& s = f.point.spin;
      t.add_row({row.lambda, static_cast<long long>(bp.branch_id), o.qx, o.px, o.qy, o.py, s.x, s.y, s.z,
                 std::string(to_string(f.classification)), static_cast<long long>(f.hyperbolic_pairs),
                 static_cast<long long>(f.krein_definite ? 1 : 0), f.multiplier_moduli.back(), f.residual});
    }
  }
  return {{{"fixed_points.csv", std::move(t)}}, out.str()};
}

ScenarioResult portrait_scenario(const ScenarioConfig& sc) {
  const ValidatedConfig base = sc.validated();
  PortraitGrid grid;
  grid.extent = sc.portrait.extent;
  grid.points_per_axis = static_cast<std::size_t>(sc.portrait.points_per_axis);
  grid.p_slope = sc.portrait.p_slope;
  grid.spin = SpinVector::from_angles(sc.portrait.spin_theta, sc.portrait.spin_phi);
  ScenarioResult r;
  for (double lambda : sc.lambdas) {
    CsvTable t{{"lambda", "q_x", "q_y"}, {}};
    const auto cloud = portrait(base.with_lambda(lambda), grid, static_cast<std::size_t>(sc.portrait.iterations));
    t.rows.reserve(cloud.size());
    for (const auto& p : cloud) t.rows.push_back({lambda, p.qx, p.qy});
    r.summary += "portrait lambda " + format_double(lambda) + ": " + std::to_string(cloud.size()) + " points\n";
    r.files.push_back({"portrait_lambda_" + format_double(lambda) + ".csv", std::move(t)});
  }
  return r;
}

ScenarioResult track_scenario(const ScenarioConfig& sc, bool excited) {
  const FockBasis basis(sc.numerics.truncation);
  const QuantumState seed = excited ? pes_seed(basis) : pgs_seed(basis);
  const TrackedPath path = track_from_zero(sc, seed, sc.lambdas);
  CsvTable t{{"lambda", "eigenphase", "sector_leakage", "delta_lambda", "overlap"}, {}};
  for (const auto& p : path.points) t.add_row({p.lambda, p.eigenphase, p.sector_leakage, p.delta_lambda, p.overlap});
  std::ostringstream out;
  out << (excited ? "PES" : "PGS") << " in sector " << to_string(path.sector) << ": " << path.points.size()
      << " accepted points, " << path.rejected_steps << " rejected steps\n";
  return {{{excited ? "track_pes.csv" : "track_pgs.csv", std::move(t)}}, out.str()};
}

std::optional<FixedPoint> stable_partner(const ValidatedConfig& cfg) {
  const auto seeds = default_seeds(cfg);
  const auto found = find_fixed_points(cfg, seeds);
  return bifurcated_fixed_point(found);
}

ScenarioResult husimi_scenario(const ScenarioConfig& sc) {
  const ValidatedConfig cfg = sc.validated();
  const FockBasis basis(cfg.truncation());
  const auto& h = sc.husimi;

  std::vector<double> targets = sc.lambdas;
  targets.push_back(h.plane_lambda);
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
  const TrackedPath pgs = track_from_zero(sc, pgs_seed(basis), targets);

  const SectionLine line = diagonal_section(cfg.omega());
  const auto ts = uniform_grid(h.section_min, h.section_max, static_cast<std::size_t>(h.section_points));
  CsvTable section{{"lambda", "q", "H"}, {}};
  std::ostringstream out;
  for (double lambda : sc.lambdas) {
    const HusimiGrid g = husimi_line(point_at(pgs, lambda).state, basis, line, ts);
    const auto peaks = find_peaks(g.u, g.values);
    out << "lambda " << format_double(lambda) << ": " << peaks.size() << " section peak(s)";
    for (const auto& p : peaks) out << " at q = " << format_double(p.position);
    out << '\n';
    for (std::size_t i = 0; i < ts.size(); ++i) section.add_row({lambda, ts[i], g.values[i]});
  }

  const TrackedPath pes = track_from_zero(sc, pes_seed(basis), {h.plane_lambda});
  const QuantumState& g = point_at(pgs, h.plane_lambda).state;
  const QuantumState& e = point_at(pes, h.plane_lambda).state;
  const auto partner = stable_partner(cfg.with_lambda(h.plane_lambda));
  QuantumState sup = partner ? localized_superposition(g, e, *partner, basis)
                             : QuantumState::normalized(g.amplitudes + e.amplitudes);
  const auto axis = uniform_grid(h.plane_min, h.plane_max, static_cast<std::size_t>(h.plane_points));
  const HusimiGrid plane = husimi_plane(sup, basis, symmetry_plane(cfg.omega()), axis, axis);
  CsvTable grid{{"q_x", "q_y", "H"}, {}};
  std::size_t best = 0;
  for (std::size_t k = 0; k < plane.values.size(); ++k) {
    grid.add_row({axis[k / axis.size()], axis[k % axis.size()], plane.values[k]});
    if (plane.values[k] > plane.values[best]) best = k;
  }
  out << "plane at lambda " << format_double(h.plane_lambda) << ": maximum at (q_x, q_y) = ("
      << format_double(axis[best / axis.size()]) << ", " << format_double(axis[best % axis.size()]) << ")";
  if (partner)
    out << ", stable fixed point at (" << format_double(partner->point.osc.qx) << ", "
        << format_double(partner->point.osc.qy) << ")";
  out << '\n';
  return {{{"husimi_section.csv", std::move(section)}, {"husimi_plane.csv", std::move(grid)}}, out.str()};
}

ScenarioResult entanglement_scenario(const ScenarioConfig& sc) {
  if (sc.lambdas.size() < 3)
    throw GridTooSmallError("entanglement-curves needs at least 3 lambda values for derivatives");
  const FockBasis basis(sc.numerics.truncation);
  const TrackedPath path = track_from_zero(sc, pgs_seed(basis), sc.lambdas);
  std::vector<QuantumState> states;
  for (double lambda : sc.lambdas) states.push_back(point_at(path, lambda).state);
  const auto m = entanglement_measures(states, basis);

  std::vector<CurvePoint> s_spin, s_osc, e_n;
  for (std::size_t i = 0; i < m.size(); ++i) {
    s_spin.push_back({sc.lambdas[i], m[i].s_spin});
    s_osc.push_back({sc.lambdas[i], m[i].s_osc_x});
    e_n.push_back({sc.lambdas[i], m[i].log_negativity});
  }
  const auto d_spin = curve_derivative(s_spin);
  const auto d_osc = curve_derivative(s_osc);
  const auto d_en = curve_derivative(e_n);

  CsvTable t{{"lambda", "S_spin", "S_osc_x", "E_N", "dS_spin", "dS_osc_x", "dE_N"}, {}};
  for (std::size_t i = 0; i < m.size(); ++i)
    t.add_row({sc.lambdas[i], m[i].s_spin, m[i].s_osc_x, m[i].log_negativity, d_spin[i].value, d_osc[i].value,
               d_en[i].value});

  std::ostringstream out;
  auto argmax = [](const std::vector<CurvePoint>& d) {
    return std::max_element(d.begin(), d.end(), [](const CurvePoint& a, const CurvePoint& b) {
             return std::abs(a.value) < std::abs(b.value);
           })->lambda;
  };
  out << "largest |derivative| at lambda: S_spin " << format_double(argmax(d_spin)) << ", S_osc_x "
      << format_double(argmax(d_osc)) << ", E_N " << format_double(argmax(d_en)) << '\n';
  return {{{"entanglement_curves.csv", std::move(t)}}, out.str()};
}

ScenarioResult detection_scenario(const ScenarioConfig& sc) {
  const ValidatedConfig base = sc.validated();
  CsvTable t{{"lambda", "theta", "alpha_x", "alpha_y", "P_plus"}, {}};
  std::vector<std::vector<std::vector<CsvCell>>> rows(sc.lambdas.size());
  for_each_index(Exec::Parallel, sc.lambdas.size(), [&](std::size_t i) {
    const double lambda = sc.lambdas[i];
    const ValidatedConfig cfg = base.with_lambda(lambda);
    const auto seeds = default_seeds(cfg);
    const auto found = find_fixed_points(cfg, seeds, Exec::Serial);
    for (const auto& f : found.points) {
      if (f.classification != Stability::Stable || f.point.osc.qx < 0.0) continue;
      const double theta = SpinDirection::from_vector(f.point.spin).theta;
      const double ax = std::abs(coherent_alpha(f.point.osc.qx, f.point.osc.px));
      const double ay = std::abs(coherent_alpha(f.point.osc.qy, f.point.osc.py));
      rows[i].push_back({lambda, theta, ax, ay, detection_probability(theta, ax, ay)});
    }
  });
  for (auto& per_lambda : rows)
    for (auto& r : per_lambda) t.add_row(std::move(r));
  return {{{"detection_prob.csv", std::move(t)}}, std::to_string(t.rows.size()) + " stable fixed points\n"};
}

}  // namespace

std::optional<FixedPoint> bifurcated_fixed_point(const FixedPointSearch& search) {
  std::optional<FixedPoint> best;
  for (const auto& f : search.points) {
    const auto& o = f.point.osc;
    if (f.classification != Stability::Stable || std::hypot(o.qx, o.qy) < 1e-8) continue;
    if (!best || o.qx + o.qy > best->point.osc.qx + best->point.osc.qy) best = f;
  }
  return best;
}

std::optional<Subcommand> parse_subcommand(std::string_view name) {
  for (const auto& c : kCommands)
    if (name == c.name) return c.cmd;
  return std::nullopt;
}

const char* to_string(Subcommand s) {
  for (const auto& c : kCommands)
    if (c.cmd == s) return c.name;
  return "?";
}

const std::vector<Subcommand>& all_subcommands() {
  static const std::vector<Subcommand> all = [] {
    std::vector<Subcommand> v;
    for (const auto& c : kCommands) v.push_back(c.cmd);
    return v;
  }();
  return all;
}

ScenarioResult run_scenario(Subcommand cmd, const ScenarioConfig& cfg) {
  switch (cmd) {
    case Subcommand::CriticalCouplings: return critical_couplings_scenario(cfg);
    case Subcommand::FixedPoints: return fixed_points_scenario(cfg);
    case Subcommand::Portrait: return portrait_scenario(cfg);
    case Subcommand::TrackPgs: return track_scenario(cfg, false);
    case Subcommand::TrackPes: return track_scenario(cfg, true);
    case Subcommand::HusimiSection: return husimi_scenario(cfg);
    case Subcommand::EntanglementCurves: return entanglement_scenario(cfg);
    case Subcommand::DetectionProb: return detection_scenario(cfg);
  }
  throw Error("unknown subcommand");
}

void write_outputs(const ScenarioResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& f : result.files) write_file_atomic(dir / f.name, f.table.render());
}

double DeviationReport::max_relative() const {
  double m = 0.0;
  for (const auto& e : entries) m = std::max(m, e.max_relative);
  return m;
}

std::string DeviationReport::render() const {
  std::ostringstream out;
  out << "truncation check (max relative deviation per column)\n";
  for (const auto& e : entries)
    out << "  " << e.file << ':' << e.column << "  " << format_double(e.max_relative) << "  (" << e.compared
        << " cells)\n";
  out << "overall " << format_double(max_relative()) << '\n';
  return out.str();
}

namespace {

double relative_deviation(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  if (scale < 1e-12) return 0.0;
  return std::abs(a - b) / scale;
}

std::string key_of(const CsvCell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

}  // namespace

DeviationReport compare_results(const ScenarioResult& base, const ScenarioResult& other) {
  DeviationReport report;
  for (const auto& f : base.files) {
    const auto it = std::find_if(other.files.begin(), other.files.end(),
                                 [&](const OutputFile& o) { return o.name == f.name; });
    if (it == other.files.end() || it->table.header != f.table.header) continue;

    std::map<std::string, std::vector<const std::vector<CsvCell>*>> index;
    for (const auto& row : it->table.rows) index[key_of(row.front())].push_back(&row);
    std::map<std::string, std::size_t> used;

    std::vector<DeviationReport::Entry> cols(f.table.header.size());
    for (std::size_t c = 0; c < cols.size(); ++c) cols[c] = {f.name, f.table.header[c], 0.0, 0};
    for (const auto& row : f.table.rows) {
      const std::string key = key_of(row.front());
      auto& candidates = index[key];
      const std::size_t k = used[key]++;
      if (k >= candidates.size()) continue;
      const auto& match = *candidates[k];
      for (std::size_t c = 1; c < row.size(); ++c) {
        const auto* a = std::get_if<double>(&row[c]);
        const auto* b = std::get_if<double>(&match[c]);
        if (!a || !b) continue;
        cols[c].max_relative = std::max(cols[c].max_relative, relative_deviation(*a, *b));
        ++cols[c].compared;
      }
    }
    for (std::size_t c = 1; c < cols.size(); ++c)
      if (cols[c].compared) report.entries.push_back(cols[c]);
  }
  return report;
}

}  // namespace kickjt
