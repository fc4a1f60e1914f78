#pragma once

// Command-line front end. Kept in a header so the tests can drive run()
// with their own streams.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "vswitch/vswitch.hpp"

namespace vswitch::cli {

using nlohmann::ordered_json;

struct Settings {
  double e = 1.0;
  double m = 1.0;
  double z = 1.0;
  std::string variant = "plateau";
  std::optional<double> tau1;
  std::optional<double> tau2;
  std::optional<double> tau;
  std::string mode = "drop";
  std::string component = "z";
  std::optional<double> rho;
  std::string axis = "tau2";
  std::vector<std::string> grid;
  std::string format;
  std::optional<double> tolerance;
};

/// One fully resolved evaluation point.
struct Point {
  ProbeConfig probe;
  SwitchingSpec spec;
  Regularization mode = Regularization::DropDivergence;
  KernelComponent component = KernelComponent::ZZ;
  std::optional<double> rho;
};

struct PointResult {
  DispersionBreakdown d;
  /// False when only the oracle total is available (x/y off the closed forms).
  bool split = true;
  RegularizedValue whole;
  double total_drop = 0.0;
  double total_compton = 0.0;
  std::string source;
  double fit_residual = 0.0;
  std::optional<RegimeCase> regime;
  std::vector<Bracket> brackets;
  /// True when a reported estimate carries an unpinned O(1) factor.
  bool estimate = false;
  ValidityReport validity;
};

inline Error config_error(const std::string& what) { return Error(ErrorCode::ConfigError, what); }

inline Regularization parse_mode(const std::string& s) {
  if (s == "drop") return Regularization::DropDivergence;
  if (s == "compton") return Regularization::ComptonCutoff;
  throw config_error("mode must be drop or compton, got '" + s + "'");
}

inline KernelComponent parse_component(const std::string& s) {
  if (s == "z") return KernelComponent::ZZ;
  if (s == "xy" || s == "x" || s == "y") return KernelComponent::XX;
  throw config_error("component must be z or xy, got '" + s + "'");
}

inline std::string_view mode_name(Regularization m) {
  return m == Regularization::DropDivergence ? "drop" : "compton";
}

inline std::string_view component_name(KernelComponent c) { return c == KernelComponent::ZZ ? "z" : "xy"; }

inline void load_config(const std::string& path, Settings& s) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw config_error(std::string("bad config: ") + ex.what());
  }
  if (!j.is_object()) throw config_error("config must be a JSON object");
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& k = it.key();
      const auto& v = it.value();
      if (k == "e") s.e = v.get<double>();
      else if (k == "m") s.m = v.get<double>();
      else if (k == "z") s.z = v.get<double>();
      else if (k == "variant") s.variant = v.get<std::string>();
      else if (k == "tau1") s.tau1 = v.get<double>();
      else if (k == "tau2") s.tau2 = v.get<double>();
      else if (k == "tau") s.tau = v.get<double>();
      else if (k == "mode") s.mode = v.get<std::string>();
      else if (k == "component") s.component = v.get<std::string>();
      else if (k == "rho") s.rho = v.get<double>();
      else if (k == "axis") s.axis = v.get<std::string>();
      else if (k == "grid") s.grid = {v.get<std::string>()};
      else throw config_error("unknown config key '" + k + "'");
    }
  } catch (const nlohmann::json::exception& ex) {
    throw config_error(std::string("bad config value: ") + ex.what());
  }
}

inline Point resolve(const Settings& s) {
  Point p;
  p.probe = {s.e, s.m, s.z};
  p.mode = parse_mode(s.mode);
  p.component = parse_component(s.component);
  p.rho = s.rho;
  const auto v = parse_variant(s.variant);
  if (!v) throw config_error("unknown variant '" + s.variant + "'");
  if (*v == Variant::Lorentzian) {
    double scale = 0.0;
    if (s.tau) scale = *s.tau;
    else if (s.tau2) scale = *s.tau2 / pi;
    else throw config_error("lorentzian needs --tau (or tau2 = pi tau)");
    p.spec = SwitchingSpec::lorentzian(scale);
  } else {
    const std::optional<double> t1 = s.tau1 ? s.tau1 : s.tau;
    if (!t1) throw config_error("tau1 is required");
    p.spec = {*v, *t1, *v == Variant::Step ? 0.0 : s.tau2.value_or(0.0)};
  }
  if (p.rho && !(*p.rho > 0.0)) throw config_error("rho must be positive");
  if (p.spec.variant == Variant::LorentzPlateau && p.spec.tau2 == 0.0) {
    // Sudden limit of the plateau family; checked as the step it equals.
    validate(p.probe, SwitchingSpec::step(p.spec.tau1));
  } else {
    validate(p.probe, p.spec);
  }
  return p;
}

/// Whether the light-cone poles of the kernel meet the support of F x F.
inline bool singular_point(const Point& p) {
  if (p.spec.variant == Variant::Step) return p.spec.tau1 > 2.0 * p.probe.distance_z;
  return true;
}

inline PointResult evaluate_point(const Point& p) {
  PointResult r;
  const SwitchingSpec& sp = p.spec;
  const double tref = sp.reference_time();
  const auto zero = RegularizedValue::regular(0.0);
  const WeightedKernel k(p.component, p.probe);
  auto set_terms = [&](RegularizedValue m, RegularizedValue s, RegularizedValue ms) {
    r.d.m_term = m;
    r.d.s_term = s;
    r.d.ms_term = ms;
    r.whole = m + s + ms;
  };
  switch (sp.variant) {
    case Variant::Step:
      if (sp.tau1 == 2.0 * p.probe.distance_z) {
        throw Error(ErrorCode::LightConeCoincidence, "tau1 = 2z");
      }
      set_terms(integral_M(k, sp.tau1), zero, zero);
      r.source = "pipeline";
      break;
    case Variant::Lorentzian: {
      const double tau = sp.lorentzian_scale();
      const double v = p.component == KernelComponent::ZZ ? dvz_lorentzian(p.probe, tau)
                                                          : dvxy_lorentzian(p.probe, tau);
      set_terms(zero, RegularizedValue::regular(v), zero);
      r.source = "closed-form";
      break;
    }
    default:
      if (p.component == KernelComponent::ZZ) {
        const DispersionBreakdown d =
            sp.variant == Variant::LorentzPlateau
                ? dvz_plateau_any(p.probe, sp.tau1, sp.tau2, p.mode)
                : dvz_variant(sp.variant, p.probe, sp.tau1, sp.tau2, p.mode);
        set_terms(d.m_term, d.s_term, d.ms_term);
        r.source = "pipeline";
      } else {
        const LaurentFit f = fit_regularized(sp, k, fit_rhos(sp, k));
        r.split = false;
        set_terms(zero, zero, zero);
        r.whole = f.value;
        r.fit_residual = f.residual;
        r.source = "oracle-fit";
      }
  }
  r.d.mode = p.mode;
  r.d.component = p.component == KernelComponent::ZZ ? Component::Z : Component::X;
  r.total_drop = evaluate(r.whole, Regularization::DropDivergence);
  r.total_compton = evaluate(r.whole, Regularization::ComptonCutoff, p.probe.mass_m, tref);
  r.d.total = p.mode == Regularization::DropDivergence ? r.total_drop : r.total_compton;

  if (sp.variant != Variant::Lorentzian) {
    r.regime = classify_regime(p.probe, sp.tau1, sp.tau2);
    if (sp.variant == Variant::LorentzPlateau && p.component == KernelComponent::ZZ) {
      DispersionBreakdown dd = r.d;
      dd.total = r.total_drop;
      r.brackets.push_back(regime_bracket(p.probe, sp.tau1, sp.tau2, dd));
      const CaseId c = r.regime->case_id;
      r.estimate = c == CaseId::III || c == CaseId::IV || c == CaseId::ShortS;
      if (sp.tau1 > 2.0 * p.probe.distance_z && sp.tau2 > 0.0) {
        r.brackets.push_back(ms_bracket(p.probe, sp.tau1, sp.tau2, dd));
        r.estimate = true;
      }
    }
  }
  r.validity = validity_check(p.probe, sp.tau1, sp.tau2, r.total_drop);
  return r;
}

inline std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline ordered_json term_json(const RegularizedValue& v) {
  return {{"pole", v.pole_coeff}, {"finite", v.finite_part}};
}

inline ordered_json result_json(const Point& p, const PointResult& r) {
  ordered_json j;
  j["variant"] = std::string(to_string(p.spec.variant));
  j["component"] = std::string(component_name(p.component));
  j["mode"] = std::string(mode_name(p.mode));
  j["e"] = p.probe.charge_e;
  j["m"] = p.probe.mass_m;
  j["z"] = p.probe.distance_z;
  j["tau1"] = p.spec.tau1;
  j["tau2"] = p.spec.tau2;
  j["mu"] = p.spec.mu();
  j["source"] = r.source;
  if (r.split) {
    j["m_term"] = term_json(r.d.m_term);
    j["s_term"] = term_json(r.d.s_term);
    j["ms_term"] = term_json(r.d.ms_term);
  } else {
    j["m_term"] = nullptr;
    j["s_term"] = nullptr;
    j["ms_term"] = nullptr;
    j["oracle"] = {{"pole", r.whole.pole_coeff},
                   {"finite", r.whole.finite_part},
                   {"fit_residual", r.fit_residual}};
  }
  j["total"] = r.d.total;
  j["total_drop"] = r.total_drop;
  j["total_compton"] = r.total_compton;
  if (p.rho) {
    j["at_rho"] = {{"rho", *p.rho}, {"value", r.whole.pole_coeff / *p.rho + r.whole.finite_part}};
  }
  if (r.regime) {
    j["regime"] = std::string(to_string(r.regime->case_id));
    j["regime_detail"] = {{"dominant", std::string(to_string(r.regime->dominant_term))},
                          {"sign", r.regime->sign == Sign::Positive ? "positive" : "negative"},
                          {"strict", r.regime->strict}};
  } else {
    j["regime"] = nullptr;
  }
  j["validity"] = {{"valid", r.validity.valid},
                   {"displacement", r.validity.displacement},
                   {"delta_t", r.validity.delta_t},
                   {"bound", r.validity.bound}};
  ordered_json est = ordered_json::array();
  for (const auto& b : r.brackets) {
    est.push_back({{"name", b.name},
                   {"estimate", b.estimate},
                   {"actual", b.actual},
                   {"fitted_o1", b.fitted_o1},
                   {"estimate_flag", true}});
  }
  j["estimates"] = est;
  j["estimate"] = r.estimate;
  return j;
}

inline const char* csv_header() {
  return "axis,value,variant,component,mode,m_pole,m_finite,s_pole,s_finite,ms_pole,ms_finite,"
         "total_drop,total_compton,regime,estimate,o1_fitted";
}

inline std::string csv_row(const std::string& axis, const std::string& value, const Point& p,
                           const PointResult& r) {
  std::ostringstream o;
  const RegularizedValue m = r.split ? r.d.m_term : r.whole;
  const RegularizedValue s = r.d.s_term;
  const RegularizedValue ms = r.d.ms_term;
  o << axis << ',' << value << ',' << to_string(p.spec.variant) << ','
    << component_name(p.component) << ',' << mode_name(p.mode) << ',' << num(m.pole_coeff) << ','
    << num(m.finite_part) << ',' << num(s.pole_coeff) << ',' << num(s.finite_part) << ','
    << num(ms.pole_coeff) << ',' << num(ms.finite_part) << ',' << num(r.total_drop) << ','
    << num(r.total_compton) << ',' << (r.regime ? to_string(r.regime->case_id) : "-") << ','
    << (r.estimate ? 1 : 0) << ',' << (r.brackets.empty() ? "" : num(r.brackets.front().fitted_o1));
  return o.str();
}

struct Grid {
  double start = 0.0;
  double stop = 0.0;
  int count = 0;
  std::vector<double> values() const {
    std::vector<double> v;
    for (int i = 0; i < count; ++i) {
      v.push_back(count == 1 ? start : start + (stop - start) * i / (count - 1));
    }
    return v;
  }
};

inline Grid parse_grid(const std::string& g) {
  Grid out;
  double a = 0.0;
  double b = 0.0;
  int n = 0;
  char tail = 0;
  if (std::sscanf(g.c_str(), "%lf:%lf:%d%c", &a, &b, &n, &tail) != 3) {
    throw config_error("grid must be start:stop:count, got '" + g + "'");
  }
  if (n <= 0) throw Error(ErrorCode::EmptyGrid, "grid '" + g + "' has no points");
  out = {a, b, n};
  return out;
}

inline void set_axis(Settings& s, const std::string& axis, double v) {
  if (axis == "tau1") s.tau1 = v;
  else if (axis == "tau2") s.tau2 = v;
  else if (axis == "z") s.z = v;
  else if (axis == "tau") s.tau = v;
  else throw config_error("axis must be tau1, tau2, tau or z, got '" + axis + "'");
}

/// Runs f(i) for i < n on at most VSWITCH_THREADS workers; results in order.
template <class F>
auto parallel_map(std::size_t n, const F& f) {
  using R = decltype(f(std::size_t{0}));
  std::vector<R> out(n);
  const std::size_t workers = std::min<std::size_t>(oracle_threads(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  for (std::size_t start = 0; start < n; start += workers) {
    std::vector<std::future<R>> jobs;
    const std::size_t stop = std::min(n, start + workers);
    for (std::size_t i = start; i < stop; ++i) jobs.push_back(std::async(std::launch::async, f, i));
    for (std::size_t i = start; i < stop; ++i) out[i] = jobs[i - start].get();
  }
  return out;
}

inline int cmd_compute(const Settings& s, std::ostream& out, std::ostream& err) {
  const Point p = resolve(s);
  const PointResult r = evaluate_point(p);
  if (s.format == "csv") {
    out << csv_header() << '\n' << csv_row("point", "", p, r) << '\n';
  } else {
    out << result_json(p, r).dump(2) << '\n';
  }
  err << to_string(p.spec.variant) << ' ' << component_name(p.component) << ": total "
      << num(r.d.total) << " (" << mode_name(p.mode) << ")";
  if (r.regime) err << ", regime " << to_string(r.regime->case_id);
  err << ", " << (r.validity.valid ? "valid" : "invalid") << '\n';
  return 0;
}

inline int cmd_sweep(const Settings& s, std::ostream& out) {
  if (s.grid.empty()) throw Error(ErrorCode::EmptyGrid, "sweep needs --grid");
  const std::vector<double> xs = parse_grid(s.grid.front()).values();
  {
    Settings probe = s;
    set_axis(probe, s.axis, xs.front());
  }
  struct Row {
    std::string text;
    ordered_json json;
  };
  auto rows = parallel_map(xs.size(), [&](std::size_t i) {
    Settings si = s;
    set_axis(si, s.axis, xs[i]);
    try {
      const Point p = resolve(si);
      const PointResult r = evaluate_point(p);
      ordered_json j = result_json(p, r);
      j["axis"] = s.axis;
      j["value"] = xs[i];
      return Row{csv_row(s.axis, num(xs[i]), p, r), j};
    } catch (const Error& ex) {
      // A bad grid point is reported in its row; the sweep goes on.
      const std::string label = "error:" + std::string(to_string(ex.code()));
      std::string t = s.axis + ',' + num(xs[i]) + ',' + s.variant + ',' + s.component + ',' + s.mode;
      for (int c = 0; c < 8; ++c) t += ",nan";
      t += ',' + label + ",0,";
      return Row{t, ordered_json{{"axis", s.axis}, {"value", xs[i]}, {"error", label}}};
    }
  });
  if (s.format == "json") {
    ordered_json a = ordered_json::array();
    for (auto& r : rows) a.push_back(std::move(r.json));
    out << a.dump(2) << '\n';
  } else {
    out << csv_header() << '\n';
    for (const auto& r : rows) out << r.text << '\n';
  }
  return 0;
}

inline int cmd_regime_map(const Settings& s, std::ostream& out) {
  if (s.grid.empty()) throw Error(ErrorCode::EmptyGrid, "regime-map needs --grid");
  std::vector<std::pair<double, double>> pts;
  Settings base = s;
  if (s.grid.size() >= 2) {
    for (double t1 : parse_grid(s.grid[0]).values()) {
      for (double t2 : parse_grid(s.grid[1]).values()) pts.push_back({t1, t2});
    }
  } else {
    for (double v : parse_grid(s.grid[0]).values()) {
      Settings si = s;
      set_axis(si, s.axis, v);
      if (!si.tau1) throw config_error("regime-map needs tau1");
      pts.push_back({*si.tau1, si.tau2.value_or(0.0)});
      base.z = si.z;
    }
  }
  out << "tau1,tau2,z,regime,dominant,sign,strict\n";
  for (const auto& [t1, t2] : pts) {
    const ProbeConfig probe{s.e, s.m, base.z};
    out << num(t1) << ',' << num(t2) << ',' << num(probe.distance_z) << ',';
    try {
      const RegimeCase c = classify_regime(probe, t1, t2);
      out << to_string(c.case_id) << ',' << to_string(c.dominant_term) << ','
          << (c.sign == Sign::Positive ? "positive" : "negative") << ',' << (c.strict ? 1 : 0);
    } catch (const Error& ex) {
      out << "error:" << to_string(ex.code()) << ",-,-,0";
    }
    out << '\n';
  }
  return 0;
}

struct CheckReport {
  std::string kind;
  std::optional<RegularizedValue> pipeline;
  RegularizedValue oracle;
  double fit_residual = 0.0;
  double discrepancy = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

inline double rel_diff(double a, double b) {
  if (a == b) return 0.0;
  return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

inline CheckReport run_check(const Point& p, std::optional<double> tolerance) {
  CheckReport c;
  const WeightedKernel k(p.component, p.probe);
  const bool singular = singular_point(p);
  c.kind = singular ? "singular" : "regular";
  c.tolerance = tolerance.value_or(singular ? 1e-2 : 1e-6);
  bool pole_known = true;
  const Variant v = p.spec.variant;
  if (v == Variant::Step) {
    c.pipeline = integral_M(k, p.spec.tau1);
  } else if (v == Variant::Lorentzian) {
    const double tau = p.spec.lorentzian_scale();
    c.pipeline = RegularizedValue::regular(p.component == KernelComponent::ZZ
                                               ? dvz_lorentzian(p.probe, tau)
                                               : dvxy_lorentzian(p.probe, tau));
    pole_known = false;
  } else if (p.component == KernelComponent::ZZ) {
    const DispersionBreakdown d =
        v == Variant::LorentzPlateau ? dvz_plateau_any(p.probe, p.spec.tau1, p.spec.tau2)
                                     : dvz_variant(v, p.probe, p.spec.tau1, p.spec.tau2);
    c.pipeline = d.m_term + d.s_term + d.ms_term;
  }
  if (singular) {
    const LaurentFit f = fit_regularized(p.spec, k, fit_rhos(p.spec, k));
    c.oracle = f.value;
    c.fit_residual = f.residual;
  } else {
    c.oracle = RegularizedValue::regular(brute_double_integral(p.spec, k, std::nullopt));
  }
  if (!c.pipeline) {
    c.kind += "/oracle-only";
    c.pass = true;
    return c;
  }
  c.discrepancy = rel_diff(c.pipeline->finite_part, c.oracle.finite_part);
  if (singular && pole_known) {
    c.discrepancy = std::max(c.discrepancy, rel_diff(c.pipeline->pole_coeff, c.oracle.pole_coeff));
  }
  c.pass = c.discrepancy <= c.tolerance && std::isfinite(c.discrepancy);
  if (c.tolerance == 0.0) c.pass = c.discrepancy == 0.0;
  return c;
}

inline int cmd_check(const Settings& s, std::ostream& out, std::ostream& err) {
  const Point p = resolve(s);
  const CheckReport c = run_check(p, s.tolerance);
  ordered_json j;
  j["variant"] = std::string(to_string(p.spec.variant));
  j["component"] = std::string(component_name(p.component));
  j["kind"] = c.kind;
  j["pipeline"] = c.pipeline ? term_json(*c.pipeline) : ordered_json(nullptr);
  j["oracle"] = term_json(c.oracle);
  j["fit_residual"] = c.fit_residual;
  j["discrepancy"] = c.discrepancy;
  j["tolerance"] = c.tolerance;
  j["verdict"] = c.pass ? "pass" : "fail";
  out << j.dump(2) << '\n';
  err << "check " << c.kind << ": discrepancy " << num(c.discrepancy) << " tolerance "
      << num(c.tolerance) << " -> " << (c.pass ? "PASS" : "FAIL") << '\n';
  return c.pass ? 0 : 1;
}

/// Exit codes: 0 ok, 1 failed check, 2 config error, 3 numeric error.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Velocity dispersion of a charged probe near a reflecting plane"};
  app.require_subcommand(1);
  Settings flags;
  std::string config_path;
  std::optional<double> e, m, z, tau1, tau2, tau, rho, tol;
  std::optional<std::string> variant, mode, component, axis, format;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--variant", variant, "step|lorentzian|plateau|A|A'|B|B'|C");
    sub->add_option("--tau1", tau1, "plateau duration");
    sub->add_option("--tau2", tau2, "total tail weight (pi mu tau1)");
    sub->add_option("--tau", tau, "step duration or Lorentzian scale");
    sub->add_option("--z", z, "distance to the mirror");
    sub->add_option("--e", e, "charge");
    sub->add_option("--m", m, "mass");
    sub->add_option("--mode", mode, "drop|compton");
    sub->add_option("--component", component, "z|xy");
    sub->add_option("--rho", rho, "also report A/rho + B at this rho");
    sub->add_option("--format", format, "csv|json");
  };
  CLI::App* compute = app.add_subcommand("compute", "single point");
  CLI::App* sweep = app.add_subcommand("sweep", "one-parameter sweep as CSV");
  CLI::App* rmap = app.add_subcommand("regime-map", "regime labels over a grid");
  CLI::App* check = app.add_subcommand("check", "pipeline against the brute-force oracle");
  for (auto* sub : {compute, sweep, rmap, check}) add_common(sub);
  for (auto* sub : {sweep, rmap}) {
    sub->add_option("--axis", axis, "tau1|tau2|tau|z");
    sub->add_option("--grid", flags.grid, "start:stop:count (twice for a tau1 x tau2 map)");
  }
  check->add_option("--tolerance", tol, "relative tolerance override");

  std::vector<const char*> argv{"vswitch"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& ex) {
    err << "error: " << ex.what() << '\n';
    return 2;
  }

  try {
    Settings s;
    if (!config_path.empty()) load_config(config_path, s);
    if (e) s.e = *e;
    if (m) s.m = *m;
    if (z) s.z = *z;
    if (variant) s.variant = *variant;
    if (tau1) s.tau1 = tau1;
    if (tau2) s.tau2 = tau2;
    if (tau) s.tau = tau;
    if (mode) s.mode = *mode;
    if (component) s.component = *component;
    if (rho) s.rho = rho;
    if (axis) s.axis = *axis;
    if (!flags.grid.empty()) s.grid = flags.grid;
    s.tolerance = tol;
    if (format) {
      if (*format != "csv" && *format != "json") throw config_error("format must be csv or json");
      s.format = *format;
    }
    if (compute->parsed()) return cmd_compute(s, out, err);
    if (sweep->parsed()) return cmd_sweep(s, out);
    if (rmap->parsed()) return cmd_regime_map(s, out);
    return cmd_check(s, out, err);
  } catch (const Error& ex) {
    err << "error: " << ex.what() << '\n';
    return is_config_error(ex.code()) ? 2 : 3;
  }
}

}  // namespace vswitch::cli
