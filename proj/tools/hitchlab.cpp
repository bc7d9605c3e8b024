// hitchlab: command-line front end. Every subcommand writes JSON (or CSV)
// to --out when given and to stdout otherwise. Failures print
// {"error": {...}} on stderr and exit 1 (I/O), 2 (invalid input or failed
// validation), 3 (insufficient data) or 4 (numerical failure).

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hitchlab/benoist.hpp"
#include "hitchlab/cone.hpp"
#include "hitchlab/counting.hpp"
#include "hitchlab/error.hpp"
#include "hitchlab/pipeline.hpp"
#include "hitchlab/rep.hpp"
#include "hitchlab/thermo.hpp"
#include "hitchlab/verify.hpp"

using namespace hitchlab;
using nlohmann::json;

namespace {

// JSON config files: top-level keys are option names of the main app
// ("workers"), nested objects are sections named after subcommands.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}"; }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw CLI::ConversionError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config must be a JSON object");
    std::vector<CLI::ConfigItem> items;
    collect(j, {}, items);
    return items;
  }

 private:
  static std::string scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  static void collect(const json& obj, const std::vector<std::string>& parents, std::vector<CLI::ConfigItem>& out) {
    for (const auto& [key, v] : obj.items()) {
      if (v.is_object()) {
        auto p = parents;
        p.push_back(key);
        collect(v, p, out);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (v.is_array()) {
        for (const auto& x : v) item.inputs.push_back(scalar(x));
      } else {
        item.inputs.push_back(scalar(v));
      }
      out.push_back(std::move(item));
    }
  }
};

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::Io: return 1;
    case ErrorKind::InvalidArgument:
    case ErrorKind::Validation: return 2;
    case ErrorKind::InsufficientData: return 3;
    default: return 4;
  }
}

int report_error(const std::string& kind, const std::string& message, int code) {
  json e = {{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}};
  std::cerr << e.dump() << '\n';
  return code;
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
  } else {
    write_file_atomic(out, text);
  }
}

void emit_json(const std::string& out, const json& j) { emit(out, j.dump(2) + "\n"); }

void need(const std::string& value, const char* flag) {
  if (value.empty()) fail(ErrorKind::InvalidArgument, std::string(flag) + " is required");
}

std::vector<double> parse_csv_numbers(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      out.push_back(std::stod(cell));
    } catch (const std::exception&) {
      fail(ErrorKind::InvalidArgument, "not a number: '" + cell + "'");
    }
  }
  return out;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidArgument, path + ": " + e.what());
  }
}

MarkovShift load_shift(const std::string& spec) {
  if (spec == "golden-mean") return golden_mean_shift();
  if (spec == "cat-map") return cat_map_shift();
  if (spec == "doubling") return doubling_shift();
  if (spec.rfind("full:", 0) == 0) return full_shift(std::stoi(spec.substr(5)));
  return shift_from_json(read_json_file(spec));
}

std::string hx_label(const ValidationReport& v) {
  return v.ok ? "critical exponent" : "formula value on samples (representation fails validation)";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hitchin representations: spectra, entropies and rigidity checks"};
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON config; command-line flags take precedence");
  app.require_subcommand(1);
  int workers = 1;
  app.add_option("--workers", workers, "Worker threads (results do not depend on it)")->check(CLI::PositiveNumber);

  std::string out, rep_path, classes_path;

  // fuchsian
  int fd = 3;
  auto* fuchsian = app.add_subcommand("fuchsian", "Fuchsian representation tau_d of the genus-2 octagon group");
  fuchsian->add_option("--d", fd, "Dimension 2..8")->check(CLI::Range(2, 8));
  fuchsian->add_option("--out", out, "Rep JSON");

  // bulge
  double bulge_t = 0.0;
  int handles = 1;
  std::string direction;
  auto* bulge = app.add_subcommand("bulge", "Bulging deformation along a separating curve");
  bulge->add_option("--rep", rep_path);
  bulge->add_option("--t", bulge_t);
  bulge->add_option("--direction", direction, "Comma-separated zero-sum vector of length d");
  bulge->add_option("--handles", handles);
  bulge->add_option("--out", out);

  // validate
  auto* validate = app.add_subcommand("validate", "Determinants, relator and loxodromy checks");
  validate->add_option("--rep", rep_path);
  validate->add_option("--out", out);

  // enumerate
  int max_len = 6;
  std::optional<double> seed_cutoff;
  bool unoriented = false;
  auto* enumerate = app.add_subcommand("enumerate", "Conjugacy classes with Jordan projections (CSV)");
  for (auto* sc : {enumerate}) {
    sc->add_option("--rep", rep_path);
    sc->add_option("--max-len", max_len, "Word-length bound");
    sc->add_option("--seed-cutoff", seed_cutoff, "Keep classes of seed translation length <= S");
    sc->add_flag("--unoriented", unoriented, "Merge each class with its inverse");
    sc->add_option("--out", out, "CSV");
  }

  // entropy
  std::string form;
  double q_lo = 0.2, q_hi = 0.8;
  auto* entropy = app.add_subcommand("entropy", "Growth rate of N_phi(s)");
  entropy->add_option("--classes", classes_path);
  entropy->add_option("--form", form, "sigma:i, omega:i, phi1, phi1d, phibar, phiu, phis or a JSON array");
  entropy->add_option("--q-lo", q_lo);
  entropy->add_option("--q-hi", q_hi);
  entropy->add_option("--out", out);

  // cone
  auto* cone = app.add_subcommand("cone", "Limit cone, dual-cone membership and span dimension");
  cone->add_option("--classes", classes_path);
  cone->add_option("--form", form, "Optional form to test against the dual cone");
  cone->add_option("--out", out);

  // dboundary
  std::size_t n_directions = 12;
  auto* dboundary = app.add_subcommand("dboundary", "Boundary of the entropy-one set along interior directions");
  dboundary->add_option("--classes", classes_path);
  dboundary->add_option("--directions", n_directions);
  dboundary->add_option("--out", out);

  // hx
  std::size_t grid = 121;
  auto* hx = app.add_subcommand("hx", "Critical exponent: min of h^phi over unit dual-norm phi");
  hx->add_option("--rep", rep_path);
  hx->add_option("--classes", classes_path);
  hx->add_option("--grid", grid);
  hx->add_option("--out", out);

  // verify
  std::string suite;
  std::size_t configurations = 200;
  std::uint64_t seed = 1;
  std::size_t point_max_len = 2;
  auto* verify = app.add_subcommand("verify", "Flag and spectral identity checks");
  verify->add_option("--rep", rep_path);
  verify->add_option("--suite", suite, "frenet | property-h | identities | walls");
  verify->add_option("--max-len", max_len);
  verify->add_option("--seed-cutoff", seed_cutoff);
  verify->add_option("--classes", classes_path, "Use a class table instead of enumerating");
  verify->add_option("--configurations", configurations);
  verify->add_option("--seed", seed);
  verify->add_option("--point-max-len", point_max_len, "Fixed points come from words of length <= this");
  verify->add_option("--out", out);

  // thermo
  std::string shift_spec, roof_path, livsic_path;
  bool solve = false, srb = false, period_count = false, spectral_route = false;
  std::optional<double> pressure_at;
  int n_max = 40;
  auto* thermo = app.add_subcommand("thermo", "Pressure and entropy on a subshift of finite type");
  thermo->add_option("--shift", shift_spec, "golden-mean | cat-map | doubling | full:K | JSON file");
  thermo->add_option("--roof", roof_path, "JSON [[from, to, value], ...]");
  thermo->add_flag("--solve-entropy", solve, "Root of s -> P(-s roof)");
  thermo->add_option("--pressure", pressure_at, "P(-S roof) by both routes");
  thermo->add_flag("--srb", srb, "Entropy of the roof read as unstable expansion");
  thermo->add_flag("--period-count", period_count, "Growth of the primitive-period sum");
  thermo->add_option("--livsic", livsic_path, "Compare periods against a second roof");
  thermo->add_flag("--spectral", spectral_route, "Solve with the spectral-radius route");
  thermo->add_option("--n-max", n_max);
  thermo->add_option("--out", out);

  // benoist
  std::size_t audit = 40;
  auto* benoist = app.add_subcommand("benoist", "Convex projective picture for d = 3");
  benoist->add_option("--rep", rep_path);
  benoist->add_option("--classes", classes_path);
  benoist->add_option("--audit", audit, "Elements in the translation-length audit");
  benoist->add_option("--report,--out", out);

  // report
  std::string artifacts_dir;
  bool as_json = false;
  auto* report = app.add_subcommand("report", "Claims table from a run directory");
  report->add_option("--artifacts,--dir", artifacts_dir);
  report->add_flag("--json", as_json);
  report->add_option("--out", out);

  // run
  std::vector<std::string> forms;
  auto* run = app.add_subcommand("run", "Validate, enumerate, analyze and write every artifact to --out DIR");
  run->add_option("--rep", rep_path);
  run->add_option("--max-len", max_len);
  run->add_option("--seed-cutoff", seed_cutoff);
  run->add_flag("--unoriented", unoriented);
  run->add_option("--form", forms, "Repeatable; default every simple root plus phi1d");
  run->add_option("--grid", grid);
  run->add_option("--configurations", configurations);
  run->add_option("--seed", seed);
  run->add_option("--out", out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::FileError& e) {
    return report_error("Io", e.what(), 1);
  } catch (const CLI::ParseError& e) {
    return report_error("InvalidArgument", e.what(), 2);
  }

  try {
    if (fuchsian->parsed()) {
      emit_json(out, rep_to_json(fuchsian_rep(fd)));
    } else if (bulge->parsed()) {
      need(rep_path, "--rep");
      BulgeParams p;
      p.t = bulge_t;
      p.handles = handles;
      if (!direction.empty()) p.direction = parse_csv_numbers(direction);
      emit_json(out, rep_to_json(bulge_deform(load_rep(rep_path), p)));
    } else if (validate->parsed()) {
      need(rep_path, "--rep");
      const auto r = validate_rep(load_rep(rep_path));
      emit_json(out, r.to_json());
      if (!r.ok) return 2;
    } else if (enumerate->parsed()) {
      need(rep_path, "--rep");
      emit(out, classes_csv(build_class_table(load_rep(rep_path), max_len, seed_cutoff, unoriented, workers)));
    } else if (entropy->parsed()) {
      need(classes_path, "--classes");
      need(form, "--form");
      const auto t = load_classes_csv(classes_path);
      const auto phi = parse_form(form, static_cast<std::size_t>(t.d));
      FitOptions fo;
      fo.q_lo = q_lo;
      fo.q_hi = q_hi;
      json j;
      j["form"] = form;
      j["coefficients"] = phi.coeffs();
      const auto c = c_of_phi(phi);
      j["c_phi"] = c ? json(*c) : json(nullptr);
      j["entropy"] = direction_entropy(t.classes, phi, t.truncation(), fo).to_json();
      emit_json(out, j);
    } else if (cone->parsed()) {
      need(classes_path, "--classes");
      const auto t = load_classes_csv(classes_path);
      std::vector<JordanVector> lambdas;
      for (const auto& c : t.classes) lambdas.push_back(c.lambda);
      const auto cs = limit_cone(lambdas);
      json j = cs.to_json();
      j["zariski"] = zariski_dim(lambdas).to_json();
      j["walls_margin"] = walls_margin(lambdas);
      if (!form.empty()) {
        const auto r = dual_cone_interior(parse_form(form, static_cast<std::size_t>(t.d)), cs);
        j["dual_cone_interior"] = {{"form", form}, {"pass", r.pass}, {"margin", r.margin}};
      }
      emit_json(out, j);
    } else if (dboundary->parsed()) {
      need(classes_path, "--classes");
      const auto t = load_classes_csv(classes_path);
      std::vector<JordanVector> lambdas;
      for (const auto& c : t.classes) lambdas.push_back(c.lambda);
      const auto dirs = interior_directions(limit_cone(lambdas), n_directions);
      const auto sample = d_rho_boundary(t.classes, dirs, t.truncation(), workers);
      json j = sample.to_json();
      j["convexity"] = convexity_diagnostic(sample).to_json();
      emit_json(out, j);
    } else if (hx->parsed()) {
      need(rep_path, "--rep");
      need(classes_path, "--classes");
      const auto v = validate_rep(load_rep(rep_path));
      const auto t = load_classes_csv(classes_path);
      CriticalExponentConfig cfg;
      cfg.grid = grid;
      cfg.workers = workers;
      const auto r = critical_exponent(t.classes, t.truncation(), cfg);
      json j = r.to_json();
      j["label"] = hx_label(v);
      j["validation_ok"] = v.ok;
      j["angle_to_principal_dual_deg"] = angle_to_principal_dual(r.direction);
      emit_json(out, j);
    } else if (verify->parsed()) {
      need(rep_path, "--rep");
      need(suite, "--suite");
      const auto rep = load_rep(rep_path);
      const ClassTable t = classes_path.empty() ? build_class_table(rep, max_len, seed_cutoff, false, workers)
                                                : load_classes_csv(classes_path);
      if (t.d != rep.d) fail(ErrorKind::InvalidArgument, "class table and rep have different d");
      VerifyOptions vo;
      vo.configurations = configurations;
      vo.seed = seed;
      vo.point_max_len = point_max_len;
      const auto r = run_suite(suite, rep, t.classes, t.truncation(), vo);
      emit_json(out, r.to_json());
      if (!r.pass) return 2;
    } else if (thermo->parsed()) {
      need(shift_spec, "--shift");
      MarkovShift s = load_shift(shift_spec);
      if (!roof_path.empty()) s = s.with_roof(roof_from_json(s, read_json_file(roof_path)));
      s.check();
      const auto route = spectral_route ? PressureRoute::Spectral : PressureRoute::PeriodicOrbits;
      json j;
      j["shift"] = shift_to_json(s);
      bool any = false;
      if (pressure_at) {
        const Matrix g = -*pressure_at * s.roof;
        const auto p = pressure(s, g, n_max);
        j["pressure"] = {{"s", *pressure_at},
                         {"periodic_orbits", p.value},
                         {"increment", p.increment},
                         {"spectral", pressure_spectral(s, g)}};
        any = true;
      }
      if (solve) {
        const auto e = solve_entropy(s, s.roof, 1e-13, route, n_max);
        j["entropy"] = {{"h", e.h},
                        {"pressure_at_h", e.pressure_at_h},
                        {"bracket_hi", e.bracket_hi},
                        {"iterations", e.iterations},
                        {"route", spectral_route ? "spectral" : "periodic-orbits"}};
        any = true;
      }
      if (srb) {
        j["srb"] = srb_toy(s, s.roof);
        any = true;
      }
      if (period_count) {
        const auto g = period_count_entropy(s, s.roof, std::min(n_max, 30), workers);
        j["period_count"] = {{"h", g.h}, {"complete_below", g.complete_below}, {"cycles", g.cycles},
                             {"points", g.points}};
        any = true;
      }
      if (!livsic_path.empty()) {
        const Matrix g = roof_from_json(s, read_json_file(livsic_path));
        const auto l = livsic_test(s, s.roof, g, std::min(n_max, 20));
        j["livsic"] = {{"pass", l.pass}, {"worst_gap", l.worst_gap}, {"cycles", l.cycles}};
        any = true;
      }
      if (!any) fail(ErrorKind::InvalidArgument, "choose --solve-entropy, --pressure S, --srb, --period-count or --livsic");
      emit_json(out, j);
    } else if (benoist->parsed()) {
      need(rep_path, "--rep");
      need(classes_path, "--classes");
      const auto rep = load_rep(rep_path);
      if (rep.d != 3) fail(ErrorKind::InvalidArgument, "benoist needs d = 3");
      const auto t = load_classes_csv(classes_path);
      const auto ls = limit_set_sample(rep, t.classes, workers);
      const auto fit = fit_conic(ls.points);
      json j;
      j["limit_set_points"] = ls.points.size();
      j["skipped"] = ls.skipped;
      j["conic"] = {{"residual", fit.residual}, {"is_ellipse", fit.is_ellipse}, {"coefficients", std::vector<double>(fit.coeffs.data(), fit.coeffs.data() + 6)}};
      j["entropies"] = benoist_entropies(t.classes, t.truncation()).to_json();
      const auto th = ThetaForms::make(3);
      j["forms"] = {{"phiu_is_sigma1", th.phiu == simple_root(3, 1)}, {"phis_is_sigma2", th.phis == simple_root(3, 2)}};
      double identity = 0.0;
      const auto fb = to_double(th.phibar), fu = to_double(th.phiu), fs = to_double(th.phis);
      for (const auto& c : t.classes) identity = std::max(identity, std::abs(fb(c.lambda) - (fu(c.lambda) + fs(c.lambda)) / 2));
      j["phibar_identity_max_error"] = identity;
      // Hull route always; the fitted ellipse too when the fit is tight.
      const auto hull = ConvexDomain::hull(ls.points);
      std::optional<ConvexDomain> ellipse;
      if (fit.is_ellipse && fit.residual <= 1e-6) ellipse = ConvexDomain::from_conic(fit);
      const WordSpectra spectra(rep);
      json rows = json::array();
      double worst = 0.0;
      const std::size_t stride = std::max<std::size_t>(1, t.classes.size() / std::max<std::size_t>(audit, 1));
      for (std::size_t k = 0; k < t.classes.size() && rows.size() < audit; k += stride) {
        const auto& w = t.classes[k].canonical;
        json row = {{"word", to_string(w)}};
        try {
          const auto a = translation_length_audit(spectra, ls.chart, hull, w);
          row["functional"] = a.functional;
          row["hull"] = a.sampled;
          row["hull_rel_error"] = std::abs(a.sampled / a.functional - 1);
          worst = std::max(worst, row["hull_rel_error"].get<double>());
          if (ellipse) {
            const auto b = translation_length_audit(spectra, ls.chart, *ellipse, w);
            row["ellipse"] = b.sampled;
          }
        } catch (const Error& e) {
          row["error"] = e.what();
        }
        rows.push_back(row);
      }
      j["audit"] = rows;
      j["audit_worst_rel_error"] = worst;
      emit_json(out, j);
    } else if (report->parsed()) {
      need(artifacts_dir, "--artifacts");
      const auto rows = report_theorems(Artifacts::load(artifacts_dir));
      emit(out, as_json ? report_to_json(rows).dump(2) + "\n" : render_report(rows));
    } else if (run->parsed()) {
      need(rep_path, "--rep");
      need(out, "--out");
      RunConfig cfg;
      cfg.rep_path = rep_path;
      cfg.max_len = max_len;
      cfg.seed_cutoff = seed_cutoff;
      cfg.unoriented = unoriented;
      cfg.forms = forms;
      cfg.optimizer.grid = grid;
      cfg.verify.configurations = configurations;
      cfg.verify.seed = seed;
      cfg.workers = workers;
      cfg.out_dir = out;
      const auto artifacts = run_pipeline(cfg);
      artifacts.save(out);
      std::cout << render_report(report_theorems(artifacts));
    }
  } catch (const Error& e) {
    return report_error(to_string(e.kind()), e.what(), exit_code(e.kind()));
  } catch (const json::exception& e) {
    return report_error("InvalidArgument", e.what(), 2);
  } catch (const std::invalid_argument& e) {
    return report_error("InvalidArgument", e.what(), 2);
  } catch (const std::out_of_range& e) {
    return report_error("InvalidArgument", e.what(), 2);
  }
  return 0;
}
