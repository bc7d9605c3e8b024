#include "hitchlab/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "hitchlab/benoist.hpp"
#include "hitchlab/error.hpp"

namespace hitchlab {

namespace fs = std::filesystem;

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Same left-to-right product as the enumerator, so the lengths agree bitwise.
double seed_length_of(const std::vector<Eigen::Matrix2d>& letters, const Word& w) {
  Eigen::Matrix2d m = letters[w.front()];
  for (std::size_t k = 1; k < w.size(); ++k) m = Eigen::Matrix2d(m * letters[w[k]]);
  return translation_length_2x2(m);
}

std::vector<Eigen::Matrix2d> seed_letters() {
  std::vector<Eigen::Matrix2d> out;
  for (const auto& g : seed_generators()) {
    const Eigen::Matrix2d m = g;
    out.push_back(m);
    out.push_back(m.inverse());
  }
  return out;
}

std::map<std::string, std::string> parse_header(const std::string& line) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(line.substr(1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
      return s;
    };
    kv[trim(item.substr(0, eq))] = trim(item.substr(eq + 1));
  }
  return kv;
}

}  // namespace

Truncation ClassTable::truncation() const {
  if (seed_cutoff) return {Truncation::Kind::SeedLength, *seed_cutoff};
  return {Truncation::Kind::WordLength, static_cast<double>(max_len)};
}

ClassTable build_class_table(const RepSpec& rep, int max_len, std::optional<double> seed_cutoff, bool unoriented,
                             int workers) {
  if (max_len < 1) fail(ErrorKind::InvalidArgument, "max_len must be >= 1");
  EnumerationOptions o;
  o.genus = rep.genus;
  o.max_len = max_len;
  o.unoriented = unoriented;
  o.workers = workers;
  if (seed_cutoff) {
    if (rep.genus != 2) fail(ErrorKind::InvalidArgument, "seed cutoff is available for genus 2 only");
    if (!(*seed_cutoff > 0)) fail(ErrorKind::InvalidArgument, "seed cutoff must be positive");
    o.seed = SeedCutoff{seed_generators(), *seed_cutoff, 6.0};
    // The seed bound alone decides membership; the word cap only has to
    // exceed every surviving word.
    o.max_len = kSeedWordCap;
  }
  ClassTable t;
  t.genus = rep.genus;
  t.d = rep.d;
  t.max_len = max_len;
  t.seed_cutoff = seed_cutoff;
  t.oriented = !unoriented;
  t.classes = attach_spectra(rep, enumerate_classes(o), workers);
  if (seed_cutoff) {
    t.max_len = 0;
    for (const auto& c : t.classes) t.max_len = std::max(t.max_len, static_cast<int>(c.canonical.size()));
    if (t.max_len >= kSeedWordCap) fail(ErrorKind::InvalidArgument, "seed cutoff too large for the word cap");
  }
  return t;
}

void write_classes_csv(std::ostream& out, const ClassTable& table) {
  out << "# genus=" << table.genus << ",d=" << table.d << ",max_len=" << table.max_len
      << ",seed_cutoff=" << (table.seed_cutoff ? fmt17(*table.seed_cutoff) : std::string("none"))
      << ",oriented=" << (table.oriented ? 1 : 0) << '\n';
  out << "canonical_word,length";
  for (int i = 1; i <= table.d; ++i) out << ",lambda_" << i;
  out << '\n';
  for (const auto& c : table.classes) {
    out << to_string(c.canonical) << ',' << c.canonical.size();
    for (double x : c.lambda.coords()) out << ',' << fmt17(x);
    out << '\n';
  }
}

std::string classes_csv(const ClassTable& table) {
  std::ostringstream os;
  write_classes_csv(os, table);
  return os.str();
}

ClassTable read_classes_csv(std::istream& in) {
  ClassTable t;
  std::string line;
  bool header_seen = false;
  std::size_t line_no = 0;
  std::vector<Eigen::Matrix2d> letters;
  auto bad = [&](const std::string& what) {
    fail(ErrorKind::InvalidArgument, "classes CSV line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto kv = parse_header(line);
      try {
        if (kv.count("genus")) t.genus = std::stoi(kv["genus"]);
        if (kv.count("d")) t.d = std::stoi(kv["d"]);
        if (kv.count("max_len")) t.max_len = std::stoi(kv["max_len"]);
        if (kv.count("seed_cutoff") && kv["seed_cutoff"] != "none") t.seed_cutoff = std::stod(kv["seed_cutoff"]);
        if (kv.count("oriented")) t.oriented = kv["oriented"] != "0";
      } catch (const std::exception&) {
        bad("malformed metadata");
      }
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      if (line.rfind("canonical_word,length", 0) != 0) bad("expected the canonical_word,length,... header");
      const auto cols = static_cast<int>(std::count(line.begin(), line.end(), ',')) + 1;
      if (t.d == 0) t.d = cols - 2;
      if (cols != t.d + 2) bad("column count does not match d");
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (static_cast<int>(cells.size()) != t.d + 2) bad("expected " + std::to_string(t.d + 2) + " fields");
    ConjClass c;
    c.canonical = parse_word(cells[0]);
    std::vector<double> lam;
    try {
      if (std::stoul(cells[1]) != c.canonical.size()) bad("length does not match the word");
      for (int i = 0; i < t.d; ++i) lam.push_back(std::stod(cells[static_cast<std::size_t>(i) + 2]));
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      bad("malformed number");
    }
    c.lambda = JordanVector(std::move(lam));
    if (t.seed_cutoff) {
      if (letters.empty()) letters = seed_letters();
      c.seed_length = seed_length_of(letters, c.canonical);
    } else {
      c.seed_length = std::numeric_limits<double>::quiet_NaN();
    }
    t.max_len = std::max(t.max_len, static_cast<int>(c.canonical.size()));
    t.classes.push_back(std::move(c));
  }
  if (!header_seen) fail(ErrorKind::InvalidArgument, "classes CSV has no header");
  return t;
}

ClassTable load_classes_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot read " + path);
  return read_classes_csv(in);
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) fail(ErrorKind::Io, "cannot write " + tmp.string());
    out << contents;
    if (!out) fail(ErrorKind::Io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) fail(ErrorKind::Io, "cannot rename to " + path + ": " + ec.message());
}

void RunConfig::check() const {
  if (max_len < 1) fail(ErrorKind::InvalidArgument, "max_len must be >= 1");
  if (seed_cutoff && !(*seed_cutoff > 0)) fail(ErrorKind::InvalidArgument, "seed_cutoff must be positive");
  if (workers < 1) fail(ErrorKind::InvalidArgument, "workers must be >= 1");
  if (!(optimizer.tol > 0) || optimizer.grid < 1 || optimizer.max_iter < 1) {
    fail(ErrorKind::InvalidArgument, "optimizer grid, tol and max_iter must be positive");
  }
  if (!(verify.tol > 0) || !(verify.identity_tol > 0) || !(verify.line_tol > 0)) {
    fail(ErrorKind::InvalidArgument, "tolerances must be positive");
  }
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["rep"] = rep_path;
  j["max_len"] = max_len;
  j["seed_cutoff"] = seed_cutoff ? nlohmann::json(*seed_cutoff) : nlohmann::json(nullptr);
  j["unoriented"] = unoriented;
  j["forms"] = forms;
  j["optimizer"] = {{"grid", optimizer.grid}, {"tol", optimizer.tol}, {"max_iter", optimizer.max_iter}};
  j["verify"] = {{"configurations", verify.configurations},
                 {"seed", verify.seed},
                 {"point_max_len", verify.point_max_len},
                 {"tol", verify.tol},
                 {"identity_tol", verify.identity_tol},
                 {"line_tol", verify.line_tol}};
  // Worker count and output directory do not change any result.
  return j;
}

Artifacts Artifacts::load(const std::string& dir) {
  Artifacts a;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return a;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file() || e.path().extension() == ".tmp") continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    a.files[e.path().filename().string()] = os.str();
  }
  return a;
}

std::optional<nlohmann::json> Artifacts::json(const std::string& name) const {
  const auto it = files.find(name);
  if (it == files.end()) return std::nullopt;
  try {
    return nlohmann::json::parse(it->second);
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

void Artifacts::save(const std::string& dir) const {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create " + dir + ": " + ec.message());
  std::vector<std::pair<fs::path, fs::path>> staged;
  try {
    for (const auto& [name, body] : files) {
      const fs::path target = fs::path(dir) / name;
      fs::path tmp = target;
      tmp += ".tmp";
      std::ofstream out(tmp, std::ios::binary);
      if (!out) fail(ErrorKind::Io, "cannot write " + tmp.string());
      staged.emplace_back(tmp, target);
      out << body;
      if (!out) fail(ErrorKind::Io, "write failed for " + tmp.string());
    }
  } catch (...) {
    for (const auto& [tmp, target] : staged) fs::remove(tmp, ec);
    throw;
  }
  for (const auto& [tmp, target] : staged) {
    fs::rename(tmp, target, ec);
    if (ec) fail(ErrorKind::Io, "cannot rename to " + target.string() + ": " + ec.message());
  }
}

std::string form_slug(const std::string& form, std::size_t index) {
  std::string s;
  for (char ch : form) {
    if (std::isalnum(static_cast<unsigned char>(ch))) s += ch;
  }
  if (s.empty() || form.front() == '[') return "form" + std::to_string(index + 1);
  return s;
}

double angle_to_principal_dual(const LinearForm& phi) {
  const auto d = phi.dim();
  const NormData norm = NormData::for_dim(d);
  const auto v = riesz_vector(phi, norm);
  const auto u = principal_vector(d);
  const double c = norm.inner(v.coords(), u.coords()) / (norm.norm(v) * norm.norm(u));
  return std::acos(std::clamp(c, -1.0, 1.0)) * 180.0 / std::numbers::pi;
}

Artifacts run_pipeline(const RunConfig& config) {
  config.check();
  if (!fs::exists(config.rep_path)) fail(ErrorKind::Io, "rep file not found: " + config.rep_path);
  const RepSpec rep = load_rep(config.rep_path);
  const auto validation = validate_rep(rep);
  if (!validation.ok) {
    Error e(ErrorKind::Validation, "representation fails validation: " + validation.to_json().dump());
    throw e;
  }
  const auto d = static_cast<std::size_t>(rep.d);
  Artifacts out;
  out.files["config.json"] = config.to_json().dump(2) + "\n";
  out.files["rep.json"] = rep_to_json(rep).dump(2) + "\n";
  out.files["validation.json"] = validation.to_json().dump(2) + "\n";

  const ClassTable table = build_class_table(rep, config.max_len, config.seed_cutoff, config.unoriented,
                                             config.workers);
  const Truncation trunc = table.truncation();
  out.files["classes.csv"] = classes_csv(table);

  std::vector<std::string> forms = config.forms;
  if (forms.empty()) {
    for (std::size_t i = 1; i < d; ++i) forms.push_back("sigma:" + std::to_string(i));
    forms.push_back("phi1d");
  }
  for (std::size_t k = 0; k < forms.size(); ++k) {
    const LinearForm phi = parse_form(forms[k], d);
    nlohmann::json j;
    j["form"] = forms[k];
    j["coefficients"] = phi.coeffs();
    const auto c = c_of_phi(phi);
    j["c_phi"] = c ? nlohmann::json(*c) : nlohmann::json(nullptr);
    j["entropy"] = direction_entropy(table.classes, phi, trunc).to_json();
    out.files["entropy_" + form_slug(forms[k], k) + ".json"] = j.dump(2) + "\n";
  }

  std::vector<JordanVector> lambdas;
  for (const auto& c : table.classes) lambdas.push_back(c.lambda);
  auto opt = config.optimizer;
  opt.workers = config.workers;
  const auto hx = critical_exponent(table.classes, trunc, opt);
  nlohmann::json hj = hx.to_json();
  hj["label"] = "critical exponent";
  hj["angle_to_principal_dual_deg"] = angle_to_principal_dual(hx.direction);
  hj["zariski"] = zariski_dim(lambdas).to_json();
  const auto cone = limit_cone(lambdas);
  hj["cone_extreme_rays"] = cone.extreme.size();
  hj["cone_spread"] = cone.spread;
  out.files["hx.json"] = hj.dump(2) + "\n";

  nlohmann::json vj;
  vj["suites"] = nlohmann::json::array();
  for (const char* s : {"frenet", "property-h", "identities", "walls"}) {
    if (std::string(s) == "property-h" && d < 3) continue;
    try {
      vj["suites"].push_back(run_suite(s, rep, table.classes, trunc, config.verify).to_json());
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InsufficientData) throw;
      vj["suites"].push_back({{"suite", s}, {"pass", false}, {"error", e.what()}});
    }
  }
  out.files["verify.json"] = vj.dump(2) + "\n";

  if (d == 3) out.files["benoist.json"] = benoist_entropies(table.classes, trunc).to_json().dump(2) + "\n";
  return out;
}

namespace {

constexpr double kEstimatorTol = 0.25;

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

ReportRow no_data(const std::string& claim, const std::string& expected, const std::string& module) {
  return {claim, expected, nan(), nan(), "NO DATA", module};
}

std::string verdict(bool pass, bool unstable = false) {
  std::string v = pass ? "PASS" : "FAIL";
  if (unstable) v += " (UNSTABLE estimate)";
  return v;
}

bool unstable_flag(const nlohmann::json& est) {
  if (!est.contains("flags")) return false;
  for (const auto& f : est["flags"]) {
    if (f == "UNSTABLE") return true;
  }
  return false;
}

}  // namespace

std::vector<ReportRow> report_theorems(const Artifacts& artifacts) {
  std::vector<ReportRow> rows;
  const auto rep_j = artifacts.json("rep.json");
  const int d = rep_j && rep_j->contains("d") ? (*rep_j)["d"].get<int>() : 0;

  // Entropy files, split into simple roots and the rest.
  struct Est {
    std::string form;
    double h, unc;
    bool unstable;
    std::optional<double> c;
  };
  std::vector<Est> simple, other;
  for (const auto& [name, body] : artifacts.files) {
    if (name.rfind("entropy_", 0) != 0) continue;
    const auto j = artifacts.json(name);
    if (!j || !j->contains("entropy") || (*j)["entropy"]["degenerate"].get<bool>()) continue;
    const auto& est = (*j)["entropy"]["estimate"];
    Est e{(*j)["form"].get<std::string>(), est["h_hat"].get<double>(), est["uncertainty"].get<double>(),
          unstable_flag(est), std::nullopt};
    if (!(*j)["c_phi"].is_null()) e.c = (*j)["c_phi"].get<double>();
    (e.form.rfind("sigma:", 0) == 0 ? simple : other).push_back(e);
  }

  const std::string sr_claim = "simple-root entropies equal 1";
  if (simple.empty()) {
    rows.push_back(no_data(sr_claim, "1", "counting_entropy"));
  }
  for (const auto& e : simple) {
    rows.push_back({sr_claim + " (" + e.form + ")", "1", e.h, kEstimatorTol,
                    verdict(std::abs(e.h - 1.0) <= kEstimatorTol, e.unstable), "counting_entropy"});
  }
  if (simple.size() >= 2) {
    double worst = 0.0, tol = 0.0;
    bool pass = true;
    for (std::size_t a = 0; a < simple.size(); ++a) {
      for (std::size_t b = a + 1; b < simple.size(); ++b) {
        const double gap = std::abs(simple[a].h - simple[b].h);
        const double t = simple[a].unc + simple[b].unc + 1e-9;
        pass = pass && gap <= t;
        if (gap >= worst) {
          worst = gap;
          tol = t;
        }
      }
    }
    rows.push_back({"simple-root entropies agree", "0", worst, tol, verdict(pass), "counting_entropy"});
  }
  for (const auto& e : other) {
    if (!e.c) continue;
    const double tol = kEstimatorTol * *e.c + e.unc;
    std::ostringstream expected;
    expected << "<= " << std::setprecision(6) << *e.c;
    rows.push_back({"entropy at most c(phi) (" + e.form + ")", expected.str(), e.h, tol,
                    verdict(e.h <= *e.c + tol, e.unstable), "counting_entropy"});
  }

  const auto hx = artifacts.json("hx.json");
  const auto validation = artifacts.json("validation.json");
  if (!hx) {
    rows.push_back(no_data("critical exponent at most 1", "<= 1", "cone_geometry"));
  } else {
    const double h = (*hx)["h_x"].get<double>();
    const double unc = (*hx)["uncertainty"].get<double>();
    const bool unstable = unstable_flag(*hx);
    std::string claim = "critical exponent at most 1";
    if (validation && !(*validation)["ok"].get<bool>()) claim += " [formula value on samples]";
    rows.push_back({claim, "<= 1", h, kEstimatorTol + unc, verdict(h <= 1.0 + kEstimatorTol + unc, unstable),
                    "cone_geometry"});
    const bool fuchsian = hx->contains("zariski") && (*hx)["zariski"]["rank"].get<int>() == 1;
    if (fuchsian) {
      rows.push_back({"critical exponent equals 1 on the Fuchsian locus", "1", h, kEstimatorTol,
                      verdict(std::abs(h - 1.0) <= kEstimatorTol, unstable), "cone_geometry"});
      const double ang = (*hx)["angle_to_principal_dual_deg"].get<double>();
      rows.push_back({"minimizing direction is dual to the principal direction (deg)", "0", ang, 5.0,
                      verdict(ang <= 5.0), "cone_geometry"});
    }
  }

  const auto ver = artifacts.json("verify.json");
  auto suite = [&](const std::string& name) -> std::optional<nlohmann::json> {
    if (!ver) return std::nullopt;
    for (const auto& s : (*ver)["suites"]) {
      if (s["suite"] == name) return s;
    }
    return std::nullopt;
  };
  struct SuiteRow {
    const char* suite;
    const char* claim;
    const char* expected;
  };
  for (const auto& sr : {SuiteRow{"walls", "Jordan projections avoid the walls (min sigma_i/|lambda|)", "> 0"},
                         SuiteRow{"frenet", "flag curve is Frenet (min margin)", "> 0"},
                         SuiteRow{"property-h", "three-point transversality (min margin)", "> 0"},
                         SuiteRow{"identities", "unstable exponent equals the root gap (max error)", "0"}}) {
    const auto s = suite(sr.suite);
    if (!s || !s->contains("worst")) {
      rows.push_back(no_data(sr.claim, sr.expected, "spectral"));
      continue;
    }
    rows.push_back({sr.claim, sr.expected, (*s)["worst"].get<double>(), (*s)["tolerance"].get<double>(),
                    verdict((*s)["pass"].get<bool>()), "spectral"});
    if (std::string(sr.suite) == "identities" && s->contains("details")) {
      const auto& det = (*s)["details"];
      rows.push_back({"eigenline symmetry l_i(x,y) = l_{d-i+1}(y,x) (max angle)", "0",
                      det["line_symmetry_max_angle"].get<double>(), det["line_symmetry_tolerance"].get<double>(),
                      verdict(det["line_symmetry_max_angle"].get<double>() <= det["line_symmetry_tolerance"].get<double>()),
                      "spectral"});
    }
  }

  if (d == 3 || artifacts.files.count("benoist.json")) {
    const auto b = artifacts.json("benoist.json");
    auto brow = [&](const char* key, const std::string& claim, bool upper_only) {
      if (!b || (*b)[key]["degenerate"].get<bool>()) {
        rows.push_back(no_data(claim, upper_only ? "<= 1" : "1", "benoist"));
        return;
      }
      const auto& est = (*b)[key]["estimate"];
      const double h = est["h_hat"].get<double>();
      const double tol = kEstimatorTol + est["uncertainty"].get<double>();
      const bool pass = upper_only ? h <= 1.0 + tol : std::abs(h - 1.0) <= tol;
      rows.push_back({claim, upper_only ? "<= 1" : "1", h, tol, verdict(pass, unstable_flag(est)), "benoist"});
    };
    brow("phiu", "unstable Hilbert entropy equals 1", false);
    brow("phis", "stable Hilbert entropy equals 1", false);
    brow("phibar", "Hilbert-length entropy at most 1", true);
  }
  return rows;
}

std::string render_report(const std::vector<ReportRow>& rows) {
  std::size_t w = 5;
  for (const auto& r : rows) w = std::max(w, r.claim.size());
  std::ostringstream os;
  os << std::left << std::setw(static_cast<int>(w)) << "claim" << "  " << std::setw(14) << "expected" << std::setw(14)
     << "measured" << std::setw(12) << "tolerance" << std::setw(17) << "module" << "verdict\n";
  for (const auto& r : rows) {
    auto num = [](double x) {
      if (std::isnan(x)) return std::string("-");
      std::ostringstream s;
      s << std::setprecision(6) << x;
      return s.str();
    };
    os << std::left << std::setw(static_cast<int>(w)) << r.claim << "  " << std::setw(14) << r.expected_value
       << std::setw(14) << num(r.measured) << std::setw(12) << num(r.tolerance) << std::setw(17) << r.module
       << r.verdict << '\n';
  }
  return os.str();
}

nlohmann::json report_to_json(const std::vector<ReportRow>& rows) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : rows) {
    auto num = [](double x) { return std::isnan(x) ? nlohmann::json(nullptr) : nlohmann::json(x); };
    j.push_back({{"claim", r.claim},
                 {"expected_value", r.expected_value},
                 {"measured", num(r.measured)},
                 {"tolerance", num(r.tolerance)},
                 {"verdict", r.verdict},
                 {"module", r.module}});
  }
  return j;
}

}  // namespace hitchlab
