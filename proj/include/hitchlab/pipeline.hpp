#pragma once

// Class tables on disk, the end-to-end run (construct, validate, enumerate,
// analyze) and the claims report built from its artifacts.

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hitchlab/cone.hpp"
#include "hitchlab/counting.hpp"
#include "hitchlab/rep.hpp"
#include "hitchlab/spectral.hpp"
#include "hitchlab/verify.hpp"

namespace hitchlab {

struct ClassTable {
  int genus = 2;
  int d = 0;
  int max_len = 0;
  /// Seed translation-length bound used by the enumerator, if any.
  std::optional<double> seed_cutoff;
  bool oriented = true;
  std::vector<ConjClass> classes;

  Truncation truncation() const;
};

inline constexpr int kSeedWordCap = 80;

/// Enumerates (seed cutoff when given, word length otherwise) and attaches
/// the spectra of rep. With a seed cutoff max_len is ignored and the table
/// records the longest word found.
ClassTable build_class_table(const RepSpec& rep, int max_len, std::optional<double> seed_cutoff,
                             bool unoriented = false, int workers = 1);

/// "# genus=2,d=3,max_len=12,seed_cutoff=12.5,oriented=1" then
/// canonical_word,length,lambda_1..lambda_d with %.17g values.
void write_classes_csv(std::ostream& out, const ClassTable& table);
std::string classes_csv(const ClassTable& table);
/// Seed lengths are recomputed from the words (the file does not carry them).
ClassTable read_classes_csv(std::istream& in);
ClassTable load_classes_csv(const std::string& path);

/// Writes path through a sibling temporary file and a rename.
void write_file_atomic(const std::string& path, const std::string& contents);

struct RunConfig {
  std::string rep_path;
  int max_len = 6;
  std::optional<double> seed_cutoff;
  bool unoriented = false;
  /// Form names or JSON arrays; empty selects every simple root plus phi1d.
  std::vector<std::string> forms;
  CriticalExponentConfig optimizer;
  VerifyOptions verify;
  int workers = 1;
  std::string out_dir;

  /// Throws InvalidArgument on non-positive tolerances, max_len < 1 or a
  /// non-positive worker count.
  void check() const;
  nlohmann::json to_json() const;
};

/// Everything a run produces, keyed by file name.
struct Artifacts {
  std::map<std::string, std::string> files;

  /// Reads every regular file of dir (missing dir gives no artifacts).
  static Artifacts load(const std::string& dir);
  std::optional<nlohmann::json> json(const std::string& name) const;
  /// Writes into dir (created if needed): all files go to temporaries
  /// first and are renamed once every write succeeded.
  void save(const std::string& dir) const;
};

/// File-name stem for a form name ("sigma:1" -> "sigma1").
std::string form_slug(const std::string& form, std::size_t index);

/// Throws Io when the rep file is missing and Validation when it fails
/// validate_rep; nothing is written here.
Artifacts run_pipeline(const RunConfig& config);

/// Angle in degrees between the Riesz vector of phi and the principal
/// direction (d-1, d-3, ..., 1-d).
double angle_to_principal_dual(const LinearForm& phi);

struct ReportRow {
  std::string claim;
  std::string expected_value;
  /// NaN when there is no data.
  double measured = 0.0;
  double tolerance = 0.0;
  std::string verdict;  // PASS, FAIL or NO DATA, with notes appended
  std::string module;
};

std::vector<ReportRow> report_theorems(const Artifacts& artifacts);
std::string render_report(const std::vector<ReportRow>& rows);
nlohmann::json report_to_json(const std::vector<ReportRow>& rows);

}  // namespace hitchlab
