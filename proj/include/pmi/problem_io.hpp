#pragma once
// JSON problem files, moment dumps and atom lists.
//
// Problem file keys: nx, ny, m, q, mode, objective [{y_exp, coeff}],
// theta [[{y_exp, coeff}], ...], P [{y_exp, x_exp, row, col, coeff}],
// G [{x_exp, row, col, coeff}], F [{x_exp, row, col, coeff}] (eigmin only),
// samples_X [[x_1, ..., x_nx], ...]. Matrix terms list the upper triangle
// (0-based row <= col); symmetry is implied.

#include <string>
#include <vector>

#include <json.hpp>

#include "pmi/hierarchy.hpp"

namespace pmi {

using json = nlohmann::json;

// Schema violation; `path()` names the offending field, e.g. "P[3].row".
class SchemaError : public Error {
 public:
  SchemaError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct ProblemFile {
  RpmioProblem problem;
  std::vector<Vec> samples_X;
};

// Validates the whole document before building anything; throws SchemaError.
ProblemFile problem_from_json(const json& doc);
json problem_to_json(const ProblemFile& pf);
// Reads and parses a file; malformed JSON is reported as a SchemaError at "$".
json read_json_file(const std::string& path);

// Moment dumps: {"nvars", "m", "order", "moments": [{"exp", "value"}]} with
// every missing block taken as zero, or {"nvars", "m", "order", "atoms":
// [{"point", "weight"}]} assembled into moments. An optional "d_G" is returned
// through `d_G` (default 1).
MomentSequence moments_from_json(const json& doc, int* d_G = nullptr);
json moments_to_json(const MomentSequence& s);

json matrix_to_json(const Mat& a);
json vector_to_json(const Vec& v);
json measure_to_json(const AtomicMeasure& mu);

}  // namespace pmi
