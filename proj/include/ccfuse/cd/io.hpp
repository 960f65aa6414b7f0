#pragma once

#include "ccfuse/cd/types.hpp"

#include <string>
#include <vector>

namespace ccfuse {

// A numeric CSV table with a header row.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

// Reads a numeric CSV. The header must start with `required` (extra columns
// listed in `optional` may follow). Errors name the offending line number.
CsvTable read_csv(const std::string& path, const std::vector<std::string>& required,
                  const std::vector<std::string>& optional = {});

// Tabulated curve as stored on disk: `param,value` CSV written with 17
// significant digits plus a JSON sidecar `<path>.json` holding metadata.
struct CurveFile {
    std::string kind;  // "cd", "cc", "loglik" or "deviance"
    ParamGrid grid;
    std::vector<double> values;
    double boundary_mass = 0.0;
    bool has_boundary_mass = false;
    std::vector<double> levels;
};

void write_curve(const std::string& csv_path, const CurveFile& curve);
// Reads the CSV and, when present, its sidecar. Missing sidecar leaves
// kind empty.
CurveFile read_curve(const std::string& csv_path);

CurveFile to_file(const ConfidenceDistribution& cd);
CurveFile to_file(const ConfidenceCurve& cc);
CurveFile to_file(const ConfidenceLogLik& ll);
ConfidenceDistribution cd_from_file(const CurveFile& f);
ConfidenceCurve cc_from_file(const CurveFile& f);
ConfidenceLogLik loglik_from_file(const CurveFile& f);

}  // namespace ccfuse
