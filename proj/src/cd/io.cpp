#include "ccfuse/cd/io.hpp"

#include "ccfuse/error.hpp"

#include <json.hpp>

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

namespace ccfuse {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_number(const std::string& cell, const std::string& path, std::size_t line) {
    if (cell == "-inf" || cell == "-Inf") return -std::numeric_limits<double>::infinity();
    if (cell == "inf" || cell == "Inf") return std::numeric_limits<double>::infinity();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(cell.c_str(), &end);
    if (cell.empty() || end != cell.c_str() + cell.size() || errno == ERANGE) {
        std::ostringstream os;
        os << path << ": row " << line << ": cannot parse '" << cell << "' as a number";
        throw InvalidArgument(os.str());
    }
    return v;
}

std::string format(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

CsvTable read_csv(const std::string& path, const std::vector<std::string>& required,
                  const std::vector<std::string>& optional) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open " + path);
    CsvTable t;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) break;
    }
    t.header = split(trim(line));
    if (t.header.size() < required.size()) {
        throw InvalidArgument(path + ": header must start with the required columns");
    }
    for (std::size_t i = 0; i < t.header.size(); ++i) {
        const bool ok = i < required.size()
                            ? t.header[i] == required[i]
                            : (i - required.size() < optional.size() &&
                               t.header[i] == optional[i - required.size()]);
        if (!ok) {
            std::ostringstream os;
            os << path << ": unexpected header column '" << t.header[i] << "'";
            throw InvalidArgument(os.str());
        }
    }
    while (std::getline(in, line)) {
        ++line_no;
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        const auto cells = split(s);
        if (cells.size() != t.header.size()) {
            std::ostringstream os;
            os << path << ": row " << line_no << ": expected " << t.header.size() << " fields, got "
               << cells.size();
            throw InvalidArgument(os.str());
        }
        std::vector<double> row;
        for (const auto& c : cells) row.push_back(parse_number(c, path, line_no));
        t.rows.push_back(std::move(row));
    }
    return t;
}

void write_curve(const std::string& csv_path, const CurveFile& curve) {
    std::ofstream out(csv_path);
    if (!out) throw InvalidArgument("cannot write " + csv_path);
    out << "param,value\n";
    for (std::size_t i = 0; i < curve.grid.size(); ++i) {
        out << format(curve.grid[i]) << ',' << format(curve.values[i]) << '\n';
    }
    nlohmann::json meta;
    meta["kind"] = curve.kind;
    meta["boundary_mass"] = curve.boundary_mass;
    meta["has_boundary_mass"] = curve.has_boundary_mass;
    meta["levels"] = curve.levels;
    std::ofstream side(csv_path + ".json");
    if (!side) throw InvalidArgument("cannot write " + csv_path + ".json");
    side << meta.dump(2) << '\n';
}

CurveFile read_curve(const std::string& csv_path) {
    const CsvTable t = read_csv(csv_path, {"param", "value"});
    std::vector<double> g, v;
    for (const auto& r : t.rows) {
        g.push_back(r[0]);
        v.push_back(r[1]);
    }
    CurveFile f;
    f.grid = ParamGrid(std::move(g));
    f.values = std::move(v);
    std::ifstream side(csv_path + ".json");
    if (side) {
        nlohmann::json meta;
        try {
            side >> meta;
        } catch (const nlohmann::json::exception& e) {
            throw InvalidArgument(csv_path + ".json: " + e.what());
        }
        f.kind = meta.value("kind", "");
        f.boundary_mass = meta.value("boundary_mass", 0.0);
        f.has_boundary_mass = meta.value("has_boundary_mass", false);
        if (meta.contains("levels")) f.levels = meta["levels"].get<std::vector<double>>();
    }
    return f;
}

CurveFile to_file(const ConfidenceDistribution& cd) {
    return {"cd", cd.grid, cd.values, cd.boundary_mass_at_lo, cd.has_boundary_mass, {}};
}

CurveFile to_file(const ConfidenceCurve& cc) {
    return {"cc", cc.grid, cc.values, cc.boundary_mass_at_lo, cc.has_boundary_mass, {}};
}

CurveFile to_file(const ConfidenceLogLik& ll) { return {"loglik", ll.grid, ll.values, 0.0, false, {}}; }

ConfidenceDistribution cd_from_file(const CurveFile& f) {
    ConfidenceDistribution cd(f.grid, f.values);
    cd.has_boundary_mass = f.has_boundary_mass;
    cd.boundary_mass_at_lo = f.boundary_mass;
    cd.validate();
    return cd;
}

ConfidenceCurve cc_from_file(const CurveFile& f) {
    ConfidenceCurve cc(f.grid, f.values);
    cc.has_boundary_mass = f.has_boundary_mass;
    cc.boundary_mass_at_lo = f.boundary_mass;
    cc.validate();
    return cc;
}

ConfidenceLogLik loglik_from_file(const CurveFile& f) { return ConfidenceLogLik(f.grid, f.values); }

}  // namespace ccfuse
