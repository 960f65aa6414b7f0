// ccfuse: command-line driver for confidence-curve fusion.
//
//   ccfuse meta    --model normal-re|tables-or|tables-rr|tables-rd --input FILE ...
//   ccfuse fuse    --interval LO:MEDIAN:HI | --source CURVE.csv ... --focus EXPR
//   ccfuse bench   --scenario FILE.json
//   ccfuse convert --input CURVE.csv --method chi2|normal --out FILE.csv
//   ccfuse curve   --type normal|t|median|interval ...
//
// Exit status: 0 success, 2 input error, 3 numerical failure, 4 degenerate
// data (always for errors the modules raise as such; with --strict also for
// flags such as an infinite estimate or a skipped correction).

#include "ccfuse/bench/benchmark.hpp"
#include "ccfuse/cd/constructors.hpp"
#include "ccfuse/cd/convert.hpp"
#include "ccfuse/cd/io.hpp"
#include "ccfuse/cd/summary.hpp"
#include "ccfuse/error.hpp"
#include "ccfuse/fuse/fixed.hpp"
#include "ccfuse/fuse/focus.hpp"
#include "ccfuse/meta/normal_re.hpp"
#include "ccfuse/meta/tables.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace ccfuse;
using nlohmann::json;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitDegenerate = 4;

struct Global {
    int threads = 0;
    bool strict = false;
};

// Raised under --strict for conditions that are otherwise reported only.
struct StrictFlag : DegenerateData {
    using DegenerateData::DegenerateData;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    return out;
}

double to_double(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw InvalidArgument("cannot parse " + what + " '" + s + "' as a number");
    }
}

std::vector<double> parse_levels(const std::string& text) {
    std::vector<double> out;
    for (const auto& p : split(text, ',')) {
        const double v = to_double(p, "level");
        if (!(v > 0.0 && v < 1.0)) throw InvalidArgument("levels must lie in (0, 1), got " + p);
        out.push_back(v);
    }
    if (out.empty()) throw InvalidArgument("empty level list");
    return out;
}

// lo:hi:n
std::optional<ParamGrid> parse_grid(const std::string& text) {
    if (text.empty()) return std::nullopt;
    const auto p = split(text, ':');
    if (p.size() != 3) throw InvalidArgument("grid must be lo:hi:n, got '" + text + "'");
    const double lo = to_double(p[0], "grid start"), hi = to_double(p[1], "grid end");
    const double n = to_double(p[2], "grid size");
    if (!(hi > lo) || n < 2 || n != std::floor(n)) throw InvalidArgument("grid needs lo < hi and an integer n >= 2");
    return ParamGrid::linspace(lo, hi, static_cast<std::size_t>(n));
}

json num(double x) {
    if (std::isnan(x)) return nullptr;
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

json summary_json(const CurveSummary& s) {
    json pieces = json::array();
    for (const auto& p : s.intervals)
        pieces.push_back({{"lo", num(p.lo)}, {"hi", num(p.hi)}, {"lo_open", p.lo_open}, {"hi_open", p.hi_open}});
    json j = {{"level", s.level}, {"point_estimate", num(s.point_estimate)}, {"intervals", pieces}};
    if (s.has_boundary_mass) j["boundary_mass"] = s.boundary_mass;
    return j;
}

json fusion_json(const FusionResult& r) {
    json iv = json::array();
    for (const auto& s : r.intervals) iv.push_back(summary_json(s));
    const auto& d = r.diagnostics;
    json diag = {{"optimizer_evaluations", d.optimizer_evaluations},
                 {"correction_applied", d.correction_applied},
                 {"border_rule_triggered", d.border_rule_triggered},
                 {"excluded", d.excluded.size()},
                 {"correction_skipped_at", d.correction_skipped_at},
                 {"notes", d.notes}};
    return {{"estimate", num(r.estimate)}, {"intervals", iv}, {"diagnostics", diag}};
}

// Every option of a subcommand with its value or default, for the output.
json config_json(const CLI::App& sub, const Global& g) {
    json opts = json::object();
    for (const CLI::Option* o : sub.get_options()) {
        std::string name = o->get_name(false, true);
        if (name.empty() || name.find("help") != std::string::npos) continue;
        while (!name.empty() && name.front() == '-') name.erase(name.begin());
        if (o->get_type_size() == 0) {
            opts[name] = o->count() > 0;
        } else if (o->count() > 0) {
            const auto& res = o->results();
            opts[name] = res.size() == 1 ? json(res[0]) : json(res);
        } else {
            opts[name] = o->get_default_str();
        }
    }
    return {{"command", sub.get_name()}, {"options", opts}, {"threads", g.threads}, {"strict", g.strict}};
}

void check_strict(const Global& g, const FusionResult& r) {
    if (!g.strict) return;
    if (std::isinf(r.estimate)) throw StrictFlag("estimate is infinite");
    if (!r.diagnostics.correction_skipped_at.empty()) throw StrictFlag("correction skipped at some focus values");
}

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write " + path);
    out << j.dump(2) << '\n';
}

// With an output prefix: <prefix>.json summary and <prefix>.csv curve, and a
// short echo on stdout. Without: the summary JSON on stdout.
void emit(const json& summary, const std::string& prefix, const std::optional<CurveFile>& curve) {
    if (prefix.empty()) {
        std::cout << summary.dump(2) << '\n';
        return;
    }
    write_json(prefix + ".json", summary);
    if (curve) write_curve(prefix + ".csv", *curve);
    if (summary.contains("estimate")) std::cout << "estimate " << summary["estimate"].dump() << '\n';
    if (summary.contains("intervals")) {
        for (const auto& s : summary["intervals"]) {
            std::cout << "level " << s["level"].dump() << ':';
            for (const auto& p : s["intervals"]) std::cout << " [" << p["lo"].dump() << ", " << p["hi"].dump() << ']';
            std::cout << '\n';
        }
    }
}

// ---------------------------------------------------------------------------
// meta

struct MetaOptions {
    std::string model;
    std::string input;
    std::string focus = "psi0";
    bool correct = false;
    std::string calibrate = "wilks";
    std::string variant = "cml";
    std::string method = "standard";
    std::string levels = "0.9,0.95";
    std::string grid;
    std::optional<std::uint64_t> seed;
    std::size_t sims = 10000;
    std::string out;
};

json meta_normal(const MetaOptions& o, const Global& g, std::optional<CurveFile>& curve) {
    const auto in = NormalREInput::read_csv(o.input);
    const auto levels = parse_levels(o.levels);
    const auto grid = parse_grid(o.grid);
    FusionResult r;
    if (o.focus == "psi0") {
        if (o.calibrate != "wilks") throw InvalidArgument("--calibrate applies to --focus tau only");
        r = profile_psi0(in, o.correct, grid, levels);
    } else if (o.focus == "tau") {
        TauVariant v;
        if (o.variant == "ml") v = TauVariant::ml;
        else if (o.variant == "cml") v = TauVariant::cml;
        else throw InvalidArgument("unknown --variant '" + o.variant + "' (expected ml or cml)");
        const ParamGrid tg = grid ? *grid : default_tau_grid(in);
        if (o.calibrate == "wilks") {
            const auto p = tau_profiles(in, tg);
            r = finish_profile(p.tau, v == TauVariant::ml ? p.a : p.b, nullptr, levels);
        } else if (o.calibrate == "exact") {
            ExactTauOptions eo;
            eo.sims = o.sims;
            eo.threads = g.threads;
            if (o.seed) eo.rng = {*o.seed, 0};
            r = finish_curve(exact_cc_tau(in, v, tg, eo), levels);
        } else if (o.calibrate == "qk") {
            r = finish_curve(cc_from_cd(qk_cd_tau(in, tg)), levels);
            r.estimate = qk_tau_quantile(in, 0.5);
        } else {
            throw InvalidArgument("unknown --calibrate '" + o.calibrate + "' (expected wilks, exact or qk)");
        }
    } else {
        throw InvalidArgument("unknown --focus '" + o.focus + "' for normal-re (expected psi0 or tau)");
    }
    check_strict(g, r);
    curve = to_file(r.cc);
    curve->levels = levels;
    return fusion_json(r);
}

json meta_tables(const MetaOptions& o, const Global& g, std::optional<CurveFile>& curve) {
    const EffectMeasure m = parse_effect_measure(o.model.substr(std::string("tables-").size()));
    const auto tables = read_tables_csv(o.input);
    const auto levels = parse_levels(o.levels);
    const auto grid = parse_grid(o.grid);
    const bool log_or = m == EffectMeasure::log_odds_ratio;
    if (o.method == "mh") {
        json iv = json::array();
        json j;
        for (double level : levels) {
            const auto r = mantel_haenszel(tables, m, level);
            if (g.strict && r.whole_line) throw StrictFlag("Mantel-Haenszel interval is the whole line");
            j["estimate"] = num(r.estimate);
            j["se"] = num(r.se);
            iv.push_back({{"level", level},
                          {"point_estimate", num(r.estimate)},
                          {"intervals", json::array({{{"lo", num(r.lo)}, {"hi", num(r.hi)}}})},
                          {"whole_line", r.whole_line}});
        }
        j["intervals"] = iv;
        return j;
    }
    FusionResult r;
    if (o.method == "standard") {
        r = standard_iiccff(tables, m, grid, levels);
    } else if (o.method == "exact" || o.method == "optimal" || o.method == "random") {
        if (!log_or) throw InvalidArgument("--method " + o.method + " needs the log odds ratio (tables-or)");
        if (o.method == "exact") {
            r = fused_cc_exact_or(tables, grid, levels);
        } else if (o.method == "optimal") {
            const auto opt = optimal_cd_common_exact(tables, grid ? *grid : default_effect_grid(m));
            if (opt.flat) throw DegenerateData("no informative table");
            r = finish_curve(cc_from_cd(opt.cd), levels);
        } else {
            RandomTablesOptions ro;
            ro.psi0_grid = grid;
            ro.levels = levels;
            r = random_effects_2x2(tables, o.correct, ro);
        }
    } else {
        throw InvalidArgument("unknown --method '" + o.method + "' (expected standard, exact, optimal, random or mh)");
    }
    check_strict(g, r);
    curve = to_file(r.cc);
    curve->levels = levels;
    return fusion_json(r);
}

// ---------------------------------------------------------------------------
// fuse

struct FuseOptions {
    std::vector<std::string> sources;
    std::vector<std::string> intervals;
    std::string intervals_csv;
    std::string focus;
    std::string grid;
    std::string prior;
    std::string levels = "0.9,0.95";
    std::string out;
};

ConfidenceLogLik loglik_from_curve_file(const std::string& path) {
    const CurveFile f = read_curve(path);
    if (f.kind == "cd") return chi2_convert(cc_from_cd(cd_from_file(f)));
    if (f.kind == "cc") return chi2_convert(cc_from_file(f));
    if (f.kind == "loglik") return loglik_from_file(f);
    throw InvalidArgument("curve file '" + path + "' has kind '" + f.kind + "'; expected cd, cc or loglik");
}

json fuse_command(const FuseOptions& o, const Global& g, std::optional<CurveFile>& curve) {
    const auto levels = parse_levels(o.levels);
    std::vector<ConfidenceLogLik> lls;
    json sources = json::array();
    auto add_interval = [&](double lo, double med, double hi, double level) {
        const auto icd = cd_from_interval(med, lo, hi, level);
        lls.push_back(chi2_convert(cc_from_cd(icd.cd)));
        sources.push_back({{"type", "interval"}, {"lo", lo}, {"median", med}, {"hi", hi}, {"level", level},
                           {"a", icd.a}, {"s", icd.s}, {"log_transform", icd.log_transform}});
    };
    if (!o.intervals_csv.empty()) {
        const auto t = read_csv(o.intervals_csv, {"lo", "median", "hi"}, {"level"});
        for (const auto& row : t.rows) add_interval(row[0], row[1], row[2], row.size() > 3 ? row[3] : 0.95);
    }
    for (const auto& s : o.intervals) {
        const auto p = split(s, ':');
        if (p.size() != 3 && p.size() != 4) throw InvalidArgument("--interval must be LO:MEDIAN:HI[:LEVEL], got '" + s + "'");
        add_interval(to_double(p[0], "interval"), to_double(p[1], "interval"), to_double(p[2], "interval"),
                     p.size() == 4 ? to_double(p[3], "level") : 0.95);
    }
    for (const auto& path : o.sources) {
        lls.push_back(loglik_from_curve_file(path));
        sources.push_back({{"type", "curve"}, {"path", path}});
    }
    if (lls.empty()) throw InvalidArgument("fuse needs at least one source (--interval, --intervals-csv or --source)");

    const std::size_t k = lls.size();
    const std::string focus = o.focus.empty() ? (k == 1 ? "p1" : "common") : o.focus;
    const FocusMap map = focus == "common" ? FocusMap::common_parameter(k) : FocusMap::expression(focus, k);
    std::optional<ParamGrid> grid = parse_grid(o.grid);
    if (!grid) {
        if (focus == "common") {
            grid = lls[0].grid;
        } else {
            const auto e = FocusExpression::parse(focus, k);
            const bool single = e.variables().size() == 1 && focus.find_first_not_of(" p0123456789") == std::string::npos;
            if (!single) throw InvalidArgument("--grid is required for focus '" + focus + "'");
            grid = lls[e.variables()[0]].grid;
        }
    }
    ProfileOptions po;
    po.levels = levels;
    FusionResult r = fuse_fixed(lls, map, *grid, po);
    json j = fusion_json(r);
    if (!o.prior.empty()) {
        const auto p = split(o.prior, ':');
        if (p.size() != 3 || p[0] != "normal") throw InvalidArgument("--prior must be normal:MEAN:SD, got '" + o.prior + "'");
        const double m = to_double(p[1], "prior mean"), s = to_double(p[2], "prior sd");
        if (!(s > 0.0)) throw InvalidArgument("prior sd must be positive");
        const auto prior = chi2_convert(cc_from_cd(normal_cd({m, s, {}}, ParamGrid::linspace(m - 8 * s, m + 8 * s, 801))));
        const json base = std::move(j);
        r = add_prior(r, prior, levels);
        j = fusion_json(r);
        j["without_prior"] = base;
    }
    check_strict(g, r);
    j["focus"] = focus;
    j["sources"] = sources;
    curve = to_file(r.cc);
    curve->levels = levels;
    return j;
}

// ---------------------------------------------------------------------------
// convert and curve

struct ConvertOptions {
    std::string input;
    std::string method = "chi2";
    std::string out;
};

json convert_command(const ConvertOptions& o, std::optional<CurveFile>& curve) {
    const CurveFile f = read_curve(o.input);
    ConfidenceLogLik ll;
    if (o.method == "chi2") {
        if (f.kind == "cd") ll = chi2_convert(cc_from_cd(cd_from_file(f)));
        else if (f.kind == "cc") ll = chi2_convert(cc_from_file(f));
        else throw InvalidArgument("chi2 conversion needs a cd or cc file, got kind '" + f.kind + "'");
    } else if (o.method == "normal") {
        if (f.kind != "cd") throw InvalidArgument("normal conversion needs a cd file, got kind '" + f.kind + "'");
        ll = normal_convert(cd_from_file(f));
    } else {
        throw InvalidArgument("unknown --method '" + o.method + "' (expected chi2 or normal)");
    }
    curve = to_file(ll);
    return {{"points", ll.grid.size()}, {"argmax", ll.argmax_value()}};
}

struct CurveOptions {
    std::string type;
    std::optional<double> estimate, stddev, df;
    std::optional<double> median, lo, hi;
    double level = 0.95;
    std::string sample;
    std::string values;
    std::string grid;
    std::string levels = "0.9,0.95";
    std::string out;
};

json curve_command(const CurveOptions& o, std::optional<CurveFile>& curve) {
    const auto levels = parse_levels(o.levels);
    const auto grid = parse_grid(o.grid);
    ConfidenceDistribution cd;
    json j = json::object();
    if (o.type == "normal" || o.type == "t") {
        if (!o.estimate || !o.stddev) throw InvalidArgument("--estimate and --stddev are required");
        StudySummary s{*o.estimate, *o.stddev, {}};
        if (o.type == "t") {
            if (!o.df) throw InvalidArgument("--df is required for a t curve");
            s.df = *o.df;
            cd = grid ? t_cd(s, *grid) : t_cd(s);
        } else {
            cd = grid ? normal_cd(s, *grid) : normal_cd(s);
        }
    } else if (o.type == "median") {
        std::vector<double> x;
        if (!o.sample.empty()) {
            for (const auto& r : read_csv(o.sample, {"x"}).rows) x.push_back(r[0]);
        } else {
            for (const auto& v : split(o.values, ',')) x.push_back(to_double(v, "sample value"));
        }
        if (x.empty()) throw InvalidArgument("median curve needs --sample FILE or --values LIST");
        cd = median_cd_distribution(x, grid);
    } else if (o.type == "interval") {
        if (!o.median || !o.lo || !o.hi) throw InvalidArgument("--median, --lo and --hi are required");
        const auto icd = cd_from_interval(*o.median, *o.lo, *o.hi, o.level);
        cd = icd.cd;
        j["a"] = icd.a;
        j["s"] = icd.s;
        j["log_transform"] = icd.log_transform;
    } else {
        throw InvalidArgument("unknown --type '" + o.type + "' (expected normal, t, median or interval)");
    }
    const auto cc = cc_from_cd(cd);
    json iv = json::array();
    for (double level : levels) iv.push_back(summary_json(summarize(cc, level)));
    j["estimate"] = num(cd.quantile(0.5));
    j["intervals"] = iv;
    curve = to_file(cd);
    curve->levels = levels;
    return j;
}

// ---------------------------------------------------------------------------
// bench

struct BenchCliOptions {
    std::string scenario;
    std::string methods;
    std::optional<std::size_t> reps;
    std::optional<std::uint64_t> seed;
    bool replications = false;
    std::string out;
};

int bench_command(const BenchCliOptions& o, const Global& g, const json& config) {
    auto s = bench::Scenario::load(o.scenario);
    if (o.reps) s.reps = *o.reps;
    if (o.seed) s.seed = *o.seed;
    std::vector<std::string> methods;
    if (!o.methods.empty()) methods = split(o.methods, ',');
    bench::BenchOptions bo;
    bo.threads = g.threads;
    bo.keep_replications = o.replications;
    const auto report = bench::run_benchmark(s, methods, bo);
    json j = report.to_json();
    j["config"] = config;
    if (o.out.empty()) {
        std::cout << report.to_csv();
    } else {
        write_json(o.out + ".json", j);
        std::ofstream csv(o.out + ".csv");
        if (!csv) throw InvalidArgument("cannot write " + o.out + ".csv");
        csv << report.to_csv();
        std::cout << report.to_csv();
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Confidence-curve fusion: meta-analysis, fusion of published curves and benchmarks"};
    app.require_subcommand(1);
    app.fallthrough();
    Global g;
    app.add_option("--threads", g.threads, "worker threads for simulation loops (0: CCFUSE_THREADS or all cores)")
        ->check(CLI::NonNegativeNumber);
    app.add_flag("--strict", g.strict, "treat degenerate-data flags as errors (exit 4)");

    MetaOptions mo;
    auto* meta = app.add_subcommand("meta", "meta-analysis of study summaries or 2x2 tables");
    meta->add_option("--model", mo.model, "normal-re, tables-or, tables-rr or tables-rd")->required();
    meta->add_option("--input", mo.input, "CSV: estimate,stddev for normal-re; y1,m1,y0,m0 for tables")
        ->required()
        ->check(CLI::ExistingFile);
    meta->add_option("--focus", mo.focus, "normal-re focus: psi0 or tau")->capture_default_str();
    meta->add_flag("--correct", mo.correct, "apply the log-tau correction");
    meta->add_option("--calibrate", mo.calibrate, "tau curve: wilks, exact (simulated) or qk")->capture_default_str();
    meta->add_option("--variant", mo.variant, "tau likelihood: ml or cml")->capture_default_str();
    meta->add_option("--method", mo.method, "tables: standard, exact, optimal, random or mh")->capture_default_str();
    meta->add_option("--levels", mo.levels, "comma-separated confidence levels")->capture_default_str();
    meta->add_option("--grid", mo.grid, "focus grid lo:hi:n");
    meta->add_option("--seed", mo.seed, "seed for simulated calibration");
    meta->add_option("--sims", mo.sims, "simulations for exact calibration")->capture_default_str();
    meta->add_option("--out", mo.out, "output prefix for <prefix>.json and <prefix>.csv");

    FuseOptions fo;
    auto* fuse = app.add_subcommand("fuse", "fuse per-source curves to a focus parameter");
    fuse->add_option("--source", fo.sources, "curve CSV (cd, cc or loglik, with JSON sidecar); repeatable")
        ->check(CLI::ExistingFile);
    fuse->add_option("--interval", fo.intervals, "LO:MEDIAN:HI[:LEVEL] summary; repeatable");
    fuse->add_option("--intervals-csv", fo.intervals_csv, "CSV lo,median,hi[,level], one source per row")
        ->check(CLI::ExistingFile);
    fuse->add_option("--focus", fo.focus, "expression over p1..pk, or 'common'");
    fuse->add_option("--grid", fo.grid, "focus grid lo:hi:n");
    fuse->add_option("--prior", fo.prior, "prior on the focus, normal:MEAN:SD");
    fuse->add_option("--levels", fo.levels, "comma-separated confidence levels")->capture_default_str();
    fuse->add_option("--out", fo.out, "output prefix");

    BenchCliOptions bo;
    auto* bench_cmd = app.add_subcommand("bench", "run a Monte Carlo benchmark scenario");
    bench_cmd->add_option("--scenario", bo.scenario, "scenario JSON")->required()->check(CLI::ExistingFile);
    bench_cmd->add_option("--methods", bo.methods, "comma-separated subset of methods");
    bench_cmd->add_option("--reps", bo.reps, "override the replication count");
    bench_cmd->add_option("--seed", bo.seed, "override the seed");
    bench_cmd->add_flag("--replications", bo.replications, "include per-replication outcomes in the JSON");
    bench_cmd->add_option("--out", bo.out, "output prefix for <prefix>.json and <prefix>.csv");

    ConvertOptions co;
    auto* convert = app.add_subcommand("convert", "convert a cd/cc curve file to a log-likelihood file");
    convert->add_option("--input", co.input, "curve CSV")->required()->check(CLI::ExistingFile);
    convert->add_option("--method", co.method, "chi2 or normal")->capture_default_str();
    convert->add_option("--out", co.out, "output curve CSV")->required();

    CurveOptions cvo;
    auto* curve_cmd = app.add_subcommand("curve", "construct a CD from a summary or a sample");
    curve_cmd->add_option("--type", cvo.type, "normal, t, median or interval")->required();
    curve_cmd->add_option("--estimate", cvo.estimate);
    curve_cmd->add_option("--stddev", cvo.stddev);
    curve_cmd->add_option("--df", cvo.df);
    curve_cmd->add_option("--median", cvo.median);
    curve_cmd->add_option("--lo", cvo.lo);
    curve_cmd->add_option("--hi", cvo.hi);
    curve_cmd->add_option("--level", cvo.level, "level of the LO..HI interval")->capture_default_str();
    curve_cmd->add_option("--sample", cvo.sample, "CSV with a column x")->check(CLI::ExistingFile);
    curve_cmd->add_option("--values", cvo.values, "comma-separated sample");
    curve_cmd->add_option("--grid", cvo.grid, "grid lo:hi:n");
    curve_cmd->add_option("--levels", cvo.levels, "comma-separated confidence levels")->capture_default_str();
    curve_cmd->add_option("--out", cvo.out, "output prefix");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    try {
        std::optional<CurveFile> curve;
        if (meta->parsed()) {
            json j;
            if (mo.model == "normal-re") j = meta_normal(mo, g, curve);
            else if (mo.model.rfind("tables-", 0) == 0) j = meta_tables(mo, g, curve);
            else throw InvalidArgument("unknown --model '" + mo.model +
                                       "' (expected normal-re, tables-or, tables-rr or tables-rd)");
            j["config"] = config_json(*meta, g);
            emit(j, mo.out, curve);
        } else if (fuse->parsed()) {
            json j = fuse_command(fo, g, curve);
            j["config"] = config_json(*fuse, g);
            emit(j, fo.out, curve);
        } else if (bench_cmd->parsed()) {
            return bench_command(bo, g, config_json(*bench_cmd, g));
        } else if (convert->parsed()) {
            json j = convert_command(co, curve);
            j["config"] = config_json(*convert, g);
            write_curve(co.out, *curve);
            std::cout << j.dump(2) << '\n';
        } else if (curve_cmd->parsed()) {
            json j = curve_command(cvo, curve);
            j["config"] = config_json(*curve_cmd, g);
            emit(j, cvo.out, curve);
        }
    } catch (const DegenerateData& e) {
        std::cerr << "error: " << (dynamic_cast<const UndefinedEstimate*>(&e) ? "undefined estimate: " : "degenerate data: ")
                  << e.what() << '\n';
        return kExitDegenerate;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const NumericalError& e) {
        std::cerr << "error: numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return 0;
}
