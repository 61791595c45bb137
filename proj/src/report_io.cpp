#include "ainfty/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "ainfty/num_format.hpp"

namespace ainfty {

namespace {

using nlohmann::json;

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

json number_or_null(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

double number_from(const json& j) {
  if (j.is_null()) return kNan;
  return j.get<double>();
}

json witness_to_json(const Witness& wit) {
  json j;
  j["level"] = wit.level;
  j["atom"] = wit.atom_id;
  if (wit.atom_index == Atom::npos) {
    j["atom_index"] = nullptr;
  } else {
    j["atom_index"] = wit.atom_index;
  }
  j["param"] = number_or_null(wit.param);
  return j;
}

Witness witness_from_json(const json& j) {
  Witness wit;
  wit.level = j.at("level").get<int>();
  wit.atom_id = j.at("atom").get<std::string>();
  const json& idx = j.at("atom_index");
  wit.atom_index = idx.is_null() ? Atom::npos : idx.get<std::size_t>();
  wit.param = number_from(j.at("param"));
  return wit;
}

// the fixed family order used by both the JSON and CSV emitters
constexpr const char* kScalarKeys[] = {"regularity", "aexp", "alog", "amed",
                                       "astar"};
constexpr const char* kFamilyKeys[] = {"ap", "rh",    "asw", "acon",
                                       "am", "amhat", "acf", "alambda"};

const ReportEntry& scalar_entry(const ConstantReport& r, std::string_view k) {
  if (k == "regularity") return r.regularity;
  if (k == "aexp") return r.aexp;
  if (k == "alog") return r.alog;
  if (k == "amed") return r.amed;
  if (k == "astar") return r.astar;
  throw std::logic_error("unknown scalar constant");
}

const std::map<double, ReportEntry>& family_entries(const ConstantReport& r,
                                                    std::string_view k) {
  if (k == "ap") return r.ap;
  if (k == "rh") return r.rh;
  if (k == "asw") return r.asw;
  if (k == "acon") return r.acon;
  if (k == "am") return r.am;
  if (k == "amhat") return r.amhat;
  if (k == "acf") return r.acf;
  if (k == "alambda") return r.alambda;
  throw std::logic_error("unknown constant family");
}

std::map<double, ReportEntry>& family_entries(ConstantReport& r,
                                              std::string_view k) {
  return const_cast<std::map<double, ReportEntry>&>(
      family_entries(static_cast<const ConstantReport&>(r), k));
}

ReportEntry& scalar_entry(ConstantReport& r, std::string_view k) {
  return const_cast<ReportEntry&>(
      scalar_entry(static_cast<const ConstantReport&>(r), k));
}

double param_from_key(const std::string& key) {
  std::size_t used = 0;
  double p = std::stod(key, &used);
  if (used != key.size()) {
    throw std::invalid_argument("bad parameter key '" + key + "'");
  }
  return p;
}

// core fields shared by single searches and scan entries
json result_core(const SearchResult& result) {
  json j;
  j["feasible"] = result.feasible;
  j["best_objective"] = number_or_null(result.best_objective);
  j["best_weight"] = result.best_weight;
  json trace = json::array();
  for (double v : result.trace) trace.push_back(number_or_null(v));
  j["trace"] = std::move(trace);
  if (result.feasible) {
    j["report"] = report_to_json(result.report, result.best_weight);
  } else {
    j["report"] = nullptr;
  }
  return j;
}

void spec_fields(json& j, const SearchSpec& spec) {
  j["objective"] = spec.objective.str();
  j["constraint"] = spec.constraint ? json(spec.constraint->str()) : json();
  j["budget"] = spec.budget;
  j["seed"] = spec.seed;
  j["scale"] = spec.scale;
  j["restarts"] = spec.restarts;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_num(double v) {
  if (!std::isfinite(v)) return "";
  return format_double(v);
}

void csv_row(std::string& out, const ConstantReport& r, std::string_view name,
             double param, const ReportEntry& e) {
  out += csv_escape(r.weight);
  out += ',';
  out += name;
  out += ',';
  out += std::isnan(param) ? "" : format_double(param);
  out += ',';
  out += csv_num(e.value);
  out += ',';
  out += std::to_string(e.witness.level);
  out += ',';
  out += csv_escape(e.witness.atom_id);
  out += '\n';
}

}  // namespace

json report_to_json(const ConstantReport& report,
                    std::span<const double> values) {
  json doc;
  doc["weight"] = report.weight;
  doc["values"] = std::vector<double>(values.begin(), values.end());
  doc["envelope"] = report.envelope;
  json wits;
  for (const char* key : kScalarKeys) {
    const ReportEntry& e = scalar_entry(report, key);
    doc[key] = number_or_null(e.value);
    wits[key] = witness_to_json(e.witness);
  }
  for (const char* key : kFamilyKeys) {
    json fam = json::object();
    for (const auto& [p, e] : family_entries(report, key)) {
      std::string pk = format_double(p);
      fam[pk] = number_or_null(e.value);
      wits[std::string(key) + ":" + pk] = witness_to_json(e.witness);
    }
    doc[key] = std::move(fam);
  }
  doc["witnesses"] = std::move(wits);
  return doc;
}

ParsedReport report_from_json(const json& doc) {
  ParsedReport out;
  out.report.weight = doc.at("weight").get<std::string>();
  out.values = doc.at("values").get<std::vector<double>>();
  out.report.envelope = doc.at("envelope").get<bool>();
  const json& wits = doc.at("witnesses");
  for (const char* key : kScalarKeys) {
    ReportEntry& e = scalar_entry(out.report, key);
    e.value = number_from(doc.at(key));
    e.witness = witness_from_json(wits.at(key));
  }
  for (const char* key : kFamilyKeys) {
    auto& fam = family_entries(out.report, key);
    for (const auto& [pk, v] : doc.at(key).items()) {
      ReportEntry e;
      e.value = number_from(v);
      e.witness = witness_from_json(wits.at(std::string(key) + ":" + pk));
      fam.emplace(param_from_key(pk), std::move(e));
    }
  }
  return out;
}

json check_to_json(const CheckResult& result) {
  json j;
  j["check"] = result.check;
  j["weight"] = result.weight;
  j["passed"] = result.passed;
  j["worst_slack"] = number_or_null(result.worst_slack);
  j["witness"] = result.witness;
  return j;
}

json search_result_to_json(const SearchSpec& spec, const SearchResult& result) {
  json j = result_core(result);
  j["schema"] = kSearchSchema;
  j["depth"] = spec.depth;
  spec_fields(j, spec);
  return j;
}

json gap_scan_to_json(const SearchSpec& spec_template,
                      std::span<const GapEntry> entries) {
  json j;
  j["schema"] = kSearchSchema;
  spec_fields(j, spec_template);
  json scan = json::array();
  for (const GapEntry& entry : entries) {
    json e = result_core(entry.result);
    e["depth"] = entry.depth;
    e["seed"] = entry.seed;
    scan.push_back(std::move(e));
  }
  j["scan"] = std::move(scan);
  return j;
}

std::string reports_to_csv(std::span<const ConstantReport> reports) {
  std::string out = "weight,characterization,param,value,level,atom\n";
  for (const ConstantReport& r : reports) {
    for (const char* key : kScalarKeys) {
      csv_row(out, r, key, kNan, scalar_entry(r, key));
    }
    for (const char* key : kFamilyKeys) {
      for (const auto& [p, e] : family_entries(r, key)) {
        csv_row(out, r, key, p, e);
      }
    }
  }
  return out;
}

std::string trace_to_csv(const SearchResult& result) {
  std::string out = "iteration,best_objective\n";
  for (std::size_t i = 0; i < result.trace.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += csv_num(result.trace[i]);
    out += '\n';
  }
  return out;
}

std::string gap_scan_to_csv(std::span<const GapEntry> entries) {
  std::string out = "depth,seed,feasible,objective\n";
  for (const GapEntry& e : entries) {
    out += std::to_string(e.depth);
    out += ',';
    out += std::to_string(e.seed);
    out += ',';
    out += e.result.feasible ? '1' : '0';
    out += ',';
    out += csv_num(e.result.best_objective);
    out += '\n';
  }
  return out;
}

std::string profile_to_csv(const Filtration& f, const Weight& w,
                           const GridConfig& grids) {
  std::string name = csv_escape(w.name);
  std::string out = "section,weight,level,atom,t,h\n";
  ProfileSet profiles = ProfileSet::build(f, w);
  for (int n = 0; n <= f.depth(); ++n) {
    auto atoms = f.level(n);
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      const ConcentrationProfile& prof = profiles.at(n, k);
      for (const ProfilePoint& pt : prof.points) {
        out += "profile,";
        out += name;
        out += ',';
        out += std::to_string(n);
        out += ',';
        out += csv_escape(atoms[k].id);
        out += ',';
        out += csv_num(pt.t);
        out += ',';
        out += csv_num(pt.h);
        out += '\n';
      }
    }
  }

  out += "\nsection,weight,gamma,delta\n";
  for (double gamma : grids.gamma) {
    out += "acon,";
    out += name;
    out += ',';
    out += csv_num(gamma);
    out += ',';
    out += csv_num(acon_profile(f, w, gamma).value);
    out += '\n';
  }

  // power-mean curve, densified near the s -> 1 endpoint where the values
  // collapse to the plain mean
  std::vector<double> s_vals(grids.s.begin(), grids.s.end());
  s_vals.insert(s_vals.end(), {0.9, 0.99, 0.999});
  std::sort(s_vals.begin(), s_vals.end());
  s_vals.erase(std::unique(s_vals.begin(), s_vals.end()), s_vals.end());
  out += "\nsection,weight,s,value\n";
  for (double s : s_vals) {
    out += "asw,";
    out += name;
    out += ',';
    out += csv_num(s);
    out += ',';
    out += csv_num(asw_constant(f, w, s).value);
    out += '\n';
  }
  out += "asw,";
  out += name;
  out += ",1,1\n";

  out += "\nsection,weight,beta,level,atom,lambda,tail_mean,tail_prob,ratio\n";
  for (double beta : grids.beta) {
    Extremum best = alambda_constant(f, w, beta);
    auto rows = alambda_breakpoints(f, w, beta, best.where.level,
                                    best.where.atom_index);
    for (const AlambdaBreakpoint& bp : rows) {
      out += "alambda,";
      out += name;
      out += ',';
      out += csv_num(beta);
      out += ',';
      out += std::to_string(best.where.level);
      out += ',';
      out += csv_escape(best.where.atom_id);
      out += ',';
      out += csv_num(bp.lambda);
      out += ',';
      out += csv_num(bp.tail_mean);
      out += ',';
      out += csv_num(bp.tail_prob);
      out += ',';
      out += csv_num(bp.ratio);
      out += '\n';
    }
  }
  return out;
}

}  // namespace ainfty
