#include "qsat/io.hpp"

#include <fstream>
#include <sstream>

#include "qsat/errors.hpp"

namespace qsat {

using nlohmann::json;

namespace {

const json& field(const json& object, const std::string& name, const std::string& path) {
  if (!object.is_object()) throw ParseError(path.empty() ? "document" : path, "expected an object");
  const auto it = object.find(name);
  if (it == object.end()) throw ParseError(path.empty() ? name : path + "." + name, "missing field");
  return *it;
}

std::size_t as_index(const json& value, const std::string& path) {
  if (!value.is_number_integer() || value.get<std::int64_t>() < 0) {
    throw ParseError(path, "expected a non-negative integer");
  }
  return value.get<std::size_t>();
}

double as_real(const json& value, const std::string& path) {
  if (!value.is_number()) throw ParseError(path, "expected a number");
  return value.get<double>();
}

}  // namespace

json instance_to_json(const QsatInstance& instance) {
  json projectors = json::array();
  for (std::size_t i = 0; i < instance.terms.size(); ++i) {
    const auto* term = std::get_if<RankOneTerm>(&instance.terms[i]);
    if (!term) {
      throw ArgumentError("term " + std::to_string(i) +
                          " is not rank-1; decompose before serializing");
    }
    json amplitudes = json::array();
    for (Eigen::Index a = 0; a < term->amplitudes.size(); ++a) {
      amplitudes.push_back({term->amplitudes(a).real(), term->amplitudes(a).imag()});
    }
    projectors.push_back({{"qubits", term->support}, {"amplitudes", std::move(amplitudes)}});
  }
  return {{"format_version", kFormatVersion},
          {"num_qubits", instance.num_qubits},
          {"epsilon", instance.promise_gap},
          {"projectors", std::move(projectors)}};
}

QsatInstance instance_from_json(const json& doc) {
  const json& version = field(doc, "format_version", "");
  if (!version.is_number_integer() || version.get<int>() != kFormatVersion) {
    throw ParseError("format_version", "unsupported version " + version.dump() + ", expected " +
                                           std::to_string(kFormatVersion));
  }
  QsatInstance instance;
  instance.num_qubits = as_index(field(doc, "num_qubits", ""), "num_qubits");
  instance.promise_gap = as_real(field(doc, "epsilon", ""), "epsilon");
  const json& projectors = field(doc, "projectors", "");
  if (!projectors.is_array()) throw ParseError("projectors", "expected an array");
  for (std::size_t i = 0; i < projectors.size(); ++i) {
    const std::string path = "projectors[" + std::to_string(i) + "]";
    const json& qubits = field(projectors[i], "qubits", path);
    if (!qubits.is_array()) throw ParseError(path + ".qubits", "expected an array");
    RankOneTerm term;
    for (std::size_t q = 0; q < qubits.size(); ++q) {
      term.support.push_back(as_index(qubits[q], path + ".qubits[" + std::to_string(q) + "]"));
    }
    if (term.support.size() > 30) throw ParseError(path + ".qubits", "support too long");
    const json& amplitudes = field(projectors[i], "amplitudes", path);
    const std::size_t expected = std::size_t{1} << term.support.size();
    if (!amplitudes.is_array() || amplitudes.size() != expected) {
      throw ParseError(path + ".amplitudes", "expected an array of " + std::to_string(expected) +
                                                 " [re, im] pairs");
    }
    term.amplitudes.resize(static_cast<Eigen::Index>(expected));
    for (std::size_t a = 0; a < expected; ++a) {
      const std::string apath = path + ".amplitudes[" + std::to_string(a) + "]";
      const json& pair = amplitudes[a];
      if (!pair.is_array() || pair.size() != 2) throw ParseError(apath, "expected [re, im]");
      term.amplitudes(static_cast<Eigen::Index>(a)) =
          Complex(as_real(pair[0], apath + "[0]"), as_real(pair[1], apath + "[1]"));
    }
    instance.terms.emplace_back(std::move(term));
  }
  return instance;
}

std::string serialize_instance(const QsatInstance& instance) {
  return instance_to_json(instance).dump(2) + "\n";
}

QsatInstance parse_instance(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // nlohmann reports "... at line L, column C: ..."
    throw ParseError("syntax", e.what());
  }
  return instance_from_json(doc);
}

QsatInstance read_instance_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), "cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_instance(buffer.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.where(), e.what());
  }
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

Structure structure_from_json(const json& doc) {
  if (doc.is_object() && doc.contains("supports")) {
    Structure s;
    s.num_sites = as_index(field(doc, "num_qubits", ""), "num_qubits");
    const json& supports = doc["supports"];
    if (!supports.is_array()) throw ParseError("supports", "expected an array");
    for (std::size_t i = 0; i < supports.size(); ++i) {
      const std::string path = "supports[" + std::to_string(i) + "]";
      if (!supports[i].is_array()) throw ParseError(path, "expected an array");
      Support support;
      for (std::size_t q = 0; q < supports[i].size(); ++q) {
        support.push_back(as_index(supports[i][q], path + "[" + std::to_string(q) + "]"));
      }
      s.supports.push_back(std::move(support));
    }
    return s;
  }
  const QsatInstance instance = instance_from_json(doc);
  Structure s{instance.num_qubits, {}};
  for (const auto& term : instance.terms) s.supports.push_back(support_of(term));
  return s;
}

void to_json(json& j, const SatVerdict& v) {
  j = {{"verdict", std::string(to_string(v.tag))},
       {"lambda0", v.lambda0},
       {"sat_tolerance", v.sat_tolerance},
       {"unsat_floor", v.unsat_floor},
       {"epsilon", v.promise_gap},
       {"method", std::string(to_string(v.method))}};
  j["nullspace_dim"] = v.nullspace_dim ? json(*v.nullspace_dim) : json(nullptr);
}

void from_json(const json& j, SatVerdict& v) {
  const auto tag = j.at("verdict").get<std::string>();
  if (tag == "satisfiable") {
    v.tag = Verdict::kSatisfiable;
  } else if (tag == "unsatisfiable") {
    v.tag = Verdict::kUnsatisfiable;
  } else if (tag == "indeterminate") {
    v.tag = Verdict::kIndeterminate;
  } else {
    throw ParseError("verdict", "unknown verdict " + tag);
  }
  v.lambda0 = j.at("lambda0").get<double>();
  v.sat_tolerance = j.at("sat_tolerance").get<double>();
  v.unsat_floor = j.at("unsat_floor").get<double>();
  v.promise_gap = j.at("epsilon").get<double>();
  const auto method = j.at("method").get<std::string>();
  v.method = method == "krylov" ? Method::kKrylov : Method::kDense;
  const json& dim = j.at("nullspace_dim");
  v.nullspace_dim = dim.is_null() ? std::nullopt : std::optional<std::size_t>(dim.get<std::size_t>());
}

void to_json(json& j, const BoundReport& r) {
  j = {{"k", r.k},
       {"qlll_lower", r.qlll_lower},
       {"gebauer_lower", r.gebauer_lower},
       {"gebauer_upper_estimate", r.gebauer_upper_estimate},
       {"tovey_lower", r.tovey_lower}};
}

void from_json(const json& j, BoundReport& r) {
  r.k = j.at("k").get<std::size_t>();
  r.qlll_lower = j.at("qlll_lower").get<std::uint64_t>();
  r.gebauer_lower = j.at("gebauer_lower").get<std::uint64_t>();
  r.gebauer_upper_estimate = j.at("gebauer_upper_estimate").get<double>();
  r.tovey_lower = j.at("tovey_lower").get<std::uint64_t>();
}

void to_json(json& j, const EnsembleResult& r) {
  j = {{"trials", r.trials},
       {"unsat_count", r.unsat_count},
       {"sat_count", r.sat_count},
       {"indeterminate_count", r.indeterminate_count},
       {"seed", r.seed},
       {"lambda0", r.lambda0}};
}

void from_json(const json& j, EnsembleResult& r) {
  r.trials = j.at("trials").get<std::size_t>();
  r.unsat_count = j.at("unsat_count").get<std::size_t>();
  r.sat_count = j.at("sat_count").get<std::size_t>();
  r.indeterminate_count = j.at("indeterminate_count").get<std::size_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.lambda0 = j.at("lambda0").get<std::vector<double>>();
}

void to_json(json& j, const DegreeProfile& p) {
  j = {{"per_qubit", p.per_qubit}, {"max_degree", p.max_degree}, {"is_regular", p.is_regular}};
}

void from_json(const json& j, DegreeProfile& p) {
  p.per_qubit = j.at("per_qubit").get<std::vector<std::size_t>>();
  p.max_degree = j.at("max_degree").get<std::size_t>();
  p.is_regular = j.at("is_regular").get<bool>();
}

}  // namespace qsat
