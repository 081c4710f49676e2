#include "qsat/cli.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qsat/bounds.hpp"
#include "qsat/ensembles.hpp"
#include "qsat/errors.hpp"
#include "qsat/io.hpp"
#include "qsat/reduction.hpp"

namespace qsat::cli {

using nlohmann::json;

namespace {

constexpr std::string_view kBuiltinPrefix = "builtin:";

bool is_builtin(const std::string& source) { return source.rfind(kBuiltinPrefix, 0) == 0; }

std::string builtin_name(const std::string& source) { return source.substr(kBuiltinPrefix.size()); }

std::string format_real(double value) {
  std::ostringstream os;
  os << std::setprecision(10) << value;
  return os.str();
}

struct SolveArgs {
  std::string path;
  std::string method = "auto";
  bool json = false;
};

struct AnalyzeArgs {
  std::string path;
  bool json = false;
};

struct ReduceArgs {
  std::string path;
  std::size_t target_k = 0;
  std::string core = "builtin:figure-b";
  std::string output = "reduced.json";
  bool extract_core = false;
  bool verify = false;
  bool json = false;
};

struct BoundsArgs {
  std::size_t k = 0;
  std::size_t to = 0;
  bool json = false;
};

struct SampleArgs {
  std::string structure = "builtin:triangle-double";
  std::size_t trials = 100;
  std::uint64_t seed = kDefaultSeed;
  bool json = false;
};

int cmd_solve(const SolveArgs& args, std::ostream& out) {
  const QsatInstance instance = load_instance(args.path);
  require_valid(instance);
  SolverOptions options;
  if (args.method == "dense") {
    options.method = Method::kDense;
  } else if (args.method == "krylov") {
    options.method = Method::kKrylov;
  }
  const SatVerdict verdict = decide_sat(instance, options);
  const std::size_t m = instance.num_terms();
  const double e0 = m == 0 ? 0.0 : verdict.lambda0 / static_cast<double>(m);
  if (args.json) {
    json doc = verdict;
    doc["e0"] = e0;
    doc["num_qubits"] = instance.num_qubits;
    doc["num_terms"] = m;
    out << doc.dump(2) << "\n";
  } else {
    out << "qubits         " << instance.num_qubits << "\n"
        << "terms          " << m << "\n"
        << "lambda0        " << format_real(verdict.lambda0) << "\n"
        << "e0             " << format_real(e0) << "\n"
        << "epsilon        " << format_real(verdict.promise_gap) << "\n"
        << "method         " << to_string(verdict.method) << "\n";
    if (verdict.nullspace_dim) out << "nullspace_dim  " << *verdict.nullspace_dim << "\n";
    out << "verdict        " << to_string(verdict.tag) << "\n";
  }
  return exit_code_for(verdict.tag);
}

int cmd_analyze(const AnalyzeArgs& args, std::ostream& out) {
  const QsatInstance instance = load_instance(args.path);
  const DegreeProfile profile = degree_profile(instance);
  const std::size_t k = locality(instance);
  const std::uint64_t hash = structure_hash(structure_of(instance));
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << hash;
  if (args.json) {
    json doc = profile;
    doc["locality"] = k;
    doc["num_qubits"] = instance.num_qubits;
    doc["num_terms"] = instance.num_terms();
    doc["structure_hash"] = hex.str();
    out << doc.dump(2) << "\n";
    return 0;
  }
  out << "qubit  degree\n";
  for (std::size_t q = 0; q < profile.per_qubit.size(); ++q) {
    out << std::setw(5) << q << "  " << profile.per_qubit[q] << "\n";
  }
  out << "max_degree     " << profile.max_degree << "\n"
      << "locality       " << k << "\n"
      << "regular        " << (profile.is_regular ? "yes" : "no") << "\n"
      << "terms          " << instance.num_terms() << "\n"
      << "structure_hash " << hex.str() << "\n";
  return 0;
}

int cmd_reduce(const ReduceArgs& args, std::ostream& out, std::ostream& err) {
  const QsatInstance instance = load_instance(args.path);
  require_valid(instance);
  if (args.target_k < locality(instance)) {
    throw ArgumentError("--target-k " + std::to_string(args.target_k) +
                        " is below the input locality " + std::to_string(locality(instance)));
  }
  const QsatInstance core_instance = load_instance(args.core);
  require_valid(core_instance);
  MinimalCore core;
  try {
    core = args.extract_core ? extract_minimal_core(core_instance) : certify_minimal_core(core_instance);
  } catch (const PreconditionError& e) {
    err << "core rejected: " << e.what() << "\n";
    return kExitCoreRejected;
  } catch (const IndeterminateError& e) {
    err << "core rejected: " << e.what() << "\n";
    return kExitCoreRejected;
  }

  const ReductionOutput reduction = build_reduction(instance, args.target_k, core);
  json doc = instance_to_json(reduction.t_instance);
  json roles = json::array();
  for (auto role : reduction.role_map) roles.push_back(std::string(to_string(role)));
  doc["roles"] = std::move(roles);
  const json summary = {{"target_k", reduction.target_k},
                        {"num_dummies", reduction.num_dummies},
                        {"penalty_constant", reduction.penalty_constant},
                        {"adjusted_gap", reduction.adjusted_gap},
                        {"core_terms", core.core.num_terms()},
                        {"core_max_degree", reduction.core_max_degree},
                        {"max_degree_work", reduction.max_degree_by_role.work},
                        {"max_degree_dummy", reduction.max_degree_by_role.dummy},
                        {"max_degree_ancilla", reduction.max_degree_by_role.ancilla}};
  doc["reduction"] = summary;
  write_text_file(args.output, doc.dump(2) + "\n");

  json report = summary;
  report["output"] = args.output;
  report["num_qubits"] = reduction.t_instance.num_qubits;
  report["num_terms"] = reduction.t_instance.num_terms();
  int code = 0;
  if (args.verify) {
    try {
      const VerificationReport v = verify_reduction(instance, reduction);
      report["verification"] = {{"dummy_z_commutes", v.dummy_z_commutes},
                                {"dummy_degrees_three", v.dummy_degrees_three},
                                {"lambda0_q", v.lambda0_q},
                                {"lambda0_t", v.lambda0_t},
                                {"eigenvalue_relation", v.eigenvalue_relation},
                                {"max_degree_t", v.max_degree_t},
                                {"degree_bound", v.degree_bound},
                                {"passed", v.passed()}};
      code = v.passed() ? 0 : kExitVerificationFailed;
    } catch (const CapacityError& e) {
      err << "verification skipped: " << e.what() << " (reduced instance written to " << args.output
          << ")\n";
      report["verification"] = {{"skipped", e.what()}};
      code = kExitCapacity;
    }
  }

  if (args.json) {
    out << report.dump(2) << "\n";
    return code;
  }
  out << "wrote          " << args.output << "\n"
      << "qubits         " << reduction.t_instance.num_qubits << " (" << instance.num_qubits
      << " work, " << reduction.num_dummies << " dummy, "
      << reduction.t_instance.num_qubits - instance.num_qubits - reduction.num_dummies
      << " ancilla)\n"
      << "terms          " << reduction.t_instance.num_terms() << "\n"
      << "c_k            " << format_real(reduction.penalty_constant) << "\n"
      << "epsilon'       " << format_real(reduction.adjusted_gap) << "\n";
  if (report["verification"].is_object() && report["verification"].contains("passed")) {
    const json& v = report["verification"];
    out << "E  (input)     " << format_real(v["lambda0_q"].get<double>()) << "\n"
        << "E' (reduced)   " << format_real(v["lambda0_t"].get<double>()) << "\n"
        << "E/E' relation  " << (v["eigenvalue_relation"].get<bool>() ? "holds" : "VIOLATED") << "\n"
        << "dummy Z check  " << (v["dummy_z_commutes"].get<bool>() ? "ok" : "FAILED") << "\n"
        << "dummy degree 3 " << (v["dummy_degrees_three"].get<bool>() ? "ok" : "FAILED") << "\n"
        << "degree bound   " << v["max_degree_t"].get<std::size_t>()
        << " <= " << v["degree_bound"].get<std::size_t>() << "\n"
        << "verification   " << (v["passed"].get<bool>() ? "passed" : "FAILED") << "\n";
  }
  return code;
}

int cmd_bounds(const BoundsArgs& args, std::ostream& out) {
  const std::size_t last = std::max(args.k, args.to);
  json rows = json::array();
  if (!args.json) {
    out << "  k  qlll_lower  gebauer_lower  gebauer_upper_est  tovey  threshold\n"
        << "     (f*(k) >=)  (f(k) >=)      (estimate)         (f(k)>=)\n";
  }
  for (std::size_t k = args.k; k <= last; ++k) {
    const BoundReport r = bound_report(k);
    const bool threshold = threshold_check(k);
    if (args.json) {
      json row = r;
      row["threshold_check"] = threshold;
      rows.push_back(std::move(row));
    } else {
      out << std::setw(3) << k << "  " << std::setw(10) << r.qlll_lower << "  " << std::setw(13)
          << r.gebauer_lower << "  " << std::setw(17) << format_real(r.gebauer_upper_estimate) << "  "
          << std::setw(5) << r.tovey_lower << "  " << (threshold ? "true" : "false") << "\n";
    }
  }
  if (args.json) out << (rows.size() == 1 ? rows[0] : rows).dump(2) << "\n";
  return 0;
}

int cmd_sample(const SampleArgs& args, bool seed_given, std::ostream& out) {
  if (args.trials < 1) throw ArgumentError("--trials must be at least 1");
  const Structure structure = load_structure(args.structure);
  const EnsembleResult result = sample_ensemble(structure, args.trials, args.seed);
  if (args.json) {
    json doc = result;
    out << doc.dump(2) << "\n";
    return 0;
  }
  out << "seed           " << args.seed << (seed_given ? "" : " (default)") << "\n"
      << "trials         " << result.trials << "\n"
      << "unsatisfiable  " << result.unsat_count << "/" << result.trials << "\n"
      << "satisfiable    " << result.sat_count << "/" << result.trials << "\n"
      << "indeterminate  " << result.indeterminate_count << "/" << result.trials << "\n";
  return 0;
}

}  // namespace

int exit_code_for(Verdict verdict) {
  switch (verdict) {
    case Verdict::kSatisfiable: return kExitSatisfiable;
    case Verdict::kUnsatisfiable: return kExitUnsatisfiable;
    case Verdict::kIndeterminate: return kExitIndeterminate;
  }
  return kExitUsage;
}

QsatInstance load_instance(const std::string& source) {
  if (!is_builtin(source)) return read_instance_file(source);
  const std::string name = builtin_name(source);
  if (name == "figure-a") return figure_instances().classical;
  if (name == "figure-b") return figure_instances().entangled;
  if (name == "empty") return QsatInstance{3, {}, kDefaultPromiseGap};
  throw ArgumentError("unknown builtin instance '" + name + "' (figure-a, figure-b, empty)");
}

Structure load_structure(const std::string& source) {
  if (is_builtin(source)) {
    const std::string name = builtin_name(source);
    if (name == "triangle-double") return triangle_double_structure();
    if (name == "figure-a" || name == "figure-b") {
      const QsatInstance instance = load_instance(source);
      Structure s{instance.num_qubits, {}};
      for (const auto& term : instance.terms) s.supports.push_back(support_of(term));
      return s;
    }
    throw ArgumentError("unknown builtin structure '" + name + "' (triangle-double)");
  }
  std::ifstream in(source);
  if (!in) throw ParseError(source, "cannot open file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(source, e.what());
  }
  return structure_from_json(doc);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Build, analyze, reduce and solve small quantum-satisfiability instances", "qsat"};
  app.require_subcommand(1);

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Decide satisfiability from the exact ground energy");
  solve_cmd->add_option("path", solve.path, "Instance file or builtin:<name>")->required();
  solve_cmd->add_option("--method", solve.method, "Eigen solver")
      ->check(CLI::IsMember({"auto", "dense", "krylov"}));
  solve_cmd->add_flag("--json", solve.json, "Machine-readable output");

  AnalyzeArgs analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "Degree profile, locality and structure");
  analyze_cmd->add_option("path", analyze.path, "Instance file or builtin:<name>")->required();
  analyze_cmd->add_flag("--json", analyze.json, "Machine-readable output");

  ReduceArgs reduce;
  auto* reduce_cmd = app.add_subcommand("reduce", "Pad to k-local with dummies and enforcing gadgets");
  reduce_cmd->add_option("path", reduce.path, "Rank-1 instance file or builtin:<name>")->required();
  reduce_cmd->add_option("--target-k", reduce.target_k, "Locality of the reduced instance")->required();
  reduce_cmd->add_option("--core", reduce.core, "Minimal unsatisfiable core (file or builtin:figure-b)");
  reduce_cmd->add_option("-o,--output", reduce.output, "Where to write the reduced instance");
  reduce_cmd->add_flag("--extract-core", reduce.extract_core, "Minimize the core before use");
  reduce_cmd->add_flag("--verify", reduce.verify, "Check the reduction spectrally");
  reduce_cmd->add_flag("--json", reduce.json, "Machine-readable output");

  BoundsArgs bounds;
  auto* bounds_cmd = app.add_subcommand("bounds", "Known bounds on f(k) and f*(k)");
  bounds_cmd->add_option("k", bounds.k, "Locality")->required();
  bounds_cmd->add_option("--to", bounds.to, "Print a table from k up to this value");
  bounds_cmd->add_flag("--json", bounds.json, "Machine-readable output");

  SampleArgs sample;
  auto* sample_cmd = app.add_subcommand("sample", "Haar-random ensemble over a fixed structure");
  sample_cmd->add_option("--structure", sample.structure, "Structure file or builtin:triangle-double");
  sample_cmd->add_option("--trials", sample.trials, "Number of instances to draw");
  auto* seed_opt = sample_cmd->add_option("--seed", sample.seed, "Ensemble seed");
  sample_cmd->add_flag("--json", sample.json, "Machine-readable output");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "qsat: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*solve_cmd) return cmd_solve(solve, out);
    if (*analyze_cmd) return cmd_analyze(analyze, out);
    if (*reduce_cmd) return cmd_reduce(reduce, out, err);
    if (*bounds_cmd) return cmd_bounds(bounds, out);
    if (*sample_cmd) return cmd_sample(sample, seed_opt->count() > 0, out);
  } catch (const ParseError& e) {
    err << "qsat: parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CapacityError& e) {
    err << "qsat: " << e.what() << "\n";
    return kExitCapacity;
  } catch (const std::exception& e) {
    err << "qsat: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace qsat::cli
