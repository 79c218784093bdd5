#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "nestsearch/cli.hpp"
#include "nestsearch/csp.hpp"
#include "nestsearch/dynamics.hpp"
#include "nestsearch/errors.hpp"

#ifndef NESTSEARCH_VERSION
#define NESTSEARCH_VERSION "0.0.0"
#endif

namespace nestsearch::cli {
namespace {

using ordered_json = nlohmann::ordered_json;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

ordered_json json_number(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

// Numeric sweep columns, in sweep_columns() order after "varying".
std::vector<double> sweep_values(const SweepRow& r) {
  const auto& e = r.estimates;
  const auto& b = r.budget;
  return {static_cast<double>(r.model.n), static_cast<double>(r.model.k), r.model.alpha, r.model.x, r.epsilon,
          e.log2_N_A, e.log2_M_A, e.log2_N_B, e.log2_M_B, e.log2_M_AB, e.raw_log2_M_AB, e.clamped ? 1.0 : 0.0,
          b.log2_stage1_time, static_cast<double>(b.iterations), b.log2_total_time, b.total_time,
          r.log2_time_approx, std::exp2(r.log2_time_approx)};
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string csv_cell(const ordered_json& v) {
  if (v.is_null()) return "-inf";
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  if (v.is_number_float()) return format_number(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

// Self-describing result of one command: every input needed to re-run it plus its outputs.
struct Record {
  std::string command;
  ordered_json inputs = ordered_json::object();
  ordered_json outputs = ordered_json::object();
};

struct OutputOptions {
  std::string format = "csv";
  std::string out_path;
};

class Sink {
public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw std::runtime_error("cannot open output file " + path);
      stream_ = file_.get();
    }
  }
  std::ostream& stream() { return *stream_; }
  void finish(const std::string& path) {
    stream_->flush();
    if (!*stream_) throw std::runtime_error("failed writing output" + (path.empty() ? "" : " file " + path));
  }

private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

void emit(const Record& record, const OutputOptions& options, std::ostream& out) {
  Sink sink(options.out_path, out);
  std::ostream& os = sink.stream();
  if (options.format == "json") {
    ordered_json doc;
    doc["command"] = record.command;
    doc["tool_version"] = tool_version();
    doc["timestamp"] = utc_timestamp();
    doc["inputs"] = record.inputs;
    doc["outputs"] = record.outputs;
    os << doc.dump(2) << "\n";
  } else {
    std::vector<std::string> header;
    std::vector<std::string> row;
    for (const auto* block : {&record.inputs, &record.outputs}) {
      for (const auto& [key, value] : block->items()) {
        if (value.is_array() || value.is_object()) continue;
        header.push_back(key);
        row.push_back(csv_cell(value));
      }
    }
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << "\n";
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << "\n";
  }
  sink.finish(options.out_path);
}

void add_output_flags(CLI::App* app, OutputOptions& options) {
  app->add_option("--format", options.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--out", options.out_path, "Output file (default: stdout)");
}

void add_model_flags(CLI::App* app, PartitionModel& model) {
  app->add_option("--n", model.n, "Total number of variables (qubits)");
  app->add_option("--k", model.k, "Variables per constraint");
  app->add_option("--alpha", model.alpha, "No-good density per variable");
  app->add_option("--x", model.x, "Partition fraction n_A / n");
}

ordered_json model_inputs(const PartitionModel& model, double epsilon) {
  ordered_json in;
  in["n"] = model.n;
  in["k"] = model.k;
  in["alpha"] = model.alpha;
  in["x"] = model.x;
  in["epsilon"] = epsilon;
  return in;
}

// ---- time -------------------------------------------------------------------

struct TimeOptions {
  PartitionModel model;
  double epsilon = 1.0;
  double tolerance = 1e-8;
  OutputOptions output;
};

void cmd_time(const TimeOptions& o, std::ostream& out) {
  o.model.validate();
  const AccuracyTarget target(o.epsilon);
  const ModelEstimates e = estimate(o.model);
  QuadratureOptions quad;
  quad.relative_tolerance = o.tolerance;
  const TimeBudget budget = model_time(o.model, target, {}, quad);
  const double approx = approx_model_time_log2(o.model);

  Record r;
  r.command = "time";
  r.inputs = model_inputs(o.model, o.epsilon);
  r.inputs["tolerance"] = o.tolerance;
  r.outputs["log2_M_A"] = e.log2_M_A;
  r.outputs["log2_M_B"] = e.log2_M_B;
  r.outputs["log2_M_AB"] = e.log2_M_AB;
  r.outputs["raw_log2_M_AB"] = e.raw_log2_M_AB;
  r.outputs["clamped"] = e.clamped;
  r.outputs["T_I"] = budget.stage1_time;
  r.outputs["log2_T_I"] = json_number(budget.log2_stage1_time);
  r.outputs["quadrature_error"] = budget.quadrature_error_estimate;
  r.outputs["iterations"] = budget.iterations;
  r.outputs["log2_iterations"] = std::log2(static_cast<double>(budget.iterations));
  r.outputs["T"] = budget.total_time;
  r.outputs["log2_T"] = json_number(budget.log2_total_time);
  r.outputs["T_approx"] = std::exp2(approx);
  r.outputs["log2_T_approx"] = approx;
  emit(r, o.output, out);
}

// ---- sweep ------------------------------------------------------------------

struct SweepOptions {
  std::string vary = "x";
  std::string grid;
  PartitionModel model;
  double epsilon = 1.0;
  double tolerance = 1e-8;
  std::string plot_script_path;
  OutputOptions output;
};

void cmd_sweep(const SweepOptions& o, std::ostream& out) {
  SweepSpec spec;
  spec.varying = parse_varying(o.vary);
  spec.grid = parse_grid(o.grid);
  spec.fixed = o.model;
  spec.epsilon = o.epsilon;
  spec.quadrature_tolerance = o.tolerance;
  const auto rows = run_sweep(spec);

  Sink sink(o.output.out_path, out);
  if (o.output.format == "json") {
    ordered_json doc;
    doc["command"] = "sweep";
    doc["tool_version"] = tool_version();
    doc["timestamp"] = utc_timestamp();
    ordered_json inputs = model_inputs(o.model, o.epsilon);
    inputs["vary"] = o.vary;
    inputs["grid"] = spec.grid;
    inputs["tolerance"] = o.tolerance;
    doc["inputs"] = inputs;
    ordered_json table = ordered_json::array();
    const auto& columns = sweep_columns();
    for (const auto& row : rows) {
      ordered_json obj;
      obj[columns[0]] = to_string(spec.varying);
      const auto values = sweep_values(row);
      for (std::size_t i = 0; i < values.size(); ++i) obj[columns[i + 1]] = json_number(values[i]);
      table.push_back(std::move(obj));
    }
    doc["rows"] = std::move(table);
    sink.stream() << doc.dump(2) << "\n";
  } else {
    write_sweep_csv(rows, spec.varying, sink.stream());
  }
  sink.finish(o.output.out_path);

  if (!o.plot_script_path.empty()) {
    std::ofstream script(o.plot_script_path, std::ios::binary);
    if (!script) throw std::runtime_error("cannot open plot script path " + o.plot_script_path);
    script << plot_script(o.output.out_path.empty() ? "sweep.csv" : o.output.out_path, spec.varying);
  }
}

// ---- scaling ----------------------------------------------------------------

struct ScalingOptions {
  int k = 2;
  double alpha = 1.0;
  double x = 0.5;
  std::string grid = "16:40:7";
  double epsilon = 1.0;
  double tolerance = 1e-8;
  OutputOptions output;
};

void cmd_scaling(const ScalingOptions& o, std::ostream& out) {
  const auto grid = parse_grid(o.grid);
  const ScalingResult result = run_scaling(o.k, o.alpha, o.x, grid, o.epsilon, o.tolerance);
  Record r;
  r.command = "scaling";
  r.inputs["k"] = o.k;
  r.inputs["alpha"] = o.alpha;
  r.inputs["x"] = o.x;
  r.inputs["epsilon"] = o.epsilon;
  r.inputs["grid"] = o.grid;
  r.inputs["tolerance"] = o.tolerance;
  r.outputs["slope"] = result.numeric.slope;
  r.outputs["intercept"] = result.numeric.intercept;
  r.outputs["residual"] = result.numeric.residual;
  r.outputs["approx_slope"] = result.approx.slope;
  r.outputs["approx_intercept"] = result.approx.intercept;
  r.outputs["analytic_exponent"] = o.alpha > 0.0 ? scaling_exponent(o.k, o.alpha) : 0.0;
  ordered_json ns = ordered_json::array();
  ordered_json ts = ordered_json::array();
  ordered_json as = ordered_json::array();
  for (const auto& row : result.rows) {
    ns.push_back(row.model.n);
    ts.push_back(json_number(row.budget.log2_total_time));
    as.push_back(row.log2_time_approx);
  }
  r.outputs["n_values"] = ns;
  r.outputs["log2_T"] = ts;
  r.outputs["log2_T_approx"] = as;
  emit(r, o.output, out);
}

// ---- optimize ---------------------------------------------------------------

struct OptimizeOptions {
  PartitionModel model;
  double epsilon = 1.0;
  double tolerance = 1e-4;
  double x_lo = 0.02;
  double x_hi = 0.98;
  OutputOptions output;
};

void cmd_optimize(const OptimizeOptions& o, std::ostream& out) {
  OptimizeConfig config;
  config.x_tolerance = o.tolerance;
  config.x_lo = o.x_lo;
  config.x_hi = o.x_hi;
  if (!(o.tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const OptimizeResult result = optimize_x(o.model.n, o.model.k, o.model.alpha, AccuracyTarget(o.epsilon), config);
  Record r;
  r.command = "optimize";
  r.inputs["n"] = o.model.n;
  r.inputs["k"] = o.model.k;
  r.inputs["alpha"] = o.model.alpha;
  r.inputs["epsilon"] = o.epsilon;
  r.inputs["tolerance"] = o.tolerance;
  r.inputs["x_lo"] = o.x_lo;
  r.inputs["x_hi"] = o.x_hi;
  r.outputs["x_opt"] = result.x_opt;
  r.outputs["log2_T_opt"] = json_number(result.log2_time);
  r.outputs["evaluations"] = result.evaluations;
  emit(r, o.output, out);
}

// ---- generate / census / simulate --------------------------------------------

struct InstanceSource {
  std::string instance_path;
  PartitionModel model{12, 2, 1.0, 0.5};
  std::uint64_t seed = 1;
};

void add_instance_flags(CLI::App* app, InstanceSource& src, bool allow_file) {
  if (allow_file) app->add_option("--instance", src.instance_path, "Instance file (otherwise generate from flags)");
  add_model_flags(app, src.model);
  app->add_option("--seed", src.seed, "Generator seed");
}

CspInstance load_instance(const InstanceSource& src) {
  if (!src.instance_path.empty()) return read_instance(src.instance_path);
  return generate(src.model.n, src.model.k, src.model.alpha, src.model.x, src.seed);
}

void instance_inputs(ordered_json& in, const InstanceSource& src, const CspInstance& inst) {
  if (!src.instance_path.empty()) in["instance"] = src.instance_path;
  in["n"] = inst.n;
  in["k"] = inst.k;
  in["alpha"] = inst.alpha;
  in["x"] = inst.x;
  in["seed"] = inst.seed;
}

struct GenerateOptions {
  InstanceSource source;
  std::string out_path;
};

void cmd_generate(const GenerateOptions& o, std::ostream& out) {
  const auto& m = o.source.model;
  const CspInstance inst = generate(m.n, m.k, m.alpha, m.x, o.source.seed);
  Sink sink(o.out_path, out);
  sink.stream() << instance_to_json(inst);
  sink.finish(o.out_path);
}

struct CensusOptions {
  InstanceSource source;
  int workers = 1;
  OutputOptions output;
};

void cmd_census(const CensusOptions& o, std::ostream& out) {
  const CspInstance inst = load_instance(o.source);
  const Classification classes = classify(inst);
  const SolutionCensus c = census(inst, o.workers);
  Record r;
  r.command = "census";
  instance_inputs(r.inputs, o.source, inst);
  r.outputs["n_A"] = inst.partition_A.size();
  r.outputs["n_B"] = static_cast<std::size_t>(inst.n) - inst.partition_A.size();
  r.outputs["constraints"] = inst.constraints.size();
  r.outputs["C_A"] = classes.within_A.size();
  r.outputs["C_B"] = classes.within_B.size();
  r.outputs["C_cross"] = classes.cross.size();
  r.outputs["M_A"] = c.M_A;
  r.outputs["M_B"] = c.M_B;
  r.outputs["M_AB"] = c.M_AB;
  r.outputs["M_A_S"] = c.M_A_S;
  r.outputs["M_A_NS"] = c.M_A_NS;
  r.outputs["M_B_S"] = c.M_B_S;
  r.outputs["M_B_NS"] = c.M_B_NS;
  r.outputs["rectangular"] = c.rectangular;
  emit(r, o.output, out);
}

SubsystemShape parse_shape(const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) throw std::invalid_argument("shape must be written M/N, got \"" + text + "\"");
  try {
    std::size_t used_m = 0;
    std::size_t used_n = 0;
    const auto m = std::stoull(text.substr(0, slash), &used_m);
    const auto n = std::stoull(text.substr(slash + 1), &used_n);
    if (used_m != slash || used_n != text.size() - slash - 1) throw std::invalid_argument("trailing characters");
    return SubsystemShape::from_counts(n, m);
  } catch (const std::logic_error& e) {
    throw std::invalid_argument("cannot parse shape \"" + text + "\": " + e.what());
  }
}

struct SimulateOptions {
  std::string stage = "1";
  std::vector<std::string> shapes{"1/16", "1/16"};
  double epsilon = 1.0;
  double time_factor = 1.0;
  double time = 0.0;
  std::string schedule = "linear";
  long long steps = 0;
  double m_a = 16, m_b = 16, m_ab = 1;
  double step_time = 0.0;
  InstanceSource source;
  OutputOptions output;
};

void cmd_simulate(const SimulateOptions& o, std::ostream& out) {
  Record r;
  r.command = "simulate";
  r.inputs["stage"] = o.stage;
  if (o.stage == "1") {
    std::vector<SubsystemShape> shapes;
    for (const auto& s : o.shapes) shapes.push_back(parse_shape(s));
    const AccuracyTarget target(o.epsilon);
    const double t_i = stage1_time(shapes, target).stage1_time;
    EvolutionConfig config;
    config.total_time = o.time > 0.0 ? o.time : o.time_factor * t_i;
    config.steps = o.steps;
    config.schedule = o.schedule == "local" ? Schedule::local_adiabatic : Schedule::linear;
    if (!(config.total_time > 0.0)) {
      throw std::invalid_argument("evolution time is zero (degenerate shapes need an explicit --time)");
    }
    const SimulationReport rep = simulate_stage1(shapes, config);
    r.inputs["shapes"] = o.shapes;
    r.inputs["epsilon"] = o.epsilon;
    r.inputs["time_factor"] = o.time_factor;
    r.inputs["time"] = o.time;
    r.inputs["schedule"] = o.schedule;
    r.inputs["steps"] = o.steps;
    r.outputs["T_I"] = t_i;
    r.outputs["total_time"] = config.total_time;
    r.outputs["steps_used"] = rep.steps;
    r.outputs["final_fidelity"] = rep.final_fidelity;
    r.outputs["per_subsystem_fidelity"] = rep.per_subsystem_fidelity;
    r.outputs["norm_error"] = rep.norm_error;
  } else if (o.stage == "2") {
    Stage2Plan plan = stage2_plan(o.m_a, o.m_b, o.m_ab);
    if (o.steps > 0) plan.steps = o.steps;
    if (o.step_time > 0.0) plan.step_time = o.step_time;
    const SimulationReport rep = simulate_stage2(o.m_a, o.m_b, o.m_ab, plan.steps, plan.step_time);
    r.inputs["m_a"] = o.m_a;
    r.inputs["m_b"] = o.m_b;
    r.inputs["m_ab"] = o.m_ab;
    r.inputs["steps"] = plan.steps;
    r.inputs["step_time"] = plan.step_time;
    r.outputs["success_probability"] = rep.success_probability;
    r.outputs["norm_error"] = rep.norm_error;
  } else if (o.stage == "nested") {
    const CspInstance inst = load_instance(o.source);
    const NestedSearchReport rep = run_nested_search(inst, AccuracyTarget(o.epsilon));
    instance_inputs(r.inputs, o.source, inst);
    r.inputs["epsilon"] = o.epsilon;
    r.outputs["M_A"] = rep.census.M_A;
    r.outputs["M_B"] = rep.census.M_B;
    r.outputs["M_AB"] = rep.census.M_AB;
    r.outputs["rectangular"] = rep.census.rectangular;
    r.outputs["locally_unsatisfiable"] = rep.locally_unsatisfiable;
    r.outputs["no_global_solution"] = rep.no_global_solution;
    r.outputs["T_I"] = rep.stage1_time;
    r.outputs["iterations"] = rep.iterations;
    r.outputs["total_time"] = rep.total_time;
    r.outputs["stage1_fidelity"] = rep.stage1_fidelity;
    r.outputs["stage2_steps"] = rep.stage2.steps;
    r.outputs["stage2_step_time"] = rep.stage2.step_time;
    r.outputs["stage2_success"] = rep.stage2_success;
  } else {
    throw std::invalid_argument("--stage must be 1, 2 or nested");
  }
  emit(r, o.output, out);
}

}  // namespace

std::string tool_version() { return "nestsearch " NESTSEARCH_VERSION; }

const std::vector<std::string>& sweep_columns() {
  static const std::vector<std::string> columns{
      "varying", "n",         "k",          "alpha", "x",       "epsilon",       "log2_N_A",
      "log2_M_A", "log2_N_B", "log2_M_B",   "log2_M_AB", "raw_log2_M_AB", "clamped", "log2_T_I",
      "iterations", "log2_T", "T",          "log2_T_approx", "T_approx"};
  return columns;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  if (spec.grid.empty()) throw std::invalid_argument("sweep grid is empty");
  for (std::size_t i = 1; i < spec.grid.size(); ++i) {
    if (!(spec.grid[i] > spec.grid[i - 1])) throw std::invalid_argument("sweep grid must be strictly increasing");
  }
  const AccuracyTarget target(spec.epsilon);
  QuadratureOptions quad;
  quad.relative_tolerance = spec.quadrature_tolerance;

  const auto as_int = [](double v, const char* name) {
    if (v != std::floor(v) || std::abs(v) > 1e9) {
      throw std::invalid_argument(std::string("sweep over ") + name + " needs integer grid values");
    }
    return static_cast<int>(v);
  };

  std::vector<SweepRow> rows;
  rows.reserve(spec.grid.size());
  for (double value : spec.grid) {
    SweepRow row;
    row.model = spec.fixed;
    switch (spec.varying) {
      case Varying::x: row.model.x = value; break;
      case Varying::alpha: row.model.alpha = value; break;
      case Varying::n: row.model.n = as_int(value, "n"); break;
      case Varying::k: row.model.k = as_int(value, "k"); break;
      case Varying::N: {
        const double log2_n = std::log2(value);
        if (!(value > 0.0) || log2_n != std::floor(log2_n)) {
          throw std::invalid_argument("sweep over N needs powers of two");
        }
        row.model.n = static_cast<int>(log2_n);
        break;
      }
    }
    row.model.validate();
    row.epsilon = spec.epsilon;
    row.estimates = estimate(row.model);
    row.budget = model_time(row.model, target, {}, quad);
    row.log2_time_approx = approx_model_time_log2(row.model);
    rows.push_back(row);
  }
  return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, Varying varying, std::ostream& out) {
  const auto& columns = sweep_columns();
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << "\n";
  for (const auto& row : rows) {
    out << to_string(varying);
    for (double v : sweep_values(row)) out << ',' << format_number(v);
    out << "\n";
  }
}

ScalingResult run_scaling(int k, double alpha, double x, const std::vector<double>& n_grid, double epsilon,
                          double quadrature_tolerance) {
  if (n_grid.size() < 5) throw std::invalid_argument("scaling needs at least 5 grid points");
  SweepSpec spec;
  spec.varying = Varying::n;
  spec.grid = n_grid;
  spec.fixed = PartitionModel{static_cast<int>(n_grid.front()), k, alpha, x};
  spec.epsilon = epsilon;
  spec.quadrature_tolerance = quadrature_tolerance;

  ScalingResult result;
  result.rows = run_sweep(spec);
  std::vector<double> ns;
  std::vector<double> numeric;
  std::vector<double> approx;
  for (const auto& row : result.rows) {
    if (!std::isfinite(row.budget.log2_total_time)) {
      throw std::invalid_argument("scaling is undefined when the running time vanishes (alpha = 0)");
    }
    ns.push_back(row.model.n);
    numeric.push_back(row.budget.log2_total_time);
    approx.push_back(row.log2_time_approx);
  }
  result.numeric = fit_line(ns, numeric);
  result.approx = fit_line(ns, approx);
  return result;
}

std::string plot_script(const std::string& csv_path, Varying varying) {
  std::ostringstream s;
  s << "import csv\n"
       "import matplotlib.pyplot as plt\n\n"
    << "rows = list(csv.DictReader(open(\"" << csv_path << "\")))\n"
    << "xs = [float(r[\"" << to_string(varying == Varying::N ? Varying::n : varying) << "\"]) for r in rows]\n"
    << "plt.plot(xs, [float(r[\"log2_T\"]) for r in rows], \"o-\", label=\"numeric\")\n"
       "plt.plot(xs, [float(r[\"log2_T_approx\"]) for r in rows], \"--\", label=\"approximate\")\n"
    << "plt.xlabel(\"" << to_string(varying) << "\")\n"
    << "plt.ylabel(\"log2 T\")\n"
       "plt.legend()\n"
    << "plt.savefig(\"" << csv_path << ".png\", dpi=150)\n";
  return s.str();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nested adiabatic search: stage-I/II times, complexity model, CSP census and dynamics", "nestsearch"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);

  TimeOptions time_opts;
  auto* time_cmd = app.add_subcommand("time", "T_I, stage-II iterations and total time for one model point");
  add_model_flags(time_cmd, time_opts.model);
  time_cmd->add_option("--epsilon", time_opts.epsilon, "Adiabatic accuracy");
  time_cmd->add_option("--tolerance", time_opts.tolerance, "Relative quadrature tolerance");
  add_output_flags(time_cmd, time_opts.output);

  SweepOptions sweep_opts;
  auto* sweep_cmd = app.add_subcommand("sweep", "Tabulate numeric and approximate times over a grid");
  sweep_cmd->add_option("--vary", sweep_opts.vary, "Variable to sweep: x, alpha, n, N or k");
  sweep_cmd->add_option("--grid", sweep_opts.grid, "Comma list or lo:hi:count")->required();
  add_model_flags(sweep_cmd, sweep_opts.model);
  sweep_cmd->add_option("--epsilon", sweep_opts.epsilon, "Adiabatic accuracy");
  sweep_cmd->add_option("--tolerance", sweep_opts.tolerance, "Relative quadrature tolerance");
  sweep_cmd->add_option("--plot-script", sweep_opts.plot_script_path, "Also write a matplotlib script here");
  add_output_flags(sweep_cmd, sweep_opts.output);

  ScalingOptions scaling_opts;
  auto* scaling_cmd = app.add_subcommand("scaling", "Fit the slope of log2 T against n");
  scaling_cmd->add_option("--k", scaling_opts.k, "Variables per constraint");
  scaling_cmd->add_option("--alpha", scaling_opts.alpha, "No-good density per variable");
  scaling_cmd->add_option("--x", scaling_opts.x, "Partition fraction");
  scaling_cmd->add_option("--grid", scaling_opts.grid, "n values: comma list or lo:hi:count");
  scaling_cmd->add_option("--epsilon", scaling_opts.epsilon, "Adiabatic accuracy");
  scaling_cmd->add_option("--tolerance", scaling_opts.tolerance, "Relative quadrature tolerance");
  add_output_flags(scaling_cmd, scaling_opts.output);

  OptimizeOptions optimize_opts;
  auto* optimize_cmd = app.add_subcommand("optimize", "Minimise the model running time over x");
  optimize_cmd->add_option("--n", optimize_opts.model.n, "Total number of variables");
  optimize_cmd->add_option("--k", optimize_opts.model.k, "Variables per constraint");
  optimize_cmd->add_option("--alpha", optimize_opts.model.alpha, "No-good density per variable");
  optimize_cmd->add_option("--epsilon", optimize_opts.epsilon, "Adiabatic accuracy");
  optimize_cmd->add_option("--tolerance", optimize_opts.tolerance, "Final bracket width in x");
  optimize_cmd->add_option("--x-lo", optimize_opts.x_lo, "Lower end of the search interval");
  optimize_cmd->add_option("--x-hi", optimize_opts.x_hi, "Upper end of the search interval");
  add_output_flags(optimize_cmd, optimize_opts.output);

  GenerateOptions generate_opts;
  auto* generate_cmd = app.add_subcommand("generate", "Write a random CSP instance file");
  add_instance_flags(generate_cmd, generate_opts.source, false);
  generate_cmd->add_option("--out", generate_opts.out_path, "Instance file (default: stdout)");

  CensusOptions census_opts;
  auto* census_cmd = app.add_subcommand("census", "Exact solution counts of a small instance");
  add_instance_flags(census_cmd, census_opts.source, true);
  census_cmd->add_option("--workers", census_opts.workers, "Threads for the enumeration");
  add_output_flags(census_cmd, census_opts.output);

  SimulateOptions sim_opts;
  auto* sim_cmd = app.add_subcommand("simulate", "Stage-I / stage-II dynamics or the full nested search");
  sim_cmd->add_option("--stage", sim_opts.stage, "1, 2 or nested")->check(CLI::IsMember({"1", "2", "nested"}));
  sim_cmd->add_option("--shape", sim_opts.shapes, "Stage 1: subsystem as M/N (repeat per subsystem)");
  sim_cmd->add_option("--epsilon", sim_opts.epsilon, "Adiabatic accuracy");
  sim_cmd->add_option("--time-factor", sim_opts.time_factor, "Stage 1: evolve for this multiple of T_I");
  sim_cmd->add_option("--time", sim_opts.time, "Stage 1: absolute evolution time (overrides --time-factor)");
  sim_cmd->add_option("--schedule", sim_opts.schedule, "Stage 1: linear or local")
      ->check(CLI::IsMember({"linear", "local"}));
  sim_cmd->add_option("--steps", sim_opts.steps, "Integrator / stage-II step count (0: default)");
  sim_cmd->add_option("--m-a", sim_opts.m_a, "Stage 2: M_A");
  sim_cmd->add_option("--m-b", sim_opts.m_b, "Stage 2: M_B");
  sim_cmd->add_option("--m-ab", sim_opts.m_ab, "Stage 2: M_AB");
  sim_cmd->add_option("--step-time", sim_opts.step_time, "Stage 2: time per step (0: calibrated)");
  add_instance_flags(sim_cmd, sim_opts.source, true);
  add_output_flags(sim_cmd, sim_opts.output);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      // --help / --version
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitValidation;
  }

  try {
    if (*time_cmd) cmd_time(time_opts, out);
    if (*sweep_cmd) cmd_sweep(sweep_opts, out);
    if (*scaling_cmd) cmd_scaling(scaling_opts, out);
    if (*optimize_cmd) cmd_optimize(optimize_opts, out);
    if (*generate_cmd) cmd_generate(generate_opts, out);
    if (*census_cmd) cmd_census(census_opts, out);
    if (*sim_cmd) cmd_simulate(sim_opts, out);
  } catch (const ScaleRefused& e) {
    err << "refused: " << e.what() << "\n";
    return kExitRefused;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NoGlobalSolution& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitValidation;
  } catch (const LocallyUnsatisfiable& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitValidation;
  } catch (const IntegratorStepTooCoarse& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace nestsearch::cli
