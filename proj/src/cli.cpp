#include "weightlab/cli.hpp"

#include "weightlab/conditions.hpp"
#include "weightlab/errors.hpp"
#include "weightlab/harness.hpp"
#include "weightlab/operator.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace weightlab::cli {

namespace {

using json = nlohmann::json;

const std::vector<std::string> kConditionNames{"dhat",  "dhat_discrete", "dcheck", "mclass", "Mp",  "Kpc_M",
                                               "Kpc_K", "Kpd",           "Kpe",    "K1c",    "K1d", "M1d",
                                               "M1",    "carleson",      "mp_small"};
const std::vector<std::string> kProbeNames{"boundedness", "equivalence", "noncompactness", "monotonicity",
                                           "tilde-hat",   "embedding",   "two-path"};

void add_output(CLI::App* app, CommandSpec& s) {
  app->add_option("-o,--output", s.output, "Report path (default stdout)");
  app->add_option_function<std::string>(
         "--format",
         [&s](const std::string& v) {
           if (v != "json" && v != "csv") throw CLI::ValidationError("--format", "expected json or csv, got '" + v + "'");
           s.format = v == "csv" ? OutputFormat::csv : OutputFormat::json;
         },
         "json (default) or csv")
      ->type_name("json|csv");
}

void add_weight(CLI::App* app, CommandSpec& s, bool required = true) {
  auto* o = app->add_option("--weight", s.weight_path, "WeightSpec JSON file");
  if (required) o->required();
}

void add_condition_flags(CLI::App* app, CommandSpec& s) {
  app->add_option("--tol", s.tol, "Quadrature tolerance");
  app->add_option("--grid-depth", s.grid_depth, "Radius grid depth J (r_j = 1 - 2^(-j/4))");
  app->add_option("--n-max", s.n_max, "Largest N sampled by the discrete functionals");
}

void check_positive(const char* flag, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) throw UsageError(std::string(flag) + ": must be a positive number");
}

void validate(CommandSpec& s) {
  check_positive("--tol", s.tol);
  if (s.grid_depth < 4) throw UsageError("--grid-depth: must be at least 4");
  if (s.n_max && *s.n_max < (s.subcommand == Subcommand::build_weight ? 0 : 1)) {
    throw UsageError("--n-max: out of range");
  }
  if (s.n_out && *s.n_out < 1) throw UsageError("--n-out: must be at least 1");
  if (s.degree < 0) throw UsageError("--degree: must be nonnegative");
  if (s.p && !std::isfinite(*s.p)) throw UsageError("--p: must be finite");
  if (s.p && *s.p < 1.0 && s.subcommand != Subcommand::build_weight) {
    throw UsageError("--p: must be at least 1 for " + to_string(s.subcommand));
  }
  if (s.p && s.subcommand == Subcommand::build_weight && !(*s.p > 0.0)) throw UsageError("--p: must be positive");
  switch (s.subcommand) {
    case Subcommand::conditions:
      if (!s.p) throw UsageError("--p: required for conditions");
      if (s.condition != "all" &&
          std::find(kConditionNames.begin(), kConditionNames.end(), s.condition) == kConditionNames.end()) {
        throw UsageError("--condition: unknown condition '" + s.condition + "'");
      }
      [[fallthrough]];
    case Subcommand::analyze:
      if (!(s.dilation > 1.0)) throw UsageError("--K: must exceed 1");
      break;
    case Subcommand::kernel:
      if (s.kind.empty()) s.kind = "K";
      if (s.kind != "B" && s.kind != "K" && s.kind != "G") throw UsageError("--kind: expected B, K or G");
      break;
    case Subcommand::build_weight:
      if (s.input_path.empty() && s.kind.empty()) throw UsageError("--kind: required unless --input is given");
      if (!s.input_path.empty() && !s.kind.empty()) throw UsageError("--input: conflicts with --kind");
      if ((s.kind == "oscillating" || s.kind == "tilde") && s.base_path.empty()) {
        throw UsageError("--base: required for kind " + s.kind);
      }
      if (s.dilation != 0.0 && !(s.dilation > 1.0)) throw UsageError("--K: must exceed 1 (or 0 for the default)");
      break;
    case Subcommand::probe:
      if (s.probe != "embedding" && s.weight_path.empty()) throw UsageError("--weight: required for probe " + s.probe);
      if (s.probe == "monotonicity") {
        if (!s.q) s.q = 1.0;
        if (!s.p) s.p = 2.0;
        if (!(*s.q >= 1.0 && *s.q < *s.p)) throw UsageError("--q: needs 1 <= q < p");
      }
      break;
    default:
      break;
  }
}

}  // namespace

std::string to_string(Subcommand s) {
  switch (s) {
    case Subcommand::analyze: return "analyze";
    case Subcommand::conditions: return "conditions";
    case Subcommand::apply: return "apply";
    case Subcommand::kernel: return "kernel";
    case Subcommand::build_weight: return "build-weight";
    case Subcommand::probe: return "probe";
    case Subcommand::suite: return "suite";
  }
  return "unknown";
}

CommandSpec parse_command(const std::vector<std::string>& args) {
  CommandSpec s;
  CLI::App app{"Radial weights, their doubling and boundedness conditions, and the Hilbert-type operator.",
               "weightlab"};
  app.require_subcommand(1);

  auto* analyze = app.add_subcommand("analyze", "Doubling profiles and class verdicts of a weight");
  add_weight(analyze, s);
  add_condition_flags(analyze, s);
  analyze->add_option("--K", s.dilation, "Dilation of the lower doubling profile");
  add_output(analyze, s);

  auto* conditions = app.add_subcommand("conditions", "Boundedness functionals at exponent p");
  add_weight(conditions, s);
  conditions->add_option("--p", s.p, "Exponent, at least 1")->required();
  conditions->add_option("--condition", s.condition, "One functional, or all that apply at p");
  conditions->add_option("--K", s.dilation, "Dilation for dcheck and mclass");
  add_condition_flags(conditions, s);
  add_output(conditions, s);

  auto* apply = app.add_subcommand("apply", "Coefficients of H_w f");
  add_weight(apply, s);
  apply->add_option("--input", s.input_path, "Coefficient series JSON")->required();
  apply->add_option("--n-out,--N", s.n_out, "Number of output coefficients");
  apply->add_flag("--sublinear", s.sublinear, "Use |f| under the integral");
  apply->add_option("--tol", s.tol, "Quadrature tolerance");
  add_output(apply, s);

  auto* kernel = app.add_subcommand("kernel", "Evaluate a kernel series at (t, z)");
  add_weight(kernel, s);
  kernel->add_option("--kind", s.kind, "B, K or G (default K)");
  kernel->add_option("--t", s.t, "Radius t in [0, 1)");
  kernel->add_option("--z-re", s.z_re, "Real part of z");
  kernel->add_option("--z-im", s.z_im, "Imaginary part of z");
  kernel->add_option("--n-max", s.n_max, "Cap on the number of series terms");
  kernel->add_option("--tol", s.tol, "Tail tolerance");
  add_output(kernel, s);

  auto* build = app.add_subcommand("build-weight", "Write a WeightSpec, building it to check it");
  build->add_option("--kind", s.kind, "constant, standard, exponential, oscillating or tilde");
  build->add_option("--input", s.input_path, "Existing WeightSpec to check and normalize");
  build->add_option("--beta", s.beta, "standard: exponent");
  build->add_option("--c", s.c, "exponential: rate");
  build->add_option("--base", s.base_path, "oscillating, tilde: base WeightSpec JSON");
  build->add_option("--p", s.p, "oscillating: exponent (default 2)");
  build->add_option("--K", s.dilation, "oscillating: dilation, 0 picks the default rule");
  build->add_option("--n-max", s.n_max, "oscillating: plateau count, 0 until they underflow (default 24)");
  add_output(build, s);

  auto* probe = app.add_subcommand("probe", "Run one harness probe");
  probe->add_option("--probe", s.probe, "Probe name")->required()->check(CLI::IsMember(kProbeNames));
  add_weight(probe, s, false);
  probe->add_option("--p", s.p, "Exponent (default 2)");
  probe->add_option("--q", s.q, "monotonicity: smaller exponent (default 1)");
  probe->add_option("--X", s.space_x, "boundedness: domain space");
  probe->add_option("--Y", s.space_y, "boundedness: target space");
  probe->add_option("--family", s.family, "boundedness: power_block or dual_block");
  probe->add_option("--seed", s.seed, "Seed for random polynomials");
  probe->add_option("--degree", s.degree, "embedding, two-path: max polynomial degree");
  probe->add_option("--n-out,--N", s.n_out, "two-path: output coefficients");
  probe->add_flag("--timings", s.timings, "Include runtime in the report");
  add_condition_flags(probe, s);
  add_output(probe, s);

  auto* suite = app.add_subcommand("suite", "Every probe over the built-in weights");
  suite->add_option("--seed", s.seed, "Seed for random polynomials");
  suite->add_flag("--timings", s.timings, "Include runtimes in the report");
  add_condition_flags(suite, s);
  add_output(suite, s);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help("", CLI::AppFormatMode::All));
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  const CLI::App* chosen = app.get_subcommands().front();
  const std::map<std::string, Subcommand> by_name{
      {"analyze", Subcommand::analyze}, {"conditions", Subcommand::conditions},
      {"apply", Subcommand::apply},     {"kernel", Subcommand::kernel},
      {"build-weight", Subcommand::build_weight}, {"probe", Subcommand::probe},
      {"suite", Subcommand::suite}};
  s.subcommand = by_name.at(chosen->get_name());
  if (s.subcommand == Subcommand::build_weight) {
    const auto* k = chosen->get_option_no_throw("--K");
    if (k == nullptr || k->count() == 0) s.dilation = 0.0;
  }
  if (s.subcommand == Subcommand::probe && (s.family != "power_block" && s.family != "dual_block")) {
    throw UsageError("--family: expected power_block or dual_block");
  }
  if (s.subcommand == Subcommand::probe) {
    try {
      space_from_string(s.space_x);
      space_from_string(s.space_y);
    } catch (const DomainError& e) {
      throw UsageError(std::string("--X/--Y: ") + e.what());
    }
  }
  validate(s);
  return s;
}

// ---------------------------------------------------------------- run

namespace {

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path + ": cannot open");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path + ": byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

template <class T>
T read_as(const std::string& path, const char* what) {
  const json j = read_json_file(path);
  try {
    T v = j.get<T>();
    return v;
  } catch (const json::exception& e) {
    throw InputError(path + ": not a valid " + what + ": " + e.what());
  } catch (const DomainError& e) {
    throw InputError(path + ": not a valid " + what + ": " + e.what());
  }
}

WeightSpec read_weight(const std::string& path) {
  WeightSpec w = read_as<WeightSpec>(path, "weight spec");
  try {
    w.validate();
  } catch (const DomainError& e) {
    throw InputError(path + ": " + e.what());
  }
  return w;
}

ConditionParams condition_params(const CommandSpec& s, double p = 2.0) {
  ConditionParams cp;
  cp.p = p;
  cp.grid_depth = s.grid_depth;
  cp.N_max = s.n_max.value_or(cp.N_max);
  cp.tol = s.tol;
  return cp;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// One CSV for several condition reports: the report name leads each row.
std::string reports_csv(const std::vector<ConditionReport>& reports) {
  std::ostringstream os;
  os << "condition,param,value,running_sup\n";
  for (const auto& r : reports) {
    std::istringstream rows(to_csv(r));
    std::string line;
    std::getline(rows, line);  // header
    while (std::getline(rows, line)) os << r.name << ',' << line << '\n';
  }
  return os.str();
}

int verdict_exit(const std::vector<ConditionReport>& reports) {
  const bool all_open = std::all_of(reports.begin(), reports.end(),
                                    [](const ConditionReport& r) { return r.verdict == Verdict::Inconclusive; });
  return !reports.empty() && all_open ? 2 : 0;
}

int outcome_exit(const std::vector<ProbeOutcome>& outcomes) {
  if (std::count(outcomes.begin(), outcomes.end(), ProbeOutcome::Fail) > 0) return 1;
  if (!outcomes.empty() && std::all_of(outcomes.begin(), outcomes.end(),
                                       [](ProbeOutcome o) { return o == ProbeOutcome::Inconclusive; })) {
    return 2;
  }
  return 0;
}

ConditionReport one_condition(const RadialWeight& w, const std::string& name, const CommandSpec& s, double p) {
  const auto cp = condition_params(s, p);
  if (name == "dhat") return dhat_profile(w, cp);
  if (name == "dhat_discrete") return dhat_discrete(w, cp.N_max, cp.tol);
  if (name == "dcheck") return dcheck_profile(w, s.dilation, cp);
  if (name == "mclass") return mclass_probe(w, static_cast<int>(std::lround(s.dilation)), cp.N_max, cp);
  if (name == "Mp") return Mp_discrete(w, cp);
  if (name == "Kpc_M") return Kpc_continuous(w, cp, KpcVariant::M);
  if (name == "Kpc_K") return Kpc_continuous(w, cp, KpcVariant::K);
  if (name == "Kpd") return Kpd(w, cp);
  if (name == "Kpe") return Kpe(w, cp);
  if (name == "K1c") return K1_family(w, cp, K1Variant::K1c);
  if (name == "K1d") return K1_family(w, cp, K1Variant::K1d);
  if (name == "M1d") return K1_family(w, cp, K1Variant::M1d);
  if (name == "M1") return K1_family(w, cp, K1Variant::M1);
  if (name == "carleson") return carleson_functional(w, cp);
  if (name == "mp_small") return mp_small(w, cp);
  throw UsageError("--condition: unknown condition '" + name + "'");
}

struct Report {
  std::string text;
  int exit_code = 0;
};

Report run_analyze(const CommandSpec& s) {
  const WeightSpec spec = read_weight(s.weight_path);
  const RadialWeight w(spec);
  const auto cp = condition_params(s);
  std::vector<ConditionReport> reports{dhat_profile(w, cp), dcheck_profile(w, s.dilation, cp),
                                       dhat_discrete(w, cp.N_max, cp.tol)};
  const auto fit = fit_doubling_bound(w, cp.grid_depth);
  TildeHatOptions th;
  th.grid_depth = cp.grid_depth;
  const auto tilde = tilde_hat_probe(w, th);
  if (s.format == OutputFormat::csv) return {reports_csv(reports), verdict_exit(reports)};
  json j = {{"command", "analyze"},
            {"weight", spec},
            {"parameters", {{"grid_depth", cp.grid_depth}, {"N_max", cp.N_max}, {"tol", cp.tol}, {"K", s.dilation}}},
            {"dhat_profile", reports[0]},
            {"dcheck_profile", reports[1]},
            {"dhat_discrete", reports[2]},
            {"doubling_fit", {{"C", fit.C}, {"beta", fit.beta}}},
            {"tilde_ratio", {{"band", tilde.measurements["band"]}, {"drift", tilde.measurements["drift"]},
                             {"stable", tilde.pass()}}}};
  return {dump(j), verdict_exit(reports)};
}

Report run_conditions(const CommandSpec& s) {
  const WeightSpec spec = read_weight(s.weight_path);
  const RadialWeight w(spec);
  const double p = *s.p;
  std::vector<std::string> names;
  if (s.condition != "all") {
    names = {s.condition};
  } else if (p > 1.0) {
    names = {"Mp", "Kpc_M", "Kpc_K", "Kpd", "Kpe", "mp_small"};
  } else {
    names = {"K1c", "K1d", "M1d", "M1", "carleson", "mp_small"};
  }
  std::vector<ConditionReport> reports;
  for (const auto& n : names) reports.push_back(one_condition(w, n, s, p));
  if (s.format == OutputFormat::csv) return {reports_csv(reports), verdict_exit(reports)};
  json j = {{"command", "conditions"},
            {"weight", spec},
            {"parameters", condition_params(s, p)},
            {"K", s.dilation},
            {"reports", reports}};
  return {dump(j), verdict_exit(reports)};
}

Report run_apply(const CommandSpec& s) {
  const WeightSpec spec = read_weight(s.weight_path);
  const RadialWeight w(spec);
  const auto f = read_as<CoefficientSeries>(s.input_path, "coefficient series");
  if (f.empty()) throw InputError(s.input_path + ": empty coefficient series");
  const int n_out = s.n_out.value_or(64);
  const auto hf = s.sublinear ? apply_sublinear(w, f, n_out, s.tol) : apply_series(w, f, n_out, s.tol);
  if (s.format == OutputFormat::csv) return {to_csv(hf), 0};
  json j = {{"command", "apply"},
            {"weight", spec},
            {"parameters", {{"n_out", n_out}, {"sublinear", s.sublinear}, {"tol", s.tol}}},
            {"input", f},
            {"output", hf}};
  return {dump(j), 0};
}

Report run_kernel(const CommandSpec& s) {
  const WeightSpec spec = read_weight(s.weight_path);
  const RadialWeight w(spec);
  const int n_max = s.n_max.value_or(1 << 20);
  const auto v = kernel_eval(w, kernel_kind_from_string(s.kind), s.t, {s.z_re, s.z_im}, n_max, s.tol);
  if (s.format == OutputFormat::csv) {
    std::ostringstream os;
    os.precision(17);
    os << "kind,t,z_re,z_im,re,im,terms,tail_bound\n"
       << s.kind << ',' << s.t << ',' << s.z_re << ',' << s.z_im << ',' << v.value.real() << ',' << v.value.imag()
       << ',' << v.terms << ',' << v.tail_bound << '\n';
    return {os.str(), 0};
  }
  json j = {{"command", "kernel"},
            {"weight", spec},
            {"parameters", {{"kind", s.kind}, {"t", s.t}, {"z", {s.z_re, s.z_im}}, {"n_max", n_max}, {"tol", s.tol}}},
            {"value", {v.value.real(), v.value.imag()}},
            {"terms", v.terms},
            {"tail_bound", v.tail_bound}};
  return {dump(j), 0};
}

Report run_build_weight(const CommandSpec& s) {
  WeightSpec spec;
  if (!s.input_path.empty()) {
    spec = read_weight(s.input_path);
  } else if (s.kind == "constant") {
    spec = WeightSpec::constant();
  } else if (s.kind == "standard") {
    spec = WeightSpec::standard(s.beta);
  } else if (s.kind == "exponential") {
    spec = WeightSpec::exponential(s.c);
  } else if (s.kind == "oscillating") {
    spec = WeightSpec::oscillating(read_weight(s.base_path), s.p.value_or(2.0), s.dilation, s.n_max.value_or(24));
  } else if (s.kind == "tilde") {
    spec = WeightSpec::tilde(read_weight(s.base_path));
  } else {
    throw UsageError("--kind: unknown weight kind '" + s.kind + "'");
  }
  try {
    spec.validate();
  } catch (const DomainError& e) {
    throw UsageError(std::string("build-weight: ") + e.what());
  }
  const RadialWeight w(spec);
  const OscillatingKnots* knots = w.oscillating_knots();
  if (s.format == OutputFormat::csv) {
    if (knots == nullptr) throw UsageError("--format: csv output is only defined for oscillating weights");
    std::ostringstream os;
    os.precision(17);
    os << "n,gap,width,height\n";
    for (std::size_t n = 0; n < knots->width.size(); ++n) {
      os << n << ',' << knots->gap[n] << ',' << knots->width[n] << ',' << knots->height[n] << '\n';
    }
    return {os.str(), 0};
  }
  return {dump(json(w.spec())), 0};
}

Report run_probe(const CommandSpec& s) {
  const double p = s.p.value_or(2.0);
  const auto cp = condition_params(s, p);
  std::optional<RadialWeight> w;
  if (!s.weight_path.empty()) w.emplace(read_weight(s.weight_path));
  ProbeResult r;
  if (s.probe == "boundedness") {
    BoundednessOptions o;
    o.conditions = cp;
    o.family.kind = s.family == "dual_block" ? FamilyKind::dual_block : FamilyKind::power_block;
    r = boundedness_probe(*w, p, space_from_string(s.space_x), space_from_string(s.space_y), o);
  } else if (s.probe == "equivalence") {
    EquivalenceOptions o;
    o.conditions = cp;
    r = equivalence_probe(*w, p, o);
  } else if (s.probe == "noncompactness") {
    r = noncompactness_probe(*w, p);
  } else if (s.probe == "monotonicity") {
    r = monotonicity_probe(*w, *s.q, p, cp);
  } else if (s.probe == "tilde-hat") {
    TildeHatOptions o;
    o.grid_depth = s.grid_depth;
    r = tilde_hat_probe(*w, o);
  } else if (s.probe == "embedding") {
    EmbeddingOptions o;
    if (s.degree > 0) o.max_degree = s.degree;
    r = embedding_probe(s.seed, o);
  } else if (s.probe == "two-path") {
    TwoPathOptions o;
    if (s.degree > 0) o.max_degree = s.degree;
    o.n_out = s.n_out.value_or(o.n_out);
    r = two_path_probe(*w, s.seed, o);
  }
  const int code = outcome_exit({r.outcome});
  if (s.format == OutputFormat::csv) return {summary_csv({r}), code};
  return {dump(to_json(r, s.timings)), code};
}

Report run_suite_command(const CommandSpec& s) {
  SuiteOptions o;
  o.seed = s.seed;
  o.conditions = condition_params(s);
  const auto rep = run_suite(o);
  const int code = rep.all_agree() ? 0 : 1;
  if (s.format == OutputFormat::csv) return {summary_csv(rep.probes), code};
  json j = to_json(rep, s.timings);
  j["parameters"] = {{"conditions", o.conditions}};
  return {dump(j), code};
}

}  // namespace

int run(const CommandSpec& s, std::ostream& out) {
  Report rep;
  switch (s.subcommand) {
    case Subcommand::analyze: rep = run_analyze(s); break;
    case Subcommand::conditions: rep = run_conditions(s); break;
    case Subcommand::apply: rep = run_apply(s); break;
    case Subcommand::kernel: rep = run_kernel(s); break;
    case Subcommand::build_weight: rep = run_build_weight(s); break;
    case Subcommand::probe: rep = run_probe(s); break;
    case Subcommand::suite: rep = run_suite_command(s); break;
  }
  if (s.output.empty()) {
    out << rep.text;
  } else {
    std::ofstream f(s.output, std::ios::binary);
    if (!f) throw InputError(s.output + ": cannot open for writing");
    f << rep.text;
    if (!f) throw InputError(s.output + ": write failed");
  }
  return rep.exit_code;
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CommandSpec spec;
  try {
    spec = parse_command(args);
  } catch (const HelpRequested& h) {
    out << h.what();
    return 0;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\nRun with --help for the list of flags.\n";
    return 1;
  }
  try {
    return run(spec, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
  } catch (const AccuracyError& e) {
    err << "accuracy error: " << e.what() << " (estimate " << e.estimate() << ", bound " << e.error_bound() << ")\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return 1;
}

}  // namespace weightlab::cli
