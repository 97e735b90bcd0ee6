#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "aclab/experiment.hpp"
#include "aclab/hashing.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

// Paths inside a config resolve against the config file's directory, so a
// config can travel with its instance files.
std::string resolve_against(const std::string& config_path, const std::string& raw) {
  const fs::path p(raw);
  if (p.is_absolute()) return p.lexically_normal().string();
  return (fs::path(config_path).parent_path() / p).lexically_normal().string();
}

struct InstancePaths {
  std::string mdp;
  std::string policy_features;
  std::string critic_features;
};

InstancePaths instance_paths_from_config(const aclab::TextDoc& doc,
                                         const std::string& config_path) {
  InstancePaths paths;
  paths.mdp = resolve_against(config_path, doc.get_string("mdp"));
  paths.policy_features = resolve_against(config_path, doc.get_string("policy_features"));
  paths.critic_features = resolve_against(config_path, doc.get_string("critic_features"));
  return paths;
}

aclab::InstanceBundle load_bundle(const InstancePaths& paths) {
  aclab::FiniteMdp mdp = aclab::load_mdp(paths.mdp);
  int n_states = 0, n_actions = 0;
  const Eigen::MatrixXd policy_features =
      aclab::load_policy_features(paths.policy_features, &n_states, &n_actions);
  aclab::SoftmaxPolicy policy(policy_features, n_states, n_actions,
                              Eigen::VectorXd::Zero(policy_features.cols()));
  aclab::CriticFeatures critic = aclab::load_critic_features(paths.critic_features);
  return aclab::InstanceBundle{std::move(mdp), std::move(policy), std::move(critic)};
}

const std::vector<std::string> kScheduleKeys = {
    "schedule.actor_scale",  "schedule.actor_decay", "schedule.critic_scale",
    "schedule.critic_decay", "schedule.target_scale", "schedule.target_decay"};

const std::vector<std::string> kLearnerKeys = {
    "learner.actor_uses_target_error", "learner.norm_guard",
    "learner.target_sync_period", "learner.initial_critic_weights",
    "learner.initial_target_weights"};

aclab::PowerSchedule schedule_from_config(const aclab::TextDoc& doc) {
  aclab::PowerSchedule s;
  s.actor_scale = doc.get_number_or("schedule.actor_scale", s.actor_scale);
  s.actor_decay = doc.get_number_or("schedule.actor_decay", s.actor_decay);
  s.critic_scale = doc.get_number_or("schedule.critic_scale", s.critic_scale);
  s.critic_decay = doc.get_number_or("schedule.critic_decay", s.critic_decay);
  s.target_scale = doc.get_number_or("schedule.target_scale", s.target_scale);
  s.target_decay = doc.get_number_or("schedule.target_decay", s.target_decay);
  return s;
}

Eigen::VectorXd to_vector(const std::vector<double>& values) {
  return Eigen::Map<const Eigen::VectorXd>(values.data(),
                                           static_cast<Eigen::Index>(values.size()));
}

aclab::LearnerOptions learner_from_config(const aclab::TextDoc& doc) {
  aclab::LearnerOptions o;
  o.actor_uses_target_error = doc.get_bool_or("learner.actor_uses_target_error", false);
  o.norm_guard = doc.get_number_or("learner.norm_guard", 0.0);
  o.target_sync_period = doc.get_integer_or("learner.target_sync_period", 0);
  if (doc.has("learner.initial_critic_weights"))
    o.initial_critic_weights = to_vector(doc.get_list("learner.initial_critic_weights"));
  if (doc.has("learner.initial_target_weights"))
    o.initial_target_weights = to_vector(doc.get_list("learner.initial_target_weights"));
  return o;
}

void reject_unknown_keys(const aclab::TextDoc& doc, std::vector<std::string> allowed,
                         const std::string& what) {
  allowed.insert(allowed.end(), kScheduleKeys.begin(), kScheduleKeys.end());
  const auto unknown = doc.unknown_keys(allowed);
  if (!unknown.empty())
    throw std::runtime_error(what + ": unknown key '" + unknown.front() + "'");
}

std::string expect_schema(const aclab::TextDoc& doc, const std::string& expected,
                          const std::string& what) {
  const std::string schema = doc.get_string_or("schema", "");
  if (schema != expected)
    throw std::runtime_error(what + ": expected schema \"" + expected + "\", found \"" +
                             schema + "\"");
  return schema;
}

nlohmann::ordered_json doc_to_json(const aclab::TextDoc& doc) {
  nlohmann::ordered_json out;
  for (const std::string& key : doc.keys()) {
    const auto& value = doc.at(key);
    using Kind = aclab::TextDoc::Value::Kind;
    switch (value.kind) {
      case Kind::boolean:
        out[key] = value.b;
        break;
      case Kind::number:
        if (value.is_integer)
          out[key] = static_cast<std::int64_t>(value.num);
        else
          out[key] = value.num;
        break;
      case Kind::string:
        out[key] = value.str;
        break;
      case Kind::number_list:
        out[key] = value.list;
        break;
    }
  }
  return out;
}

std::string csv_quote(const std::string& raw) {
  std::string out = "\"";
  for (char c : raw) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string doc_to_csv(const aclab::TextDoc& doc) {
  std::string out = "key,value\n";
  for (const std::string& key : doc.keys()) {
    const auto& value = doc.at(key);
    using Kind = aclab::TextDoc::Value::Kind;
    out += key;
    out += ',';
    switch (value.kind) {
      case Kind::boolean:
        out += value.b ? "true" : "false";
        break;
      case Kind::number:
        if (value.is_integer)
          out += std::to_string(static_cast<std::int64_t>(value.num));
        else
          out += aclab::csv_double(value.num);
        break;
      case Kind::string:
        out += csv_quote(value.str);
        break;
      case Kind::number_list: {
        std::string joined;
        for (size_t i = 0; i < value.list.size(); ++i) {
          if (i) joined += ';';
          joined += aclab::csv_double(value.list[i]);
        }
        out += csv_quote(joined);
        break;
      }
    }
    out += '\n';
  }
  return out;
}

// Renders a report document in the requested format and either prints it or
// writes it under the output directory.
void emit_report(const aclab::TextDoc& doc, const std::string& format,
                 const std::string& out_dir, const std::string& basename) {
  std::string text;
  std::string extension;
  if (format == "json") {
    text = doc_to_json(doc).dump(2) + "\n";
    extension = ".json";
  } else if (format == "csv") {
    text = doc_to_csv(doc);
    extension = ".csv";
  } else {
    text = doc.serialize();
    extension = ".toml";
  }
  if (out_dir.empty()) {
    std::cout << text;
    return;
  }
  fs::create_directories(out_dir);
  const fs::path path = fs::path(out_dir) / (basename + extension);
  write_file(path, text);
  std::cout << "wrote " << path.string() << "\n";
}

aclab::RunManifest make_manifest(const std::string& subcommand, const std::string& config_text,
                                 const std::vector<std::string>& input_paths,
                                 std::uint64_t base_seed, int n_seeds) {
  aclab::RunManifest manifest;
  manifest.tool_version = aclab::kToolVersion;
  manifest.subcommand = subcommand;
  manifest.config_text = config_text;
  for (const std::string& path : input_paths)
    manifest.input_hashes.emplace_back(path, aclab::file_content_hash(path));
  for (int k = 0; k < n_seeds; ++k)
    manifest.seeds.push_back(base_seed + static_cast<std::uint64_t>(k));
  manifest.started_at = aclab::utc_timestamp();
  return manifest;
}

struct ValidateArgs {
  std::string path;
};

int run_validate(const ValidateArgs& args) {
  aclab::FiniteMdp mdp;
  try {
    mdp = aclab::load_mdp(args.path);
  } catch (const std::exception& e) {
    std::cerr << args.path << ": " << e.what() << "\n";
    return kExitFailure;
  }
  const auto violations = aclab::validate(mdp);
  if (violations.empty()) {
    std::cout << args.path << ": ok (" << mdp.n_states << " states, " << mdp.n_actions
              << " actions, discount " << aclab::format_double(mdp.discount) << ")\n";
    return kExitOk;
  }
  for (const auto& v : violations) std::cerr << args.path << ": " << v.to_string() << "\n";
  std::cerr << args.path << ": " << violations.size() << " violation(s)\n";
  return kExitFailure;
}

struct OracleArgs {
  std::string mdp;
  std::string policy_features;
  std::string critic_features;
  std::string theta = "zeros";
  std::string out_dir;
  std::string format;
  bool check = false;
};

Eigen::VectorXd parse_theta(const std::string& spec, Eigen::Index param_dim) {
  if (spec == "zeros") return Eigen::VectorXd::Zero(param_dim);
  const aclab::TextDoc doc = aclab::TextDoc::load(spec);
  expect_schema(doc, "aclab-params/1", spec);
  const auto unknown = doc.unknown_keys({"schema", "values"});
  if (!unknown.empty())
    throw std::runtime_error(spec + ": unknown key '" + unknown.front() + "'");
  Eigen::VectorXd theta = to_vector(doc.get_list("values"));
  if (theta.size() != param_dim)
    throw std::runtime_error(spec + ": expected " + std::to_string(param_dim) +
                             " parameter values, found " + std::to_string(theta.size()));
  return theta;
}

int run_oracle(const OracleArgs& args) {
  aclab::InstanceBundle bundle =
      load_bundle({args.mdp, args.policy_features, args.critic_features});
  bundle.policy.set_params(parse_theta(args.theta, bundle.policy.params().size()));

  const aclab::OracleReport report =
      aclab::oracle_report(bundle.mdp, bundle.policy, bundle.critic);
  emit_report(aclab::oracle_report_to_doc(report), args.format, args.out_dir,
              "oracle_report");

  if (!args.check) return kExitOk;
  const auto checks = aclab::oracle_checks(bundle.mdp, bundle.policy, bundle.critic);
  int failed = 0;
  for (const auto& check : checks) {
    if (!check.passed) {
      ++failed;
      std::cerr << "check failed: " << check.name << " (" << check.detail << ")\n";
    }
  }
  std::cout << "oracle checks: " << (checks.size() - failed) << "/" << checks.size()
            << " passed\n";
  return failed == 0 ? kExitOk : kExitFailure;
}

struct RunArgs {
  std::string config;
  std::string out_dir = ".";
  std::int64_t seed = -1;
  int n_seeds = -1;
  std::int64_t horizon = -1;
  std::int64_t stride = -1;
  int jobs = 0;
};

const std::vector<std::string> kRunKeys = {
    "schema",          "kind",        "mdp",
    "policy_features", "critic_features", "horizon",
    "snapshot_stride", "oracle_stride",   "seed",
    "n_seeds",         "stationarity_epsilon", "average_checkpoints"};

int run_run(const RunArgs& args) {
  const std::string config_text = read_file(args.config);
  const aclab::TextDoc doc = aclab::TextDoc::parse(config_text);
  expect_schema(doc, "aclab-run/1", args.config);
  {
    auto allowed = kRunKeys;
    allowed.insert(allowed.end(), kLearnerKeys.begin(), kLearnerKeys.end());
    reject_unknown_keys(doc, allowed, args.config);
  }

  const std::string kind = doc.get_string_or("kind", "trace");
  if (kind != "trace" && kind != "critic-eval" && kind != "full-actor-critic")
    throw std::runtime_error(args.config + ": unknown kind \"" + kind + "\"");

  const InstancePaths paths = instance_paths_from_config(doc, args.config);
  const aclab::InstanceBundle bundle = load_bundle(paths);
  const aclab::PowerSchedule schedule = schedule_from_config(doc);

  aclab::ExperimentOptions options;
  options.learner = learner_from_config(doc);
  options.metrics.horizon = args.horizon >= 0 ? args.horizon : doc.get_integer("horizon");
  options.metrics.snapshot_stride =
      args.stride >= 0 ? args.stride : doc.get_integer_or("snapshot_stride", 0);
  options.metrics.oracle_stride = doc.get_integer_or("oracle_stride", 1);
  if (doc.has("average_checkpoints")) {
    for (double v : doc.get_list("average_checkpoints"))
      options.metrics.average_checkpoints.push_back(static_cast<std::int64_t>(v));
  }
  options.base_seed = args.seed >= 0 ? static_cast<std::uint64_t>(args.seed)
                                     : static_cast<std::uint64_t>(doc.get_integer_or("seed", 1));
  options.n_seeds = args.n_seeds > 0 ? args.n_seeds
                                     : static_cast<int>(doc.get_integer_or("n_seeds", 1));
  options.jobs = args.jobs;

  const int manifest_seeds = kind == "trace" ? 1 : options.n_seeds;
  aclab::RunManifest manifest =
      make_manifest("run", config_text,
                    {args.config, paths.mdp, paths.policy_features, paths.critic_features},
                    options.base_seed, manifest_seeds);

  fs::create_directories(args.out_dir);
  const fs::path out(args.out_dir);

  aclab::MetricOptions trace_metrics = options.metrics;
  trace_metrics.actor_metrics = true;
  const aclab::MetricTrace trace =
      aclab::traced_run(bundle, schedule, options.learner, options.base_seed, trace_metrics);
  write_file(out / "run.csv", aclab::run_csv_text(trace));
  std::cout << "wrote " << (out / "run.csv").string() << " (" << trace.snapshot_ts.size()
            << " rows)\n";

  if (kind == "critic-eval") {
    options.metrics.actor_metrics = false;
    const aclab::TrackingResult tracking = aclab::critic_tracking(bundle, schedule, options);
    write_file(out / "tracking.csv", aclab::tracking_csv_text(tracking));
    std::cout << "wrote " << (out / "tracking.csv").string() << " (" << tracking.n_seeds
              << " seeds, terminal mean error "
              << aclab::format_double(tracking.terminal_err_mean) << ")\n";
    if (tracking.failed_seeds > 0)
      std::cerr << "warning: " << tracking.failed_seeds << " of " << tracking.n_seeds
                << " seeds failed\n";
  } else if (kind == "full-actor-critic") {
    options.metrics.actor_metrics = true;
    const double epsilon = doc.get_number_or("stationarity_epsilon", 0.01);
    const aclab::StationarityResult stationarity =
        aclab::actor_stationarity(bundle, schedule, options, epsilon);
    write_file(out / "stationarity.csv", aclab::stationarity_csv_text(stationarity));
    std::cout << "wrote " << (out / "stationarity.csv").string() << " (" << stationarity.n_seeds
              << " seeds, min mean grad sq "
              << aclab::format_double(stationarity.min_grad_norm_sq) << ")\n";
    if (stationarity.failed_seeds > 0)
      std::cerr << "warning: " << stationarity.failed_seeds << " of " << stationarity.n_seeds
                << " seeds failed\n";
  }

  manifest.finished_at = aclab::utc_timestamp();
  write_file(out / "manifest.json", aclab::manifest_to_json(manifest));
  std::cout << "wrote " << (out / "manifest.json").string() << "\n";
  return kExitOk;
}

struct SweepArgs {
  std::string config;
  std::string out_dir = ".";
  std::int64_t seed = -1;
  int n_seeds = -1;
  int jobs = 0;
  bool plot = false;
};

const std::vector<std::string> kSweepKeys = {
    "schema",  "mdp",     "policy_features", "critic_features",
    "horizons", "n_seeds", "seed",            "oracle_stride"};

int run_sweep(const SweepArgs& args) {
  const std::string config_text = read_file(args.config);
  const aclab::TextDoc doc = aclab::TextDoc::parse(config_text);
  expect_schema(doc, "aclab-sweep/1", args.config);
  {
    auto allowed = kSweepKeys;
    allowed.insert(allowed.end(), kLearnerKeys.begin(), kLearnerKeys.end());
    reject_unknown_keys(doc, allowed, args.config);
  }

  const InstancePaths paths = instance_paths_from_config(doc, args.config);
  const aclab::InstanceBundle bundle = load_bundle(paths);
  const aclab::PowerSchedule schedule = schedule_from_config(doc);

  std::vector<std::int64_t> horizons;
  for (double v : doc.get_list("horizons")) horizons.push_back(static_cast<std::int64_t>(v));

  aclab::ExperimentOptions options;
  options.learner = learner_from_config(doc);
  options.metrics.oracle_stride = doc.get_integer_or("oracle_stride", 1);
  options.base_seed = args.seed >= 0 ? static_cast<std::uint64_t>(args.seed)
                                     : static_cast<std::uint64_t>(doc.get_integer_or("seed", 1));
  options.n_seeds = args.n_seeds > 0 ? args.n_seeds
                                     : static_cast<int>(doc.get_integer_or("n_seeds", 20));
  options.jobs = args.jobs;

  aclab::RunManifest manifest =
      make_manifest("sweep", config_text,
                    {args.config, paths.mdp, paths.policy_features, paths.critic_features},
                    options.base_seed, options.n_seeds);

  const aclab::RateFit fit = aclab::rate_sweep(bundle, schedule, horizons, options);

  fs::create_directories(args.out_dir);
  const fs::path out(args.out_dir);
  write_file(out / "rate.csv", aclab::rate_csv_text(fit));
  std::cout << "wrote " << (out / "rate.csv").string() << "\n";

  nlohmann::ordered_json j;
  j["schema"] = "aclab-rate-fit/1";
  j["config_hash"] = aclab::content_hash(config_text);
  j["horizons"] = fit.horizons;
  j["values"] = fit.values;
  j["std_errors"] = fit.std_errors;
  j["fit_ok"] = fit.fit_ok;
  j["refusal"] = fit.refusal;
  j["slope"] = fit.slope;
  j["slope_se"] = fit.slope_se;
  j["intercept"] = fit.intercept;
  j["term_exponents"] = {{"target", fit.term_target},
                         {"critic", fit.term_critic},
                         {"actor_gap", fit.term_actor_gap},
                         {"target_gap", fit.term_target_gap}};
  j["dominant_exponent"] = fit.dominant_exponent;
  j["n_seeds"] = fit.n_seeds;
  j["failed_seeds"] = fit.failed_seeds;
  write_file(out / "rate_fit.json", j.dump(2) + "\n");
  std::cout << "wrote " << (out / "rate_fit.json").string() << "\n";

  if (args.plot) {
    write_file(out / "rate.svg",
               aclab::rate_svg(fit, "time-averaged critic error vs horizon"));
    std::cout << "wrote " << (out / "rate.svg").string() << "\n";
  }

  manifest.finished_at = aclab::utc_timestamp();
  write_file(out / "manifest.json", aclab::manifest_to_json(manifest));
  std::cout << "wrote " << (out / "manifest.json").string() << "\n";

  if (fit.fit_ok) {
    std::cout << "empirical slope " << aclab::format_double(fit.slope)
              << ", theoretical dominant exponent "
              << aclab::format_double(fit.dominant_exponent) << "\n";
  } else {
    std::cout << "fit refused: " << fit.refusal << "\n";
  }
  if (fit.failed_seeds > 0)
    std::cerr << "warning: " << fit.failed_seeds << " of " << fit.n_seeds
              << " seeds failed\n";
  return kExitOk;
}

struct AuditArgs {
  std::string config;
  std::string mdp;
  std::string policy_features;
  std::string critic_features;
  std::string out_dir;
  std::string format;
  bool check = false;
};

const std::vector<std::string> kAuditKeys = {
    "schema",        "mdp",         "policy_features", "critic_features",
    "n_param_samples", "sample_seed", "sample_scale",    "horizon"};

int run_audit(const AuditArgs& args) {
  InstancePaths paths;
  aclab::PowerSchedule schedule;
  aclab::AuditOptions audit_options;

  if (!args.config.empty()) {
    const aclab::TextDoc doc = aclab::TextDoc::load(args.config);
    expect_schema(doc, "aclab-audit/1", args.config);
    reject_unknown_keys(doc, kAuditKeys, args.config);
    paths = instance_paths_from_config(doc, args.config);
    schedule = schedule_from_config(doc);
    audit_options.n_param_samples =
        static_cast<int>(doc.get_integer_or("n_param_samples", audit_options.n_param_samples));
    audit_options.sample_seed = static_cast<std::uint64_t>(
        doc.get_integer_or("sample_seed", static_cast<std::int64_t>(audit_options.sample_seed)));
    audit_options.sample_scale = doc.get_number_or("sample_scale", audit_options.sample_scale);
    audit_options.horizon = doc.get_integer_or("horizon", audit_options.horizon);
  } else {
    paths = {args.mdp, args.policy_features, args.critic_features};
  }

  const aclab::InstanceBundle bundle = load_bundle(paths);
  const aclab::AuditReport report = aclab::assumption_audit(bundle, schedule, audit_options);
  emit_report(aclab::audit_report_to_doc(report), args.format, args.out_dir, "audit_report");

  int failed = 0;
  for (const auto& check : report.checks)
    if (!check.passed) ++failed;
  std::cout << "audit: " << (report.checks.size() - failed) << "/" << report.checks.size()
            << " checks passed\n";
  if (args.check && !report.all_passed) {
    for (const auto& check : report.checks)
      if (!check.passed)
        std::cerr << "audit check failed: " << check.name << " (" << check.detail << ")\n";
    return kExitFailure;
  }
  return kExitOk;
}

struct CheckArgs {
  std::string config;
  std::string out_dir;
  std::string format;
};

int run_check(const CheckArgs& args) {
  const aclab::TextDoc doc = aclab::TextDoc::load(args.config);
  const std::string schema = doc.get_string_or("schema", "");
  if (schema != "aclab-run/1" && schema != "aclab-sweep/1" && schema != "aclab-audit/1")
    throw std::runtime_error(args.config + ": unrecognized config schema \"" + schema + "\"");
  const aclab::PowerSchedule schedule = schedule_from_config(doc);
  schedule.validate();
  const aclab::ScheduleReport report = aclab::analyze_schedule(schedule);

  aclab::TextDoc out;
  out.set_string("schema", "aclab-schedule-report/1");
  out.set_string("regime", aclab::regime_name(report.regime));
  out.set_bool("diverges_actor", report.diverges_actor);
  out.set_bool("diverges_critic", report.diverges_critic);
  out.set_bool("diverges_target", report.diverges_target);
  out.set_bool("square_summable_actor", report.square_summable_actor);
  out.set_bool("square_summable_critic", report.square_summable_critic);
  out.set_bool("square_summable_target", report.square_summable_target);
  out.set_bool("ratios_vanish", report.ratios_vanish);
  out.set_bool("finite_time_ordering", report.finite_time_ordering);
  out.set_bool("target_step_bounded", report.target_step_bounded);
  out.set_bool("nonincreasing", report.nonincreasing);
  out.set_number("schedule.actor_scale", schedule.actor_scale);
  out.set_number("schedule.actor_decay", schedule.actor_decay);
  out.set_number("schedule.critic_scale", schedule.critic_scale);
  out.set_number("schedule.critic_decay", schedule.critic_decay);
  out.set_number("schedule.target_scale", schedule.target_scale);
  out.set_number("schedule.target_decay", schedule.target_decay);
  emit_report(out, args.format, args.out_dir, "schedule_report");

  return report.regime == aclab::ScheduleRegime::neither ? kExitFailure : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for target-based actor-critic methods on finite MDPs"};
  app.set_version_flag("--version", aclab::kToolVersion);
  app.require_subcommand(1);

  ValidateArgs validate_args;
  auto* validate_cmd =
      app.add_subcommand("validate", "Validate an MDP file and list violations");
  validate_cmd->add_option("path", validate_args.path, "MDP file to validate")->required();

  OracleArgs oracle_args;
  auto* oracle_cmd =
      app.add_subcommand("oracle", "Exact occupancy, value, gradient, and spectral report");
  oracle_cmd->add_option("--mdp", oracle_args.mdp, "MDP file")->required();
  oracle_cmd->add_option("--policy-features", oracle_args.policy_features,
                         "policy feature file")->required();
  oracle_cmd->add_option("--critic-features", oracle_args.critic_features,
                         "critic feature file")->required();
  oracle_cmd->add_option("--theta", oracle_args.theta,
                         "policy parameters: 'zeros' or a params file");
  oracle_cmd->add_option("--out", oracle_args.out_dir, "output directory");
  oracle_cmd->add_option("--format", oracle_args.format, "report format")
      ->check(CLI::IsMember({"csv", "json"}));
  oracle_cmd->add_flag("--check", oracle_args.check,
                       "run every oracle identity check; nonzero exit on failure");

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Seeded learning run with oracle metrics");
  run_cmd->add_option("--config", run_args.config, "run config file")->required();
  run_cmd->add_option("--out", run_args.out_dir, "output directory");
  run_cmd->add_option("--seed", run_args.seed, "base seed override");
  run_cmd->add_option("--seeds", run_args.n_seeds, "seed count override");
  run_cmd->add_option("--horizon", run_args.horizon, "horizon override");
  run_cmd->add_option("--stride", run_args.stride, "snapshot stride override");
  run_cmd->add_option("--jobs", run_args.jobs, "worker threads (0 = hardware)");

  SweepArgs sweep_args;
  auto* sweep_cmd =
      app.add_subcommand("sweep", "Rate sweep over horizons with a log-log fit");
  sweep_cmd->add_option("--config", sweep_args.config, "sweep config file")->required();
  sweep_cmd->add_option("--out", sweep_args.out_dir, "output directory");
  sweep_cmd->add_option("--seed", sweep_args.seed, "base seed override");
  sweep_cmd->add_option("--seeds", sweep_args.n_seeds, "seed count override");
  sweep_cmd->add_option("--jobs", sweep_args.jobs, "worker threads (0 = hardware)");
  sweep_cmd->add_flag("--plot", sweep_args.plot, "emit an SVG log-log plot");

  AuditArgs audit_args;
  auto* audit_cmd =
      app.add_subcommand("audit", "Consolidated assumption audit for an instance");
  audit_cmd->add_option("--config", audit_args.config, "audit config file");
  audit_cmd->add_option("--mdp", audit_args.mdp, "MDP file (without --config)");
  audit_cmd->add_option("--policy-features", audit_args.policy_features,
                        "policy feature file (without --config)");
  audit_cmd->add_option("--critic-features", audit_args.critic_features,
                        "critic feature file (without --config)");
  audit_cmd->add_option("--out", audit_args.out_dir, "output directory");
  audit_cmd->add_option("--format", audit_args.format, "report format")
      ->check(CLI::IsMember({"csv", "json"}));
  audit_cmd->add_flag("--check", audit_args.check, "nonzero exit unless every check passes");

  CheckArgs check_args;
  auto* check_cmd =
      app.add_subcommand("check", "Print the schedule assumption report for a config");
  check_cmd->add_option("--config", check_args.config, "config file with a schedule section")
      ->required();
  check_cmd->add_option("--out", check_args.out_dir, "output directory");
  check_cmd->add_option("--format", check_args.format, "report format")
      ->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help() << std::flush;
    return kExitUsage;
  }

  try {
    if (validate_cmd->parsed()) return run_validate(validate_args);
    if (oracle_cmd->parsed()) return run_oracle(oracle_args);
    if (run_cmd->parsed()) return run_run(run_args);
    if (sweep_cmd->parsed()) return run_sweep(sweep_args);
    if (audit_cmd->parsed()) {
      if (audit_args.config.empty() &&
          (audit_args.mdp.empty() || audit_args.policy_features.empty() ||
           audit_args.critic_features.empty())) {
        std::cerr << "error: audit needs --config or all of --mdp, --policy-features, "
                     "--critic-features\n\n"
                  << audit_cmd->help() << std::flush;
        return kExitUsage;
      }
      return run_audit(audit_args);
    }
    if (check_cmd->parsed()) return run_check(check_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
