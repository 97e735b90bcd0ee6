// Regenerates the default instance files and sample configs under data/.
// Every asset is a deterministic function of the seeds written here, so a
// regeneration into a scratch directory must reproduce the committed files
// byte for byte.
#include <filesystem>
#include <iostream>
#include <string>

#include "aclab/experiment.hpp"

namespace fs = std::filesystem;

namespace {

void write_schedule_section(aclab::TextDoc& doc, double actor_scale, double actor_decay,
                            double critic_scale, double critic_decay, double target_scale,
                            double target_decay) {
  doc.set_number("schedule.actor_scale", actor_scale);
  doc.set_number("schedule.actor_decay", actor_decay);
  doc.set_number("schedule.critic_scale", critic_scale);
  doc.set_number("schedule.critic_decay", critic_decay);
  doc.set_number("schedule.target_scale", target_scale);
  doc.set_number("schedule.target_decay", target_decay);
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path out_dir = argc > 1 ? argv[1] : "data";
  fs::create_directories(out_dir);
  const auto path = [&out_dir](const char* name) { return (out_dir / name).string(); };

  // Desk-scale default environment: 5 states, 3 actions, branching 2.
  const aclab::FiniteMdp mdp = aclab::make_garnet(5, 3, 2, 0.9, 77);
  aclab::save_mdp(mdp, path("default_garnet.toml"));

  // Tabular policy parameterization: one logit per (state, action) pair.
  aclab::save_policy_features(Eigen::MatrixXd::Identity(15, 15), 5, 3,
                              path("policy_features_tabular.toml"));

  // Tabular critic span (exact representation) and a two-dimensional
  // orthonormal span that cannot represent most value functions.
  aclab::save_critic_features(aclab::CriticFeatures::tabular(5),
                              path("critic_features_tabular.toml"));
  aclab::save_critic_features(aclab::CriticFeatures::gaussian_orthonormal(5, 2, 8),
                              path("critic_features_deficient.toml"));

  {
    aclab::TextDoc run;
    run.set_string("schema", "aclab-run/1");
    run.set_string("kind", "critic-eval");
    run.set_string("mdp", "default_garnet.toml");
    run.set_string("policy_features", "policy_features_tabular.toml");
    run.set_string("critic_features", "critic_features_tabular.toml");
    run.set_integer("horizon", 20000);
    run.set_integer("snapshot_stride", 1000);
    run.set_integer("seed", 1);
    run.set_integer("n_seeds", 4);
    write_schedule_section(run, 0.0, 2.0 / 3.0, 0.5, 1.0 / 3.0, 0.5, 0.5);
    run.save(path("run.toml"));
  }

  {
    aclab::TextDoc sweep;
    sweep.set_string("schema", "aclab-sweep/1");
    sweep.set_string("mdp", "default_garnet.toml");
    sweep.set_string("policy_features", "policy_features_tabular.toml");
    sweep.set_string("critic_features", "critic_features_tabular.toml");
    sweep.set_list("horizons", {500.0, 2000.0, 8000.0, 32000.0});
    sweep.set_integer("n_seeds", 6);
    sweep.set_integer("seed", 1);
    write_schedule_section(sweep, 0.0, 2.0 / 3.0, 0.5, 1.0 / 3.0, 0.5, 0.5);
    sweep.save(path("sweep.toml"));
  }

  {
    aclab::TextDoc audit;
    audit.set_string("schema", "aclab-audit/1");
    audit.set_string("mdp", "default_garnet.toml");
    audit.set_string("policy_features", "policy_features_tabular.toml");
    audit.set_string("critic_features", "critic_features_tabular.toml");
    audit.set_integer("n_param_samples", 20);
    audit.set_integer("sample_seed", 99);
    write_schedule_section(audit, 0.5, 2.0 / 3.0, 0.5, 1.0 / 3.0, 0.5, 0.5);
    audit.save(path("audit.toml"));
  }

  std::cout << "assets written to " << out_dir.string() << "\n";
  return 0;
}
