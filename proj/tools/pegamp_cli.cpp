/*
 * Copyright (c) 2026 the pegamp authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Command-line front end: single recoveries, phase-transition and SNR
// sweeps, compressive image recovery, and state-evolution prediction.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pegamp/harness.hpp"

namespace {

namespace fs = std::filesystem;

pegamp::ExperimentConfig load_experiment_config(const std::string& path) {
  if (path.empty()) return pegamp::ExperimentConfig{};
  return pegamp::experiment_config_from_map(pegamp::parse_config_file(path));
}

fs::path prepare_out_dir(const std::string& out) {
  fs::path dir = out.empty() ? fs::path(".") : fs::path(out);
  fs::create_directories(dir);
  return dir;
}

void write_csv_file(const fs::path& path,
                    const std::function<void(std::ostream&)>& writer) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open file: " + path.string());
  writer(os);
  if (!os) throw std::runtime_error("cannot write file: " + path.string());
}

int run_recover(const std::string& matrix_path, const std::string& y_path,
                const std::string& variant_name, const std::string& config,
                const std::string& out) {
  const pegamp::SolverVariant variant =
      pegamp::solver_variant_from_string(variant_name);
  if (variant == pegamp::SolverVariant::kOracle)
    throw std::invalid_argument(
        "oracle variant needs known signal parameters; use a PE variant");
  pegamp::ExperimentConfig cfg = load_experiment_config(config);
  pegamp::Problem problem{pegamp::read_matrix_file(matrix_path),
                          {},
                          pegamp::read_vector_file(y_path)};
  if (problem.y.size() != problem.a.rows)
    throw std::invalid_argument("mismatched lengths");
  // True parameters are unused by the PE variants; placeholders keep the
  // shared entry point.
  const pegamp::InputChannelParams placeholder_input =
      pegamp::BgmParams{0.5, {1.0}, {0.0}, {1.0}};
  const pegamp::RecoveryResult res = pegamp::solve_variant(
      variant, problem, placeholder_input, pegamp::AwgnParams{1.0}, cfg);
  const fs::path dir = prepare_out_dir(out);
  const fs::path x_path = dir / "x_hat.txt";
  pegamp::write_vector_file(x_path.string(), res.x_hat);
  std::printf("recover: variant=%s iterations=%d converged=%s wrote %s\n",
              variant_name.c_str(), res.iterations_used,
              res.converged ? "yes" : "no", x_path.string().c_str());
  return 0;
}

int run_ptc(const std::string& config, const std::string& out,
            bool seed_set, std::uint64_t seed) {
  pegamp::ExperimentConfig cfg = load_experiment_config(config);
  if (seed_set) cfg.seed = seed;
  const pegamp::SweepResult result = pegamp::run_ptc_sweep(cfg);
  const fs::path dir = prepare_out_dir(out);
  write_csv_file(dir / "ptc.csv",
                 [&](std::ostream& os) { pegamp::write_ptc_csv(os, result); });
  pegamp::write_config_sidecar_json((dir / "ptc_config.json").string(), cfg,
                                    "ptc");
  std::printf("ptc: wrote %zu cells to %s\n", result.ptc_cells.size(),
              (dir / "ptc.csv").string().c_str());
  return 0;
}

int run_snr_sweep_cmd(const std::string& config, const std::string& out,
                      bool seed_set, std::uint64_t seed) {
  pegamp::ExperimentConfig cfg = load_experiment_config(config);
  if (seed_set) cfg.seed = seed;
  const pegamp::SweepResult result = pegamp::run_snr_sweep(cfg);
  const fs::path dir = prepare_out_dir(out);
  write_csv_file(dir / "snr.csv",
                 [&](std::ostream& os) { pegamp::write_snr_csv(os, result); });
  pegamp::write_config_sidecar_json((dir / "snr_config.json").string(), cfg,
                                    "snr-sweep");
  std::printf("snr-sweep: wrote %zu cells to %s\n", result.snr_cells.size(),
              (dir / "snr.csv").string().c_str());
  return 0;
}

int run_image(const std::string& image_path, const std::string& config,
              const std::string& out, bool seed_set, std::uint64_t seed) {
  pegamp::ExperimentConfig cfg = load_experiment_config(config);
  if (seed_set) cfg.seed = seed;
  const pegamp::SweepResult result =
      pegamp::run_image_recovery_file(image_path, cfg);
  const fs::path dir = prepare_out_dir(out);
  write_csv_file(dir / "image.csv", [&](std::ostream& os) {
    pegamp::write_image_csv(os, result);
  });
  pegamp::write_config_sidecar_json((dir / "image_config.json").string(), cfg,
                                    "image");
  std::printf("image: wrote %zu cells to %s\n", result.image_cells.size(),
              (dir / "image.csv").string().c_str());
  return 0;
}

int run_se_predict(const std::string& config, const std::string& out,
                   bool seed_set, std::uint64_t seed) {
  pegamp::SeConfig cfg =
      config.empty() ? pegamp::se_config_from_map({})
                     : pegamp::se_config_from_map(pegamp::parse_config_file(
                           config));
  if (seed_set) cfg.seed = seed;
  const std::vector<pegamp::SeState> trajectory = pegamp::se_run(cfg);
  const fs::path dir = prepare_out_dir(out);
  write_csv_file(dir / "se_trajectory.csv", [&](std::ostream& os) {
    pegamp::write_se_trajectory_csv(os, trajectory);
  });
  std::printf("se-predict: %zu iterations, final mse %.6g, wrote %s\n",
              trajectory.size(), trajectory.back().mse,
              (dir / "se_trajectory.csv").string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "sparse signal recovery via approximate message passing with "
      "built-in parameter estimation"};
  app.require_subcommand(1);

  std::string matrix_path;
  std::string y_path;
  std::string image_path;
  std::string config;
  std::string out;
  std::string variant = "pe_bgm";
  std::uint64_t seed = 0;

  CLI::App* recover = app.add_subcommand(
      "recover", "recover one signal from a matrix file and a measurement "
                 "vector file");
  recover->add_option("--matrix", matrix_path, "matrix file (\"rows cols\" "
                      "header, then row-major values)")->required();
  recover->add_option("--y", y_path, "measurement vector file")->required();
  recover->add_option("--variant", variant,
                      "pe_bgm | pe_bem | pe_lasso (default pe_bgm)");
  recover->add_option("--config", config, "key=value config file");
  recover->add_option("--out", out, "output directory (default .)");

  CLI::App* ptc = app.add_subcommand(
      "ptc", "empirical phase-transition sweep over (sigma, rho) cells");
  ptc->add_option("--config", config, "key=value config file");
  ptc->add_option("--out", out, "output directory (default .)");
  ptc->add_option("--seed", seed, "override the base seed");

  CLI::App* snr = app.add_subcommand(
      "snr-sweep", "recovery SNR versus measurement count at fixed support");
  snr->add_option("--config", config, "key=value config file");
  snr->add_option("--out", out, "output directory (default .)");
  snr->add_option("--seed", seed, "override the base seed");

  CLI::App* image = app.add_subcommand(
      "image", "compressive recovery of a square grayscale image");
  image->add_option("--image", image_path, "ASCII PGM (P2) image, square, "
                    "side <= 64")->required();
  image->add_option("--config", config, "key=value config file");
  image->add_option("--out", out, "output directory (default .)");
  image->add_option("--seed", seed, "override the base seed");

  CLI::App* se = app.add_subcommand(
      "se-predict", "Monte-Carlo state-evolution prediction of the solver "
                    "trajectory");
  se->add_option("--config", config, "key=value config file");
  se->add_option("--out", out, "output directory (default .)");
  se->add_option("--seed", seed, "override the base seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (recover->parsed())
      return run_recover(matrix_path, y_path, variant, config, out);
    if (ptc->parsed())
      return run_ptc(config, out, ptc->count("--seed") > 0, seed);
    if (snr->parsed())
      return run_snr_sweep_cmd(config, out, snr->count("--seed") > 0, seed);
    if (image->parsed())
      return run_image(image_path, config, out, image->count("--seed") > 0,
                       seed);
    if (se->parsed())
      return run_se_predict(config, out, se->count("--seed") > 0, seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
