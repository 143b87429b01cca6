// Copyright 2026 The mcomplete Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end.
//
// Exit codes: 0 success, 1 usage error, 2 data error (I/O, parse),
// 3 numerical failure (stalled line search, degenerate core solve, ...).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mcomplete/error.h"
#include "mcomplete/harness.h"
#include "mcomplete/sparse.h"

namespace {

using namespace mcomplete;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

double parse_gamma(const std::string& text) {
  if (text == "inf" || text == "infinite" || text == "infinity") {
    return std::numeric_limits<double>::infinity();
  }
  const double v = parse_double_list(text).at(0);
  if (!(v > 0.0)) throw std::invalid_argument("--gamma must be > 0");
  return v;
}

struct CleaningFlags {
  std::string gamma = "inf";
  CleaningConfig config;
};

void add_cleaning_options(CLI::App* app, CleaningFlags* f) {
  CleaningConfig& c = f->config;
  app->add_option("--rho", c.rho, "penalty weight (default n*eps)");
  app->add_option("--mu0", c.mu0, "starting incoherence level")
      ->check(CLI::PositiveNumber);
  app->add_option("--gamma", f->gamma, "trust radius around x0, or 'inf'");
  app->add_option("--max-iters", c.max_iters)->check(CLI::NonNegativeNumber);
  app->add_option("--grad-tol", c.grad_tol, "gradient stop (default scaled)");
  app->add_option("--fit-tol", c.fit_tol, "relative squared fit stop");
  app->add_option("--initial-step", c.initial_step);
  app->add_option("--backtrack", c.backtrack)->check(CLI::Range(0.0, 1.0));
  app->add_option("--sufficient-decrease", c.sufficient_decrease)
      ->check(CLI::Range(0.0, 1.0));
  app->add_option("--max-backtracks", c.max_backtracks)
      ->check(CLI::NonNegativeNumber);
}

CleaningConfig finish(const CleaningFlags& f) {
  CleaningConfig c = f.config;
  c.gamma = parse_gamma(f.gamma);
  return c;
}

int report_stalled(const std::optional<CleaningSummary>& c) {
  if (c && (c->stalled || c->degenerate)) {
    std::cerr << "mcomplete: numerical failure: "
              << (c->stalled ? "line search stalled" : "degenerate core solve")
              << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}

// Expands "--config FILE" (flat key=value lines) into "--key value" tokens
// placed right after the subcommand, so explicit flags that follow win.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::vector<std::string> out;
  std::vector<std::string> from_file;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      out.push_back(args[i]);
      continue;
    }
    CLI::ConfigINI ini;
    for (const CLI::ConfigItem& item : ini.from_file(path)) {
      if (item.name == "++" || item.name == "--") continue;
      if (!item.parents.empty()) {
        throw CLI::ConversionError("config keys must be flat: " + item.name);
      }
      const std::string& value = item.inputs.empty() ? "" : item.inputs.front();
      if (value == "true" || value == "false") {
        if (value == "true") from_file.push_back("--" + item.name);
        continue;
      }
      from_file.push_back("--" + item.name);
      from_file.push_back(CLI::detail::join(item.inputs, ","));
    }
  }
  if (!from_file.empty()) {
    const auto sub = std::find_if(out.begin(), out.end(), [](const std::string& a) {
      return a == "generate" || a == "complete" || a == "spectrum" ||
             a == "experiment";
    });
    out.insert(sub == out.end() ? out.end() : sub + 1, from_file.begin(),
               from_file.end());
  }
  std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-rank matrix completion from a sparse subset of entries"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  const auto add_config_flag = [](CLI::App* sub) {
    sub->add_option("--config", "flat key=value file; flags given later win");
  };
  app.set_version_flag("--version", library_version());
  app.require_subcommand(1);
  app.fallthrough();
  int threads = 1;
  app.add_option("--threads", threads, "worker threads")
      ->check(CLI::PositiveNumber);

  // generate
  GenerateOptions gen;
  std::string gen_sigma, gen_model = "uniform";
  std::int64_t gen_revealed = 0;
  double gen_eps = 0.0;
  std::uint64_t gen_seed = 0;
  CLI::App* generate = app.add_subcommand("generate", "write random factors and a reveal");
  add_config_flag(generate);
  generate->add_option("--m", gen.m, "rows")->required();
  generate->add_option("--n", gen.n, "columns")->required();
  generate->add_option("--r", gen.r, "rank")->required();
  generate->add_option("--sigma", gen_sigma, "comma-separated singular values");
  generate->add_option("--model", gen_model, "uniform | bernoulli | heavytail");
  generate->add_option("--num-revealed", gen_revealed, "|E| for the uniform model");
  generate->add_option("--eps", gen_eps, "eps = |E|/sqrt(mn) for the other models");
  generate->add_option("--seed", gen_seed);
  generate->add_option("--output", gen.output_dir, "output directory");
  generate->add_flag("--allow-large", gen.allow_large);

  // complete
  CompleteOptions comp;
  CleaningFlags comp_clean;
  std::string comp_sweep, comp_rho_rule = "n_eps";
  bool comp_fixed_mu0 = false;
  CLI::App* complete_cmd = app.add_subcommand("complete", "reconstruct a matrix");
  add_config_flag(complete_cmd);
  complete_cmd->add_option("--observed", comp.observed_path, "MatrixMarket file")
      ->required();
  complete_cmd->add_option("--truth", comp.truth_path, "ground-truth factors");
  complete_cmd->add_option("--r", comp.pipeline.rank, "rank");
  complete_cmd->add_option("--rank-sweep", comp_sweep, "rmin,rmax");
  complete_cmd->add_option("--holdout-seed", comp.pipeline.holdout_seed);
  complete_cmd->add_flag("--skip-clean", comp.pipeline.skip_clean,
                         "stop after the spectral projection");
  complete_cmd->add_flag("--fixed-mu0", comp_fixed_mu0, "disable mu0 doubling");
  complete_cmd->add_option("--rho-rule", comp_rho_rule, "n_eps | spectral_scale");
  complete_cmd->add_option("--output", comp.output_dir, "output directory");
  add_cleaning_options(complete_cmd, &comp_clean);

  // spectrum
  SpectrumOptions spec_opts;
  CLI::App* spectrum = app.add_subcommand("spectrum", "singular values before and after trimming");
  add_config_flag(spectrum);
  spectrum->add_option("--observed", spec_opts.observed_path)->required();
  spectrum->add_option("--truth", spec_opts.truth_path);
  spectrum->add_option("--count", spec_opts.count, "number of singular values");
  spectrum->add_option("--r", spec_opts.rank, "rank for gap statistics");
  spectrum->add_option("--output", spec_opts.output_dir);

  // experiment
  ExperimentSpec exp;
  CleaningFlags exp_clean;
  std::string exp_kind, exp_dims, exp_ranks, exp_eps, exp_mult, exp_sigma,
      exp_seeds = "1-10", exp_model = "uniform";
  bool exp_skip = false, exp_clean_flag = false;
  CLI::App* experiment = app.add_subcommand("experiment", "run an experiment grid");
  add_config_flag(experiment);
  experiment
      ->add_option("--kind", exp_kind,
                   "spectrum_histogram | rmse_scaling | exact_recovery | "
                   "trim_effect | lemma_constants")
      ->required();
  experiment->add_option("--n", exp_dims, "comma-separated column counts")->required();
  experiment->add_option("--aspect", exp.aspect, "m / n");
  experiment->add_option("--r", exp_ranks, "comma-separated ranks")->required();
  experiment->add_option("--eps", exp_eps, "comma-separated eps grid");
  experiment->add_option("--log-multipliers", exp_mult,
                         "grid of c with |E| = c n log n");
  experiment->add_option("--sigma", exp_sigma);
  experiment->add_option("--seeds", exp_seeds, "list or range, e.g. 1-10");
  experiment->add_option("--model", exp_model);
  experiment->add_flag("--skip-clean", exp_skip);
  experiment->add_flag("--clean", exp_clean_flag);
  experiment->add_option("--success-threshold", exp.success_threshold);
  experiment->add_option("--num-singular-values", exp.num_singular_values);
  experiment->add_option("--output", exp.output_dir);
  experiment->add_flag("--allow-large", exp.allow_large);
  add_cleaning_options(experiment, &exp_clean);

  try {
    std::vector<std::string> args = expand_config(argc, argv);
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (generate->parsed()) {
      if (!gen_sigma.empty()) gen.sigma = parse_double_list(gen_sigma);
      const RevealKind kind = parse_reveal_kind(gen_model);
      gen.model = kind == RevealKind::kUniformFixedSize
                      ? RevealModel::uniform(gen_revealed, gen_seed)
                  : kind == RevealKind::kBernoulli
                      ? RevealModel::bernoulli(gen_eps, gen_seed)
                      : RevealModel::heavy_tail(gen_eps, gen_seed);
      if (kind == RevealKind::kUniformFixedSize && gen_revealed <= 0) {
        throw std::invalid_argument("--num-revealed must be > 0");
      }
      cmd_generate(gen);
      return kExitOk;
    }
    if (complete_cmd->parsed()) {
      set_product_threads(threads);
      comp.pipeline.cleaning = finish(comp_clean);
      comp.pipeline.adapt_mu0 = !comp_fixed_mu0;
      comp.pipeline.rho_rule = parse_rho_rule(comp_rho_rule);
      if (!comp_sweep.empty()) {
        const std::vector<int> range = parse_int_list(comp_sweep);
        if (range.size() != 2) {
          throw std::invalid_argument("--rank-sweep takes rmin,rmax");
        }
        comp.pipeline.rank_min = range[0];
        comp.pipeline.rank_max = range[1];
      } else if (comp.pipeline.rank <= 0) {
        throw std::invalid_argument("--r or --rank-sweep is required");
      }
      const RunRecord rec = cmd_complete(comp);
      return report_stalled(rec.cleaning);
    }
    if (spectrum->parsed()) {
      set_product_threads(threads);
      cmd_spectrum(spec_opts);
      return kExitOk;
    }
    if (experiment->parsed()) {
      exp.kind = parse_experiment_kind(exp_kind);
      exp.dims = parse_int_list(exp_dims);
      exp.ranks = parse_int_list(exp_ranks);
      if (!exp_eps.empty()) exp.eps = parse_double_list(exp_eps);
      if (!exp_mult.empty()) exp.log_multipliers = parse_double_list(exp_mult);
      if (!exp_sigma.empty()) exp.sigma = parse_double_list(exp_sigma);
      exp.seeds = parse_seed_list(exp_seeds);
      exp.reveal = parse_reveal_kind(exp_model);
      exp.skip_clean = exp.kind == ExperimentKind::kRmseScaling;
      if (exp_skip && exp_clean_flag) {
        throw std::invalid_argument("--skip-clean and --clean are exclusive");
      }
      if (exp_skip) exp.skip_clean = true;
      if (exp_clean_flag) exp.skip_clean = false;
      exp.cleaning = finish(exp_clean);
      exp.threads = threads;
      if (exp.output_dir.empty()) exp.output_dir = "results/" + exp_kind;
      const ExperimentResult result = run_experiment(exp);
      std::cout << result.summary.dump(2) << "\n";
      return kExitOk;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "mcomplete: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "mcomplete: data error: " << e.what() << "\n";
    return kExitData;
  } catch (const NumericalError& e) {
    std::cerr << "mcomplete: numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "mcomplete: error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
