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

#ifndef MCOMPLETE_HARNESS_H_
#define MCOMPLETE_HARNESS_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcomplete/cleaning.h"
#include "mcomplete/grassmann.h"
#include "mcomplete/metrics.h"
#include "mcomplete/pipeline.h"
#include "mcomplete/sampling.h"
#include "mcomplete/trim.h"

namespace mcomplete {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;
// Largest dimension accepted without allow_large.
inline constexpr int kDeskScaleLimit = 10000;

std::string library_version();

enum class ExperimentKind {
  kSpectrumHistogram,
  kRmseScaling,
  kExactRecovery,
  kTrimEffect,
  kLemmaConstants,
};
std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& name);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::kRmseScaling;
  std::vector<int> dims;        // n; m = round(aspect * n)
  double aspect = 1.0;
  std::vector<int> ranks;
  // Sample budget grid: eps (|E| = round(eps sqrt(mn))) or, when
  // `log_multipliers` is nonempty, |E| = round(c n log n).
  std::vector<double> eps;
  std::vector<double> log_multipliers;
  // Sigma_1..Sigma_r for every rank; empty means all ones.
  std::vector<double> sigma;
  std::vector<std::uint64_t> seeds;
  RevealKind reveal = RevealKind::kUniformFixedSize;
  // Projection-only runs (rmse_scaling defaults to this).
  bool skip_clean = true;
  CleaningConfig cleaning;
  // Relative Frobenius error counted as exact recovery.
  double success_threshold = 1e-6;
  // Singular values computed per spectrum (spectrum_histogram, trim_effect).
  int num_singular_values = 10;
  std::string output_dir;
  int threads = 1;
  bool allow_large = false;

  // Throws std::invalid_argument on empty grids, duplicate seeds or
  // dimensions above kDeskScaleLimit without allow_large.
  void validate() const;
  Json to_json() const;
  static ExperimentSpec from_json(const Json& j);
};

struct CleaningSummary {
  int iterations = 0;
  double f = 0.0;
  double g = 0.0;
  double ftilde = 0.0;
  double grad_norm = 0.0;
  double fit_residual = 0.0;
  double rho = 0.0;
  double grad_tol = 0.0;
  std::string reason;
  bool stalled = false;
  bool degenerate = false;
  double mu0 = 1.0;
  int mu0_restarts = 0;
  double residual_start = 0.0;
  double residual_final = 0.0;

  friend bool operator==(const CleaningSummary&, const CleaningSummary&) =
      default;
};

CleaningSummary summarize(const CompletionResult& result);

// One run of an experiment or of the `complete` command.
struct RunRecord {
  int schema_version = kSchemaVersion;
  std::string library_version;
  std::string kind;
  Json spec;
  std::uint64_t seed = 0;
  int m = 0;
  int n = 0;
  int r = 0;
  double eps = 0.0;
  std::int64_t num_revealed = 0;
  std::string reveal;
  bool ok = true;
  std::string error;
  std::optional<ErrorReport> projection_error;
  std::optional<ErrorReport> final_error;
  std::optional<GapBound> gap;
  std::optional<SpectralDiagnostics> spectral;
  std::optional<TrimReport> trim;
  std::optional<CleaningSummary> cleaning;
  std::vector<double> spectrum_before;
  std::vector<double> spectrum_after;
  std::vector<RankSweepRow> sweep;
  // Experiment-specific scalars.
  std::map<std::string, double> values;
  // Wall-clock seconds; excluded from determinism comparisons.
  std::map<std::string, double> timing;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

Json to_json(const RunRecord& record);
RunRecord run_record_from_json(const Json& j);
// The record without its "timing" object.
Json deterministic_json(const RunRecord& record);

struct ExperimentResult {
  std::vector<RunRecord> runs;  // sorted by (seed, grid position)
  Json summary;
};

// Runs every grid point and seed; failures are recorded in the run and the
// experiment continues. Writes runs/*.json, summary.csv and summary.json
// when spec.output_dir is set.
ExperimentResult run_experiment(const ExperimentSpec& spec);

// One grid point of an experiment, deterministic in its arguments.
RunRecord run_single(const ExperimentSpec& spec, int n, int r, double budget,
                     std::uint64_t seed);

struct GenerateOptions {
  int m = 0;
  int n = 0;
  int r = 0;
  std::vector<double> sigma;
  RevealModel model;
  std::string output_dir = ".";
  bool allow_large = false;
};
// Writes factors.txt and observed.mtx into output_dir.
void cmd_generate(const GenerateOptions& options);

struct CompleteOptions {
  std::string observed_path;
  // Optional ground-truth factors; enables error metrics.
  std::string truth_path;
  PipelineConfig pipeline;
  std::string output_dir = ".";
};
// Writes reconstruction.txt, run.json and (when cleaning ran) trace.csv.
RunRecord cmd_complete(const CompleteOptions& options);

struct SpectrumOptions {
  std::string observed_path;
  std::string truth_path;
  int count = 10;
  int rank = 0;
  std::string output_dir = ".";
};
// Writes spectrum.csv, histogram.csv and spectrum.json.
RunRecord cmd_spectrum(const SpectrumOptions& options);

// Singular values of the observed matrix before and after trimming.
struct SpectrumPair {
  std::vector<double> before;
  std::vector<double> after;
  bool converged = true;
};
SpectrumPair trimmed_spectra(const SparseObserved& observed, int count,
                             const SvdOptions& options = {});

// Number of values that exceed `factor` times the median of
// values[skip .. end).
int count_above_median(const std::vector<double>& values, int skip,
                       double factor = 2.0);

void write_histogram_csv(std::ostream& out, const Histogram& before,
                         const Histogram& after);

// Parses comma-separated lists; integer lists accept "a-b" ranges.
std::vector<double> parse_double_list(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

}  // namespace mcomplete

#endif  // MCOMPLETE_HARNESS_H_
