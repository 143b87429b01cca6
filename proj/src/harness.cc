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

#include "mcomplete/harness.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "mcomplete/error.h"
#include "mcomplete/io.h"

namespace mcomplete {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x6d636f6d706c6574ULL;
  for (std::uint64_t p : parts) h = splitmix(h ^ p);
  return h;
}

std::uint64_t bits_of(double x) {
  std::uint64_t b;
  std::memcpy(&b, &x, sizeof b);
  return b;
}

// JSON has no infinities; they travel as null.
Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }
double number_from(const Json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

Json to_json_value(const ErrorReport& e) {
  return {{"rmse", e.rmse},
          {"rel_frobenius", e.rel_frobenius},
          {"max_abs_error", e.max_abs_error},
          {"m_max", e.m_max},
          {"rmse_sq_bound", e.rmse_sq_bound},
          {"exact", e.exact},
          {"factored", e.factored}};
}
ErrorReport error_report_from(const Json& j) {
  ErrorReport e;
  e.rmse = j.at("rmse");
  e.rel_frobenius = j.at("rel_frobenius");
  e.max_abs_error = j.at("max_abs_error");
  e.m_max = j.at("m_max");
  e.rmse_sq_bound = j.at("rmse_sq_bound");
  e.exact = j.at("exact");
  e.factored = j.at("factored");
  return e;
}

Json to_json_value(const GapBound& g) {
  return {{"projection_u", g.projection_u},
          {"projection_v", g.projection_v},
          {"bound", g.bound},
          {"symmetric_bound", g.symmetric_bound},
          {"holds", g.holds},
          {"holds_symmetric", g.holds_symmetric}};
}
GapBound gap_from(const Json& j) {
  GapBound g;
  g.projection_u = j.at("projection_u");
  g.projection_v = j.at("projection_v");
  g.bound = j.at("bound");
  g.symmetric_bound = j.at("symmetric_bound");
  g.holds = j.at("holds");
  g.holds_symmetric = j.at("holds_symmetric");
  return g;
}

Json to_json_value(const SpectralDiagnostics& d) {
  return {{"singular_values", d.singular_values},
          {"rescaled", d.rescaled},
          {"deviations", d.deviations},
          {"max_deviation", d.max_deviation},
          {"operator_norm_deviation", d.operator_norm_deviation},
          {"normalized_deviation", d.normalized_deviation},
          {"m_max", d.m_max},
          {"eps", d.eps},
          {"alpha", d.alpha},
          {"converged", d.converged}};
}
SpectralDiagnostics spectral_from(const Json& j) {
  SpectralDiagnostics d;
  d.singular_values = j.at("singular_values").get<std::vector<double>>();
  d.rescaled = j.at("rescaled").get<std::vector<double>>();
  d.deviations = j.at("deviations").get<std::vector<double>>();
  d.max_deviation = j.at("max_deviation");
  d.operator_norm_deviation = j.at("operator_norm_deviation");
  d.normalized_deviation = j.at("normalized_deviation");
  d.m_max = j.at("m_max");
  d.eps = j.at("eps");
  d.alpha = j.at("alpha");
  d.converged = j.at("converged");
  return d;
}

Json to_json_value(const TrimReport& t) {
  return {{"kept_rows", t.kept_rows},
          {"kept_cols", t.kept_cols},
          {"row_threshold", t.row_threshold},
          {"col_threshold", t.col_threshold},
          {"zeroed_rows", t.zeroed_rows},
          {"zeroed_cols", t.zeroed_cols},
          {"entries_before", t.entries_before},
          {"entries_after", t.entries_after},
          {"row_degree_histogram", t.row_degree_histogram},
          {"col_degree_histogram", t.col_degree_histogram}};
}
TrimReport trim_from(const Json& j) {
  TrimReport t;
  t.kept_rows = j.at("kept_rows").get<std::vector<int>>();
  t.kept_cols = j.at("kept_cols").get<std::vector<int>>();
  t.row_threshold = j.at("row_threshold");
  t.col_threshold = j.at("col_threshold");
  t.zeroed_rows = j.at("zeroed_rows");
  t.zeroed_cols = j.at("zeroed_cols");
  t.entries_before = j.at("entries_before");
  t.entries_after = j.at("entries_after");
  t.row_degree_histogram =
      j.at("row_degree_histogram").get<std::map<int, int>>();
  t.col_degree_histogram =
      j.at("col_degree_histogram").get<std::map<int, int>>();
  return t;
}

Json to_json_value(const CleaningSummary& c) {
  return {{"iterations", c.iterations},
          {"f", c.f},
          {"g", c.g},
          {"ftilde", c.ftilde},
          {"grad_norm", c.grad_norm},
          {"fit_residual", c.fit_residual},
          {"rho", c.rho},
          {"grad_tol", c.grad_tol},
          {"reason", c.reason},
          {"stalled", c.stalled},
          {"degenerate", c.degenerate},
          {"mu0", c.mu0},
          {"mu0_restarts", c.mu0_restarts},
          {"residual_start", c.residual_start},
          {"residual_final", c.residual_final}};
}
CleaningSummary cleaning_from(const Json& j) {
  CleaningSummary c;
  c.iterations = j.at("iterations");
  c.f = j.at("f");
  c.g = j.at("g");
  c.ftilde = j.at("ftilde");
  c.grad_norm = j.at("grad_norm");
  c.fit_residual = j.at("fit_residual");
  c.rho = j.at("rho");
  c.grad_tol = j.at("grad_tol");
  c.reason = j.at("reason");
  c.stalled = j.at("stalled");
  c.degenerate = j.at("degenerate");
  c.mu0 = j.at("mu0");
  c.mu0_restarts = j.at("mu0_restarts");
  c.residual_start = j.at("residual_start");
  c.residual_final = j.at("residual_final");
  return c;
}

Json to_json_value(const CleaningConfig& c) {
  return {{"rho", c.rho},
          {"mu0", c.mu0},
          {"gamma", number(c.gamma)},
          {"max_iters", c.max_iters},
          {"grad_tol", c.grad_tol},
          {"fit_tol", c.fit_tol},
          {"initial_step", c.initial_step},
          {"backtrack", c.backtrack},
          {"sufficient_decrease", c.sufficient_decrease},
          {"max_backtracks", c.max_backtracks}};
}
CleaningConfig cleaning_config_from(const Json& j) {
  CleaningConfig c;
  c.rho = j.at("rho");
  c.mu0 = j.at("mu0");
  c.gamma = number_from(j.at("gamma"));
  c.max_iters = j.at("max_iters");
  c.grad_tol = j.at("grad_tol");
  c.fit_tol = j.at("fit_tol");
  c.initial_step = j.at("initial_step");
  c.backtrack = j.at("backtrack");
  c.sufficient_decrease = j.at("sufficient_decrease");
  c.max_backtracks = j.at("max_backtracks");
  return c;
}

template <typename T, typename F>
std::optional<T> optional_from(const Json& j, const char* key, F parse) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return parse(j.at(key));
}

template <typename T>
Json optional_json(const std::optional<T>& value) {
  return value ? to_json_value(*value) : Json(nullptr);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("write failed: " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create directory " + dir.string());
}

std::vector<double> sigma_for(const ExperimentSpec& spec, int r) {
  if (spec.sigma.empty()) return std::vector<double>(r, 1.0);
  if (static_cast<int>(spec.sigma.size()) < r) {
    throw std::invalid_argument("experiment: sigma has fewer than r values");
  }
  return {spec.sigma.begin(), spec.sigma.begin() + r};
}

int rows_for(const ExperimentSpec& spec, int n) {
  return static_cast<int>(std::lround(spec.aspect * n));
}

std::vector<double> budgets(const ExperimentSpec& spec) {
  return spec.log_multipliers.empty() ? spec.eps : spec.log_multipliers;
}

std::string csv_cell(const Json& v) {
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "";
  return v.dump();
}

void write_summary_csv(const fs::path& path, const Json& rows) {
  std::ostringstream out;
  if (!rows.empty()) {
    std::vector<std::string> keys;
    for (const auto& [k, v] : rows.front().items()) keys.push_back(k);
    for (std::size_t i = 0; i < keys.size(); ++i) {
      out << (i ? "," : "") << keys[i];
    }
    out << '\n';
    for (const Json& row : rows) {
      for (std::size_t i = 0; i < keys.size(); ++i) {
        out << (i ? "," : "") << csv_cell(row.value(keys[i], Json()));
      }
      out << '\n';
    }
  }
  write_text(path, out.str());
}

std::string histogram_csv(const std::vector<double>& before,
                          const std::vector<double>& after) {
  std::ostringstream out;
  write_histogram_csv(out, freedman_diaconis(before), freedman_diaconis(after));
  return out.str();
}

double ratio_at(const std::vector<double>& s, int r) {
  if (static_cast<int>(s.size()) <= r || s[r] <= 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return s[r - 1] / s[r];
}

// Grid key shared by all seeds of one configuration.
struct GroupKey {
  int n;
  int r;
  double budget;
  auto operator<=>(const GroupKey&) const = default;
};

Json summarize_runs(const ExperimentSpec& spec,
                    const std::vector<RunRecord>& runs) {
  std::map<GroupKey, std::vector<const RunRecord*>> groups;
  for (const RunRecord& run : runs) {
    groups[{run.n, run.r, run.values.count("budget") ? run.values.at("budget")
                                                     : run.eps}]
        .push_back(&run);
  }
  Json rows = Json::array();
  Json summary = {{"experiment", to_string(spec.kind)},
                  {"schema_version", kSchemaVersion},
                  {"library_version", library_version()},
                  {"spec", spec.to_json()}};
  int failures = 0;
  for (const RunRecord& run : runs) failures += run.ok ? 0 : 1;
  summary["failures"] = failures;

  for (const auto& [key, members] : groups) {
    Json row = {{"n", key.n}, {"r", key.r}, {"budget", key.budget}};
    std::vector<const RunRecord*> ok;
    for (const RunRecord* run : members) {
      if (run->ok) ok.push_back(run);
    }
    row["runs"] = members.size();
    row["failures"] = members.size() - ok.size();
    auto med = [&](auto getter) -> Json {
      std::vector<double> v;
      for (const RunRecord* run : ok) v.push_back(getter(*run));
      return v.empty() ? Json(nullptr) : number(median(v));
    };
    auto count = [&](auto pred) {
      int c = 0;
      for (const RunRecord* run : ok) c += pred(*run) ? 1 : 0;
      return c;
    };
    row["median_num_revealed"] =
        med([](const RunRecord& r) { return double(r.num_revealed); });
    switch (spec.kind) {
      case ExperimentKind::kRmseScaling:
      case ExperimentKind::kExactRecovery: {
        row["x"] = med([](const RunRecord& r) { return r.values.at("x"); });
        row["median_rmse_projection"] =
            med([](const RunRecord& r) { return r.projection_error->rmse; });
        row["gap_bound_violations"] =
            count([](const RunRecord& r) { return !r.gap->holds; });
        row["symmetric_gap_bound_violations"] =
            count([](const RunRecord& r) { return !r.gap->holds_symmetric; });
        if (!spec.skip_clean) {
          row["median_rmse_final"] =
              med([](const RunRecord& r) { return r.final_error->rmse; });
          row["median_rel_frobenius_final"] = med(
              [](const RunRecord& r) { return r.final_error->rel_frobenius; });
          row["successes"] = count([&](const RunRecord& r) {
            return r.final_error->rel_frobenius <= spec.success_threshold;
          });
          row["success_rate"] =
              ok.empty() ? 0.0 : double(row["successes"]) / members.size();
          row["residual_increases"] = count([](const RunRecord& r) {
            return r.cleaning->residual_final > r.cleaning->residual_start;
          });
        }
        break;
      }
      case ExperimentKind::kTrimEffect:
      case ExperimentKind::kSpectrumHistogram:
        row["gap_improved"] = count([](const RunRecord& r) {
          return r.values.at("gap_ratio_after") > r.values.at("gap_ratio_before");
        });
        row["exactly_r_above_after"] = count([](const RunRecord& r) {
          return r.values.at("above_median_after") == r.r;
        });
        row["exactly_r_above_before"] = count([](const RunRecord& r) {
          return r.values.at("above_median_before") == r.r;
        });
        row["median_gap_ratio_before"] =
            med([](const RunRecord& r) { return r.values.at("gap_ratio_before"); });
        row["median_gap_ratio_after"] =
            med([](const RunRecord& r) { return r.values.at("gap_ratio_after"); });
        break;
      case ExperimentKind::kLemmaConstants: {
        std::vector<double> v;
        for (const RunRecord* run : ok) {
          v.push_back(run->spectral->normalized_deviation);
        }
        row["max_normalized_deviation"] =
            v.empty() ? Json(nullptr) : Json(*std::max_element(v.begin(), v.end()));
        row["median_max_deviation"] =
            med([](const RunRecord& r) { return r.spectral->max_deviation; });
        break;
      }
    }
    rows.push_back(row);
  }
  summary["groups"] = rows;

  if (spec.kind == ExperimentKind::kRmseScaling) {
    // One slope per (n, r) over the budget grid.
    Json slopes = Json::array();
    std::map<std::pair<int, int>, std::pair<std::vector<double>, std::vector<double>>>
        series;
    const char* column =
        spec.skip_clean ? "median_rmse_projection" : "median_rmse_final";
    for (const Json& row : rows) {
      if (row[column].is_null() || row["x"].is_null()) continue;
      auto& s = series[{row["n"].get<int>(), row["r"].get<int>()}];
      s.first.push_back(row["x"]);
      s.second.push_back(row[column]);
    }
    for (const auto& [nr, xy] : series) {
      Json entry = {{"n", nr.first}, {"r", nr.second}};
      entry["slope"] = xy.first.size() >= 2 && xy.second.front() > 0.0
                           ? number(loglog_slope(xy.first, xy.second))
                           : Json(nullptr);
      slopes.push_back(entry);
    }
    summary["slopes"] = slopes;
  }
  if (spec.kind == ExperimentKind::kLemmaConstants) {
    std::vector<double> maxima;
    for (const Json& row : rows) {
      if (!row["max_normalized_deviation"].is_null()) {
        maxima.push_back(row["max_normalized_deviation"]);
      }
    }
    summary["constant_spread"] =
        maxima.empty() ? Json(nullptr)
                       : Json(*std::max_element(maxima.begin(), maxima.end()) /
                              *std::min_element(maxima.begin(), maxima.end()));
  }
  return summary;
}

}  // namespace

std::string library_version() { return MCOMPLETE_VERSION; }

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kSpectrumHistogram:
      return "spectrum_histogram";
    case ExperimentKind::kRmseScaling:
      return "rmse_scaling";
    case ExperimentKind::kExactRecovery:
      return "exact_recovery";
    case ExperimentKind::kTrimEffect:
      return "trim_effect";
    case ExperimentKind::kLemmaConstants:
      return "lemma_constants";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
  for (ExperimentKind k :
       {ExperimentKind::kSpectrumHistogram, ExperimentKind::kRmseScaling,
        ExperimentKind::kExactRecovery, ExperimentKind::kTrimEffect,
        ExperimentKind::kLemmaConstants}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown experiment kind '" + name + "'");
}

void ExperimentSpec::validate() const {
  if (dims.empty() || ranks.empty() || seeds.empty() ||
      (eps.empty() && log_multipliers.empty())) {
    throw std::invalid_argument("experiment: every grid must be nonempty");
  }
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw std::invalid_argument("experiment: seeds must be distinct");
  }
  if (!(aspect >= 1.0)) {
    throw std::invalid_argument("experiment: aspect ratio m/n must be >= 1");
  }
  for (int n : dims) {
    if (n < 1) throw std::invalid_argument("experiment: dimensions must be >= 1");
    if (!allow_large && rows_for(*this, n) > kDeskScaleLimit) {
      throw std::invalid_argument(
          "experiment: dimension above the desk-scale limit; pass allow_large");
    }
  }
  for (int r : ranks) {
    if (r < 1) throw std::invalid_argument("experiment: ranks must be >= 1");
    sigma_for(*this, r);
  }
  for (double b : budgets(*this)) {
    if (!(b > 0.0)) throw std::invalid_argument("experiment: budgets must be > 0");
  }
  if (threads < 1) throw std::invalid_argument("experiment: threads must be >= 1");
  if (num_singular_values < 2) {
    throw std::invalid_argument("experiment: num_singular_values must be >= 2");
  }
}

Json ExperimentSpec::to_json() const {
  return {{"kind", to_string(kind)},
          {"dims", dims},
          {"aspect", aspect},
          {"ranks", ranks},
          {"eps", eps},
          {"log_multipliers", log_multipliers},
          {"sigma", sigma},
          {"seeds", seeds},
          {"reveal", to_string(reveal)},
          {"skip_clean", skip_clean},
          {"cleaning", to_json_value(cleaning)},
          {"success_threshold", success_threshold},
          {"num_singular_values", num_singular_values},
          {"allow_large", allow_large}};
}

ExperimentSpec ExperimentSpec::from_json(const Json& j) {
  ExperimentSpec s;
  s.kind = parse_experiment_kind(j.at("kind"));
  s.dims = j.at("dims").get<std::vector<int>>();
  s.aspect = j.at("aspect");
  s.ranks = j.at("ranks").get<std::vector<int>>();
  s.eps = j.at("eps").get<std::vector<double>>();
  s.log_multipliers = j.at("log_multipliers").get<std::vector<double>>();
  s.sigma = j.at("sigma").get<std::vector<double>>();
  s.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  s.reveal = parse_reveal_kind(j.at("reveal"));
  s.skip_clean = j.at("skip_clean");
  s.cleaning = cleaning_config_from(j.at("cleaning"));
  s.success_threshold = j.at("success_threshold");
  s.num_singular_values = j.at("num_singular_values");
  s.allow_large = j.at("allow_large");
  return s;
}

CleaningSummary summarize(const CompletionResult& result) {
  CleaningSummary c;
  c.mu0 = result.mu0;
  c.mu0_restarts = result.mu0_restarts;
  c.residual_start = result.residual_start;
  c.residual_final = result.residual_final;
  if (result.cleaning) {
    const CleaningState& s = *result.cleaning;
    c.iterations = s.iterations;
    c.f = s.f;
    c.g = s.g;
    c.ftilde = s.ftilde;
    c.grad_norm = s.grad_norm;
    c.fit_residual = s.fit_residual;
    c.rho = s.rho;
    c.grad_tol = s.grad_tol;
    c.reason = to_string(s.reason);
    c.stalled = s.stalled;
    c.degenerate = s.degenerate;
  }
  return c;
}

Json to_json(const RunRecord& r) {
  Json sweep = Json::array();
  for (const RankSweepRow& row : r.sweep) {
    sweep.push_back(
        {{"rank", row.rank}, {"holdout_rmse", number(row.holdout_rmse)}, {"ok", row.ok}});
  }
  Json values = Json::object();
  for (const auto& [k, v] : r.values) values[k] = number(v);
  return {{"schema_version", r.schema_version},
          {"library_version", r.library_version},
          {"kind", r.kind},
          {"spec", r.spec},
          {"seed", r.seed},
          {"m", r.m},
          {"n", r.n},
          {"r", r.r},
          {"eps", r.eps},
          {"num_revealed", r.num_revealed},
          {"reveal", r.reveal},
          {"ok", r.ok},
          {"error", r.error},
          {"projection_error", optional_json(r.projection_error)},
          {"final_error", optional_json(r.final_error)},
          {"gap", optional_json(r.gap)},
          {"spectral", optional_json(r.spectral)},
          {"trim", optional_json(r.trim)},
          {"cleaning", optional_json(r.cleaning)},
          {"spectrum_before", r.spectrum_before},
          {"spectrum_after", r.spectrum_after},
          {"sweep", sweep},
          {"values", values},
          {"timing", r.timing}};
}

RunRecord run_record_from_json(const Json& j) {
  RunRecord r;
  r.schema_version = j.at("schema_version");
  if (r.schema_version != kSchemaVersion) {
    throw DataError("run record: unsupported schema_version " +
                    std::to_string(r.schema_version));
  }
  r.library_version = j.at("library_version");
  r.kind = j.at("kind");
  r.spec = j.at("spec");
  r.seed = j.at("seed");
  r.m = j.at("m");
  r.n = j.at("n");
  r.r = j.at("r");
  r.eps = j.at("eps");
  r.num_revealed = j.at("num_revealed");
  r.reveal = j.at("reveal");
  r.ok = j.at("ok");
  r.error = j.at("error");
  r.projection_error =
      optional_from<ErrorReport>(j, "projection_error", error_report_from);
  r.final_error = optional_from<ErrorReport>(j, "final_error", error_report_from);
  r.gap = optional_from<GapBound>(j, "gap", gap_from);
  r.spectral = optional_from<SpectralDiagnostics>(j, "spectral", spectral_from);
  r.trim = optional_from<TrimReport>(j, "trim", trim_from);
  r.cleaning = optional_from<CleaningSummary>(j, "cleaning", cleaning_from);
  r.spectrum_before = j.at("spectrum_before").get<std::vector<double>>();
  r.spectrum_after = j.at("spectrum_after").get<std::vector<double>>();
  for (const Json& row : j.at("sweep")) {
    r.sweep.push_back({row.at("rank").get<int>(),
                       number_from(row.at("holdout_rmse")),
                       row.at("ok").get<bool>()});
  }
  for (const auto& [k, v] : j.at("values").items()) r.values[k] = number_from(v);
  r.timing = j.at("timing").get<std::map<std::string, double>>();
  return r;
}

Json deterministic_json(const RunRecord& record) {
  Json j = to_json(record);
  j.erase("timing");
  return j;
}

SpectrumPair trimmed_spectra(const SparseObserved& observed, int count,
                             const SvdOptions& options) {
  count = std::min(count, std::min(observed.rows(), observed.cols()));
  SpectrumPair out;
  const SvdTriplet before = top_singular_triplets(observed, count, options);
  const TrimResult trimmed = trim(observed);
  const SvdTriplet after =
      top_singular_triplets(trimmed.trimmed, count, options);
  out.before.assign(before.values.data(), before.values.data() + count);
  out.after.assign(after.values.data(), after.values.data() + count);
  out.converged = before.converged && after.converged;
  return out;
}

int count_above_median(const std::vector<double>& values, int skip,
                       double factor) {
  if (skip < 0 || skip >= static_cast<int>(values.size())) {
    throw std::invalid_argument("count_above_median: nothing left after skip");
  }
  const double threshold =
      factor * median(std::vector<double>(values.begin() + skip, values.end()));
  return static_cast<int>(std::count_if(values.begin(), values.end(),
                                        [&](double v) { return v > threshold; }));
}

void write_histogram_csv(std::ostream& out, const Histogram& before,
                         const Histogram& after) {
  out << "stage,bin_lo,bin_hi,count\n";
  const auto emit = [&](const char* stage, const Histogram& h) {
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
      out << stage << ',' << format_double(h.edges[i]) << ','
          << format_double(h.edges[i + 1]) << ',' << h.counts[i] << '\n';
    }
  };
  emit("before", before);
  emit("after", after);
}

RunRecord run_single(const ExperimentSpec& spec, int n, int r, double budget,
                     std::uint64_t seed) {
  const auto start = Clock::now();
  RunRecord rec;
  rec.library_version = library_version();
  rec.kind = to_string(spec.kind);
  rec.spec = spec.to_json();
  rec.seed = seed;
  rec.m = rows_for(spec, n);
  rec.n = n;
  rec.r = r;
  rec.reveal = to_string(spec.reveal);
  rec.values["budget"] = budget;
  try {
    const double m = rec.m;
    const double root_mn = std::sqrt(m * n);
    // The truth depends on (seed, n, r) only, so budgets are paired.
    const std::uint64_t truth_seed = mix({seed, std::uint64_t(n), std::uint64_t(r)});
    const std::uint64_t reveal_seed =
        mix({seed, std::uint64_t(n), std::uint64_t(r), bits_of(budget)});
    const LowRankFactors truth =
        random_low_rank(rec.m, n, r, sigma_for(spec, r), truth_seed);
    RevealModel model;
    if (!spec.log_multipliers.empty()) {
      const auto count = std::llround(budget * n * std::log(double(n)));
      model = spec.reveal == RevealKind::kUniformFixedSize
                  ? RevealModel::uniform(count, reveal_seed)
                  : spec.reveal == RevealKind::kBernoulli
                        ? RevealModel::bernoulli(count / root_mn, reveal_seed)
                        : RevealModel::heavy_tail(count / root_mn, reveal_seed);
      rec.eps = count / root_mn;
    } else {
      model = spec.reveal == RevealKind::kUniformFixedSize
                  ? RevealModel::uniform(std::llround(budget * root_mn), reveal_seed)
                  : spec.reveal == RevealKind::kBernoulli
                        ? RevealModel::bernoulli(budget, reveal_seed)
                        : RevealModel::heavy_tail(budget, reveal_seed);
      rec.eps = budget;
    }
    const SparseObserved observed = reveal(truth, model);
    rec.num_revealed = static_cast<std::int64_t>(observed.size());
    rec.values["eps_actual"] = rec.num_revealed / root_mn;
    rec.values["x"] = double(rec.num_revealed) / (double(n) * r);
    rec.timing["reveal"] = seconds_since(start);

    switch (spec.kind) {
      case ExperimentKind::kRmseScaling:
      case ExperimentKind::kExactRecovery: {
        PipelineConfig cfg;
        cfg.rank = r;
        cfg.skip_clean = spec.skip_clean;
        cfg.cleaning = spec.cleaning;
        const auto t0 = Clock::now();
        const CompletionResult result = complete(observed, cfg);
        rec.timing["complete"] = seconds_since(t0);
        MetricsOptions mo;
        mo.num_revealed = rec.num_revealed;
        rec.projection_error = rmse(truth, result.projection, mo);
        rec.gap = subspace_gap_bound(truth, result.projection);
        rec.trim = result.trim;
        if (result.cleaned) {
          rec.final_error = rmse(truth, result.reconstruction, mo);
          rec.cleaning = summarize(result);
        }
        break;
      }
      case ExperimentKind::kTrimEffect:
      case ExperimentKind::kSpectrumHistogram: {
        const int count = std::max(spec.num_singular_values, r + 1);
        const SpectrumPair s = trimmed_spectra(observed, count);
        rec.spectrum_before = s.before;
        rec.spectrum_after = s.after;
        rec.values["svd_converged"] = s.converged ? 1.0 : 0.0;
        rec.values["gap_ratio_before"] = ratio_at(s.before, r);
        rec.values["gap_ratio_after"] = ratio_at(s.after, r);
        rec.values["above_median_before"] = count_above_median(s.before, r);
        rec.values["above_median_after"] = count_above_median(s.after, r);
        rec.trim = trim(observed).report;
        break;
      }
      case ExperimentKind::kLemmaConstants: {
        const TrimResult trimmed = trim(observed);
        rec.spectral = spectral_diagnostics(
            truth, trimmed.trimmed, r, rec.num_revealed / root_mn);
        rec.trim = trimmed.report;
        break;
      }
    }
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
  }
  rec.timing["total"] = seconds_since(start);
  return rec;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  struct Job {
    std::uint64_t seed;
    int n, r;
    std::size_t budget_index;
    double budget;
  };
  std::vector<Job> jobs;
  const std::vector<double> grid = budgets(spec);
  for (std::uint64_t seed : spec.seeds)
    for (int n : spec.dims)
      for (int r : spec.ranks)
        for (std::size_t b = 0; b < grid.size(); ++b)
          jobs.push_back({seed, n, r, b, grid[b]});
  std::sort(jobs.begin(), jobs.end(), [](const Job& a, const Job& b) {
    return std::tie(a.seed, a.n, a.r, a.budget_index) <
           std::tie(b.seed, b.n, b.r, b.budget_index);
  });

  ExperimentResult result;
  result.runs.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) {
      const Job& job = jobs[i];
      result.runs[i] = run_single(spec, job.n, job.r, job.budget, job.seed);
    }
  };
  const int workers =
      std::min<int>(spec.threads, static_cast<int>(jobs.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  result.summary = summarize_runs(spec, result.runs);
  if (spec.output_dir.empty()) return result;

  const fs::path root(spec.output_dir);
  ensure_dir(root / "runs");
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const Job& job = jobs[i];
    std::ostringstream name;
    name << to_string(spec.kind) << "_n" << job.n << "_r" << job.r << "_b"
         << job.budget_index << "_s" << job.seed << ".json";
    write_text(root / "runs" / name.str(), to_json(result.runs[i]).dump(2) + "\n");
    if (spec.kind == ExperimentKind::kSpectrumHistogram && result.runs[i].ok) {
      ensure_dir(root / "histograms");
      std::ostringstream hist;
      hist << "n" << job.n << "_r" << job.r << "_b" << job.budget_index << "_s"
           << job.seed << ".csv";
      write_text(root / "histograms" / hist.str(),
                 histogram_csv(result.runs[i].spectrum_before,
                               result.runs[i].spectrum_after));
    }
  }
  write_summary_csv(root / "summary.csv", result.summary["groups"]);
  write_text(root / "summary.json", result.summary.dump(2) + "\n");
  return result;
}

void cmd_generate(const GenerateOptions& o) {
  if (o.m < 1 || o.n < 1) throw std::invalid_argument("generate: m, n must be >= 1");
  if (!o.allow_large && std::max(o.m, o.n) > kDeskScaleLimit) {
    throw std::invalid_argument(
        "generate: dimension above the desk-scale limit; pass --allow-large");
  }
  std::vector<double> sigma = o.sigma;
  if (sigma.empty()) sigma.assign(std::max(o.r, 0), 1.0);
  const LowRankFactors truth = random_low_rank(o.m, o.n, o.r, sigma, o.model.seed);
  const SparseObserved observed = reveal(truth, o.model);
  const fs::path dir(o.output_dir);
  ensure_dir(dir);
  write_factors_file((dir / "factors.txt").string(), truth);
  write_matrix_market_file((dir / "observed.mtx").string(), observed);
}

RunRecord cmd_complete(const CompleteOptions& o) {
  const auto start = Clock::now();
  const SparseObserved observed = read_matrix_market_file(o.observed_path);
  RunRecord rec;
  rec.library_version = library_version();
  rec.kind = "complete";
  rec.spec = {{"observed", o.observed_path},
              {"truth", o.truth_path},
              {"rank", o.pipeline.rank},
              {"rank_min", o.pipeline.rank_min},
              {"rank_max", o.pipeline.rank_max},
              {"skip_clean", o.pipeline.skip_clean},
              {"rho_rule", to_string(o.pipeline.rho_rule)},
              {"holdout_seed", o.pipeline.holdout_seed},
              {"cleaning", to_json_value(o.pipeline.cleaning)}};
  rec.m = observed.rows();
  rec.n = observed.cols();
  rec.num_revealed = static_cast<std::int64_t>(observed.size());
  rec.eps = rec.num_revealed / std::sqrt(double(rec.m) * rec.n);
  rec.reveal = "file";

  const CompletionResult result = complete(observed, o.pipeline);
  rec.r = result.rank;
  rec.trim = result.trim;
  rec.sweep = result.sweep;
  if (result.cleaned) rec.cleaning = summarize(result);
  if (!o.truth_path.empty()) {
    const LowRankFactors truth = read_factors_file(o.truth_path);
    MetricsOptions mo;
    mo.num_revealed = rec.num_revealed;
    rec.projection_error = rmse(truth, result.projection, mo);
    rec.final_error = rmse(truth, result.reconstruction, mo);
    if (truth.rank() == result.rank && truth.sigma.minCoeff() > 0.0) {
      rec.gap = subspace_gap_bound(truth, result.projection);
    }
  }
  rec.timing["total"] = seconds_since(start);

  const fs::path dir(o.output_dir);
  ensure_dir(dir);
  write_factors_file((dir / "reconstruction.txt").string(), result.reconstruction);
  if (result.cleaning) {
    std::ostringstream trace;
    write_trace_csv(trace, result.cleaning->trace);
    write_text(dir / "trace.csv", trace.str());
  }
  write_text(dir / "run.json", to_json(rec).dump(2) + "\n");
  return rec;
}

RunRecord cmd_spectrum(const SpectrumOptions& o) {
  const auto start = Clock::now();
  const SparseObserved observed = read_matrix_market_file(o.observed_path);
  if (o.count < 2) throw std::invalid_argument("spectrum: count must be >= 2");
  RunRecord rec;
  rec.library_version = library_version();
  rec.kind = "spectrum";
  rec.spec = {{"observed", o.observed_path},
              {"truth", o.truth_path},
              {"count", o.count},
              {"rank", o.rank}};
  rec.m = observed.rows();
  rec.n = observed.cols();
  rec.r = o.rank;
  rec.num_revealed = static_cast<std::int64_t>(observed.size());
  rec.eps = rec.num_revealed / std::sqrt(double(rec.m) * rec.n);
  rec.reveal = "file";
  const SpectrumPair s = trimmed_spectra(observed, o.count);
  rec.spectrum_before = s.before;
  rec.spectrum_after = s.after;
  const TrimResult trimmed = trim(observed);
  rec.trim = trimmed.report;
  if (o.rank > 0) {
    rec.values["gap_ratio_before"] = ratio_at(s.before, o.rank);
    rec.values["gap_ratio_after"] = ratio_at(s.after, o.rank);
    if (o.rank < static_cast<int>(s.after.size())) {
      rec.values["above_median_before"] = count_above_median(s.before, o.rank);
      rec.values["above_median_after"] = count_above_median(s.after, o.rank);
    }
  }
  if (!o.truth_path.empty()) {
    const LowRankFactors truth = read_factors_file(o.truth_path);
    const int r = o.rank > 0 ? o.rank : truth.rank();
    rec.spectral = spectral_diagnostics(truth, trimmed.trimmed, r, rec.eps);
  }
  rec.timing["total"] = seconds_since(start);

  const fs::path dir(o.output_dir);
  ensure_dir(dir);
  std::ostringstream csv;
  csv << "index,before,after\n";
  for (std::size_t i = 0; i < s.before.size(); ++i) {
    csv << i + 1 << ',' << format_double(s.before[i]) << ','
        << format_double(s.after[i]) << '\n';
  }
  write_text(dir / "spectrum.csv", csv.str());
  write_text(dir / "histogram.csv", histogram_csv(s.before, s.after));
  write_text(dir / "spectrum.json", to_json(rec).dump(2) + "\n");
  return rec;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw std::invalid_argument("not a number: '" + item + "'");
    }
    out.push_back(v);
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (std::uint64_t v : parse_seed_list(text)) {
    if (v > static_cast<std::uint64_t>(std::numeric_limits<int>::max())) {
      throw std::invalid_argument("integer out of range in '" + text + "'");
    }
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream in(text);
  const auto parse_one = [&](const std::string& s) {
    std::size_t used = 0;
    std::uint64_t v = 0;
    try {
      if (!s.empty() && s[0] != '-') v = std::stoull(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) {
      throw std::invalid_argument("not a nonnegative integer: '" + s + "'");
    }
    return v;
  };
  for (std::string item; std::getline(in, item, ',');) {
    const std::size_t dash = item.find('-', 1);
    if (dash == std::string::npos) {
      out.push_back(parse_one(item));
      continue;
    }
    const std::uint64_t lo = parse_one(item.substr(0, dash));
    const std::uint64_t hi = parse_one(item.substr(dash + 1));
    if (hi < lo) throw std::invalid_argument("empty range '" + item + "'");
    for (std::uint64_t v = lo; v <= hi; ++v) out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

}  // namespace mcomplete
