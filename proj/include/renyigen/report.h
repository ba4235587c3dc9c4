//
// Copyright 2026 The renyigen Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef RENYIGEN_REPORT_H_
#define RENYIGEN_REPORT_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "renyigen/samples.h"

namespace renyigen {

// One row per recorded epoch. Cumulative columns sum every step up to and
// including the last step of the epoch. NaN marks a value that was not
// computed (for example full-covariance terms above the storage limit).
struct EpochRow {
  double epoch = 0;
  double step = 0;
  double true_gap = 0;
  double train_loss = 0;
  double test_loss = 0;
  double R = 0;
  double iws = 0;
  double iwbw = 0;
  double thm1_from_iws = 0;
  double thm1_from_iwbw = 0;
  double thm1_second_from_iws = 0;
  double thm1_second_from_iwbw = 0;
  double theta_c_sum = 0;
  double theta_c_partitioned_sum = 0;
  double theta_v_sum = 0;
  double lemma2_sum = 0;
  double lemma1_sum = 0;
  double theta_c_total_sum = 0;
  double theta_c_partitioned_total_sum = 0;
  double theta_v_total_sum = 0;
  double sgd_hessian_term = 0;
  double bound_theta_c = 0;
  double bound_theta_v = 0;
};

// Per-step terms of the gradient-based bounds.
struct StepRow {
  double step = 0;
  double epoch = 0;
  double scalar_var = 0;
  double scalar_var_total = 0;
  double max_sq_norm = 0;
  double theta_c = 0;
  double theta_c_partitioned = 0;
  double theta_v = 0;
  double lemma2 = 0;
  double lemma1 = 0;
  double theta_c_total = 0;
  double theta_c_partitioned_total = 0;
  double theta_v_total = 0;
};

template <typename Row>
struct ColumnDef {
  const char* name;
  double Row::*field;
};

// Fixed column orders of bounds.csv and steps.csv.
std::span<const ColumnDef<EpochRow>> EpochColumns();
std::span<const ColumnDef<StepRow>> StepColumns();

struct ReportMeta {
  std::string task;
  std::string algorithm;
  std::string partition_mode;
  std::uint64_t seed = 0;
  std::size_t runs = 0;
  std::size_t effective_runs = 0;
  std::vector<std::size_t> diverged_runs;
  std::size_t n = 0;
  std::size_t param_count = 0;
  std::size_t steps = 0;
  double eta = 0;
  double sigma2 = 0;
  double virtual_sigma2 = 0;
  double label_noise = 0;
  double kernel_quantile = 0;
  bool apply_normalizer = false;
  bool full_covariance = false;
  double hessian_trace = 0;
  double R = 0;
};

struct BoundReport {
  ReportMeta meta;
  std::vector<EpochRow> epochs;
  std::vector<StepRow> steps;
};

// Shortest round-trip decimal form; NaN is written as "nan".
std::string FormatReal(double v);

std::string EpochCsv(std::span<const EpochRow> rows);
std::string StepCsv(std::span<const StepRow> rows);
// FormatError (with line number) on a header or field mismatch.
std::vector<EpochRow> ParseEpochCsv(std::string_view text);
std::vector<StepRow> ParseStepCsv(std::string_view text);

// NaN and infinities become null.
nlohmann::json ReportToJson(const BoundReport& report);
BoundReport ReportFromJson(const nlohmann::json& j);

struct SvgSeries {
  std::string name;
  std::vector<double> values;
};

// Line chart with a log-scale y axis and one <polyline> per series, tagged
// with data-column. Values that are not positive and finite are drawn at the
// bottom edge. Output is byte-deterministic.
std::string RenderLogChart(std::string_view title, std::span<const double> x,
                           std::span<const SvgSeries> series);

// bounds.csv, steps.csv, bounds.json and three charts (bounds.svg,
// theta.svg, mi.svg). IoError when the directory cannot be written.
void WriteReportFiles(const BoundReport& report,
                      const std::filesystem::path& output_dir);

// One sample per line, comma-separated reals; blank lines and lines starting
// with '#' are skipped. FormatError on ragged rows or bad numbers.
SampleSet ParseSamplesCsv(std::string_view text);

void WriteTextFile(const std::filesystem::path& path, std::string_view text);
std::string ReadTextFile(const std::filesystem::path& path);

}  // namespace renyigen

#endif  // RENYIGEN_REPORT_H_
