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

#include "renyigen/report.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "renyigen/error.h"

namespace renyigen {
namespace {

#define RG_EPOCH_COL(f) ColumnDef<EpochRow>{#f, &EpochRow::f}
constexpr std::array kEpochColumns = {
    RG_EPOCH_COL(epoch),
    RG_EPOCH_COL(step),
    RG_EPOCH_COL(true_gap),
    RG_EPOCH_COL(train_loss),
    RG_EPOCH_COL(test_loss),
    RG_EPOCH_COL(R),
    RG_EPOCH_COL(iws),
    RG_EPOCH_COL(iwbw),
    RG_EPOCH_COL(thm1_from_iws),
    RG_EPOCH_COL(thm1_from_iwbw),
    RG_EPOCH_COL(thm1_second_from_iws),
    RG_EPOCH_COL(thm1_second_from_iwbw),
    RG_EPOCH_COL(theta_c_sum),
    RG_EPOCH_COL(theta_c_partitioned_sum),
    RG_EPOCH_COL(theta_v_sum),
    RG_EPOCH_COL(lemma2_sum),
    RG_EPOCH_COL(lemma1_sum),
    RG_EPOCH_COL(theta_c_total_sum),
    RG_EPOCH_COL(theta_c_partitioned_total_sum),
    RG_EPOCH_COL(theta_v_total_sum),
    RG_EPOCH_COL(sgd_hessian_term),
    RG_EPOCH_COL(bound_theta_c),
    RG_EPOCH_COL(bound_theta_v),
};
#undef RG_EPOCH_COL

#define RG_STEP_COL(f) ColumnDef<StepRow>{#f, &StepRow::f}
constexpr std::array kStepColumns = {
    RG_STEP_COL(step),
    RG_STEP_COL(epoch),
    RG_STEP_COL(scalar_var),
    RG_STEP_COL(scalar_var_total),
    RG_STEP_COL(max_sq_norm),
    RG_STEP_COL(theta_c),
    RG_STEP_COL(theta_c_partitioned),
    RG_STEP_COL(theta_v),
    RG_STEP_COL(lemma2),
    RG_STEP_COL(lemma1),
    RG_STEP_COL(theta_c_total),
    RG_STEP_COL(theta_c_partitioned_total),
    RG_STEP_COL(theta_v_total),
};
#undef RG_STEP_COL

template <typename Row>
std::string ToCsv(std::span<const Row> rows,
                  std::span<const ColumnDef<Row>> columns) {
  std::string out;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c) out += ',';
    out += columns[c].name;
  }
  out += '\n';
  for (const Row& row : rows) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) out += ',';
      out += FormatReal(row.*(columns[c].field));
    }
    out += '\n';
  }
  return out;
}

[[noreturn]] void CsvFail(std::size_t line, const std::string& message) {
  throw Error(ErrorCode::kFormatError,
              "csv line " + std::to_string(line) + ": " + message);
}

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

double ParseReal(std::string_view field, std::size_t line) {
  double v = 0.0;
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    CsvFail(line, "cannot parse number '" + std::string(field) + "'");
  }
  return v;
}

template <typename Row>
std::vector<Row> FromCsv(std::string_view text,
                         std::span<const ColumnDef<Row>> columns) {
  std::vector<Row> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto fields = SplitFields(line);
    if (fields.size() != columns.size()) {
      CsvFail(line_no, "expected " + std::to_string(columns.size()) +
                           " fields, found " + std::to_string(fields.size()));
    }
    if (!header_seen) {
      for (std::size_t c = 0; c < columns.size(); ++c) {
        if (fields[c] != columns[c].name) {
          CsvFail(line_no, "header column " + std::to_string(c) + " is '" +
                               std::string(fields[c]) + "', expected '" +
                               columns[c].name + "'");
        }
      }
      header_seen = true;
      continue;
    }
    Row row;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      row.*(columns[c].field) = ParseReal(fields[c], line_no);
    }
    rows.push_back(row);
  }
  if (!header_seen) CsvFail(1, "missing header");
  return rows;
}

nlohmann::json RealToJson(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

double RealFromJson(const nlohmann::json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.get<double>();
}

template <typename Row>
nlohmann::json RowsToJson(std::span<const Row> rows,
                          std::span<const ColumnDef<Row>> columns) {
  nlohmann::json out = nlohmann::json::array();
  for (const Row& row : rows) {
    nlohmann::json obj = nlohmann::json::object();
    for (const auto& col : columns) obj[col.name] = RealToJson(row.*(col.field));
    out.push_back(std::move(obj));
  }
  return out;
}

template <typename Row>
std::vector<Row> RowsFromJson(const nlohmann::json& j,
                              std::span<const ColumnDef<Row>> columns) {
  std::vector<Row> rows;
  for (const auto& obj : j) {
    Row row;
    for (const auto& col : columns) row.*(col.field) = RealFromJson(obj.at(col.name));
    rows.push_back(row);
  }
  return rows;
}

std::string Fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string EscapeXml(std::string_view s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

constexpr std::array<const char*, 8> kPalette = {
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

SvgSeries Series(const std::vector<EpochRow>& rows, double EpochRow::*field,
                 const char* name) {
  SvgSeries s{name, {}};
  for (const auto& r : rows) s.values.push_back(r.*field);
  return s;
}

}  // namespace

std::span<const ColumnDef<EpochRow>> EpochColumns() { return kEpochColumns; }
std::span<const ColumnDef<StepRow>> StepColumns() { return kStepColumns; }

std::string FormatReal(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string EpochCsv(std::span<const EpochRow> rows) {
  return ToCsv(rows, EpochColumns());
}
std::string StepCsv(std::span<const StepRow> rows) {
  return ToCsv(rows, StepColumns());
}
std::vector<EpochRow> ParseEpochCsv(std::string_view text) {
  return FromCsv(text, EpochColumns());
}
std::vector<StepRow> ParseStepCsv(std::string_view text) {
  return FromCsv(text, StepColumns());
}

nlohmann::json ReportToJson(const BoundReport& r) {
  const ReportMeta& m = r.meta;
  nlohmann::json meta = {
      {"task", m.task},
      {"algorithm", m.algorithm},
      {"partition_mode", m.partition_mode},
      {"seed", m.seed},
      {"runs", m.runs},
      {"effective_runs", m.effective_runs},
      {"diverged_runs", m.diverged_runs},
      {"n", m.n},
      {"param_count", m.param_count},
      {"steps", m.steps},
      {"eta", RealToJson(m.eta)},
      {"sigma2", RealToJson(m.sigma2)},
      {"virtual_sigma2", RealToJson(m.virtual_sigma2)},
      {"label_noise", RealToJson(m.label_noise)},
      {"kernel_quantile", RealToJson(m.kernel_quantile)},
      {"apply_normalizer", m.apply_normalizer},
      {"full_covariance", m.full_covariance},
      {"hessian_trace", RealToJson(m.hessian_trace)},
      {"R", RealToJson(m.R)},
  };
  return {{"meta", std::move(meta)},
          {"epochs", RowsToJson<EpochRow>(r.epochs, EpochColumns())},
          {"steps", RowsToJson<StepRow>(r.steps, StepColumns())}};
}

BoundReport ReportFromJson(const nlohmann::json& j) {
  try {
    BoundReport r;
    const auto& m = j.at("meta");
    r.meta.task = m.at("task").get<std::string>();
    r.meta.algorithm = m.at("algorithm").get<std::string>();
    r.meta.partition_mode = m.at("partition_mode").get<std::string>();
    r.meta.seed = m.at("seed").get<std::uint64_t>();
    r.meta.runs = m.at("runs").get<std::size_t>();
    r.meta.effective_runs = m.at("effective_runs").get<std::size_t>();
    r.meta.diverged_runs = m.at("diverged_runs").get<std::vector<std::size_t>>();
    r.meta.n = m.at("n").get<std::size_t>();
    r.meta.param_count = m.at("param_count").get<std::size_t>();
    r.meta.steps = m.at("steps").get<std::size_t>();
    r.meta.eta = RealFromJson(m.at("eta"));
    r.meta.sigma2 = RealFromJson(m.at("sigma2"));
    r.meta.virtual_sigma2 = RealFromJson(m.at("virtual_sigma2"));
    r.meta.label_noise = RealFromJson(m.at("label_noise"));
    r.meta.kernel_quantile = RealFromJson(m.at("kernel_quantile"));
    r.meta.apply_normalizer = m.at("apply_normalizer").get<bool>();
    r.meta.full_covariance = m.at("full_covariance").get<bool>();
    r.meta.hessian_trace = RealFromJson(m.at("hessian_trace"));
    r.meta.R = RealFromJson(m.at("R"));
    r.epochs = RowsFromJson<EpochRow>(j.at("epochs"), EpochColumns());
    r.steps = RowsFromJson<StepRow>(j.at("steps"), StepColumns());
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("report json: ") + e.what());
  }
}

std::string RenderLogChart(std::string_view title, std::span<const double> x,
                           std::span<const SvgSeries> series) {
  constexpr double kWidth = 720, kHeight = 420;
  constexpr double kLeft = 70, kRight = 180, kTop = 40, kBottom = 50;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  double lo = INFINITY, hi = -INFINITY;
  for (const auto& s : series) {
    for (double v : s.values) {
      if (std::isfinite(v) && v > 0) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  }
  if (!std::isfinite(lo)) {
    lo = 1e-3;
    hi = 1.0;
  }
  double log_lo = std::floor(std::log10(lo));
  double log_hi = std::ceil(std::log10(hi));
  if (log_hi <= log_lo) log_hi = log_lo + 1;
  double x_lo = x.empty() ? 0.0 : *std::min_element(x.begin(), x.end());
  double x_hi = x.empty() ? 1.0 : *std::max_element(x.begin(), x.end());
  if (x_hi <= x_lo) x_hi = x_lo + 1;

  auto px = [&](double v) { return kLeft + (v - x_lo) / (x_hi - x_lo) * plot_w; };
  auto py = [&](double v) {
    double lv = (std::isfinite(v) && v > 0) ? std::log10(v) : log_lo;
    lv = std::clamp(lv, log_lo, log_hi);
    return kTop + (log_hi - lv) / (log_hi - log_lo) * plot_h;
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
      << kHeight << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << Fixed(kLeft) << "\" y=\"24\" font-family=\"sans-serif\" "
         "font-size=\"15\">"
      << EscapeXml(title) << "</text>\n";
  svg << "<rect x=\"" << Fixed(kLeft) << "\" y=\"" << Fixed(kTop) << "\" width=\""
      << Fixed(plot_w) << "\" height=\"" << Fixed(plot_h)
      << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (double e = log_lo; e <= log_hi + 0.5; e += 1) {
    const double y = kTop + (log_hi - e) / (log_hi - log_lo) * plot_h;
    svg << "<line x1=\"" << Fixed(kLeft) << "\" y1=\"" << Fixed(y) << "\" x2=\""
        << Fixed(kLeft + plot_w) << "\" y2=\"" << Fixed(y)
        << "\" stroke=\"#ddd\"/>\n";
    svg << "<text x=\"" << Fixed(kLeft - 8) << "\" y=\"" << Fixed(y + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
           "1e"
        << static_cast<int>(e) << "</text>\n";
  }
  svg << "<text x=\"" << Fixed(kLeft + plot_w / 2) << "\" y=\""
      << Fixed(kHeight - 12)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\">epoch "
      << FormatReal(x_lo) << " to " << FormatReal(x_hi) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % kPalette.size()];
    svg << "<polyline data-column=\"" << EscapeXml(s.name)
        << "\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    const std::size_t n = std::min(s.values.size(), x.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (i) svg << ' ';
      svg << Fixed(px(x[i])) << ',' << Fixed(py(s.values[i]));
    }
    svg << "\"/>\n";
    const double ly = kTop + 14 + 18 * static_cast<double>(k);
    svg << "<line x1=\"" << Fixed(kLeft + plot_w + 10) << "\" y1=\"" << Fixed(ly - 4)
        << "\" x2=\"" << Fixed(kLeft + plot_w + 30) << "\" y2=\"" << Fixed(ly - 4)
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << Fixed(kLeft + plot_w + 35) << "\" y=\"" << Fixed(ly)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << EscapeXml(s.name)
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

SampleSet ParseSamplesCsv(std::string_view text) {
  SampleSet out;
  std::vector<double> row;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    row.clear();
    for (std::string_view f : SplitFields(line)) {
      while (!f.empty() && f.front() == ' ') f.remove_prefix(1);
      while (!f.empty() && f.back() == ' ') f.remove_suffix(1);
      row.push_back(ParseReal(f, line_no));
    }
    if (out.empty() && out.dim() == 0) {
      out = SampleSet(0, row.size());
    } else if (row.size() != out.dim()) {
      CsvFail(line_no, "expected " + std::to_string(out.dim()) + " values");
    }
    out.push_back(row);
  }
  return out;
}

void WriteTextFile(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::kIoError, "short write to " + path.string());
}

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void WriteReportFiles(const BoundReport& report,
                      const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw Error(ErrorCode::kIoError,
                "cannot create " + dir.string() + ": " + ec.message());
  }
  WriteTextFile(dir / "bounds.csv", EpochCsv(report.epochs));
  WriteTextFile(dir / "steps.csv", StepCsv(report.steps));
  WriteTextFile(dir / "bounds.json", ReportToJson(report).dump(2) + "\n");

  std::vector<double> x;
  for (const auto& r : report.epochs) x.push_back(r.epoch);
  const auto& e = report.epochs;
  const std::vector<SvgSeries> ladder = {
      Series(e, &EpochRow::true_gap, "true_gap"),
      Series(e, &EpochRow::thm1_from_iws, "thm1_from_iws"),
      Series(e, &EpochRow::thm1_from_iwbw, "thm1_from_iwbw"),
      Series(e, &EpochRow::bound_theta_c, "bound_theta_c"),
      Series(e, &EpochRow::bound_theta_v, "bound_theta_v"),
  };
  const std::vector<SvgSeries> theta = {
      Series(e, &EpochRow::theta_c_sum, "theta_c_sum"),
      Series(e, &EpochRow::theta_c_partitioned_sum, "theta_c_partitioned_sum"),
      Series(e, &EpochRow::theta_v_sum, "theta_v_sum"),
      Series(e, &EpochRow::lemma2_sum, "lemma2_sum"),
      Series(e, &EpochRow::lemma1_sum, "lemma1_sum"),
  };
  const std::vector<SvgSeries> mi = {
      Series(e, &EpochRow::iws, "iws"),
      Series(e, &EpochRow::iwbw, "iwbw"),
  };
  WriteTextFile(dir / "bounds.svg",
                RenderLogChart("Generalization gap and bounds", x, ladder));
  WriteTextFile(dir / "theta.svg",
                RenderLogChart("Cumulative information terms", x, theta));
  WriteTextFile(dir / "mi.svg", RenderLogChart("Kernelized MI estimates", x, mi));
}

}  // namespace renyigen
