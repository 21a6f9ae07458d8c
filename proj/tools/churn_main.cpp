#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "CLI11.hpp"
#include "churn/ingest.hpp"
#include "churn/pipeline.hpp"
#include "churn/report.hpp"
#include "churn/synth.hpp"
#include "churn/verify.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace churn;

namespace {

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct AnalyzeArgs {
  std::string log_path;
  std::string as_map_path;
  std::string config_path;
  std::string out_dir = "report";
  std::string format = "auto";
  double gap_hours = 3.0;
  double sample_minutes = 1.0;
  int min_intervals = 4;
  std::vector<double> xi_thresholds;
  std::string window_start;
  std::string window_end;
};

AnalysisConfig build_config(const AnalyzeArgs &a, const CLI::App &cmd) {
  AnalysisConfig cfg;
  // JSON config first, flags override
  if (!a.config_path.empty()) {
    auto j = nlohmann::json::parse(read_file(a.config_path));
    cfg.gap_threshold = static_cast<Duration>(
        j.value("gap_hours", 3.0) * kHour);
    cfg.sampling_period = static_cast<Duration>(
        j.value("sample_minutes", 1.0) * kMinute);
    cfg.min_intervals_per_window = j.value("min_intervals", 4);
    if (j.contains("xi_thresholds"))
      cfg.xi_thresholds = j["xi_thresholds"].get<std::vector<double>>();
    if (j.contains("window_start"))
      cfg.window_start = *parse_timestamp(j["window_start"].is_string()
                                              ? j["window_start"].get<std::string>()
                                              : std::to_string(j["window_start"].get<Timestamp>()));
    if (j.contains("window_end"))
      cfg.window_end = *parse_timestamp(j["window_end"].is_string()
                                            ? j["window_end"].get<std::string>()
                                            : std::to_string(j["window_end"].get<Timestamp>()));
  }
  if (cmd.count("--gap-hours"))
    cfg.gap_threshold = static_cast<Duration>(a.gap_hours * kHour);
  if (cmd.count("--sample-minutes"))
    cfg.sampling_period = static_cast<Duration>(a.sample_minutes * kMinute);
  if (cmd.count("--min-intervals")) cfg.min_intervals_per_window = a.min_intervals;
  if (!a.xi_thresholds.empty()) cfg.xi_thresholds = a.xi_thresholds;
  if (!a.window_start.empty()) {
    auto t = parse_timestamp(a.window_start);
    if (!t) throw std::runtime_error("bad --window-start");
    cfg.window_start = *t;
  }
  if (!a.window_end.empty()) {
    auto t = parse_timestamp(a.window_end);
    if (!t) throw std::runtime_error("bad --window-end");
    cfg.window_end = *t;
  }
  return cfg;
}

int run_analyze(const AnalyzeArgs &a, const CLI::App &cmd) {
  AnalysisConfig cfg = build_config(a, cmd);
  // no window given: infer it from the data after parsing
  const bool infer_window = cfg.window_end <= cfg.window_start;
  if (infer_window) {
    cfg.window_start = std::numeric_limits<Timestamp>::min() / 2;
    cfg.window_end = std::numeric_limits<Timestamp>::max() / 2;
  }
  if (!cfg.valid()) throw std::runtime_error("invalid configuration");

  LogFormat fmt = a.format == "csv"      ? LogFormat::csv
                  : a.format == "ndjson" ? LogFormat::ndjson
                                         : guess_format(a.log_path);
  auto parsed = parse_log_file(a.log_path, fmt, cfg);
  if (infer_window) {
    Timestamp lo = std::numeric_limits<Timestamp>::max(), hi = lo;
    bool any = false;
    for (const auto &t : parsed.traces)
      for (const auto &r : t.accesses) {
        lo = any ? std::min(lo, r.timestamp) : r.timestamp;
        hi = any ? std::max(hi, r.timestamp) : r.timestamp;
        any = true;
      }
    if (!any) throw std::runtime_error("no valid records in " + a.log_path);
    cfg.window_start = lo;
    cfg.window_end = hi + 1;
  }
  auto cleaned = remove_clones(std::move(parsed.traces));
  CleaningReport cleaning = parsed.report;
  cleaning.merge(cleaned.report);

  if (cleaned.traces.empty())
    throw std::runtime_error("no agents left after cleaning");

  IpAsMap map = IpAsMap::load_csv_file(a.as_map_path);
  auto result = run_analysis(cleaned.traces, cleaning, map, cfg);

  ReportInputs inputs{a.log_path, file_digest(a.log_path), a.as_map_path,
                      file_digest(a.as_map_path)};
  write_report_files(result, cfg, inputs, a.out_dir);
  std::cout << "report written to " << a.out_dir << " ("
            << result.agents.size() << " agents, " << result.windows.size()
            << " windows, " << result.estimates.size() << " estimates)\n";
  return 0;
}

int run_synth(const std::string &spec_path, const std::string &out_prefix) {
  auto spec = ScenarioSpec::from_json_file(spec_path);
  auto out = generate(spec);

  fs::path prefix(out_prefix);
  if (prefix.has_parent_path()) fs::create_directories(prefix.parent_path());

  std::ofstream log(out_prefix + ".log.csv", std::ios::binary);
  write_log_csv(out, log);
  std::ofstream truth(out_prefix + ".truth.json", std::ios::binary);
  truth << out.truth.to_json();
  std::ofstream asmap(out_prefix + ".asmap.csv", std::ios::binary);
  write_as_map_csv(out.truth, asmap);

  std::cout << "wrote " << out_prefix << ".log.csv (" << out.log.size()
            << " rows), .truth.json, .asmap.csv\n";
  return 0;
}

int run_verify(const std::string &report_path, const std::string &truth_path,
               const VerifyTolerances &tol) {
  auto truth = GroundTruth::from_json_file(truth_path);
  auto report = verify(read_file(report_path), truth, tol);
  std::cout << report.to_text();
  return report.all_pass() ? 0 : 1;
}

int run_plotdata(const std::string &report_path, const std::string &figure) {
  std::cout << plotdata_csv(read_file(report_path), figure);
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"IP churn and availability analysis toolkit"};
  app.require_subcommand(1);

  AnalyzeArgs aa;
  auto *analyze = app.add_subcommand(
      "analyze", "run the full pipeline over an access log");
  analyze->add_option("--log", aa.log_path, "access log (csv or ndjson)")
      ->required();
  analyze->add_option("--as-map", aa.as_map_path, "prefix,asn[,class] csv")
      ->required();
  analyze->add_option("--config", aa.config_path, "JSON config file");
  analyze->add_option("--out", aa.out_dir, "output directory");
  analyze->add_option("--format", aa.format, "csv|ndjson|auto");
  analyze->add_option("--gap-hours", aa.gap_hours, "offline gap threshold G");
  analyze->add_option("--sample-minutes", aa.sample_minutes,
                      "signal sampling period T");
  analyze->add_option("--min-intervals", aa.min_intervals,
                      "minimum intervals per analyzed window");
  analyze->add_option("--xi-threshold", aa.xi_thresholds,
                      "confidence threshold (repeatable)");
  analyze->add_option("--window-start", aa.window_start,
                      "analysis window start (RFC3339 or epoch)");
  analyze->add_option("--window-end", aa.window_end, "analysis window end");

  std::string spec_path, out_prefix = "synth";
  auto *synth = app.add_subcommand(
      "synth", "generate a labeled synthetic access log");
  synth->add_option("--spec", spec_path, "scenario spec JSON")->required();
  synth->add_option("--out", out_prefix, "output file prefix");

  std::string report_path, truth_path;
  VerifyTolerances tol;
  auto *verify_cmd = app.add_subcommand(
      "verify", "check an analyze report against synthetic ground truth");
  verify_cmd->add_option("--report", report_path, "report.json from analyze")
      ->required();
  verify_cmd->add_option("--truth", truth_path, "truth.json from synth")
      ->required();
  verify_cmd->add_option("--min-classification", tol.classification_min_accuracy);
  verify_cmd->add_option("--max-online-error", tol.percent_online_max_error);
  verify_cmd->add_option("--max-boundary-error", tol.boundary_max_error_seconds);
  verify_cmd->add_option("--max-period-error", tol.period_max_rel_error);
  verify_cmd->add_option("--min-period-fraction", tol.period_min_pass_fraction);

  std::string plot_report, figure;
  auto *plot = app.add_subcommand("plotdata", "emit x,y series for one figure");
  plot->add_option("--report", plot_report, "report.json")->required();
  plot->add_option("--figure", figure, "figure name")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed()) return run_analyze(aa, *analyze);
    if (synth->parsed()) return run_synth(spec_path, out_prefix);
    if (verify_cmd->parsed()) return run_verify(report_path, truth_path, tol);
    if (plot->parsed()) return run_plotdata(plot_report, figure);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
