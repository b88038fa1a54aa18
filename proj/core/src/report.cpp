#include "fdtrfit/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <system_error>

#include <nlohmann/json.hpp>

#include "fdtrfit/error.hpp"

namespace fdtrfit {

namespace {

std::string g17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Shortest round-trip form, for quantile keys such as "0.025".
std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

nlohmann::json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

nlohmann::json num(const std::optional<double>& v) { return v ? num(*v) : nlohmann::json(nullptr); }

std::string file_safe(const std::string& s) {
  std::string out = s;
  for (char& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                    c == '_';
    if (!ok) c = '_';
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  out.close();
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace

std::string trials_csv(const TrialReport& report) {
  std::string s = "algorithm,trial,seed,status,f_final,evals,switch_evals,switch_f,clamped,success";
  for (const auto& n : report.param_names) s += "," + csv_field(n);
  s += '\n';
  for (const auto& t : report.trials) {
    s += csv_field(t.algorithm) + ',' + std::to_string(t.trial) + ',' + std::to_string(t.seed) + ',' +
         csv_field(t.status) + ',' + g17(t.f_final) + ',' + std::to_string(t.evals) + ',' +
         (t.switch_evals ? std::to_string(*t.switch_evals) : "") + ',' + (t.switch_f ? g17(*t.switch_f) : "") +
         ',' + (t.clamped ? "1" : "0") + ',' + (t.success ? "1" : "0");
    for (double p : t.params) s += ',' + g17(p);
    s += '\n';
  }
  return s;
}

std::string summary_json(const TrialReport& report) {
  nlohmann::ordered_json j;
  j["master_seed"] = report.master_seed;
  j["deterministic"] = report.deterministic;
  j["parameters"] = report.param_names;
  j["success_rule"] = {{"target_fitness", num(report.target_fitness)},
                       {"relative_band", num(report.relative_band)}};
  auto& algs = j["algorithms"] = nlohmann::ordered_json::array();
  for (const auto& s : report.summaries) {
    nlohmann::ordered_json a;
    a["algorithm"] = s.algorithm;
    a["trials"] = s.trials;
    a["successes"] = s.successes;
    a["failures"] = s.failures;
    a["success_rate"] = s.success_rate;
    a["mean_evals"] = num(s.mean_evals);
    auto& q = a["f_final_quantiles"] = nlohmann::ordered_json::object();
    for (const auto& [p, v] : s.f_quantiles) q[shortest(p)] = num(v);
    a["f_final_plateaus"] = s.f_plateaus;
    std::vector<std::string> errors;
    for (const auto& t : report.trials) {
      if (t.algorithm == s.algorithm && !t.error.empty()) errors.push_back(std::to_string(t.trial) + ": " + t.error);
    }
    if (!errors.empty()) a["errors"] = errors;
    algs.push_back(std::move(a));
  }
  return j.dump(2) + '\n';
}

void export_report(const TrialReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());

  write_file(dir / "trials.csv", trials_csv(report));
  write_file(dir / "summary.json", summary_json(report));

  if (!report.summaries.empty()) {
    for (std::size_t h = 0; h < report.summaries.front().histograms.size(); ++h) {
      const std::string& name = report.summaries.front().histograms[h].first;
      std::string s = "algorithm,bin_lo,bin_hi,count\n";
      for (const auto& a : report.summaries) {
        const Histogram& hist = a.histograms[h].second;
        for (std::size_t b = 0; b < hist.counts.size(); ++b) {
          s += csv_field(a.algorithm) + ',' + g17(hist.edges[b]) + ',' + g17(hist.edges[b + 1]) + ',' +
               std::to_string(hist.counts[b]) + '\n';
        }
      }
      write_file(dir / ("hist_" + file_safe(name) + ".csv"), s);
    }
  }

  for (const auto& t : report.trials) {
    if (t.trace.empty()) continue;
    std::string s = "stage,index,f\n";
    for (const auto& row : t.trace) {
      for (std::size_t c = 0; c < row.size(); ++c) s += (c ? "," : "") + row[c];
      s += '\n';
    }
    write_file(dir / ("trace_" + file_safe(t.algorithm) + "_" + std::to_string(t.trial) + ".csv"), s);
  }
}

}  // namespace fdtrfit
