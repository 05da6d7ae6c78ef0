#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "optcon/harness.hpp"

namespace optcon {

namespace {

// Shortest decimal form that round-trips a double exactly.
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::string slot_csv_header() {
  return "t,cost_learner,cost_benchmark,regret,avg_regret,lambda,delta,M_norm";
}

std::string slot_csv(const RolloutResult& run) {
  std::ostringstream os;
  os << slot_csv_header() << "\n";
  for (const SlotRecord& r : run.records) {
    os << r.t << "," << fmt(r.cost_learner) << "," << fmt(r.cost_benchmark) << ","
       << fmt(r.regret) << "," << fmt(r.avg_regret) << "," << fmt(r.lambda) << ","
       << fmt(r.delta) << "," << fmt(r.m_norm) << "\n";
  }
  return os.str();
}

std::vector<SlotRecord> parse_slot_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("slot csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != slot_csv_header())
    throw std::invalid_argument("slot csv: unexpected header '" + line + "'");
  std::vector<SlotRecord> records;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv(line);
    if (f.size() != 8)
      throw std::invalid_argument("slot csv: expected 8 fields, got row '" + line + "'");
    SlotRecord r;
    r.t = std::stoi(f[0]);
    r.cost_learner = std::stod(f[1]);
    r.cost_benchmark = std::stod(f[2]);
    r.regret = std::stod(f[3]);
    r.avg_regret = std::stod(f[4]);
    r.lambda = std::stod(f[5]);
    r.delta = std::stod(f[6]);
    r.m_norm = std::stod(f[7]);
    records.push_back(r);
  }
  return records;
}

std::string summary_table(const RegretReport& report) {
  std::ostringstream os;
  os << "accumulated reward (median over " << report.config.replications
     << " replication(s)), scenario " << scenario_token(report.config.scenario.id)
     << ", T = " << report.config.scenario.horizon << "\n";
  os << std::left << std::setw(28) << "controller" << std::right << std::setw(16) << "reward"
     << std::setw(16) << "final_regret" << std::setw(10) << "failed" << "\n";
  for (const ControllerSummary& c : report.controllers) {
    int failed = 0;
    for (const RolloutResult& run : c.runs) failed += run.failed ? 1 : 0;
    os << std::left << std::setw(28) << c.label << std::right << std::setw(16) << std::fixed
       << std::setprecision(1) << c.median_reward << std::setw(16) << c.median_final_regret
       << std::setw(7) << failed << "/" << c.runs.size() << "\n";
    os.unsetf(std::ios::fixed);
  }
  return os.str();
}

std::string regret_plot_svg(const RegretReport& report) {
  const int width = 860, height = 520;
  const double ml = 70, mr = 190, mt = 30, mb = 50;
  const double pw = width - ml - mr, ph = height - mt - mb;
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

  int T = 0;
  double lo = 0.0, hi = 0.0;
  for (const ControllerSummary& c : report.controllers) {
    if (c.runs.empty() || c.runs[0].failed) continue;
    for (const SlotRecord& r : c.runs[0].records) {
      T = std::max(T, r.t);
      lo = std::min(lo, r.avg_regret);
      hi = std::max(hi, r.avg_regret);
    }
  }
  if (T == 0) T = 1;
  if (hi == lo) hi = lo + 1.0;

  const auto px = [&](double t) { return ml + pw * (t - 1.0) / std::max(1.0, T - 1.0); };
  const auto py = [&](double v) { return mt + ph * (1.0 - (v - lo) / (hi - lo)); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
     << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw << "\" y2=\""
     << mt + ph << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << mt + ph
     << "\" stroke=\"black\"/>\n";
  if (lo < 0.0 && hi > 0.0)
    os << "<line x1=\"" << ml << "\" y1=\"" << py(0.0) << "\" x2=\"" << ml + pw << "\" y2=\""
       << py(0.0) << "\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 3\"/>\n";
  os << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 12
     << "\" text-anchor=\"middle\" font-size=\"14\">t</text>\n";
  os << "<text x=\"18\" y=\"" << mt + ph / 2
     << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 18 "
     << mt + ph / 2 << ")\">R_t / t</text>\n";
  os << "<text x=\"" << ml - 6 << "\" y=\"" << py(hi) + 4
     << "\" text-anchor=\"end\" font-size=\"11\">" << std::setprecision(4) << hi
     << "</text>\n";
  os << "<text x=\"" << ml - 6 << "\" y=\"" << py(lo) + 4
     << "\" text-anchor=\"end\" font-size=\"11\">" << std::setprecision(4) << lo
     << "</text>\n";
  os << "<text x=\"" << px(1) << "\" y=\"" << mt + ph + 16
     << "\" text-anchor=\"middle\" font-size=\"11\">1</text>\n";
  os << "<text x=\"" << px(T) << "\" y=\"" << mt + ph + 16
     << "\" text-anchor=\"middle\" font-size=\"11\">" << T << "</text>\n";

  int idx = 0;
  for (const ControllerSummary& c : report.controllers) {
    const char* color = colors[idx % 5];
    if (!c.runs.empty() && !c.runs[0].failed && !c.runs[0].records.empty()) {
      const int stride = std::max(1, T / 2000);
      os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (const SlotRecord& r : c.runs[0].records) {
        if ((r.t - 1) % stride != 0 && r.t != T) continue;
        os << px(r.t) << "," << py(r.avg_regret) << " ";
      }
      os << "\"/>\n";
    }
    os << "<rect x=\"" << ml + pw + 14 << "\" y=\"" << mt + 18 * idx << "\" width=\"12\""
       << " height=\"12\" fill=\"" << color << "\"/>\n";
    os << "<text x=\"" << ml + pw + 30 << "\" y=\"" << mt + 18 * idx + 10
       << "\" font-size=\"12\">" << c.label << "</text>\n";
    ++idx;
  }
  os << "</svg>\n";
  return os.str();
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("report: cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out) throw std::runtime_error("report: write to '" + path.string() + "' failed");
}

}  // namespace

void emit_report(const RegretReport& report, const std::string& dir) {
  if (dir.empty()) throw std::invalid_argument("report: output directory not set");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("report: cannot create '" + dir + "': " + ec.message());
  const std::filesystem::path base(dir);

  for (const ControllerSummary& c : report.controllers) {
    for (const RolloutResult& run : c.runs) {
      std::ostringstream name;
      name << "slots_" << controller_token(c.kind) << "_seed" << run.seed << ".csv";
      write_file(base / name.str(), slot_csv(run));
    }
  }

  std::ostringstream summary;
  summary << "# effective configuration\n" << echo_config(report.config) << "\n";
  summary << "# derived quantities\n";
  summary << "d_effective = " << report.d << "\n";
  summary << "truncation_error_bound = " << report.truncation_bound << "\n";
  summary << "benchmark_total_cost = " << fmt(report.benchmark.total_cost) << "\n";
  for (const ControllerSummary& c : report.controllers) {
    for (const RolloutResult& run : c.runs) {
      if (run.failed)
        summary << "failed: " << run.label << " seed " << run.seed << ": " << run.error
                << "\n";
    }
  }
  summary << "\n" << summary_table(report);
  write_file(base / "summary.txt", summary.str());

  if (report.config.plot) write_file(base / "avg_regret.svg", regret_plot_svg(report));
}

}  // namespace optcon
