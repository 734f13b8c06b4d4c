#include "mdg/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace mdg {

double asr(int n_success, int n_total) {
  if (n_total <= 0) throw InvalidCounts("asr: total rollouts must be positive");
  if (n_success < 0 || n_success > n_total)
    throw InvalidCounts("asr: successes must lie in [0, total]");
  return static_cast<double>(n_success) / n_total;
}

EpisodeStats aggregate(const std::vector<EpisodeRecord>& records) {
  if (records.empty()) throw InvalidCounts("aggregate: no rollouts");
  EpisodeStats s;
  int wins = 0;
  for (const auto& r : records) {
    if (r.outcome == Outcome::Success) ++wins;
    s.mean_ar += r.total_ar;
    s.mean_dr += r.total_dr;
  }
  s.asr = asr(wins, static_cast<int>(records.size()));
  s.mean_ar /= records.size();
  s.mean_dr /= records.size();
  return s;
}

namespace {

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

void export_csv(const std::vector<EpisodeStats>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "episode,algo,seed,asr,mean_dr,mean_ar\n";
  for (const auto& r : rows)
    out << r.episode << ',' << r.algo << ',' << r.seed << ',' << fmt6(r.asr) << ','
        << fmt6(r.mean_dr) << ',' << fmt6(r.mean_ar) << '\n';
}

std::vector<EpisodeStats> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string line;
  if (!std::getline(in, line) || line != "episode,algo,seed,asr,mean_dr,mean_ar")
    throw std::runtime_error(path + ": unrecognized metrics header");
  std::vector<EpisodeStats> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    EpisodeStats r;
    std::string field;
    std::getline(ss, field, ',');
    r.episode = std::stoi(field);
    std::getline(ss, r.algo, ',');
    std::getline(ss, field, ',');
    r.seed = std::stoull(field);
    std::getline(ss, field, ',');
    r.asr = std::stod(field);
    std::getline(ss, field, ',');
    r.mean_dr = std::stod(field);
    std::getline(ss, field, ',');
    r.mean_ar = std::stod(field);
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace {

constexpr double kPanelW = 420, kPanelH = 300, kMargin = 48, kGap = 40;
const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

struct Series {
  std::string algo;
  std::vector<std::pair<int, double>> asr, dr;
};

std::string poly(const std::vector<std::pair<int, double>>& pts, double x0,
                 int ep_lo, int ep_hi, double v_lo, double v_hi) {
  std::ostringstream out;
  double ep_span = std::max(1, ep_hi - ep_lo);
  double v_span = (v_hi - v_lo) == 0 ? 1 : (v_hi - v_lo);
  for (const auto& [ep, v] : pts) {
    double x = x0 + (ep - ep_lo) / ep_span * kPanelW;
    double y = kMargin + (1 - (v - v_lo) / v_span) * kPanelH;
    out << fmt6(x) << ',' << fmt6(y) << ' ';
  }
  return out.str();
}

void panel(std::ostringstream& svg, double x0, const std::string& title,
           const std::string& y_label, int ep_lo, int ep_hi, double v_lo,
           double v_hi) {
  svg << "<rect x=\"" << fmt6(x0) << "\" y=\"" << fmt6(kMargin) << "\" width=\""
      << fmt6(kPanelW) << "\" height=\"" << fmt6(kPanelH)
      << "\" fill=\"none\" stroke=\"#444\"/>\n";
  svg << "<text x=\"" << fmt6(x0 + kPanelW / 2) << "\" y=\"" << fmt6(kMargin - 14)
      << "\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n";
  svg << "<text x=\"" << fmt6(x0 + kPanelW / 2) << "\" y=\""
      << fmt6(kMargin + kPanelH + 32)
      << "\" text-anchor=\"middle\" font-size=\"12\">episode</text>\n";
  svg << "<text x=\"" << fmt6(x0 - 34) << "\" y=\"" << fmt6(kMargin + kPanelH / 2)
      << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 "
      << fmt6(x0 - 34) << ' ' << fmt6(kMargin + kPanelH / 2) << ")\">" << y_label
      << "</text>\n";
  svg << "<text x=\"" << fmt6(x0) << "\" y=\"" << fmt6(kMargin + kPanelH + 16)
      << "\" font-size=\"11\">" << ep_lo << "</text>\n";
  svg << "<text x=\"" << fmt6(x0 + kPanelW) << "\" y=\""
      << fmt6(kMargin + kPanelH + 16) << "\" text-anchor=\"end\" font-size=\"11\">"
      << ep_hi << "</text>\n";
  svg << "<text x=\"" << fmt6(x0 - 4) << "\" y=\"" << fmt6(kMargin + kPanelH)
      << "\" text-anchor=\"end\" font-size=\"11\">" << fmt6(v_lo) << "</text>\n";
  svg << "<text x=\"" << fmt6(x0 - 4) << "\" y=\"" << fmt6(kMargin + 10)
      << "\" text-anchor=\"end\" font-size=\"11\">" << fmt6(v_hi) << "</text>\n";
}

}  // namespace

std::string render_curves(const std::vector<EpisodeStats>& rows) {
  if (rows.empty()) throw InvalidCounts("render_curves: no data");

  // Group by algorithm, preserving first-seen order; average across seeds.
  std::vector<Series> series;
  {
    std::map<std::string, std::map<int, std::pair<double, int>>> asr_acc, dr_acc;
    std::vector<std::string> order;
    for (const auto& r : rows) {
      if (!asr_acc.count(r.algo)) order.push_back(r.algo);
      auto& a = asr_acc[r.algo][r.episode];
      a.first += r.asr;
      a.second += 1;
      auto& d = dr_acc[r.algo][r.episode];
      d.first += r.mean_dr;
      d.second += 1;
    }
    std::sort(order.begin(), order.end());
    for (const auto& algo : order) {
      Series s;
      s.algo = algo;
      for (const auto& [ep, acc] : asr_acc[algo])
        s.asr.emplace_back(ep, acc.first / acc.second);
      for (const auto& [ep, acc] : dr_acc[algo])
        s.dr.emplace_back(ep, acc.first / acc.second);
      series.push_back(std::move(s));
    }
  }

  int ep_lo = rows[0].episode, ep_hi = rows[0].episode;
  double dr_lo = rows[0].mean_dr, dr_hi = rows[0].mean_dr;
  for (const auto& r : rows) {
    ep_lo = std::min(ep_lo, r.episode);
    ep_hi = std::max(ep_hi, r.episode);
    dr_lo = std::min(dr_lo, r.mean_dr);
    dr_hi = std::max(dr_hi, r.mean_dr);
  }
  if (dr_lo == dr_hi) {
    dr_lo -= 1;
    dr_hi += 1;
  }

  double total_w = kMargin * 2 + kPanelW * 2 + kGap;
  double total_h = kMargin + kPanelH + 64 + 18.0 * series.size();
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt6(total_w)
      << "\" height=\"" << fmt6(total_h) << "\" font-family=\"sans-serif\">\n";
  double left_x = kMargin, right_x = kMargin + kPanelW + kGap;
  panel(svg, left_x, "Attack success rate", "ASR", ep_lo, ep_hi, 0, 1);
  panel(svg, right_x, "Mean defender reward", "reward", ep_lo, ep_hi, dr_lo, dr_hi);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kColors[i % 5];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\""
        << poly(series[i].asr, left_x, ep_lo, ep_hi, 0, 1) << "\"/>\n";
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\""
        << poly(series[i].dr, right_x, ep_lo, ep_hi, dr_lo, dr_hi) << "\"/>\n";
    double ly = kMargin + kPanelH + 48 + 18.0 * i;
    svg << "<line x1=\"" << fmt6(left_x) << "\" y1=\"" << fmt6(ly - 4) << "\" x2=\""
        << fmt6(left_x + 24) << "\" y2=\"" << fmt6(ly - 4) << "\" stroke=\"" << color
        << "\" stroke-width=\"1.5\"/>\n";
    svg << "<text x=\"" << fmt6(left_x + 30) << "\" y=\"" << fmt6(ly)
        << "\" font-size=\"12\">" << series[i].algo << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_curves(const std::vector<EpisodeStats>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << render_curves(rows);
}

}  // namespace mdg
