#include "reprobench/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <tuple>

#include "reprobench/errors.hpp"
#include "reprobench/stats.hpp"

namespace reprobench {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string fmt(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

std::vector<const ProtocolResult*> ok_protocols(const RunResults& r) {
  std::vector<const ProtocolResult*> out;
  for (const auto& p : r.protocols)
    if (p.ok) out.push_back(&p);
  return out;
}

// Minimal SVG canvas helpers for the report renderings.
class Svg {
 public:
  Svg(double width, double height) : width_(width), height_(height) {
    body_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
          << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
          << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  }
  void line(double x1, double y1, double x2, double y2, const std::string& color = "#444") {
    body_ << "<line x1=\"" << x1 << "\" y1=\"" << y1 << "\" x2=\"" << x2 << "\" y2=\"" << y2
          << "\" stroke=\"" << color << "\" stroke-width=\"1\"/>\n";
  }
  void rect(double x, double y, double w, double h, const std::string& color) {
    body_ << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << w << "\" height=\"" << h
          << "\" fill=\"" << color << "\"/>\n";
  }
  void circle(double x, double y, double r, const std::string& color) {
    body_ << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"" << r << "\" fill=\"" << color
          << "\"/>\n";
  }
  void text(double x, double y, const std::string& s, int size = 11,
            const std::string& anchor = "start") {
    body_ << "<text x=\"" << x << "\" y=\"" << y << "\" font-family=\"sans-serif\" font-size=\""
          << size << "\" text-anchor=\"" << anchor << "\">" << s << "</text>\n";
  }
  std::string finish() {
    body_ << "</svg>\n";
    return body_.str();
  }

 private:
  double width_, height_;
  std::ostringstream body_;
};

const char* kPalette[] = {"#4878d0", "#ee854a", "#6acc64", "#d65f5f",
                          "#956cb4", "#8c613c", "#dc7ec0", "#797979"};

std::string color_for(std::size_t i) { return kPalette[i % std::size(kPalette)]; }

}  // namespace

RobustnessReport robustness_from_results(const RunResults& r, const MetricId& metric) {
  const auto oks = ok_protocols(r);
  std::vector<PerformanceVector> vectors;
  std::vector<std::uint64_t> ids;
  for (const auto* p : oks) {
    vectors.push_back(performance_vector(p->table, metric, r.algo_order));
    ids.push_back(p->id);
  }
  return robustness(vectors, r.source_id, ids);
}

std::vector<std::pair<std::uint64_t, Signature>> signatures_from_results(const RunResults& r) {
  std::vector<std::pair<std::uint64_t, Signature>> out;
  for (const auto* p : ok_protocols(r))
    out.emplace_back(p->id, signature(p->table, r.metric_order, r.algo_order));
  return out;
}

std::vector<RankingFlip> find_ranking_flips(const RunResults& r, const MetricId& metric) {
  const auto oks = ok_protocols(r);
  std::vector<PerformanceVector> vectors;
  vectors.reserve(oks.size());
  for (const auto* p : oks)
    vectors.push_back(performance_vector(p->table, metric, r.algo_order));

  auto top_algo = [&](const PerformanceVector& v) {
    std::size_t best = 0;
    for (std::size_t a = 1; a < v.scores.size(); ++a)
      if (v.scores[a] > v.scores[best]) best = a;
    return best;
  };
  auto constant = [](const PerformanceVector& v) {
    for (double x : v.scores)
      if (x != v.scores[0]) return false;
    return true;
  };

  std::vector<RankingFlip> flips;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    for (std::size_t j = i + 1; j < vectors.size(); ++j) {
      if (constant(vectors[i]) || constant(vectors[j])) continue;
      const std::size_t ti = top_algo(vectors[i]);
      const std::size_t tj = top_algo(vectors[j]);
      if (ti == tj) continue;
      const double rho = spearman(vectors[i].scores, vectors[j].scores);
      if (rho < 1.0)
        flips.push_back({oks[i]->id, oks[j]->id, rho, r.algo_order[ti], r.algo_order[tj]});
    }
  }
  std::sort(flips.begin(), flips.end(), [](const RankingFlip& a, const RankingFlip& b) {
    return a.rho < b.rho || (a.rho == b.rho && std::tie(a.protocol_a, a.protocol_b) <
                                                   std::tie(b.protocol_a, b.protocol_b));
  });
  return flips;
}

void write_signatures_file(const std::vector<std::pair<std::uint64_t, Signature>>& sigs,
                           const std::vector<MetricId>& metric_order,
                           const std::vector<std::string>& algo_order,
                           const std::string& dataset_id, const std::filesystem::path& path) {
  ordered_json j;
  j["dataset_id"] = dataset_id;
  ordered_json metrics = ordered_json::array();
  for (const auto& m : metric_order) metrics.push_back(m.str());
  j["metric_order"] = metrics;
  j["algo_order"] = algo_order;
  ordered_json entries = ordered_json::array();
  for (const auto& [id, sig] : sigs) {
    ordered_json e;
    e["protocol_id"] = id;
    e["values"] = sig.values;
    entries.push_back(e);
  }
  j["signatures"] = entries;
  write_text_file(path, j.dump(2) + "\n");
}

SignatureFile read_signatures_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open signatures '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError("signature parse error in '" + path.string() + "': " + e.what());
  }
  SignatureFile f;
  try {
    f.dataset_id = j.value("dataset_id", "");
    for (const auto& m : j.at("metric_order")) f.metric_order.push_back(MetricId::parse(m));
    for (const auto& a : j.at("algo_order")) f.algo_order.push_back(a.get<std::string>());
    for (const auto& e : j.at("signatures")) {
      Signature sig;
      sig.metric_order = f.metric_order;
      sig.algo_order = f.algo_order;
      for (const auto& v : e.at("values")) sig.values.push_back(v.get<double>());
      if (sig.values.size() != f.metric_order.size() * f.algo_order.size())
        throw DataError("signature length does not match the pools in '" + path.string() + "'");
      f.signatures.emplace_back(e.at("protocol_id").get<std::uint64_t>(), std::move(sig));
    }
  } catch (const json::exception& e) {
    throw DataError("signature schema error in '" + path.string() + "': " + e.what());
  }
  return f;
}

namespace {

void render_robustness_svg(const std::vector<RunResults>& runs,
                           const std::vector<MetricId>& metrics,
                           const std::vector<std::vector<double>>& values,
                           const std::filesystem::path& path) {
  const double w = 760, h = 360, left = 60, bottom = 300, top = 40;
  Svg svg(w, h);
  // y axis: robustness in [-1, 1]
  auto y_of = [&](double v) { return bottom - (v + 1.0) / 2.0 * (bottom - top); };
  svg.line(left, top, left, bottom);
  svg.line(left, bottom, w - 20, bottom);
  for (double tick = -1.0; tick <= 1.01; tick += 0.5) {
    svg.line(left - 4, y_of(tick), left, y_of(tick));
    svg.text(left - 8, y_of(tick) + 4, fmt(tick), 10, "end");
  }
  svg.line(left, y_of(0.0), w - 20, y_of(0.0), "#bbb");
  svg.text(w / 2, 20, "robustness by dataset and metric", 13, "middle");

  const std::size_t n_groups = runs.size();
  const std::size_t n_bars = metrics.size();
  const double group_w = (w - 40 - left) / std::max<std::size_t>(1, n_groups);
  const double bar_w = group_w * 0.8 / std::max<std::size_t>(1, n_bars);
  for (std::size_t g = 0; g < n_groups; ++g) {
    const double gx = left + g * group_w + group_w * 0.1;
    for (std::size_t b = 0; b < n_bars; ++b) {
      const double v = values[g][b];
      const double y0 = y_of(std::max(0.0, v));
      const double height = std::abs(y_of(0.0) - y_of(v));
      svg.rect(gx + b * bar_w, y0, bar_w * 0.9, std::max(0.5, height), color_for(b));
    }
    svg.text(gx + group_w * 0.4, bottom + 16, runs[g].source_id, 11, "middle");
  }
  for (std::size_t b = 0; b < n_bars; ++b) {
    svg.rect(left + 10 + b * 110.0, h - 24, 10, 10, color_for(b));
    svg.text(left + 24 + b * 110.0, h - 15, metrics[b].str(), 10);
  }
  write_text_file(path, svg.finish());
}

void render_scores_svg(const RunResults& r, const MetricId& metric,
                       const std::filesystem::path& path) {
  const auto oks = ok_protocols(r);
  const double w = 760, h = 380, left = 60, bottom = 300, top = 40;
  Svg svg(w, h);
  double max_v = 0.0;
  for (const auto* p : oks)
    for (const auto& a : r.algo_order) {
      const auto& e = p->table.at(metric, a);
      max_v = std::max(max_v, e.mean + e.stdev);
    }
  if (max_v <= 0.0) max_v = 1.0;
  auto y_of = [&](double v) { return bottom - v / max_v * (bottom - top); };
  svg.line(left, top, left, bottom);
  svg.line(left, bottom, w - 20, bottom);
  svg.text(w / 2, 20, metric.str() + " by protocol (" + r.source_id + ")", 13, "middle");
  svg.text(left - 8, y_of(max_v) + 4, fmt(max_v), 10, "end");
  svg.text(left - 8, bottom + 4, "0", 10, "end");

  const std::size_t n_groups = oks.size();
  const std::size_t n_bars = r.algo_order.size();
  const double group_w = (w - 40 - left) / std::max<std::size_t>(1, n_groups);
  const double bar_w = group_w * 0.8 / std::max<std::size_t>(1, n_bars);
  for (std::size_t g = 0; g < n_groups; ++g) {
    const double gx = left + g * group_w + group_w * 0.1;
    for (std::size_t b = 0; b < n_bars; ++b) {
      const auto& e = oks[g]->table.at(metric, r.algo_order[b]);
      const double x = gx + b * bar_w;
      svg.rect(x, y_of(e.mean), bar_w * 0.9, std::max(0.5, bottom - y_of(e.mean)), color_for(b));
      // +/- one bootstrap std whisker
      const double cx = x + bar_w * 0.45;
      svg.line(cx, y_of(e.mean + e.stdev), cx, y_of(std::max(0.0, e.mean - e.stdev)), "#222");
    }
    svg.text(gx + group_w * 0.4, bottom + 16, "p" + std::to_string(oks[g]->id), 10, "middle");
  }
  for (std::size_t b = 0; b < n_bars; ++b) {
    svg.rect(left + 10 + b * 110.0, h - 24, 10, 10, color_for(b));
    svg.text(left + 24 + b * 110.0, h - 15, r.algo_order[b], 10);
  }
  write_text_file(path, svg.finish());
}

void render_embedding_svg(const std::vector<std::string>& dataset_of_point,
                          const std::vector<std::string>& datasets,
                          const std::vector<std::array<double, 2>>& coords,
                          const std::filesystem::path& path) {
  const double w = 600, h = 600, margin = 50;
  Svg svg(w, h);
  double min_x = coords[0][0], max_x = min_x, min_y = coords[0][1], max_y = min_y;
  for (const auto& c : coords) {
    min_x = std::min(min_x, c[0]);
    max_x = std::max(max_x, c[0]);
    min_y = std::min(min_y, c[1]);
    max_y = std::max(max_y, c[1]);
  }
  const double span_x = max_x - min_x > 0 ? max_x - min_x : 1.0;
  const double span_y = max_y - min_y > 0 ? max_y - min_y : 1.0;
  svg.text(w / 2, 20, "p-dataset signature embedding", 13, "middle");
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const double x = margin + (coords[i][0] - min_x) / span_x * (w - 2 * margin);
    const double y = h - margin - (coords[i][1] - min_y) / span_y * (h - 2 * margin);
    std::size_t di = 0;
    for (std::size_t d = 0; d < datasets.size(); ++d)
      if (datasets[d] == dataset_of_point[i]) di = d;
    svg.circle(x, y, 5, color_for(di));
  }
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    svg.circle(margin + 6, 36 + 16.0 * d, 5, color_for(d));
    svg.text(margin + 16, 40 + 16.0 * d, datasets[d], 11);
  }
  write_text_file(path, svg.finish());
}

}  // namespace

void write_report(const std::vector<RunResults>& runs, const MetricId& metric,
                  EmbedMethod embed_method, std::uint64_t embed_seed,
                  const std::filesystem::path& out_dir) {
  if (runs.empty()) throw DataError("no results to report on");
  std::filesystem::create_directories(out_dir);

  // Robustness per dataset per metric, plus the per-dataset mean.
  const auto& metric_pool = runs[0].metric_order;
  std::ostringstream fig1;
  fig1 << "dataset,metric,robustness\n";
  std::vector<std::vector<double>> fig1_values;
  for (const auto& r : runs) {
    std::vector<double> row;
    for (const auto& m : metric_pool) {
      const auto rep = robustness_from_results(r, m);
      fig1 << r.source_id << ',' << m.str() << ',' << fmt(rep.robustness) << "\n";
      row.push_back(rep.robustness);
    }
    fig1 << r.source_id << ",mean_over_metrics," << fmt(mean_of(row)) << "\n";
    fig1_values.push_back(std::move(row));
  }
  write_text_file(out_dir / "robustness_by_dataset.csv", fig1.str());
  render_robustness_svg(runs, metric_pool, fig1_values, out_dir / "robustness_by_dataset.svg");

  // Per-protocol algorithm scores with bootstrap stds, and ranking flips.
  for (const auto& r : runs) {
    std::ostringstream scores;
    scores << "protocol_id,algorithm,mean,std\n";
    for (const auto& p : r.protocols) {
      if (!p.ok) continue;
      for (const auto& a : r.algo_order) {
        const auto& e = p.table.at(metric, a);
        scores << p.id << ',' << a << ',' << fmt(e.mean) << ',' << fmt(e.stdev) << "\n";
      }
    }
    write_text_file(out_dir / ("scores_" + r.source_id + ".csv"), scores.str());
    render_scores_svg(r, metric, out_dir / ("scores_" + r.source_id + ".svg"));

    std::ostringstream flips_csv;
    flips_csv << "protocol_a,protocol_b,rho,top_a,top_b\n";
    for (const auto& f : find_ranking_flips(r, metric))
      flips_csv << f.protocol_a << ',' << f.protocol_b << ',' << fmt(f.rho) << ',' << f.top_a
                << ',' << f.top_b << "\n";
    write_text_file(out_dir / ("flips_" + r.source_id + ".csv"), flips_csv.str());
  }

  // Signature embedding over every dataset's ok protocols.
  std::vector<Signature> sigs;
  std::vector<std::string> dataset_of_point, datasets;
  std::vector<std::uint64_t> ids;
  for (const auto& r : runs) {
    datasets.push_back(r.source_id);
    for (auto& [id, sig] : signatures_from_results(r)) {
      sigs.push_back(std::move(sig));
      dataset_of_point.push_back(r.source_id);
      ids.push_back(id);
    }
  }
  const std::size_t min_points = embed_method == EmbedMethod::Tsne ? 5 : 3;
  if (sigs.size() < min_points) {
    std::cerr << "note: skipping the signature embedding (" << sigs.size()
              << " signatures, need " << min_points << ")\n";
    return;
  }
  const auto coords = embed_2d(sigs, embed_method, embed_seed);
  std::ostringstream fig3;
  fig3 << "dataset,protocol_id,x,y\n";
  for (std::size_t i = 0; i < coords.size(); ++i)
    fig3 << dataset_of_point[i] << ',' << ids[i] << ',' << fmt(coords[i][0]) << ','
         << fmt(coords[i][1]) << "\n";
  write_text_file(out_dir / "embedding.csv", fig3.str());
  render_embedding_svg(dataset_of_point, datasets, coords, out_dir / "embedding.svg");
}

}  // namespace reprobench
