#include "reprobench/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <tuple>

#include "reprobench/errors.hpp"

namespace reprobench {

namespace {

constexpr const char* kCanonicalHeader = "user_id,item_id,rating,timestamp";

RatingScale scale_for(SourceFormat f) {
  switch (f) {
    case SourceFormat::Ml100k:
      return {1.0, 5.0, 1.0};
    case SourceFormat::MlDat:
    case SourceFormat::MlCsv:
    case SourceFormat::Canonical:
      return {0.5, 5.0, 0.5};
  }
  return {0.5, 5.0, 0.5};
}

[[noreturn]] void line_error(const std::filesystem::path& path, std::size_t line_no,
                             const std::string& what) {
  throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + what);
}

std::vector<std::string> split_by(const std::string& line, const std::string& sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t next = line.find(sep, pos);
    if (next == std::string::npos) {
      out.push_back(line.substr(pos));
      break;
    }
    out.push_back(line.substr(pos, next - pos));
    pos = next + sep.size();
  }
  return out;
}

bool parse_u64(const std::string& s, std::uint64_t& out) {
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

bool parse_i64(const std::string& s, std::int64_t& out) {
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

Interaction parse_row(const std::filesystem::path& path, std::size_t line_no,
                      const std::vector<std::string>& fields, const RatingScale& scale) {
  if (fields.size() != 4) line_error(path, line_no, "malformed line: expected 4 fields");
  Interaction it;
  if (!parse_u64(fields[0], it.user_id))
    line_error(path, line_no, "malformed line: bad user id '" + fields[0] + "'");
  if (!parse_u64(fields[1], it.item_id))
    line_error(path, line_no, "malformed line: bad item id '" + fields[1] + "'");
  if (!parse_double(fields[2], it.rating))
    line_error(path, line_no, "malformed line: bad rating '" + fields[2] + "'");
  if (!parse_i64(fields[3], it.timestamp))
    line_error(path, line_no, "malformed line: bad timestamp '" + fields[3] + "'");
  if (it.rating < scale.min || it.rating > scale.max)
    line_error(path, line_no, "rating " + format_double(it.rating) + " outside scale [" +
                                  format_double(scale.min) + ", " + format_double(scale.max) + "]");
  if (it.timestamp < 0) line_error(path, line_no, "malformed line: negative timestamp");
  return it;
}

}  // namespace

SourceFormat parse_format_name(const std::string& name) {
  if (name == "ml-100k") return SourceFormat::Ml100k;
  if (name == "ml-dat") return SourceFormat::MlDat;
  if (name == "ml-csv") return SourceFormat::MlCsv;
  if (name == "canonical") return SourceFormat::Canonical;
  throw ConfigError("unknown dataset format '" + name + "'");
}

std::string format_name(SourceFormat f) {
  switch (f) {
    case SourceFormat::Ml100k:
      return "ml-100k";
    case SourceFormat::MlDat:
      return "ml-dat";
    case SourceFormat::MlCsv:
      return "ml-csv";
    case SourceFormat::Canonical:
      return "canonical";
  }
  return "?";
}

void normalize_dataset(RawDataset& d) {
  // Sort by (user, timestamp, item); duplicate triples keep the last
  // occurrence in the incoming order.
  std::vector<std::size_t> order(d.interactions.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = d.interactions[a];
    const auto& y = d.interactions[b];
    return std::tie(x.user_id, x.timestamp, x.item_id, a) <
           std::tie(y.user_id, y.timestamp, y.item_id, b);
  });
  std::vector<Interaction> out;
  out.reserve(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& it = d.interactions[order[i]];
    const bool dup_follows =
        i + 1 < order.size() && [&] {
          const auto& next = d.interactions[order[i + 1]];
          return next.user_id == it.user_id && next.item_id == it.item_id &&
                 next.timestamp == it.timestamp;
        }();
    if (!dup_follows) out.push_back(it);
  }
  d.interactions = std::move(out);
}

RawDataset parse_interactions(SourceFormat format, const std::filesystem::path& path) {
  if (format == SourceFormat::Canonical) return read_canonical(path);

  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");

  RawDataset d;
  d.source_id = path.stem().string();
  d.rating_scale = scale_for(format);

  const std::string sep = format == SourceFormat::Ml100k ? "\t"
                          : format == SourceFormat::MlDat ? "::"
                                                          : ",";
  std::string line;
  std::size_t line_no = 0;
  bool header_checked = format != SourceFormat::MlCsv;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_checked) {
      header_checked = true;
      if (line != "userId,movieId,rating,timestamp")
        line_error(path, line_no, "expected header 'userId,movieId,rating,timestamp'");
      continue;
    }
    d.interactions.push_back(parse_row(path, line_no, split_by(line, sep), d.rating_scale));
  }
  if (d.interactions.empty()) throw DataError("empty dataset: '" + path.string() + "'");
  normalize_dataset(d);
  return d;
}

void write_canonical(const RawDataset& d, const std::filesystem::path& path) {
  if (d.interactions.empty()) throw DataError("empty dataset");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << "# source_id=" << d.source_id << "\n";
  out << "# rating_scale=" << format_double(d.rating_scale.min) << ","
      << format_double(d.rating_scale.max) << "," << format_double(d.rating_scale.step) << "\n";
  out << kCanonicalHeader << "\n";
  for (const auto& it : d.interactions) {
    out << it.user_id << ',' << it.item_id << ',' << format_double(it.rating) << ','
        << it.timestamp << "\n";
  }
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

RawDataset read_canonical(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");

  RawDataset d;
  d.source_id = path.stem().string();
  d.rating_scale = scale_for(SourceFormat::Canonical);

  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_seen && line.rfind("# ", 0) == 0) {
      const std::string meta = line.substr(2);
      const auto eq = meta.find('=');
      if (eq == std::string::npos) line_error(path, line_no, "malformed metadata line");
      const std::string key = meta.substr(0, eq);
      const std::string value = meta.substr(eq + 1);
      if (key == "source_id") {
        d.source_id = value;
      } else if (key == "rating_scale") {
        auto parts = split_by(value, ",");
        RatingScale s;
        if (parts.size() != 3 || !parse_double(parts[0], s.min) ||
            !parse_double(parts[1], s.max) || !parse_double(parts[2], s.step))
          line_error(path, line_no, "malformed rating_scale metadata");
        d.rating_scale = s;
      } else {
        line_error(path, line_no, "unknown metadata key '" + key + "'");
      }
      continue;
    }
    if (!header_seen) {
      if (line != kCanonicalHeader)
        line_error(path, line_no,
                   "missing canonical header '" + std::string(kCanonicalHeader) + "'");
      header_seen = true;
      continue;
    }
    d.interactions.push_back(parse_row(path, line_no, split_by(line, ","), d.rating_scale));
  }
  if (!header_seen)
    throw DataError("missing canonical header in '" + path.string() + "'");
  if (d.interactions.empty()) throw DataError("empty dataset: '" + path.string() + "'");
  normalize_dataset(d);
  return d;
}

DatasetStats dataset_stats(const RawDataset& d) {
  if (d.interactions.empty()) throw DataError("empty dataset");
  std::set<std::uint64_t> users, items;
  DatasetStats s;
  s.min_timestamp = d.interactions.front().timestamp;
  s.max_timestamp = s.min_timestamp;
  for (const auto& it : d.interactions) {
    users.insert(it.user_id);
    items.insert(it.item_id);
    s.min_timestamp = std::min(s.min_timestamp, it.timestamp);
    s.max_timestamp = std::max(s.max_timestamp, it.timestamp);
  }
  s.n_users = users.size();
  s.n_items = items.size();
  s.n_interactions = d.interactions.size();
  s.density = static_cast<double>(s.n_interactions) /
              (static_cast<double>(s.n_users) * static_cast<double>(s.n_items));
  return s;
}

}  // namespace reprobench
