#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace reprobench {

// One (user, item, rating, timestamp) event.
struct Interaction {
  std::uint64_t user_id = 0;
  std::uint64_t item_id = 0;
  double rating = 0.0;
  std::int64_t timestamp = 0;

  friend bool operator==(const Interaction&, const Interaction&) = default;
};

struct RatingScale {
  double min = 0.5;
  double max = 5.0;
  double step = 0.5;

  friend bool operator==(const RatingScale&, const RatingScale&) = default;
};

// A raw rating log, sorted by (user_id, timestamp, item_id) and free of
// duplicate (user_id, item_id, timestamp) triples.
struct RawDataset {
  std::vector<Interaction> interactions;
  std::string source_id;
  RatingScale rating_scale;

  friend bool operator==(const RawDataset&, const RawDataset&) = default;
};

struct DatasetStats {
  std::uint64_t n_users = 0;
  std::uint64_t n_items = 0;
  std::uint64_t n_interactions = 0;
  double density = 0.0;
  std::int64_t min_timestamp = 0;
  std::int64_t max_timestamp = 0;
};

enum class SourceFormat { Ml100k, MlDat, MlCsv, Canonical };

SourceFormat parse_format_name(const std::string& name);
std::string format_name(SourceFormat f);

// Parses a rating log. Duplicate (user, item, timestamp) triples keep the last
// occurrence in file order; the result is sorted per the RawDataset invariant.
RawDataset parse_interactions(SourceFormat format, const std::filesystem::path& path);

// Canonical file: optional '#' metadata lines, then the exact header
// "user_id,item_id,rating,timestamp", then one row per interaction in sort order.
void write_canonical(const RawDataset& d, const std::filesystem::path& path);
RawDataset read_canonical(const std::filesystem::path& path);

DatasetStats dataset_stats(const RawDataset& d);

// Restores the sort invariant and drops duplicate triples (last occurrence
// wins, in current vector order). Used by parsers and the synthetic generator.
void normalize_dataset(RawDataset& d);

}  // namespace reprobench
