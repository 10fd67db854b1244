#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "reprobench/ingest.hpp"
#include "reprobench/protocol.hpp"

namespace testutil {

// (user, item, rating, timestamp) quadruples -> normalized RawDataset.
inline reprobench::RawDataset make_dataset(
    std::vector<reprobench::Interaction> interactions,
    std::string source_id = "test") {
  reprobench::RawDataset d;
  d.interactions = std::move(interactions);
  d.source_id = std::move(source_id);
  d.rating_scale = {0.5, 5.0, 0.5};
  reprobench::normalize_dataset(d);
  return d;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("reprobench_tests_" + name);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace testutil
