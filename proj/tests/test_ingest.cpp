#include "doctest.h"

#include <algorithm>
#include <random>

#include "helpers.hpp"
#include "reprobench/errors.hpp"
#include "reprobench/ingest.hpp"

using namespace reprobench;
using testutil::make_dataset;
using testutil::temp_dir;
using testutil::write_file;

TEST_CASE("ml-100k rows parse with the documented field order") {
  const auto dir = temp_dir("ingest");
  const auto path = dir / "u.data";
  write_file(path, "196\t242\t3\t881250949\n186\t302\t3\t891717742\n22\t377\t1\t878887116\n");
  const auto d = parse_interactions(SourceFormat::Ml100k, path);
  REQUIRE(d.interactions.size() == 3);
  const Interaction expected{196, 242, 3.0, 881250949};
  CHECK(std::find(d.interactions.begin(), d.interactions.end(), expected) !=
        d.interactions.end());
  CHECK(d.rating_scale == RatingScale{1.0, 5.0, 1.0});
}

TEST_CASE("ml-dat rows use the :: separator") {
  const auto dir = temp_dir("ingest");
  const auto path = dir / "ratings.dat";
  write_file(path, "1::1193::5::978300760\n1::661::3::978302109\n");
  const auto d = parse_interactions(SourceFormat::MlDat, path);
  REQUIRE(d.interactions.size() == 2);
  CHECK(d.interactions[0].item_id == 1193);
  CHECK(d.interactions[0].rating == 5.0);
}

TEST_CASE("ml-csv requires its header") {
  const auto dir = temp_dir("ingest");
  const auto good = dir / "ratings.csv";
  write_file(good, "userId,movieId,rating,timestamp\n1,296,5.0,1147880044\n");
  CHECK(parse_interactions(SourceFormat::MlCsv, good).interactions.size() == 1);

  const auto bad = dir / "headerless.csv";
  write_file(bad, "1,296,5.0,1147880044\n");
  CHECK_THROWS_AS(parse_interactions(SourceFormat::MlCsv, bad), DataError);
}

TEST_CASE("empty file is an error") {
  const auto dir = temp_dir("ingest");
  const auto path = dir / "empty.data";
  write_file(path, "");
  CHECK_THROWS_WITH_AS(parse_interactions(SourceFormat::Ml100k, path),
                       doctest::Contains("empty dataset"), DataError);
}

TEST_CASE("malformed lines report their line number") {
  const auto dir = temp_dir("ingest");
  const auto path = dir / "bad.data";
  write_file(path, "1\t2\t3\t4\n5\t6\tseven\t8\n");
  CHECK_THROWS_WITH_AS(parse_interactions(SourceFormat::Ml100k, path), doctest::Contains(":2:"),
                       DataError);
}

TEST_CASE("ratings outside the declared scale are rejected") {
  const auto dir = temp_dir("ingest");
  const auto path = dir / "oob.data";
  write_file(path, "1\t2\t9\t4\n");
  CHECK_THROWS_WITH_AS(parse_interactions(SourceFormat::Ml100k, path),
                       doctest::Contains("outside scale"), DataError);
}

TEST_CASE("duplicate (user, item, timestamp) triples keep the last occurrence") {
  const auto dir = temp_dir("ingest");
  const auto path = dir / "dup.data";
  write_file(path, "1\t2\t3\t100\n1\t2\t5\t100\n");
  const auto d = parse_interactions(SourceFormat::Ml100k, path);
  REQUIRE(d.interactions.size() == 1);
  CHECK(d.interactions[0].rating == 5.0);
}

TEST_CASE("canonical round-trip is the identity") {
  auto d = make_dataset({{3, 7, 4.5, 50}, {1, 2, 3.0, 10}, {1, 5, 0.5, 20}}, "roundtrip");
  const auto dir = temp_dir("ingest");
  const auto path = dir / "canonical.csv";
  write_canonical(d, path);
  CHECK(read_canonical(path) == d);

  SUBCASE("twice through keeps the bytes stable") {
    const auto again = dir / "canonical2.csv";
    write_canonical(read_canonical(path), again);
    CHECK(testutil::read_file(path) == testutil::read_file(again));
  }
}

TEST_CASE("canonical io edge cases") {
  const auto dir = temp_dir("ingest");
  SUBCASE("writing an empty dataset fails") {
    RawDataset empty;
    empty.source_id = "none";
    CHECK_THROWS_WITH_AS(write_canonical(empty, dir / "never.csv"),
                         doctest::Contains("empty dataset"), DataError);
  }
  SUBCASE("reading a file without the header fails") {
    const auto path = dir / "noheader.csv";
    write_file(path, "1,2,3,4\n");
    CHECK_THROWS_AS(read_canonical(path), DataError);
  }
}

TEST_CASE("parsing is insensitive to input line order") {
  std::vector<std::string> lines;
  for (int u = 1; u <= 5; ++u)
    for (int i = 1; i <= 4; ++i)
      lines.push_back(std::to_string(u) + "\t" + std::to_string(i) + "\t3\t" +
                      std::to_string(1000 + u * i));
  const auto dir = temp_dir("ingest");
  const auto a = dir / "order_a.data";
  const auto b = dir / "order_b.data";
  std::string text;
  for (const auto& l : lines) text += l + "\n";
  write_file(a, text);
  std::mt19937 eng(123);
  std::shuffle(lines.begin(), lines.end(), eng);
  text.clear();
  for (const auto& l : lines) text += l + "\n";
  write_file(b, text);

  auto da = parse_interactions(SourceFormat::Ml100k, a);
  auto db = parse_interactions(SourceFormat::Ml100k, b);
  da.source_id = db.source_id = "same";
  CHECK(da == db);
}

TEST_CASE("dataset stats") {
  SUBCASE("single interaction has density 1") {
    const auto d = make_dataset({{1, 1, 3.0, 0}});
    const auto s = dataset_stats(d);
    CHECK(s.n_users == 1);
    CHECK(s.n_items == 1);
    CHECK(s.density == 1.0);
  }
  SUBCASE("counts match the interaction list") {
    const auto d = make_dataset({{1, 2, 3.0, 10}, {1, 3, 3.0, 20}, {2, 2, 4.0, 5}});
    const auto s = dataset_stats(d);
    CHECK(s.n_interactions == d.interactions.size());
    CHECK(s.n_users == 2);
    CHECK(s.n_items == 2);
    CHECK(s.min_timestamp == 5);
    CHECK(s.max_timestamp == 20);
    CHECK(s.density == doctest::Approx(3.0 / 4.0));
  }
}
