#include "doctest.h"

#include <algorithm>
#include <map>
#include <set>

#include "helpers.hpp"
#include "reprobench/errors.hpp"
#include "reprobench/protocol.hpp"
#include "reprobench/synth.hpp"

using namespace reprobench;

TEST_CASE("synthetic generation is deterministic and well-formed") {
  SynthSpec spec;
  spec.n_users = 60;
  spec.n_items = 25;
  spec.mean_events_per_user = 12.0;
  spec.seed = 5;

  const auto a = generate_synthetic(spec);
  const auto b = generate_synthetic(spec);
  CHECK(a == b);

  // RawDataset invariants
  std::set<std::tuple<std::uint64_t, std::uint64_t, std::int64_t>> triples;
  for (std::size_t i = 0; i < a.interactions.size(); ++i) {
    const auto& it = a.interactions[i];
    CHECK(triples.insert({it.user_id, it.item_id, it.timestamp}).second);
    CHECK(it.rating >= 1.0);
    CHECK(it.rating <= 5.0);
    CHECK(std::round(it.rating * 2.0) == it.rating * 2.0);
    CHECK(it.timestamp >= 0);
    if (i > 0) {
      const auto& prev = a.interactions[i - 1];
      CHECK(std::tie(prev.user_id, prev.timestamp, prev.item_id) <
            std::tie(it.user_id, it.timestamp, it.item_id));
    }
  }
}

TEST_CASE("different seeds give different logs") {
  SynthSpec spec;
  spec.n_users = 40;
  spec.n_items = 20;
  spec.mean_events_per_user = 10.0;
  bool any_differ = false;
  for (std::uint64_t s = 0; s < 5; ++s) {
    SynthSpec x = spec, y = spec;
    x.seed = s;
    y.seed = s + 1000;
    any_differ = any_differ || !(generate_synthetic(x) == generate_synthetic(y));
  }
  CHECK(any_differ);
}

TEST_CASE("stronger popularity skew concentrates the head item") {
  SynthSpec flat;
  flat.n_users = 1000;
  flat.n_items = 50;
  flat.mean_events_per_user = 100.0;  // ~1e5 events
  flat.popularity_skew = 0.5;
  flat.seed = 9;
  SynthSpec steep = flat;
  steep.popularity_skew = 3.0;

  auto top_share = [](const RawDataset& d) {
    std::map<std::uint64_t, std::size_t> counts;
    for (const auto& it : d.interactions) ++counts[it.item_id];
    std::size_t best = 0;
    for (const auto& [item, c] : counts) best = std::max(best, c);
    return static_cast<double>(best) / static_cast<double>(d.interactions.size());
  };
  CHECK(top_share(generate_synthetic(steep)) > top_share(generate_synthetic(flat)));
}

TEST_CASE("noiseless ratings are a monotone map of affinity") {
  SynthSpec spec;
  spec.n_users = 30;
  spec.n_items = 15;
  spec.taste_dim = 1;
  spec.rating_noise = 0.0;
  spec.mean_events_per_user = 10.0;
  spec.seed = 21;
  SynthDebug debug;
  const auto d = generate_synthetic(spec, &debug);

  for (std::size_t i = 0; i < d.interactions.size(); ++i) {
    for (std::size_t j = i + 1; j < d.interactions.size(); ++j) {
      const auto& a = d.interactions[i];
      const auto& b = d.interactions[j];
      const double aff_a =
          debug.user_factors.row(a.user_id).dot(debug.item_factors.row(a.item_id));
      const double aff_b =
          debug.user_factors.row(b.user_id).dot(debug.item_factors.row(b.item_id));
      if (aff_a >= aff_b) CHECK(a.rating >= b.rating - 1e-12);
    }
  }
}

TEST_CASE("synthetic output survives a permissive protocol") {
  SynthSpec spec;
  spec.n_users = 80;
  spec.n_items = 30;
  spec.mean_events_per_user = 15.0;
  spec.seed = 33;
  const auto d = generate_synthetic(spec);

  Protocol p;
  p.rating_threshold = 1.0;
  p.n_output_items = 1;
  p.test_fraction = 0.3;
  p.seed = 2;
  const auto built = build_pdataset(d, p);
  CHECK(built.test_pairs.size() >= 10);
  CHECK(!built.train_sessions.empty());
  for (const auto& tp : built.test_pairs) {
    CHECK(tp.output.size() == 1);
    CHECK(!tp.input.events.empty());
  }
}

TEST_CASE("degenerate synth specs are rejected") {
  SynthSpec spec;
  spec.mean_events_per_user = 0.0;
  CHECK_THROWS_AS(generate_synthetic(spec), DataError);
}
