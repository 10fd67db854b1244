#include "reprobench/protocol.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "reprobench/errors.hpp"
#include "reprobench/rng.hpp"
#include "reprobench/stats.hpp"

namespace reprobench {

namespace {

constexpr std::uint64_t kMinTestPairs = 10;

[[noreturn]] void empty_result_error() {
  throw DataError("protocol eliminates all interactions");
}

std::vector<std::uint64_t> distinct_users(const RawDataset& d) {
  std::vector<std::uint64_t> users;
  for (const auto& it : d.interactions)
    if (users.empty() || users.back() != it.user_id) users.push_back(it.user_id);
  return users;  // input is sorted by user
}

RawDataset like(const RawDataset& d) {
  RawDataset out;
  out.source_id = d.source_id;
  out.rating_scale = d.rating_scale;
  return out;
}

}  // namespace

std::string output_strategy_name(OutputStrategy s) {
  return s == OutputStrategy::LastN ? "last-n" : "random-n";
}

OutputStrategy parse_output_strategy(const std::string& name) {
  if (name == "last-n") return OutputStrategy::LastN;
  if (name == "random-n") return OutputStrategy::RandomN;
  throw ConfigError("unknown output strategy '" + name + "'");
}

std::string split_strategy_name(SplitStrategy s) {
  return s == SplitStrategy::UserHoldout ? "user-holdout" : "temporal-global";
}

SplitStrategy parse_split_strategy(const std::string& name) {
  if (name == "user-holdout") return SplitStrategy::UserHoldout;
  if (name == "temporal-global") return SplitStrategy::TemporalGlobal;
  throw ConfigError("unknown split strategy '" + name + "'");
}

RawDataset apply_rating_threshold(const RawDataset& d, double threshold) {
  RawDataset out = like(d);
  out.interactions.reserve(d.interactions.size());
  for (const auto& it : d.interactions)
    if (it.rating >= threshold) out.interactions.push_back(it);
  if (out.interactions.empty()) empty_result_error();
  return out;
}

RawDataset kcore_filter(const RawDataset& d, std::uint64_t min_user, std::uint64_t min_item,
                        bool iterate) {
  std::unordered_map<std::uint64_t, std::int64_t> user_count, item_count;
  for (const auto& it : d.interactions) {
    ++user_count[it.user_id];
    ++item_count[it.item_id];
  }
  std::vector<bool> alive(d.interactions.size(), true);

  // One pass drops users below the minimum, then items; with iterate the
  // passes repeat until the counts stabilize (the k-core fixpoint).
  bool changed = true;
  bool first = true;
  while (changed && (iterate || first)) {
    changed = false;
    first = false;
    for (std::size_t i = 0; i < alive.size(); ++i) {
      if (!alive[i]) continue;
      const auto& it = d.interactions[i];
      if (user_count[it.user_id] < static_cast<std::int64_t>(min_user)) {
        alive[i] = false;
        --user_count[it.user_id];
        --item_count[it.item_id];
        changed = true;
      }
    }
    for (std::size_t i = 0; i < alive.size(); ++i) {
      if (!alive[i]) continue;
      const auto& it = d.interactions[i];
      if (item_count[it.item_id] < static_cast<std::int64_t>(min_item)) {
        alive[i] = false;
        --user_count[it.user_id];
        --item_count[it.item_id];
        changed = true;
      }
    }
  }

  RawDataset out = like(d);
  for (std::size_t i = 0; i < alive.size(); ++i)
    if (alive[i]) out.interactions.push_back(d.interactions[i]);
  if (out.interactions.empty()) empty_result_error();
  return out;
}

RawDataset subsample_users(const RawDataset& d, std::uint64_t max_users, std::uint64_t seed) {
  if (max_users == 0) throw DataError("max_users must be >= 1");
  auto users = distinct_users(d);
  if (users.size() <= max_users) return d;

  // Partial Fisher-Yates over the sorted user list.
  auto eng = rng::make_engine(seed);
  for (std::uint64_t i = 0; i < max_users; ++i) {
    const std::uint64_t j = i + rng::uniform_below(eng, users.size() - i);
    std::swap(users[i], users[j]);
  }
  std::unordered_set<std::uint64_t> kept(users.begin(), users.begin() + max_users);

  RawDataset out = like(d);
  for (const auto& it : d.interactions)
    if (kept.count(it.user_id)) out.interactions.push_back(it);
  return out;
}

RawDataset cap_user_interactions(const RawDataset& d, std::uint64_t max_n) {
  if (max_n == 0) throw DataError("max interactions per user must be >= 1");
  RawDataset out = like(d);
  out.interactions.reserve(d.interactions.size());
  // The dataset order (user, timestamp, item) makes "most recent, ties by
  // item id" exactly the suffix of each user's run.
  std::size_t i = 0;
  const auto& v = d.interactions;
  while (i < v.size()) {
    std::size_t j = i;
    while (j + 1 < v.size() && v[j + 1].user_id == v[i].user_id) ++j;
    const std::size_t len = j - i + 1;
    const std::size_t start = len > max_n ? j + 1 - max_n : i;
    for (std::size_t t = start; t <= j; ++t) out.interactions.push_back(v[t]);
    i = j + 1;
  }
  return out;
}

std::vector<Session> sessionize(const RawDataset& d, std::optional<std::int64_t> gap) {
  std::vector<Session> sessions;
  const auto& v = d.interactions;
  std::size_t i = 0;
  while (i < v.size()) {
    Session s;
    s.user_id = v[i].user_id;
    s.events.push_back({v[i].item_id, v[i].rating, v[i].timestamp});
    while (i + 1 < v.size() && v[i + 1].user_id == s.user_id) {
      const bool new_session = gap && (v[i + 1].timestamp - v[i].timestamp) > *gap;
      if (new_session) break;
      s.events.push_back({v[i + 1].item_id, v[i + 1].rating, v[i + 1].timestamp});
      ++i;
    }
    sessions.push_back(std::move(s));
    ++i;
  }
  return sessions;
}

std::optional<TestPair> split_input_output(const Session& s, OutputStrategy strategy,
                                           std::uint64_t n_out, std::uint64_t seed) {
  if (n_out == 0) throw DataError("n_output_items must be >= 1");
  const std::size_t len = s.events.size();
  if (len < n_out + 1) return std::nullopt;

  std::vector<std::size_t> out_positions;
  if (strategy == OutputStrategy::LastN) {
    for (std::size_t t = len - n_out; t < len; ++t) out_positions.push_back(t);
  } else {
    std::vector<std::size_t> positions(len);
    std::iota(positions.begin(), positions.end(), 0);
    auto eng = rng::make_engine(seed);
    for (std::uint64_t i = 0; i < n_out; ++i) {
      const std::uint64_t j = i + rng::uniform_below(eng, positions.size() - i);
      std::swap(positions[i], positions[j]);
    }
    out_positions.assign(positions.begin(), positions.begin() + n_out);
    std::sort(out_positions.begin(), out_positions.end());
  }

  TestPair pair;
  pair.input.user_id = s.user_id;
  std::size_t next_out = 0;
  for (std::size_t t = 0; t < len; ++t) {
    if (next_out < out_positions.size() && out_positions[next_out] == t) {
      pair.output.push_back(s.events[t].item_id);
      ++next_out;
    } else {
      pair.input.events.push_back(s.events[t]);
    }
  }
  std::sort(pair.output.begin(), pair.output.end());
  pair.output.erase(std::unique(pair.output.begin(), pair.output.end()), pair.output.end());
  // An output slice with repeated items cannot make an exactly-sized set.
  if (pair.output.size() != n_out) return std::nullopt;
  return pair;
}

namespace {

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    const std::vector<Session>& sessions, SplitStrategy strategy, double test_fraction,
    std::uint64_t seed) {
  if (test_fraction <= 0.0 || test_fraction >= 1.0)
    throw DataError("test_fraction must be in (0, 1)");
  if (sessions.size() < 2) throw DataError("degenerate split: fewer than 2 sessions");

  std::vector<std::size_t> train, test;
  if (strategy == SplitStrategy::UserHoldout) {
    // Per-user hash draw; all sessions of a user move together.
    for (std::size_t i = 0; i < sessions.size(); ++i) {
      const double u = rng::to_unit(rng::derive(seed, {sessions[i].user_id}));
      (u < test_fraction ? test : train).push_back(i);
    }
  } else {
    std::vector<double> ends;
    ends.reserve(sessions.size());
    for (const auto& s : sessions)
      ends.push_back(static_cast<double>(s.events.back().timestamp));
    const double threshold = percentile_linear(ends, (1.0 - test_fraction) * 100.0);
    for (std::size_t i = 0; i < sessions.size(); ++i)
      (ends[i] > threshold ? test : train).push_back(i);
  }
  if (train.empty() || test.empty()) throw DataError("degenerate split");
  return {std::move(train), std::move(test)};
}

}  // namespace

std::pair<std::vector<Session>, std::vector<Session>> holdout_split(
    const std::vector<Session>& sessions, SplitStrategy strategy, double test_fraction,
    std::uint64_t seed) {
  auto [train_idx, test_idx] = split_indices(sessions, strategy, test_fraction, seed);
  std::vector<Session> train, test;
  train.reserve(train_idx.size());
  test.reserve(test_idx.size());
  for (auto i : train_idx) train.push_back(sessions[i]);
  for (auto i : test_idx) test.push_back(sessions[i]);
  return {std::move(train), std::move(test)};
}

namespace {

template <typename T>
std::vector<T> dedup_keep_first(const std::vector<T>& values) {
  std::vector<T> out;
  for (const auto& v : values)
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  if (out.empty()) throw ConfigError("grid field list must be non-empty");
  return out;
}

}  // namespace

std::vector<Protocol> enumerate_grid(const GridSpec& g) {
  const auto thresholds = dedup_keep_first(g.rating_threshold);
  const auto min_users = dedup_keep_first(g.min_user_interactions);
  const auto min_items = dedup_keep_first(g.min_item_interactions);
  const auto caps = dedup_keep_first(g.max_interactions_per_user);
  const auto user_caps = dedup_keep_first(g.max_users);
  const auto gaps = dedup_keep_first(g.session_gap);
  const auto n_outs = dedup_keep_first(g.n_output_items);
  const auto out_strategies = dedup_keep_first(g.output_strategy);
  const auto fractions = dedup_keep_first(g.test_fraction);
  const auto split_strategies = dedup_keep_first(g.split_strategy);
  const auto seeds = dedup_keep_first(g.seed);

  const std::size_t sizes[] = {thresholds.size(),  min_users.size(), min_items.size(),
                               caps.size(),        user_caps.size(), gaps.size(),
                               n_outs.size(),      out_strategies.size(),
                               fractions.size(),   split_strategies.size(),
                               seeds.size()};
  std::uint64_t total = 1;
  for (std::size_t s : sizes) {
    total *= s;
    if (total > g.grid_cap)
      throw DataError("grid too large: exceeds cap of " + std::to_string(g.grid_cap));
  }

  std::vector<Protocol> out;
  out.reserve(total);
  // Mixed-radix odometer, first field slowest.
  for (std::uint64_t t = 0; t < total; ++t) {
    std::uint64_t rem = t;
    std::size_t idx[11];
    for (int f = 10; f >= 0; --f) {
      idx[f] = rem % sizes[f];
      rem /= sizes[f];
    }
    Protocol p;
    p.rating_threshold = thresholds[idx[0]];
    p.min_user_interactions = min_users[idx[1]];
    p.min_item_interactions = min_items[idx[2]];
    p.max_interactions_per_user = caps[idx[3]];
    p.max_users = user_caps[idx[4]];
    p.session_gap = gaps[idx[5]];
    p.n_output_items = n_outs[idx[6]];
    p.output_strategy = out_strategies[idx[7]];
    p.test_fraction = fractions[idx[8]];
    p.split_strategy = split_strategies[idx[9]];
    p.seed = seeds[idx[10]];
    p.kcore_iterate = g.kcore_iterate;
    out.push_back(p);
  }
  return out;
}

PDataset build_pdataset(const RawDataset& d, const Protocol& p) {
  if (d.interactions.empty()) throw DataError("empty dataset");

  RawDataset filtered = apply_rating_threshold(d, p.rating_threshold);
  filtered = kcore_filter(filtered, p.min_user_interactions, p.min_item_interactions,
                          p.kcore_iterate);
  if (p.max_users) filtered = subsample_users(filtered, *p.max_users, p.seed);
  if (p.max_interactions_per_user)
    filtered = cap_user_interactions(filtered, *p.max_interactions_per_user);

  auto sessions = sessionize(filtered, p.session_gap);

  // Session ordinal within its user, fixed before the split so the random-n
  // seeds do not depend on the split outcome.
  std::vector<std::uint64_t> ordinal(sessions.size());
  {
    std::unordered_map<std::uint64_t, std::uint64_t> per_user_counter;
    for (std::size_t i = 0; i < sessions.size(); ++i)
      ordinal[i] = per_user_counter[sessions[i].user_id]++;
  }

  auto [train_idx, test_idx] = split_indices(sessions, p.split_strategy, p.test_fraction, p.seed);

  PDataset out;
  out.protocol = p;
  out.source_id = d.source_id;

  std::vector<TestPair> pairs;
  for (auto i : test_idx) {
    const auto& s = sessions[i];
    const std::uint64_t seed = rng::derive(p.seed, {s.user_id, ordinal[i]});
    if (auto pair = split_input_output(s, p.output_strategy, p.n_output_items, seed))
      pairs.push_back(std::move(*pair));
  }
  if (pairs.size() < kMinTestPairs) throw DataError("test set too small");

  out.train_sessions.reserve(train_idx.size());
  for (auto i : train_idx) out.train_sessions.push_back(std::move(sessions[i]));
  out.test_pairs = std::move(pairs);

  // Dense item re-index over everything retained, ascending by original id.
  std::vector<std::uint64_t> items;
  for (const auto& s : out.train_sessions)
    for (const auto& e : s.events) items.push_back(e.item_id);
  for (const auto& tp : out.test_pairs) {
    for (const auto& e : tp.input.events) items.push_back(e.item_id);
    for (auto it : tp.output) items.push_back(it);
  }
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  std::unordered_map<std::uint64_t, std::uint64_t> dense;
  dense.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) dense[items[i]] = i;

  for (auto& s : out.train_sessions)
    for (auto& e : s.events) e.item_id = dense[e.item_id];
  for (auto& tp : out.test_pairs) {
    for (auto& e : tp.input.events) e.item_id = dense[e.item_id];
    for (auto& it : tp.output) it = dense[it];
    std::sort(tp.output.begin(), tp.output.end());
  }
  out.item_ids = std::move(items);
  return out;
}

}  // namespace reprobench
