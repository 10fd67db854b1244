#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "reprobench/ingest.hpp"

namespace reprobench {

enum class OutputStrategy { LastN, RandomN };
enum class SplitStrategy { UserHoldout, TemporalGlobal };

std::string output_strategy_name(OutputStrategy s);
OutputStrategy parse_output_strategy(const std::string& name);
std::string split_strategy_name(SplitStrategy s);
SplitStrategy parse_split_strategy(const std::string& name);

// A complete preprocessing recipe. nullopt means "unlimited" for the caps and
// "no sessionization" for the gap.
struct Protocol {
  double rating_threshold = 0.0;
  std::uint64_t min_user_interactions = 0;
  std::uint64_t min_item_interactions = 0;
  std::optional<std::uint64_t> max_interactions_per_user;
  std::optional<std::uint64_t> max_users;
  std::optional<std::int64_t> session_gap;
  std::uint64_t n_output_items = 1;
  OutputStrategy output_strategy = OutputStrategy::LastN;
  double test_fraction = 0.2;
  SplitStrategy split_strategy = SplitStrategy::UserHoldout;
  std::uint64_t seed = 0;
  bool kcore_iterate = true;  // false: single user-then-item pass

  friend bool operator==(const Protocol&, const Protocol&) = default;
};

// Candidate values per Protocol field; the grid is their cartesian product.
struct GridSpec {
  std::vector<double> rating_threshold{0.0};
  std::vector<std::uint64_t> min_user_interactions{0};
  std::vector<std::uint64_t> min_item_interactions{0};
  std::vector<std::optional<std::uint64_t>> max_interactions_per_user{std::nullopt};
  std::vector<std::optional<std::uint64_t>> max_users{std::nullopt};
  std::vector<std::optional<std::int64_t>> session_gap{std::nullopt};
  std::vector<std::uint64_t> n_output_items{1};
  std::vector<OutputStrategy> output_strategy{OutputStrategy::LastN};
  std::vector<double> test_fraction{0.2};
  std::vector<SplitStrategy> split_strategy{SplitStrategy::UserHoldout};
  std::vector<std::uint64_t> seed{0};
  bool kcore_iterate = true;
  std::uint64_t grid_cap = 10000;
};

struct SessionEvent {
  std::uint64_t item_id = 0;
  double rating = 0.0;
  std::int64_t timestamp = 0;

  friend bool operator==(const SessionEvent&, const SessionEvent&) = default;
};

// A timestamp-ascending run of one user's interactions.
struct Session {
  std::uint64_t user_id = 0;
  std::vector<SessionEvent> events;

  friend bool operator==(const Session&, const Session&) = default;
};

// A test session split into observed input and held-out output items.
struct TestPair {
  Session input;
  std::vector<std::uint64_t> output;  // sorted, exactly n_output_items entries

  friend bool operator==(const TestPair&, const TestPair&) = default;
};

// A preprocessed dataset. Item ids are densely re-indexed to [0, n_items);
// item_ids maps dense id -> original id (ascending by original id).
struct PDataset {
  std::vector<Session> train_sessions;
  std::vector<TestPair> test_pairs;
  std::vector<std::uint64_t> item_ids;
  Protocol protocol;
  std::string source_id;

  std::uint64_t n_items() const { return item_ids.size(); }

  friend bool operator==(const PDataset&, const PDataset&) = default;
};

RawDataset apply_rating_threshold(const RawDataset& d, double threshold);

// Alternately removes users/items below the minimum interaction counts. With
// iterate=true runs to the fixpoint (the unique maximal feasible subset).
RawDataset kcore_filter(const RawDataset& d, std::uint64_t min_user,
                        std::uint64_t min_item, bool iterate = true);

RawDataset subsample_users(const RawDataset& d, std::uint64_t max_users, std::uint64_t seed);

// Keeps the max_n most recent interactions per user; equal timestamps rank by
// item_id ascending, so the kept suffix follows the dataset sort order.
RawDataset cap_user_interactions(const RawDataset& d, std::uint64_t max_n);

// Consecutive interactions of a user share a session iff their time delta is
// <= gap; no gap puts each user in a single session. Length-1 sessions are kept.
std::vector<Session> sessionize(const RawDataset& d, std::optional<std::int64_t> gap);

// Splits one session into (input, output). Returns nullopt (drop) when the
// session is too short or the output slice has duplicate items.
std::optional<TestPair> split_input_output(const Session& s, OutputStrategy strategy,
                                           std::uint64_t n_out, std::uint64_t seed);

std::pair<std::vector<Session>, std::vector<Session>> holdout_split(
    const std::vector<Session>& sessions, SplitStrategy strategy,
    double test_fraction, std::uint64_t seed);

// Cartesian product of the candidate lists (deduplicated, first occurrence
// kept), first field slowest. Errors when the grid exceeds grid_cap.
std::vector<Protocol> enumerate_grid(const GridSpec& g);

// threshold -> k-core -> subsample users -> cap interactions -> sessionize ->
// holdout split -> input/output split of test sessions, then dense re-index.
PDataset build_pdataset(const RawDataset& d, const Protocol& p);

}  // namespace reprobench
