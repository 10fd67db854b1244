#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "helpers.hpp"
#include "reprobench/errors.hpp"
#include "reprobench/metrics.hpp"

using namespace reprobench;

namespace {

RankedList list_of(std::vector<std::uint64_t> items) {
  RankedList r;
  r.scores.assign(items.size(), 0.0);
  for (std::size_t i = 0; i < items.size(); ++i) r.scores[i] = 1.0 - 0.01 * i;
  r.items = std::move(items);
  return r;
}

std::vector<std::uint64_t> rel_of(std::initializer_list<std::uint64_t> items) {
  std::vector<std::uint64_t> v(items);
  std::sort(v.begin(), v.end());
  return v;
}

// Brute-force per-pair references, written from the definitions.
double ref_precision(const std::vector<std::uint64_t>& rec, const std::set<std::uint64_t>& rel,
                     std::uint64_t k) {
  std::uint64_t hits = 0;
  for (std::size_t i = 0; i < rec.size() && i < k; ++i) hits += rel.count(rec[i]);
  return static_cast<double>(hits) / static_cast<double>(k);
}

double ref_recall(const std::vector<std::uint64_t>& rec, const std::set<std::uint64_t>& rel,
                  std::uint64_t k) {
  std::uint64_t hits = 0;
  for (std::size_t i = 0; i < rec.size() && i < k; ++i) hits += rel.count(rec[i]);
  return static_cast<double>(hits) / static_cast<double>(rel.size());
}

double ref_mrr(const std::vector<std::uint64_t>& rec, const std::set<std::uint64_t>& rel,
               std::uint64_t k) {
  for (std::size_t i = 0; i < rec.size() && i < k; ++i)
    if (rel.count(rec[i])) return 1.0 / (i + 1.0);
  return 0.0;
}

double ref_ndcg(const std::vector<std::uint64_t>& rec, const std::set<std::uint64_t>& rel,
                std::uint64_t k) {
  double dcg = 0.0;
  for (std::size_t i = 0; i < rec.size() && i < k; ++i)
    if (rel.count(rec[i])) dcg += 1.0 / std::log2(i + 2.0);
  double idcg = 0.0;
  for (std::size_t i = 0; i < std::min<std::size_t>(rel.size(), k); ++i)
    idcg += 1.0 / std::log2(i + 2.0);
  return dcg / idcg;
}

}  // namespace

TEST_CASE("metric id text form") {
  CHECK(MetricId{MetricFamily::Ndcg, 10}.str() == "ndcg@10");
  const auto id = MetricId::parse("item_coverage@30");
  CHECK(id.family == MetricFamily::ItemCoverage);
  CHECK(id.k == 30);
  CHECK_THROWS_AS(MetricId::parse("ndcg"), ConfigError);
  CHECK_THROWS_AS(MetricId::parse("blah@10"), ConfigError);
}

TEST_CASE("precision at k") {
  CHECK(precision_at_k(list_of({1, 2, 3}), rel_of({1, 2, 3, 9}), 3) == 1.0);
  CHECK(precision_at_k(list_of({1, 2, 3}), rel_of({1, 3}), 3) == doctest::Approx(2.0 / 3.0));
  CHECK(precision_at_k(list_of({1, 2, 3}), rel_of({7, 8}), 3) == 0.0);
  SUBCASE("denominator stays k when fewer items were recommendable") {
    CHECK(precision_at_k(list_of({1}), rel_of({1}), 5) == doctest::Approx(0.2));
  }
  CHECK_THROWS_WITH_AS(precision_at_k(list_of({1}), {}, 1),
                       doctest::Contains("no relevant items"), DataError);
}

TEST_CASE("recall at k") {
  CHECK(recall_at_k(list_of({1, 2, 3}), rel_of({1, 2}), 3) == 1.0);
  CHECK(recall_at_k(list_of({1, 9, 9}), rel_of({1, 2, 3, 4}), 3) == doctest::Approx(0.25));
}

TEST_CASE("mrr at k") {
  CHECK(mrr_at_k(list_of({1, 2, 3}), rel_of({1}), 3) == 1.0);
  CHECK(mrr_at_k(list_of({9, 1, 3}), rel_of({1}), 3) == 0.5);
  CHECK(mrr_at_k(list_of({9, 8, 7}), rel_of({1}), 3) == 0.0);
}

TEST_CASE("ndcg at k") {
  CHECK(ndcg_at_k(list_of({1, 2, 9}), rel_of({1, 2}), 3) == 1.0);
  CHECK(ndcg_at_k(list_of({9, 8, 7}), rel_of({1}), 3) == 0.0);
  SUBCASE("hits at ranks 1 and 3 with two relevant items") {
    const double expected = (1.0 + 1.0 / std::log2(4.0)) / (1.0 + 1.0 / std::log2(3.0));
    CHECK(expected == doctest::Approx(0.9197).epsilon(1e-4));
    CHECK(ndcg_at_k(list_of({1, 9, 2}), rel_of({1, 2}), 3) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
  SUBCASE("equals 1 exactly when hits fill the first min(|rel|, k) ranks") {
    CHECK(ndcg_at_k(list_of({5, 6, 1}), rel_of({5, 6}), 3) == 1.0);
    CHECK(ndcg_at_k(list_of({5, 1, 6}), rel_of({5, 6}), 3) != 1.0);
  }
}

TEST_CASE("item coverage") {
  EvalContext ctx;
  ctx.n_items = 10;
  ctx.popularity.assign(10, 1);
  ctx.long_tail.assign(10, true);

  std::vector<RankedList> recs;
  recs.push_back(list_of({0, 1}));
  recs.push_back(list_of({1, 2, 3}));
  CHECK(item_coverage_at_k(recs, ctx, 5) == doctest::Approx(0.4));

  SUBCASE("single full-catalog recommendation covers everything") {
    std::vector<RankedList> all;
    all.push_back(list_of({0, 1, 2, 3, 4, 5, 6, 7, 8, 9}));
    CHECK(item_coverage_at_k(all, ctx, 10) == 1.0);
  }
  SUBCASE("empty catalog is an error") {
    EvalContext empty;
    CHECK_THROWS_AS(item_coverage_at_k(recs, empty, 5), DataError);
  }
}

TEST_CASE("average percentage of long-tail items") {
  EvalContext ctx;
  ctx.n_items = 6;
  ctx.popularity = {10, 9, 8, 1, 1, 1};
  ctx.long_tail = {false, false, false, true, true, true};

  std::vector<RankedList> recs;
  recs.push_back(list_of({3, 4}));  // all tail
  CHECK(apt_at_k(recs, ctx, 2) == 1.0);

  recs.clear();
  recs.push_back(list_of({0, 3}));  // half tail
  recs.push_back(list_of({1, 4}));
  CHECK(apt_at_k(recs, ctx, 2) == 0.5);

  SUBCASE("popularity-ordered recommendations hit no tail for small k") {
    std::vector<RankedList> head;
    head.push_back(list_of({0, 1, 2}));
    CHECK(apt_at_k(head, ctx, 3) == 0.0);
  }
  SUBCASE("an empty long tail is an error") {
    ctx.long_tail.assign(6, false);
    CHECK_THROWS_WITH_AS(apt_at_k(recs, ctx, 2), doctest::Contains("long-tail"), DataError);
  }
}

TEST_CASE("long tail derives from the 20% popularity head") {
  std::vector<Session> train;
  // item 0: 8 events; item 1: 6; items 2..5: 1 each -> total 18, head target 3.6
  std::vector<std::vector<std::uint64_t>> per_user = {
      {0, 0, 0, 0, 0, 0, 0, 0}, {1, 1, 1, 1, 1, 1}, {2, 3}, {4, 5}};
  for (std::size_t u = 0; u < per_user.size(); ++u) {
    Session s;
    s.user_id = u;
    std::int64_t t = 0;
    for (auto item : per_user[u]) s.events.push_back({item, 4.0, t++});
    train.push_back(std::move(s));
  }
  const auto ctx = EvalContext::from_train(train, 6);
  // item 0 alone (8 >= 3.6) is the head
  CHECK_FALSE(ctx.long_tail[0]);
  for (int i = 1; i < 6; ++i) CHECK(ctx.long_tail[i]);
}

TEST_CASE("per-pair metrics match brute-force references on random cases") {
  std::mt19937_64 eng(71);
  for (int rep = 0; rep < 100; ++rep) {
    const std::uint64_t catalog = 3 + eng() % 8;  // <= 10
    const std::uint64_t k = 1 + eng() % 5;        // <= 5
    std::vector<std::uint64_t> items(catalog);
    for (std::uint64_t i = 0; i < catalog; ++i) items[i] = i;
    std::shuffle(items.begin(), items.end(), eng);
    items.resize(1 + eng() % catalog);
    std::set<std::uint64_t> rel_set;
    const std::uint64_t n_rel = 1 + eng() % catalog;
    while (rel_set.size() < n_rel) rel_set.insert(eng() % catalog);
    std::vector<std::uint64_t> rel(rel_set.begin(), rel_set.end());

    const auto rec = list_of(items);
    CHECK(precision_at_k(rec, rel, k) ==
          doctest::Approx(ref_precision(items, rel_set, k)).epsilon(1e-12));
    CHECK(recall_at_k(rec, rel, k) ==
          doctest::Approx(ref_recall(items, rel_set, k)).epsilon(1e-12));
    CHECK(mrr_at_k(rec, rel, k) == doctest::Approx(ref_mrr(items, rel_set, k)).epsilon(1e-12));
    CHECK(ndcg_at_k(rec, rel, k) ==
          doctest::Approx(ref_ndcg(items, rel_set, k)).epsilon(1e-12));

    // cross-metric consistency: both recover the hit count exactly
    const double hits_a = precision_at_k(rec, rel, k) * static_cast<double>(k);
    const double hits_b = recall_at_k(rec, rel, k) * static_cast<double>(rel.size());
    CHECK(hits_a == doctest::Approx(hits_b).epsilon(1e-12));

    // recall is non-decreasing in k
    CHECK(recall_at_k(rec, rel, k) <= recall_at_k(rec, rel, k + 3) + 1e-12);
  }
}

TEST_CASE("evaluate_all") {
  // Hand-built p-dataset: 2 dense items per test output, best_of knows the counts.
  PDataset d;
  d.source_id = "eval";
  d.item_ids = {100, 101, 102, 103, 104};  // dense 0..4
  {
    Session s;
    s.user_id = 0;
    s.events = {{0, 4.0, 0}, {0, 4.0, 1}, {1, 4.0, 2}, {2, 4.0, 3}};
    d.train_sessions.push_back(s);
    Session s2;
    s2.user_id = 1;
    s2.events = {{0, 4.0, 0}, {1, 4.0, 1}, {3, 4.0, 2}};
    d.train_sessions.push_back(s2);
  }
  auto add_pair = [&](std::vector<std::uint64_t> input, std::vector<std::uint64_t> output) {
    TestPair tp;
    tp.input.user_id = 90 + d.test_pairs.size();
    std::int64_t t = 0;
    for (auto item : input) tp.input.events.push_back({item, 4.0, t++});
    std::sort(output.begin(), output.end());
    tp.output = std::move(output);
    d.test_pairs.push_back(std::move(tp));
  };
  // popularity: item0=3, item1=2, item2=1, item3=1, item4=0
  add_pair({4}, {0, 1});
  add_pair({0}, {1, 2});
  add_pair({1}, {0, 3});
  add_pair({2}, {0, 1});
  add_pair({3}, {0, 4});

  AlgoSpec spec;
  spec.kind = AlgoKind::BestOf;
  std::vector<RecModel> models;
  models.push_back(fit(spec, train_view(d)));

  const std::vector<MetricId> ids = {{MetricFamily::Precision, 2}, {MetricFamily::Recall, 2}};
  const auto table = evaluate_all(d, models, ids, 50, 5);
  REQUIRE(table.metric_order.size() == 2);
  REQUIRE(table.algo_order == std::vector<std::string>{"best_of"});
  CHECK(table.n_test_pairs == 5);

  // Hand-computed per pair: best_of ranks eligible items by count, item asc.
  //   input {4} -> top2 [0,1]   rel {0,1} -> p=1.0,  r=1.0
  //   input {0} -> top2 [1,2]   rel {1,2} -> p=1.0,  r=1.0
  //   input {1} -> top2 [0,2]   rel {0,3} -> p=0.5,  r=0.5
  //   input {2} -> top2 [0,1]   rel {0,1} -> p=1.0,  r=1.0
  //   input {3} -> top2 [0,1]   rel {0,4} -> p=0.5,  r=0.5
  const double expect = (1.0 + 1.0 + 0.5 + 1.0 + 0.5) / 5.0;
  CHECK(table.at(ids[0], "best_of").mean == doctest::Approx(expect).epsilon(1e-12));
  CHECK(table.at(ids[1], "best_of").mean == doctest::Approx(expect).epsilon(1e-12));

  SUBCASE("duplicating every test pair keeps the means") {
    PDataset doubled = d;
    for (const auto& tp : d.test_pairs) doubled.test_pairs.push_back(tp);
    std::vector<RecModel> models2;
    models2.push_back(fit(spec, train_view(doubled)));
    const auto table2 = evaluate_all(doubled, models2, ids, 50, 5);
    CHECK(table2.at(ids[0], "best_of").mean ==
          doctest::Approx(table.at(ids[0], "best_of").mean).epsilon(1e-12));
  }

  SUBCASE("missing entries are an error") {
    CHECK_THROWS_AS(table.at(MetricId{MetricFamily::Ndcg, 10}, "best_of"), DataError);
    CHECK_THROWS_AS(table.at(ids[0], "nope"), DataError);
  }
}
