#include <random>

#include <gtest/gtest.h>

#include "neardup/detector.hpp"
#include "neardup/errors.hpp"
#include "support/oracle.hpp"

using namespace neardup;
namespace nt = neardup::testing;

namespace {

std::vector<std::string> numbered(const std::string& prefix, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

Fingerprint fp(Vocabulary& vocab, const std::string& id, const std::vector<std::string>& tokens) {
  DetectionParams params;
  params.min_tokens = 1;
  return std::get<Fingerprint>(build_fingerprint({id, tokens}, params, vocab));
}

std::vector<std::vector<DocId>> groups_of(const DuplicationReport& r) { return r.groups(); }

}  // namespace

TEST(CandidateAdmissible, Examples) {
  Vocabulary vocab;
  DetectionParams params;
  EXPECT_FALSE(candidate_admissible(fp(vocab, "a", numbered("t", 50)),
                                    fp(vocab, "b", numbered("t", 100)), params));
  EXPECT_TRUE(candidate_admissible(fp(vocab, "a", numbered("t", 60)),
                                   fp(vocab, "b", numbered("u", 60)), params));

  // n = 70 vs 100 with equal distinct counts: multiset bound exactly 0.7.
  auto seventy = numbered("t", 50);
  for (int i = 0; i < 20; ++i) seventy.push_back("t0");
  auto hundred = numbered("t", 50);
  for (int i = 0; i < 50; ++i) hundred.push_back("t1");
  EXPECT_TRUE(candidate_admissible(fp(vocab, "a", seventy), fp(vocab, "b", hundred), params));
  hundred.push_back("t2");
  EXPECT_FALSE(candidate_admissible(fp(vocab, "a", seventy), fp(vocab, "b", hundred), params));
}

// Pruning never drops a true near-duplicate.
TEST(CandidateAdmissible, SoundAgainstFullComparison) {
  std::mt19937_64 rng(11);
  for (int corpus = 0; corpus < 20; ++corpus) {
    auto docs = nt::random_edit_corpus(rng, 80);
    Vocabulary vocab;
    std::vector<Fingerprint> fps;
    for (const auto& d : docs) {
      DetectionParams p;
      p.min_tokens = 1;
      if (d.tokens.empty()) continue;
      fps.push_back(std::get<Fingerprint>(build_fingerprint(d, p, vocab)));
    }
    DetectionParams params;
    for (std::size_t i = 0; i < fps.size(); ++i) {
      for (std::size_t j = i + 1; j < fps.size(); ++j) {
        if (is_near_duplicate(fps[i], fps[j], params)) {
          EXPECT_TRUE(candidate_admissible(fps[i], fps[j], params));
        }
      }
    }
  }
}

TEST(DetectPairs, Examples) {
  Vocabulary vocab;
  DetectionParams params;
  EXPECT_TRUE(detect_pairs({}, params).empty());

  auto x = numbered("x", 30);
  std::vector<Fingerprint> fps{fp(vocab, "x", x), fp(vocab, "xcopy", x),
                               fp(vocab, "y", numbered("y", 30))};
  EXPECT_EQ(detect_pairs(fps, params), (std::vector<IdPair>{{"x", "xcopy"}}));

  // Three documents, each differing from the base in one position.
  auto base = numbered("b", 40);
  auto v1 = base, v2 = base;
  v1[0] = "q1";
  v2[1] = "q2";
  std::vector<Fingerprint> three{fp(vocab, "c", v2), fp(vocab, "a", base), fp(vocab, "b", v1)};
  EXPECT_EQ(detect_pairs(three, params),
            (std::vector<IdPair>{{"a", "b"}, {"a", "c"}, {"b", "c"}}));
}

TEST(Cluster, Examples) {
  std::vector<IdPair> chain{{"a", "b"}, {"b", "c"}};
  auto r = cluster(chain, {"a", "b", "c", "d"});
  EXPECT_EQ(groups_of(r), (std::vector<std::vector<DocId>>{{"a", "b", "c"}}));
  EXPECT_EQ(r.num_files(), 4u);

  EXPECT_TRUE(cluster({}, {"a", "b"}).groups().empty());

  std::vector<IdPair> two{{"c", "d"}, {"a", "b"}};
  EXPECT_EQ(groups_of(cluster(two, {"a", "b", "c", "d"})),
            (std::vector<std::vector<DocId>>{{"a", "b"}, {"c", "d"}}));

  std::vector<IdPair> stray{{"a", "z"}};
  EXPECT_THROW(cluster(stray, {"a", "b"}), DataError);
}

TEST(Detect, Examples) {
  auto tokens = numbered("k", 20);
  std::vector<TokenDocument> corpus{
      {"c1", tokens}, {"c2", tokens}, {"c3", tokens}, {"other", numbered("o", 25)}};
  auto result = detect(corpus, DetectionParams{});
  EXPECT_EQ(result.report.num_files(), 4u);
  EXPECT_EQ(groups_of(result.report), (std::vector<std::vector<DocId>>{{"c1", "c2", "c3"}}));
  EXPECT_TRUE(result.undersized.empty());

  std::vector<TokenDocument> small{{"s1", numbered("k", 19)}, {"s2", numbered("k", 19)}};
  auto none = detect(small, DetectionParams{});
  EXPECT_EQ(none.report.num_files(), 0u);
  EXPECT_EQ(none.undersized, (std::vector<Undersized>{{"s1", 19}, {"s2", 19}}));

  std::vector<TokenDocument> dup{{"a", tokens}, {"a", tokens}};
  EXPECT_THROW(detect(dup, DetectionParams{}), DataError);
}

namespace {

void expect_matches_oracle(const std::vector<TokenDocument>& docs, const DetectionParams& params,
                           const nt::OracleParams& oparams, const std::string& context) {
  auto expected = nt::brute_force_detect(docs, oparams);
  for (bool pruning : {false, true}) {
    for (bool index : {false, true}) {
      for (unsigned jobs : {1u, 4u}) {
        DetectOptions opts{jobs, pruning, index};
        auto got = detect(docs, params, opts);
        SCOPED_TRACE(context + " pruning=" + std::to_string(pruning) +
                     " index=" + std::to_string(index) + " jobs=" + std::to_string(jobs));
        EXPECT_EQ(got.report.universe(), expected.admitted);
        EXPECT_EQ(got.report.groups(), expected.groups);

        Vocabulary vocab;
        std::vector<Fingerprint> fps;
        for (const auto& d : docs) {
          auto b = build_fingerprint(d, params, vocab);
          if (auto* f = std::get_if<Fingerprint>(&b)) fps.push_back(std::move(*f));
        }
        EXPECT_EQ(detect_pairs(fps, params, opts), expected.pairs);
      }
    }
  }
}

}  // namespace

TEST(DetectOracle, RandomCorporaMatchBruteForce) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 6; ++trial) {
    auto docs = nt::random_edit_corpus(rng, trial == 0 ? 500 : 150);
    expect_matches_oracle(docs, DetectionParams{}, nt::OracleParams{},
                          "trial " + std::to_string(trial));
  }
}

TEST(DetectOracle, NonDefaultThresholds) {
  std::mt19937_64 rng(99);
  const std::pair<nt::Rational, nt::Rational> settings[] = {
      {{1, 2}, {1, 2}}, {{9, 10}, {3, 5}}, {{1, 1}, {1, 1}}, {{3, 10}, {19, 20}}};
  for (auto [t0, t1] : settings) {
    auto docs = nt::random_edit_corpus(rng, 150);
    DetectionParams params;
    params.t0 = Threshold(t0.num, t0.den);
    params.t1 = Threshold(t1.num, t1.den);
    params.min_tokens = 5;
    nt::OracleParams oparams{t0, t1, 5};
    expect_matches_oracle(docs, params, oparams, params.t0.to_string() + "/" + params.t1.to_string());
  }
}

// Raising a threshold can only split groups: every stricter group sits inside
// one looser group.
TEST(DetectProperty, StricterThresholdsRefineGroups) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    auto docs = nt::random_edit_corpus(rng, 200);
    DetectionParams loose;
    DetectionParams strict;
    strict.t0 = Threshold(9, 10);
    strict.t1 = Threshold(17, 20);
    auto a = detect(docs, loose).report;
    auto b = detect(docs, strict).report;
    EXPECT_EQ(a.universe(), b.universe());
    EXPECT_LE(b.num_duplicated_files(), a.num_duplicated_files());
    for (const auto& g : b.groups()) {
      auto idx = a.group_index(g.front());
      ASSERT_TRUE(idx.has_value());
      for (const auto& id : g) EXPECT_EQ(a.group_index(id), idx);
    }
  }
}

TEST(DetectProperty, IndependentOfInputOrderAndJobs) {
  std::mt19937_64 rng(8);
  auto docs = nt::random_edit_corpus(rng, 300);
  auto reference = detect(docs, DetectionParams{}, DetectOptions{1, true, true}).report;
  for (unsigned jobs : {2u, 3u, 8u, 0u}) {
    std::shuffle(docs.begin(), docs.end(), rng);
    EXPECT_EQ(detect(docs, DetectionParams{}, DetectOptions{jobs, true, true}).report, reference);
  }
}
