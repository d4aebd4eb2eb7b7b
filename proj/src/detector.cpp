#include "neardup/detector.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <unordered_set>

#include "neardup/disjoint_set.hpp"
#include "neardup/errors.hpp"

namespace neardup {

namespace {

using Position = std::uint32_t;
using PositionPair = std::pair<Position, Position>;

constexpr std::size_t kBlockSize = 64;

unsigned resolve_jobs(unsigned jobs) {
  if (jobs != 0) return jobs;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Runs fn(worker, block) for every block with dynamic scheduling. The first
// exception thrown by any worker is rethrown on the calling thread.
template <typename Fn>
void for_each_block(std::size_t num_blocks, unsigned jobs, Fn&& fn) {
  unsigned workers = static_cast<unsigned>(
      std::min<std::size_t>(resolve_jobs(jobs), std::max<std::size_t>(num_blocks, 1)));
  if (workers <= 1) {
    for (std::size_t b = 0; b < num_blocks; ++b) fn(0u, b);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t b = next++; b < num_blocks; b = next++) fn(w, b);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = num_blocks;
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

// Scans candidate pairs (j, i) with j < i in (distinct, id) order.
class PairScanner {
 public:
  PairScanner(std::span<const Fingerprint> fps, const DetectionParams& params,
              const DetectOptions& options)
      : fps_(fps), params_(params), options_(options) {
    order_.resize(fps_.size());
    for (Position p = 0; p < order_.size(); ++p) order_[p] = p;
    std::sort(order_.begin(), order_.end(), [&](Position a, Position b) {
      if (fps_[a].distinct() != fps_[b].distinct()) {
        return fps_[a].distinct() < fps_[b].distinct();
      }
      return fps_[a].doc_id() < fps_[b].doc_id();
    });
    if (options_.token_index) build_index();
  }

  std::size_t size() const { return order_.size(); }

  // Emits matches for position i into `out` as (fingerprint, fingerprint).
  void scan(Position i, std::vector<Position>& stamps,
            std::vector<PositionPair>& out) const {
    const Fingerprint& probe = at(i);
    Position lo = 0;
    if (options_.size_pruning) lo = lowest_admissible_position(i);

    auto consider = [&](Position j) {
      const Fingerprint& other = at(j);
      if (options_.size_pruning && !candidate_admissible(other, probe, params_)) {
        return;
      }
      if (is_near_duplicate(other, probe, params_)) {
        out.emplace_back(order_[j], order_[i]);
      }
    };

    if (!options_.token_index) {
      for (Position j = lo; j < i; ++j) consider(j);
      return;
    }
    for (std::uint32_t rank : prefix(i)) {
      const auto& list = postings_[rank];
      auto it = std::lower_bound(list.begin(), list.end(), lo);
      for (; it != list.end() && *it < i; ++it) {
        if (stamps[*it] == i) continue;
        stamps[*it] = i;
        consider(*it);
      }
    }
  }

 private:
  const Fingerprint& at(Position p) const { return fps_[order_[p]]; }

  Position lowest_admissible_position(Position i) const {
    std::uint64_t need = params_.t0.ceil_times(at(i).distinct());
    auto it = std::partition_point(
        order_.begin(), order_.begin() + i,
        [&](Position fp) { return fps_[fp].distinct() < need; });
    return static_cast<Position>(it - order_.begin());
  }

  std::span<const std::uint32_t> prefix(Position p) const {
    return {ranks_.data() + prefix_begin_[p], ranks_.data() + prefix_begin_[p + 1]};
  }

  // Any pair with J_set >= t shares a token among the first
  // |T0| - ceil(t * |T0|) + 1 tokens of both documents, when tokens are
  // ordered globally. Rare-first ordering keeps posting lists short.
  void build_index() {
    TokenId max_token = 0;
    for (const auto& fp : fps_) {
      for (const auto& tc : fp.counts()) max_token = std::max(max_token, tc.token);
    }
    std::vector<std::uint32_t> df(fps_.empty() ? 0 : std::size_t{max_token} + 1, 0);
    for (const auto& fp : fps_) {
      for (const auto& tc : fp.counts()) ++df[tc.token];
    }
    std::vector<TokenId> by_rarity(df.size());
    for (TokenId t = 0; t < by_rarity.size(); ++t) by_rarity[t] = t;
    std::sort(by_rarity.begin(), by_rarity.end(), [&](TokenId a, TokenId b) {
      return df[a] != df[b] ? df[a] < df[b] : a < b;
    });
    std::vector<std::uint32_t> rank_of(df.size());
    for (std::uint32_t r = 0; r < by_rarity.size(); ++r) rank_of[by_rarity[r]] = r;

    postings_.assign(df.size(), {});
    prefix_begin_.assign(order_.size() + 1, 0);
    std::vector<std::uint32_t> ranks;
    for (Position p = 0; p < order_.size(); ++p) {
      const Fingerprint& fp = at(p);
      ranks.clear();
      for (const auto& tc : fp.counts()) ranks.push_back(rank_of[tc.token]);
      std::sort(ranks.begin(), ranks.end());
      std::size_t len = fp.distinct() - params_.t0.ceil_times(fp.distinct()) + 1;
      len = std::min(len, ranks.size());
      ranks_.insert(ranks_.end(), ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(len));
      prefix_begin_[p + 1] = ranks_.size();
      for (std::size_t k = 0; k < len; ++k) postings_[ranks[k]].push_back(p);
    }
  }

  std::span<const Fingerprint> fps_;
  const DetectionParams& params_;
  DetectOptions options_;
  std::vector<Position> order_;
  std::vector<std::vector<Position>> postings_;
  std::vector<std::uint32_t> ranks_;
  std::vector<std::size_t> prefix_begin_;
};

}  // namespace

bool candidate_admissible(const Fingerprint& a, const Fingerprint& b,
                          const DetectionParams& params) {
  const auto [small_set, large_set] = std::minmax({a.distinct(), b.distinct()});
  const auto [small_total, large_total] = std::minmax({a.total(), b.total()});
  return params.t0.admits(small_set, large_set) &&
         params.t1.admits(small_total, large_total);
}

std::vector<IdPair> detect_pairs(std::span<const Fingerprint> fingerprints,
                                 const DetectionParams& params,
                                 const DetectOptions& options) {
  params.validate();
  PairScanner scanner(fingerprints, params, options);
  const std::size_t n = scanner.size();
  const std::size_t num_blocks = (n + kBlockSize - 1) / kBlockSize;
  const unsigned workers = resolve_jobs(options.jobs);

  std::vector<std::vector<PositionPair>> found(num_blocks);
  std::vector<std::vector<Position>> stamps(
      workers, std::vector<Position>(options.token_index ? n : 0,
                                     static_cast<Position>(-1)));
  for_each_block(num_blocks, workers, [&](unsigned worker, std::size_t block) {
    std::size_t end = std::min(n, (block + 1) * kBlockSize);
    for (std::size_t i = block * kBlockSize; i < end; ++i) {
      scanner.scan(static_cast<Position>(i), stamps[worker], found[block]);
    }
  });

  std::vector<IdPair> pairs;
  for (const auto& block : found) {
    for (auto [a, b] : block) {
      const DocId& x = fingerprints[a].doc_id();
      const DocId& y = fingerprints[b].doc_id();
      if (x < y) {
        pairs.emplace_back(x, y);
      } else {
        pairs.emplace_back(y, x);
      }
    }
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

DuplicationReport cluster(std::span<const IdPair> pairs,
                          std::vector<DocId> universe) {
  std::sort(universe.begin(), universe.end());
  auto index_of = [&](const DocId& id) {
    auto it = std::lower_bound(universe.begin(), universe.end(), id);
    if (it == universe.end() || *it != id) {
      throw DataError("pair endpoint \"" + id + "\" is not in the universe");
    }
    return static_cast<std::size_t>(it - universe.begin());
  };

  DisjointSet sets(universe.size());
  for (const auto& [a, b] : pairs) sets.unite(index_of(a), index_of(b));

  std::vector<std::vector<DocId>> by_root(universe.size());
  for (std::size_t i = 0; i < universe.size(); ++i) {
    if (sets.size_of(i) > 1) by_root[sets.find(i)].push_back(universe[i]);
  }
  std::vector<std::vector<DocId>> groups;
  for (auto& members : by_root) {
    if (!members.empty()) groups.push_back(std::move(members));
  }
  return DuplicationReport(std::move(universe), std::move(groups));
}

Detection detect(std::span<const TokenDocument> corpus,
                 const DetectionParams& params, const DetectOptions& options) {
  params.validate();
  std::unordered_set<std::string_view> seen;
  seen.reserve(corpus.size());
  for (const auto& doc : corpus) {
    if (!seen.insert(doc.id).second) {
      throw DataError("duplicate document id \"" + doc.id + "\"");
    }
  }

  Vocabulary vocab;
  std::vector<Fingerprint> fingerprints;
  Detection result;
  for (const auto& doc : corpus) {
    auto built = build_fingerprint(doc, params, vocab);
    if (auto* fp = std::get_if<Fingerprint>(&built)) {
      fingerprints.push_back(std::move(*fp));
    } else {
      result.undersized.push_back(std::get<Undersized>(std::move(built)));
    }
  }

  auto pairs = detect_pairs(fingerprints, params, options);
  std::vector<DocId> universe;
  universe.reserve(fingerprints.size());
  for (const auto& fp : fingerprints) universe.push_back(fp.doc_id());
  result.report = cluster(pairs, std::move(universe));
  return result;
}

}  // namespace neardup
