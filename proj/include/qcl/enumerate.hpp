#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <iterator>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "qcl/basis.hpp"
#include "qcl/bigcount.hpp"
#include "qcl/reduce.hpp"
#include "qcl/term.hpp"
#include "qcl/types.hpp"

namespace qcl {

/// Number of size-n terms over d primitives: d^(n+1) * Catalan(n).
inline BigCount count_terms(std::uint64_t d, std::uint64_t n) {
  if (d < 1) throw std::invalid_argument("count_terms: d must be positive");
  return boost::multiprecision::pow(BigCount(d), static_cast<unsigned>(n + 1)) * catalan(n);
}

/// Size-n terms in a fixed order: a term of size n is App(L, R) with
/// |L| = k, |R| = n-1-k; terms are ordered by k ascending, then by the rank
/// of L, then by the rank of R. Leaves follow basis order. Ranks are dense
/// in [0, count_terms(d, n)), so index ranges can be handed to workers.
class TermEnumerator {
 public:
  using Callback = std::function<void(const Term&)>;

  TermEnumerator(const Basis& basis, std::uint64_t max_size) {
    const std::uint64_t d = basis.size();
    counts_.reserve(max_size + 1);
    for (std::uint64_t n = 0; n <= max_size; ++n)
      counts_.push_back(to_u64_or_throw(count_terms(d, n), "number of terms of this size"));
  }

  std::uint64_t count(std::uint64_t n) const { return counts_.at(n); }

  /// The term with the given rank among size-n terms.
  Term at(std::uint64_t n, std::uint64_t rank) const {
    if (rank >= count(n)) throw std::out_of_range("term rank out of range");
    if (n == 0) return Term::leaf(PrimId{static_cast<std::uint32_t>(rank)});
    for (std::uint64_t k = 0; k < n; ++k) {
      const std::uint64_t right = counts_[n - 1 - k];
      const std::uint64_t block = counts_[k] * right;
      if (rank < block) return Term::app(at(k, rank / right), at(n - 1 - k, rank % right));
      rank -= block;
    }
    throw std::logic_error("unreachable");
  }

  /// Calls `f` on every size-n term with rank in [lo, hi), in rank order.
  void for_each(std::uint64_t n, std::uint64_t lo, std::uint64_t hi, const Callback& f) const {
    hi = std::min(hi, count(n));
    if (lo >= hi) return;
    if (n == 0) {
      for (std::uint64_t i = lo; i < hi; ++i) f(Term::leaf(PrimId{static_cast<std::uint32_t>(i)}));
      return;
    }
    std::uint64_t offset = 0;
    for (std::uint64_t k = 0; k < n && offset < hi; ++k) {
      const std::uint64_t right = counts_[n - 1 - k];
      const std::uint64_t block = counts_[k] * right;
      const std::uint64_t a = std::max(lo, offset);
      const std::uint64_t b = std::min(hi, offset + block);
      if (a < b) {
        const std::uint64_t first = (a - offset) / right;
        const std::uint64_t last = (b - offset - 1) / right;  // inclusive
        std::uint64_t li = first;
        for_each(k, first, last + 1, [&](const Term& left) {
          const std::uint64_t base = offset + li * right;
          const std::uint64_t rlo = a > base ? a - base : 0;
          const std::uint64_t rhi = std::min(b - base, right);
          for_each(n - 1 - k, rlo, rhi, [&](const Term& r) { f(Term::app(left, r)); });
          ++li;
        });
      }
      offset += block;
    }
  }

  void for_each(std::uint64_t n, const Callback& f) const { for_each(n, 0, count(n), f); }

 private:
  std::vector<std::uint64_t> counts_;
};

/// Lazy, random-access view of all size-n terms in enumeration order.
class TermRange {
 public:
  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = Term;
    using difference_type = std::ptrdiff_t;
    using pointer = void;
    using reference = Term;

    iterator(const TermRange* range, std::uint64_t rank) : range_(range), rank_(rank) {}
    Term operator*() const { return range_->enumerator_.at(range_->n_, rank_); }
    iterator& operator++() {
      ++rank_;
      return *this;
    }
    iterator operator++(int) {
      iterator old = *this;
      ++rank_;
      return old;
    }
    friend bool operator==(const iterator& a, const iterator& b) { return a.rank_ == b.rank_; }

   private:
    const TermRange* range_;
    std::uint64_t rank_;
  };

  TermRange(const Basis& basis, std::uint64_t n) : enumerator_(basis, n), n_(n) {}
  iterator begin() const { return {this, 0}; }
  iterator end() const { return {this, enumerator_.count(n_)}; }
  std::uint64_t size() const { return enumerator_.count(n_); }
  Term operator[](std::uint64_t rank) const { return enumerator_.at(n_, rank); }

 private:
  TermEnumerator enumerator_;
  std::uint64_t n_;
};

/// Every size-n term exactly once, in enumeration order.
inline TermRange enumerate_terms(const Basis& basis, std::uint64_t n) { return TermRange(basis, n); }

struct CensusOptions {
  std::uint64_t fuel = 1000;
  std::optional<Term> pattern;
  bool typecheck = false;
  unsigned workers = 0;  // 0: one per hardware thread
};

struct CensusResult {
  std::uint64_t size = 0;
  std::uint64_t fuel = 0;
  BigCount total = 0;
  std::map<std::uint64_t, BigCount> by_reduction_length;
  BigCount fuel_exhausted = 0;
  BigCount normal_forms = 0;
  std::optional<BigCount> typeable;
  std::optional<BigCount> containing_pattern;

  BigCount bucket(std::uint64_t length) const {
    auto it = by_reduction_length.find(length);
    return it == by_reduction_length.end() ? BigCount(0) : it->second;
  }
};

inline unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

namespace detail {

struct CensusTally {
  std::vector<std::uint64_t> lengths;
  std::uint64_t exhausted = 0;
  std::uint64_t typeable = 0;
  std::uint64_t containing = 0;

  void merge(const CensusTally& other) {
    if (lengths.size() < other.lengths.size()) lengths.resize(other.lengths.size(), 0);
    for (std::size_t i = 0; i < other.lengths.size(); ++i) lengths[i] += other.lengths[i];
    exhausted += other.exhausted;
    typeable += other.typeable;
    containing += other.containing;
  }
};

// Runs `work(lo, hi, tally)` over [0, total) in chunks pulled by `workers`
// threads; tallies are merged after all threads finish, so the result does
// not depend on scheduling.
template <class Work>
CensusTally sharded(std::uint64_t total, unsigned workers, Work work) {
  const std::uint64_t chunks = std::max<std::uint64_t>(1, std::min<std::uint64_t>(total, 64ULL * workers));
  const std::uint64_t chunk = (total + chunks - 1) / std::max<std::uint64_t>(chunks, 1);
  std::atomic<std::uint64_t> next{0};
  std::vector<CensusTally> tallies(workers);
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto body = [&](unsigned w) {
    try {
      for (;;) {
        const std::uint64_t lo = next.fetch_add(chunk);
        if (lo >= total) break;
        work(lo, std::min(total, lo + chunk), tallies[w]);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(total);
    }
  };
  if (workers == 1) {
    body(0);
  } else {
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(body, w);
    for (auto& t : threads) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  CensusTally merged;
  for (const auto& t : tallies) merged.merge(t);
  return merged;
}

}  // namespace detail

/// Classifies every size-n term by its normal-order reduction length.
/// Terms not normalised within `options.fuel` steps land in fuel_exhausted.
inline CensusResult census(const Basis& basis, std::uint64_t n, const CensusOptions& options) {
  if (options.fuel < 1) throw std::invalid_argument("census: fuel must be at least 1");
  if (options.typecheck && !basis.is_sk())
    throw std::invalid_argument("census: typecheck requires the SK basis");
  const TermEnumerator enumerator(basis, n);
  const std::uint64_t total = enumerator.count(n);
  const unsigned workers = resolve_workers(options.workers);

  auto tally = detail::sharded(total, workers, [&](std::uint64_t lo, std::uint64_t hi, detail::CensusTally& t) {
    Normalizer normalizer(basis);
    enumerator.for_each(n, lo, hi, [&](const Term& term) {
      auto outcome = normalizer(term, options.fuel);
      if (const auto* nf = std::get_if<NormalForm>(&outcome)) {
        if (t.lengths.size() <= nf->steps) t.lengths.resize(nf->steps + 1, 0);
        ++t.lengths[nf->steps];
      } else {
        ++t.exhausted;
      }
      if (options.pattern && contains_subterm(term, *options.pattern)) ++t.containing;
      if (options.typecheck && infer_principal_type(term, basis)) ++t.typeable;
    });
  });

  CensusResult result;
  result.size = n;
  result.fuel = options.fuel;
  result.total = total;
  for (std::size_t len = 0; len < tally.lengths.size(); ++len)
    if (tally.lengths[len] != 0) result.by_reduction_length[len] = tally.lengths[len];
  result.fuel_exhausted = tally.exhausted;
  result.normal_forms = result.bucket(0);
  if (options.typecheck) result.typeable = BigCount(tally.typeable);
  if (options.pattern) result.containing_pattern = BigCount(tally.containing);
  return result;
}

/// `reduction_length,count` rows, ascending, with -1 (fuel exhausted) first.
inline std::string census_to_csv(const CensusResult& r) {
  std::ostringstream out;
  out << "reduction_length,count\n";
  if (r.fuel_exhausted != 0) out << "-1," << r.fuel_exhausted << '\n';
  for (const auto& [len, count] : r.by_reduction_length) out << len << ',' << count << '\n';
  return out.str();
}

inline nlohmann::json census_to_json(const CensusResult& r) {
  auto num = [](const BigCount& v) { return to_u64_or_throw(v, "census count"); };
  nlohmann::json buckets = nlohmann::json::array();
  for (const auto& [len, count] : r.by_reduction_length)
    buckets.push_back({{"reduction_length", len}, {"count", num(count)}});
  nlohmann::json j{{"size", r.size},
                   {"fuel", r.fuel},
                   {"total", num(r.total)},
                   {"by_reduction_length", buckets},
                   {"fuel_exhausted", num(r.fuel_exhausted)},
                   {"normal_forms", num(r.normal_forms)}};
  if (r.typeable) j["typeable"] = num(*r.typeable);
  if (r.containing_pattern) j["containing_pattern"] = num(*r.containing_pattern);
  return j;
}

}  // namespace qcl
