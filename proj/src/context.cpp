#include "rsft/context.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rsft {

namespace {

bool lex_less(const Symbols& a, std::span<const int> b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

int WordSet::index_of(std::span<const int> w) const {
  auto it = std::lower_bound(words.begin(), words.end(), w, lex_less);
  if (it == words.end()) return -1;
  if (!std::equal(it->begin(), it->end(), w.begin(), w.end())) return -1;
  return static_cast<int>(it - words.begin());
}

std::pair<int, int> WordSet::letter_range(int e) const {
  int single[1] = {e};
  return prefix_range(std::span<const int>(single, 1));
}

std::pair<int, int> WordSet::prefix_range(std::span<const int> prefix) const {
  auto lo = std::lower_bound(words.begin(), words.end(), prefix, lex_less);
  auto cmp_hi = [&](std::span<const int> p, const Symbols& w) {
    return std::lexicographical_compare(p.begin(), p.end(), w.begin(),
                                        w.begin() + std::min(w.size(), p.size()));
  };
  auto hi = std::upper_bound(lo, words.end(), prefix, cmp_hi);
  return {static_cast<int>(lo - words.begin()), static_cast<int>(hi - words.begin())};
}

std::vector<Symbols> admissible_words(const EnvironmentModel& model, const FiberPoint& x,
                                      int length, const TruncationParams& trunc) {
  if (length < 1) throw std::invalid_argument("admissible_words: length must be >= 1");
  std::vector<Symbols> cur;
  cur.reserve(static_cast<std::size_t>(trunc.max_letter) + 1);
  for (int e = 0; e <= trunc.max_letter; ++e) cur.push_back({e});
  for (int step = 1; step < length; ++step) {
    IncidenceSlice s = matrix_at(model, advance(x, step - 1));
    std::vector<Symbols> next;
    next.reserve(cur.size() * 2);
    for (const Symbols& w : cur) {
      for (int j = 0; j <= trunc.max_letter; ++j) {
        if (s.entry(w.back(), j)) {
          Symbols v = w;
          v.push_back(j);
          next.push_back(std::move(v));
        }
      }
    }
    cur = std::move(next);
  }
  return cur;  // lexicographic by construction
}

struct ShiftContext::FiberCache {
  IncidenceSlice slice;
  std::map<int, std::vector<int>> in_sets;
  std::map<int, std::vector<int>> out_sets;
  std::map<int, std::shared_ptr<const WordSet>> word_sets;  // by length
  std::unique_ptr<TransferPlan> plan;
  double tail_weight = -1.0;
};

ShiftContext::ShiftContext(ModelSpec model, TruncationParams trunc)
    : model_(std::move(model)), trunc_(trunc) {
  if (trunc_.depth < 1 || trunc_.max_letter < 0)
    throw std::invalid_argument("truncation: need depth >= 1 and max_letter >= 0");
  if (model_.potential.depth > trunc_.depth)
    throw std::invalid_argument("truncation depth must cover the potential depth");
  // default audit sample: a handful of fibers at time zero
  audit_fibers_ = sample_fibers(model_.env, model_.env.kind == EnvKind::iid_seeded ? 3 : 1,
                                0x5eedu);
}

ShiftContext::~ShiftContext() = default;

ShiftContext::FiberCache& ShiftContext::cache(const FiberPoint& x) const {
  std::pair<std::uint64_t, std::int64_t> key{
      model_.env.kind == EnvKind::deterministic ? 0 : x.base_seed,
      model_.env.canonical_time(x.time)};
  auto it = caches_.find(key);
  if (it == caches_.end()) {
    auto c = std::make_unique<FiberCache>();
    c->slice = matrix_at(model_.env, x);
    it = caches_.emplace(key, std::move(c)).first;
  }
  return *it->second;
}

const IncidenceSlice& ShiftContext::slice(const FiberPoint& x) const { return cache(x).slice; }

const std::vector<int>& ShiftContext::in_set(const FiberPoint& x, int b) const {
  FiberCache& c = cache(x);
  auto it = c.in_sets.find(b);
  if (it == c.in_sets.end()) {
    std::vector<int> in;
    for (int e = 0; e <= trunc_.max_letter; ++e)
      if (c.slice.entry(e, b)) in.push_back(e);
    it = c.in_sets.emplace(b, std::move(in)).first;
  }
  return it->second;
}

const std::vector<int>& ShiftContext::out_set(const FiberPoint& x, int e) const {
  FiberCache& c = cache(x);
  auto it = c.out_sets.find(e);
  if (it == c.out_sets.end()) {
    std::vector<int> out;
    auto d = c.slice.out(e);
    if (d) {
      for (int j : *d)
        if (j <= trunc_.max_letter) out.push_back(j);
    } else {
      for (int j = 0; j <= trunc_.max_letter; ++j)
        if (c.slice.entry(e, j)) out.push_back(j);
    }
    it = c.out_sets.emplace(e, std::move(out)).first;
  }
  return it->second;
}

std::shared_ptr<const WordSet> ShiftContext::words(const FiberPoint& x) const {
  return words_len(x, trunc_.depth);
}

std::shared_ptr<const WordSet> ShiftContext::words_len(const FiberPoint& x, int length) const {
  FiberCache& c = cache(x);
  auto it = c.word_sets.find(length);
  if (it == c.word_sets.end()) {
    auto ws = std::make_shared<WordSet>();
    ws->length = length;
    ws->max_letter = trunc_.max_letter;
    // build through the cached out-sets rather than the raw predicate
    std::vector<Symbols> cur;
    for (int e = 0; e <= trunc_.max_letter; ++e) cur.push_back({e});
    for (int step = 1; step < length; ++step) {
      std::vector<Symbols> next;
      next.reserve(cur.size() * 2);
      FiberPoint y = advance(x, step - 1);
      for (const Symbols& w : cur) {
        for (int j : out_set(y, w.back())) {
          Symbols v = w;
          v.push_back(j);
          next.push_back(std::move(v));
        }
      }
      cur = std::move(next);
    }
    ws->words = std::move(cur);
    it = c.word_sets.emplace(length, std::move(ws)).first;
  }
  return it->second;
}

const TransferPlan& ShiftContext::plan(const FiberPoint& x) const {
  FiberCache& c = cache(x);
  if (!c.plan) {
    auto src = words(x);
    auto dst = words(advance(x, 1));
    auto p = std::make_unique<TransferPlan>();
    p->rows.resize(dst->size());
    Symbols key(static_cast<std::size_t>(trunc_.depth));
    for (std::size_t t = 0; t < dst->size(); ++t) {
      const Symbols& w = dst->words[t];
      std::copy(w.begin(), w.end() - 1, key.begin() + 1);
      for (int e : in_set(x, w.front())) {
        key[0] = e;
        int s = src->index_of(key);
        if (s < 0) continue;  // prefix died inside the window
        p->rows[t].push_back({s, weight(x, key)});
      }
    }
    c.plan = std::move(p);
  }
  return *c.plan;
}

double ShiftContext::phi(const FiberPoint& x, std::span<const int> prefix) const {
  return model_.potential.eval(x, prefix);
}

double ShiftContext::weight(const FiberPoint& x, std::span<const int> prefix) const {
  return std::exp(model_.potential.eval(x, prefix));
}

double ShiftContext::tail_weight(const FiberPoint& x) const {
  FiberCache& c = cache(x);
  if (c.tail_weight < 0.0) {
    double worst = 0.0;
    for (int b = 0; b <= trunc_.max_letter; ++b)
      worst = std::max(worst, model_.potential.bounds.column_tail(b, trunc_.max_letter));
    c.tail_weight = worst;
  }
  return c.tail_weight;
}

double ShiftContext::op_norm_bound() const {
  if (op_norm_bound_ < 0.0) {
    double bound = 0.0;
    for (const FiberPoint& x : audit_fibers_) {
      auto dst = words(advance(x, 1));
      const TransferPlan& p = plan(x);
      double sup = 0.0;
      for (std::size_t t = 0; t < dst->size(); ++t) {
        double s = 0.0;
        for (const auto& term : p.rows[t]) s += term.weight;
        sup = std::max(sup, s);
      }
      bound = std::max(bound, sup + tail_weight(x));
    }
    op_norm_bound_ = bound;
  }
  return op_norm_bound_;
}

}  // namespace rsft
