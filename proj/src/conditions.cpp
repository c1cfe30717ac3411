#include "rsft/conditions.hpp"

#include <algorithm>

namespace rsft {

nlohmann::json CertificationBounds::to_json() const {
  return {{"max_letter", max_letter}, {"horizon", horizon}, {"fibers", fibers},
          {"uniformity", uniformity}};
}

nlohmann::json FiniteRangeReport::to_json() const {
  nlohmann::json j{{"condition", "finite_range"}, {"certified", certified},
                   {"message", message}, {"bounds", bounds.to_json()}};
  nlohmann::json ds = nlohmann::json::object();
  for (const auto& [e, d] : out_sets) ds[std::to_string(e)] = d;
  j["witnesses"] = {{"out_sets", ds}};
  nlohmann::json lh = nlohmann::json::object();
  for (const auto& [l, v] : level_hat) lh[std::to_string(l)] = v;
  j["witnesses"]["level_hat"] = lh;
  return j;
}

nlohmann::json BoundedAccessReport::to_json() const {
  nlohmann::json j{{"condition", "bounded_access"}, {"certified", certified},
                   {"message", message}, {"bounds", bounds.to_json()}};
  nlohmann::json bs = nlohmann::json::object();
  for (const auto& [b, v] : b_star) bs[std::to_string(b)] = v;
  j["witnesses"] = {{"b_star", bs}};
  return j;
}

nlohmann::json MixingReport::to_json() const {
  return {{"condition", "mixing"}, {"certified", certified}, {"message", message},
          {"bounds", bounds.to_json()}, {"witnesses", {{"a", a}, {"b", b}, {"N", n_mix}}}};
}

namespace {

CertificationBounds make_bounds(const ShiftContext& ctx, int horizon) {
  CertificationBounds b;
  b.max_letter = ctx.max_letter();
  b.horizon = horizon;
  b.fibers = static_cast<int>(ctx.audit_fibers().size());
  b.uniformity = ctx.model().env.kind == EnvKind::iid_seeded ? "sampled" : "exact";
  return b;
}

}  // namespace

FiniteRangeReport check_finite_range(const ShiftContext& ctx, const std::vector<int>& letters,
                                     int scan_bound) {
  FiniteRangeReport rep;
  rep.bounds = make_bounds(ctx, 0);
  rep.certified = true;
  for (int e : letters) {
    std::vector<int> d;
    for (const FiberPoint& x : ctx.audit_fibers()) {
      auto out = ctx.slice(x).out(e);
      if (!out) {
        rep.certified = false;
        rep.message = "finite range not certified at scan bound for letter " +
                      std::to_string(e);
        continue;
      }
      for (int j : *out) {
        if (j > scan_bound) {
          rep.certified = false;
          rep.message = "out-set exceeds scan bound for letter " + std::to_string(e);
          break;
        }
        d.push_back(j);
      }
    }
    std::sort(d.begin(), d.end());
    d.erase(std::unique(d.begin(), d.end()), d.end());
    rep.out_sets[e] = std::move(d);
  }
  // level chain: l^ = max over a <= l of max D_a (within certified letters)
  for (int l : letters) {
    int lh = 0;
    bool ok = true;
    for (int a = 0; a <= l; ++a) {
      auto it = rep.out_sets.find(a);
      if (it == rep.out_sets.end()) {
        // letters below l that were not requested: enumerate on demand
        std::vector<int> d;
        for (const FiberPoint& x : ctx.audit_fibers()) {
          auto out = ctx.slice(x).out(a);
          if (!out) { ok = false; break; }
          d.insert(d.end(), out->begin(), out->end());
        }
        if (!ok) break;
        it = rep.out_sets.emplace(a, std::move(d)).first;
        std::sort(it->second.begin(), it->second.end());
        it->second.erase(std::unique(it->second.begin(), it->second.end()), it->second.end());
      }
      if (!it->second.empty()) lh = std::max(lh, it->second.back());
    }
    if (ok) rep.level_hat[l] = lh;
  }
  if (rep.certified) rep.message = "finite range certified on sampled fibers";
  return rep;
}

BoundedAccessReport check_bounded_access(const ShiftContext& ctx, const std::vector<int>& letters,
                                         int scan_bound) {
  BoundedAccessReport rep;
  rep.bounds = make_bounds(ctx, 0);
  rep.certified = true;
  int bound = std::min(scan_bound, ctx.max_letter());
  for (int b : letters) {
    int worst = -1;
    for (const FiberPoint& x : ctx.audit_fibers()) {
      const IncidenceSlice& s = ctx.slice(x);
      int a = -1;
      for (int cand = 0; cand <= bound; ++cand)
        if (s.entry(cand, b)) { a = cand; break; }
      if (a < 0) {
        rep.certified = false;
        rep.message = "bounded access not certified: no predecessor of letter " +
                      std::to_string(b) + " below scan bound";
        worst = -1;
        break;
      }
      worst = std::max(worst, a);
    }
    if (worst >= 0) rep.b_star[b] = worst;
  }
  if (rep.certified) rep.message = "bounded access certified on sampled fibers";
  return rep;
}

MixingReport mixing_n(const ShiftContext& ctx, int a, int b, int horizon) {
  MixingReport rep;
  rep.a = a;
  rep.b = b;
  rep.bounds = make_bounds(ctx, horizon);
  const int L = ctx.max_letter();
  int worst = -1;
  bool fail = false;
  for (const FiberPoint& x : ctx.audit_fibers()) {
    // reach[t][j]: reachable from a in exactly t steps along the orbit of x
    std::vector<char> cur(static_cast<std::size_t>(L) + 1, 0), nxt;
    if (a <= L) cur[static_cast<std::size_t>(a)] = 1;
    // word a w b with |w| = n+1 means n+2 transitions; track hits at b
    std::vector<char> ok(static_cast<std::size_t>(horizon) + 1, 0);
    for (int t = 1; t <= horizon + 2; ++t) {
      nxt.assign(static_cast<std::size_t>(L) + 1, 0);
      FiberPoint y = advance(x, t - 1);
      for (int e = 0; e <= L; ++e) {
        if (!cur[static_cast<std::size_t>(e)]) continue;
        for (int j : ctx.out_set(y, e)) nxt[static_cast<std::size_t>(j)] = 1;
      }
      cur.swap(nxt);
      int n = t - 2;  // interior word length n+1
      if (n >= 0 && n <= horizon && b <= L && cur[static_cast<std::size_t>(b)])
        ok[static_cast<std::size_t>(n)] = 1;
    }
    // least N with ok for all n in [N, horizon]
    int n_fiber = -1;
    for (int n = horizon; n >= 0; --n) {
      if (!ok[static_cast<std::size_t>(n)]) break;
      n_fiber = n;
    }
    if (n_fiber < 0) { fail = true; break; }
    worst = std::max(worst, n_fiber);
  }
  if (fail || worst < 0) {
    rep.certified = false;
    rep.n_mix = -1;
    rep.message = "mixing not certified at horizon";
  } else {
    rep.certified = true;
    rep.n_mix = worst;
    rep.message = "mixing certified on sampled fibers";
  }
  return rep;
}

int mixing_bound(const ShiftContext& ctx, const std::vector<int>& from,
                 const std::vector<int>& to, int horizon) {
  int worst = -1;
  for (int a : from)
    for (int b : to) {
      MixingReport r = mixing_n(ctx, a, b, horizon);
      if (!r.certified) return -1;
      worst = std::max(worst, r.n_mix);
    }
  return worst;
}

}  // namespace rsft
