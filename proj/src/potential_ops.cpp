#include "rsft/potential_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rsft {

double birkhoff_sum(const ShiftContext& ctx, const FiberPoint& x,
                    std::span<const int> word, int n) {
  if (n < 0) throw std::invalid_argument("birkhoff_sum: n must be >= 0");
  if (static_cast<int>(word.size()) < n)
    throw std::invalid_argument("birkhoff_sum: word shorter than n");
  double s = 0.0;
  for (int j = 0; j < n; ++j)
    s += ctx.phi(advance(x, j), word.subspan(static_cast<std::size_t>(j)));
  return s;
}

nlohmann::json SummabilityReport::to_json() const {
  nlohmann::json j{{"condition", "summability"},
                   {"certified", certifiable},
                   {"strongly_summable", strongly_summable},
                   {"message", message},
                   {"z_tail", z_tail},
                   {"op_norm_bound", op_norm},
                   {"decay_threshold", decay_threshold}};
  j["z_profile"] = z_profile;
  if (strong_sum) j["strong_sum"] = *strong_sum;
  return j;
}

SummabilityReport check_summability(const ShiftContext& ctx, double decay_threshold) {
  SummabilityReport rep;
  rep.decay_threshold = decay_threshold;
  const int L = ctx.max_letter();
  const auto& bounds = ctx.model().potential.bounds;

  // Z_x(l) = sup over target words of the in-mass from letters j > l,
  // exact on the window via the transfer plan, plus the analytic column tail.
  rep.z_profile.assign(static_cast<std::size_t>(L) + 1, 0.0);
  bool tails_ok = true;
  std::vector<double> row(static_cast<std::size_t>(L) + 1, 0.0);
  for (const FiberPoint& x : ctx.audit_fibers()) {
    auto dst = ctx.words(advance(x, 1));
    const TransferPlan& plan = ctx.plan(x);
    auto src = ctx.words(x);
    for (std::size_t t = 0; t < dst->size(); ++t) {
      std::fill(row.begin(), row.end(), 0.0);
      for (const auto& term : plan.rows[t])
        row[static_cast<std::size_t>(src->words[static_cast<std::size_t>(term.source)][0])] +=
            term.weight;
      double tail = bounds.column_tail(dst->words[t][0], L);
      if (!std::isfinite(tail)) { tails_ok = false; tail = 0.0; }
      double suffix = tail;
      for (int l = L; l >= 0; --l) {
        // suffix now holds sum over j > l
        rep.z_profile[static_cast<std::size_t>(l)] =
            std::max(rep.z_profile[static_cast<std::size_t>(l)], suffix);
        suffix += row[static_cast<std::size_t>(l)];
      }
    }
    rep.z_tail = std::max(rep.z_tail, ctx.tail_weight(x));
  }
  rep.op_norm = ctx.op_norm_bound();

  auto strong_tail = bounds.upper_tail_sum(L);
  if (strong_tail) {
    double s = *strong_tail;
    for (int e = 0; e <= L; ++e) s += bounds.upper(e);
    rep.strong_sum = s;
    rep.strongly_summable = std::isfinite(s);
  } else {
    rep.strongly_summable = false;
  }

  double z0 = std::max(rep.z_profile.front(), 1e-300);
  bool decays = rep.z_profile.back() <= decay_threshold * z0;
  rep.certifiable = tails_ok && decays;
  if (!tails_ok)
    rep.message = "summability not certifiable: no summable letter-bound majorant";
  else if (!decays)
    rep.message = "summability not certified: Z profile does not decay within the window";
  else
    rep.message = "uniform summability certified on sampled fibers";
  return rep;
}

nlohmann::json DistortionReport::to_json() const {
  return {{"worst_sum_ratio", worst_sum_ratio}, {"worst_exp_ratio", worst_exp_ratio},
          {"pairs", pairs},     {"dist_const", dist_const},
          {"v_alpha", v_alpha}};
}

DistortionReport distortion_check(const ShiftContext& ctx, const FiberPoint& x, int n,
                                  int word_len) {
  if (word_len <= n) throw std::invalid_argument("distortion_check: need word_len > n");
  DistortionReport rep;
  const double alpha = ctx.model().potential.alpha;

  auto ws = ctx.words_len(x, word_len);
  const auto& words = ws->words;

  // measured variation of the potential over the same word family
  double v_alpha = 0.0;
  {
    std::vector<double> phis(words.size());
    for (std::size_t i = 0; i < words.size(); ++i) phis[i] = ctx.phi(x, words[i]);
    DepthFunction tmp(x, ws, std::move(phis));
    v_alpha = tmp.variation_alpha(alpha);
  }
  rep.v_alpha = std::max(v_alpha, ctx.model().potential.declared_variation);
  HolderParams h = HolderParams::from(alpha, rep.v_alpha);
  rep.dist_const = h.dist_const;

  // pairs sharing a prefix of length >= n: group by n-prefix
  std::size_t i = 0;
  while (i < words.size()) {
    std::size_t j = i;
    while (j < words.size() &&
           std::equal(words[i].begin(), words[i].begin() + n, words[j].begin()))
      ++j;
    for (std::size_t a = i; a < j; ++a) {
      double sa = birkhoff_sum(ctx, x, words[a], n);
      for (std::size_t b = a + 1; b < j; ++b) {
        double sb = birkhoff_sum(ctx, x, words[b], n);
        std::span<const int> ta(words[a].data() + n, words[a].size() - n);
        std::span<const int> tb(words[b].data() + n, words[b].size() - n);
        double d = shift_metric(ta, tb);
        if (d == 0.0) continue;  // identical tails: LHS is zero as well
        double rhs = rep.dist_const * rep.v_alpha * std::pow(d, alpha);
        double lhs = std::abs(sa - sb);
        double lhs_exp = std::abs(std::exp(sa - sb) - 1.0);
        if (rhs > 0.0) {
          rep.worst_sum_ratio = std::max(rep.worst_sum_ratio, lhs / rhs);
          rep.worst_exp_ratio = std::max(rep.worst_exp_ratio, lhs_exp / rhs);
        } else if (lhs > 0.0) {
          rep.worst_sum_ratio = std::numeric_limits<double>::infinity();
        }
        ++rep.pairs;
      }
    }
    i = j;
  }
  return rep;
}

}  // namespace rsft
