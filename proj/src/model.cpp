#include "rsft/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "rsft/util.hpp"

namespace rsft {

HolderParams HolderParams::from(double alpha, double v_alpha) {
  HolderParams h;
  h.alpha = alpha;
  h.v_alpha = v_alpha;
  h.dist_const = std::exp(-alpha) / (1.0 - std::exp(-alpha));
  h.ratio_bound = 1.0 + h.dist_const * v_alpha;
  return h;
}

nlohmann::json ModelSpec::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  j["environment"] = {{"kind", to_string(env.kind)}, {"period", env.period}};
  j["potential"] = {{"name", potential.name},
                    {"depth", potential.depth},
                    {"alpha", potential.alpha},
                    {"declared_variation", potential.declared_variation}};
  j["codec"] = codec.zigzag ? "zigzag" : "identity";
  j["cylinder_set"] = cylinder_set;
  j["default_truncation"] = {{"max_letter", default_trunc.max_letter},
                             {"depth", default_trunc.depth}};
  j["documented"] = documented;
  j["params"] = params;
  return j;
}

namespace {

IncidenceSlice dense_slice(std::vector<std::vector<int>> rows) {
  auto m = std::make_shared<std::vector<std::vector<int>>>(std::move(rows));
  IncidenceSlice s;
  s.entry = [m](int i, int j) {
    if (i < 0 || j < 0 || i >= static_cast<int>(m->size()) ||
        j >= static_cast<int>((*m)[0].size()))
      return false;
    return (*m)[i][j] != 0;
  };
  s.out = [m](int e) -> std::optional<std::vector<int>> {
    std::vector<int> d;
    if (e >= 0 && e < static_cast<int>(m->size()))
      for (int j = 0; j < static_cast<int>((*m)[e].size()); ++j)
        if ((*m)[e][j]) d.push_back(j);
    return d;
  };
  return s;
}

EnvironmentModel constant_env(std::vector<std::vector<int>> matrix, std::string desc) {
  EnvironmentModel env;
  env.kind = EnvKind::deterministic;
  env.description = std::move(desc);
  IncidenceSlice s = dense_slice(std::move(matrix));
  env.generate = [s](std::uint64_t, std::int64_t) { return s; };
  return env;
}

PotentialSpec constant_potential(double value, std::string name) {
  PotentialSpec p;
  p.name = std::move(name);
  p.depth = 1;
  p.alpha = 1.0;
  p.declared_variation = 0.0;
  p.eval = [value](const FiberPoint&, std::span<const int>) { return value; };
  double w = std::exp(value);
  p.bounds.lower = [w](int) { return w; };
  p.bounds.upper = [w](int) { return w; };
  // finite-alphabet models never drop letters; tails resolved by the caller
  p.bounds.upper_tail_sum = [](int) -> std::optional<double> { return std::nullopt; };
  p.bounds.column_tail = [](int, int) { return 0.0; };
  p.bounds.column_majorant = [](int) -> std::optional<double> { return std::nullopt; };
  return p;
}

void finite_alphabet_tails(PotentialSpec& p, int alphabet_size) {
  // beyond the full alphabet nothing is dropped
  double letter_sup = 0.0;
  for (int e = 0; e < alphabet_size; ++e) letter_sup += p.bounds.upper(e);
  p.bounds.upper_tail_sum = [alphabet_size, letter_sup, up = p.bounds.upper](
                                int L) -> std::optional<double> {
    double s = 0.0;
    for (int e = L + 1; e < alphabet_size; ++e) s += up(e);
    return s;
  };
  p.bounds.column_tail = [alphabet_size, up = p.bounds.upper](int, int L) {
    double s = 0.0;
    for (int e = L + 1; e < alphabet_size; ++e) s += up(e);
    return s;
  };
}

// ---- walks on Z (zig-zag encoded) ------------------------------------------

// growing walk: eta(i) = 4^{|i|}, capped so the arithmetic stays in range.
double eta_growing(std::int64_t i) {
  double a = std::abs(static_cast<double>(i));
  return a > 30 ? std::pow(4.0, 30.0) : std::pow(4.0, a);
}

struct WalkRule {
  // neighbor count at decoded site i, possibly fiber-dependent
  std::function<double(std::uint64_t, std::int64_t, std::int64_t)> eta;  // (seed,t,i)
  bool random = false;
};

IncidenceSlice walk_slice(const WalkRule& rule, const SymbolCodec& codec,
                          std::uint64_t seed, std::int64_t t) {
  auto eta = rule.eta;
  IncidenceSlice s;
  s.entry = [eta, codec, seed, t](int i, int j) {
    if (i < 0 || j < 0) return false;
    std::int64_t di = codec.decode(i), dj = codec.decode(j);
    return std::abs(static_cast<double>(di - dj)) <= eta(seed, t, di);
  };
  s.out = [eta, codec, seed, t](int e) -> std::optional<std::vector<int>> {
    if (e < 0) return std::vector<int>{};
    std::int64_t de = codec.decode(e);
    double h = eta(seed, t, de);
    if (h > 1e6) return std::nullopt;  // out-set too large to enumerate
    std::int64_t lo = de - static_cast<std::int64_t>(h);
    std::int64_t hi = de + static_cast<std::int64_t>(h);
    std::vector<int> d;
    d.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (std::int64_t j = lo; j <= hi; ++j) d.push_back(codec.encode(j));
    std::sort(d.begin(), d.end());
    return d;
  };
  return s;
}

}  // namespace

std::vector<std::string> builtin_names() {
  return {"full2",        "golden_mean",          "periodic2", "nn_walk",
          "growing_walk", "sparse_deterministic", "random_eta"};
}

ModelSpec builtin(const std::string& name, const nlohmann::json& params) {
  ModelSpec m;
  m.name = name;
  m.params = params;

  if (name == "full2") {
    m.env = constant_env({{1, 1}, {1, 1}}, "full shift on two letters");
    m.potential = constant_potential(std::log(0.5), "log_half");
    finite_alphabet_tails(m.potential, 2);
    m.cylinder_set = {0, 1};
    m.default_trunc = {1, 3};
    m.documented = {{"mixing", true},        {"finite_range", true}, {"bounded_access", true},
                    {"summable", true},      {"condition_A", true},  {"condition_B", false},
                    {"condition_C", true},   {"fine", false}};
    OracleData o;
    o.lambda = {1.0};
    o.nu = {{0.5, 0.5}};
    o.rho = {{1.0, 1.0}};
    o.theta = 0.0;  // rank one; deviations vanish at depth saturation
    m.oracle = o;
    return m;
  }

  if (name == "golden_mean") {
    m.env = constant_env({{1, 1}, {1, 0}}, "golden mean shift");
    m.potential = constant_potential(0.0, "zero");
    finite_alphabet_tails(m.potential, 2);
    m.cylinder_set = {0, 1};
    m.default_trunc = {1, 3};
    m.documented = {{"mixing", true},        {"finite_range", true}, {"bounded_access", true},
                    {"summable", true},      {"condition_A", true},  {"condition_B", false},
                    {"condition_C", true},   {"fine", false}};
    const double g = (1.0 + std::sqrt(5.0)) / 2.0;
    OracleData o;
    o.lambda = {g};
    o.nu = {{1.0 / g, 1.0 / (g * g)}};
    // right eigenvector (g,1) scaled so that the nu-integral is one
    double z = g * (1.0 / g) + 1.0 / (g * g);
    o.rho = {{g / z, 1.0 / z}};
    o.theta = (3.0 - std::sqrt(5.0)) / 2.0;
    m.oracle = o;
    return m;
  }

  if (name == "periodic2") {
    // alternates two primitive 3-letter matrices; the 2-step products have
    // spectrum {2+sqrt(5), 1, ...} so the per-step rate is (2+sqrt(5))^{-1/2}
    std::vector<std::vector<int>> a_even = {{1, 1, 0}, {1, 0, 1}, {1, 1, 1}};
    std::vector<std::vector<int>> a_odd = {{1, 1, 1}, {1, 0, 0}, {0, 1, 0}};
    IncidenceSlice se = dense_slice(a_even), so = dense_slice(a_odd);
    m.env.kind = EnvKind::periodic;
    m.env.period = 2;
    m.env.description = "period-2 alternation of two 3-letter shifts";
    m.env.generate = [se, so](std::uint64_t, std::int64_t t) { return t == 0 ? se : so; };
    m.potential = constant_potential(0.0, "zero");
    finite_alphabet_tails(m.potential, 3);
    m.cylinder_set = {0, 1, 2};
    m.default_trunc = {2, 3};
    m.documented = {{"mixing", true},        {"finite_range", true}, {"bounded_access", true},
                    {"summable", true},      {"condition_A", true},  {"condition_B", false},
                    {"condition_C", true},   {"fine", false}};
    m.oracle = std::nullopt;  // reference data derived in tests by power iteration
    return m;
  }

  if (name == "nn_walk") {
    std::int64_t eta = params.value("eta", 1);
    if (eta < 1) throw std::invalid_argument("nn_walk: eta must be >= 1");
    int window = params.value("window", 8);  // decoded |i| <= window
    m.codec.zigzag = true;
    WalkRule rule;
    rule.eta = [eta](std::uint64_t, std::int64_t, std::int64_t) {
      return static_cast<double>(eta);
    };
    SymbolCodec codec = m.codec;
    m.env.kind = EnvKind::deterministic;
    m.env.description = "nearest-neighbor walk, eta=" + std::to_string(eta);
    m.env.generate = [rule, codec](std::uint64_t s, std::int64_t t) {
      return walk_slice(rule, codec, s, t);
    };
    double p = 1.0 / (2.0 * static_cast<double>(eta) + 1.0);
    m.potential = constant_potential(std::log(p), "log_p_uniform");
    // constant letter weights: sum over e > L of C_e diverges
    m.potential.bounds.upper_tail_sum = [](int) -> std::optional<double> { return std::nullopt; };
    m.potential.bounds.column_majorant = [p, eta](int) -> std::optional<double> {
      return (2.0 * static_cast<double>(eta) + 1.0) * p;
    };
    m.potential.bounds.column_tail = [p, eta, codec](int b, int L) {
      // dropped in-letters of column b: those j with |j - b| <= eta, encoded > L
      std::int64_t db = codec.decode(b);
      double s = 0.0;
      for (std::int64_t j = db - eta; j <= db + eta; ++j)
        if (codec.encode(j) > L) s += p;
      return s;
    };
    m.cylinder_set = {codec.encode(-1), codec.encode(0), codec.encode(1)};
    std::sort(m.cylinder_set.begin(), m.cylinder_set.end());
    m.default_trunc = {2 * window, 3};
    m.documented = {{"mixing", true},       {"finite_range", true},
                    {"bounded_access", true}, {"summable", false},
                    {"condition_A", true},  {"condition_B", false},
                    {"condition_C", false}, {"fine", false}};
    return m;
  }

  if (name == "growing_walk" || name == "random_eta") {
    double beta = params.value("beta", 1.0);
    if (beta <= 0.0 || beta > 4.0)
      throw std::invalid_argument(name + ": beta outside documented range (0,4]");
    int window = params.value("window", 8);
    m.codec.zigzag = true;
    SymbolCodec codec = m.codec;

    WalkRule rule;
    if (name == "growing_walk") {
      rule.eta = [](std::uint64_t, std::int64_t, std::int64_t i) { return eta_growing(i); };
      m.env.kind = EnvKind::deterministic;
      m.env.description = "walk with eta(i)=4^|i|";
    } else {
      // eta_x(i) uniform on {4^|i|, 2*4^|i|}, counter-seeded per (fiber,i)
      rule.random = true;
      rule.eta = [](std::uint64_t seed, std::int64_t t, std::int64_t i) {
        double base = eta_growing(i);
        std::uint64_t h = hash_mix(seed, static_cast<std::uint64_t>(t) ^ 0x9e37ULL,
                                   static_cast<std::uint64_t>(i + (1LL << 32)));
        return (h & 1ULL) ? 2.0 * base : base;
      };
      m.env.kind = EnvKind::iid_seeded;
      m.env.description = "walk with random eta_x(i) in {4^|i|, 2*4^|i|}";
    }
    m.env.generate = [rule, codec](std::uint64_t s, std::int64_t t) {
      return walk_slice(rule, codec, s, t);
    };

    PotentialSpec p;
    p.name = "beta_log_p";
    p.depth = 1;
    p.alpha = 1.0;
    p.declared_variation = 0.0;
    auto eta = rule.eta;
    p.eval = [beta, eta, codec](const FiberPoint& x, std::span<const int> w) {
      std::int64_t i = codec.decode(w[0]);
      return beta * std::log(1.0 / (2.0 * eta(x.base_seed, x.time, i) + 1.0));
    };
    // weight bounds: eta may be doubled at random, shrinking p_i
    p.bounds.upper = [beta, codec](int e) {
      double h = eta_growing(codec.decode(e));
      return std::pow(1.0 / (2.0 * h + 1.0), beta);
    };
    p.bounds.lower = [beta, codec, random = rule.random](int e) {
      double h = eta_growing(codec.decode(e));
      if (random) h *= 2.0;
      return std::pow(1.0 / (2.0 * h + 1.0), beta);
    };
    p.bounds.upper_tail_sum = [beta, codec](int L) -> std::optional<double> {
      // sum of (2*4^k+1)^{-beta} over decoded |i| with encode(i) > L
      double s = 0.0;
      for (int e = L + 1; e <= L + 300; ++e) {
        double h = eta_growing(codec.decode(e));
        double term = std::pow(1.0 / (2.0 * h + 1.0), beta);
        s += term;
        if (term < 1e-300) break;
      }
      return s;
    };
    p.bounds.column_tail = [up = p.bounds.upper_tail_sum](int, int L) {
      return up(L).value();  // all dropped letters can feed a column
    };
    p.bounds.column_majorant = [beta, codec](int b) -> std::optional<double> {
      // letters e reach column j only when |j - e| <= 2*4^{|e|}; sum the
      // C-bounds over the levels that can reach
      double aj = std::abs(static_cast<double>(codec.decode(b)));
      int kmin = 0;
      while (2.0 * std::pow(4.0, kmin) + kmin < aj && kmin < 64) ++kmin;
      double s = 0.0;
      for (int k = kmin; k < kmin + 200; ++k) {
        double c = std::pow(1.0 / (2.0 * std::pow(4.0, k) + 1.0), beta);
        double mult = k == 0 ? 1.0 : 2.0;
        s += mult * c;
        if (c < 1e-300) break;
      }
      return s;
    };
    m.potential = p;

    m.cylinder_set = {codec.encode(-1), codec.encode(0), codec.encode(1)};
    std::sort(m.cylinder_set.begin(), m.cylinder_set.end());
    m.default_trunc = {2 * window, 3};
    m.documented = {{"mixing", true},        {"finite_range", true}, {"bounded_access", true},
                    {"summable", true},      {"condition_A", true},  {"condition_B", true},
                    {"condition_C", true},   {"fine", true}};
    return m;
  }

  if (name == "sparse_deterministic") {
    // A_{1,0} = 1; for j >= 1, A_{ij} = 1 iff i = (j-1) + n^{j+1} for some n.
    IncidenceSlice s;
    s.entry = [](int i, int j) {
      if (i < 0 || j < 0) return false;
      if (j == 0) return i == 1;
      // i - (j-1) must be a perfect (j+1)-th power
      std::int64_t r = static_cast<std::int64_t>(i) - (j - 1);
      if (r < 0) return false;
      if (r == 0 || r == 1) return true;  // n = 0 or 1
      double est = std::pow(static_cast<double>(r), 1.0 / (j + 1));
      for (std::int64_t n = std::max<std::int64_t>(1, static_cast<std::int64_t>(est) - 1);
           n <= static_cast<std::int64_t>(est) + 1; ++n) {
        std::int64_t pw = 1;
        bool over = false;
        for (int k = 0; k < j + 1; ++k) {
          pw *= n;
          if (pw > r) { over = true; break; }
        }
        if (!over && pw == r) return true;
      }
      return false;
    };
    s.out = [entry = s.entry](int e) -> std::optional<std::vector<int>> {
      // j = e+1 always follows (n = 0); the remaining successors are j <= e
      std::vector<int> d;
      if (e == 1) d.push_back(0);
      for (int j = 1; j <= e; ++j)
        if (entry(e, j)) d.push_back(j);
      d.push_back(e + 1);
      std::sort(d.begin(), d.end());
      d.erase(std::unique(d.begin(), d.end()), d.end());
      return d;
    };
    m.env.kind = EnvKind::deterministic;
    m.env.description = "sparse deterministic shift with power-law columns";
    m.env.generate = [s](std::uint64_t, std::int64_t) { return s; };

    PotentialSpec p;
    p.name = "neg_log_1p";
    p.depth = 1;
    p.alpha = 1.0;
    p.declared_variation = 0.0;
    p.eval = [](const FiberPoint&, std::span<const int> w) {
      return -std::log(1.0 + static_cast<double>(w[0]));
    };
    p.bounds.lower = [](int e) { return 1.0 / (1.0 + e); };
    p.bounds.upper = [](int e) { return 1.0 / (1.0 + e); };
    p.bounds.upper_tail_sum = [](int) -> std::optional<double> {
      return std::nullopt;  // harmonic series
    };
    p.bounds.column_majorant = [](int b) -> std::optional<double> {
      if (b == 0) return 0.5;
      // n = 0, 1 give 1/b and 1/(b+1); n >= 2 contribute below 2^-(b+1) each
      double s = 1.0 / b + 1.0 / (b + 1.0);
      double start = std::pow(2.0, b + 1.0);
      s += 2.0 / start;  // crude cover of the n >= 2 terms
      return s;
    };
    p.bounds.column_tail = [](int b, int L) {
      // in-letters of column b beyond L: i = (b-1) + n^{b+1} > L
      if (b == 0) return L >= 1 ? 0.0 : 0.5;
      double q = static_cast<double>(L) - (b - 1);
      double n0 = q <= 0 ? 0.0 : std::pow(q, 1.0 / (b + 1));
      double start = std::floor(n0) + 1.0;
      // sum_{n >= start} 1/(b + n^{b+1}) <= start^-(b+1) + start^-b / b
      return std::pow(start, -(b + 1.0)) + std::pow(start, -static_cast<double>(b)) / b;
    };
    m.potential = p;

    m.cylinder_set = {0, 1};
    m.default_trunc = {params.value("max_letter", 400), 2};
    m.documented = {{"mixing", true},        {"finite_range", true}, {"bounded_access", true},
                    {"summable", true},      {"condition_A", true},  {"condition_B", true},
                    {"condition_C", false},  {"fine", false}};
    return m;
  }

  throw std::invalid_argument("unknown builtin model: " + name);
}

namespace {

// weighted letter matrix row j, column e: A_{e j}(phase) exp(phi(e))
std::vector<std::vector<double>> letter_matrix(const ModelSpec& m, int phase, int n_letters) {
  FiberPoint x{0, phase};
  IncidenceSlice s = matrix_at(m.env, x);
  std::vector<std::vector<double>> mat(static_cast<std::size_t>(n_letters),
                                       std::vector<double>(static_cast<std::size_t>(n_letters), 0.0));
  for (int e = 0; e < n_letters; ++e) {
    int w[1] = {e};
    double weight = std::exp(m.potential.eval(x, std::span<const int>(w, 1)));
    for (int j = 0; j < n_letters; ++j)
      if (s.entry(e, j)) mat[static_cast<std::size_t>(j)][static_cast<std::size_t>(e)] = weight;
  }
  return mat;
}

void mat_vec(const std::vector<std::vector<double>>& m, const std::vector<double>& v,
             std::vector<double>* out) {
  out->assign(m.size(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) (*out)[i] += m[i][j] * v[j];
}

void vec_mat(const std::vector<double>& v, const std::vector<std::vector<double>>& m,
             std::vector<double>* out) {
  out->assign(m.size(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) (*out)[j] += v[i] * m[i][j];
}

}  // namespace

bool verify_oracle(const ModelSpec& m, double tol, std::string* message) {
  if (!m.oracle) return true;
  const int n = m.default_trunc.max_letter + 1;
  auto mat = letter_matrix(m, 0, n);
  std::vector<double> right(static_cast<std::size_t>(n), 1.0), left(static_cast<std::size_t>(n), 1.0), tmp;
  for (int it = 0; it < 2000; ++it) {
    mat_vec(mat, right, &tmp);
    right.swap(tmp);
    double sr = std::accumulate(right.begin(), right.end(), 0.0);
    for (double& v : right) v /= sr;
    vec_mat(left, mat, &tmp);
    left.swap(tmp);
    double sl = std::accumulate(left.begin(), left.end(), 0.0);
    for (double& v : left) v /= sl;
  }
  mat_vec(mat, right, &tmp);
  double lambda = std::accumulate(tmp.begin(), tmp.end(), 0.0);
  const OracleData& o = *m.oracle;
  auto fail = [&](const std::string& why) {
    if (message) *message = why;
    return false;
  };
  if (std::abs(lambda - o.lambda[0]) > tol) return fail("oracle lambda mismatch");
  for (int e = 0; e < n; ++e)
    if (std::abs(left[static_cast<std::size_t>(e)] - o.nu[0][static_cast<std::size_t>(e)]) > tol)
      return fail("oracle nu mismatch at letter " + std::to_string(e));
  // rho normalized so that the nu-integral is one
  double z = 0.0;
  for (int e = 0; e < n; ++e) z += right[static_cast<std::size_t>(e)] * left[static_cast<std::size_t>(e)];
  for (int e = 0; e < n; ++e) {
    double rho = right[static_cast<std::size_t>(e)] / z;
    if (std::abs(rho - o.rho[0][static_cast<std::size_t>(e)]) > tol)
      return fail("oracle rho mismatch at letter " + std::to_string(e));
  }
  if (message) *message = "oracle eigendata verified";
  return true;
}

PotentialSpec potential_from_csv(const std::string& path, double alpha) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open potential CSV: " + path);
  auto table = std::make_shared<std::map<Symbols, double>>();
  int depth = -1;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::vector<double> cells;
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(std::stod(cell));
    if (cells.size() < 2) throw std::runtime_error("potential CSV row too short");
    Symbols w(cells.size() - 1);
    for (std::size_t i = 0; i + 1 < cells.size(); ++i) w[i] = static_cast<int>(cells[i]);
    if (depth < 0) depth = static_cast<int>(w.size());
    if (depth != static_cast<int>(w.size()))
      throw std::runtime_error("potential CSV rows have mixed depths");
    (*table)[w] = cells.back();
  }
  if (table->empty()) throw std::runtime_error("potential CSV is empty");

  PotentialSpec p;
  p.name = "tabular:" + path;
  p.depth = depth;
  p.alpha = alpha;
  p.eval = [table, depth](const FiberPoint&, std::span<const int> w) {
    Symbols key(w.begin(), w.begin() + std::min<std::size_t>(w.size(), depth));
    // shorter prefixes take the sup over stored completions
    if (static_cast<int>(key.size()) == depth) {
      auto it = table->find(key);
      if (it != table->end()) return it->second;
    }
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& [k, v] : *table)
      if (std::equal(key.begin(), key.end(), k.begin())) best = std::max(best, v);
    if (best == -std::numeric_limits<double>::infinity())
      throw std::runtime_error("tabular potential: prefix not covered");
    return best;
  };
  double worst = 0.0;
  std::map<int, std::pair<double, double>> per_letter;
  for (const auto& [k, v] : *table) {
    auto [it, fresh] = per_letter.emplace(k[0], std::make_pair(v, v));
    if (!fresh) {
      it->second.first = std::min(it->second.first, v);
      it->second.second = std::max(it->second.second, v);
    }
    worst = std::max(worst, std::abs(v));
  }
  auto pl = std::make_shared<std::map<int, std::pair<double, double>>>(std::move(per_letter));
  p.bounds.lower = [pl](int e) {
    auto it = pl->find(e);
    return it == pl->end() ? 0.0 : std::exp(it->second.first);
  };
  p.bounds.upper = [pl](int e) {
    auto it = pl->find(e);
    return it == pl->end() ? 0.0 : std::exp(it->second.second);
  };
  p.bounds.upper_tail_sum = [pl](int L) -> std::optional<double> {
    double s = 0.0;
    for (const auto& [e, b] : *pl)
      if (e > L) s += std::exp(b.second);
    return s;  // tabular alphabets are finite
  };
  p.bounds.column_tail = [up = p.bounds.upper_tail_sum](int, int L) { return up(L).value(); };
  p.bounds.column_majorant = [](int) -> std::optional<double> { return std::nullopt; };
  // variation upper bound: largest value spread (distance factor <= e^alpha * range)
  p.declared_variation = 2.0 * worst * std::exp(alpha * depth);
  return p;
}

}  // namespace rsft
