#include <cmath>
#include <numeric>
#include <sstream>

#include "internal.hpp"
#include "sca/core.hpp"

namespace sca {

namespace {

double approx(const Rational& r) { return r.get_d(); }

// Rough crossover for error messages when K is beyond the exact search.
double estimate_k(double log_beta, double e, const Threshold& th) {
  auto holds = [&](double m) {
    double v = approx(th.theta) + approx(th.c) / std::pow(m + 1, th.d);
    return e * std::log(v) > m * log_beta;
  };
  double hi = 1;
  while (!holds(hi) && hi < 1e300) hi *= 2;
  double lo = hi / 2;
  for (int i = 0; i < 200 && hi - lo > 1; ++i) {
    double mid = (lo + hi) / 2;
    (holds(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace

std::uint64_t superexponential_bound(std::size_t q_size, std::size_t r_size, int ell,
                                     const Threshold& th, const Budget& budget) {
  if (th.kind != Threshold::Kind::Superexponential)
    throw ShapeError("superexponential_bound needs a superexponential threshold");
  const auto l = static_cast<std::uint64_t>(ell);
  const std::uint64_t r_ell = checked_pow(r_size, l), q_ell = checked_pow(q_size, l);
  if (r_ell == UINT64_MAX || q_ell == UINT64_MAX || q_ell > (UINT64_MAX / l) - l)
    throw ResourceExhausted("superexponential_bound: |R|^l or |Q|^l overflows");
  const Rational beta = 1 - Rational(1, r_ell);
  const unsigned long e = l * (l + q_ell);
  if (beta == 0) return 0;
  const std::uint64_t cap = budget.max_period;

  // ϑ(m)^e > β^m, i.e. ϑ(m) > μ^m.
  auto holds = [&](std::uint64_t m) { return pow(th.at(m), e) > pow(beta, m); };
  // A predicate true on [m*, ∞) after which `holds` is monotone.
  std::function<bool(std::uint64_t)> settled;
  if (th.theta > 0) {
    const Rational floor_e = pow(th.theta, e);
    settled = [&, floor_e](std::uint64_t m) { return pow(beta, m) <= floor_e; };
  } else {
    const unsigned long de = e * th.d;
    settled = [&, de](std::uint64_t m) {
      return holds(m) && pow(Rational(Integer(static_cast<unsigned long>(m + 1)),
                                      Integer(static_cast<unsigned long>(m + 2))),
                             de) >= beta;
    };
  }
  auto too_big = [&] {
    std::ostringstream os;
    os << "superexponential_bound: K ~ "
       << static_cast<std::uint64_t>(estimate_k(std::log(approx(beta)), static_cast<double>(e), th))
       << " exceeds budget " << cap;
    throw ResourceExhausted(os.str());
  };
  std::uint64_t hi = 1;
  while (!settled(hi)) {
    if (hi >= cap) too_big();
    hi = std::min(cap, hi * 2);
  }
  std::uint64_t lo = hi / 2;  // settled(lo) false or lo == 0
  while (hi - lo > 1) {
    std::uint64_t mid = lo + (hi - lo) / 2;
    (settled(mid) ? hi : lo) = mid;
  }
  // Every m >= hi holds; walk down while it keeps holding.
  std::uint64_t k = hi - 1;
  while (k >= 1 && holds(k)) --k;
  return k;
}

namespace {

struct Search {
  const Sca& c;
  Symbol x, y, z;
  const Threshold& th;
  const Budget& budget;
  std::uint64_t nq, nr, k, ell, states;
  std::vector<bool> det;

  Search(const Sca& canon, Symbol x_, Symbol y_, Symbol z_, const Threshold& t, const Budget& b)
      : c(canon), x(x_), y(y_), z(z_), th(t), budget(b) {
    nq = c.states().size();
    nr = c.random().size();
    k = static_cast<std::uint64_t>(c.radius());
    ell = 2 * k + 1;
    states = checked_pow(nr, 2 * k);
    require_within(states, budget.max_table, "random context states");
    det.assign(c.q_words(), true);
    for (std::uint64_t q = 0; q < c.q_words(); ++q)
      for (std::uint64_t r = 1; r < c.r_words(); ++r)
        if (c.at(q, r) != c.at(q, 0)) {
          det[q] = false;
          break;
        }
  }

  std::vector<Integer> step(const std::vector<Integer>& dp, std::uint64_t widx, Symbol target) const {
    std::vector<Integer> out(states, 0);
    for (std::uint64_t s = 0; s < states; ++s) {
      if (dp[s] == 0) continue;
      for (std::uint64_t r = 0; r < nr; ++r) {
        std::uint64_t ri = s * nr + r;
        if (c.at(widx, ri) == target) out[ri % states] += dp[s];
      }
    }
    return out;
  }

  Rational prob(const std::vector<Integer>& dp, std::uint64_t outputs) const {
    Integer sum = std::accumulate(dp.begin(), dp.end(), Integer(0));
    return make_rational(sum, pow(Integer(static_cast<unsigned long>(nr)), outputs + 2 * k));
  }

  std::uint64_t window_at(const Symbols& u, std::uint64_t o) const {
    return word_index(u.data() + o, ell, nq);
  }

  static Symbols pumped(const Symbols& u, std::uint64_t i, std::uint64_t j, std::uint64_t k,
                        std::uint64_t extra) {
    Symbols out(u.begin(), u.begin() + static_cast<std::ptrdiff_t>(j + 2 * k));
    for (std::uint64_t t = 0; t < extra; ++t)
      out.insert(out.end(), u.begin() + static_cast<std::ptrdiff_t>(i + 2 * k),
                 u.begin() + static_cast<std::ptrdiff_t>(j + 2 * k));
    out.insert(out.end(), u.begin() + static_cast<std::ptrdiff_t>(j + 2 * k), u.end());
    return out;
  }

  // Smallest n' with ϑ(n') < p, for θ < p.
  std::uint64_t crossover(const Rational& p) const {
    Rational xr = th.c / (p - th.theta);
    Integer f = xr.get_num() / xr.get_den();
    Integer r;
    mpz_root(r.get_mpz_t(), f.get_mpz_t(), th.d);
    Integer m = r + 1;  // least integer with m^d > xr
    if (!m.fits_ulong_p()) throw ResourceExhausted("ppt_decide_sca: pump length overflows");
    return m.get_ui() - 1;
  }

  // Deterministic loop in the y-zone of u whose pumping keeps p; the witness
  // has enough pumps to beat ϑ.
  std::optional<PptWitness> pump(const Symbols& u, std::uint64_t n, const Rational& p) const {
    for (std::uint64_t i = 1; i <= n; ++i) {
      for (std::uint64_t j = i + 1; j <= n + 1 && det[window_at(u, j - 1)]; ++j) {
        if (!std::equal(u.begin() + static_cast<std::ptrdiff_t>(i),
                        u.begin() + static_cast<std::ptrdiff_t>(i + 2 * k),
                        u.begin() + static_cast<std::ptrdiff_t>(j)))
          continue;
        const std::uint64_t period = j - i;
        bool stable = true;
        for (std::uint64_t extra : {1, 2})
          if (pattern_probability(c, pumped(u, i, j, k, extra), x, y, z) != p) stable = false;
        if (!stable) continue;
        // Blocks of `reps` periods end with the anchor.
        const std::uint64_t reps = period >= 2 * k ? 1 : (2 * k + period - 1) / period;
        const std::uint64_t target = crossover(p);
        std::uint64_t extra = target > n ? (target - n + period - 1) / period : 1;
        extra = std::max<std::uint64_t>(extra, 1);
        while ((extra + 1) % reps != 0) ++extra;

        LoopWitness lw;
        lw.prefix.assign(u.begin(), u.begin() + static_cast<std::ptrdiff_t>(i));
        lw.anchor.assign(u.begin() + static_cast<std::ptrdiff_t>(i),
                         u.begin() + static_cast<std::ptrdiff_t>(i + 2 * k));
        for (std::uint64_t t = 0; t < reps; ++t)
          lw.loop.insert(lw.loop.end(), u.begin() + static_cast<std::ptrdiff_t>(i + 2 * k),
                         u.begin() + static_cast<std::ptrdiff_t>(j + 2 * k));
        lw.loop.resize(lw.loop.size() - 2 * k);
        lw.suffix.assign(u.begin() + static_cast<std::ptrdiff_t>(j + 2 * k), u.end());
        lw.pumps = (extra + 1) / reps;

        PptWitness w;
        w.n = n + extra * period;
        w.threshold = th.at(w.n);
        w.probability = p;
        if (lw.length() <= budget.max_period) {
          w.window = lw.word();
          w.probability = pattern_probability(c, w.window, x, y, z);
          if (w.probability <= w.threshold) continue;
        }
        w.loop = lw;
        return w;
      }
    }
    return std::nullopt;
  }
};

}  // namespace

PptResult ppt_decide_sca(const Sca& a, Symbol x, Symbol y, Symbol z, const Threshold& th,
                         const Budget& budget) {
  check_ppt_instance(a, x, y, z);
  if (th.kind != Threshold::Kind::Superexponential)
    throw ShapeError("ppt_decide_sca needs a superexponential threshold");
  const Sca c = canonicalize(a, budget);
  Search s(c, x, y, z, th, budget);
  PptResult res;
  const std::uint64_t big_k = superexponential_bound(s.nq, s.nr, static_cast<int>(s.ell), th, budget);
  res.k_bound = big_k;
  const std::uint64_t q_ell = checked_pow(s.nq, s.ell);
  const std::uint64_t n_max = big_k + q_ell + 2 * s.k + 1;
  require_within(n_max, budget.max_period, "PPT window length");

  struct Frame {
    std::vector<Integer> dp;
    Symbol next = 0;
  };
  std::vector<Frame> stack;
  stack.push_back({std::vector<Integer>(s.states, 1), 0});
  Symbols u;
  std::uint64_t nodes = 0;
  while (!stack.empty()) {
    if (stack.back().next == s.nq) {
      stack.pop_back();
      if (!u.empty()) u.pop_back();
      continue;
    }
    const Symbol sym = stack.back().next++;
    require_within(++nodes, budget.max_enum, "PPT window search");
    u.push_back(sym);
    const std::vector<Integer>& dp = stack.back().dp;
    if (u.size() < s.ell) {
      stack.push_back({dp, 0});
      continue;
    }
    const std::uint64_t j = u.size() - s.ell, widx = s.window_at(u, j);
    if (j >= 2) {
      const std::uint64_t n = j - 1;
      const Rational p = s.prob(s.step(dp, widx, z), j + 1);
      const Rational bound = th.at(n);
      if (p > bound) {
        res.answer = true;
        res.witness = PptWitness{u, n, p, bound, std::nullopt};
        res.summary = "window with n=" + std::to_string(n) + " (K=" + std::to_string(big_k) + ")";
        return res;
      }
      if (p > th.theta) {
        if (auto w = s.pump(u, n, p)) {
          res.answer = true;
          res.witness = *w;
          res.summary = "deterministic loop pumped to n=" + std::to_string(w->n) +
                        " (K=" + std::to_string(big_k) + ")";
          return res;
        }
      }
    }
    auto child = s.step(dp, widx, j == 0 ? x : y);
    if (j <= n_max && s.prob(child, j + 1) > th.theta)
      stack.push_back({std::move(child), 0});
    else
      u.pop_back();
  }
  res.summary = "K=" + std::to_string(big_k) + "; no window with n <= " + std::to_string(n_max) +
                " exceeds the threshold and no pumpable deterministic loop (" +
                std::to_string(nodes) + " nodes)";
  return res;
}

}  // namespace sca
