#include "rankdist/markov.hpp"

#include "rankdist/ensembles.hpp"
#include "rankdist/gfmatrix.hpp"

#include <cmath>
#include <stdexcept>

namespace rankdist {

RankChain build_chain(long q, long n, long m) {
  if (q < 2 || n < 1 || m < 0) throw std::invalid_argument("build_chain: need q >= 2, n >= 1, m >= 0");
  RankChain c{q, n, m, Matrix<Rational>::Zero(n + 1, n + 1)};
  const Rational den = (qpow(q, n) - 1) * (qpow(q, n + m) - 1);
  for (long i = 0; i <= n; ++i) {
    const Rational up = qpow(q, n - i - 1) * (qpow(q, n - i) - 1) / den;
    const Rational down = (qpow(q, n) - qpow(q, n - i)) * (qpow(q, n + m) - qpow(q, n - i)) / den;
    if (i < n) c.transitions(i, i + 1) = up;
    if (i > 0) c.transitions(i, i - 1) = down;
    c.transitions(i, i) = 1 - up - down;
  }
  return c;
}

Vector<Rational> stationarity_defect(const RankChain& chain) {
  const Vector<Rational> pi = finite_pmf(EnsembleId::uniform(chain.m), chain.q, chain.n).probs;
  return (pi.transpose() * chain.transitions).transpose() - pi;
}

Report verify_stationarity(const RankChain& chain) {
  Report out;
  const std::string tag =
      "chain q=" + std::to_string(chain.q) + " n=" + std::to_string(chain.n) + " m=" + std::to_string(chain.m) + ": ";
  const long n = chain.n;
  const Vector<Rational> pi = finite_pmf(EnsembleId::uniform(chain.m), chain.q, n).probs;

  {
    const Vector<Rational> sums = chain.transitions.rowwise().sum();
    bool ok = true;
    bool in_range = true;
    for (long i = 0; i <= n; ++i) {
      ok = ok && sums(i) == 1;
      for (long j = 0; j <= n; ++j) in_range = in_range && chain(i, j) >= 0 && chain(i, j) <= 1;
    }
    out.push_back({tag + "row sums", "sum_j M(i,j) = 1", ok, {}});
    out.push_back({tag + "entry range", "0 <= M(i,j) <= 1", in_range, {}});
  }
  {
    // the up-step formula is kept unclipped at i = n, where it must vanish
    const Rational boundary = qpow(chain.q, -1) * (qpow(chain.q, 0) - 1);
    out.push_back({tag + "boundary", "M(n,n+1) = 0 by formula", boundary == 0, {}});
  }
  {
    const Vector<Rational> d = stationarity_defect(chain);
    Rational worst = 0;
    for (long i = 0; i <= n; ++i) worst = std::max(worst, Rational(bmp::abs(d(i))));
    Check c{tag + "stationarity", "pi M = pi, pi the uniform n x (n+m) rank law", worst == 0, {}};
    c.detail = {{"max_defect", to_string(worst)}};
    out.push_back(std::move(c));
  }
  {
    bool ok = true;
    for (long i = 0; i < n; ++i) ok = ok && pi(i) * chain(i, i + 1) == pi(i + 1) * chain(i + 1, i);
    out.push_back({tag + "detailed balance", "pi_i M(i,i+1) = pi_{i+1} M(i+1,i)", ok, {}});
  }
  return out;
}

std::vector<Rational> tv_to_stationarity(const RankChain& chain, long start, long t_max) {
  if (start < 0 || start > chain.n) throw std::out_of_range("tv_to_stationarity: start outside {0..n}");
  const Vector<Rational> pi = finite_pmf(EnsembleId::uniform(chain.m), chain.q, chain.n).probs;
  Vector<Rational> mu = Vector<Rational>::Zero(chain.n + 1);
  mu(start) = 1;
  std::vector<Rational> tv;
  for (long t = 0; t <= t_max; ++t) {
    Rational s = 0;
    for (long i = 0; i <= chain.n; ++i) s += bmp::abs(mu(i) - pi(i));
    tv.push_back(s / 2);
    mu = (mu.transpose() * chain.transitions).transpose();
  }
  return tv;
}

namespace {

std::vector<Elem> nonzero_vector(CounterRng& rng, long len, long q) {
  std::vector<Elem> v(static_cast<std::size_t>(len));
  for (;;) {
    bool any = false;
    for (auto& x : v) {
      x = static_cast<Elem>(rng.below(static_cast<std::uint64_t>(q)));
      any = any || x != 0;
    }
    if (any) return v;
  }
}

double tv_vs(const std::vector<long>& occ, const Vector<Rational>& pi, long steps) {
  double s = 0;
  for (std::size_t k = 0; k < occ.size(); ++k)
    s += std::abs(static_cast<double>(occ[k]) / static_cast<double>(steps) - to_double(pi(static_cast<Eigen::Index>(k))));
  return s / 2;
}

}  // namespace

ChainSimulation simulate_chain_vs_matrix(long q, long n, long m, long steps, std::uint64_t seed,
                                         std::optional<long> burn_in) {
  if (steps < 1) throw std::invalid_argument("simulate_chain_vs_matrix: steps must be >= 1");
  const FieldPtr field = Field::make(q);
  const RankChain chain = build_chain(q, n, m);

  ChainSimulation sim;
  sim.q = q;
  sim.n = n;
  sim.m = m;
  sim.steps = steps;
  sim.seed = seed;
  sim.burn_in = burn_in.value_or(10 * n);
  if (sim.burn_in < 0) throw std::invalid_argument("simulate_chain_vs_matrix: burn-in must be >= 0");
  sim.occupation_chain.assign(static_cast<std::size_t>(n + 1), 0);
  sim.occupation_matrix.assign(static_cast<std::size_t>(n + 1), 0);

  {
    Matrix<double> cdf(n + 1, n + 1);
    for (long i = 0; i <= n; ++i) {
      double acc = 0;
      for (long j = 0; j <= n; ++j) cdf(i, j) = acc += to_double(chain(i, j));
    }
    CounterRng rng(seed, 0);
    long state = n;
    for (long t = 0; t < sim.burn_in + steps; ++t) {
      const double u = rng.unit();
      long j = std::max<long>(state - 1, 0);
      while (j < n && u >= cdf(state, j)) ++j;
      state = j;
      if (t >= sim.burn_in) ++sim.occupation_chain[static_cast<std::size_t>(state)];
    }
  }
  {
    CounterRng rng(seed, 1);
    const Field& F = *field;
    MatrixGF a(field, n, n + m);
    for (long t = 0; t < sim.burn_in + steps; ++t) {
      const auto u = nonzero_vector(rng, n, q);
      const auto v = nonzero_vector(rng, n + m, q);
      for (long i = 0; i < n; ++i)
        for (long j = 0; j < n + m; ++j) a(i, j) = F.add(a(i, j), F.mul(u[i], v[j]));
      if (t >= sim.burn_in) ++sim.occupation_matrix[static_cast<std::size_t>(n - rank(a))];
    }
  }

  const Vector<Rational> pi = finite_pmf(EnsembleId::uniform(m), q, n).probs;
  sim.tv_chain = tv_vs(sim.occupation_chain, pi, steps);
  sim.tv_matrix = tv_vs(sim.occupation_matrix, pi, steps);
  const Vector<Rational> d = stationarity_defect(chain);
  sim.stationarity_defect = 0;
  for (long i = 0; i <= n; ++i) sim.stationarity_defect = std::max(sim.stationarity_defect, Rational(bmp::abs(d(i))));
  return sim;
}

nlohmann::json to_json(const RankChain& chain) {
  nlohmann::json rows = nlohmann::json::array();
  for (long i = 0; i <= chain.n; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (long j = 0; j <= chain.n; ++j) row.push_back(to_string(chain(i, j)));
    rows.push_back(std::move(row));
  }
  return {{"q", chain.q}, {"n", chain.n}, {"m", chain.m}, {"transitions", rows}};
}

nlohmann::json to_json(const ChainSimulation& sim) {
  return {{"q", sim.q},
          {"n", sim.n},
          {"m", sim.m},
          {"stationarity_defect", to_string(sim.stationarity_defect)},
          {"empirical_tv_chain", sim.tv_chain},
          {"empirical_tv_matrix", sim.tv_matrix},
          {"occupation_chain", sim.occupation_chain},
          {"occupation_matrix", sim.occupation_matrix},
          {"steps", sim.steps},
          {"burn_in", sim.burn_in},
          {"seed", sim.seed}};
}

}  // namespace rankdist
