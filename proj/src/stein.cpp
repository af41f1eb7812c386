#include "rankdist/stein.hpp"

#include "rankdist/qseries.hpp"

#include <stdexcept>

namespace rankdist {

namespace {

Rational qm1(long q, long e) { return qpow(q, e) - 1; }

bool even(long x) { return x % 2 == 0; }

SteinPair make_limit_pair(const EnsembleId& e, long q) {
  SteinPair p{e, q, std::nullopt, {}, {}, std::nullopt};
  switch (e.kind) {
    case EnsembleKind::UniformRect:
    case EnsembleKind::SkewCentroEven: {
      const long m = e.kind == EnsembleKind::UniformRect ? e.m : 0;
      p.a = [q](long) { return Rational(q); };
      p.b = [q, m](long k) { return qm1(q, k) * qm1(q, k + m); };
      break;
    }
    case EnsembleKind::Symmetric:
      p.a = [](long) { return Rational(1); };
      p.b = [q](long k) { return qm1(q, k); };
      break;
    case EnsembleKind::ZeroDiagEven:
      p.a = [q](long) { return Rational(q * q); };
      p.b = [q](long k) { return qm1(q, 2 * k - 1) * qm1(q, 2 * k); };
      break;
    case EnsembleKind::ZeroDiagOdd:
      p.a = [q](long) { return Rational(q * q); };
      p.b = [q](long k) { return qm1(q, 2 * k + 1) * qm1(q, 2 * k); };
      break;
    case EnsembleKind::SkewCentroOdd:
      p.a = [q](long) { return Rational(q); };
      p.b = [q](long k) { return qm1(q, k) * qm1(q, k + 1); };
      break;
    case EnsembleKind::Hermitian:
      p.a = [q](long) { return Rational(q); };
      p.b = [q](long k) { return qm1(q, 2 * k); };
      break;
  }
  return p;
}

SteinPair make_finite_pair(const EnsembleId& e, long q, long n) {
  SteinPair p{e, q, n, {}, {}, support_max(e, n)};
  switch (e.kind) {
    case EnsembleKind::UniformRect: {
      const long m = e.m;
      p.a = [q, n](long k) { return q * (1 - qpow(q, -n + k - 1)); };
      p.b = [q, m](long k) { return qm1(q, k) * qm1(q, k + m); };
      break;
    }
    case EnsembleKind::SkewCentroEven: {
      const long h = n / 2;
      p.a = [q, h](long k) { return q * (1 - qpow(q, -h + k - 1)); };
      p.b = [q](long k) { return qm1(q, k) * qm1(q, k); };
      break;
    }
    case EnsembleKind::Symmetric:
      p.a = [q, n](long k) { return even(n - k + 1) ? 1 - qpow(q, -n + k - 1) : Rational(1); };
      p.b = [q](long k) { return qm1(q, k); };
      break;
    case EnsembleKind::ZeroDiagEven:
    case EnsembleKind::ZeroDiagOdd: {
      const long half = n / 2;  // n = 2*half (+1)
      p.a = [q, half](long k) { return q * q - qpow(q, -2 * (half - k)); };
      if (e.kind == EnsembleKind::ZeroDiagEven)
        p.b = [q](long k) { return qm1(q, 2 * k - 1) * qm1(q, 2 * k); };
      else
        p.b = [q](long k) { return qm1(q, 2 * k + 1) * qm1(q, 2 * k); };
      break;
    }
    case EnsembleKind::SkewCentroOdd: {
      const long t = (n - 1) / 2;
      p.a = [q, t](long k) { return q - qpow(q, k - t); };
      p.b = [q](long k) { return qm1(q, k) * qm1(q, k + 1); };
      break;
    }
    case EnsembleKind::Hermitian:
      p.a = [q, n](long k) {
        Rational t = qpow(q, k - n);
        return even(n - k + 1) ? q - t : q + t;
      };
      p.b = [q](long k) { return qm1(q, 2 * k); };
      break;
  }
  return p;
}

}  // namespace

bool registration_holds(const SteinPair& pair, const Vector<Rational>& probs) {
  const long K = static_cast<long>(probs.size()) - 1;
  auto p = [&](long k) { return (k < 0 || k > K) ? Rational(0) : probs(k); };
  for (long k = 0; k <= K + 1; ++k)
    if (pair.a(k) * p(k - 1) != pair.b(k) * p(k)) return false;
  return true;
}

bool registration_holds(const SteinPair& pair, const LimitPmf& limit) {
  for (long k = 1; k <= limit.trunc_k; ++k) {
    if (pair.a(k) * limit.weights(k - 1) != pair.b(k) * limit.weights(k)) return false;
    IntervalRat lhs = IntervalRat(pair.a(k)) * limit.prob(k - 1);
    IntervalRat rhs = IntervalRat(pair.b(k)) * limit.prob(k);
    if (!lhs.intersects(rhs)) return false;
  }
  return pair.b(0) == 0;
}

SteinPair stein_pair(const EnsembleId& e, long q, std::optional<long> n, bool register_check) {
  if (q < 2) throw std::invalid_argument("stein_pair: q must be >= 2");
  if (!n) {
    SteinPair pair = make_limit_pair(e, q);
    if (register_check) {
      Vector<Rational> w(24);
      for (long k = 0; k < 24; ++k) w(k) = limit_weight(e, q, k);
      for (long k = 1; k < 24; ++k)
        if (pair.a(k) * w(k - 1) != pair.b(k) * w(k))
          throw std::logic_error("stein_pair: limit registration failed for " + e.name());
    }
    return pair;
  }
  if (!parity_ok(e, *n)) throw std::invalid_argument(e.name() + ": n has the wrong parity");
  SteinPair pair = make_finite_pair(e, q, *n);
  if (register_check && !registration_holds(pair, finite_pmf(e, q, *n).probs))
    throw std::logic_error("stein_pair: finite registration failed for " + e.name());
  return pair;
}

TruncatedPoisson truncated_poisson(const Rational& lambda, long K) {
  if (lambda <= 0 || K < 0) throw std::invalid_argument("truncated_poisson: need lambda > 0, K >= 0");
  Vector<Rational> w(K + 1);
  w(0) = 1;
  for (long k = 1; k <= K; ++k) w(k) = w(k - 1) * lambda / k;
  Rational total = w.sum();
  w /= total;
  SteinPair pair{EnsembleId{}, 0, K, [lambda, K](long k) { return k == K + 1 ? Rational(0) : lambda; },
                 [](long k) { return Rational(k); }, K};
  return {pair, w};
}

std::vector<TrialFunction> standard_trial_functions(long q, long kmax) {
  std::vector<TrialFunction> fns;
  for (long j = 0; j <= kmax + 1; ++j)
    fns.push_back({"1(x=" + std::to_string(j) + ")", [j](long x) { return Rational(x == j ? 1 : 0); }});
  fns.push_back({"x", [](long x) { return Rational(x); }});
  fns.push_back({"x^2", [](long x) { return Rational(x * x); }});
  fns.push_back({"q^x", [q](long x) { return qpow(q, x); }});
  fns.push_back({"q^-x", [q](long x) { return qpow(q, -x); }});
  fns.push_back({"q^2x", [q](long x) { return qpow(q, 2 * x); }});
  return fns;
}

CharacterizationReport characterization_check(const SteinPair& pair, const Vector<Rational>& probs,
                                              const std::vector<TrialFunction>& trial_fns) {
  CharacterizationReport report;
  const long K = static_cast<long>(probs.size()) - 1;
  for (const auto& t : trial_fns) {
    Rational lhs = 0, rhs = 0;
    for (long x = 0; x <= K; ++x) {
      lhs += probs(x) * pair.a(x + 1) * t.f(x + 1);
      rhs += probs(x) * pair.b(x) * t.f(x);
    }
    Rational defect = bmp::abs(lhs - rhs);
    if (defect > report.max_defect) report.max_defect = defect;
    report.defects.emplace_back(t.name, defect);
  }
  return report;
}

CharacterizationReport characterization_check(const SteinPair& pair, const RankPmf& pmf,
                                              const std::vector<TrialFunction>& trial_fns) {
  if (pair.support_max && *pair.support_max != pmf.kmax())
    throw std::invalid_argument("characterization_check: support mismatch");
  return characterization_check(pair, pmf.probs, trial_fns);
}

Rational power_moment(const RankPmf& pmf, long k) {
  Rational s = 0;
  for (long x = 0; x <= pmf.kmax(); ++x) s += pmf.probs(x) * qpow(pmf.q, k * x);
  return s;
}

namespace {

Check equality_check(std::string name, std::string claim, const Rational& lhs, const Rational& rhs) {
  Check c{std::move(name), std::move(claim), lhs == rhs, {}};
  c.detail = {{"lhs", to_string(lhs)}, {"rhs", to_string(rhs)}, {"defect", to_string(lhs - rhs)}};
  return c;
}

}  // namespace

Report moment_identities(const EnsembleId& e, long q, long n) {
  RankPmf pmf = finite_pmf(e, q, n);
  auto c = [&](long k) { return power_moment(pmf, k); };
  Report out;
  auto tag = [&](const std::string& what) {
    return e.name() + " q=" + std::to_string(q) + " n=" + std::to_string(n) + ": " + what;
  };

  switch (e.kind) {
    case EnsembleKind::UniformRect: {
      const long m = e.m;
      out.push_back(equality_check(tag("E[q^Q]"), "E[q^Q_n] = 1 + q^-m - q^-(n+m)", c(1),
                                   1 + qpow(q, -m) - qpow(q, -(n + m))));
      for (long k = -1; k <= 2; ++k) {
        Rational lhs = qpow(q, m) * c(k + 2);
        Rational rhs = (1 + qpow(q, m) - qpow(q, -n + k + 1)) * c(k + 1) + (qpow(q, k + 1) - 1) * c(k);
        out.push_back(equality_check(tag("recursion k=" + std::to_string(k)),
                                     "q^m c_{k+2} = (1+q^m-q^{-n+k+1}) c_{k+1} + (q^{k+1}-1) c_k", lhs, rhs));
      }
      break;
    }
    case EnsembleKind::SkewCentroEven: {
      const long h = n / 2;
      out.push_back(equality_check(tag("E[q^Q]"), "E[q^Q_n] = 2 - q^-(n/2)", c(1), 2 - qpow(q, -h)));
      break;
    }
    case EnsembleKind::Symmetric: {
      Rational s = 0;
      for (long x = 0; x <= pmf.kmax(); ++x)
        if (even(n - x)) s += pmf.probs(x) * qpow(q, x);
      out.push_back(equality_check(tag("E[1_{n-Q even} q^Q]"), "E[1(n-Q_n even) q^Q_n] = 1", s, 1));
      break;
    }
    case EnsembleKind::ZeroDiagEven:
    case EnsembleKind::ZeroDiagOdd: {
      const bool ev = e.kind == EnsembleKind::ZeroDiagEven;
      const long half = n / 2;
      if (ev)
        out.push_back(equality_check(tag("E[q^2Q]"), "E[q^{2Q_n}] = q + 1 - q^{1-n}", c(2), q + 1 - qpow(q, 1 - n)));
      else
        out.push_back(equality_check(tag("E[q^2Q]"), "E[q^{2Q_n}] = 1 + q^-1 - q^-n", c(2), 1 + qpow(q, -1) - qpow(q, -n)));
      for (long k = -2; k <= 1; ++k) {
        Rational lead = ev ? qpow(q, -1) : Rational(q);
        Rational mid = ev ? 1 + qpow(q, -1) - qpow(q, -2 * half + 2 + k) : 1 + q - qpow(q, -2 * half + 2 + k);
        Rational lhs = lead * c(k + 4) - mid * c(k + 2) + (1 - qpow(q, k + 2)) * c(k);
        out.push_back(equality_check(tag("recursion k=" + std::to_string(k)),
                                     ev ? "q^-1 c_{k+4} - (1+q^-1-q^{-n+2+k}) c_{k+2} + (1-q^{k+2}) c_k = 0"
                                        : "q c_{k+4} - (1+q-q^{-(n-1)+2+k}) c_{k+2} + (1-q^{k+2}) c_k = 0",
                                     lhs, 0));
      }
      break;
    }
    case EnsembleKind::SkewCentroOdd: {
      const long t = (n - 1) / 2;
      out.push_back(equality_check(tag("E[q^Q]"), "E[q^Q_n] = 1 + 1/q - q^-((n+1)/2)", c(1),
                                   1 + qpow(q, -1) - qpow(q, -(n + 1) / 2)));
      for (long k = -1; k <= 2; ++k) {
        Rational lhs = q * c(k + 2);
        Rational rhs = (q + 1 - qpow(q, k + 1 - t)) * c(k + 1) + (qpow(q, k + 1) - 1) * c(k);
        out.push_back(equality_check(tag("recursion k=" + std::to_string(k)),
                                     "q c_{k+2} = (q+1-q^{k+1-(n-1)/2}) c_{k+1} + (q^{k+1}-1) c_k", lhs, rhs));
      }
      break;
    }
    case EnsembleKind::Hermitian: {
      Rational rhs = 0;
      for (long x = 0; x <= pmf.kmax(); ++x) {
        Rational sgn = even(n - x) ? 1 : -1;
        rhs += pmf.probs(x) * (2 * qpow(q, -x) - sgn * qpow(q, -n));
      }
      out.push_back(equality_check(tag("E[q^Q] identity"), "E[q^Q_n] = E[2 q^-Q_n - (-1)^{n-Q_n} q^-n]", c(1), rhs));
      Rational bound = 2 + qpow(q, -n);
      Check ineq{tag("E[q^Q] bound"), "E[q^Q_n] <= 2 + q^-n", c(1) <= bound, {}};
      ineq.detail = {{"lhs", to_string(c(1))}, {"rhs", to_string(bound)}, {"margin", to_string(bound - c(1))}};
      out.push_back(std::move(ineq));
      break;
    }
  }
  return out;
}

SteinSolution stein_solution(const SteinPair& pair, const LimitPmf& limit, const TargetSet& target,
                             long k_max) {
  if (!pair.is_limit()) throw std::invalid_argument("stein_solution: needs the limit pair");
  if (k_max < 0 || k_max + 1 > limit.trunc_k) throw std::invalid_argument("stein_solution: k_max must be < trunc_k");
  for (long j : target.members)
    if (j < 0 || j > k_max) throw std::invalid_argument("stein_solution: target must lie in {0..k_max}");

  SteinSolution sol;
  sol.target = target;
  sol.k_max = k_max;

  // Weight sums over A; members lie in {0..k_max} so both are exact.
  Rational members_weight = 0;
  for (long j : target.members) members_weight += limit.weights(j);
  const IntervalRat prob_members = limit.scale * IntervalRat(members_weight);
  sol.prob_target = target.complement ? IntervalRat(1) - prob_members : prob_members;

  sol.partial_sum.assign(static_cast<std::size_t>(k_max + 2), IntervalRat(0));
  sol.cross = sol.partial_sum;
  sol.values = sol.partial_sum;

  Rational upto = 0;           // G(U_k)
  Rational members_upto = 0;   // G(members n U_k)
  for (long k = 0; k <= k_max; ++k) {
    upto += limit.weights(k);
    if (target.members.count(k)) members_upto += limit.weights(k);
    const Rational denom = pair.a(k + 1) * limit.weights(k);
    const IntervalRat beyond = limit.weight_from(k + 1);  // G(U_k^c)

    // sum_{j<=k} (h(j) - P(A)) w_j = G(A n U_k) - P(A) G(U_k)
    const Rational in_a_upto = target.complement ? upto - members_upto : members_upto;
    IntervalRat partial = (IntervalRat(in_a_upto) - sol.prob_target * IntervalRat(upto)) / IntervalRat(denom);

    // G(A n U_k) G(U_k^c) - G(A n U_k^c) G(U_k), all times scale / denom
    const Rational members_beyond = members_weight - members_upto;
    IntervalRat in_a_beyond = target.complement ? beyond - IntervalRat(members_beyond) : IntervalRat(members_beyond);
    IntervalRat cross = (IntervalRat(in_a_upto) * beyond - in_a_beyond * IntervalRat(upto)) * limit.scale /
                        IntervalRat(denom);

    const auto idx = static_cast<std::size_t>(k + 1);
    sol.partial_sum[idx] = partial;
    sol.cross[idx] = cross;
    sol.values[idx] = intersect(partial, cross);
  }
  return sol;
}

IntervalRat stein_residual(const SteinPair& pair, const SteinSolution& sol, long k) {
  if (k < 0 || k > sol.k_max) throw std::out_of_range("stein_residual: k out of range");
  const auto i = static_cast<std::size_t>(k);
  IntervalRat h = IntervalRat(Rational(sol.target.contains(k) ? 1 : 0));
  return IntervalRat(pair.a(k + 1)) * sol.values[i + 1] - IntervalRat(pair.b(k)) * sol.values[i] -
         (h - sol.prob_target);
}

IntervalRat stein_sup_norm(const SteinPair& pair, const LimitPmf& limit, long k) {
  if (k < 0 || k > limit.trunc_k) throw std::out_of_range("stein_sup_norm: k past the truncation");
  const Rational upto = limit.weight_upto(k);
  const IntervalRat beyond = limit.weight_from(k + 1);
  return limit.scale * IntervalRat(upto) * beyond / IntervalRat(pair.a(k + 1) * limit.weights(k));
}

Rational sup_norm_tail_bound(const SteinPair& pair, long k) {
  const Rational a = pair.a(k + 1);
  const Rational r = a / pair.b(k + 1);
  if (pair.b(k + 1) <= 0 || r >= 1) throw std::domain_error("sup_norm_tail_bound: ratio not below 1");
  return r / (a * (1 - r));
}

std::vector<SolutionBound> solution_bounds(const EnsembleId& e) {
  auto c_over = [](Rational c, long power) {
    return [c, power](long q) { return c * qpow(q, -power); };
  };
  std::vector<SolutionBound> out;
  switch (e.kind) {
    case EnsembleKind::UniformRect:
    case EnsembleKind::SkewCentroEven: {
      const long m = e.kind == EnsembleKind::UniformRect ? e.m : 0;
      out.push_back({"sup |f_A| <= 2/q^{m+2}", c_over(2, m + 2), true, true, 2});
      if (m == 0)
        out.push_back({"sup |f_A| <= 1/q^2 + 1/q^3 (m = 0)", [](long q) { return qpow(q, -2) + qpow(q, -3); },
                       true, true, 2});
      break;
    }
    case EnsembleKind::Symmetric:
      out.push_back({"sup |f_A(1)| <= 1/q + 1/q^3", [](long q) { return qpow(q, -1) + qpow(q, -3); }, true,
                     false, 2});
      out.push_back({"sup_{k>=2} |f_A(k)| <= 2/q^2", c_over(2, 2), false, true, 2});
      break;
    case EnsembleKind::ZeroDiagEven:
      out.push_back({"sup |f_A(1)| <= 1/q^3 + 1/q^5", [](long q) { return qpow(q, -3) + qpow(q, -5); }, true,
                     false, 2});
      out.push_back({"sup_{k>=2} |f_A(k)| <= 1.31/q^7", c_over(ratio(131, 100), 7), false, true, 2});
      break;
    case EnsembleKind::ZeroDiagOdd:
      out.push_back({"sup |f_A(1)| <= 2/q^5", c_over(2, 5), true, false, 2});
      out.push_back({"sup_{k>=2} |f_A(k)| <= 1.14/q^9", c_over(ratio(114, 100), 9), false, true, 2});
      break;
    case EnsembleKind::SkewCentroOdd:
      out.push_back({"sup |f_A| <= 2/q^3", c_over(2, 3), true, true, 2});
      break;
    case EnsembleKind::Hermitian:
      out.push_back({"sup |f_A(1)| <= 1.1/q^2", c_over(ratio(11, 10), 2), true, false, 2});
      out.push_back({"sup_{k>=2} |f_A(k)| <= 1.8/q^4", c_over(ratio(18, 10), 4), false, true, 2});
      out.push_back({"sup_{k>=2} |f_A(k)| <= 1.4/q^4 (q >= 3)", c_over(ratio(14, 10), 4), false, true, 3});
      break;
  }
  return out;
}

Report verify_solution_bounds(const EnsembleId& e, const std::vector<long>& q_list, long k_max) {
  Report out;
  const auto bounds = solution_bounds(e);
  for (long q : q_list) {
    if (q < 2) throw std::invalid_argument("verify_solution_bounds: q must be >= 2");
    const SteinPair pair = stein_pair(e, q, std::nullopt);
    const LimitPmf limit = limit_pmf(e, q, k_max + 12, default_qprod_trunc(q));
    std::vector<IntervalRat> sup;
    for (long k = 0; k <= k_max; ++k) sup.push_back(stein_sup_norm(pair, limit, k));

    // |f_A(1)| <= P(Q >= 1)/a(1); the sup over A attains it.
    {
      IntervalRat f1_bound = (IntervalRat(1) - limit.prob(0)) / IntervalRat(pair.a(1));
      Check c{e.name() + " q=" + std::to_string(q) + ": |f_A(1)| vs P(Q>=1)/a(1)",
              "sup_A |f_A(1)| <= P(Q >= 1)/a(1)", sup[0].lo() <= f1_bound.hi() && sup[0].intersects(f1_bound), {}};
      c.detail = {{"sup", to_string(sup[0])}, {"bound", to_string(f1_bound)}};
      out.push_back(std::move(c));
    }

    for (const auto& bound : bounds) {
      if (q < bound.min_q) continue;
      const Rational limit_value = bound.value(q);
      Rational min_margin;
      long worst_k = -1;
      bool pass = true;
      for (long k = 0; k <= k_max; ++k) {
        if ((k == 0 && !bound.at_zero) || (k > 0 && !bound.at_positive)) continue;
        Rational margin = limit_value - sup[static_cast<std::size_t>(k)].hi();
        if (worst_k < 0 || margin < min_margin) {
          min_margin = margin;
          worst_k = k;
        }
        pass = pass && margin >= 0;
      }
      Check c{e.name() + " q=" + std::to_string(q) + ": " + bound.claim, bound.claim, pass, {}};
      c.detail = {{"q", q}, {"k_max", k_max}, {"bound", to_string(limit_value)}};
      if (worst_k >= 0) {
        c.detail["worst_k"] = worst_k;
        c.detail["min_margin"] = to_string(min_margin);
        c.detail["min_margin_approx"] = to_double(min_margin);
      }
      if (bound.at_positive) {
        // every k > k_max is covered by the decreasing closed-form bound
        Rational tail = sup_norm_tail_bound(pair, k_max + 1);
        c.detail["tail_bound"] = to_string(tail);
        c.pass = c.pass && tail <= limit_value;
      }
      out.push_back(std::move(c));
    }
  }
  return out;
}

}  // namespace rankdist
