#pragma once

#include "rankdist/ensembles.hpp"
#include "rankdist/interval.hpp"
#include "rankdist/report.hpp"

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace rankdist {

/// Functions a, b with a(k) p_{k-1} = b(k) p_k for every k, so that
/// E[a(X+1) f(X+1)] = E[b(X) f(X)] characterizes the law of X.
struct SteinPair {
  EnsembleId ensemble;
  long q = 2;
  std::optional<long> n;  ///< nullopt: the limiting distribution
  std::function<Rational(long)> a;
  std::function<Rational(long)> b;
  /// Largest support point; nullopt when the support is all of N_0.
  std::optional<long> support_max;

  bool is_limit() const { return !n.has_value(); }
};

/// The characterizing pair of the finite-n law (n given) or of the limit
/// (n = nullopt). With `register_check` the identity a(k) p_{k-1} = b(k) p_k
/// is verified exactly before returning; a failure throws std::logic_error.
SteinPair stein_pair(const EnsembleId& e, long q, std::optional<long> n, bool register_check = true);

/// Exact a(k) p_{k-1} = b(k) p_k for k = 0..K+1 (p outside the support is 0).
bool registration_holds(const SteinPair& pair, const Vector<Rational>& probs);

/// Exact on the limit weights, and as intersecting enclosures on the probs.
bool registration_holds(const SteinPair& pair, const LimitPmf& limit);

/// Poisson(lambda) truncated to {0..K}: a(k) = lambda (0 at K+1), b(k) = k.
struct TruncatedPoisson {
  SteinPair pair;
  Vector<Rational> probs;
};
TruncatedPoisson truncated_poisson(const Rational& lambda, long K);

struct TrialFunction {
  std::string name;
  std::function<Rational(long)> f;
};

/// 1(x = j) for j = 0..kmax+1, then x, x^2, q^x, q^-x, q^{2x}.
std::vector<TrialFunction> standard_trial_functions(long q, long kmax);

struct CharacterizationReport {
  std::vector<std::pair<std::string, Rational>> defects;  ///< |E[a f(X+1)] - E[b f(X)]|
  Rational max_defect = 0;
  bool exact() const { return max_defect == 0; }
};

CharacterizationReport characterization_check(const SteinPair& pair, const Vector<Rational>& probs,
                                              const std::vector<TrialFunction>& trial_fns);
CharacterizationReport characterization_check(const SteinPair& pair, const RankPmf& pmf,
                                              const std::vector<TrialFunction>& trial_fns);

/// E[q^{k Q_n}] for integer k.
Rational power_moment(const RankPmf& pmf, long k);

/// Closed-form moment identities and moment recursions for one (ensemble, q, n).
Report moment_identities(const EnsembleId& e, long q, long n);

/// A subset of N_0: finitely many members, or the complement of such a set.
struct TargetSet {
  std::set<long> members;
  bool complement = false;

  bool contains(long k) const { return (members.count(k) != 0) != complement; }
  TargetSet complemented() const { return {members, !complement}; }
};

/// f_A(0..k_max+1) for h = 1_A, from two independent formulas: the partial
/// sums (1/(a(k+1) p_k)) sum_{j<=k} (h(j) - P(A)) p_j and the cross form
/// [P(A n U_k) P(U_k^c) - P(A n U_k^c) P(U_k)] / (a(k+1) p_k).
struct SteinSolution {
  TargetSet target;
  long k_max = 0;
  IntervalRat prob_target;               ///< P(Q in A)
  std::vector<IntervalRat> partial_sum;  ///< index j holds f(j)
  std::vector<IntervalRat> cross;
  std::vector<IntervalRat> values;  ///< intersection of the two routes
};

SteinSolution stein_solution(const SteinPair& pair, const LimitPmf& limit, const TargetSet& target,
                             long k_max);

/// a(k+1) f(k+1) - b(k) f(k) - (h(k) - P(A)); must contain 0.
IntervalRat stein_residual(const SteinPair& pair, const SteinSolution& sol, long k);

/// sup over all A of |f_A(k+1)| = P(U_k) P(U_k^c) / (a(k+1) p_k).
IntervalRat stein_sup_norm(const SteinPair& pair, const LimitPmf& limit, long k);

/// Exact upper bound valid for every k' >= k:
/// sup_A |f_A(k'+1)| <= (1/a) r/(1-r), r = a/b(k+1), decreasing in k.
/// Needs a constant limit pair with r < 1.
Rational sup_norm_tail_bound(const SteinPair& pair, long k);

/// A stated bound on sup_A |f_A(k+1)|.
struct SolutionBound {
  std::string claim;
  std::function<Rational(long q)> value;
  bool at_zero = true;      ///< applies to f(1)
  bool at_positive = true;  ///< applies to f(k+1), k >= 1
  long min_q = 2;
};

std::vector<SolutionBound> solution_bounds(const EnsembleId& e);

/// Checks every bound of the ensemble's limit pair for k = 0..k_max exactly
/// through the sup-norm enclosure, and past k_max through
/// sup_norm_tail_bound. Also checks sup |f_A(1)| against P(Q >= 1)/a(1).
Report verify_solution_bounds(const EnsembleId& e, const std::vector<long>& q_list, long k_max);

}  // namespace rankdist
