#include "cli.hpp"

#include "rankdist/ensembles.hpp"
#include "rankdist/gfmatrix.hpp"
#include "rankdist/markov.hpp"
#include "rankdist/qseries.hpp"
#include "rankdist/stein.hpp"
#include "rankdist/tvbounds.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace rankdist::cli {

namespace {

using nlohmann::json;

/// Flags shared by the subcommands; each subcommand binds the ones it uses.
struct RunConfig {
  std::string family = "uniform";
  long m = 0;
  long q = 2;
  long n = 1;
  std::optional<long> trunc_k;
  std::optional<long> qprod_trunc;
  long k_max = 40;
  long trials = 100000;
  std::uint64_t seed = 1;
  int workers = 1;
  std::string format = "json";
  std::string out_path;
  std::string realize = "default";
  bool refined = false;
  bool all = false;
  long q_max = 5;
  long n_max = 10;
  long m_max = 2;
  long steps = 100000;
  std::optional<long> burn_in;
  std::vector<long> sizes{64, 256, 1024};
  std::vector<long> target;
};

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

EnsembleId ensemble_of(const RunConfig& c) {
  if (c.q < 2) throw UsageError("--q must be >= 2");
  if (c.n < 1) throw UsageError("--n must be >= 1");
  if (c.m < 0) throw UsageError("--m must be >= 0");
  return resolve_ensemble(c.family, c.m, c.n);
}

Realization realization_of(const std::string& s) {
  if (s == "default") return Realization::Default;
  if (s == "skew") return Realization::Skew;
  if (s == "symplectic") return Realization::Symplectic;
  throw UsageError("--realize must be default, skew or symplectic");
}

TruncConfig trunc_of(const RunConfig& c) {
  TruncConfig t = TruncConfig::from_env();
  if (c.trunc_k) t.k_extra = *c.trunc_k;
  t.qprod_trunc = c.qprod_trunc;
  return t;
}

std::string pad(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

/// Writes the payload in the chosen format to --out or `out`.
void emit(const RunConfig& c, std::ostream& out, const json& j, const std::function<void(std::ostream&)>& csv,
          const std::function<void(std::ostream&)>& table) {
  std::ostringstream buf;
  if (c.format == "json")
    buf << j.dump(2) << '\n';
  else if (c.format == "csv")
    csv(buf);
  else
    table(buf);
  if (c.out_path.empty()) {
    out << buf.str();
    return;
  }
  std::ofstream f(c.out_path);
  if (!f) throw std::runtime_error("cannot open " + c.out_path);
  f << buf.str();
}

void report_csv(std::ostream& os, const Report& r) {
  os << "name,pass\n";
  for (const auto& c : r) os << '"' << c.name << "\"," << (c.pass ? "true" : "false") << '\n';
}

void report_table(std::ostream& os, const Report& r) {
  for (const auto& c : r) os << (c.pass ? "PASS  " : "FAIL  ") << c.name << '\n';
  os << r.size() << " checks, " << count_failures(r) << " failed\n";
}

int emit_report(const RunConfig& c, std::ostream& out, const Report& r, json extra = json::object()) {
  extra["checks"] = to_json(r);
  extra["pass"] = all_pass(r);
  extra["failures"] = count_failures(r);
  emit(c, out, extra, [&](std::ostream& os) { report_csv(os, r); }, [&](std::ostream& os) { report_table(os, r); });
  return all_pass(r) ? kPass : kCheckFailed;
}

Check tv_check(const TvResult& r) {
  std::ostringstream name;
  name << "TV " << r.ensemble.name() << " q=" << r.q << " n=" << r.n;
  if (r.variant == TheoremVariant::Refined) name << " (refined)";
  Check c{name.str(), r.claim, r.pass, to_json(r)};
  return c;
}

Check product_check(const InequalityCheck& ic) {
  std::ostringstream name;
  name << "product q=" << ic.q;
  if (ic.n >= 0) name << " n=" << ic.n;
  if (ic.m >= -1 && ic.n >= 0) name << " m=" << ic.m;
  name << ": " << ic.claim;
  Check c{name.str(), ic.claim, ic.pass, {}};
  c.detail = {{"lhs", to_string(round_outward(ic.lhs, 128))}, {"rhs", to_string(ic.rhs)}};
  return c;
}

// ---- subcommands -----------------------------------------------------------

int cmd_dist(const RunConfig& c, std::ostream& out) {
  const RankPmf pmf = finite_pmf(ensemble_of(c), c.q, c.n);
  emit(
      c, out, to_json(pmf),
      [&](std::ostream& os) {
        os << "k,prob,approx\n";
        for (long k = 0; k <= pmf.kmax(); ++k)
          os << k << ',' << to_string(pmf.probs(k)) << ',' << std::setprecision(17) << to_double(pmf.probs(k)) << '\n';
      },
      [&](std::ostream& os) {
        os << pmf.ensemble.name() << "  q=" << pmf.q << "  n=" << pmf.n
           << (pmf.realizable() ? "" : "  (formula only: no matrix ensemble over this field)") << '\n';
        for (long k = 0; k <= pmf.kmax(); ++k)
          os << "  k=" << pad(std::to_string(k), 4) << pad(to_string(pmf.probs(k)), 40) << std::setprecision(10)
             << to_double(pmf.probs(k)) << '\n';
      });
  return kPass;
}

int cmd_limit(const RunConfig& c, std::ostream& out) {
  const EnsembleId e = resolve_ensemble(c.family, c.m, c.n);
  if (c.q < 2) throw UsageError("--q must be >= 2");
  const long k = c.trunc_k.value_or(std::max<long>(TruncConfig::from_env().k_extra, 12));
  const LimitPmf L = limit_pmf(e, c.q, k, c.qprod_trunc.value_or(default_qprod_trunc(c.q)));
  emit(
      c, out, to_json(L),
      [&](std::ostream& os) {
        os << "k,lo,hi\n" << std::setprecision(17);
        for (long j = 0; j <= L.trunc_k; ++j)
          os << j << ',' << to_double(L.prob(j).lo()) << ',' << to_double(L.prob(j).hi()) << '\n';
      },
      [&](std::ostream& os) {
        os << L.ensemble.name() << " limit  q=" << L.q << '\n' << std::setprecision(12);
        for (long j = 0; j <= L.trunc_k; ++j) os << "  k=" << pad(std::to_string(j), 4) << to_double(L.prob(j).mid()) << '\n';
        os << "  tail <= " << to_double(L.tail.hi()) << '\n';
      });
  return kPass;
}

int cmd_tv(const RunConfig& c, std::ostream& out) {
  const EnsembleId e = ensemble_of(c);
  const TheoremVariant v = c.refined ? TheoremVariant::Refined : TheoremVariant::Main;
  const TvResult r = verify_tv_theorem(e, c.q, c.n, v, trunc_of(c));
  emit(
      c, out, to_json(r), [&](std::ostream& os) { write_csv(os, {r}); },
      [&](std::ostream& os) {
        os << std::setprecision(6) << r.ensemble.name() << " q=" << r.q << " n=" << r.n << "  TV in ["
           << to_double(r.tv.lo()) << ", " << to_double(r.tv.hi()) << "]  window [" << to_double(r.theorem_lower)
           << ", " << to_double(r.theorem_upper) << "]  " << (r.pass ? "PASS" : "FAIL") << '\n';
      });
  return r.pass ? kPass : kCheckFailed;
}

int cmd_stein(const RunConfig& c, std::ostream& out) {
  const EnsembleId e = resolve_ensemble(c.family, c.m, c.n);
  if (c.q < 2) throw UsageError("--q must be >= 2");
  if (c.k_max < 0) throw UsageError("--kmax must be >= 0");
  Report r = verify_solution_bounds(e, {c.q}, c.k_max);
  const SteinPair limit_pair = stein_pair(e, c.q, std::nullopt);
  const LimitPmf L = limit_pmf(e, c.q, c.k_max + 12, default_qprod_trunc(c.q));
  r.push_back({"registration " + e.name() + " limit", "a(k) p_{k-1} = b(k) p_k", registration_holds(limit_pair, L), {}});

  json extra = json::object();
  if (!c.target.empty()) {
    TargetSet A;
    for (long j : c.target) A.members.insert(j);
    const long k_top = std::max(*std::max_element(c.target.begin(), c.target.end()), 10L);
    if (k_top + 1 > L.trunc_k) throw UsageError("--target members must be below --kmax + 11");
    const SteinSolution sol = stein_solution(limit_pair, L, A, k_top);
    json values = json::array();
    bool residual_ok = true;
    for (long k = 0; k <= k_top + 1; ++k) values.push_back(to_string(round_outward(sol.values[k], 128)));
    for (long k = 0; k <= k_top; ++k) residual_ok = residual_ok && stein_residual(limit_pair, sol, k).contains_zero();
    extra["solution"] = {{"target", c.target}, {"prob_target", to_string(round_outward(sol.prob_target, 128))},
                         {"f", values}};
    r.push_back({"Stein equation residual", "a(k+1) f(k+1) - b(k) f(k) = h(k) - P(A)", residual_ok, {}});
  }
  return emit_report(c, out, r, extra);
}

int cmd_moments(const RunConfig& c, std::ostream& out) {
  const EnsembleId e = ensemble_of(c);
  return emit_report(c, out, moment_identities(e, c.q, c.n));
}

Report verify_cell(const RunConfig& c) {
  const EnsembleId e = ensemble_of(c);
  const TruncConfig t = trunc_of(c);
  Report r;
  r.push_back(tv_check(verify_tv_theorem(e, c.q, c.n, TheoremVariant::Main, t)));
  if (c.refined) {
    if (e.kind != EnsembleKind::Hermitian || c.q < 3) throw UsageError("--refined needs --ensemble hermitian and q >= 3");
    r.push_back(tv_check(verify_tv_theorem(e, c.q, c.n, TheoremVariant::Refined, t)));
  }
  if (e.kind == EnsembleKind::SkewCentroEven) r.push_back(tv_check(verify_skewcentro_even_via_reduction(c.q, c.n, t)));
  append(r, tv_consistency(e, c.q, c.n, t));
  append(r, moment_identities(e, c.q, c.n));
  append(r, verify_solution_bounds(e, {c.q}, c.k_max));
  if (e.kind == EnsembleKind::UniformRect) append(r, verify_stationarity(build_chain(c.q, c.n, c.m)));
  return r;
}

Report verify_all(const RunConfig& c) {
  if (c.q_max < 2 || c.n_max < 1 || c.m_max < 0) throw UsageError("--qmax >= 2, --nmax >= 1, --mmax >= 0 required");
  const TruncConfig t = trunc_of(c);
  std::vector<long> qs;
  for (long q = 2; q <= c.q_max; ++q) qs.push_back(q);
  std::vector<EnsembleId> ensembles = all_ensembles(0);
  for (long m = 1; m <= c.m_max; ++m) ensembles.push_back(EnsembleId::uniform(m));

  Report r;
  for (const auto& res : tv_grid(theorem_grid(ensembles, qs, 1, c.n_max), t, c.workers)) r.push_back(tv_check(res));
  for (long q : qs)
    for (long n = 2; n <= c.n_max; n += 2) r.push_back(tv_check(verify_skewcentro_even_via_reduction(q, n, t)));
  for (const auto& e : ensembles)
    for (long q : qs)
      for (long n = 1; n <= c.n_max; ++n) {
        if (!parity_ok(e, n)) continue;
        append(r, tv_consistency(e, q, n, t));
        append(r, moment_identities(e, q, n));
      }
  for (const auto& e : ensembles) append(r, verify_solution_bounds(e, qs, c.k_max));
  for (long q = 2; q <= std::max<long>(c.q_max, 2); ++q)
    for (const auto& ic : check_product_inequalities(q, 3 * c.n_max).checks) r.push_back(product_check(ic));
  for (long q : qs)
    for (long n = 1; n <= c.n_max; ++n)
      for (long m = 0; m <= c.m_max; ++m) append(r, verify_stationarity(build_chain(q, n, m)));
  return r;
}

int cmd_verify(const RunConfig& c, std::ostream& out) {
  const Report r = c.all ? verify_all(c) : verify_cell(c);
  return emit_report(c, out, r);
}

int cmd_sample(const RunConfig& c, std::ostream& out) {
  if (c.trials < 1) throw UsageError("--trials must be >= 1");
  if (c.workers < 1) throw UsageError("--workers must be >= 1");
  const EnsembleId e = ensemble_of(c);
  const EmpiricalPmf h = empirical_pmf(e, c.q, c.n, c.trials, c.seed, c.workers, realization_of(c.realize));
  emit(
      c, out, to_json(h),
      [&](std::ostream& os) {
        os << "k,count,empirical,exact\n" << std::setprecision(10);
        for (std::size_t k = 0; k < h.counts.size(); ++k)
          os << k << ',' << h.counts[k] << ',' << static_cast<double>(h.counts[k]) / static_cast<double>(h.trials) << ','
             << to_double(h.exact.probs(static_cast<Eigen::Index>(k))) << '\n';
      },
      [&](std::ostream& os) {
        os << h.ensemble.name() << " q=" << h.q << " n=" << h.n << " trials=" << h.trials << " seed=" << h.seed << '\n'
           << std::setprecision(6);
        for (std::size_t k = 0; k < h.counts.size(); ++k)
          os << "  k=" << pad(std::to_string(k), 4) << pad(std::to_string(h.counts[k]), 10)
             << to_double(h.exact.probs(static_cast<Eigen::Index>(k))) << '\n';
        os << "  empirical TV " << h.empirical_tv << "  chi2 " << h.chi2 << '\n';
      });
  return kPass;
}

int cmd_markov(const RunConfig& c, std::ostream& out) {
  if (c.q < 2 || c.n < 1 || c.m < 0) throw UsageError("--q >= 2, --n >= 1, --m >= 0 required");
  if (c.steps < 0) throw UsageError("--steps must be >= 0");
  const RankChain chain = build_chain(c.q, c.n, c.m);
  json extra = {{"chain", to_json(chain)}};
  Report r = verify_stationarity(chain);
  if (c.steps > 0) {
    const ChainSimulation sim = simulate_chain_vs_matrix(c.q, c.n, c.m, c.steps, c.seed, c.burn_in);
    extra["simulation"] = to_json(sim);
    Check chk{"simulation vs exact pmf", "occupation TV < 0.05 for chain and matrix process",
              sim.tv_chain < 0.05 && sim.tv_matrix < 0.05, {}};
    chk.detail = {{"tv_chain", sim.tv_chain}, {"tv_matrix", sim.tv_matrix}};
    r.push_back(std::move(chk));
  }
  return emit_report(c, out, r, extra);
}

int cmd_bench(const RunConfig& c, std::ostream& out) {
  if (c.sizes.empty()) throw UsageError("--sizes must not be empty");
  const auto rows = bench_rank(c.sizes, c.seed);
  bool agree = true;
  json j = json::array();
  for (const auto& b : rows) {
    agree = agree && b.rank_packed == b.rank_generic;
    j.push_back({{"size", b.size},
                 {"rank_packed", b.rank_packed},
                 {"rank_generic", b.rank_generic},
                 {"seconds_packed", b.seconds_packed},
                 {"seconds_generic", b.seconds_generic}});
  }
  auto csv = [&](std::ostream& os) {
    os << "size,rank_packed,rank_generic,seconds_packed,seconds_generic\n" << std::setprecision(6);
    for (const auto& b : rows)
      os << b.size << ',' << b.rank_packed << ',' << b.rank_generic << ',' << b.seconds_packed << ','
         << b.seconds_generic << '\n';
  };
  emit(c, out, j, csv, csv);
  return agree ? kPass : kCheckFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact rank distributions of random matrices over finite fields"};
  app.require_subcommand(1);
  RunConfig c;

  auto ensemble_flags = [&](CLI::App* s) {
    s->add_option("--ensemble", c.family, "uniform | symmetric | zerodiag | skewcentro | hermitian")
        ->check(CLI::IsMember({"uniform", "symmetric", "zerodiag", "skewcentro", "hermitian"}));
    s->add_option("--m", c.m, "column excess for uniform");
    s->add_option("--q", c.q, "field size");
  };
  auto format_flags = [&](CLI::App* s, const std::string& def) {
    s->add_option("--format", c.format, "json | csv | table")->check(CLI::IsMember({"json", "csv", "table"}))
        ->default_str(def);
    s->add_option("--out", c.out_path, "write output to this file");
  };
  std::map<std::string, std::function<int()>> handlers;
  std::map<std::string, std::string> default_format;
  auto sub = [&](const std::string& name, const std::string& help, const std::string& fmt,
                 std::function<int(const RunConfig&, std::ostream&)> fn) {
    CLI::App* s = app.add_subcommand(name, help);
    format_flags(s, fmt);
    default_format[name] = fmt;
    handlers[name] = [&c, &out, fn] { return fn(c, out); };
    return s;
  };

  auto* dist = sub("dist", "exact finite-n pmf", "json", cmd_dist);
  ensemble_flags(dist);
  dist->add_option("--n", c.n, "matrix size");

  auto* limit = sub("limit", "certified limiting pmf", "json", cmd_limit);
  ensemble_flags(limit);
  limit->add_option("--n", c.n, "parity selector for zerodiag/skewcentro");
  limit->add_option("--trunc-k", c.trunc_k, "last k kept explicitly");
  limit->add_option("--qprod-trunc", c.qprod_trunc, "infinite-product truncation");

  auto* tv = sub("tv", "certified TV distance against the stated window", "json", cmd_tv);
  ensemble_flags(tv);
  tv->add_option("--n", c.n, "matrix size");
  tv->add_flag("--refined", c.refined, "Hermitian window for q >= 3");
  tv->add_option("--trunc-k", c.trunc_k, "extra limit terms past the support");
  tv->add_option("--qprod-trunc", c.qprod_trunc, "infinite-product truncation");

  auto* stein = sub("stein", "Stein solution bounds", "json", cmd_stein);
  ensemble_flags(stein);
  stein->add_option("--n", c.n, "parity selector for zerodiag/skewcentro");
  stein->add_option("--kmax", c.k_max, "largest k checked explicitly");
  stein->add_option("--target", c.target, "members of A for an explicit solution f_A")->delimiter(',');

  auto* moments = sub("moments", "exact moment identities", "json", cmd_moments);
  ensemble_flags(moments);
  moments->add_option("--n", c.n, "matrix size");

  auto* verify = sub("verify", "run every check on one cell or the whole grid", "table", cmd_verify);
  ensemble_flags(verify);
  verify->add_option("--n", c.n, "matrix size");
  verify->add_flag("--all", c.all, "whole grid");
  verify->add_flag("--refined", c.refined, "also the Hermitian q >= 3 window");
  verify->add_option("--qmax", c.q_max, "grid: largest q");
  verify->add_option("--nmax", c.n_max, "grid: largest n");
  verify->add_option("--mmax", c.m_max, "grid: largest m for uniform");
  verify->add_option("--kmax", c.k_max, "Stein bounds: largest explicit k");
  verify->add_option("--workers", c.workers, "threads for the TV grid");

  auto* sample = sub("sample", "Monte-Carlo histogram against the exact pmf", "json", cmd_sample);
  ensemble_flags(sample);
  sample->add_option("--n", c.n, "matrix size");
  sample->add_option("--trials", c.trials, "number of samples");
  sample->add_option("--seed", c.seed, "master seed");
  sample->add_option("--workers", c.workers, "threads");
  sample->add_option("--realize", c.realize, "zerodiag realization: default | skew | symplectic");

  auto* markov = sub("markov", "rank chain: stationarity and simulation", "json", cmd_markov);
  markov->add_option("--q", c.q, "field size");
  markov->add_option("--n", c.n, "rows");
  markov->add_option("--m", c.m, "column excess");
  markov->add_option("--steps", c.steps, "simulated transitions after burn-in (0 skips)");
  markov->add_option("--burn-in", c.burn_in, "discarded transitions (default 10 n)");
  markov->add_option("--seed", c.seed, "master seed");

  auto* bench = sub("bench", "packed vs generic GF(2) rank timings", "csv", cmd_bench);
  bench->add_option("--sizes", c.sizes, "matrix sizes")->delimiter(',');
  bench->add_option("--seed", c.seed, "master seed");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kPass : kUsage;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  if (app.get_subcommands().front()->count("--format") == 0) c.format = default_format[name];
  try {
    return handlers.at(name)();
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kCheckFailed;
  }
}

}  // namespace rankdist::cli
