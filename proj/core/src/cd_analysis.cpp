#include "fraccd/cd_analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

namespace fraccd {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::VIOLATED: return "VIOLATED";
    case Verdict::SATISFIED: return "SATISFIED";
    case Verdict::INCONCLUSIVE: return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  std::size_t workers = std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  if (const char* env = std::getenv("FRACCD_THREADS")) {
    char* end = nullptr;
    const long parsed = std::strtol(env, &end, 10);
    if (end != env && parsed > 0) workers = static_cast<std::size_t>(parsed);
  }
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

CDReport cd_check(const ProfileFunction& u, double x, const CDParams& cd,
                  const FracParams& p, const QuadratureConfig& cfg) {
  cd.validate();
  p.validate();
  const FracParams p1{p.beta, 1};

  CDReport rep;
  rep.x = x;
  rep.kappa = cd.kappa;
  rep.N_dim = cd.N_dim;
  rep.L_val = frac_laplacian(u, x, p1, cfg);
  rep.Gamma2_val = gamma2(u, x, p1, cfg);
  // kappa = 0 makes the Gamma term exactly zero; skipping its quadrature also
  // admits profiles whose Gamma integral would not converge
  if (cd.kappa != 0.0) rep.Gamma_val = gamma(u, x, p1, cfg);
  if (p.dim > 1) {
    rep.L_val = lift_to_dim(rep.L_val, OperatorKind::L, p);
    rep.Gamma_val = lift_to_dim(rep.Gamma_val, OperatorKind::Gamma, p);
    rep.Gamma2_val = lift_to_dim(rep.Gamma2_val, OperatorKind::Gamma2, p);
  }

  const double L = rep.L_val.value, uL = rep.L_val.uncertainty();
  const double G2 = rep.Gamma2_val.value, uG2 = rep.Gamma2_val.uncertainty();
  const double inv_n = std::isinf(cd.N_dim) ? 0.0 : 1.0 / cd.N_dim;
  rep.deficit = G2 - cd.kappa * rep.Gamma_val.value - inv_n * L * L;
  rep.total_uncertainty = uG2 + std::abs(cd.kappa) * rep.Gamma_val.uncertainty() +
                          inv_n * (2.0 * std::abs(L) * uL + uL * uL);
  rep.N_star = G2 > uG2 ? L * L / G2 : kInf;
  if (rep.deficit + rep.total_uncertainty < 0.0)
    rep.verdict = Verdict::VIOLATED;
  else if (rep.deficit - rep.total_uncertainty > 0.0)
    rep.verdict = Verdict::SATISFIED;
  else
    rep.verdict = Verdict::INCONCLUSIVE;
  return rep;
}

std::vector<SweepRow> sweep_eps(double beta, const std::vector<double>& eps_list,
                                const QuadratureConfig& cfg) {
  const FracParams p{beta, 1};
  p.validate();
  for (double eps : eps_list) {
    CounterexampleSpec s;
    s.beta = beta;
    s.eps = eps;
    s.validate();
  }
  std::vector<SweepRow> rows(eps_list.size());
  parallel_for(eps_list.size(), [&](std::size_t i) {
    CounterexampleSpec s;
    s.beta = beta;
    s.eps = eps_list[i];
    const ProfileFunction u = make_u_eps(s);
    const OperatorValue L = frac_laplacian(u, 0.0, p, cfg);
    const OperatorValue G2 = gamma2(u, 0.0, p, cfg);
    const RegionDecomposition rd = gamma2_region_decomposition(u, p, cfg);
    SweepRow& r = rows[i];
    r.eps = s.eps;
    r.eps_times_L = s.eps * L.value;
    r.eps_times_Gamma2 = s.eps * G2.value;
    r.N_star = L.value * L.value / G2.value;
    r.c_share = (rd.c_plus.value + rd.c_minus.value) / G2.value;
    r.unc_L = s.eps * L.uncertainty();
    r.unc_gamma2 = s.eps * G2.uncertainty();
  });
  return rows;
}

ScalingReport verify_scaling(const ProfileFunction& u, double lambda,
                             const FracParams& p, const QuadratureConfig& cfg) {
  if (!(lambda > 0.0)) throw DomainError("verify_scaling requires lambda > 0");
  if (u(0.0) != 0.0) throw DomainError("verify_scaling requires u(0) = 0");
  const FracParams p1{p.beta, 1};
  const ProfileFunction v = scaled(u, lambda);
  const double fl = std::pow(lambda, p.beta);    // law for L and Gamma
  const double f2 = fl * fl;                     // law for Gamma2

  struct Pair {
    OperatorValue base, scaled_val;
    double factor;
  };
  const Pair pairs[3] = {
      {frac_laplacian(u, 0.0, p1, cfg), frac_laplacian(v, 0.0, p1, cfg), fl},
      {gamma(u, 0.0, p1, cfg), gamma(v, 0.0, p1, cfg), fl},
      {gamma2(u, 0.0, p1, cfg), gamma2(v, 0.0, p1, cfg), f2},
  };

  ScalingReport rep;
  rep.lambda = lambda;
  double* devs[3] = {&rep.dev_L, &rep.dev_Gamma, &rep.dev_Gamma2};
  double* tols[3] = {&rep.tol_L, &rep.tol_Gamma, &rep.tol_Gamma2};
  rep.pass = true;
  for (int k = 0; k < 3; ++k) {
    const double expected = pairs[k].factor * pairs[k].base.value;
    const double denom = std::max(std::abs(expected), 1e-300);
    *devs[k] = std::abs(pairs[k].scaled_val.value - expected) / denom;
    *tols[k] = 1e-5 + (pairs[k].scaled_val.uncertainty() +
                       pairs[k].factor * pairs[k].base.uncertainty()) /
                          denom;
    rep.pass = rep.pass && *devs[k] < *tols[k];
  }
  return rep;
}

ReductionReport verify_dimension_reduction(const ProfileFunction& v, double beta,
                                           const QuadratureConfig& cfg) {
  const FracParams p1{beta, 1};
  const FracParams p2{beta, 2};
  p1.validate();
  const double S = v.support_radius();
  if (!std::isfinite(S))
    throw DomainError("dimension-reduction check requires compact support");
  const double c2 = normalizing_constant(p2);
  const double A = reduction_constant(p2);
  const OperatorValue L1 = frac_laplacian(v, 0.0, p1, cfg);

  ReductionReport rep;
  rep.reduced_value = A * L1.value;
  if (!(S > 0.0)) {
    rep.pass = true;
    return rep;
  }

  // inner slice of the 2-d kernel: J(h) = \int_R (h^2 + y^2)^{-(2+beta)/2} dy
  std::int64_t inner_evals = 0;
  const double inner_abs = cfg.abs_tol * 0.1;
  auto J = [&](double h) -> OperatorValue {
    const double e = -0.5 * (2.0 + beta);
    Domain idom;
    idom.lower = 0.0;
    idom.upper = kInf;
    idom.tail_exponent = -(2.0 + beta);
    const SampledFn f = [h, e](double y) {
      return Sample{2.0 * std::pow(h * h + y * y, e), 0.0};
    };
    OperatorValue r = integrate(f, idom, cfg, inner_abs);
    inner_evals += r.evaluations;
    return r;
  };

  const SampledFn outer = [&](double h) -> Sample {
    const double D = v.increment(0.0, h) + v.increment(0.0, -h);
    if (D == 0.0) return Sample{0.0, 0.0};
    const OperatorValue j = J(h);
    return Sample{D * j.value, std::abs(D) * j.uncertainty()};
  };
  Domain odom;
  odom.lower = 0.0;
  odom.upper = S;
  odom.grade_lower = true;
  odom.lower_exponent = 1.0 - beta;
  OperatorValue L2 = integrate(outer, odom, cfg);
  // beyond S the second difference is exactly -2v(0) and J scales as h^{-1-beta}
  const double v0 = v(0.0);
  if (v0 != 0.0) {
    const OperatorValue jS = J(S);
    L2.value += -2.0 * v0 * jS.value * S / beta;
    L2.quad_error += 2.0 * std::abs(v0) * jS.uncertainty() * S / beta;
  }
  L2.evaluations += inner_evals;
  L2 = L2.scaled(c2);

  rep.two_d_value = L2.value;
  const double denom = std::max(std::abs(rep.reduced_value), 1e-300);
  rep.rel_deviation = std::abs(L2.value - rep.reduced_value) / denom;
  rep.rel_uncertainty =
      (L2.uncertainty() + std::abs(A) * L1.uncertainty()) / denom;
  rep.pass = rep.rel_deviation < 1e-4 + rep.rel_uncertainty;
  return rep;
}

namespace {

std::vector<double> default_grid() {
  std::vector<double> g;
  for (int k = 0; k <= 8; ++k) g.push_back(k / 64.0);  // x >= 0 half of 17 in [-1/8, 1/8]
  return g;
}

GridPointCheck check_point(const ProfileFunction& u, double x, double mu,
                           const FracParams& p, const QuadratureConfig& cfg) {
  GridPointCheck c;
  c.x = x;
  c.L_val = frac_laplacian(u, x, p, cfg);
  c.Gamma2_val = gamma2(u, x, p, cfg);
  const double G2 = c.Gamma2_val.value, uG2 = c.Gamma2_val.uncertainty();
  const double absL = std::abs(c.L_val.value), uL = c.L_val.uncertainty();
  const double L_low = std::max(absL - uL, 0.0);
  c.n_star = G2 > uG2 ? c.L_val.value * c.L_val.value / G2 : kInf;
  c.violated = (G2 - uG2 > 0.0) && (G2 + uG2 < mu * L_low * L_low);
  return c;
}

}  // namespace

LocalScan local_violation_scan(const ProfileFunction& u, double mu,
                               const FracParams& p, const QuadratureConfig& cfg,
                               const std::vector<double>& grid) {
  if (!(mu > 0.0)) throw DomainError("mu must be positive");
  std::vector<double> radii = grid.empty() ? default_grid() : grid;
  std::sort(radii.begin(), radii.end());
  if (radii.empty() || radii.front() != 0.0) radii.insert(radii.begin(), 0.0);

  LocalScan scan;
  scan.points.resize(radii.size());
  parallel_for(radii.size(), [&](std::size_t i) {
    scan.points[i] = check_point(u, radii[i], mu, p, cfg);
  });
  if (!scan.points.front().violated)
    throw NoViolationAtOrigin("0 < Gamma2 < mu L^2 fails at the origin");
  scan.rho = 0.0;
  for (const GridPointCheck& c : scan.points) {
    if (!c.violated) break;
    scan.rho = c.x;
  }
  return scan;
}

double local_violation_radius(const ProfileFunction& u, double mu,
                              const FracParams& p, const QuadratureConfig& cfg,
                              const std::vector<double>& grid) {
  return local_violation_scan(u, mu, p, cfg, grid).rho;
}

namespace {

double strict_eps_bound(double beta) {
  double ub = beta / 4.0;
  if (beta > 0.5) ub = std::min(ub, (beta - 0.5) / 4.0);
  if (beta > 1.0) ub = std::min(ub, (beta - 1.0) / 4.0);
  return ub;
}

CounterexampleSpec witness_spec(double beta, double eps) {
  CounterexampleSpec s;
  s.beta = beta;
  s.eps = eps;
  s.cutoff_N = std::exp(std::min(0.25 / eps, 250.0));
  return s;
}

}  // namespace

WitnessSelection build_witness(double beta, double mu, const QuadratureConfig& cfg) {
  if (!(mu > 0.0)) throw DomainError("mu must be positive");
  const FracParams p{beta, 1};
  p.validate();
  const CDParams cd{0.0, 1.0 / mu};
  const double target = 1.2 / mu;

  int evals = 0;
  auto probe = [&](double eps) {
    const CounterexampleSpec s = witness_spec(beta, eps);
    s.validate_strict();
    const ProfileFunction u = make_v_N_eps(s);
    ++evals;
    return cd_check(u, 0.0, cd, p, cfg);
  };

  double hi = 0.99 * strict_eps_bound(beta);
  double lo = 1e-4;
  if (!(lo < hi)) throw SpecViolation("no admissible eps range for this beta");

  CDReport rep_hi = probe(hi);
  if (rep_hi.N_star > target) {
    WitnessSelection w{witness_spec(beta, hi), std::log(witness_spec(beta, hi).cutoff_N),
                       rep_hi, evals};
    return w;
  }
  CDReport rep_lo = probe(lo);
  if (!(rep_lo.N_star > target))
    throw SpecViolation("requested mu is out of numerical reach for this beta");

  double best_eps = lo;
  CDReport best = rep_lo;
  for (int it = 0; it < 6; ++it) {
    const double mid = std::sqrt(lo * hi);  // bisection in log eps
    const CDReport rep = probe(mid);
    if (rep.N_star > target) {
      lo = mid;
      best_eps = mid;
      best = rep;
    } else {
      hi = mid;
    }
  }
  const CounterexampleSpec s = witness_spec(beta, best_eps);
  return WitnessSelection{s, std::log(s.cutoff_N), best, evals};
}

BallReport ball_counterexample(double R, double mu, double beta,
                               const QuadratureConfig& cfg) {
  if (!(R > 0.0)) throw DomainError("R must be positive");
  const FracParams p{beta, 1};

  BallReport rep;
  rep.R = R;
  rep.mu = mu;
  rep.beta = beta;
  rep.witness = build_witness(beta, mu, cfg);
  const ProfileFunction u = make_v_N_eps(rep.witness.spec);
  rep.local = local_violation_scan(u, mu, p, cfg);
  rep.rho = rep.local.rho;
  if (!(rep.rho > 0.0))
    throw NoViolationAtOrigin("violation does not extend beyond the origin");
  rep.M = R / rep.rho;
  const ProfileFunction v = scaled(u, 1.0 / rep.M);

  // re-verify at 5 rescaled radii spread over the violated part of the scan
  std::vector<const GridPointCheck*> covered;
  for (const GridPointCheck& c : rep.local.points)
    if (c.x <= rep.rho) covered.push_back(&c);
  const std::size_t n = covered.size();
  std::vector<std::size_t> picks;
  for (int k = 0; k < 5; ++k) {
    std::size_t idx = n <= 1 ? 0 : (k * (n - 1)) / 4;
    if (picks.empty() || picks.back() != idx) picks.push_back(idx);
  }
  rep.checks.resize(picks.size());
  parallel_for(picks.size(), [&](std::size_t i) {
    const GridPointCheck& base = *covered[picks[i]];
    const GridPointCheck c = check_point(v, rep.M * base.x, mu, p, cfg);
    BallRadiusCheck& out = rep.checks[i];
    out.x = c.x;
    out.violated = c.violated;
    out.n_star = c.n_star;
    const double denom = std::max(std::abs(base.n_star), 1e-300);
    out.n_star_drift = std::abs(c.n_star - base.n_star) / denom;
  });
  rep.all_violated = true;
  for (const BallRadiusCheck& c : rep.checks)
    rep.all_violated = rep.all_violated && c.violated;
  return rep;
}

}  // namespace fraccd
