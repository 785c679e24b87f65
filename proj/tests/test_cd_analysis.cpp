#include <atomic>
#include <cmath>

#include "doctest.h"
#include "fraccd/cd_analysis.hpp"

using namespace fraccd;

namespace {

const QuadratureConfig cfg;

CounterexampleSpec spec_v(double beta, double eps, double N) {
  CounterexampleSpec s;
  s.beta = beta;
  s.eps = eps;
  s.cutoff_N = N;
  return s;
}

}  // namespace

TEST_CASE("cd_check trivial and boundary verdicts") {
  const FracParams p{1.0, 1};
  CDReport c = cd_check(constant_profile(4.0), 0.2, {0.0, 100.0}, p, cfg);
  CHECK(c.deficit == 0.0);
  CHECK(c.verdict == Verdict::INCONCLUSIVE);
  CHECK(std::isinf(c.N_star));

  // CD(0,inf) holds for anything with Gamma2 > 0
  const ProfileFunction v = make_v_N_eps(spec_v(1.0, 0.05, 8.0));
  CDReport s = cd_check(v, 0.0, {0.0, kInf}, p, cfg);
  CHECK(s.verdict == Verdict::SATISFIED);
  CHECK(s.deficit > 0.0);
  CHECK(s.N_star > 0.0);
}

TEST_CASE("cd_check violation for the compact witness") {
  const FracParams p{1.0, 1};
  // modest witness: N_dim below its N* makes (1/N)(Lu)^2 exceed Gamma2
  const ProfileFunction v = make_v_N_eps(spec_v(1.0, 0.05, 32.0));
  CDReport base = cd_check(v, 0.0, {0.0, kInf}, p, cfg);
  const double nstar = base.N_star;
  REQUIRE(std::isfinite(nstar));
  CDReport viol = cd_check(v, 0.0, {0.0, 0.1 * nstar}, p, cfg);
  CHECK(viol.verdict == Verdict::VIOLATED);
  CHECK(viol.deficit < -viol.total_uncertainty);
  CDReport sat = cd_check(v, 0.0, {0.0, 10.0 * nstar}, p, cfg);
  CHECK(sat.verdict == Verdict::SATISFIED);
}

TEST_CASE("cd_check with positive kappa includes the Gamma term") {
  const FracParams p{1.0, 1};
  const ProfileFunction v = make_v_N_eps(spec_v(1.0, 0.05, 8.0));
  CDReport with = cd_check(v, 0.0, {0.5, kInf}, p, cfg);
  CDReport without = cd_check(v, 0.0, {0.0, kInf}, p, cfg);
  CHECK(with.Gamma_val.value > 0.0);
  CHECK(with.deficit ==
        doctest::Approx(without.deficit - 0.5 * with.Gamma_val.value).epsilon(1e-9));
}

TEST_CASE("sweep rows satisfy the C0 bound and N* growth") {
  const double beta = 1.0;
  const double c0 = 2.0 * normalizing_constant({beta, 1});
  const std::vector<double> eps = {0.1, 0.05, 0.025};
  const auto rows = sweep_eps(beta, eps, cfg);
  REQUIRE(rows.size() == eps.size());
  double prev_nstar = 0.0;
  for (const SweepRow& r : rows) {
    CHECK(r.eps_times_L >= c0 - r.unc_L);
    CHECK(std::isfinite(r.eps_times_Gamma2));
    CHECK(r.N_star > prev_nstar);
    prev_nstar = r.N_star;
    CHECK(r.c_share > 0.0);
    CHECK(r.c_share <= 1.0 + 1e-9);
  }
  // C-region share dominates as eps shrinks
  CHECK(rows.back().c_share > 0.5);

  CHECK_THROWS_AS(sweep_eps(beta, {0.6}, cfg), SpecViolation);
}

TEST_CASE("scaling identities") {
  const FracParams p{1.0, 1};
  const ProfileFunction v = make_v_N_eps(spec_v(1.0, 0.05, 8.0));
  for (double lam : {0.5, 2.0, 10.0}) {
    ScalingReport r = verify_scaling(v, lam, p, cfg);
    CHECK(r.pass);
    CHECK(r.dev_L < r.tol_L);
    CHECK(r.dev_Gamma < r.tol_Gamma);
    CHECK(r.dev_Gamma2 < r.tol_Gamma2);
  }
  ScalingReport id = verify_scaling(v, 1.0, p, cfg);
  CHECK(id.dev_L == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("kappa term fades at rate lambda^beta under shrinking rescaling") {
  // for v_lam = u(x / lam): kappa Gamma / Gamma2 proportional to lambda^beta
  const FracParams p{1.0, 1};
  const ProfileFunction u = make_v_N_eps(spec_v(1.0, 0.05, 8.0));
  double prev_ratio = kInf;
  for (double lam : {1.0, 0.5, 0.25, 0.125}) {
    const ProfileFunction v = scaled(u, 1.0 / lam);
    OperatorValue g = gamma(v, 0.0, p, cfg);
    OperatorValue g2 = gamma2(v, 0.0, p, cfg);
    const double ratio = g.value / g2.value;
    CHECK(ratio < prev_ratio);
    // lambda-compensated ratio is scale-free
    CHECK(ratio / std::pow(lam, p.beta) ==
          doctest::Approx(gamma(u, 0.0, p, cfg).value / gamma2(u, 0.0, p, cfg).value)
              .epsilon(1e-6));
    prev_ratio = ratio;
  }
}

TEST_CASE("dimension reduction at d = 2") {
  for (double beta : {0.5, 1.0}) {
    ReductionReport r = verify_dimension_reduction(bump_profile(1.0, 1.0), beta, cfg);
    CHECK(r.pass);
    CHECK(r.rel_deviation < 1e-4 + r.rel_uncertainty);
  }
  ReductionReport z = verify_dimension_reduction(constant_profile(0.0), 1.0, cfg);
  CHECK(z.two_d_value == 0.0);
  CHECK(z.reduced_value == 0.0);
}

TEST_CASE("local violation scan on a strong witness") {
  const FracParams p{1.0, 1};
  CounterexampleSpec s = spec_v(1.0, 0.001, std::exp(250.0));
  const ProfileFunction u = make_v_N_eps(s);
  const double mu = 0.01;
  LocalScan scan = local_violation_scan(u, mu, p, cfg);
  REQUIRE(scan.points.size() == 9);  // x >= 0 half of the 17-point grid
  CHECK(scan.rho == doctest::Approx(0.125));
  for (const GridPointCheck& c : scan.points) {
    CHECK(c.violated);
    CHECK(c.Gamma2_val.value > 0.0);
    CHECK(c.n_star > 1.0 / mu);
    // proof margins: L and Gamma2 move by far less than 29% / 100%
    const GridPointCheck& o = scan.points.front();
    CHECK(std::abs(c.L_val.value - o.L_val.value) <= 0.29 * std::abs(o.L_val.value));
    CHECK(std::abs(c.Gamma2_val.value - o.Gamma2_val.value) <= o.Gamma2_val.value);
  }
  CHECK(local_violation_radius(u, mu, p, cfg) == doctest::Approx(0.125));

  // a weak witness fails at the origin itself
  const ProfileFunction weak = make_v_N_eps(spec_v(1.0, 0.05, 32.0));
  CHECK_THROWS_AS(local_violation_scan(weak, mu, p, cfg), NoViolationAtOrigin);
}

TEST_CASE("witness selection meets its target") {
  const double mu = 0.01;
  WitnessSelection w = build_witness(1.0, mu, cfg);
  CHECK(w.report.N_star > 1.2 / mu);
  CHECK(w.report.verdict == Verdict::VIOLATED);
  CHECK(w.spec.eps > 0.0);
  CHECK(w.ln_N == doctest::Approx(std::log(w.spec.cutoff_N)));
  CHECK(w.bisection_probes <= 12);
  CHECK_THROWS_AS(build_witness(1.0, 1e-9, cfg), SpecViolation);
}

TEST_CASE("ball counterexample end to end") {
  BallReport b = ball_counterexample(10.0, 0.01, 1.0, cfg);
  CHECK(b.all_violated);
  CHECK(b.rho > 0.0);
  CHECK(b.M == doctest::Approx(10.0 / b.rho));
  REQUIRE(b.checks.size() == 5);
  CHECK(b.checks.back().x == doctest::Approx(10.0));
  for (const BallRadiusCheck& c : b.checks) {
    CHECK(c.violated);
    CHECK(c.n_star_drift < 1e-4);
  }
}

TEST_CASE("parallel_for covers every index once and rethrows") {
  std::vector<std::atomic<int>> hits(257);
  for (auto& h : hits) h = 0;
  parallel_for(hits.size(), [&](std::size_t i) { ++hits[i]; });
  for (auto& h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(
      parallel_for(8, [](std::size_t i) {
        if (i == 3) throw DomainError("boom");
      }),
      DomainError);
}
