#pragma once

#include <vector>

#include "fraccd/gamma_ops.hpp"
#include "fraccd/profiles.hpp"
#include "fraccd/quadrature.hpp"

namespace fraccd {

enum class Verdict { VIOLATED, SATISFIED, INCONCLUSIVE };

const char* to_string(Verdict v);

/// Verdict on Gamma_2(u)(x) >= kappa Gamma(u)(x) + (1/N)(L u(x))^2 with
/// explicit uncertainty accounting: a strict inequality is only certified
/// when the deficit clears the combined quadrature and tail uncertainties.
struct CDReport {
  double x = 0.0;
  OperatorValue L_val, Gamma_val, Gamma2_val;
  double kappa = 0.0;
  double N_dim = kInf;
  double deficit = 0.0;             // Gamma2 - kappa Gamma - (1/N) L^2
  double total_uncertainty = 0.0;
  double N_star = kInf;             // L^2 / Gamma2; inf when Gamma2 <= uncertainty
  Verdict verdict = Verdict::INCONCLUSIVE;
};

CDReport cd_check(const ProfileFunction& u, double x, const CDParams& cd,
                  const FracParams& p, const QuadratureConfig& cfg);

/// One row of the eps-sweep: the scaled operator values whose boundedness
/// witnesses the C0 lower bound and the C1 upper bound.
struct SweepRow {
  double eps = 0.0;
  double eps_times_L = 0.0;
  double eps_times_Gamma2 = 0.0;
  double N_star = 0.0;
  double c_share = 0.0;  // (C+ + C-) / Gamma2
  double unc_L = 0.0;    // uncertainty of eps_times_L
  double unc_gamma2 = 0.0;
};

std::vector<SweepRow> sweep_eps(double beta, const std::vector<double>& eps_list,
                                const QuadratureConfig& cfg);

/// Deviations of L, Gamma, Gamma_2 at the origin from the lambda^beta,
/// lambda^beta, lambda^{2 beta} laws under u -> u(lambda .).
struct ScalingReport {
  double lambda = 1.0;
  double dev_L = 0.0, dev_Gamma = 0.0, dev_Gamma2 = 0.0;  // relative
  double tol_L = 0.0, tol_Gamma = 0.0, tol_Gamma2 = 0.0;  // 1e-5 + propagated
  bool pass = false;
};

ScalingReport verify_scaling(const ProfileFunction& u, double lambda,
                             const FracParams& p, const QuadratureConfig& cfg);

/// d = 2 check: L of the tensor lift w(x1,x2) = v(x1) at the origin by
/// genuine iterated 2-d quadrature versus A_{2,beta} times the 1-d value.
struct ReductionReport {
  double two_d_value = 0.0;
  double reduced_value = 0.0;  // A_{2,beta} * L^(1)(v)(0)
  double rel_deviation = 0.0;
  double rel_uncertainty = 0.0;
  bool pass = false;
};

ReductionReport verify_dimension_reduction(const ProfileFunction& v, double beta,
                                           const QuadratureConfig& cfg);

/// One point of the local-violation grid scan.
struct GridPointCheck {
  double x = 0.0;
  OperatorValue L_val, Gamma2_val;
  double n_star = kInf;
  bool violated = false;  // 0 < Gamma2(x) < mu L(x)^2 beyond uncertainties
};

struct LocalScan {
  double rho = 0.0;  // largest grid radius with violation at every |x| <= rho
  std::vector<GridPointCheck> points;  // x >= 0 half of the grid, ascending
};

/// Scans the default 17-point-per-axis grid of [-1/8, 1/8] (or the given
/// nonnegative radii) using evenness of u; throws NoViolationAtOrigin when
/// the origin itself fails.
LocalScan local_violation_scan(const ProfileFunction& u, double mu,
                               const FracParams& p, const QuadratureConfig& cfg,
                               const std::vector<double>& grid = {});

double local_violation_radius(const ProfileFunction& u, double mu,
                              const FracParams& p, const QuadratureConfig& cfg,
                              const std::vector<double>& grid = {});

/// Constructive witness selection for the compact-support CD violation.
/// The truncation radius is coupled to eps (ln N = min(1/(4 eps), 250), the
/// cap keeping N^2 inside double range) and eps is found by bisection as the
/// largest admissible value with N* above 1.2/mu.
struct WitnessSelection {
  CounterexampleSpec spec;
  double ln_N = 0.0;
  CDReport report;       // kappa = 0, N_dim = 1/mu at the origin
  int bisection_probes = 0;
};

WitnessSelection build_witness(double beta, double mu, const QuadratureConfig& cfg);

/// End-to-end ball counterexample: local witness, violation radius rho,
/// rescaling by M = R/rho, and numerical re-verification at sample radii.
struct BallRadiusCheck {
  double x = 0.0;            // rescaled radius, <= R
  bool violated = false;
  double n_star = kInf;
  double n_star_drift = 0.0;  // relative drift vs the local-scan value
};

struct BallReport {
  double R = 0.0, mu = 0.0, beta = 0.0;
  double rho = 0.0, M = 0.0;  // M = R / rho
  WitnessSelection witness;
  LocalScan local;
  std::vector<BallRadiusCheck> checks;  // 5 re-verified radii
  bool all_violated = false;
};

BallReport ball_counterexample(double R, double mu, double beta,
                               const QuadratureConfig& cfg);

/// Runs fn(i) for i in [0, n) on up to FRACCD_THREADS workers (hardware
/// concurrency when unset); caller-side aggregation stays index-addressed
/// and therefore deterministic.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace fraccd
