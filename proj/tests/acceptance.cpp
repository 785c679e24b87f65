// Acceptance gate: one pass/fail line per criterion, exit 0 only if all pass.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fft_oracle.hpp"
#include "fraccd/cd_analysis.hpp"
#include "json.hpp"

using namespace fraccd;
using nlohmann::json;

namespace {

const QuadratureConfig cfg;
int failures = 0;

void report(int idx, bool pass, const std::string& what, const std::string& detail) {
  std::printf("%s criterion %2d (%s): %s\n", pass ? "PASS" : "FAIL", idx, what.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

CounterexampleSpec spec_of(double beta, double eps, double N = 32.0) {
  CounterexampleSpec s;
  s.beta = beta;
  s.eps = eps;
  s.cutoff_N = N;
  return s;
}

const std::vector<double> kBetas = {0.5, 1.0, 1.5};
const std::vector<double> kEps = {0.1, 0.05, 0.025, 0.0125};

// rows of the eps sweep per beta, shared by criteria 1 and 2
std::vector<std::vector<SweepRow>> sweep_all() {
  std::vector<std::vector<SweepRow>> out;
  for (double beta : kBetas) out.push_back(sweep_eps(beta, kEps, cfg));
  return out;
}

void criterion_1(const std::vector<std::vector<SweepRow>>& rows, double slowest) {
  bool ok = slowest <= 60.0;
  std::ostringstream d;
  for (std::size_t b = 0; b < kBetas.size(); ++b) {
    const double c0 = 2.0 * normalizing_constant({kBetas[b], 1});
    for (const SweepRow& r : rows[b]) {
      const bool row_ok = r.eps_times_L >= c0 - r.unc_L;
      ok = ok && row_ok;
      if (!row_ok)
        d << " beta=" << kBetas[b] << " eps=" << r.eps << " eps*L=" << r.eps_times_L
          << " < " << c0 << ";";
    }
  }
  d << " max row time " << slowest << "s";
  report(1, ok, "C0 lower bound", "eps*L >= 2c_beta1 - unc on 3x4 sweep;" + d.str());
}

void criterion_2(const std::vector<std::vector<SweepRow>>& rows) {
  bool ok = true;
  std::ostringstream d;
  for (std::size_t b = 0; b < kBetas.size(); ++b) {
    double lo = kInf, hi = 0.0;
    for (const SweepRow& r : rows[b]) {
      lo = std::min(lo, r.eps_times_Gamma2);
      hi = std::max(hi, r.eps_times_Gamma2);
    }
    const bool bounded = hi / lo < 10.0;
    ok = ok && bounded;
    d << " beta=" << kBetas[b] << " spread=" << hi / lo;

    // region decomposition at the smallest eps: A + B < C and partition sums
    const FracParams p{kBetas[b], 1};
    const ProfileFunction u = make_u_eps(spec_of(kBetas[b], kEps.back()));
    RegionDecomposition dec = gamma2_region_decomposition(u, p, cfg);
    const double ab = dec.a_plus.value + dec.a_minus.value + dec.b_plus.value +
                      dec.b_minus.value;
    const double c = dec.c_plus.value + dec.c_minus.value;
    OperatorValue sum = dec.total();
    OperatorValue g2 = gamma2(u, 0.0, p, cfg);
    const bool parts = ab < c &&
                       std::abs(sum.value - g2.value) <=
                           sum.uncertainty() + g2.uncertainty() +
                               1e-6 * std::abs(g2.value);
    ok = ok && parts;
    if (!parts) d << " (A+B=" << ab << " C=" << c << " sum=" << sum.value
                  << " g2=" << g2.value << ")";
  }
  report(2, ok, "C1 boundedness", "eps*Gamma2 spread < 10, A+B < C at eps=0.0125;" +
                                      d.str());
}

void criterion_3() {
  const double mu = 0.01;
  WitnessSelection w = build_witness(1.0, mu, cfg);
  const CDReport& r = w.report;
  const bool ok = r.verdict == Verdict::VIOLATED &&
                  r.deficit < -3.0 * r.total_uncertainty;
  std::ostringstream d;
  d << "eps=" << w.spec.eps << " lnN=" << w.ln_N << " N*=" << r.N_star
    << " deficit=" << r.deficit << " unc=" << r.total_uncertainty << " verdict "
    << to_string(r.verdict);
  report(3, ok, "compact-support CD violation", d.str());
}

void criterion_4() {
  const FracParams p{1.0, 1};
  const ProfileFunction v = make_v_N_eps(spec_of(1.0, 0.05, 8.0));
  bool ok = true;
  std::ostringstream d;
  for (double lam : {0.5, 2.0, 10.0}) {
    ScalingReport r = verify_scaling(v, lam, p, cfg);
    ok = ok && r.pass;
    d << " lambda=" << lam << " devs=(" << r.dev_L << "," << r.dev_Gamma << ","
      << r.dev_Gamma2 << ")";
  }
  report(4, ok, "scaling identities", d.str());
}

void criterion_5() {
  const ProfileFunction gauss = gaussian_profile();
  const ProfileFunction bump = bump_profile(2.0, 1.0);
  const std::array<long, 5> pts = {0, 16, 32, 48, 64};
  bool ok = true;
  double worst = 0.0;
  for (double beta : kBetas) {
    for (const ProfileFunction* u : {&gauss, &bump}) {
      const auto grid =
          fft_oracle::frac_laplacian_grid([&](double x) { return (*u)(x); }, beta);
      for (long i : pts) {
        OperatorValue r = frac_laplacian(*u, (double)i * fft_oracle::kOracleDx,
                                         {beta, 1}, cfg);
        const double oracle = grid[fft_oracle::kOracleT / 2 + (std::size_t)i];
        const double rel = std::abs(r.value - oracle) / std::abs(oracle);
        worst = std::max(worst, rel);
        ok = ok && rel < 1e-6;
      }
    }
  }
  std::ostringstream d;
  d << "worst relative deviation " << worst << " over 2 profiles x 3 betas x 5 points";
  report(5, ok, "Fourier multiplier oracle", d.str());
}

void criterion_6() {
  bool ok = true;
  std::ostringstream d;
  for (double beta : {0.5, 1.0}) {
    ReductionReport r = verify_dimension_reduction(bump_profile(1.0, 1.0), beta, cfg);
    ok = ok && r.pass;
    d << " beta=" << beta << " dev=" << r.rel_deviation;
  }
  // closed form vs quadrature for B_alpha and C_{alpha,n}
  for (double alpha : {0.8, 1.25, 1.75}) {
    OperatorValue q = integrate_adaptive(
        [alpha](double z) { return std::pow(1.0 + z * z, -alpha); }, -kInf, kInf,
        -2.0 * alpha, cfg);
    const double rel = std::abs(q.value + q.tail_bound - b_alpha(alpha)) /
                       b_alpha(alpha);
    ok = ok && rel < 1e-8;
  }
  const double c_rel = std::abs(c_alpha_n(1.75, 2) - b_alpha(1.75) * b_alpha(1.25)) /
                       c_alpha_n(1.75, 2);
  ok = ok && c_rel < 1e-8;
  report(6, ok, "dimension reduction", "two-route L^(2) match and constants;" + d.str());
}

void criterion_7() {
  const auto t0 = std::chrono::steady_clock::now();
  int violations = 0;
  for (int i = 1; i <= 200; ++i) {
    const double g = 2.0 * i / 201.0;
    for (int j = 0; j < 200; ++j) {
      const double x = j / 199.0;
      const double f = lemma_f(g, x), gg = lemma_g(g, x);
      const bool row =
          g >= 1.0 ? (f >= -1e-12 && f <= 4 * x + 1e-12 && gg >= -1e-12 &&
                      gg <= 4 * x + 1e-12)
                   : (f >= -std::pow(x, g) - 1e-12 && f <= 1e-12 &&
                      gg >= std::pow(x, g) - 1e-12 &&
                      gg <= 2 * std::pow(x, g) + 1e-12);
      violations += !row;
    }
  }
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << violations << " violations on 200x200 grid in " << secs << "s";
  report(7, violations == 0 && secs < 1.0, "f/g bound lemma", d.str());
}

void criterion_8() {
  const FracParams p{1.0, 1};
  const ProfileFunction u = make_u_eps(spec_of(1.0, 0.05));
  OperatorValue limit = gamma2(u, 0.0, p, cfg);
  bool ok = true;
  std::ostringstream d;
  double prev = kInf;
  for (double N : {4.0, 8.0, 16.0, 32.0}) {
    OperatorValue g = gamma2(make_v_N_eps(spec_of(1.0, 0.05, N)), 0.0, p, cfg);
    const double gap = std::abs(g.value - limit.value);
    const bool mono = gap <= prev + g.uncertainty() + limit.uncertainty();
    ok = ok && mono;
    d << " N=" << N << " gap=" << gap;
    prev = gap;
  }
  // truncation identity: N > 2M makes v_N and u indistinguishable to Gamma2^M
  OperatorValue tv = gamma2_truncated(make_v_N_eps(spec_of(1.0, 0.05, 8.0)), 0.0, 2.0,
                                      p, cfg);
  OperatorValue tu = gamma2_truncated(u, 0.0, 2.0, p, cfg);
  const double rel = std::abs(tv.value - tu.value) /
                     std::max(1e-300, std::abs(tu.value));
  ok = ok && rel < 1e-9;
  d << "; truncation identity rel gap " << rel;
  report(8, ok, "compact-support convergence", d.str());
}

void criterion_9() {
  const char* bin = std::getenv("FRACCD_BIN");
  if (!bin) {
    report(9, false, "ball theorem end-to-end", "FRACCD_BIN not set");
    return;
  }
  const std::string cmd = std::string(bin) + " ball --R 10 --mu 0.01 --beta 1";
  std::string out;
  std::array<char, 4096> buf{};
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    report(9, false, "ball theorem end-to-end", "failed to launch " + cmd);
    return;
  }
  while (std::fgets(buf.data(), (int)buf.size(), pipe)) out += buf.data();
  const int st = pclose(pipe);
  const int code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  bool ok = code == 0;
  std::ostringstream d;
  d << "exit " << code;
  try {
    json j = json::parse(out.substr(0, out.find('\n')));
    ok = ok && j["all_violated"].get<bool>();
    for (const auto& g : j["grid"]) ok = ok && g["verdict"] == "VIOLATED";
    double drift = 0.0;
    for (const auto& c : j["rechecks"]) {
      ok = ok && c["verdict"] == "VIOLATED";
      drift = std::max(drift, c["n_star_drift"].get<double>());
    }
    ok = ok && drift < 1e-4;
    d << ", all_violated=" << j["all_violated"].get<bool>() << ", max N* drift "
      << drift;
  } catch (const std::exception& e) {
    ok = false;
    d << ", bad output: " << e.what();
  }
  report(9, ok, "ball theorem end-to-end", d.str());
}

void criterion_10() {
  // Positivity is checked against the reported uncertainty, so a loose
  // tolerance is enough; the default 1e-8 makes slowly decaying draws
  // (beta near 2, u_eps) cost minutes each for no extra verdict power.
  QuadratureConfig cfg = ::cfg;
  cfg.rel_tol = 1e-5;
  cfg.abs_tol = 1e-9;
  std::mt19937 rng(20260826);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const FracParams base{1.0, 1};
  bool ok = true;
  std::ostringstream d;
  int checked = 0;
  while (checked < 20) {
    const int kind = (int)(U(rng) * 4.0);
    double beta = 0.3 + 1.5 * U(rng);
    OperatorValue g2;
    if (kind == 0) {
      const double eps = 0.01 + 0.4 * (beta / 2.0 - 0.01) * U(rng);
      CounterexampleSpec s = spec_of(beta, eps);
      try {
        s.validate();
      } catch (const SpecViolation&) {
        continue;  // redraw: eps range tightens for beta > 1
      }
      g2 = gamma2(make_u_eps(s), 0.0, {beta, 1}, cfg);
    } else if (kind == 1) {
      double eps = 0.01 + 0.2 * U(rng);
      CounterexampleSpec s = spec_of(beta, eps, 4.0 + 28.0 * U(rng));
      try {
        s.validate_strict();
      } catch (const SpecViolation&) {
        continue;  // redraw: strict regime rejects this (beta, eps)
      }
      g2 = gamma2(make_v_N_eps(s), 4.0 * U(rng), {beta, 1}, cfg);
    } else if (kind == 2) {
      g2 = gamma2(bump_profile(0.5 + 2.0 * U(rng), 0.1 + 2.0 * U(rng)),
                  2.0 * U(rng), {beta, 1}, cfg);
    } else {
      g2 = gamma2(gaussian_profile(), 0.0, {beta, 1}, cfg);
    }
    ++checked;
    if (g2.value < -g2.uncertainty()) {
      ok = false;
      d << " draw " << checked << " negative: " << g2.value;
    }
  }
  (void)base;
  report(10, ok, "global positivity", "Gamma2 >= -uncertainty on 20 random draws;" +
                                          d.str());
}

}  // namespace

int main() {
  // criteria 1 and 2 share the 3x4 sweep; time the slowest row for criterion 1
  double slowest = 0.0;
  std::vector<std::vector<SweepRow>> rows;
  for (double beta : kBetas) {
    const auto t0 = std::chrono::steady_clock::now();
    rows.push_back(sweep_eps(beta, kEps, cfg));
    slowest = std::max(slowest, seconds_since(t0) / (double)kEps.size());
  }
  criterion_1(rows, slowest);
  criterion_2(rows);
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  std::printf("%d of 10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
