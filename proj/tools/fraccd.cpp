// fraccd: command-line front end exposing every analysis as a reproducible
// batch run. stdout is JSON-lines; --out writes <out>.csv and <out>.json
// (manifest + rows) atomically. Exit codes: 0 success, 2 numerically
// inconclusive, 1 usage or constraint error.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fraccd/cd_analysis.hpp"
#include "json.hpp"

using namespace fraccd;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json manifest(const std::string& command, json parameters) {
  return {{"command", command},
          {"parameters", std::move(parameters)},
          {"tool_version", kVersion},
          {"timestamp", timestamp_utc()}};
}

json record(const OperatorValue& v) {
  return {{"value", v.value},
          {"quad_error", v.quad_error},
          {"tail_bound", v.tail_bound},
          {"evaluations", v.evaluations},
          {"converged", v.converged}};
}

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp);
    f << content;
    if (!f.flush()) throw std::runtime_error("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

// CSV body with a fixed header; '\n' endings, '.' decimal separator
std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
  std::string s;
  for (std::size_t i = 0; i < header.size(); ++i)
    s += (i ? "," : "") + header[i];
  s += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      s += (i ? "," : "") + fmt12(row[i]);
    s += '\n';
  }
  return s;
}

void emit_outputs(const std::string& out, const std::string& command, const json& params,
                  const std::vector<std::string>& header,
                  const std::vector<std::vector<double>>& rows) {
  if (out.empty()) return;
  json doc = manifest(command, params);
  json jrows = json::array();
  for (const auto& row : rows) {
    json r = json::object();
    for (std::size_t i = 0; i < header.size(); ++i) r[header[i]] = row[i];
    jrows.push_back(std::move(r));
  }
  doc["rows"] = std::move(jrows);
  write_atomic(out + ".csv", csv_table(header, rows));
  write_atomic(out + ".json", doc.dump(2) + "\n");
}

struct Options {
  double beta = 1.0;
  std::vector<double> eps = {0.1};
  double N = 32.0;
  double M = 1.0;
  double kappa = 0.0;
  double Ndim = kInf;
  double R = 10.0;
  double mu = 0.01;
  double x = 0.0;
  std::string out;
  std::string preset;
  std::string op = "L";
  std::string profile = "v_N_eps";
  std::string what = "lemmas";
  QuadratureConfig cfg;
};

CounterexampleSpec make_spec(const Options& o, double eps) {
  CounterexampleSpec s;
  s.beta = o.beta;
  s.eps = eps;
  s.cutoff_N = o.N;
  if (o.preset == "paper")
    s.validate_strict();
  else
    s.validate();
  return s;
}

ProfileFunction make_profile(const Options& o) {
  const double eps = o.eps.empty() ? 0.1 : o.eps.front();
  if (o.profile == "const") return constant_profile(1.0);
  if (o.profile == "gauss") return gaussian_profile();
  if (o.profile == "bump") return bump_profile();
  if (o.profile == "u_eps") return make_u_eps(make_spec(o, eps));
  if (o.profile == "v_N_eps") return make_v_N_eps(make_spec(o, eps));
  throw SpecViolation("unknown profile: " + o.profile +
                      " (expected const|gauss|bump|u_eps|v_N_eps)");
}

int code_for(bool converged) { return converged ? 0 : 2; }

int cmd_eval(const Options& o) {
  const ProfileFunction u = make_profile(o);
  const FracParams p{o.beta, 1};
  OperatorValue v;
  if (o.op == "L")
    v = frac_laplacian(u, o.x, p, o.cfg);
  else if (o.op == "gamma")
    v = gamma(u, o.x, p, o.cfg);
  else if (o.op == "gamma2")
    v = gamma2(u, o.x, p, o.cfg);
  else if (o.op == "L_M")
    v = frac_laplacian_truncated(u, o.x, o.M, p, o.cfg);
  else if (o.op == "gamma2_M")
    v = gamma2_truncated(u, o.x, o.M, p, o.cfg);
  else
    throw SpecViolation("unknown op: " + o.op +
                        " (expected L|gamma|gamma2|L_M|gamma2_M)");
  std::printf("%s\n", record(v).dump().c_str());
  return code_for(v.converged);
}

int cmd_sweep(const Options& o) {
  for (double e : o.eps) make_spec(o, e);  // constraint check up front
  const auto rows = sweep_eps(o.beta, o.eps, o.cfg);
  const std::vector<std::string> header = {"eps",     "eps_L", "eps_gamma2",
                                           "n_star",  "c_share", "unc_L",
                                           "unc_g2"};
  std::vector<std::vector<double>> table;
  for (const SweepRow& r : rows) {
    table.push_back({r.eps, r.eps_times_L, r.eps_times_Gamma2, r.N_star, r.c_share,
                     r.unc_L, r.unc_gamma2});
    std::printf("%s\n",
                json{{"eps", r.eps},
                     {"eps_L", r.eps_times_L},
                     {"eps_gamma2", r.eps_times_Gamma2},
                     {"n_star", r.N_star},
                     {"c_share", r.c_share}}
                    .dump()
                    .c_str());
  }
  emit_outputs(o.out, "sweep",
               {{"beta", o.beta}, {"eps", o.eps}, {"rel_tol", o.cfg.rel_tol}},
               header, table);
  return 0;
}

int cmd_decompose(const Options& o) {
  const double eps = o.eps.front();
  CounterexampleSpec s = make_spec(o, eps);
  const ProfileFunction u = make_u_eps(s);
  const FracParams p{o.beta, 1};
  RegionDecomposition d = gamma2_region_decomposition(u, p, o.cfg);
  const std::vector<std::string> header = {"region_index", "value", "quad_error",
                                           "tail_bound"};
  const OperatorValue* parts[6] = {&d.a_plus, &d.a_minus, &d.b_plus,
                                   &d.b_minus, &d.c_plus, &d.c_minus};
  const char* names[6] = {"A+", "A-", "B+", "B-", "C+", "C-"};
  std::vector<std::vector<double>> table;
  bool conv = true;
  for (int i = 0; i < 6; ++i) {
    table.push_back({(double)i, parts[i]->value, parts[i]->quad_error,
                     parts[i]->tail_bound});
    conv = conv && parts[i]->converged;
    json r = record(*parts[i]);
    r["region"] = names[i];
    std::printf("%s\n", r.dump().c_str());
  }
  json tot = record(d.total());
  tot["region"] = "total";
  std::printf("%s\n", tot.dump().c_str());
  emit_outputs(o.out, "decompose", {{"beta", o.beta}, {"eps", eps}}, header, table);
  return code_for(conv);
}

int cmd_cd_check(const Options& o) {
  const ProfileFunction u = make_profile(o);
  const FracParams p{o.beta, 1};
  const CDParams cd{o.kappa, o.Ndim};
  cd.validate();
  CDReport r = cd_check(u, o.x, cd, p, o.cfg);
  json j = {{"x", r.x},
            {"L", record(r.L_val)},
            {"gamma", record(r.Gamma_val)},
            {"gamma2", record(r.Gamma2_val)},
            {"kappa", r.kappa},
            {"N_dim", r.N_dim},
            {"deficit", r.deficit},
            {"total_uncertainty", r.total_uncertainty},
            {"n_star", r.N_star},
            {"verdict", to_string(r.verdict)}};
  std::printf("%s\n", j.dump().c_str());
  emit_outputs(o.out, "cd-check",
               {{"beta", o.beta},
                {"eps", o.eps.front()},
                {"N", o.N},
                {"kappa", o.kappa},
                {"Ndim", o.Ndim},
                {"x", o.x}},
               {"x", "L", "gamma", "gamma2", "deficit", "total_uncertainty", "n_star"},
               {{r.x, r.L_val.value, r.Gamma_val.value, r.Gamma2_val.value, r.deficit,
                 r.total_uncertainty, r.N_star}});
  return r.verdict == Verdict::INCONCLUSIVE ? 2 : 0;
}

int cmd_verify(const Options& o) {
  if (o.what == "lemmas") {
    int violations = 0;
    for (int i = 1; i <= 200; ++i) {
      const double g = 2.0 * i / 201.0;
      for (int j = 0; j < 200; ++j) {
        const double x = j / 199.0;
        const double f = lemma_f(g, x), gg = lemma_g(g, x);
        const bool ok =
            g >= 1.0 ? (f >= -1e-12 && f <= 4 * x + 1e-12 && gg >= -1e-12 &&
                        gg <= 4 * x + 1e-12)
                     : (f >= -std::pow(x, g) - 1e-12 && f <= 1e-12 &&
                        gg >= std::pow(x, g) - 1e-12 &&
                        gg <= 2 * std::pow(x, g) + 1e-12);
        violations += !ok;
      }
    }
    std::printf("%s\n", json{{"check", "lemmas"}, {"grid", "200x200"},
                             {"violations", violations}}
                            .dump()
                            .c_str());
    return violations == 0 ? 0 : 2;
  }
  if (o.what == "scaling") {
    const ProfileFunction u = make_profile(o);
    const FracParams p{o.beta, 1};
    bool all = true;
    for (double lam : {0.5, 2.0, 10.0}) {
      ScalingReport r = verify_scaling(u, lam, p, o.cfg);
      all = all && r.pass;
      std::printf("%s\n", json{{"check", "scaling"},
                               {"lambda", lam},
                               {"dev_L", r.dev_L},
                               {"dev_gamma", r.dev_Gamma},
                               {"dev_gamma2", r.dev_Gamma2},
                               {"pass", r.pass}}
                              .dump()
                              .c_str());
    }
    return all ? 0 : 2;
  }
  if (o.what == "reduction") {
    ReductionReport r = verify_dimension_reduction(bump_profile(), o.beta, o.cfg);
    std::printf("%s\n", json{{"check", "reduction"},
                             {"two_d", r.two_d_value},
                             {"reduced", r.reduced_value},
                             {"rel_deviation", r.rel_deviation},
                             {"pass", r.pass}}
                            .dump()
                            .c_str());
    return r.pass ? 0 : 2;
  }
  throw SpecViolation("unknown verification: " + o.what +
                      " (expected lemmas|scaling|reduction)");
}

int cmd_ball(const Options& o) {
  BallReport b = ball_counterexample(o.R, o.mu, o.beta, o.cfg);
  json points = json::array();
  std::vector<std::vector<double>> table;
  for (const GridPointCheck& c : b.local.points) {
    points.push_back({{"x", c.x * b.M},
                      {"n_star", c.n_star},
                      {"verdict", c.violated ? "VIOLATED" : "INCONCLUSIVE"}});
    table.push_back({c.x * b.M, c.L_val.value, c.Gamma2_val.value, c.n_star,
                     c.violated ? 1.0 : 0.0});
  }
  json rechecks = json::array();
  for (const BallRadiusCheck& c : b.checks)
    rechecks.push_back({{"x", c.x},
                        {"n_star", c.n_star},
                        {"n_star_drift", c.n_star_drift},
                        {"verdict", c.violated ? "VIOLATED" : "INCONCLUSIVE"}});
  json j = {{"R", b.R},
            {"mu", b.mu},
            {"beta", b.beta},
            {"rho", b.rho},
            {"M", b.M},
            {"witness",
             {{"eps", b.witness.spec.eps},
              {"ln_N", b.witness.ln_N},
              {"n_star", b.witness.report.N_star},
              {"verdict", to_string(b.witness.report.verdict)}}},
            {"grid", points},
            {"rechecks", rechecks},
            {"all_violated", b.all_violated}};
  std::printf("%s\n", j.dump().c_str());
  emit_outputs(o.out, "ball", {{"R", o.R}, {"mu", o.mu}, {"beta", o.beta}},
               {"x", "L", "gamma2", "n_star", "violated"}, table);
  return b.all_violated ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fractional-Laplacian Gamma-calculus toolkit"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* c) {
    c->add_option("--beta", o.beta, "order of the operator, in (0,2)");
    c->add_option("--eps", o.eps, "profile exponent offset(s)")->delimiter(',');
    c->add_option("--N", o.N, "cutoff parameter of v_N_eps");
    c->add_option("--kappa", o.kappa, "curvature lower bound");
    c->add_option("--Ndim", o.Ndim, "CD dimension parameter");
    c->add_option("--x", o.x, "evaluation point");
    c->add_option("--out", o.out, "output path stem (<out>.csv and <out>.json)");
    c->add_option("--rel-tol", o.cfg.rel_tol, "quadrature relative tolerance");
    c->add_option("--hmax", o.cfg.tail_cutoff, "numerical tail truncation radius");
    c->add_option("--preset", o.preset, "'paper' enforces the strict eps regime");
  };

  CLI::App* eval = app.add_subcommand("eval", "evaluate one operator at a point");
  eval->add_option("--op", o.op, "L | gamma | gamma2 | L_M | gamma2_M");
  eval->add_option("--profile", o.profile, "const | gauss | bump | u_eps | v_N_eps");
  eval->add_option("--M", o.M, "truncation radius for L_M / gamma2_M");
  add_common(eval);

  CLI::App* sweep = app.add_subcommand("sweep", "eps-sweep of the scaled bounds");
  add_common(sweep);

  CLI::App* deco = app.add_subcommand("decompose", "region decomposition of gamma2");
  add_common(deco);

  CLI::App* cdc = app.add_subcommand("cd-check", "CD(kappa,N) verdict at a point");
  cdc->add_option("--profile", o.profile, "const | gauss | bump | u_eps | v_N_eps");
  add_common(cdc);

  CLI::App* ver = app.add_subcommand("verify", "lemma / scaling / reduction checks");
  ver->add_option("--what", o.what, "lemmas | scaling | reduction");
  add_common(ver);

  CLI::App* ball = app.add_subcommand("ball", "CD failure on a ball of radius R");
  ball->add_option("--R", o.R, "ball radius");
  ball->add_option("--mu", o.mu, "violation level (N_dim = 1/mu)");
  add_common(ball);

  CLI11_PARSE(app, argc, argv);

  try {
    o.cfg.validate();
    if (eval->parsed()) return cmd_eval(o);
    if (sweep->parsed()) return cmd_sweep(o);
    if (deco->parsed()) return cmd_decompose(o);
    if (cdc->parsed()) return cmd_cd_check(o);
    if (ver->parsed()) return cmd_verify(o);
    if (ball->parsed()) return cmd_ball(o);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
