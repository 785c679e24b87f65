#include "fraccd/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace fraccd {

void QuadratureConfig::validate() const {
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw SpecViolation("rel_tol must lie in (0,1)");
  if (!(abs_tol > 0.0)) throw SpecViolation("abs_tol must be positive");
  if (!(split_radius > 0.0 && split_radius < tail_cutoff))
    throw SpecViolation("split_radius must satisfy 0 < r0 < tail_cutoff");
  if (max_subdivisions < 1) throw SpecViolation("max_subdivisions must be >= 1");
  if (!(min_panel_width > 0.0)) throw SpecViolation("min_panel_width must be positive");
}

OperatorValue& OperatorValue::operator+=(const OperatorValue& o) {
  value += o.value;
  quad_error += o.quad_error;
  tail_bound += o.tail_bound;
  evaluations += o.evaluations;
  converged = converged && o.converged;
  return *this;
}

OperatorValue OperatorValue::scaled(double s) const {
  OperatorValue r = *this;
  r.value *= s;
  r.quad_error *= std::abs(s);
  r.tail_bound *= std::abs(s);
  return r;
}

namespace {

// 15-point Kronrod nodes with embedded 7-point Gauss rule (QUADPACK dqk15).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PanelResult {
  Sample integral;   // value and propagated inner-error integral
  double err = 0.0;  // |K15 - G7|
};

PanelResult gk15(const SampledFn& f, double a, double b, std::int64_t& evals) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const Sample fc = f(c);
  double resk = kWgk[7] * fc.value;
  double resg = kWg[3] * fc.value;
  double errdens = kWgk[7] * fc.error;
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const Sample f1 = f(c - dx);
    const Sample f2 = f(c + dx);
    const double fsum = f1.value + f2.value;
    resk += kWgk[j] * fsum;
    if (j % 2 == 1) resg += kWg[j / 2] * fsum;
    errdens += kWgk[j] * (f1.error + f2.error);
  }
  evals += 15;
  PanelResult r;
  r.integral.value = resk * h;
  r.integral.error = errdens * h;
  r.err = std::abs(resk - resg) * std::abs(h);
  return r;
}

struct Panel {
  int piece;  // 0: identity coordinate, 1: log coordinate
  double a, b;
  Sample integral;
  double err;
};

struct PanelOrder {
  bool operator()(const std::pair<double, std::size_t>& x,
                  const std::pair<double, std::size_t>& y) const {
    if (x.first != y.first) return x.first < y.first;
    return x.second > y.second;  // older panel wins on ties, deterministic
  }
};

}  // namespace

OperatorValue integrate(const SampledFn& f, const Domain& dom, const QuadratureConfig& cfg,
                        double abs_tol_override) {
  cfg.validate();
  if (!(dom.lower < dom.upper)) throw InvalidInterval("integration interval is empty");
  const bool infinite = std::isinf(dom.upper);
  if (infinite && !(dom.tail_exponent < -1.0))
    throw NonIntegrableTail("tail envelope exponent must be < -1 for a semi-infinite domain");
  if (dom.grade_lower && !(dom.lower_exponent > -1.0))
    throw SingularityTooStrong("lower endpoint exponent must be > -1");

  const double abs_target = std::isnan(abs_tol_override) ? cfg.abs_tol : abs_tol_override;
  const double upper_eff = infinite ? std::max(cfg.tail_cutoff, dom.lower + cfg.split_radius)
                                    : dom.upper;

  OperatorValue out;
  std::vector<Panel> panels;
  std::priority_queue<std::pair<double, std::size_t>, std::vector<std::pair<double, std::size_t>>,
                      PanelOrder>
      heap;
  double grading_remainder = 0.0;

  const SampledFn flog = [&f](double t) {
    const double h = std::exp(t);
    Sample s = f(h);
    s.value *= h;
    s.error *= h;
    return s;
  };

  auto push_panel = [&](int piece, double a, double b) {
    Panel p;
    p.piece = piece;
    p.a = a;
    p.b = b;
    PanelResult r = gk15(piece == 0 ? f : flog, a, b, out.evaluations);
    p.integral = r.integral;
    p.err = r.err;
    panels.push_back(p);
    heap.emplace(p.err, panels.size() - 1);
  };

  // Assemble initial panels: graded core toward the lower endpoint, then a
  // log-substituted piece covering the remaining range.
  const double core_hi = std::min(upper_eff, dom.lower + cfg.split_radius);
  double log_lo = core_hi;
  if (dom.grade_lower && core_hi - dom.lower > cfg.min_panel_width) {
    const double w = core_hi - dom.lower;
    const double rem_denom = std::pow(2.0, dom.lower_exponent + 1.0) - 1.0;
    double hi = core_hi;
    for (int k = 0;; ++k) {
      const double lo = dom.lower + w * std::ldexp(1.0, -(k + 1));
      push_panel(0, lo, hi);
      const double rem = std::abs(panels.back().integral.value) / rem_denom;
      hi = lo;
      if (hi - dom.lower <= cfg.min_panel_width || (k >= 2 && rem <= 0.05 * abs_target) ||
          k >= 800) {
        grading_remainder = rem;
        break;
      }
    }
  } else if (core_hi > dom.lower) {
    push_panel(0, dom.lower, core_hi);
  }
  if (log_lo < upper_eff) {
    if (log_lo <= 0.0) {
      const double pivot = std::min(upper_eff, std::max(1.0, log_lo + 1.0));
      push_panel(0, log_lo, pivot);
      log_lo = pivot;
    }
    if (log_lo < upper_eff) push_panel(1, std::log(log_lo), std::log(upper_eff));
  }

  // Refinement loop: split the worst panel until the global target is met.
  // Running totals are kept incrementally; invalidated parents are excluded.
  double value_sum = 0.0, err_sum = grading_remainder;
  for (const Panel& p : panels) {
    value_sum += p.integral.value;
    err_sum += p.err;
  }
  int splits = 0;
  while (err_sum > std::max(abs_target, cfg.rel_tol * std::abs(value_sum))) {
    if (heap.empty()) break;
    if (splits >= cfg.max_subdivisions) {
      out.converged = false;
      break;
    }
    const auto [err, idx] = heap.top();
    heap.pop();
    if (err != panels[idx].err) continue;  // stale entry
    const Panel p = panels[idx];
    const double mid = 0.5 * (p.a + p.b);
    const double width = p.piece == 0 ? p.b - p.a : std::exp(p.b) - std::exp(p.a);
    if (width <= cfg.min_panel_width || mid <= p.a || mid >= p.b) {
      continue;  // unsplittable: keeps its contribution, never re-enters the heap
    }
    value_sum -= p.integral.value;
    err_sum -= p.err;
    panels[idx].err = -1.0;  // invalidate; replaced by the two halves
    panels[idx].integral = Sample{};
    push_panel(p.piece, p.a, mid);
    value_sum += panels.back().integral.value;
    err_sum += panels.back().err;
    push_panel(p.piece, mid, p.b);
    value_sum += panels.back().integral.value;
    err_sum += panels.back().err;
    ++splits;
  }

  // Deterministic final summation: sort panels by position.
  std::vector<const Panel*> live;
  live.reserve(panels.size());
  for (const Panel& p : panels)
    if (p.err >= 0.0) live.push_back(&p);
  std::sort(live.begin(), live.end(), [](const Panel* x, const Panel* y) {
    if (x->piece != y->piece) return x->piece < y->piece;
    return x->a < y->a;
  });
  double total = 0.0, err_total = grading_remainder, inner_err = 0.0;
  for (const Panel* p : live) {
    total += p->integral.value;
    err_total += p->err;
    inner_err += p->integral.error;
  }
  out.value = total;
  out.quad_error = err_total + inner_err;
  if (out.quad_error > std::max(abs_target, cfg.rel_tol * std::abs(out.value)) &&
      splits >= cfg.max_subdivisions)
    out.converged = false;

  if (infinite) {
    const Sample edge = f(upper_eff);
    ++out.evaluations;
    const double p = dom.tail_exponent;
    const double c_env = std::abs(edge.value) * std::pow(upper_eff, -p);
    out.tail_bound = c_env * std::pow(upper_eff, p + 1.0) / std::abs(p + 1.0);
    if (!std::isfinite(out.tail_bound)) out.tail_bound = 0.0;
  }
  return out;
}

OperatorValue integrate_adaptive(const RealFn& f, double a, double b,
                                 const QuadratureConfig& cfg) {
  if (std::isinf(a) || std::isinf(b))
    throw NonIntegrableTail("infinite endpoint requires a declared tail exponent");
  if (!(a < b)) throw InvalidInterval("integration interval is empty");
  const SampledFn fs = [&f](double x) { return Sample{f(x), 0.0}; };
  Domain dom;
  dom.lower = a;
  dom.upper = b;
  return integrate(fs, dom, cfg);
}

OperatorValue integrate_adaptive(const RealFn& f, double a, double b, double tail_exponent,
                                 const QuadratureConfig& cfg) {
  if (!(a < b)) throw InvalidInterval("integration interval is empty");
  const bool lo_inf = std::isinf(a), hi_inf = std::isinf(b);
  if ((lo_inf || hi_inf) && !(tail_exponent < -1.0))
    throw NonIntegrableTail("tail envelope exponent must be < -1");
  if (lo_inf && hi_inf) {
    OperatorValue pos = integrate_adaptive(f, 0.0, kInf, tail_exponent, cfg);
    OperatorValue neg =
        integrate_adaptive([&f](double x) { return f(-x); }, 0.0, kInf, tail_exponent, cfg);
    pos += neg;
    return pos;
  }
  if (lo_inf) {
    return integrate_adaptive([&f](double x) { return f(-x); }, -b, kInf, tail_exponent, cfg);
  }
  const SampledFn fs = [&f](double x) { return Sample{f(x), 0.0}; };
  Domain dom;
  dom.lower = a;
  dom.upper = b;
  dom.tail_exponent = tail_exponent;
  return integrate(fs, dom, cfg);
}

OperatorValue integrate_singular_kernel(const RealFn& g, double beta, const SingularSpec& spec,
                                        const QuadratureConfig& cfg) {
  if (!(beta > 0.0 && beta < 2.0)) throw DomainError("beta must lie in (0,2)");
  if (!(spec.vanish_exponent > beta))
    throw SingularityTooStrong("g must vanish faster than h^beta at 0");
  const bool infinite = std::isinf(spec.upper);
  if (infinite && !(spec.tail_growth < beta))
    throw NonIntegrableTail("g growth exponent must be < beta for a convergent tail");

  // Kernel applied in two halves so that huge |g| and tiny h^{-1-beta}
  // never meet in one over/underflowing product.
  const double half = -0.5 * (1.0 + beta);
  const SampledFn fs = [&g, half](double h) {
    const double k = std::pow(h, half);
    return Sample{(g(h) * k) * k, 0.0};
  };
  Domain dom;
  dom.lower = spec.lower;
  dom.upper = spec.upper;
  dom.grade_lower = true;
  dom.lower_exponent = spec.vanish_exponent - 1.0 - beta;
  if (infinite) dom.tail_exponent = spec.tail_growth - 1.0 - beta;
  return integrate(fs, dom, cfg);
}

OperatorValue integrate_squared_kernel(const RealFn& f, double beta, const SingularSpec& spec,
                                       const QuadratureConfig& cfg) {
  if (!(beta > 0.0 && beta < 2.0)) throw DomainError("beta must lie in (0,2)");
  if (!(spec.vanish_exponent > beta))
    throw SingularityTooStrong("f^2 must vanish faster than h^beta at 0");
  const bool infinite = std::isinf(spec.upper);
  if (infinite && !(spec.tail_growth < beta))
    throw NonIntegrableTail("f^2 growth exponent must be < beta for a convergent tail");

  const double half = -0.5 * (1.0 + beta);
  const SampledFn fs = [&f, half](double h) {
    const double s = f(h) * std::pow(h, half);
    return Sample{s * s, 0.0};
  };
  Domain dom;
  dom.lower = spec.lower;
  dom.upper = spec.upper;
  dom.grade_lower = true;
  dom.lower_exponent = spec.vanish_exponent - 1.0 - beta;
  if (infinite) dom.tail_exponent = spec.tail_growth - 1.0 - beta;
  return integrate(fs, dom, cfg);
}

OperatorValue integrate_wedge(const std::function<double(double, double)>& F,
                              const WedgeSpec& spec, const QuadratureConfig& cfg) {
  cfg.validate();
  const bool infinite = std::isinf(spec.outer_upper);
  if (infinite && !(spec.outer_tail_exponent < -1.0))
    throw NonIntegrableTail("outer tail exponent must be < -1 (wedge outer)");

  std::int64_t inner_evals = 0;
  bool inner_converged = true;
  const double inner_abs = cfg.abs_tol * spec.inner_tighten;

  const SampledFn outer = [&](double h) -> Sample {
    const double cap = std::min(h, spec.inner_upper_cap);
    if (cap <= spec.inner_lower_clip) return Sample{0.0, 0.0};
    const SampledFn inner_fn = [&F, h](double s) { return Sample{F(h, s), 0.0}; };
    Domain idom;
    idom.lower = spec.inner_lower_clip;
    idom.upper = cap;
    idom.grade_lower = spec.inner_lower_clip == 0.0;
    idom.lower_exponent = spec.inner_exponent;
    OperatorValue iv = integrate(inner_fn, idom, cfg, inner_abs);
    inner_evals += iv.evaluations;
    inner_converged = inner_converged && iv.converged;
    const double w = std::pow(h, 0.5 * spec.outer_scale_exponent);
    return Sample{(iv.value * w) * w, (iv.quad_error * w) * w};
  };

  Domain odom;
  odom.lower = spec.outer_lower;
  odom.upper = spec.outer_upper;
  odom.grade_lower = spec.outer_lower == 0.0;
  odom.lower_exponent = spec.outer_exponent;
  if (infinite) odom.tail_exponent = spec.outer_tail_exponent;
  OperatorValue out = integrate(outer, odom, cfg);
  out.evaluations += inner_evals;
  out.converged = out.converged && inner_converged;
  return out;
}

}  // namespace fraccd
