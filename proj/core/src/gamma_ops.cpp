#include "fraccd/gamma_ops.hpp"

#include <cmath>
#include <numbers>

namespace fraccd {

namespace {

constexpr double kPi = std::numbers::pi;

// |Gamma(-beta/2)| = pi / (sin(pi beta/2) Gamma(1+beta/2)) by reflection;
// avoids tgamma at negative arguments.
double abs_gamma_neg_half(double beta) {
  return kPi / (std::sin(0.5 * kPi * beta) * std::tgamma(1.0 + 0.5 * beta));
}

OperatorValue zero_value() { return OperatorValue{}; }

}  // namespace

void FracParams::validate() const {
  if (!(beta > 0.0 && beta < 2.0)) throw SpecViolation("beta must lie in (0,2)");
  if (dim < 1) throw SpecViolation("dim must be >= 1");
}

void CDParams::validate() const {
  if (!(N_dim > 0.0)) throw SpecViolation("N_dim must be positive");
}

double normalizing_constant(const FracParams& p) {
  p.validate();
  return std::pow(2.0, p.beta) * std::tgamma(0.5 * (p.dim + p.beta)) /
         (std::pow(kPi, 0.5 * p.dim) * abs_gamma_neg_half(p.beta));
}

double b_alpha(double alpha) {
  if (!(2.0 * alpha > 1.0)) throw DomainError("b_alpha requires 2 alpha > 1");
  return std::sqrt(kPi) * std::tgamma(alpha - 0.5) / std::tgamma(alpha);
}

double c_alpha_n(double alpha, int n) {
  if (n < 0) throw DomainError("c_alpha_n requires n >= 0");
  if (!(2.0 * alpha > n)) throw DomainError("c_alpha_n requires 2 alpha > n");
  double prod = 1.0;
  for (int j = 0; j < n; ++j) prod *= b_alpha(alpha - 0.5 * j);
  return prod;
}

double reduction_constant(const FracParams& p) {
  p.validate();
  if (p.dim == 1) return 1.0;
  const FracParams one{p.beta, 1};
  return normalizing_constant(p) *
         c_alpha_n(0.5 * (p.dim + p.beta), p.dim - 1) /
         normalizing_constant(one);
}

namespace {

void require_1d(const FracParams& p) {
  p.validate();
  if (p.dim != 1)
    throw DomainError("operators evaluate in 1-d; use lift_to_dim for d > 1");
}

struct SupportInfo {
  double S = kInf;   // flat radius: all increments vanish beyond it
  bool compact = false;
  bool trivial = false;  // identically constant
  double far = 0.0;      // value on |y| >= S when compact
};

SupportInfo support_of(const ProfileFunction& u) {
  SupportInfo s;
  s.S = u.flat_radius();
  s.compact = std::isfinite(s.S);
  s.far = s.compact ? u.far_value() : 0.0;
  s.trivial = s.compact && !(s.S > 0.0);
  return s;
}

}  // namespace

namespace {

// Centered second difference of u about x. The two O(h) increments cancel to
// O(h^2) only analytically; in floating point the cancellation leaves an
// absolute noise floor that the kernel h^{-1-beta} amplifies without bound as
// h -> 0. The core below a measured cutoff is therefore replaced by its
// Taylor value, with the curvature taken from a Richardson pair at a step
// large enough to sit above the noise.
struct SecondDiff {
  RealFn diff;
  double cutoff = 0.0;    // integration starts here
  double core = 0.0;      // exact \int_0^cutoff diff(h) h^{-1-beta} dh
  double core_err = 0.0;  // truncated-Taylor residual
};

SecondDiff second_difference(const ProfileFunction& u, double x, double beta,
                             double upper, const QuadratureConfig& cfg) {
  SecondDiff sd;
  sd.diff = [&u, x](double h) {
    return u.increment(x, x + h) + u.increment(x, x - h);
  };
  const double h0 = 1e-4;
  const double d1 = sd.diff(h0) / (h0 * h0);
  const double d2 = sd.diff(0.5 * h0) / (0.25 * h0 * h0);
  const double u2 = (4.0 * d2 - d1) / 3.0;           // u''(x)
  const double c2 = (d1 - d2) / (0.75 * h0 * h0);    // u''''(x)/12
  const double hn = 1e-9;
  const double noise = std::abs(sd.diff(hn) - u2 * hn * hn);
  if (!(noise > 0.0)) return sd;
  // smallest cutoff whose discarded noise mass stays below the quadrature
  // floor, clipped to the domain and to the Taylor radius of convergence
  double a = std::pow(noise / (beta * cfg.abs_tol), 1.0 / beta);
  a = std::min(a, 0.1 * std::min(upper, cfg.split_radius));
  if (u2 != 0.0 && c2 != 0.0) a = std::min(a, 0.3 * std::sqrt(std::abs(u2 / c2)));
  if (!(a > cfg.min_panel_width)) return sd;
  sd.cutoff = a;
  sd.core = u2 * std::pow(a, 2.0 - beta) / (2.0 - beta) +
            c2 * std::pow(a, 4.0 - beta) / (4.0 - beta);
  sd.core_err = std::abs(c2) * a * a * std::pow(a, 4.0 - beta) / (4.0 - beta) +
                noise * std::pow(a, -beta) / beta;
  return sd;
}

}  // namespace

OperatorValue frac_laplacian(const ProfileFunction& u, double x, const FracParams& p,
                             const QuadratureConfig& cfg) {
  require_1d(p);
  const double beta = p.beta;
  const double c = normalizing_constant(p);
  const SupportInfo sup = support_of(u);
  if (sup.trivial) return zero_value();
  const double g = u.growth_exponent();
  if (!sup.compact && !(g < beta))
    throw GrowthTooFast("frac_laplacian requires growth_exponent < beta");

  const double R = sup.compact ? sup.S + std::abs(x) : cfg.tail_cutoff;
  const SecondDiff sd = second_difference(u, x, beta, R, cfg);
  SingularSpec sp;
  sp.vanish_exponent = 2.0;
  sp.lower = sd.cutoff;
  sp.upper = R;
  OperatorValue r = integrate_singular_kernel(sd.diff, beta, sp, cfg);
  r.value += sd.core;
  r.quad_error += sd.core_err;
  // beyond R the difference splits into -2(u(x) - far), integrated exactly,
  // and for noncompact u the remaining u(x+h) + u(x-h), integrated through
  // its sampled power-law asymptote
  const double ux = u(x) - sup.far;
  if (ux != 0.0) r.value += -2.0 * ux * std::pow(R, -beta) / beta;
  if (!sup.compact) {
    const double up = u(x + R), um = u(x - R);
    if (up != 0.0 || um != 0.0) {
      const double far = (up + um) * std::pow(R, -beta) / (beta - g);
      r.value += far;
      // the asymptote sampled at R drifts by O(|x|/R) over the far field
      r.tail_bound += std::abs(far) * (std::abs(g) + 1.0) * (std::abs(x) + 1.0) / R;
    }
  }
  return r.scaled(c);
}

OperatorValue gamma(const ProfileFunction& u, double x, const FracParams& p,
                    const QuadratureConfig& cfg) {
  require_1d(p);
  const double beta = p.beta;
  const double c = normalizing_constant(p);
  const SupportInfo sup = support_of(u);
  if (sup.trivial) return zero_value();
  const double g = u.growth_exponent();
  if (!sup.compact && !(2.0 * g < beta))
    throw GrowthTooFast("gamma requires 2 growth_exponent < beta");

  auto side = [&](double sgn) {
    const RealFn f = [&u, x, sgn](double h) { return u.increment(x, x + sgn * h); };
    SingularSpec sp;
    sp.vanish_exponent = 2.0;
    const double R = sup.compact ? sup.S + std::abs(x) : cfg.tail_cutoff;
    sp.upper = R;
    OperatorValue r = integrate_squared_kernel(f, beta, sp, cfg);
    // beyond R the increment is far - u(x) plus, for noncompact u, a far
    // field integrated through its sampled power-law asymptote
    const double ux = u(x) - sup.far;
    if (ux != 0.0) r.value += ux * ux * std::pow(R, -beta) / beta;
    if (!sup.compact) {
      const double uf = u(x + sgn * R);
      if (uf != 0.0) {
        const double far = (uf * uf / (beta - 2.0 * g) - 2.0 * ux * uf / (beta - g)) *
                           std::pow(R, -beta);
        r.value += far;
        r.tail_bound += std::abs(far) * (2.0 * std::abs(g) + 1.0) * (std::abs(x) + 1.0) / R;
      }
    }
    return r;
  };
  OperatorValue r = side(1.0);
  r += side(-1.0);
  return r.scaled(c);
}

namespace {

// Reduced wedge form at the origin for even u; constants drop out through
// increments from 0, so u(0) != 0 needs no special casing.
OperatorValue gamma2_wedge_origin(const ProfileFunction& u, const FracParams& p,
                                  const QuadratureConfig& cfg, double upper_override) {
  const double beta = p.beta;
  const double c = normalizing_constant(p);
  const SupportInfo sup = support_of(u);
  if (sup.trivial) return zero_value();
  const double g = u.growth_exponent();
  const bool truncated = std::isfinite(upper_override);
  if (!truncated && !sup.compact && !(g < beta))
    throw GrowthTooFast("gamma2 wedge requires growth_exponent < beta");

  // quarter of the h-kernel goes inside each squared bracket, the remaining
  // half through the engine's outer split; keeps every intermediate
  // representable at support radii near the double range
  const double half = 0.5 * (1.0 + beta);
  const double quarter = 0.25 * (1.0 + beta);
  const auto F = [&u, half, quarter](double h, double s) {
    const double kq = std::pow(h, -quarter);
    const double ks = std::pow(s, -half);
    const double bp = u.increment(h, h + s) - u.increment(0.0, s);
    const double bm = -u.increment(h - s, h) - u.increment(0.0, s);
    const double a = (bp * ks) * kq;
    const double b = (bm * ks) * kq;
    return a * a + b * b;
  };

  WedgeSpec ws;
  ws.inner_exponent = 1.0 - beta;
  ws.outer_exponent = 3.0 - 2.0 * beta;
  ws.outer_scale_exponent = -half;
  OperatorValue r;
  if (truncated) {
    ws.outer_upper = upper_override;
    r = integrate_wedge(F, ws, cfg);
  } else if (sup.compact) {
    const double S = sup.S;
    ws.outer_upper = 2.0 * S;
    r = integrate_wedge(F, ws, cfg);
    // exact outer tail: for h > 2S the brackets decouple across the support,
    // so the inner integral is 2K + a reflected-support remainder
    SingularSpec ksp;
    ksp.vanish_exponent = 2.0;
    ksp.upper = S;
    const RealFn f0 = [&u](double s) { return u.increment(0.0, s); };
    const OperatorValue K = integrate_squared_kernel(f0, beta, ksp, cfg);
    const double tail_kernel = std::pow(2.0 * S, -beta) / beta;
    r.value += 2.0 * K.value * tail_kernel;
    r.quad_error += 2.0 * K.uncertainty() * tail_kernel;
    r.evaluations += K.evaluations;
    // remainder bound via the rescaled L2 mass of u on (0,S); the scale is
    // applied in split halves so it cannot underflow on its own
    const double sc = std::pow(S, -0.25 * (1.0 + 2.0 * beta));
    const OperatorValue Q = integrate_adaptive(
        [&u, sc](double y) {
          const double w = (u.increment(0.0, y) * sc) * sc;
          return w * w;
        },
        0.0, S, cfg);
    r.tail_bound += (Q.value + Q.uncertainty()) * std::pow(2.0, -beta) / beta;
    r.evaluations += Q.evaluations;
  } else {
    ws.outer_tail_exponent = 2.0 * (g - beta) - 1.0;
    r = integrate_wedge(F, ws, cfg);
  }
  return r.scaled(4.0 * c * c);
}

// Full double integral split over sign quadrants; compact support makes the
// inner and outer tails exact. upper_override clips both axes to (0, M].
OperatorValue gamma2_full_impl(const ProfileFunction& u, double x, const FracParams& p,
                               const QuadratureConfig& cfg, double upper_override) {
  const double beta = p.beta;
  const double c = normalizing_constant(p);
  const SupportInfo sup = support_of(u);
  if (sup.trivial) return zero_value();
  const bool truncated = std::isfinite(upper_override);
  if (!sup.compact && !truncated)
    throw GrowthTooFast("general-x gamma2 requires compact support");

  // quarter-split of the h-kernel, as in the wedge route
  const double half = 0.5 * (1.0 + beta);
  const double quarter = 0.25 * (1.0 + beta);
  const double T_base = truncated ? upper_override : sup.S + std::abs(x);
  if (!(T_base > 0.0)) return zero_value();

  std::int64_t inner_evals = 0;
  bool inner_ok = true;
  const double inner_abs = cfg.abs_tol * 0.1;

  auto quadrant = [&](double s1, double s2) {
    // In a mixed quadrant the s1 h leg re-enters the flat radius at s ~ h, so
    // the bracket is h-dependent out to twice the base radius; doubling the
    // truncation keeps s >= h/2 in the remaining strip, which yields the
    // computable tail bound added below.
    const bool mixed = s1 * s2 < 0.0;
    const double T_out = !truncated && mixed ? 2.0 * T_base : T_base;
    const SampledFn outer = [&](double h) -> Sample {
      const double kq = std::pow(h, -quarter);
      const double T_in = truncated ? upper_override : sup.S + std::abs(x) + h;
      const SampledFn inner_fn = [&u, x, s1, s2, h, kq, half](double s) {
        // group second differences by the narrower increment to avoid
        // cancellation between two wide increments
        const double b =
            s <= h ? u.increment(x + s1 * h, x + s1 * h + s2 * s) -
                         u.increment(x, x + s2 * s)
                   : u.increment(x + s2 * s, x + s2 * s + s1 * h) -
                         u.increment(x, x + s1 * h);
        const double v = (b * std::pow(s, -half)) * kq;
        return Sample{v * v, 0.0};
      };
      Domain idom;
      idom.lower = 0.0;
      idom.upper = T_in;
      idom.grade_lower = true;
      idom.lower_exponent = 1.0 - beta;
      OperatorValue iv = integrate(inner_fn, idom, cfg, inner_abs);
      inner_evals += iv.evaluations;
      inner_ok = inner_ok && iv.converged;
      double val = iv.value;
      if (!truncated) {
        // beyond T_in the bracket is exactly u(x) - u(x + s1 h)
        const double dh = (u.increment(x, x + s1 * h) * kq) *
                          std::pow(T_in, -0.5 * beta);
        val += dh * dh / beta;
      }
      // remaining half of the h-kernel
      return Sample{(val * kq) * kq, (iv.quad_error * kq) * kq};
    };
    Domain odom;
    odom.lower = 0.0;
    odom.upper = T_out;
    odom.grade_lower = true;
    odom.lower_exponent = 1.0 - beta;
    OperatorValue r = integrate(outer, odom, cfg);
    if (!truncated) {
      // beyond T_out the bracket is exactly u(x) - u(x + s2 s), h-independent
      const RealFn f = [&u, x, s2](double s) { return u.increment(x, x + s2 * s); };
      SingularSpec sp;
      sp.vanish_exponent = 2.0;
      sp.upper = sup.S + std::abs(x);
      OperatorValue G = integrate_squared_kernel(f, beta, sp, cfg);
      const double ux = u(x) - sup.far;
      if (ux != 0.0)
        G.value += ux * ux * std::pow(sup.S + std::abs(x), -beta) / beta;
      const double tk = std::pow(T_out, -beta) / beta;
      r.value += G.value * tk;
      r.quad_error += G.uncertainty() * tk;
      r.evaluations += G.evaluations;
      if (mixed) {
        // strip h > T_out, s = h - s1 (z - x), |z| < S: the discarded mass is
        // bounded by 2^{1+beta}/(1+2 beta) (m2 + 2|u(x)-far| m1) T_out^{-1-2 beta}
        // with m1, m2 the L1/L2 masses of u - far; computed in split scale so
        // astronomically flat radii underflow to zero instead of overflowing
        const double sc = std::pow(T_out, -0.5 * (1.0 + 2.0 * beta));
        const auto scaled_mass = [&](int pw) {
          return integrate_adaptive(
              [&u, &sup, sc, pw](double z) {
                const double w = std::abs(u(z) - sup.far) * sc;
                return pw == 2 ? w * w : w;
              },
              -sup.S, sup.S, cfg);
        };
        const OperatorValue M2 = scaled_mass(2);
        const OperatorValue M1 = scaled_mass(1);
        const double strip =
            std::pow(2.0, 1.0 + beta) / (1.0 + 2.0 * beta) *
            (M2.value + M2.uncertainty() +
             2.0 * std::abs(ux) * sc * (M1.value + M1.uncertainty()));
        r.tail_bound += strip;
        r.evaluations += M2.evaluations + M1.evaluations;
      }
    }
    return r;
  };

  OperatorValue total = quadrant(1.0, 1.0);
  total += quadrant(-1.0, -1.0);
  total += quadrant(1.0, -1.0).scaled(2.0);  // equals the (-,+) quadrant by symmetry
  total.evaluations += inner_evals;
  total.converged = total.converged && inner_ok;
  return total.scaled(c * c);
}

}  // namespace

OperatorValue gamma2(const ProfileFunction& u, double x, const FracParams& p,
                     const QuadratureConfig& cfg) {
  require_1d(p);
  if (x == 0.0 && u.is_even()) return gamma2_wedge_origin(u, p, cfg, kInf);
  return gamma2_full_impl(u, x, p, cfg, kInf);
}

OperatorValue gamma2_full(const ProfileFunction& u, double x, const FracParams& p,
                          const QuadratureConfig& cfg) {
  require_1d(p);
  return gamma2_full_impl(u, x, p, cfg, kInf);
}

OperatorValue frac_laplacian_truncated(const ProfileFunction& u, double x, double M,
                                       const FracParams& p, const QuadratureConfig& cfg) {
  require_1d(p);
  if (!(M > 0.0)) throw DomainError("truncation radius M must be positive");
  const double beta = p.beta;
  const double c = normalizing_constant(p);
  const SupportInfo sup = support_of(u);
  if (sup.trivial) return zero_value();
  const SecondDiff sd = second_difference(u, x, beta, M, cfg);
  SingularSpec sp;
  sp.vanish_exponent = 2.0;
  sp.lower = sd.cutoff;
  sp.upper = M;
  OperatorValue r = integrate_singular_kernel(sd.diff, beta, sp, cfg);
  r.value += sd.core;
  r.quad_error += sd.core_err;
  return r.scaled(c);
}

OperatorValue gamma2_truncated(const ProfileFunction& u, double x, double M,
                               const FracParams& p, const QuadratureConfig& cfg) {
  require_1d(p);
  if (!(M > 0.0)) throw DomainError("truncation radius M must be positive");
  if (x == 0.0 && u.is_even()) return gamma2_wedge_origin(u, p, cfg, M);
  return gamma2_full_impl(u, x, p, cfg, M);
}

OperatorValue lift_to_dim(const OperatorValue& value_1d, OperatorKind which,
                          const FracParams& p) {
  const double A = reduction_constant(p);
  return value_1d.scaled(which == OperatorKind::Gamma2 ? A * A : A);
}

OperatorValue RegionDecomposition::total() const {
  OperatorValue t = a_plus;
  t += a_minus;
  t += b_plus;
  t += b_minus;
  t += c_plus;
  t += c_minus;
  return t;
}

RegionDecomposition gamma2_region_decomposition(const ProfileFunction& u_eps,
                                                const FracParams& p,
                                                const QuadratureConfig& cfg) {
  require_1d(p);
  const double beta = p.beta;
  const double c = normalizing_constant(p);
  const double g = u_eps.growth_exponent();
  if (!(g < beta))
    throw GrowthTooFast("region decomposition requires growth_exponent < beta");
  const double half = 0.5 * (1.0 + beta);
  const double pref = 4.0 * c * c;

  const double quarter = 0.25 * (1.0 + beta);
  auto bracket_sq = [&u_eps, half, quarter](double h, double s, bool plus) {
    const double kq = std::pow(h, -quarter);
    const double ks = std::pow(s, -half);
    const double b = plus
                         ? u_eps.increment(h, h + s) - u_eps.increment(0.0, s)
                         : -u_eps.increment(h - s, h) - u_eps.increment(0.0, s);
    const double v = (b * ks) * kq;
    return v * v;
  };

  auto region = [&](bool plus, char which) {
    WedgeSpec ws;
    ws.inner_exponent = 1.0 - beta;
    ws.outer_exponent = 3.0 - 2.0 * beta;
    ws.outer_scale_exponent = -half;
    switch (which) {
      case 'A':  // (0,1) x (0,h)
        ws.outer_upper = 1.0;
        break;
      case 'B':  // (1,inf) x (0,1)
        ws.outer_lower = 1.0;
        ws.inner_upper_cap = 1.0;
        ws.outer_tail_exponent = -1.0 - beta;
        break;
      case 'C':  // (1,inf) x (1,h)
        ws.outer_lower = 1.0;
        ws.inner_lower_clip = 1.0;
        ws.outer_tail_exponent = 2.0 * (g - beta) - 1.0;
        break;
    }
    const auto F = [&bracket_sq, plus](double h, double s) {
      return bracket_sq(h, s, plus);
    };
    return integrate_wedge(F, ws, cfg).scaled(pref);
  };

  RegionDecomposition rd;
  rd.a_plus = region(true, 'A');
  rd.a_minus = region(false, 'A');
  rd.b_plus = region(true, 'B');
  rd.b_minus = region(false, 'B');
  rd.c_plus = region(true, 'C');
  rd.c_minus = region(false, 'C');
  return rd;
}

}  // namespace fraccd
