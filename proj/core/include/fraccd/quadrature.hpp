#pragma once

#include <cstdint>
#include <functional>
#include <limits>

#include "fraccd/errors.hpp"

namespace fraccd {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Tolerances and domain-splitting knobs shared by every integral routine.
struct QuadratureConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  double split_radius = 1.0;    // boundary between singular-core and mid-range panels
  double tail_cutoff = 1e6;     // numerical truncation radius for semi-infinite domains
  int max_subdivisions = 10000;
  double min_panel_width = 1e-14;

  void validate() const;
};

/// An integral value together with explicit error accounting.
/// Total reported uncertainty is quad_error + tail_bound.
struct OperatorValue {
  double value = 0.0;
  double quad_error = 0.0;  // accumulated panel error estimate
  double tail_bound = 0.0;  // analytic bound on the mass discarded beyond tail_cutoff
  std::int64_t evaluations = 0;
  bool converged = true;

  double uncertainty() const { return quad_error + tail_bound; }

  OperatorValue& operator+=(const OperatorValue& o);
  OperatorValue scaled(double s) const;
};

using RealFn = std::function<double(double)>;

/// Integrand sample carrying a secondary error density; used to propagate the
/// uncertainty of an inner (nested) quadrature through an outer one.
struct Sample {
  double value = 0.0;
  double error = 0.0;
};
using SampledFn = std::function<Sample(double)>;

/// Integration domain description for the shared adaptive engine.
/// The lower endpoint is finite; `upper` may be +inf, in which case
/// `tail_exponent` p < -1 must be supplied so that |f(h)| <= C h^p beyond
/// tail_cutoff (C is estimated from a sample at the cutoff).
struct Domain {
  double lower = 0.0;
  double upper = kInf;
  bool grade_lower = false;      // geometric panels toward `lower`
  double lower_exponent = 0.0;   // f ~ C (x-lower)^s near lower, s > -1
  double tail_exponent = std::numeric_limits<double>::quiet_NaN();
};

/// Shared engine: adaptive Gauss-Kronrod over the given domain, with geometric
/// grading toward the lower endpoint and a log-substituted far field.
/// abs_tol_override, when finite, replaces cfg.abs_tol (used to tighten inner
/// integrals of nested quadratures).
OperatorValue integrate(const SampledFn& f, const Domain& dom, const QuadratureConfig& cfg,
                        double abs_tol_override = std::numeric_limits<double>::quiet_NaN());

/// Adaptive integration of f over the finite interval (a, b).
OperatorValue integrate_adaptive(const RealFn& f, double a, double b, const QuadratureConfig& cfg);

/// Adaptive integration over (a, b) where either endpoint may be infinite;
/// tail_exponent p < -1 bounds the integrand envelope at infinity.
OperatorValue integrate_adaptive(const RealFn& f, double a, double b, double tail_exponent,
                                 const QuadratureConfig& cfg);

/// Declared analytic envelopes for the singular-kernel integrator.
struct SingularSpec {
  double vanish_exponent = 2.0;  // q: g(h) = O(h^q) as h -> 0, q > beta
  double tail_growth = 0.0;      // g(h) = O(h^t) as h -> inf (ignored if upper finite)
  double upper = kInf;
  double lower = 0.0;  // integration starts here; caller accounts for (0, lower)
};

/// Computes \int_0^upper g(h) h^{-1-beta} dh for g vanishing like h^q at 0.
OperatorValue integrate_singular_kernel(const RealFn& g, double beta, const SingularSpec& spec,
                                        const QuadratureConfig& cfg);

/// Computes \int_0^upper f(h)^2 h^{-1-beta} dh, squaring after half the kernel
/// is applied; |f| may exceed sqrt(DBL_MAX) where the kernel compensates.
/// spec exponents refer to f^2: vanish_exponent q with f^2 = O(h^q), and
/// tail_growth t with f^2 = O(h^t).
OperatorValue integrate_squared_kernel(const RealFn& f, double beta, const SingularSpec& spec,
                                       const QuadratureConfig& cfg);

/// Declared exponents for the iterated wedge integral over {0 < sigma < h}.
struct WedgeSpec {
  double inner_exponent = 0.0;       // F(h,.) ~ sigma^s near 0, s > -1
  double outer_exponent = 0.0;       // outer integrand ~ h^s near 0, s > -1
  double outer_tail_exponent = std::numeric_limits<double>::quiet_NaN();  // p < -1
  double outer_upper = kInf;
  double inner_lower_clip = 0.0;     // wedge {inner_lower_clip < sigma < h}
  double outer_lower = 0.0;
  double inner_upper_cap = kInf;     // clip inner domain at min(h, cap)
  double inner_tighten = 0.1;        // inner abs tolerance factor
  // The outer integrand is h^e times the inner integral, multiplied in split
  // halves; lets callers keep F representable when the h-kernel alone would
  // over- or underflow at extreme scales.
  double outer_scale_exponent = 0.0;
};

/// Iterated integral \int \int_{wedge} F(h, sigma) dsigma dh with inner
/// uncertainties propagated additively into the outer result.
OperatorValue integrate_wedge(const std::function<double(double, double)>& F, const WedgeSpec& spec,
                              const QuadratureConfig& cfg);

}  // namespace fraccd
