#pragma once

#include <memory>
#include <string>

#include "json.hpp"

#include "fraccd/errors.hpp"
#include "fraccd/quadrature.hpp"

namespace fraccd {

enum class Smoothness { C1, CInf };

/// Envelope constants (Lambda, delta) for the inner cutoff piece phi:
/// 0 <= phi(x) <= Lambda x^{beta+delta}, |phi'(x)| <= Lambda x^{beta+delta-1}.
struct EnvelopeWitness {
  double Lambda = 0.0;
  double delta = 0.0;
};

/// Parameters of the counterexample families u_eps and v_{N,eps}.
struct CounterexampleSpec {
  double beta = 1.0;
  double eps = 0.1;
  double Lambda = 0.0;   // 0 means: fit the envelope witness at construction
  double delta = 0.0;
  double cutoff_N = 32;  // support of v_{N,eps} is [-N^2, N^2]
  int dim = 1;

  /// eps < beta/2, and eps < (beta-1)/2 when beta > 1.
  void validate() const;
  /// Compact-support regime: 4 eps < beta, plus 4 eps < beta-1 (beta > 1)
  /// and 4 eps < beta-1/2 (beta > 1/2); also requires cutoff_N > 1.
  void validate_strict() const;
};

namespace detail {
class ProfileImpl;
}

/// An evaluable scalar function with derivative, symmetry, growth and support
/// metadata, plus cancellation-free evaluation of increments f(b) - f(a).
class ProfileFunction {
 public:
  explicit ProfileFunction(std::shared_ptr<const detail::ProfileImpl> impl);

  double operator()(double x) const;
  double deriv(double x) const;
  /// f(b) - f(a) evaluated without catastrophic cancellation where the family
  /// admits a stable form (power laws, smooth steps); falls back to the plain
  /// difference otherwise.
  double increment(double a, double b) const;

  bool is_even() const;
  double growth_exponent() const;         // smallest p with |f| <= C(1+|x|)^p
  double support_radius() const;          // kInf when unbounded
  /// All increments vanish beyond this radius: f == far_value() on both
  /// components of |x| >= flat_radius(). Equals support_radius (with
  /// far_value 0) unless a transform introduces a constant far field.
  double flat_radius() const;
  double far_value() const;
  double zero_radius() const;             // f == 0 on |x| <= zero_radius
  Smoothness smoothness() const;

  /// {family, parameters} descriptor for CLI round-tripping.
  nlohmann::json descriptor() const;

 private:
  std::shared_ptr<const detail::ProfileImpl> impl_;
};

/// C^inf step: 0 on (-inf,a], 1 on [b,inf), strictly increasing in between,
/// built from the exponential bump sigma(t) = exp(-1/t) 1_{t>0}.
ProfileFunction smooth_step(double a, double b);

/// exp(-x^2/2).
ProfileFunction gaussian_profile();

ProfileFunction constant_profile(double c);

/// C^inf, even, compactly supported bump: amplitude * exp(1 - 1/(1-(x/r)^2)).
ProfileFunction bump_profile(double radius = 1.0, double amplitude = 1.0);

/// The unbounded counterexample: |x|^{beta-eps} for |x| >= 1, zero on
/// |x| <= 1/4, smooth cutoff in between.
ProfileFunction make_u_eps(const CounterexampleSpec& spec);

/// Even cutoff: 1 on [0,N], decreasing on (N,N^2), 0 beyond N^2.
ProfileFunction make_eta_N(double N);

/// Compactly supported counterexample v_{N,eps} = u_eps * eta_N.
ProfileFunction make_v_N_eps(const CounterexampleSpec& spec);

/// x -> u(lambda x).
ProfileFunction scaled(const ProfileFunction& u, double lambda);

/// y -> v(x - y) - v(x); realizes the translation reduction to the origin.
ProfileFunction translated_reflected(const ProfileFunction& v, double x);

ProfileFunction profile_from_descriptor(const nlohmann::json& j);

/// f(x) = (1+x)^gamma - 1 - x^gamma and g(x) = 1 + x^gamma - (1-x)^gamma
/// on [0,1], gamma in (0,2); g(1) = 2 with (1-x)^gamma taken as 0 at x = 1.
double lemma_f(double gamma, double x);
double lemma_g(double gamma, double x);

/// Grid search for the largest delta in (1-beta,1] (step 0.01) whose
/// envelopes hold with some Lambda <= 100 on a 10^4-point grid of (0,1].
EnvelopeWitness fit_envelope(double beta, double eps);

}  // namespace fraccd
