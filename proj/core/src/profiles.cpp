#include "fraccd/profiles.hpp"

#include <cmath>
#include <algorithm>
#include <utility>

namespace fraccd {

namespace {

// Exponential bump sigma(t) = exp(-1/t) for t > 0, else 0.
double sigma_bump(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

// Smooth step on [0,1]: 0 at 0, 1 at 1, C^inf.
double step01(double tau) {
  if (tau <= 0.0) return 0.0;
  if (tau >= 1.0) return 1.0;
  const double s1 = sigma_bump(tau);
  const double s2 = sigma_bump(1.0 - tau);
  return s1 / (s1 + s2);
}

double step01_deriv(double tau) {
  if (tau <= 0.0 || tau >= 1.0) return 0.0;
  const double s1 = std::exp(-1.0 / tau);
  const double s2 = std::exp(-1.0 / (1.0 - tau));
  const double d1 = s1 / (tau * tau);
  const double d2 = s2 / ((1.0 - tau) * (1.0 - tau));
  const double den = s1 + s2;
  return (d1 * den - s1 * (d1 - d2)) / (den * den);
}

// x^g for x > 0 via exp(g log x); exact at the overflow-free range we use.
double powg(double x, double g) { return std::exp(g * std::log(x)); }

}  // namespace

namespace detail {

class ProfileImpl {
 public:
  virtual ~ProfileImpl() = default;
  virtual double eval(double x) const = 0;
  virtual double deriv(double x) const = 0;
  virtual double increment(double a, double b) const {
    return eval(b) - eval(a);
  }
  virtual bool is_even() const = 0;
  virtual double growth_exponent() const = 0;
  virtual double support_radius() const = 0;
  virtual double flat_radius() const { return support_radius(); }
  virtual double far_value() const { return 0.0; }
  virtual double zero_radius() const = 0;
  virtual Smoothness smoothness() const { return Smoothness::CInf; }
  virtual nlohmann::json descriptor() const = 0;
};

namespace {

class SmoothStepImpl final : public ProfileImpl {
 public:
  SmoothStepImpl(double a, double b) : a_(a), b_(b) {
    if (!(a < b)) throw InvalidInterval("smooth_step requires a < b");
  }
  double eval(double x) const override { return step01((x - a_) / (b_ - a_)); }
  double deriv(double x) const override {
    return step01_deriv((x - a_) / (b_ - a_)) / (b_ - a_);
  }
  double increment(double a, double b) const override {
    const double w = b_ - a_;
    const double ta = (a - a_) / w, tb = (b - a_) / w;
    if (tb <= 0.0 || ta >= 1.0) return 0.0;
    const double dt = tb - ta;
    if (std::abs(dt) > 1e-6) return step01(tb) - step01(ta);
    return step01_deriv(0.5 * (ta + tb)) * dt;
  }
  bool is_even() const override { return false; }
  double growth_exponent() const override { return 0.0; }
  double support_radius() const override { return kInf; }
  double zero_radius() const override { return a_ > 0.0 ? a_ : 0.0; }
  nlohmann::json descriptor() const override {
    return {{"family", "smooth_step"}, {"a", a_}, {"b", b_}};
  }

 private:
  double a_, b_;
};

class GaussianImpl final : public ProfileImpl {
 public:
  double eval(double x) const override { return std::exp(-0.5 * x * x); }
  double deriv(double x) const override { return -x * std::exp(-0.5 * x * x); }
  bool is_even() const override { return true; }
  double growth_exponent() const override { return 0.0; }
  double support_radius() const override { return kInf; }
  double zero_radius() const override { return 0.0; }
  nlohmann::json descriptor() const override {
    return {{"family", "gaussian"}};
  }
};

class ConstantImpl final : public ProfileImpl {
 public:
  explicit ConstantImpl(double c) : c_(c) {}
  double eval(double) const override { return c_; }
  double deriv(double) const override { return 0.0; }
  double increment(double, double) const override { return 0.0; }
  bool is_even() const override { return true; }
  double growth_exponent() const override { return 0.0; }
  double support_radius() const override { return c_ == 0.0 ? 0.0 : kInf; }
  double flat_radius() const override { return 0.0; }
  double far_value() const override { return c_; }
  double zero_radius() const override { return 0.0; }
  nlohmann::json descriptor() const override {
    return {{"family", "constant"}, {"c", c_}};
  }

 private:
  double c_;
};

class BumpImpl final : public ProfileImpl {
 public:
  BumpImpl(double radius, double amplitude) : r_(radius), amp_(amplitude) {
    if (!(radius > 0.0)) throw DomainError("bump_profile requires radius > 0");
  }
  double eval(double x) const override {
    const double t = x / r_;
    const double q = 1.0 - t * t;
    if (q <= 0.0) return 0.0;
    return amp_ * std::exp(1.0 - 1.0 / q);
  }
  double deriv(double x) const override {
    const double t = x / r_;
    const double q = 1.0 - t * t;
    if (q <= 0.0) return 0.0;
    return eval(x) * (-2.0 * t / (q * q)) / r_;
  }
  bool is_even() const override { return true; }
  double growth_exponent() const override { return 0.0; }
  double support_radius() const override { return r_; }
  double zero_radius() const override { return 0.0; }
  nlohmann::json descriptor() const override {
    return {{"family", "bump"}, {"radius", r_}, {"amplitude", amp_}};
  }

 private:
  double r_, amp_;
};

// Shared core of u_eps and v_{N,eps}: the inner piece
// phi(x) = x^g S((x - 1/4)/(1/2)) on [0,1], g = beta - eps.
struct InnerPiece {
  double g;
  double eval(double x) const {
    if (x <= 0.25) return 0.0;
    if (x >= 1.0) return powg(x, g);
    return powg(x, g) * step01((x - 0.25) * 2.0);
  }
  double deriv(double x) const {
    if (x <= 0.25) return 0.0;
    const double p = powg(x, g);
    if (x >= 1.0) return g * p / x;
    const double tau = (x - 0.25) * 2.0;
    return g * p / x * step01(tau) + p * 2.0 * step01_deriv(tau);
  }
};

// u(b) - u(a) for 0 <= a <= b of the pure profile |x|^g extended by phi.
double du_nonneg(const InnerPiece& inner, double a, double b) {
  const double g = inner.g;
  if (b <= 1.0) return inner.eval(b) - inner.eval(a);
  if (a < 1.0) return powg(b, g) - inner.eval(a);
  // both >= 1: a^g expm1(g log1p((b-a)/a)) has no cancellation
  return powg(a, g) * std::expm1(g * std::log1p((b - a) / a));
}

class UEpsImpl final : public ProfileImpl {
 public:
  UEpsImpl(CounterexampleSpec spec, EnvelopeWitness env)
      : spec_(spec), env_(env), inner_{spec.beta - spec.eps} {}

  double eval(double x) const override {
    x = std::abs(x);
    if (x < 1.0) return inner_.eval(x);
    return powg(x, inner_.g);
  }
  double deriv(double x) const override {
    const double s = x < 0.0 ? -1.0 : 1.0;
    x = std::abs(x);
    if (x < 1.0) return s * inner_.deriv(x);
    return s * inner_.g * powg(x, inner_.g) / x;
  }
  double increment(double a, double b) const override {
    if (a > b) return -increment(b, a);
    if (a >= 0.0) return du_nonneg(inner_, a, b);
    if (b <= 0.0) return -du_nonneg(inner_, -b, -a);
    return eval(b) - eval(a);  // straddles 0; both values O(1)
  }
  bool is_even() const override { return true; }
  double growth_exponent() const override { return inner_.g; }
  double support_radius() const override { return kInf; }
  double zero_radius() const override { return 0.25; }
  nlohmann::json descriptor() const override {
    return {{"family", "u_eps"},   {"beta", spec_.beta},
            {"eps", spec_.eps},    {"Lambda", env_.Lambda},
            {"delta", env_.delta}, {"dim", spec_.dim}};
  }
  const CounterexampleSpec& spec() const { return spec_; }

 private:
  CounterexampleSpec spec_;
  EnvelopeWitness env_;
  InnerPiece inner_;
};

// Even cutoff 1 on [0,N], smooth step down over (N, N^2), 0 beyond.
struct Cutoff {
  double N, N2, den;  // den = N^2 - N
  explicit Cutoff(double n) : N(n), N2(n * n), den(n * n - n) {}
  double eval(double x) const { return 1.0 - step01((x - N) / den); }
  double deriv(double x) const {
    return -step01_deriv((x - N) / den) / den;
  }
  // eta(b) - eta(a), a <= b, stable for narrow increments
  double increment(double a, double b) const {
    const double ta = (a - N) / den, tb = (b - N) / den;
    if (tb <= 0.0 || ta >= 1.0) return 0.0;
    const double dt = tb - ta;
    if (dt > 1e-6) return eval(b) - eval(a);
    return -step01_deriv(0.5 * (ta + tb)) * dt;
  }
};

class EtaNImpl final : public ProfileImpl {
 public:
  explicit EtaNImpl(double N) : cut_(N) {
    if (!(N > 1.0)) throw InvalidInterval("make_eta_N requires N > 1");
  }
  double eval(double x) const override { return cut_.eval(std::abs(x)); }
  double deriv(double x) const override {
    const double s = x < 0.0 ? -1.0 : 1.0;
    return s * cut_.deriv(std::abs(x));
  }
  double increment(double a, double b) const override {
    if (a > b) return -increment(b, a);
    if (a >= 0.0) return cut_.increment(a, b);
    if (b <= 0.0) return -cut_.increment(-b, -a);
    return eval(b) - eval(a);
  }
  bool is_even() const override { return true; }
  double growth_exponent() const override { return 0.0; }
  double support_radius() const override { return cut_.N2; }
  double zero_radius() const override { return 0.0; }
  nlohmann::json descriptor() const override {
    return {{"family", "eta_N"}, {"N", cut_.N}};
  }

 private:
  Cutoff cut_;
};

class VNEpsImpl final : public ProfileImpl {
 public:
  VNEpsImpl(CounterexampleSpec spec, EnvelopeWitness env)
      : spec_(spec),
        env_(env),
        inner_{spec.beta - spec.eps},
        cut_(spec.cutoff_N) {}

  double eval_nonneg(double x) const {
    if (x < 1.0) return inner_.eval(x);
    if (x >= cut_.N2) return 0.0;
    return powg(x, inner_.g) * cut_.eval(x);
  }
  double eval(double x) const override { return eval_nonneg(std::abs(x)); }
  double deriv(double x) const override {
    const double s = x < 0.0 ? -1.0 : 1.0;
    x = std::abs(x);
    if (x < 1.0) return s * inner_.deriv(x);
    if (x >= cut_.N2) return 0.0;
    const double p = powg(x, inner_.g);
    return s * (inner_.g * p / x * cut_.eval(x) + p * cut_.deriv(x));
  }
  // v(b) - v(a), 0 <= a <= b, via the product rule
  // v(b) - v(a) = eta(b) (u(b) - u(a)) + u(a) (eta(b) - eta(a)).
  double incr_nonneg(double a, double b) const {
    if (b <= cut_.N) return du_nonneg(inner_, a, b);
    if (a >= cut_.N2) return 0.0;
    if (a < 1.0) return eval_nonneg(b) - inner_.eval(a);
    return cut_.eval(b) * du_nonneg(inner_, a, b) +
           powg(a, inner_.g) * cut_.increment(a, b);
  }
  double increment(double a, double b) const override {
    if (a > b) return -increment(b, a);
    if (a >= 0.0) return incr_nonneg(a, b);
    if (b <= 0.0) return -incr_nonneg(-b, -a);
    return eval(b) - eval(a);
  }
  bool is_even() const override { return true; }
  double growth_exponent() const override { return inner_.g; }
  double support_radius() const override { return cut_.N2; }
  double zero_radius() const override { return 0.25; }
  nlohmann::json descriptor() const override {
    return {{"family", "v_N_eps"}, {"beta", spec_.beta},
            {"eps", spec_.eps},    {"Lambda", env_.Lambda},
            {"delta", env_.delta}, {"N", spec_.cutoff_N},
            {"dim", spec_.dim}};
  }

 private:
  CounterexampleSpec spec_;
  EnvelopeWitness env_;
  InnerPiece inner_;
  Cutoff cut_;
};

class ScaledImpl final : public ProfileImpl {
 public:
  ScaledImpl(ProfileFunction base, double lambda)
      : base_(std::move(base)), lam_(lambda) {
    if (!(lambda > 0.0)) throw DomainError("scaled requires lambda > 0");
  }
  double eval(double x) const override { return base_(lam_ * x); }
  double deriv(double x) const override { return lam_ * base_.deriv(lam_ * x); }
  double increment(double a, double b) const override {
    return base_.increment(lam_ * a, lam_ * b);
  }
  bool is_even() const override { return base_.is_even(); }
  double growth_exponent() const override { return base_.growth_exponent(); }
  double support_radius() const override {
    const double s = base_.support_radius();
    return std::isinf(s) ? kInf : s / lam_;
  }
  double flat_radius() const override {
    const double s = base_.flat_radius();
    return std::isinf(s) ? kInf : s / lam_;
  }
  double far_value() const override { return base_.far_value(); }
  double zero_radius() const override { return base_.zero_radius() / lam_; }
  Smoothness smoothness() const override { return base_.smoothness(); }
  nlohmann::json descriptor() const override {
    return {{"family", "scaled"},
            {"lambda", lam_},
            {"base", base_.descriptor()}};
  }

 private:
  ProfileFunction base_;
  double lam_;
};

class TranslatedReflectedImpl final : public ProfileImpl {
 public:
  TranslatedReflectedImpl(ProfileFunction base, double x0)
      : base_(std::move(base)), x0_(x0), vx0_(base_(x0)) {}
  double eval(double y) const override { return base_(x0_ - y) - vx0_; }
  double deriv(double y) const override { return -base_.deriv(x0_ - y); }
  double increment(double a, double b) const override {
    return base_.increment(x0_ - a, x0_ - b);
  }
  bool is_even() const override { return x0_ == 0.0 && base_.is_even(); }
  double growth_exponent() const override { return base_.growth_exponent(); }
  double support_radius() const override {
    const double s = base_.support_radius();
    if (vx0_ == 0.0 && !std::isinf(s)) return std::abs(x0_) + s;
    return kInf;
  }
  double flat_radius() const override {
    const double s = base_.flat_radius();
    return std::isinf(s) ? kInf : std::abs(x0_) + s;
  }
  double far_value() const override { return base_.far_value() - vx0_; }
  double zero_radius() const override { return 0.0; }
  Smoothness smoothness() const override { return base_.smoothness(); }
  nlohmann::json descriptor() const override {
    return {{"family", "translated_reflected"},
            {"x", x0_},
            {"base", base_.descriptor()}};
  }

 private:
  ProfileFunction base_;
  double x0_;
  double vx0_;
};

}  // namespace
}  // namespace detail

ProfileFunction::ProfileFunction(std::shared_ptr<const detail::ProfileImpl> impl)
    : impl_(std::move(impl)) {}

double ProfileFunction::operator()(double x) const { return impl_->eval(x); }
double ProfileFunction::deriv(double x) const { return impl_->deriv(x); }
double ProfileFunction::increment(double a, double b) const {
  return impl_->increment(a, b);
}
bool ProfileFunction::is_even() const { return impl_->is_even(); }
double ProfileFunction::growth_exponent() const {
  return impl_->growth_exponent();
}
double ProfileFunction::support_radius() const {
  return impl_->support_radius();
}
double ProfileFunction::flat_radius() const { return impl_->flat_radius(); }
double ProfileFunction::far_value() const { return impl_->far_value(); }
double ProfileFunction::zero_radius() const { return impl_->zero_radius(); }
Smoothness ProfileFunction::smoothness() const { return impl_->smoothness(); }
nlohmann::json ProfileFunction::descriptor() const {
  return impl_->descriptor();
}

void CounterexampleSpec::validate() const {
  if (!(beta > 0.0 && beta < 2.0))
    throw SpecViolation("beta must lie in (0,2)");
  if (!(eps > 0.0)) throw SpecViolation("eps must be positive");
  if (!(eps < beta / 2.0)) throw SpecViolation("requires eps < beta/2");
  if (beta > 1.0 && !(eps < (beta - 1.0) / 2.0))
    throw SpecViolation("beta > 1 requires eps < (beta-1)/2");
  if (dim < 1) throw SpecViolation("dim must be >= 1");
}

void CounterexampleSpec::validate_strict() const {
  validate();
  if (!(4.0 * eps < beta)) throw SpecViolation("requires 4 eps < beta");
  if (beta > 1.0 && !(4.0 * eps < beta - 1.0))
    throw SpecViolation("beta > 1 requires 4 eps < beta - 1");
  if (beta > 0.5 && !(4.0 * eps < beta - 0.5))
    throw SpecViolation("beta > 1/2 requires 4 eps < beta - 1/2");
  if (!(cutoff_N > 1.0)) throw SpecViolation("requires cutoff_N > 1");
}

ProfileFunction smooth_step(double a, double b) {
  return ProfileFunction(std::make_shared<detail::SmoothStepImpl>(a, b));
}

ProfileFunction gaussian_profile() {
  return ProfileFunction(std::make_shared<detail::GaussianImpl>());
}

ProfileFunction constant_profile(double c) {
  return ProfileFunction(std::make_shared<detail::ConstantImpl>(c));
}

ProfileFunction bump_profile(double radius, double amplitude) {
  return ProfileFunction(
      std::make_shared<detail::BumpImpl>(radius, amplitude));
}

namespace {

EnvelopeWitness resolve_envelope(const CounterexampleSpec& spec) {
  if (spec.Lambda > 0.0) return {spec.Lambda, spec.delta};
  return fit_envelope(spec.beta, spec.eps);
}

}  // namespace

ProfileFunction make_u_eps(const CounterexampleSpec& spec) {
  spec.validate();
  return ProfileFunction(
      std::make_shared<detail::UEpsImpl>(spec, resolve_envelope(spec)));
}

ProfileFunction make_eta_N(double N) {
  return ProfileFunction(std::make_shared<detail::EtaNImpl>(N));
}

ProfileFunction make_v_N_eps(const CounterexampleSpec& spec) {
  spec.validate_strict();
  return ProfileFunction(
      std::make_shared<detail::VNEpsImpl>(spec, resolve_envelope(spec)));
}

ProfileFunction scaled(const ProfileFunction& u, double lambda) {
  return ProfileFunction(std::make_shared<detail::ScaledImpl>(u, lambda));
}

ProfileFunction translated_reflected(const ProfileFunction& v, double x) {
  return ProfileFunction(
      std::make_shared<detail::TranslatedReflectedImpl>(v, x));
}

ProfileFunction profile_from_descriptor(const nlohmann::json& j) {
  const std::string fam = j.at("family").get<std::string>();
  if (fam == "smooth_step")
    return smooth_step(j.at("a").get<double>(), j.at("b").get<double>());
  if (fam == "gaussian") return gaussian_profile();
  if (fam == "constant") return constant_profile(j.at("c").get<double>());
  if (fam == "bump")
    return bump_profile(j.at("radius").get<double>(),
                        j.at("amplitude").get<double>());
  if (fam == "u_eps" || fam == "v_N_eps") {
    CounterexampleSpec spec;
    spec.beta = j.at("beta").get<double>();
    spec.eps = j.at("eps").get<double>();
    spec.Lambda = j.value("Lambda", 0.0);
    spec.delta = j.value("delta", 0.0);
    spec.dim = j.value("dim", 1);
    if (fam == "u_eps") return make_u_eps(spec);
    spec.cutoff_N = j.at("N").get<double>();
    return make_v_N_eps(spec);
  }
  if (fam == "eta_N") return make_eta_N(j.at("N").get<double>());
  if (fam == "scaled")
    return scaled(profile_from_descriptor(j.at("base")),
                  j.at("lambda").get<double>());
  if (fam == "translated_reflected")
    return translated_reflected(profile_from_descriptor(j.at("base")),
                                j.at("x").get<double>());
  throw DomainError("unknown profile family: " + fam);
}

double lemma_f(double gamma, double x) {
  if (!(gamma > 0.0 && gamma < 2.0))
    throw DomainError("lemma_f requires gamma in (0,2)");
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("lemma_f requires x in [0,1]");
  return std::expm1(gamma * std::log1p(x)) - std::pow(x, gamma);
}

double lemma_g(double gamma, double x) {
  if (!(gamma > 0.0 && gamma < 2.0))
    throw DomainError("lemma_g requires gamma in (0,2)");
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("lemma_g requires x in [0,1]");
  if (x == 1.0) return 2.0;  // (1-x)^gamma taken as its limit 0
  return 1.0 + std::pow(x, gamma) - std::pow(1.0 - x, gamma);
}

EnvelopeWitness fit_envelope(double beta, double eps) {
  const detail::InnerPiece inner{beta - eps};
  constexpr int kGrid = 10000;
  constexpr double kLambdaCap = 100.0;
  const double delta_floor = std::max(1.0 - beta, 0.0);
  // largest admissible delta wins; scan downward in steps of 0.01
  for (int k = 100; k > 0; --k) {
    const double delta = k / 100.0;
    if (delta <= delta_floor) break;
    const double p = beta + delta;
    double lam = 0.0;
    for (int i = 1; i <= kGrid; ++i) {
      const double x = static_cast<double>(i) / kGrid;
      lam = std::max(lam, inner.eval(x) / std::pow(x, p));
      lam = std::max(lam, std::abs(inner.deriv(x)) / std::pow(x, p - 1.0));
      if (lam > kLambdaCap) break;
    }
    if (lam <= kLambdaCap) return {lam, delta};
  }
  throw SpecViolation("no admissible envelope (Lambda, delta) found");
}

}  // namespace fraccd
