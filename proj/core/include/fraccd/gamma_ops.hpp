#pragma once

#include "fraccd/profiles.hpp"
#include "fraccd/quadrature.hpp"

namespace fraccd {

struct FracParams {
  double beta = 1.0;
  int dim = 1;

  void validate() const;
};

struct CDParams {
  double kappa = 0.0;
  double N_dim = kInf;  // CD dimension parameter, > 0 or infinite

  void validate() const;
};

/// c_{beta,d} = 2^beta Gamma((d+beta)/2) / (pi^{d/2} |Gamma(-beta/2)|);
/// the reciprocal Gamma at negative argument is taken via reflection.
double normalizing_constant(const FracParams& p);

/// B_alpha = integral of (1+z^2)^{-alpha} over R = sqrt(pi)
/// Gamma(alpha-1/2)/Gamma(alpha); requires 2 alpha > 1.
double b_alpha(double alpha);

/// C_{alpha,n} = prod_{j=0}^{n-1} B_{alpha-j/2}; requires 2 alpha > n, n >= 0.
double c_alpha_n(double alpha, int n);

/// A_{d,beta} = c_{beta,d} C_{(d+beta)/2, d-1} / c_{beta,1}; A_{1,beta} = 1.
double reduction_constant(const FracParams& p);

/// L(u)(x) = c_{beta,1} \int_0^inf (u(x+h) - 2u(x) + u(x-h)) h^{-1-beta} dh.
/// Requires growth_exponent < beta or compact support (then tails are exact).
OperatorValue frac_laplacian(const ProfileFunction& u, double x, const FracParams& p,
                             const QuadratureConfig& cfg);

/// Gamma(u)(x) = c_{beta,1} \int (u(x+h) - u(x))^2 |h|^{-1-beta} dh.
/// Requires 2 growth_exponent < beta or compact support.
OperatorValue gamma(const ProfileFunction& u, double x, const FracParams& p,
                    const QuadratureConfig& cfg);

/// Gamma_2(u)(x). At x = 0 for even u this is the reduced wedge form
/// 4 c^2 \int_0^inf \int_0^h ([u(h+s)-u(h)-u(s)]^2 + [u(h-s)-u(h)-u(s)]^2)
///   / (h^{1+beta} s^{1+beta}) ds dh
/// (constants drop out through increments, so u(0) != 0 is harmless).
/// At x != 0, or for non-even u, the full double integral is evaluated and
/// u must be compactly supported.
OperatorValue gamma2(const ProfileFunction& u, double x, const FracParams& p,
                     const QuadratureConfig& cfg);

/// The general double-integral route regardless of symmetry; compact support
/// required. At x = 0 this cross-checks the reduced wedge form.
OperatorValue gamma2_full(const ProfileFunction& u, double x, const FracParams& p,
                          const QuadratureConfig& cfg);

/// Kernel clipped to [-M, M]; tail_bound = 0 by construction.
OperatorValue frac_laplacian_truncated(const ProfileFunction& u, double x, double M,
                                       const FracParams& p, const QuadratureConfig& cfg);

/// Kernel clipped to the square [-M, M]^2.
OperatorValue gamma2_truncated(const ProfileFunction& u, double x, double M,
                               const FracParams& p, const QuadratureConfig& cfg);

enum class OperatorKind { L, Gamma, Gamma2 };

/// Tensor-lift transfer at the origin: multiplies by A_{d,beta} for L and
/// Gamma, by A_{d,beta}^2 for Gamma_2; uncertainty scales identically.
OperatorValue lift_to_dim(const OperatorValue& value_1d, OperatorKind which,
                          const FracParams& p);

/// The six wedge pieces of Gamma_2(u_eps)(0) over
/// (0,1)x(0,h), (1,inf)x(0,1), (1,inf)x(1,h), split by bracket sign.
struct RegionDecomposition {
  OperatorValue a_plus, a_minus, b_plus, b_minus, c_plus, c_minus;

  OperatorValue total() const;
};

RegionDecomposition gamma2_region_decomposition(const ProfileFunction& u_eps,
                                                const FracParams& p,
                                                const QuadratureConfig& cfg);

}  // namespace fraccd
