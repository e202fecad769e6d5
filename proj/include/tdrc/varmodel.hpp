#pragma once

#include <utility>
#include <vector>

#include "tdrc/common.hpp"
#include "tdrc/kernels.hpp"
#include "tdrc/reservoir.hpp"

namespace tdrc {

/// Coefficients of the truncated input-expansion polynomials, one polynomial
/// per neuron r:
///   q(z; c_1..c_r) = sum_{i=1..R} a(i, r) z^i,
///   a(i, r) = (1/i!) (d^i_I f)(x0, 0) * sum_{j<=r} e^{-(r-j)xi} c_j^i.
///
/// Moment convention used throughout: raw_moments[i] = E[z^i] (index 0 holds 1).
/// Evaluating q "at the moments" means sum_i a(i, r) * m[i + shift]; shift 0
/// gives q, shift 1 the z*q variant, shift 2 the z^2*q variant.
struct QPolynomial {
    Mat a;  // R x N
    int order() const { return static_cast<int>(a.rows()); }
    int neurons() const { return static_cast<int>(a.cols()); }
};

QPolynomial build_q_polynomial(const ReservoirConfig& cfg, const KernelParams& k, double x0,
                               const Vec& mask, int taylor_order);

/// Component r of sum_i a(i, r) * moments[i + shift], r = 1..N.
Vec q_moment_eval(const QPolynomial& q, const std::vector<double>& raw_moments, int shift);

/// Connectivity matrix A = D_x F at the fixed point x0 * 1: lower-triangular
/// band e^{-(i-j)xi} * Phi for j <= i plus e^{-i xi} in the last column, with
/// Phi = (1 - e^{-xi}) f'(x0).
Mat connectivity(const ReservoirConfig& cfg, const KernelParams& k, double x0);

/// Row-sum bound certificate: true iff the bound certifies rho(A) < 1, which
/// holds exactly when |f'(x0)| < 1. The bound sums the absolute values of the
/// feedback band and the delayed-shift column separately, so the equivalence
/// holds for every N >= 1 (the 1x1 matrix otherwise hides sign cancellation
/// between Phi and e^{-xi}).
bool norm_bound_stable(const ReservoirConfig& cfg, const KernelParams& k, double x0);

/// Spectral radius of A via the degree-N characteristic equation
/// (lambda - 1)^N = (e^{-N xi} / Phi) lambda^{N-1}; the eigenvalues of A are
/// Phi * lambda over its roots. Throws DegenerateError when Phi == 0 (the
/// spectral radius is then e^{-N xi} directly).
double char_poly_spectral_radius(const ReservoirConfig& cfg, double phi);

/// Dense-eigensolver spectral radius.
double spectral_radius(const Mat& A);

/// Taylor-expansion noise vector for one input value z:
/// component r equals (1 - e^{-xi}) * q(z; c_1..c_r).
Vec noise_vector(const ReservoirConfig& cfg, const KernelParams& k, double x0, const Vec& mask,
                 int taylor_order, double z);

/// Mean and covariance of the noise vector under IID input with the given raw
/// moments (needed up to order 2R). Sigma is symmetrized after assembly.
std::pair<Vec, Mat> noise_moments(const ReservoirConfig& cfg, const KernelParams& k, double x0,
                                  const Vec& mask, int taylor_order,
                                  const std::vector<double>& raw_moments);

/// Raw moments of N(0, sigma_z^2) up to max_order; result[i] = E[z^i].
std::vector<double> gaussian_moments(double sigma_z, int max_order);

/// mu_x = (I - A)^{-1} (F(x0*1, 0) - A x0*1 + mu_eps).
Vec stationary_mean(const Mat& A, const Vec& reservoir_at_fp, double x0, const Vec& mu_eps);

/// Gamma(0) from vec(Gamma0) = (I - A (x) A)^{-1} vec(Sigma_eps), i.e. the
/// discrete Lyapunov equation Gamma0 = A Gamma0 A^T + Sigma_eps, solved
/// directly and symmetrized. Throws UnstableError when rho(A) >= 1.
Mat yule_walker_gamma0(const Mat& A, const Mat& Sigma_eps);

/// Gamma(k) = A^k Gamma(0) for k >= 0; Gamma(-k) = Gamma(k)^T.
Mat autocovariance(const Mat& A, const Mat& Gamma0, long lag);

/// The assembled VAR(1) surrogate of the reservoir around a stable fixed point.
struct VarApprox {
    ReservoirConfig cfg;
    KernelParams kernel;
    Vec mask;
    double x0 = 0.0;
    int taylor_order = 8;
    std::vector<double> raw_moments;  // input moments used for the construction
    double sigma_z = 0.0;

    QPolynomial qpoly;
    Mat A;
    Vec mu_eps;
    Mat Sigma_eps;
    Vec mu_x;
    Mat Gamma0;
    double rho = 0.0;  // spectral radius of A
    bool stable = false;
};

/// Build the surrogate for IID input with the given raw moments.
/// Throws UnstableError if rho(A) >= 1 and NotAnEquilibriumError if x0 is not
/// a fixed point of the kernel.
VarApprox build_var_approx(const ReservoirConfig& cfg, const KernelParams& k, double x0,
                           const Vec& mask, int taylor_order,
                           const std::vector<double>& raw_moments, double sigma_z);

/// Convenience overload for centered Gaussian input z ~ N(0, sigma_z^2).
VarApprox build_var_approx(const ReservoirConfig& cfg, const KernelParams& k, double x0,
                           const Vec& mask, int taylor_order, double sigma_z);

}  // namespace tdrc
