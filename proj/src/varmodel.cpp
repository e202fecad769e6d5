#include "tdrc/varmodel.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace tdrc {

QPolynomial build_q_polynomial(const ReservoirConfig& cfg, const KernelParams& k, double x0,
                               const Vec& mask, int taylor_order) {
    if (taylor_order < 1) throw Error("build_q_polynomial: Taylor order must be >= 1");
    if (mask.size() != cfg.N) throw DimensionError("build_q_polynomial: mask length must equal N");
    const std::vector<double> di = kernel_input_derivatives(k, x0, taylor_order);
    const double decay = std::exp(-cfg.xi);

    QPolynomial q;
    q.a.resize(taylor_order, cfg.N);
    double factorial = 1.0;
    for (int i = 1; i <= taylor_order; ++i) {
        factorial *= i;
        const double coeff = di[static_cast<size_t>(i - 1)] / factorial;
        double prefix = 0.0;  // sum_{j<=r} e^{-(r-j)xi} c_j^i, updated incrementally
        for (int r = 0; r < cfg.N; ++r) {
            prefix = decay * prefix + std::pow(mask[r], i);
            q.a(i - 1, r) = coeff * prefix;
        }
    }
    return q;
}

Vec q_moment_eval(const QPolynomial& q, const std::vector<double>& raw_moments, int shift) {
    const int R = q.order();
    if (static_cast<int>(raw_moments.size()) < R + shift + 1)
        throw MomentLengthError("q_moment_eval: need raw moments up to order " +
                                std::to_string(R + shift));
    Vec out = Vec::Zero(q.neurons());
    for (int r = 0; r < q.neurons(); ++r)
        for (int i = 1; i <= R; ++i)
            out[r] += q.a(i - 1, r) * raw_moments[static_cast<size_t>(i + shift)];
    return out;
}

Mat connectivity(const ReservoirConfig& cfg, const KernelParams& k, double x0) {
    certify_stability(k, x0);  // validates the fixed point; throws NotAnEquilibriumError
    const double decay = std::exp(-cfg.xi);
    const double phi = (1.0 - decay) * kernel_x_derivative(k, x0, 0.0);
    Mat A = Mat::Zero(cfg.N, cfg.N);
    for (int i = 0; i < cfg.N; ++i) {
        double w = phi;
        for (int j = i; j >= 0; --j) {
            A(i, j) = w;
            w *= decay;
        }
        A(i, cfg.N - 1) += std::pow(decay, i + 1);
    }
    return A;
}

bool norm_bound_stable(const ReservoirConfig& cfg, const KernelParams& k, double x0) {
    const double fp = std::abs(kernel_x_derivative(k, x0, 0.0));
    const double decay = std::exp(-cfg.xi);
    double bound = 0.0;
    double shift = 1.0;
    for (int i = 1; i <= cfg.N; ++i) {
        shift *= decay;  // e^{-i xi}
        bound = std::max(bound, shift + (1.0 - shift) * fp);
    }
    return bound < 1.0;
}

double char_poly_spectral_radius(const ReservoirConfig& cfg, double phi) {
    if (phi == 0.0)
        throw DegenerateError("char_poly_spectral_radius: Phi = 0 (spectral radius is e^{-N xi})");
    const int N = cfg.N;
    if (N > 40) throw Error("char_poly_spectral_radius: binomial coefficients overflow for N > 40");
    const double kappa = std::exp(-cfg.N * cfg.xi) / phi;

    // Monic coefficients of (lambda - 1)^N - kappa * lambda^{N-1}.
    std::vector<double> coeff(static_cast<size_t>(N) + 1, 0.0);
    double binom = 1.0;
    for (int j = N; j >= 0; --j) {
        coeff[static_cast<size_t>(j)] = ((N - j) % 2 == 0 ? binom : -binom);
        binom = binom * j / (N - j + 1);
    }
    coeff[static_cast<size_t>(N) - 1] -= kappa;

    if (N == 1) return std::abs(phi * (-coeff[0]));

    Mat companion = Mat::Zero(N, N);
    for (int i = 1; i < N; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < N; ++i) companion(i, N - 1) = -coeff[static_cast<size_t>(i)];
    Eigen::EigenSolver<Mat> es(companion, false);
    return (es.eigenvalues() * phi).cwiseAbs().maxCoeff();
}

double spectral_radius(const Mat& A) {
    Eigen::EigenSolver<Mat> es(A, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

Vec noise_vector(const ReservoirConfig& cfg, const KernelParams& k, double x0, const Vec& mask,
                 int taylor_order, double z) {
    const QPolynomial q = build_q_polynomial(cfg, k, x0, mask, taylor_order);
    const double gain = 1.0 - std::exp(-cfg.xi);
    Vec out(cfg.N);
    for (int r = 0; r < cfg.N; ++r) {
        double acc = 0.0;  // Horner in z
        for (int i = taylor_order; i >= 1; --i) acc = (acc + q.a(i - 1, r)) * z;
        out[r] = gain * acc;
    }
    return out;
}

std::pair<Vec, Mat> noise_moments(const ReservoirConfig& cfg, const KernelParams& k, double x0,
                                  const Vec& mask, int taylor_order,
                                  const std::vector<double>& raw_moments) {
    const int R = taylor_order;
    if (static_cast<int>(raw_moments.size()) < 2 * R + 1)
        throw MomentLengthError("noise_moments: need raw moments up to order " +
                                std::to_string(2 * R));
    const QPolynomial q = build_q_polynomial(cfg, k, x0, mask, R);
    const double gain = 1.0 - std::exp(-cfg.xi);

    const Vec first = q_moment_eval(q, raw_moments, 0);
    Vec mu = gain * first;

    Mat sigma(cfg.N, cfg.N);
    for (int r = 0; r < cfg.N; ++r) {
        for (int s = r; s < cfg.N; ++s) {
            double second = 0.0;  // (q_r * q_s) evaluated at the moments
            for (int i = 1; i <= R; ++i)
                for (int j = 1; j <= R; ++j)
                    second += q.a(i - 1, r) * q.a(j - 1, s) * raw_moments[static_cast<size_t>(i + j)];
            const double v = gain * gain * (second - first[r] * first[s]);
            sigma(r, s) = v;
            sigma(s, r) = v;
        }
    }
    return {std::move(mu), std::move(sigma)};
}

std::vector<double> gaussian_moments(double sigma_z, int max_order) {
    if (sigma_z < 0.0) throw Error("gaussian_moments: sigma_z must be >= 0");
    std::vector<double> m(static_cast<size_t>(max_order) + 1, 0.0);
    m[0] = 1.0;
    const double var = sigma_z * sigma_z;
    for (int i = 2; i <= max_order; i += 2) m[static_cast<size_t>(i)] = m[static_cast<size_t>(i - 2)] * (i - 1) * var;
    return m;
}

Vec stationary_mean(const Mat& A, const Vec& reservoir_at_fp, double x0, const Vec& mu_eps) {
    const int N = static_cast<int>(A.rows());
    const Mat M = Mat::Identity(N, N) - A;
    Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smin = svd.singularValues()(N - 1);
    const double smax = svd.singularValues()(0);
    if (!(smin > 0.0) || smax / smin > 1e12)
        throw SingularError("stationary_mean: I - A is numerically singular");
    const Vec rhs = reservoir_at_fp - A * Vec::Constant(N, x0) + mu_eps;
    return svd.solve(rhs);
}

Mat yule_walker_gamma0(const Mat& A, const Mat& Sigma_eps) {
    const int N = static_cast<int>(A.rows());
    if (spectral_radius(A) >= 1.0)
        throw UnstableError("yule_walker_gamma0: spectral radius of A is >= 1");

    // vec(Gamma0) = (I - A (x) A)^{-1} vec(Sigma_eps), column-major vec.
    Mat M = Mat::Identity(N * N, N * N);
    for (int j = 0; j < N; ++j)
        for (int i = 0; i < N; ++i)
            for (int l = 0; l < N; ++l)
                for (int kk = 0; kk < N; ++kk) M(i + N * j, kk + N * l) -= A(i, kk) * A(j, l);

    Vec rhs(N * N);
    for (int j = 0; j < N; ++j)
        for (int i = 0; i < N; ++i) rhs[i + N * j] = Sigma_eps(i, j);

    const Vec g = M.partialPivLu().solve(rhs);
    Mat gamma(N, N);
    for (int j = 0; j < N; ++j)
        for (int i = 0; i < N; ++i) gamma(i, j) = g[i + N * j];
    return 0.5 * (gamma + gamma.transpose());
}

Mat autocovariance(const Mat& A, const Mat& Gamma0, long lag) {
    Mat g = Gamma0;
    const long n = lag >= 0 ? lag : -lag;
    for (long i = 0; i < n; ++i) g = A * g;
    if (lag < 0) return g.transpose();
    return g;
}

VarApprox build_var_approx(const ReservoirConfig& cfg, const KernelParams& k, double x0,
                           const Vec& mask, int taylor_order,
                           const std::vector<double>& raw_moments, double sigma_z) {
    VarApprox var;
    var.cfg = cfg;
    var.kernel = k;
    var.mask = mask;
    var.x0 = x0;
    var.taylor_order = taylor_order;
    var.raw_moments = raw_moments;
    var.sigma_z = sigma_z;

    var.A = connectivity(cfg, k, x0);
    var.rho = spectral_radius(var.A);
    var.stable = var.rho < 1.0;
    var.qpoly = build_q_polynomial(cfg, k, x0, mask, taylor_order);
    auto [mu, sigma] = noise_moments(cfg, k, x0, mask, taylor_order, raw_moments);
    var.mu_eps = std::move(mu);
    var.Sigma_eps = std::move(sigma);
    if (!var.stable)
        throw UnstableError("build_var_approx: surrogate is unstable (rho = " +
                            std::to_string(var.rho) + ")");
    var.Gamma0 = yule_walker_gamma0(var.A, var.Sigma_eps);
    const Vec fp = step_discrete(cfg, k, Vec::Constant(cfg.N, x0), Vec::Zero(cfg.N));
    var.mu_x = stationary_mean(var.A, fp, x0, var.mu_eps);
    return var;
}

VarApprox build_var_approx(const ReservoirConfig& cfg, const KernelParams& k, double x0,
                           const Vec& mask, int taylor_order, double sigma_z) {
    const int max_order = std::max(2 * taylor_order, taylor_order + 2);
    return build_var_approx(cfg, k, x0, mask, taylor_order, gaussian_moments(sigma_z, max_order),
                            sigma_z);
}

}  // namespace tdrc
