#pragma once

#include <Eigen/Dense>

namespace tvnet {

enum class KernelFamily { Epanechnikov, Uniform };

/// Compactly supported, symmetric kernel integrating to one on [-1, 1].
struct KernelSpec {
    KernelFamily family = KernelFamily::Epanechnikov;
    double support = 1.0;
};

double kernel_eval(const KernelSpec& spec, double u);

/// K_h(u) = K(u/h)/h.
inline double scaled_kernel(const KernelSpec& spec, double u, double h) {
    return kernel_eval(spec, u / h) / h;
}

struct Bandwidths {
    double h = 0.0;       // coefficient stages
    double b = 0.0;       // covariance smoother
    double h_star = 0.0;  // local PCA
};

/// h = b = 0.75 (log d / n)^{1/5},  h_star = (2.35/sqrt 12)(sqrt d / n)^{1/5}.
Bandwidths default_bandwidths(long n, long d);

/// Local-linear weights
///   w_t(tau) = K((tau_t - tau)/b) s_2(tau) - K_1((tau_t - tau)/b) s_1(tau),
/// with s_j = sum_t K_j((tau_t - tau)/b) and K_j(x) = x^j K(x).
/// Throws DegenerateWindowError when fewer than two points carry kernel mass.
Eigen::VectorXd local_linear_weights(const Eigen::VectorXd& grid, double tau, double b,
                                     const KernelSpec& spec = {});

/// Kernel-mass surrogate for the local sample size: sum_t K_h / max_t K_h.
double effective_sample_size(const Eigen::VectorXd& grid, double tau, double h,
                             const KernelSpec& spec = {});

/// Number of grid points strictly inside the kernel support around tau.
long in_support_count(const Eigen::VectorXd& grid, double tau, double h,
                      const KernelSpec& spec = {});

}  // namespace tvnet
