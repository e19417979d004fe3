#include "tvnet/kernels.hpp"

#include "tvnet/error.hpp"

#include <algorithm>
#include <cmath>

namespace tvnet {

double kernel_eval(const KernelSpec& spec, double u) {
    const double x = u / spec.support;
    if (std::abs(x) >= 1.0) return 0.0;
    switch (spec.family) {
        case KernelFamily::Epanechnikov:
            return 0.75 * (1.0 - x * x) / spec.support;
        case KernelFamily::Uniform:
            return 0.5 / spec.support;
    }
    return 0.0;
}

Bandwidths default_bandwidths(long n, long d) {
    if (n < 2 || d < 2) throw DomainError("default bandwidths need n >= 2 and d >= 2");
    const double nn = static_cast<double>(n), dd = static_cast<double>(d);
    Bandwidths bw;
    bw.h = 0.75 * std::pow(std::log(dd) / nn, 0.2);
    bw.b = bw.h;
    bw.h_star = (2.35 / std::sqrt(12.0)) * std::pow(std::sqrt(dd) / nn, 0.2);
    return bw;
}

Eigen::VectorXd local_linear_weights(const Eigen::VectorXd& grid, double tau, double b,
                                     const KernelSpec& spec) {
    if (!(b > 0.0)) throw DomainError("bandwidth must be positive");
    const Eigen::Index n = grid.size();
    Eigen::VectorXd k(n), x(n);
    double s1 = 0.0, s2 = 0.0;
    long support = 0;
    for (Eigen::Index t = 0; t < n; ++t) {
        x[t] = (grid[t] - tau) / b;
        k[t] = kernel_eval(spec, x[t]);
        if (k[t] > 0.0) ++support;
        s1 += x[t] * k[t];
        s2 += x[t] * x[t] * k[t];
    }
    if (support < 2)
        throw DegenerateWindowError("fewer than two observations inside the kernel window at tau = " +
                                    std::to_string(tau));
    Eigen::VectorXd w(n);
    for (Eigen::Index t = 0; t < n; ++t) w[t] = k[t] * s2 - x[t] * k[t] * s1;
    return w;
}

double effective_sample_size(const Eigen::VectorXd& grid, double tau, double h,
                             const KernelSpec& spec) {
    double sum = 0.0, mx = 0.0;
    for (Eigen::Index t = 0; t < grid.size(); ++t) {
        const double k = scaled_kernel(spec, grid[t] - tau, h);
        sum += k;
        mx = std::max(mx, k);
    }
    if (mx <= 0.0) throw DegenerateWindowError("empty kernel window");
    return sum / mx;
}

long in_support_count(const Eigen::VectorXd& grid, double tau, double h, const KernelSpec& spec) {
    long c = 0;
    for (Eigen::Index t = 0; t < grid.size(); ++t)
        if (kernel_eval(spec, (grid[t] - tau) / h) > 0.0) ++c;
    return c;
}

}  // namespace tvnet
