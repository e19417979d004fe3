#pragma once

// Kernel-weighted quadratic forms of the local-linear objective.
//
// For evaluation point tau and bandwidth h, each usable row s contributes
// z_s = (x_s, u_s x_s) with u_s = (tau_s - tau)/h, so that coefficients are
// theta = (alpha, h * beta).  With weights w_s = K_h(tau_s - tau)/n the local
// loss of response y is
//
//     L(theta) = yy - 2 c' theta + theta' G theta,
//     G = sum_s w_s z_s z_s',  c = sum_s w_s z_s y_s,  yy = sum_s w_s y_s^2.

#include "tvnet/kernels.hpp"
#include "tvnet/panel.hpp"

#include <vector>

namespace tvnet {

struct LocalSystem {
    double tau = 0.0;
    Matrix gram;         // 2q x 2q
    Matrix cross;        // 2q x r, one column per response
    Vector yy;           // r
    double kernel_mass = 0.0;  // sum_s K_h(tau_s - tau) over usable rows
    double kernel_max = 0.0;
    long support = 0;          // rows with positive weight

    double loss(const Vector& theta, Eigen::Index response) const;
    /// Effective sample size sum K_h / max K_h.
    double effective_size() const { return kernel_mass / kernel_max; }
};

LocalSystem build_local_system(const Matrix& regressors, const Matrix& responses,
                               const Vector& times, double tau, double h, Eigen::Index n,
                               const KernelSpec& spec = {});

/// Local systems at every point of an evaluation grid, shared across the
/// responses of one panel.
class LocalSystems {
public:
    LocalSystems() = default;
    LocalSystems(const Matrix& regressors, const Matrix& responses, const Vector& times,
                 const Vector& eval_points, double h, Eigen::Index n, const KernelSpec& spec = {},
                 unsigned threads = 1);

    /// Systems for a single-response design.
    static LocalSystems for_design(const LaggedDesign& design, double h,
                                   const KernelSpec& spec = {}, unsigned threads = 1);
    /// Systems for every response of a panel at lag order p.
    static LocalSystems for_panel(const TimeSeriesPanel& panel, Eigen::Index p, double h,
                                  const KernelSpec& spec = {}, unsigned threads = 1);

    std::size_t size() const { return systems_.size(); }
    const LocalSystem& operator[](std::size_t t) const { return systems_[t]; }
    Eigen::Index num_coefficients() const { return q_; }
    Eigen::Index num_responses() const { return r_; }
    double bandwidth() const { return h_; }

    /// Response values and regressors, needed for in-sample fit statistics.
    const Matrix& regressors() const { return regressors_; }
    const Matrix& responses() const { return responses_; }

private:
    std::vector<LocalSystem> systems_;
    Matrix regressors_;
    Matrix responses_;
    Eigen::Index q_ = 0;
    Eigen::Index r_ = 0;
    double h_ = 0.0;
};

}  // namespace tvnet
