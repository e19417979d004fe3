#pragma once

// Factor adjustment: principal components for constant loadings, kernel
// localised principal components for time-varying loadings, and removal of
// the estimated common component.

#include "tvnet/kernels.hpp"
#include "tvnet/panel.hpp"

#include <string>
#include <vector>

namespace tvnet {

enum class FactorMode { None, Constant, TimeVarying };

std::string to_string(FactorMode mode);
FactorMode factor_mode_from_string(const std::string& s);

struct LocalFactors {
    double tau = 0.0;
    Matrix factors;   // n x k, sqrt(n) times unit eigenvectors of Z(tau) Z(tau)'
    Matrix loadings;  // d x k, Z(tau)' F / n
    Vector eigenvalues;
    Vector weights;   // K_{t,h*}(tau), summing to one
};

struct FactorFit {
    FactorMode mode = FactorMode::Constant;
    Eigen::Index k = 0;
    double h_star = 0.0;
    Matrix factors;   // constant mode: n x k
    Matrix loadings;  // constant mode: d x k
    Vector eigenvalues;
    std::vector<LocalFactors> local;  // time-varying mode, one per grid point
    Matrix common;    // n x d fitted common component
};

FactorFit pca_factors(const TimeSeriesPanel& z, Eigen::Index k);

LocalFactors local_pca(const TimeSeriesPanel& z, double tau, double h_star, Eigen::Index k,
                       const KernelSpec& spec = {});

/// Local PCA at every grid point; row t of the common component is taken from
/// the fit at tau_t and rescaled back to the unweighted data.
FactorFit local_pca_path(const TimeSeriesPanel& z, double h_star, Eigen::Index k,
                         const KernelSpec& spec = {}, unsigned threads = 1);

struct FactorNumberSelection {
    Eigen::Index k = 1;
    Vector ic;   // IC(1..qmax)
    Vector rss;  // V_n(1..qmax)
};

/// Minimises IC(q) = log V_n(q) + q * penalty over q = 1..qmax; ties go to the
/// smaller q.  V_n is floored at 1e-12 of the total sum of squares.
FactorNumberSelection select_num_factors(const TimeSeriesPanel& z, FactorMode mode,
                                         Eigen::Index qmax, double h_star = 0.0,
                                         const KernelSpec& spec = {}, unsigned threads = 1);

/// Penalty per factor: (n+d)/(nd) log(min(n,d)) with n replaced by n h* in
/// time-varying mode.
double factor_ic_penalty(FactorMode mode, Eigen::Index n, Eigen::Index d, double h_star);

struct FactorAdjustment {
    TimeSeriesPanel idiosyncratic;
    FactorFit fit;
    FactorNumberSelection selection;  // filled when k was selected
    bool auto_k = false;
};

/// X_hat = Z - common component.  k = 0 or mode None returns Z unchanged;
/// k < 0 selects k with select_num_factors(qmax).
FactorAdjustment factor_adjust(const TimeSeriesPanel& z, FactorMode mode, Eigen::Index k,
                               double h_star, Eigen::Index qmax = 8, const KernelSpec& spec = {},
                               unsigned threads = 1);

}  // namespace tvnet
