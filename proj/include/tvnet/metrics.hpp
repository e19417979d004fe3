#pragma once

// Support-recovery and estimation-error measures for simulation studies.

#include "tvnet/edges.hpp"
#include "tvnet/panel.hpp"

#include <map>
#include <string>
#include <vector>

namespace tvnet {

enum class PairUniverse {
    Directed,             // all d^2 ordered pairs, diagonal included
    UndirectedOffDiagonal // d(d-1)/2 pairs i < j
};

struct ConfusionCounts {
    long tp = 0, fp = 0, fn = 0, tn = 0;
};

struct ClassificationMetrics {
    ConfusionCounts counts;
    double tpr = 0.0, tnr = 0.0, ppv = 0.0, npv = 0.0, f1 = 0.0, mcc = 0.0;
};

ConfusionCounts confusion(const EdgeSet& estimate, const EdgeSet& truth, PairUniverse universe);

/// Rates from counts.  A zero denominator gives 0, except that an empty truth
/// recovered by an empty estimate scores F1 = MCC = 1.
ClassificationMetrics classification_metrics(const ConfusionCounts& counts);
ClassificationMetrics classification_metrics(const EdgeSet& estimate, const EdgeSet& truth,
                                             PairUniverse universe);

/// (1/(n sqrt d)) sum_t ||est_t - truth_t||_F.
double scaled_frobenius_error(const std::vector<Matrix>& estimate, const std::vector<Matrix>& truth);

/// sqrt(mean (e_hat - e)^2) over rows first_row..n-1.
double rmse_errors(const Matrix& estimated, const Matrix& truth, Eigen::Index first_row);

/// Average over columns of 1 - sum e_hat^2 / sum (x - mean x)^2 on rows first_row..n-1.
double average_r2(const Matrix& values, const Matrix& residuals, Eigen::Index first_row);

struct ErrorReport {
    double ee_a = 0.0;
    double rmse_e = 0.0;
    double ee_omega = 0.0;
    double avg_r2 = 0.0;
};

/// One replication's named measures; names are stable report keys.
using MetricRecord = std::map<std::string, double>;

void add_classification(MetricRecord& record, const ClassificationMetrics& m);

struct MetricSummary {
    double mean = 0.0;
    double sd = 0.0;  // sample standard deviation, 0 for a single record
    long count = 0;
};

/// Per-metric mean and standard deviation with compensated summation; records
/// may carry different keys.
std::map<std::string, MetricSummary> aggregate(const std::vector<MetricRecord>& records);

}  // namespace tvnet
