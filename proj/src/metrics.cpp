#include "tvnet/metrics.hpp"

#include "tvnet/error.hpp"

#include <cmath>

namespace tvnet {

ConfusionCounts confusion(const EdgeSet& estimate, const EdgeSet& truth, PairUniverse universe) {
    if (estimate.d() != truth.d()) throw ShapeError("edge sets over different node counts");
    const Eigen::Index d = truth.d();
    ConfusionCounts c;
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) {
            if (universe == PairUniverse::UndirectedOffDiagonal && j <= i) continue;
            const bool est = estimate.contains(i, j), tru = truth.contains(i, j);
            if (est && tru) ++c.tp;
            else if (est) ++c.fp;
            else if (tru) ++c.fn;
            else ++c.tn;
        }
    return c;
}

ClassificationMetrics classification_metrics(const ConfusionCounts& c) {
    auto ratio = [](double num, double den) { return den > 0.0 ? num / den : 0.0; };
    const double tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp);
    const double fn = static_cast<double>(c.fn), tn = static_cast<double>(c.tn);
    ClassificationMetrics m;
    m.counts = c;
    m.tpr = ratio(tp, tp + fn);
    m.tnr = ratio(tn, tn + fp);
    m.ppv = ratio(tp, tp + fp);
    m.npv = ratio(tn, tn + fn);
    if (c.tp + c.fp + c.fn == 0) {
        m.f1 = 1.0;
        m.mcc = 1.0;
        return m;
    }
    m.f1 = ratio(2.0 * m.ppv * m.tpr, m.ppv + m.tpr);
    const double den = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
    m.mcc = den > 0.0 ? (tp * tn - fp * fn) / std::sqrt(den) : 0.0;
    return m;
}

ClassificationMetrics classification_metrics(const EdgeSet& estimate, const EdgeSet& truth,
                                             PairUniverse universe) {
    return classification_metrics(confusion(estimate, truth, universe));
}

double scaled_frobenius_error(const std::vector<Matrix>& estimate, const std::vector<Matrix>& truth) {
    if (estimate.size() != truth.size() || truth.empty())
        throw ShapeError("matrix paths differ in length or are empty");
    double total = 0.0;
    Eigen::Index d = truth.front().rows();
    for (std::size_t t = 0; t < truth.size(); ++t) {
        if (estimate[t].rows() != truth[t].rows() || estimate[t].cols() != truth[t].cols())
            throw ShapeError("matrix path entries differ in shape");
        total += (estimate[t] - truth[t]).norm();
    }
    return total / (static_cast<double>(truth.size()) * std::sqrt(static_cast<double>(d)));
}

double rmse_errors(const Matrix& estimated, const Matrix& truth, Eigen::Index first_row) {
    if (estimated.rows() != truth.rows() || estimated.cols() != truth.cols())
        throw ShapeError("residual panels differ in shape");
    const Eigen::Index rows = truth.rows() - first_row;
    if (rows <= 0) throw ShapeError("no residual rows to compare");
    const auto diff = estimated.bottomRows(rows) - truth.bottomRows(rows);
    return std::sqrt(diff.squaredNorm() / static_cast<double>(rows * truth.cols()));
}

double average_r2(const Matrix& values, const Matrix& residuals, Eigen::Index first_row) {
    if (values.rows() != residuals.rows() || values.cols() != residuals.cols())
        throw ShapeError("panel and residuals differ in shape");
    const Eigen::Index rows = values.rows() - first_row;
    if (rows < 2) throw ShapeError("too few rows for R^2");
    double total = 0.0;
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
        const auto x = values.col(j).tail(rows);
        const double centred = (x.array() - x.mean()).square().sum();
        const double sse = residuals.col(j).tail(rows).squaredNorm();
        total += centred > 0.0 ? 1.0 - sse / centred : 0.0;
    }
    return total / static_cast<double>(values.cols());
}

void add_classification(MetricRecord& record, const ClassificationMetrics& m) {
    record["FP"] = static_cast<double>(m.counts.fp);
    record["FN"] = static_cast<double>(m.counts.fn);
    record["TPR"] = m.tpr;
    record["TNR"] = m.tnr;
    record["PPV"] = m.ppv;
    record["NPV"] = m.npv;
    record["F1"] = m.f1;
    record["MCC"] = m.mcc;
}

namespace {

struct Neumaier {
    double sum = 0.0, comp = 0.0;
    void add(double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

}  // namespace

std::map<std::string, MetricSummary> aggregate(const std::vector<MetricRecord>& records) {
    std::map<std::string, std::vector<double>> columns;
    for (const auto& rec : records)
        for (const auto& [key, value] : rec) columns[key].push_back(value);
    std::map<std::string, MetricSummary> out;
    for (const auto& [key, values] : columns) {
        Neumaier sum;
        for (double v : values) sum.add(v);
        MetricSummary s;
        s.count = static_cast<long>(values.size());
        s.mean = sum.value() / static_cast<double>(values.size());
        if (values.size() > 1) {
            Neumaier sq;
            for (double v : values) sq.add((v - s.mean) * (v - s.mean));
            s.sd = std::sqrt(sq.value() / static_cast<double>(values.size() - 1));
        }
        out[key] = s;
    }
    return out;
}

}  // namespace tvnet
