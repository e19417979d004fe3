#include "tvnet/networks.hpp"

#include "tvnet/error.hpp"
#include "tvnet/text.hpp"

#include <cmath>
#include <sstream>

namespace tvnet {

namespace {

void check_paths(const std::vector<CoefficientPath>& paths) {
    if (paths.empty()) throw ShapeError("no coefficient paths");
    const Eigen::Index d = paths.front().d, p = paths.front().lag_order, n = paths.front().n();
    if (static_cast<Eigen::Index>(paths.size()) != d)
        throw ShapeError("expected " + std::to_string(d) + " coefficient paths, got " +
                         std::to_string(paths.size()));
    for (const auto& path : paths)
        if (path.d != d || path.lag_order != p || path.n() != n ||
            path.estimates.cols() != p * d)
            throw ShapeError("coefficient paths disagree in shape");
}

std::string node_name(const std::vector<std::string>& names, Eigen::Index i) {
    if (i < static_cast<Eigen::Index>(names.size())) return names[static_cast<std::size_t>(i)];
    return "x" + std::to_string(i + 1);
}

}  // namespace

EdgeSet granger_edges(const std::vector<CoefficientPath>& paths) {
    check_paths(paths);
    for (const auto& path : paths)
        if (path.stage == Stage::Full)
            throw ValidationError(
                "full-fit paths have no exact zeros; use an explicit threshold for Granger edges");
    const Eigen::Index d = paths.front().d, p = paths.front().lag_order;
    EdgeSet edges(d, true);
    for (const auto& path : paths) {
        const Eigen::Index i = path.response;
        for (Eigen::Index k = 0; k < p; ++k)
            for (Eigen::Index j = 0; j < d; ++j)
                if ((path.estimates.col(k * d + j).array() != 0.0).any()) edges.add(i, j);
    }
    return edges;
}

EdgeSet granger_edges_thresholded(const std::vector<CoefficientPath>& paths, double threshold) {
    check_paths(paths);
    const Eigen::Index d = paths.front().d, p = paths.front().lag_order;
    EdgeSet edges(d, true);
    for (const auto& path : paths)
        for (Eigen::Index k = 0; k < p; ++k)
            for (Eigen::Index j = 0; j < d; ++j)
                if (path.estimates.col(k * d + j).cwiseAbs().maxCoeff() > threshold)
                    edges.add(path.response, j);
    return edges;
}

EdgeSet partial_corr_edges(const PrecisionPath& prec) {
    if (prec.matrices.empty()) throw ShapeError("empty precision path");
    if (prec.lambdas.size() != prec.n()) throw ShapeError("precision path lacks per-point lambda3");
    const Eigen::Index d = prec.matrices.front().rows();
    EdgeSet edges(d, false);
    for (Eigen::Index t = 0; t < prec.n(); ++t) {
        const Matrix& w = prec.matrices[static_cast<std::size_t>(t)];
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = i + 1; j < d; ++j)
                if (std::abs(w(i, j)) >= prec.lambdas[t]) edges.add(i, j);
    }
    return edges;
}

NetworkEstimate build_network(const std::vector<CoefficientPath>& paths, const PrecisionPath* prec) {
    check_paths(paths);
    const Eigen::Index d = paths.front().d, p = paths.front().lag_order;
    NetworkEstimate net;
    net.d = d;
    net.granger_stage = to_string(paths.front().stage);
    net.granger = granger_edges(paths);
    net.granger_evidence = Matrix::Zero(d, d);
    net.lag_energy.assign(static_cast<std::size_t>(p), Matrix::Zero(d, d));
    for (const auto& path : paths)
        for (Eigen::Index k = 0; k < p; ++k)
            for (Eigen::Index j = 0; j < d; ++j) {
                const auto col = path.estimates.col(k * d + j);
                net.lag_energy[static_cast<std::size_t>(k)](path.response, j) = col.squaredNorm();
                net.granger_evidence(path.response, j) =
                    std::max(net.granger_evidence(path.response, j), col.cwiseAbs().maxCoeff());
            }
    net.partial = EdgeSet(d, false);
    net.partial_evidence = Matrix::Zero(d, d);
    if (prec) {
        net.partial = partial_corr_edges(*prec);
        net.lambda3 = prec->lambdas;
        for (const Matrix& w : prec->matrices)
            net.partial_evidence = net.partial_evidence.cwiseMax(w.cwiseAbs());
        net.partial_evidence.diagonal().setZero();
    }
    return net;
}

Vector lag_norm_totals(const std::vector<CoefficientPath>& paths, double xi) {
    check_paths(paths);
    const Eigen::Index p = paths.front().lag_order, n = paths.front().n();
    Vector totals = Vector::Zero(p);
    for (Eigen::Index k = 1; k <= p; ++k)
        for (Eigen::Index t = 0; t < n; ++t)
            totals[k - 1] += std::max(transition_matrix(paths, t, k).norm(), xi);
    return totals;
}

Vector ratio_criterion(const Vector& lag_totals, int kmax) {
    if (kmax < 1) throw DomainError("kmax must be at least 1");
    if (lag_totals.size() != 2 * kmax)
        throw ShapeError("ratio criterion needs 2 kmax = " + std::to_string(2 * kmax) +
                         " lag totals, got " + std::to_string(lag_totals.size()));
    Vector ratios(kmax);
    for (int k = 1; k <= kmax; ++k) {
        const double num = lag_totals.segment(k - 1, 2 * kmax - k + 1).sum();
        const double den = lag_totals.segment(k, 2 * kmax - k).sum();
        if (!(den > 0.0)) throw NumericError("ratio criterion denominator is zero; use xi > 0");
        ratios[k - 1] = num / den;
    }
    return ratios;
}

int argmax_order(const Vector& ratios) {
    if (ratios.size() == 0) throw ShapeError("empty ratio vector");
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < ratios.size(); ++k)
        if (ratios[k] > ratios[best]) best = k;
    return static_cast<int>(best + 1);
}

std::string edge_list_csv(const NetworkEstimate& net, const std::vector<std::string>& names) {
    std::ostringstream out;
    out << "src,dst,type,evidence\n";
    // Pair (i, j) means x_j helps predict x_i: the edge runs j -> i.
    for (const auto& [i, j] : net.granger.pairs())
        out << node_name(names, j) << ',' << node_name(names, i) << ",granger,"
            << format_double(net.granger_evidence(i, j)) << '\n';
    for (const auto& [i, j] : net.partial.pairs())
        out << node_name(names, i) << ',' << node_name(names, j) << ",partial,"
            << format_double(net.partial_evidence(i, j)) << '\n';
    return out.str();
}

EdgeLists parse_edge_list_csv(const std::string& text, Eigen::Index d,
                              const std::vector<std::string>& names) {
    auto index_of = [&](const std::string& token, std::size_t line) {
        for (Eigen::Index k = 0; k < d; ++k)
            if (node_name(names, k) == token) return k;
        throw ParseError("edge list line " + std::to_string(line) + ": unknown node '" + token + "'");
    };
    EdgeLists out{EdgeSet(d, true), EdgeSet(d, false)};
    std::istringstream in(text);
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (trim(line).empty()) continue;
        const auto cells = split_csv_line(line);
        if (number == 1 && !cells.empty() && trim(cells[0]) == "src") continue;
        if (cells.size() < 3)
            throw FormatError("edge list line " + std::to_string(number) + " has fewer than 3 cells");
        const Eigen::Index src = index_of(trim(cells[0]), number);
        const Eigen::Index dst = index_of(trim(cells[1]), number);
        const std::string type = trim(cells[2]);
        if (type == "granger")
            out.granger.add(dst, src);
        else if (type == "partial")
            out.partial.add(src, dst);
        else
            throw ParseError("edge list line " + std::to_string(number) + ": unknown edge type '" +
                             type + "'");
    }
    return out;
}

std::string edge_profile_csv(const NetworkEstimate& net, const std::vector<CoefficientPath>& paths,
                             const PrecisionPath* prec, const std::vector<std::string>& names) {
    check_paths(paths);
    std::ostringstream out;
    out << "type,src,dst,lag,t,tau,value\n";
    const Eigen::Index p = paths.front().lag_order, n = paths.front().n();
    for (const auto& [i, j] : net.granger.pairs()) {
        const CoefficientPath* path = nullptr;
        for (const auto& candidate : paths)
            if (candidate.response == i) path = &candidate;
        if (!path) continue;
        for (Eigen::Index k = 1; k <= p; ++k)
            for (Eigen::Index t = 0; t < n; ++t)
                out << "granger," << node_name(names, j) << ',' << node_name(names, i) << ',' << k
                    << ',' << t + 1 << ',' << format_double(static_cast<double>(t + 1) / static_cast<double>(n))
                    << ',' << format_double(path->coefficient(t, k, j)) << '\n';
    }
    if (prec) {
        for (const auto& [i, j] : net.partial.pairs())
            for (Eigen::Index t = 0; t < prec->n(); ++t)
                out << "partial," << node_name(names, i) << ',' << node_name(names, j) << ",0,"
                    << t + 1 << ','
                    << format_double(static_cast<double>(t + 1) / static_cast<double>(prec->n()))
                    << ',' << format_double(prec->matrices[static_cast<std::size_t>(t)](i, j))
                    << '\n';
    }
    return out.str();
}

}  // namespace tvnet
