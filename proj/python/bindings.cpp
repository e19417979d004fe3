// Python bindings for the main operations.  Matrices cross as NumPy arrays;
// per-time matrix sequences come back as (n, d, d) stacks and edge sets as
// sorted lists of index pairs.

#include "tvnet/benchmark.hpp"
#include "tvnet/error.hpp"
#include "tvnet/factors.hpp"
#include "tvnet/kernels.hpp"
#include "tvnet/metrics.hpp"
#include "tvnet/pipeline.hpp"
#include "tvnet/simulate.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace tvnet;

namespace {

py::array_t<double> stack(const std::vector<Matrix>& ms, Eigen::Index rows, Eigen::Index cols) {
    py::array_t<double> out({static_cast<py::ssize_t>(ms.size()), static_cast<py::ssize_t>(rows),
                             static_cast<py::ssize_t>(cols)});
    auto v = out.mutable_unchecked<3>();
    for (std::size_t t = 0; t < ms.size(); ++t)
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j) v(t, i, j) = ms[t](i, j);
    return out;
}

py::list pairs(const EdgeSet& e) {
    py::list out;
    for (const auto& [i, j] : e.pairs()) out.append(py::make_tuple(i, j));
    return out;
}

EdgeSet edge_set(const std::vector<std::pair<Eigen::Index, Eigen::Index>>& ps, Eigen::Index d, bool directed) {
    EdgeSet e(d, directed);
    for (const auto& [i, j] : ps) {
        if (i < 0 || j < 0 || i >= d || j >= d) throw DomainError("edge index out of range");
        e.add(i, j);
    }
    return e;
}

FactorMode mode_of(const std::string& s) { return factor_mode_from_string(s); }

py::dict simulate(int example, Eigen::Index d, Eigen::Index n, std::uint64_t seed, std::uint32_t replication,
                  int burn_in) {
    const SimulatedData data = [&] {
        py::gil_scoped_release release;
        return generate({example, d, n, seed, replication, burn_in});
    }();
    py::dict out;
    out["panel"] = data.panel.values();
    out["innovations"] = data.innovations;
    out["transitions"] = stack(data.truth.transitions, d, d);
    out["precision"] = stack(data.truth.precision, d, d);
    out["granger"] = pairs(data.truth.granger);
    out["partial"] = pairs(data.truth.partial);
    if (example == 4) {
        out["factors"] = data.factors;
        out["idiosyncratic"] = data.idiosyncratic;
        out["loadings"] = stack(data.truth.loadings, d, data.truth.loadings.front().cols());
    }
    return out;
}

py::dict estimate(const Matrix& values, Eigen::Index p, double h, double b, double gamma, double lambda3,
                  unsigned threads) {
    EstimateOptions o;
    o.lag_order = p;
    o.h = h;
    o.b = b;
    o.gamma = gamma;
    if (lambda3 > 0.0) o.lambda3 = Lambda3Rule::fixed(lambda3);
    o.threads = threads;
    const PipelineResult r = [&] {
        py::gil_scoped_release release;
        return estimate_network(TimeSeriesPanel(values), o);
    }();
    const Eigen::Index n = values.rows(), d = values.cols();
    std::vector<Matrix> lags;
    for (Eigen::Index k = 1; k <= p; ++k)
        for (Eigen::Index t = 0; t < n; ++t) lags.push_back(transition_matrix(r.var.paths, t, k));
    auto coef = stack(lags, d, d);
    coef.resize({static_cast<py::ssize_t>(p), static_cast<py::ssize_t>(n), static_cast<py::ssize_t>(d),
                 static_cast<py::ssize_t>(d)});
    py::dict out;
    out["coefficients"] = coef;
    out["precision"] = stack(r.precision.matrices, d, d);
    out["lambda2"] = r.var.lambda2;
    out["lambda3"] = Vector(r.precision.lambdas);
    out["granger"] = pairs(r.network.granger);
    out["partial"] = pairs(r.network.partial);
    out["h"] = r.bandwidths.h;
    out["b"] = r.bandwidths.b;
    return out;
}

}  // namespace

PYBIND11_MODULE(_tvnet, m) {
    m.doc() = "Time-varying Granger and partial-correlation networks";

    static py::exception<Error> numeric_error(m, "NumericError", PyExc_ArithmeticError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            switch (e.kind()) {
                case ErrorKind::Validation: PyErr_SetString(PyExc_ValueError, e.what()); return;
                case ErrorKind::IO: PyErr_SetString(PyExc_OSError, e.what()); return;
                case ErrorKind::Numeric: py::set_error(numeric_error, e.what()); return;
            }
        }
    });

    m.def("default_bandwidths", [](Eigen::Index n, Eigen::Index d) {
        const auto bw = default_bandwidths(n, d);
        return py::dict(py::arg("h") = bw.h, py::arg("b") = bw.b, py::arg("h_star") = bw.h_star);
    }, py::arg("n"), py::arg("d"));

    m.def("simulate", &simulate, py::arg("example"), py::arg("d"), py::arg("n"), py::arg("seed") = 1,
          py::arg("replication") = 0, py::arg("burn_in") = 200,
          "One replication of a simulation example with its truth.");

    m.def("estimate", &estimate, py::arg("panel"), py::arg("p") = 1, py::arg("h") = 0.0, py::arg("b") = 0.0,
          py::arg("gamma") = 1.0, py::arg("lambda3") = 0.0, py::arg("threads") = 1,
          "Three-stage estimate of the coefficient paths, precision path and both networks.\n"
          "Zero bandwidths and lambda3 select the defaults.");

    m.def("select_var_order", [](const Matrix& values, int kmax, double xi, unsigned threads) {
        EstimateOptions o;
        o.threads = threads;
        py::gil_scoped_release release;
        return select_var_order(TimeSeriesPanel(values), kmax, xi, o).order;
    }, py::arg("panel"), py::arg("kmax") = 10, py::arg("xi") = 0.1, py::arg("threads") = 1);

    m.def("factor_adjust", [](const Matrix& values, const std::string& mode, Eigen::Index k, double h_star) {
        const FactorMode fm = mode_of(mode);
        if (fm == FactorMode::TimeVarying && h_star <= 0.0) h_star = default_bandwidths(values.rows(), values.cols()).h_star;
        py::gil_scoped_release release;
        const auto adj = factor_adjust(TimeSeriesPanel(values), fm, k, h_star);
        return std::make_pair(Matrix(adj.idiosyncratic.values()), adj.fit.k);
    }, py::arg("panel"), py::arg("mode") = "time-varying", py::arg("k") = -1, py::arg("h_star") = 0.0,
       "Returns (idiosyncratic panel, number of factors).  k < 0 selects it.");

    m.def("classification_metrics",
          [](const std::vector<std::pair<Eigen::Index, Eigen::Index>>& estimate,
             const std::vector<std::pair<Eigen::Index, Eigen::Index>>& truth, Eigen::Index d, bool directed) {
              const auto c = classification_metrics(edge_set(estimate, d, directed), edge_set(truth, d, directed),
                                                    directed ? PairUniverse::Directed
                                                             : PairUniverse::UndirectedOffDiagonal);
              py::dict out;
              out["TP"] = c.counts.tp;
              out["FP"] = c.counts.fp;
              out["FN"] = c.counts.fn;
              out["TN"] = c.counts.tn;
              out["TPR"] = c.tpr;
              out["TNR"] = c.tnr;
              out["PPV"] = c.ppv;
              out["NPV"] = c.npv;
              out["F1"] = c.f1;
              out["MCC"] = c.mcc;
              return out;
          },
          py::arg("estimate"), py::arg("truth"), py::arg("d"), py::arg("directed") = true);

    m.def("benchmark", [](int example, Eigen::Index d, Eigen::Index n, int reps, const std::vector<std::string>& methods,
                          std::uint64_t seed, unsigned threads) {
        BenchmarkConfig c;
        c.example = example;
        c.d = d;
        c.n = n;
        c.reps = reps;
        c.seed = seed;
        c.methods.clear();
        for (const auto& s : methods) c.methods.push_back(method_from_string(s));
        c.options.threads = threads;
        const BenchmarkResult r = [&] {
            py::gil_scoped_release release;
            return run_benchmark(c);
        }();
        py::dict out;
        for (const auto& [method, metrics] : r.summary) {
            py::dict cells;
            for (const auto& [name, s] : metrics) cells[py::str(name)] = py::make_tuple(s.mean, s.sd, s.count);
            out[py::str(method)] = cells;
        }
        return py::make_tuple(out, r.failures);
    }, py::arg("example"), py::arg("d"), py::arg("n"), py::arg("reps") = 1,
       py::arg("methods") = std::vector<std::string>{"wglasso", "oracle"}, py::arg("seed") = 1,
       py::arg("threads") = 1,
       "Monte-Carlo summary: ({method: {metric: (mean, sd, count)}}, {method: failures}).");
}
