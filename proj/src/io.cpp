#include "tvnet/io.hpp"

#include "tvnet/error.hpp"
#include "tvnet/text.hpp"

#include <bit>
#include <cstring>
#include <sstream>

namespace tvnet {

static_assert(std::endian::native == std::endian::little,
              "binary containers are written in host order and assume little-endian");

namespace {

constexpr char kPathMagic[8] = {'T', 'V', 'N', 'P', 'A', 'T', 'H', '\0'};
constexpr char kPrecMagic[8] = {'T', 'V', 'N', 'P', 'R', 'E', 'C', '\0'};
constexpr char kTruthMagic[8] = {'T', 'V', 'N', 'T', 'R', 'T', 'H', '\0'};

class Writer {
public:
    explicit Writer(const char (&magic)[8]) {
        bytes_.append(magic, 8);
        put<std::uint32_t>(kContainerVersion);
    }
    template <class T>
    void put(T v) {
        bytes_.append(reinterpret_cast<const char*>(&v), sizeof(T));
    }
    void put_index(Eigen::Index v) { put<std::int64_t>(static_cast<std::int64_t>(v)); }
    // Row-major, whatever Eigen's storage order.
    void put_matrix(const Matrix& m) {
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c) put<double>(m(r, c));
    }
    void put_vector(const Vector& v) {
        for (Eigen::Index i = 0; i < v.size(); ++i) put<double>(v[i]);
    }
    std::string take() { return std::move(bytes_); }

private:
    std::string bytes_;
};

class Reader {
public:
    Reader(const std::string& bytes, const char (&magic)[8], const char* what)
        : bytes_(bytes), what_(what) {
        if (bytes_.size() < 12 || std::memcmp(bytes_.data(), magic, 8) != 0)
            throw FormatError(std::string("not a ") + what_ + " container (bad magic)");
        pos_ = 8;
        const auto version = get<std::uint32_t>();
        if (version != kContainerVersion)
            throw FormatError(std::string(what_) + " container version " + std::to_string(version) +
                              " is not supported");
    }
    template <class T>
    T get() {
        if (pos_ + sizeof(T) > bytes_.size())
            throw FormatError(std::string(what_) + " container is truncated");
        T v;
        std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }
    Eigen::Index get_index(Eigen::Index max = Eigen::Index(1) << 40) {
        const auto v = get<std::int64_t>();
        if (v < 0 || v > max) throw FormatError(std::string(what_) + " container has a bad size field");
        return static_cast<Eigen::Index>(v);
    }
    Matrix get_matrix(Eigen::Index rows, Eigen::Index cols) {
        need(rows * cols);
        Matrix m(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = get<double>();
        return m;
    }
    Vector get_vector(Eigen::Index size) {
        need(size);
        Vector v(size);
        for (Eigen::Index i = 0; i < size; ++i) v[i] = get<double>();
        return v;
    }
    void finish() const {
        if (pos_ != bytes_.size())
            throw FormatError(std::string(what_) + " container has trailing bytes");
    }

private:
    void need(Eigen::Index doubles) const {
        if (static_cast<double>(doubles) * 8.0 > static_cast<double>(bytes_.size() - pos_))
            throw FormatError(std::string(what_) + " container is truncated");
    }

    const std::string& bytes_;
    const char* what_;
    std::size_t pos_ = 0;
};

std::uint32_t stage_tag(Stage s) {
    switch (s) {
        case Stage::Preliminary: return 0;
        case Stage::WeightedGroup: return 1;
        case Stage::Oracle: return 2;
        case Stage::Full: return 3;
    }
    return 0;
}

Stage stage_from_tag(std::uint32_t tag) {
    switch (tag) {
        case 0: return Stage::Preliminary;
        case 1: return Stage::WeightedGroup;
        case 2: return Stage::Oracle;
        case 3: return Stage::Full;
        default: throw FormatError("unknown stage tag " + std::to_string(tag));
    }
}

void put_edges(Writer& w, const EdgeSet& edges) {
    w.put_index(static_cast<Eigen::Index>(edges.size()));
    for (const auto& [a, b] : edges.pairs()) {
        w.put_index(a);
        w.put_index(b);
    }
}

EdgeSet get_edges(Reader& r, Eigen::Index d, bool directed) {
    EdgeSet edges(d, directed);
    const Eigen::Index k = r.get_index(d * d);
    for (Eigen::Index e = 0; e < k; ++e) {
        const Eigen::Index a = r.get_index(), b = r.get_index();
        if (a >= d || b >= d) throw FormatError("edge index out of range in truth container");
        edges.add(a, b);
    }
    return edges;
}

std::string load_bytes(const std::filesystem::path& file) { return read_file(file); }

}  // namespace

std::string encode_path(const CoefficientPath& path) {
    const Eigen::Index q = path.estimates.cols();
    if (path.derivatives.rows() != path.n() || path.derivatives.cols() != q)
        throw ShapeError("coefficient path estimates and derivatives differ in shape");
    if (q != path.lag_order * path.d) throw ShapeError("coefficient path width is not p * d");
    Writer w(kPathMagic);
    w.put_index(path.n());
    w.put_index(path.d);
    w.put_index(path.lag_order);
    w.put_index(path.response);
    w.put<std::uint32_t>(stage_tag(path.stage));
    Matrix both(path.n(), 2 * q);
    both << path.estimates, path.derivatives;
    w.put_matrix(both);
    w.put_index(path.lambdas.size());
    w.put_vector(path.lambdas);
    return w.take();
}

CoefficientPath decode_path(const std::string& bytes) {
    Reader r(bytes, kPathMagic, "coefficient path");
    CoefficientPath path;
    const Eigen::Index n = r.get_index();
    path.d = r.get_index();
    path.lag_order = r.get_index();
    path.response = r.get_index();
    path.stage = stage_from_tag(r.get<std::uint32_t>());
    if (path.d < 1 || path.lag_order < 1 || path.response >= path.d)
        throw FormatError("coefficient path header is inconsistent");
    const Eigen::Index q = path.lag_order * path.d;
    const Matrix both = r.get_matrix(n, 2 * q);
    path.estimates = both.leftCols(q);
    path.derivatives = both.rightCols(q);
    path.lambdas = r.get_vector(r.get_index(n));
    r.finish();
    return path;
}

void save_path(const CoefficientPath& path, const std::filesystem::path& file) {
    write_file(file, encode_path(path));
}

CoefficientPath load_path(const std::filesystem::path& file) { return decode_path(load_bytes(file)); }

std::string encode_precision(const PrecisionPath& prec) {
    const Eigen::Index n = prec.n();
    if (n == 0) throw ShapeError("empty precision path");
    const Eigen::Index d = prec.matrices.front().rows();
    if (prec.lambdas.size() != n) throw ShapeError("precision path needs one lambda3 per grid point");
    const bool has_raw = !prec.raw.empty();
    if (has_raw && prec.raw.size() != prec.matrices.size())
        throw ShapeError("raw precision matrices do not match the grid");
    Writer w(kPrecMagic);
    w.put_index(n);
    w.put_index(d);
    w.put<double>(prec.bandwidth);
    w.put_vector(prec.lambdas);
    for (const Matrix& m : prec.matrices) {
        if (m.rows() != d || m.cols() != d) throw ShapeError("precision matrices differ in size");
        w.put_matrix(m);
    }
    w.put<std::uint8_t>(has_raw ? 1 : 0);
    if (has_raw)
        for (const Matrix& m : prec.raw) {
            if (m.rows() != d || m.cols() != d) throw ShapeError("raw precision matrices differ in size");
            w.put_matrix(m);
        }
    return w.take();
}

PrecisionPath decode_precision(const std::string& bytes) {
    Reader r(bytes, kPrecMagic, "precision path");
    PrecisionPath prec;
    const Eigen::Index n = r.get_index();
    const Eigen::Index d = r.get_index(1 << 20);
    prec.bandwidth = r.get<double>();
    prec.lambdas = r.get_vector(n);
    for (Eigen::Index t = 0; t < n; ++t) prec.matrices.push_back(r.get_matrix(d, d));
    const auto has_raw = r.get<std::uint8_t>();
    if (has_raw > 1) throw FormatError("precision path raw flag must be 0 or 1");
    if (has_raw)
        for (Eigen::Index t = 0; t < n; ++t) prec.raw.push_back(r.get_matrix(d, d));
    r.finish();
    return prec;
}

void save_precision(const PrecisionPath& prec, const std::filesystem::path& file) {
    write_file(file, encode_precision(prec));
}

PrecisionPath load_precision(const std::filesystem::path& file) {
    return decode_precision(load_bytes(file));
}

std::string encode_truth(const ScenarioTruth& truth) {
    const auto n = static_cast<std::size_t>(truth.n);
    if (truth.transitions.size() != n || truth.precision.size() != n)
        throw ShapeError("truth paths do not cover the grid");
    Writer w(kTruthMagic);
    w.put<std::int32_t>(truth.example);
    w.put_index(truth.d);
    w.put_index(truth.n);
    for (const Matrix& a : truth.transitions) w.put_matrix(a);
    for (const Matrix& o : truth.precision) w.put_matrix(o);
    put_edges(w, truth.granger);
    put_edges(w, truth.partial);
    w.put_index(truth.loadings_constant.rows());
    w.put_index(truth.loadings_constant.cols());
    w.put_matrix(truth.loadings_constant);
    const Eigen::Index lr = truth.loadings.empty() ? 0 : truth.loadings.front().rows();
    const Eigen::Index lc = truth.loadings.empty() ? 0 : truth.loadings.front().cols();
    w.put_index(static_cast<Eigen::Index>(truth.loadings.size()));
    w.put_index(lr);
    w.put_index(lc);
    for (const Matrix& l : truth.loadings) {
        if (l.rows() != lr || l.cols() != lc) throw ShapeError("loading matrices differ in size");
        w.put_matrix(l);
    }
    return w.take();
}

ScenarioTruth decode_truth(const std::string& bytes) {
    Reader r(bytes, kTruthMagic, "scenario truth");
    ScenarioTruth truth;
    truth.example = r.get<std::int32_t>();
    truth.d = r.get_index(1 << 20);
    truth.n = r.get_index();
    for (Eigen::Index t = 0; t < truth.n; ++t) truth.transitions.push_back(r.get_matrix(truth.d, truth.d));
    for (Eigen::Index t = 0; t < truth.n; ++t) truth.precision.push_back(r.get_matrix(truth.d, truth.d));
    truth.granger = get_edges(r, truth.d, true);
    truth.partial = get_edges(r, truth.d, false);
    const Eigen::Index cr = r.get_index(1 << 20), cc = r.get_index(1 << 20);
    truth.loadings_constant = r.get_matrix(cr, cc);
    const Eigen::Index m = r.get_index(), lr = r.get_index(1 << 20), lc = r.get_index(1 << 20);
    for (Eigen::Index t = 0; t < m; ++t) truth.loadings.push_back(r.get_matrix(lr, lc));
    r.finish();
    return truth;
}

void save_truth(const ScenarioTruth& truth, const std::filesystem::path& file) {
    write_file(file, encode_truth(truth));
}

ScenarioTruth load_truth(const std::filesystem::path& file) { return decode_truth(load_bytes(file)); }

std::string path_csv(const CoefficientPath& path) {
    std::ostringstream out;
    out << "t,tau";
    for (const char* prefix : {"a", "da"})
        for (Eigen::Index k = 1; k <= path.lag_order; ++k)
            for (Eigen::Index j = 1; j <= path.d; ++j) out << ',' << prefix << k << '_' << j;
    out << '\n';
    const Eigen::Index n = path.n();
    for (Eigen::Index t = 0; t < n; ++t) {
        out << t + 1 << ',' << format_double(static_cast<double>(t + 1) / static_cast<double>(n));
        for (Eigen::Index c = 0; c < path.estimates.cols(); ++c)
            out << ',' << format_double(path.estimates(t, c));
        for (Eigen::Index c = 0; c < path.derivatives.cols(); ++c)
            out << ',' << format_double(path.derivatives(t, c));
        out << '\n';
    }
    return out.str();
}

std::string matrix_csv(const Matrix& m) {
    std::ostringstream out;
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? "," : "") << 'v' << c + 1;
    out << '\n';
    write_matrix_rows(out, m);
    return out.str();
}

std::string residuals_csv(const ResidualPanel& res) {
    std::ostringstream out;
    for (Eigen::Index c = 0; c < res.d(); ++c) out << (c ? "," : "") << 'e' << c + 1;
    out << '\n';
    for (Eigen::Index t = 0; t < res.n(); ++t) {
        for (Eigen::Index c = 0; c < res.d(); ++c) {
            if (c) out << ',';
            if (t >= res.first_available) out << format_double(res.values(t, c));
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace tvnet
