#include "mcsvm/data_gen.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mcsvm/core_model.hpp"
#include "mcsvm/errors.hpp"
#include "mcsvm/rng.hpp"

namespace mcsvm {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<double> split_doubles(const std::string& line) {
    std::vector<double> out;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open file for reading: " + path);
    return f;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open file for writing: " + path);
    return f;
}

}  // namespace

Shape shape_from_string(const std::string& s) {
    if (s == "gaussian") return Shape::gaussian;
    if (s == "uniform-ball") return Shape::uniform_ball;
    if (s.rfind("student-t", 0) == 0) return Shape::student_t;
    throw std::invalid_argument("unknown component shape: " + s);
}

std::string to_string(Shape s) {
    switch (s) {
        case Shape::gaussian: return "gaussian";
        case Shape::uniform_ball: return "uniform-ball";
        case Shape::student_t: return "student-t";
    }
    throw std::invalid_argument("unknown shape enum value");
}

void ComponentSpec::validate() const {
    if (sigma < 0.0) throw std::invalid_argument("ComponentSpec: sigma must be >= 0");
    if (shape == Shape::student_t && nu <= 2.0)
        throw std::invalid_argument("ComponentSpec: student-t requires nu > 2");
}

void MixtureSpec::validate() const {
    if (components.empty()) throw std::invalid_argument("MixtureSpec: needs at least one component");
    if (weights.size() != static_cast<Eigen::Index>(components.size()))
        throw std::invalid_argument("MixtureSpec: weights/components length mismatch");
    if (std::abs(weights.sum() - 1.0) > 1e-12)
        throw std::invalid_argument("MixtureSpec: weights must sum to 1");
    if (weights.minCoeff() < alpha - 1e-12)
        throw std::invalid_argument("MixtureSpec: some weight is below the floor alpha");
    for (const auto& c : components) c.validate();
}

GroundTruth make_ground_truth(int k, int d, double gamma, double sigma, double C, double alpha,
                              std::uint64_t seed, Shape shape, double nu) {
    if (k < 2) throw std::invalid_argument("make_ground_truth: k must be >= 2");
    if (d < k) throw std::invalid_argument("make_ground_truth: requires d >= k");
    if (gamma <= 0.0 || sigma < 0.0 || C < 1.0)
        throw std::invalid_argument("make_ground_truth: gamma > 0, sigma >= 0, C >= 1 required");
    if (alpha <= 0.0 || alpha > 1.0 / k + 1e-12)
        throw std::invalid_argument("make_ground_truth: alpha must lie in (0, 1/k]");

    // Seeded random orthonormal frame: QR of a gaussian d x k matrix.
    Rng rng(derive_seed(seed, 0));
    Matrix G(d, k);
    for (int j = 0; j < k; ++j)
        for (int i = 0; i < d; ++i) G(i, j) = rng.normal();
    Eigen::HouseholderQR<Matrix> qr(G);
    Matrix Q = qr.householderQ() * Matrix::Identity(d, k);

    RowMajorMatrix rows(k, d);
    const double row_scale = 1.0 / std::sqrt(static_cast<double>(k));
    for (int j = 0; j < k; ++j) rows.row(j) = Q.col(j).transpose() * row_scale;
    WeightMatrix wstar(std::move(rows));

    // Mean of class j at R * u_j: margin R/sqrt(k), pairwise distance R*sqrt(2).
    const double r_margin = 2.0 * gamma * std::sqrt(static_cast<double>(k));
    const double sep_needed = C * C * 2.0 * sigma / std::sqrt(alpha);
    const double r_sep = 1.01 * sep_needed / std::sqrt(2.0);
    const double R = std::max(r_margin, r_sep);

    MixtureSpec spec;
    spec.alpha = alpha;
    spec.weights = Vector::Constant(k, 1.0 / k);
    for (int j = 0; j < k; ++j) {
        ComponentSpec c;
        c.mean = R * Q.col(j);
        c.sigma = sigma;
        c.shape = shape;
        c.nu = nu;
        c.validate();
        spec.components.push_back(std::move(c));
    }
    spec.validate();

    GroundTruth gt{std::move(wstar), gamma, std::move(spec), {}};

    for (int j = 0; j < k; ++j) {
        const double m = margin_of(gt.wstar, gt.spec.components[j].mean, j + 1);
        if (m < 2.0 * gamma * (1.0 - 1e-9))
            throw InfeasibleConfigError("make_ground_truth: margin constraint violated (mean " +
                                        std::to_string(j + 1) + " has margin " + std::to_string(m) +
                                        " < 2*gamma)");
    }
    for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b) {
            const double dist = (gt.spec.components[a].mean - gt.spec.components[b].mean).norm();
            if (dist <= sep_needed)
                throw InfeasibleConfigError(
                    "make_ground_truth: separation constraint violated between means " +
                    std::to_string(a + 1) + " and " + std::to_string(b + 1));
        }

    if (gamma <= 4.0 * C * sigma)
        gt.warnings.push_back("gamma <= 4*C*sigma: outside the guarantee regime");
    return gt;
}

Matrix sample_component(const ComponentSpec& comp, int n, std::uint64_t seed) {
    if (n < 0) throw std::invalid_argument("sample_component: n must be >= 0");
    comp.validate();
    const auto d = comp.mean.size();
    Matrix out(n, d);
    Rng rng(seed);
    switch (comp.shape) {
        case Shape::gaussian:
            for (int i = 0; i < n; ++i)
                for (Eigen::Index j = 0; j < d; ++j)
                    out(i, j) = comp.mean[j] + comp.sigma * rng.normal();
            break;
        case Shape::uniform_ball: {
            // per-coordinate variance of the uniform ball of radius r is
            // r^2/(d+2); pick r so it equals sigma^2
            const double r = comp.sigma * std::sqrt(static_cast<double>(d) + 2.0);
            for (int i = 0; i < n; ++i) {
                Vector dir(d);
                for (Eigen::Index j = 0; j < d; ++j) dir[j] = rng.normal();
                const double norm = dir.norm();
                if (norm == 0.0) {
                    out.row(i) = comp.mean.transpose();
                    continue;
                }
                const double radius = r * std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
                out.row(i) = (comp.mean + dir * (radius / norm)).transpose();
            }
            break;
        }
        case Shape::student_t: {
            // rescale so per-coordinate variance is sigma^2
            const double scale = comp.sigma * std::sqrt((comp.nu - 2.0) / comp.nu);
            for (int i = 0; i < n; ++i)
                for (Eigen::Index j = 0; j < d; ++j)
                    out(i, j) = comp.mean[j] + scale * rng.student_t(comp.nu);
            break;
        }
    }
    return out;
}

LabeledSet sample_clean(const GroundTruth& gt, int n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_clean: n must be >= 1");
    gt.spec.validate();
    const int d = gt.wstar.dim();
    const int k = gt.wstar.num_classes();
    const int K = static_cast<int>(gt.spec.components.size());

    LabeledSet out(d, k, n);
    Rng rng(seed);
    const long budget = 10L * n;
    long attempts = 0;
    long rejected = 0;
    Vector x(d);
    while (out.size() < n) {
        if (attempts >= budget)
            throw InfeasibleConfigError(
                "sample_clean: rejection budget exhausted (gamma too large for sigma); "
                "rejection rate " +
                std::to_string(static_cast<double>(rejected) / static_cast<double>(attempts)));
        ++attempts;

        // component index by CDF inversion
        double u = rng.uniform();
        int j = K - 1;
        double acc = 0.0;
        for (int c = 0; c < K; ++c) {
            acc += gt.spec.weights[c];
            if (u < acc) {
                j = c;
                break;
            }
        }
        const ComponentSpec& comp = gt.spec.components[static_cast<std::size_t>(j)];
        switch (comp.shape) {
            case Shape::gaussian:
                for (int i = 0; i < d; ++i) x[i] = comp.mean[i] + comp.sigma * rng.normal();
                break;
            case Shape::uniform_ball: {
                const double r = comp.sigma * std::sqrt(static_cast<double>(d) + 2.0);
                Vector dir(d);
                for (int i = 0; i < d; ++i) dir[i] = rng.normal();
                const double norm = dir.norm();
                const double radius = r * std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
                x = norm == 0.0 ? comp.mean : Vector(comp.mean + dir * (radius / norm));
                break;
            }
            case Shape::student_t: {
                const double scale = comp.sigma * std::sqrt((comp.nu - 2.0) / comp.nu);
                for (int i = 0; i < d; ++i) x[i] = comp.mean[i] + scale * rng.student_t(comp.nu);
                break;
            }
        }
        const int y = predict(gt.wstar, x);
        if (margin_of(gt.wstar, x, y) < gt.gamma) {
            ++rejected;
            continue;
        }
        out.add(x, y);
    }
    out.rejection_rate =
        attempts > 0 ? static_cast<double>(rejected) / static_cast<double>(attempts) : 0.0;
    if (out.rejection_rate > 0.5)
        throw InfeasibleConfigError("sample_clean: rejection rate exceeds 50% (gamma too large for sigma)");
    return out;
}

void save_labeled_set(const LabeledSet& S, std::ostream& out) {
    out << "#d=" << S.dim() << " k=" << S.num_classes() << " n=" << S.size() << "\n";
    for (int i = 0; i < S.size(); ++i) {
        for (int j = 0; j < S.dim(); ++j) out << fmt_double(S.x(i)[j]) << ",";
        out << S.label(i) << "\n";
    }
}

void save_labeled_set(const LabeledSet& S, const std::string& path) {
    auto f = open_out(path);
    save_labeled_set(S, f);
}

LabeledSet load_labeled_set(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error("labeled set: empty file");
    int d = 0, k = 0, n = 0;
    if (std::sscanf(header.c_str(), "#d=%d k=%d n=%d", &d, &k, &n) != 3)
        throw std::runtime_error("labeled set: malformed header: " + header);
    LabeledSet S(d, k, n);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto vals = split_doubles(line);
        if (static_cast<int>(vals.size()) != d + 1)
            throw std::runtime_error("labeled set: row has wrong arity: " + line);
        Vector x(d);
        for (int j = 0; j < d; ++j) x[j] = vals[static_cast<std::size_t>(j)];
        S.add(x, static_cast<int>(vals.back()));
    }
    if (S.size() != n) throw std::runtime_error("labeled set: header n does not match row count");
    return S;
}

LabeledSet load_labeled_set(const std::string& path) {
    auto f = open_in(path);
    return load_labeled_set(f);
}

void save_model(const WeightMatrix& W, std::ostream& out) {
    out << "#k=" << W.num_classes() << " d=" << W.dim() << "\n";
    for (int y = 1; y <= W.num_classes(); ++y) {
        auto r = W.row(y);
        for (int j = 0; j < W.dim(); ++j) out << (j ? "," : "") << fmt_double(r[j]);
        out << "\n";
    }
}

void save_model(const WeightMatrix& W, const std::string& path) {
    auto f = open_out(path);
    save_model(W, f);
}

WeightMatrix load_model(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error("model: empty file");
    int k = 0, d = 0;
    if (std::sscanf(header.c_str(), "#k=%d d=%d", &k, &d) != 2)
        throw std::runtime_error("model: malformed header: " + header);
    RowMajorMatrix rows(k, d);
    std::string line;
    for (int y = 0; y < k; ++y) {
        if (!std::getline(in, line)) throw std::runtime_error("model: truncated file");
        auto vals = split_doubles(line);
        if (static_cast<int>(vals.size()) != d) throw std::runtime_error("model: row has wrong arity");
        for (int j = 0; j < d; ++j) rows(y, j) = vals[static_cast<std::size_t>(j)];
    }
    return WeightMatrix(std::move(rows));
}

WeightMatrix load_model(const std::string& path) {
    auto f = open_in(path);
    return load_model(f);
}

void save_ground_truth(const GroundTruth& gt, std::ostream& out) {
    const int K = static_cast<int>(gt.spec.components.size());
    out << "#gt k=" << gt.wstar.num_classes() << " d=" << gt.wstar.dim() << " K=" << K << "\n";
    out << "gamma=" << fmt_double(gt.gamma) << "\n";
    out << "alpha=" << fmt_double(gt.spec.alpha) << "\n";
    for (int y = 1; y <= gt.wstar.num_classes(); ++y) {
        auto r = gt.wstar.row(y);
        for (int j = 0; j < gt.wstar.dim(); ++j) out << (j ? "," : "") << fmt_double(r[j]);
        out << "\n";
    }
    for (int c = 0; c < K; ++c) {
        const auto& comp = gt.spec.components[static_cast<std::size_t>(c)];
        out << to_string(comp.shape) << " " << fmt_double(comp.sigma) << " " << fmt_double(comp.nu)
            << " " << fmt_double(gt.spec.weights[c]);
        for (Eigen::Index j = 0; j < comp.mean.size(); ++j) out << " " << fmt_double(comp.mean[j]);
        out << "\n";
    }
}

void save_ground_truth(const GroundTruth& gt, const std::string& path) {
    auto f = open_out(path);
    save_ground_truth(gt, f);
}

GroundTruth load_ground_truth(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error("ground truth: empty file");
    int k = 0, d = 0, K = 0;
    if (std::sscanf(header.c_str(), "#gt k=%d d=%d K=%d", &k, &d, &K) != 3)
        throw std::runtime_error("ground truth: malformed header: " + header);
    std::string line;
    if (!std::getline(in, line) || line.rfind("gamma=", 0) != 0)
        throw std::runtime_error("ground truth: missing gamma line");
    const double gamma = std::stod(line.substr(6));
    if (!std::getline(in, line) || line.rfind("alpha=", 0) != 0)
        throw std::runtime_error("ground truth: missing alpha line");
    const double alpha = std::stod(line.substr(6));

    RowMajorMatrix rows(k, d);
    for (int y = 0; y < k; ++y) {
        if (!std::getline(in, line)) throw std::runtime_error("ground truth: truncated w* block");
        auto vals = split_doubles(line);
        if (static_cast<int>(vals.size()) != d) throw std::runtime_error("ground truth: bad w* row");
        for (int j = 0; j < d; ++j) rows(y, j) = vals[static_cast<std::size_t>(j)];
    }

    MixtureSpec spec;
    spec.alpha = alpha;
    spec.weights = Vector(K);
    for (int c = 0; c < K; ++c) {
        if (!std::getline(in, line)) throw std::runtime_error("ground truth: truncated components");
        std::stringstream ss(line);
        std::string shape_tok;
        ComponentSpec comp;
        double weight;
        ss >> shape_tok >> comp.sigma >> comp.nu >> weight;
        if (!ss) throw std::runtime_error("ground truth: bad component line: " + line);
        comp.shape = shape_from_string(shape_tok);
        comp.mean = Vector(d);
        for (int j = 0; j < d; ++j) ss >> comp.mean[j];
        if (!ss) throw std::runtime_error("ground truth: bad component mean: " + line);
        spec.weights[c] = weight;
        spec.components.push_back(std::move(comp));
    }
    spec.validate();
    return GroundTruth{WeightMatrix(std::move(rows)), gamma, std::move(spec), {}};
}

GroundTruth load_ground_truth(const std::string& path) {
    auto f = open_in(path);
    return load_ground_truth(f);
}

}  // namespace mcsvm
