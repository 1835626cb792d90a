#include "nespin/breitrabi.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "nespin/angular.hpp"
#include "nespin/units.hpp"

namespace nespin {

namespace {

// Row of |m_S, m_I> in the product basis.
Eigen::Index basis_index(int two_i, int electron_row, int two_mi) {
    return static_cast<Eigen::Index>(electron_row) * (two_i + 1) + (two_i - two_mi) / 2;
}

bool is_edge(const SpinSystemParams& p, int two_m) {
    return std::abs(two_m) == p.two_i + 1;
}

void check_m(const SpinSystemParams& p, int two_m) {
    if (std::abs(two_m) > p.two_i + 1 || ((two_m - (p.two_i + 1)) % 2) != 0)
        throw DomainError("subspace m out of range for this nuclear spin");
}

// Deterministic order for degenerate energies: m descending, then minus first.
bool tie_less(const AdiabaticLevel& x, const AdiabaticLevel& y) {
    if (x.two_m != y.two_m) return x.two_m > y.two_m;
    return x.branch == Branch::minus && y.branch == Branch::plus;
}

// Sorts levels (and their vectors) ascending in energy and assigns 1-based
// sorted_index.  Energies closer than the degeneracy tolerance count as tied
// so that roundoff at exact crossings cannot reshuffle the output.
void assign_sorted(EigenSystem& sys, double tie_tol) {
    std::vector<std::size_t> order(sys.levels.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        if (sys.levels[x].energy != sys.levels[y].energy)
            return sys.levels[x].energy < sys.levels[y].energy;
        return tie_less(sys.levels[x], sys.levels[y]);
    });
    std::size_t lo = 0;
    while (lo < order.size()) {
        std::size_t hi = lo;
        while (hi + 1 < order.size() &&
               sys.levels[order[hi + 1]].energy - sys.levels[order[hi]].energy <= tie_tol)
            ++hi;
        std::sort(order.begin() + lo, order.begin() + hi + 1, [&](std::size_t x, std::size_t y) {
            return tie_less(sys.levels[x], sys.levels[y]);
        });
        lo = hi + 1;
    }
    EigenSystem sorted;
    sorted.b0 = sys.b0;
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        AdiabaticLevel lvl = sys.levels[order[rank]];
        lvl.sorted_index = static_cast<int>(rank) + 1;
        sorted.levels.push_back(lvl);
        sorted.vectors.push_back(std::move(sys.vectors[order[rank]]));
    }
    sys = std::move(sorted);
}

} // namespace

std::string m_label(int two_m) {
    if (two_m % 2 == 0) return std::to_string(two_m / 2);
    return std::to_string(two_m) + "/2";
}

bool level_exists(const SpinSystemParams& p, int two_m, Branch branch) {
    if (std::abs(two_m) > p.two_i + 1) return false;
    if (((two_m - (p.two_i + 1)) % 2) != 0) return false;
    if (two_m == -(p.two_i + 1) && branch == Branch::plus) return false;
    if (two_m == +(p.two_i + 1) && branch == Branch::minus) return false;
    return true;
}

SubspaceParams subspace_params(const SpinSystemParams& p, FieldPoint f, int two_m) {
    p.validate();
    check_m(p, two_m);
    const double i = p.spin_i();
    const double m = two_m / 2.0;
    const double dg = p.delta_gamma();
    const double w0t = p.gamma_e * f.b0 / p.a_iso;  // omega_0 / A_iso

    SubspaceParams sp;
    sp.w = m + w0t * (1.0 + dg);
    const double o2 = i * (i + 1.0) + 0.25 - m * m;
    sp.o = o2 > 0.0 ? std::sqrt(o2) : 0.0;
    sp.eps = 0.5 * (1.0 + 4.0 * w0t * m * dg);
    if (is_edge(p, two_m)) {
        sp.r = sp.w;  // one-dimensional subspace: signed, no |.|
        sp.theta = 0.0;
    } else {
        sp.r = std::hypot(sp.w, sp.o);
        sp.theta = std::atan2(sp.o, sp.w);
    }
    return sp;
}

Matrix hamiltonian_matrix(const SpinSystemParams& p, FieldPoint f) {
    p.validate();
    const SpinOperators s = spin_operators({1});
    const SpinOperators n = spin_operators({p.two_i});
    const Matrix ie = identity(2);
    const Matrix in = identity(p.two_i + 1);

    Matrix h = f.b0 * (p.gamma_e * kron(s.jz, in) - p.gamma_n * kron(ie, n.jz));
    h += p.a_iso * (kron(s.jx, n.jx) + kron(s.jy, n.jy) + kron(s.jz, n.jz));
    return h;
}

ProductOperators product_operators(const SpinSystemParams& p) {
    const SpinOperators s = spin_operators({1});
    const SpinOperators n = spin_operators({p.two_i});
    const Matrix ie = identity(2);
    const Matrix in = identity(p.two_i + 1);
    ProductOperators ops;
    ops.sx = kron(s.jx, in);
    ops.sy = kron(s.jy, in);
    ops.sz = kron(s.jz, in);
    ops.ix = kron(ie, n.jx);
    ops.iy = kron(ie, n.jy);
    ops.iz = kron(ie, n.jz);
    return ops;
}

const AdiabaticLevel& EigenSystem::level(int two_m, Branch branch) const {
    for (const auto& lvl : levels)
        if (lvl.two_m == two_m && lvl.branch == branch) return lvl;
    throw DomainError("EigenSystem: no level (m=" + m_label(two_m) + ", " +
                      branch_symbol(branch) + ")");
}

const Vector& EigenSystem::vector(int two_m, Branch branch) const {
    for (std::size_t k = 0; k < levels.size(); ++k)
        if (levels[k].two_m == two_m && levels[k].branch == branch) return vectors[k];
    throw DomainError("EigenSystem: no level (m=" + m_label(two_m) + ", " +
                      branch_symbol(branch) + ")");
}

EigenSystem eigen_analytic(const SpinSystemParams& p, FieldPoint f) {
    p.validate();
    const Eigen::Index d = p.dim();
    EigenSystem sys;
    sys.b0 = f.b0;
    sys.levels.reserve(d);
    sys.vectors.reserve(d);

    for (int two_m = -(p.two_i + 1); two_m <= p.two_i + 1; two_m += 2) {
        const SubspaceParams sp = subspace_params(p, f, two_m);
        for (Branch branch : {Branch::minus, Branch::plus}) {
            if (!level_exists(p, two_m, branch)) continue;
            AdiabaticLevel lvl;
            lvl.two_m = two_m;
            lvl.branch = branch;
            lvl.theta = sp.theta;
            lvl.a = std::cos(0.5 * sp.theta);
            lvl.b = std::sin(0.5 * sp.theta);
            const double sign = branch == Branch::plus ? 1.0 : -1.0;
            lvl.energy = 0.5 * p.a_iso * (-sp.eps + sign * sp.r);

            Vector v = Vector::Zero(d);
            // phi+ = a|+1/2, m-1/2> + b|-1/2, m+1/2>
            // phi- = -b|+1/2, m-1/2> + a|-1/2, m+1/2>
            if (std::abs(two_m - 1) <= p.two_i)
                v(basis_index(p.two_i, 0, two_m - 1)) = branch == Branch::plus ? lvl.a : -lvl.b;
            if (std::abs(two_m + 1) <= p.two_i)
                v(basis_index(p.two_i, 1, two_m + 1)) = branch == Branch::plus ? lvl.b : lvl.a;

            sys.levels.push_back(lvl);
            sys.vectors.push_back(std::move(v));
        }
    }

    assign_sorted(sys, 1e-11 * p.a_iso);
    return sys;
}

EigenSystem eigen_numeric(const SpinSystemParams& p, FieldPoint f) {
    const EigenSystem ana = eigen_analytic(p, f);
    const Matrix h = hamiltonian_matrix(p, f);
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    if (es.info() != Eigen::Success)
        throw NumericalError("eigen_numeric: diagonalization failed");

    const Eigen::Index d = h.rows();
    const Eigen::VectorXd evals = es.eigenvalues();
    const Matrix evecs = es.eigenvectors();
    const double cluster_tol = 1e-9 * p.a_iso;

    // Group numerically degenerate eigenvalues; labels inside a cluster are
    // resolved by projecting the analytic vectors onto the cluster span.
    std::vector<std::pair<Eigen::Index, Eigen::Index>> clusters;  // [first, last]
    for (Eigen::Index k = 0; k < d;) {
        Eigen::Index last = k;
        while (last + 1 < d && evals(last + 1) - evals(last) <= cluster_tol) ++last;
        clusters.emplace_back(k, last);
        k = last + 1;
    }

    EigenSystem out;
    out.b0 = f.b0;

    for (const auto& [first, last] : clusters) {
        const Eigen::Index width = last - first + 1;
        // Analytic levels belonging to this cluster, by energy proximity.
        std::vector<std::size_t> members;
        for (std::size_t k = 0; k < ana.levels.size(); ++k) {
            const double e = ana.levels[k].energy;
            if (e >= evals(first) - 10.0 * cluster_tol && e <= evals(last) + 10.0 * cluster_tol)
                members.push_back(k);
        }
        if (static_cast<Eigen::Index>(members.size()) != width)
            throw LabelMatchError("eigen_numeric: analytic and numeric degeneracy mismatch");

        if (width == 1) {
            const Vector& v = evecs.col(first);
            const complexd ov = ana.vectors[members[0]].dot(v);
            if (std::norm(ov) < 0.9)
                throw LabelMatchError("eigen_numeric: eigenvector overlap below 0.9");
            AdiabaticLevel lvl = ana.levels[members[0]];
            lvl.energy = evals(first);
            out.levels.push_back(lvl);
            out.vectors.push_back(v * (std::conj(ov) / std::abs(ov)));  // phase-align
        } else {
            const Matrix block = evecs.middleCols(first, width);
            for (Eigen::Index j = 0; j < width; ++j) {
                const Vector& target = ana.vectors[members[j]];
                Vector u = block * (block.adjoint() * target);
                const double n2 = u.squaredNorm();
                if (n2 < 0.9)
                    throw LabelMatchError("eigen_numeric: subspace overlap below 0.9");
                AdiabaticLevel lvl = ana.levels[members[j]];
                lvl.energy = evals(first + j);
                out.levels.push_back(lvl);
                out.vectors.push_back(u / std::sqrt(n2));
            }
        }
    }

    assign_sorted(out, 1e-11 * p.a_iso);
    return out;
}

std::optional<FieldPoint> cancellation_resonance(const SpinSystemParams& p, int two_m,
                                                 ResonanceKind kind) {
    p.validate();
    check_m(p, two_m);
    const double m = two_m / 2.0;
    const double scale = p.a_iso / (p.gamma_e * (1.0 + p.delta_gamma()));
    if (kind == ResonanceKind::type_i) {
        const double b = -m * scale;
        if (b < 0.0) return std::nullopt;
        return FieldPoint(b);
    }
    if (is_edge(p, two_m))
        throw DomainError("type II resonance requires an interior subspace");
    const SubspaceParams sp = subspace_params(p, FieldPoint(0.0), two_m);
    const double b = (sp.o - m) * scale;
    if (b < 0.0) return std::nullopt;
    return FieldPoint(b);
}

std::optional<FieldPoint> energy_stationary_field(const SpinSystemParams& p, int two_m,
                                                  Branch branch) {
    p.validate();
    check_m(p, two_m);
    if (is_edge(p, two_m))
        throw DomainError("energy_stationary_field: edge levels are never stationary");

    const double m = two_m / 2.0;
    const double dg = p.delta_gamma();
    const double sign = branch == Branch::plus ? 1.0 : -1.0;
    const double target = sign * 2.0 * m * dg / (1.0 + dg);
    if (target >= 1.0) return std::nullopt;

    auto cos_theta = [&](double b) {
        const SubspaceParams sp = subspace_params(p, FieldPoint(b), two_m);
        return sp.w / sp.r;
    };
    // cos(theta_m) grows monotonically from m/(I+1/2) toward 1.
    if (cos_theta(0.0) > target) return std::nullopt;

    double lo = 0.0;
    double hi = p.a_iso / p.gamma_e;
    while (cos_theta(hi) < target) {
        hi *= 2.0;
        if (hi > 1e9) return std::nullopt;
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = cos_theta(mid) - target;
        if (std::abs(fm) <= 1e-12) return FieldPoint(mid);
        (fm < 0.0 ? lo : hi) = mid;
    }
    return FieldPoint(0.5 * (lo + hi));
}

OrderingPhase energy_ordering_phase(const SpinSystemParams& p, FieldPoint f) {
    p.validate();
    auto e_plus = [&](int two_m) {
        const SubspaceParams sp = subspace_params(p, f, two_m);
        return 0.5 * p.a_iso * (-sp.eps + sp.r);
    };
    for (int two_m = -p.two_i + 3; two_m <= p.two_i + 1; two_m += 2) {
        if (!(e_plus(two_m) > e_plus(two_m - 2))) return OrderingPhase::high_phase;
    }
    return OrderingPhase::low_phase;
}

nlohmann::json eigensystem_to_json(const EigenSystem& sys) {
    nlohmann::json levels = nlohmann::json::array();
    nlohmann::json vectors = nlohmann::json::array();
    for (std::size_t k = 0; k < sys.levels.size(); ++k) {
        const AdiabaticLevel& lvl = sys.levels[k];
        levels.push_back({{"m", m_label(lvl.two_m)},
                          {"branch", branch_symbol(lvl.branch)},
                          {"theta", lvl.theta},
                          {"a", lvl.a},
                          {"b", lvl.b},
                          {"energy_MHz", units::rad_us_to_mhz(lvl.energy)},
                          {"index", lvl.sorted_index}});
        nlohmann::json vec = nlohmann::json::array();
        for (Eigen::Index i = 0; i < sys.vectors[k].size(); ++i)
            vec.push_back({sys.vectors[k](i).real(), sys.vectors[k](i).imag()});
        vectors.push_back(std::move(vec));
    }
    return {{"b0_tesla", sys.b0}, {"levels", std::move(levels)}, {"vectors", std::move(vectors)}};
}

namespace {

int parse_m_label(const std::string& s) {
    const auto slash = s.find('/');
    if (slash == std::string::npos) return 2 * std::stoi(s);
    if (s.substr(slash) != "/2") throw DomainError("m label must be an integer or halves");
    return std::stoi(s.substr(0, slash));
}

} // namespace

EigenSystem eigensystem_from_json(const nlohmann::json& j) {
    EigenSystem sys;
    sys.b0 = j.at("b0_tesla").get<double>();
    const auto& levels = j.at("levels");
    const auto& vectors = j.at("vectors");
    if (levels.size() != vectors.size())
        throw DimensionError("EigenSystem JSON: levels and vectors differ in length");
    for (std::size_t k = 0; k < levels.size(); ++k) {
        const auto& lj = levels[k];
        AdiabaticLevel lvl;
        lvl.two_m = parse_m_label(lj.at("m").get<std::string>());
        const std::string br = lj.at("branch").get<std::string>();
        if (br != "+" && br != "-") throw DomainError("EigenSystem JSON: bad branch symbol");
        lvl.branch = br == "+" ? Branch::plus : Branch::minus;
        lvl.theta = lj.at("theta").get<double>();
        lvl.a = lj.at("a").get<double>();
        lvl.b = lj.at("b").get<double>();
        lvl.energy = units::mhz_to_rad_us(lj.at("energy_MHz").get<double>());
        lvl.sorted_index = lj.at("index").get<int>();
        Vector v(static_cast<Eigen::Index>(vectors[k].size()));
        for (std::size_t i = 0; i < vectors[k].size(); ++i)
            v(static_cast<Eigen::Index>(i)) =
                complexd(vectors[k][i][0].get<double>(), vectors[k][i][1].get<double>());
        sys.levels.push_back(lvl);
        sys.vectors.push_back(std::move(v));
    }
    return sys;
}

} // namespace nespin
