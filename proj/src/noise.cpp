#include "nespin/noise.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <unsupported/Eigen/MatrixFunctions>

namespace nespin {

void NoiseSpec::validate() const {
    if (v < 0.0) throw DomainError("NoiseSpec: coupling strength must be non-negative");
    if (chi < 0.0) throw DomainError("NoiseSpec: correlation parameter must be non-negative");
}

double NoiseSpec::weight(double omega) const {
    if (adiabatic()) return omega == 0.0 ? 1.0 : 0.0;
    return std::exp(-chi * omega * omega);
}

DensityOperator KrausChannel::apply(const DensityOperator& rho) const {
    if (kraus.empty()) throw DomainError("KrausChannel: no Kraus operators");
    Matrix out = Matrix::Zero(rho.dim(), rho.dim());
    for (const Matrix& k : kraus) {
        if (k.rows() != rho.dim() || k.cols() != rho.dim())
            throw DimensionError("KrausChannel: operator does not match state dimension");
        out += k * rho.matrix() * dagger(k);
    }
    out = 0.5 * (out + dagger(out));
    return DensityOperator(out);
}

double KrausChannel::completeness_defect() const {
    if (kraus.empty()) throw DomainError("KrausChannel: no Kraus operators");
    Matrix sum = Matrix::Zero(kraus[0].cols(), kraus[0].cols());
    for (const Matrix& k : kraus) sum += dagger(k) * k;
    return (sum - Matrix::Identity(sum.rows(), sum.cols())).cwiseAbs().maxCoeff();
}

KrausChannel dephasing_channel(double tau, double t2) {
    if (tau < 0.0) throw DomainError("dephasing_channel: tau must be non-negative");
    if (t2 <= 0.0) throw DomainError("dephasing_channel: t2 must be positive");
    const double lambda = 0.5 * (1.0 - std::exp(-tau / t2));
    return KrausChannel{{std::sqrt(1.0 - lambda) * identity(2), std::sqrt(lambda) * sigma_z()}};
}

KrausChannel depolarising_channel(double tau, double gamma) {
    if (tau < 0.0) throw DomainError("depolarising_channel: tau must be non-negative");
    if (gamma < 0.0) throw DomainError("depolarising_channel: rate must be non-negative");
    const double lambda = 0.75 * (1.0 - std::exp(-4.0 * gamma * tau));
    const double w = std::sqrt(lambda / 3.0);
    return KrausChannel{{std::sqrt(1.0 - lambda) * identity(2), w * sigma_x(), w * sigma_y(),
                         w * sigma_z()}};
}

KrausChannel amplitude_damping_channel(double tau, double t1) {
    if (tau < 0.0) throw DomainError("amplitude_damping_channel: tau must be non-negative");
    if (t1 <= 0.0) throw DomainError("amplitude_damping_channel: t1 must be positive");
    const double decay = std::exp(-tau / t1);
    Matrix k0 = Matrix::Zero(2, 2), k1 = Matrix::Zero(2, 2);
    k0(0, 0) = 1.0;
    k0(1, 1) = std::sqrt(decay);
    k1(0, 1) = std::sqrt(1.0 - decay);
    return KrausChannel{{k0, k1}};
}

KrausChannel random_unitary_channel(const std::vector<double>& probabilities,
                                    const std::vector<Matrix>& unitaries) {
    if (probabilities.size() != unitaries.size() || probabilities.empty())
        throw DomainError("random_unitary_channel: need matching probabilities and unitaries");
    double total = 0.0;
    for (double pr : probabilities) {
        if (pr < 0.0) throw DomainError("random_unitary_channel: negative probability");
        total += pr;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw DomainError("random_unitary_channel: probabilities must sum to one");
    KrausChannel ch;
    for (std::size_t k = 0; k < unitaries.size(); ++k) {
        const Matrix& u = unitaries[k];
        if (u.rows() != u.cols() || u.rows() != unitaries[0].rows())
            throw DimensionError("random_unitary_channel: inconsistent dimensions");
        if ((dagger(u) * u - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() > 1e-10)
            throw DomainError("random_unitary_channel: operator is not unitary");
        ch.kraus.push_back(std::sqrt(probabilities[k]) * u);
    }
    return ch;
}

namespace {

Vector vec(const Matrix& m) {
    return Eigen::Map<const Vector>(m.data(), m.size());
}

Matrix unvec(const Vector& v, Eigen::Index d) {
    return Eigen::Map<const Matrix>(v.data(), d, d);
}

// vec(L rho L^dag) - vec({L^dag L, rho})/2 in column-stacking convention.
Matrix dissipator_superop(const Matrix& l) {
    const Eigen::Index d = l.rows();
    const Matrix ldl = dagger(l) * l;
    const Matrix id = Matrix::Identity(d, d);
    return kron(l.conjugate(), l) - 0.5 * kron(id, ldl) - 0.5 * kron(ldl.transpose(), id);
}

struct FrequencyComponent {
    double omega = 0.0;
    Matrix op;
};

// Split a coupling operator into Bohr-frequency components over the given
// (diagonal) energies. Frequencies within bin_tol fall into one component;
// a component straddling zero is snapped to omega = 0 exactly so the
// Gaussian weight is one there regardless of chi.
std::vector<FrequencyComponent> frequency_components(const Eigen::VectorXd& energies,
                                                     const Matrix& coupling, double bin_tol) {
    struct Element {
        double omega;
        Eigen::Index i, j;
    };
    const Eigen::Index d = energies.size();
    std::vector<Element> elems;
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            if (std::abs(coupling(i, j)) > 1e-14)
                elems.push_back({energies(j) - energies(i), i, j});
    std::sort(elems.begin(), elems.end(),
              [](const Element& a, const Element& b) { return a.omega < b.omega; });

    std::vector<FrequencyComponent> out;
    std::size_t k = 0;
    while (k < elems.size()) {
        std::size_t end = k + 1;
        while (end < elems.size() && elems[end].omega - elems[k].omega <= bin_tol) ++end;
        FrequencyComponent comp;
        comp.omega = elems[k].omega;
        if (std::abs(comp.omega) <= bin_tol) comp.omega = 0.0;
        comp.op = Matrix::Zero(d, d);
        for (std::size_t e = k; e < end; ++e)
            comp.op(elems[e].i, elems[e].j) = coupling(elems[e].i, elems[e].j);
        out.push_back(std::move(comp));
        k = end;
    }
    return out;
}

LindbladGenerator assemble_generator(const Eigen::VectorXd& energies, const Matrix& coupling,
                                     const NoiseSpec& spec, double bin_tol,
                                     bool interaction_picture) {
    spec.validate();
    const Eigen::Index d = energies.size();
    LindbladGenerator g;
    g.dim = d;
    g.spec = spec;
    g.hamiltonian_part = energies.cast<complexd>().asDiagonal();
    g.superop = Matrix::Zero(d * d, d * d);
    const double v2 = spec.v * spec.v;
    for (const FrequencyComponent& comp : frequency_components(energies, coupling, bin_tol)) {
        const double w = spec.weight(comp.omega);
        if (w == 0.0) continue;
        g.superop += v2 * w * dissipator_superop(comp.op);
    }
    if (!interaction_picture) {
        const Matrix id = Matrix::Identity(d, d);
        const complexd iu(0.0, 1.0);
        g.superop += -iu * (kron(id, g.hamiltonian_part) -
                            kron(g.hamiltonian_part.transpose(), id));
    }
    return g;
}

Eigen::VectorXd level_energies(const EigenSystem& sys) {
    Eigen::VectorXd e(sys.dim());
    for (Eigen::Index k = 0; k < sys.dim(); ++k) e(k) = sys.levels[k].energy;
    return e;
}

Matrix eigenvector_matrix(const EigenSystem& sys) {
    Matrix v(sys.dim(), sys.dim());
    for (Eigen::Index k = 0; k < sys.dim(); ++k) v.col(k) = sys.vectors[k];
    return v;
}

} // namespace

double LindbladGenerator::coherence_decay_rate(Eigen::Index a, Eigen::Index b) const {
    if (a < 0 || b < 0 || a >= dim || b >= dim)
        throw DomainError("coherence_decay_rate: level index out of range");
    Matrix e = Matrix::Zero(dim, dim);
    e(a, b) = 1.0;
    const Vector ve = vec(e);
    return -(ve.adjoint() * superop * ve)(0).real();
}

LindbladGenerator lindblad_z(const SpinSystemParams& p, FieldPoint f, const NoiseSpec& spec,
                             bool interaction_picture) {
    if (spec.axis != NoiseAxis::z) throw ModeError("lindblad_z: spec axis must be z");
    const EigenSystem sys = eigen_analytic(p, f);
    const Matrix v = eigenvector_matrix(sys);
    const Matrix sz_eigen = dagger(v) * product_operators(p).sz * v;
    return assemble_generator(level_energies(sys), sz_eigen, spec, 1e-9 * p.a_iso,
                              interaction_picture);
}

LindbladGenerator lindblad_x(const SpinSystemParams& p, FieldPoint f, const NoiseSpec& spec,
                             bool interaction_picture) {
    if (spec.axis != NoiseAxis::x) throw ModeError("lindblad_x: spec axis must be x");
    if (spec.adiabatic())
        throw ModeError("lindblad_x: no zero-frequency component exists for the x coupling");
    const EigenSystem sys = eigen_analytic(p, f);
    const Matrix v = eigenvector_matrix(sys);
    const Matrix sx_eigen = dagger(v) * product_operators(p).sx * v;
    return assemble_generator(level_energies(sys), sx_eigen, spec, 1e-9 * p.a_iso,
                              interaction_picture);
}

LindbladGenerator lindblad_z_truncated(const SpinSystemParams& p, FieldPoint f, int two_m,
                                       const NoiseSpec& spec, bool interaction_picture) {
    if (spec.axis != NoiseAxis::z) throw ModeError("lindblad_z_truncated: spec axis must be z");
    if (!transition_valid(p, TransitionLabel{TransitionKind::pm, two_m}) &&
        !transition_valid(p, TransitionLabel{TransitionKind::pp, two_m}) &&
        !transition_valid(p, TransitionLabel{TransitionKind::mm, two_m}))
        throw DomainError("lindblad_z_truncated: no levels connect subspaces m and m-1");
    const EigenSystem sys = eigen_analytic(p, f);
    const Matrix v = eigenvector_matrix(sys);
    const Matrix sz_eigen = dagger(v) * product_operators(p).sz * v;
    const Eigen::VectorXd energies = level_energies(sys);

    // Basis order {phi+_m, phi-_m, phi+_{m-1}, phi-_{m-1}}; a missing edge
    // branch keeps a decoupled slot (index -1) with zero coupling.
    const int pair_m[2] = {two_m, two_m - 2};
    Eigen::Index pick[4];
    int slot = 0;
    for (int mi : pair_m)
        for (Branch br : {Branch::plus, Branch::minus}) {
            Eigen::Index idx = -1;
            if (level_exists(p, mi, br))
                for (Eigen::Index k = 0; k < sys.dim(); ++k)
                    if (sys.levels[k].two_m == mi && sys.levels[k].branch == br) idx = k;
            pick[slot++] = idx;
        }

    Eigen::VectorXd e4 = Eigen::VectorXd::Zero(4);
    Matrix s4 = Matrix::Zero(4, 4);
    for (int r = 0; r < 4; ++r) {
        if (pick[r] < 0) continue;
        e4(r) = energies(pick[r]);
        for (int c = 0; c < 4; ++c)
            if (pick[c] >= 0) s4(r, c) = sz_eigen(pick[r], pick[c]);
    }
    return assemble_generator(e4, s4, spec, 1e-9 * p.a_iso, interaction_picture);
}

DensityOperator evolve_lindblad(const LindbladGenerator& g, const DensityOperator& rho0,
                                double t) {
    if (t < 0.0) throw DomainError("evolve_lindblad: time must be non-negative");
    if (rho0.dim() != g.dim)
        throw DimensionError("evolve_lindblad: state does not match generator dimension");
    const Matrix step = (t * g.superop).exp();
    Matrix rho = unvec(step * vec(rho0.matrix()), g.dim);
    rho = 0.5 * (rho + dagger(rho));
    if (std::abs(rho.trace().real() - 1.0) > 1e-8)
        throw GeneratorError("evolve_lindblad: trace drifted beyond tolerance");
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
    if (es.eigenvalues().minCoeff() < -1e-6)
        throw GeneratorError("evolve_lindblad: output state lost positivity");
    Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
    lam /= lam.sum();
    rho = es.eigenvectors() * lam.cast<complexd>().asDiagonal() * dagger(es.eigenvectors());
    return DensityOperator(rho);
}

TimeSeries evolve_lindblad_series(const LindbladGenerator& g, const DensityOperator& rho0,
                                  const Matrix& observable, const std::vector<double>& times) {
    if (observable.rows() != g.dim || observable.cols() != g.dim)
        throw DimensionError("evolve_lindblad_series: observable dimension mismatch");
    if (rho0.dim() != g.dim)
        throw DimensionError("evolve_lindblad_series: state dimension mismatch");
    TimeSeries out;
    out.times = times;
    out.values.reserve(times.size());
    std::map<double, Matrix> step_cache;
    double t_now = 0.0;
    Vector state = vec(rho0.matrix());
    for (double t : times) {
        const double dt = t - t_now;
        if (dt < 0.0) throw DomainError("evolve_lindblad_series: times must be non-decreasing");
        if (dt > 0.0) {
            auto it = step_cache.find(dt);
            if (it == step_cache.end())
                it = step_cache.emplace(dt, (dt * g.superop).exp()).first;
            state = it->second * state;
            t_now = t;
        }
        const Matrix rho = unvec(state, g.dim);
        out.values.push_back((observable * rho).trace().real());
    }
    out.validate();
    return out;
}

PredictedRates predicted_rates(const SpinSystemParams& p, FieldPoint f, TransitionLabel t,
                               const NoiseSpec& spec) {
    if (spec.axis != NoiseAxis::z)
        throw ModeError("predicted_rates: closed forms exist for the z axis only");
    spec.validate();
    if (!transition_valid(p, t)) throw DomainError("predicted_rates: invalid transition");
    const SubspaceParams up = subspace_params(p, f, t.two_m);
    const SubspaceParams lo = subspace_params(p, f, t.two_m - 2);
    const bool edge_up = std::abs(t.two_m) == p.two_i + 1;
    const bool edge_lo = std::abs(t.two_m - 2) == p.two_i + 1;
    const double cu = edge_up ? 1.0 : std::cos(up.theta);
    const double cl = edge_lo ? 1.0 : std::cos(lo.theta);
    const double su = std::sin(up.theta);
    const double sl = std::sin(lo.theta);
    const bool opposite =
        t.kind == TransitionKind::pm || t.kind == TransitionKind::mp;
    const double bracket = opposite ? cu + cl : cu - cl;

    const double v2 = spec.v * spec.v;
    // Omega_m = E+_m - E-_m = A R_m; the edge subspaces have no flip jump.
    const double gu = edge_up ? 0.0 : spec.weight(p.a_iso * up.r);
    const double gl = edge_lo ? 0.0 : spec.weight(p.a_iso * lo.r);

    PredictedRates r;
    r.t2_rate = v2 / 8.0 * (bracket * bracket + gu * su * su + gl * sl * sl);
    r.t1_rate_upper = v2 / 2.0 * gu * su * su;
    r.t1_rate_lower = v2 / 2.0 * gl * sl * sl;
    r.owp_distance = 0.5 * std::abs(bracket);
    return r;
}

double effective_depolarisation_signal(const PredictedRates& r, double p_upper,
                                       double p_lower, double t) {
    if (t < 0.0) throw DomainError("effective_depolarisation_signal: negative time");
    return 0.5 * p_upper * (1.0 + std::exp(-t * r.t1_rate_upper)) -
           0.5 * p_lower * (1.0 + std::exp(-t * r.t1_rate_lower));
}

std::optional<FieldPoint> owp_find(const SpinSystemParams& p, TransitionLabel t,
                                   double b0_hi) {
    if (!transition_valid(p, t)) throw DomainError("owp_find: invalid transition");
    if (b0_hi <= 0.0) throw DomainError("owp_find: search bound must be positive");
    // The dephasing bracket can only vanish for -I + 3/2 <= m <= 0.
    if (t.two_m < -p.two_i + 3 || t.two_m > 0) return std::nullopt;
    const bool opposite =
        t.kind == TransitionKind::pm || t.kind == TransitionKind::mp;
    auto bracket = [&](double b0) {
        const SubspaceParams up = subspace_params(p, FieldPoint(b0), t.two_m);
        const SubspaceParams lo = subspace_params(p, FieldPoint(b0), t.two_m - 2);
        return opposite ? std::cos(up.theta) + std::cos(lo.theta)
                        : std::cos(up.theta) - std::cos(lo.theta);
    };
    const int grid = 2001;
    double prev_b = 0.0, prev_v = bracket(0.0);
    for (int k = 1; k < grid; ++k) {
        const double b = b0_hi * k / (grid - 1);
        const double val = bracket(b);
        if (val == 0.0) return FieldPoint(b);
        if (prev_v * val < 0.0) {
            double lo_b = prev_b, hi_b = b;
            for (int it = 0; it < 200 && hi_b - lo_b > 1e-13 * std::max(1.0, hi_b); ++it) {
                const double mid = 0.5 * (lo_b + hi_b);
                (bracket(mid) * prev_v > 0.0 ? lo_b : hi_b) = mid;
            }
            return FieldPoint(0.5 * (lo_b + hi_b));
        }
        prev_b = b;
        prev_v = val;
    }
    return std::nullopt;
}

std::vector<Matrix> steady_basis(const LindbladGenerator& g) {
    const double tol = g.spec.v > 0.0 ? 1e-8 * g.spec.v * g.spec.v : 1e-12;
    Eigen::ComplexEigenSolver<Matrix> es(g.superop);
    std::vector<Matrix> herm;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
        if (std::abs(es.eigenvalues()(k)) > tol) continue;
        const Matrix x = unvec(es.eigenvectors().col(k), g.dim);
        herm.push_back(0.5 * (x + dagger(x)));
        herm.push_back(complexd(0.0, -0.5) * (x - dagger(x)));
    }
    // Gram-Schmidt under the Hilbert-Schmidt inner product; Hermitian kernel
    // elements form a real vector space so real coefficients suffice.
    std::vector<Matrix> basis;
    for (Matrix& cand : herm) {
        for (const Matrix& b : basis)
            cand -= (b.cwiseProduct(cand.conjugate()).sum()).real() * b;
        const double nrm = std::sqrt(cand.cwiseProduct(cand.conjugate()).sum().real());
        if (nrm > 1e-8) basis.push_back(cand / nrm);
    }
    if (basis.empty()) throw GeneratorError("steady_basis: generator has no steady state");
    return basis;
}

std::vector<DensityOperator> steady_states(const LindbladGenerator& g) {
    const std::vector<Matrix> basis = steady_basis(g);
    const double d = static_cast<double>(g.dim);
    const Matrix uniform = Matrix::Identity(g.dim, g.dim) / d;
    std::vector<DensityOperator> out;
    out.emplace_back(uniform);
    for (const Matrix& b : basis) {
        Matrix traceless = b - (b.trace() / d) * Matrix::Identity(g.dim, g.dim);
        const double nrm = std::sqrt(traceless.cwiseProduct(traceless.conjugate()).sum().real());
        if (nrm < 1e-10) continue;  // the identity direction is already included
        traceless /= nrm;
        // Admixture 1/(2d) keeps every eigenvalue at least 1/(2d) above zero.
        out.emplace_back(uniform + (0.5 / d) * traceless);
    }
    return out;
}

Matrix to_eigen_basis(const EigenSystem& sys, const Matrix& rho_product) {
    if (rho_product.rows() != sys.dim() || rho_product.cols() != sys.dim())
        throw DimensionError("to_eigen_basis: dimension mismatch");
    const Matrix v = eigenvector_matrix(sys);
    return dagger(v) * rho_product * v;
}

Matrix to_product_basis(const EigenSystem& sys, const Matrix& rho_eigen) {
    if (rho_eigen.rows() != sys.dim() || rho_eigen.cols() != sys.dim())
        throw DimensionError("to_product_basis: dimension mismatch");
    const Matrix v = eigenvector_matrix(sys);
    return v * rho_eigen * dagger(v);
}

void BathSpec::validate() const {
    if (n_spins < 1) throw DomainError("BathSpec: need at least one bath spin");
    if (n_spins > 8) throw SizeError("BathSpec: exact treatment is capped at 8 spins");
    const Eigen::Index d = Eigen::Index(1) << n_spins;
    auto check = [&](const Matrix& m, const char* what) {
        if (m.rows() != d || m.cols() != d)
            throw DimensionError(std::string("BathSpec: ") + what + " dimension mismatch");
    };
    check(bath_hamiltonian, "bath_hamiltonian");
    check(coupling_z, "coupling_z");
    if (coupling_x.size() > 0) check(coupling_x, "coupling_x");
    if (coupling_y.size() > 0) check(coupling_y, "coupling_y");
    if (initial_state.dim() != d)
        throw DimensionError("BathSpec: initial_state dimension mismatch");
}

TimeSeries bath_coherence(const SpinSystemParams& p, FieldPoint f, TransitionLabel t,
                          const BathSpec& bath, const std::vector<double>& tgrid,
                          bool hahn_echo) {
    bath.validate();
    if (!transition_valid(p, t)) throw DomainError("bath_coherence: invalid transition");

    auto sz_expectation = [&](int two_m, Branch br) {
        const SubspaceParams sp = subspace_params(p, f, two_m);
        const double c = std::abs(two_m) == p.two_i + 1 ? 1.0 : std::cos(sp.theta);
        return br == Branch::plus ? 0.5 * c : -0.5 * c;
    };
    const double sa = sz_expectation(t.two_m, upper_branch(t.kind));
    const double sb = sz_expectation(t.two_m - 2, lower_branch(t.kind));

    Eigen::SelfAdjointEigenSolver<Matrix> ea(bath.bath_hamiltonian + sa * bath.coupling_z);
    Eigen::SelfAdjointEigenSolver<Matrix> eb(bath.bath_hamiltonian + sb * bath.coupling_z);
    Eigen::SelfAdjointEigenSolver<Matrix> e0(bath.initial_state.matrix());

    auto propagator = [](const Eigen::SelfAdjointEigenSolver<Matrix>& es, double tau) {
        const Vector phase =
            (complexd(0.0, -tau) * es.eigenvalues().cast<complexd>().array()).exp().matrix();
        return Matrix(es.eigenvectors() * phase.asDiagonal() * dagger(es.eigenvectors()));
    };

    TimeSeries out;
    out.times = tgrid;
    out.values.reserve(tgrid.size());
    for (double tau : tgrid) {
        Matrix overlap;
        if (hahn_echo) {
            const Matrix ua = propagator(ea, 0.5 * tau), ub = propagator(eb, 0.5 * tau);
            overlap = dagger(ub * ua) * (ua * ub);
        } else {
            overlap = dagger(propagator(ea, tau)) * propagator(eb, tau);
        }
        double l = 0.0;
        for (Eigen::Index k = 0; k < e0.eigenvalues().size(); ++k) {
            const double pk = e0.eigenvalues()(k);
            if (pk < 1e-14) continue;
            const Vector chi = e0.eigenvectors().col(k);
            l += pk * std::abs((chi.adjoint() * overlap * chi)(0));
        }
        out.values.push_back(l);
    }
    out.validate();
    return out;
}

} // namespace nespin
