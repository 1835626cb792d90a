#include "nespin/dynamics.hpp"
#include <cstdio>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace nespin {

namespace {

constexpr double pi = std::numbers::pi;

struct DriveTerms {
    Matrix fx, fy;
};

DriveTerms drive_terms(const SpinSystemParams& p) {
    ProductOperators ops = product_operators(p);
    const double dg = p.delta_gamma();
    return {ops.sx + dg * ops.ix, ops.sy + dg * ops.iy};
}

// Carrier wave without the envelope gate.
Matrix drive_wave(const DriveTerms& ft, const DriveSpec& d, double t) {
    const double arg = d.omega * t + d.phase;
    switch (d.polarization) {
        case DrivePolarization::linear:
            return (d.omega1 * std::cos(arg)) * ft.fx;
        case DrivePolarization::right_handed:
            return d.omega1 * (std::cos(arg) * ft.fx + std::sin(arg) * ft.fy);
        case DrivePolarization::left_handed:
            return d.omega1 * (std::cos(arg) * ft.fx - std::sin(arg) * ft.fy);
    }
    throw DomainError("DriveSpec: unknown polarization");
}

Matrix drive_value(const DriveTerms& ft, const DriveSpec& d, double t) {
    if (!d.active(t)) return Matrix::Zero(ft.fx.rows(), ft.fx.cols());
    return drive_wave(ft, d, t);
}

Matrix commutator_flow(const Matrix& rho, const Matrix& h) {
    return complexd(0.0, 1.0) * (rho * h - h * rho);
}

// exp(-i angle sigma/2) rotations used by the idealized pulse algebra.
Matrix rot_x(double angle) {
    Matrix r(2, 2);
    const double c = std::cos(0.5 * angle), s = std::sin(0.5 * angle);
    r << c, complexd(0.0, -s), complexd(0.0, -s), c;
    return r;
}

Matrix rot_y(double angle) {
    Matrix r(2, 2);
    const double c = std::cos(0.5 * angle), s = std::sin(0.5 * angle);
    r << c, -s, s, c;
    return r;
}

Matrix half_mix(const Matrix& pauli, double sign) {
    return 0.5 * (identity(2) + sign * pauli);
}

// Population-preserving channel scaling the off-diagonal by `factor`.
KrausChannel coherence_scaling(double factor) {
    const double lambda = 0.5 * (1.0 - factor);
    return KrausChannel{{std::sqrt(1.0 - lambda) * identity(2), std::sqrt(lambda) * sigma_z()}};
}

double expect(const Matrix& op, const Matrix& rho) { return (op * rho).trace().real(); }

} // namespace

void DriveSpec::validate() const {
    if (!(omega1 > 0.0)) throw DomainError("DriveSpec: omega1 must be positive");
    if (!(omega >= 0.0)) throw DomainError("DriveSpec: carrier frequency must be non-negative");
    if (!(duration > 0.0)) throw DomainError("DriveSpec: duration must be positive");
}

void IntegratorConfig::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
        throw DomainError("IntegratorConfig: tolerances must be positive");
    if (!(min_step > 0.0) || !(min_step <= max_step))
        throw DomainError("IntegratorConfig: need 0 < min_step <= max_step");
}

Matrix drive_hamiltonian(const SpinSystemParams& p, const DriveSpec& d, double t) {
    d.validate();
    return drive_value(drive_terms(p), d, t);
}

Matrix integrate_rkf45(const std::function<Matrix(double, const Matrix&)>& rhs,
                       Matrix y0, double t0, double t1, const IntegratorConfig& cfg,
                       bool hermitize) {
    cfg.validate();
    if (!rhs) throw DomainError("integrate_rkf45: missing right-hand side");
    if (!std::isfinite(t0) || !std::isfinite(t1) || t1 < t0)
        throw DomainError("integrate_rkf45: need finite t0 <= t1");

    Matrix y = std::move(y0);
    double t = t0;
    double h = std::min(cfg.max_step, t1 - t0);
    while (t < t1) {
        if (h > t1 - t) h = t1 - t;

        const Matrix k1 = rhs(t, y);
        const Matrix k2 = rhs(t + 0.25 * h, y + (0.25 * h) * k1);
        const Matrix k3 = rhs(t + 0.375 * h, y + h * ((3.0 / 32.0) * k1 + (9.0 / 32.0) * k2));
        const Matrix k4 = rhs(t + (12.0 / 13.0) * h,
                              y + h * ((1932.0 / 2197.0) * k1 - (7200.0 / 2197.0) * k2 +
                                       (7296.0 / 2197.0) * k3));
        const Matrix k5 = rhs(t + h, y + h * ((439.0 / 216.0) * k1 - 8.0 * k2 +
                                              (3680.0 / 513.0) * k3 - (845.0 / 4104.0) * k4));
        const Matrix k6 = rhs(t + 0.5 * h,
                              y + h * (-(8.0 / 27.0) * k1 + 2.0 * k2 - (3544.0 / 2565.0) * k3 +
                                       (1859.0 / 4104.0) * k4 - (11.0 / 40.0) * k5));

        const Matrix y5 = y + h * ((16.0 / 135.0) * k1 + (6656.0 / 12825.0) * k3 +
                                   (28561.0 / 56430.0) * k4 - (9.0 / 50.0) * k5 +
                                   (2.0 / 55.0) * k6);
        const Matrix y4 = y + h * ((25.0 / 216.0) * k1 + (1408.0 / 2565.0) * k3 +
                                   (2197.0 / 4104.0) * k4 - 0.2 * k5);

        const double norm = ((y5 - y4).array().abs() /
                             (cfg.abs_tol + cfg.rel_tol * y5.array().abs()))
                                .maxCoeff();
        if (std::isfinite(norm) && norm <= 1.0) {
            t += h;
            y = y5;
            if (hermitize) y = 0.5 * (y + dagger(y));
        }
        // A non-finite norm (overflowing flow) is a hard rejection; growing h
        // there would spin forever without advancing t.
        const double factor =
            !std::isfinite(norm) ? 0.2
            : norm > 0.0         ? std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 5.0)
                                 : 5.0;
        h = std::min(factor * h, cfg.max_step);
        if (t < t1 && h < cfg.min_step) {
            char msg[160];
            std::snprintf(msg, sizeof msg,
                          "integrate_rkf45: step underflow at t=%.9g (h=%.3g, error norm=%.3g)",
                          t, h, norm);
            throw IntegrationError(msg);
        }
    }
    return y;
}

namespace {

// Shared by evolve and evolve_observed. Trace drift beyond 10 rel_tol means
// the step control failed; anything smaller is renormalized away. Long runs
// also leak slightly negative eigenvalues in proportion to the accumulated
// step tolerance; these are clamped so the density-operator invariants hold
// exactly on return.
Matrix propagate_density(const Matrix& h0, const DriveTerms& ft, const DriveSpec& d,
                         Matrix rho, double t0, double t1, const IntegratorConfig& cfg) {
    // Split at the envelope edges so every stage of a step samples the same
    // branch of the drive; a step ending exactly on an edge otherwise sees an
    // O(h) stage inconsistency the error control cannot resolve.
    std::vector<double> cuts{t0, t1};
    for (double edge : {d.start, d.start + d.duration})
        if (edge > t0 && edge < t1) cuts.push_back(edge);
    std::sort(cuts.begin(), cuts.end());

    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double a = cuts[k];
        const double b = cuts[k + 1];
        if (!(b > a)) continue;
        const bool on = d.active(0.5 * (a + b));
        auto rhs = [&](double t, const Matrix& y) {
            return commutator_flow(y, on ? Matrix(h0 + drive_wave(ft, d, t)) : h0);
        };
        rho = integrate_rkf45(rhs, std::move(rho), a, b, cfg, true);
    }
    if (std::abs(rho.trace().real() - 1.0) > std::max(10.0 * cfg.rel_tol, 1e-12))
        throw IntegrationError("evolve: trace drift exceeds tolerance");

    // Hermitian flows accumulate eigenvalue drift proportional to the step
    // tolerance times the step count; only a gross violation marks divergence.
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
    if (es.eigenvalues().minCoeff() < -1e-3) {
        char msg[128];
        std::snprintf(msg, sizeof msg,
                      "evolve: state positivity lost beyond repair (min eigenvalue %.3g)",
                      es.eigenvalues().minCoeff());
        throw IntegrationError(msg);
    }
    const Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
    rho = es.eigenvectors() * lam.asDiagonal().toDenseMatrix().cast<complexd>() *
          es.eigenvectors().adjoint();
    return rho / rho.trace().real();
}

} // namespace

DensityOperator evolve(const SpinSystemParams& p, FieldPoint f, const DriveSpec& d,
                       const DensityOperator& rho0, double t0, double t1,
                       const IntegratorConfig& cfg) {
    d.validate();
    cfg.validate();
    const Matrix h0 = hamiltonian_matrix(p, f);
    if (rho0.dim() != h0.rows())
        throw DimensionError("evolve: state dimension does not match the spin system");
    const DriveTerms ft = drive_terms(p);
    return DensityOperator(propagate_density(h0, ft, d, rho0.matrix(), t0, t1, cfg));
}

TimeSeries evolve_observed(const SpinSystemParams& p, FieldPoint f, const DriveSpec& d,
                           const DensityOperator& rho0, const Matrix& observable,
                           double t0, const std::vector<double>& times,
                           const IntegratorConfig& cfg) {
    d.validate();
    cfg.validate();
    if (times.empty()) throw DomainError("evolve_observed: empty sample grid");
    const Matrix h0 = hamiltonian_matrix(p, f);
    if (rho0.dim() != h0.rows())
        throw DimensionError("evolve_observed: state dimension does not match the spin system");
    if (observable.rows() != h0.rows() || observable.cols() != h0.cols())
        throw DimensionError("evolve_observed: observable dimension mismatch");

    const DriveTerms ft = drive_terms(p);
    TimeSeries out;
    out.times = times;
    out.values.reserve(times.size());
    Matrix rho = rho0.matrix();
    double t = t0;
    for (double tk : times) {
        if (tk < t) throw DomainError("evolve_observed: times must ascend from t0");
        rho = propagate_density(h0, ft, d, std::move(rho), t, tk, cfg);
        t = tk;
        out.values.push_back(expect(observable, rho));
    }
    out.validate();
    return out;
}

std::vector<RwaErrorPoint> rwa_error(double omega0, const std::vector<double>& ratios,
                                     const IntegratorConfig& cfg) {
    if (!(omega0 > 0.0)) throw DomainError("rwa_error: omega0 must be positive");
    cfg.validate();
    const Matrix sz = sigma_z(), sx = sigma_x();
    const Matrix excited = half_mix(sz, 1.0);
    const Matrix ground = half_mix(sz, -1.0);

    std::vector<RwaErrorPoint> out;
    out.reserve(ratios.size());
    for (double ratio : ratios) {
        if (ratio < 0.0) throw DomainError("rwa_error: ratio must be non-negative");
        if (ratio == 0.0) {
            out.push_back({0.0, 0.0});
            continue;
        }
        const double omega1 = 8.0 * omega0 * ratio;
        const double tau = 4.0 * pi / omega1;
        auto rhs = [&](double t, const Matrix& y) {
            const Matrix h = (0.5 * omega0) * sz + (0.25 * omega1 * std::cos(omega0 * t)) * sx;
            return commutator_flow(y, h);
        };
        Matrix rho = integrate_rkf45(rhs, excited, 0.0, tau, cfg, true);
        out.push_back({ratio, trace_distance_matrix(rho, ground)});
    }
    return out;
}

std::vector<ControlPoint> control_accuracy(const SpinSystemParams& p,
                                           const std::vector<double>& b0_list,
                                           TransitionLabel target, double rabi,
                                           bool start_lower,
                                           const IntegratorConfig& cfg) {
    if (!(rabi > 0.0)) throw DomainError("control_accuracy: rabi must be positive");
    cfg.validate();
    if (!transition_valid(p, target))
        throw DomainError("control_accuracy: transition does not exist for this system");

    const DriveTerms ft = drive_terms(p);
    const double tau = pi / (2.0 * rabi);
    std::vector<ControlPoint> out;
    out.reserve(b0_list.size());
    for (double b : b0_list) {
        const FieldPoint f(b);
        const double omega = transition_frequency(p, f, target);
        const TransitionElements el = transition_elements(p, f, target);
        const double coupling = std::abs(el.eta + p.delta_gamma() * el.xi);
        if (omega < 1e-12 || coupling < 1e-9) {
            out.push_back({b, 0.0, true});
            continue;
        }

        DriveSpec d;
        d.omega1 = rabi / coupling;
        d.omega = omega;
        d.polarization = parity_sign(p, f, target) > 0 ? DrivePolarization::right_handed
                                                       : DrivePolarization::left_handed;
        d.start = 0.0;
        d.duration = tau;

        const EigenSystem es = eigen_analytic(p, f);
        const Vector& vm = es.vector(target.two_m, upper_branch(target.kind));
        const Vector& vl = es.vector(target.two_m - 2, lower_branch(target.kind));
        const Matrix rho0 = projector(start_lower ? vl : vm);
        const Matrix goal = projector(start_lower ? vm : vl);

        const Matrix h0 = hamiltonian_matrix(p, f);
        const Matrix rho = propagate_density(h0, ft, d, rho0, 0.0, tau, cfg);
        out.push_back({b, trace_distance_matrix(rho, goal), false});
    }
    return out;
}

WaitChannel unitary_wait() {
    return [](double, double) { return KrausChannel{{identity(2)}}; };
}

WaitChannel dephasing_wait(double t2, double ts, double n) {
    if (!(t2 > 0.0)) throw DomainError("dephasing_wait: t2 must be positive");
    if (!(ts > 0.0)) throw DomainError("dephasing_wait: ts must be positive");
    if (!(n > 0.0)) throw DomainError("dephasing_wait: stretch exponent must be positive");
    return [t2, ts, n](double t_start, double tau) {
        double drop = tau / t2;
        if (std::isfinite(ts))
            drop += std::pow((t_start + tau) / ts, n) - std::pow(t_start / ts, n);
        return coherence_scaling(std::exp(-drop));
    };
}

WaitChannel damping_wait(double t1) {
    if (!(t1 > 0.0)) throw DomainError("damping_wait: t1 must be positive");
    return [t1](double, double tau) { return amplitude_damping_channel(tau, t1); };
}

namespace {

void apply_inplace(DensityOperator& rho, const KrausChannel& ch) { rho = ch.apply(rho); }

void conjugate_inplace(DensityOperator& rho, const Matrix& u) {
    rho = DensityOperator(u * rho.matrix() * dagger(u));
}

// ln y = c0 - c1 t - c2 t^2 solved as a linear least-squares problem; the
// stretched term is declared negligible when it moves ln y by < 1e-3 anywhere
// on the schedule.
FitResult fit_echo_envelope(const std::vector<double>& t, const std::vector<double>& y) {
    FitResult fit;
    const auto n = static_cast<Eigen::Index>(t.size());
    if (n < 4) {
        fit.model = "none";
        fit.fit_failed = true;
        return fit;
    }
    for (double v : y)
        if (!(v > 0.0)) {
            fit.model = "none";
            fit.fit_failed = true;
            return fit;
        }

    Eigen::MatrixXd design(n, 3);
    Eigen::VectorXd logy(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        design(i, 0) = 1.0;
        design(i, 1) = -t[static_cast<std::size_t>(i)];
        design(i, 2) = -t[static_cast<std::size_t>(i)] * t[static_cast<std::size_t>(i)];
        logy(i) = std::log(y[static_cast<std::size_t>(i)]);
    }
    Eigen::Vector3d c = design.colPivHouseholderQr().solve(logy);

    const double tmax = t.back();
    const bool stretched = c(2) > 0.0 && c(2) * tmax * tmax >= 1e-3;
    if (!stretched) {
        Eigen::Vector2d c2 = design.leftCols(2).colPivHouseholderQr().solve(logy);
        c << c2(0), c2(1), 0.0;
    }

    const double amplitude = std::exp(c(0));
    fit.model = stretched ? "exp_stretched" : "exponential";
    fit.params = {amplitude, c(1) > 0.0 ? 1.0 / c(1) : no_decay};
    if (stretched) fit.params.push_back(1.0 / std::sqrt(c(2)));

    double sse = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double ti = t[static_cast<std::size_t>(i)];
        const double model = amplitude * std::exp(-c(1) * ti - c(2) * ti * ti);
        sse += (model - y[static_cast<std::size_t>(i)]) * (model - y[static_cast<std::size_t>(i)]);
    }
    fit.rms = std::sqrt(sse / static_cast<double>(n));
    for (double v : fit.params)
        if (std::isnan(v)) fit.fit_failed = true;
    return fit;
}

// c + a e^{-t/T}: (c, a) solved linearly per trial T, T by golden-section
// search on log T. Clean recovery data is unimodal in T.
FitResult fit_recovery(const std::vector<double>& t, const std::vector<double>& y) {
    FitResult fit;
    const auto n = static_cast<Eigen::Index>(t.size());
    if (n < 4) {
        fit.model = "none";
        fit.fit_failed = true;
        return fit;
    }

    auto solve_at = [&](double bigT, double* c_out = nullptr, double* a_out = nullptr) {
        double s1 = 0, se = 0, see = 0, sy = 0, sye = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double e = std::exp(-t[static_cast<std::size_t>(i)] / bigT);
            const double yi = y[static_cast<std::size_t>(i)];
            s1 += 1.0;
            se += e;
            see += e * e;
            sy += yi;
            sye += yi * e;
        }
        const double det = s1 * see - se * se;
        if (std::abs(det) < 1e-300) return std::numeric_limits<double>::infinity();
        const double c = (sy * see - sye * se) / det;
        const double a = (s1 * sye - se * sy) / det;
        if (c_out) *c_out = c;
        if (a_out) *a_out = a;
        double sse = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double r = c + a * std::exp(-t[static_cast<std::size_t>(i)] / bigT) -
                             y[static_cast<std::size_t>(i)];
            sse += r * r;
        }
        return sse;
    };

    const double tmax = t.back();
    double lo = std::log(1e-4 * tmax), hi = std::log(1e3 * tmax);
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = solve_at(std::exp(x1)), f2 = solve_at(std::exp(x2));
    for (int it = 0; it < 200; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = solve_at(std::exp(x1));
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = solve_at(std::exp(x2));
        }
    }
    const double bigT = std::exp(0.5 * (lo + hi));
    double c = 0.0, a = 0.0;
    const double sse = solve_at(bigT, &c, &a);

    fit.model = "exp_recovery";
    fit.params = {c, a, bigT};
    fit.rms = std::sqrt(sse / static_cast<double>(n));
    // A solution pinned to the search bracket did not converge.
    if (bigT < 2e-4 * tmax || bigT > 0.5e3 * tmax || !std::isfinite(sse)) fit.fit_failed = true;
    return fit;
}

// Largest discrete-cosine/sine magnitude over the positive-frequency bins of
// a uniformly sampled record.
FitResult fit_frequency_peak(const std::vector<double>& t, const std::vector<double>& y) {
    FitResult fit;
    const std::size_t n = t.size();
    if (n < 4) {
        fit.model = "none";
        fit.fit_failed = true;
        return fit;
    }
    const double step = t[1] - t[0];
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs(t[i] - t[i - 1] - step) > 1e-9 * step) {
            fit.model = "none";
            fit.fit_failed = true;
            return fit;
        }

    const double bin = 2.0 * pi / (static_cast<double>(n) * step);
    std::size_t best = 0;
    double best_mag = -1.0;
    for (std::size_t j = 1; j <= n / 2; ++j) {
        complexd acc = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            acc += y[k] * std::exp(complexd(0.0, -2.0 * pi * static_cast<double>(j * k) /
                                                     static_cast<double>(n)));
        if (std::abs(acc) > best_mag) {
            best_mag = std::abs(acc);
            best = j;
        }
    }
    fit.model = "frequency_peak";
    fit.params = {static_cast<double>(best) * bin, bin};
    fit.rms = 0.0;
    if (best == n / 2) fit.fit_failed = true;  // peak at Nyquist: rate under-sampled
    return fit;
}

} // namespace

ProtocolResult run_protocol(ProtocolScheme scheme, const WaitChannel& wait,
                            const std::vector<double>& schedule, double nutation_rate) {
    if (!wait) throw DomainError("run_protocol: wait channel required");
    if (schedule.empty()) throw DomainError("run_protocol: empty schedule");
    if (schedule.front() < 0.0) throw DomainError("run_protocol: negative wait");
    for (std::size_t i = 1; i < schedule.size(); ++i)
        if (!(schedule[i] > schedule[i - 1]))
            throw DomainError("run_protocol: schedule must be strictly increasing");
    if (scheme == ProtocolScheme::nutation && !(nutation_rate > 0.0))
        throw DomainError("run_protocol: nutation needs a positive rotation rate");

    const Matrix sx = sigma_x(), sy = sigma_y(), sz = sigma_z();
    const Matrix pulse_x = rot_x(pi);
    const Matrix readout_y = rot_y(0.5 * pi);

    ProtocolResult res;
    res.scheme = scheme;
    res.schedule_us = schedule;
    res.sx.reserve(schedule.size());
    res.sy.reserve(schedule.size());

    for (double tau : schedule) {
        DensityOperator rho(half_mix(sz, 1.0));
        switch (scheme) {
            case ProtocolScheme::hahn_t2:
                rho = DensityOperator(half_mix(sx, 1.0));
                apply_inplace(rho, wait(0.0, tau));
                conjugate_inplace(rho, pulse_x);
                apply_inplace(rho, wait(tau, tau));
                break;
            case ProtocolScheme::t1:
                rho = DensityOperator(half_mix(sz, -1.0));
                apply_inplace(rho, wait(0.0, tau));
                conjugate_inplace(rho, readout_y);
                break;
            case ProtocolScheme::nutation:
                conjugate_inplace(rho, rot_y(nutation_rate * tau));
                apply_inplace(rho, wait(0.0, tau));
                break;
        }
        res.sx.push_back(expect(sx, rho.matrix()));
        res.sy.push_back(expect(sy, rho.matrix()));
    }

    switch (scheme) {
        case ProtocolScheme::hahn_t2: {
            std::vector<double> t2t, amp;
            t2t.reserve(schedule.size());
            amp.reserve(schedule.size());
            for (std::size_t i = 0; i < schedule.size(); ++i) {
                t2t.push_back(2.0 * schedule[i]);
                amp.push_back(std::hypot(res.sx[i], res.sy[i]));
            }
            res.fit = fit_echo_envelope(t2t, amp);
            break;
        }
        case ProtocolScheme::t1:
            res.fit = fit_recovery(schedule, res.sx);
            break;
        case ProtocolScheme::nutation:
            res.fit = fit_frequency_peak(schedule, res.sx);
            break;
    }
    return res;
}

double hahn_echo_check(EchoEnvironment env, double tau, int samples, unsigned seed) {
    if (tau < 0.0) throw DomainError("hahn_echo_check: tau must be non-negative");
    if (samples < 1) throw DomainError("hahn_echo_check: need at least one sample");

    const Matrix sx = sigma_x(), sy = sigma_y(), sz = sigma_z();
    const std::vector<Matrix> inputs = {half_mix(sz, 1.0), half_mix(sz, -1.0),
                                        half_mix(sx, 1.0), half_mix(sy, 1.0)};
    std::mt19937 gen(seed);

    double worst = 0.0;
    switch (env) {
        case EchoEnvironment::static_detuning_ensemble: {
            std::uniform_real_distribution<double> detuning(-50.0, 50.0);
            std::vector<Matrix> members;
            members.reserve(static_cast<std::size_t>(samples));
            for (int k = 0; k < samples; ++k) {
                const double phi = detuning(gen) * tau;
                Matrix u = Matrix::Zero(2, 2);
                u(0, 0) = std::exp(complexd(0.0, -0.5 * phi));
                u(1, 1) = std::exp(complexd(0.0, 0.5 * phi));
                members.push_back(u * sx * u * sx);
            }
            for (const Matrix& rho : inputs) {
                Matrix echoed = Matrix::Zero(2, 2);
                for (const Matrix& w : members)
                    echoed += w * rho * dagger(w);
                echoed /= static_cast<double>(samples);
                worst = std::max(worst, trace_distance_matrix(echoed, rho));
            }
            break;
        }
        case EchoEnvironment::ising_bath_spin: {
            std::normal_distribution<double> gauss(0.0, 1.0);
            Vector chi(2);
            chi << complexd(gauss(gen), gauss(gen)), complexd(gauss(gen), gauss(gen));
            chi.normalize();
            Matrix u = Matrix::Zero(4, 4);
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    const double zz = (a == 0 ? 1.0 : -1.0) * (b == 0 ? 1.0 : -1.0);
                    u(2 * a + b, 2 * a + b) = std::exp(complexd(0.0, -tau * zz));
                }
            const Matrix flip = kron(sx, identity(2));
            const Matrix w = u * flip * u * flip;
            for (const Matrix& rho : inputs) {
                const Matrix full = kron(rho, projector(chi));
                const Matrix reduced =
                    partial_trace_matrix(w * full * dagger(w), SubsystemDims{2, 2}, Keep::A);
                worst = std::max(worst, trace_distance_matrix(reduced, rho));
            }
            break;
        }
        case EchoEnvironment::linear_drift: {
            auto rhs = [&](double t, const Matrix& y) {
                return commutator_flow(y, (0.5 * t) * sz);  // detuning ramp 1 rad/us^2
            };
            for (const Matrix& rho : inputs) {
                Matrix m = integrate_rkf45(rhs, rho, 0.0, tau, {}, true);
                m = sx * m * sx;
                m = integrate_rkf45(rhs, m, tau, 2.0 * tau, {}, true);
                m = sx * m * sx;
                worst = std::max(worst, trace_distance_matrix(m, rho));
            }
            break;
        }
    }
    return worst;
}

Lineshape fid_lineshape(LineshapeKind kind, double omega0, double alpha,
                        const std::vector<double>& tgrid) {
    if (!(alpha > 0.0)) throw DomainError("fid_lineshape: alpha must be positive");
    if (!(omega0 > 0.0)) throw DomainError("fid_lineshape: omega0 must be positive");
    if (tgrid.size() < 2 || tgrid.front() < 0.0)
        throw DomainError("fid_lineshape: time grid must start at t >= 0");

    Lineshape out;
    out.fid.times = tgrid;
    out.fid.values.reserve(tgrid.size());
    for (double t : tgrid) {
        const double envelope = kind == LineshapeKind::homogeneous
                                    ? std::exp(-alpha * t)
                                    : std::exp(-0.5 * alpha * alpha * t * t);
        out.fid.values.push_back(std::cos(omega0 * t) * envelope);
    }
    out.fid.validate();

    const int points = 801;
    for (int j = 0; j < points; ++j) {
        const double w = omega0 + 8.0 * alpha * (2.0 * j / (points - 1.0) - 1.0);
        const double d = w - omega0;
        const double analytic =
            kind == LineshapeKind::homogeneous
                ? (alpha / pi) / (alpha * alpha + d * d)
                : std::exp(-0.5 * d * d / (alpha * alpha)) / (alpha * std::sqrt(2.0 * pi));

        double integral = 0.0;
        for (std::size_t k = 0; k + 1 < tgrid.size(); ++k) {
            const double fa = out.fid.values[k] * std::cos(w * tgrid[k]);
            const double fb = out.fid.values[k + 1] * std::cos(w * tgrid[k + 1]);
            integral += 0.5 * (fa + fb) * (tgrid[k + 1] - tgrid[k]);
        }

        out.spectrum_analytic.times.push_back(w);
        out.spectrum_analytic.values.push_back(analytic);
        out.spectrum_numeric.times.push_back(w);
        out.spectrum_numeric.values.push_back(2.0 * integral / pi);
    }
    out.spectrum_analytic.validate();
    out.spectrum_numeric.validate();
    return out;
}

} // namespace nespin
