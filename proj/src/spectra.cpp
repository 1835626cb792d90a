#include "nespin/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nespin {

namespace {

void check_transition(const SpinSystemParams& p, TransitionLabel t) {
    if (!transition_valid(p, t))
        throw DomainError("transition " + transition_name(t) + " does not exist for I=" +
                          m_label(p.two_i));
}

double level_energy(const SpinSystemParams& p, FieldPoint f, int two_m, Branch branch) {
    const SubspaceParams sp = subspace_params(p, f, two_m);
    const double sign = branch == Branch::plus ? 1.0 : -1.0;
    return 0.5 * p.a_iso * (-sp.eps + sign * sp.r);
}

// dE/dB0 = <gamma_e Sz - gamma_n Iz> = (gamma_e + gamma_n)<Sz> - gamma_n m,
// with <Sz> = [+|-] cos(theta)/2 (Hellmann-Feynman on the closed form).
double level_energy_gradient(const SpinSystemParams& p, FieldPoint f, int two_m,
                             Branch branch) {
    const SubspaceParams sp = subspace_params(p, f, two_m);
    const double cos_theta = std::abs(two_m) == p.two_i + 1 ? 1.0 : sp.w / sp.r;
    const double sz = (branch == Branch::plus ? 0.5 : -0.5) * cos_theta;
    return (p.gamma_e + p.gamma_n) * sz - p.gamma_n * (two_m / 2.0);
}

int kind_rank(TransitionKind kind) {
    switch (kind) {
        case TransitionKind::pp: return 0;
        case TransitionKind::mm: return 1;
        case TransitionKind::pm: return 2;
        case TransitionKind::mp: return 3;
    }
    return 4;
}

bool label_before(TransitionLabel a, TransitionLabel b) {
    if (a.kind != b.kind) return kind_rank(a.kind) < kind_rank(b.kind);
    return a.two_m < b.two_m;
}

} // namespace

const char* kind_name(TransitionKind kind) {
    switch (kind) {
        case TransitionKind::pp: return "pp";
        case TransitionKind::mm: return "mm";
        case TransitionKind::pm: return "pm";
        case TransitionKind::mp: return "mp";
    }
    return "?";
}

Branch upper_branch(TransitionKind kind) {
    return kind == TransitionKind::pp || kind == TransitionKind::pm ? Branch::plus
                                                                    : Branch::minus;
}

Branch lower_branch(TransitionKind kind) {
    return kind == TransitionKind::pp || kind == TransitionKind::mp ? Branch::plus
                                                                    : Branch::minus;
}

std::string transition_name(TransitionLabel t) {
    return std::string(kind_name(t.kind)) + ":m=" + m_label(t.two_m);
}

TransitionLabel parse_transition(const std::string& name) {
    const auto colon = name.find(":m=");
    if (colon == std::string::npos)
        throw DomainError("transition name must look like \"pm:m=-4\", got \"" + name + "\"");
    const std::string kind = name.substr(0, colon);
    const std::string m = name.substr(colon + 3);
    TransitionLabel t;
    if (kind == "pp") t.kind = TransitionKind::pp;
    else if (kind == "mm") t.kind = TransitionKind::mm;
    else if (kind == "pm") t.kind = TransitionKind::pm;
    else if (kind == "mp") t.kind = TransitionKind::mp;
    else throw DomainError("unknown transition kind \"" + kind + "\"");
    try {
        const auto slash = m.find('/');
        if (slash == std::string::npos) t.two_m = 2 * std::stoi(m);
        else if (m.substr(slash) == "/2") t.two_m = std::stoi(m.substr(0, slash));
        else throw DomainError("");
    } catch (const std::exception&) {
        throw DomainError("bad m value \"" + m + "\" in transition name");
    }
    return t;
}

bool transition_valid(const SpinSystemParams& p, TransitionLabel t) {
    return level_exists(p, t.two_m, upper_branch(t.kind)) &&
           level_exists(p, t.two_m - 2, lower_branch(t.kind));
}

std::vector<TransitionLabel> all_transitions(const SpinSystemParams& p) {
    std::vector<TransitionLabel> out;
    for (TransitionKind kind :
         {TransitionKind::pp, TransitionKind::mm, TransitionKind::pm, TransitionKind::mp}) {
        for (int two_m = -(p.two_i + 1); two_m <= p.two_i + 1; two_m += 2) {
            TransitionLabel t{kind, two_m};
            if (transition_valid(p, t)) out.push_back(t);
        }
    }
    return out;
}

double transition_frequency(const SpinSystemParams& p, FieldPoint f, TransitionLabel t) {
    check_transition(p, t);
    return std::abs(level_energy(p, f, t.two_m, upper_branch(t.kind)) -
                    level_energy(p, f, t.two_m - 2, lower_branch(t.kind)));
}

double transition_frequency_gradient(const SpinSystemParams& p, FieldPoint f,
                                     TransitionLabel t) {
    check_transition(p, t);
    const double ei = level_energy(p, f, t.two_m, upper_branch(t.kind));
    const double ej = level_energy(p, f, t.two_m - 2, lower_branch(t.kind));
    const double gi = level_energy_gradient(p, f, t.two_m, upper_branch(t.kind));
    const double gj = level_energy_gradient(p, f, t.two_m - 2, lower_branch(t.kind));
    return (ei >= ej ? 1.0 : -1.0) * (gi - gj);
}

TransitionElements transition_elements(const SpinSystemParams& p, FieldPoint f,
                                       TransitionLabel t) {
    check_transition(p, t);
    const EigenSystem sys = eigen_analytic(p, f);
    const ProductOperators ops = product_operators(p);
    const Vector& vi = sys.vector(t.two_m, upper_branch(t.kind));
    const Vector& vj = sys.vector(t.two_m - 2, lower_branch(t.kind));
    TransitionElements el;
    el.eta = vj.dot(ops.sx * vi).real();
    el.xi = vj.dot(ops.ix * vi).real();
    return el;
}

double transition_rate(const SpinSystemParams& p, FieldPoint f, TransitionLabel t) {
    const TransitionElements el = transition_elements(p, f, t);
    const double amp = el.eta + p.delta_gamma() * el.xi;
    return 4.0 * amp * amp;
}

double rabi_frequency(const SpinSystemParams& p, FieldPoint f, TransitionLabel t,
                      double omega1) {
    if (!(omega1 > 0.0)) throw DomainError("rabi_frequency: omega1 must be positive");
    const TransitionElements el = transition_elements(p, f, t);
    return omega1 * std::abs(el.eta + p.delta_gamma() * el.xi);
}

int parity_sign(const SpinSystemParams& p, FieldPoint f, TransitionLabel t) {
    check_transition(p, t);
    const double ei = level_energy(p, f, t.two_m, upper_branch(t.kind));
    const double ej = level_energy(p, f, t.two_m - 2, lower_branch(t.kind));
    return ei >= ej ? +1 : -1;
}

double frequency_gap(const SpinSystemParams& p, FieldPoint f, TransitionLabel t,
                     Polarization pol) {
    check_transition(p, t);
    const double omega = transition_frequency(p, f, t);
    const int parity = parity_sign(p, f, t);
    double gap = std::numeric_limits<double>::infinity();
    for (const TransitionLabel& other : all_transitions(p)) {
        if (other == t) continue;
        if (pol == Polarization::circular && parity_sign(p, f, other) != parity) continue;
        gap = std::min(gap, std::abs(omega - transition_frequency(p, f, other)));
    }
    return gap;
}

std::vector<FieldPoint> resonance_fields(const SpinSystemParams& p, double omega,
                                         TransitionLabel t, double b0_lo, double b0_hi,
                                         int grid) {
    check_transition(p, t);
    if (!(omega > 0.0)) throw DomainError("resonance_fields: omega must be positive");
    if (!(b0_hi > b0_lo) || b0_lo < 0.0)
        throw DomainError("resonance_fields: need 0 <= b0_lo < b0_hi");
    if (grid < 2) throw DomainError("resonance_fields: grid must have at least 2 points");

    auto detune = [&](double b) {
        return transition_frequency(p, FieldPoint(b), t) - omega;
    };
    const double tol = 1e-9 * omega;
    std::vector<FieldPoint> roots;
    double prev_b = b0_lo;
    double prev_f = detune(prev_b);
    if (std::abs(prev_f) <= tol) roots.emplace_back(prev_b);
    for (int k = 1; k < grid; ++k) {
        const double b = b0_lo + (b0_hi - b0_lo) * k / (grid - 1);
        const double fb = detune(b);
        if (std::abs(fb) <= tol) {
            roots.emplace_back(b);
        } else if (prev_f * fb < 0.0) {
            double lo = prev_b, hi = b, flo = prev_f;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = detune(mid);
                if (std::abs(fm) <= tol || hi - lo < 1e-15 * std::max(1.0, hi)) {
                    lo = hi = mid;
                    break;
                }
                if (flo * fm < 0.0) hi = mid;
                else lo = mid, flo = fm;
            }
            roots.emplace_back(0.5 * (lo + hi));
        }
        prev_b = b;
        prev_f = fb;
    }
    // Collapse duplicates from a root landing exactly on a grid node.
    std::vector<FieldPoint> unique;
    for (const FieldPoint& r : roots) {
        if (unique.empty() || r.b0 - unique.back().b0 > 1e-10 * std::max(1.0, r.b0))
            unique.push_back(r);
    }
    return unique;
}

std::vector<SpectrumLine> cw_spectrum(const SpinSystemParams& p, double omega, double b0_lo,
                                      double b0_hi, int grid) {
    std::vector<SpectrumLine> lines;
    for (const TransitionLabel& t : all_transitions(p)) {
        for (const FieldPoint& f : resonance_fields(p, omega, t, b0_lo, b0_hi, grid)) {
            SpectrumLine line;
            line.field = f;
            line.transition = t;
            line.frequency = transition_frequency(p, f, t);
            line.relative_rate = transition_rate(p, f, t);
            lines.push_back(line);
        }
    }
    std::sort(lines.begin(), lines.end(), [](const SpectrumLine& a, const SpectrumLine& b) {
        if (a.field.b0 != b.field.b0) return a.field.b0 < b.field.b0;
        return label_before(a.transition, b.transition);
    });
    return lines;
}

std::vector<FrequencyStationaryPoint> fsp_exact(const SpinSystemParams& p, TransitionLabel t,
                                                double b0_lo, double b0_hi, int grid) {
    check_transition(p, t);
    if (b0_hi <= 0.0) b0_hi = 100.0 * p.a_iso / p.gamma_e;
    if (!(b0_hi > b0_lo) || b0_lo < 0.0)
        throw DomainError("fsp_exact: need 0 <= b0_lo < b0_hi");
    if (grid < 2) throw DomainError("fsp_exact: grid must have at least 2 points");

    auto slope = [&](double b) {
        return transition_frequency_gradient(p, FieldPoint(b), t);
    };
    std::vector<FrequencyStationaryPoint> out;
    double prev_b = b0_lo;
    double prev_s = slope(prev_b);
    for (int k = 1; k < grid; ++k) {
        const double b = b0_lo + (b0_hi - b0_lo) * k / (grid - 1);
        const double s = slope(b);
        if (prev_s * s < 0.0) {
            double lo = prev_b, hi = b, flo = prev_s;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = slope(mid);
                if (std::abs(fm) <= 1e-12 * p.gamma_e || hi - lo < 1e-15 * std::max(1.0, hi)) {
                    lo = hi = mid;
                    break;
                }
                if (flo * fm < 0.0) hi = mid;
                else lo = mid, flo = fm;
            }
            const double root = 0.5 * (lo + hi);
            // A sign change across a level degeneracy (|E_i - E_j| kink) is not a
            // stationary point: the slope jumps there without passing through zero.
            if (std::abs(slope(root)) <= 1e-9 * p.gamma_e) {
                FrequencyStationaryPoint fsp;
                fsp.field = FieldPoint(root);
                fsp.kind = prev_s > 0.0 ? StationaryKind::maximum : StationaryKind::minimum;
                out.push_back(fsp);
            }
        }
        prev_b = b;
        prev_s = s;
    }
    return out;
}

std::optional<FieldPoint> fsp_limit_closed_form(const SpinSystemParams& p, int two_m,
                                                StationaryKind kind) {
    p.validate();
    const double i = p.spin_i();
    const double m = two_m / 2.0;
    if (m < -i + 1.5 || m > 0.0) return std::nullopt;

    auto o_of = [&](double mm) { return std::sqrt(i * (i + 1.0) + 0.25 - mm * mm); };
    const double om = o_of(m);
    const double om1 = o_of(m - 1.0);
    double b;
    if (kind == StationaryKind::minimum) {
        b = -(p.a_iso / p.gamma_e) * ((m - 1.0) * om + m * om1) / (om + om1);
    } else {
        const double denom = om1 - om;
        if (std::abs(denom) < 1e-12) return std::nullopt;
        b = (p.a_iso / p.gamma_e) * ((m - 1.0) * om - m * om1) / denom;
    }
    if (!(b >= 0.0)) return std::nullopt;
    return FieldPoint(b);
}

} // namespace nespin
