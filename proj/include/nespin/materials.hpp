// materials.hpp — Physical parameters of one donor species and the built-in
// presets. Gyromagnetic ratios and the hyperfine strength are stored in
// internal angular units (rad/us per tesla, rad/us).

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "nespin/errors.hpp"

namespace nespin {

struct SpinSystemParams {
    int two_i = 1;          // nuclear spin I = two_i/2
    double gamma_e = 0.0;   // rad/us per tesla
    double gamma_n = 0.0;   // rad/us per tesla
    double a_iso = 0.0;     // rad/us
    std::string name;

    double spin_i() const { return two_i / 2.0; }
    double delta_gamma() const { return gamma_n / gamma_e; }
    int dim() const { return 2 * (two_i + 1); }

    void validate() const {
        if (two_i < 1) throw DomainError("SpinSystemParams: two_i must be >= 1");
        if (!(gamma_e > 0.0) || !(gamma_n > 0.0) || !(a_iso > 0.0))
            throw DomainError("SpinSystemParams: rates must be positive");
        const double dg = delta_gamma();
        if (!(dg > 0.0) || !(dg < 1e-2))
            throw DomainError("SpinSystemParams: gamma_n/gamma_e outside (0, 1e-2)");
    }
};

// Phosphorus donor in silicon: I = 1/2, gamma_e = 27.974 GHz/T,
// gamma_n = 17.251 MHz/T, A_iso = 117.5 MHz.
SpinSystemParams si_p();

// Bismuth donor in silicon: I = 9/2, gamma_e = 27.997 GHz/T,
// gamma_n = 6.963 MHz/T, A_iso = 1.4754 GHz.
SpinSystemParams si_bi();

std::optional<SpinSystemParams> material_by_name(std::string_view name);

} // namespace nespin
