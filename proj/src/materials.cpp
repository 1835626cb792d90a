#include "nespin/materials.hpp"

#include "nespin/units.hpp"

namespace nespin {

SpinSystemParams si_p() {
    SpinSystemParams p;
    p.two_i = 1;
    p.gamma_e = units::ghz_to_rad_us(27.974);
    p.gamma_n = units::mhz_to_rad_us(17.251);
    p.a_iso = units::mhz_to_rad_us(117.5);
    p.name = "Si:P";
    return p;
}

SpinSystemParams si_bi() {
    SpinSystemParams p;
    p.two_i = 9;
    p.gamma_e = units::ghz_to_rad_us(27.997);
    p.gamma_n = units::mhz_to_rad_us(6.963);
    p.a_iso = units::ghz_to_rad_us(1.4754);
    p.name = "Si:Bi";
    return p;
}

std::optional<SpinSystemParams> material_by_name(std::string_view name) {
    if (name == "Si:P" || name == "SiP" || name == "si:p") return si_p();
    if (name == "Si:Bi" || name == "SiBi" || name == "si:bi") return si_bi();
    return std::nullopt;
}

} // namespace nespin
