#include "fslab/params.hpp"

#include <cmath>

#include "fslab/errors.hpp"

namespace fslab {

void validate(const FluidParams& p) {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!(finite(p.mu) && p.mu > 0)) throw ParameterError("mu must be positive");
    if (!(finite(p.nu) && p.nu > 0)) throw ParameterError("nu must be positive");
    if (!(finite(p.sigma) && p.sigma >= 0)) throw ParameterError("sigma must be non-negative");
    if (!(finite(p.m) && p.m > 0)) throw ParameterError("m must be positive");
    if (!(finite(p.gamma1) && p.gamma1 > 0)) throw ParameterError("gamma1 must be positive");
    if (!(finite(p.gamma3) && p.gamma3 > 0)) throw ParameterError("gamma3 must be positive");
    if (!(finite(p.zeta0) && p.zeta0 > 0)) throw ParameterError("zeta0 must be positive");
    if (!(p.rho1 > 0 && p.rho2 > 0 && p.rho3 > 0)) throw ParameterError("rho1, rho2, rho3 must be positive");
    if (!(std::isfinite(p.zeta.real()) && std::isfinite(p.zeta.imag())))
        throw ParameterError("zeta must be finite");
    if (std::abs(p.zeta) > p.zeta0) throw ParameterError("|zeta| exceeds zeta0");
    if (p.gamma1 < p.rho1 || p.gamma1 > p.rho2) throw ParameterError("gamma1 outside [rho1, rho2]");
    if (p.gamma3 > p.rho3) throw ParameterError("gamma3 exceeds rho3");
    if (p.nu <= 0) throw ParameterError("alpha + beta must be positive");
}

ReducedParams reduce_params(const FluidParams& p) {
    ReducedParams r;
    r.alpha = p.mu / p.gamma1;
    r.beta = (p.nu - p.mu) / p.gamma1;
    r.zetaPrime = p.gamma3 * p.zeta / p.gamma1;
    r.sigmaPrime = p.sigma / p.gamma1;
    return r;
}

const char* to_string(ZetaCase c) {
    switch (c) {
        case ZetaCase::C1: return "C1";
        case ZetaCase::C2: return "C2";
        case ZetaCase::C3: return "C3";
    }
    return "?";
}

ZetaCase zeta_case_from_string(const std::string& s) {
    if (s == "C1" || s == "c1") return ZetaCase::C1;
    if (s == "C2" || s == "c2") return ZetaCase::C2;
    if (s == "C3" || s == "c3") return ZetaCase::C3;
    throw ParameterError("unknown zeta case '" + s + "'");
}

void validate(const SectorSpec& s) {
    if (!(s.epsilon > 0 && s.epsilon < std::numbers::pi / 2))
        throw ParameterError("epsilon must lie in (0, pi/2)");
    if (!(s.lambda0 >= 0 && std::isfinite(s.lambda0))) throw ParameterError("lambda0 must be >= 0");
    if (!(s.rho3OverNu > 0)) throw ParameterError("rho3/nu must be positive");
}

cplx effective_zeta(const FluidParams& p, ZetaCase c, cplx lambda) {
    return c == ZetaCase::C1 ? 1.0 / lambda : p.zeta;
}

SymbolParams symbol_params(const FluidParams& p, ZetaCase c, cplx lambda) {
    SymbolParams s;
    s.alpha = p.mu / p.gamma1;
    s.beta = (p.nu - p.mu) / p.gamma1;
    s.zeta = p.gamma3 * effective_zeta(p, c, lambda) / p.gamma1;
    s.sigma = p.sigma / p.gamma1;
    s.m = p.m;
    return s;
}

cplx pressure_coupling(const FluidParams& p, ZetaCase c, cplx lambda) {
    return effective_zeta(p, c, lambda) * lambda * p.gamma3 / p.gamma1;
}

}  // namespace fslab
