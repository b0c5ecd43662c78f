#include "fslab/symbol_scan.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#include "fslab/errors.hpp"
#include "fslab/optimize.hpp"
#include "fslab/parallel.hpp"
#include "fslab/random.hpp"
#include "fslab/regions.hpp"

namespace fslab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double point_scale(const SpectralPoint& pt) {
    return std::sqrt(std::abs(pt.lambda)) + std::sqrt(pt.xi_norm2());
}

std::vector<std::pair<std::array<int, 2>, int>> derivative_list(int dim, int maxOrder) {
    std::vector<std::pair<std::array<int, 2>, int>> out;
    for (int ell = 0; ell <= 1; ++ell) {
        for (int total = 0; total <= maxOrder; ++total) {
            if (dim == 1) {
                out.push_back({{total, 0}, ell});
            } else {
                for (int k1 = total; k1 >= 0; --k1) out.push_back({{k1, total - k1}, ell});
            }
        }
    }
    return out;
}

// Symbol values on the 5-point-per-axis lattice around a sample, filled on demand.
class Stencil {
public:
    Stencil(const SymbolSelector& sel, const SpectralPoint& pt, const FluidParams& params, ZetaCase zc,
            double x, double hXi, double hTau)
        : sel_(sel), pt_(pt), params_(params), zc_(zc), x_(x), hXi_(hXi), hTau_(hTau) {}

    cplx at(int a, int b, int t) {
        auto& slot = cache_[(a + 2) * 25 + (b + 2) * 5 + (t + 2)];
        if (!slot) {
            SpectralPoint q = pt_;
            q.xi[0] += 0.5 * a * hXi_;
            if (pt_.dim == 2) q.xi[1] += 0.5 * b * hXi_;
            q.lambda += cplx(0.0, 0.5 * t * hTau_);
            slot = eval_symbol(sel_, q, params_, zc_, x_);
        }
        return *slot;
    }

    // Tensor-product central difference with lattice step `s` (1 or 2 half-steps).
    cplx diff(const std::array<int, 2>& kappa, int ell, int s) {
        const double hx = 0.5 * s * hXi_;
        const double ht = 0.5 * s * hTau_;
        auto weights = [](int order) -> std::array<double, 3> {
            if (order == 0) return {0.0, 1.0, 0.0};
            if (order == 1) return {-0.5, 0.0, 0.5};
            return {1.0, -2.0, 1.0};
        };
        const auto w1 = weights(kappa[0]);
        const auto w2 = weights(kappa[1]);
        const auto wt = weights(ell);
        cplx acc = 0.0;
        for (int i = -1; i <= 1; ++i) {
            if (w1[i + 1] == 0.0) continue;
            for (int j = -1; j <= 1; ++j) {
                if (w2[j + 1] == 0.0) continue;
                for (int k = -1; k <= 1; ++k) {
                    if (wt[k + 1] == 0.0) continue;
                    acc += w1[i + 1] * w2[j + 1] * wt[k + 1] * at(i * s, j * s, k * s);
                }
            }
        }
        return acc / (std::pow(hx, kappa[0] + kappa[1]) * std::pow(ht, ell));
    }

    cplx derivative(const std::array<int, 2>& kappa, int ell) {
        if (kappa[0] == 0 && kappa[1] == 0 && ell == 0) return at(0, 0, 0);
        const cplx coarse = diff(kappa, ell, 2);
        const cplx fine = diff(kappa, ell, 1);
        return (4.0 * fine - coarse) / 3.0;
    }

private:
    const SymbolSelector& sel_;
    SpectralPoint pt_;
    const FluidParams& params_;
    ZetaCase zc_;
    double x_, hXi_, hTau_;
    std::array<std::optional<cplx>, 125> cache_{};
};

}  // namespace

std::string SymbolSelector::name() const {
    std::ostringstream os;
    switch (kind) {
        case SymbolKind::APow: os << "A^" << power; break;
        case SymbolKind::BPow: os << "B^" << power; break;
        case SymbolKind::L11: os << "L11"; break;
        case SymbolKind::L12: os << "L12"; break;
        case SymbolKind::L21: os << "L21"; break;
        case SymbolKind::L22: os << "L22"; break;
        case SymbolKind::DetL: os << "detL"; break;
        case SymbolKind::DetLInv: os << "detL^-1"; break;
        case SymbolKind::Q: os << "Q"; break;
        case SymbolKind::Qprime: os << "Qprime"; break;
        case SymbolKind::NJ1: os << "n" << (J + 1) << "1"; break;
        case SymbolKind::NJ2: os << "n" << (J + 1) << "2"; break;
        case SymbolKind::DetLOverN: os << "detL/N"; break;
        case SymbolKind::ExpBx: os << "exp(-Bx)"; break;
    }
    return os.str();
}

SymbolSelector SymbolSelector::parse(const std::string& text) {
    SymbolSelector s;
    auto power_of = [&](const std::string& t) {
        if (t.size() <= 2) return 1.0;
        try {
            return std::stod(t.substr(2));
        } catch (const std::exception&) {
            throw ParameterError("bad exponent in symbol '" + text + "'");
        }
    };
    if (text.rfind("A^", 0) == 0 || text == "A") {
        s.kind = SymbolKind::APow;
        s.power = power_of(text);
    } else if (text.rfind("B^", 0) == 0 || text == "B") {
        s.kind = SymbolKind::BPow;
        s.power = power_of(text);
    } else if (text == "L11") s.kind = SymbolKind::L11;
    else if (text == "L12") s.kind = SymbolKind::L12;
    else if (text == "L21") s.kind = SymbolKind::L21;
    else if (text == "L22") s.kind = SymbolKind::L22;
    else if (text == "detL") s.kind = SymbolKind::DetL;
    else if (text == "detL^-1") s.kind = SymbolKind::DetLInv;
    else if (text == "Q") s.kind = SymbolKind::Q;
    else if (text == "Qprime") s.kind = SymbolKind::Qprime;
    else if (text == "detL/N") s.kind = SymbolKind::DetLOverN;
    else if (text == "exp(-Bx)") s.kind = SymbolKind::ExpBx;
    else if (text.size() == 3 && text[0] == 'n' && (text[2] == '1' || text[2] == '2') && text[1] >= '1' &&
             text[1] <= '3') {
        s.kind = text[2] == '1' ? SymbolKind::NJ1 : SymbolKind::NJ2;
        s.J = text[1] - '1';
    } else {
        throw ParameterError("unknown symbol '" + text + "'");
    }
    return s;
}

cplx eval_symbol(const SymbolSelector& sel, const SpectralPoint& pt, const FluidParams& params, ZetaCase zc,
                 double x) {
    const SymbolParams sp = symbol_params(params, zc, pt.lambda);
    const CoreSymbols c = core_symbols(pt, sp);
    switch (sel.kind) {
        case SymbolKind::APow: return std::pow(c.A, sel.power);
        case SymbolKind::BPow: return std::pow(c.B, sel.power);
        case SymbolKind::ExpBx: return std::exp(-c.B * x);
        case SymbolKind::Q: return q_symbols(c).Q;
        case SymbolKind::Qprime: return q_symbols(c).Qprime;
        default: break;
    }
    const LopatinskiMatrix L = lopatinski(c, sp);
    switch (sel.kind) {
        case SymbolKind::L11: return L.L11;
        case SymbolKind::L12: return L.L12;
        case SymbolKind::L21: return L.L21;
        case SymbolKind::L22: return L.L22;
        case SymbolKind::DetL: return L.detL;
        case SymbolKind::DetLInv: return 1.0 / L.detL;
        case SymbolKind::DetLOverN: return L.detL / L.N;
        default: break;
    }
    if (sel.J < 0 || sel.J > pt.dim) throw ParameterError("multiplier component out of range");
    const MultiplierSet n = multipliers(pt, c, L, sp);
    return sel.kind == SymbolKind::NJ1 ? n.n1[sel.J] : n.n2[sel.J];
}

MultiplierScanReport multiplier_class_scan(const SymbolSelector& sel, const MultiplierClassSpec& spec,
                                           const SamplingPlan& plan, const FluidParams& params) {
    if (spec.type != 1 && spec.type != 2) throw ParameterError("multiplier class type must be 1 or 2");
    if (spec.maxDerivOrder < 0 || spec.maxDerivOrder > 2) throw ParameterError("maxDerivOrder must be <= 2");
    validate(spec.region);
    if (!(spec.region.lambda0 > 0)) throw ParameterError("multiplier scans need lambda0 > 0");
    const auto derivs = derivative_list(plan.dim, spec.maxDerivOrder);
    const std::size_t nd = derivs.size();
    const std::size_t n = plan.count;
    const bool isExp = sel.kind == SymbolKind::ExpBx;
    const ZetaCase zc = spec.region.zetaCase;

    // Search coordinates: the four uniform sample draws plus the normal-coordinate draw.
    using Coords = std::array<double, 5>;
    std::vector<Coords> coords(n);
    parallel_for(n, [&](std::size_t i) {
        double extra = 0.0;
        const SampleCoords c = sample_coords(plan, spec.region, params, i, &extra);
        coords[i] = {c.u[0], c.u[1], c.u[2], c.u[3], extra};
    });
    auto to_point = [&](const Coords& c, SpectralPoint& pt, double& x) {
        SampleCoords sc{{std::clamp(c[0], 0.0, 1.0), std::clamp(c[1], 0.0, 1.0), std::clamp(c[2], 0.0, 1.0),
                         std::clamp(c[3], 0.0, 1.0)}};
        if (!map_sample(sc, plan, spec.region, params, pt)) return false;
        x = isExp ? std::clamp(c[4], 0.0, 1.0) * 5.0 / point_scale(pt) : 0.0;
        return true;
    };
    std::vector<int> active{0, 1, 2};
    if (plan.dim == 2) active.push_back(3);
    if (isExp) active.push_back(4);
    auto refine = [&](const Coords& start, const std::function<double(const Coords&)>& objective) {
        std::vector<double> x0;
        for (int k : active) x0.push_back(start[k]);
        const auto res = nelder_mead(
            [&](const std::vector<double>& v) {
                Coords c = start;
                for (std::size_t k = 0; k < active.size(); ++k) c[active[k]] = std::clamp(v[k], 0.0, 1.0);
                return objective(c);
            },
            x0, 0.02, 400, 1e-10);
        Coords c = start;
        for (std::size_t k = 0; k < active.size(); ++k) c[active[k]] = std::clamp(res.x[k], 0.0, 1.0);
        return std::make_pair(c, res.value);
    };

    // Decay constant of exp(-Bx): min Re B / (|lambda|^{1/2} + |xi'|), sampled then refined.
    double decay = 0.0;
    if (isExp) {
        auto decay_at = [&](const Coords& c) {
            SpectralPoint pt;
            double x = 0.0;
            if (!to_point(c, pt, x)) return kInf;
            const CoreSymbols core = core_symbols(pt, symbol_params(params, zc, pt.lambda));
            return core.B.real() / point_scale(pt);
        };
        std::vector<double> dv(n);
        parallel_for(n, [&](std::size_t i) { dv[i] = decay_at(coords[i]); });
        const auto best = static_cast<std::size_t>(std::min_element(dv.begin(), dv.end()) - dv.begin());
        decay = std::min(dv[best], refine(coords[best], decay_at).second);
    }

    auto ratio_at = [&](const Coords& c, std::size_t d) {
        SpectralPoint pt;
        double x = 0.0;
        if (!to_point(c, pt, x)) return -kInf;
        const double scale = point_scale(pt);
        const double r = std::sqrt(pt.xi_norm2());
        Stencil st(sel, pt, params, zc, x, 1e-4 * scale, 1e-4 * scale * scale);
        const auto& [kappa, ell] = derivs[d];
        cplx v = st.derivative(kappa, ell);
        if (ell == 1) v *= pt.tau();
        const int k = kappa[0] + kappa[1];
        double bound = spec.type == 1 ? std::pow(scale, spec.order - k) : std::pow(scale, spec.order) * std::pow(r, -k);
        if (isExp) bound *= std::exp(-0.5 * decay * scale * x);
        return std::abs(v) / bound;
    };

    std::vector<double> ratios(n * nd, 0.0);
    std::vector<std::string> errors(n);
    parallel_for(n, [&](std::size_t i) {
        try {
            for (std::size_t d = 0; d < nd; ++d) {
                ratios[i * nd + d] = ratio_at(coords[i], d);
                if (!std::isfinite(ratios[i * nd + d])) errors[i] = "non-finite ratio";
            }
        } catch (const Error& e) {
            errors[i] = e.what();
        }
    });

    MultiplierScanReport rep;
    rep.symbol = sel.name();
    rep.cls = spec;
    rep.samples = n;
    rep.decayConstant = isExp ? decay : 0.0;
    rep.perDerivative.resize(nd);
    for (std::size_t i = 0; i < n; ++i) {
        if (errors[i].empty()) continue;
        std::ostringstream os;
        os << "sample " << i << ": " << errors[i];
        rep.violations.push_back(os.str());
    }
    // Fixed lattice over the search coordinates; its best points seed the local search
    // alongside the best samples, so the refined maximum does not hinge on the draw.
    std::vector<Coords> lattice;
    {
        const int nm = 8, na = 5, nx = 8, nt = plan.dim == 2 ? 4 : 1, ne = isExp ? 4 : 1;
        auto mid = [](int k, int K) { return (k + 0.5) / K; };
        for (int a = 0; a < nm; ++a)
            for (int b = 0; b < na; ++b)
                for (int c = 0; c < nx; ++c)
                    for (int t = 0; t < nt; ++t)
                        for (int e = 0; e < ne; ++e)
                            lattice.push_back({mid(a, nm), mid(b, na), mid(c, nx), mid(t, nt), mid(e, ne)});
    }
    std::vector<double> latticeRatios(lattice.size() * nd, -kInf);
    parallel_for(lattice.size(), [&](std::size_t i) {
        try {
            for (std::size_t d = 0; d < nd; ++d) {
                const double v = ratio_at(lattice[i], d);
                if (std::isfinite(v)) latticeRatios[i * nd + d] = v;
            }
        } catch (const Error&) {
        }
    });

    // Sampled maxima, then local maximization from the largest few samples and lattice points.
    constexpr std::size_t kStarts = 3;
    constexpr std::size_t kLatticeStarts = 3;
    parallel_for(nd, [&](std::size_t d) {
        auto& e = rep.perDerivative[d];
        e.kappa = derivs[d].first;
        e.ell = derivs[d].second;
        std::vector<std::size_t> order;
        for (std::size_t i = 0; i < n; ++i)
            if (errors[i].empty()) order.push_back(i);
        const std::size_t starts = std::min(kStarts, order.size());
        std::partial_sort(order.begin(), order.begin() + starts, order.end(), [&](std::size_t a, std::size_t b) {
            return ratios[a * nd + d] > ratios[b * nd + d];
        });
        std::vector<std::size_t> lorder(lattice.size());
        for (std::size_t i = 0; i < lorder.size(); ++i) lorder[i] = i;
        const std::size_t lstarts = std::min(kLatticeStarts, lorder.size());
        std::partial_sort(lorder.begin(), lorder.begin() + lstarts, lorder.end(), [&](std::size_t a, std::size_t b) {
            return latticeRatios[a * nd + d] > latticeRatios[b * nd + d];
        });
        std::vector<Coords> seeds;
        Coords bestC{};
        for (std::size_t k = 0; k < starts; ++k) {
            const std::size_t i = order[k];
            if (ratios[i * nd + d] > e.sampledRatio) {
                e.sampledRatio = ratios[i * nd + d];
                bestC = coords[i];
            }
            seeds.push_back(coords[i]);
        }
        for (std::size_t k = 0; k < lstarts; ++k)
            if (std::isfinite(latticeRatios[lorder[k] * nd + d])) seeds.push_back(lattice[lorder[k]]);
        for (const Coords& seed : seeds) {
            const auto [c, negv] = refine(seed, [&](const Coords& c) {
                try {
                    const double v = ratio_at(c, d);
                    return std::isfinite(v) ? -v : kInf;
                } catch (const Error&) {
                    return kInf;
                }
            });
            if (-negv > e.worstRatio) {
                e.worstRatio = -negv;
                bestC = c;
            }
        }
        e.worstRatio = std::max(e.worstRatio, e.sampledRatio);
        to_point(bestC, e.argmax, e.argmaxX);
    });
    return rep;
}

std::vector<std::pair<SymbolSelector, MultiplierClassSpec>> default_symbol_classes(const SectorSpec& region,
                                                                                    int dim) {
    std::vector<std::pair<SymbolSelector, MultiplierClassSpec>> out;
    auto add = [&](SymbolSelector s, double order, int type) {
        MultiplierClassSpec c;
        c.order = order;
        c.type = type;
        c.maxDerivOrder = 2;
        c.region = region;
        out.emplace_back(s, c);
    };
    add({SymbolKind::APow, 1.0, 0}, 1.0, 1);
    add({SymbolKind::APow, -1.0, 0}, -1.0, 1);
    add({SymbolKind::BPow, 1.0, 0}, 1.0, 1);
    add({SymbolKind::BPow, -1.0, 0}, -1.0, 1);
    add({SymbolKind::L11, 1.0, 0}, 1.0, 1);
    add({SymbolKind::L12, 1.0, 0}, 2.0, 1);
    add({SymbolKind::L21, 1.0, 0}, 0.0, 1);
    add({SymbolKind::L22, 1.0, 0}, 1.0, 1);
    add({SymbolKind::DetL, 1.0, 0}, 2.0, 1);
    add({SymbolKind::DetLInv, 1.0, 0}, -2.0, 1);
    add({SymbolKind::Q, 1.0, 0}, 0.0, 1);
    add({SymbolKind::Qprime, 1.0, 0}, -2.0, 1);
    for (int J = 0; J <= dim; ++J) {
        add({SymbolKind::NJ1, 1.0, J}, -2.0, 1);
        add({SymbolKind::NJ2, 1.0, J}, -2.0, 1);
    }
    add({SymbolKind::DetLOverN, 1.0, 0}, 0.0, 2);
    add({SymbolKind::ExpBx, 1.0, 0}, 0.0, 1);
    return out;
}

double nab_ratio(const SpectralPoint& pt, const FluidParams& params, ZetaCase zc) {
    const SymbolParams sp = symbol_params(params, zc, pt.lambda);
    const CoreSymbols c = core_symbols(pt, sp);
    const LopatinskiMatrix L = lopatinski(c, sp);
    return std::abs(L.N) / n_scale(pt);
}

namespace {

struct MinResult {
    double value = kInf;
    SpectralPoint point;
    SampleCoords coords{};
};

SpectralPoint point_from_coords(const SampleCoords& c, const SamplingPlan& plan, const SectorSpec& spec,
                                const FluidParams& params, bool& ok) {
    SpectralPoint pt;
    ok = map_sample(c, plan, spec, params, pt);
    return pt;
}

double safe_ratio(const SpectralPoint& pt, const FluidParams& params, ZetaCase zc) {
    try {
        const double r = nab_ratio(pt, params, zc);
        return std::isfinite(r) ? r : 0.0;
    } catch (const Error&) {
        return 0.0;
    }
}

// Ratios over a fixed batch of uniform coordinates mapped into the region at lambda0.
std::vector<MinResult> ratio_batch(const std::vector<SampleCoords>& coords, const SamplingPlan& plan,
                                   const SectorSpec& spec, const FluidParams& params) {
    std::vector<MinResult> out(coords.size());
    parallel_for(coords.size(), [&](std::size_t i) {
        bool ok = false;
        SpectralPoint pt = point_from_coords(coords[i], plan, spec, params, ok);
        out[i].coords = coords[i];
        out[i].point = pt;
        out[i].value = ok ? safe_ratio(pt, params, spec.zetaCase) : kInf;
    });
    return out;
}

MinResult batch_min(const std::vector<MinResult>& r) {
    MinResult best;
    for (const auto& x : r)
        if (x.value < best.value) best = x;
    return best;
}

std::vector<SampleCoords> draw_coords(std::size_t n, std::uint64_t seed, std::uint64_t stream) {
    std::vector<SampleCoords> c(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto g = make_rng(seed, stream, i);
        for (double& u : c[i].u) u = uniform01(g);
    }
    return c;
}

// Local minimization over the first three uniform coordinates.
MinResult refine_min(const MinResult& start, const SamplingPlan& plan, const SectorSpec& spec,
                     const FluidParams& params) {
    auto coords_of = [&](const std::vector<double>& v) {
        SampleCoords c = start.coords;
        for (int k = 0; k < 3; ++k) c.u[k] = std::clamp(v[k], 0.0, 1.0);
        return c;
    };
    const auto res = nelder_mead(
        [&](const std::vector<double>& v) {
            bool ok = false;
            const SpectralPoint pt = point_from_coords(coords_of(v), plan, spec, params, ok);
            return ok ? safe_ratio(pt, params, spec.zetaCase) : kInf;
        },
        {start.coords.u[0], start.coords.u[1], start.coords.u[2]}, 0.02, 300);
    MinResult r;
    r.coords = coords_of(res.x);
    bool ok = false;
    r.point = point_from_coords(r.coords, plan, spec, params, ok);
    r.value = ok ? safe_ratio(r.point, params, spec.zetaCase) : kInf;
    return r;
}

}  // namespace

NabReport nab_lower_bound_scan(const FluidParams& params, const SectorSpec& specIn, std::size_t sampleBudget,
                               std::uint64_t seed, int dim) {
    validate(params);
    validate(specIn);
    check_zeta_case(params, specIn);
    if (sampleBudget == 0) throw ParameterError("sample budget must be positive");
    SamplingPlan plan;
    plan.count = sampleBudget;
    plan.seed = seed;
    plan.dim = dim;
    const auto coords = draw_coords(sampleBudget, seed, 1);

    NabReport rep;
    rep.samples = sampleBudget;
    auto min_at = [&](double lambda0) {
        SectorSpec s = specIn;
        s.lambda0 = lambda0;
        const MinResult m = batch_min(ratio_batch(coords, plan, s, params));
        rep.searchTrace.emplace_back(lambda0, m.value);
        return m;
    };

    const double maxLambda0 = 65536.0;
    double hi = 1.0;
    MinResult best = min_at(hi);
    double lo = 0.0;
    while (!(best.value > kNabFloor)) {
        lo = hi;
        hi *= 2.0;
        if (hi > maxLambda0) throw SearchFailure("no lambda0 <= 2^16 gives a positive lower bound for |N|");
        best = min_at(hi);
    }
    if (lo > 0.0) {
        for (int it = 0; it < 12; ++it) {
            const double mid = std::sqrt(lo * hi);
            const MinResult m = min_at(mid);
            if (m.value > kNabFloor) {
                hi = mid;
                best = m;
            } else {
                lo = mid;
            }
        }
    }
    rep.lambda0Found = hi;
    rep.sampledMin = best.value;

    SectorSpec found = specIn;
    found.lambda0 = hi;
    // Local refinement from the few smallest samples.
    auto batch = ratio_batch(coords, plan, found, params);
    std::vector<std::size_t> order(batch.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    const std::size_t starts = std::min<std::size_t>(4, order.size());
    std::partial_sort(order.begin(), order.begin() + starts, order.end(),
                      [&](std::size_t a, std::size_t b) { return batch[a].value < batch[b].value; });
    MinResult refined = batch[order[0]];
    for (std::size_t k = 0; k < starts; ++k) {
        const MinResult r = refine_min(batch[order[k]], plan, found, params);
        if (r.value < refined.value) refined = r;
    }
    rep.refinedMin = refined.value;
    rep.argmin = refined.value < best.value ? refined.point : best.point;
    rep.cFound = 0.99 * std::min(rep.sampledMin, rep.refinedMin);

    const auto check = ratio_batch(draw_coords(sampleBudget, seed, 2), plan, found, params);
    rep.validationSamples = check.size();
    for (const auto& x : check)
        if (x.value < rep.cFound) ++rep.violations;
    return rep;
}

SectorScanReport sector_inequality_scan(double epsilon, std::size_t samples, std::uint64_t seed) {
    std::vector<double> margin(samples, kInf);
    parallel_for(samples, [&](std::size_t i) {
        auto g = make_rng(seed, 3, i);
        const double a = std::pow(10.0, -3.0 + 6.0 * uniform01(g));
        const double rho = std::pow(10.0, -3.0 + 6.0 * uniform01(g));
        const double theta = (2.0 * uniform01(g) - 1.0) * (std::numbers::pi - epsilon);
        const double r = std::pow(10.0, -3.0 + 6.0 * uniform01(g));
        SpectralPoint pt;
        pt.lambda = std::polar(rho, theta);
        pt.xi = {r, 0.0};
        const auto rep = sector_inequality_check(pt, a, epsilon);
        margin[i] = rep.lhs / rep.rhs;
    });
    SectorScanReport rep;
    rep.samples = samples;
    rep.minMargin = kInf;
    for (double m : margin) {
        rep.minMargin = std::min(rep.minMargin, m);
        if (m < 1.0) ++rep.violations;
    }
    return rep;
}

ABScanReport ab_sector_scan(const FluidParams& params, const SectorSpec& spec, const SamplingPlan& plan) {
    const std::size_t n = plan.count;
    std::vector<std::array<double, 4>> vals(n);
    parallel_for(n, [&](std::size_t i) {
        const SpectralPoint pt = sample_point(plan, spec, params, i);
        const SymbolParams sp = symbol_params(params, spec.zetaCase, pt.lambda);
        const CoreSymbols c = core_symbols(pt, sp);
        const double s = point_scale(pt);
        vals[i] = {std::abs(std::arg(c.A * c.B)), std::abs(c.A * c.B + c.r2) / (std::abs(pt.lambda) + c.r2),
                   std::abs(c.A) / s, std::abs(c.B) / s};
    });
    ABScanReport rep;
    rep.samples = n;
    rep.cIntAB = rep.cLowerA = rep.cLowerB = kInf;
    for (const auto& v : vals) {
        rep.maxArgAB = std::max(rep.maxArgAB, v[0]);
        rep.cIntAB = std::min(rep.cIntAB, v[1]);
        rep.cLowerA = std::min(rep.cLowerA, v[2]);
        rep.cUpperA = std::max(rep.cUpperA, v[2]);
        rep.cLowerB = std::min(rep.cLowerB, v[3]);
        rep.cUpperB = std::max(rep.cUpperB, v[3]);
    }
    rep.epsilon0 = std::numbers::pi - rep.maxArgAB;
    return rep;
}

namespace {

double rel_gap(cplx a, cplx b) {
    const double s = std::max(std::abs(a), std::abs(b));
    return s > 0 ? std::abs(a - b) / s : 0.0;
}

}  // namespace

double LopatinskiIdentityReport::worst() const { return std::max({formMismatch, detFactor, nFactor, nExpansion}); }

LopatinskiIdentityReport lopatinski_identity_scan(const FluidParams& params, const SectorSpec& spec,
                                                  const SamplingPlan& plan) {
    validate(params);
    validate(spec);
    struct Slot {
        double e[4];
        SpectralPoint pt;
    };
    std::vector<Slot> slots(plan.count);
    parallel_for(plan.count, [&](std::size_t k) {
        const SpectralPoint pt = sample_point(plan, spec, params, k);
        const LopatinskiMatrix L = eval_lopatinski(pt, params, spec);
        slots[k] = {{L.formMismatch, rel_gap(L.detL, L.P * L.D), rel_gap(L.N, L.P * L.Ntilde),
                     rel_gap(L.N, L.L11 * L.E - pt.lambda * L.L12 * L.L21)},
                    pt};
    });
    LopatinskiIdentityReport r;
    r.samples = plan.count;
    double worst = -1.0;
    for (const auto& s : slots) {
        r.formMismatch = std::max(r.formMismatch, s.e[0]);
        r.detFactor = std::max(r.detFactor, s.e[1]);
        r.nFactor = std::max(r.nFactor, s.e[2]);
        r.nExpansion = std::max(r.nExpansion, s.e[3]);
        const double w = *std::max_element(s.e, s.e + 4);
        if (w > worst) {
            worst = w;
            r.argmax = s.pt;
        }
    }
    return r;
}

MBranchReport m_branch_scan(const FluidParams& params, const SectorSpec& spec, const SamplingPlan& plan,
                            double relGap, const std::vector<double>& xs) {
    if (!(relGap > 0) || relGap >= 0.5) throw ParameterError("relative gap must lie in (0, 0.5)");
    validate(params);
    validate(spec);
    std::vector<double> worst(plan.count, 0.0);
    parallel_for(plan.count, [&](std::size_t k) {
        double extra = 0.0;
        const SpectralPoint pt = sample_point(plan, spec, params, k, &extra);
        const CoreSymbols c = eval_core(pt, params, spec);
        // |d| = 2 g |A| gives |d| / (|A| + |B|) = g up to O(g^2).
        const cplx dir = std::polar(1.0, 2.0 * std::numbers::pi * extra);
        const cplx d = dir * (2.0 * relGap * std::abs(c.A));
        const cplx A = c.A, B = c.A + d;
        for (double sx : xs) {
            const double x = sx / A.real();
            const cplx t = eval_M_taylor(A, B, x), n = eval_M_direct(A, B, x);
            worst[k] = std::max(worst[k], rel_gap(t, n));
        }
    });
    MBranchReport r;
    r.samples = plan.count;
    r.relGap = relGap;
    r.maxRelDiff = *std::max_element(worst.begin(), worst.end());
    return r;
}

}  // namespace fslab
