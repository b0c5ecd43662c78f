#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>

#include "fslab/bent.hpp"
#include "fslab/errors.hpp"
#include "fslab/evolution.hpp"
#include "fslab/halfspace.hpp"
#include "fslab/regions.hpp"
#include "fslab/sampling.hpp"
#include "fslab/symbol_scan.hpp"
#include "fslab/verification.hpp"

namespace fslab::cli {

namespace {

std::string path_in(const RunContext& ctx, const std::string& name) {
    return (std::filesystem::path(ctx.outDir) / name).string();
}

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

json point_json(const SpectralPoint& p) {
    return json{{"lambda", complex_json(p.lambda)}, {"xi", json::array({p.xi[0], p.xi[1]})}, {"dim", p.dim}};
}

class Csv {
public:
    Csv(const std::string& path, const std::string& header) : os_(path) {
        if (!os_) throw ConfigError("cannot write '" + path + "'");
        os_ << std::setprecision(17) << header << '\n';
    }
    template <class... T>
    void row(const T&... v) {
        bool first = true;
        ((os_ << (first ? "" : ",") << v, first = false), ...);
        os_ << '\n';
    }

private:
    std::ofstream os_;
};

SamplingPlan scan_plan(const ScanConfig& s, std::size_t count, std::uint64_t seed, std::uint64_t stream, int dim) {
    SamplingPlan p;
    p.count = count;
    p.seed = seed;
    p.stream = stream;
    p.lambdaMinFactor = s.lambdaMinFactor;
    p.lambdaMaxFactor = s.lambdaMaxFactor;
    p.xiMin = s.xiMin;
    p.xiMax = s.xiMax;
    p.dim = dim;
    return p;
}

// ---- solve ----------------------------------------------------------------

void run_solve(const RunContext& ctx, json& rep) {
    const auto& c = ctx.cfg;
    const auto& g = c.grid;
    const cplx lam = c.solve.lambda;
    validate(c.fluid);
    validate(c.sector);
    auto tg = std::make_shared<const TangentialGrid>(g.dim, g.tangentialPoints, g.halfLength);
    const double X = g.truncation > 0 ? g.truncation : choose_truncation(c.fluid, c.sector, lam, *tg);
    auto ng = std::make_shared<const NormalGrid>(g.normalNodes, X, g.mapLength);
    const std::size_t nc = static_cast<std::size_t>(g.dim + 1);
    ResolventData data{HalfSpaceField(tg, ng, 1, Space::Physical), HalfSpaceField(tg, ng, nc, Space::Physical),
                       BoundaryField(tg, nc, Space::Physical), BoundaryField(tg, 1, Space::Physical)};
    if (c.solve.data == "gaussian") {
        const double a = c.solve.amplitude;
        for (std::size_t p = 0; p < tg->size(); ++p) {
            const auto x = tg->x(p);
            const double r2 = x[0] * x[0] + (g.dim == 2 ? x[1] * x[1] : 0.0);
            for (std::size_t i = 0; i < ng->size(); ++i) {
                const double z = ng->nodes()[i];
                const double e = a * std::exp(-r2 - (z - 1.0) * (z - 1.0));
                data.d.at(p, i, 0) = e;
                for (std::size_t k = 0; k < nc; ++k) data.F.at(p, i, k) = (k == 0 ? 0.5 : -x[0] * (k == nc - 1 ? 1.0 : 0.3)) * e;
            }
            const double e = a * std::exp(-r2);
            for (std::size_t k = 0; k < nc; ++k) data.G.at(p, k) = (k == nc - 1 ? 0.3 : 1.0) * e;
            data.K.at(p, 0) = a * std::exp(-2.0 * r2);
        }
    }
    const ResolventSolution sol = solve_full_resolvent(data, c.fluid, c.sector, lam);
    const ResidualReport res = pde_residual(sol, data, c.fluid, c.sector, lam);

    json& r = rep["results"];
    r["lambda"] = complex_json(lam);
    r["truncation"] = X;
    r["edgeRatio"] = edge_ratio(data.F);
    for (const auto& row : res.rows)
        r["residuals"][row.name] = json{{"absolute", row.absolute}, {"relative", row.relative}, {"worstMode", row.worstMode}};
    r["worstRelative"] = res.worst_relative();

    write_csv(to_physical(sol.u), path_in(ctx, "velocity.csv"));
    write_csv(to_physical(sol.eta), path_in(ctx, "density.csv"));
    write_csv(to_physical(sol.h), path_in(ctx, "height.csv"));
    write_binary(to_physical(sol.u), path_in(ctx, "velocity.bin"));
    Csv csv(path_in(ctx, "residuals.csv"), "row,absolute,relative,worstMode");
    for (const auto& row : res.rows) csv.row(row.name, row.absolute, row.relative, row.worstMode);

    add_verdict(rep, "residual", res.worst_relative(), "<=", ctx.tol.at("solve.residual"));
}

// ---- verify-symbols ---------------------------------------------------------

void run_verify_symbols(const RunContext& ctx, json& rep) {
    const auto& c = ctx.cfg;
    const std::uint64_t seed = *c.seed;
    const int dim = 1;
    json& r = rep["results"];

    const auto ident = lopatinski_identity_scan(c.fluid, c.sector, scan_plan(c.scan, c.scan.samples, seed, 1, dim));
    r["lopatinski"] = json{{"samples", ident.samples},     {"formMismatch", ident.formMismatch},
                           {"detFactor", ident.detFactor}, {"nFactor", ident.nFactor},
                           {"nExpansion", ident.nExpansion}, {"argmax", point_json(ident.argmax)}};
    add_verdict(rep, "lopatinski_cross_form", ident.worst(), "<=", ctx.tol.at("symbols.identity"));

    const auto mb = m_branch_scan(c.fluid, c.sector, scan_plan(c.scan, c.scan.samples, seed, 2, dim), 1e-8,
                                  {0.1, 0.5, 1.0, 2.0, 5.0});
    r["mBranch"] = json{{"samples", mb.samples}, {"relGap", mb.relGap}, {"maxRelDiff", mb.maxRelDiff}};
    add_verdict(rep, "m_series_vs_quotient", mb.maxRelDiff, "<=", ctx.tol.at("symbols.m_branch"));

    const auto sec = sector_inequality_scan(c.sector.epsilon, c.scan.validationSamples, seed);
    r["sectorInequality"] = json{{"samples", sec.samples}, {"violations", sec.violations}, {"minMargin", sec.minMargin}};
    add_verdict(rep, "sector_inequality_violations", static_cast<double>(sec.violations), "==", 0.0);

    const auto ab = ab_sector_scan(c.fluid, c.sector, scan_plan(c.scan, c.scan.samples, seed, 3, dim));
    r["abSector"] = json{{"samples", ab.samples}, {"maxArgAB", ab.maxArgAB}, {"epsilon0", ab.epsilon0},
                         {"cIntAB", ab.cIntAB}, {"cLowerA", ab.cLowerA}, {"cUpperA", ab.cUpperA},
                         {"cLowerB", ab.cLowerB}, {"cUpperB", ab.cUpperB}};
    add_verdict(rep, "ab_sector_epsilon0", ab.epsilon0, ">", 0.0);

    Csv csv(path_in(ctx, "symbol_classes.csv"), "symbol,order,type,kappa,ell,worstRatio,refinedWorstRatio,growth");
    double worstGrowth = 0.0;
    std::size_t violations = 0;
    for (const auto& [sel, cls] : default_symbol_classes(c.sector, dim)) {
        const auto base = multiplier_class_scan(sel, cls, scan_plan(c.scan, c.scan.classSamples, seed, 4, dim), c.fluid);
        const auto fine =
            multiplier_class_scan(sel, cls, scan_plan(c.scan, 2 * c.scan.classSamples, seed, 4, dim), c.fluid);
        json entry{{"symbol", base.symbol}, {"class", json{{"order", cls.order}, {"type", cls.type}}},
                   {"violations", base.violations}, {"decayConstant", base.decayConstant}};
        violations += base.violations.size();
        for (std::size_t k = 0; k < base.perDerivative.size(); ++k) {
            const auto& d = base.perDerivative[k];
            const double refined = fine.perDerivative[k].worstRatio;
            const double growth = std::isfinite(d.worstRatio) && d.worstRatio > 0
                                      ? refined / d.worstRatio - 1.0
                                      : std::numeric_limits<double>::infinity();
            worstGrowth = std::max(worstGrowth, growth);
            entry["perDerivative"].push_back(json{{"kappa", json::array({d.kappa[0], d.kappa[1]})},
                                                  {"ell", d.ell},
                                                  {"worstRatio", d.worstRatio},
                                                  {"refinedWorstRatio", refined},
                                                  {"growth", growth},
                                                  {"argmaxPoint", point_json(d.argmax)}});
            csv.row(base.symbol, cls.order, cls.type, d.kappa[0], d.ell, d.worstRatio, refined, growth);
        }
        r["multiplierClasses"].push_back(entry);
    }
    add_verdict(rep, "multiplier_refinement_growth", worstGrowth, "<", ctx.tol.at("symbols.refine_growth"));
    add_verdict(rep, "multiplier_violations", static_cast<double>(violations), "==", 0.0);
}

// ---- scan-nab ----------------------------------------------------------------

void run_scan_nab(const RunContext& ctx, json& rep) {
    const auto& c = ctx.cfg;
    const NabReport n = nab_lower_bound_scan(c.fluid, c.sector, c.scan.samples, *c.seed, 1);
    json& r = rep["results"];
    r["lambda0Found"] = n.lambda0Found;
    r["cFound"] = n.cFound;
    r["sampledMin"] = n.sampledMin;
    r["refinedMin"] = n.refinedMin;
    r["argmin"] = point_json(n.argmin);
    r["samples"] = n.samples;
    r["validationSamples"] = n.validationSamples;
    r["violations"] = n.violations;
    Csv csv(path_in(ctx, "nab_search.csv"), "lambda0,minRatio");
    for (const auto& [l0, m] : n.searchTrace) csv.row(l0, m);
    add_verdict(rep, "lambda0_found", n.lambda0Found, "<=", ctx.tol.at("nab.lambda0_max"));
    add_verdict(rep, "violations", static_cast<double>(n.violations), "==", 0.0);
    add_verdict(rep, "c_found", n.cFound, ">", ctx.tol.at("nab.c_min"));
}

// ---- rbound --------------------------------------------------------------------

void run_rbound(const RunContext& ctx, json& rep) {
    const auto& c = ctx.cfg;
    const auto& rb = c.rbound;
    validate(c.fluid);
    validate(c.sector);
    SamplingPlan plan;
    plan.count = rb.operators;
    plan.seed = *c.seed;
    plan.stream = 5;
    plan.lambdaMaxFactor = rb.lambdaMaxFactor;
    plan.xiMin = 1.0;
    plan.xiMax = 1.0 + 1e-9;
    std::vector<cplx> lambdas;
    for (std::size_t j = 0; j < rb.operators; ++j) lambdas.push_back(sample_point(plan, c.sector, c.fluid, j).lambda);

    auto tg = std::make_shared<const TangentialGrid>(1, rb.tangentialPoints, 10.0);
    const OperatorFamily fam = resolvent_family(lambdas, rb.power, c.fluid, c.sector, tg, rb.normalNodes);
    const auto tests = gaussian_test_vectors(fam.prototype, rb.testVectors, *c.seed);
    const RBoundReport est = rbound_estimate(fam.ops, fam.in, fam.out, tests, rb.trials, *c.seed, rb.q, "lambda^power A(lambda)");

    // Scalar family lambda_j^{-1} Id on the same vectors: bounded by 1 / min |lambda_j|.
    std::vector<LinearOp> scalar;
    double minAbs = std::numeric_limits<double>::infinity();
    for (cplx l : lambdas) {
        minAbs = std::min(minAbs, std::abs(l));
        scalar.push_back([l](const std::vector<cplx>& v) {
            std::vector<cplx> o(v);
            for (auto& x : o) x /= l;
            return o;
        });
    }
    const RBoundReport sc = rbound_estimate(scalar, fam.in, fam.in, tests, rb.trials, *c.seed, rb.q, "inverse lambda");

    json& r = rep["results"];
    r["lambdas"] = json::array();
    for (cplx l : lambdas) r["lambdas"].push_back(complex_json(l));
    auto to_json = [](const RBoundReport& e) {
        return json{{"label", e.label}, {"operators", e.operators}, {"testVectors", e.testVectors},
                    {"trials", e.trials}, {"estimate", e.estimate}, {"maxSingleNorm", e.maxSingleNorm},
                    {"halfTrialEstimate", e.halfTrialEstimate}, {"prefixEstimates", e.prefixEstimates}};
    };
    r["family"] = to_json(est);
    r["family"]["power"] = rb.power;
    r["scalarFamily"] = to_json(sc);
    r["scalarBound"] = 1.0 / minAbs;

    Csv csv(path_in(ctx, "rbound_prefix.csv"), "operators,estimate,scalarEstimate");
    for (std::size_t m = 0; m < est.prefixEstimates.size(); ++m)
        csv.row(m + 1, est.prefixEstimates[m], sc.prefixEstimates[m]);

    add_verdict(rep, "estimate_finite", std::isfinite(est.estimate) ? 1.0 : 0.0, "==", 1.0);
    add_verdict(rep, "estimate_above_single_norm", est.estimate - est.maxSingleNorm, ">=", -ctx.tol.at("rbound.singleton"));
    add_verdict(rep, "scalar_family_bound", sc.estimate * minAbs, "<=", 1.0 + 1e-9);
}

// ---- evolve --------------------------------------------------------------------

double rel_err(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
    const double s = b.norm();
    return s > 0 ? (a - b).norm() / s : (a - b).norm();
}

Eigen::VectorXcd smooth_state(const PerModeGenerator& gen) {
    ModeState s;
    const auto& x = gen.normal->nodes();
    const std::size_t n = gen.nodes();
    s.eta.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) s.eta(static_cast<Eigen::Index>(i)) = std::exp(-(x[i] - 1.0) * (x[i] - 1.0));
    for (int c = 0; c <= gen.dim; ++c) {
        Eigen::VectorXcd u(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i)
            u(static_cast<Eigen::Index>(i)) = (c + 1.0) * 0.5 * x[i] * std::exp(-x[i]) * cplx(1.0, 0.2 * c);
        s.u.push_back(u);
    }
    s.h = 0.3;
    return pack_state(gen, s);
}

void run_evolve(const RunContext& ctx, json& rep) {
    const auto& c = ctx.cfg;
    const auto& e = c.evolve;
    validate(c.fluid);
    e.contour.validate();
    auto ng = std::make_shared<const NormalGrid>(e.normalNodes, e.truncation, kDefaultMapLength);
    json& r = rep["results"];
    double worstContour = 0.0, worstSemigroup = 0.0, worstScalar = 0.0;

    Csv norms(path_in(ctx, "evolve_norms.csv"), "xi,t,spaceNorm,domainNorm,contourVsExpm,semigroupDefect");
    for (double xi : e.xi) {
        const PerModeGenerator gen = build_generator({xi, 0.0}, 1, c.fluid, ng);
        const Eigen::VectorXcd U0 = smooth_state(gen);
        json entry{{"xi", xi}, {"dimension", gen.size()}};
        for (double t : e.times) {
            const Eigen::VectorXcd Uc = propagate_contour(gen, U0, t, e.contour);
            const Eigen::VectorXcd Ue = matrix_exponential_oracle(gen.matrix, U0, t);
            const Eigen::VectorXcd half = propagate_contour(gen, U0, 0.5 * t, e.contour);
            const Eigen::VectorXcd twice = propagate_contour(gen, half, 0.5 * t, e.contour);
            const double ce = rel_err(Uc, Ue), se = rel_err(twice, Uc);
            worstContour = std::max(worstContour, ce);
            worstSemigroup = std::max(worstSemigroup, se);
            const double sn = state_space_norm(gen, Uc), dn = state_domain_norm(gen, Uc);
            entry["times"].push_back(json{{"t", t}, {"contourVsExpm", ce}, {"semigroupDefect", se},
                                          {"spaceNorm", sn}, {"domainNorm", dn}});
            norms.row(xi, t, sn, dn, ce, se);
        }
        const auto grid = log_time_grid(0.01, *std::max_element(e.times.begin(), e.times.end()), 24);
        const SemigroupCheck sg = semigroup_estimate_check(gen.matrix, U0, grid, e.gamma0, generator_norms(gen));
        entry["semigroupConstant"] = sg.cMeasured;
        r["modes"].push_back(entry);
    }

    const Eigen::MatrixXcd minusOne = Eigen::MatrixXcd::Constant(1, 1, -1.0);
    const Eigen::VectorXcd one = Eigen::VectorXcd::Constant(1, 1.0);
    for (double t : e.times) {
        const cplx v = propagate_contour(minusOne, one, t, e.contour)(0);
        worstScalar = std::max(worstScalar, std::abs(v - std::exp(-t)) / std::exp(-t));
    }
    r["scalarRelError"] = worstScalar;

    if (e.maximalRegularity) {
        const PerModeGenerator gen = build_generator({e.xi.front(), 0.0}, 1, c.fluid, ng);
        const Eigen::VectorXcd profile = smooth_state(gen);
        ForcingHistory forcing;
        forcing.dt = e.horizon / static_cast<double>(e.steps);
        for (std::size_t k = 0; k <= e.steps; ++k)
            forcing.samples.push_back(std::sin(std::numbers::pi * static_cast<double>(k) / static_cast<double>(e.steps)) * profile);
        const auto mr = maximal_regularity_norms(gen, forcing, e.gamma0);
        r["maximalRegularity"] = json{{"xi", e.xi.front()}, {"lhs", mr.lhs}, {"rhs", mr.rhs}, {"ratio", mr.ratio}};
        std::string header = "t";
        for (const auto& col : mr.columns) header += "," + col;
        std::ofstream os(path_in(ctx, "maximal_regularity.csv"));
        os << std::setprecision(17) << header << '\n';
        for (std::size_t k = 0; k < mr.times.size(); ++k) {
            os << mr.times[k];
            for (double v : mr.series[k]) os << ',' << v;
            os << '\n';
        }
        add_verdict(rep, "maximal_regularity_ratio_finite", std::isfinite(mr.ratio) ? 1.0 : 0.0, "==", 1.0);
    }

    add_verdict(rep, "contour_vs_expm", worstContour, "<=", ctx.tol.at("evolve.contour"));
    add_verdict(rep, "semigroup_composition", worstSemigroup, "<=", ctx.tol.at("evolve.semigroup"));
    add_verdict(rep, "scalar_decay", worstScalar, "<=", ctx.tol.at("evolve.scalar"));
}

// ---- bent ------------------------------------------------------------------------

void run_bent(const RunContext& ctx, json& rep) {
    const auto& c = ctx.cfg;
    const auto& b = c.bent;
    const auto& g = c.grid;
    if (g.dim != 1) throw ConfigError("the bent command needs [grid] dim = 1");
    validate(c.fluid);
    validate(c.sector);
    auto tg = std::make_shared<const TangentialGrid>(1, g.tangentialPoints, g.halfLength);
    const double X = g.truncation > 0 ? g.truncation : choose_truncation(c.fluid, c.sector, b.lambda, *tg);
    auto ng = std::make_shared<const NormalGrid>(g.normalNodes, X, g.mapLength);

    const double a = b.dataAmplitude;
    CurvedDataFunctions data;
    data.f = [a](const Vec2& x) {
        const double e = a * std::exp(-x(0) * x(0) - (x(1) - 1.5) * (x(1) - 1.5));
        return Vec2(e, -0.5 * e);
    };
    data.g = [a](const Vec2& x) {
        const double e = a * std::exp(-x(0) * x(0));
        return Vec2(0.3 * e, e);
    };
    data.k = [a](const Vec2& x) { return a * std::exp(-2.0 * x(0) * x(0)); };

    const BentData Z0 = pullback_data(data, b.diffeo, tg, ng);
    const BentSolution sol = neumann_solve(Z0, b.diffeo, c.fluid, c.sector, b.lambda, b.neumann);
    const ContractionProxy proxy = contraction_proxy(b.diffeo, c.fluid, c.sector, b.lambda, tg, ng, *c.seed, b.probes);
    const auto bounds = b.diffeo.bounds(g.halfLength);

    json& r = rep["results"];
    r["lambda"] = complex_json(b.lambda);
    r["truncation"] = X;
    r["bounds"] = json{{"M1", bounds.M1}, {"M2", bounds.M2}, {"M3", bounds.M3}};
    r["iterations"] = sol.state.iterations;
    r["converged"] = sol.state.converged;
    r["updateNorms"] = sol.state.updateNorms;
    r["ratios"] = sol.state.ratios;
    r["residual"] = sol.residual;
    r["contractionProxy"] = json{{"value", proxy.value}, {"probes", proxy.probes}};
    const double maxRatio =
        sol.state.ratios.empty() ? 0.0 : *std::max_element(sol.state.ratios.begin(), sol.state.ratios.end());
    r["maxRatio"] = maxRatio;

    write_history_csv(path_in(ctx, "bent_history.csv"), sol.state);
    const PushedForward pf = push_forward(sol.w, sol.H, b.diffeo, ng);
    write_csv(pf.v, path_in(ctx, "bent_velocity.csv"));
    write_csv(pf.h, path_in(ctx, "bent_height.csv"));

    add_verdict(rep, "converged", sol.state.converged ? 1.0 : 0.0, "==", 1.0);
    add_verdict(rep, "iteration_ratio", maxRatio, "<", ctx.tol.at("bent.ratio"));
    add_verdict(rep, "contraction_proxy", proxy.value, "<", ctx.tol.at("bent.ratio"));
    add_verdict(rep, "curved_residual", sol.residual, "<=", ctx.tol.at("bent.residual"));
}

}  // namespace

void run_command(const RunContext& ctx, json& report) {
    report["results"] = json::object();
    report["verdicts"] = json::array();
    if (ctx.command == "solve") run_solve(ctx, report);
    else if (ctx.command == "verify-symbols") run_verify_symbols(ctx, report);
    else if (ctx.command == "scan-nab") run_scan_nab(ctx, report);
    else if (ctx.command == "rbound") run_rbound(ctx, report);
    else if (ctx.command == "evolve") run_evolve(ctx, report);
    else if (ctx.command == "bent") run_bent(ctx, report);
    else throw ConfigError("unknown command '" + ctx.command + "'");
}

}  // namespace fslab::cli
