#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "fslab/errors.hpp"

namespace fslab::cli {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& where, const std::string& raw) {
    const std::string s = trim(raw);
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ConfigError(where + ": '" + s + "' is not a number");
    }
    if (pos != s.size() || !std::isfinite(v)) throw ConfigError(where + ": '" + s + "' is not a finite number");
    return v;
}

// Reads keys of one section and remembers which were consumed.
class Section {
public:
    Section(const pt::ptree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

    bool present() const { return tree_ != nullptr; }

    std::optional<std::string> raw(const std::string& key) {
        used_.insert(key);
        if (!tree_) return std::nullopt;
        auto v = tree_->get_optional<std::string>(key);
        if (!v) return std::nullopt;
        return trim(*v);
    }

    void num(const std::string& key, double& out) {
        if (auto v = raw(key)) out = to_double(where(key), *v);
    }

    template <class Int>
    void count(const std::string& key, Int& out, long long lo = 0) {
        double v = static_cast<double>(out);
        num(key, v);
        if (v != std::floor(v) || v < static_cast<double>(lo) || v > 1e12)
            throw ConfigError(where(key) + " must be an integer >= " + std::to_string(lo));
        out = static_cast<Int>(v);
    }

    void complex(const std::string& key, cplx& out) {
        double re = out.real(), im = out.imag();
        num(key + "_re", re);
        num(key + "_im", im);
        out = {re, im};
    }

    void list(const std::string& key, std::vector<double>& out) {
        auto v = raw(key);
        if (!v) return;
        out.clear();
        std::stringstream ss(*v);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(to_double(where(key), item));
        if (out.empty()) throw ConfigError(where(key) + " must list at least one value");
    }

    void flag(const std::string& key, bool& out) {
        auto v = raw(key);
        if (!v) return;
        if (*v == "true" || *v == "1") out = true;
        else if (*v == "false" || *v == "0") out = false;
        else throw ConfigError(where(key) + ": expected true or false");
    }

    void text(const std::string& key, std::string& out) {
        if (auto v = raw(key)) out = *v;
    }

    void reject_unknown() const {
        if (!tree_) return;
        for (const auto& [k, _] : *tree_)
            if (!used_.count(k)) throw ConfigError("unknown key '" + k + "' in [" + name_ + "]");
    }

private:
    std::string where(const std::string& key) const { return "[" + name_ + "] " + key; }
    const pt::ptree* tree_;
    std::string name_;
    std::set<std::string> used_;
};

const std::set<std::string> kSections{"run", "fluid", "sector", "grid", "solve", "scan", "rbound", "contour", "bent"};

}  // namespace

const std::vector<std::string> kCommands{"solve", "verify-symbols", "scan-nab", "rbound", "evolve", "bent"};

RunConfig parse_config(const std::string& text) {
    // Inline comments: ';' or '#' after whitespace ends the value.
    std::string cleaned;
    {
        std::istringstream lines(text);
        std::string line;
        while (std::getline(lines, line)) {
            for (std::size_t i = 1; i < line.size(); ++i)
                if ((line[i] == ';' || line[i] == '#') && (line[i - 1] == ' ' || line[i - 1] == '\t')) {
                    line.erase(i);
                    break;
                }
            cleaned += line + '\n';
        }
    }
    pt::ptree root;
    try {
        std::istringstream is(cleaned);
        pt::ini_parser::read_ini(is, root);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.message() + " (line " + std::to_string(e.line()) +
                          ")");
    }
    RunConfig cfg;
    for (const auto& [name, sub] : root) {
        if (sub.empty() && !sub.data().empty()) throw ConfigError("key '" + name + "' outside any section");
        if (!kSections.count(name)) throw ConfigError("unknown section [" + name + "]");
        cfg.sections.insert(name);
    }
    auto section = [&](const std::string& name) {
        auto it = root.find(name);
        return Section(it == root.not_found() ? nullptr : &it->second, name);
    };

    {
        Section s = section("run");
        if (auto v = s.raw("seed")) {
            double d = to_double("[run] seed", *v);
            if (d < 0 || d != std::floor(d)) throw ConfigError("[run] seed must be a non-negative integer");
            cfg.seed = std::stoull(*v);
        }
        s.text("out", cfg.outDir);
        s.reject_unknown();
    }
    {
        Section s = section("fluid");
        auto& f = cfg.fluid;
        s.num("mu", f.mu);
        s.num("nu", f.nu);
        s.num("sigma", f.sigma);
        s.num("m", f.m);
        s.num("gamma1", f.gamma1);
        s.num("gamma3", f.gamma3);
        s.complex("zeta", f.zeta);
        s.num("zeta0", f.zeta0);
        s.num("rho1", f.rho1);
        s.num("rho2", f.rho2);
        s.num("rho3", f.rho3);
        s.reject_unknown();
    }
    {
        Section s = section("sector");
        auto& sp = cfg.sector;
        s.num("epsilon", sp.epsilon);
        s.num("lambda0", sp.lambda0);
        std::string zc = to_string(sp.zetaCase);
        s.text("zeta_case", zc);
        sp.zetaCase = zeta_case_from_string(zc);
        s.num("rho3_over_nu", sp.rho3OverNu);
        s.reject_unknown();
    }
    {
        Section s = section("grid");
        auto& g = cfg.grid;
        s.count("dim", g.dim, 1);
        s.count("tangential_points", g.tangentialPoints, 4);
        s.num("half_length", g.halfLength);
        s.count("normal_nodes", g.normalNodes, 8);
        s.num("truncation", g.truncation);
        s.num("map_length", g.mapLength);
        s.reject_unknown();
        if (g.dim > 2) throw ConfigError("[grid] dim must be 1 or 2");
        if (!(g.halfLength > 0) || g.truncation < 0 || g.mapLength < 0)
            throw ConfigError("[grid] lengths must be positive");
    }
    {
        Section s = section("solve");
        s.complex("lambda", cfg.solve.lambda);
        s.text("data", cfg.solve.data);
        s.num("amplitude", cfg.solve.amplitude);
        s.reject_unknown();
        if (cfg.solve.data != "gaussian" && cfg.solve.data != "zero")
            throw ConfigError("[solve] data must be gaussian or zero");
    }
    {
        Section s = section("scan");
        auto& c = cfg.scan;
        s.count("samples", c.samples, 1);
        s.count("validation_samples", c.validationSamples, 1);
        s.count("class_samples", c.classSamples, 1);
        s.num("lambda_min_factor", c.lambdaMinFactor);
        s.num("lambda_max_factor", c.lambdaMaxFactor);
        s.num("xi_min", c.xiMin);
        s.num("xi_max", c.xiMax);
        s.reject_unknown();
        if (!(c.lambdaMinFactor > 0 && c.lambdaMaxFactor > c.lambdaMinFactor && c.xiMin > 0 && c.xiMax > c.xiMin))
            throw ConfigError("[scan] ranges must be positive and increasing");
    }
    {
        Section s = section("rbound");
        auto& r = cfg.rbound;
        s.count("operators", r.operators, 1);
        s.count("test_vectors", r.testVectors, 1);
        s.count("trials", r.trials, 100);
        s.num("q", r.q);
        s.num("power", r.power);
        s.num("lambda_max_factor", r.lambdaMaxFactor);
        s.count("tangential_points", r.tangentialPoints, 4);
        s.count("normal_nodes", r.normalNodes, 8);
        s.reject_unknown();
        if (!(r.q > 1) || !(r.lambdaMaxFactor > 1)) throw ConfigError("[rbound] needs q > 1 and lambda_max_factor > 1");
    }
    {
        Section s = section("contour");
        auto& e = cfg.evolve;
        s.count("half_nodes", e.contour.halfNodes, 4);
        s.num("spectrum_angle", e.contour.spectrumAngle);
        s.list("times", e.times);
        s.list("xi", e.xi);
        s.count("normal_nodes", e.normalNodes, 8);
        s.num("truncation", e.truncation);
        s.num("gamma0", e.gamma0);
        s.flag("maximal_regularity", e.maximalRegularity);
        s.count("steps", e.steps, 4);
        s.num("horizon", e.horizon);
        s.reject_unknown();
        for (double t : e.times)
            if (!(t > 0)) throw ConfigError("[contour] times must be positive");
        if (!(e.truncation > 0) || !(e.horizon > 0) || e.gamma0 < 0)
            throw ConfigError("[contour] truncation and horizon must be positive, gamma0 non-negative");
    }
    {
        Section s = section("bent");
        auto& b = cfg.bent;
        s.num("amplitude", b.diffeo.amplitude);
        s.num("width", b.diffeo.width);
        s.complex("lambda", b.lambda);
        s.count("max_iter", b.neumann.maxIter, 1);
        s.num("tol", b.neumann.tol);
        s.count("probes", b.probes, 1);
        s.num("data_amplitude", b.dataAmplitude);
        s.reject_unknown();
    }
    cfg.evolve.contour.sector = cfg.sector;
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config '" + path + "'");
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

std::vector<std::string> required_sections(const std::string& command) {
    std::vector<std::string> s{"fluid", "sector"};
    if (command == "solve") s.insert(s.end(), {"grid", "solve"});
    else if (command == "verify-symbols" || command == "scan-nab") s.push_back("scan");
    else if (command == "rbound") s.push_back("rbound");
    else if (command == "evolve") s.push_back("contour");
    else if (command == "bent") s.insert(s.end(), {"grid", "bent"});
    else throw ConfigError("unknown command '" + command + "'");
    return s;
}

bool needs_seed(const std::string& command) {
    return command == "verify-symbols" || command == "scan-nab" || command == "rbound" || command == "bent";
}

std::map<std::string, double> default_tolerances(const std::string& command) {
    if (command == "solve") return {{"solve.residual", 1e-6}};
    if (command == "verify-symbols")
        return {{"symbols.identity", 1e-12}, {"symbols.m_branch", 1e-6}, {"symbols.refine_growth", 0.05}};
    if (command == "scan-nab") return {{"nab.lambda0_max", 100.0}, {"nab.c_min", 1e-6}};
    if (command == "rbound") return {{"rbound.singleton", 1e-12}};
    if (command == "evolve")
        return {{"evolve.contour", 1e-6}, {"evolve.semigroup", 1e-6}, {"evolve.scalar", 1e-8}};
    if (command == "bent") return {{"bent.residual", 1e-6}, {"bent.ratio", 0.5}};
    throw ConfigError("unknown command '" + command + "'");
}

void apply_override(std::map<std::string, double>& tol, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("tolerance override '" + assignment + "' is not KEY=VAL");
    const std::string key = trim(assignment.substr(0, eq));
    auto it = tol.find(key);
    if (it == tol.end()) throw ConfigError("unknown tolerance '" + key + "' for this command");
    it->second = to_double("--tol-override " + key, assignment.substr(eq + 1));
}

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class Canon {
public:
    void section(const std::string& s) { os_ << '[' << s << "]\n"; }
    void put(const std::string& k, double v) { os_ << k << '=' << g17(v) << '\n'; }
    void put(const std::string& k, cplx v) { os_ << k << '=' << g17(v.real()) << ',' << g17(v.imag()) << '\n'; }
    void put(const std::string& k, const std::string& v) { os_ << k << '=' << v << '\n'; }
    void put(const std::string& k, const std::vector<double>& v) {
        os_ << k << '=';
        for (double x : v) os_ << g17(x) << ',';
        os_ << '\n';
    }
    std::string str() const { return os_.str(); }

private:
    std::ostringstream os_;
};

}  // namespace

std::string canonical_text(const RunConfig& cfg, const std::string& command,
                           const std::map<std::string, double>& tolerances) {
    Canon c;
    c.put("command", command);
    c.put("seed", cfg.seed ? std::to_string(*cfg.seed) : std::string("none"));
    for (const auto& sec : required_sections(command)) {
        c.section(sec);
        if (sec == "fluid") {
            const auto& f = cfg.fluid;
            c.put("mu", f.mu); c.put("nu", f.nu); c.put("sigma", f.sigma); c.put("m", f.m);
            c.put("gamma1", f.gamma1); c.put("gamma3", f.gamma3); c.put("zeta", f.zeta); c.put("zeta0", f.zeta0);
            c.put("rho1", f.rho1); c.put("rho2", f.rho2); c.put("rho3", f.rho3);
        } else if (sec == "sector") {
            const auto& s = cfg.sector;
            c.put("epsilon", s.epsilon); c.put("lambda0", s.lambda0);
            c.put("zeta_case", std::string(to_string(s.zetaCase))); c.put("rho3_over_nu", s.rho3OverNu);
        } else if (sec == "grid") {
            const auto& g = cfg.grid;
            c.put("dim", g.dim); c.put("tangential_points", static_cast<double>(g.tangentialPoints));
            c.put("half_length", g.halfLength); c.put("normal_nodes", static_cast<double>(g.normalNodes));
            c.put("truncation", g.truncation); c.put("map_length", g.mapLength);
        } else if (sec == "solve") {
            c.put("lambda", cfg.solve.lambda); c.put("data", cfg.solve.data); c.put("amplitude", cfg.solve.amplitude);
        } else if (sec == "scan") {
            const auto& s = cfg.scan;
            c.put("samples", static_cast<double>(s.samples));
            c.put("validation_samples", static_cast<double>(s.validationSamples));
            c.put("class_samples", static_cast<double>(s.classSamples));
            c.put("lambda_min_factor", s.lambdaMinFactor); c.put("lambda_max_factor", s.lambdaMaxFactor);
            c.put("xi_min", s.xiMin); c.put("xi_max", s.xiMax);
        } else if (sec == "rbound") {
            const auto& r = cfg.rbound;
            c.put("operators", static_cast<double>(r.operators)); c.put("test_vectors", static_cast<double>(r.testVectors));
            c.put("trials", static_cast<double>(r.trials)); c.put("q", r.q); c.put("power", r.power);
            c.put("lambda_max_factor", r.lambdaMaxFactor);
            c.put("tangential_points", static_cast<double>(r.tangentialPoints));
            c.put("normal_nodes", static_cast<double>(r.normalNodes));
        } else if (sec == "contour") {
            const auto& e = cfg.evolve;
            c.put("half_nodes", e.contour.halfNodes); c.put("spectrum_angle", e.contour.spectrumAngle);
            c.put("times", e.times); c.put("xi", e.xi); c.put("normal_nodes", static_cast<double>(e.normalNodes));
            c.put("truncation", e.truncation); c.put("gamma0", e.gamma0);
            c.put("maximal_regularity", std::string(e.maximalRegularity ? "true" : "false"));
            c.put("steps", static_cast<double>(e.steps)); c.put("horizon", e.horizon);
        } else if (sec == "bent") {
            const auto& b = cfg.bent;
            c.put("amplitude", b.diffeo.amplitude); c.put("width", b.diffeo.width); c.put("lambda", b.lambda);
            c.put("max_iter", b.neumann.maxIter); c.put("tol", b.neumann.tol); c.put("probes", b.probes);
            c.put("data_amplitude", b.dataAmplitude);
        }
    }
    c.section("tolerances");
    for (const auto& [k, v] : tolerances) c.put(k, v);
    return c.str();
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace fslab::cli
