#include "erl/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include "erl/common.hpp"

namespace erl {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        require(pos == v.size(), "config: trailing characters in value for " + key);
        return x;
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("config: expected a number for " + key + ", got '" + v + "'");
    }
}

long long to_int(const std::string& key, const std::string& v) {
    const double x = to_double(key, v);
    require(std::rint(x) == x, "config: expected an integer for " + key);
    return static_cast<long long>(x);
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        require(!item.empty(), "config: empty list element in " + key);
        out.push_back(to_double(key, item));
    }
    require(!out.empty(), "config: empty list for " + key);
    return out;
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"grid.dim", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.dim = static_cast<int>(to_int(k, v));
         }},
        {"grid.nx", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.n[0] = static_cast<int>(to_int(k, v));
         }},
        {"grid.ny", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.n[1] = static_cast<int>(to_int(k, v));
         }},
        {"grid.x0", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.lo[0] = to_double(k, v);
         }},
        {"grid.x1", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.hi[0] = to_double(k, v);
         }},
        {"grid.y0", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.lo[1] = to_double(k, v);
         }},
        {"grid.y1", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.hi[1] = to_double(k, v);
         }},
        {"grid.boundary", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             if (v == "periodic")
                 c.boundary = Boundary::periodic;
             else if (v == "noflux")
                 c.boundary = Boundary::noflux;
             else
                 throw std::invalid_argument("config: " + k + " must be periodic or noflux");
         }},
        {"physics.gamma1", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.gamma1 = to_double(k, v);
         }},
        {"physics.gamma2", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.gamma2 = to_double(k, v);
         }},
        {"physics.alpha", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.alpha = to_double(k, v);
         }},
        {"physics.sigma", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.sigma = to_double(k, v);
         }},
        {"solver.cfl", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.cfl = to_double(k, v);
         }},
        {"solver.rho_min", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.rho_min = to_double(k, v);
         }},
        {"solver.t_end", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.t_end = to_double(k, v);
         }},
        {"solver.snapshots", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.snapshots = static_cast<int>(to_int(k, v));
         }},
        {"solver.eps", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.eps = to_double(k, v);
         }},
        {"sweep.eps_list", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.eps_list = to_list(k, v);
         }},
        {"sweep.seed", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.seed = static_cast<std::uint64_t>(to_int(k, v));
         }},
        {"reference.refine", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.ref_refine = static_cast<int>(to_int(k, v));
         }},
        {"reference.cfl", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.cfl_limit = to_double(k, v);
         }},
        {"init.rho_base", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.rho0.base = to_double(k, v);
         }},
        {"init.rho_amp", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.rho0.amp = to_double(k, v);
         }},
        {"init.rho_mode", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             auto l = to_list(k, v);
             require(l.size() <= 2, "config: " + k + " takes at most two entries");
             c.rho0.mode[0] = static_cast<int>(l[0]);
             if (l.size() > 1) c.rho0.mode[1] = static_cast<int>(l[1]);
         }},
        {"init.rho_shift", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             auto l = to_list(k, v);
             require(l.size() <= 2, "config: " + k + " takes at most two entries");
             c.rho0.shift[0] = l[0];
             if (l.size() > 1) c.rho0.shift[1] = l[1];
         }},
        {"init.n_base", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.n0.base = to_double(k, v);
         }},
        {"init.n_amp", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.n0.amp = to_double(k, v);
         }},
        {"init.n_mode", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             auto l = to_list(k, v);
             require(l.size() <= 2, "config: " + k + " takes at most two entries");
             c.n0.mode[0] = static_cast<int>(l[0]);
             if (l.size() > 1) c.n0.mode[1] = static_cast<int>(l[1]);
         }},
        {"init.n_shift", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             auto l = to_list(k, v);
             require(l.size() <= 2, "config: " + k + " takes at most two entries");
             c.n0.shift[0] = l[0];
             if (l.size() > 1) c.n0.shift[1] = l[1];
         }},
    };
    return table;
}

void apply_key(ExperimentConfig& c, const std::string& dotted, const std::string& value) {
    auto it = setters().find(dotted);
    require(it != setters().end(), "config: unknown key '" + dotted + "'");
    it->second(c, dotted, value);
}

void validate(const ExperimentConfig& c, std::vector<std::string>& warnings) {
    // structural/domain errors (throw)
    (void)c.grid();
    (void)c.ref_grid();
    require(c.gamma1 > 1.0 && c.gamma2 > 1.0, "config: adiabatic exponents must exceed 1");
    require(c.alpha > 0.0 && c.alpha < c.dim,
            "config: alpha must satisfy 0 < alpha < d (kernel domain)");
    require(c.sigma >= 0.0, "config: sigma must be nonnegative");
    if (c.sigma > 0.0)
        require(c.alpha > 1.0 && c.boundary == Boundary::periodic,
                "config: nonlocal coupling (sigma > 0) needs a periodic grid and 1 < alpha < d");
    require(c.cfl > 0.0 && c.cfl < 1.0 && c.cfl_limit > 0.0 && c.cfl_limit < 1.0,
            "config: CFL numbers must lie in (0,1)");
    require(c.rho_min > 0.0, "config: rho_min must be positive");
    require(c.t_end > 0.0, "config: t_end must be positive");
    require(c.snapshots >= 2, "config: need at least 2 snapshots");
    require(c.eps > 0.0, "config: eps must be positive");
    for (double e : c.eps_list) require(e > 0.0, "config: eps_list entries must be positive");
    require(c.rho0.base - std::abs(c.rho0.amp) > 0.0 && c.n0.base - std::abs(c.n0.amp) > 0.0,
            "config: initial profiles must stay strictly positive");

    // regime warnings (recorded, not fatal)
    std::string which;
    if (!ExperimentConfig(c).theorem_regime(&which)) {
        std::ostringstream os;
        os << "outside the stability-theorem exponent regime: gamma_min=" << c.gamma_min()
           << ", alpha=" << c.alpha << ", d=" << c.dim << " (" << which
           << "; case II threshold 2-(alpha-1)/d = " << 2.0 - (c.alpha - 1.0) / c.dim << ")";
        warnings.push_back(os.str());
    }
    if (!c.coupling_admissible()) {
        std::ostringstream os;
        os << "gamma_min=" << c.gamma_min() << " below the coupling admissibility threshold "
           << "2d/(d+alpha-1) = " << 2.0 * c.dim / (c.dim + c.alpha - 1.0);
        warnings.push_back(os.str());
    }
}

}  // namespace

ParsedConfig parse_config(const std::string& text, std::span<const std::string> overrides) {
    ParsedConfig out;
    ExperimentConfig& c = out.config;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            require(line.back() == ']', "config: malformed section header at line " +
                                            std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            require(!section.empty(), "config: empty section name at line " + std::to_string(lineno));
            continue;
        }
        const auto eq = line.find('=');
        require(eq != std::string::npos,
                "config: expected key = value at line " + std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        require(!key.empty() && !value.empty(),
                "config: empty key or value at line " + std::to_string(lineno));
        require(!section.empty(), "config: key '" + key + "' outside any section");
        apply_key(c, section + "." + key, value);
    }
    for (const std::string& ov : overrides) {
        const auto eq = ov.find('=');
        require(eq != std::string::npos, "config: override must be section.key=value: " + ov);
        apply_key(c, trim(ov.substr(0, eq)), trim(ov.substr(eq + 1)));
    }
    validate(c, out.warnings);
    return out;
}

std::string render_config(const ExperimentConfig& c) {
    std::ostringstream os;
    os << "[grid]\n";
    os << "dim = " << c.dim << "\n";
    os << "nx = " << c.n[0] << "\n";
    os << "ny = " << c.n[1] << "\n";
    os << "x0 = " << fmt(c.lo[0]) << "\n";
    os << "x1 = " << fmt(c.hi[0]) << "\n";
    os << "y0 = " << fmt(c.lo[1]) << "\n";
    os << "y1 = " << fmt(c.hi[1]) << "\n";
    os << "boundary = " << (c.boundary == Boundary::periodic ? "periodic" : "noflux") << "\n";
    os << "\n[physics]\n";
    os << "gamma1 = " << fmt(c.gamma1) << "\n";
    os << "gamma2 = " << fmt(c.gamma2) << "\n";
    os << "alpha = " << fmt(c.alpha) << "\n";
    os << "sigma = " << fmt(c.sigma) << "\n";
    os << "\n[solver]\n";
    os << "cfl = " << fmt(c.cfl) << "\n";
    os << "rho_min = " << fmt(c.rho_min) << "\n";
    os << "t_end = " << fmt(c.t_end) << "\n";
    os << "snapshots = " << c.snapshots << "\n";
    os << "eps = " << fmt(c.eps) << "\n";
    os << "\n[sweep]\n";
    os << "eps_list = ";
    for (std::size_t k = 0; k < c.eps_list.size(); ++k)
        os << (k ? "," : "") << fmt(c.eps_list[k]);
    os << "\n";
    os << "seed = " << c.seed << "\n";
    os << "\n[reference]\n";
    os << "refine = " << c.ref_refine << "\n";
    os << "cfl = " << fmt(c.cfl_limit) << "\n";
    os << "\n[init]\n";
    os << "rho_base = " << fmt(c.rho0.base) << "\n";
    os << "rho_amp = " << fmt(c.rho0.amp) << "\n";
    os << "rho_mode = " << c.rho0.mode[0] << "," << c.rho0.mode[1] << "\n";
    os << "rho_shift = " << fmt(c.rho0.shift[0]) << "," << fmt(c.rho0.shift[1]) << "\n";
    os << "n_base = " << fmt(c.n0.base) << "\n";
    os << "n_amp = " << fmt(c.n0.amp) << "\n";
    os << "n_mode = " << c.n0.mode[0] << "," << c.n0.mode[1] << "\n";
    os << "n_shift = " << fmt(c.n0.shift[0]) << "," << fmt(c.n0.shift[1]) << "\n";
    return os.str();
}

}  // namespace erl
