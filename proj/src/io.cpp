#include "erl/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "erl/common.hpp"

namespace erl {

namespace {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

std::string energy_csv(const Trajectory& traj) {
    std::ostringstream os;
    os << "t,kinetic,internal1,internal2,interaction,total,dissipation,mass1,mass2\n";
    for (const Snapshot& s : traj) {
        const EnergyReport& e = s.energy;
        os << num(s.t) << ',' << num(e.kinetic) << ',' << num(e.internal1) << ','
           << num(e.internal2) << ',' << num(e.interaction) << ',' << num(e.total) << ','
           << num(e.dissipation) << ',' << num(e.mass1) << ',' << num(e.mass2) << '\n';
    }
    return os.str();
}

std::string relent_csv(std::span<const RelEnergyRow> rows) {
    std::ostringstream os;
    os << "t,psi,rel_kin,bregman,interaction,I1,I2,I3,I4,J,dissipation,envelope\n";
    for (const RelEnergyRow& r : rows) {
        os << num(r.t) << ',' << num(r.psi) << ',' << num(r.rel_kin) << ',' << num(r.bregman)
           << ',' << num(r.interaction) << ',' << num(r.I1) << ',' << num(r.I2) << ','
           << num(r.I3) << ',' << num(r.I4) << ',' << num(r.J) << ',' << num(r.cum_dissipation)
           << ',' << num(r.envelope) << '\n';
    }
    return os.str();
}

std::string sweep_csv(const SweepResult& result) {
    std::ostringstream os;
    os << "epsilon,psi0,sup_psi,envelope_C,slope_contrib,regime_flag\n";
    for (const EpsRun& r : result.runs) {
        os << num(r.eps) << ',' << num(r.psi0) << ',' << num(r.sup_psi) << ','
           << num(r.envelope_C) << ',';
        if (r.ok && r.adjusted > 0.0)
            os << num(std::log(r.adjusted));
        else
            os << "nan";
        os << ',' << (result.regime ? 1 : 0) << '\n';
    }
    return os.str();
}

std::string fields_csv(const FluidState& s) {
    const GridSpec& g = s.rho.grid();
    std::ostringstream os;
    os << (g.dim == 1 ? "cell,x,rho,mx,n,wx\n" : "cell,x,y,rho,mx,my,n,wx,wy\n");
    for (int i = 0; i < g.cells(); ++i) {
        const auto x = g.cell_center(i);
        os << i << ',' << num(x[0]);
        if (g.dim == 2) os << ',' << num(x[1]);
        os << ',' << num(s.rho[i]) << ',' << num(s.m.comp(0)[i]);
        if (g.dim == 2) os << ',' << num(s.m.comp(1)[i]);
        os << ',' << num(s.n[i]) << ',' << num(s.w.comp(0)[i]);
        if (g.dim == 2) os << ',' << num(s.w.comp(1)[i]);
        os << '\n';
    }
    return os.str();
}

std::string ref_fields_csv(const RefSnapshot& s, const GridSpec& g) {
    std::ostringstream os;
    os << (g.dim == 1 ? "cell,x,rho,n,ux,vx,e1x,e2x\n"
                      : "cell,x,y,rho,n,ux,uy,vx,vy,e1x,e1y,e2x,e2y\n");
    for (int i = 0; i < g.cells(); ++i) {
        const auto x = g.cell_center(i);
        os << i << ',' << num(x[0]);
        if (g.dim == 2) os << ',' << num(x[1]);
        os << ',' << num(s.rho[i]) << ',' << num(s.n[i]);
        for (int a = 0; a < g.dim; ++a) os << ',' << num(s.u.comp(a)[i]);
        for (int a = 0; a < g.dim; ++a) os << ',' << num(s.v.comp(a)[i]);
        for (int a = 0; a < g.dim; ++a) os << ',' << num(s.e1.comp(a)[i]);
        for (int a = 0; a < g.dim; ++a) os << ',' << num(s.e2.comp(a)[i]);
        os << '\n';
    }
    return os.str();
}

CsvTable read_csv(const std::string& text) {
    CsvTable t;
    std::istringstream is(text);
    std::string line;
    bool first = true;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (first) {
            t.header = cells;
            first = false;
            continue;
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (const std::string& c : cells) {
            try {
                row.push_back(std::stod(c));
            } catch (...) {
                row.push_back(std::numeric_limits<double>::quiet_NaN());
            }
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

namespace {

constexpr int W = 760, H = 480, ML = 70, MR = 160, MT = 40, MB = 55;

double map_coord(double v, double lo, double hi, double plo, double phi) {
    if (hi <= lo) return 0.5 * (plo + phi);
    return plo + (v - lo) / (hi - lo) * (phi - plo);
}

const char* palette(std::size_t k) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    return colors[k % 8];
}

}  // namespace

std::string svg_line_plot(const std::vector<PlotSeries>& series, const std::string& title,
                          const std::string& xlabel, const std::string& ylabel, bool logx,
                          bool logy) {
    require(!series.empty(), "svg: no series");
    auto tx = [logx](double v) { return logx ? std::log10(v) : v; };
    auto ty = [logy](double v) { return logy ? std::log10(v) : v; };

    double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
    double ylo = xlo, yhi = -xlo;
    for (const PlotSeries& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if ((logx && s.x[i] <= 0.0) || (logy && s.y[i] <= 0.0)) continue;
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            xlo = std::min(xlo, tx(s.x[i]));
            xhi = std::max(xhi, tx(s.x[i]));
            ylo = std::min(ylo, ty(s.y[i]));
            yhi = std::max(yhi, ty(s.y[i]));
        }
    require(std::isfinite(xlo) && std::isfinite(ylo), "svg: no plottable points");
    if (xhi <= xlo) xhi = xlo + 1.0;
    if (yhi <= ylo) yhi = ylo + 1.0;

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
    os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
       << title << "</text>\n";
    // axes box
    os << "<rect x=\"" << ML << "\" y=\"" << MT << "\" width=\"" << W - ML - MR
       << "\" height=\"" << H - MT - MB << "\" fill=\"none\" stroke=\"black\"/>\n";

    // ticks: 5 per axis
    for (int k = 0; k <= 4; ++k) {
        const double fx = xlo + (xhi - xlo) * k / 4.0;
        const double fy = ylo + (yhi - ylo) * k / 4.0;
        const double px = map_coord(fx, xlo, xhi, ML, W - MR);
        const double py = map_coord(fy, ylo, yhi, H - MB, MT);
        os << "<line x1=\"" << px << "\" y1=\"" << H - MB << "\" x2=\"" << px << "\" y2=\""
           << H - MB + 5 << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << px << "\" y=\"" << H - MB + 20
           << "\" text-anchor=\"middle\" font-size=\"11\">"
           << num(logx ? std::pow(10.0, fx) : fx) << "</text>\n";
        os << "<line x1=\"" << ML - 5 << "\" y1=\"" << py << "\" x2=\"" << ML << "\" y2=\""
           << py << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << ML - 8 << "\" y=\"" << py + 4
           << "\" text-anchor=\"end\" font-size=\"11\">"
           << num(logy ? std::pow(10.0, fy) : fy) << "</text>\n";
    }
    os << "<text x=\"" << (ML + W - MR) / 2 << "\" y=\"" << H - 12
       << "\" text-anchor=\"middle\" font-size=\"13\">" << xlabel << "</text>\n";
    os << "<text x=\"18\" y=\"" << (MT + H - MB) / 2
       << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
       << (MT + H - MB) / 2 << ")\">" << ylabel << "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const PlotSeries& s = series[si];
        std::ostringstream pts;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if ((logx && s.x[i] <= 0.0) || (logy && s.y[i] <= 0.0)) continue;
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            const double px = map_coord(tx(s.x[i]), xlo, xhi, ML, W - MR);
            const double py = map_coord(ty(s.y[i]), ylo, yhi, H - MB, MT);
            if (s.points_only) {
                os << "<circle cx=\"" << px << "\" cy=\"" << py << "\" r=\"4\" fill=\""
                   << palette(si) << "\"/>\n";
            } else {
                pts << px << ',' << py << ' ';
            }
        }
        if (!s.points_only)
            os << "<polyline points=\"" << pts.str() << "\" fill=\"none\" stroke=\""
               << palette(si) << "\" stroke-width=\"1.6\"/>\n";
        const double ly = MT + 18.0 * (si + 1);
        os << "<line x1=\"" << W - MR + 10 << "\" y1=\"" << ly - 4 << "\" x2=\""
           << W - MR + 34 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << palette(si)
           << "\" stroke-width=\"3\"/>\n";
        os << "<text x=\"" << W - MR + 40 << "\" y=\"" << ly
           << "\" font-size=\"12\">" << s.label << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace erl
