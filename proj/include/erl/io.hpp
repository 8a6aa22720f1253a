#pragma once

#include <span>
#include <string>
#include <vector>

#include "erl/euler.hpp"
#include "erl/harness.hpp"
#include "erl/limit.hpp"
#include "erl/relent.hpp"

namespace erl {

/// CSV emitters. Numbers are printed with %.17g so identical runs produce
/// byte-identical files.

// t,kinetic,internal1,internal2,interaction,total,dissipation,mass1,mass2
std::string energy_csv(const Trajectory& traj);

// t,psi,rel_kin,bregman,interaction,I1,I2,I3,I4,J,dissipation,envelope
std::string relent_csv(std::span<const RelEnergyRow> rows);

// epsilon,psi0,sup_psi,envelope_C,slope_contrib,regime_flag
std::string sweep_csv(const SweepResult& result);

// cell,x[,y],rho,mx[,my],n,wx[,wy]
std::string fields_csv(const FluidState& s);

// cell,x[,y],rho,n,ux[,uy],vx[,vy],e1x[,e1y],e2x[,e2y]
std::string ref_fields_csv(const RefSnapshot& s, const GridSpec& g);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};
CsvTable read_csv(const std::string& text);

/// Minimal static SVG line plots (polylines, no dependencies).
struct PlotSeries {
    std::string label;
    std::vector<double> x, y;
    bool points_only = false;
};
std::string svg_line_plot(const std::vector<PlotSeries>& series, const std::string& title,
                          const std::string& xlabel, const std::string& ylabel, bool logx,
                          bool logy);

}  // namespace erl
