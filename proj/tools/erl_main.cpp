#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "erl/config.hpp"
#include "erl/io.hpp"
#include "erl/verify.hpp"

namespace fs = std::filesystem;
using namespace erl;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write " + path.string());
    out << text;
}

fs::path prepare_outdir(std::string outdir) {
    if (outdir.empty()) {
        const char* env = std::getenv("ERL_OUTDIR");
        outdir = env != nullptr ? env : "out";
    }
    fs::path p(outdir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec || !fs::is_directory(p))
        throw std::invalid_argument("output directory not writable: " + p.string());
    return p;
}

ParsedConfig load_config(const std::string& path, const std::vector<std::string>& overrides,
                         std::uint64_t seed_override, bool has_seed) {
    ParsedConfig pc = parse_config(path.empty() ? std::string() : read_file(path), overrides);
    if (has_seed) pc.config.seed = seed_override;
    for (const std::string& w : pc.warnings) std::cerr << "warning: " << w << "\n";
    return pc;
}

std::string eps_tag(double eps) {
    std::ostringstream os;
    os << eps;
    std::string s = os.str();
    for (char& c : s)
        if (c == '.') c = 'p';
    return s;
}

int cmd_simulate(const ParsedConfig& pc, const fs::path& out) {
    const ExperimentConfig& cfg = pc.config;
    const GridSpec g = cfg.grid();
    EulerSolver solver(g, cfg.solver_config(cfg.eps));
    LimitSolver aux(g, cfg.limit_config());
    FluidState init = well_prepared_init(aux, cfg.rho0.realize(g), cfg.n0.realize(g));
    Trajectory traj = solver.run(init, cfg.snapshot_times());
    write_file(out / "energy.csv", energy_csv(traj));
    for (std::size_t k = 0; k < traj.size(); ++k) {
        std::ostringstream name;
        name << "fields_" << std::setw(4) << std::setfill('0') << k << ".csv";
        write_file(out / name.str(), fields_csv(traj[k].state));
    }
    std::cout << "simulate: " << traj.size() << " snapshots written to " << out << "\n";
    return 0;
}

int cmd_limit(const ParsedConfig& pc, const fs::path& out) {
    const ExperimentConfig& cfg = pc.config;
    const GridSpec fine = cfg.ref_grid();
    ReferenceSolution ref =
        build_reference(fine, cfg.limit_config(), cfg.rho0.realize(fine), cfg.n0.realize(fine),
                        cfg.snapshot_times(), cfg.grid(), /*enforce_positive=*/false);
    std::ostringstream summary;
    summary << "t,mass1,mass2,min_rho,max_rho,min_n,max_n\n";
    for (const AdState& s : ref.fine_traj) {
        summary << s.t << ',' << integrate(s.rho) << ',' << integrate(s.n) << ','
                << min_value(s.rho) << ',' << max_value(s.rho) << ',' << min_value(s.n) << ','
                << max_value(s.n) << '\n';
    }
    write_file(out / "limit_summary.csv", summary.str());
    for (std::size_t k = 0; k < ref.snapshots.size(); ++k) {
        std::ostringstream name;
        name << "limit_fields_" << std::setw(4) << std::setfill('0') << k << ".csv";
        write_file(out / name.str(), ref_fields_csv(ref.snapshots[k], ref.coarse));
    }
    std::cout << "limit: delta_bar=" << ref.delta_bar << " M_bar=" << ref.M_bar
              << ", outputs in " << out << "\n";
    return 0;
}

int cmd_sweep(const ParsedConfig& pc, const fs::path& out) {
    const ExperimentConfig& cfg = pc.config;
    SweepResult res = run_sweep(cfg, &std::cerr);
    write_file(out / "sweep_summary.csv", sweep_csv(res));
    for (const EpsRun& r : res.runs) {
        if (!r.ok) {
            std::cerr << "eps=" << r.eps << " failed: " << r.diagnostic << "\n";
            continue;
        }
        write_file(out / ("relent_eps" + eps_tag(r.eps) + ".csv"), relent_csv(r.series));
    }
    if (res.slope_valid)
        std::cout << "sweep: slope=" << res.fit.slope << " (raw " << res.fit_raw.slope
                  << "), floor=" << res.floor_estimate << ", monotone=" << res.monotone
                  << ", outputs in " << out << "\n";
    else
        std::cout << "sweep: insufficient points for rate; outputs in " << out << "\n";
    bool any_failed = false;
    for (const EpsRun& r : res.runs) any_failed = any_failed || !r.ok;
    return any_failed ? 1 : 0;
}

int cmd_verify(const std::string& suite, const ParsedConfig& pc) {
    const ExperimentConfig& cfg = pc.config;
    VerifyReport rep;
    if (suite == "kernel")
        rep = verify_kernel(cfg.seed);
    else if (suite == "energy")
        rep = verify_energy(cfg);
    else if (suite == "lemmas")
        rep = verify_lemmas(cfg, cfg.seed);
    else if (suite == "weakform")
        rep = verify_weakform(cfg);
    else if (suite == "inequality")
        rep = verify_inequality(cfg);
    else
        throw std::invalid_argument("unknown suite '" + suite +
                                    "' (kernel|energy|lemmas|weakform|inequality)");
    std::cout << "suite " << rep.suite << ":\n";
    for (const std::string& l : rep.lines) std::cout << "  " << l << "\n";
    std::cout << (rep.pass ? "PASS" : "FAIL") << " (" << rep.suite << ")\n";
    return rep.pass ? 0 : 1;
}

int cmd_report(const fs::path& out) {
    // psi(t) curves per eps
    std::vector<PlotSeries> psi_series;
    for (const auto& entry : fs::directory_iterator(out)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("relent_eps", 0) != 0 || entry.path().extension() != ".csv") continue;
        CsvTable t = read_csv(read_file(entry.path().string()));
        PlotSeries s;
        s.label = name.substr(7, name.size() - 11);
        for (const auto& row : t.rows)
            if (row.size() >= 2) {
                s.x.push_back(row[0]);
                s.y.push_back(row[1]);
            }
        psi_series.push_back(std::move(s));
    }
    std::sort(psi_series.begin(), psi_series.end(),
              [](const PlotSeries& a, const PlotSeries& b) { return a.label < b.label; });

    bool wrote = false;
    if (!psi_series.empty()) {
        write_file(out / "psi_vs_t.svg",
                   svg_line_plot(psi_series, "relative energy", "t", "psi", false, true));
        wrote = true;
    }
    const fs::path sweep_path = out / "sweep_summary.csv";
    if (fs::exists(sweep_path)) {
        CsvTable t = read_csv(read_file(sweep_path.string()));
        PlotSeries pts;
        pts.label = "sup_t psi";
        pts.points_only = true;
        for (const auto& row : t.rows)
            if (row.size() >= 3 && row[0] > 0.0 && row[2] > 0.0) {
                pts.x.push_back(row[0]);
                pts.y.push_back(row[2]);
            }
        if (pts.x.size() >= 2) {
            RateFit fit = fit_rate(pts.x, pts.y);
            PlotSeries line;
            std::ostringstream lab;
            lab << "fit slope " << fit.slope;
            line.label = lab.str();
            for (double e : {pts.x.front(), pts.x.back()}) {
                line.x.push_back(e);
                line.y.push_back(std::exp(fit.intercept + fit.slope * std::log(e)));
            }
            write_file(out / "rate_fit.svg",
                       svg_line_plot({pts, line}, "rate fit", "epsilon", "sup_t psi", true, true));
            wrote = true;
        }
    }
    if (!wrote) {
        std::cerr << "report: no recognizable CSV outputs in " << out << "\n";
        return 2;
    }
    std::cout << "report: plots written to " << out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-species Euler-Riesz relaxation laboratory"};
    app.require_subcommand(1);

    std::string config_path, outdir, suite;
    std::vector<std::string> overrides;
    std::uint64_t seed = 0;
    bool has_seed = false;

    auto add_common = [&](CLI::App* sub, bool with_out = true) {
        sub->add_option("-c,--config", config_path, "experiment config file (INI)");
        sub->add_option("--set", overrides, "override, section.key=value")->take_all();
        sub->add_option_function<std::uint64_t>(
            "--seed", [&](std::uint64_t s) { seed = s; has_seed = true; },
            "seed for property suites");
        if (with_out)
            sub->add_option("-o,--out", outdir, "output directory (default $ERL_OUTDIR or ./out)");
    };

    CLI::App* sim = app.add_subcommand("simulate", "run the relaxation solver, dump fields/energy");
    add_common(sim);
    CLI::App* lim = app.add_subcommand("limit", "run the aggregation-diffusion reference solver");
    add_common(lim);
    CLI::App* swp = app.add_subcommand("sweep", "run the eps-sweep stability experiment");
    add_common(swp);
    CLI::App* ver = app.add_subcommand("verify", "run a property suite");
    ver->add_option("suite", suite, "kernel|energy|lemmas|weakform|inequality")->required();
    add_common(ver, false);
    CLI::App* repcmd = app.add_subcommand("report", "render CSV outputs into SVG plots");
    repcmd->add_option("-o,--out", outdir, "directory holding the CSV outputs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) != 0 ? 2 : 0;
    }

    try {
        if (app.got_subcommand(sim))
            return cmd_simulate(load_config(config_path, overrides, seed, has_seed),
                                prepare_outdir(outdir));
        if (app.got_subcommand(lim))
            return cmd_limit(load_config(config_path, overrides, seed, has_seed),
                             prepare_outdir(outdir));
        if (app.got_subcommand(swp))
            return cmd_sweep(load_config(config_path, overrides, seed, has_seed),
                             prepare_outdir(outdir));
        if (app.got_subcommand(ver))
            return cmd_verify(suite, load_config(config_path, overrides, seed, has_seed));
        if (app.got_subcommand(repcmd)) return cmd_report(prepare_outdir(outdir));
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
