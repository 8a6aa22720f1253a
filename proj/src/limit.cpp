#include "erl/limit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "erl/common.hpp"

namespace erl {

LimitSolver::LimitSolver(const GridSpec& grid, LimitConfig cfg) : grid_(grid), cfg_(cfg) {
    require(cfg_.cfl > 0.0 && cfg_.cfl < 1.0, "limit: CFL must lie in (0,1)");
    require(cfg_.sigma >= 0.0, "limit: sigma must be nonnegative");
    if (cfg_.sigma != 0.0) {
        auto rp = RieszParams::make(cfg_.alpha, grid_.dim);
        require(rp.gradient_admissible() && grid_.boundary == Boundary::periodic,
                "limit: nonlocal coupling needs a periodic grid and 1 < alpha < d");
        op_ = std::make_shared<const RieszOperator>(grid_, rp);
    }
}

AuxVelocities LimitSolver::aux_velocities(const ScalarField& rho, const ScalarField& n) const {
    require(rho.grid() == grid_ && n.grid() == grid_, "aux velocities: grid mismatch");
    require(min_value(rho) > 0.0 && min_value(n) > 0.0,
            "aux velocities: densities must be positive");
    ScalarField hp1(grid_), hp2(grid_);
    for (int i = 0; i < grid_.cells(); ++i) {
        hp1[i] = cfg_.law1.denergy(rho[i]);
        hp2[i] = cfg_.law2.denergy(n[i]);
    }
    VectorField gu = gradient_centered(hp1);
    VectorField gv = gradient_centered(hp2);
    AuxVelocities out;
    out.u = VectorField(grid_);
    out.v = VectorField(grid_);
    VectorField G(grid_);
    if (cfg_.sigma != 0.0) G = op_->conv_grad(rho - n);
    for (int a = 0; a < grid_.dim; ++a)
        for (int i = 0; i < grid_.cells(); ++i) {
            out.u.comp(a)[i] = -(gu.comp(a)[i] + cfg_.sigma * G.comp(a)[i]);
            out.v.comp(a)[i] = -(gv.comp(a)[i] - cfg_.sigma * G.comp(a)[i]);
        }
    if (grid_.boundary == Boundary::noflux) {
        const int last = grid_.n[0] - 1;
        for (int i : {0, last}) {
            out.boundary_normal_pre_zero =
                std::max({out.boundary_normal_pre_zero, std::abs(out.u.comp(0)[i]),
                          std::abs(out.v.comp(0)[i])});
            out.u.comp(0)[i] = 0.0;
            out.v.comp(0)[i] = 0.0;
        }
    }
    return out;
}

FaceData LimitSolver::face_data(const AdState& s) const {
    require(s.rho.grid() == grid_ && s.n.grid() == grid_, "limit: grid mismatch");
    ScalarField hp1(grid_), hp2(grid_);
    for (int i = 0; i < grid_.cells(); ++i) {
        hp1[i] = cfg_.law1.denergy(std::max(s.rho[i], 0.0));
        hp2[i] = cfg_.law2.denergy(std::max(s.n[i], 0.0));
    }
    VectorField G(grid_);
    if (cfg_.sigma != 0.0) G = op_->conv_grad(s.rho - s.n);

    const bool periodic = grid_.boundary == Boundary::periodic;
    FaceData fd;
    for (int a = 0; a < grid_.dim; ++a) {
        const int na = grid_.n[a];
        const int nperp = grid_.cells() / na;
        const int stride = (grid_.dim == 2 && a == 0) ? grid_.n[1] : 1;
        const double invh = 1.0 / grid_.h[a];
        const std::size_t sz = static_cast<std::size_t>(nperp * (na + 1));
        fd.vel1[a].assign(sz, 0.0);
        fd.flux1[a].assign(sz, 0.0);
        fd.vel2[a].assign(sz, 0.0);
        fd.flux2[a].assign(sz, 0.0);
        for (int p = 0; p < nperp; ++p) {
            const int base = (grid_.dim == 1) ? 0 : (a == 0 ? p : p * grid_.n[1]);
            const std::size_t fb = static_cast<std::size_t>(p * (na + 1));
            for (int f = 0; f <= na; ++f) {
                if (!periodic && (f == 0 || f == na)) continue;  // wall: zero flux
                if (periodic && f == na) {
                    fd.vel1[a][fb + static_cast<std::size_t>(na)] = fd.vel1[a][fb];
                    fd.flux1[a][fb + static_cast<std::size_t>(na)] = fd.flux1[a][fb];
                    fd.vel2[a][fb + static_cast<std::size_t>(na)] = fd.vel2[a][fb];
                    fd.flux2[a][fb + static_cast<std::size_t>(na)] = fd.flux2[a][fb];
                    continue;
                }
                const int jL = (f == 0) ? na - 1 : f - 1;  // f==0 only in the periodic case
                const int jR = f;
                const int iL = base + jL * stride;
                const int iR = base + jR * stride;
                const double gf =
                    cfg_.sigma != 0.0 ? 0.5 * (G.comp(a)[iL] + G.comp(a)[iR]) : 0.0;
                const double u1 = -((hp1[iR] - hp1[iL]) * invh + cfg_.sigma * gf);
                const double u2 = -((hp2[iR] - hp2[iL]) * invh - cfg_.sigma * gf);
                fd.vel1[a][fb + static_cast<std::size_t>(f)] = u1;
                fd.flux1[a][fb + static_cast<std::size_t>(f)] =
                    u1 >= 0.0 ? u1 * s.rho[iL] : u1 * s.rho[iR];
                fd.vel2[a][fb + static_cast<std::size_t>(f)] = u2;
                fd.flux2[a][fb + static_cast<std::size_t>(f)] =
                    u2 >= 0.0 ? u2 * s.n[iL] : u2 * s.n[iR];
            }
        }
    }
    return fd;
}

double LimitSolver::stable_dt_with(const AdState& s, const FaceData& fd) const {
    double maxp = 0.0;
    for (int i = 0; i < grid_.cells(); ++i)
        maxp = std::max({maxp, cfg_.law1.dpressure(std::max(s.rho[i], 0.0)),
                         cfg_.law2.dpressure(std::max(s.n[i], 0.0))});
    double denom = 0.0;
    for (int a = 0; a < grid_.dim; ++a) {
        double mv = 0.0;
        for (double x : fd.vel1[a]) mv = std::max(mv, std::abs(x));
        for (double x : fd.vel2[a]) mv = std::max(mv, std::abs(x));
        denom += 2.0 * maxp / (grid_.h[a] * grid_.h[a]) + mv / grid_.h[a];
    }
    return cfg_.cfl / std::max(denom, 1e-300);
}

double LimitSolver::stable_dt(const AdState& s) const {
    return stable_dt_with(s, face_data(s));
}

AdState LimitSolver::step_with(const AdState& s, const FaceData& fd, double dt) const {
    AdState out;
    out.t = s.t + dt;
    out.rho = s.rho;
    out.n = s.n;
    for (int a = 0; a < grid_.dim; ++a) {
        const int na = grid_.n[a];
        const int nperp = grid_.cells() / na;
        const int stride = (grid_.dim == 2 && a == 0) ? grid_.n[1] : 1;
        const double coef = dt / grid_.h[a];
        for (int p = 0; p < nperp; ++p) {
            const int base = (grid_.dim == 1) ? 0 : (a == 0 ? p : p * grid_.n[1]);
            const std::size_t fb = static_cast<std::size_t>(p * (na + 1));
            for (int k = 0; k < na; ++k) {
                const int idx = base + k * stride;
                const std::size_t f0 = fb + static_cast<std::size_t>(k);
                out.rho[idx] -= coef * (fd.flux1[a][f0 + 1] - fd.flux1[a][f0]);
                out.n[idx] -= coef * (fd.flux2[a][f0 + 1] - fd.flux2[a][f0]);
            }
        }
    }
    check_state(min_value(out.rho) >= 0.0 && min_value(out.n) >= 0.0,
                "limit: positivity loss (dt too large)");
    check_state(all_finite(out.rho.data()) && all_finite(out.n.data()),
                "limit: non-finite state");
    return out;
}

AdState LimitSolver::step(const AdState& s, double dt) const {
    require(dt > 0.0, "limit: dt must be positive");
    FaceData fd = face_data(s);
    check_state(dt <= stable_dt_with(s, fd) * (1.0 + 1e-9), "limit: dt violates stability bound");
    return step_with(s, fd, dt);
}

std::vector<AdState> LimitSolver::run(const AdState& initial,
                                      std::span<const double> times) const {
    require(!times.empty(), "limit run: no snapshot times");
    for (std::size_t k = 1; k < times.size(); ++k)
        require(times[k] > times[k - 1], "limit run: snapshot times must increase");
    require(times[0] >= initial.t, "limit run: first snapshot precedes the initial time");

    std::vector<AdState> traj;
    AdState cur = initial;
    for (double target : times) {
        while (cur.t < target * (1.0 - 1e-14) - 1e-300) {
            FaceData fd = face_data(cur);
            const double dt = std::min(stable_dt_with(cur, fd), target - cur.t);
            cur = step_with(cur, fd, dt);
            if (std::abs(cur.t - target) <= 1e-12 * std::max(1.0, std::abs(target)))
                cur.t = target;
        }
        traj.push_back(cur);
    }
    return traj;
}

ErrorTerms error_terms(const LimitSolver& solver, std::span<const AdState> traj,
                       std::size_t k) {
    require(traj.size() >= 3, "error terms: need at least three snapshots");
    require(k < traj.size(), "error terms: index out of range");
    const GridSpec& g = solver.grid();

    auto momentum = [&](std::size_t j, VectorField& mu, VectorField& mv, VectorField& u,
                        VectorField& v) {
        AuxVelocities aux = solver.aux_velocities(traj[j].rho, traj[j].n);
        u = aux.u;
        v = aux.v;
        mu = VectorField(g);
        mv = VectorField(g);
        for (int a = 0; a < g.dim; ++a)
            for (int i = 0; i < g.cells(); ++i) {
                mu.comp(a)[i] = traj[j].rho[i] * aux.u.comp(a)[i];
                mv.comp(a)[i] = traj[j].n[i] * aux.v.comp(a)[i];
            }
    };

    ErrorTerms out;
    out.one_sided = (k == 0 || k + 1 == traj.size());
    const std::size_t ka = (k == 0) ? 0 : k - 1;
    const std::size_t kb = (k + 1 == traj.size()) ? k : k + 1;
    VectorField mu_a, mv_a, mu_b, mv_b, u_a, v_a, u_b, v_b;
    momentum(ka, mu_a, mv_a, u_a, v_a);
    momentum(kb, mu_b, mv_b, u_b, v_b);
    VectorField mu_k, mv_k, u_k, v_k;
    momentum(k, mu_k, mv_k, u_k, v_k);

    const double dt = traj[kb].t - traj[ka].t;
    require(dt > 0.0, "error terms: degenerate snapshot spacing");

    // div(r u x u): component b of the divergence of T_ab = r u_a u_b
    auto transport_div = [&](const ScalarField& r, const VectorField& u) {
        VectorField div(g);
        for (int b = 0; b < g.dim; ++b) {
            VectorField col(g);
            for (int a = 0; a < g.dim; ++a)
                for (int i = 0; i < g.cells(); ++i)
                    col.comp(a)[i] = r[i] * u.comp(a)[i] * u.comp(b)[i];
            ScalarField d = divergence_centered(col);
            for (int i = 0; i < g.cells(); ++i) div.comp(b)[i] = d[i];
        }
        return div;
    };

    VectorField div1 = transport_div(traj[k].rho, u_k);
    VectorField div2 = transport_div(traj[k].n, v_k);
    out.e1 = VectorField(g);
    out.e2 = VectorField(g);
    for (int a = 0; a < g.dim; ++a)
        for (int i = 0; i < g.cells(); ++i) {
            out.e1.comp(a)[i] = (mu_b.comp(a)[i] - mu_a.comp(a)[i]) / dt + div1.comp(a)[i];
            out.e2.comp(a)[i] = (mv_b.comp(a)[i] - mv_a.comp(a)[i]) / dt + div2.comp(a)[i];
        }
    return out;
}

ReferenceSolution assemble_reference(const LimitSolver& solver, std::vector<AdState> fine_traj,
                                     const GridSpec& coarse, bool enforce_positive) {
    const GridSpec& fine = solver.grid();
    for (int a = 0; a < fine.dim; ++a)
        require(fine.n[a] >= coarse.n[a] && fine.n[a] % coarse.n[a] == 0,
                "reference: fine grid must refine the comparison grid");
    ReferenceSolution ref;
    ref.fine = fine;
    ref.coarse = coarse;
    ref.fine_traj = std::move(fine_traj);

    ref.delta_bar = std::numeric_limits<double>::infinity();
    ref.M_bar = 0.0;
    for (const AdState& s : ref.fine_traj) {
        ref.delta_bar = std::min({ref.delta_bar, min_value(s.rho), min_value(s.n)});
        ref.M_bar = std::max({ref.M_bar, max_value(s.rho), max_value(s.n)});
    }
    if (enforce_positive)
        check_state(ref.delta_bar > 0.0,
                    "reference: density lower bound lost; not admissible as a strong reference");

    const bool derived = ref.delta_bar > 0.0;
    const std::size_t K = ref.fine_traj.size();
    ref.snapshots.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
        const AdState& s = ref.fine_traj[k];
        if (!derived) {
            RefSnapshot& rs = ref.snapshots[k];
            rs.t = s.t;
            rs.rho = restrict_average(s.rho, coarse);
            rs.n = restrict_average(s.n, coarse);
            rs.u = VectorField(coarse);
            rs.v = VectorField(coarse);
            rs.e1 = VectorField(coarse);
            rs.e2 = VectorField(coarse);
            rs.div_u = ScalarField(coarse);
            rs.div_v = ScalarField(coarse);
            rs.derived_valid = false;
            continue;
        }
        AuxVelocities aux = solver.aux_velocities(s.rho, s.n);
        ref.boundary_normal_pre_zero =
            std::max(ref.boundary_normal_pre_zero, aux.boundary_normal_pre_zero);
        ErrorTerms et = error_terms(solver, ref.fine_traj, k);

        RefSnapshot& rs = ref.snapshots[k];
        rs.t = s.t;
        rs.rho = restrict_average(s.rho, coarse);
        rs.n = restrict_average(s.n, coarse);
        rs.u = restrict_average(aux.u, coarse);
        rs.v = restrict_average(aux.v, coarse);
        rs.e1 = restrict_average(et.e1, coarse);
        rs.e2 = restrict_average(et.e2, coarse);
        rs.one_sided_errors = et.one_sided;
        auto ju = jacobian_centered(aux.u);
        auto jv = jacobian_centered(aux.v);
        rs.jac_u.resize(ju.size());
        rs.jac_v.resize(jv.size());
        for (std::size_t e = 0; e < ju.size(); ++e) {
            rs.jac_u[e] = restrict_average(ju[e], coarse);
            rs.jac_v[e] = restrict_average(jv[e], coarse);
        }
        rs.div_u = ScalarField(coarse);
        rs.div_v = ScalarField(coarse);
        for (int a = 0; a < coarse.dim; ++a)
            for (int i = 0; i < coarse.cells(); ++i) {
                rs.div_u[i] += rs.jac_u[static_cast<std::size_t>(a * coarse.dim + a)][i];
                rs.div_v[i] += rs.jac_v[static_cast<std::size_t>(a * coarse.dim + a)][i];
            }
    }
    return ref;
}

ReferenceSolution build_reference(const GridSpec& fine, const LimitConfig& cfg,
                                  const ScalarField& rho0, const ScalarField& n0,
                                  std::span<const double> times, const GridSpec& coarse,
                                  bool enforce_positive) {
    LimitSolver solver(fine, cfg);
    auto traj = solver.run(AdState{rho0, n0, times.empty() ? 0.0 : times[0]}, times);
    return assemble_reference(solver, std::move(traj), coarse, enforce_positive);
}

}  // namespace erl
