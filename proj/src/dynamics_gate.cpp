#include <cmath>
#include <complex>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "bitrack/dynamics.hpp"

namespace bitrack {

namespace {

std::string num(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

GateCondition cond(const std::string& name, const std::string& detail, bool holds) {
    return {name, detail, holds};
}

GateCondition ineq(const std::string& name, const std::string& lhs_label, double lhs,
                   const std::string& op, const std::string& rhs_label, double rhs) {
    bool holds = false;
    if (op == "<") holds = lhs < rhs;
    else if (op == "<=") holds = lhs <= rhs;
    else if (op == ">") holds = lhs > rhs;
    else if (op == ">=") holds = lhs >= rhs;
    std::string detail = lhs_label + " = " + num(lhs) + " " + op + " " + rhs_label + " = " + num(rhs);
    return cond(name, detail, holds);
}

void structural(const SignedDigraph& g, std::vector<GateCondition>* out) {
    auto bal = gauge_partition(g);
    out->push_back(cond("C1-structural-balance",
                        bal.balanced() ? "gauge partition exists" : "witness cycle with negative sign product",
                        bal.balanced()));
    auto reach = leader_reaches_all(g);
    out->push_back(cond("C2-leader-reaches-all",
                        reach.holds ? "P = " + std::to_string(reach.eccentricity)
                                    : std::to_string(reach.unreachable.size()) + " follower(s) unreachable",
                        reach.holds));
}

// min positive entry of Phi* = (1 + tau/beta) I - beta tau H(graph)
double phi_star_min_entry(const SignedDigraph& g, double tau, double beta) {
    Matrix phi = -beta * tau * g.interaction_matrix();
    phi.diagonal().array() += 1.0 + tau / beta;
    return min_positive_entry(phi);
}

// Eigenvalues of H = D + B - |A|, deduplicated within tolerance.
std::vector<std::complex<double>> interaction_eigenvalues(const SignedDigraph& g) {
    Eigen::EigenSolver<Matrix> solver(g.interaction_matrix(), false);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("gate: eigensolver did not converge");
    std::vector<std::complex<double>> out;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        std::complex<double> mu = solver.eigenvalues()(i);
        bool dup = false;
        for (const auto& seen : out)
            if (std::abs(mu - seen) < 1e-9) { dup = true; break; }
        if (!dup) out.push_back(mu);
    }
    return out;
}

// Shared structure of (9.4) / (10.3) / (11.6): the active-leader synchronous
// gate with exponent P.
void active_leader_sync_gate(const SignedDigraph& g, const GainParameters& gp, int P,
                             const std::string& eq, std::vector<GateCondition>* out) {
    auto consts = graph_constants(g);
    double tau = gp.tau, beta = gp.beta, alpha = gp.alpha;
    if (!consts.b_m) {
        out->push_back(cond(eq, "b_m absent: no leader edge exists", false));
        return;
    }
    double bm = *consts.b_m;
    out->push_back(ineq(eq + "-lower-a", "sqrt((1+alpha)/b_m)", std::sqrt((1.0 + alpha) / bm),
                        "<", "beta", beta));
    out->push_back(ineq(eq + "-upper", "beta", beta, "<=", "1/(tau d_M)", 1.0 / (tau * consts.d_M)));
    double g_rs = 1.0 + tau / beta + alpha * tau / beta;
    if (P < 2) {
        out->push_back(cond(eq + "-lower-b", "P < 2: exponent P/(P-1) undefined", false));
        return;
    }
    out->push_back(ineq("alpha-condition", "alpha", alpha, ">", "g^(P-1)", std::pow(g_rs, P - 1)));
    double phi = phi_star_min_entry(g, tau, beta);
    double rhs = (std::pow(alpha, static_cast<double>(P) / (P - 1)) - 1.0) /
                 (tau * bm * std::pow(phi, P - 1));
    out->push_back(ineq(eq + "-lower-b", "(alpha^(P/(P-1))-1)/(tau b_m phi^(P-1))", rhs, "<",
                        "beta", beta));
}

}  // namespace

GateReport gate(const ScenarioSpec& spec) {
    spec.validate();
    ScenarioContext ctx = prepare(spec);
    const GainParameters& gp = spec.gains;
    GateReport rep;
    rep.kind = spec.kind;
    rep.notes = "sufficient condition only - failure does not preclude convergence";
    auto& cs = rep.conditions;

    const int P = ctx.gate_P;
    const int Ph = P * spec.h;

    switch (spec.kind) {
        case ScenarioKind::FirstOrderAsync: {
            structural(spec.graph, &cs);
            cs.push_back(ineq("eq-3.7", "psi", gp.psi, "<", "1/(tau d_M)",
                              1.0 / (gp.tau * ctx.constants.d_M)));
            break;
        }
        case ScenarioKind::SecondOrderStaticAsync:
        case ScenarioKind::SecondOrderDelay: {
            structural(spec.graph, &cs);
            cs.push_back(ineq("eq-4.7-lower", "2 sqrt(d_M)", 2.0 * std::sqrt(ctx.constants.d_M),
                              "<=", "gamma", gp.gamma));
            cs.push_back(ineq("eq-4.7-upper", "gamma", gp.gamma, "<", "2/tau", 2.0 / gp.tau));
            break;
        }
        case ScenarioKind::SecondOrderActiveAsync: {
            structural(spec.graph, &cs);
            if (!ctx.constants.b_m) {
                cs.push_back(cond("eq-5.7", "b_m absent: no leader edge exists", false));
                break;
            }
            double bm = *ctx.constants.b_m;
            cs.push_back(ineq("eq-5.7-lower", "sqrt((1+alpha)/b_m)",
                              std::sqrt((1.0 + gp.alpha) / bm), "<", "beta", gp.beta));
            cs.push_back(ineq("eq-5.7-upper", "beta", gp.beta, "<=", "1/(tau d_M)",
                              1.0 / (gp.tau * ctx.constants.d_M)));
            double g_rs = 1.0 + gp.tau / gp.beta + gp.alpha * gp.tau / gp.beta;
            if (Ph < 2) {
                cs.push_back(cond("eq-5.17", "Ph < 2: exponent Ph/(Ph-1) undefined", false));
                break;
            }
            cs.push_back(ineq("lemma-5.4-alpha", "alpha", gp.alpha, ">", "g^(Ph-1)",
                              std::pow(g_rs, Ph - 1)));
            double phi = phi_star_min_entry(spec.graph, gp.tau, gp.beta);
            double rhs = (std::pow(gp.alpha, static_cast<double>(Ph) / (Ph - 1)) - 1.0) /
                         (gp.tau * bm * std::pow(phi, Ph - 1));
            cs.push_back(ineq("eq-5.17", "(alpha^(Ph/(Ph-1))-1)/(tau b_m phi^(Ph-1))", rhs, "<",
                              "beta", gp.beta));
            break;
        }
        case ScenarioKind::GeneralLinearAsync: {
            structural(spec.graph, &cs);
            Eigen::ColPivHouseholderQR<Matrix> qr(spec.B);
            qr.setThreshold(1e-10);
            cs.push_back(cond("B-full-row-rank",
                              "rank(B) = " + std::to_string(qr.rank()) + " of " +
                                  std::to_string(spec.B.rows()),
                              qr.rank() == spec.B.rows()));
            cs.push_back(ineq("eq-6.4", "psi*", gp.psi_star, "<", "1/d_M",
                              1.0 / ctx.constants.d_M));
            Matrix Q = build_general_linear(spec.graph, std::vector<bool>(spec.graph.n, true), gp);
            Vector sums = row_sums(Q);
            double zeta = -1.0;
            for (int i = 0; i < spec.graph.n; ++i)
                if (sums(i) < 1.0 - kTol) zeta = std::max(zeta, sums(i));
            Matrix off = Q;
            off.diagonal().setZero();
            double kappa = min_positive_entry(off);
            if (zeta < 0.0 || kappa != kappa) {
                cs.push_back(cond("eq-6.5", "zeta or kappa undefined", false));
                break;
            }
            double rhs = 1.0 / std::pow(1.0 - (1.0 - zeta) * std::pow(kappa, Ph - 1),
                                        1.0 / Ph);
            cs.push_back(ineq("eq-6.5", "rho(A)", spectral_radius(spec.A), "<",
                              "(1-(1-zeta) kappa^(Ph-1))^(-1/Ph)", rhs));
            break;
        }
        case ScenarioKind::SwitchStatic:
        case ScenarioKind::SwitchActive: {
            // C3: every graph balanced, with one shared partition.
            auto bal = gauge_partition(ctx.effective_graph);
            bool c3 = bal.balanced();
            if (c3)
                for (const auto& gk : spec.switching.graphs)
                    c3 = c3 && bal.partition->consistent_with(gk);
            cs.push_back(cond("C3-balanced-switching",
                              c3 ? "all graphs share a gauge partition"
                                 : "some graph breaks the common partition",
                              c3));
            bool c4 = true;
            for (int j = 0; j < spec.switching.intervals_per_period(); ++j)
                c4 = c4 && leader_reaches_all(union_graph(spec.switching, j)).holds;
            cs.push_back(cond("C4-union-reachability",
                              c4 ? "leader reaches all followers in every interval union"
                                 : "some interval union leaves a follower unreachable",
                              c4));
            double rho_up = 0.0, rho_lo = std::numeric_limits<double>::infinity();
            for (const auto& gk : spec.switching.graphs) {
                auto c = graph_constants(gk);
                if (c.rho_upper > 0.0) rho_up = std::max(rho_up, c.rho_upper);
                if (c.rho_lower > 0.0) rho_lo = std::min(rho_lo, c.rho_lower);
            }
            const int n = spec.switching.graphs.front().n;
            if (spec.kind == ScenarioKind::SwitchStatic) {
                cs.push_back(ineq("eq-8.3-lower", "2 sqrt(n rho_upper)",
                                  2.0 * std::sqrt(n * rho_up), "<=", "gamma", gp.gamma));
                cs.push_back(ineq("eq-8.3-upper", "gamma", gp.gamma, "<", "2/tau", 2.0 / gp.tau));
            } else {
                cs.push_back(ineq("eq-8.19-lower", "sqrt((1+alpha)/rho_lower)",
                                  std::sqrt((1.0 + gp.alpha) / rho_lo), "<", "beta", gp.beta));
                cs.push_back(ineq("eq-8.19-upper", "beta", gp.beta, "<", "1/(tau n rho_upper)",
                                  1.0 / (gp.tau * n * rho_up)));
                int nvs = n * spec.switching.varsigma();
                double g_rs = 1.0 + gp.tau / gp.beta + gp.alpha * gp.tau / gp.beta;
                if (nvs < 2) {
                    cs.push_back(cond("eq-8.20", "n varsigma < 2: exponents undefined", false));
                    break;
                }
                cs.push_back(ineq("eq-8.20a", "tau/beta", gp.tau / gp.beta, "<",
                                  "(alpha^(1/(n vs - 1))-1)/(1+alpha)",
                                  (std::pow(gp.alpha, 1.0 / (nvs - 1)) - 1.0) / (1.0 + gp.alpha)));
                cs.push_back(ineq("alpha-condition", "alpha", gp.alpha, ">", "g^(n vs - 1)",
                                  std::pow(g_rs, nvs - 1)));
                double varpi = std::min(gp.beta * gp.tau * rho_lo,
                                        1.0 + gp.tau / gp.beta - gp.beta * gp.tau * n * rho_up);
                cs.push_back(ineq("eq-8.20b", "g^(n vs) - beta tau rho_lower varpi^(n vs - 1)",
                                  std::pow(g_rs, nvs) -
                                      gp.beta * gp.tau * rho_lo * std::pow(varpi, nvs - 1),
                                  "<", "1", 1.0));
            }
            break;
        }
        case ScenarioKind::PacketLoss: {
            structural(spec.graph, &cs);
            active_leader_sync_gate(spec.graph, gp, P, "eq-9.4", &cs);
            cs.push_back(ineq("theta-positive", "theta_bar", spec.theta_bar, ">", "0", 0.0));
            break;
        }
        case ScenarioKind::RandomNetwork: {
            structural(ctx.effective_graph, &cs);
            active_leader_sync_gate(ctx.effective_graph, gp, P, "eq-10.3", &cs);
            break;
        }
        case ScenarioKind::DisturbStatic: {
            structural(ctx.effective_graph, &cs);
            auto c = graph_constants(ctx.effective_graph);
            cs.push_back(ineq("eq-11.3-lower", "2 sqrt(d~_M)", 2.0 * std::sqrt(c.d_M), "<=",
                              "gamma", gp.gamma));
            cs.push_back(ineq("eq-11.3-upper", "gamma", gp.gamma, "<", "2/tau", 2.0 / gp.tau));
            break;
        }
        case ScenarioKind::DisturbActive: {
            structural(ctx.effective_graph, &cs);
            active_leader_sync_gate(ctx.effective_graph, gp, P, "eq-11.6", &cs);
            break;
        }
        case ScenarioKind::Noise: {
            structural(spec.graph, &cs);
            cs.push_back(ineq("beta-gt-tau", "beta", gp.beta, ">", "tau", gp.tau));
            int idx = 0;
            for (const auto& mu : interaction_eigenvalues(spec.graph)) {
                double re = mu.real(), im = mu.imag(), mod = std::abs(mu);
                std::string tag = "eq-12.3[mu_" + std::to_string(++idx) + "]";
                if (std::abs(im) < 1e-9) {
                    cs.push_back(ineq(tag, "4 Re(mu) + tau^2 |mu| - 2 beta tau |mu|",
                                      4.0 * re + gp.tau * gp.tau * mod -
                                          2.0 * gp.beta * gp.tau * mod,
                                      ">", "0", 0.0));
                } else {
                    double denom = 4.0 * re - gp.tau * mod * (2.0 * gp.beta - gp.tau);
                    bool ok = denom > 0.0 &&
                              (gp.beta - gp.tau) * (gp.beta - gp.tau) > 4.0 * std::abs(im) / denom;
                    cs.push_back(cond(tag,
                                      "(beta-tau)^2 = " + num((gp.beta - gp.tau) * (gp.beta - gp.tau)) +
                                          " > 4|Im(mu)|/(4Re(mu)-tau|mu|(2beta-tau)) = " +
                                          (denom > 0.0 ? num(4.0 * std::abs(im) / denom)
                                                       : std::string("undefined (denominator <= 0)")),
                                      ok));
                }
            }
            break;
        }
        case ScenarioKind::UnmeasurableLeader: {
            structural(spec.graph, &cs);
            int idx = 0;
            for (const auto& mu : interaction_eigenvalues(spec.graph)) {
                double re = mu.real(), im = mu.imag(), mod = std::abs(mu);
                std::string tag = "eq-13.6[mu_" + std::to_string(++idx) + "]";
                if (std::abs(im) < 1e-9) {
                    bool ok = gp.phi1 < 2.0 * re / (gp.tau * mod * mod) && gp.phi2 < 2.0 / gp.tau;
                    cs.push_back(cond(tag,
                                      "phi1 = " + num(gp.phi1) + " < 2Re(mu)/(tau|mu|^2) = " +
                                          num(2.0 * re / (gp.tau * mod * mod)) + " and phi2 = " +
                                          num(gp.phi2) + " < 2/tau = " + num(2.0 / gp.tau),
                                      ok));
                } else {
                    double margin = 2.0 * re - gp.phi1 * gp.tau * mod * mod;
                    bool ok = gp.phi1 < 2.0 * re / (mod * mod) && margin > 0.0;
                    std::string rhs = "undefined (2Re(mu) - phi1 tau |mu|^2 <= 0)";
                    if (ok) {
                        double inner = 8.0 * gp.phi2 / (gp.tau * gp.tau * gp.phi1 * margin);
                        double bound = 2.0 / gp.tau - std::sqrt(inner);
                        rhs = num(bound);
                        ok = gp.phi2 < bound;
                    }
                    cs.push_back(cond(tag,
                                      "phi1 = " + num(gp.phi1) + " < 2Re(mu)/|mu|^2 = " +
                                          num(2.0 * re / (mod * mod)) + " and phi2 = " +
                                          num(gp.phi2) + " < 2/tau - sqrt(8 phi2/(tau^2 phi1 (2Re(mu)-phi1 tau |mu|^2))) = " + rhs,
                                      ok));
                }
            }
            break;
        }
    }

    rep.overall = true;
    for (const auto& c : rep.conditions) rep.overall = rep.overall && c.holds;
    return rep;
}

}  // namespace bitrack
