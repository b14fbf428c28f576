#include "retro/app/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "retro/channel.hpp"
#include "retro/retrodiction.hpp"
#include "retro/sim.hpp"

namespace retro::app {

using io::Json;
using linalg::Matrix;

namespace {

double det2(const Matrix& m) { return (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)).real(); }

Json instance_inputs(const ud::UdInstance& inst) {
    return {{"eta1", inst.eta1()},
            {"eta2", inst.eta2()},
            {"alpha", inst.alpha()},
            {"overlap", inst.overlap()},
            {"theta", inst.theta()}};
}

Json matrices(const std::vector<Matrix>& ms) {
    Json out = Json::array();
    for (const auto& m : ms) out.push_back(io::to_json(m));
    return out;
}

}  // namespace

Json to_json(const Check& c) {
    return {{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"passed", c.passed}};
}

Json to_json(const CheckList& checks) {
    Json out = Json::array();
    for (const auto& c : checks.checks()) out.push_back(to_json(c));
    return out;
}

Json make_report(const std::string& command, Json inputs, Json derived, const CheckList& checks) {
    return {{"tool", kToolName},
            {"version", kToolVersion},
            {"command", command},
            {"inputs", std::move(inputs)},
            {"derived", std::move(derived)},
            {"checks", to_json(checks)},
            {"passed", checks.all_passed()}};
}

bool report_passed(const Json& report) { return report.value("passed", false); }

std::string render_text(const Json& report) {
    std::ostringstream out;
    out << report.value("tool", "") << ' ' << report.value("version", "") << ' '
        << report.value("command", "") << '\n';
    for (const char* section : {"inputs", "derived"}) {
        if (!report.contains(section)) continue;
        out << section << ":\n";
        for (const auto& [key, value] : report[section].items()) out << "  " << key << ": " << value.dump() << '\n';
    }
    out << "checks:\n";
    for (const auto& c : report.value("checks", Json::array())) {
        out << "  [" << (c.value("passed", false) ? "PASS" : "FAIL") << "] " << c.value("name", "")
            << "  value=" << c["value"].dump() << "  tol=" << c["tolerance"].dump() << '\n';
    }
    out << "overall: " << (report_passed(report) ? "PASS" : "FAIL") << '\n';
    return out.str();
}

Json transform_report(const io::EnsembleFile& ensemble_file, const io::PovmFile& povm_file) {
    const Ensemble e = ensemble_file.to_ensemble();
    const Povm povm = povm_file.to_povm();
    if (e.dim() != povm.dim()) throw DimensionMismatch(e.dim(), povm.dim(), "POVM dimension");

    const RetroDual dual = retro_transform(e, povm);
    const IdentityResiduals res = dual.residuals();
    const std::size_t dim = e.dim();

    CheckList checks;
    checks.add_at_most("sum_i Pi_i^ret = I", res.completeness, kIdentityTol);
    checks.add_at_most("Tr rho_j^ret = 1", res.trace, kIdentityTol);
    checks.add_at_most("sum_j mu_j rho_j^ret = Omega", res.source, kIdentityTol);

    Json zero_outcomes = Json::array();
    double born = 0.0;
    for (std::size_t j = 0; j < povm.size(); ++j) {
        if (!dual.retro_states[j]) {
            zero_outcomes.push_back(j);
            continue;
        }
        for (std::size_t i = 0; i < e.size(); ++i)
            born = std::max(born, std::abs(retrodictive_prob_symmetric(dual, i, j) -
                                           retrodictive_prob_bayes(e, povm, i, j)));
    }
    checks.add_at_most("Tr(Pi_i^ret rho_j^ret) = Bayes P(a_i|b_j)", born, 1e-9);

    if (dual.omega.unbiased) {
        double effects = 0.0, states = 0.0;
        for (std::size_t i = 0; i < e.size(); ++i)
            effects = std::max(effects, linalg::max_abs_diff(dual.retro_effects[i].matrix(),
                                                             e.states()[i].matrix() *
                                                                 linalg::Complex(dim * e.priors()[i])));
        for (std::size_t j = 0; j < povm.size(); ++j) {
            const double tr = povm[j].trace();
            if (!dual.retro_states[j] || tr <= kMuFloor) continue;
            states = std::max(states, linalg::max_abs_diff(dual.retro_states[j]->matrix(),
                                                           povm[j].matrix() * linalg::Complex(1.0 / tr)));
        }
        checks.add_at_most("unbiased: Pi_i^ret = D eta_i rho_i", effects, kIdentityTol);
        checks.add_at_most("unbiased: rho_j^ret = Pi_j / Tr Pi_j", states, kIdentityTol);
    }

    Json effects = Json::array();
    for (const auto& p : dual.retro_effects) {
        const Matrix& m = p.matrix();
        effects.push_back({{"matrix", io::to_json(m)},
                           {"trace", p.trace()},
                           {"idempotence_residual", linalg::max_abs_diff(m * m, m)}});
    }
    Json states = Json::array();
    for (const auto& r : dual.retro_states) {
        if (r) states.push_back({{"matrix", io::to_json(r->matrix())}, {"purity", r->purity()}});
        else states.push_back(nullptr);
    }

    Json derived = {{"omega", io::to_json(dual.omega.omega.matrix())},
                    {"omega_min_eigenvalue", linalg::min_eigenvalue(dual.omega.omega.op())},
                    {"unbiased", dual.omega.unbiased},
                    {"mu", dual.mu.mu},
                    {"zero_probability_outcomes", zero_outcomes},
                    {"retro_effects", effects},
                    {"retro_states", states},
                    {"residuals",
                     {{"completeness", res.completeness}, {"trace", res.trace}, {"source", res.source}}}};
    Json inputs = {{"ensemble", io::to_json(ensemble_file)}, {"povm", io::to_json(povm_file)}};
    return make_report("transform", std::move(inputs), std::move(derived), checks);
}

Json ud_report(const ud::UdInstance& inst, std::optional<double> grid_step) {
    const ud::DualOptimum opt = ud::optimal_dual(inst);
    const ud::OmegaClosedForm cf = ud::omega_closed_form(inst);
    const ud::RetroBasis basis = ud::retro_basis(inst);
    const ud::PredictiveUdPovm pred = ud::optimal_predictive_povm(inst);
    const double s = inst.overlap();

    CheckList checks;
    checks.add_at_most("mu_1 + mu_2 + mu_0 = 1", std::abs(opt.mu1 + opt.mu2 + opt.mu0 - 1.0), 1e-12);
    checks.add_at_most("det(mu_0 rho_0^ret)", std::abs(det2(opt.failure_in_retro_basis.matrix())), 1e-10);
    const double pred_success = ud::predictive_success(inst, pred.povm);
    checks.add_at_most("predictive P_s = retrodictive P_s", std::abs(pred_success - opt.p_success), 1e-10);
    checks.append(ud::verify_purity_identification(inst, 1e-9));

    std::vector<Matrix> elements;
    for (const auto& el : pred.povm.elements()) elements.push_back(el.matrix());

    Json derived = {
        {"regime", ud::to_string(opt.regime)},
        {"regime_threshold", 1.0 / (1.0 + s * s)},
        {"mu1", opt.mu1},
        {"mu2", opt.mu2},
        {"mu0", opt.mu0},
        {"p_success", opt.p_success},
        {"omega", io::to_json(ud::omega_matrix(inst).matrix())},
        {"omega_eigen", {{"w1", cf.w1}, {"w2", cf.w2}, {"angle", cf.angle}}},
        {"retro_basis", {io::to_json(basis.phi1.amplitudes()), io::to_json(basis.phi2.amplitudes())}},
        {"omega_in_retro_basis", io::to_json(ud::omega_in_retro_basis(inst).matrix())},
        {"failure_operator_retro_basis", io::to_json(opt.failure_in_retro_basis.matrix())},
        {"rho0_ret", opt.rho0_ret ? io::to_json(opt.rho0_ret->matrix()) : Json(nullptr)},
        {"predictive_povm", {{"c1", pred.c1}, {"c2", pred.c2}, {"elements", matrices(elements)}}},
        {"predictive_success", pred_success}};

    if (grid_step) {
        const ud::GridOptimum grid = ud::brute_force_dual(inst, *grid_step, 0);
        const double deviation = std::abs(grid.p_success - opt.p_success);
        derived["grid_check"] = {{"step", *grid_step},
                                 {"mu1", grid.mu1},
                                 {"mu2", grid.mu2},
                                 {"p_success", grid.p_success},
                                 {"deviation", deviation}};
        checks.add_at_most("closed form P_s vs grid oracle", deviation, 2.0 * *grid_step);
    }
    return make_report("ud", instance_inputs(inst), std::move(derived), checks);
}

Json channel_report(const ud::UdInstance& inst) {
    using linalg::Subsystem;
    const auto entangled = channel::entangled_state(inst);
    const auto symmetric = channel::symmetric_state(inst);
    const Matrix omega = ud::omega_matrix(inst).matrix();
    const auto ns = channel::no_signaling_check(inst);
    const Matrix root = channel::sqrt_omega_in_retro_basis(inst);
    const Matrix u = ud::retro_basis(inst).unitary();

    CheckList checks;
    checks.add_at_most("symmetric state swap residual", channel::swap_residual(symmetric), 1e-10);
    checks.add_at_most("symmetric Tr_b = Omega",
                       linalg::max_abs_diff(symmetric.reduced(Subsystem::b).matrix(), omega), 1e-10);
    checks.add_at_most("symmetric Tr_a = Omega",
                       linalg::max_abs_diff(symmetric.reduced(Subsystem::a).matrix(), omega), 1e-10);
    checks.add_at_most("entangled Tr_a = Omega",
                       linalg::max_abs_diff(entangled.reduced(Subsystem::a).matrix(), omega), 1e-10);
    checks.add_at_most("symmetric = (U (x) I) entangled",
                       linalg::max_abs_diff(linalg::kron(u, Matrix::identity(2)) * entangled.amplitudes(),
                                            symmetric.amplitudes()),
                       1e-10);
    checks.add_at_most("no-signaling |rho_a - rho_a~|", ns.max_residual, 1e-10);
    checks.add_at_most("sqrt(Omega)_12 = sqrt(Omega)_21 in retrodictive basis",
                       std::abs(root(0, 1) - root(1, 0)), 1e-12);

    Json derived = {{"entangled_state", io::to_json(entangled.amplitudes())},
                    {"symmetric_state", io::to_json(symmetric.amplitudes())},
                    {"omega", io::to_json(omega)},
                    {"rho_a", io::to_json(ns.rho_a.matrix())},
                    {"rho_a_tilde", io::to_json(ns.rho_a_tilde.matrix())},
                    {"rho_b", io::to_json(ns.rho_b.matrix())},
                    {"sqrt_omega_retro_basis", io::to_json(root)}};
    return make_report("channel", instance_inputs(inst), std::move(derived), checks);
}

Json simulate_report(const io::EnsembleFile& ensemble_file, const io::PovmFile& povm_file, std::uint64_t n,
                     std::uint64_t seed, unsigned workers) {
    const Ensemble e = ensemble_file.to_ensemble();
    const Povm povm = povm_file.to_povm();
    const sim::SampleCounts counts = sim::sample(e, povm, n, seed, workers);
    const sim::EmpiricalReport rep = sim::empirical_report(counts, e, povm);

    CheckList checks;
    checks.add_at_most("sum of counts = n",
                       std::abs(static_cast<double>(counts.sum()) - static_cast<double>(n)), 0.0);

    Json entries = Json::array();
    for (const auto& en : rep.entries)
        entries.push_back({{"quantity", sim::to_string(en.quantity)},
                           {"i", en.i},
                           {"j", en.j},
                           {"trials", en.trials},
                           {"empirical", en.empirical},
                           {"analytic", en.analytic},
                           {"deviation", en.deviation},
                           {"bound_3sigma", en.bound},
                           {"flagged", en.flagged}});

    Json derived = {{"counts", counts.counts},
                    {"empirical", entries},
                    {"flagged", rep.flagged()},
                    {"backward_analytic", rep.backward_from_symmetric ? "Tr(Pi_i^ret rho_j^ret)" : "Bayes"}};
    Json inputs = {{"ensemble", io::to_json(ensemble_file)},
                   {"povm", io::to_json(povm_file)},
                   {"n", n},
                   {"seed", seed},
                   {"rng", counts.rng_algorithm}};
    return make_report("simulate", std::move(inputs), std::move(derived), checks);
}

}  // namespace retro::app
