#include "retro/app/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "retro/app/cli.hpp"
#include "retro/app/io.hpp"
#include "retro/app/report.hpp"
#include "retro/channel.hpp"
#include "retro/random.hpp"
#include "retro/retrodiction.hpp"
#include "retro/sim.hpp"
#include "retro/ud.hpp"

namespace retro::acceptance {

using linalg::Complex;
using linalg::Matrix;

namespace {

constexpr std::uint64_t kCorpusSeed = 0x5eedULL;
constexpr std::size_t kCorpusSize = 500;
constexpr double kGridStep = 1e-4;

/// Keeps the worst value seen for each named check, in first-seen order.
class Worst {
public:
    void add(const std::string& name, double value, double tolerance) {
        auto [it, inserted] = index_.try_emplace(name, rows_.size());
        if (inserted) {
            rows_.push_back({name, value, tolerance});
            return;
        }
        auto& row = rows_[it->second];
        // NaN must stick so the check fails.
        if (std::isnan(value) || value > row.value) row.value = value;
    }
    void add(const CheckList& checks) {
        for (const auto& c : checks.checks()) add(c.name, c.value, c.tolerance);
    }
    CheckList finish() const {
        CheckList out;
        for (const auto& r : rows_) out.add_at_most(r.name, r.value, r.tolerance);
        return out;
    }

private:
    struct Row {
        std::string name;
        double value;
        double tolerance;
    };
    std::vector<Row> rows_;
    std::map<std::string, std::size_t> index_;
};

template <typename F>
CriterionResult timed(std::string id, std::string title, F body) {
    CriterionResult r{std::move(id), std::move(title), {}, {}, 0.0};
    const auto start = std::chrono::steady_clock::now();
    try {
        body(r);
    } catch (const std::exception& e) {
        // An unexpected throw fails the criterion instead of aborting the run.
        r.checks.add(Check::at_most("completed without error", 1.0, 0.0));
        r.notes.push_back(std::string("error: ") + e.what());
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

/// Both prior orientations of every grid point.
std::vector<ud::UdInstance> grid_instances() {
    std::vector<ud::UdInstance> out;
    for (const auto& p : ud_grid()) {
        out.push_back(ud::UdInstance::from_overlap(p.eta_max, p.overlap));
        if (p.eta_max != 0.5) out.push_back(ud::UdInstance::from_overlap(1.0 - p.eta_max, p.overlap));
    }
    return out;
}

double det2(const Matrix& m) { return (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)).real(); }

double projector_gap(const linalg::Vector& a, const linalg::Vector& b) {
    return linalg::max_abs_diff(linalg::outer(a, a), linalg::outer(b, b));
}

template <typename E>
Check expect_throw(const std::string& name, const std::function<void()>& fn) {
    bool raised = false;
    try {
        fn();
    } catch (const E&) {
        raised = true;
    } catch (const std::exception&) {
    }
    return Check::at_most(name, raised ? 0.0 : 1.0, 0.0);
}

}  // namespace

std::vector<Case> random_corpus(std::size_t count, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<Case> out;
    std::size_t attempt = 0;
    while (out.size() < count) {
        if (++attempt > 50 * count) throw NumericIntegrityError("random corpus: acceptance rate too low");
        const std::size_t dim = 2 + attempt % 3;
        const std::size_t states = dim + rng() % 3;
        const std::size_t outcomes = 2 + rng() % (dim + 2);
        Ensemble e = random::ensemble(dim, states, rng);
        Povm povm = random::povm(dim, outcomes, rng);
        const SourceFunction omega = source_from_ensemble(e);
        if (linalg::min_eigenvalue(omega.omega.op()) < 1e-3) continue;
        const OutcomeDistribution mu = outcome_probs(povm, omega);
        if (*std::min_element(mu.mu.begin(), mu.mu.end()) < 1e-3) continue;
        out.push_back({std::move(e), std::move(povm)});
    }
    return out;
}

std::vector<GridPoint> ud_grid() {
    std::vector<GridPoint> out;
    for (int a = 0; a < 25; ++a)
        for (int b = 0; b < 25; ++b)
            out.push_back({0.5 + 0.48 * a / 24.0, 0.02 + 0.93 * b / 24.0});
    return out;
}

CriterionResult ac1_symmetric_born() {
    return timed("AC1", "symmetric Born rule equals Bayes", [](CriterionResult& r) {
        const auto corpus = random_corpus(kCorpusSize, kCorpusSeed);
        double worst = 0.0;
        for (const auto& c : corpus) {
            const RetroDual dual = retro_transform(c.ensemble, c.povm);
            for (std::size_t j = 0; j < c.povm.size(); ++j)
                for (std::size_t i = 0; i < c.ensemble.size(); ++i)
                    worst = std::max(worst, std::abs(retrodictive_prob_symmetric(dual, i, j) -
                                                     retrodictive_prob_bayes(c.ensemble, c.povm, i, j)));
        }
        r.checks.add(Check::at_least("random cases", static_cast<double>(corpus.size()), 500));
        r.checks.add_at_most("max |Tr(Pi_i^ret rho_j^ret) - eta_i Tr(Pi_j rho_i) / mu_j|", worst, 1e-9);
    });
}

CriterionResult ac2_transform_identities() {
    return timed("AC2", "transform identities", [](CriterionResult& r) {
        const auto corpus = random_corpus(kCorpusSize, kCorpusSeed);
        double completeness = 0.0, trace = 0.0, source = 0.0;
        for (const auto& c : corpus) {
            const RetroDual dual = retro_transform(c.ensemble, c.povm);
            const std::size_t dim = c.ensemble.dim();
            Matrix sum_effects(dim), sum_states(dim);
            for (const auto& p : dual.retro_effects) sum_effects += p.matrix();
            for (std::size_t j = 0; j < dual.retro_states.size(); ++j) {
                const auto& rho = dual.retro_states[j];
                trace = std::max(trace, std::abs(rho->matrix().trace() - 1.0));
                sum_states += rho->matrix() * Complex(dual.mu[j]);
            }
            completeness = std::max(completeness, linalg::frobenius_norm(sum_effects - Matrix::identity(dim)));
            source = std::max(source, linalg::frobenius_norm(sum_states - dual.omega.omega.matrix()));
        }
        r.checks.add(Check::at_least("random cases", static_cast<double>(corpus.size()), 500));
        r.checks.add_at_most("max ||sum_i Pi_i^ret - I||_F", completeness, 1e-10);
        r.checks.add_at_most("max |Tr rho_j^ret - 1|", trace, 1e-10);
        r.checks.add_at_most("max ||sum_j mu_j rho_j^ret - Omega||_F", source, 1e-10);
    });
}

CriterionResult ac3_unbiased_reduction() {
    return timed("AC3", "unbiased reduction", [](CriterionResult& r) {
        SplitMix64 rng(kCorpusSeed + 3);
        std::vector<Case> cases;
        for (std::size_t k = 0; k < 150; ++k) {
            const std::size_t dim = 2 + k % 3;
            const Matrix u = random::unitary(dim, rng);
            std::vector<PureState> basis;
            for (std::size_t c = 0; c < dim; ++c) basis.push_back(PureState::normalized(u.column(c)));
            cases.push_back({Ensemble::from_pure(basis, std::vector<double>(dim, 1.0 / dim)),
                             random::povm(dim, 2 + rng() % 4, rng)});
        }
        for (std::size_t k = 0; k < 50; ++k) {
            const DensityOperator rho = random::density(2, 1 + k % 2, rng);
            const DensityOperator rest(Matrix::identity(2) - rho.matrix());
            cases.push_back({Ensemble({rho, rest}, {0.5, 0.5}), random::povm(2, 2 + rng() % 3, rng)});
        }

        double biased = 0.0, effects = 0.0, states = 0.0;
        for (const auto& c : cases) {
            const RetroDual dual = retro_transform(c.ensemble, c.povm);
            const double dim = static_cast<double>(c.ensemble.dim());
            if (!dual.omega.unbiased) biased += 1.0;
            for (std::size_t i = 0; i < c.ensemble.size(); ++i)
                effects = std::max(effects, linalg::max_abs_diff(dual.retro_effects[i].matrix(),
                                                                 c.ensemble.states()[i].matrix() *
                                                                     Complex(dim * c.ensemble.priors()[i])));
            for (std::size_t j = 0; j < c.povm.size(); ++j)
                states = std::max(states, linalg::max_abs_diff(dual.retro_states[j]->matrix(),
                                                               c.povm[j].matrix() *
                                                                   Complex(1.0 / c.povm[j].trace())));
        }
        r.checks.add_at_most("sources not recognised as unbiased", biased, 0.0);
        r.checks.add_at_most("max |Pi_i^ret - D eta_i rho_i|", effects, 1e-10);
        r.checks.add_at_most("max |rho_j^ret - Pi_j / Tr Pi_j|", states, 1e-10);
        r.notes.push_back(std::to_string(cases.size()) + " unbiased cases");
    });
}

CriterionResult ac4_ud_success() {
    return timed("AC4", "UD success probability vs grid oracle", [](CriterionResult& r) {
        Worst w;
        std::size_t clamped = 0;
        for (const auto& inst : grid_instances()) {
            const ud::DualOptimum opt = ud::optimal_dual(inst);
            const ud::GridOptimum grid = ud::brute_force_dual(inst, kGridStep, 0);
            w.add("max |P_s closed form - P_s grid|", std::abs(opt.p_success - grid.p_success), 2e-4);
            const double s = inst.overlap();
            const bool expect_clamped = inst.eta_max() >= 1.0 / (1.0 + s * s);
            const double mu_min = std::min(opt.mu1, opt.mu2);
            const bool consistent = (opt.regime == ud::Regime::clamped) == expect_clamped &&
                                    (expect_clamped ? mu_min == 0.0 : mu_min > 0.0);
            w.add("regime misclassifications", consistent ? 0.0 : 1.0, 0.0);
            if (expect_clamped) ++clamped;
        }
        for (const auto& p : ud_grid()) {
            const double s = p.overlap;
            const double boundary = 1.0 / (1.0 + s * s);
            w.add("max branch gap at eta_max = 1/(1+s^2)",
                  std::abs(ud::success_interior(boundary, s) - ud::success_clamped(boundary, s)), 1e-9);
            const double below = ud::optimal_dual(ud::UdInstance::from_overlap(std::nextafter(boundary, 0.0), s)).p_success;
            const double at = ud::optimal_dual(ud::UdInstance::from_overlap(boundary, s)).p_success;
            w.add("max optimum jump across the regime boundary", std::abs(at - below), 1e-9);
        }
        r.checks = w.finish();
        const double half = ud::optimal_dual(ud::UdInstance::from_overlap(0.5, 0.5)).p_success;
        const double clamp = ud::optimal_dual(ud::UdInstance::from_overlap(0.9, std::sqrt(0.5))).p_success;
        r.checks.add_at_most("|P_s(1/2, 1/2) - 0.5|", std::abs(half - 0.5), 1e-12);
        r.checks.add_at_most("|P_s(0.9, s^2 = 1/2) - 0.45|", std::abs(clamp - 0.45), 1e-12);
        r.notes.push_back(std::to_string(grid_instances().size()) + " instances, " + std::to_string(clamped) +
                          " clamped");
    });
}

CriterionResult ac5_retro_basis() {
    return timed("AC5", "retrodictive basis", [](CriterionResult& r) {
        Worst w;
        for (const auto& inst : grid_instances()) {
            const ud::RetroBasis numeric = ud::retro_basis(inst);
            const ud::RetroBasis closed = ud::retro_basis_closed_form(inst);
            const auto& p1 = numeric.phi1.amplitudes();
            const auto& p2 = numeric.phi2.amplitudes();
            const double ortho = std::max({std::abs(linalg::inner(p1, p1) - 1.0), std::abs(linalg::inner(p2, p2) - 1.0),
                                           std::abs(linalg::inner(p1, p2))});
            w.add("max orthonormality residual", ortho, 1e-9);
            w.add("max |phi numeric - phi closed form|",
                  std::max(linalg::max_abs_diff(p1, closed.phi1.amplitudes()),
                           linalg::max_abs_diff(p2, closed.phi2.amplitudes())),
                  1e-10);

            const ud::OmegaClosedForm cf = ud::omega_closed_form(inst);
            const linalg::Spectrum eig = linalg::hermitian_eig(ud::omega_matrix(inst).op());
            w.add("max |w_1 - lambda_max|", std::abs(cf.w1 - eig.eigenvalues[1]), 1e-10);
            w.add("max |w_2 - lambda_min|", std::abs(cf.w2 - eig.eigenvalues[0]), 1e-10);
            w.add("max eigenvector projector gap (omega angle)",
                  std::max(projector_gap(cf.omega1(), eig.eigenvector(1)),
                           projector_gap(cf.omega2(), eig.eigenvector(0))),
                  1e-10);
        }
        r.checks = w.finish();
    });
}

CriterionResult ac6_purity_identification() {
    return timed("AC6", "purity and identification of retrodictive states", [](CriterionResult& r) {
        Worst w;
        for (const auto& inst : grid_instances()) {
            w.add(ud::verify_purity_identification(inst, 1e-9));
            const ud::DualOptimum opt = ud::optimal_dual(inst);
            w.add("max |det(mu_0 rho_0^ret)|", std::abs(det2(opt.failure_in_retro_basis.matrix())), 1e-10);
        }
        r.checks = w.finish();
    });
}

CriterionResult ac7_channel() {
    return timed("AC7", "channel symmetry and no-signaling", [](CriterionResult& r) {
        using linalg::Subsystem;
        Worst w;
        for (const auto& inst : grid_instances()) {
            const auto symmetric = channel::symmetric_state(inst);
            const Matrix omega = ud::omega_matrix(inst).matrix();
            w.add("max swap residual", channel::swap_residual(symmetric), 1e-10);
            w.add("max |reduced state - Omega|",
                  std::max(linalg::max_abs_diff(symmetric.reduced(Subsystem::a).matrix(), omega),
                           linalg::max_abs_diff(symmetric.reduced(Subsystem::b).matrix(), omega)),
                  1e-10);
            w.add("max |rho_a - rho_a~|", channel::no_signaling_check(inst).max_residual, 1e-10);
            const Matrix root = channel::sqrt_omega_in_retro_basis(inst);
            w.add("max |sqrt(Omega)_12 - sqrt(Omega)_21|", std::abs(root(0, 1) - root(1, 0)), 1e-12);
        }
        r.checks = w.finish();
    });
}

CriterionResult ac8_monte_carlo() {
    return timed("AC8", "Monte Carlo", [](CriterionResult& r) {
        constexpr std::uint64_t n = 1'000'000;
        constexpr std::uint64_t seed = 42;
        const auto inst = ud::UdInstance::from_overlap(0.5, 0.5);
        const auto [psi1, psi2] = ud::ud_states(inst);
        const auto ens = io::EnsembleFile::from_pure({psi1, psi2}, {inst.eta1(), inst.eta2()});
        const auto povm = io::PovmFile::from(ud::optimal_predictive_povm(inst).povm);

        const auto start = std::chrono::steady_clock::now();
        const io::Json first = app::simulate_report(ens, povm, n, seed, 1);
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const std::string bytes = first.dump(2);

        const auto& counts = first["derived"]["counts"];
        const double zeros = counts[0][1].get<double>() + counts[1][0].get<double>();
        const double mu0 = (counts[0][2].get<double>() + counts[1][2].get<double>()) / static_cast<double>(n);
        double backward_flags = 0.0;
        for (const auto& e : first["derived"]["empirical"])
            if (e["quantity"] == sim::to_string(sim::Quantity::backward) && e["flagged"].get<bool>())
                backward_flags += 1.0;

        double mismatched = 0.0;
        for (unsigned workers : {1u, 4u, 0u})
            if (app::simulate_report(ens, povm, n, seed, workers).dump(2) != bytes) mismatched += 1.0;

        r.checks.add_at_most("structurally zero counts N[1][2] + N[2][1]", zeros, 0.0);
        r.checks.add_at_most("|mu_0 estimate - 0.5|", std::abs(mu0 - 0.5), 0.0015);
        r.checks.add_at_most("retrodictive conditionals outside 3 sigma", backward_flags, 0.0);
        r.checks.add_at_most("reruns differing from the first report", mismatched, 0.0);
        r.checks.add_at_most("seconds for n = 1e6", seconds, 10.0);
    });
}

CriterionResult ac9_failure_modes() {
    return timed("AC9", "failure-mode contract", [](CriterionResult& r) {
        const Povm z = Povm::from_matrices({Matrix::identity(2), Matrix(2)});
        auto transform_of = [&](const ud::UdInstance& inst) {
            return [&z, inst] { retro_transform(ud::ud_ensemble(inst), z); };
        };
        r.checks.add(expect_throw<SingularOperator>("alpha = 1e-9: optimal dual raises SingularOperator", [] {
            ud::optimal_dual(ud::UdInstance::from_alpha(0.5, 1e-9));
        }));
        r.checks.add(expect_throw<SingularOperator>("alpha = 1e-9: transform raises SingularOperator",
                                                    transform_of(ud::UdInstance::from_alpha(0.5, 1e-9))));
        r.checks.add(expect_throw<SingularOperator>("s = 1 - 1e-15: optimal dual raises SingularOperator", [] {
            ud::optimal_dual(ud::UdInstance::from_overlap(0.5, 1.0 - 1e-15));
        }));
        r.checks.add(expect_throw<SingularOperator>("s = 1 - 1e-15: transform raises SingularOperator",
                                                    transform_of(ud::UdInstance::from_overlap(0.5, 1.0 - 1e-15))));
        r.checks.add(expect_throw<SingularOperator>("rank-deficient Omega raises SingularOperator", [] {
            const PureState a({1.0, 0.0, 0.0}), b({0.0, 1.0, 0.0});
            retro_transform(Ensemble::from_pure({a, b}, {0.5, 0.5}), Povm::from_matrices({Matrix::identity(3)}));
        }));

        const PureState up({1.0, 0.0}), plus = PureState::normalized({1.0, 1.0});
        const Ensemble e = Ensemble::from_pure({up, plus}, {0.3, 0.7});
        r.checks.add(expect_throw<ZeroProbabilityOutcome>("mu_j = 0: Bayes retrodiction raises ZeroProbabilityOutcome",
                                                          [&] { retrodictive_prob_bayes(e, z, 0, 1); }));
        r.checks.add(expect_throw<ZeroProbabilityOutcome>(
            "mu_j = 0: symmetric retrodiction raises ZeroProbabilityOutcome",
            [&] { retrodictive_prob_symmetric(retro_transform(e, z), 0, 1); }));

        // File-level failures go through the command-line entry point.
        namespace fs = std::filesystem;
        const fs::path dir = fs::temp_directory_path() /
                             ("retrodictor-ac9-" + std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
        fs::create_directories(dir);
        auto run = [&](const std::vector<std::string>& args, std::string& err) {
            std::ostringstream out, errs;
            const int code = cli::run(args, out, errs);
            err = errs.str();
            return code;
        };
        const std::string povm = R"({"dim": 2, "elements": [[[[1,0],[0,0]],[[0,0],[0,0]]], [[[0,0],[0,0]],[[0,0],[1,0]]]]})";
        const std::string pure_states = R"([{"pure": true, "amplitudes": [[1,0],[0,0]]}, {"pure": true, "amplitudes": [[0,0],[1,0]]}])";
        const std::vector<std::pair<std::string, std::string>> files = {
            {"povm.json", povm},
            {"priors.json", R"({"dim": 2, "priors": [0.4, 0.5], "states": )" + pure_states + "}"},
            {"hermitian.json", R"({"dim": 2, "priors": [0.5, 0.5], "states": [{"pure": false, "matrix": [[[0.5,0],[0.3,0]],[[0,0],[0.5,0]]]}, {"pure": true, "amplitudes": [[1,0],[0,0]]}]})"},
            {"broken.json", R"({"dim": 2, "priors": [0.5, 0.5], "states": [)"},
        };
        for (const auto& [name, text] : files) io::write_text(dir / name, text);
        const std::string pov = (dir / "povm.json").string();

        std::string err;
        int code = run({"transform", (dir / "priors.json").string(), pov}, err);
        r.checks.add_at_most("priors summing to 0.9: exit code - 1", std::abs(code - 1.0), 0.0);
        const bool named = err.find("sum(eta) = 1") != std::string::npos &&
                           err.find("residual 1.000e-01") != std::string::npos;
        r.checks.add_at_most("priors summing to 0.9: message names sum(eta) residual 0.1", named ? 0.0 : 1.0, 0.0);
        code = run({"transform", (dir / "hermitian.json").string(), pov}, err);
        r.checks.add_at_most("non-Hermitian state: exit code - 1", std::abs(code - 1.0), 0.0);
        r.checks.add_at_most("non-Hermitian state: message names the residual",
                             err.find("Hermitian") != std::string::npos && err.find("residual") != std::string::npos ? 0.0 : 1.0,
                             0.0);
        code = run({"transform", (dir / "broken.json").string(), pov}, err);
        r.checks.add_at_most("malformed JSON: exit code - 1", std::abs(code - 1.0), 0.0);
        code = run({"ud", "--eta1", "1.5", "--overlap", "0.5"}, err);
        r.checks.add_at_most("out-of-range prior: exit code - 1", std::abs(code - 1.0), 0.0);
        code = run({"ud", "--eta1", "0.5", "--alpha", "1e-9"}, err);
        r.checks.add_at_most("near-coinciding UD states: exit code - 2", std::abs(code - 2.0), 0.0);
        fs::remove_all(dir);
    });
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {"retrodiction", "ud", "channel", "sim", "failure", "all"};
    return names;
}

std::vector<CriterionResult> run_suite(const std::string& name) {
    using Fn = CriterionResult (*)();
    static const std::vector<std::pair<std::string, std::vector<Fn>>> suites = {
        {"retrodiction", {ac1_symmetric_born, ac2_transform_identities, ac3_unbiased_reduction}},
        {"ud", {ac4_ud_success, ac5_retro_basis, ac6_purity_identification}},
        {"channel", {ac7_channel}},
        {"sim", {ac8_monte_carlo}},
        {"failure", {ac9_failure_modes}},
    };
    std::vector<CriterionResult> out;
    for (const auto& [suite, fns] : suites)
        if (name == "all" || name == suite)
            for (Fn f : fns) out.push_back(f());
    if (out.empty()) throw InvalidParameter("unknown suite \"" + name + "\"");
    return out;
}

}  // namespace retro::acceptance
