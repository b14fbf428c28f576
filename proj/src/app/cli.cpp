#include "retro/app/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <optional>
#include <ostream>

#include "retro/app/acceptance.hpp"
#include "retro/app/io.hpp"
#include "retro/app/report.hpp"

namespace retro::cli {

namespace {

using io::Json;

struct Output {
    std::string path;
    bool text = false;

    void add_to(CLI::App* cmd) {
        cmd->add_option("-o,--output", path, "Write the report to this file instead of stdout");
        cmd->add_flag("--text", text, "Human-readable rendering instead of JSON");
    }

    int emit(const Json& report, std::ostream& out) const {
        const std::string body = text ? app::render_text(report) : report.dump(2) + "\n";
        if (path.empty()) out << body;
        else io::write_text(path, body);
        return app::report_passed(report) ? kPass : kNumericError;
    }
};

struct Angles {
    double eta1 = 0.5;
    std::optional<double> alpha;
    std::optional<double> overlap;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--eta1", eta1, "Prior of the first state")->required();
        auto* a = cmd->add_option("--alpha", alpha, "State half-angle in radians");
        auto* s = cmd->add_option("--overlap", overlap, "Overlap s = <psi_1|psi_2>, converted with alpha = arccos(s)/2");
        a->excludes(s);
    }

    ud::UdInstance instance() const {
        if (alpha) return ud::UdInstance::from_alpha(eta1, *alpha);
        if (overlap) return ud::UdInstance::from_overlap(eta1, *overlap);
        throw InvalidParameter("one of --alpha or --overlap is required");
    }
};

std::uint64_t default_seed() {
    const char* env = std::getenv("RETRODICTOR_SEED");
    if (env == nullptr || *env == '\0') return 0;
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(env, &used, 0);
        if (used != std::string(env).size()) throw std::invalid_argument(env);
        return v;
    } catch (const std::exception&) {
        throw InvalidParameter(std::string("RETRODICTOR_SEED is not an unsigned integer: ") + env);
    }
}

Json verify_report(const std::vector<acceptance::CriterionResult>& results, const std::string& suite) {
    Json criteria = Json::array();
    CheckList all;
    for (const auto& r : results) {
        criteria.push_back({{"id", r.id},
                            {"title", r.title},
                            {"passed", r.passed()},
                            {"seconds", r.seconds},
                            {"notes", r.notes},
                            {"checks", app::to_json(r.checks)}});
        for (const auto& c : r.checks.checks()) {
            Check tagged = c;
            tagged.name = r.id + ": " + c.name;
            all.add(tagged);
        }
    }
    return app::make_report("verify", {{"suite", suite}}, {{"criteria", criteria}}, all);
}

void print_error(std::ostream& err, const std::exception& e) {
    if (const auto* v = dynamic_cast<const ValidationError*>(&e)) {
        err << "error: validation failed\n";
        for (const auto& violation : v->report().violations) err << "  " << violation.describe() << '\n';
        return;
    }
    err << "error: " << e.what() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Symmetric quantum retrodiction toolkit", app::kToolName};
    app.set_version_flag("--version", app::kToolVersion);
    app.require_subcommand(1);

    Output output;

    auto* transform = app.add_subcommand("transform", "Retrodictive transform of an ensemble and a POVM");
    std::string ensemble_path, povm_path;
    transform->add_option("ensemble", ensemble_path, "Ensemble JSON file")->required();
    transform->add_option("povm", povm_path, "POVM JSON file")->required();
    output.add_to(transform);

    auto* ud_cmd = app.add_subcommand("ud", "Optimal dual of two-state unambiguous discrimination");
    Angles ud_angles;
    ud_angles.add_to(ud_cmd);
    std::optional<double> grid_step;
    ud_cmd->add_option("--grid-check", grid_step, "Compare against a brute-force grid of this step");
    output.add_to(ud_cmd);

    auto* channel_cmd = app.add_subcommand("channel", "Entangled and symmetric channel states");
    Angles channel_angles;
    channel_angles.add_to(channel_cmd);
    output.add_to(channel_cmd);

    auto* simulate = app.add_subcommand("simulate", "Seeded Monte Carlo of prepare-and-measure");
    std::string sim_ensemble, sim_povm;
    std::uint64_t n = 0;
    std::optional<std::uint64_t> seed;
    unsigned workers = 0;
    simulate->add_option("ensemble", sim_ensemble, "Ensemble JSON file")->required();
    simulate->add_option("povm", sim_povm, "POVM JSON file")->required();
    simulate->add_option("--n", n, "Number of trials")->required()->check(CLI::PositiveNumber);
    simulate->add_option("--seed", seed, "RNG seed (default: $RETRODICTOR_SEED, else 0)");
    simulate->add_option("--workers", workers, "Worker threads, 0 for all cores; never changes the result");
    output.add_to(simulate);

    auto* verify = app.add_subcommand("verify", "Run the acceptance suites");
    std::string suite = "all";
    verify->add_option("--suite", suite, "Suite to run")->check(CLI::IsMember(acceptance::suite_names()));
    output.add_to(verify);

    std::vector<const char*> argv{app::kToolName};
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kPass;
    } catch (const CLI::CallForVersion&) {
        out << app::kToolVersion << '\n';
        return kPass;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }

    try {
        if (transform->parsed())
            return output.emit(app::transform_report(io::parse_ensemble(io::read_text(ensemble_path)),
                                                     io::parse_povm(io::read_text(povm_path))),
                               out);
        if (ud_cmd->parsed()) {
            if (grid_step && !(*grid_step > 0.0 && *grid_step < 0.5))
                throw InvalidParameter("--grid-check step must lie in (0, 0.5)");
            return output.emit(app::ud_report(ud_angles.instance(), grid_step), out);
        }
        if (channel_cmd->parsed()) return output.emit(app::channel_report(channel_angles.instance()), out);
        if (simulate->parsed())
            return output.emit(app::simulate_report(io::parse_ensemble(io::read_text(sim_ensemble)),
                                                    io::parse_povm(io::read_text(sim_povm)), n,
                                                    seed ? *seed : default_seed(), workers),
                               out);
        if (verify->parsed()) return output.emit(verify_report(acceptance::run_suite(suite), suite), out);
    } catch (const InputError& e) {
        print_error(err, e);
        return kInputError;
    } catch (const NumericError& e) {
        print_error(err, e);
        return kNumericError;
    }
    return kInputError;
}

}  // namespace retro::cli
