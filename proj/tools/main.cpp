// upbwit — build inseparable PPT states and entanglement witnesses from
// unextendible product bases.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "reproduce.hpp"
#include "upbwit/construct.hpp"
#include "upbwit/report.hpp"
#include "upbwit/separability.hpp"
#include "upbwit/states.hpp"

namespace {

using upbwit::report::kExitConditions;
using upbwit::report::kExitParse;

struct InputArgs {
    std::string family;
    std::string file;
    double t = 0.0;
    bool normalize = false;
};

void add_input_flags(CLI::App* cmd, InputArgs& in) {
    cmd->add_option("--family", in.family, "built-in family name (see `families`)");
    cmd->add_option("--file", in.file, "product-state set JSON file");
    cmd->add_option("--t", in.t, "perturbation parameter for parameterized families");
    cmd->add_flag("--normalize", in.normalize, "rescale non-unit factors when loading a file");
}

upbwit::states::ProductStateSet load_input(const InputArgs& in) {
    if (in.family.empty() == in.file.empty())
        throw std::invalid_argument("pass exactly one of --family or --file");
    if (!in.family.empty()) return upbwit::states::make_family(in.family, in.t);
    return upbwit::states::load_product_state_set_file(in.file, in.normalize);
}

void write_json_file(const std::string& path, const std::string& body) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << body << "\n";
}

int cmd_analyze(const InputArgs& in, const upbwit::report::AnalysisOptions& opt,
                const std::string& json_path) {
    upbwit::states::ProductStateSet set;
    try {
        set = load_input(in);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }
    const auto rep = upbwit::report::run_analysis(set, opt);
    std::cout << upbwit::report::to_text(rep);
    if (!json_path.empty()) write_json_file(json_path, upbwit::report::to_json_string(rep));
    return rep.exit_code;
}

int cmd_epsilon(const InputArgs& in, std::size_t restarts, std::uint64_t seed, bool oracle,
                std::size_t resolution, const std::string& json_path) {
    upbwit::states::ProductStateSet set;
    try {
        set = load_input(in);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }
    using upbwit::report::fmt_real;
    try {
        const auto q = upbwit::states::gram_q(set);
        const auto sol = upbwit::construct::solve_condition2(q);
        const auto mu0 = upbwit::construct::mu_of_p(set, sol.p);
        const auto est = upbwit::separability::epsilon_seesaw(mu0, restarts, seed);
        const double n_total = static_cast<double>(set.dims.total());

        std::optional<double> oracle_value;
        if (oracle) {
            std::size_t res = resolution;
            if (res == 0) {
                const auto angles = upbwit::separability::grid_angle_count(set.dims);
                res = angles <= 4 ? 40 : (angles <= 6 ? 20 : 10);
            }
            oracle_value = upbwit::separability::epsilon_grid_oracle(mu0, res);
        }

        std::cout << "epsilon (best product-state value of Tr(mu0 sigma)) = "
                  << fmt_real(est.value) << "\n";
        std::cout << "restarts = " << est.restarts_used
                  << "  converged = " << (est.converged ? "yes" : "no") << "\n";
        if (oracle_value) std::cout << "grid oracle = " << fmt_real(*oracle_value) << "\n";
        std::cout << "N * inf = " << fmt_real(n_total * est.value) << " (must lie in (0,1))\n";

        if (!json_path.empty()) {
            std::ostringstream body;
            body << "{\n  \"value\": " << fmt_real(est.value) << ",\n  \"oracle_value\": "
                 << (oracle_value ? fmt_real(*oracle_value) : std::string("null"))
                 << ",\n  \"restarts_used\": " << est.restarts_used
                 << ",\n  \"converged\": " << (est.converged ? "true" : "false")
                 << ",\n  \"n_times_inf\": " << fmt_real(n_total * est.value) << "\n}";
            write_json_file(json_path, body.str());
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConditions;
    }
}

int cmd_frustum(const InputArgs& in, std::size_t steps, std::size_t restarts,
                std::uint64_t seed) {
    upbwit::states::ProductStateSet set;
    try {
        set = load_input(in);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }
    try {
        const auto sweep = upbwit::report::frustum_sweep(set, steps, restarts, seed);
        std::cout << upbwit::report::frustum_csv(sweep);
        return 0;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }
}

int cmd_families() {
    std::cout << "tiles             3x3 orthonormal tiling family, m = 5\n";
    std::cout << "example_b2        2x2 non-orthogonal family, m = 3\n";
    std::cout << "tiles_perturbed   tiles with the last member tilted by --t\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "construct inseparable PPT states and entanglement witnesses from unextendible "
        "product bases"};
    app.require_subcommand(1);

    // analyze
    InputArgs an_in;
    upbwit::report::AnalysisOptions an_opt;
    std::string an_json;
    auto* analyze = app.add_subcommand("analyze", "run the full certification pipeline");
    add_input_flags(analyze, an_in);
    analyze->add_option("--seed", an_opt.seed, "root seed for all randomized steps");
    analyze->add_option("--restarts", an_opt.restarts, "see-saw restarts");
    analyze->add_flag("--oracle", an_opt.use_oracle, "also run the grid oracle");
    analyze->add_option("--resolution", an_opt.oracle_resolution,
                        "grid oracle resolution per angle (0 = auto)");
    analyze->add_flag("--conservative", an_opt.conservative,
                      "recheck the verdict with epsilon scaled by 0.99");
    analyze->add_option("--json", an_json, "write the report as JSON to this path");

    // epsilon
    InputArgs ep_in;
    std::size_t ep_restarts = 256;
    std::uint64_t ep_seed = 0;
    bool ep_oracle = false;
    std::size_t ep_resolution = 0;
    std::string ep_json;
    auto* epsilon = app.add_subcommand("epsilon", "estimate inf Tr(mu0 sigma) over product states");
    add_input_flags(epsilon, ep_in);
    epsilon->add_option("--seed", ep_seed, "root seed");
    epsilon->add_option("--restarts", ep_restarts, "see-saw restarts");
    epsilon->add_flag("--oracle", ep_oracle, "also run the grid oracle");
    epsilon->add_option("--resolution", ep_resolution, "grid resolution per angle (0 = auto)");
    epsilon->add_option("--json", ep_json, "write the estimate as JSON to this path");

    // frustum
    InputArgs fr_in;
    std::size_t fr_steps = 100;
    std::size_t fr_restarts = 256;
    std::uint64_t fr_seed = 0;
    auto* frustum =
        app.add_subcommand("frustum", "sweep (1-t) D0 + t rho(b) and emit CSV (orthonormal only)");
    add_input_flags(frustum, fr_in);
    frustum->add_option("--steps", fr_steps, "number of sweep intervals");
    frustum->add_option("--seed", fr_seed, "root seed");
    frustum->add_option("--restarts", fr_restarts, "see-saw restarts");

    // reproduce-paper
    std::string only;
    std::uint64_t rp_seed = 0;
    auto* reproduce = app.add_subcommand(
        "reproduce-paper", "assert every published value of the built-in constructions");
    reproduce->add_option("--only", only, "run only checklist ids containing this substring");
    reproduce->add_option("--seed", rp_seed, "root seed");

    auto* families = app.add_subcommand("families", "list built-in product-state families");

    CLI11_PARSE(app, argc, argv);

    if (analyze->parsed()) return cmd_analyze(an_in, an_opt, an_json);
    if (epsilon->parsed())
        return cmd_epsilon(ep_in, ep_restarts, ep_seed, ep_oracle, ep_resolution, ep_json);
    if (frustum->parsed()) return cmd_frustum(fr_in, fr_steps, fr_restarts, fr_seed);
    if (reproduce->parsed())
        return upbwit::cli::run_reproduce_checklist(only, rp_seed) == 0 ? 0 : 1;
    if (families->parsed()) return cmd_families();
    return 1;
}
