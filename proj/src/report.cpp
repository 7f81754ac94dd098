#include "upbwit/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "upbwit/rng.hpp"

namespace upbwit::report {

using construct::Density;
using construct::PVec;
using linalg::Matrix;
using nlohmann::json;

std::string fmt_real(double x) {
    if (x == 0.0) x = 0.0;  // collapse -0
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

namespace {

// Best rational a/b with b <= max_den by continued fractions; accepted only
// when it reproduces x to 1e-12.
std::optional<std::pair<long long, long long>> as_rational(double x, long long max_den = 4096) {
    if (!std::isfinite(x) || std::abs(x) > 1e6) return std::nullopt;
    long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double frac = x;
    for (int iter = 0; iter < 64; ++iter) {
        const double a_real = std::floor(frac);
        const long long a = static_cast<long long>(a_real);
        const long long p2 = a * p1 + p0;
        const long long q2 = a * q1 + q0;
        if (q2 > max_den) break;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        if (std::abs(x - static_cast<double>(p1) / static_cast<double>(q1)) < 1e-12)
            return std::make_pair(p1, q1);
        const double rem = frac - a_real;
        if (rem < 1e-15) break;
        frac = 1.0 / rem;
    }
    return std::nullopt;
}

}  // namespace

std::string fmt_real_with_rational(double x) {
    std::string s = fmt_real(x);
    if (const auto r = as_rational(x); r && r->second > 1)
        s += " (= " + std::to_string(r->first) + "/" + std::to_string(r->second) + ")";
    return s;
}

namespace {

std::size_t auto_oracle_resolution(const linalg::Dims& dims) {
    const std::size_t angles = separability::grid_angle_count(dims);
    // Keep the total grid near 5e8 points, capped at the fine end.
    double r = std::pow(5e8, 1.0 / static_cast<double>(angles));
    return static_cast<std::size_t>(std::min(40.0, std::max(4.0, std::floor(r))));
}

std::string decide_verdict(const AnalysisReport& rep) {
    if (rep.ppt && !rep.ppt->all_psd()) return "certified-inseparable-NPT";
    if (rep.witness && rep.witness->tr_w_rho0 < -1e-9 &&
        std::min(rep.witness->sample_min, rep.witness->attack_min) >= -1e-9 && rep.ppt &&
        rep.ppt->all_psd())
        return "certified-inseparable-PPT";
    return "inconclusive";
}

}  // namespace

AnalysisReport run_analysis(const ProductStateSet& set, const AnalysisOptions& opt) {
    AnalysisReport rep;
    rep.input_name = set.name;
    rep.dims = set.dims.local;
    rep.m = set.size();
    rep.seed = opt.seed;

    const std::size_t n_total = set.dims.total();
    const auto q = states::gram_q(set);
    rep.q.assign(q.size, std::vector<double>(q.size));
    for (std::size_t r = 0; r < q.size; ++r)
        for (std::size_t k = 0; k < q.size; ++k) rep.q[r][k] = q.at(r, k);

    const auto cert = states::is_unextendible(set);
    rep.cond1 = !cert.extendible() && set.size() < n_total;
    if (!rep.cond1) {
        rep.exit_code = kExitUnextendible;
        rep.verdict = "inconclusive";
        return rep;
    }

    construct::Condition2Solution c2;
    try {
        c2 = construct::solve_condition2(q);
    } catch (const std::exception&) {
        rep.cond2 = false;
        rep.exit_code = kExitConditions;
        rep.verdict = "inconclusive";
        return rep;
    }
    rep.p = c2.p.weights;

    const auto spec = construct::r_matrix_spectrum(set, c2.p);
    rep.spectrum = spec.eigenvalues;
    rep.lambda_max = spec.eigenvalues.back();
    rep.b = 1.0 / *rep.lambda_max;

    const Density mu0 = construct::mu_of_p(set, c2.p);
    const EpsilonEstimate eps = separability::epsilon_seesaw(mu0, opt.restarts, opt.seed);
    rep.epsilon_restarts = eps.restarts_used;
    rep.epsilon_converged = eps.converged;

    // The operational estimate is the best achieved product-state value over
    // the see-saw and, when enabled, the grid.
    double inf_value = eps.value;
    if (opt.use_oracle) {
        const std::size_t res =
            opt.oracle_resolution ? opt.oracle_resolution : auto_oracle_resolution(set.dims);
        const double oracle = separability::epsilon_grid_oracle(mu0, res);
        rep.epsilon_oracle = oracle;
        inf_value = std::min(inf_value, oracle);
    }
    rep.epsilon_value = inf_value;

    const ConditionsReport cond = construct::evaluate_conditions(set, c2.p, inf_value);
    rep.cond2 = cond.cond2;
    rep.cond3 = cond.cond3;
    rep.lhs = cond.lhs;
    rep.rhs = cond.rhs;
    rep.sanity_interval = cond.sanity_interval;
    rep.s0 = cond.s0;
    rep.c = cond.tr_mu0_sq;

    const auto refl = construct::reflect_through_identity(mu0, 1.0 / *rep.lambda_max);
    rep.ppt = separability::is_ppt(refl.rho);

    const bool conditions_ok = cond.cond2 && cond.cond3 && inf_value >= kEpsilonFloor;
    if (conditions_ok) {
        const auto wit = construct::build_witness(set, c2.p, inf_value);
        const auto val = separability::validate_witness(
            wit.mat, set.dims, opt.witness_samples,
            rng::SplitMix64(opt.seed ^ 0x57A7E5EEDULL).next(), opt.attack_restarts);
        WitnessSummary ws;
        ws.s0 = wit.s0;
        ws.c0 = wit.c0;
        ws.tr_w_rho0 = (wit.mat * wit.rho0.mat).trace().real();
        ws.sample_min = val.sample_min;
        ws.attack_min = val.attack_min;
        rep.witness = ws;
    }

    if (q.is_identity(1e-12)) {
        // Orthonormal case: thresholds live on the m-scaled epsilon.
        const double eps_m = static_cast<double>(set.size()) * inf_value;
        Thresholds th;
        th.p_max_bound = construct::pmax_threshold(n_total, set.size(), eps_m);
        th.t_b = construct::frustum_threshold(n_total, set.size(), c2.p.max(), cond.s0);
        rep.thresholds = th;
    }

    rep.verdict = decide_verdict(rep);
    rep.exit_code = conditions_ok ? kExitOk : kExitConditions;

    if (opt.conservative && conditions_ok) {
        const double eps_scaled = 0.99 * inf_value;
        ConservativeCheck cc;
        cc.epsilon = eps_scaled;
        AnalysisReport shadow = rep;
        shadow.witness.reset();
        try {
            const ConditionsReport cond2 = construct::evaluate_conditions(set, c2.p, eps_scaled);
            if (cond2.cond2 && cond2.cond3 && eps_scaled >= kEpsilonFloor) {
                const auto wit = construct::build_witness(set, c2.p, eps_scaled);
                const auto val = separability::validate_witness(
                    wit.mat, set.dims, opt.witness_samples,
                    rng::SplitMix64(opt.seed ^ 0xC0A5E77EULL).next(), opt.attack_restarts);
                WitnessSummary ws;
                ws.s0 = wit.s0;
                ws.c0 = wit.c0;
                ws.tr_w_rho0 = (wit.mat * wit.rho0.mat).trace().real();
                ws.sample_min = val.sample_min;
                ws.attack_min = val.attack_min;
                shadow.witness = ws;
            }
        } catch (const std::exception&) {
            shadow.witness.reset();
        }
        cc.verdict = decide_verdict(shadow);
        cc.stable = (cc.verdict == rep.verdict);
        rep.conservative = cc;
    }

    return rep;
}

namespace {

json ppt_to_json(const PptReport& ppt) {
    json out;
    json verdicts = json::array();
    for (const auto& v : ppt.verdicts) {
        json jv;
        jv["subset"] = v.subset;
        jv["psd"] = v.psd;
        jv["min_eigenvalue"] = v.min_eigenvalue;
        verdicts.push_back(jv);
    }
    out["verdicts"] = verdicts;
    out["all_psd"] = ppt.all_psd();
    return out;
}

template <typename T>
json opt_json(const std::optional<T>& v) {
    if (v) return *v;
    return nullptr;
}

}  // namespace

std::string to_json_string(const AnalysisReport& rep) {
    json j;
    j["input"] = {{"name", rep.input_name}, {"dims", rep.dims}, {"m", rep.m}};
    j["q"] = rep.q;
    j["p"] = opt_json(rep.p);
    j["c"] = opt_json(rep.c);
    if (rep.spectrum) {
        j["spectrum"] = {{"eigenvalues", *rep.spectrum},
                         {"lambda_max", opt_json(rep.lambda_max)},
                         {"b", opt_json(rep.b)}};
    } else {
        j["spectrum"] = nullptr;
    }
    j["conditions"] = {{"cond1", rep.cond1},
                       {"cond2", opt_json(rep.cond2)},
                       {"cond3", opt_json(rep.cond3)},
                       {"lhs", opt_json(rep.lhs)},
                       {"rhs", opt_json(rep.rhs)},
                       {"sanity_interval", opt_json(rep.sanity_interval)}};
    j["epsilon"] = {{"value", opt_json(rep.epsilon_value)},
                    {"oracle_value", opt_json(rep.epsilon_oracle)},
                    {"restarts_used", rep.epsilon_restarts},
                    {"converged", rep.epsilon_converged}};
    j["s0"] = opt_json(rep.s0);
    if (rep.witness) {
        j["witness"] = {{"s0", rep.witness->s0},
                        {"c0", rep.witness->c0},
                        {"tr_w_rho0", rep.witness->tr_w_rho0},
                        {"sample_min", rep.witness->sample_min},
                        {"attack_min", rep.witness->attack_min}};
    } else {
        j["witness"] = nullptr;
    }
    j["ppt"] = rep.ppt ? ppt_to_json(*rep.ppt) : json(nullptr);
    if (rep.thresholds) {
        j["thresholds"] = {{"p_max_bound", rep.thresholds->p_max_bound},
                           {"t_b", rep.thresholds->t_b}};
    } else {
        j["thresholds"] = nullptr;
    }
    if (rep.conservative) {
        j["conservative"] = {{"epsilon", rep.conservative->epsilon},
                             {"verdict", rep.conservative->verdict},
                             {"stable", rep.conservative->stable}};
    } else {
        j["conservative"] = nullptr;
    }
    j["verdict"] = rep.verdict;
    j["exit_code"] = rep.exit_code;
    j["seed"] = rep.seed;
    return j.dump(2);
}

std::string to_text(const AnalysisReport& rep) {
    std::ostringstream out;
    out << "input: " << rep.input_name << "  dims=";
    for (std::size_t i = 0; i < rep.dims.size(); ++i)
        out << (i ? "x" : "") << rep.dims[i];
    out << "  m=" << rep.m << "\n";

    out << "Q =\n";
    for (const auto& row : rep.q) {
        out << "  [";
        for (std::size_t k = 0; k < row.size(); ++k)
            out << (k ? ", " : " ") << fmt_real(row[k]);
        out << " ]\n";
    }

    out << "condition 1 (no orthogonal product vector): " << (rep.cond1 ? "true" : "false")
        << "\n";
    if (!rep.cond1) {
        out << "verdict: " << rep.verdict << "\n";
        return out.str();
    }

    if (rep.p) {
        out << "p =";
        for (const double w : *rep.p) out << " " << fmt_real_with_rational(w);
        out << "\n";
    }
    if (rep.c) out << "Tr(mu0^2) = " << fmt_real_with_rational(*rep.c) << "\n";
    if (rep.spectrum) {
        out << "spectrum =";
        for (const double e : *rep.spectrum) out << " " << fmt_real(e);
        out << "\n";
        out << "lambda_max = " << fmt_real(*rep.lambda_max) << "  b = " << fmt_real(*rep.b)
            << "\n";
    }
    if (rep.epsilon_value) {
        out << "epsilon (best product-state value of Tr(mu0 sigma)) = "
            << fmt_real(*rep.epsilon_value) << "  [restarts=" << rep.epsilon_restarts
            << ", converged=" << (rep.epsilon_converged ? "yes" : "no") << "]\n";
        if (rep.epsilon_oracle)
            out << "epsilon grid oracle = " << fmt_real(*rep.epsilon_oracle) << "\n";
    }
    if (rep.cond2)
        out << "condition 2 (constant Qp): " << (*rep.cond2 ? "true" : "false") << "\n";
    if (rep.cond3) {
        out << "condition 3: " << (*rep.cond3 ? "true" : "false")
            << "  lhs = " << fmt_real(*rep.lhs) << "  rhs = " << fmt_real(*rep.rhs) << "\n";
        out << "sanity 0 < N*inf < 1: " << (*rep.sanity_interval ? "true" : "false") << "\n";
    }
    if (rep.s0) out << "s0 = " << fmt_real(*rep.s0) << "\n";
    if (rep.ppt) {
        out << "partial transposes of rho0:\n";
        for (const auto& v : rep.ppt->verdicts) {
            out << "  T{";
            for (std::size_t i = 0; i < v.subset.size(); ++i)
                out << (i ? "," : "") << v.subset[i];
            out << "}: min eig = " << fmt_real(v.min_eigenvalue)
                << (v.psd ? " (psd)" : " (negative)") << "\n";
        }
    }
    if (rep.witness) {
        out << "witness: s0 = " << fmt_real(rep.witness->s0)
            << "  c0 = " << fmt_real(rep.witness->c0)
            << "  Tr(W rho0) = " << fmt_real(rep.witness->tr_w_rho0) << "\n";
        out << "witness attack: sample min = " << fmt_real(rep.witness->sample_min)
            << "  see-saw min = " << fmt_real(rep.witness->attack_min) << "\n";
    } else {
        out << "witness: not constructed (witness inconclusive)\n";
    }
    if (rep.thresholds) {
        out << "p_max bound = " << fmt_real(rep.thresholds->p_max_bound)
            << "  t(b) = " << fmt_real(rep.thresholds->t_b) << "\n";
    }
    if (rep.conservative) {
        out << "conservative recheck (0.99 * epsilon): verdict = " << rep.conservative->verdict
            << (rep.conservative->stable ? " [stable]" : " [UNSTABLE]") << "\n";
    }
    out << "verdict: " << rep.verdict << "\n";
    return out.str();
}

FrustumSweep frustum_sweep(const ProductStateSet& set, std::size_t steps,
                           std::size_t restarts, std::uint64_t seed) {
    if (steps < 1) throw std::invalid_argument("frustum_sweep: steps < 1");
    const auto q = states::gram_q(set);
    if (!q.is_identity(1e-12))
        throw std::invalid_argument("frustum_sweep: needs an orthonormal family");

    const std::size_t m = set.size();
    const std::size_t n_total = set.dims.total();
    const PVec p = PVec::uniform(m);
    const Density mu0 = construct::mu_of_p(set, p);
    const EpsilonEstimate eps = separability::epsilon_seesaw(mu0, restarts, seed);

    FrustumSweep sweep;
    sweep.input_name = set.name;
    sweep.infimum = eps.value;
    sweep.s0 = 1.0 - static_cast<double>(n_total) * eps.value;
    sweep.t_threshold =
        construct::frustum_threshold(n_total, m, p.max(), sweep.s0);  // equals s0 here

    const auto rho_b = construct::rho_of_p(set, p, construct::b_from_pmax(p)).rho;
    for (std::size_t i = 0; i <= steps; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(steps);
        const Density lam = construct::lambda_of_t(rho_b, t);
        FrustumRow row;
        row.t = t;
        row.trace_mu0_lambda = linalg::trace_inner(mu0.mat, lam.mat);
        const auto ppt = separability::is_ppt(lam);
        row.ppt_min_eig = ppt.min_eigenvalue();
        row.above_threshold = t > sweep.t_threshold;
        if (i == 0) {
            row.classification = "separable-known-ball";
        } else if (row.above_threshold && row.trace_mu0_lambda < eps.value) {
            row.classification = ppt.all_psd() ? "certified-inseparable-ppt"
                                               : "certified-inseparable-npt";
        } else {
            row.classification = "uncertified";
        }
        sweep.rows.push_back(row);
    }
    return sweep;
}

std::string frustum_csv(const FrustumSweep& sweep) {
    std::ostringstream out;
    out << "# family=" << sweep.input_name << " infimum=" << fmt_real(sweep.infimum)
        << " s0=" << fmt_real(sweep.s0) << " t_threshold=" << fmt_real(sweep.t_threshold)
        << "\n";
    out << "t,trace_mu0_lambda,ppt_min_eig,above_threshold,classification\n";
    for (const auto& row : sweep.rows) {
        out << fmt_real(row.t) << "," << fmt_real(row.trace_mu0_lambda) << ","
            << fmt_real(row.ppt_min_eig) << "," << (row.above_threshold ? 1 : 0) << ","
            << row.classification << "\n";
    }
    return out.str();
}

}  // namespace upbwit::report
