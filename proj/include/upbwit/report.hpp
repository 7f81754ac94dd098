// report.hpp — the end-to-end pipeline: Gram form, weight solve, spectrum,
// separable-infimum estimate, condition evaluation, reflection, PPT report,
// witness construction and validation, thresholds, and the final verdict,
// rendered as text and as JSON.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "upbwit/construct.hpp"
#include "upbwit/separability.hpp"
#include "upbwit/states.hpp"

namespace upbwit::report {

using construct::ConditionsReport;
using separability::EpsilonEstimate;
using separability::PptReport;
using states::ProductStateSet;

inline constexpr int kExitOk = 0;
inline constexpr int kExitParse = 2;
inline constexpr int kExitUnextendible = 3;
inline constexpr int kExitConditions = 4;

/// Minimum acceptable infimum estimate before a witness is constructed; a
/// vanishing estimate means the set is not behaving like an unextendible one.
inline constexpr double kEpsilonFloor = 1e-6;

struct AnalysisOptions {
    std::size_t restarts = 256;
    std::uint64_t seed = 0;
    bool use_oracle = false;
    std::size_t oracle_resolution = 0;  // 0 = choose from the angle count
    bool conservative = false;
    std::size_t witness_samples = 100000;
    std::size_t attack_restarts = 256;
};

struct WitnessSummary {
    double s0 = 0.0;
    double c0 = 0.0;
    double tr_w_rho0 = 0.0;
    double sample_min = 0.0;
    double attack_min = 0.0;
};

struct Thresholds {
    double p_max_bound = 0.0;
    double t_b = 0.0;
};

struct ConservativeCheck {
    double epsilon = 0.0;
    std::string verdict;
    bool stable = false;
};

struct AnalysisReport {
    std::string input_name;
    std::vector<std::size_t> dims;
    std::size_t m = 0;

    std::vector<std::vector<double>> q;
    std::optional<std::vector<double>> p;
    std::optional<double> c;  // Tr(mu0^2)
    std::optional<std::vector<double>> spectrum;
    std::optional<double> lambda_max;
    std::optional<double> b;

    bool cond1 = false;
    std::optional<bool> cond2;
    std::optional<bool> cond3;
    std::optional<double> lhs;
    std::optional<double> rhs;
    std::optional<bool> sanity_interval;
    std::optional<double> s0;

    std::optional<double> epsilon_value;
    std::optional<double> epsilon_oracle;
    std::size_t epsilon_restarts = 0;
    bool epsilon_converged = false;

    std::optional<WitnessSummary> witness;
    std::optional<PptReport> ppt;  // for rho0
    std::optional<Thresholds> thresholds;
    std::optional<ConservativeCheck> conservative;

    std::string verdict = "inconclusive";
    int exit_code = kExitOk;

    std::uint64_t seed = 0;
};

AnalysisReport run_analysis(const ProductStateSet& set, const AnalysisOptions& opt);

std::string to_json_string(const AnalysisReport& rep);
std::string to_text(const AnalysisReport& rep);

struct FrustumRow {
    double t = 0.0;
    double trace_mu0_lambda = 0.0;
    double ppt_min_eig = 0.0;
    bool above_threshold = false;
    std::string classification;
};

struct FrustumSweep {
    std::string input_name;
    double infimum = 0.0;  // measured inf Tr(mu0 sigma) = eps/m
    double s0 = 0.0;
    double t_threshold = 0.0;
    std::vector<FrustumRow> rows;
};

/// Sweep of (1-t) D0 + t rho(b) over steps+1 points of [0,1] for an
/// orthonormal family (b = m, uniform weights); refuses non-orthonormal
/// input.
FrustumSweep frustum_sweep(const ProductStateSet& set, std::size_t steps,
                           std::size_t restarts, std::uint64_t seed);

std::string frustum_csv(const FrustumSweep& sweep);

/// 12 significant digits, negative zero normalized.
std::string fmt_real(double x);
/// Appends an exact small-denominator rational when one matches to 1e-12,
/// e.g. "0.375 (= 3/8)".
std::string fmt_real_with_rational(double x);

}  // namespace upbwit::report
