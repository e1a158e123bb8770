/*
   Copyright 2026 The fock-feedback Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <fstream>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>

#include "fock_feedback/montecarlo.hpp"
#include "fock_feedback/verify.hpp"

namespace {

using namespace fockfb;

struct Options {
    double phi0 = 0.0;
    double theta0 = 0.0;
    bool phi0_set = false;
    bool theta0_set = false;
    int nbar = 10;
    double epsilon = 1e3;
    std::vector<double> epsilons;
    int horizon = 0;
    bool horizon_set = false;
    std::uint64_t seed = 0;
    int realizations = 5000;
    double threshold = 0.9;
    double a = 0.4;
    int n0 = 15;
    int r0 = 0;
    std::string out;
    std::string format = "csv";
    std::string censor = "exclude";
    int workers = 1;
    bool quick = false;
    bool true_pi = false;
};

InteractionParams resolve_params(const Options &opt)
{
    InteractionParams p = InteractionParams::benchmark(opt.nbar, opt.true_pi);
    const double phi0 = opt.phi0_set ? opt.phi0 : p.phi0;
    const double theta0 = opt.theta0_set ? opt.theta0 : p.theta0;
    return InteractionParams::theorem_compliant(phi0, theta0, opt.nbar);
}

std::vector<std::pair<std::string, std::string>>
resolve_metadata(const Options &opt, const InteractionParams &params,
                 int horizon)
{
    auto fmt = [](double x) { return detail::format_double(x); };
    return {
        {"phi0", fmt(params.phi0)},
        {"phiR", fmt(params.phiR)},
        {"theta0", fmt(params.theta0)},
        {"nbar", std::to_string(params.nbar)},
        {"epsilon", fmt(opt.epsilon)},
        {"horizon", std::to_string(horizon)},
        {"seed", std::to_string(opt.seed)},
        {"threshold", fmt(opt.threshold)},
        {"initial_state", "uniform " + std::to_string(opt.r0) + ".." +
                              std::to_string(opt.r0 + opt.n0)},
    };
}

RunConfig resolve_run(const Options &opt, int default_horizon)
{
    RunConfig rc{State{DiagonalState::uniform(opt.r0, opt.r0 + opt.n0)},
                 resolve_params(opt),
                 ControllerConfig{opt.nbar, opt.epsilon}};
    rc.horizon = opt.horizon_set ? opt.horizon : default_horizon;
    rc.seed = opt.seed;
    rc.settle_threshold = opt.threshold;
    return rc;
}

int cmd_simulate(const Options &opt)
{
    if (opt.format != "csv") {
        std::cerr << "simulate writes CSV only (got --format " << opt.format
                  << ")\n";
        return 1;
    }
    const RunConfig rc = resolve_run(opt, 120);
    const Trajectory traj = simulate_closed_loop(rc);

    const std::string path = opt.out.empty() ? "trajectory.csv" : opt.out;
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        std::cerr << "cannot open " << path << " for writing\n";
        return 1;
    }
    write_trajectory_csv(os, traj,
                         resolve_metadata(opt, rc.params, rc.horizon));
    if (!os) {
        std::cerr << "write failed: " << path << "\n";
        return 1;
    }
    if (traj.settled_at)
        std::cout << "settling_time " << *traj.settled_at << "\n";
    else
        std::cout << "censored\n";
    std::cout << "wrote " << path << "\n";
    return 0;
}

int cmd_sweep(const Options &opt)
{
    SweepConfig sc;
    sc.epsilons = opt.epsilons.empty()
                      ? std::vector<double>{0.0, 0.1, 1.0, 10.0, 1e2, 1e3,
                                            1e4, 1e5}
                      : opt.epsilons;
    sc.realizations = opt.realizations;
    sc.base_run = resolve_run(opt, 10000);
    sc.base_run.stop_when_absorbed = true;
    sc.master_seed = opt.seed;
    sc.censor_policy = opt.censor == "clamp_to_horizon"
                           ? CensorPolicy::ClampToHorizon
                           : CensorPolicy::Exclude;
    sc.workers = opt.workers;

    const SweepSummary summary = run_sweep(sc);

    std::cout << "epsilon      mean_ks    stddev_ks  settled censored\n";
    for (const SweepRow &r : summary.rows) {
        std::cout << std::setw(10) << r.epsilon << "  " << std::setw(9)
                  << r.mean_ks << "  " << std::setw(9) << r.stddev_ks << "  "
                  << std::setw(7) << r.settled << " " << std::setw(8)
                  << r.censored << "\n";
    }

    const bool json = opt.format == "json";
    const std::string path =
        opt.out.empty() ? (json ? "sweep.json" : "sweep.csv") : opt.out;
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        std::cerr << "cannot open " << path << " for writing\n";
        return 1;
    }
    if (json) {
        os << sweep_to_json(sc, summary).dump(2) << "\n";
    } else {
        auto metadata =
            resolve_metadata(opt, sc.base_run.params, sc.base_run.horizon);
        metadata.emplace_back("master_seed", std::to_string(sc.master_seed));
        metadata.emplace_back("realizations",
                              std::to_string(sc.realizations));
        metadata.emplace_back("censor_policy", to_string(sc.censor_policy));
        metadata.emplace_back("stddev_convention", "population");
        write_sweep_csv(os, summary, metadata);
    }
    if (!os) {
        std::cerr << "write failed: " << path << "\n";
        return 1;
    }
    std::cout << "wrote " << path << "\n";
    return 0;
}

int cmd_bound(const Options &opt)
{
    if (opt.epsilon <= 0.0) {
        std::cerr << "bound requires --epsilon > 0\n";
        return 1;
    }
    const InteractionParams params = resolve_params(opt);
    const BoundCertificate cert =
        bound_m0(opt.epsilon, opt.n0, opt.r0, opt.nbar, params.theta0, opt.a);
    bool member_ok = true;
    for (int n = cert.Nbar; n < cert.Nbar + cert.N0; ++n)
        member_ok = member_ok && in_band(params.theta0, cert.a, n, 1e-12);
    std::cout << "m0          " << cert.m0 << "\n"
              << "Nbar        " << cert.Nbar << "\n"
              << "N0          " << cert.N0 << "\n"
              << "N           " << cert.N << "\n"
              << "a           " << cert.a << "\n"
              << "membership  " << (member_ok ? "pass" : "FAIL") << "\n";
    return member_ok ? 0 : 1;
}

int cmd_verify(const Options &opt)
{
    VerifyOptions vo;
    vo.params = resolve_params(opt);
    vo.epsilon = opt.epsilon;
    vo.seed = opt.seed == 0 ? 42 : opt.seed;
    vo.quick = opt.quick;
    const auto results = run_verification(vo);
    int failures = 0;
    for (const PropertyResult &r : results) {
        const char *tag = "PASS";
        if (r.status == PropertyResult::Status::Fail) {
            tag = "FAIL";
            ++failures;
        } else if (r.status == PropertyResult::Status::Skip) {
            tag = "SKIP";
        }
        std::cout << "[" << tag << "] " << r.name << ": " << r.detail << "\n";
    }
    if (failures > 0) {
        std::cout << failures << " properties failed\n";
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Photon-number state stabilization: closed-loop simulation, "
                 "settling-time sweeps, support bounds and invariant checks"};
    app.require_subcommand(1);
    app.fallthrough();

    Options opt;
    app.set_config("--config");
    auto *phi0_opt =
        app.add_option("--phi0", opt.phi0, "Dispersive phase per photon");
    auto *theta0_opt =
        app.add_option("--theta0", opt.theta0, "Resonant pulse angle");
    app.add_option("--nbar", opt.nbar, "Goal photon number")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--epsilon", opt.epsilon, "Feedback gain epsilon");
    app.add_option("--epsilons", opt.epsilons,
                   "Comma-separated epsilon grid for sweeps")
        ->delimiter(',');
    auto *horizon_opt =
        app.add_option("--horizon", opt.horizon, "Maximum sample steps")
            ->check(CLI::PositiveNumber);
    app.add_option("--seed", opt.seed, "Master seed");
    app.add_option("--realizations", opt.realizations,
                   "Realizations per epsilon")
        ->check(CLI::PositiveNumber);
    app.add_option("--threshold", opt.threshold,
                   "Settling threshold on the goal population")
        ->check(CLI::Range(0.0, 1.0));
    app.add_option("--a", opt.a, "Band half-width for the support bound")
        ->check(CLI::Range(0.0, 0.5));
    app.add_option("--n0", opt.n0, "Initial support length")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--r0", opt.r0, "Initial support offset")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--out", opt.out, "Output file path");
    app.add_option("--format", opt.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--censor", opt.censor, "Censored-run policy for sweeps")
        ->check(CLI::IsMember({"exclude", "clamp_to_horizon"}));
    app.add_option("--workers", opt.workers, "Worker threads for sweeps")
        ->envname("FOCK_FEEDBACK_WORKERS")
        ->check(CLI::PositiveNumber);
    app.add_flag("--quick", opt.quick, "Reduced sample counts for verify");
    app.add_flag("--true-pi", opt.true_pi,
                 "Use pi instead of 3.14 in the default pulse parameters");

    auto *simulate = app.add_subcommand(
        "simulate", "One closed-loop realization, written as CSV");
    auto *sweep = app.add_subcommand(
        "sweep", "Settling-time statistics over an epsilon grid");
    auto *bound = app.add_subcommand(
        "bound", "Constructive support bound m0 with membership check");
    auto *verify =
        app.add_subcommand("verify", "Run the full invariant suite");

    CLI11_PARSE(app, argc, argv);
    opt.phi0_set = phi0_opt->count() > 0;
    opt.theta0_set = theta0_opt->count() > 0;
    opt.horizon_set = horizon_opt->count() > 0;

    try {
        if (simulate->parsed())
            return cmd_simulate(opt);
        if (sweep->parsed())
            return cmd_sweep(opt);
        if (bound->parsed())
            return cmd_bound(opt);
        if (verify->parsed())
            return cmd_verify(opt);
    } catch (const std::exception &ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 1;
}
