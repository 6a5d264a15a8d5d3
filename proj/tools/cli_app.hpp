#pragma once

#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "symiso/fixtures.hpp"
#include "symiso/suites.hpp"

namespace symiso::cli {

enum ExitCode : int { kPass = 0, kFail = 1, kUsage = 2 };

namespace detail {

inline json read_json(const std::string& path) {
    std::string text;
    if (path == "-") {
        text.assign(std::istreambuf_iterator<char>(std::cin), {});
    } else {
        std::ifstream in(path);
        if (!in) throw Error(Errc::InvalidArgument, "cannot open '" + path + "'");
        text.assign(std::istreambuf_iterator<char>(in), {});
    }
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(Errc::InvalidArgument, "malformed JSON in '" + path + "': " + e.what());
    }
}

/// A map document, or the output of `jordan random` / `isometry synth` that wraps one under "map".
inline LinearMap read_map(const std::string& path) {
    const auto j = read_json(path);
    if (j.is_object() && j.contains("map") && !j.contains("domain")) return map_from_json(j.at("map"));
    return map_from_json(j);
}

/// A step function, or an operator whose mu is taken.
inline StepFunction read_profile(const std::string& path) {
    const auto j = read_json(path);
    if (j.is_object() && j.contains("blocks")) return mu(operator_from_json(j));
    return step_from_json(j);
}

inline void apply_tolerance(Tolerances& t, const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error(Errc::InvalidArgument, "--tol expects name=value, got '" + kv + "'");
    const std::string name = kv.substr(0, eq);
    double value = 0.0;
    try {
        value = std::stod(kv.substr(eq + 1));
    } catch (const std::exception&) {
        throw Error(Errc::InvalidArgument, "--tol value is not a number: '" + kv + "'");
    }
    if (!(value > 0.0)) throw Error(Errc::InvalidArgument, "--tol value must be positive");
    if (name == "alg") t.alg = value;
    else if (name == "maj") t.maj = value;
    else if (name == "norm") t.norm = value;
    else if (name == "jordan") t.jordan = value;
    else if (name == "iso") t.iso = value;
    else throw Error(Errc::InvalidArgument, "unknown tolerance '" + name + "'");
}

inline json error_json(const std::string& kind, const std::string& message) {
    return {{"error", {{"kind", kind}, {"message", message}}}};
}

}  // namespace detail

/// Runs the command line `args` (without the program name). JSON results go
/// to `out` (or the --out file), progress and help text to `err`.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Majorization, symmetric norms and order-preserving isometries on finite weighted matrix algebras",
                 "symiso"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(kVersion));

    std::string out_path;
    std::vector<std::string> tol_overrides;
    app.add_option("-o,--out", out_path, "Write the JSON result to this file instead of stdout");
    app.add_option("--tol", tol_overrides, "Tolerance override name=value (alg, maj, norm, jordan, iso)")
        ->expected(1)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);

    std::string op_path, spec_path, f_path, g_path, map_path, plan_path, e_path, fnorm_path;
    bool log_mode = false, onto = false, allow_uncalibrated = false, inject_fault = false;
    std::uint64_t seed = 0;
    int trials = 0, jobs = 1, max_blocks = 3, max_dim = 3;
    std::vector<std::string> only;

    auto* mu_cmd = app.add_subcommand("mu", "Generalised singular value function of an operator");
    mu_cmd->add_option("op", op_path, "Operator JSON")->required();

    auto* norm_cmd = app.add_subcommand("norm", "Evaluate a symmetric norm");
    norm_cmd->add_option("spec", spec_path, "Norm spec JSON")->required();
    norm_cmd->add_option("op", op_path, "Operator or step-function JSON")->required();

    auto* maj_cmd = app.add_subcommand("majorize", "Check f <<  g (or f <<_log g with --log)");
    maj_cmd->add_flag("--log", log_mode, "Logarithmic submajorization");
    maj_cmd->add_option("f", f_path, "Step function or operator JSON")->required();
    maj_cmd->add_option("g", g_path, "Step function or operator JSON")->required();

    auto* det_cmd = app.add_subcommand("det", "Fuglede-Kadison determinant");
    det_cmd->add_option("op", op_path, "Operator JSON")->required();

    auto* jordan_cmd = app.add_subcommand("jordan", "Jordan *-homomorphisms");
    jordan_cmd->require_subcommand(1);
    auto* jverify = jordan_cmd->add_subcommand("verify", "Certify a linear map as a Jordan *-homomorphism");
    jverify->add_option("map", map_path, "Linear map JSON")->required();
    jverify->add_option("--seed", seed, "Seed for the random probes");
    auto* jsplit = jordan_cmd->add_subcommand("split", "Central hom / anti-hom decomposition");
    jsplit->add_option("map", map_path, "Linear map JSON")->required();
    jsplit->add_option("--seed", seed, "Seed for the random probes");
    auto* jrandom = jordan_cmd->add_subcommand("random", "Jordan map from a plan (given or random)");
    jrandom->add_option("--plan", plan_path, "Plan JSON; a random plan is drawn if omitted");
    jrandom->add_option("--seed", seed, "Seed for the random plan");
    jrandom->add_option("--max-blocks", max_blocks, "Random plan: maximum domain blocks")->check(CLI::PositiveNumber);
    jrandom->add_option("--max-dim", max_dim, "Random plan: maximum block dimension")->check(CLI::PositiveNumber);

    auto* iso_cmd = app.add_subcommand("isometry", "Order-preserving isometries");
    iso_cmd->require_subcommand(1);
    auto* ianalyze = iso_cmd->add_subcommand("analyze", "Decompose T = B J and check the structure");
    ianalyze->add_option("map", map_path, "Linear map JSON")->required();
    ianalyze->add_option("E", e_path, "Domain norm spec JSON")->required();
    ianalyze->add_option("F", fnorm_path, "Codomain norm spec JSON (defaults to E)");
    ianalyze->add_option("--trials", trials, "Random trials per check")->check(CLI::PositiveNumber);
    ianalyze->add_option("--seed", seed, "Seed for the random probes");
    ianalyze->add_flag("--onto", onto, "Also check that B is central (T surjective)");
    auto* isynth = iso_cmd->add_subcommand("synth", "Build T = B J from a synth spec");
    isynth->add_option("spec", spec_path, "Synth spec JSON")->required();
    isynth->add_flag("--allow-uncalibrated", allow_uncalibrated, "Skip the calibration check");
    auto* ireflect = iso_cmd->add_subcommand("reflect", "Check that T(x) >= 0 forces x >= 0");
    ireflect->add_option("map", map_path, "Invertible linear map JSON")->required();
    ireflect->add_option("--norm", fnorm_path, "Also check log-monotonicity of this norm spec");
    ireflect->add_option("--trials", trials, "Random trials")->check(CLI::PositiveNumber);
    ireflect->add_option("--seed", seed, "Seed for the random probes");

    auto* suite_cmd = app.add_subcommand("suite", "Seeded property suites");
    suite_cmd->require_subcommand(1);
    auto* srun = suite_cmd->add_subcommand("run", "Run the property suites");
    srun->add_option("--only", only, "Run only the named suite (repeatable)")
        ->expected(1)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    srun->add_option("--trials", trials, "Trials per suite (default: per-suite)")->check(CLI::PositiveNumber);
    srun->add_option("--seed", seed, "Master seed");
    srun->add_option("--jobs", jobs, "Suites run concurrently")->check(CLI::PositiveNumber);
    srun->add_flag("--inject-calibration-fault", inject_fault, "Break transpose calibration in isometry-roundtrip");
    auto* slist = suite_cmd->add_subcommand("list", "List suite names");

    auto emit = [&](const json& j) {
        const std::string text = j.dump(2) + "\n";
        if (out_path.empty()) {
            out << text;
            return;
        }
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw Error(Errc::InvalidArgument, "cannot write '" + out_path + "'");
        f << text;
    };

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        err << app.help();
        return kPass;
    } catch (const CLI::CallForAllHelp&) {
        err << app.help("", CLI::AppFormatMode::All);
        return kPass;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << "\n";
        return kPass;
    } catch (const CLI::ParseError& e) {
        out << detail::error_json("usage", e.what()).dump() << "\n";
        return kUsage;
    }

    try {
        if (!tol_overrides.empty()) {
            Tolerances t = tol();
            for (const auto& kv : tol_overrides) detail::apply_tolerance(t, kv);
            set_tolerances(t);
        }

        if (*mu_cmd) {
            emit({{"mu", to_json(mu(operator_from_json(detail::read_json(op_path))))}});
            return kPass;
        }
        if (*norm_cmd) {
            const auto spec = norm_from_json(detail::read_json(spec_path));
            const double v = evaluate_norm(spec, detail::read_profile(op_path));
            emit({{"norm", norm_name(spec)}, {"value", v}});
            return kPass;
        }
        if (*maj_cmd) {
            const auto f = detail::read_profile(f_path);
            const auto g = detail::read_profile(g_path);
            const auto v = log_mode ? log_submajorizes(f, g) : submajorizes(f, g);
            json j = to_json(v);
            j["relation"] = log_mode ? "log-submajorization" : "submajorization";
            emit(j);
            return v.holds ? kPass : kFail;
        }
        if (*det_cmd) {
            emit({{"det", fk_determinant(operator_from_json(detail::read_json(op_path)))}});
            return kPass;
        }
        if (*jverify) {
            const auto v = verify_jordan(detail::read_map(map_path), seed);
            emit(to_json(v));
            return v.passed ? kPass : kFail;
        }
        if (*jsplit) {
            const auto v = verify_jordan(detail::read_map(map_path), seed);
            if (!v.passed) {
                emit({{"verification", to_json(v)}});
                return kFail;
            }
            const auto J = with_split(*v.jordan, seed);
            emit({{"verification", to_json(v)}, {"split", to_json(*J.split)}});
            return kPass;
        }
        if (*jrandom) {
            JordanPlan plan;
            if (!plan_path.empty()) {
                plan = plan_from_json(detail::read_json(plan_path));
            } else {
                auto rng = derive_rng(seed, "cli/jordan-random", 0);
                plan = random_plan(rng, max_blocks, max_dim);
            }
            const auto J = random_jordan(plan);
            emit({{"plan", to_json(plan)}, {"map", to_json(J.map)}});
            return kPass;
        }
        if (*ianalyze) {
            const auto T = detail::read_map(map_path);
            const auto E = norm_from_json(detail::read_json(e_path));
            const auto F = fnorm_path.empty() ? E : norm_from_json(detail::read_json(fnorm_path));
            const auto a = analyze(T, E, F, trials > 0 ? trials : 200, seed);
            json j = to_json(a);
            bool ok = a.ok();
            if (onto) {
                const auto c = central_B_check(a, true);
                j["central_B"] = to_json(c);
                ok = ok && (!c.applicable || c.passed);
            }
            emit(j);
            return ok ? kPass : kFail;
        }
        if (*isynth) {
            const auto spec = synth_from_json(detail::read_json(spec_path));
            const auto s = synthesize(spec, !allow_uncalibrated);
            emit({{"map", to_json(s.map)}, {"calibrated", s.calibrated}});
            return kPass;
        }
        if (*ireflect) {
            const auto T = detail::read_map(map_path);
            std::optional<NormSpec> F;
            if (!fnorm_path.empty()) F = norm_from_json(detail::read_json(fnorm_path));
            const auto r = check_surjective_reflection(T, trials > 0 ? trials : 500, seed, F);
            emit(to_json(r));
            return r.passed ? kPass : kFail;
        }
        if (*slist) {
            json names = json::array();
            for (const auto& e : suites::registry()) names.push_back(e.name);
            emit({{"suites", names}});
            return kPass;
        }
        if (*srun) {
            SuiteRunConfig cfg;
            cfg.options.seed = seed;
            if (trials > 0) cfg.options.trials = trials;
            cfg.options.inject_calibration_fault = inject_fault;
            cfg.only = only;
            cfg.jobs = jobs;
            const auto report = run_suites(cfg, [&err](const SuiteResult& r) {
                err << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << r.trials << " trials, " << r.failures
                    << " failures)\n";
            });
            emit(report);
            return report.at("passed").get<bool>() ? kPass : kFail;
        }
    } catch (const Error& e) {
        out << detail::error_json(errc_name(e.code()), e.what()).dump() << "\n";
        return kUsage;
    } catch (const json::exception& e) {
        out << detail::error_json("json", e.what()).dump() << "\n";
        return kUsage;
    }
    out << detail::error_json("usage", "no command").dump() << "\n";
    return kUsage;
}

}  // namespace symiso::cli
