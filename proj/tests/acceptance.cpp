// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <cstdio>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>

#include "../tools/cli_app.hpp"
#include "symiso/fixtures.hpp"

using namespace symiso;

namespace {

// Pinned tolerances.
constexpr double kMuGridTol = 1e-9;
constexpr double kSlackTol = -1e-8;
constexpr double kVerifyResidual = 1e-10;
constexpr double kAbsResidual = 1e-9;
constexpr double kCommutingResidual = 1e-8;
constexpr double kFactorizationResidual = 1e-8;
constexpr double kSupportResidual = 1e-8;
constexpr std::uint64_t kSeed = 42;

struct Report {
    int code = 0;
    std::string text;
    json doc;
};

Report suite_run(const std::vector<std::string>& extra = {}) {
    std::vector<std::string> args = {"suite", "run", "--seed", std::to_string(kSeed)};
    args.insert(args.end(), extra.begin(), extra.end());
    std::ostringstream out, err;
    Report r;
    r.code = cli::run(args, out, err);
    r.text = out.str();
    r.doc = json::parse(r.text);
    std::cerr << err.str();
    return r;
}

const json& suite(const json& report, const std::string& name) {
    for (const auto& s : report.at("suites"))
        if (s.at("name") == name) return s;
    throw std::runtime_error("suite missing from report: " + name);
}

bool clean(const json& s, int trials) { return s.at("passed").get<bool>() && s.at("failures") == 0 && s.at("trials") == trials; }

double metric(const json& s, const char* key) {
    const auto& v = s.at("metrics").at(key);
    return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
}

int failed = 0;

void line(int id, const char* name, bool ok, const std::string& detail) {
    std::printf("%s %2d %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
    if (!ok) ++failed;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

}  // namespace

int main() {
    const auto first = suite_run();
    const auto& rep = first.doc;

    {
        const auto& s = suite(rep, "mu-oracle");
        const double b = metric(s, "max_dev_breakpoints"), g = metric(s, "max_dev_grid");
        line(1, "mu-oracle", clean(s, 500) && b == 0.0 && g <= kMuGridTol,
             fmt("breakpoint dev %.3g, grid dev %.3g over %.0f operators", b, g, s.at("trials").get<double>()));
    }
    {
        const auto& s = suite(rep, "sandwich-logmaj");
        const double m = metric(s, "min_finite_slack");
        line(2, "sandwich-logmaj", clean(s, 1000) && !(m < kSlackTol),
             fmt("%.0f/1000 hold, min finite slack %.3g", 1000.0 - s.at("failures").get<double>(), m));
    }
    {
        const auto& s = suite(rep, "det-monotone");
        line(3, "det-monotone", clean(s, 1000), fmt("max det(b)/det(a) = %.6g", metric(s, "max_det_ratio")));
    }
    {
        const auto& s = suite(rep, "product-logmaj");
        line(4, "product-logmaj", clean(s, 1000), fmt("%.0f failures in 1000 pairs", s.at("failures").get<double>()));
    }
    {
        const auto& p = suite(rep, "power-transfer");
        const auto& c = suite(rep, "convex-transfer");
        const double ap = metric(p, "applicable_pairs"), ac = metric(c, "applicable_pairs");
        line(5, "power/convex transfer", clean(p, 500) && clean(c, 500) && ap > 0 && ac > 0,
             fmt("power %.0f applicable, convex %.0f applicable, %.0f failures", ap, ac,
                 p.at("failures").get<double>() + c.at("failures").get<double>()));
    }
    {
        const auto& s = suite(rep, "slm-all-variants");
        bool per = true;
        for (const auto& [k, v] : s.at("metrics").at("trials_per_variant").items()) per = per && v == 500;
        line(6, "slm-all-variants", per && s.at("passed").get<bool>() && s.at("failures") == 0,
             fmt("%.0f variants x 500 strict pairs, %.0f failures",
                 static_cast<double>(s.at("metrics").at("trials_per_variant").size()), s.at("failures").get<double>()));
    }
    {
        const auto& s = suite(rep, "sum-diff");
        const double d = metric(s, "disjoint_pairs_equal"), gc = metric(s, "generic_pairs_checked"),
                     gd = metric(s, "generic_pairs_distinct"), v = metric(s, "lemma_violations");
        line(7, "sum-diff", clean(s, 1000) && d == 500 && gc == 500 && gd == 500 && v == 0,
             fmt("disjoint equal %.0f/500, overlapping distinct %.0f/500, violations %.0f", d, gd, v));
    }
    {
        const auto& j = suite(rep, "jordan-roundtrip");
        const auto& st = suite(rep, "stormer-roundtrip");
        const double vr = metric(j, "max_verify_residual"), ar = metric(j, "max_abs_residual"),
                     cr = metric(j, "max_commuting_residual");
        const double rec = metric(st, "recovered");
        line(8, "jordan/stormer round trip",
             clean(j, 100) && clean(st, 100) && vr <= kVerifyResidual && ar <= kAbsResidual && cr <= kCommutingResidual &&
                 rec == 100,
             fmt("verify %.2g, |J(x)| %.2g, commuting %.2g", vr, ar, cr) + fmt(", split recovered %.0f/100", rec));
    }
    {
        const auto& s = suite(rep, "isometry-roundtrip");
        const double f = metric(s, "max_factorization_residual"), sp = metric(s, "max_support_identity_residual");
        line(9, "isometry round trip", clean(s, 100) && f <= kFactorizationResidual && sp <= kSupportResidual,
             fmt("factorization %.2g, support identities %.2g, %.0f failures", f, sp, s.at("failures").get<double>()));
    }
    {
        const auto& s = suite(rep, "surjective-reflection");
        const bool control = s.at("metrics").at("control_detected").get<bool>();
        line(10, "surjective reflection", clean(s, 500) && control,
             fmt("%.0f/500 pass, ", 500.0 - s.at("failures").get<double>()) + "counterexample " +
                 (control ? "detected" : "MISSED"));
    }
    {
        const auto v = verify_jordan(fixtures::normalized_trace_map(2));
        const bool jordan_neg = !v.passed && v.witness.has_value();
        const auto a = analyze(fixtures::symmetrizer_map(), LpNorm{1.0}, LpNorm{1.0}, 200, kSeed);
        const bool iso_neg = !a.isometric.ok && !a.isometric.witness.empty();
        const auto f = suite_run({"--only", "isometry-roundtrip", "--inject-calibration-fault"});
        const auto& fs = suite(f.doc, "isometry-roundtrip");
        const bool fault_neg = f.code == 1 && !fs.at("passed").get<bool>() && !fs.at("witness").is_null();
        line(11, "negative controls", jordan_neg && iso_neg && fault_neg,
             std::string("non-Jordan ") + (jordan_neg ? "caught" : "MISSED") + ", non-isometry " +
                 (iso_neg ? "caught" : "MISSED") + ", calibration fault " + (fault_neg ? "caught" : "MISSED"));
    }
    {
        const auto second = suite_run();
        line(12, "determinism", second.text == first.text,
             fmt("two runs of %.0f bytes, ", static_cast<double>(first.text.size())) +
                 (second.text == first.text ? "identical" : "DIFFERENT"));
    }

    const bool all_suites = rep.at("passed").get<bool>() && first.code == 0;
    std::printf("%s all %zu suites pass with seed %llu\n", all_suites ? "PASS" : "FAIL", rep.at("suites").size(),
                static_cast<unsigned long long>(kSeed));
    if (!all_suites) ++failed;
    return failed == 0 ? 0 : 1;
}
