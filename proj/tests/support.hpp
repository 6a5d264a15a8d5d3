#pragma once

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include <unistd.h>

#include "symiso/json_io.hpp"

namespace symiso::testing {

inline double op_dist(const Operator& a, const Operator& b) { return (a - b).norm_inf(); }

/// Largest |f(t) - g(t)| over the union partition (f, g padded to a common length).
inline double step_dist(const StepFunction& f, const StepFunction& g) {
    const double len = std::max(f.length(), g.length());
    const auto d = combine(pad_to(f, len), pad_to(g, len), [](double a, double b) { return std::abs(a - b); });
    double m = 0.0;
    for (const auto& p : d.pieces()) m = std::max(m, p.value);
    return m;
}

inline Operator diag_op(const FiniteAlgebra& alg, std::vector<std::vector<Complex>> d) { return Operator::diagonal(alg, d); }

/// Fresh scratch directory per test binary.
inline std::filesystem::path scratch_dir() {
    static const auto dir = [] {
        auto d = std::filesystem::temp_directory_path() / ("symiso-test-" + std::to_string(::getpid()));
        std::filesystem::create_directories(d);
        return d;
    }();
    return dir;
}

inline std::string write_json(const std::string& name, const json& j) {
    const auto path = scratch_dir() / name;
    std::ofstream(path) << j.dump();
    return path.string();
}

}  // namespace symiso::testing
