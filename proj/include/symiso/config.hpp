#pragma once

#include <cstdlib>
#include <fstream>
#include <string>

namespace symiso {

inline constexpr const char* kVersion = "0.1.0";

/// Numerical thresholds shared by every module.
///
/// `alg`    relative tolerance for hermiticity, reconstruction and rank cuts.
/// `maj`    absolute tolerance on (log-)prefix integrals.
/// `norm`   relative tolerance on norm comparisons.
/// `jordan` absolute tolerance on operator-norm residuals of Jordan identities.
/// `iso`    tolerance for the isometry analysis.
struct Tolerances {
    double alg = 1e-9;
    double maj = 1e-8;
    double norm = 1e-9;
    double jordan = 1e-8;
    double iso = 1e-8;
};

namespace detail {

inline Tolerances load_default_tolerances() {
    Tolerances t;
    // File format: whitespace-separated `name value` pairs.
    if (const char* path = std::getenv("SYMISO_TOLERANCE_FILE")) {
        std::ifstream in(path);
        std::string name;
        double value = 0;
        while (in >> name >> value) {
            if (name == "alg") t.alg = value;
            else if (name == "maj") t.maj = value;
            else if (name == "norm") t.norm = value;
            else if (name == "jordan") t.jordan = value;
            else if (name == "iso") t.iso = value;
        }
    }
    return t;
}

inline Tolerances& mutable_tolerances() {
    static Tolerances t = load_default_tolerances();
    return t;
}

}  // namespace detail

/// Process-wide tolerances. Configure once at start-up, before any worker
/// threads are spawned; afterwards treat as read-only.
inline const Tolerances& tol() { return detail::mutable_tolerances(); }

inline void set_tolerances(const Tolerances& t) { detail::mutable_tolerances() = t; }

}  // namespace symiso
