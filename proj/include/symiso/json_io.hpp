#pragma once

#include <string>

#include "json.hpp"

#include "isometry.hpp"
#include "jordan.hpp"
#include "majorization.hpp"
#include "norms.hpp"
#include "rearrangement.hpp"

namespace symiso {

using json = nlohmann::json;

namespace detail {

[[noreturn]] inline void bad_json(const std::string& what) { throw Error(Errc::InvalidArgument, "json: " + what); }

inline const json& member(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) bad_json(std::string("missing field '") + key + "'");
    return j.at(key);
}

inline double as_number(const json& j, const char* what) {
    if (!j.is_number()) bad_json(std::string(what) + " must be a number");
    return j.get<double>();
}

}  // namespace detail

// ---- scalars -------------------------------------------------------------

inline json ext_to_json(ExtReal v) {
    if (v.is_neg_inf()) return "-inf";
    if (v.is_pos_inf()) return "inf";
    return v.value();
}

inline ExtReal ext_from_json(const json& j) {
    if (j.is_string()) {
        if (j == "-inf") return ExtReal::neg_inf();
        if (j == "inf") return ExtReal::pos_inf();
    }
    return detail::as_number(j, "extended real");
}

/// [re, im]; a bare number is read as a real scalar.
inline json complex_to_json(Complex c) { return json::array({c.real(), c.imag()}); }

inline Complex complex_from_json(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (!j.is_array() || j.size() != 2) detail::bad_json("complex entries are [re, im] pairs");
    return {detail::as_number(j[0], "re"), detail::as_number(j[1], "im")};
}

inline json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Matrix matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) detail::bad_json("matrix has wrong number of rows");
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) detail::bad_json("matrix row has wrong length");
        for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
    }
    return m;
}

// ---- algebra ---------------------------------------------------------------

inline json to_json(const FiniteAlgebra& a) {
    json blocks = json::array();
    for (const auto& b : a.blocks()) blocks.push_back({{"dim", b.dim}, {"weight", b.weight}});
    return {{"blocks", blocks}};
}

inline FiniteAlgebra algebra_from_json(const json& j) {
    const auto& blocks = detail::member(j, "blocks");
    if (!blocks.is_array()) detail::bad_json("algebra blocks must be an array");
    std::vector<Block> out;
    for (const auto& b : blocks) {
        const auto& dim = detail::member(b, "dim");
        if (!dim.is_number_integer()) detail::bad_json("block dim must be an integer");
        out.push_back({dim.get<int>(), b.contains("weight") ? detail::as_number(b.at("weight"), "weight") : 1.0});
    }
    return FiniteAlgebra(std::move(out));
}

/// {"algebra": {...}, "blocks": [ row-major block matrices ]}
inline json to_json(const Operator& x) {
    json blocks = json::array();
    for (const auto& m : x.blocks()) blocks.push_back(matrix_to_json(m));
    return {{"algebra", to_json(x.algebra())}, {"blocks", blocks}};
}

/// Reads an operator; `alg` supplies the algebra when the document has none.
inline Operator operator_from_json(const json& j, const FiniteAlgebra* alg = nullptr) {
    FiniteAlgebra a;
    if (j.is_object() && j.contains("algebra")) a = algebra_from_json(j.at("algebra"));
    else if (alg) a = *alg;
    else detail::bad_json("operator needs an 'algebra' field");
    const auto& blocks = detail::member(j, "blocks");
    if (!blocks.is_array() || blocks.size() != a.num_blocks())
        throw Error(Errc::ShapeMismatch, "operator block count does not match its algebra");
    std::vector<Matrix> out;
    for (std::size_t k = 0; k < a.num_blocks(); ++k) {
        const auto n = a.dim(k);
        const auto& b = blocks[k];
        if (!b.is_array() || static_cast<int>(b.size()) != n)
            throw Error(Errc::ShapeMismatch, "block " + std::to_string(k) + " has wrong shape");
        out.push_back(matrix_from_json(b, n, n));
    }
    return {a, std::move(out)};
}

// ---- step functions ----------------------------------------------------------

inline json to_json(const StepFunction& f) {
    json pieces = json::array();
    for (const auto& p : f.pieces()) pieces.push_back({{"value", p.value}, {"width", p.width}});
    return {{"pieces", pieces}};
}

inline StepFunction step_from_json(const json& j) {
    const auto& pieces = detail::member(j, "pieces");
    if (!pieces.is_array()) detail::bad_json("pieces must be an array");
    std::vector<Piece> out;
    for (const auto& p : pieces)
        out.push_back({detail::as_number(detail::member(p, "value"), "value"),
                       detail::as_number(detail::member(p, "width"), "width")});
    return StepFunction(std::move(out));
}

inline json to_json(const MajorizationVerdict& v) {
    return {{"holds", v.holds}, {"worst_t", v.worst_t}, {"slack", ext_to_json(v.slack)},
            {"checked_points", v.checked_points}};
}

inline MajorizationVerdict verdict_from_json(const json& j) {
    MajorizationVerdict v;
    v.holds = detail::member(j, "holds").get<bool>();
    v.worst_t = detail::as_number(detail::member(j, "worst_t"), "worst_t");
    v.slack = ext_from_json(detail::member(j, "slack"));
    if (j.contains("checked_points")) v.checked_points = j.at("checked_points").get<std::vector<double>>();
    return v;
}

// ---- norms -------------------------------------------------------------------

inline json to_json(const NormSpec& spec) {
    return std::visit(
        [](const auto& s) -> json {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, LpNorm>) return {{"type", "lp"}, {"p", s.p}};
            else if constexpr (std::is_same_v<T, LorentzNorm>)
                return {{"type", "lorentz"}, {"p", s.p}, {"weight", to_json(s.weight)}};
            else return {{"type", "log"}};
        },
        spec);
}

inline NormSpec norm_from_json(const json& j) {
    const auto& type = detail::member(j, "type");
    if (type == "lp") return LpNorm{detail::as_number(detail::member(j, "p"), "p")};
    if (type == "lorentz")
        return LorentzNorm{detail::as_number(detail::member(j, "p"), "p"), step_from_json(detail::member(j, "weight"))};
    if (type == "log") return LogNorm{};
    detail::bad_json("unknown norm type");
}

inline json to_json(const NormCheckReport& r) {
    json v = json::array();
    for (const auto& x : r.violations) {
        json w = json::array();
        for (const auto& op : x.witnesses) w.push_back(to_json(op));
        v.push_back({{"axiom", x.axiom}, {"detail", x.detail}, {"magnitude", x.magnitude}, {"witnesses", w}});
    }
    return {{"passed", r.passed}, {"trials", r.trials}, {"observed_constant", r.observed_constant}, {"violations", v}};
}

// ---- maps ----------------------------------------------------------------------

inline json to_json(const LinearMap& L) {
    return {{"domain", to_json(L.domain())}, {"codomain", to_json(L.codomain())}, {"matrix", matrix_to_json(L.matrix())}};
}

inline LinearMap map_from_json(const json& j) {
    const auto dom = algebra_from_json(detail::member(j, "domain"));
    const auto cod = algebra_from_json(detail::member(j, "codomain"));
    const auto& m = detail::member(j, "matrix");
    if (!m.is_array() || static_cast<int>(m.size()) != cod.vector_dim())
        throw Error(Errc::ShapeMismatch, "map matrix must have one row per codomain basis element");
    return {dom, cod, matrix_from_json(m, cod.vector_dim(), dom.vector_dim())};
}

inline json to_json(const JordanPlan& plan) {
    json entries = json::array();
    for (const auto& e : plan.entries) {
        json je = {{"source", e.source}, {"target", e.target}, {"transpose", e.transpose}};
        je["unitary_seed"] = e.unitary_seed ? json(*e.unitary_seed) : json(nullptr);
        entries.push_back(std::move(je));
    }
    return {{"domain", to_json(plan.domain)}, {"codomain", to_json(plan.codomain)}, {"entries", entries}};
}

inline JordanPlan plan_from_json(const json& j) {
    JordanPlan plan{algebra_from_json(detail::member(j, "domain")), algebra_from_json(detail::member(j, "codomain")), {}};
    for (const auto& e : detail::member(j, "entries")) {
        PlanEntry pe;
        pe.source = detail::member(e, "source").get<std::size_t>();
        pe.target = detail::member(e, "target").get<std::size_t>();
        pe.transpose = e.value("transpose", false);
        if (e.contains("unitary_seed") && !e.at("unitary_seed").is_null())
            pe.unitary_seed = e.at("unitary_seed").get<std::uint64_t>();
        plan.entries.push_back(pe);
    }
    return plan;
}

inline json to_json(const JordanCertificate& c) {
    return {{"selfadjoint_ok", c.selfadjoint_ok}, {"square_ok", c.square_ok}, {"polarization_ok", c.polarization_ok},
            {"positive_ok", c.positive_ok},       {"max_residual", c.max_residual}};
}

inline json to_json(const StormerSplit& s) {
    json cp = json::array();
    for (std::size_t i = 0; i < s.central_projections.size(); ++i)
        cp.push_back({{"projection", to_json(s.central_projections[i])}, {"hom", static_cast<bool>(s.central_is_hom[i])}});
    return {{"z", to_json(s.z)},
            {"central_projections", cp},
            {"hom_blocks", s.hom_blocks},
            {"antihom_blocks", s.antihom_blocks},
            {"mixed_blocks", s.mixed_blocks},
            {"generated_dim", s.generated_dim}};
}

inline json to_json(const JordanVerification& v) {
    json j = {{"passed", v.passed}, {"certificate", to_json(v.certificate)}};
    if (!v.passed) {
        j["failed_check"] = v.failed_check;
        j["witness_residual"] = v.witness_residual;
        if (v.witness) j["witness"] = to_json(*v.witness);
    }
    return j;
}

inline json to_json(const SynthSpec& s) {
    return {{"plan", to_json(s.plan)}, {"beta", s.beta}, {"E", to_json(s.E)}, {"F", to_json(s.F)}};
}

inline SynthSpec synth_from_json(const json& j) {
    SynthSpec s;
    s.plan = plan_from_json(detail::member(j, "plan"));
    s.beta = detail::member(j, "beta").get<std::vector<double>>();
    s.E = j.contains("E") ? norm_from_json(j.at("E")) : NormSpec{LpNorm{1.0}};
    s.F = j.contains("F") ? norm_from_json(j.at("F")) : s.E;
    return s;
}

inline json to_json(const CheckSummary& c) {
    json j = {{"ok", c.ok}, {"trials", c.trials}, {"worst", c.worst}};
    if (!c.witness.empty()) {
        json w = json::array();
        for (const auto& x : c.witness) w.push_back(to_json(x));
        j["witness"] = w;
    }
    return j;
}

inline json to_json(const IsometryAnalysis& a) {
    json j = {{"ok", a.ok()},
              {"positive", to_json(a.positive)},
              {"isometric", to_json(a.isometric)},
              {"disjointness", to_json(a.disjointness)},
              {"chain",
               {{"witnesses", a.chain.witnesses},
                {"intact", a.chain.intact()},
                {"norm_link_broken", a.chain.norm_link_broken},
                {"mu_link_broken", a.chain.mu_link_broken},
                {"product_link_broken", a.chain.product_link_broken},
                {"worst_norm_gap", a.chain.worst_norm_gap},
                {"first_broken", a.chain.first_broken}}},
              {"B", to_json(a.B)},
              {"commutation_residual", a.commutation_residual},
              {"jordan", to_json(a.jordan_check)},
              {"factorization_residual", a.factorization_residual},
              {"support_identity_residual", a.support_identity_residual},
              {"note", a.note}};
    if (a.J && a.J->split) j["split"] = to_json(*a.J->split);
    return j;
}

inline json to_json(const ReflectionReport& r) {
    json j = {{"passed", r.passed}, {"trials", r.trials}, {"worst", r.worst}};
    if (r.witness_y) j["witness_y"] = to_json(*r.witness_y);
    if (r.witness_x) j["witness_x"] = to_json(*r.witness_x);
    if (r.f_log_monotone_checked) j["f_log_monotone"] = r.f_log_monotone;
    return j;
}

inline json to_json(const CentralBReport& r) {
    return {{"applicable", r.applicable}, {"central", r.central}, {"factor", r.factor}, {"alpha", r.alpha},
            {"residual", r.residual},     {"passed", r.passed},   {"note", r.note}};
}

}  // namespace symiso
