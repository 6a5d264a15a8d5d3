#pragma once

#include <algorithm>
#include <numeric>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "algebra.hpp"
#include "linear_map.hpp"
#include "random.hpp"

namespace symiso {

struct JordanCertificate {
    bool selfadjoint_ok = false;
    bool square_ok = false;
    bool polarization_ok = false;
    bool positive_ok = false;
    double max_residual = 0.0;

    bool passed() const { return selfadjoint_ok && square_ok && polarization_ok && positive_ok; }
};

/// Central decomposition of the *-algebra generated by the range of J.
struct StormerSplit {
    /// Sum of the hom-classified minimal central projections.
    Operator z;
    std::vector<Operator> central_projections;
    std::vector<bool> central_is_hom;
    /// Codomain blocks whose part of J(1) lies under z, under J(1) - z, or straddles both.
    std::vector<std::size_t> hom_blocks;
    std::vector<std::size_t> antihom_blocks;
    std::vector<std::size_t> mixed_blocks;
    int generated_dim = 0;
};

struct JordanMap {
    LinearMap map;
    JordanCertificate certificate;
    std::optional<StormerSplit> split;

    Operator operator()(const Operator& x) const { return map.apply(x); }
    const FiniteAlgebra& domain() const { return map.domain(); }
    const FiniteAlgebra& codomain() const { return map.codomain(); }
};

struct JordanVerification {
    bool passed = false;
    JordanCertificate certificate;
    std::string failed_check;  // empty on success
    std::optional<Operator> witness;
    double witness_residual = 0.0;
    std::optional<JordanMap> jordan;
};

namespace detail {

inline double min_eig_hermitian_part(const Operator& x) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& b : x.blocks()) {
        if (b.size() == 0) continue;
        const auto s = eigh_block(b);
        m = std::min(m, s.eigenvalues(s.eigenvalues.size() - 1));
    }
    return m;
}

inline Operator normalized(const Operator& x) {
    const double n = x.norm_inf();
    return n > 0.0 ? (1.0 / n) * x : x;
}

}  // namespace detail

/// Checks that L is a Jordan *-homomorphism: *-preservation on the hermitian
/// basis, J(x^2) = J(x)^2 on basis and random hermitians, the polarized
/// identity J(xy + yx) = J(x)J(y) + J(y)J(x), and positivity on random PSD.
/// Mathematical failure is reported, never thrown; the first failing input
/// of the first failing check is kept as witness.
inline JordanVerification verify_jordan(const LinearMap& L, std::uint64_t seed = 0, int random_hermitians = 200,
                                        int polarization_pairs = 50, int psd_samples = 50) {
    const double tj = tol().jordan;
    const auto& dom = L.domain();
    JordanVerification out;
    auto& cert = out.certificate;
    cert.selfadjoint_ok = cert.square_ok = cert.polarization_ok = cert.positive_ok = true;

    auto record = [&](bool& flag, const char* check, const Operator& x, double residual) {
        cert.max_residual = std::max(cert.max_residual, residual);
        if (residual > tj) {
            if (flag && out.failed_check.empty()) {
                out.failed_check = check;
                out.witness = x;
                out.witness_residual = residual;
            }
            flag = false;
        }
    };

    auto rng = derive_rng(seed, "verify_jordan", 0);
    std::vector<Operator> hermitians = hermitian_basis(dom);
    const auto n_basis = hermitians.size();
    for (int i = 0; i < random_hermitians; ++i) hermitians.push_back(detail::normalized(random_hermitian(rng, dom)));

    for (std::size_t i = 0; i < hermitians.size(); ++i) {
        const auto& x = hermitians[i];
        const auto jx = L.apply(x);
        if (i < n_basis) record(cert.selfadjoint_ok, "selfadjoint", x, (jx - jx.adjoint()).norm_inf());
        record(cert.square_ok, "square", x, (L.apply(x * x) - jx * jx).norm_inf());
    }
    for (int i = 0; i < polarization_pairs; ++i) {
        const auto x = detail::normalized(random_hermitian(rng, dom));
        const auto y = detail::normalized(random_hermitian(rng, dom));
        const auto jx = L.apply(x);
        const auto jy = L.apply(y);
        record(cert.polarization_ok, "polarization", x, (L.apply(x * y + y * x) - (jx * jy + jy * jx)).norm_inf());
    }
    for (int i = 0; i < psd_samples; ++i) {
        const auto a = detail::normalized(random_psd(rng, dom, i % 2 == 0 ? 0.0 : 1e-3));
        record(cert.positive_ok, "positive", a, std::max(0.0, -detail::min_eig_hermitian_part(L.apply(a))));
    }
    out.passed = cert.passed();
    if (out.passed) out.jordan = JordanMap{L, cert, std::nullopt};
    return out;
}

namespace detail {

/// Orthonormal basis (columns) of the *-algebra generated by `gens`,
/// closed under right multiplication by generators until the span stabilizes.
inline Matrix generated_algebra_basis(const FiniteAlgebra& alg, const std::vector<Operator>& gens) {
    const int D = alg.vector_dim();
    Matrix q(D, 0);
    constexpr double kIndependence = 1e-9;

    auto try_add = [&](const Vector& v) -> bool {
        const double nv = v.norm();
        if (nv <= 1e-300) return false;
        Vector r = v / nv;
        for (int pass = 0; pass < 2; ++pass)
            if (q.cols() > 0) r -= q * (q.adjoint() * r);
        const double nr = r.norm();
        if (nr <= kIndependence) return false;
        q.conservativeResize(Eigen::NoChange, q.cols() + 1);
        q.col(q.cols() - 1) = r / nr;
        return true;
    };

    std::vector<Operator> gen_basis;
    for (const auto& g : gens)
        if (try_add(g.vectorize())) gen_basis.push_back(Operator::from_vector(alg, q.col(q.cols() - 1)));

    Eigen::Index frontier_begin = 0;
    const long cap = static_cast<long>(D) * D;
    for (long iter = 0; frontier_begin < q.cols(); ++iter) {
        if (iter > cap) throw Error(Errc::InternalError, "generated-algebra closure did not stabilize");
        const Eigen::Index frontier_end = q.cols();
        for (Eigen::Index i = frontier_begin; i < frontier_end; ++i) {
            const auto f = Operator::from_vector(alg, q.col(i));
            for (const auto& g : gen_basis) try_add((f * g).vectorize());
            if (q.cols() == D) return q;
        }
        frontier_begin = frontier_end;
    }
    return q;
}

}  // namespace detail

/// Stormer decomposition of a verified Jordan map: z is the central projection
/// of the generated algebra on which J is multiplicative; on J(1) - z it is
/// anti-multiplicative. Components that are both (abelian) count as hom.
inline StormerSplit stormer_split(const JordanMap& J, std::uint64_t seed = 0) {
    const double tj = tol().jordan;
    const auto& L = J.map;
    const auto& cod = L.codomain();
    const auto& dom = L.domain();

    std::vector<Operator> gens;
    for (int i = 0; i < dom.vector_dim(); ++i) gens.push_back(L.apply(L.domain_basis(i)));
    const Matrix q = detail::generated_algebra_basis(cod, gens);
    StormerSplit out;
    out.generated_dim = static_cast<int>(q.cols());
    const auto unit = L.apply(Operator::identity(dom));
    if (q.cols() == 0) {
        out.z = Operator::zero(cod);
        return out;
    }

    // Center: elements of span(q) commuting with every generator.
    std::vector<Operator> gen_ops;
    for (const auto& g : gens)
        if (g.max_abs() > 0.0) gen_ops.push_back(g);
    Matrix m(static_cast<Eigen::Index>(gen_ops.size()) * cod.vector_dim(), q.cols());
    for (Eigen::Index i = 0; i < q.cols(); ++i) {
        const auto qi = Operator::from_vector(cod, q.col(i));
        for (std::size_t j = 0; j < gen_ops.size(); ++j)
            m.block(static_cast<Eigen::Index>(j) * cod.vector_dim(), i, cod.vector_dim(), 1) =
                commutator(qi, gen_ops[j]).vectorize();
    }
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv(0) : 0.0;
    std::vector<Operator> center;
    for (Eigen::Index i = 0; i < q.cols(); ++i) {
        const double s = i < sv.size() ? sv(i) : 0.0;
        if (s <= 1e-8 * std::max(1.0, smax)) center.push_back(Operator::from_vector(cod, q * svd.matrixV().col(i)));
    }
    if (center.empty()) throw Error(Errc::InternalError, "generated algebra has trivial center");

    // A generic self-adjoint central element separates the minimal central projections.
    auto rng = derive_rng(seed, "stormer_split", 0);
    Operator h = Operator::zero(cod);
    for (const auto& c : center) {
        h += gaussian(rng) * (0.5 * (c + c.adjoint()));
        h += gaussian(rng) * (Complex(0.0, 0.5) * (c - c.adjoint()));
    }
    const auto sd = spectral_decompose(0.5 * (h + h.adjoint()));
    struct Eig {
        double value;
        std::size_t block;
        Eigen::Index index;
    };
    std::vector<Eig> eigs;
    double emax = 0.0;
    for (std::size_t k = 0; k < sd.blocks.size(); ++k)
        for (Eigen::Index i = 0; i < sd.blocks[k].eigenvalues.size(); ++i) {
            eigs.push_back({sd.blocks[k].eigenvalues(i), k, i});
            emax = std::max(emax, std::abs(sd.blocks[k].eigenvalues(i)));
        }
    std::sort(eigs.begin(), eigs.end(), [](const Eig& a, const Eig& b) { return a.value < b.value; });
    const double gap = 1e-6 * std::max(1.0, emax);
    for (std::size_t s = 0; s < eigs.size();) {
        std::size_t e = s + 1;
        while (e < eigs.size() && eigs[e].value - eigs[e - 1].value <= gap) ++e;
        Operator p = Operator::zero(cod);
        for (std::size_t i = s; i < e; ++i) {
            const auto& v = sd.blocks[eigs[i].block].eigenvectors.col(eigs[i].index);
            p.block(eigs[i].block) += v * v.adjoint();
        }
        const Operator zc = p * unit;
        if (zc.norm_inf() > 0.5) out.central_projections.push_back(0.5 * (zc + zc.adjoint()));
        s = e;
    }
    Operator total = Operator::zero(cod);
    for (const auto& zc : out.central_projections) total += zc;
    if ((total - unit).norm_inf() > 1e-6)
        throw Error(Errc::ClassificationFailure, "minimal central projections do not sum to J(1)");

    // Classify each component on a generating sample.
    std::vector<std::pair<Operator, Operator>> pairs;
    for (int i = 0; i < 30; ++i)
        pairs.emplace_back(detail::normalized(random_operator(rng, dom)), detail::normalized(random_operator(rng, dom)));
    out.z = Operator::zero(cod);
    for (const auto& zc : out.central_projections) {
        double hom = 0.0, anti = 0.0;
        for (const auto& [x, y] : pairs) {
            const auto jxy = L.apply(x * y);
            const auto jx = L.apply(x);
            const auto jy = L.apply(y);
            hom = std::max(hom, ((jxy - jx * jy) * zc).norm_inf());
            anti = std::max(anti, ((jxy - jy * jx) * zc).norm_inf());
        }
        if (hom <= tj) {
            out.central_is_hom.push_back(true);
            out.z += zc;
        } else if (anti <= tj) {
            out.central_is_hom.push_back(false);
        } else {
            throw Error(Errc::ClassificationFailure, "central component is neither hom nor anti-hom (residuals " +
                                                         std::to_string(hom) + ", " + std::to_string(anti) + ")");
        }
    }

    const auto one = Operator::identity(cod);
    for (int i = 0; i < 100; ++i) {
        const auto x = detail::normalized(random_operator(rng, dom));
        const auto y = detail::normalized(random_operator(rng, dom));
        const auto jx = L.apply(x);
        const auto jy = L.apply(y);
        const double r = (L.apply(x * y) - jx * jy * out.z - jy * jx * (one - out.z)).norm_inf();
        if (r > tj) throw Error(Errc::ClassificationFailure, "global split check failed, residual " + std::to_string(r));
    }

    for (std::size_t k = 0; k < cod.num_blocks(); ++k) {
        const Matrix& u = unit.block(k);
        if (u.cwiseAbs().maxCoeff() <= 1e-6) continue;
        const Matrix& zk = out.z.block(k);
        if ((zk - u).cwiseAbs().maxCoeff() <= 1e-6) out.hom_blocks.push_back(k);
        else if (zk.cwiseAbs().maxCoeff() <= 1e-6) out.antihom_blocks.push_back(k);
        else out.mixed_blocks.push_back(k);
    }
    return out;
}

inline JordanMap with_split(JordanMap J, std::uint64_t seed = 0) {
    if (!J.split) J.split = stormer_split(J, seed);
    return J;
}

/// || |J(x)| - (J(|x|) z + J(|x^*|)(1 - z)) ||_inf.
///
/// When J(1_k) lies entirely under z or under 1 - z for every domain block k,
/// the right-hand side equals J(p|x| + (1-p)|x^*|) with p the sum of the
/// hom-mapped domain blocks (see domain_hom_projection).
inline double jordan_abs_residual(const JordanMap& J, const Operator& x) {
    if (!J.split) throw Error(Errc::SplitMissing, "jordan_abs_residual requires a computed split");
    const auto& z = J.split->z;
    const auto one = Operator::identity(J.codomain());
    const auto rhs = J(abs(x)) * z + J(abs(x.adjoint())) * (one - z);
    return (abs(J(x)) - rhs).norm_inf();
}

/// Central projection p of the domain (a sum of block identities) such that J
/// is multiplicative on p and anti-multiplicative on 1 - p, if one exists.
inline std::optional<Operator> domain_hom_projection(const JordanMap& J) {
    if (!J.split) throw Error(Errc::SplitMissing, "domain_hom_projection requires a computed split");
    const auto& dom = J.domain();
    auto p = Operator::zero(dom);
    for (std::size_t k = 0; k < dom.num_blocks(); ++k) {
        const auto e = Operator::block_identity(dom, k);
        const auto je = J(e);
        const double under_z = (je * J.split->z - je).norm_inf();
        const double under_rest = (je * J.split->z).norm_inf();
        if (under_z <= 1e-6) p += e;
        else if (under_rest > 1e-6) return std::nullopt;
    }
    return p;
}

/// || |J(x)| - J(p|x| + (1-p)|x^*|) ||_inf for a given central projection p of the domain.
inline double jordan_abs_residual_domain(const JordanMap& J, const Operator& x, const Operator& p) {
    const auto one = Operator::identity(J.domain());
    return (abs(J(x)) - J(p * abs(x) + (one - p) * abs(x.adjoint()))).norm_inf();
}

struct InjectivityReport {
    bool injective = true;
    std::optional<std::pair<std::size_t, int>> witness;  // (block, i) with J(e_ii) = 0
    int rank = 0;
    bool rank_consistent = true;
};

/// J is injective iff it does not kill a minimal projection e_ii of any block.
inline InjectivityReport check_injective(const JordanMap& J) {
    InjectivityReport r;
    const auto& dom = J.domain();
    for (std::size_t k = 0; k < dom.num_blocks() && r.injective; ++k)
        for (int i = 0; i < dom.dim(k); ++i)
            if (J(Operator::matrix_unit(dom, k, i, i)).norm_inf() <= tol().jordan) {
                r.injective = false;
                r.witness = std::make_pair(k, i);
                break;
            }
    r.rank = matrix_rank(J.map.matrix());
    r.rank_consistent = r.injective == (r.rank == dom.vector_dim());
    return r;
}

struct OrthoExtensionReport {
    bool ortho_ok = true;
    int trials = 0;
    double worst = 0.0;
    std::string failed_check;
    std::optional<std::pair<Operator, Operator>> witness;
    /// verify_jordan is run only when every ortho check passed.
    bool jordan_checked = false;
    bool jordan_ok = false;
};

/// Samples orthogonal projection pairs p, q and checks that L maps them to
/// orthogonal projections additively; if so, also checks that L is Jordan.
inline OrthoExtensionReport ortho_extension_check(const LinearMap& L, int trials, std::uint64_t seed) {
    const double tj = tol().jordan;
    const auto& dom = L.domain();
    OrthoExtensionReport r;
    auto flag = [&](const char* what, double residual, const Operator& p, const Operator& q) {
        r.worst = std::max(r.worst, residual);
        if (residual > tj && r.ortho_ok) {
            r.ortho_ok = false;
            r.failed_check = what;
            r.witness = std::make_pair(p, q);
        }
    };
    for (int t = 0; t < trials; ++t) {
        auto rng = derive_rng(seed, "ortho_extension", static_cast<std::uint64_t>(t));
        std::vector<Matrix> pb, qb;
        for (const auto& blk : dom.blocks()) {
            const Matrix u = haar_unitary(rng, blk.dim);
            const int r1 = uniform_int(rng, 0, blk.dim);
            const int r2 = uniform_int(rng, 0, blk.dim - r1);
            pb.push_back(u.leftCols(r1) * u.leftCols(r1).adjoint());
            qb.push_back(u.middleCols(r1, r2) * u.middleCols(r1, r2).adjoint());
        }
        const Operator p(dom, pb), q(dom, qb);
        const auto lp = L.apply(p);
        const auto lq = L.apply(q);
        ++r.trials;
        flag("projection", std::max((lp * lp - lp).norm_inf(), (lp - lp.adjoint()).norm_inf()), p, q);
        flag("projection", std::max((lq * lq - lq).norm_inf(), (lq - lq.adjoint()).norm_inf()), p, q);
        flag("orthogonal", (lp * lq).norm_inf(), p, q);
        flag("additive", (L.apply(p + q) - lp - lq).norm_inf(), p, q);
    }
    if (r.ortho_ok) {
        r.jordan_checked = true;
        r.jordan_ok = verify_jordan(L, seed).passed;
    }
    return r;
}

struct PlanEntry {
    std::size_t source = 0;
    std::size_t target = 0;
    bool transpose = false;
    /// Seed of the Haar unitary conjugating this target; none means identity.
    std::optional<std::uint64_t> unitary_seed;
};

/// Recipe for a Jordan map: target block `target` receives u x_source u^*
/// (or u x_source^T u^*). Codomain blocks not targeted are mapped to 0.
struct JordanPlan {
    FiniteAlgebra domain;
    FiniteAlgebra codomain;
    std::vector<PlanEntry> entries;
};

inline void validate_plan(const JordanPlan& plan) {
    std::vector<bool> used(plan.codomain.num_blocks(), false);
    for (const auto& e : plan.entries) {
        if (e.source >= plan.domain.num_blocks()) throw Error(Errc::PlanMismatch, "plan source block out of range");
        if (e.target >= plan.codomain.num_blocks()) throw Error(Errc::PlanMismatch, "plan target block out of range");
        if (plan.domain.dim(e.source) != plan.codomain.dim(e.target))
            throw Error(Errc::PlanMismatch, "plan maps block " + std::to_string(e.source) + " (dim " +
                                                std::to_string(plan.domain.dim(e.source)) + ") to block " +
                                                std::to_string(e.target) + " (dim " +
                                                std::to_string(plan.codomain.dim(e.target)) + ")");
        if (used[e.target]) throw Error(Errc::PlanMismatch, "codomain block targeted twice");
        used[e.target] = true;
    }
}

/// Ground truth for the split: a target is hom unless it is transposed and non-abelian.
inline bool plan_expects_hom(const JordanPlan& plan, const PlanEntry& e) {
    return !e.transpose || plan.codomain.dim(e.target) == 1;
}

/// The (unverified) linear map described by a plan.
inline LinearMap plan_map(const JordanPlan& plan) {
    validate_plan(plan);
    std::vector<Matrix> unitaries;
    for (const auto& e : plan.entries) {
        const int n = plan.codomain.dim(e.target);
        if (e.unitary_seed) {
            auto rng = derive_rng(*e.unitary_seed, "plan_unitary", 0);
            unitaries.push_back(haar_unitary(rng, n));
        } else {
            unitaries.push_back(Matrix::Identity(n, n));
        }
    }
    return LinearMap::from_function(plan.domain, plan.codomain, [&](const Operator& x) {
        auto y = Operator::zero(plan.codomain);
        for (std::size_t i = 0; i < plan.entries.size(); ++i) {
            const auto& e = plan.entries[i];
            const Matrix& src = x.block(e.source);
            const Matrix m = e.transpose ? Matrix(src.transpose()) : src;
            y.block(e.target) = unitaries[i] * m * unitaries[i].adjoint();
        }
        return y;
    });
}

/// Builds and verifies the Jordan map of a plan.
inline JordanMap random_jordan(const JordanPlan& plan) {
    auto v = verify_jordan(plan_map(plan));
    if (!v.passed) throw Error(Errc::InternalError, "generated map failed verification: " + v.failed_check);
    return *v.jordan;
}

/// Random plan over a random domain: each domain block is sent to one (or,
/// with duplicates, up to two) codomain blocks of its size, each entry with a
/// random transpose flag and unitary seed. The codomain is exactly covered.
inline JordanPlan random_plan(Rng& rng, int max_blocks = 3, int max_dim = 3, bool allow_duplicates = true) {
    JordanPlan plan;
    plan.domain = random_algebra(rng, max_blocks, max_dim);
    std::vector<Block> cod;
    std::vector<PlanEntry> entries;
    for (std::size_t k = 0; k < plan.domain.num_blocks(); ++k) {
        const int copies = allow_duplicates ? uniform_int(rng, 1, 2) : 1;
        for (int c = 0; c < copies; ++c) {
            cod.push_back({plan.domain.dim(k), uniform(rng, 0.5, 3.0)});
            entries.push_back({k, cod.size() - 1, uniform_int(rng, 0, 1) == 1, rng()});
        }
    }
    // Shuffle the codomain order so that targets are not aligned with sources.
    std::vector<std::size_t> perm(cod.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Block> shuffled(cod.size());
    for (std::size_t i = 0; i < cod.size(); ++i) shuffled[perm[i]] = cod[i];
    for (auto& e : entries) e.target = perm[e.target];
    plan.codomain = FiniteAlgebra(std::move(shuffled));
    plan.entries = std::move(entries);
    return plan;
}

}  // namespace symiso
