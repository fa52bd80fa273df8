#include "exmpc/error.hpp"
#include "exmpc/mpqp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <optional>
#include <random>
#include <set>

namespace exmpc {
namespace {

constexpr double kConstantRow = 1e-10;
constexpr double kTight = 1e-9;
constexpr double kSeedContainment = 1e-7;
constexpr int kMaxWeakEnumerated = 12;

/// {θ : primal feasibility of the inactive rows and λ_A(θ) >= 0} ∩ θ_box,
/// or nullopt when that set is not full-dimensional.
std::optional<Polyhedron> region_polyhedron(const ParametricQp& pqp, const AffineLaw& law) {
    const int d = pqp.theta_dim;
    const int m = static_cast<int>(pqp.G.rows());
    std::vector<char> active(m, 0);
    for (int r : law.active_set) active[r] = 1;

    std::vector<Vector> rows;
    std::vector<double> rhs;
    auto add = [&](Vector a, double b) {
        if (a.norm() <= kConstantRow) {
            return b >= -tol::feasibility;
        }
        rows.push_back(std::move(a));
        rhs.push_back(b);
        return true;
    };
    for (int i = 0; i < m; ++i) {
        if (active[i]) continue;
        const Vector a = (pqp.G.row(i) * law.K - pqp.S.row(i)).transpose();
        if (!add(a, pqp.w(i) - pqp.G.row(i).dot(law.k))) return std::nullopt;
    }
    for (Eigen::Index j = 0; j < law.L.rows(); ++j)
        if (!add(-law.L.row(j).transpose(), law.l(j))) return std::nullopt;
    const Polyhedron& box = pqp.theta_box;
    for (int j = 0; j < box.rows(); ++j) add(box.A().row(j).transpose(), box.b()(j));

    Matrix A(static_cast<Eigen::Index>(rows.size()), d);
    Vector b(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        A.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
        b(static_cast<Eigen::Index>(r)) = rhs[r];
    }
    Polyhedron P(std::move(A), std::move(b));
    if (P.chebyshev().kind != Feasibility::full_dimensional) return std::nullopt;
    return P.minimize();
}

/// Center of the largest (d−1)-ball inside facet j of P.
std::optional<Vector> facet_center(const Polyhedron& P, int j) {
    const int d = P.dim();
    const int m = P.rows();
    const Vector aj = P.A().row(j).transpose();
    Matrix A = Matrix::Zero(m + 3, d + 1);
    Vector b = Vector::Zero(m + 3);
    int r = 0;
    for (int i = 0; i < m; ++i) {
        if (i == j) continue;
        const Vector ai = P.A().row(i).transpose();
        A.row(r).head(d) = ai.transpose();
        A(r, d) = (ai - ai.dot(aj) * aj).norm();
        b(r) = P.b()(i);
        ++r;
    }
    A.row(r).head(d) = aj.transpose();
    b(r++) = P.b()(j);
    A.row(r).head(d) = -aj.transpose();
    b(r++) = -P.b()(j);
    A(r, d) = 1.0;  // r <= cap keeps the LP bounded along unbounded facets
    b(r++) = 1e6;
    A(r, d) = -1.0;
    b(r++) = 0.0;
    Vector c = Vector::Zero(d + 1);
    c(d) = -1.0;
    const LpResult res = lp_minimize(c, A, b);
    if (res.status != LpStatus::optimal || res.x(d) <= tol::chebyshev_radius) return std::nullopt;
    return Vector(res.x.head(d));
}

double radical_inverse(std::uint64_t i, std::uint64_t base) {
    double inv = 1.0 / static_cast<double>(base), f = inv, x = 0.0;
    while (i > 0) {
        x += f * static_cast<double>(i % base);
        i /= base;
        f *= inv;
    }
    return x;
}

constexpr std::uint64_t kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

class Explorer {
public:
    Explorer(const ParametricQp& pqp, const ExploreOptions& options, ExploreReport& report)
        : pqp_(pqp), options_(options), report_(report), factor_(pqp.H) {}

    std::vector<CriticalRegion> run() {
        const ChebyshevBall seed = pqp_.theta_box.chebyshev();
        if (seed.kind == Feasibility::empty) return {};
        queue_.push_back(seed.center);
        drain();

        const auto [lo, hi] = pqp_.theta_box.bounding_box();
        if (!all_finite(lo) || !all_finite(hi)) throw Error(ErrorKind::invalid_argument, "exploration box must be bounded");
        const int d = pqp_.theta_dim;
        if (d > static_cast<int>(std::size(kPrimes))) throw Error(ErrorKind::invalid_argument, "parameter dimension too large");
        std::uint64_t index = 1;
        for (int pass = 0; pass < options_.closure_passes; ++pass) {
            int found = 0;
            for (int s = 0; s < options_.closure_samples; ++s, ++index) {
                Vector theta(d);
                for (int i = 0; i < d; ++i)
                    theta(i) = lo(i) + (hi(i) - lo(i)) * radical_inverse(index, kPrimes[i]);
                if (!pqp_.theta_box.contains(theta, 0.0) || covered(theta)) continue;
                const std::size_t before = regions_.size();
                queue_.push_back(theta);
                drain();
                if (regions_.size() > before) {
                    ++found;
                    ++report_.closure_seeds;
                }
            }
            if (found == 0) break;
        }
        return std::move(regions_);
    }

private:
    bool covered(const Vector& theta) const {
        return std::any_of(regions_.begin(), regions_.end(),
                           [&](const CriticalRegion& r) { return r.region.contains(theta, tol::membership); });
    }

    void drain() {
        while (!queue_.empty()) {
            const Vector theta = std::move(queue_.front());
            queue_.pop_front();
            if (covered(theta)) continue;
            explore_point(theta);
        }
    }

    void explore_point(const Vector& theta) {
        QpSolution sol;
        try {
            ++report_.qp_solves;
            sol = qp_solve(pqp_.at(theta), factor_);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::infeasible) return;
            throw;
        }

        for (const IndexSet& cand : candidates(theta, sol)) {
            if (!tried_.insert(cand).second) continue;
            AffineLaw law;
            try {
                law = region_law(pqp_, cand);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::degenerate_active_set) throw;
                ++report_.degenerate_skipped;
                continue;
            }
            auto P = region_polyhedron(pqp_, law);
            if (!P) continue;
            add_region(std::move(*P), law);
            if (regions_.back().region.contains(theta, kSeedContainment)) return;
        }
        if (!covered(theta)) {
            std::string where;
            for (Eigen::Index i = 0; i < theta.size(); ++i) where += (i ? ", " : "") + std::to_string(theta(i));
            report_.warnings.push_back("no full-dimensional region found at theta = (" + where + ")");
        }
    }

    /// Working set of the QP first, then the strongly active rows combined
    /// with every subset of the weakly active ones.
    std::vector<IndexSet> candidates(const Vector& theta, const QpSolution& sol) const {
        std::vector<IndexSet> out{sol.active_set};
        const Vector slack = pqp_.w + pqp_.S * theta - pqp_.G * sol.z;
        IndexSet strong, weak;
        for (Eigen::Index i = 0; i < slack.size(); ++i) {
            const bool tight = std::abs(slack(i)) <= kTight * (1.0 + std::abs(pqp_.w(i)));
            if (sol.duals(i) > tol::dual)
                strong.push_back(static_cast<int>(i));
            else if (tight)
                weak.push_back(static_cast<int>(i));
        }
        if (weak.size() > static_cast<std::size_t>(kMaxWeakEnumerated)) weak.resize(kMaxWeakEnumerated);
        const std::uint32_t n_subsets = 1u << weak.size();
        std::vector<std::uint32_t> masks(n_subsets);
        for (std::uint32_t s = 0; s < n_subsets; ++s) masks[s] = s;
        std::stable_sort(masks.begin(), masks.end(),
                         [](std::uint32_t a, std::uint32_t b) { return std::popcount(a) < std::popcount(b); });
        for (std::uint32_t mask : masks) {
            IndexSet set = strong;
            for (std::size_t i = 0; i < weak.size(); ++i)
                if (mask & (1u << i)) set.push_back(weak[i]);
            std::sort(set.begin(), set.end());
            if (set != sol.active_set) out.push_back(std::move(set));
        }
        return out;
    }

    void add_region(Polyhedron P, const AffineLaw& law) {
        const int nu = pqp_.n_u;
        regions_.push_back(CriticalRegion{std::move(P), law.K.topRows(nu), law.k.head(nu), law.active_set});
        if (regions_.size() > options_.max_regions)
            throw Error(ErrorKind::exploration_overflow,
                        "more than " + std::to_string(options_.max_regions) + " critical regions");
        const Polyhedron& R = regions_.back().region;
        for (int j = 0; j < R.rows(); ++j) {
            const auto center = facet_center(R, j);
            if (!center) continue;
            Vector next = *center + options_.facet_step * R.A().row(j).transpose();
            if (pqp_.theta_box.contains(next, 0.0)) queue_.push_back(std::move(next));
        }
    }

    const ParametricQp& pqp_;
    const ExploreOptions& options_;
    ExploreReport& report_;
    CholeskyFactor factor_;
    std::vector<CriticalRegion> regions_;
    std::set<IndexSet> tried_;
    std::deque<Vector> queue_;
};

}  // namespace

ExplicitController explicit_solve(const ParametricQp& pqp, const ExploreOptions& options, ExploreReport* report) {
    if (pqp.theta_box.rows() == 0) throw Error(ErrorKind::invalid_argument, "exploration box is unbounded");
    ExploreReport local;
    ExploreReport& rep = report ? *report : local;
    Explorer explorer(pqp, options, rep);
    return ExplicitController(explorer.run(), pqp.theta_dim, pqp.n_u, pqp.meta);
}

OracleReport verify_against_oracle(const ExplicitController& ctrl, const ParametricQp& pqp, int n_samples,
                                   std::uint64_t seed) {
    OracleReport rep;
    const auto [lo, hi] = pqp.theta_box.bounding_box();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const CholeskyFactor factor(pqp.H);
    const int nu = pqp.n_u;
    for (int s = 0; s < n_samples; ++s) {
        Vector theta(pqp.theta_dim);
        for (int i = 0; i < pqp.theta_dim; ++i) theta(i) = lo(i) + (hi(i) - lo(i)) * unit(rng);
        ++rep.samples;
        const int idx = ctrl.locate(theta);
        std::optional<QpSolution> sol;
        try {
            sol = qp_solve(pqp.at(theta), factor);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::infeasible) throw;
        }
        if (!sol) {
            if (idx >= 0)
                ++rep.spurious_coverage;
            else
                ++rep.infeasible;
            continue;
        }
        ++rep.feasible;
        if (idx < 0) {
            ++rep.coverage_gaps;
            continue;
        }
        const double dev = (ctrl.regions()[idx].law(theta) - sol->z.head(nu)).lpNorm<Eigen::Infinity>();
        if (dev > rep.max_deviation || rep.worst_theta.size() == 0) {
            rep.max_deviation = std::max(rep.max_deviation, dev);
            rep.worst_theta = theta;
        }
    }
    return rep;
}

}  // namespace exmpc
