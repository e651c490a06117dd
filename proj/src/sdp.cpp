// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "hybridcast/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hybridcast::sdp {

// ---------------------------------------------------------------------------
// HermitianMatrix

HermitianMatrix::HermitianMatrix(const CMatrix& m) {
    if (m.rows() != m.cols())
        throw DimensionError("HermitianMatrix: matrix is not square");
    m_ = 0.5 * (m + m.adjoint());
}

HermitianMatrix HermitianMatrix::identity(Index n) {
    HermitianMatrix h;
    h.m_ = CMatrix::Identity(n, n);
    return h;
}

HermitianMatrix HermitianMatrix::zero(Index n) {
    HermitianMatrix h;
    h.m_ = CMatrix::Zero(n, n);
    return h;
}

HermitianMatrix HermitianMatrix::outer(const CVector& v) {
    return HermitianMatrix(v * v.adjoint());
}

double HermitianMatrix::trace_product(const HermitianMatrix& x) const {
    if (x.dim() != dim())
        throw DimensionError("trace_product: dimension mismatch");
    // Tr(A X) = <A, X>_F for Hermitian A.
    return (m_.conjugate().cwiseProduct(x.m_)).sum().real();
}

HermitianMatrix& HermitianMatrix::operator+=(const HermitianMatrix& o) {
    if (o.dim() != dim())
        throw DimensionError("HermitianMatrix: dimension mismatch in sum");
    m_ += o.m_;
    return *this;
}

void SdpProblem::validate() const {
    if (dim < 1)
        throw std::invalid_argument("SdpProblem: dim must be >= 1");
    for (const auto& row : trace_ineqs) {
        if (row.a.dim() != dim)
            throw DimensionError("SdpProblem: constraint matrix dimension differs from dim");
        if (!std::isfinite(row.bound))
            throw std::invalid_argument("SdpProblem: non-finite bound");
    }
    if (diag_eq && !(*diag_eq > 0.0 && std::isfinite(*diag_eq)))
        throw std::invalid_argument("SdpProblem: diagonal value must be positive");
}

std::string_view to_string(SdpStatus s) {
    switch (s) {
    case SdpStatus::Feasible:
        return "Feasible";
    case SdpStatus::Infeasible:
        return "Infeasible";
    case SdpStatus::MaxIterations:
        return "MaxIterations";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Embedding and projection

RMatrix complex_to_real_embedding(const HermitianMatrix& h) {
    const Index n = h.dim();
    RMatrix out(2 * n, 2 * n);
    const RMatrix re = h.matrix().real();
    const RMatrix im = h.matrix().imag();
    out.topLeftCorner(n, n) = re;
    out.topRightCorner(n, n) = -im;
    out.bottomLeftCorner(n, n) = im;
    out.bottomRightCorner(n, n) = re;
    return out;
}

HermitianMatrix real_to_complex(const RMatrix& e) {
    if (e.rows() != e.cols() || e.rows() % 2 != 0)
        throw DimensionError("real_to_complex: expected a square matrix of even size");
    const Index n = e.rows() / 2;
    const RMatrix re = 0.5 * (e.topLeftCorner(n, n) + e.bottomRightCorner(n, n));
    const RMatrix im = 0.5 * (e.bottomLeftCorner(n, n) - e.topRightCorner(n, n));
    CMatrix c(n, n);
    c.real() = re;
    c.imag() = im;
    return HermitianMatrix(c);
}

RMatrix psd_project(const RMatrix& s) {
    if (s.rows() != s.cols())
        throw DimensionError("psd_project: matrix is not square");
    const RMatrix sym = 0.5 * (s + s.transpose());
    Eigen::SelfAdjointEigenSolver<RMatrix> es(sym);
    const RVector clamped = es.eigenvalues().cwiseMax(0.0);
    RMatrix out = es.eigenvectors() * clamped.asDiagonal() * es.eigenvectors().transpose();
    return 0.5 * (out + out.transpose());
}

double min_eigenvalue(const HermitianMatrix& h) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h.matrix(), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

// ---------------------------------------------------------------------------
// Max-slack interior-point solver

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

CMatrix herm(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

// Re Tr(A G) for Hermitian A.
double trace_re(const CMatrix& a, const CMatrix& g) {
    return (a.conjugate().cwiseProduct(g)).sum().real();
}

double max_step_psd(const CMatrix& x, const CMatrix& dx) {
    Eigen::LLT<CMatrix> llt(x);
    if (llt.info() != Eigen::Success)
        return 0.0;
    const CMatrix p = llt.matrixL().solve(dx);
    const CMatrix q = llt.matrixL().solve(p.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(herm(q), Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues()(0);
    return lmin >= 0.0 ? kInf : -1.0 / lmin;
}

double max_step_lp(const RVector& x, const RVector& dx) {
    double a = kInf;
    for (Index i = 0; i < x.size(); ++i)
        if (dx(i) < 0.0)
            a = std::min(a, -x(i) / dx(i));
    return a;
}

struct NormalizedRow {
    CMatrix a;
    double b = 0.0;
};

// Standard-form encoding of
//     min v   s.t.  Tr(A_r X) + u_r - v = b_r - cap   (dense rows r)
//                   X_jj = d                         (optional)
//                   X >= 0, u >= 0, v >= 0
// where v = cap - s is the gap between the slack and its cap.
class SlackIpm {
public:
    SlackIpm(Index n, std::vector<NormalizedRow> rows, std::optional<double> diag, double cap)
        : n_(n), rows_(std::move(rows)), diag_(diag), cap_(cap) {
        p_ = static_cast<Index>(rows_.size());
        nd_ = diag_ ? n_ : 0;
        m_ = p_ + nd_;
        b_.resize(m_);
        for (Index k = 0; k < p_; ++k)
            b_(k) = rows_[k].b - cap_;
        for (Index j = 0; j < nd_; ++j)
            b_(p_ + j) = *diag_;
    }

    struct Result {
        bool converged = false;
        bool certified_infeasible = false;
        double slack = 0.0;
        CMatrix x;
        int iterations = 0;
        double residual = kInf;
    };

    Result run(double tol, int max_iter) {
        const double eps = std::min(1e-8, 1e-2 * tol);
        const double nu = static_cast<double>(n_ + p_ + 1);

        const double xi = diag_ ? *diag_ : 1.0;
        x_ = xi * CMatrix::Identity(n_, n_);
        s_ = CMatrix::Identity(n_, n_);
        xu_ = RVector::Ones(p_);
        su_ = RVector::Ones(p_);
        xv_ = 1.0;
        sv_ = 1.0;
        y_ = RVector::Zero(m_);

        Result res;
        for (int it = 0; it < max_iter; ++it) {
            res.iterations = it;
            residuals();
            const double gap = trace_re(x_, s_) + xu_.dot(su_) + xv_ * sv_;
            const double mu = gap / nu;
            const double pobj = xv_;
            const double dobj = b_.dot(y_);
            const double pinf = rp_.norm() / (1.0 + b_.norm());
            const double dinf =
                std::sqrt(rd_.squaredNorm() + rdu_.squaredNorm() + rdv_ * rdv_) / 2.0;
            const double relgap = gap / (1.0 + std::abs(pobj) + std::abs(dobj));
            res.residual = std::max({pinf, dinf, relgap});

            if (pinf <= eps && dinf <= eps && relgap <= eps) {
                res.converged = true;
                break;
            }
            // The dual objective bounds v from below, hence the slack from above.
            if (pinf <= eps && dinf <= eps && cap_ - dobj < -10.0 * tol) {
                res.certified_infeasible = true;
                break;
            }

            Eigen::LLT<CMatrix> sllt(s_);
            if (sllt.info() != Eigen::Success)
                break;
            sinv_ = sllt.solve(CMatrix::Identity(n_, n_));
            sinv_ = herm(sinv_);
            if (!factor_schur())
                break;

            // Predictor.
            Direction aff = direction(-x_, -xu_, -xv_);
            const double ap_aff = std::min(1.0, primal_step(aff));
            const double ad_aff = std::min(1.0, dual_step(aff));
            const CMatrix xa = x_ + ap_aff * aff.dx;
            const CMatrix sa = s_ + ad_aff * aff.ds;
            const double gap_aff = trace_re(xa, sa) +
                                   (xu_ + ap_aff * aff.dxu).dot(su_ + ad_aff * aff.dsu) +
                                   (xv_ + ap_aff * aff.dxv) * (sv_ + ad_aff * aff.dsv);
            const double sigma = std::clamp(std::pow(gap_aff / gap, 3.0), 0.0, 1.0);
            const double smu = sigma * mu;

            // Corrector.
            const CMatrix t = smu * sinv_ - x_ - herm(aff.dx * aff.ds * sinv_);
            const RVector tu = (smu * su_.cwiseInverse()) - xu_ -
                               aff.dxu.cwiseProduct(aff.dsu).cwiseQuotient(su_);
            const double tv = smu / sv_ - xv_ - aff.dxv * aff.dsv / sv_;
            Direction dir = direction(t, tu, tv);

            constexpr double gamma = 0.95;
            const double ap = std::min(1.0, gamma * primal_step(dir));
            const double ad = std::min(1.0, gamma * dual_step(dir));
            if (ap < 1e-12 && ad < 1e-12)
                break;

            x_ = herm(x_ + ap * dir.dx);
            xu_ += ap * dir.dxu;
            xv_ += ap * dir.dxv;
            y_ += ad * dir.dy;
            s_ = herm(s_ + ad * dir.ds);
            su_ += ad * dir.dsu;
            sv_ += ad * dir.dsv;
            res.iterations = it + 1;
        }

        if (res.certified_infeasible)
            res.slack = cap_ - b_.dot(y_);
        else
            res.slack = cap_ - xv_;
        res.x = x_;
        return res;
    }

private:
    struct Direction {
        CMatrix dx, ds;
        RVector dxu, dsu, dy;
        double dxv = 0.0, dsv = 0.0;
    };

    // 𝒜 applied to (X, u, v)
    RVector apply_a(const CMatrix& x, const RVector& xu, double xv) const {
        RVector out(m_);
        for (Index k = 0; k < p_; ++k)
            out(k) = trace_re(rows_[k].a, x) + xu(k) - xv;
        for (Index j = 0; j < nd_; ++j)
            out(p_ + j) = x(j, j).real();
        return out;
    }

    // SDP-block part of 𝒜*(y)
    CMatrix adjoint_sdp(const RVector& y) const {
        CMatrix out = CMatrix::Zero(n_, n_);
        for (Index k = 0; k < p_; ++k)
            out += y(k) * rows_[k].a;
        for (Index j = 0; j < nd_; ++j)
            out(j, j) += y(p_ + j);
        return out;
    }

    void residuals() {
        rp_ = b_ - apply_a(x_, xu_, xv_);
        rd_ = -adjoint_sdp(y_) - s_;
        rdu_ = -y_.head(p_) - su_;
        rdv_ = 1.0 + y_.head(p_).sum() - sv_;
    }

    bool factor_schur() {
        RMatrix schur(m_, m_);
        std::vector<CMatrix> g(static_cast<std::size_t>(p_));
        for (Index l = 0; l < p_; ++l)
            g[l] = x_ * rows_[l].a * sinv_;
        const double wv = xv_ / sv_;
        for (Index k = 0; k < p_; ++k) {
            for (Index l = k; l < p_; ++l) {
                double v = trace_re(rows_[k].a, g[l]) + wv;
                if (k == l)
                    v += xu_(k) / su_(k);
                schur(k, l) = v;
                schur(l, k) = v;
            }
            for (Index j = 0; j < nd_; ++j) {
                const double v = g[k](j, j).real();
                schur(k, p_ + j) = v;
                schur(p_ + j, k) = v;
            }
        }
        for (Index j = 0; j < nd_; ++j)
            for (Index i = j; i < nd_; ++i) {
                const double v = (x_(j, i) * sinv_(i, j)).real();
                schur(p_ + j, p_ + i) = v;
                schur(p_ + i, p_ + j) = v;
            }
        schur_.compute(schur);
        return schur_.info() == Eigen::Success;
    }

    Direction direction(const CMatrix& t, const RVector& tu, double tv) const {
        Direction d;
        const CMatrix tp = t - herm(x_ * rd_ * sinv_);
        const RVector wu = xu_.cwiseQuotient(su_);
        const double wv = xv_ / sv_;
        const RVector tup = tu - wu.cwiseProduct(rdu_);
        const double tvp = tv - wv * rdv_;

        const RVector rhs = rp_ - apply_a(tp, tup, tvp);
        d.dy = schur_.solve(rhs);

        const CMatrix aty = adjoint_sdp(d.dy);
        const RVector dyu = d.dy.head(p_);
        const double sum_dyu = dyu.sum();
        d.ds = rd_ - aty;
        d.dsu = rdu_ - dyu;
        d.dsv = rdv_ + sum_dyu;
        d.dx = tp + herm(x_ * aty * sinv_);
        d.dxu = tup + wu.cwiseProduct(dyu);
        d.dxv = tvp - wv * sum_dyu;
        return d;
    }

    double primal_step(const Direction& d) const {
        double a = max_step_psd(x_, d.dx);
        a = std::min(a, max_step_lp(xu_, d.dxu));
        if (d.dxv < 0.0)
            a = std::min(a, -xv_ / d.dxv);
        return a;
    }

    double dual_step(const Direction& d) const {
        double a = max_step_psd(s_, d.ds);
        a = std::min(a, max_step_lp(su_, d.dsu));
        if (d.dsv < 0.0)
            a = std::min(a, -sv_ / d.dsv);
        return a;
    }

    Index n_, p_ = 0, nd_ = 0, m_ = 0;
    std::vector<NormalizedRow> rows_;
    std::optional<double> diag_;
    double cap_;
    RVector b_;

    CMatrix x_, s_, sinv_, rd_;
    RVector xu_, su_, y_, rp_, rdu_;
    double xv_ = 0.0, sv_ = 0.0, rdv_ = 0.0;
    Eigen::LDLT<RMatrix> schur_;
};

bool is_diagonal(const CMatrix& a, double scale) {
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i)
            if (i != j && std::abs(a(i, j)) > 1e-14 * scale)
                return false;
    return true;
}

} // namespace

SdpSolution solve_feasibility(const SdpProblem& problem, const SolverOptions& options) {
    problem.validate();
    if (!(options.tol > 0.0))
        throw std::invalid_argument("solve_feasibility: tol must be positive");

    const Index n = problem.dim;
    const auto& diag = problem.diag_eq;

    // Rows that cannot depend on X (zero rows, or diagonal rows under a fixed
    // diagonal) are decided up front.
    double fixed_slack = kInf;
    std::vector<NormalizedRow> rows;
    for (const auto& row : problem.trace_ineqs) {
        const CMatrix& a = row.a.matrix();
        const double norm = a.norm();
        if (norm == 0.0) {
            fixed_slack = std::min(fixed_slack, row.bound);
            continue;
        }
        if (diag && is_diagonal(a, norm)) {
            fixed_slack = std::min(fixed_slack, (row.bound - *diag * a.trace().real()) / norm);
            continue;
        }
        rows.push_back({herm(a / norm), row.bound / norm});
    }

    SdpSolution sol;
    const CMatrix fallback_x =
        diag ? CMatrix((*diag) * CMatrix::Identity(n, n)) : CMatrix(CMatrix::Zero(n, n));

    if (fixed_slack < -options.tol) {
        sol.status = SdpStatus::Infeasible;
        sol.x = HermitianMatrix(fallback_x);
        sol.slack = fixed_slack;
        return sol;
    }
    if (rows.empty()) {
        sol.status = SdpStatus::Feasible;
        sol.x = HermitianMatrix(fallback_x);
        sol.slack = std::min(options.slack_cap, fixed_slack);
        return sol;
    }

    SlackIpm ipm(n, std::move(rows), diag, options.slack_cap);
    const auto r = ipm.run(options.tol, options.max_iter);

    sol.x = HermitianMatrix(r.x);
    sol.iterations = r.iterations;
    sol.residual = r.residual;
    sol.slack = std::min(r.slack, fixed_slack);
    if (r.certified_infeasible)
        sol.status = SdpStatus::Infeasible;
    else if (!r.converged)
        sol.status = SdpStatus::MaxIterations;
    else
        sol.status = sol.slack >= -options.tol ? SdpStatus::Feasible : SdpStatus::Infeasible;
    return sol;
}

} // namespace hybridcast::sdp
