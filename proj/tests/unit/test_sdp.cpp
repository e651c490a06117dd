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

#include <doctest.h>

#include <random>

#include <Eigen/Eigenvalues>

#include "hybridcast/sdp.hpp"

using namespace hybridcast;
using namespace hybridcast::sdp;

namespace {

CMatrix random_hermitian(Index n, Rng& rng) {
    CMatrix a(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) a(i, j) = complex_normal(rng);
    return (a + a.adjoint()) / 2.0;
}

// Re-checks every constraint of a returned point independently of the solver.
bool satisfies(const SdpProblem& p, const HermitianMatrix& x, double tol) {
    if (x.dim() != p.dim) return false;
    if ((x.matrix() - x.matrix().adjoint()).norm() > tol) return false;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(x.matrix());
    if (es.eigenvalues().minCoeff() < -tol) return false;
    if (p.diag_eq)
        for (Index i = 0; i < p.dim; ++i)
            if (std::abs(x(i, i).real() - *p.diag_eq) > tol) return false;
    for (const auto& row : p.trace_ineqs) {
        const double lhs = (row.a.matrix() * x.matrix()).trace().real();
        const double scale = std::max(1.0, row.a.matrix().norm());
        if (lhs > row.bound + tol * scale) return false;
    }
    return true;
}

} // namespace

TEST_CASE("hermitian matrix is symmetrized on construction") {
    CMatrix a(2, 2);
    a << cplx(1, 0), cplx(2, 1), cplx(0, 0), cplx(3, 0);
    HermitianMatrix h(a);
    CHECK(h(0, 1) == std::conj(h(1, 0)));
    CHECK(h(0, 1) == cplx(1, 0.5));
    CHECK(h.trace() == doctest::Approx(4.0));
}

TEST_CASE("single variable with diagonal fixed is feasible") {
    SdpProblem p;
    p.dim = 1;
    p.diag_eq = 1.0;
    auto sol = solve_feasibility(p);
    CHECK(sol.status == SdpStatus::Feasible);
    CHECK(std::abs(sol.x(0, 0) - cplx(1, 0)) < 1e-9);
    CHECK(sol.slack > 0.0);
    CHECK(sol.slack <= 1.0 + 1e-12);
}

TEST_CASE("trace bound below the forced diagonal is infeasible") {
    SdpProblem p;
    p.dim = 2;
    p.diag_eq = 1.0;
    p.trace_ineqs.push_back({HermitianMatrix::identity(2), 1.0});
    auto sol = solve_feasibility(p);
    CHECK(sol.status == SdpStatus::Infeasible);
    CHECK_FALSE(sol.feasible());
}

TEST_CASE("off-diagonal lower bound is feasible and the exhibited point checks out") {
    CMatrix sx(2, 2);
    sx << 0, 1, 1, 0;
    SdpProblem p;
    p.dim = 2;
    p.diag_eq = 1.0;
    p.trace_ineqs.push_back({HermitianMatrix(-sx), -1.9});

    CMatrix x0(2, 2);
    x0 << 1, 0.95, 0.95, 1;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(x0);
    CHECK(es.eigenvalues()(0) == doctest::Approx(0.05));
    CHECK(es.eigenvalues()(1) == doctest::Approx(1.95));
    CHECK(satisfies(p, HermitianMatrix(x0), 1e-12));

    auto sol = solve_feasibility(p);
    REQUIRE(sol.status == SdpStatus::Feasible);
    CHECK(satisfies(p, sol.x, 1e-5));
    CHECK(sol.x(0, 1).real() >= 0.95 - 1e-5);
}

TEST_CASE("slightly infeasible bound is rejected") {
    CMatrix sx(2, 2);
    sx << 0, 1, 1, 0;
    SdpProblem p;
    p.dim = 2;
    p.diag_eq = 1.0;
    p.trace_ineqs.push_back({HermitianMatrix(-sx), -2.01});
    CHECK_FALSE(solve_feasibility(p).feasible());
}

TEST_CASE("malformed problems are rejected") {
    SdpProblem p;
    p.dim = 2;
    p.trace_ineqs.push_back({HermitianMatrix::identity(3), 1.0});
    CHECK_THROWS_AS(solve_feasibility(p), DimensionError);

    SdpProblem q;
    q.dim = 2;
    q.diag_eq = -1.0;
    CHECK_THROWS_AS(solve_feasibility(q), std::invalid_argument);

    SdpProblem r;
    r.dim = 2;
    r.trace_ineqs.push_back({HermitianMatrix::identity(2), std::numeric_limits<double>::infinity()});
    CHECK_THROWS_AS(solve_feasibility(r), std::invalid_argument);
}

TEST_CASE("real embedding examples") {
    CMatrix one(1, 1);
    one << 1;
    RMatrix e = complex_to_real_embedding(HermitianMatrix(one));
    CHECK(e.isApprox(RMatrix::Identity(2, 2)));

    CMatrix sy(2, 2);
    sy << 0, cplx(0, -1), cplx(0, 1), 0;
    RMatrix ey = complex_to_real_embedding(HermitianMatrix(sy));
    CHECK(ey.block(0, 0, 2, 2).isZero());
    CHECK(ey.block(2, 2, 2, 2).isZero());
    CHECK(ey(2, 1) == -1.0);
    CHECK(ey(3, 0) == 1.0);
    CHECK(ey(0, 3) == 1.0);
    Eigen::SelfAdjointEigenSolver<RMatrix> es(ey);
    CHECK(es.eigenvalues()(0) == doctest::Approx(-1.0));
    CHECK(es.eigenvalues()(1) == doctest::Approx(-1.0));
    CHECK(es.eigenvalues()(2) == doctest::Approx(1.0));
    CHECK(es.eigenvalues()(3) == doctest::Approx(1.0));
    CHECK(min_eigenvalue(HermitianMatrix(sy)) == doctest::Approx(-1.0));
}

TEST_CASE("embedding round trip, doubled spectrum and trace scaling") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const Index n = 1 + trial % 6;
        HermitianMatrix h(random_hermitian(n, rng));
        HermitianMatrix x(random_hermitian(n, rng));
        RMatrix eh = complex_to_real_embedding(h);
        CHECK((real_to_complex(eh).matrix() - h.matrix()).norm() < 1e-14);

        Eigen::SelfAdjointEigenSolver<CMatrix> ec(h.matrix());
        Eigen::SelfAdjointEigenSolver<RMatrix> er(eh);
        for (Index i = 0; i < n; ++i) {
            CHECK(std::abs(er.eigenvalues()(2 * i) - ec.eigenvalues()(i)) < 1e-10);
            CHECK(std::abs(er.eigenvalues()(2 * i + 1) - ec.eigenvalues()(i)) < 1e-10);
        }
        const double complex_trace = (h.matrix() * x.matrix()).trace().real();
        const double real_trace = 0.5 * (eh * complex_to_real_embedding(x)).trace();
        CHECK(std::abs(complex_trace - real_trace) < 1e-10);
        CHECK(std::abs(h.trace_product(x) - complex_trace) < 1e-10);
    }
}

TEST_CASE("psd projection examples") {
    RMatrix d = RMatrix::Zero(2, 2);
    d(0, 0) = 2;
    d(1, 1) = -3;
    RMatrix pd = psd_project(d);
    CHECK(std::abs(pd(0, 0) - 2) < 1e-12);
    CHECK(std::abs(pd(1, 1)) < 1e-12);
    CHECK(std::abs(pd(0, 1)) < 1e-12);

    RMatrix sx(2, 2);
    sx << 0, 1, 1, 0;
    CHECK((psd_project(sx) - RMatrix::Constant(2, 2, 0.5)).norm() < 1e-12);

    RMatrix spd(2, 2);
    spd << 2, 1, 1, 2;
    CHECK((psd_project(spd) - spd).norm() < 1e-12);
}

TEST_CASE("psd projection is idempotent and nearest among sampled PSD matrices") {
    Rng rng(5);
    std::normal_distribution<double> n01;
    for (int trial = 0; trial < 50; ++trial) {
        const Index n = 2 + trial % 7;
        RMatrix a(n, n);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j) a(i, j) = n01(rng);
        RMatrix s = (a + a.transpose()) / 2.0;
        RMatrix p = psd_project(s);
        CHECK((psd_project(p) - p).norm() < 1e-10);
        Eigen::SelfAdjointEigenSolver<RMatrix> es(p);
        CHECK(es.eigenvalues().minCoeff() > -1e-12);
        for (int k = 0; k < 5; ++k) {
            RMatrix b(n, n);
            for (Index i = 0; i < n; ++i)
                for (Index j = 0; j < n; ++j) b(i, j) = n01(rng);
            RMatrix q = b * b.transpose();
            CHECK((s - p).norm() <= (s - q).norm() + 1e-12);
        }
    }
}

TEST_CASE("planted feasible problems are solved and the answers verify") {
    Rng rng(2024);
    std::uniform_real_distribution<double> u(0.05, 0.5);
    int feasible = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const Index n = 2 + trial % 7;
        const bool with_diag = trial % 2 == 0;
        CVector v(n);
        for (Index i = 0; i < n; ++i) v(i) = std::polar(1.0, std::arg(complex_normal(rng)));
        CMatrix x0 = 0.7 * v * v.adjoint() + 0.3 * CMatrix::Identity(n, n);
        if (!with_diag) x0 *= 1.0 + u(rng);

        SdpProblem p;
        p.dim = n;
        if (with_diag) p.diag_eq = 1.0;
        const int rows = 1 + trial % 5;
        for (int r = 0; r < rows; ++r) {
            HermitianMatrix a(random_hermitian(n, rng));
            const double at = a.trace_product(HermitianMatrix(x0));
            p.trace_ineqs.push_back({a, at + u(rng)});
        }
        if (!with_diag)
            p.trace_ineqs.push_back({HermitianMatrix::identity(n), x0.trace().real() + 0.5});
        auto sol = solve_feasibility(p);
        if (sol.feasible()) {
            ++feasible;
            CHECK(satisfies(p, sol.x, 10 * SolverOptions{}.tol));
        }
    }
    CHECK(feasible >= 99);
}

TEST_CASE("random problems: every Feasible answer is sound") {
    Rng rng(77);
    std::normal_distribution<double> n01;
    int checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const Index n = 2 + trial % 5;
        SdpProblem p;
        p.dim = n;
        p.diag_eq = 1.0;
        for (int r = 0; r < 3; ++r) p.trace_ineqs.push_back({HermitianMatrix(random_hermitian(n, rng)), n01(rng)});
        auto sol = solve_feasibility(p);
        CHECK(sol.status != SdpStatus::MaxIterations);
        if (sol.feasible()) {
            ++checked;
            CHECK(satisfies(p, sol.x, 10 * SolverOptions{}.tol));
        }
    }
    CHECK(checked > 0);
}
