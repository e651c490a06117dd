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

#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "hybridcast/types.hpp"

namespace hybridcast::sdp {

/// Dense complex Hermitian matrix. The stored matrix is always exactly
/// conjugate-symmetric: construction replaces the input with (A + A^H) / 2.
class HermitianMatrix {
public:
    HermitianMatrix() = default;
    explicit HermitianMatrix(const CMatrix& m);

    static HermitianMatrix identity(Index n);
    static HermitianMatrix zero(Index n);
    /// v v^H
    static HermitianMatrix outer(const CVector& v);

    Index dim() const { return m_.rows(); }
    const CMatrix& matrix() const { return m_; }
    cplx operator()(Index i, Index j) const { return m_(i, j); }

    /// Re Tr(A X); the imaginary part vanishes for Hermitian operands.
    double trace_product(const HermitianMatrix& x) const;
    double trace() const { return m_.trace().real(); }

    HermitianMatrix& operator+=(const HermitianMatrix& o);
    friend HermitianMatrix operator+(HermitianMatrix a, const HermitianMatrix& b) { return a += b; }
    friend HermitianMatrix operator*(double s, HermitianMatrix a) {
        a.m_ *= s;
        return a;
    }

private:
    CMatrix m_;
};

/// Tr(A X) <= bound
struct TraceInequality {
    HermitianMatrix a;
    double bound = 0.0;
};

/// Feasibility instance over a Hermitian PSD variable X of size `dim`:
/// Tr(A_i X) <= b_i for each row, optionally diag(X) = d, and X >= 0.
struct SdpProblem {
    Index dim = 0;
    std::vector<TraceInequality> trace_ineqs;
    std::optional<double> diag_eq;

    /// Throws DimensionError / std::invalid_argument on malformed input.
    void validate() const;
};

enum class SdpStatus { Feasible, Infeasible, MaxIterations };

std::string_view to_string(SdpStatus s);

struct SdpSolution {
    SdpStatus status = SdpStatus::MaxIterations;
    HermitianMatrix x;
    /// Optimal max-slack value, in units of the Frobenius-normalized rows.
    double slack = 0.0;
    int iterations = 0;
    double residual = 0.0;

    bool feasible() const { return status == SdpStatus::Feasible; }
};

struct SolverOptions {
    double tol = 1e-6;
    int max_iter = 100;
    /// Upper bound imposed on the slack variable; only its sign is used.
    double slack_cap = 1.0;
};

/// Decides feasibility of `problem` by maximizing a common slack s over
/// Tr(A_i X) + s ||A_i||_F <= b_i with the diagonal and PSD constraints held
/// exact. Feasible iff the optimal s >= -tol. Rows that are constant on the
/// diagonal-constrained set are checked directly instead of entering the
/// slack maximization. The slack problem is solved with a primal-dual
/// interior-point method (HKM direction, Mehrotra predictor-corrector).
SdpSolution solve_feasibility(const SdpProblem& problem, const SolverOptions& options = {});

/// [[Re H, -Im H], [Im H, Re H]]
RMatrix complex_to_real_embedding(const HermitianMatrix& h);

/// Inverse of complex_to_real_embedding; reads the Re/Im blocks and
/// averages the redundant copies.
HermitianMatrix real_to_complex(const RMatrix& embedded);

/// Frobenius-nearest PSD matrix: clamps negative eigenvalues to zero.
RMatrix psd_project(const RMatrix& s);

/// Smallest eigenvalue of a Hermitian matrix.
double min_eigenvalue(const HermitianMatrix& h);

} // namespace hybridcast::sdp
