#pragma once

// Stacked-KKT oracle for the FIR-constrained H2 QP: assembles the whole
// problem as one sparse symmetric KKT system over every scalar entry of every
// stored block. Test-only; deliberately independent of the per-h solver.

#include <Eigen/Sparse>
#include <catch2/catch_amalgamated.hpp>
#include <map>
#include <tuple>

#include "sls/ltv_sls.hpp"

namespace sls::testing {

// Independent oracle: the whole FIR-constrained QP assembled as one sparse KKT
// system over every scalar entry of every stored R and M block.
struct StackedQp {
    std::map<std::tuple<char, int, int>, int> index;  // (kind, t, k) -> first scalar var
    int num_vars = 0;

    void add_block(char kind, int t, int k, int n, int m) {
        index[{kind, t, k}] = num_vars;
        num_vars += (kind == 'R' ? n : m) * n;
    }

    int entry(char kind, int t, int k, int row, int col, int n) const {
        return index.at({kind, t, k}) + row * n + col;
    }
};

FirClm stacked_kkt_solve(const LtvModel& model, int T) {
    const int H = model.horizon();
    const int n = model.state_dim();
    const int m = model.input_dim();

    StackedQp qp;
    for (int t = 0; t <= H; ++t)
        for (int k = 1; k <= std::min(t + 1, T); ++k) {
            qp.add_block('R', t, k, n, m);
            qp.add_block('M', t, k, n, m);
        }

    using Trip = Eigen::Triplet<double>;
    std::vector<Trip> trips;
    std::vector<double> rhs_rows;
    int row = 0;
    auto emit = [&](int var, double coeff) { trips.emplace_back(row, var, coeff); };

    // R_{t,1} = I
    for (int t = 0; t <= H; ++t)
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) {
                emit(qp.entry('R', t, 1, r, c, n), 1.0);
                rhs_rows.push_back(r == c ? 1.0 : 0.0);
                ++row;
            }

    // R_{t,k} = A_{t-1} R_{t-1,k-1} + B_{t-1} M_{t-1,k-1}
    for (int t = 1; t <= H; ++t)
        for (int k = 2; k <= std::min(t + 1, T); ++k)
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) {
                    emit(qp.entry('R', t, k, r, c, n), 1.0);
                    for (int j = 0; j < n; ++j)
                        emit(qp.entry('R', t - 1, k - 1, j, c, n),
                             -model.A[static_cast<size_t>(t - 1)](r, j));
                    for (int j = 0; j < m; ++j)
                        emit(qp.entry('M', t - 1, k - 1, j, c, n),
                             -model.B[static_cast<size_t>(t - 1)](r, j));
                    rhs_rows.push_back(0.0);
                    ++row;
                }

    // terminal R_{t,T} = 0 wherever the block exists
    for (int t = T - 1; t <= H; ++t)
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) {
                emit(qp.entry('R', t, T, r, c, n), 1.0);
                rhs_rows.push_back(0.0);
                ++row;
            }

    const int nc = row;
    const int nv = qp.num_vars;
    Eigen::SparseMatrix<double> kkt(nv + nc, nv + nc);
    std::vector<Trip> all;
    all.reserve(trips.size() * 2 + static_cast<size_t>(nv));
    for (int i = 0; i < nv; ++i) all.emplace_back(i, i, 2.0);  // objective hessian
    for (const auto& tr : trips) {
        all.emplace_back(nv + tr.row(), tr.col(), tr.value());
        all.emplace_back(tr.col(), nv + tr.row(), tr.value());
    }
    kkt.setFromTriplets(all.begin(), all.end());

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nv + nc);
    for (int i = 0; i < nc; ++i) rhs(nv + i) = rhs_rows[static_cast<size_t>(i)];

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(kkt);
    REQUIRE(lu.info() == Eigen::Success);
    Eigen::VectorXd z = lu.solve(rhs);

    FirClm clm{LinearCausalKernel(n, n, H, T), LinearCausalKernel(n, m, H, T), std::nullopt,
               std::nullopt};
    for (int t = 0; t <= H; ++t)
        for (int k = 1; k <= std::min(t + 1, T); ++k) {
            Eigen::MatrixXd rb(n, n), mb(m, n);
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) rb(r, c) = z(qp.entry('R', t, k, r, c, n));
            for (int r = 0; r < m; ++r)
                for (int c = 0; c < n; ++c) mb(r, c) = z(qp.entry('M', t, k, r, c, n));
            clm.R.set_block(t, k, rb);
            clm.M.set_block(t, k, mb);
        }
    return clm;
}


}  // namespace sls::testing
