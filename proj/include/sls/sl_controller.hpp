#pragma once

#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sls/causal_operator.hpp"
#include "sls/clm.hpp"

namespace sls {

/// System level controller SL(A, B): the dynamical system
///   c_t = a_t - A_t(0, c_{t-1:0}),   b_t = B_t(c_{t:0}),
/// streamed one measurement at a time. Requires A - I strictly causal.
class SlController {
  public:
    SlController(CausalOperator a_op, CausalOperator b_op)
        : a_op_(std::move(a_op)), b_op_(std::move(b_op)) {
        if (a_op_.in_dim() != a_op_.out_dim())
            throw std::invalid_argument("SlController: A must be square");
        if (b_op_.in_dim() != a_op_.in_dim())
            throw std::invalid_argument("SlController: B input dim must match A");
        if (!a_op_.identity_leading() && !check_identity_leading(a_op_, 8, 2, 23))
            throw std::invalid_argument("SlController: (A - I) must be strictly causal");
    }

    explicit SlController(const ClmPair& psi) : SlController(psi.psi_x(), psi.psi_u()) {}

    int measurement_dim() const { return a_op_.in_dim(); }
    int output_dim() const { return b_op_.out_dim(); }
    int time() const { return static_cast<int>(state_.size()) - 1; }

    const std::vector<Eigen::VectorXd>& internal_state() const { return state_; }

    /// Advances one step: appends c_t and returns b_t.
    Eigen::VectorXd step(const Eigen::VectorXd& measurement) {
        if (measurement.size() != a_op_.in_dim())
            throw std::invalid_argument("SlController::step: measurement dim mismatch");
        const int t = time() + 1;
        std::span<const Eigen::VectorXd> past(state_);
        Eigen::VectorXd c =
            measurement - a_op_.component(t, History::zeroed_current(past, a_op_.in_dim()));
        state_.push_back(std::move(c));
        std::span<const Eigen::VectorXd> full(state_);
        return b_op_.component(t, History::prefix(full));
    }

    void reset() { state_.clear(); }

    const CausalOperator& a_op() const { return a_op_; }
    const CausalOperator& b_op() const { return b_op_; }

  private:
    CausalOperator a_op_;
    CausalOperator b_op_;
    std::vector<Eigen::VectorXd> state_;
};

}  // namespace sls
