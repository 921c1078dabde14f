#include <catch2/catch_amalgamated.hpp>

#include "sls/kernel.hpp"
#include "sls/random.hpp"

using namespace sls;
using Catch::Approx;

TEST_CASE("kernel apply matches hand computation", "[kernel]") {
    // scalar kernel: y_t = 1*x_t + 2*x_{t-1}
    LinearCausalKernel k(1, 1, 3, 2);
    for (int t = 0; t <= 3; ++t) {
        k.set_block(t, 1, Eigen::MatrixXd::Constant(1, 1, 1.0));
        if (t >= 1) k.set_block(t, 2, Eigen::MatrixXd::Constant(1, 1, 2.0));
    }
    Sequence y = k.apply(Sequence::scalar({1.0, 0.0, 3.0, 1.0}));
    REQUIRE(max_abs_diff(y, Sequence::scalar({1.0, 2.0, 3.0, 7.0})) == 0.0);

    // blocks beyond the FIR horizon read back as zero
    REQUIRE(k.block(3, 3).lpNorm<Eigen::Infinity>() == 0.0);
    REQUIRE_THROWS_AS(k.block(3, 5), std::out_of_range);
    REQUIRE_THROWS_AS(k.set_block(2, 3, Eigen::MatrixXd::Zero(1, 1)), std::out_of_range);
}

TEST_CASE("kernel algebra agrees with operator arithmetic", "[kernel][property]") {
    Rng rng(31);
    for (int trial = 0; trial < 12; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 3);
        const int h = 1 + static_cast<int>(rng() % 3);
        const int m = 1 + static_cast<int>(rng() % 3);
        const int H = 10;
        LinearCausalKernel a = random_kernel(rng, h, m, H, 3);
        LinearCausalKernel b = random_kernel(rng, n, h, H, 4);
        Sequence x = random_sequence(rng, n, H);

        Sequence via_kernel = kernel_compose(a, b).apply(x);
        Sequence via_ops = a.to_operator().evaluate(b.to_operator().evaluate(x));
        REQUIRE(max_abs_diff(via_kernel, via_ops) < 1e-12);

        LinearCausalKernel c = random_kernel(rng, h, m, H, 5);
        Sequence add_kernel = kernel_add(a, c).apply(b.apply(x));
        Sequence add_ops = a.apply(b.apply(x)) + c.apply(b.apply(x));
        REQUIRE(max_abs_diff(add_kernel, add_ops) < 1e-12);

        Sequence sub_kernel = kernel_sub(a, c).apply(b.apply(x));
        Sequence sub_ops = a.apply(b.apply(x)) - c.apply(b.apply(x));
        REQUIRE(max_abs_diff(sub_kernel, sub_ops) < 1e-12);
    }
}

TEST_CASE("identity kernel and leading identity", "[kernel]") {
    LinearCausalKernel id = LinearCausalKernel::identity(3, 5);
    Rng rng(37);
    Sequence x = random_sequence(rng, 3, 5);
    REQUIRE(max_abs_diff(id.apply(x), x) == 0.0);
    REQUIRE(id.leading_identity());

    LinearCausalKernel k = random_kernel(rng, 3, 3, 5, 3, 0.5, true);
    REQUIRE(k.leading_identity());
    k.set_block(2, 1, Eigen::MatrixXd::Zero(3, 3));
    REQUIRE_FALSE(k.leading_identity());
}

TEST_CASE("linf induced norm of a kernel", "[kernel]") {
    // y_t = 0.5 x_{t-1}: induced linf norm 0.5
    LinearCausalKernel k(1, 1, 6, 2);
    for (int t = 1; t <= 6; ++t) k.set_block(t, 2, Eigen::MatrixXd::Constant(1, 1, 0.5));
    REQUIRE(k.linf_induced_norm() == Approx(0.5));

    // row sums add up across blocks
    LinearCausalKernel k2(2, 2, 4, 3);
    Eigen::MatrixXd b1(2, 2), b2(2, 2);
    b1 << 1, -2, 0, 0.5;
    b2 << 0.25, 0, 1, 1;
    k2.set_block(3, 1, b1);
    k2.set_block(3, 2, b2);
    REQUIRE(k2.linf_induced_norm() == Approx(3.25));  // row 0: 1+2+0.25

    // achieved by a sign-matched input
    Sequence worst(2, 3);
    worst[3] << 1.0, -1.0;
    worst[2] << 1.0, 1.0;
    REQUIRE(lp_norm(k2.apply(worst), Norm::inf, Norm::inf) == Approx(3.25));
}
