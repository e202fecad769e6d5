#include <doctest.h>

#include <boost/multiprecision/float128.hpp>
#include <cmath>
#include <sstream>

#include "quad_oracle.hpp"
#include "tdrc/reservoir.hpp"
#include "tdrc/rng.hpp"
#include "tdrc/varmodel.hpp"

using namespace tdrc;
using tdrc_test::quad;
using tdrc_test::quad_deviation_and_noise;

namespace {

// Appendix-style unrolled form of the layer map, as an independent oracle for
// the in-layer sweep: x_i(t) = e^{-i xi} x_N(t-1) + (1-e^{-xi}) sum_j e^{-j xi} f(...).
Vec unrolled_step(const ReservoirConfig& cfg, const KernelParams& k, const Vec& prev,
                  const Vec& input) {
    const double decay = std::exp(-cfg.xi);
    Vec out(cfg.N);
    for (int i = 1; i <= cfg.N; ++i) {
        double acc = std::pow(decay, i) * prev[cfg.N - 1];
        for (int j = 0; j <= i - 1; ++j)
            acc += (1.0 - decay) * std::pow(decay, j) *
                   eval_kernel(k, prev[i - j - 1], input[i - j - 1]);
        out[i - 1] = acc;
    }
    return out;
}

Vec random_vec(Rng& rng, int n, double lo, double hi) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.uniform(lo, hi);
    return v;
}

}  // namespace

TEST_CASE("multiplex scales the mask by the scalar input") {
    Vec c(2);
    c << 1.0, -1.0;
    const Vec r = multiplex(c, 0.5);
    CHECK(r[0] == 0.5);
    CHECK(r[1] == -0.5);
    CHECK(multiplex(Vec::Zero(4), 3.7).isZero(0.0));
    Vec c2(2);
    c2 << 2.0, 3.0;
    CHECK(multiplex(c2, 0.0).isZero(0.0));
}

TEST_CASE("reservoir config ties tau and xi to N and d") {
    const ReservoirConfig cfg(17, 0.26);
    CHECK(cfg.tau == 17 * 0.26);
    CHECK(cfg.xi == std::log1p(0.26));
    CHECK_THROWS_AS(ReservoirConfig(0, 0.5), Error);
    CHECK_THROWS_AS(ReservoirConfig(5, -0.1), Error);
}

TEST_CASE("kernel equilibria are fixed points of the layer map") {
    const auto ik = KernelParams::ikeda(1.2443, 1.4762, 0.1161);
    const ReservoirConfig cfg(20, 0.2581);
    for (const auto& eq : find_equilibria(ik, -1.0, 3.0)) {
        const Vec fp = Vec::Constant(cfg.N, eq.x0);
        const Vec next = step_discrete(cfg, ik, fp, Vec::Zero(cfg.N));
        CHECK((next - fp).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("N=1 with zero kernel decays geometrically") {
    const auto dead = KernelParams::mackey_glass(0.0, 1.0, 2.0);
    const ReservoirConfig cfg(1, 0.7);
    Vec state = Vec::Constant(1, 1.0);
    const double decay = std::exp(-cfg.xi);
    for (int t = 1; t <= 5; ++t) {
        state = step_discrete(cfg, dead, state, Vec::Zero(1));
        CHECK(state[0] == doctest::Approx(std::pow(decay, t)).epsilon(1e-14));
    }
}

TEST_CASE("in-layer sweep equals the unrolled prefix-sum form") {
    Rng rng(3);
    for (int trial = 0; trial < 25; ++trial) {
        const int N = 1 + static_cast<int>(rng.uniform(0.0, 12.0));
        const ReservoirConfig cfg(N, rng.uniform(0.05, 1.0));
        const KernelParams k =
            trial % 2 == 0 ? KernelParams::mackey_glass(rng.uniform(0.5, 2.0), 0.8, 2.0)
                           : KernelParams::ikeda(rng.uniform(0.5, 1.5), 0.9, 0.3);
        const Vec prev = random_vec(rng, N, -0.8, 0.8);
        const Vec input = random_vec(rng, N, -0.1, 0.1);
        const Vec sweep = step_discrete(cfg, k, prev, input);
        const Vec unrolled = unrolled_step(cfg, k, prev, input);
        CHECK((sweep - unrolled).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("run_discrete composes steps deterministically") {
    const auto mg = KernelParams::mackey_glass(2.0, 1.0, 2.0);
    const ReservoirConfig cfg(6, 0.4);
    Rng rng(9);
    const Vec mask = random_vec(rng, 6, -1.0, 1.0);
    const Vec init = Vec::Constant(6, 1.0);
    const std::vector<double> signal{0.01, -0.02, 0.005};

    const Mat three = run_discrete(cfg, mg, mask, signal, init);
    const Mat two = run_discrete(cfg, mg, mask, {signal[0], signal[1]}, init);
    const Vec last = step_discrete(cfg, mg, two.row(1).transpose(), multiplex(mask, signal[2]));
    CHECK((three.row(2).transpose() - last).cwiseAbs().maxCoeff() == 0.0);

    // zero signal from the stable fixed point stays put
    const Mat quiet = run_discrete(cfg, mg, mask, std::vector<double>(50, 0.0), init);
    CHECK((quiet.row(49).transpose() - init).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("perturbations near a certified equilibrium die out") {
    const auto mg = KernelParams::mackey_glass(2.0, 1.0, 2.0);  // x0 = 1, f'(x0) = 0
    const ReservoirConfig cfg(20, 0.5);
    Rng rng(17);
    Vec init = Vec::Constant(20, 1.0) + 1e-3 * random_vec(rng, 20, -1.0, 1.0);
    const Mat run = run_discrete(cfg, mg, Vec::Ones(20), std::vector<double>(500, 0.0), init);
    const double dist = (run.row(499).transpose() - Vec::Constant(20, 1.0)).cwiseAbs().maxCoeff();
    CHECK(dist < 1e-6);
}

TEST_CASE("one-step deviation matches the truncated noise expansion to O(z^{R+1})") {
    const double eta = 1.0781;
    const auto mg = KernelParams::mackey_glass(eta, 0.796, 2.0);
    const double x0 = std::sqrt(eta - 1.0);
    const ReservoirConfig cfg(10, 0.3);
    Rng rng(21);
    const Vec mask = random_vec(rng, 10, -1.0, 1.0);

    auto [dev, eps] = quad_deviation_and_noise(cfg, mg, x0, mask, 8, 1e-3);
    for (size_t i = 0; i < dev.size(); ++i) {
        const double tail = static_cast<double>(boost::multiprecision::abs(dev[i] - eps[i]));
        CHECK(tail <= 1e-20);
    }

    // the library's double-precision noise vector agrees with the quad series
    const Vec lib = noise_vector(cfg, mg, x0, mask, 8, 1e-3);
    for (int i = 0; i < cfg.N; ++i)
        CHECK(lib[i] ==
              doctest::Approx(static_cast<double>(eps[static_cast<size_t>(i)])).epsilon(1e-12));
}

TEST_CASE("continuous integrator is stationary on the equilibrium history") {
    const auto ik = KernelParams::ikeda(1.2443, 1.4762, 0.1161);
    const ReservoirConfig cfg(10, 0.2581);
    const auto eqs = find_equilibria(ik, -1.0, 3.0);
    const double x0 = eqs[0].x0;
    const Mat layers = run_continuous(cfg, ik, Vec::Ones(10), std::vector<double>(100, 0.0), x0);
    CHECK((layers.array() - x0).abs().maxCoeff() < 1e-8);
}

TEST_CASE("continuous trajectory converges to the positive Mackey-Glass branch") {
    const double eta = 1.0781;
    const auto mg = KernelParams::mackey_glass(eta, 0.796, 2.0);
    const ReservoirConfig cfg(20, 0.4);
    const Mat layers = run_continuous(cfg, mg, Vec::Ones(20), std::vector<double>(100, 0.0), 0.28);
    const double target = std::sqrt(eta - 1.0);  // 0.2795
    CHECK(std::abs(layers(99, 19) - target) < 1e-3);
}

TEST_CASE("csv export is lossless and stable") {
    Mat layers(2, 3);
    layers << 0.1, 0.2, 0.3, 1.0 / 3.0, -1e-17, 5.0;
    std::ostringstream os;
    write_layers_csv(os, layers);
    const std::string out = os.str();
    CHECK(out.find("t,x_1,x_2,x_3\n") == 0);
    CHECK(out.find("0.33333333333333331") != std::string::npos);
}
