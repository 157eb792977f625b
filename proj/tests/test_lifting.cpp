#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mrid/errors.hpp"
#include "mrid/lifting.hpp"

using namespace mrid;

namespace {

Spectrum random_spectrum(int n, unsigned seed, double ts) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<cd> bins(n);
    for (auto& v : bins) v = cd(dist(rng), dist(rng));
    return Spectrum(std::move(bins), Rate::fast, ts);
}

} // namespace

TEST_CASE("lifting with F=1 is the identity") {
    const Spectrum x = random_spectrum(16, 3, 0.01);
    const LiftedSpectrum lifted = lift(x, 1);
    for (int k = 0; k < 16; ++k) CHECK(lifted.entry(k, 0) == x.bins[k]);
}

TEST_CASE("lifting index arithmetic for N=6, F=3") {
    Spectrum x({cd(0), cd(1), cd(2), cd(3), cd(4), cd(5)}, Rate::fast, 1.0);
    const LiftedSpectrum lifted = lift(x, 3); // M = 2
    CHECK(lifted.entry(0, 0) == cd(0));
    CHECK(lifted.entry(0, 1) == cd(2));
    CHECK(lifted.entry(0, 2) == cd(4));
    CHECK(lifted.entry(1, 0) == cd(1));
    CHECK(lifted.entry(1, 1) == cd(3));
    CHECK(lifted.entry(1, 2) == cd(5));
    CHECK(lifted.entry(5, 0) == cd(5));
    CHECK(lifted.entry(5, 1) == cd(1)); // (5+2) mod 6
    CHECK(lifted.entry(5, 2) == cd(3));
}

TEST_CASE("unlift inverts lift") {
    const Spectrum x = random_spectrum(24, 11, 0.5);
    const Spectrum back = unlift(lift(x, 4));
    for (int k = 0; k < 24; ++k) CHECK(back.bins[k] == x.bins[k]);
}

TEST_CASE("lift rejects non-divisible lengths") {
    const Spectrum x = random_spectrum(10, 1, 1.0);
    CHECK_THROWS_AS(lift(x, 3), std::invalid_argument);
}

TEST_CASE("lifted vectors at bin k+M are cyclic shifts of those at bin k") {
    const Spectrum x = random_spectrum(36, 5, 0.1);
    const LiftedSpectrum lifted = lift(x, 3);
    const int m = 12;
    for (int k = 0; k < 36 - m; ++k) {
        for (int f = 0; f < 3; ++f)
            CHECK(lifted.entry(k + m, f) == lifted.entry(k, (f + 1) % 3));
    }
}

TEST_CASE("analytic lifted M with zero controller is diagonal in G11") {
    const RateConfig cfg = RateConfig::make(1.0 / 240.0, 3, 240);
    MultirateLoop loop;
    loop.plant = make_demo_plant("two_mass", cfg.tsh);
    loop.controller = StateSpaceModel::gain(0.0, Rate::slow, cfg.tsl());
    loop.rate = cfg;
    const double shift = cfg.ws_fast() / 3;
    for (int k : {0, 7, 100, 200}) {
        const Eigen::MatrixXcd m = analytic_lifted_m(loop, k);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                if (i == j) {
                    const cd g11 = eval_frf(loop.plant.g11, cfg.omega(k) + i * shift);
                    CHECK(std::abs(m(i, j) - g11) < 1e-14);
                } else {
                    CHECK(std::abs(m(i, j)) == 0.0);
                }
            }
        }
    }
}

TEST_CASE("analytic lifted M degenerates to the classical closed loop at F=1") {
    const RateConfig cfg = RateConfig::make(1.0 / 240.0, 1, 240);
    MultirateLoop loop;
    loop.plant = make_demo_plant("two_mass", cfg.tsh);
    loop.controller = make_demo_controller(cfg.tsl(), Rate::slow, 55.0);
    loop.rate = cfg;
    for (int k : {1, 40, 111, 239}) {
        const Eigen::MatrixXcd m = analytic_lifted_m(loop, k);
        REQUIRE(m.rows() == 1);
        const double omega = cfg.omega(k);
        const cd g11 = eval_frf(loop.plant.g11, omega);
        const cd g12 = eval_frf(loop.plant.g12, omega);
        const cd g21 = eval_frf(loop.plant.g21, omega);
        const cd g22 = eval_frf(loop.plant.g22, omega);
        const cd kd = eval_frf(loop.controller, omega);
        const cd qd = kd / (1.0 - kd * g22);
        const cd truth = g11 + g12 * qd * g21;
        CHECK(std::abs(m(0, 0) - truth) < 1e-12 * std::abs(truth));
    }
}

TEST_CASE("steady-state lifted record satisfies Z = M W bin by bin") {
    const RateConfig cfg = RateConfig::make(1.0 / 240.0, 3, 2160);
    const MultirateLoop loop = make_demo_loop(cfg);
    const Signal w = multisine(cfg, 1, cfg.n_fast / 2 - 1, 1.0, 13);
    const MultirateRecord rec = simulate_multirate_loop(loop, w, 4);
    const LiftedSpectrum wl = lift(dft(w), 3);
    const LiftedSpectrum zl = lift(dft(rec.z), 3);
    double worst = 0.0;
    for (int k = 0; k < cfg.n_fast; ++k) {
        const Eigen::MatrixXcd m = analytic_lifted_m(loop, k);
        const Eigen::VectorXcd predicted = m * wl.at(k);
        const Eigen::VectorXcd actual = zl.at(k);
        worst = std::max(worst, (predicted - actual).norm() / actual.norm());
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("analytic lifted M at bin k+M is the cyclically permuted M at bin k") {
    const RateConfig cfg = RateConfig::make(1.0 / 240.0, 3, 720);
    const MultirateLoop loop = make_demo_loop(cfg);
    const int m = cfg.m_slow();
    for (int k : {0, 3, 50, 200}) {
        const Eigen::MatrixXcd a = analytic_lifted_m(loop, k);
        const Eigen::MatrixXcd b = analytic_lifted_m(loop, k + m);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                CHECK(std::abs(b(i, j) - a((i + 1) % 3, (j + 1) % 3)) <=
                      1e-12 * std::abs(a((i + 1) % 3, (j + 1) % 3)) + 1e-15);
    }
}

TEST_CASE("column-shift consistency: every lifted column carries the gain curve") {
    const RateConfig cfg = RateConfig::make(1.0 / 240.0, 3, 720);
    const MultirateLoop loop = make_demo_loop(cfg);
    const int m = cfg.m_slow();
    const int n = cfg.n_fast;
    std::vector<Eigen::MatrixXcd> mats(n);
    for (int k = 0; k < n; ++k) mats[k] = analytic_lifted_m(loop, k);
    for (int k = 0; k < n; k += 13) {
        const double first = std::sqrt(std::norm(mats[k](0, 0)) + std::norm(mats[k](1, 0)) +
                                       std::norm(mats[k](2, 0)));
        for (int f = 1; f < 3; ++f) {
            const int src = ((k - f * m) % n + n) % n;
            double acc = 0.0;
            for (int i = 0; i < 3; ++i) acc += std::norm(mats[src](i, f));
            CHECK(std::abs(std::sqrt(acc) - first) <= 1e-10 * first);
        }
    }
}

TEST_CASE("analytic_lifted_frf fills the whole grid without flags on the demo loop") {
    const RateConfig cfg = RateConfig::make(1.0 / 240.0, 3, 720);
    const MultirateLoop loop = make_demo_loop(cfg);
    const LiftedFrf frf = analytic_lifted_frf(loop);
    CHECK(frf.n == 720);
    CHECK(frf.fac == 3);
    CHECK(frf.flagged_count() == 0);
    for (int k = 0; k < frf.n; ++k) CHECK(frf.t[k].norm() == 0.0);
}
