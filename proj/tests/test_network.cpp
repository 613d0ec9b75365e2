#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>

#include "cvqt/channels.hpp"
#include "cvqt/entanglement.hpp"
#include "cvqt/network.hpp"
#include "cvqt/sampling.hpp"
#include "cvqt/teleport.hpp"

using namespace cvqt;

namespace {

const Mat kCoherentIn = 0.5 * Mat::identity(2);
const double kInf = std::numeric_limits<double>::infinity();

ThreeModeBlocks random_net(Rng& rng, double nu_max = 1.4, double r_max = 0.7) {
    return ThreeModeBlocks::from_state(random_state(3, rng, nu_max, r_max, 0.5));
}

SqueezedProjectorSpec random_pure_spec(Rng& rng) {
    std::uniform_real_distribution<double> uxi(-1.2, 1.2);
    std::uniform_real_distribution<double> uphi(0.0, M_PI);
    std::uniform_real_distribution<double> ud(-0.5, 0.5);
    SqueezedProjectorSpec spec;
    spec.xi = std::exp(2.0 * uxi(rng));
    spec.phi = uphi(rng);
    spec.alpha = {ud(rng), ud(rng)};
    return spec;
}

}  // namespace

TEST_CASE("block round trip") {
    Rng rng(5);
    GaussianState s = random_state(3, rng);
    ThreeModeBlocks net = ThreeModeBlocks::from_state(s);
    CHECK(max_abs_diff(net.reassemble(), s.cm.matrix()) == 0.0);
    CHECK(net.displacement() == s.displacement);
}

TEST_CASE("traced fidelity") {
    SUBCASE("unsqueezed network teleports classically") {
        ThreeModeBlocks net = ThreeModeBlocks::from_state(nmsv(3, 0.0));
        CHECK(traced_fidelity(net, kCoherentIn) == 0.5);
    }

    SUBCASE("three-mode squeezed vacuum respects the telecloning bound") {
        for (double r = 0.1; r <= 2.05; r += 0.1) {
            ThreeModeBlocks net = ThreeModeBlocks::from_state(nmsv(3, r));
            CHECK(traced_fidelity(net, kCoherentIn) <= 2.0 / 3.0 + 1e-9);
        }
    }

    SUBCASE("uncorrelated third mode reduces to the two-mode formula") {
        Rng rng(12);
        GaussianState two = random_state(2, rng, 1.3, 0.6, 0.0);
        Mat v6(6, 6);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) v6(i, j) = two.cm(i, j);
        v6(4, 4) = v6(5, 5) = 0.7;
        GaussianState three(Vec(6, 0.0), validate_cm(v6));
        ThreeModeBlocks net = ThreeModeBlocks::from_state(three);
        CHECK(traced_fidelity(net, kCoherentIn) ==
              doctest::Approx(fidelity(kCoherentIn, two).fidelity).epsilon(1e-14));
    }
}

TEST_CASE("conditioning matrix") {
    SUBCASE("identity case") {
        MMatrix mm = m_matrix(0.5 * Mat::identity(2), 0.5 * Mat::identity(2));
        CHECK(mm.g == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(max_abs_diff(mm.m, Mat::identity(2)) < 1e-14);
    }

    SUBCASE("pure projector gives the inverse-sum form") {
        Rng rng(9);
        std::uniform_real_distribution<double> uxi(-1.0, 1.0);
        std::uniform_real_distribution<double> uphi(0.0, M_PI);
        for (int trial = 0; trial < 100; ++trial) {
            Mat c = random_cm(1, rng).matrix();
            Mat v0 = squeezed_projector_cm(std::exp(2.0 * uxi(rng)), uphi(rng));
            CHECK(det2(v0) == doctest::Approx(0.25).epsilon(1e-12));
            MMatrix mm = m_matrix(c, v0);
            CHECK(max_abs_diff(mm.m, inv2(c + v0)) < 1e-10);
            CHECK(mm.g > 0.5);
        }
    }

    SUBCASE("mixed measurement stays symmetric positive definite") {
        Rng rng(10);
        for (int trial = 0; trial < 100; ++trial) {
            Mat c = random_cm(1, rng).matrix();
            Mat v0 = random_cm(1, rng).matrix();  // generally det > 1/4
            MMatrix mm = m_matrix(c, v0);
            CHECK(mm.m(0, 1) == mm.m(1, 0));
            CHECK(mm.m(0, 0) > 0.0);
            CHECK(det2(mm.m) > 0.0);
        }
    }

    SUBCASE("homodyne limits agree with large finite squeezing") {
        Rng rng(11);
        std::uniform_real_distribution<double> uphi(0.0, M_PI);
        for (int trial = 0; trial < 50; ++trial) {
            Mat c = random_cm(1, rng).matrix();
            const double phi = uphi(rng);
            Mat m_inf = m_matrix_homodyne(c, phi, true);
            Mat m_big = m_matrix(c, squeezed_projector_cm(1e6, phi)).m;
            CHECK(max_abs_diff(m_inf, m_big) < 1e-4);

            Mat m_zero = m_matrix_homodyne(c, phi, false);
            Mat m_small = m_matrix(c, squeezed_projector_cm(1e-6, phi)).m;
            CHECK(max_abs_diff(m_zero, m_small) < 1e-4);
        }
    }
}

TEST_CASE("conditioning the network state") {
    SUBCASE("measurement on an uncorrelated mode changes nothing") {
        Rng rng(21);
        GaussianState two = random_state(2, rng, 1.3, 0.6, 0.4);
        Mat v6(6, 6);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) v6(i, j) = two.cm(i, j);
        v6(4, 4) = v6(5, 5) = 0.9;
        GaussianState three(
            Vec{two.displacement[0], two.displacement[1], two.displacement[2],
                two.displacement[3], 0.1, -0.2},
            validate_cm(v6));
        ThreeModeBlocks net = ThreeModeBlocks::from_state(three);

        SqueezedProjectorSpec spec;
        spec.xi = 1.7;
        spec.phi = 0.9;
        spec.alpha = {0.3, 0.4};
        ConditionalChannel cond = condition_on_measurement(net, spec);
        CHECK(max_abs_diff(cond.state.cm.matrix(), net.v_traced()) < 1e-15);
        for (std::size_t i = 0; i < 4; ++i)
            CHECK(cond.state.displacement[i] == doctest::Approx(two.displacement[i]));
    }

    SUBCASE("heterodyne conditioning uses (C + I/2)^-1") {
        ThreeModeBlocks net = ThreeModeBlocks::from_state(nmsv(3, 0.5));
        SqueezedProjectorSpec het;  // xi = 1, phi = 0
        het.xi = 1.0;
        ConditionalChannel cond = condition_on_measurement(net, het);

        Mat m = inv2(net.c + 0.5 * Mat::identity(2));
        Mat expected = net.v_traced();
        Mat eme = net.e * m * net.e.transposed();
        Mat emd = net.e * m * net.d.transposed();
        Mat dmd = net.d * m * net.d.transposed();
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) {
                expected(i, j) -= eme(i, j);
                expected(i, j + 2) -= emd(i, j);
                expected(j + 2, i) -= emd(i, j);
                expected(i + 2, j + 2) -= dmd(i, j);
            }
        CHECK(max_abs_diff(cond.state.cm.matrix(), expected) < 1e-12);
        CHECK(cond.probability.has_value());
        CHECK(*cond.probability > 0.0);
        CHECK(*cond.probability <= 1.0);
    }

    SUBCASE("homodyne boundary equals the large-xi limit") {
        ThreeModeBlocks net = ThreeModeBlocks::from_state(cheap_three_mode(0.7));
        SqueezedProjectorSpec hom;
        hom.xi = kInf;
        hom.phi = 1.1;
        SqueezedProjectorSpec big;
        big.xi = 1e6;
        big.phi = 1.1;
        CHECK(max_abs_diff(condition_on_measurement(net, hom).state.cm.matrix(),
                           condition_on_measurement(net, big).state.cm.matrix()) < 1e-4);
    }

    SUBCASE("conditional CM is outcome independent, drift is not") {
        Rng rng(31);
        ThreeModeBlocks net = random_net(rng);
        SqueezedProjectorSpec spec;
        spec.xi = 2.2;
        spec.phi = 0.4;
        spec.alpha = {0.0, 0.0};
        ConditionalChannel ref = condition_on_measurement(net, spec);
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        for (int k = 0; k < 10; ++k) {
            spec.alpha = {u(rng), u(rng)};
            ConditionalChannel other = condition_on_measurement(net, spec);
            // bitwise identical covariance across outcomes
            CHECK(std::memcmp(ref.state.cm.matrix().data(), other.state.cm.matrix().data(),
                              16 * sizeof(double)) == 0);
        }
    }

    SUBCASE("mixed measurement CM carries no dichotomic probability") {
        Rng rng(33);
        ThreeModeBlocks net = random_net(rng);
        ConditionalChannel cond =
            condition_on_measurement(net, Mat::identity(2), Vec{0.0, 0.0});
        CHECK_FALSE(cond.probability.has_value());
    }
}

TEST_CASE("conditional fidelity matches the teleport formula on the conditional state") {
    Rng rng(41);
    for (int trial = 0; trial < 200; ++trial) {
        ThreeModeBlocks net = random_net(rng);
        SqueezedProjectorSpec spec = random_pure_spec(rng);
        const double via_gamma = conditional_fidelity(net, kCoherentIn, spec);
        ConditionalChannel cond = condition_on_measurement(net, spec);
        const double via_state = fidelity(kCoherentIn, cond.state).fidelity;
        CHECK(std::abs(via_gamma - via_state) < 1e-12);
    }
}

TEST_CASE("pure-spec conditioning never lowers the fidelity") {
    Rng rng(51);
    for (int trial = 0; trial < 500; ++trial) {
        ThreeModeBlocks net = random_net(rng);
        SqueezedProjectorSpec spec = random_pure_spec(rng);
        CHECK(conditional_fidelity(net, kCoherentIn, spec) >=
              traced_fidelity(net, kCoherentIn) - 1e-12);
    }
}

TEST_CASE("optimizer vectors") {
    SUBCASE("uncorrelated assistant zeroes the gain terms") {
        Rng rng(61);
        GaussianState two = random_state(2, rng, 1.3, 0.6, 0.0);
        Mat v6(6, 6);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) v6(i, j) = two.cm(i, j);
        v6(4, 4) = v6(5, 5) = 0.6;
        ThreeModeBlocks net =
            ThreeModeBlocks::from_state(GaussianState(Vec(6, 0.0), validate_cm(v6)));
        OptimizerVectors v = optimizer_vectors(net, kCoherentIn);
        CHECK(max_abs(v.u_mat) == 0.0);
        CHECK(v.u_y == 0.0);
        for (double phi : {0.0, 0.5, 1.5}) {
            CHECK(v.k(phi)[0] == 0.0);
            CHECK(v.k(phi)[1] > 0.0);
            CHECK(fidelity_from_vectors(v, 0.0, phi) ==
                  doctest::Approx(traced_fidelity(net, kCoherentIn)).epsilon(1e-13));
        }
    }

    SUBCASE("vector form equals the conditional fidelity") {
        Rng rng(71);
        std::uniform_real_distribution<double> uphi(0.0, M_PI);
        for (int trial = 0; trial < 200; ++trial) {
            ThreeModeBlocks net = random_net(rng);
            OptimizerVectors v = optimizer_vectors(net, kCoherentIn);
            SqueezedProjectorSpec spec;
            spec.xi = trial % 3 == 0 ? 1.0 : std::exp(2.0 * (uphi(rng) - M_PI / 2));
            spec.phi = uphi(rng);
            const double via_vectors = fidelity_from_vectors(v, spec.xi, spec.phi);
            const double via_blocks = conditional_fidelity(net, kCoherentIn, spec);
            CHECK(std::abs(via_vectors - via_blocks) < 1e-12);
        }
    }

    SUBCASE("k_y stays positive for bona fide assistant blocks") {
        Rng rng(81);
        for (int trial = 0; trial < 50; ++trial) {
            ThreeModeBlocks net = random_net(rng);
            OptimizerVectors v = optimizer_vectors(net, kCoherentIn);
            for (double phi = 0.0; phi < M_PI; phi += 0.05) CHECK(v.k(phi)[1] > 0.0);
        }
    }
}

TEST_CASE("optimal xi") {
    SUBCASE("interior solution dominates a dense xi grid") {
        Rng rng(91);
        int interior_seen = 0;
        while (interior_seen < 25) {
            ThreeModeBlocks net = random_net(rng);
            OptimizerVectors v = optimizer_vectors(net, kCoherentIn);
            std::uniform_real_distribution<double> uphi(0.0, M_PI);
            const double phi = uphi(rng);
            if (!v.p(phi)) continue;
            ++interior_seen;
            const double xi_star = optimal_xi(phi, v);
            CHECK(std::isfinite(xi_star));
            const double f_star = fidelity_from_vectors(v, xi_star, phi);
            for (int k = 0; k <= 1000; ++k) {
                const double xi = std::pow(10.0, -4.0 + 8.0 * k / 1000.0);
                CHECK(f_star >= fidelity_from_vectors(v, xi, phi) - 1e-12);
            }
        }
    }

    SUBCASE("boundary phases pick the better homodyne") {
        Rng rng(101);
        int boundary_seen = 0;
        while (boundary_seen < 25) {
            ThreeModeBlocks net = random_net(rng);
            OptimizerVectors v = optimizer_vectors(net, kCoherentIn);
            std::uniform_real_distribution<double> uphi(0.0, M_PI);
            const double phi = uphi(rng);
            if (v.p(phi)) continue;
            ++boundary_seen;
            const double xi_star = optimal_xi(phi, v);
            CHECK((xi_star == 0.0 || std::isinf(xi_star)));
            const double f_star = fidelity_from_vectors(v, xi_star, phi);
            CHECK(f_star >= fidelity_from_vectors(v, 0.0, phi) - 1e-15);
            CHECK(f_star >=
                  fidelity_from_vectors(v, kInf, phi) - 1e-15);
        }
    }

    SUBCASE("periodicity between the two homodyne boundaries") {
        Rng rng(111);
        for (int trial = 0; trial < 50; ++trial) {
            ThreeModeBlocks net = random_net(rng);
            OptimizerVectors v = optimizer_vectors(net, kCoherentIn);
            std::uniform_real_distribution<double> uphi(0.0, M_PI);
            const double phi = uphi(rng);
            CHECK(fidelity_from_vectors(v, 0.0, phi) ==
                  doctest::Approx(fidelity_from_vectors(v, kInf, phi + M_PI / 2))
                      .epsilon(1e-12));
        }
    }
}

TEST_CASE("optimize_measurement") {
    SUBCASE("uncorrelated assistant keeps the traced fidelity") {
        Rng rng(121);
        GaussianState two = random_state(2, rng, 1.3, 0.6, 0.0);
        Mat v6(6, 6);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) v6(i, j) = two.cm(i, j);
        v6(4, 4) = v6(5, 5) = 0.6;
        ThreeModeBlocks net =
            ThreeModeBlocks::from_state(GaussianState(Vec(6, 0.0), validate_cm(v6)));
        OptimizerResult res = optimize_measurement(net, kCoherentIn);
        CHECK(res.f_star == doctest::Approx(traced_fidelity(net, kCoherentIn)).epsilon(1e-13));
        CHECK(res.branch == OptimizerBranch::boundary_homodyne);
    }

    SUBCASE("assisted never loses to non-assisted") {
        Rng rng(131);
        for (int trial = 0; trial < 100; ++trial) {
            ThreeModeBlocks net = random_net(rng);
            OptimizerResult res = optimize_measurement(net, kCoherentIn);
            CHECK(res.f_star >= traced_fidelity(net, kCoherentIn) - 1e-12);
        }
    }

    SUBCASE("matches an exhaustive grid search with refinement") {
        Rng rng(141);
        for (int trial = 0; trial < 20; ++trial) {
            ThreeModeBlocks net = random_net(rng);
            OptimizerVectors v = optimizer_vectors(net, kCoherentIn);
            OptimizerResult res = optimize_measurement(net, kCoherentIn);

            double best = traced_fidelity(net, kCoherentIn);
            double best_phi = 0.0, best_xi = 1.0;
            for (int i = 0; i < 120; ++i) {
                const double phi = M_PI * i / 120.0;
                for (int j = 0; j <= 120; ++j) {
                    const double xi = std::pow(10.0, -3.0 + 6.0 * j / 120.0);
                    const double f = fidelity_from_vectors(v, xi, phi);
                    if (f > best) {
                        best = f;
                        best_phi = phi;
                        best_xi = xi;
                    }
                }
            }
            (void)best_xi;
            // refine the grid argmax along phi with the per-phi optimum
            for (double width = M_PI / 120.0; width > 1e-9; width *= 0.5) {
                for (double cand : {best_phi - width, best_phi + width}) {
                    const double f = fidelity_from_vectors(v, optimal_xi(cand, v), cand);
                    if (f > best) {
                        best = f;
                        best_phi = cand;
                    }
                }
            }
            CHECK(res.f_star >= best - 1e-9);
        }
    }

    SUBCASE("symmetric channels give a phase-independent heterodyne optimum") {
        // A = B = a I, F = E = f/e times Z, D = -d I, C = c I makes both
        // Sigma and Gamma^tr (hence U) proportional to the identity.
        const double a = 1.0, f = 0.45, e = 0.3, d = 0.3, c = 1.0;
        ThreeModeBlocks net;
        net.a = a * Mat::identity(2);
        net.b = a * Mat::identity(2);
        net.c = c * Mat::identity(2);
        net.f = Mat(2, 2, {f, 0.0, 0.0, -f});
        net.e = Mat(2, 2, {e, 0.0, 0.0, -e});
        net.d = -d * Mat::identity(2);
        net.d_a = net.d_b = net.d_c = {0.0, 0.0};
        CHECK_NOTHROW((void)validate_cm(net.reassemble()));

        OptimizerVectors v = optimizer_vectors(net, kCoherentIn);
        CHECK(std::abs(v.u_mat(0, 1)) < 1e-12);
        CHECK(v.u_mat(0, 0) == doctest::Approx(v.u_mat(1, 1)).epsilon(1e-12));

        OptimizerResult res = optimize_measurement(net, kCoherentIn);
        CHECK(res.xi_star == doctest::Approx(1.0).epsilon(1e-9));
        for (double phi : {0.1, 0.8, 2.3}) {
            CHECK(optimal_xi(phi, v) == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(fidelity_from_vectors(v, optimal_xi(phi, v), phi) ==
                  doctest::Approx(res.f_star).epsilon(1e-12));
        }
    }
}

TEST_CASE("conditional entanglement witness") {
    Rng rng(151);
    int witnessed = 0;
    for (int trial = 0; trial < 200; ++trial) {
        ThreeModeBlocks net = random_net(rng);
        SqueezedProjectorSpec spec = random_pure_spec(rng);
        ConditionalChannel cond = condition_on_measurement(net, spec);
        const double f0 = conditional_fidelity(net, kCoherentIn, spec);
        if (f0 > 0.5) {
            ++witnessed;
            CHECK(pt_min_symplectic_eigenvalue(cond.state.cm) < 0.5);
        }
    }
    CHECK(witnessed > 0);
}
