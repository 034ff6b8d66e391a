#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "tendon/cable.hpp"
#include "test_util.hpp"

using namespace tendon;

namespace {
const ManipulatorSpec kSpec{};
const auto kCables = default_cable_routing();
}  // namespace

TEST_CASE("cable_delta approaches H at zero bend") {
    CHECK(cable_delta(0.0, 4.0, 0.5, 11) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(cable_delta(1e-9, 4.0, 0.5, 11) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("cable_delta matches the high-precision oracle value") {
    // frozen 40-digit evaluation of (H*n/theta)*2*sin(theta/2n) at
    // theta=0.5, H=0.5, n=11, d=0
    CHECK(cable_delta(0.5, 0.0, 0.5, 11) ==
          doctest::Approx(0.49995695703452689).epsilon(1e-14));
}

TEST_CASE("the d-dependent part of cable_delta is -d*sin(theta/2n)") {
    const double theta = 0.3, H = 0.5, d = 4.0;
    const int n = 11;
    const double diff = cable_delta(theta, d, H, n) - cable_delta(theta, 0.0, H, n);
    CHECK(diff == doctest::Approx(-d * std::sin(theta / (2.0 * n))).epsilon(1e-14));
}

TEST_CASE("cable_delta is C1 across the series switchover") {
    const double d = 4.0, H = 0.5;
    const int n = 11;
    const double below = cable_delta(1e-4 * (1 - 1e-6), d, H, n);
    const double above = cable_delta(1e-4 * (1 + 1e-6), d, H, n);
    CHECK(std::abs(above - below) < 1e-8);
    // slope from both sides of the threshold
    const double h = 1e-6;
    const double slope_lo = (cable_delta(1e-4 - h, d, H, n) - cable_delta(1e-4 - 2 * h, d, H, n)) / h;
    const double slope_hi = (cable_delta(1e-4 + 2 * h, d, H, n) - cable_delta(1e-4 + h, d, H, n)) / h;
    CHECK(std::abs(slope_hi - slope_lo) < 1e-8);
}

TEST_CASE("zero command moves no cable") {
    const CableCommand cmd = joints_to_cables(JointConfig{}, kSpec, kCables);
    for (const double w : cmd.delta_w) CHECK(w == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("differential pairs are antagonistic and mirror under sign flip") {
    const JointConfig q{30.0, 0.0, 0.0, 0.0, 0.0};
    const JointConfig qneg{-30.0, 0.0, 0.0, 0.0, 0.0};
    const CableCommand a = joints_to_cables(q, kSpec, kCables);
    const CableCommand b = joints_to_cables(qneg, kSpec, kCables);
    CHECK(a.delta_w[0] != doctest::Approx(a.delta_w[1]));
    // delta_w_a(theta) == delta_w_b(-theta) before decoupling touches w1/w2
    CHECK(a.delta_w[0] == doctest::Approx(b.delta_w[1]).epsilon(1e-12));
    CHECK(a.delta_w[1] == doctest::Approx(b.delta_w[0]).epsilon(1e-12));
    // the pair sum carries only the tiny even part
    CHECK(std::abs(a.delta_w[0] + a.delta_w[1]) < 1e-2);
}

TEST_CASE("segment-1 bending pulls the wrist cables only when decoupling is on") {
    const JointConfig q{30.0, 0.0, 0.0, 0.0, 0.0};
    DecouplingOptions on;
    const CableCommand with = joints_to_cables(q, kSpec, kCables, on);
    CHECK(std::abs(with.delta_w[4]) > 1e-3);
    CHECK(std::abs(with.delta_w[5]) > 1e-3);

    DecouplingOptions off;
    off.enabled = false;
    const CableCommand without = joints_to_cables(q, kSpec, kCables, off);
    CHECK(without.delta_w[4] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(without.delta_w[5] == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("pure wrist bending leaves the segment-1 cables alone") {
    const CableCommand cmd = joints_to_cables(JointConfig{0, 0, 12.0, 0, 0}, kSpec, kCables);
    for (int i = 0; i < 4; ++i) CHECK(cmd.delta_w[i] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(std::abs(cmd.delta_w[4]) > 1e-3);
}

TEST_CASE("decoupling is exactly additive over proximal bending") {
    // the wrist pair command splits into a pure-q3 part plus a q1/q2-induced
    // correction that does not depend on q3
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u1(-55.0, 55.0), u3(-15.0, 15.0);
    for (int i = 0; i < 50; ++i) {
        const double q1 = u1(rng), q2 = u1(rng), q3 = u3(rng);
        const CableCommand full = joints_to_cables({q1, q2, q3, 0, 0}, kSpec, kCables);
        const CableCommand prox = joints_to_cables({q1, q2, 0, 0, 0}, kSpec, kCables);
        const CableCommand own = joints_to_cables({0, 0, q3, 0, 0}, kSpec, kCables);
        for (const int w : {4, 5}) {
            CHECK(full.delta_w[w] ==
                  doctest::Approx(prox.delta_w[w] + own.delta_w[w]).epsilon(1e-12));
        }
    }
}

TEST_CASE("out-of-limit commands are rejected") {
    CHECK_THROWS_AS(joints_to_cables(JointConfig{80.0, 0, 0, 0, 0}, kSpec, kCables),
                    JointLimit);
}

TEST_CASE("forceps cables see wrist decoupling only when the flag is set") {
    const JointConfig q{0.0, 0.0, 12.0, 0.0, 0.0};
    DecouplingOptions sym;
    const CableCommand with = joints_to_cables(q, kSpec, kCables, sym);
    DecouplingOptions no_fcps;
    no_fcps.forceps_seg2 = false;
    const CableCommand without = joints_to_cables(q, kSpec, kCables, no_fcps);
    CHECK(std::abs(with.delta_w[6]) > 1e-9);
    CHECK(without.delta_w[6] == doctest::Approx(0.0).epsilon(1e-15));
}
