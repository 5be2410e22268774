// Copyright 2026 The rcqed authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "doctest.h"

#include <cmath>

#include "rcqed/lindblad.hpp"

using namespace rcqed;

namespace {

// Two modes with a beam-splitter coupling g (GHz), detuning zero.
LindbladModel beam_splitter_model(double g_ghz, double kappa_ghz = 0.0) {
    auto layout = make_layout({ModeSpec::boson("m1", 3), ModeSpec::boson("m2", 3)});
    const Operator hop = annihilator(layout, "m1").dagger() * annihilator(layout, "m2");
    LindbladModel model;
    model.hamiltonian.static_part = (kTau * g_ghz) * (hop + hop.dagger());
    if (kappa_ghz > 0.0) {
        model.channels.push_back({annihilator(layout, "m1"), kappa_ghz, "kappa1"});
        model.channels.push_back({annihilator(layout, "m2"), kappa_ghz, "kappa2"});
    }
    return model;
}

std::vector<Observable> mode_populations(const LayoutPtr& layout) {
    std::vector<Observable> obs;
    for (const auto& m : layout->modes()) {
        obs.push_back({"n_" + m.label, number_op(layout, m.label)});
    }
    return obs;
}

}  // namespace

TEST_CASE("zero hamiltonian keeps the state constant") {
    auto layout = make_layout({ModeSpec::boson("m", 3)});
    LindbladModel model;
    model.hamiltonian.static_part = Operator::zero(layout);
    TimeGrid grid;
    grid.t1_ns = 50.0;
    grid.samples = 11;
    const auto initial = QuantumState::basis_state(layout, {1});
    const auto traj = evolve(model, initial, grid, mode_populations(layout));
    for (double p : traj.series_for("n_m")) CHECK(p == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("resonant exchange follows the Rabi oracle") {
    // P2(t) = sin^2(g_angular t); full swap at t = pi/(2 g_angular).
    const double g = 0.005;  // GHz
    auto model = beam_splitter_model(g);
    const auto layout = model.layout();
    TimeGrid grid;
    grid.t1_ns = 80.0;
    grid.samples = 801;
    const auto initial = QuantumState::basis_state(layout, {1, 0});
    const auto traj = evolve(model, initial, grid, mode_populations(layout));

    const double g_ang = kTau * g;
    for (std::size_t i = 0; i < traj.times_ns.size(); i += 37) {
        const double expect = std::pow(std::sin(g_ang * traj.times_ns[i]), 2);
        CHECK(traj.series_for("n_m2")[i] == doctest::Approx(expect).epsilon(1e-6));
    }

    // Swap time: first maximum of P2 at pi/(2 g_ang) = 1/(4g) = 50 ns.
    const double t_swap = swap_time(traj, "n_m2");
    CHECK(t_swap == doctest::Approx(50.0).epsilon(2e-3));

    // Lossless run conserves the total excitation.
    const auto& p1 = traj.series_for("n_m1");
    const auto& p2 = traj.series_for("n_m2");
    for (std::size_t i = 0; i < p1.size(); i += 53) {
        CHECK(p1[i] + p2[i] == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("single lossy mode decays exponentially") {
    auto layout = make_layout({ModeSpec::boson("m", 3)});
    LindbladModel model;
    model.hamiltonian.static_part = (kTau * 4.0) * number_op(layout, "m");
    const double kappa = 2e-3;  // GHz
    model.channels.push_back({annihilator(layout, "m"), kappa, "kappa"});
    TimeGrid grid;
    grid.t1_ns = 200.0;
    grid.samples = 101;
    const auto traj = evolve(model, QuantumState::basis_state(layout, {1}), grid,
                             mode_populations(layout));
    for (std::size_t i = 0; i < traj.times_ns.size(); i += 10) {
        const double expect = std::exp(-kTau * kappa * traj.times_ns[i]);
        CHECK(traj.series_for("n_m")[i] == doctest::Approx(expect).epsilon(1e-6));
    }
    CHECK(traj.stats.max_trace_dev <= 1e-8);
}

TEST_CASE("density path preserves trace and positivity") {
    auto model = beam_splitter_model(0.005, 1e-4);
    const auto layout = model.layout();
    TimeGrid grid;
    grid.t1_ns = 120.0;
    grid.samples = 241;
    grid.positivity_stride = 24;
    const auto traj = evolve(model, QuantumState::basis_state(layout, {1, 0}), grid,
                             mode_populations(layout));
    CHECK(traj.stats.max_trace_dev <= 1e-8);
    CHECK(traj.stats.max_hermiticity_dev <= 1e-10);
    REQUIRE(!traj.min_eigenvalue.empty());
    for (double ev : traj.min_eigenvalue) CHECK(ev >= -1e-7);
}

TEST_CASE("swap time on a synthetic sinusoid") {
    // Series generated directly from the evolve oracle's functional form with
    // g/2pi = 5 MHz: first maximum at 1/(4 * 0.005 GHz) = 50 ns.
    Trajectory traj;
    const double g_ang = kTau * 0.005;
    for (int i = 0; i <= 700; ++i) traj.times_ns.push_back(0.1 * i);
    traj.names = {"p"};
    traj.series.resize(1);
    for (double t : traj.times_ns) traj.series[0].push_back(std::pow(std::sin(g_ang * t), 2));
    CHECK(swap_time(traj, "p") == doctest::Approx(50.0).epsilon(1e-4));

    // Monotonic trajectory: no swap.
    Trajectory mono;
    mono.names = {"p"};
    mono.series.resize(1);
    for (int i = 0; i <= 100; ++i) {
        mono.times_ns.push_back(i);
        mono.series[0].push_back(1.0 - std::exp(-0.01 * i));
    }
    CHECK_THROWS_AS(swap_time(mono, "p"), NoSwapError);
}

TEST_CASE("max excitation oracles") {
    // Decoupled transmon starting in the ground state stays there.
    auto layout = make_layout({ModeSpec::boson("r", 3), ModeSpec::two_level("t")});
    LindbladModel model;
    model.hamiltonian.static_part =
        (kTau * 4.0) * number_op(layout, "r") + (kTau * 5.0) * number_op(layout, "t");
    TimeGrid grid;
    grid.t1_ns = 30.0;
    grid.samples = 61;
    auto traj = evolve(model, QuantumState::basis_state(layout, {1, 0}), grid,
                       mode_populations(layout));
    CHECK(max_excitation(traj, "n_t") == doctest::Approx(0.0).epsilon(1e-12));

    // Resonant Jaynes-Cummings transfers the photon completely.
    const Operator jc = annihilator(layout, "r").dagger() * annihilator(layout, "t");
    model.hamiltonian.static_part =
        (kTau * 4.0) * (number_op(layout, "r") + number_op(layout, "t")) +
        (kTau * 0.01) * (jc + jc.dagger());
    grid.t1_ns = 40.0;
    grid.samples = 401;
    traj = evolve(model, QuantumState::basis_state(layout, {1, 0}), grid, mode_populations(layout));
    CHECK(max_excitation(traj, "n_t") == doctest::Approx(1.0).epsilon(1e-4));

    // Dispersive coupling: transmon population bounded by 4 (g/Delta)^2.
    const double g = 0.075, delta = 1.0;
    model.hamiltonian.static_part =
        (kTau * 4.0) * number_op(layout, "r") + (kTau * (4.0 + delta)) * number_op(layout, "t") +
        (kTau * g) * (jc + jc.dagger());
    grid.t1_ns = 100.0;
    grid.samples = 2001;
    traj = evolve(model, QuantumState::basis_state(layout, {1, 0}), grid, mode_populations(layout));
    CHECK(max_excitation(traj, "n_t") <= 4.0 * (g / delta) * (g / delta) + 0.005);
    CHECK(max_excitation(traj, "n_t") >= (g / delta) * (g / delta));
}

TEST_CASE("tolerance halving leaves the swap time put") {
    auto model = beam_splitter_model(0.005, 1e-4);
    const auto layout = model.layout();
    auto run = [&](double scale) {
        TimeGrid grid;
        grid.t1_ns = 80.0;
        grid.samples = 801;
        grid.rtol = 1e-8 * scale;
        grid.atol = 1e-10 * scale;
        const auto traj = evolve(model, QuantumState::basis_state(layout, {1, 0}), grid,
                                 mode_populations(layout));
        return swap_time(traj, "n_m2");
    };
    const double t_full = run(1.0);
    const double t_half = run(0.5);
    CHECK(std::abs(t_half - t_full) / t_full < 1e-3);
}

TEST_CASE("drive window turns the interaction on and off") {
    auto layout = make_layout({ModeSpec::boson("m", 3)});
    Hamiltonian h;
    h.static_part = Operator::zero(layout);  // frame rotating with the mode
    DriveTerm d;
    d.op = annihilator(layout, "m").dagger();
    d.amp_ang = kTau * 0.002;
    d.freq_ang = 0.0;
    d.t_on_ns = 10.0;
    d.t_off_ns = 20.0;
    h.drives.push_back(d);
    LindbladModel model;
    model.hamiltonian = h;
    TimeGrid grid;
    grid.t1_ns = 30.0;
    grid.samples = 301;
    const auto traj = evolve(model, QuantumState::basis_state(layout, {0}), grid,
                             mode_populations(layout));
    const auto& n = traj.series_for("n_m");
    CHECK(n[100] == doctest::Approx(0.0).epsilon(1e-10));    // t = 10 ns, just before onset
    CHECK(n[200] > 1e-4);                                    // populated inside the window
    CHECK(n[300] == doctest::Approx(n[200]).epsilon(1e-6));  // frozen after t_off
}

TEST_CASE("sweep machinery") {
    const auto values = linspace(1.0, 5.0, 5);
    const auto series = run_sweep(values, [](double x) { return x * x; }, 2);
    REQUIRE(series.size() == 5);
    for (std::size_t i = 0; i < series.size(); ++i) {
        CHECK(series[i].ok);
        CHECK(series[i].metric == doctest::Approx(values[i] * values[i]));
    }

    CHECK(run_sweep({}, [](double x) { return x; }, 4).empty());

    // Failures are recorded, the sweep continues.
    const auto partial = run_sweep({1.0, -1.0, 2.0},
                                   [](double x) {
                                       if (x < 0) throw std::runtime_error("negative");
                                       return std::sqrt(x);
                                   },
                                   1);
    CHECK(partial[0].ok);
    CHECK(!partial[1].ok);
    CHECK(partial[1].error == "negative");
    CHECK(partial[2].ok);
}

TEST_CASE("invalid inputs are rejected") {
    auto model = beam_splitter_model(0.005);
    TimeGrid bad;
    bad.t1_ns = -1.0;
    CHECK_THROWS_AS(evolve(model, QuantumState::basis_state(model.layout(), {1, 0}), bad, {}),
                    std::invalid_argument);

    auto other = make_layout({ModeSpec::boson("x", 2)});
    TimeGrid grid;
    CHECK_THROWS_AS(evolve(model, QuantumState::basis_state(other, {0}), grid, {}),
                    std::invalid_argument);
}
