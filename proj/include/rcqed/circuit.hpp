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

#ifndef RCQED_CIRCUIT_HPP
#define RCQED_CIRCUIT_HPP

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rcqed/fock.hpp"

namespace rcqed {

// All user-facing frequencies and rates are omega/2pi in GHz; Hamiltonians and
// the integrator work with angular frequencies in rad/ns (multiply by 2*pi).

struct ResonatorSpec {
    std::string label;
    double freq_ghz = 0.0;         // omega/2pi
    double capacitance_ff = 70.0;  // total capacitance to ground
    double kappa_ghz = 0.0;        // decay rate kappa/2pi
    int dim = 3;                   // Fock truncation; {0,1} plus one guard level
};

// Group of identical-frequency coupler transmons between two adjacent chain
// elements. Transmon count may be odd (a lone coupler is a valid circuit);
// the paper's pair count N corresponds to transmons = 2N.
struct TransmonGroupSpec {
    double freq_ghz = 5.0;
    int transmons = 2;
    double gamma_ghz = 0.0;        // per-transmon decay gamma/2pi
    double capacitance_ff = 200.0;
    double cap_left_ff = 4.0;      // coupling capacitance to the element on the left
    double cap_right_ff = 4.0;     // and on the right
};

struct DriveSpec {
    double amp_ghz = 0.0;   // Omega/2pi
    double freq_ghz = 0.0;  // omega_d/2pi
    double phase_rad = 0.0;
    double t_on_ns = 0.0;
    double t_off_ns = std::numeric_limits<double>::infinity();
    // Linear amplitude ramp at both window edges; suppresses the switching
    // transient that would ring the driven mode up to twice the steady
    // displacement.
    double ramp_ns = 0.0;
};

struct AncillaSpec {
    double freq_ghz = 5.0;
    double alpha_ghz = 0.2;  // Kerr anharmonicity alpha/2pi
    int dim = 3;             // Kerr term needs at least 3 levels
    double capacitance_ff = 200.0;
    double kappa_ghz = 0.0;
    std::vector<DriveSpec> drives;
};

// Chain topology: [ancilla?] - group[0] - r[0] - group[1] - r[1] - ...
// Without an ancilla group[i] sits between r[i] and r[i+1] (count n_res - 1);
// with an ancilla group[0] couples it to r[0] (count n_res).
struct CircuitSpec {
    std::vector<ResonatorSpec> resonators;
    std::vector<TransmonGroupSpec> groups;
    std::optional<AncillaSpec> ancilla;

    int num_elements() const;                 // ancilla (if any) plus resonators
    int expected_group_count() const;
    void validate() const;

    // Frequency of chain element `e` (element 0 is the ancilla when present).
    double element_freq_ghz(int e) const;
    double element_capacitance_ff(int e) const;
    const std::string& element_label(int e) const;
    bool element_is_ancilla(int e) const;
};

// ---- parameter chain ----

// g/2pi = (1/2) * Cc/sqrt(Ca*Cb) * sqrt(fa*fb), the standard capacitive
// coupling estimate between two lumped oscillators.
double coupling_from_capacitance(double cc_ff, double ca_ff, double cb_ff,
                                 double fa_ghz, double fb_ghz);

// Dispersive shift chi = g^2/Delta (signed); throws on zero detuning.
double chi_shift(double g_ghz, double delta_ghz);

// Virtual exchange between the two elements adjacent to one coupler transmon:
// (ga*gb/2) * (1/Delta_a + 1/Delta_b). Reduces to g^2/Delta symmetrically.
double exchange_coupling(double ga_ghz, double delta_a_ghz,
                         double gb_ghz, double delta_b_ghz);

// Per-adjacency derived couplings for diagnostics and the dispersive builders.
struct AdjacencyCouplings {
    int group_index = 0;
    std::string left_label, right_label;
    double g_left_ghz = 0.0, g_right_ghz = 0.0;       // element-to-transmon
    double delta_left_ghz = 0.0, delta_right_ghz = 0.0;
    double exchange_ghz = 0.0;                         // per transmon
    double g_over_delta = 0.0;                         // max |g/Delta| of the two sides
};

std::vector<AdjacencyCouplings> chain_couplings(const CircuitSpec& spec);

constexpr double kDispersiveWarnRatio = 0.1;  // g/Delta design rule
constexpr double kDispersiveHardRatio = 0.3;

// ---- Hamiltonians ----

enum class Frame { Lab, Rotating };

// One drive term: envelope(t) * exp(-i(w t - phase)) * op + h.c. inside the
// window, with a trapezoidal envelope of height amp_ang.
struct DriveTerm {
    Operator op;  // embedded raising operator the drive couples to
    double amp_ang = 0.0;
    double freq_ang = 0.0;
    double phase = 0.0;
    double t_on_ns = 0.0;
    double t_off_ns = std::numeric_limits<double>::infinity();
    double ramp_ns = 0.0;

    double envelope(double t_ns) const;
};

// Static part plus a list of harmonic drive terms.
struct Hamiltonian {
    Operator static_part;
    std::vector<DriveTerm> drives;
    double frame_freq_ghz = 0.0;  // rotating-frame offset applied to every mode
    std::vector<std::string> warnings;

    bool time_dependent() const { return !drives.empty(); }
    const LayoutPtr& layout() const { return static_part.layout(); }
    // H(t) as a dense matrix (small systems / verification).
    DenseMatrix at_time(double t_ns) const;
};

// How coupler groups enter a built Hamiltonian.
struct CouplerHandling {
    // Frozen: groups enter through classical J^z integers, no spin modes in
    // the layout. Operator: groups contribute two-level modes and J^z factors
    // are diagonal operators.
    enum class Mode { Frozen, OperatorSpace } mode = Mode::OperatorSpace;
    std::vector<int> jz;  // one value per group when frozen

    static CouplerHandling frozen(std::vector<int> jz_values);
    static CouplerHandling operator_space();
};

// Full circuit model: bare modes, Kerr ancilla, Jaynes-Cummings couplings for
// every capacitively adjacent element/transmon pair, and ancilla drives.
// Coupler transmons are always explicit two-level modes here.
// Layout order: [ancilla?, group0..., r1, group1..., r2, ...] with transmon
// labels "g<i>t<j>".
Hamiltonian build_full_hamiltonian(const CircuitSpec& spec, Frame frame = Frame::Lab,
                                   std::optional<double> frame_freq_ghz = std::nullopt);

// Doubly-dispersive resonator chain: Stark-shifted resonator terms plus the
// next-nearest-neighbour exchange that survives adiabatic elimination of the
// coupler groups and of the detuned nearest-neighbour exchange.
Hamiltonian build_dispersive_chain(const CircuitSpec& spec, const CouplerHandling& couplers,
                                   Frame frame = Frame::Lab,
                                   std::optional<double> frame_freq_ghz = std::nullopt);

// Dispersive ancilla chain: Kerr ancilla with shifted frequency
// omega_q' = omega_q - alpha/2, Stark shifts, and nearest-neighbour exchange
// g_k (m_{k-1}^dag m_k + h.c.) J_k^z along the chain.
Hamiltonian build_dispersive_ancilla_chain(const CircuitSpec& spec, const CouplerHandling& couplers,
                                           Frame frame = Frame::Lab,
                                           std::optional<double> frame_freq_ghz = std::nullopt);

// Layout helpers shared with the experiment drivers.
LayoutPtr full_model_layout(const CircuitSpec& spec);
LayoutPtr frozen_chain_layout(const CircuitSpec& spec);  // resonators (+ ancilla) only
std::vector<std::string> group_site_labels(const CircuitSpec& spec, int group_index);

// Basis indices with total excitation number n (layout as built above).
std::vector<long> excitation_subspace(const LayoutPtr& layout, int n);

}  // namespace rcqed

#endif  // RCQED_CIRCUIT_HPP
