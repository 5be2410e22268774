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

#ifndef RCQED_LINDBLAD_HPP
#define RCQED_LINDBLAD_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rcqed/circuit.hpp"
#include "rcqed/fock.hpp"

namespace rcqed {

// One decay channel: rate quoted as rate/2pi in GHz, applied as the angular
// rate 2*pi*rate in the dissipator D[c].
struct CollapseChannel {
    Operator op;
    double rate_ghz = 0.0;
    std::string name;
};

struct LindbladModel {
    Hamiltonian hamiltonian;
    std::vector<CollapseChannel> channels;

    bool lossless() const;
    const LayoutPtr& layout() const { return hamiltonian.layout(); }
};

struct TimeGrid {
    double t0_ns = 0.0;
    double t1_ns = 100.0;
    int samples = 201;          // output samples, endpoints included
    double rtol = 1e-8;
    double atol = 1e-10;
    bool keep_states = false;   // store sampled kets (pure-state path only)
    int positivity_stride = 0;  // >0: record min eigenvalue of rho every n-th sample

    void validate() const;
};

struct Observable {
    std::string name;
    Operator op;
};

struct SolverStats {
    long accepted = 0;
    long rejected = 0;
    long rhs_evals = 0;
    double min_step_ns = 0.0;
    double max_step_ns = 0.0;
    double max_trace_dev = 0.0;
    double max_hermiticity_dev = 0.0;
};

struct Trajectory {
    std::vector<double> times_ns;
    std::vector<std::string> names;
    std::vector<std::vector<double>> series;   // one row per observable
    std::vector<double> trace_dev;             // |tr rho - 1| or |norm - 1|
    std::vector<double> min_eigenvalue;        // sparse record, see positivity_stride
    std::vector<Vector> states;                // filled when keep_states
    SolverStats stats;

    const std::vector<double>& series_for(const std::string& name) const;
};

// Raised when the adaptive step size underflows (stiffness or a bad model).
struct IntegrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised by swap_time when the trajectory has no interior maximum.
struct NoSwapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Integrate d rho/dt = -i[H(t), rho] + sum_c 2pi*kappa_c D[c] rho with an
// embedded Dormand-Prince 5(4) scheme. A lossless model with a ket initial
// state takes the Schroedinger fast path.
Trajectory evolve(const LindbladModel& model, const QuantumState& initial, const TimeGrid& grid,
                  const std::vector<Observable>& observables);

struct SwapTimeOptions {
    int smooth_window = 1;        // odd box width; 1 = off
    double refine_fraction = 0.0; // >0: parabola over samples above (1-f)*peak
    double min_prominence = 1e-9; // rise required before a maximum counts
};

// Time of the first interior local maximum, refined by quadratic
// interpolation of the bracketing samples.
double swap_time(const Trajectory& traj, const std::string& observable,
                 const SwapTimeOptions& options = {});

double max_excitation(const Trajectory& traj, const std::string& observable);

struct SweepPoint {
    double parameter = 0.0;
    double metric = 0.0;
    bool ok = false;
    std::string error;
};

// Independent evaluations of `metric` over the parameter values, parallel
// across points; per-point failures are recorded and the sweep continues.
std::vector<SweepPoint> run_sweep(const std::vector<double>& values,
                                  const std::function<double(double)>& metric, int threads = 1);

std::vector<double> linspace(double lo, double hi, int n);

}  // namespace rcqed

#endif  // RCQED_LINDBLAD_HPP
