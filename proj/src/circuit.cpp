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

#include "rcqed/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string_view>

namespace rcqed {

namespace {

std::string group_transmon_label(int group, int transmon) {
    return "g" + std::to_string(group) + "t" + std::to_string(transmon);
}

constexpr std::string_view kAncillaLabel = "q";

double default_frame_freq(const CircuitSpec& spec) {
    double lo = spec.resonators.front().freq_ghz;
    double hi = lo;
    for (const auto& r : spec.resonators) {
        lo = std::min(lo, r.freq_ghz);
        hi = std::max(hi, r.freq_ghz);
    }
    for (const auto& g : spec.groups) {
        lo = std::min(lo, g.freq_ghz);
        hi = std::max(hi, g.freq_ghz);
    }
    if (spec.ancilla) {
        lo = std::min(lo, spec.ancilla->freq_ghz);
        hi = std::max(hi, spec.ancilla->freq_ghz);
    }
    return 0.5 * (lo + hi);
}

double resolve_frame(const CircuitSpec& spec, Frame frame, std::optional<double> frame_freq_ghz) {
    if (frame == Frame::Lab) return 0.0;
    return frame_freq_ghz.value_or(default_frame_freq(spec));
}

}  // namespace

int CircuitSpec::num_elements() const {
    return static_cast<int>(resonators.size()) + (ancilla ? 1 : 0);
}

int CircuitSpec::expected_group_count() const {
    return num_elements() - 1;
}

void CircuitSpec::validate() const {
    if (resonators.empty()) {
        throw std::invalid_argument("circuit needs at least one resonator");
    }
    if (static_cast<int>(groups.size()) != expected_group_count()) {
        throw std::invalid_argument("circuit with " + std::to_string(num_elements()) +
                                    " chain elements needs " + std::to_string(expected_group_count()) +
                                    " coupler groups, got " + std::to_string(groups.size()));
    }
    for (const auto& r : resonators) {
        if (r.freq_ghz <= 0) throw std::invalid_argument("resonator '" + r.label + "': frequency must be positive");
        if (r.capacitance_ff <= 0) throw std::invalid_argument("resonator '" + r.label + "': capacitance must be positive");
        if (r.kappa_ghz < 0) throw std::invalid_argument("resonator '" + r.label + "': decay rate must be >= 0");
        if (r.dim < 2) throw std::invalid_argument("resonator '" + r.label + "': dim must be >= 2");
        if (r.label == kAncillaLabel) throw std::invalid_argument("resonator label 'q' is reserved for the ancilla");
    }
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const auto& g = groups[i];
        if (g.freq_ghz <= 0) throw std::invalid_argument("group " + std::to_string(i) + ": frequency must be positive");
        if (g.transmons < 1) throw std::invalid_argument("group " + std::to_string(i) + ": needs at least one transmon");
        if (g.gamma_ghz < 0) throw std::invalid_argument("group " + std::to_string(i) + ": decay rate must be >= 0");
        if (g.capacitance_ff <= 0 || g.cap_left_ff < 0 || g.cap_right_ff < 0) {
            throw std::invalid_argument("group " + std::to_string(i) + ": invalid capacitance");
        }
    }
    if (ancilla) {
        if (ancilla->freq_ghz <= 0) throw std::invalid_argument("ancilla frequency must be positive");
        if (ancilla->alpha_ghz <= 0) throw std::invalid_argument("ancilla anharmonicity must be positive");
        if (ancilla->dim < 3) throw std::invalid_argument("ancilla dim must be >= 3 for the Kerr term to act");
        if (ancilla->capacitance_ff <= 0) throw std::invalid_argument("ancilla capacitance must be positive");
        for (const auto& d : ancilla->drives) {
            if (d.amp_ghz < 0) throw std::invalid_argument("drive amplitude must be >= 0");
            if (!(d.t_on_ns < d.t_off_ns)) throw std::invalid_argument("drive window start must precede end");
        }
    }
}

double CircuitSpec::element_freq_ghz(int e) const {
    if (ancilla) {
        return e == 0 ? ancilla->freq_ghz : resonators.at(e - 1).freq_ghz;
    }
    return resonators.at(e).freq_ghz;
}

double CircuitSpec::element_capacitance_ff(int e) const {
    if (ancilla) {
        return e == 0 ? ancilla->capacitance_ff : resonators.at(e - 1).capacitance_ff;
    }
    return resonators.at(e).capacitance_ff;
}

const std::string& CircuitSpec::element_label(int e) const {
    static const std::string ancilla_label{kAncillaLabel};
    if (ancilla) {
        return e == 0 ? ancilla_label : resonators.at(e - 1).label;
    }
    return resonators.at(e).label;
}

bool CircuitSpec::element_is_ancilla(int e) const {
    return ancilla && e == 0;
}

// ---- parameter chain ----

double coupling_from_capacitance(double cc_ff, double ca_ff, double cb_ff,
                                 double fa_ghz, double fb_ghz) {
    if (cc_ff < 0) throw std::invalid_argument("coupling capacitance must be >= 0");
    if (ca_ff <= 0 || cb_ff <= 0) throw std::invalid_argument("element capacitances must be positive");
    if (fa_ghz <= 0 || fb_ghz <= 0) throw std::invalid_argument("frequencies must be positive");
    return 0.5 * (cc_ff / std::sqrt(ca_ff * cb_ff)) * std::sqrt(fa_ghz * fb_ghz);
}

double chi_shift(double g_ghz, double delta_ghz) {
    if (delta_ghz == 0.0) {
        throw std::domain_error("chi undefined at zero detuning (resonant regime)");
    }
    return g_ghz * g_ghz / delta_ghz;
}

double exchange_coupling(double ga_ghz, double delta_a_ghz, double gb_ghz, double delta_b_ghz) {
    if (delta_a_ghz == 0.0 || delta_b_ghz == 0.0) {
        throw std::domain_error("exchange coupling undefined at zero detuning (resonant regime)");
    }
    return 0.5 * ga_ghz * gb_ghz * (1.0 / delta_a_ghz + 1.0 / delta_b_ghz);
}

std::vector<AdjacencyCouplings> chain_couplings(const CircuitSpec& spec) {
    spec.validate();
    std::vector<AdjacencyCouplings> result;
    result.reserve(spec.groups.size());
    for (std::size_t g = 0; g < spec.groups.size(); ++g) {
        const auto& grp = spec.groups[g];
        AdjacencyCouplings c;
        c.group_index = static_cast<int>(g);
        const int left = static_cast<int>(g);
        const int right = left + 1;
        c.left_label = spec.element_label(left);
        c.right_label = spec.element_label(right);
        const double f_left = spec.element_freq_ghz(left);
        const double f_right = spec.element_freq_ghz(right);
        c.g_left_ghz = coupling_from_capacitance(grp.cap_left_ff, spec.element_capacitance_ff(left),
                                                 grp.capacitance_ff, f_left, grp.freq_ghz);
        c.g_right_ghz = coupling_from_capacitance(grp.cap_right_ff, spec.element_capacitance_ff(right),
                                                  grp.capacitance_ff, f_right, grp.freq_ghz);
        c.delta_left_ghz = f_left - grp.freq_ghz;
        c.delta_right_ghz = f_right - grp.freq_ghz;
        if (c.delta_left_ghz == 0.0 || c.delta_right_ghz == 0.0) {
            c.exchange_ghz = 0.0;
            c.g_over_delta = std::numeric_limits<double>::infinity();
        } else {
            c.exchange_ghz = exchange_coupling(c.g_left_ghz, c.delta_left_ghz, c.g_right_ghz, c.delta_right_ghz);
            c.g_over_delta = std::max(std::abs(c.g_left_ghz / c.delta_left_ghz),
                                      std::abs(c.g_right_ghz / c.delta_right_ghz));
        }
        result.push_back(c);
    }
    return result;
}

namespace {

void require_dispersive_validity(const std::vector<AdjacencyCouplings>& couplings) {
    for (const auto& c : couplings) {
        if (!(c.g_over_delta <= kDispersiveHardRatio)) {
            std::ostringstream os;
            os << "adjacency " << c.left_label << "-" << c.right_label << ": g/Delta = " << c.g_over_delta
               << " exceeds the hard limit " << kDispersiveHardRatio
               << "; the dispersive elimination does not apply";
            throw std::domain_error(os.str());
        }
    }
}

void collect_dispersive_warnings(const CircuitSpec& spec, const std::vector<AdjacencyCouplings>& couplings,
                                 std::vector<std::string>& warnings) {
    for (const auto& c : couplings) {
        if (c.g_over_delta > kDispersiveWarnRatio) {
            std::ostringstream os;
            os << "adjacency " << c.left_label << "-" << c.right_label << ": g/Delta = " << c.g_over_delta
               << " violates the dispersive design rule g/Delta <= " << kDispersiveWarnRatio;
            warnings.push_back(os.str());
        }
        const auto& grp = spec.groups[c.group_index];
        const double cap_limit = 0.1 * std::min({spec.element_capacitance_ff(c.group_index),
                                                 spec.element_capacitance_ff(c.group_index + 1),
                                                 grp.capacitance_ff});
        if (std::max(grp.cap_left_ff, grp.cap_right_ff) > cap_limit) {
            warnings.push_back("group " + std::to_string(c.group_index) +
                               ": coupling capacitance above 10% of the element capacitances");
        }
    }
}

}  // namespace

CouplerHandling CouplerHandling::frozen(std::vector<int> jz_values) {
    CouplerHandling h;
    h.mode = Mode::Frozen;
    h.jz = std::move(jz_values);
    return h;
}

CouplerHandling CouplerHandling::operator_space() {
    CouplerHandling h;
    h.mode = Mode::OperatorSpace;
    return h;
}

// ---- layouts ----

LayoutPtr full_model_layout(const CircuitSpec& spec) {
    spec.validate();
    std::vector<ModeSpec> modes;
    if (spec.ancilla) {
        modes.push_back(ModeSpec::boson(std::string(kAncillaLabel), spec.ancilla->dim));
    }
    const int n_groups = static_cast<int>(spec.groups.size());
    const int offset = spec.ancilla ? 0 : -1;  // group g precedes resonator g + offset + 1
    for (std::size_t r = 0; r < spec.resonators.size(); ++r) {
        const int g = static_cast<int>(r) + offset;
        if (g >= 0 && g < n_groups) {
            for (int t = 0; t < spec.groups[g].transmons; ++t) {
                modes.push_back(ModeSpec::two_level(group_transmon_label(g, t)));
            }
        }
        modes.push_back(ModeSpec::boson(spec.resonators[r].label, spec.resonators[r].dim));
    }
    // Without an ancilla the first group sits between r0 and r1, so the loop
    // above placed groups 0..n-2 before resonators 1..n-1; nothing remains.
    return make_layout(std::move(modes));
}

LayoutPtr frozen_chain_layout(const CircuitSpec& spec) {
    spec.validate();
    std::vector<ModeSpec> modes;
    if (spec.ancilla) {
        modes.push_back(ModeSpec::boson(std::string(kAncillaLabel), spec.ancilla->dim));
    }
    for (const auto& r : spec.resonators) {
        modes.push_back(ModeSpec::boson(r.label, r.dim));
    }
    return make_layout(std::move(modes));
}

std::vector<std::string> group_site_labels(const CircuitSpec& spec, int group_index) {
    if (group_index < 0 || group_index >= static_cast<int>(spec.groups.size())) {
        throw std::out_of_range("group index out of range");
    }
    std::vector<std::string> labels;
    for (int t = 0; t < spec.groups[group_index].transmons; ++t) {
        labels.push_back(group_transmon_label(group_index, t));
    }
    return labels;
}

// ---- full model ----

Hamiltonian build_full_hamiltonian(const CircuitSpec& spec, Frame frame,
                                   std::optional<double> frame_freq_ghz) {
    spec.validate();
    const double f_frame = resolve_frame(spec, frame, frame_freq_ghz);
    const auto couplings = chain_couplings(spec);
    LayoutPtr layout = full_model_layout(spec);

    Hamiltonian h;
    h.frame_freq_ghz = f_frame;
    collect_dispersive_warnings(spec, couplings, h.warnings);

    Operator hs = Operator::zero(layout);
    for (const auto& r : spec.resonators) {
        hs = hs + (kTau * (r.freq_ghz - f_frame)) * number_op(layout, r.label);
    }
    if (spec.ancilla) {
        const Operator nq = number_op(layout, std::string(kAncillaLabel));
        hs = hs + (kTau * (spec.ancilla->freq_ghz - f_frame)) * nq -
             (0.5 * kTau * spec.ancilla->alpha_ghz) * (nq * nq);
    }
    for (std::size_t g = 0; g < spec.groups.size(); ++g) {
        const auto& grp = spec.groups[g];
        const auto& c = couplings[g];
        const Operator left = annihilator(layout, c.left_label);
        const Operator right = annihilator(layout, c.right_label);
        for (int t = 0; t < grp.transmons; ++t) {
            const std::string label = group_transmon_label(static_cast<int>(g), t);
            const Operator sm = annihilator(layout, label);  // sigma^- for two-level modes
            hs = hs + (kTau * (grp.freq_ghz - f_frame)) * number_op(layout, label);
            const Operator jc_left = left.dagger() * sm;
            const Operator jc_right = right.dagger() * sm;
            hs = hs + (kTau * c.g_left_ghz) * (jc_left + jc_left.dagger()) +
                 (kTau * c.g_right_ghz) * (jc_right + jc_right.dagger());
        }
    }
    h.static_part = std::move(hs);

    if (spec.ancilla) {
        for (const auto& d : spec.ancilla->drives) {
            DriveTerm term;
            term.op = annihilator(layout, std::string(kAncillaLabel)).dagger();
            term.amp_ang = kTau * d.amp_ghz;
            term.freq_ang = kTau * (d.freq_ghz - f_frame);
            term.phase = d.phase_rad;
            term.t_on_ns = d.t_on_ns;
            term.t_off_ns = d.t_off_ns;
            term.ramp_ns = d.ramp_ns;
            h.drives.push_back(std::move(term));
        }
    }
    return h;
}

// ---- dispersive builders ----

namespace {

// J^z of group g as a layout operator (operator mode) or scaled identity
// (frozen mode).
Operator group_jz_operator(const CircuitSpec& spec, int g, const CouplerHandling& couplers,
                           const LayoutPtr& layout) {
    if (couplers.mode == CouplerHandling::Mode::Frozen) {
        return static_cast<double>(couplers.jz.at(g)) * Operator::identity(layout);
    }
    Operator jz = Operator::zero(layout);
    for (const auto& label : group_site_labels(spec, g)) {
        jz = jz + sigma_z_op(layout, label);
    }
    return jz;
}

void check_couplers(const CircuitSpec& spec, const CouplerHandling& couplers) {
    if (couplers.mode == CouplerHandling::Mode::Frozen) {
        if (couplers.jz.size() != spec.groups.size()) {
            throw std::invalid_argument("frozen coupler handling needs one J^z value per group");
        }
        for (std::size_t g = 0; g < spec.groups.size(); ++g) {
            const int n = spec.groups[g].transmons;
            if (couplers.jz[g] < -n || couplers.jz[g] > n) {
                throw std::invalid_argument("group " + std::to_string(g) + ": J^z = " +
                                            std::to_string(couplers.jz[g]) + " outside [-" +
                                            std::to_string(n) + ", " + std::to_string(n) + "]");
            }
        }
    }
}

LayoutPtr dispersive_layout(const CircuitSpec& spec, const CouplerHandling& couplers) {
    if (couplers.mode == CouplerHandling::Mode::Frozen) return frozen_chain_layout(spec);
    return full_model_layout(spec);
}

// Transmon-sector bare + Lamb terms of group g. Expressed through J^z so both
// coupler representations share one code path:
//   sum_t omega_eff n_t = omega_eff * (count - J^z)/2.
Operator group_transmon_energy(const CircuitSpec& spec, int g, const AdjacencyCouplings& c,
                               const CouplerHandling& couplers, const LayoutPtr& layout,
                               double f_frame) {
    const auto& grp = spec.groups[g];
    const double lamb = chi_shift(c.g_left_ghz, c.delta_left_ghz) + chi_shift(c.g_right_ghz, c.delta_right_ghz);
    const double omega_eff_ang = kTau * (grp.freq_ghz - lamb - f_frame);
    const Operator jz = group_jz_operator(spec, g, couplers, layout);
    const Operator count = static_cast<double>(grp.transmons) * Operator::identity(layout);
    return (0.5 * omega_eff_ang) * (count - jz);
}

}  // namespace

Hamiltonian build_dispersive_chain(const CircuitSpec& spec, const CouplerHandling& couplers,
                                   Frame frame, std::optional<double> frame_freq_ghz) {
    spec.validate();
    if (spec.ancilla) {
        throw std::invalid_argument("dispersive chain builder takes a resonator-only circuit; "
                                    "use the ancilla-chain builder instead");
    }
    if (spec.resonators.size() < 2) {
        throw std::invalid_argument("dispersive chain needs at least two resonators");
    }
    check_couplers(spec, couplers);
    const double f_frame = resolve_frame(spec, frame, frame_freq_ghz);
    const auto couplings = chain_couplings(spec);
    require_dispersive_validity(couplings);
    LayoutPtr layout = dispersive_layout(spec, couplers);

    Hamiltonian h;
    h.frame_freq_ghz = f_frame;
    collect_dispersive_warnings(spec, couplings, h.warnings);

    Operator hs = Operator::zero(layout);
    for (const auto& r : spec.resonators) {
        hs = hs + (kTau * (r.freq_ghz - f_frame)) * number_op(layout, r.label);
    }

    const int n_groups = static_cast<int>(spec.groups.size());
    std::vector<Operator> jz_ops;
    jz_ops.reserve(n_groups);
    for (int g = 0; g < n_groups; ++g) {
        jz_ops.push_back(group_jz_operator(spec, g, couplers, layout));
    }

    // An adjacency between detuned resonators has its exchange eliminated in
    // favour of +/- V^2/D shifts; a resonant adjacency keeps the exchange term
    // (that exchange is the surviving dynamics, as in the two-resonator swap).
    std::vector<bool> eliminated(n_groups, false);
    for (int g = 0; g < n_groups; ++g) {
        const auto& c = couplings[g];
        const Operator n_left = number_op(layout, c.left_label);
        const Operator n_right = number_op(layout, c.right_label);

        hs = hs + group_transmon_energy(spec, g, c, couplers, layout, f_frame);
        // Stark shifts from eliminating the resonator-transmon couplings.
        hs = hs + (kTau * chi_shift(c.g_left_ghz, c.delta_left_ghz)) * (jz_ops[g] * n_left) +
             (kTau * chi_shift(c.g_right_ghz, c.delta_right_ghz)) * (jz_ops[g] * n_right);

        const double d_res = spec.resonators[g].freq_ghz - spec.resonators[g + 1].freq_ghz;
        const Operator hop = annihilator(layout, c.left_label).dagger() *
                             annihilator(layout, c.right_label);
        if (d_res == 0.0) {
            hs = hs + (kTau * c.exchange_ghz) * (jz_ops[g] * (hop + hop.dagger()));
        } else {
            eliminated[g] = true;
            const double shift = kTau * c.exchange_ghz * c.exchange_ghz / d_res;
            const Operator jz2 = jz_ops[g] * jz_ops[g];
            hs = hs + shift * (jz2 * n_left) - shift * (jz2 * n_right);
        }
    }

    // Next-nearest-neighbour exchange through each resonator whose couplings
    // to both sides were eliminated.
    for (int g = 0; g + 1 < n_groups; ++g) {
        if (!eliminated[g] || !eliminated[g + 1]) continue;
        const double f_a = spec.resonators[g].freq_ghz;
        const double f_mid = spec.resonators[g + 1].freq_ghz;
        const double f_b = spec.resonators[g + 2].freq_ghz;
        const double strength =
            kTau * exchange_coupling(couplings[g].exchange_ghz, f_a - f_mid,
                                     couplings[g + 1].exchange_ghz, f_b - f_mid);
        const Operator hop = annihilator(layout, spec.resonators[g].label).dagger() *
                             annihilator(layout, spec.resonators[g + 2].label);
        hs = hs + strength * ((jz_ops[g] * jz_ops[g + 1]) * (hop + hop.dagger()));
    }

    h.static_part = std::move(hs);
    return h;
}

Hamiltonian build_dispersive_ancilla_chain(const CircuitSpec& spec, const CouplerHandling& couplers,
                                           Frame frame, std::optional<double> frame_freq_ghz) {
    spec.validate();
    if (!spec.ancilla) {
        throw std::invalid_argument("ancilla-chain builder needs an ancilla in the circuit");
    }
    check_couplers(spec, couplers);
    const double f_frame = resolve_frame(spec, frame, frame_freq_ghz);
    const auto couplings = chain_couplings(spec);
    require_dispersive_validity(couplings);
    LayoutPtr layout = dispersive_layout(spec, couplers);

    Hamiltonian h;
    h.frame_freq_ghz = f_frame;
    collect_dispersive_warnings(spec, couplings, h.warnings);

    const std::string anc{kAncillaLabel};
    const Operator nq = number_op(layout, anc);
    const double omega_q_prime = spec.ancilla->freq_ghz - 0.5 * spec.ancilla->alpha_ghz;
    Operator hs = (kTau * (omega_q_prime - f_frame)) * nq -
                  (0.5 * kTau * spec.ancilla->alpha_ghz) * (nq * nq);
    for (const auto& r : spec.resonators) {
        hs = hs + (kTau * (r.freq_ghz - f_frame)) * number_op(layout, r.label);
    }

    const int n_groups = static_cast<int>(spec.groups.size());
    for (int g = 0; g < n_groups; ++g) {
        const auto& c = couplings[g];
        const Operator jz = group_jz_operator(spec, g, couplers, layout);
        const Operator n_left = number_op(layout, c.left_label);
        const Operator n_right = number_op(layout, c.right_label);

        hs = hs + group_transmon_energy(spec, g, c, couplers, layout, f_frame);
        hs = hs + (kTau * chi_shift(c.g_left_ghz, c.delta_left_ghz)) * (jz * n_left) +
             (kTau * chi_shift(c.g_right_ghz, c.delta_right_ghz)) * (jz * n_right);

        // Nearest-neighbour exchange survives at this order.
        const Operator hop = annihilator(layout, c.left_label).dagger() *
                             annihilator(layout, c.right_label);
        hs = hs + (kTau * c.exchange_ghz) * (jz * (hop + hop.dagger()));
    }

    h.static_part = std::move(hs);
    return h;
}

double DriveTerm::envelope(double t_ns) const {
    if (t_ns < t_on_ns || t_ns >= t_off_ns) return 0.0;
    double e = 1.0;
    if (ramp_ns > 0.0) {
        e = std::min(e, (t_ns - t_on_ns) / ramp_ns);
        if (std::isfinite(t_off_ns)) e = std::min(e, (t_off_ns - t_ns) / ramp_ns);
        e = std::max(e, 0.0);
    }
    return amp_ang * e;
}

DenseMatrix Hamiltonian::at_time(double t_ns) const {
    DenseMatrix m = static_part.to_dense();
    for (const auto& d : drives) {
        const double amp = d.envelope(t_ns);
        if (amp == 0.0) continue;
        const Cplx z = amp * std::exp(Cplx(0.0, -(d.freq_ang * t_ns - d.phase)));
        const DenseMatrix a = d.op.to_dense();
        m += z * a + std::conj(z) * a.adjoint();
    }
    return m;
}

std::vector<long> excitation_subspace(const LayoutPtr& layout, int n) {
    std::vector<long> indices;
    for (long i = 0; i < layout->total_dim(); ++i) {
        const auto occ = layout->occupations(i);
        long total = 0;
        for (int o : occ) total += o;
        if (total == n) indices.push_back(i);
    }
    return indices;
}

}  // namespace rcqed
