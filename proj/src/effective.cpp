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

#include "rcqed/effective.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace rcqed {

namespace {

struct ChainData {
    int n = 0;                       // resonator count
    std::vector<double> exchange;    // E_g, one per group (0 = ancilla adjacency)
    std::vector<double> d;           // D_m = omega_m - omega_{m+1} between elements
    std::vector<AdjacencyCouplings> couplings;
};

ChainData chain_data(const CircuitSpec& spec, const std::vector<int>& jz) {
    spec.validate();
    if (!spec.ancilla) {
        throw std::invalid_argument("effective parameters need an ancilla-terminated chain");
    }
    if (spec.resonators.size() < 2) {
        throw std::invalid_argument("effective parameters need at least two resonators");
    }
    if (jz.size() != spec.groups.size()) {
        throw std::invalid_argument("need one J^z value per coupler group");
    }
    ChainData cd;
    cd.n = static_cast<int>(spec.resonators.size());
    cd.couplings = chain_couplings(spec);
    for (const auto& c : cd.couplings) {
        if (!(c.g_over_delta <= kDispersiveHardRatio)) {
            throw std::domain_error("adjacency " + c.left_label + "-" + c.right_label +
                                    " is outside the dispersive regime");
        }
        cd.exchange.push_back(c.exchange_ghz);
    }
    // Element frequencies of the Eq.-5-form model; the ancilla enters with its
    // shifted frequency omega_q' = omega_q - alpha/2.
    std::vector<double> elem_freq;
    elem_freq.push_back(spec.ancilla->freq_ghz - 0.5 * spec.ancilla->alpha_ghz);
    for (const auto& r : spec.resonators) elem_freq.push_back(r.freq_ghz);
    for (std::size_t m = 0; m + 1 < elem_freq.size(); ++m) {
        const double d = elem_freq[m] - elem_freq[m + 1];
        if (d == 0.0 && m >= 1) {
            throw std::domain_error("zero detuning between resonators " + std::to_string(m) +
                                    " and " + std::to_string(m + 1) +
                                    "; the elimination denominators vanish");
        }
        cd.d.push_back(d);
    }
    return cd;
}

}  // namespace

EffectiveParams effective_params(const CircuitSpec& spec, const std::vector<int>& jz) {
    const ChainData cd = chain_data(spec, jz);
    const int n = cd.n;

    EffectiveParams p;
    p.jz = jz;
    p.alpha_ghz = spec.ancilla->alpha_ghz;
    p.omega_q_tilde_ghz = spec.ancilla->freq_ghz - 1.5 * spec.ancilla->alpha_ghz;

    // Resonator frequencies: bare value, the inherited Stark shifts of the
    // Eq.-5-form model, and the +/- E^2 J^2 / D corrections from eliminating
    // each detuned resonator-resonator exchange.
    p.omega_tilde_ghz.assign(n, 0.0);
    for (int k = 0; k < n; ++k) {
        double w = spec.resonators[k].freq_ghz;
        // group k sits on the left of resonator k (element k+1), group k+1 on its right
        w += chi_shift(cd.couplings[k].g_right_ghz, cd.couplings[k].delta_right_ghz) * jz[k];
        if (k + 1 < static_cast<int>(cd.couplings.size())) {
            w += chi_shift(cd.couplings[k + 1].g_left_ghz, cd.couplings[k + 1].delta_left_ghz) * jz[k + 1];
        }
        // Elimination of the exchange on the resonator's left (group k, for k >= 1).
        if (k >= 1) {
            const double e = cd.exchange[k] * jz[k];
            w -= e * e / cd.d[k];
        }
        // ... and on its right (group k+1).
        if (k + 1 < static_cast<int>(cd.exchange.size())) {
            const double e = cd.exchange[k + 1] * jz[k + 1];
            w += e * e / cd.d[k + 1];
        }
        p.omega_tilde_ghz[k] = w;
    }

    // Flagged variants of the last resonator's shift for n = 3: the printed
    // form reuses the first elimination's E^2/D where the k-pattern calls for
    // the second one's.
    if (n == 3) {
        const double base = spec.resonators[2].freq_ghz +
                            chi_shift(cd.couplings[2].g_right_ghz, cd.couplings[2].delta_right_ghz) * jz[2];
        p.omega3_pattern_ghz = base - std::pow(cd.exchange[2] * jz[2], 2) / cd.d[2];
        p.omega3_printed_ghz = base - std::pow(cd.exchange[1] * jz[2], 2) / cd.d[1];
    }

    // Couplings as printed: alternating sign, exchange products over
    // cumulative detuning sums.
    p.g_tilde_ghz.assign(n, 0.0);
    for (int k = 1; k <= n; ++k) {
        double value = (k % 2 == 0) ? -1.0 : 1.0;
        for (int m = 0; m < k; ++m) value *= cd.exchange[m] * jz[m];
        for (int i = 1; i < k; ++i) {
            double cum = 0.0;
            for (int m = k - 1 - i; m <= k - 2; ++m) cum += cd.d[m];
            if (cum == 0.0) throw std::domain_error("zero detuning in a coupling denominator");
            value /= cum;
        }
        p.g_tilde_ghz[k - 1] = value;
    }
    return p;
}

double chain_interaction(const std::vector<double>& g_ghz, const std::vector<double>& deltas_ghz,
                         const std::vector<int>& jz) {
    const std::size_t hops = g_ghz.size();
    if (hops < 1) throw std::invalid_argument("chain interaction needs at least one hop (n >= 2)");
    if (deltas_ghz.size() != hops || jz.size() != hops) {
        throw std::invalid_argument("coupling, detuning and J^z lists must all have length n-1");
    }
    double v = 1.0;
    for (std::size_t i = 0; i < hops; ++i) v *= g_ghz[i] * static_cast<double>(jz[i]);
    for (std::size_t i = 0; i + 1 < hops; ++i) {
        if (deltas_ghz[i] == 0.0) throw std::domain_error("zero intermediate detuning");
        v /= deltas_ghz[i];
    }
    return v;
}

ChainInteractionRange chain_interaction_range(const std::vector<double>& g_ghz,
                                              const std::vector<double>& deltas_ghz,
                                              int pairs_per_group) {
    if (pairs_per_group < 1) throw std::invalid_argument("need at least one transmon pair per group");
    std::vector<int> full(g_ghz.size(), 2 * pairs_per_group);
    ChainInteractionRange r;
    r.min_ghz = 0.0;
    r.max_abs_ghz = std::abs(chain_interaction(g_ghz, deltas_ghz, full));
    return r;
}

void GeneratorSpec::validate() const {
    const Operator sum = s + s.dagger();
    if (sum.max_abs() > kHermitianTol * std::max(1.0, s.max_abs())) {
        throw std::invalid_argument("generator '" + description + "' is not anti-Hermitian");
    }
}

Operator bch_transform(const Operator& h, const GeneratorSpec& s) {
    s.validate();
    if (!h.layout()->same_as(*s.s.layout())) {
        throw std::invalid_argument("generator layout does not match the Hamiltonian");
    }
    const Operator c1 = s.s * h - h * s.s;
    const Operator c2 = s.s * c1 - c1 * s.s;
    return h + c1 + 0.5 * c2;
}

Operator exact_transform(const Operator& h, const GeneratorSpec& s) {
    s.validate();
    const DenseMatrix sm = s.s.to_dense();
    const DenseMatrix u = sm.exp();
    const DenseMatrix uinv = (-sm).exp();
    return Operator::from_dense(h.layout(), u * h.to_dense() * uinv);
}

std::vector<GeneratorSpec> ancilla_chain_generators(const CircuitSpec& spec,
                                                    const std::vector<int>& jz,
                                                    const LayoutPtr& layout) {
    const ChainData cd = chain_data(spec, jz);
    const int n = cd.n;

    auto hop = [&](int j, int k) {  // m_j^dag m_k - m_k^dag m_j (resonators, 1-based)
        const Operator a = annihilator(layout, spec.resonators[j - 1].label);
        const Operator b = annihilator(layout, spec.resonators[k - 1].label);
        const Operator t = a.dagger() * b;
        return t - t.dagger();
    };

    // V[j][k]: exchange amplitude between resonators j and k (GHz) carried
    // into stage k's elimination; detunings are cumulative sums of D.
    std::vector<std::vector<double>> v(n + 1, std::vector<double>(n + 1, 0.0));
    for (int m = 1; m < n; ++m) v[m][m + 1] = cd.exchange[m] * jz[m];

    auto span_detuning = [&](int j, int k) {  // omega_j - omega_k
        double d = 0.0;
        for (int m = j; m < k; ++m) d += cd.d[m];
        return d;
    };

    std::vector<GeneratorSpec> gens;
    for (int k = 2; k <= n; ++k) {
        Operator s = Operator::zero(layout);
        for (int j = k - 1; j >= 1; --j) {
            const double amp = v[j][k];
            if (amp == 0.0) continue;
            const double det = span_detuning(j, k);
            if (det == 0.0) throw std::domain_error("vanishing elimination denominator");
            s = s + (amp / det) * hop(j, k);
            // The elimination hands the amplitude one link further down the chain.
            if (k < n) {
                const double next = cd.exchange[k] * jz[k];
                v[j][k + 1] += amp * next / det;
            }
        }
        GeneratorSpec gen;
        gen.s = std::move(s);
        gen.description = "eliminates resonator exchanges ending at r" + std::to_string(k);
        gens.push_back(std::move(gen));
    }
    return gens;
}

namespace {

struct FitBasis {
    std::vector<Operator> ops;
    std::vector<std::string> tags;  // "I", "nq", "nq2", "n1".., "qm1".., "m12"..
};

FitBasis effective_fit_basis(const CircuitSpec& spec, const LayoutPtr& layout) {
    FitBasis basis;
    const int n = static_cast<int>(spec.resonators.size());
    basis.ops.push_back(Operator::identity(layout));
    basis.tags.push_back("I");
    const Operator nq = number_op(layout, "q");
    basis.ops.push_back(nq);
    basis.tags.push_back("nq");
    basis.ops.push_back(nq * nq);
    basis.tags.push_back("nq2");
    for (int k = 0; k < n; ++k) {
        basis.ops.push_back(number_op(layout, spec.resonators[k].label));
        basis.tags.push_back("n" + std::to_string(k + 1));
    }
    const Operator q = annihilator(layout, "q");
    for (int k = 0; k < n; ++k) {
        const Operator t = q.dagger() * annihilator(layout, spec.resonators[k].label);
        basis.ops.push_back(t + t.dagger());
        basis.tags.push_back("qm" + std::to_string(k + 1));
    }
    for (int j = 0; j < n; ++j) {
        for (int k = j + 1; k < n; ++k) {
            const Operator t = annihilator(layout, spec.resonators[j].label).dagger() *
                               annihilator(layout, spec.resonators[k].label);
            basis.ops.push_back(t + t.dagger());
            basis.tags.push_back("m" + std::to_string(j + 1) + std::to_string(k + 1));
        }
    }
    return basis;
}

}  // namespace

DeriveResult derive_effective_hamiltonian(const CircuitSpec& spec, const std::vector<int>& jz) {
    DeriveResult result;
    result.closed_form = effective_params(spec, jz);

    const auto h5 = build_dispersive_ancilla_chain(spec, CouplerHandling::frozen(jz));
    const auto layout = h5.layout();
    Operator h = h5.static_part;
    for (const auto& gen : ancilla_chain_generators(spec, jz, layout)) {
        h = bch_transform(h, gen);
    }
    result.h_effective = h;

    // Least-squares fit of the transformed matrix onto the Eq.-8 operator set.
    const FitBasis basis = effective_fit_basis(spec, layout);
    const int nb = static_cast<int>(basis.ops.size());
    DenseMatrix gram(nb, nb);
    Vector rhs(nb);
    for (int i = 0; i < nb; ++i) {
        for (int j = 0; j < nb; ++j) gram(i, j) = basis.ops[i].frobenius_inner(basis.ops[j]);
        rhs(i) = basis.ops[i].frobenius_inner(h);
    }
    const Vector coef = gram.fullPivLu().solve(rhs);

    Operator recon = Operator::zero(layout);
    for (int i = 0; i < nb; ++i) recon = recon + coef(i).real() * basis.ops[i];
    result.fit_residual = (h - recon).norm() / std::max(1e-300, h.norm());

    const int n = static_cast<int>(spec.resonators.size());
    EffectiveParams fitted;
    fitted.jz = jz;
    fitted.omega_tilde_ghz.assign(n, 0.0);
    fitted.g_tilde_ghz.assign(n, 0.0);
    for (int i = 0; i < nb; ++i) {
        const std::string& tag = basis.tags[i];
        const double value = coef(i).real() / kTau;
        if (tag == "nq") fitted.omega_q_tilde_ghz = value;
        if (tag == "nq2") fitted.alpha_ghz = -2.0 * value;
        for (int k = 0; k < n; ++k) {
            if (tag == "n" + std::to_string(k + 1)) fitted.omega_tilde_ghz[k] = value;
            if (tag == "qm" + std::to_string(k + 1)) fitted.g_tilde_ghz[k] = value;
        }
        if (tag.size() == 3 && tag[0] == 'm') {
            result.max_offdiag_exchange_ghz = std::max(result.max_offdiag_exchange_ghz, std::abs(value));
        }
    }
    result.fitted = fitted;

    if (n == 3) {
        const double fit3 = fitted.omega_tilde_ghz[2];
        const double err_printed = std::abs(fit3 - result.closed_form.omega3_printed_ghz);
        const double err_pattern = std::abs(fit3 - result.closed_form.omega3_pattern_ghz);
        result.omega3_variant = err_pattern <= err_printed ? "pattern" : "printed";
    }
    return result;
}

ValidationReport validate_effective(const Operator& full, const Operator& effective,
                                    int excitation, double t_max_ns, int time_samples) {
    if (!full.layout()->same_as(*effective.layout())) {
        throw std::invalid_argument("operators live on different layouts");
    }
    const auto idx = excitation_subspace(full.layout(), excitation);
    if (idx.empty()) {
        throw std::invalid_argument("excitation subspace " + std::to_string(excitation) + " is empty");
    }

    ValidationReport report;
    const DenseMatrix mf = full.to_dense();
    const DenseMatrix me = effective.to_dense();

    DenseMatrix pf(idx.size(), idx.size()), pe(idx.size(), idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        for (std::size_t j = 0; j < idx.size(); ++j) {
            pf(i, j) = mf(idx[i], idx[j]);
            pe(i, j) = me(idx[i], idx[j]);
        }
    }
    Eigen::SelfAdjointEigenSolver<DenseMatrix> esf(pf), ese(pe);
    for (long k = 0; k < esf.eigenvalues().size(); ++k) {
        const double lf = esf.eigenvalues()(k);
        const double le = ese.eigenvalues()(k);
        const double rel = std::abs(lf - le) / std::max(std::abs(lf), 1e-12);
        report.eigenvalue_rel_errors.push_back(rel);
        report.max_eigenvalue_rel_error = std::max(report.max_eigenvalue_rel_error, rel);
    }

    // Propagator overlap from a uniform superposition over the subspace.
    Eigen::SelfAdjointEigenSolver<DenseMatrix> ff(mf), fe(me);
    Vector psi0 = Vector::Zero(mf.rows());
    for (long i : idx) psi0(i) = 1.0;
    psi0 /= psi0.norm();
    const Vector cf = ff.eigenvectors().adjoint() * psi0;
    const Vector ce = fe.eigenvectors().adjoint() * psi0;
    for (int s = 0; s < time_samples; ++s) {
        const double t = t_max_ns * static_cast<double>(s) / std::max(1, time_samples - 1);
        Vector phase_f = cf, phase_e = ce;
        for (long k = 0; k < cf.size(); ++k) {
            phase_f(k) *= std::exp(Cplx(0.0, -ff.eigenvalues()(k) * t));
            phase_e(k) *= std::exp(Cplx(0.0, -fe.eigenvalues()(k) * t));
        }
        const Vector psi_f = ff.eigenvectors() * phase_f;
        const Vector psi_e = fe.eigenvectors() * phase_e;
        const double fid = std::abs(psi_f.dot(psi_e));
        report.fidelity_times_ns.push_back(t);
        report.fidelity.push_back(fid);
        report.min_fidelity = std::min(report.min_fidelity, fid);
    }
    report.max_deviation = 1.0 - report.min_fidelity;
    return report;
}

}  // namespace rcqed
