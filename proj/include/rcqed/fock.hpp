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

#ifndef RCQED_FOCK_HPP
#define RCQED_FOCK_HPP

#include <complex>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace rcqed {

using Cplx = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;
using SparseMatrix = Eigen::SparseMatrix<Cplx>;
using Vector = Eigen::VectorXcd;

constexpr double kTau = 6.283185307179586476925286766559;  // 2*pi
constexpr double kHermitianTol = 1e-12;
constexpr double kStateNormTol = 1e-10;

// Dense storage below this total dimension, compressed sparse above.
constexpr long kDenseDimLimit = 256;

enum class ModeKind { Boson, TwoLevel };

struct ModeSpec {
    ModeKind kind = ModeKind::Boson;
    int dim = 3;
    std::string label;

    static ModeSpec boson(std::string label, int dim = 3);
    static ModeSpec two_level(std::string label);
};

// Ordered tensor factorization of the Hilbert space. The first mode is the
// slowest-varying index of the flattened basis, i.e. the full-space matrix of
// an operator on mode 0 is op (x) I (x) ... (x) I.
class SpaceLayout {
public:
    explicit SpaceLayout(std::vector<ModeSpec> modes);

    int num_modes() const { return static_cast<int>(modes_.size()); }
    long total_dim() const { return total_dim_; }
    const ModeSpec& mode(int site) const;
    const std::vector<ModeSpec>& modes() const { return modes_; }
    int site(const std::string& label) const;
    bool has_site(const std::string& label) const;
    // Dimension of everything to the right of `site` in the tensor order.
    long stride(int site) const;

    // Flat index of a product basis state given one occupation per mode.
    long basis_index(const std::vector<int>& occupations) const;
    // Inverse of basis_index.
    std::vector<int> occupations(long index) const;

    bool same_as(const SpaceLayout& other) const;

private:
    std::vector<ModeSpec> modes_;
    std::vector<long> strides_;
    long total_dim_ = 1;
};

using LayoutPtr = std::shared_ptr<const SpaceLayout>;

LayoutPtr make_layout(std::vector<ModeSpec> modes);

class QuantumState;

// Complex square matrix tied to a tensor-space layout. Dense or compressed
// sparse, auto-selected by dimension; immutable in practice (all arithmetic
// returns new operators).
class Operator {
public:
    Operator() = default;

    static Operator from_dense(LayoutPtr layout, DenseMatrix m);
    static Operator from_sparse(LayoutPtr layout, SparseMatrix m);
    static Operator zero(LayoutPtr layout);
    static Operator identity(LayoutPtr layout);

    const LayoutPtr& layout() const { return layout_; }
    long dim() const;
    bool is_sparse_storage() const { return std::holds_alternative<SparseMatrix>(storage_); }

    DenseMatrix to_dense() const;
    SparseMatrix to_sparse() const;

    Operator dagger() const;
    Operator operator+(const Operator& rhs) const;
    Operator operator-(const Operator& rhs) const;
    Operator operator*(const Operator& rhs) const;
    Operator scaled(Cplx factor) const;
    friend Operator operator*(Cplx factor, const Operator& op) { return op.scaled(factor); }
    friend Operator operator*(double factor, const Operator& op) { return op.scaled(Cplx(factor, 0.0)); }

    Vector apply(const Vector& v) const;

    // max_ij |A - A^dagger|; hermitian() caches the <= kHermitianTol verdict.
    double hermiticity_defect() const;
    bool hermitian() const;

    double norm() const;          // Frobenius
    double max_abs() const;
    Cplx trace() const;
    Cplx frobenius_inner(const Operator& rhs) const;  // <this, rhs> = tr(this^dag rhs)

    Cplx expectation(const QuantumState& state) const;

    // Entry accessor (slow; tests and small extractions only).
    Cplx coeff(long row, long col) const;

private:
    LayoutPtr layout_;
    std::variant<DenseMatrix, SparseMatrix> storage_;
    mutable std::optional<bool> hermitian_cache_;

    void check_layout_match(const Operator& rhs) const;
};

// Pure ket or density matrix over a layout.
class QuantumState {
public:
    enum class Rep { Ket, Density };

    static QuantumState ket(LayoutPtr layout, Vector psi);
    static QuantumState density(LayoutPtr layout, DenseMatrix rho);
    // Product Fock/spin basis state, one occupation per mode in layout order.
    static QuantumState basis_state(LayoutPtr layout, const std::vector<int>& occupations);

    Rep rep() const { return rep_; }
    bool is_ket() const { return rep_ == Rep::Ket; }
    const LayoutPtr& layout() const { return layout_; }
    const Vector& ket_vector() const;
    const DenseMatrix& density_matrix() const;
    QuantumState to_density() const;

    long dim() const;

private:
    QuantumState() = default;
    LayoutPtr layout_;
    Rep rep_ = Rep::Ket;
    Vector psi_;
    DenseMatrix rho_;
};

// ---- single-mode matrices ----

// Truncated annihilation operator, entries A[n-1, n] = sqrt(n).
DenseMatrix destroy_matrix(int dim);
DenseMatrix create_matrix(int dim);
DenseMatrix number_matrix(int dim);
// diag(+1, -1): ground state carries eigenvalue +1.
DenseMatrix sigma_z_matrix();
DenseMatrix sigma_minus_matrix();
DenseMatrix identity_matrix(int dim);

// ---- embedding into a layout ----

Operator embed(const DenseMatrix& op, const std::string& site_label, const LayoutPtr& layout);
Operator annihilator(const LayoutPtr& layout, const std::string& site_label);
Operator number_op(const LayoutPtr& layout, const std::string& site_label);
Operator sigma_z_op(const LayoutPtr& layout, const std::string& site_label);

// Sum over consecutive pairs of (sigma^z_{2k-1} + sigma^z_{2k}). Requires an
// even number of two-level sites.
Operator collective_jz(const std::vector<std::string>& group_sites, const LayoutPtr& layout);

// Total excitation number: sum of number operators over every mode.
Operator total_excitation(const LayoutPtr& layout);

Cplx expectation(const Operator& op, const QuantumState& state);

}  // namespace rcqed

#endif  // RCQED_FOCK_HPP
