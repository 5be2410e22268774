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

#include "rcqed/fock.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/Eigenvalues>

namespace rcqed {

ModeSpec ModeSpec::boson(std::string label, int dim) {
    if (dim < 2) {
        throw std::invalid_argument("boson mode '" + label + "': truncation dim must be >= 2, got " +
                                    std::to_string(dim));
    }
    return ModeSpec{ModeKind::Boson, dim, std::move(label)};
}

ModeSpec ModeSpec::two_level(std::string label) {
    return ModeSpec{ModeKind::TwoLevel, 2, std::move(label)};
}

SpaceLayout::SpaceLayout(std::vector<ModeSpec> modes) : modes_(std::move(modes)) {
    if (modes_.empty()) {
        throw std::invalid_argument("layout needs at least one mode");
    }
    std::set<std::string> seen;
    for (const auto& m : modes_) {
        if (m.dim < 2) {
            throw std::invalid_argument("mode '" + m.label + "': dim must be >= 2");
        }
        if (m.kind == ModeKind::TwoLevel && m.dim != 2) {
            throw std::invalid_argument("two-level mode '" + m.label + "' must have dim 2");
        }
        if (!seen.insert(m.label).second) {
            throw std::invalid_argument("duplicate mode label '" + m.label + "'");
        }
    }
    strides_.assign(modes_.size(), 1);
    for (int i = static_cast<int>(modes_.size()) - 2; i >= 0; --i) {
        strides_[i] = strides_[i + 1] * modes_[i + 1].dim;
    }
    total_dim_ = strides_[0] * modes_[0].dim;
}

const ModeSpec& SpaceLayout::mode(int site) const {
    if (site < 0 || site >= num_modes()) {
        throw std::out_of_range("mode site " + std::to_string(site) + " out of range");
    }
    return modes_[site];
}

int SpaceLayout::site(const std::string& label) const {
    for (int i = 0; i < num_modes(); ++i) {
        if (modes_[i].label == label) return i;
    }
    throw std::invalid_argument("unknown site '" + label + "' in layout");
}

bool SpaceLayout::has_site(const std::string& label) const {
    return std::any_of(modes_.begin(), modes_.end(),
                       [&](const ModeSpec& m) { return m.label == label; });
}

long SpaceLayout::stride(int site) const {
    if (site < 0 || site >= num_modes()) {
        throw std::out_of_range("mode site out of range");
    }
    return strides_[site];
}

long SpaceLayout::basis_index(const std::vector<int>& occupations) const {
    if (static_cast<int>(occupations.size()) != num_modes()) {
        throw std::invalid_argument("occupation list length does not match layout");
    }
    long idx = 0;
    for (int i = 0; i < num_modes(); ++i) {
        if (occupations[i] < 0 || occupations[i] >= modes_[i].dim) {
            throw std::invalid_argument("occupation " + std::to_string(occupations[i]) +
                                        " out of range for mode '" + modes_[i].label + "'");
        }
        idx += occupations[i] * strides_[i];
    }
    return idx;
}

std::vector<int> SpaceLayout::occupations(long index) const {
    if (index < 0 || index >= total_dim_) {
        throw std::out_of_range("basis index out of range");
    }
    std::vector<int> occ(num_modes());
    for (int i = 0; i < num_modes(); ++i) {
        occ[i] = static_cast<int>(index / strides_[i]);
        index %= strides_[i];
    }
    return occ;
}

bool SpaceLayout::same_as(const SpaceLayout& other) const {
    if (num_modes() != other.num_modes()) return false;
    for (int i = 0; i < num_modes(); ++i) {
        if (modes_[i].label != other.modes_[i].label || modes_[i].dim != other.modes_[i].dim ||
            modes_[i].kind != other.modes_[i].kind) {
            return false;
        }
    }
    return true;
}

LayoutPtr make_layout(std::vector<ModeSpec> modes) {
    return std::make_shared<const SpaceLayout>(std::move(modes));
}

// ---- Operator ----

namespace {

void check_square(long rows, long cols, long dim) {
    if (rows != dim || cols != dim) {
        throw std::invalid_argument("operator matrix is " + std::to_string(rows) + "x" +
                                    std::to_string(cols) + " but the layout dimension is " +
                                    std::to_string(dim));
    }
}

}  // namespace

Operator Operator::from_dense(LayoutPtr layout, DenseMatrix m) {
    if (!layout) throw std::invalid_argument("operator needs a layout");
    check_square(m.rows(), m.cols(), layout->total_dim());
    Operator op;
    op.layout_ = std::move(layout);
    if (op.layout_->total_dim() > kDenseDimLimit) {
        op.storage_ = SparseMatrix(m.sparseView());
    } else {
        op.storage_ = std::move(m);
    }
    return op;
}

Operator Operator::from_sparse(LayoutPtr layout, SparseMatrix m) {
    if (!layout) throw std::invalid_argument("operator needs a layout");
    check_square(m.rows(), m.cols(), layout->total_dim());
    m.makeCompressed();
    Operator op;
    op.layout_ = std::move(layout);
    if (op.layout_->total_dim() > kDenseDimLimit) {
        op.storage_ = std::move(m);
    } else {
        op.storage_ = DenseMatrix(m);
    }
    return op;
}

Operator Operator::zero(LayoutPtr layout) {
    const long d = layout->total_dim();
    if (d > kDenseDimLimit) {
        return from_sparse(std::move(layout), SparseMatrix(d, d));
    }
    return from_dense(std::move(layout), DenseMatrix::Zero(d, d));
}

Operator Operator::identity(LayoutPtr layout) {
    const long d = layout->total_dim();
    if (d > kDenseDimLimit) {
        SparseMatrix id(d, d);
        id.setIdentity();
        return from_sparse(std::move(layout), std::move(id));
    }
    return from_dense(std::move(layout), DenseMatrix::Identity(d, d));
}

long Operator::dim() const {
    return layout_ ? layout_->total_dim() : 0;
}

DenseMatrix Operator::to_dense() const {
    if (const auto* d = std::get_if<DenseMatrix>(&storage_)) return *d;
    return DenseMatrix(std::get<SparseMatrix>(storage_));
}

SparseMatrix Operator::to_sparse() const {
    if (const auto* s = std::get_if<SparseMatrix>(&storage_)) return *s;
    SparseMatrix s = std::get<DenseMatrix>(storage_).sparseView();
    s.makeCompressed();
    return s;
}

void Operator::check_layout_match(const Operator& rhs) const {
    if (!layout_ || !rhs.layout_ || !layout_->same_as(*rhs.layout_)) {
        throw std::invalid_argument("operator layouts do not match");
    }
}

Operator Operator::dagger() const {
    Operator out;
    out.layout_ = layout_;
    if (const auto* d = std::get_if<DenseMatrix>(&storage_)) {
        out.storage_ = DenseMatrix(d->adjoint());
    } else {
        SparseMatrix s = std::get<SparseMatrix>(storage_).adjoint();
        s.makeCompressed();
        out.storage_ = std::move(s);
    }
    out.hermitian_cache_ = hermitian_cache_;
    return out;
}

Operator Operator::operator+(const Operator& rhs) const {
    check_layout_match(rhs);
    Operator out;
    out.layout_ = layout_;
    if (is_sparse_storage() && rhs.is_sparse_storage()) {
        SparseMatrix s = std::get<SparseMatrix>(storage_) + std::get<SparseMatrix>(rhs.storage_);
        s.makeCompressed();
        out.storage_ = std::move(s);
    } else {
        out.storage_ = DenseMatrix(to_dense() + rhs.to_dense());
    }
    return out;
}

Operator Operator::operator-(const Operator& rhs) const {
    return *this + rhs.scaled(Cplx(-1.0, 0.0));
}

Operator Operator::operator*(const Operator& rhs) const {
    check_layout_match(rhs);
    Operator out;
    out.layout_ = layout_;
    if (is_sparse_storage() && rhs.is_sparse_storage()) {
        SparseMatrix s = std::get<SparseMatrix>(storage_) * std::get<SparseMatrix>(rhs.storage_);
        s.makeCompressed();
        out.storage_ = std::move(s);
    } else {
        out.storage_ = DenseMatrix(to_dense() * rhs.to_dense());
    }
    return out;
}

Operator Operator::scaled(Cplx factor) const {
    Operator out;
    out.layout_ = layout_;
    if (const auto* d = std::get_if<DenseMatrix>(&storage_)) {
        out.storage_ = DenseMatrix(factor * (*d));
    } else {
        SparseMatrix s = factor * std::get<SparseMatrix>(storage_);
        out.storage_ = std::move(s);
    }
    return out;
}

Vector Operator::apply(const Vector& v) const {
    if (v.size() != dim()) {
        throw std::invalid_argument("vector length does not match operator dimension");
    }
    if (const auto* d = std::get_if<DenseMatrix>(&storage_)) return (*d) * v;
    return std::get<SparseMatrix>(storage_) * v;
}

double Operator::hermiticity_defect() const {
    if (const auto* d = std::get_if<DenseMatrix>(&storage_)) {
        return (*d - d->adjoint()).cwiseAbs().maxCoeff();
    }
    const auto& s = std::get<SparseMatrix>(storage_);
    SparseMatrix diff = s - SparseMatrix(s.adjoint());
    double m = 0.0;
    for (int k = 0; k < diff.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(diff, k); it; ++it) {
            m = std::max(m, std::abs(it.value()));
        }
    }
    return m;
}

bool Operator::hermitian() const {
    if (!hermitian_cache_.has_value()) {
        hermitian_cache_ = hermiticity_defect() <= kHermitianTol;
    }
    return *hermitian_cache_;
}

double Operator::norm() const {
    if (const auto* d = std::get_if<DenseMatrix>(&storage_)) return d->norm();
    return std::get<SparseMatrix>(storage_).norm();
}

double Operator::max_abs() const {
    if (const auto* d = std::get_if<DenseMatrix>(&storage_)) {
        return d->size() == 0 ? 0.0 : d->cwiseAbs().maxCoeff();
    }
    const auto& s = std::get<SparseMatrix>(storage_);
    double m = 0.0;
    for (int k = 0; k < s.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(s, k); it; ++it) {
            m = std::max(m, std::abs(it.value()));
        }
    }
    return m;
}

Cplx Operator::trace() const {
    if (const auto* d = std::get_if<DenseMatrix>(&storage_)) return d->trace();
    Cplx t = 0.0;
    const auto& s = std::get<SparseMatrix>(storage_);
    for (int k = 0; k < s.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(s, k); it; ++it) {
            if (it.row() == it.col()) t += it.value();
        }
    }
    return t;
}

Cplx Operator::frobenius_inner(const Operator& rhs) const {
    check_layout_match(rhs);
    if (is_sparse_storage() && rhs.is_sparse_storage()) {
        const auto& a = std::get<SparseMatrix>(storage_);
        const auto& b = std::get<SparseMatrix>(rhs.storage_);
        Cplx acc = 0.0;
        for (int k = 0; k < a.outerSize(); ++k) {
            for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
                acc += std::conj(it.value()) * b.coeff(it.row(), it.col());
            }
        }
        return acc;
    }
    return (to_dense().adjoint() * rhs.to_dense()).trace();
}

Cplx Operator::expectation(const QuantumState& state) const {
    if (!layout_->same_as(*state.layout())) {
        throw std::invalid_argument("state layout does not match operator layout");
    }
    if (state.is_ket()) {
        const Vector& psi = state.ket_vector();
        return psi.dot(apply(psi));
    }
    const DenseMatrix& rho = state.density_matrix();
    // tr(rho A) accumulated over the nonzeros of A.
    if (const auto* d = std::get_if<DenseMatrix>(&storage_)) {
        return ((*d) * rho).trace();
    }
    const auto& s = std::get<SparseMatrix>(storage_);
    Cplx acc = 0.0;
    for (int k = 0; k < s.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(s, k); it; ++it) {
            acc += it.value() * rho(it.col(), it.row());
        }
    }
    return acc;
}

Cplx Operator::coeff(long row, long col) const {
    if (const auto* d = std::get_if<DenseMatrix>(&storage_)) return (*d)(row, col);
    return std::get<SparseMatrix>(storage_).coeff(row, col);
}

// ---- QuantumState ----

QuantumState QuantumState::ket(LayoutPtr layout, Vector psi) {
    if (psi.size() != layout->total_dim()) {
        throw std::invalid_argument("ket length does not match layout dimension");
    }
    const double n = psi.norm();
    if (std::abs(n - 1.0) > kStateNormTol) {
        throw std::invalid_argument("ket norm deviates from 1 by " + std::to_string(std::abs(n - 1.0)));
    }
    QuantumState s;
    s.layout_ = std::move(layout);
    s.rep_ = Rep::Ket;
    s.psi_ = std::move(psi);
    return s;
}

QuantumState QuantumState::density(LayoutPtr layout, DenseMatrix rho) {
    const long d = layout->total_dim();
    check_square(rho.rows(), rho.cols(), d);
    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (herm > 1e-9) {
        throw std::invalid_argument("density matrix is not Hermitian (defect " + std::to_string(herm) + ")");
    }
    const double tr_dev = std::abs(rho.trace().real() - 1.0) + std::abs(rho.trace().imag());
    if (tr_dev > kStateNormTol) {
        throw std::invalid_argument("density matrix trace deviates from 1 by " + std::to_string(tr_dev));
    }
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10) {
        throw std::invalid_argument("density matrix has eigenvalue " +
                                    std::to_string(es.eigenvalues().minCoeff()) + " below -1e-10");
    }
    QuantumState s;
    s.layout_ = std::move(layout);
    s.rep_ = Rep::Density;
    s.rho_ = std::move(rho);
    return s;
}

QuantumState QuantumState::basis_state(LayoutPtr layout, const std::vector<int>& occupations) {
    Vector psi = Vector::Zero(layout->total_dim());
    psi(layout->basis_index(occupations)) = 1.0;
    return ket(std::move(layout), std::move(psi));
}

const Vector& QuantumState::ket_vector() const {
    if (rep_ != Rep::Ket) throw std::logic_error("state is not a ket");
    return psi_;
}

const DenseMatrix& QuantumState::density_matrix() const {
    if (rep_ != Rep::Density) throw std::logic_error("state is not a density matrix");
    return rho_;
}

QuantumState QuantumState::to_density() const {
    if (rep_ == Rep::Density) return *this;
    return density(layout_, psi_ * psi_.adjoint());
}

long QuantumState::dim() const {
    return layout_ ? layout_->total_dim() : 0;
}

// ---- single-mode matrices ----

DenseMatrix destroy_matrix(int dim) {
    if (dim < 2) {
        throw std::invalid_argument("destroy: dim must be >= 2, got " + std::to_string(dim));
    }
    DenseMatrix a = DenseMatrix::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) {
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    return a;
}

DenseMatrix create_matrix(int dim) {
    return destroy_matrix(dim).adjoint();
}

DenseMatrix number_matrix(int dim) {
    if (dim < 2) {
        throw std::invalid_argument("number: dim must be >= 2");
    }
    DenseMatrix n = DenseMatrix::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) n(k, k) = static_cast<double>(k);
    return n;
}

DenseMatrix sigma_z_matrix() {
    DenseMatrix z = DenseMatrix::Zero(2, 2);
    z(0, 0) = 1.0;
    z(1, 1) = -1.0;
    return z;
}

DenseMatrix sigma_minus_matrix() {
    return destroy_matrix(2);
}

DenseMatrix identity_matrix(int dim) {
    return DenseMatrix::Identity(dim, dim);
}

// ---- embedding ----

Operator embed(const DenseMatrix& op, const std::string& site_label, const LayoutPtr& layout) {
    const int site = layout->site(site_label);
    const ModeSpec& mode = layout->mode(site);
    if (op.rows() != mode.dim || op.cols() != mode.dim) {
        throw std::invalid_argument("embed: operator is " + std::to_string(op.rows()) + "x" +
                                    std::to_string(op.cols()) + " but site '" + site_label +
                                    "' has dim " + std::to_string(mode.dim));
    }
    const long right = layout->stride(site);
    const long left = layout->total_dim() / (right * mode.dim);
    std::vector<Eigen::Triplet<Cplx>> triplets;
    std::vector<std::pair<std::pair<int, int>, Cplx>> entries;
    for (int r = 0; r < mode.dim; ++r) {
        for (int c = 0; c < mode.dim; ++c) {
            if (op(r, c) != Cplx(0.0, 0.0)) entries.push_back({{r, c}, op(r, c)});
        }
    }
    triplets.reserve(entries.size() * left * right);
    for (long l = 0; l < left; ++l) {
        for (const auto& [rc, v] : entries) {
            const long row_base = (l * mode.dim + rc.first) * right;
            const long col_base = (l * mode.dim + rc.second) * right;
            for (long r = 0; r < right; ++r) {
                triplets.emplace_back(row_base + r, col_base + r, v);
            }
        }
    }
    SparseMatrix full(layout->total_dim(), layout->total_dim());
    full.setFromTriplets(triplets.begin(), triplets.end());
    return Operator::from_sparse(layout, std::move(full));
}

Operator annihilator(const LayoutPtr& layout, const std::string& site_label) {
    return embed(destroy_matrix(layout->mode(layout->site(site_label)).dim), site_label, layout);
}

Operator number_op(const LayoutPtr& layout, const std::string& site_label) {
    return embed(number_matrix(layout->mode(layout->site(site_label)).dim), site_label, layout);
}

Operator sigma_z_op(const LayoutPtr& layout, const std::string& site_label) {
    const ModeSpec& mode = layout->mode(layout->site(site_label));
    if (mode.kind != ModeKind::TwoLevel) {
        throw std::invalid_argument("sigma_z on non-two-level site '" + site_label + "'");
    }
    return embed(sigma_z_matrix(), site_label, layout);
}

Operator collective_jz(const std::vector<std::string>& group_sites, const LayoutPtr& layout) {
    if (group_sites.empty() || group_sites.size() % 2 != 0) {
        throw std::invalid_argument("collective J^z needs an even, positive number of sites (transmon pairs)");
    }
    Operator jz = Operator::zero(layout);
    for (const auto& label : group_sites) {
        jz = jz + sigma_z_op(layout, label);
    }
    return jz;
}

Operator total_excitation(const LayoutPtr& layout) {
    Operator n = Operator::zero(layout);
    for (const auto& mode : layout->modes()) {
        n = n + number_op(layout, mode.label);
    }
    return n;
}

Cplx expectation(const Operator& op, const QuantumState& state) {
    return op.expectation(state);
}

}  // namespace rcqed
