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

#include "rcqed/lindblad.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>
#include <thread>

#include <Eigen/Eigenvalues>

namespace rcqed {

bool LindbladModel::lossless() const {
    return std::all_of(channels.begin(), channels.end(),
                       [](const CollapseChannel& c) { return c.rate_ghz == 0.0; });
}

void TimeGrid::validate() const {
    if (!(t1_ns > t0_ns)) throw std::invalid_argument("time grid needs t1 > t0");
    if (samples < 2) throw std::invalid_argument("time grid needs at least two samples");
    if (!(rtol > 0.0) || !(atol > 0.0)) throw std::invalid_argument("tolerances must be positive");
}

const std::vector<double>& Trajectory::series_for(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return series[i];
    }
    throw std::invalid_argument("trajectory has no observable named '" + name + "'");
}

namespace {

// Hamiltonians and collapse operators in these models are very sparse; the
// right-hand sides always apply them in compressed form.
struct AppliedOp {
    SparseMatrix s;

    explicit AppliedOp(const Operator& op) : s(op.to_sparse()) {}
    explicit AppliedOp(SparseMatrix m) : s(std::move(m)) { s.makeCompressed(); }

    void mul_vec(const Vector& x, Vector& out) const { out.noalias() = s * x; }
    void mul_left(const DenseMatrix& x, DenseMatrix& out) const { out.noalias() = s * x; }
    void mul_right(const DenseMatrix& x, DenseMatrix& out) const { out.noalias() = x * s; }
};

Cplx drive_envelope(const DriveTerm& d, double t) {
    const double amp = d.envelope(t);
    if (amp == 0.0) return Cplx(0.0, 0.0);
    return amp * std::exp(Cplx(0.0, -(d.freq_ang * t - d.phase)));
}

// Right-hand sides with preallocated workspace.
class KetRhs {
public:
    explicit KetRhs(const Hamiltonian& h) : h_static_(h.static_part) {
        for (const auto& term : h.drives) {
            drives_.push_back({AppliedOp(term.op), AppliedOp(term.op.dagger()), term});
        }
        tmp_.resize(h.layout()->total_dim());
    }

    void operator()(double t, const Vector& y, Vector& dy) {
        h_static_.mul_vec(y, dy);
        for (const auto& drv : drives_) {
            const Cplx z = drive_envelope(drv.term, t);
            if (z == Cplx(0.0, 0.0)) continue;
            drv.op.mul_vec(y, tmp_);
            dy += z * tmp_;
            drv.op_dag.mul_vec(y, tmp_);
            dy += std::conj(z) * tmp_;
        }
        dy *= Cplx(0.0, -1.0);
    }

private:
    struct Drive {
        AppliedOp op;
        AppliedOp op_dag;
        DriveTerm term;
    };
    AppliedOp h_static_;
    std::vector<Drive> drives_;
    Vector tmp_;
};

class DensityRhs {
public:
    explicit DensityRhs(const LindbladModel& model)
        : dim_(model.layout()->total_dim()),
          h_nonherm_(effective_nonhermitian(model)),
          h_nonherm_dag_(SparseMatrix(h_nonherm_.s.adjoint())) {
        for (const auto& term : model.hamiltonian.drives) {
            drives_.push_back({AppliedOp(term.op), AppliedOp(term.op.dagger()), term});
        }
        for (const auto& ch : model.channels) {
            if (ch.rate_ghz == 0.0) continue;
            channels_.push_back({AppliedOp(ch.op), AppliedOp(ch.op.dagger()), kTau * ch.rate_ghz});
        }
        a_.resize(dim_, dim_);
        b_.resize(dim_, dim_);
    }

    void operator()(double t, const Vector& y, Vector& dy) {
        const Eigen::Map<const DenseMatrix> rho(y.data(), dim_, dim_);
        Eigen::Map<DenseMatrix> drho(dy.data(), dim_, dim_);

        // -i (H_nh rho - rho H_nh^dag) covers the commutator and the
        // anticommutator halves of every dissipator in one pass.
        h_nonherm_.mul_left(rho, a_);
        h_nonherm_dag_.mul_right(rho, b_);
        drho = Cplx(0.0, -1.0) * (a_ - b_);
        for (const auto& drv : drives_) {
            const Cplx z = drive_envelope(drv.term, t);
            if (z == Cplx(0.0, 0.0)) continue;
            drv.op.mul_left(rho, a_);
            drv.op.mul_right(rho, b_);
            drho += Cplx(0.0, -1.0) * z * (a_ - b_);
            drv.op_dag.mul_left(rho, a_);
            drv.op_dag.mul_right(rho, b_);
            drho += Cplx(0.0, -1.0) * std::conj(z) * (a_ - b_);
        }

        // Recycling terms kappa * c rho c^dag.
        for (const auto& ch : channels_) {
            ch.op.mul_left(rho, a_);
            ch.op_dag.mul_right(a_, b_);
            drho += ch.rate_ang * b_;
        }
    }

private:
    struct Drive {
        AppliedOp op;
        AppliedOp op_dag;
        DriveTerm term;
    };
    struct Channel {
        AppliedOp op;
        AppliedOp op_dag;
        double rate_ang;
    };

    static AppliedOp effective_nonhermitian(const LindbladModel& model) {
        SparseMatrix h = model.hamiltonian.static_part.to_sparse();
        for (const auto& ch : model.channels) {
            if (ch.rate_ghz == 0.0) continue;
            const SparseMatrix cdc = (ch.op.dagger() * ch.op).to_sparse();
            h = h + Cplx(0.0, -0.5 * kTau * ch.rate_ghz) * cdc;
        }
        return AppliedOp(std::move(h));
    }

    long dim_;
    AppliedOp h_nonherm_;
    AppliedOp h_nonherm_dag_;
    std::vector<Drive> drives_;
    std::vector<Channel> channels_;
    DenseMatrix a_, b_;
};

// Dormand-Prince 5(4) with FSAL.
class Dopri5 {
public:
    using Rhs = std::function<void(double, const Vector&, Vector&)>;

    Dopri5(Rhs rhs, double rtol, double atol) : rhs_(std::move(rhs)), rtol_(rtol), atol_(atol) {}

    SolverStats& stats() { return stats_; }

    // Advance y from t to t_end, stopping exactly there.
    void advance(double& t, Vector& y, double t_end) {
        if (t_end <= t) return;
        const long n = y.size();
        ensure_size(n);
        if (!fsal_valid_) {
            rhs_(t, y, k_[0]);
            ++stats_.rhs_evals;
            fsal_valid_ = true;
        }
        if (h_ <= 0.0) h_ = initial_step(t, t_end);
        while (t < t_end) {
            double h = std::min(h_, t_end - t);
            if (h < kMinStepFactor * std::max(1.0, std::abs(t))) {
                throw IntegrationError(
                    "step size underflow at t = " + std::to_string(t) +
                    " ns (h = " + std::to_string(h) + "); the model may be stiff or discontinuous");
            }
            const bool hit_end = (t + h >= t_end);

            for (int stage = 1; stage < 6; ++stage) {
                ytmp_ = y;
                for (int j = 0; j < stage; ++j) {
                    if (kA[stage - 1][j] != 0.0) ytmp_ += (h * kA[stage - 1][j]) * k_[j];
                }
                rhs_(t + kC[stage - 1] * h, ytmp_, k_[stage]);
            }
            ynew_ = y;
            for (int j = 0; j < 6; ++j) {
                if (kB[j] != 0.0) ynew_ += (h * kB[j]) * k_[j];
            }
            rhs_(t + h, ynew_, k_[6]);
            stats_.rhs_evals += 6;

            double err_norm = 0.0;
            err_ = h * kE[0] * k_[0];
            for (int j = 2; j < 7; ++j) err_ += (h * kE[j]) * k_[j];
            for (long i = 0; i < n; ++i) {
                const double sc = atol_ + rtol_ * std::max(std::abs(y(i)), std::abs(ynew_(i)));
                const double e = std::abs(err_(i)) / sc;
                err_norm += e * e;
            }
            err_norm = std::sqrt(err_norm / static_cast<double>(n));

            if (err_norm <= 1.0) {
                t = hit_end ? t_end : t + h;
                y.swap(ynew_);
                k_[0].swap(k_[6]);  // FSAL
                ++stats_.accepted;
                stats_.min_step_ns = stats_.min_step_ns == 0.0 ? h : std::min(stats_.min_step_ns, h);
                stats_.max_step_ns = std::max(stats_.max_step_ns, h);
            } else {
                ++stats_.rejected;
            }
            const double factor =
                std::clamp(0.9 * std::pow(std::max(err_norm, 1e-10), -0.2), 0.2, 5.0);
            h_ = h * factor;
        }
    }

    // Force a fresh k1 evaluation after the caller mutated y.
    void invalidate_fsal() { fsal_valid_ = false; }

private:
    static constexpr double kMinStepFactor = 1e-14;
    static constexpr double kC[6] = {0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0};
    static constexpr double kA[5][5] = {
        {0.2, 0, 0, 0, 0},
        {3.0 / 40.0, 9.0 / 40.0, 0, 0, 0},
        {44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0, 0},
        {19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0},
        {9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0},
    };
    static constexpr double kB[6] = {35.0 / 384.0, 0.0,           500.0 / 1113.0,
                                     125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0};
    static constexpr double kE[7] = {71.0 / 57600.0,      0.0,          -71.0 / 16695.0,
                                     71.0 / 1920.0,       -17253.0 / 339200.0,
                                     22.0 / 525.0,        -1.0 / 40.0};

    void ensure_size(long n) {
        for (auto& k : k_) {
            if (k.size() != n) k.resize(n);
        }
        if (ytmp_.size() != n) ytmp_.resize(n);
        if (ynew_.size() != n) ynew_.resize(n);
    }

    double initial_step(double t, double t_end) const {
        double fy = 0.0;
        for (long i = 0; i < k_[0].size(); ++i) fy = std::max(fy, std::abs(k_[0](i)));
        double h = (fy > 0.0) ? 0.01 / fy : (t_end - t) / 100.0;
        return std::clamp(h, 1e-8, t_end - t);
    }

    Rhs rhs_;
    double rtol_, atol_;
    double h_ = 0.0;
    bool fsal_valid_ = false;
    Vector k_[7], ytmp_, ynew_, err_;
    SolverStats stats_;
};

std::vector<double> sample_times(const TimeGrid& grid) {
    std::vector<double> t(grid.samples);
    const double dt = (grid.t1_ns - grid.t0_ns) / static_cast<double>(grid.samples - 1);
    for (int i = 0; i < grid.samples; ++i) t[i] = grid.t0_ns + dt * i;
    t.back() = grid.t1_ns;
    return t;
}

// Output samples merged with drive window edges so the integrator never steps
// across a discontinuity.
std::vector<double> stop_times(const TimeGrid& grid, const Hamiltonian& h) {
    std::set<double> stops;
    for (double t : sample_times(grid)) stops.insert(t);
    for (const auto& d : h.drives) {
        if (d.t_on_ns > grid.t0_ns && d.t_on_ns < grid.t1_ns) stops.insert(d.t_on_ns);
        if (std::isfinite(d.t_off_ns) && d.t_off_ns > grid.t0_ns && d.t_off_ns < grid.t1_ns) {
            stops.insert(d.t_off_ns);
        }
    }
    return {stops.begin(), stops.end()};
}

bool is_sample_time(double t, const std::vector<double>& samples, std::size_t& cursor) {
    while (cursor < samples.size() && samples[cursor] < t - 1e-12) ++cursor;
    return cursor < samples.size() && std::abs(samples[cursor] - t) <= 1e-12;
}

}  // namespace

Trajectory evolve(const LindbladModel& model, const QuantumState& initial, const TimeGrid& grid,
                  const std::vector<Observable>& observables) {
    grid.validate();
    if (!model.layout()->same_as(*initial.layout())) {
        throw std::invalid_argument("initial state layout does not match the model");
    }
    for (const auto& obs : observables) {
        if (!obs.op.layout()->same_as(*model.layout())) {
            throw std::invalid_argument("observable '" + obs.name + "' layout does not match the model");
        }
    }
    for (const auto& ch : model.channels) {
        if (ch.rate_ghz < 0) throw std::invalid_argument("collapse rates must be >= 0");
    }

    const bool pure_path = model.lossless() && initial.is_ket();
    const long dim = model.layout()->total_dim();

    Trajectory traj;
    traj.names.reserve(observables.size());
    for (const auto& obs : observables) traj.names.push_back(obs.name);
    traj.series.assign(observables.size(), {});
    const auto samples = sample_times(grid);
    const auto stops = stop_times(grid, model.hamiltonian);

    Vector y;
    if (pure_path) {
        y = initial.ket_vector();
    } else {
        const DenseMatrix rho = initial.is_ket()
                                    ? DenseMatrix(initial.ket_vector() * initial.ket_vector().adjoint())
                                    : initial.density_matrix();
        y = Eigen::Map<const Vector>(rho.data(), rho.size());
    }

    KetRhs ket_rhs(model.hamiltonian);
    DensityRhs rho_rhs(model);
    Dopri5 solver(
        pure_path ? Dopri5::Rhs([&](double t, const Vector& v, Vector& dv) { ket_rhs(t, v, dv); })
                  : Dopri5::Rhs([&](double t, const Vector& v, Vector& dv) { rho_rhs(t, v, dv); }),
        grid.rtol, grid.atol);

    auto record_sample = [&](double t) {
        traj.times_ns.push_back(t);
        if (pure_path) {
            const Eigen::Map<const Vector> psi(y.data(), dim);
            const double norm_dev = std::abs(psi.norm() - 1.0);
            traj.trace_dev.push_back(norm_dev);
            traj.stats.max_trace_dev = std::max(traj.stats.max_trace_dev, norm_dev);
            for (std::size_t k = 0; k < observables.size(); ++k) {
                const Vector tmp = observables[k].op.apply(psi);
                traj.series[k].push_back(psi.dot(tmp).real());
            }
            if (grid.keep_states) traj.states.push_back(psi);
        } else {
            Eigen::Map<DenseMatrix> rho(y.data(), dim, dim);
            const double herm_dev = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
            traj.stats.max_hermiticity_dev = std::max(traj.stats.max_hermiticity_dev, herm_dev);
            rho = 0.5 * (rho + rho.adjoint()).eval();
            solver.invalidate_fsal();
            const double trace_dev = std::abs(rho.trace() - Cplx(1.0, 0.0));
            traj.trace_dev.push_back(trace_dev);
            traj.stats.max_trace_dev = std::max(traj.stats.max_trace_dev, trace_dev);
            for (std::size_t k = 0; k < observables.size(); ++k) {
                Cplx acc = 0.0;
                if (observables[k].op.is_sparse_storage()) {
                    const SparseMatrix s = observables[k].op.to_sparse();
                    for (int c = 0; c < s.outerSize(); ++c) {
                        for (SparseMatrix::InnerIterator it(s, c); it; ++it) {
                            acc += it.value() * rho(it.col(), it.row());
                        }
                    }
                } else {
                    acc = (observables[k].op.to_dense() * rho).trace();
                }
                traj.series[k].push_back(acc.real());
            }
            const std::size_t idx = traj.times_ns.size() - 1;
            if (grid.positivity_stride > 0 &&
                (idx % static_cast<std::size_t>(grid.positivity_stride) == 0 ||
                 static_cast<int>(idx) + 1 == grid.samples)) {
                Eigen::SelfAdjointEigenSolver<DenseMatrix> es(rho, Eigen::EigenvaluesOnly);
                traj.min_eigenvalue.push_back(es.eigenvalues().minCoeff());
            }
        }
    };

    double t = grid.t0_ns;
    std::size_t cursor = 0;
    if (is_sample_time(t, samples, cursor)) record_sample(t);
    for (double t_stop : stops) {
        if (t_stop <= t) continue;
        solver.advance(t, y, t_stop);
        if (is_sample_time(t, samples, cursor)) record_sample(t);
    }
    traj.stats.accepted = solver.stats().accepted;
    traj.stats.rejected = solver.stats().rejected;
    traj.stats.rhs_evals = solver.stats().rhs_evals;
    traj.stats.min_step_ns = solver.stats().min_step_ns;
    traj.stats.max_step_ns = solver.stats().max_step_ns;
    return traj;
}

namespace {

std::vector<double> box_smooth(const std::vector<double>& s, int window) {
    if (window <= 1) return s;
    const int half = window / 2;
    std::vector<double> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        const long lo = std::max<long>(0, static_cast<long>(i) - half);
        const long hi = std::min<long>(static_cast<long>(s.size()) - 1, static_cast<long>(i) + half);
        double acc = 0.0;
        for (long j = lo; j <= hi; ++j) acc += s[j];
        out[i] = acc / static_cast<double>(hi - lo + 1);
    }
    return out;
}

}  // namespace

double swap_time(const Trajectory& traj, const std::string& observable, const SwapTimeOptions& options) {
    const auto& raw = traj.series_for(observable);
    if (raw.size() != traj.times_ns.size() || raw.size() < 3) {
        throw std::invalid_argument("trajectory too short for a swap-time estimate");
    }
    const auto s = box_smooth(raw, options.smooth_window);

    // Ripple guard: a maximum must rise above the running minimum by a small
    // fraction of the full series range before it counts.
    const auto [it_min, it_max] = std::minmax_element(s.begin(), s.end());
    const double prominence = std::max(options.min_prominence, 0.02 * (*it_max - *it_min));

    std::size_t peak = 0;
    double run_min = s[0];
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        run_min = std::min(run_min, s[i - 1]);
        if (s[i] > s[i - 1] && s[i] >= s[i + 1] && s[i] - run_min > prominence) {
            peak = i;
            break;
        }
    }
    if (peak == 0) {
        throw NoSwapError("observable '" + observable + "' has no interior maximum (no swap)");
    }

    if (options.refine_fraction > 0.0) {
        // Least-squares parabola over the contiguous cap of the peak; averages
        // out the fast dispersive ripple riding on the swap envelope.
        const double cut = s[peak] - options.refine_fraction * std::abs(s[peak]);
        std::size_t lo = peak, hi = peak;
        while (lo > 0 && s[lo - 1] >= cut) --lo;
        while (hi + 1 < s.size() && s[hi + 1] >= cut) ++hi;
        if (hi - lo >= 4) {
            const double t0 = traj.times_ns[peak];
            double sxx = 0, sxxx = 0, sxxxx = 0, sx = 0, s1 = 0, sy = 0, sxy = 0, sxxy = 0;
            for (std::size_t i = lo; i <= hi; ++i) {
                const double x = traj.times_ns[i] - t0;
                const double yv = s[i];
                const double x2 = x * x;
                s1 += 1.0;
                sx += x;
                sxx += x2;
                sxxx += x2 * x;
                sxxxx += x2 * x2;
                sy += yv;
                sxy += x * yv;
                sxxy += x2 * yv;
            }
            Eigen::Matrix3d m;
            m << sxxxx, sxxx, sxx, sxxx, sxx, sx, sxx, sx, s1;
            const Eigen::Vector3d rhs(sxxy, sxy, sy);
            const Eigen::Vector3d coef = m.fullPivLu().solve(rhs);
            if (coef(0) < 0.0) {
                return t0 - coef(1) / (2.0 * coef(0));
            }
        }
    }

    // Three-point quadratic interpolation around the discrete maximum.
    const double tm = traj.times_ns[peak];
    const double dt_l = traj.times_ns[peak] - traj.times_ns[peak - 1];
    const double dt_r = traj.times_ns[peak + 1] - traj.times_ns[peak];
    const double y0 = s[peak - 1], y1 = s[peak], y2 = s[peak + 1];
    const double denom = (y0 - 2.0 * y1 + y2);
    if (denom >= 0.0 || std::abs(dt_l - dt_r) > 1e-9 * std::max(dt_l, dt_r)) {
        return tm;
    }
    return tm + 0.5 * dt_l * (y0 - y2) / denom;
}

double max_excitation(const Trajectory& traj, const std::string& observable) {
    const auto& s = traj.series_for(observable);
    if (s.empty()) throw std::invalid_argument("empty trajectory");
    return *std::max_element(s.begin(), s.end());
}

std::vector<SweepPoint> run_sweep(const std::vector<double>& values,
                                  const std::function<double(double)>& metric, int threads) {
    std::vector<SweepPoint> out(values.size());
    if (values.empty()) return out;
    threads = std::max(1, std::min<int>(threads, static_cast<int>(values.size())));

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= values.size()) return;
            out[i].parameter = values[i];
            try {
                out[i].metric = metric(values[i]);
                out[i].ok = true;
            } catch (const std::exception& e) {
                out[i].ok = false;
                out[i].error = e.what();
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return out;
}

std::vector<double> linspace(double lo, double hi, int n) {
    if (n <= 0) return {};
    if (n == 1) return {lo};
    std::vector<double> v(n);
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (int i = 0; i < n; ++i) v[i] = lo + step * i;
    v.back() = hi;
    return v;
}

}  // namespace rcqed
