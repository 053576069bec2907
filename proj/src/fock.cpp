#include "macrosim/fock.hpp"

#include <cmath>
#include <numeric>

namespace macrosim {

namespace {

Eigen::Index dims_product(const std::vector<int>& dims) {
    Eigen::Index p = 1;
    for (int d : dims) {
        if (d < 2) throw std::invalid_argument("mode dimension must be >= 2");
        p *= d;
    }
    return p;
}

}  // namespace

FockState::FockState(Vec amps, std::vector<int> mode_dims, NormKind kind,
                     double unit_tol)
    : amps_(std::move(amps)), dims_(std::move(mode_dims)), kind_(kind) {
    if (dims_.empty()) throw std::invalid_argument("FockState: no modes");
    if (amps_.size() != dims_product(dims_))
        throw std::invalid_argument("FockState: amplitude length != product of mode dims");
    if (kind_ == NormKind::unit) {
        double n2 = amps_.squaredNorm();
        if (std::abs(n2 - 1.0) > unit_tol)
            throw std::invalid_argument("FockState: unit norm violated by " +
                                        std::to_string(std::abs(n2 - 1.0)));
    }
}

FockState FockState::normalized() const {
    double n = amps_.norm();
    if (n == 0.0) throw std::runtime_error("FockState::normalized: zero norm");
    return FockState(amps_ / n, dims_, NormKind::unit);
}

FockOperator::FockOperator(Mat m, std::vector<int> mode_dims)
    : m_(std::move(m)), dims_(std::move(mode_dims)) {
    if (m_.rows() != m_.cols())
        throw std::invalid_argument("FockOperator: matrix not square");
    if (m_.rows() != dims_product(dims_))
        throw std::invalid_argument("FockOperator: dimension != product of mode dims");
}

std::pair<FockOperator, FockOperator> ladder(Cutoff cutoff) {
    const int n = cutoff.n_max;
    Mat a = Mat::Zero(n, n);
    for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(double(k));
    Mat ad = a.adjoint();
    return {FockOperator(std::move(a), {n}), FockOperator(std::move(ad), {n})};
}

std::pair<FockOperator, FockOperator> quadratures(Cutoff cutoff) {
    auto [a, ad] = ladder(cutoff);
    const double s = 1.0 / std::sqrt(2.0);
    Mat q = s * (a.mat() + ad.mat());
    Mat p = Cx(0, -1) * s * (a.mat() - ad.mat());
    return {FockOperator(std::move(q), {cutoff.n_max}),
            FockOperator(std::move(p), {cutoff.n_max})};
}

FockOperator number_op(Cutoff cutoff) {
    Mat n = Mat::Zero(cutoff.n_max, cutoff.n_max);
    for (int k = 0; k < cutoff.n_max; ++k) n(k, k) = double(k);
    return FockOperator(std::move(n), {cutoff.n_max});
}

FockOperator identity_op(Cutoff cutoff) {
    return FockOperator(Mat::Identity(cutoff.n_max, cutoff.n_max), {cutoff.n_max});
}

FockState tensor(const FockState& a, const FockState& b) {
    Vec out(a.dim() * b.dim());
    for (Eigen::Index i = 0; i < a.dim(); ++i)
        out.segment(i * b.dim(), b.dim()) = a.amps()(i) * b.amps();
    std::vector<int> dims = a.mode_dims();
    dims.insert(dims.end(), b.mode_dims().begin(), b.mode_dims().end());
    NormKind kind = (a.norm_kind() == NormKind::unit && b.norm_kind() == NormKind::unit)
                        ? NormKind::unit
                        : NormKind::density;
    return FockState(std::move(out), std::move(dims), kind);
}

FockOperator tensor(const FockOperator& a, const FockOperator& b) {
    const Eigen::Index da = a.dim(), db = b.dim();
    Mat out(da * db, da * db);
    for (Eigen::Index i = 0; i < da; ++i)
        for (Eigen::Index j = 0; j < da; ++j)
            out.block(i * db, j * db, db, db) = a.mat()(i, j) * b.mat();
    std::vector<int> dims = a.mode_dims();
    dims.insert(dims.end(), b.mode_dims().begin(), b.mode_dims().end());
    return FockOperator(std::move(out), std::move(dims));
}

FockState apply_two_mode(const FockOperator& op, const FockState& state,
                         int mode_i, int mode_j) {
    const auto& dims = state.mode_dims();
    const int k = state.n_modes();
    if (mode_i == mode_j || mode_i < 0 || mode_j < 0 || mode_i >= k || mode_j >= k)
        throw std::invalid_argument("apply_two_mode: bad mode indices");
    if (op.n_modes() != 2 || op.mode_dims()[0] != dims[mode_i] ||
        op.mode_dims()[1] != dims[mode_j])
        throw std::invalid_argument("apply_two_mode: dimension mismatch");

    // Row-major strides: index = sum_m n_m * stride_m.
    std::vector<Eigen::Index> stride(k);
    Eigen::Index s = 1;
    for (int m = k - 1; m >= 0; --m) {
        stride[m] = s;
        s *= dims[m];
    }
    const int di = dims[mode_i], dj = dims[mode_j];
    const Eigen::Index si = stride[mode_i], sj = stride[mode_j];

    // Enumerate the rest-index offsets (all modes other than i, j).
    std::vector<Eigen::Index> rest_offsets{0};
    for (int m = 0; m < k; ++m) {
        if (m == mode_i || m == mode_j) continue;
        std::vector<Eigen::Index> next;
        next.reserve(rest_offsets.size() * dims[m]);
        for (Eigen::Index base : rest_offsets)
            for (int n = 0; n < dims[m]; ++n) next.push_back(base + n * stride[m]);
        rest_offsets = std::move(next);
    }

    Vec out = Vec::Zero(state.dim());
    Vec x(di * dj), y(di * dj);
    for (Eigen::Index base : rest_offsets) {
        for (int ni = 0; ni < di; ++ni)
            for (int nj = 0; nj < dj; ++nj)
                x(ni * dj + nj) = state.amps()(base + ni * si + nj * sj);
        y.noalias() = op.mat() * x;
        for (int ni = 0; ni < di; ++ni)
            for (int nj = 0; nj < dj; ++nj)
                out(base + ni * si + nj * sj) = y(ni * dj + nj);
    }
    return FockState(std::move(out), dims, NormKind::density);
}

FockState apply_one_mode(const Mat& op, const FockState& state, int mode_i) {
    const auto& dims = state.mode_dims();
    const int k = state.n_modes();
    if (mode_i < 0 || mode_i >= k) throw std::invalid_argument("apply_one_mode: bad mode");
    if (op.rows() != dims[mode_i]) throw std::invalid_argument("apply_one_mode: dim mismatch");
    std::vector<Eigen::Index> stride(k);
    Eigen::Index s = 1;
    for (int m = k - 1; m >= 0; --m) {
        stride[m] = s;
        s *= dims[m];
    }
    const int di = dims[mode_i];
    const Eigen::Index si = stride[mode_i];
    std::vector<Eigen::Index> rest_offsets{0};
    for (int m = 0; m < k; ++m) {
        if (m == mode_i) continue;
        std::vector<Eigen::Index> next;
        next.reserve(rest_offsets.size() * dims[m]);
        for (Eigen::Index base : rest_offsets)
            for (int n = 0; n < dims[m]; ++n) next.push_back(base + n * stride[m]);
        rest_offsets = std::move(next);
    }
    Vec out(state.dim());
    Vec x(di);
    for (Eigen::Index base : rest_offsets) {
        for (int ni = 0; ni < di; ++ni) x(ni) = state.amps()(base + ni * si);
        Vec y = op * x;
        for (int ni = 0; ni < di; ++ni) out(base + ni * si) = y(ni);
    }
    return FockState(std::move(out), dims, NormKind::density);
}

Cx overlap(const FockState& a, const FockState& b) {
    if (a.mode_dims() != b.mode_dims())
        throw std::invalid_argument("overlap: mode dims mismatch");
    return a.amps().dot(b.amps());   // Eigen dot conjugates the left factor
}

double fidelity_up_to_phase(const FockState& a, const FockState& b) {
    const double na = a.amps().squaredNorm(), nb = b.amps().squaredNorm();
    if (na == 0.0 || nb == 0.0)
        throw std::invalid_argument("fidelity_up_to_phase: zero-norm input");
    const Cx ov = overlap(a, b);
    return std::norm(ov) / (na * nb);
}

namespace {

double masked_phase_distance(const Mat& a, const Mat& b) {
    Cx z = (b.adjoint() * a).trace();
    Cx phase = (std::abs(z) > 0) ? z / std::abs(z) : Cx(1, 0);
    double nb = b.norm();
    if (nb == 0.0) throw std::invalid_argument("operator distance: zero reference");
    return (a - phase * b).norm() / nb;
}

}  // namespace

double op_distance_box(const FockOperator& a, const FockOperator& b, int interior) {
    if (a.mode_dims() != b.mode_dims())
        throw std::invalid_argument("op distance: mode dims mismatch");
    // Per-mode box: gather indices with every mode label < interior.
    const auto& dims = a.mode_dims();
    std::vector<Eigen::Index> sel{0};
    Eigen::Index stride_acc = 1;
    std::vector<Eigen::Index> strides(dims.size());
    for (int m = int(dims.size()) - 1; m >= 0; --m) {
        strides[m] = stride_acc;
        stride_acc *= dims[m];
    }
    for (size_t m = 0; m < dims.size(); ++m) {
        int lim = std::min(interior, dims[m]);
        std::vector<Eigen::Index> next;
        next.reserve(sel.size() * lim);
        for (Eigen::Index base : sel)
            for (int n = 0; n < lim; ++n) next.push_back(base + n * strides[m]);
        sel = std::move(next);
    }
    Mat as(sel.size(), sel.size()), bs(sel.size(), sel.size());
    for (size_t r = 0; r < sel.size(); ++r)
        for (size_t c = 0; c < sel.size(); ++c) {
            as(r, c) = a.mat()(sel[r], sel[c]);
            bs(r, c) = b.mat()(sel[r], sel[c]);
        }
    return masked_phase_distance(as, bs);
}

double operator_distance_up_to_phase(const FockOperator& a, const FockOperator& b,
                                     Cutoff interior) {
    return op_distance_box(a, b, interior.n_max);
}

double op_distance_total_photon(const FockOperator& a, const FockOperator& b,
                                int total_max) {
    if (a.mode_dims() != b.mode_dims() || a.n_modes() != 2)
        throw std::invalid_argument("op_distance_total_photon: need matching 2-mode ops");
    const int d0 = a.mode_dims()[0], d1 = a.mode_dims()[1];
    std::vector<Eigen::Index> sel;
    for (int i = 0; i < d0; ++i)
        for (int j = 0; j < d1; ++j)
            if (i + j <= total_max) sel.push_back(Eigen::Index(i) * d1 + j);
    Mat as(sel.size(), sel.size()), bs(sel.size(), sel.size());
    for (size_t r = 0; r < sel.size(); ++r)
        for (size_t c = 0; c < sel.size(); ++c) {
            as(r, c) = a.mat()(sel[r], sel[c]);
            bs(r, c) = b.mat()(sel[r], sel[c]);
        }
    return masked_phase_distance(as, bs);
}

double state_distance_up_to_phase(const FockState& a, const FockState& b) {
    Vec x = a.amps() / a.amps().norm();
    Vec y = b.amps() / b.amps().norm();
    Cx z = y.dot(x);
    Cx phase = (std::abs(z) > 0) ? z / std::abs(z) : Cx(1, 0);
    return (x - phase * y).norm();
}

double state_distance_windowed(const FockState& a, const FockState& b,
                               int total_max) {
    if (a.mode_dims() != b.mode_dims())
        throw std::invalid_argument("state_distance_windowed: dims mismatch");
    const auto& dims = a.mode_dims();
    std::vector<Eigen::Index> strides(dims.size());
    Eigen::Index s = 1;
    for (int m = int(dims.size()) - 1; m >= 0; --m) {
        strides[m] = s;
        s *= dims[m];
    }
    Vec xa = Vec::Zero(a.dim()), xb = Vec::Zero(a.dim());
    for (Eigen::Index idx = 0; idx < a.dim(); ++idx) {
        Eigen::Index rem = idx;
        int total = 0;
        for (size_t m = 0; m < dims.size(); ++m) {
            total += int(rem / strides[m]);
            rem %= strides[m];
        }
        if (total <= total_max) {
            xa(idx) = a.amps()(idx);
            xb(idx) = b.amps()(idx);
        }
    }
    double na = xa.norm(), nb = xb.norm();
    if (na == 0.0 || nb == 0.0)
        throw std::runtime_error("state_distance_windowed: window holds no amplitude");
    xa /= na;
    xb /= nb;
    Cx z = xb.dot(xa);
    Cx phase = (std::abs(z) > 0) ? z / std::abs(z) : Cx(1, 0);
    return (xa - phase * xb).norm();
}

ConvergedValue converge_in_cutoff(const std::function<double(Cutoff)>& builder,
                                  const std::vector<int>& schedule, double tol) {
    if (schedule.size() < 2)
        throw std::invalid_argument("converge_in_cutoff: schedule needs >= 2 entries");
    for (size_t i = 1; i < schedule.size(); ++i)
        if (schedule[i] <= schedule[i - 1])
            throw std::invalid_argument("converge_in_cutoff: schedule not strictly increasing");
    double prev = builder(Cutoff(schedule[0]));
    for (size_t i = 1; i < schedule.size(); ++i) {
        double cur = builder(Cutoff(schedule[i]));
        if (std::abs(cur - prev) < tol) return {cur, schedule[i]};
        prev = cur;
    }
    throw std::runtime_error("converge_in_cutoff: not converged within schedule "
                             "(cutoff too small for requested damping/squeezing)");
}

}  // namespace macrosim
