#include "macrosim/operators.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace macrosim {

namespace {

constexpr Cx kI{0.0, 1.0};

Mat hermitian_exp(const Mat& h, Cx scale) {
    // exp(scale * h) for Hermitian h via eigendecomposition.
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    Vec phases = (scale * es.eigenvalues().cast<Cx>().array()).exp();
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Cx ipow(int n) {
    switch (((n % 4) + 4) % 4) {
        case 0: return {1, 0};
        case 1: return {0, 1};
        case 2: return {-1, 0};
        default: return {0, -1};
    }
}

}  // namespace

double SymplecticMatrix::form_residual() const {
    const Eigen::Index two_k = entries.rows();
    const Eigen::Index k = two_k / 2;
    RMat omega = RMat::Zero(two_k, two_k);
    omega.topRightCorner(k, k) = RMat::Identity(k, k);
    omega.bottomLeftCorner(k, k) = -RMat::Identity(k, k);
    return (entries.transpose() * omega * entries - omega).norm();
}

void SymplecticMatrix::validate(double tol) const {
    if (entries.rows() != entries.cols() || entries.rows() % 2 != 0)
        throw std::invalid_argument("SymplecticMatrix: needs even square matrix");
    if (form_residual() > tol)
        throw std::invalid_argument("SymplecticMatrix: symplectic form violated");
}

// ---------------------------------------------------------------------------
// QuadratureEigen

QuadratureEigen::QuadratureEigen(int n_max) {
    RMat q = RMat::Zero(n_max, n_max);
    for (int k = 1; k < n_max; ++k) {
        const double v = std::sqrt(k / 2.0);
        q(k - 1, k) = v;
        q(k, k - 1) = v;
    }
    Eigen::SelfAdjointEigenSolver<RMat> es(q);
    lambda_ = es.eigenvalues();
    uq_ = es.eigenvectors().cast<Cx>();
    // p = F q F^dag with F = diag(i^n), so Up = F Uq.
    up_ = uq_;
    for (int n = 0; n < n_max; ++n) up_.row(n) *= ipow(n);
}

const QuadratureEigen& QuadratureEigen::get(int n_max) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<QuadratureEigen>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[n_max];
    if (!slot) slot.reset(new QuadratureEigen(n_max));
    return *slot;
}

Vec QuadratureEigen::apply_z(double t, const Vec& v) const {
    Vec w = uq_.adjoint() * v;
    w.array() *= (kI * t * lambda_.cast<Cx>().array()).exp();
    return uq_ * w;
}

Vec QuadratureEigen::apply_x(double s, const Vec& v) const {
    Vec w = up_.adjoint() * v;
    w.array() *= (-kI * s * lambda_.cast<Cx>().array()).exp();
    return up_ * w;
}

Vec QuadratureEigen::apply_displacement(Cx alpha, const Vec& v) const {
    const double ar = alpha.real(), ai = alpha.imag();
    Vec w = apply_z(std::sqrt(2.0) * ai, v);
    w = apply_x(std::sqrt(2.0) * ar, w);
    return std::exp(kI * ar * ai) * w;
}

// ---------------------------------------------------------------------------
// Single-mode gates

FockOperator displacement(Cx alpha, Cutoff cutoff) {
    const int n = cutoff.n_max;
    if (std::norm(alpha) > 0.8 * n)
        throw std::runtime_error("displacement: |alpha|^2 too large for cutoff");
    auto [q, p] = quadratures(cutoff);
    Mat h = std::sqrt(2.0) * (alpha.imag() * q.mat() - alpha.real() * p.mat());
    return FockOperator(hermitian_exp(h, kI), {n});
}

FockOperator phase_delay(double theta, Cutoff cutoff) {
    Mat r = Mat::Zero(cutoff.n_max, cutoff.n_max);
    for (int k = 0; k < cutoff.n_max; ++k) r(k, k) = std::exp(kI * (theta * k));
    return FockOperator(std::move(r), {cutoff.n_max});
}

FockOperator squeeze(SqueezeParam zeta, Cutoff cutoff) {
    const double z = zeta.zeta;
    const double r = std::log(std::abs(z));
    if (std::abs(r) > 0.4 * std::log(double(cutoff.n_max)) + 2.0)
        throw std::runtime_error("squeeze: |ln zeta| too large for cutoff");
    auto [q, p] = quadratures(cutoff);
    Mat h = q.mat() * p.mat() + p.mat() * q.mat();
    Mat s = hermitian_exp(h, Cx(0, -0.5 * r));
    if (z < 0) s = phase_delay(M_PI, cutoff).mat() * s;
    return FockOperator(std::move(s), {cutoff.n_max});
}

FockOperator shear_q(double sigma, Cutoff cutoff) {
    const auto& qe = QuadratureEigen::get(cutoff.n_max);
    Vec phases = (kI * 0.5 * sigma * qe.lambda().array().square().cast<Cx>()).exp();
    Mat m = qe.uq() * phases.asDiagonal() * qe.uq().adjoint();
    return FockOperator(std::move(m), {cutoff.n_max});
}

FockOperator shear_p(double sigma, Cutoff cutoff) {
    const auto& qe = QuadratureEigen::get(cutoff.n_max);
    Vec phases = (-kI * 0.5 * sigma * qe.lambda().array().square().cast<Cx>()).exp();
    Mat m = qe.up() * phases.asDiagonal() * qe.up().adjoint();
    return FockOperator(std::move(m), {cutoff.n_max});
}

FockOperator damping(double beta, Cutoff cutoff) {
    if (beta < 0) throw std::invalid_argument("damping: beta must be >= 0");
    Mat m = Mat::Zero(cutoff.n_max, cutoff.n_max);
    for (int k = 0; k < cutoff.n_max; ++k) m(k, k) = std::exp(-beta * k);
    return FockOperator(std::move(m), {cutoff.n_max});
}

RVec damping_diag(double beta, int n_max) {
    RVec d(n_max);
    for (int k = 0; k < n_max; ++k) d(k) = std::exp(-beta * k);
    return d;
}

// ---------------------------------------------------------------------------
// Beamsplitter

BeamsplitterKernel::BeamsplitterKernel(int n_max) : n_(n_max) {
    sectors_.resize(2 * n_max - 1);
    for (int s = 0; s < 2 * n_max - 1; ++s) {
        const int lo = sector_lo(s, n_max), hi = sector_hi(s, n_max);
        const int d = hi - lo + 1;
        // Real symmetric tridiagonal similar to i * generator, obtained by
        // conjugating with diag(i^pos).
        RMat h = RMat::Zero(d, d);
        for (int pos = 1; pos < d; ++pos) {
            const int k = lo + pos;
            const double t = std::sqrt(double(k) * double(s - k + 1));
            h(pos - 1, pos) = t;
            h(pos, pos - 1) = t;
        }
        Eigen::SelfAdjointEigenSolver<RMat> es(h);
        Mat phases = Mat::Zero(d, d);
        for (int m = 0; m < d; ++m)
            phases(m, m) = std::exp(-kI * (M_PI / 4.0) * es.eigenvalues()(m));
        Mat core = es.eigenvectors().cast<Cx>() * phases *
                   es.eigenvectors().transpose().cast<Cx>();
        Mat b(d, d);
        for (int a = 0; a < d; ++a)
            for (int c = 0; c < d; ++c) b(a, c) = ipow(c - a) * core(a, c);
        sectors_[s] = b.real();
    }
}

const BeamsplitterKernel& BeamsplitterKernel::get(int n_max) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<BeamsplitterKernel>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[n_max];
    if (!slot) slot.reset(new BeamsplitterKernel(n_max));
    return *slot;
}

FockState BeamsplitterKernel::apply(const FockState& state, int mode_i,
                                    int mode_j) const {
    const auto& dims = state.mode_dims();
    const int k = state.n_modes();
    if (mode_i == mode_j || mode_i < 0 || mode_j < 0 || mode_i >= k || mode_j >= k)
        throw std::invalid_argument("BeamsplitterKernel::apply: bad modes");
    if (dims[mode_i] != n_ || dims[mode_j] != n_)
        throw std::invalid_argument("BeamsplitterKernel::apply: dimension mismatch");

    std::vector<Eigen::Index> stride(k);
    Eigen::Index s_acc = 1;
    for (int m = k - 1; m >= 0; --m) {
        stride[m] = s_acc;
        s_acc *= dims[m];
    }
    const Eigen::Index si = stride[mode_i], sj = stride[mode_j];
    std::vector<Eigen::Index> rest_offsets{0};
    for (int m = 0; m < k; ++m) {
        if (m == mode_i || m == mode_j) continue;
        std::vector<Eigen::Index> next;
        next.reserve(rest_offsets.size() * dims[m]);
        for (Eigen::Index base : rest_offsets)
            for (int nn = 0; nn < dims[m]; ++nn) next.push_back(base + nn * stride[m]);
        rest_offsets = std::move(next);
    }

    Vec out(state.dim());
    for (Eigen::Index base : rest_offsets) {
        for (int s = 0; s < 2 * n_ - 1; ++s) {
            const int lo = sector_lo(s, n_), hi = sector_hi(s, n_);
            const int d = hi - lo + 1;
            Vec x(d);
            for (int pos = 0; pos < d; ++pos) {
                const int ki = lo + pos;
                x(pos) = state.amps()(base + ki * si + Eigen::Index(s - ki) * sj);
            }
            Vec y = sectors_[s] * x;
            for (int pos = 0; pos < d; ++pos) {
                const int ki = lo + pos;
                out(base + ki * si + Eigen::Index(s - ki) * sj) = y(pos);
            }
        }
    }
    return FockState(std::move(out), dims, state.norm_kind(), 1e-6);
}

Vec BeamsplitterKernel::apply2(const Vec& state) const {
    FockState st(state, {n_, n_}, NormKind::density);
    return apply(st, 0, 1).amps();
}

FockOperator beamsplitter(Cutoff cutoff) {
    const int n = cutoff.n_max;
    const auto& kern = BeamsplitterKernel::get(n);
    Mat b = Mat::Zero(Eigen::Index(n) * n, Eigen::Index(n) * n);
    for (int s = 0; s < 2 * n - 1; ++s) {
        const int lo = BeamsplitterKernel::sector_lo(s, n);
        const int hi = BeamsplitterKernel::sector_hi(s, n);
        for (int pr = 0; pr <= hi - lo; ++pr)
            for (int pc = 0; pc <= hi - lo; ++pc) {
                const int kr = lo + pr, kc = lo + pc;
                b(Eigen::Index(kr) * n + (s - kr), Eigen::Index(kc) * n + (s - kc)) =
                    kern.sector(s)(pr, pc);
            }
    }
    return FockOperator(std::move(b), {n, n});
}

// ---------------------------------------------------------------------------
// Quadratic two-mode gates exp(coeff X (x) Y)

namespace {

const Mat& quad_basis(const QuadratureEigen& qe, Quad which) {
    return which == Quad::q ? qe.uq() : qe.up();
}

}  // namespace

FockState apply_quadratic_gate(const FockState& state, Cx coeff, Quad x, int mode_i,
                               Quad y, int mode_j) {
    if (state.n_modes() != 2 || mode_i != 0 || mode_j != 1)
        throw std::invalid_argument("apply_quadratic_gate: two-mode states, modes (0,1)");
    const int n0 = state.mode_dims()[0], n1 = state.mode_dims()[1];
    const auto& qe0 = QuadratureEigen::get(n0);
    const auto& qe1 = QuadratureEigen::get(n1);
    const Mat& u0 = quad_basis(qe0, x);
    const Mat& u1 = quad_basis(qe1, y);
    // Row-major state: amps[(i * n1) + j]; map as row-major matrix.
    Eigen::Map<const Eigen::Matrix<Cx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        tm(state.amps().data(), n0, n1);
    Mat w = u0.adjoint() * tm.eval() * u1.conjugate();
    for (int a = 0; a < n0; ++a)
        for (int b = 0; b < n1; ++b)
            w(a, b) *= std::exp(coeff * qe0.lambda()(a) * qe1.lambda()(b));
    Mat res = u0 * w * u1.transpose();
    Vec out(Eigen::Index(n0) * n1);
    for (int a = 0; a < n0; ++a)
        for (int b = 0; b < n1; ++b) out(Eigen::Index(a) * n1 + b) = res(a, b);
    return FockState(std::move(out), state.mode_dims(), state.norm_kind(), 1e-6);
}

namespace {

Mat quadratic_gate_dense(Cx coeff, Quad x, Quad y, int n) {
    const auto& qe = QuadratureEigen::get(n);
    const Mat& u0 = quad_basis(qe, x);
    const Mat& u1 = quad_basis(qe, y);
    Mat phases(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            phases(a, b) = std::exp(coeff * qe.lambda()(a) * qe.lambda()(b));
    // Column (k, l) of the gate: u0 (phases o (u0row_k u1row_l^T)) u1^T.
    Mat out(Eigen::Index(n) * n, Eigen::Index(n) * n);
    Mat u0h = u0.adjoint(), u1h = u1.adjoint();
    for (int kcol = 0; kcol < n; ++kcol) {
        for (int lcol = 0; lcol < n; ++lcol) {
            Mat block = (u0h.col(kcol) * u1h.col(lcol).transpose()).cwiseProduct(phases);
            Mat colmat = u0 * block * u1.transpose();
            for (int a = 0; a < n; ++a)
                out.block(Eigen::Index(a) * n, Eigen::Index(kcol) * n + lcol, n, 1) =
                    colmat.row(a).transpose();
        }
    }
    return out;
}

}  // namespace

FockOperator controlled_x(double g, Cutoff cutoff) {
    return FockOperator(quadratic_gate_dense(-kI * g, Quad::q, Quad::p, cutoff.n_max),
                        {cutoff.n_max, cutoff.n_max});
}

// ---------------------------------------------------------------------------
// V gate and symplectic helpers

FockOperator v_gate(double theta_a, double theta_b, Cutoff cutoff) {
    if (std::abs(std::sin(theta_a - theta_b)) < 1e-12)
        throw std::invalid_argument("v_gate: degenerate angle pair");
    const double tp = 0.5 * (theta_a + theta_b);
    const double tm = 0.5 * (theta_a - theta_b);
    Mat m = phase_delay(tp - M_PI / 2, cutoff).mat() *
            squeeze(SqueezeParam(std::tan(tm)), cutoff).mat() *
            phase_delay(tp, cutoff).mat();
    return FockOperator(std::move(m), {cutoff.n_max});
}

SymplecticMatrix symplectic_rotation(double theta) {
    RMat m(2, 2);
    m << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return {m};
}

SymplecticMatrix symplectic_squeeze(double zeta) {
    RMat m = RMat::Zero(2, 2);
    m(0, 0) = zeta;
    m(1, 1) = 1.0 / zeta;
    return {m};
}

SymplecticMatrix symplectic_v_gate(double theta_a, double theta_b) {
    const double tp = 0.5 * (theta_a + theta_b);
    const double tm = 0.5 * (theta_a - theta_b);
    RMat m = symplectic_rotation(tp - M_PI / 2).entries *
             symplectic_squeeze(std::tan(tm)).entries *
             symplectic_rotation(tp).entries;
    return {m};
}

SymplecticMatrix symplectic_beamsplitter() {
    RMat m = RMat::Zero(4, 4);
    const double s = 1.0 / std::sqrt(2.0);
    // (q1, q2, p1, p2) -> (q-, q+, p-, p+)
    m(0, 0) = s;  m(0, 1) = -s;
    m(1, 0) = s;  m(1, 1) = s;
    m(2, 2) = s;  m(2, 3) = -s;
    m(3, 2) = s;  m(3, 3) = s;
    return {m};
}

std::array<RMat, 3> beamsplitter_symplectic_factors() {
    RMat lower = RMat::Identity(4, 4);
    lower(1, 0) = 1.0;
    lower(2, 3) = -1.0;
    RMat diag = RMat::Zero(4, 4);
    const double r2 = std::sqrt(2.0);
    diag(0, 0) = 1.0 / r2;
    diag(1, 1) = r2;
    diag(2, 2) = r2;
    diag(3, 3) = 1.0 / r2;
    RMat upper = RMat::Identity(4, 4);
    upper(0, 1) = -1.0;
    upper(3, 2) = 1.0;
    return {lower, diag, upper};
}

std::array<RMat, 3> rotation_ldu_factors(double theta) {
    RMat l = RMat::Identity(2, 2);
    l(1, 0) = std::tan(theta);
    RMat d = RMat::Zero(2, 2);
    d(0, 0) = std::cos(theta);
    d(1, 1) = 1.0 / std::cos(theta);
    RMat u = RMat::Identity(2, 2);
    u(0, 1) = -std::tan(theta);
    return {l, d, u};
}

BsDecomposition bs_decomposition(Cutoff cutoff, int interior_total) {
    const int n = cutoff.n_max;
    if (interior_total < 0) interior_total = (3 * n) / 10;
    Mat cx1 = quadratic_gate_dense(-kI, Quad::q, Quad::p, n);   // e^{-i q1 p2}
    Mat cx2 = quadratic_gate_dense(kI, Quad::p, Quad::q, n);    // e^{+i p1 q2}
    Mat sd = squeeze(SqueezeParam(std::sqrt(2.0)), cutoff).mat();
    FockOperator sq_pair = tensor(FockOperator(sd.adjoint(), {n}), FockOperator(sd, {n}));
    Mat full = cx1 * sq_pair.mat() * cx2;
    FockOperator decomp(std::move(full), {n, n});
    double res = op_distance_total_photon(decomp, beamsplitter(cutoff), interior_total);
    return {std::move(decomp), res};
}

double heisenberg_residual(const FockOperator& u, const SymplecticMatrix& m,
                           int interior) {
    Cutoff c(int(u.dim()));
    auto [q, p] = quadratures(c);
    Mat uh = u.mat().adjoint();
    Mat lq = uh * q.mat() * u.mat() - (m.entries(0, 0) * q.mat() + m.entries(0, 1) * p.mat());
    Mat lp = uh * p.mat() * u.mat() - (m.entries(1, 0) * q.mat() + m.entries(1, 1) * p.mat());
    double r = 0;
    for (int i = 0; i < interior; ++i)
        for (int j = 0; j < interior; ++j)
            r = std::max({r, std::abs(lq(i, j)), std::abs(lp(i, j))});
    return r;
}

}  // namespace macrosim
