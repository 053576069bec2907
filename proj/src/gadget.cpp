#include "macrosim/gadget.hpp"

#include "macrosim/hermite.hpp"

#include <cmath>

namespace macrosim {

namespace {

constexpr Cx kI{0.0, 1.0};

Cx minus_i_pow(int n) {
    switch (((n % 4) + 4) % 4) {
        case 0: return {1, 0};
        case 1: return {0, -1};
        case 2: return {-1, 0};
        default: return {0, 1};
    }
}

// Real-matrix times complex matrix/vector without promoting the real factor.
Mat mul_rc(const RMat& r, const Mat& c) {
    Mat out(r.rows(), c.cols());
    out.real() = r * c.real();
    out.imag() = r * c.imag();
    return out;
}

Vec mul_rc(const RMat& r, const Vec& c) {
    Vec out(r.rows());
    out.real() = r * c.real();
    out.imag() = r * c.imag();
    return out;
}

Vec bra_components(double theta, double m, int n, double beta_meas) {
    RVec h = hermite_values(n, m);
    Vec out(n);
    for (int k = 0; k < n; ++k)
        out(k) = std::exp(kI * (theta * k)) * minus_i_pow(k) * h(k) *
                 std::exp(-beta_meas * k);
    return out;
}

}  // namespace

void GadgetConfig::validate() const {
    if (std::abs(std::sin(theta_a - theta_b)) < 1e-12)
        throw std::invalid_argument("GadgetConfig: sin(theta_a - theta_b) must not vanish");
    if (interior_fraction <= 0.0 || interior_fraction > 1.0)
        throw std::invalid_argument("GadgetConfig: interior_fraction in (0, 1]");
}

Cx mu(double theta_a, double theta_b, double m_a, double m_b) {
    const double s = std::sin(theta_a - theta_b);
    if (std::abs(s) < 1e-12) throw std::invalid_argument("mu: degenerate angles");
    return -(m_a * std::exp(kI * theta_b) + m_b * std::exp(kI * theta_a)) / s;
}

Cx mu_prime(double theta_a, double theta_b, double m_a, double m_b) {
    const double s = std::sin(theta_a - theta_b);
    if (std::abs(s) < 1e-12) throw std::invalid_argument("mu_prime: degenerate angles");
    return (-m_a * std::exp(-kI * theta_b) + m_b * std::exp(-kI * theta_a)) / s;
}

Cx mu_doubleprime(double theta_a, double theta_b, double m_a, double m_b) {
    const double s = std::sin(theta_a - theta_b);
    if (std::abs(s) < 1e-12) throw std::invalid_argument("mu_doubleprime: degenerate angles");
    return (-kI * m_a * std::exp(kI * theta_b) - kI * m_b * std::exp(kI * theta_a)) / s;
}

FockState homodyne_bra(double theta, double m, Cutoff cutoff) {
    return FockState(bra_components(theta, m, cutoff.n_max, 0.0), {cutoff.n_max},
                     NormKind::density);
}

FockState homodyne_bra_damped(double theta, double m, double beta_meas, Cutoff cutoff) {
    return FockState(bra_components(theta, m, cutoff.n_max, beta_meas), {cutoff.n_max},
                     NormKind::density);
}

namespace {

// Kraus state B_23 (psi (x) phi) as an [j, k] matrix (j = mode 2, k = mode 3).
Mat kraus_state_matrix(const Vec& psi, const Vec& phi, int n) {
    const auto& kern = BeamsplitterKernel::get(n);
    Vec prod(Eigen::Index(n) * n);
    for (int j = 0; j < n; ++j) prod.segment(Eigen::Index(j) * n, n) = psi(j) * phi;
    Vec mixed = kern.apply2(prod);
    Mat ks(n, n);
    for (int j = 0; j < n; ++j) ks.row(j) = mixed.segment(Eigen::Index(j) * n, n).transpose();
    return ks;
}

// Sector-contracted bra weights: w_s = B_s^T u_s with
// u_s[pos(i)] = braA(i) braB(s - i).
std::vector<Vec> bra_sector_weights(const Vec& bra_a, const Vec& bra_b, int n) {
    const auto& kern = BeamsplitterKernel::get(n);
    std::vector<Vec> w(2 * n - 1);
    for (int s = 0; s < 2 * n - 1; ++s) {
        const int lo = BeamsplitterKernel::sector_lo(s, n);
        const int hi = BeamsplitterKernel::sector_hi(s, n);
        const int d = hi - lo + 1;
        Vec u(d);
        for (int pos = 0; pos < d; ++pos) u(pos) = bra_a(lo + pos) * bra_b(s - lo - pos);
        w[s] = mul_rc(kern.sector(s).transpose(), u);
    }
    return w;
}

// K[m, n] = sum_s w_s[pos(n)] KS[s - n, m]
Mat assemble_kraus(const std::vector<Vec>& w, const Mat& ks, int n) {
    Mat k = Mat::Zero(n, n);
    for (int s = 0; s < 2 * n - 1; ++s) {
        const int lo = BeamsplitterKernel::sector_lo(s, n);
        const int hi = BeamsplitterKernel::sector_hi(s, n);
        for (int col = lo; col <= hi; ++col) {
            const int j2 = s - col;
            if (j2 < 0 || j2 >= n) continue;
            k.col(col) += w[s](col - lo) * ks.row(j2).transpose();
        }
    }
    return k;
}

}  // namespace

FockOperator kraus_direct(const GadgetConfig& config, const HomodyneOutcome& m,
                          double beta_meas) {
    config.validate();
    const int n = config.cutoff.n_max;
    DampedState psi = config.psi.damped_unit(config.cutoff);
    DampedState phi = config.phi.damped_unit(config.cutoff);
    Mat ks = kraus_state_matrix(psi.state.amps(), phi.state.amps(), n);
    Vec bra_a = bra_components(config.theta_a, m.m_a, n, beta_meas);
    Vec bra_b = bra_components(config.theta_b, m.m_b, n, beta_meas);
    auto w = bra_sector_weights(bra_a, bra_b, n);
    return FockOperator(assemble_kraus(w, ks, n), {n});
}

FockOperator teleported_gate_choi(const AncillaSpec& psi, const AncillaSpec& phi,
                                  Cutoff cutoff) {
    const int n = cutoff.n_max;
    Vec vp = psi.ideal_vector(cutoff);
    Vec vf = phi.ideal_vector(cutoff);
    const RVec dp = damping_diag(psi.effective_beta(), n);
    const RVec df = damping_diag(phi.effective_beta(), n);
    for (int k = 0; k < n; ++k) {
        vp(k) *= dp(k);
        vf(k) *= df(k);
    }
    const auto& kern = BeamsplitterKernel::get(n);
    Vec prod(Eigen::Index(n) * n);
    for (int j = 0; j < n; ++j) prod.segment(Eigen::Index(j) * n, n) = vp(j) * vf;
    Vec mixed = kern.apply2(prod);
    // A[r, c] = sqrt(pi) <c, r | B (psi (x) phi)>
    Mat a(n, n);
    const double sp = std::sqrt(M_PI);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) a(r, c) = sp * mixed(Eigen::Index(c) * n + r);
    return FockOperator(std::move(a), {n});
}

KrausResult kraus_analytic(const GadgetConfig& config, const HomodyneOutcome& m,
                           const FockState* input) {
    config.validate();
    const int n = config.cutoff.n_max;
    const double beta_psi = config.psi.effective_beta();
    const double beta_phi = config.phi.effective_beta();
    if (std::abs(beta_psi - beta_phi) > 1e-12)
        throw std::invalid_argument("kraus_analytic: equal ancilla damping required "
                                    "(the damping only commutes through the beamsplitter "
                                    "when shared)");
    // Teleported gate of the undamped ancillae (comb-site range taken from
    // the damped problem).
    FockOperator a_ideal(Mat::Zero(n, n), {n});
    {
        Vec vp = config.psi.ideal_vector(config.cutoff);
        Vec vf = config.phi.ideal_vector(config.cutoff);
        const auto& kern = BeamsplitterKernel::get(n);
        Vec prod(Eigen::Index(n) * n);
        for (int j = 0; j < n; ++j) prod.segment(Eigen::Index(j) * n, n) = vp(j) * vf;
        Vec mixed = kern.apply2(prod);
        Mat a(n, n);
        const double sp = std::sqrt(M_PI);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) a(r, c) = sp * mixed(Eigen::Index(c) * n + r);
        a_ideal = FockOperator(std::move(a), {n});
    }
    const double n_psi = config.psi.damped_unit(config.cutoff).norm_sq;
    const double n_phi = config.phi.damped_unit(config.cutoff).norm_sq;
    const double sinab = std::abs(std::sin(config.theta_a - config.theta_b));
    const double pref = 1.0 / (M_PI * std::sqrt(n_psi * n_phi * sinab));

    const Cx mu_v = mu(config.theta_a, config.theta_b, m.m_a, m.m_b);
    Mat dv = displacement(mu_v, config.cutoff).mat() *
             v_gate(config.theta_a, config.theta_b, config.cutoff).mat();
    RVec nb = damping_diag(beta_psi, n);
    Mat nan = a_ideal.mat();
    for (int r = 0; r < n; ++r) nan.row(r) *= nb(r);
    for (int c = 0; c < n; ++c) nan.col(c) *= nb(c);
    Mat k = pref * (nan * dv);

    KrausResult res{FockOperator(std::move(k), {n}),
                    mu_v,
                    mu_prime(config.theta_a, config.theta_b, m.m_a, m.m_b),
                    mu_doubleprime(config.theta_a, config.theta_b, m.m_a, m.m_b),
                    0.0};
    if (input) {
        if (input->dim() != n) throw std::invalid_argument("kraus_analytic: input dim");
        res.density = (res.op.mat() * input->amps()).squaredNorm();
    }
    return res;
}

FockOperator measurement_operator_extract(double theta_a, double theta_b,
                                          const HomodyneOutcome& m, Cutoff cutoff,
                                          double beta_meas) {
    const int n = cutoff.n_max;
    Vec bra_a = bra_components(theta_a, m.m_a, n, beta_meas);
    Vec bra_b = bra_components(theta_b, m.m_b, n, beta_meas);
    auto w = bra_sector_weights(bra_a, bra_b, n);
    // G[a, b] = X[b, a],  X[n1, n2] = w_{n1+n2}[pos(n1)].
    Mat g(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const int s = a + b;
            const int lo = BeamsplitterKernel::sector_lo(s, n);
            g(a, b) = w[s](b - lo);
        }
    return FockOperator(std::move(g), {n});
}

double measurement_identity_check(double theta_a, double theta_b,
                                  const HomodyneOutcome& m, Cutoff cutoff,
                                  double beta_meas, int interior) {
    const int n = cutoff.n_max;
    if (interior < 0) interior = n / 2;
    FockOperator extracted =
        measurement_operator_extract(theta_a, theta_b, m, cutoff, beta_meas);
    const double sinab = std::abs(std::sin(theta_a - theta_b));
    Mat ref = displacement(mu(theta_a, theta_b, m.m_a, m.m_b), cutoff).mat() *
              v_gate(theta_a, theta_b, cutoff).mat() / std::sqrt(M_PI * sinab);
    RVec nb = damping_diag(beta_meas, n);
    for (int r = 0; r < n; ++r) ref.row(r) *= nb(r);
    for (int c = 0; c < n; ++c) ref.col(c) *= nb(c);
    return op_distance_box(extracted, FockOperator(std::move(ref), {n}), interior);
}

double fit_rotated_squeeze_factor(const FockOperator& a, int interior) {
    const int n = int(a.dim());
    Cutoff c(n);
    auto [q, p] = quadratures(c);
    auto boxed = [&](const Mat& m) {
        Vec v(Eigen::Index(interior) * interior);
        for (int i = 0; i < interior; ++i)
            for (int j = 0; j < interior; ++j) v(Eigen::Index(i) * interior + j) = m(i, j);
        return v;
    };
    Vec aq = boxed(a.mat() * q.mat());
    Vec ap = boxed(a.mat() * p.mat());
    Vec qa = boxed(q.mat() * a.mat());
    Vec pa = boxed(p.mat() * a.mat());
    Mat basis(qa.size(), 2);
    basis.col(0) = qa;
    basis.col(1) = pa;
    Eigen::Matrix<Cx, 2, 1> wq = basis.colPivHouseholderQr().solve(aq);
    Eigen::Matrix<Cx, 2, 1> wp = basis.colPivHouseholderQr().solve(ap);
    // For A ~ R^dag(pi/4) S(zeta) R(pi/4):  A x = (W x) A with
    // W = (1/2)[[z+1/z, z-1/z], [z-1/z, z+1/z]], hence zeta = W00 + W01.
    (void)wp;
    return (wq(0) + wq(1)).real();
}

// ---------------------------------------------------------------------------
// TeleportEngine

TeleportEngine::TeleportEngine(const GadgetConfig& config)
    : config_(config), n_(config.cutoff.n_max) {
    config_.validate();
    DampedState psi = config_.psi.damped_unit(config_.cutoff);
    DampedState phi = config_.phi.damped_unit(config_.cutoff);
    kraus_state_ = kraus_state_matrix(psi.state.amps(), phi.state.amps(), n_);
    bra_phase_a_ = Vec(n_);
    bra_phase_b_ = Vec(n_);
    for (int k = 0; k < n_; ++k) {
        bra_phase_a_(k) = std::exp(kI * (config_.theta_a * k)) * minus_i_pow(k);
        bra_phase_b_(k) = std::exp(kI * (config_.theta_b * k)) * minus_i_pow(k);
    }
}

// Y[(i, j), k] = [B_12 (x (x) KS)]_{(i, j), k}
Mat TeleportEngine::y_cache_build(const FockState& input) const {
    if (input.dim() != n_)
        throw std::invalid_argument("TeleportEngine: input dimension mismatch");
    const auto& kern = BeamsplitterKernel::get(n_);
    const Vec& x = input.amps();
    Mat y = Mat::Zero(Eigen::Index(n_) * n_, n_);
    for (int s = 0; s < 2 * n_ - 1; ++s) {
        const int lo = BeamsplitterKernel::sector_lo(s, n_);
        const int hi = BeamsplitterKernel::sector_hi(s, n_);
        const int d = hi - lo + 1;
        Mat src(d, n_);
        for (int pos = 0; pos < d; ++pos) src.row(pos) = x(lo + pos) * kraus_state_.row(s - lo - pos);
        Mat dst = mul_rc(kern.sector(s), src);
        for (int pos = 0; pos < d; ++pos) {
            const int i = lo + pos;
            y.row(Eigen::Index(i) * n_ + (s - i)) = dst.row(pos);
        }
    }
    return y;
}

RMat TeleportEngine::density_grid(const FockState& input,
                                  const std::vector<double>& grid) const {
    const int g = int(grid.size());
    Mat y = y_cache_build(input);
    // Reorganize to [(i, k), j] for the mode-2 bra contraction.
    Mat y2(Eigen::Index(n_) * n_, n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            for (int k = 0; k < n_; ++k)
                y2(Eigen::Index(i) * n_ + k, j) = y(Eigen::Index(i) * n_ + j, k);
    // Bra value matrices over the grid.
    Mat bra_a(g, n_), bra_b(g, n_);
    for (int r = 0; r < g; ++r) {
        RVec h = hermite_values(n_, grid[r]);
        bra_a.row(r) = (bra_phase_a_.array() * h.cast<Cx>().array()).transpose();
        bra_b.row(r) = (bra_phase_b_.array() * h.cast<Cx>().array()).transpose();
    }
    Mat zall = y2 * bra_b.transpose();   // [(i,k), g_b]
    RMat dens(g, g);
    Mat zjb(n_, n_);
    for (int jb = 0; jb < g; ++jb) {
        for (int i = 0; i < n_; ++i)
            zjb.row(i) = zall.col(jb).segment(Eigen::Index(i) * n_, n_).transpose();
        Mat cmat = bra_a * zjb;          // [g_a, k]
        dens.col(jb) = cmat.rowwise().squaredNorm();
    }
    return dens;
}

Vec TeleportEngine::apply(const FockState& input, const HomodyneOutcome& m) const {
    Mat y = y_cache_build(input);
    RVec ha = hermite_values(n_, m.m_a);
    RVec hb = hermite_values(n_, m.m_b);
    Vec bra_a = bra_phase_a_.cwiseProduct(ha.cast<Cx>());
    Vec bra_b = bra_phase_b_.cwiseProduct(hb.cast<Cx>());
    Vec out = Vec::Zero(n_);
    for (int i = 0; i < n_; ++i) {
        Cx wa = bra_a(i);
        if (wa == Cx(0, 0)) continue;
        out += wa * (y.block(Eigen::Index(i) * n_, 0, n_, n_).transpose() * bra_b);
    }
    return out;
}

Mat TeleportEngine::povm_grid_total(const std::vector<double>& grid) const {
    const int g = int(grid.size());
    const double step = (g > 1) ? (grid[1] - grid[0]) : 1.0;
    Mat gram = (kraus_state_.conjugate() * kraus_state_.transpose());   // conj(KS KS^dag)
    Mat povm = Mat::Zero(n_, n_);
    std::vector<RVec> herm(g);
    for (int r = 0; r < g; ++r) herm[r] = hermite_values(n_, grid[r]);
    Mat omega(n_, n_);
    for (int ia = 0; ia < g; ++ia) {
        Vec bra_a = bra_phase_a_.cwiseProduct(herm[ia].cast<Cx>());
        for (int jb = 0; jb < g; ++jb) {
            Vec bra_b = bra_phase_b_.cwiseProduct(herm[jb].cast<Cx>());
            auto w = bra_sector_weights(bra_a, bra_b, n_);
            // omega[n, j'] = w_{n + j'}[pos(n)]
            for (int nn = 0; nn < n_; ++nn)
                for (int jp = 0; jp < n_; ++jp) {
                    const int s = nn + jp;
                    const int lo = BeamsplitterKernel::sector_lo(s, n_);
                    omega(nn, jp) = w[s](nn - lo);
                }
            // K = KS^T omega^T;  K^dag K = conj(omega) conj(KS KS^dag) omega^T
            povm.noalias() += omega.conjugate() * gram * omega.transpose() * (step * step);
        }
    }
    return povm;
}

}  // namespace macrosim
