#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "macrosim/gadget.hpp"
#include "macrosim/hermite.hpp"

using namespace macrosim;

namespace {

FockState basis_state(int n, int dim) {
    Vec v = Vec::Zero(dim);
    v(n) = 1.0;
    return FockState(v, {dim}, NormKind::unit);
}

}  // namespace

TEST_CASE("outcome-dependent displacement amplitudes") {
    // theta = (pi/2, 0): mu = -(m_a + i m_b)
    Cx m = mu(M_PI / 2, 0.0, 0.7, -0.3);
    CHECK(std::abs(m - Cx(-0.7, 0.3)) < 1e-12);
    CHECK(std::abs(mu(1.1, 0.4, 0.0, 0.0)) == 0.0);
    CHECK(std::abs(mu_prime(1.1, 0.4, 0.0, 0.0)) == 0.0);
    CHECK(std::abs(mu_doubleprime(1.1, 0.4, 0.0, 0.0)) == 0.0);

    // mu'' = i mu in every ordering convention
    for (auto [ta, tb, ma, mb] : std::vector<std::array<double, 4>>{
             {1.2, 0.4, 0.7, -0.3}, {0.9, -0.4, 0.2, 0.5}, {M_PI / 2, 0.0, 1.0, 1.0}}) {
        Cx m0 = mu(ta, tb, ma, mb);
        Cx m2 = mu_doubleprime(ta, tb, ma, mb);
        CHECK(std::abs(m2 - Cx(0, 1) * m0) < 1e-12);
    }

    // V(ta, tb) D(mu') = D(mu) V(ta, tb)
    Cutoff c(90);
    double ta = 1.2, tb = 0.4, ma = 0.7, mb = -0.3;
    Mat lhs = v_gate(ta, tb, c).mat() * displacement(mu_prime(ta, tb, ma, mb), c).mat();
    Mat rhs = displacement(mu(ta, tb, ma, mb), c).mat() * v_gate(ta, tb, c).mat();
    CHECK(op_distance_box(FockOperator(lhs, {90}), FockOperator(rhs, {90}), 18) < 1e-8);

    CHECK_THROWS(mu(0.5, 0.5, 1.0, 1.0));
}

TEST_CASE("homodyne bra") {
    Cutoff c(40);
    // components e^{i n theta} (-i)^n h_n(m)
    double theta = 0.7, m = 1.3;
    FockState bra = homodyne_bra(theta, m, c);
    RVec h = hermite_values(40, m);
    for (int n = 0; n < 40; ++n) {
        Cx phase = std::exp(Cx(0, theta * n));
        Cx mi = (n % 4 == 0) ? Cx(1, 0) : (n % 4 == 1) ? Cx(0, -1) : (n % 4 == 2) ? Cx(-1, 0) : Cx(0, 1);
        CHECK(std::abs(bra.amps()(n) - phase * mi * h(n)) < 1e-14);
    }

    // theta = pi/2 turns the p-bra into the q-bra: on the vacuum both give h_0(m)
    FockState braq = homodyne_bra(M_PI / 2, 0.8, c);
    Cx val = braq.amps()(0);
    CHECK(std::abs(val - Cx(hermite_values(1, 0.8)(0), 0)) < 1e-14);

    // overlap with the damped 0-momentum state peaks at m = 0
    Cutoff c60(60);
    FockState dp = damped_quadrature_eigenstate(QuadKind::p, 0.0, 0.05, c60);
    double best_m = -99, best = -1;
    for (double mm = -3; mm <= 3; mm += 0.1) {
        FockState b = homodyne_bra(0.0, mm, c60);
        double v = std::norm(Cx(b.amps().cwiseProduct(dp.amps()).sum()));  // linear contraction
        if (v > best) {
            best = v;
            best_m = mm;
        }
    }
    CHECK(std::abs(best_m) < 0.05);

    // eigen-relation residual on the interior rows (ideal bra as a ket)
    double th2 = 0.6, m2 = 0.9;
    Vec ket = homodyne_bra(th2, m2, c60).amps().conjugate();
    auto [q, p] = quadratures(c60);
    Mat ptheta = std::sin(th2) * q.mat() + std::cos(th2) * p.mat();
    Vec resid = ptheta * ket - m2 * ket;
    CHECK(resid.head(58).norm() / ket.norm() < 1e-12);

    // completeness: integral dm |<m|_{p_theta} psi>|^2 = 1 for unit psi
    Cutoff c40(40);
    FockState psi = damped_quadrature_eigenstate(QuadKind::q, 0.3, 0.1, c40);
    double acc = 0;
    for (double mm = -8; mm <= 8; mm += 0.01) {
        FockState b = homodyne_bra(0.7, mm, c40);
        acc += std::norm(Cx(b.amps().cwiseProduct(psi.amps()).sum())) * 0.01;
    }
    CHECK(acc == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("kraus_direct: EPR limit and linearity") {
    Cutoff c(60);
    double beta = 0.02;
    GadgetConfig cfg{M_PI / 2, 0.0, AncillaSpec::p_eig(0.0, beta), AncillaSpec::q_eig(0.0, beta),
                     c};
    FockOperator k = kraus_direct(cfg, HomodyneOutcome{0.0, 0.0});

    // standard teleportation: K ~ N(2 beta), so K|1> stays |1>
    Vec k1 = k.mat().col(1);
    CHECK(std::norm(k1(1)) / k1.squaredNorm() >= 0.99);
    // and the identity-like diagonal dominates
    Vec k0 = k.mat().col(0);
    CHECK(std::norm(k0(0)) / k0.squaredNorm() >= 0.99);

    // linearity: the operator applied to a superposition equals the same
    // combination of columns, exactly
    Vec x = Vec::Zero(60);
    x(0) = 0.6;
    x(1) = 0.8;
    Vec lhs = k.mat() * x;
    Vec rhs = 0.6 * k.mat().col(0) + 0.8 * k.mat().col(1);
    CHECK((lhs - rhs).norm() == 0.0);

    // conditional-map normalization: ||K psi||^2 is the outcome density and
    // the normalized output is a unit state
    FockState in = basis_state(1, 60);
    Vec out = k.mat() * in.amps();
    CHECK(out.squaredNorm() > 0);
    CHECK(std::abs(out.normalized().norm() - 1.0) < 1e-14);
}

TEST_CASE("teleported gate from the Choi state") {
    Cutoff c(60);
    double beta = 0.05;
    const int box = 30;

    // eigenstate pair -> displacement D(s + i t)
    double s = 0.4, t = -0.3;
    FockOperator a =
        teleported_gate_choi(AncillaSpec::p_eig(t, beta), AncillaSpec::q_eig(s, beta), c);
    Mat want = displacement(Cx(s, t), c).mat();
    RVec d = damping_diag(beta, 60);
    for (int r = 0; r < 60; ++r) want.row(r) *= d(r);
    for (int col = 0; col < 60; ++col) want.col(col) *= d(col);
    CHECK(op_distance_box(a, FockOperator(want, {60}), box) < 1e-9);

    // qunaught pair -> sqrt(pi/2) times the damped GKP projector
    FockOperator ag = teleported_gate_choi(AncillaSpec::qunaught_spec(beta),
                                           AncillaSpec::qunaught_spec(beta), c);
    FockState g0 = gkp_codeword_ideal(0, c, beta);
    FockState g1 = gkp_codeword_ideal(1, c, beta);
    Mat proj = std::sqrt(M_PI / 2.0) * (g0.amps() * g0.amps().adjoint() +
                                        g1.amps() * g1.amps().adjoint());
    for (int r = 0; r < 60; ++r) proj.row(r) *= d(r);
    for (int col = 0; col < 60; ++col) proj.col(col) *= d(col);
    CHECK(op_distance_box(ag, FockOperator(proj, {60}), box) < 1e-8);

    // comb selectivity of the partial projector: Sha(p) annihilates damped
    // p-eigenstates displaced half a tooth much harder than on-tooth ones
    double beta2 = 0.02;
    Cutoff c2(140);
    FockOperator acomb = teleported_gate_choi(AncillaSpec::p_eig(0.0, beta2),
                                              AncillaSpec::qunaught_spec(beta2), c2);
    FockState on_tooth = damped_quadrature_eigenstate(QuadKind::p, 0.0, beta2, c2);
    FockState off_tooth =
        damped_quadrature_eigenstate(QuadKind::p, std::sqrt(M_PI) / 2, beta2, c2);
    double on = (acomb.mat() * on_tooth.amps()).norm();
    double off = (acomb.mat() * off_tooth.amps()).norm();
    CHECK(on / off >= 10.0);
}

TEST_CASE("dual-pipeline Kraus equality (squeezed and GKP families)") {
    Cutoff c(60);
    double beta = 0.05;
    const int box = 15;

    // squeezed-ancilla case at a rotated angle pair
    {
        GadgetConfig cfg{1.2, 0.3, AncillaSpec::p_eig(0.0, beta), AncillaSpec::q_eig(0.0, beta),
                         c};
        HomodyneOutcome m{0.5, -0.2};
        FockOperator direct = kraus_direct(cfg, m);
        KrausResult analytic = kraus_analytic(cfg, m);
        CHECK(op_distance_box(direct, analytic.op, box) < 1e-3);
    }
    // qunaught/qunaught case
    {
        GadgetConfig cfg{M_PI / 2, 0.0, AncillaSpec::qunaught_spec(beta),
                         AncillaSpec::qunaught_spec(beta), c};
        HomodyneOutcome m{0.3, 0.1};
        FockOperator direct = kraus_direct(cfg, m);
        KrausResult analytic = kraus_analytic(cfg, m);
        CHECK(op_distance_box(direct, analytic.op, box) < 5e-3);
    }
    // exact-phase prefactor: ratio of largest singular values at the EPR
    // limit validates the 1/pi, sqrt(2), 1/sqrt(2 pi) bookkeeping chain
    {
        GadgetConfig cfg{M_PI / 2, 0.0, AncillaSpec::p_eig(0.0, beta),
                         AncillaSpec::q_eig(0.0, beta), c};
        HomodyneOutcome m{0.0, 0.0};
        Mat direct = kraus_direct(cfg, m).mat().topLeftCorner(30, 30);
        Mat analytic = kraus_analytic(cfg, m).op.mat().topLeftCorner(30, 30);
        double sd = direct.jacobiSvd().singularValues()(0);
        double sa = analytic.jacobiSvd().singularValues()(0);
        CHECK(sd / sa == doctest::Approx(1.0).epsilon(1e-2));
    }
    // mismatched ancilla damping is rejected by the analytic assembly
    GadgetConfig bad{M_PI / 2, 0.0, AncillaSpec::p_eig(0.0, 0.05), AncillaSpec::q_eig(0.0, 0.02),
                     c};
    CHECK_THROWS(kraus_analytic(bad, HomodyneOutcome{0, 0}));
}

TEST_CASE("outcome covariance: the mu-displacement law carries the outcome dependence") {
    Cutoff c(60);
    double beta = 0.05;
    GadgetConfig cfg{M_PI / 2, 0.0, AncillaSpec::p_eig(0.0, beta), AncillaSpec::q_eig(0.0, beta),
                     c};
    auto dist_at = [&](double ma, double mb) {
        HomodyneOutcome m{ma, mb};
        return op_distance_box(kraus_direct(cfg, m), kraus_analytic(cfg, m).op, 15);
    };
    double d1 = dist_at(0.3, 0.1);
    double d2 = dist_at(0.8, 0.1);
    CHECK(d1 < 2.0 * d2 + 1e-12);
    CHECK(d2 < 2.0 * d1 + 1e-12);
}

TEST_CASE("measurement circuit identity") {
    Cutoff c(60);
    // (pi/2, 0) at zero outcomes: the extracted operator is exactly
    // N D(0) V N / sqrt(pi) = N^2 / sqrt(pi) on the sector-exact window
    CHECK(measurement_identity_check(M_PI / 2, 0.0, HomodyneOutcome{0, 0}, c, 0.02) < 1e-3);
    CHECK(measurement_identity_check(M_PI / 2, 0.0, HomodyneOutcome{0, 0}, c, 0.02) < 1e-12);

    // rotated angles and nonzero outcomes; residual dominated by the
    // reference V's own truncation, shrinking with the working cutoff
    double r60 = measurement_identity_check(1.0, 0.2, HomodyneOutcome{0.3, 0.1}, c, 0.05, 20);
    CHECK(r60 < 5e-3);
    double r120 =
        measurement_identity_check(1.0, 0.2, HomodyneOutcome{0.3, 0.1}, Cutoff(120), 0.05, 20);
    CHECK(r120 < r60);
    CHECK(r120 < 1e-6);
}

TEST_CASE("full gadget with EPR-limit ancillae preserves inputs") {
    Cutoff c(60);
    double beta = 0.02;
    GadgetConfig cfg{M_PI / 2, 0.0, AncillaSpec::p_eig(0.0, beta), AncillaSpec::q_eig(0.0, beta),
                     c};
    FockOperator k = kraus_direct(cfg, HomodyneOutcome{0.0, 0.0});
    Vec plus = Vec::Zero(60);
    plus(0) = plus(1) = 1 / std::sqrt(2.0);
    for (const Vec& in : {Vec(basis_state(0, 60).amps()), Vec(basis_state(1, 60).amps()), plus}) {
        Vec out = (k.mat() * in).normalized();
        CHECK(std::norm(out.dot(in)) >= 0.99);
    }
}

TEST_CASE("rotated-squeeze factor fit") {
    Cutoff c(80);
    // calibration: a constructed R^dag(pi/4) S(z) R(pi/4) recovers z
    for (double z : {0.7, 1.4, -0.7}) {
        Mat u = phase_delay(-M_PI / 4, c).mat() * squeeze(SqueezeParam(z), c).mat() *
                phase_delay(M_PI / 4, c).mat();
        double fit = fit_rotated_squeeze_factor(FockOperator(u, {80}), 20);
        CHECK(fit == doctest::Approx(z).epsilon(1e-8));
    }
}

TEST_CASE("TeleportEngine consistency with kraus_direct") {
    Cutoff c(60);
    double beta = 0.05;
    GadgetConfig cfg{M_PI / 2, 0.0, AncillaSpec::qunaught_spec(beta),
                     AncillaSpec::qunaught_spec(beta), c};
    TeleportEngine engine(cfg);
    FockState in = gkp_codeword(0, beta, c);
    HomodyneOutcome m{0.4, -0.6};
    Vec via_engine = engine.apply(in, m);
    Vec via_kraus = kraus_direct(cfg, m).mat() * in.amps();
    CHECK((via_engine - via_kraus).norm() < 1e-12 * via_kraus.norm());

    // density grid values match the applied norms
    std::vector<double> grid{-0.5, 0.0, 0.4};
    RMat dens = engine.density_grid(in, grid);
    for (int ia = 0; ia < 3; ++ia)
        for (int jb = 0; jb < 3; ++jb) {
            Vec out = engine.apply(in, HomodyneOutcome{grid[ia], grid[jb]});
            CHECK(dens(ia, jb) == doctest::Approx(out.squaredNorm()).epsilon(1e-10));
        }
}

TEST_CASE("POVM completeness over the outcome grid") {
    Cutoff c(60);
    double beta = 0.05;
    GadgetConfig cfg{M_PI / 2, 0.0, AncillaSpec::p_eig(0.0, beta), AncillaSpec::q_eig(0.0, beta),
                     c};
    TeleportEngine engine(cfg);
    std::vector<double> grid;
    for (double x = -6; x <= 6 + 1e-9; x += 0.05) grid.push_back(x);
    Mat povm = engine.povm_grid_total(grid);
    // Hermitian, positive on the interior, close to the identity (the
    // deviation measures outcome mass beyond the grid)
    CHECK((povm - povm.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
    const int box = 8;
    Mat dev = povm.topLeftCorner(box, box) - Mat::Identity(box, box);
    CHECK(dev.cwiseAbs().maxCoeff() < 2e-2);
    // eigenvalues of the full grid total never exceed 1 (+ quadrature slack)
    Eigen::SelfAdjointEigenSolver<Mat> es(povm);
    CHECK(es.eigenvalues().maxCoeff() < 1.0 + 5e-3);
}
