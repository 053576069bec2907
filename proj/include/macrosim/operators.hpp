#pragma once

#include "macrosim/fock.hpp"

#include <array>

namespace macrosim {

/// Generalized squeezing factor; negative values mean squeeze followed by a
/// pi phase delay (parity).
struct SqueezeParam {
    double zeta;
    explicit SqueezeParam(double z) : zeta(z) {
        if (z == 0.0) throw std::invalid_argument("SqueezeParam: zeta must be nonzero");
    }
};

/// 2k x 2k real matrix acting on (q_1..q_k, p_1..p_k)^T.
struct SymplecticMatrix {
    RMat entries;
    /// Residual of S^T Omega S - Omega; must be <= 1e-10 for a valid instance.
    double form_residual() const;
    void validate(double tol = 1e-10) const;
};

/// Cached eigendecomposition of q on the truncated basis.  p shares the
/// spectrum through p = F q F^dag with F = diag(i^n), so a single solve
/// serves both quadratures.  Thread-safe.
class QuadratureEigen {
  public:
    static const QuadratureEigen& get(int n_max);

    const RVec& lambda() const { return lambda_; }
    const Mat& uq() const { return uq_; }    // q = uq diag(lambda) uq^dag
    const Mat& up() const { return up_; }    // p = up diag(lambda) up^dag

    /// e^{i t q} v
    Vec apply_z(double t, const Vec& v) const;
    /// e^{-i s p} v
    Vec apply_x(double s, const Vec& v) const;
    /// D(alpha) v = e^{i aR aI} X(sqrt2 aR) Z(sqrt2 aI) v
    Vec apply_displacement(Cx alpha, const Vec& v) const;

  private:
    explicit QuadratureEigen(int n_max);
    RVec lambda_;
    Mat uq_, up_;
};

/// D(alpha) = exp(alpha a^dag - alpha^* a), built by eigendecomposition of
/// the Hermitian generator sqrt(2)(aI q - aR p).
FockOperator displacement(Cx alpha, Cutoff cutoff);

/// R(theta) = diag(e^{i n theta}); R(pi/2) is the Fourier transform.
FockOperator phase_delay(double theta, Cutoff cutoff);

/// S(zeta) = R(Im ln zeta) exp(-(i/2)(Re ln zeta)(qp + pq)).  Satisfies
/// S^dag(z) q S(z) = z q and S^dag(z) p S(z) = p/z for all real z != 0.
FockOperator squeeze(SqueezeParam zeta, Cutoff cutoff);

/// P(sigma) = e^{i sigma q^2 / 2}
FockOperator shear_q(double sigma, Cutoff cutoff);
/// P_p(sigma) = e^{-i sigma p^2 / 2}
FockOperator shear_p(double sigma, Cutoff cutoff);

/// N(beta) = e^{-beta n}, non-unitary damping envelope.
FockOperator damping(double beta, Cutoff cutoff);
/// Damping factors as a vector diag(e^{-beta n}).
RVec damping_diag(double beta, int n_max);

/// Balanced beamsplitter B = exp(-i (pi/4)(q (x) p - p (x) q)) as a dense
/// two-mode operator.  B_jk^dag = B_kj != B_jk; conserves n_1 + n_2 exactly.
FockOperator beamsplitter(Cutoff cutoff);

/// Per-total-photon-sector form of the beamsplitter.  B block-diagonalizes
/// over n_1 + n_2 = s with real orthogonal blocks; sectors with s < n_max
/// carry no truncation error at all.  Cached per cutoff, thread-safe.
class BeamsplitterKernel {
  public:
    static const BeamsplitterKernel& get(int n_max);

    int n_max() const { return n_; }
    /// Sector matrix for total photon number s; basis |k, s-k> with
    /// k in [max(0, s-n_max+1), min(s, n_max-1)].
    const RMat& sector(int s) const { return sectors_[s]; }
    static int sector_lo(int s, int n_max) { return std::max(0, s - n_max + 1); }
    static int sector_hi(int s, int n_max) { return std::min(s, n_max - 1); }

    /// Apply B with arrow from mode_i to mode_j on a multimode state.
    FockState apply(const FockState& state, int mode_i, int mode_j) const;
    /// Two-mode convenience on a raw vector (modes 0 -> 1).
    Vec apply2(const Vec& state) const;

  private:
    explicit BeamsplitterKernel(int n_max);
    int n_;
    std::vector<RMat> sectors_;
};

/// C^X_jk(g) = exp(-i g q_j (x) p_k), control j, target k (dense two-mode).
FockOperator controlled_x(double g, Cutoff cutoff);

/// Apply exp(i c X_i (x) Y_j) to a state where X, Y are q or p on the named
/// modes, via the cached quadrature eigenbases.  Used for C^X- and
/// CZ-type gates on states too large for dense two-mode operators.
enum class Quad { q, p };
FockState apply_quadratic_gate(const FockState& state, Cx coeff, Quad x, int mode_i,
                               Quad y, int mode_j);

/// V(theta_a, theta_b) = R(theta_+ - pi/2) S(tan theta_-) R(theta_+) with
/// theta_pm = (theta_a +- theta_b)/2.  Requires sin(theta_a - theta_b) != 0.
FockOperator v_gate(double theta_a, double theta_b, Cutoff cutoff);

/// 2x2 symplectic actions, rows give U^dag (q,p) U in the (q,p) basis.
SymplecticMatrix symplectic_rotation(double theta);
SymplecticMatrix symplectic_squeeze(double zeta);
SymplecticMatrix symplectic_v_gate(double theta_a, double theta_b);
/// 4x4 beamsplitter action on (q1, q2, p1, p2)^T.
SymplecticMatrix symplectic_beamsplitter();

/// The three 4x4 factors of the beamsplitter symplectic decomposition
/// (lower shear, diagonal squeeze, upper shear); their product equals
/// diag-block R(pi/4) exactly.
std::array<RMat, 3> beamsplitter_symplectic_factors();

/// LDU factors of the 2x2 rotation R(theta): shear, diag(cos, sec), shear.
std::array<RMat, 3> rotation_ldu_factors(double theta);

struct BsDecomposition {
    FockOperator op;       // e^{-i q1 p2} [S1^dag(sqrt2) (x) S2(sqrt2)] e^{i p1 q2}
    double residual;       // up-to-phase distance from beamsplitter(cutoff)
};

/// Build the Appendix-style Gaussian-gate decomposition of the beamsplitter
/// and report its distance from the direct construction on the total-photon
/// interior window.
BsDecomposition bs_decomposition(Cutoff cutoff, int interior_total = -1);

/// Entrywise max |U^dag X U - (M X)| over the interior box for X in {q, p},
/// where M is the claimed symplectic action.
double heisenberg_residual(const FockOperator& u, const SymplecticMatrix& m,
                           int interior);

}  // namespace macrosim
