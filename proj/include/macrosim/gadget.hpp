#pragma once

#include "macrosim/operators.hpp"
#include "macrosim/states.hpp"

namespace macrosim {

/// One teleportation gadget: measurement angles, the two ancillae forming
/// the Kraus state, and the working truncation.
struct GadgetConfig {
    double theta_a;
    double theta_b;
    AncillaSpec psi;
    AncillaSpec phi;
    Cutoff cutoff;
    // Kraus-operator comparisons are trustworthy on a smaller window than
    // plain operator identities; see the dual-pipeline tests.
    double interior_fraction = 0.25;

    /// Comparison box implied by the interior fraction.
    int interior_box() const { return std::max(2, int(cutoff.n_max * interior_fraction)); }
    void validate() const;
};

struct HomodyneOutcome {
    double m_a = 0.0;
    double m_b = 0.0;
};

/// Outcome-dependent displacement amplitudes for the three operator
/// orderings of the measurement circuit.
Cx mu(double theta_a, double theta_b, double m_a, double m_b);
/// Displacement acting first: V D(mu') = D(mu) V.
Cx mu_prime(double theta_a, double theta_b, double m_a, double m_b);
/// Fourier-split ordering: mu'' = i mu.
Cx mu_doubleprime(double theta_a, double theta_b, double m_a, double m_b);

/// Components of the rotated-homodyne bra <m|_{p_theta} = <m|_p R(theta):
/// bra[n] = e^{i n theta} (-i)^n h_n(m).  Density-normalized; contract
/// linearly against ket amplitudes (no further conjugation).
FockState homodyne_bra(double theta, double m, Cutoff cutoff);

/// Optional damping regularization of a homodyne bra: components scaled by
/// e^{-beta_meas n}.
FockState homodyne_bra_damped(double theta, double m, double beta_meas,
                              Cutoff cutoff);

struct KrausResult {
    FockOperator op;
    Cx mu;
    Cx mu_prime;
    Cx mu_doubleprime;
    double density = 0.0;   // Pr(m_a, m_b) for the supplied input, if any
};

/// Direct three-mode contraction of the gadget,
///   K(m_a, m_b) = <m_a|_{p_theta_a} <m_b|_{p_theta_b} B_12 B_23 |psi>_2 |phi>_3,
/// input on wire 1, output on wire 3.  Evaluated per photon sector of B_12
/// (O(n_max^3), no three-mode tensors).  Optional bra damping regularizes
/// delta-normalized measurement bras.
FockOperator kraus_direct(const GadgetConfig& config, const HomodyneOutcome& m,
                          double beta_meas = 0.0);

/// The teleported gate A(psi, phi) extracted from its Choi state:
///   A[n, m] = sqrt(pi) <m, n| B (|psi> (x) |phi>).
/// Ancillae are used as density-normalized damped vectors N(beta)|ideal>, so
/// beta = 0 gives the ideal gate (D(s+it) for eigenstate pairs,
/// sqrt(pi/2) Pi_GKP for qunaught pairs, comb filters for the mixed cases).
FockOperator teleported_gate_choi(const AncillaSpec& psi, const AncillaSpec& phi,
                                  Cutoff cutoff);

/// Analytic Kraus assembly
///   K = N(b) A_ideal N(b) D(mu) V(theta_a, theta_b)
///       / (pi sqrt(N_psi N_phi |sin(theta_a - theta_b)|)).
/// The 1/sqrt|sin| factor generalizes the measurement-circuit constant to
/// non-perpendicular angle pairs; it is required for POVM completeness and
/// verified against the direct contraction.  Requires equal ancilla damping.
/// If `input` is given, density = ||K input||^2 is filled in.
KrausResult kraus_analytic(const GadgetConfig& config, const HomodyneOutcome& m,
                           const FockState* input = nullptr);

/// Residual of the entangled-measurement circuit identity: the two-mode bra
/// (<m_a| N(bm) (x) <m_b| N(bm)) B_12, reshaped to a single-mode operator, vs
/// N(bm) D(mu) V N(bm) / sqrt(pi |sin(theta_a - theta_b)|), compared up to
/// phase on the interior box.
double measurement_identity_check(double theta_a, double theta_b,
                                  const HomodyneOutcome& m, Cutoff cutoff,
                                  double beta_meas = 0.02, int interior = -1);

/// Reshape the (optionally damped) measurement bra pair into the single-mode
/// operator G with <m_a|<m_b| B_12 = sum_k <k| G (x) <k|.
FockOperator measurement_operator_extract(double theta_a, double theta_b,
                                          const HomodyneOutcome& m, Cutoff cutoff,
                                          double beta_meas = 0.0);

/// Fit the squeeze factor of a (pi/4)-rotated squeezer from an operator's
/// quadrature action on the interior: solves A x = (W x) A in least squares
/// for x in {q, p} and returns zeta with W = W(zeta).
double fit_rotated_squeeze_factor(const FockOperator& a, int interior);

/// Shared evaluation engine for outcome densities and sampled applications.
/// Holds the Kraus state and the B_12 sector data for one gadget
/// configuration at theta = (theta_a, theta_b).
class TeleportEngine {
  public:
    TeleportEngine(const GadgetConfig& config);

    int n_max() const { return n_; }
    const GadgetConfig& config() const { return config_; }

    /// Joint outcome density Pr(m_a, m_b) = ||K(m) input||^2 on a grid
    /// (values indexed [ia][jb]).  Computed through the direct contraction,
    /// so far-tail densities decay honestly.
    RMat density_grid(const FockState& input, const std::vector<double>& grid) const;

    /// K(m) applied to the input (unnormalized).
    Vec apply(const FockState& input, const HomodyneOutcome& m) const;

    /// Sum over the grid of K(m)^dag K(m) dm_a dm_b (POVM partial total).
    Mat povm_grid_total(const std::vector<double>& grid) const;

  private:
    struct Precomp;
    GadgetConfig config_;
    int n_;
    Mat kraus_state_;            // B_23 (psi (x) phi), unit ancillae, [j, k]
    Vec bra_phase_a_, bra_phase_b_;   // e^{i n theta} (-i)^n factors
    Mat y_cache_build(const FockState& input) const;
};

}  // namespace macrosim
