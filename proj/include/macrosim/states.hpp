#pragma once

#include "macrosim/fock.hpp"

#include <optional>
#include <string>

namespace macrosim {

/// Squeezed vacuum |0; zeta>_q = S(zeta)|0>, even Fock levels only,
/// amplitudes sqrt(2z/(1+z^2)) (-1)^n ((1-z^2)/(1+z^2))^n sqrt((2n)!)/(2^n n!).
/// Throws if the truncated norm deficit exceeds norm_tol.
FockState squeezed_vacuum_q(double zeta, Cutoff cutoff, double norm_tol = 1e-10);
/// Same without the (-1)^n:  |0; zeta>_p = |0; 1/zeta>_q.
FockState squeezed_vacuum_p(double zeta, Cutoff cutoff, double norm_tol = 1e-10);

/// Delta-normalized quadrature eigenstates in the Fock basis:
/// <n|s>_q = h_n(s),  <n|t>_p = i^n h_n(t).
FockState ideal_q_eigenstate(double value, Cutoff cutoff);
FockState ideal_p_eigenstate(double value, Cutoff cutoff);

enum class QuadKind { q, p };

/// N(beta)|value> normalized to unit.  For value = 0 equals squeezed vacuum
/// with tanh r = e^{-2 beta}.  Throws on convergence failure at cutoff.
FockState damped_quadrature_eigenstate(QuadKind kind, double value, double beta,
                                       Cutoff cutoff);

/// Damping applied to a density-normalized state; norm_sq is the squared
/// norm of the damped vector, i.e. <ideal|N(2 beta)|ideal>.
struct DampedState {
    FockState state;   // unit-normalized
    double norm_sq;
};
DampedState damp_and_normalize(const FockState& ideal, double beta,
                               double tail_tol = 2e-2);

/// Ideal two-mode EPR state (1/sqrt(2 pi)) sum_n |n>|n>, density-normalized.
FockState fock_epr(Cutoff cutoff);

/// Comb sites {offset + k*spacing} with |site| <= sqrt(2 ln(1/eps) / beta).
std::vector<double> comb_sites(double spacing, double offset, double beta,
                               double eps = 1e-14);

/// Delta-normalized ideal GKP computational-basis codeword,
/// <n|j_GKP> = (2 sqrt(pi))^{1/2} sum_k h_n((2k+j) sqrt(pi)).
/// Odd Fock levels are structural zeros.  site_beta sets the comb radius.
FockState gkp_codeword_ideal(int j, Cutoff cutoff, double site_beta = 0.05);

/// Damped, unit-normalized GKP codeword e^{-beta n} <n|j_GKP>, renormalized.
FockState gkp_codeword(int j, double beta, Cutoff cutoff);

/// Delta-normalized ideal qunaught: comb of spacing sqrt(2 pi), Fourier
/// invariant; Fock support on n = 0 (mod 4) only (structural).
FockState qunaught_ideal(Cutoff cutoff, double site_beta = 0.05);

/// Damped, unit-normalized qunaught.
FockState qunaught(double beta, Cutoff cutoff);

/// Damped GKP Bell pair: (N (x) N)(|0,0> + |1,1>)_GKP normalized; equals the
/// beamsplitter construction from two damped qunaughts up to truncation.
FockState gkp_bell_pair(double beta, Cutoff cutoff);

/// GKP quality parameters tied to the damping model: spike variance
/// Delta^2 = envelope variance kappa^2 = beta; s_gkp_db = -10 log10(Delta^2).
struct GkpQuality {
    double beta;
    double delta_sq;
    double kappa_sq;
    double s_gkp_db;
    static GkpQuality from_beta(double beta);
    static GkpQuality from_db(double s_gkp_db);
};

/// Evaluate a single-mode state's wavefunction on a grid.
/// q basis: psi(s) = sum_n c_n h_n(s);  p basis carries the (-i)^n phase,
/// psi~(t) = sum_n c_n (-i)^n h_n(t).
std::vector<Cx> wavefunction(const FockState& state, QuadKind basis,
                             const std::vector<double>& grid);

/// Closed-form approximate GKP position wavefunction (small-beta comb of
/// Gaussian spikes under a Gaussian envelope), unnormalized:
/// (sqrt2/pi^{1/4}) e^{-kappa^2 s^2/2} sum_n e^{-(s-(2n+j) sqrt(pi))^2/(2 Delta^2)}.
std::vector<double> gkp_wavefunction_analytic(int j, double beta,
                                              const std::vector<double>& grid);

/// Declarative ancilla description: which ideal state plus how much damping.
struct AncillaSpec {
    enum class Kind {
        q_eigenstate,   // param = eigenvalue s
        p_eigenstate,   // param = eigenvalue t
        squeezed_q,     // param = zeta; equivalent damped 0-eigenstate
        squeezed_p,
        qunaught,
        gkp_codeword,   // j = 0 or 1
        gkp_plus_minus, // j = 0 for +, 1 for -
        custom,         // explicit density-normalized amplitudes
    };

    Kind kind = Kind::p_eigenstate;
    double param = 0.0;
    int j = 0;
    double beta = 0.0;
    std::optional<Vec> custom_amps;

    static AncillaSpec q_eig(double s, double beta);
    static AncillaSpec p_eig(double t, double beta);
    static AncillaSpec squeezed_q_spec(double zeta);
    static AncillaSpec squeezed_p_spec(double zeta);
    static AncillaSpec qunaught_spec(double beta);
    static AncillaSpec gkp(int j, double beta);
    static AncillaSpec gkp_pm(int sign_plus, double beta);
    static AncillaSpec custom_spec(Vec amps, double beta);

    /// Parse CLI form "kind[:x[:y]]", e.g. "squeezed_p:0.05", "qunaught:0.05",
    /// "q_eig:0.5:0.05", "gkp0:0.05".
    static AncillaSpec parse(const std::string& text);

    /// Total damping (declared beta plus any squeezing-implied damping).
    double effective_beta() const;
    /// The undamped, density-normalized Fock vector the damping acts on.
    Vec ideal_vector(Cutoff cutoff) const;
    /// Unit-normalized damped ancilla and its normalization <psi|N(2b)|psi>.
    DampedState damped_unit(Cutoff cutoff) const;
};

}  // namespace macrosim
