#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

namespace macrosim {

using Cx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

/// Fock-space truncation: one mode spans |0> .. |n_max-1>.
struct Cutoff {
    int n_max;
    explicit Cutoff(int n) : n_max(n) {
        if (n_max < 2) throw std::invalid_argument("Cutoff: n_max must be >= 2");
    }
};

/// How a state vector is normalized.
///  unit:    ||amps|| = 1, squared overlaps are probabilities.
///  density: delta-normalized object (quadrature eigenstate, ideal EPR/GKP);
///           squared overlaps are probability densities.
enum class NormKind { unit, density };

class FockState {
  public:
    FockState(Vec amps, std::vector<int> mode_dims, NormKind kind,
              double unit_tol = 1e-8);

    const Vec& amps() const { return amps_; }
    Vec& amps() { return amps_; }
    const std::vector<int>& mode_dims() const { return dims_; }
    NormKind norm_kind() const { return kind_; }
    int n_modes() const { return static_cast<int>(dims_.size()); }
    Eigen::Index dim() const { return amps_.size(); }
    double norm() const { return amps_.norm(); }

    /// Unit-normalized copy (norm_kind becomes unit).
    FockState normalized() const;

  private:
    Vec amps_;
    std::vector<int> dims_;
    NormKind kind_;
};

class FockOperator {
  public:
    FockOperator(Mat m, std::vector<int> mode_dims);

    const Mat& mat() const { return m_; }
    Mat& mat() { return m_; }
    const std::vector<int>& mode_dims() const { return dims_; }
    int n_modes() const { return static_cast<int>(dims_.size()); }
    Eigen::Index dim() const { return m_.rows(); }

  private:
    Mat m_;
    std::vector<int> dims_;
};

/// a and a^dagger on the truncated basis: a|n> = sqrt(n)|n-1>.
std::pair<FockOperator, FockOperator> ladder(Cutoff cutoff);

/// q = (a + a^dag)/sqrt(2), p = -i(a - a^dag)/sqrt(2).  hbar = 1, vacuum
/// variance 1/2 in both.
std::pair<FockOperator, FockOperator> quadratures(Cutoff cutoff);

/// diag(0, 1, ..., n_max-1).
FockOperator number_op(Cutoff cutoff);

FockOperator identity_op(Cutoff cutoff);

/// Kronecker products; mode ordering = argument ordering (mode 1 leftmost,
/// circuit top wire).
FockState tensor(const FockState& a, const FockState& b);
FockOperator tensor(const FockOperator& a, const FockOperator& b);

/// Contract a two-mode operator into modes (i, j) of a k-mode state,
/// zero-based, i != j.  All other modes untouched.
FockState apply_two_mode(const FockOperator& op, const FockState& state,
                         int mode_i, int mode_j);

/// Apply a single-mode operator to mode i of a k-mode state.
FockState apply_one_mode(const Mat& op, const FockState& state, int mode_i);

/// <a|b>, conjugation on a.
Cx overlap(const FockState& a, const FockState& b);

/// |<a|b>|^2 / (||a||^2 ||b||^2).  Throws on zero-norm input.
double fidelity_up_to_phase(const FockState& a, const FockState& b);

/// min over global phase of ||A - e^{i phi} B||_F / ||B||_F on the leading
/// interior x interior block (box per flattened index for single-mode
/// operators; callers with multimode operators should use the _box or
/// _total_photon variants below).
double operator_distance_up_to_phase(const FockOperator& a,
                                     const FockOperator& b, Cutoff interior);

/// Same metric restricted to a per-mode box: every mode index < interior.
double op_distance_box(const FockOperator& a, const FockOperator& b,
                       int interior);

/// Same metric restricted to entries whose row and column total photon
/// number are both <= total_max.  The natural truncation-safe window for
/// photon-conserving targets (two-mode only).
double op_distance_total_photon(const FockOperator& a, const FockOperator& b,
                                int total_max);

/// Up-to-phase L2 distance between unit-normalized states.
double state_distance_up_to_phase(const FockState& a, const FockState& b);

/// State distance restricted to the total-photon <= window components
/// (renormalized on the window).  Multi-mode states.
double state_distance_windowed(const FockState& a, const FockState& b,
                               int total_max);

struct ConvergedValue {
    double value;
    int achieved_cutoff;
};

/// Evaluate builder along a strictly increasing cutoff schedule; return the
/// first value whose change from the previous entry is below tol.
/// Throws std::runtime_error on non-convergence (cutoff too small for the
/// requested damping/squeezing).
ConvergedValue converge_in_cutoff(const std::function<double(Cutoff)>& builder,
                                  const std::vector<int>& schedule, double tol);

}  // namespace macrosim
