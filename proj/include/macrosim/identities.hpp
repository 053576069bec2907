#pragma once

#include "macrosim/fock.hpp"

#include <functional>
#include <string>
#include <vector>

namespace macrosim {

/// One machine-checked circuit identity.  The residual functor evaluates
/// both sides at a damping value beta; base_cutoff fixes the comparison
/// window while the evaluation runs at matched resolution (working cutoff
/// scaled as beta_max/beta so the truncation tail e^{-beta N} is held
/// constant across the schedule).
struct IdentityCase {
    std::string id;
    std::function<double(double beta, int base_cutoff)> residual;
    double tol_endpoint;           // bound on the residual at the smallest beta
    bool beta_independent = false; // pure operator identity: evaluated once
};

const std::vector<IdentityCase>& identity_registry();

/// Working cutoff for matched-resolution evaluation (capped at 320).
int matched_cutoff(double beta, double beta_max, int base_cutoff);

struct IdentityReport {
    std::string id;
    int cutoff = 0;
    std::vector<double> betas;
    std::vector<double> residuals;
    bool tol_pass = false;
    bool trend_pass = false;   // non-increasing within slack
    bool pass = false;
    std::string to_json() const;
};

IdentityReport run_identity(const std::string& id, int base_cutoff,
                            const std::vector<double>& beta_schedule);

/// Run all (or the named) identities on a small work pool; results sorted
/// by id.  Thread count from MACROSIM_THREADS, default hardware/2.
std::vector<IdentityReport> run_identities(const std::vector<std::string>& ids,
                                           int base_cutoff,
                                           const std::vector<double>& beta_schedule);

std::vector<double> default_beta_schedule();   // {0.1, 0.05, 0.02}

}  // namespace macrosim
