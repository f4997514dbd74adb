#pragma once

// PPT margin, CCNR value and the radius of the Hilbert-Schmidt ball of
// bound entangled states around a state.

#include "bentcert/qmat.hpp"

namespace bentcert::criteria {

using qmat::BipartiteOperator;

struct RadiusReport {
  double lambda_min_rho = 0.0;
  double lambda_min_pt = 0.0;  // lambda_min of the partial transpose
  double ccnr = 0.0;           // trace norm of the realigned matrix
  double r_a = 0.0;            // sqrt(d/(d-1)) * lambda_min_pt
  double r_b = 0.0;            // (ccnr - 1)/sqrt(d)
  double r = 0.0;              // certified radius, 0 unless both bounds are positive
};

/// Combines the three spectral quantities into a report for total dimension d.
RadiusReport make_radius_report(int d, double lambda_min_rho, double lambda_min_pt, double ccnr);

/// Throws InvalidInput unless rho is Hermitian with unit trace. A slightly
/// negative lambda_min(rho) is accepted and simply yields r = 0.
RadiusReport ball_radius(const BipartiteOperator& rho);

/// diag(x, z, ..., z) with x = sqrt((d-1)/d), z = -x/(d-1): the unit traceless
/// direction with the largest eigenvalue. Returned with dims (dA, dB).
BipartiteOperator extremal_inf_direction(int dA, int dB);
BipartiteOperator extremal_inf_direction(int d);

/// Unit traceless X on C^dA (x) C^dA whose realignment is the constant
/// anti-diagonal matrix in a local Gell-Mann basis, so ||R(X)||_1 = dA.
BipartiteOperator extremal_realign_direction(int dA);

/// (X - tr(X) 1/d) / xi with xi chosen so the result has unit HS norm.
/// Throws InvalidInput for a multiple of the identity.
BipartiteOperator unit_traceless(const BipartiteOperator& x);

enum class ProbeDirection { ppt, ccnr };

struct ProbeResult {
  double lambda_min_pt = 0.0;
  double ccnr = 0.0;
  double lambda_min_rho = 0.0;
  // Multiplicity of lambda_min(Gamma(rho)) for the PPT probe (1 when the
  // minimal eigenvector is unique); 0 for the CCNR probe.
  int degeneracy = 0;
};

/// Evaluates the displaced matrix rho - r * unit_traceless(direction operator).
/// PPT: direction Gamma(|eta><eta|), eta the first minimal eigenvector of Gamma(rho).
/// CCNR: direction R^{-1}(U V^dagger) from the SVD of R(rho).
ProbeResult probe_boundary(const BipartiteOperator& rho, double r, ProbeDirection direction);

/// Displacement operator used by probe_boundary (already normalized).
BipartiteOperator probe_direction(const BipartiteOperator& rho, ProbeDirection direction,
                                  int* degeneracy = nullptr);

}  // namespace bentcert::criteria
