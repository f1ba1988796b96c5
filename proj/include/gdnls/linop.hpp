#pragma once

#include <vector>

#include <Eigen/Dense>

#include "gdnls/numerics.hpp"
#include "gdnls/soliton.hpp"

namespace gdnls {

/// S'_{w,c}(u) = -u_xx - i|u|^{2 sigma} u_x + omega u + i c u_x.
/// `nonlinear = false` drops the |u|^{2 sigma} term.
Field apply_S_prime(const Field& u, const SolitonParams& p, bool nonlinear = true);

/// Second variation of the action at `base` applied to f. Contains a term in
/// conj(f), so it is real-linear only.
Field apply_S_double_prime(const Field& f, const Field& base, const SolitonParams& p);

/// J'(u) = 2 (sigma + 1) i |u|^{2 sigma} u_x.
Field apply_J_prime(const Field& u, double sigma);

/// Packing of a complex field into R^{2N} as (Re u, Im u). With this layout
/// <f, g> = dx * dot(pack(f), pack(g)).
Eigen::VectorXd pack(const Field& f);
Field unpack(const GridPtr& grid, const Eigen::VectorXd& v);

/// Dense real 2N x 2N matrix of S''(base), assembled column by column and
/// symmetrized.
Eigen::MatrixXd assemble_S_double_prime(const Field& base, const SolitonParams& p);

/// Dense 2N x 2N Gram matrix of the H1 inner product in the packed layout
/// (without the dx factor).
Eigen::MatrixXd h1_gram(const Grid& grid);

struct EigenPair {
  double value = 0.0;
  Field field;
};

/// Dense assembly is used up to this grid size; above it the eigensolver is
/// matrix free.
inline constexpr Eigen::Index kDenseSpectrumLimit = 2048;

/// The k smallest eigenvalues of S''(base) with unit-L2 eigenfields.
/// Throws EigenFailure.
std::vector<EigenPair> spectrum(const Field& base, const SolitonParams& p, int k);

struct SpectrumSummary {
  int negative = 0;     // eigenvalues below -zero_tol
  int near_zero = 0;    // |eigenvalue| <= zero_tol
  double scale = 0.0;   // largest |eigenvalue| among those computed
  double zero_tol = 0.0;
};

/// Classifies eigenvalues with zero_tol = rel_zero_tol * scale.
SpectrumSummary classify(const std::vector<EigenPair>& eig, double rel_zero_tol = 1e-4);

/// Fraction of the unit field g captured by span{fields} (L2 projection norm).
double subspace_correlation(const Field& g, const std::vector<Field>& fields);

/// min <S'' e, e> / ||e||_{H1}^2 over e orthogonal to every field in
/// `constraints`; dense, N <= kDenseSpectrumLimit. Throws EigenFailure.
double coercivity_constant(const Field& base, const SolitonParams& p,
                           const std::vector<Field>& constraints);

/// The constraint set {i phi, phi_x, J'(phi)} used by the modulation.
std::vector<Field> modulation_constraints(const Field& base, double sigma);

}  // namespace gdnls
