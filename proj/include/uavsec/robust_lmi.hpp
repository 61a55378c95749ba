#pragma once

#include "uavsec/convex_backend.hpp"
#include "uavsec/scenario.hpp"

namespace uavsec {

/// Squared 3-D distance from (x, y, H) to the region center, minus t.
double exact_c(double x, double y, double t, const EveRegion& eve, double altitude);

/// exact_c with x^2 and y^2 replaced by their tangents at (x_fea, y_fea).
/// Affine in (x, y, t) and never larger than exact_c.
double linearized_c(double x, double y, double t, double x_fea, double y_fea,
                    const EveRegion& eve, double altitude);

/// Numeric entries of the arrowhead matrix [[a,0,b],[0,a,c],[b,c,d]].
struct ArrowheadValues {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
};

/// S-procedure matrix for "every point of the disk is at squared distance
/// >= t": a = xi + 1, b = x_E - x, c = y_E - y, d = -Q^2 xi + exact_c.
ArrowheadValues s_procedure_matrix(double x, double y, double t, double xi, const EveRegion& eve,
                                   double altitude);

/// Same matrix with exact_c replaced by linearized_c around (x_fea, y_fea).
ArrowheadValues s_procedure_matrix_linearized(double x, double y, double t, double xi,
                                              double x_fea, double y_fea, const EveRegion& eve,
                                              double altitude);

/// Positive semidefiniteness of [[a,0,b],[0,a,c],[b,c,d]] by eigenvalues,
/// with tolerance -1e-9 * max(1, |a|, |d|) on the smallest eigenvalue.
bool psd_check(double a, double b, double c, double d);

/// Symmetric 3x3 matrix whose entries are affine in the decision variables.
struct AffineSym3 {
  cvx::Affine m00, m01, m02, m11, m12, m22;
};

/// A 3x3 block with the arrowhead sparsity pattern, entries affine in the
/// decision variables.
struct LmiBlock {
  cvx::Affine a;
  cvx::Affine b;
  cvx::Affine c;
  cvx::Affine d;

  ArrowheadValues eval(std::span<const double> z) const {
    return {a.eval(z), b.eval(z), c.eval(z), d.eval(z)};
  }
};

/// Throws std::logic_error unless m01 == 0 and m00 == m11 structurally.
LmiBlock make_lmi_block(const AffineSym3& m);

/// Exact rotated-cone form of the block's PSD condition: a >= 0, d >= 0,
/// a d >= b^2 + c^2 (equivalent because the leading 2x2 block is a*I).
cvx::RotatedCone as_rotated_soc(const LmiBlock& block);

/// Indices of the decision variables a robust block depends on.
struct BlockVars {
  std::size_t x;
  std::size_t y;
  std::size_t t;
  std::size_t xi;
};

/// Linearised S-procedure block around (x_fea, y_fea). All lengths are
/// divided by `length_scale` (squared lengths by its square) so the block
/// is expressed in the solver's units; xi is unitless and unaffected.
LmiBlock linearized_block(const BlockVars& vars, double x_fea, double y_fea, const EveRegion& eve,
                          double altitude, double length_scale);

/// Zero-radius case: linearized_c >= 0 as a linear constraint in (x, y, t).
cvx::LinearConstraint linearized_distance_constraint(std::size_t x_var, std::size_t y_var,
                                                     std::size_t t_var, double x_fea, double y_fea,
                                                     const EveRegion& eve, double altitude,
                                                     double length_scale);

}  // namespace uavsec
