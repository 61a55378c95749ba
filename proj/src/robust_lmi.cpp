#include "uavsec/robust_lmi.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uavsec {

double exact_c(double x, double y, double t, const EveRegion& eve, double altitude) {
  const double xe = eve.center_x;
  const double ye = eve.center_y;
  return x * x - 2.0 * xe * x + xe * xe + y * y - 2.0 * ye * y + ye * ye + altitude * altitude - t;
}

double linearized_c(double x, double y, double t, double x_fea, double y_fea, const EveRegion& eve,
                    double altitude) {
  const double xe = eve.center_x;
  const double ye = eve.center_y;
  return -x_fea * x_fea + 2.0 * x_fea * x - 2.0 * xe * x + xe * xe - y_fea * y_fea +
         2.0 * y_fea * y - 2.0 * ye * y + ye * ye + altitude * altitude - t;
}

ArrowheadValues s_procedure_matrix(double x, double y, double t, double xi, const EveRegion& eve,
                                   double altitude) {
  const double q2 = eve.radius * eve.radius;
  return {xi + 1.0, eve.center_x - x, eve.center_y - y, -q2 * xi + exact_c(x, y, t, eve, altitude)};
}

ArrowheadValues s_procedure_matrix_linearized(double x, double y, double t, double xi,
                                              double x_fea, double y_fea, const EveRegion& eve,
                                              double altitude) {
  const double q2 = eve.radius * eve.radius;
  return {xi + 1.0, eve.center_x - x, eve.center_y - y,
          -q2 * xi + linearized_c(x, y, t, x_fea, y_fea, eve, altitude)};
}

bool psd_check(double a, double b, double c, double d) {
  Eigen::Matrix3d m;
  m << a, 0.0, b, 0.0, a, c, b, c, d;
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(m, Eigen::EigenvaluesOnly);
  const double tol = 1e-9 * std::max({1.0, std::abs(a), std::abs(d)});
  return eig.eigenvalues().minCoeff() >= -tol;
}

namespace {

cvx::Affine canonical(const cvx::Affine& a) {
  cvx::Affine out;
  out.constant = a.constant;
  for (const auto& t : a.terms) {
    auto it = std::find_if(out.terms.begin(), out.terms.end(),
                           [&](const cvx::Term& o) { return o.var == t.var; });
    if (it == out.terms.end())
      out.terms.push_back(t);
    else
      it->coef += t.coef;
  }
  std::erase_if(out.terms, [](const cvx::Term& t) { return t.coef == 0.0; });
  std::sort(out.terms.begin(), out.terms.end(),
            [](const cvx::Term& l, const cvx::Term& r) { return l.var < r.var; });
  return out;
}

bool same(const cvx::Affine& l, const cvx::Affine& r) {
  const cvx::Affine a = canonical(l);
  const cvx::Affine b = canonical(r);
  if (a.constant != b.constant || a.terms.size() != b.terms.size()) return false;
  for (std::size_t i = 0; i < a.terms.size(); ++i)
    if (a.terms[i].var != b.terms[i].var || a.terms[i].coef != b.terms[i].coef) return false;
  return true;
}

}  // namespace

LmiBlock make_lmi_block(const AffineSym3& m) {
  const cvx::Affine off = canonical(m.m01);
  if (!off.terms.empty() || off.constant != 0.0)
    throw std::logic_error("LMI block: (0,1) entry must be identically zero");
  if (!same(m.m00, m.m11))
    throw std::logic_error("LMI block: leading 2x2 block must be a scaled identity");
  return {m.m00, m.m02, m.m12, m.m22};
}

cvx::RotatedCone as_rotated_soc(const LmiBlock& block) {
  return {block.a, block.d, {block.b, block.c}};
}

LmiBlock linearized_block(const BlockVars& v, double x_fea, double y_fea, const EveRegion& eve,
                          double altitude, double length_scale) {
  const double s = length_scale;
  const double xe = eve.center_x / s;
  const double ye = eve.center_y / s;
  const double xf = x_fea / s;
  const double yf = y_fea / s;
  const double h = altitude / s;
  const double q2 = (eve.radius / s) * (eve.radius / s);

  AffineSym3 m;
  m.m00 = {{{v.xi, 1.0}}, 1.0};
  m.m11 = m.m00;
  m.m01 = {};
  m.m02 = {{{v.x, -1.0}}, xe};
  m.m12 = {{{v.y, -1.0}}, ye};
  // -Q^2 xi + linearized_c(x, y, t)
  m.m22 = {{{v.x, 2.0 * (xf - xe)}, {v.y, 2.0 * (yf - ye)}, {v.t, -1.0}, {v.xi, -q2}},
           xe * xe - xf * xf + ye * ye - yf * yf + h * h};
  return make_lmi_block(m);
}

cvx::LinearConstraint linearized_distance_constraint(std::size_t x_var, std::size_t y_var,
                                                     std::size_t t_var, double x_fea, double y_fea,
                                                     const EveRegion& eve, double altitude,
                                                     double length_scale) {
  const double s = length_scale;
  const double xe = eve.center_x / s;
  const double ye = eve.center_y / s;
  const double xf = x_fea / s;
  const double yf = y_fea / s;
  const double h = altitude / s;
  return {{{{x_var, 2.0 * (xf - xe)}, {y_var, 2.0 * (yf - ye)}, {t_var, -1.0}},
           xe * xe - xf * xf + ye * ye - yf * yf + h * h}};
}

}  // namespace uavsec
