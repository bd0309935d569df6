#pragma once

// Independent reference computations for the unit and acceptance tests.
// None of these call the library routine they are used to check.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kC0 = 2.99792458e8;

/// Eq. (H) written out with explicit cross products.
inline CVec3 green_field(const Vec3& src, const Vec3& obs, const Vec3& e, double k) {
  const Vec3 R = obs - src;
  const double r = R.norm();
  const Vec3 rh = R / r;
  const Vec3 transverse = rh.cross(e.cross(rh));
  const Vec3 dipolar = 3.0 * rh * rh.dot(e) - e;
  const cplx pre = std::exp(cplx(0.0, -k * r)) / (4.0 * kPi * r);
  const cplx near = 1.0 / (r * r) - cplx(0.0, k / r);
  CVec3 out;
  for (int i = 0; i < 3; ++i) out(i) = pre * (k * k * transverse(i) + near * dipolar(i));
  return out;
}

/// M = sum_j (D Xi)^j D F, truncated once terms fall below 1e-18 of the sum.
inline CMat neumann_operator(const RVec& m, const CMat& xi, const CMat& f) {
  const CMat dxi = m.cast<cplx>().asDiagonal() * xi;
  CMat term = m.cast<cplx>().asDiagonal() * f;
  CMat sum = term;
  for (int j = 0; j < 2000; ++j) {
    term = dxi * term;
    sum += term;
    if (term.norm() <= 1e-18 * sum.norm()) break;
  }
  return sum;
}

/// Random zero-diagonal coupling with spectral norm `radius` (so the
/// spectral radius of D(m) Xi is at most `radius` for m in [0,1]).
inline CMat random_coupling(std::mt19937_64& rng, int n, double radius) {
  std::normal_distribution<double> g;
  CMat xi(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) xi(i, j) = i == j ? cplx(0.0) : cplx(g(rng), g(rng));
  }
  const double s = xi.jacobiSvd().singularValues()(0);
  if (s > 0.0) xi *= radius / s;
  return xi;
}

inline CMat random_phases(std::mt19937_64& rng, int rows, int cols) {
  std::uniform_real_distribution<double> ph(0.0, 2.0 * kPi);
  CMat f(rows, cols);
  for (Eigen::Index i = 0; i < f.size(); ++i) f.data()[i] = std::polar(1.0, ph(rng));
  return f;
}

inline CMat random_complex(std::mt19937_64& rng, int rows, int cols, double scale = 1.0) {
  std::normal_distribution<double> g;
  CMat a(rows, cols);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = scale * cplx(g(rng), g(rng));
  return a;
}

inline RVec random_unit_box(std::mt19937_64& rng, int n, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  RVec m(n);
  for (int i = 0; i < n; ++i) m(i) = u(rng);
  return m;
}

/// gamma_k = |hbar_k v_k|^2 / (sigma2 + sum_{i != k} |hbar_k v_i|^2), scalar loops.
inline double sinr(const CMat& hbar, const CMat& v, int k, double sigma2) {
  double signal = 0.0;
  double interference = 0.0;
  for (Eigen::Index i = 0; i < v.cols(); ++i) {
    cplx z = 0.0;
    for (Eigen::Index n = 0; n < hbar.cols(); ++n) z += hbar(k, n) * v(n, i);
    if (i == k) {
      signal = std::norm(z);
    } else {
      interference += std::norm(z);
    }
  }
  return signal / (sigma2 + interference);
}

/// e(g) = E|conj(g) y - s|^2 for the scalar link model, written as
/// |g|^2 (interference + noise) + |conj(g) z_kk - 1|^2 so it stays accurate at high SINR.
inline double mse(const CMat& hbar, const CMat& v, int k, double sigma2, cplx g) {
  double other = sigma2;
  cplx zkk = 0.0;
  for (Eigen::Index i = 0; i < v.cols(); ++i) {
    const cplx z = (hbar.row(k) * v.col(i))(0);
    if (i == k) {
      zkk = z;
    } else {
      other += std::norm(z);
    }
  }
  return std::norm(g) * other + std::norm(std::conj(g) * zkk - 1.0);
}

/// Newton iteration on (Re g, Im g) with finite-difference derivatives.
inline double min_mse_newton(const CMat& hbar, const CMat& v, int k, double sigma2) {
  auto f = [&](double x, double y) { return mse(hbar, v, k, sigma2, cplx(x, y)); };
  double x = 0.0;
  double y = 0.0;
  for (int it = 0; it < 20; ++it) {
    const double h = 1e-4 * (1.0 + std::abs(x) + std::abs(y));
    const double gx = (f(x + h, y) - f(x - h, y)) / (2 * h);
    const double gy = (f(x, y + h) - f(x, y - h)) / (2 * h);
    const double hxx = (f(x + h, y) - 2 * f(x, y) + f(x - h, y)) / (h * h);
    const double hyy = (f(x, y + h) - 2 * f(x, y) + f(x, y - h)) / (h * h);
    const double hxy = (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h)) / (4 * h * h);
    const double det = hxx * hyy - hxy * hxy;
    if (!(det > 0.0)) break;
    const double dx = (hyy * gx - hxy * gy) / det;
    const double dy = (hxx * gy - hxy * gx) / det;
    x -= dx;
    y -= dy;
    if (std::abs(dx) + std::abs(dy) < 1e-14) break;
  }
  return f(x, y);
}

/// Index of the maximum of |sum_n p_n exp(+j k x_n cos(phi))|^2 over a degree grid.
inline int array_factor_argmax(const CVec& p, const std::vector<double>& x, double k,
                               const std::vector<double>& phi_deg) {
  int best = 0;
  double best_val = -1.0;
  for (std::size_t a = 0; a < phi_deg.size(); ++a) {
    const double c = std::cos(phi_deg[a] * kPi / 180.0);
    cplx s = 0.0;
    for (std::size_t n = 0; n < x.size(); ++n) s += p(static_cast<Eigen::Index>(n)) * std::exp(cplx(0.0, k * x[n] * c));
    if (std::norm(s) > best_val) {
      best_val = std::norm(s);
      best = static_cast<int>(a);
    }
  }
  return best;
}

}  // namespace oracle
