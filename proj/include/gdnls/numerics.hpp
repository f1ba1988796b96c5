#pragma once

#include <complex>
#include <memory>

#include <Eigen/Dense>

#include "gdnls/errors.hpp"

namespace gdnls {

using Complex = std::complex<double>;
using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;

/// Uniform periodic grid on [-L, L) with N nodes, N a power of two >= 16.
///
/// Wavenumbers follow the FFT ordering k_m = (pi/L) m for m < N/2 and
/// (pi/L)(m - N) above; index N/2 is the single Nyquist mode.
class Grid {
 public:
  Grid(double half_length, Eigen::Index n);

  double half_length() const { return half_length_; }
  Eigen::Index size() const { return n_; }
  double dx() const { return dx_; }
  Eigen::Index nyquist() const { return n_ / 2; }
  const RealVector& nodes() const { return x_; }
  const RealVector& wavenumbers() const { return k_; }
  double max_wavenumber() const { return M_PI / dx_; }

  /// Wraps a coordinate into [-L, L).
  double wrap(double x) const;

  bool same_as(const Grid& other) const {
    return n_ == other.n_ && half_length_ == other.half_length_;
  }

 private:
  double half_length_;
  Eigen::Index n_;
  double dx_;
  RealVector x_;
  RealVector k_;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr make_grid(double half_length, Eigen::Index n);

/// Complex samples u(x_j) on a shared grid. Value type; copies share the grid.
class Field {
 public:
  Field() = default;  // empty: no grid, size 0
  explicit Field(GridPtr grid);
  Field(GridPtr grid, ComplexVector values);

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const ComplexVector& values() const { return values_; }
  ComplexVector& values() { return values_; }
  Eigen::Index size() const { return values_.size(); }

  Complex operator[](Eigen::Index j) const { return values_[j]; }
  Complex& operator[](Eigen::Index j) { return values_[j]; }

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(Complex s);

  bool all_finite() const { return values_.allFinite(); }

 private:
  GridPtr grid_;
  ComplexVector values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(Complex s, Field a);
Field operator*(Field a, Complex s);

void require_same_grid(const Field& a, const Field& b);
void require_finite(const Field& f, const char* where);

/// Forward / inverse DFT. inverse() includes the 1/N factor.
ComplexVector fft_forward(const ComplexVector& in);
ComplexVector fft_inverse(const ComplexVector& in);

/// Unnormalized transforms into preallocated storage of the same size (no 1/N
/// on the backward transform). `out` must not alias `in`.
void fft_forward_into(const ComplexVector& in, ComplexVector& out);
void fft_backward_into(const ComplexVector& in, ComplexVector& out);

/// Fourier-collocation derivative of order 1, 2 or 3.
/// Odd orders zero the Nyquist coefficient.
Field spectral_derivative(const Field& f, int order);

/// Applies a Fourier multiplier m(k) (FFT ordering) to f.
Field apply_multiplier(const Field& f, const ComplexVector& multiplier);

/// f(x - shift) by Fourier phase ramp; the Nyquist coefficient is multiplied
/// by cos(k_N shift) so that real fields stay real.
Field spectral_shift(const Field& f, double shift);

/// Cumulative integral F(x_j) = int_{-L}^{x_j} g for real periodic samples g.
/// The zero-mean part is integrated spectrally, the mean analytically.
RealVector cumulative_integral(const Grid& grid, const RealVector& g);

/// Real inner product <f, g> = Re sum f_j conj(g_j) dx.
double inner(const Field& f, const Field& g);

double l2_norm(const Field& f);
double h1_norm(const Field& f);

/// Pointwise |u|^p as a real vector.
RealVector abs_pow(const ComplexVector& u, double p);

/// Smallest L satisfying kappa L / 2 >= 36 for the soliton tail rule.
double truncation_half_length(double kappa);

}  // namespace gdnls
