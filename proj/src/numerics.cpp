#include "gdnls/numerics.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <utility>

namespace gdnls {

namespace {

bool is_power_of_two(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

// FFTW planning is not thread safe; execution with the new-array interface is.
// Plans are created once per (size, direction) and kept for the process.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int n, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_pair(n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    ComplexVector a(n), b(n);
    fftw_plan p = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(a.data()),
                                   reinterpret_cast<fftw_complex*>(b.data()), sign,
                                   FFTW_ESTIMATE);
    plans_.emplace(key, p);
    return p;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

void execute_into(const ComplexVector& in, ComplexVector& out, int sign) {
  const int n = static_cast<int>(in.size());
  if (out.size() != in.size()) out.resize(n);
  fftw_plan plan = PlanCache::instance().get(n, sign);
  // out-of-place complex plans leave the input intact; Eigen heap storage has
  // the 16-byte alignment the plans were made with
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

ComplexVector execute(const ComplexVector& in, int sign) {
  ComplexVector out(in.size());
  execute_into(in, out, sign);
  return out;
}

}  // namespace

Grid::Grid(double half_length, Eigen::Index n) : half_length_(half_length), n_(n) {
  if (!(half_length > 0.0) || !std::isfinite(half_length))
    throw InvalidArgument("grid half-length must be positive and finite");
  if (n < 16 || !is_power_of_two(n))
    throw InvalidArgument("grid size must be a power of two >= 16, got " + std::to_string(n));
  dx_ = 2.0 * half_length / static_cast<double>(n);
  x_.resize(n);
  k_.resize(n);
  const double dk = M_PI / half_length;
  for (Eigen::Index j = 0; j < n; ++j) {
    x_[j] = -half_length + static_cast<double>(j) * dx_;
    const Eigen::Index m = j < n / 2 ? j : j - n;
    k_[j] = dk * static_cast<double>(m);
  }
}

double Grid::wrap(double x) const {
  const double period = 2.0 * half_length_;
  double r = std::fmod(x + half_length_, period);
  if (r < 0.0) r += period;
  return r - half_length_;
}

GridPtr make_grid(double half_length, Eigen::Index n) {
  return std::make_shared<const Grid>(half_length, n);
}

Field::Field(GridPtr grid) : grid_(std::move(grid)) {
  values_ = ComplexVector::Zero(grid_->size());
}

Field::Field(GridPtr grid, ComplexVector values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_->size())
    throw GridMismatch("field length " + std::to_string(values_.size()) +
                       " does not match grid size " + std::to_string(grid_->size()));
}

Field& Field::operator+=(const Field& other) {
  require_same_grid(*this, other);
  values_ += other.values_;
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_same_grid(*this, other);
  values_ -= other.values_;
  return *this;
}

Field& Field::operator*=(Complex s) {
  values_ *= s;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(Complex s, Field a) { return a *= s; }
Field operator*(Field a, Complex s) { return a *= s; }

void require_same_grid(const Field& a, const Field& b) {
  if (a.grid_ptr() != b.grid_ptr() && !a.grid().same_as(b.grid()))
    throw GridMismatch("fields live on different grids");
}

void require_finite(const Field& f, const char* where) {
  if (!f.all_finite()) throw NonFiniteInput(std::string(where) + ": field contains NaN/Inf");
}

ComplexVector fft_forward(const ComplexVector& in) { return execute(in, FFTW_FORWARD); }

void fft_forward_into(const ComplexVector& in, ComplexVector& out) { execute_into(in, out, FFTW_FORWARD); }

void fft_backward_into(const ComplexVector& in, ComplexVector& out) {
  execute_into(in, out, FFTW_BACKWARD);
}

ComplexVector fft_inverse(const ComplexVector& in) {
  ComplexVector out = execute(in, FFTW_BACKWARD);
  out /= static_cast<double>(in.size());
  return out;
}

Field apply_multiplier(const Field& f, const ComplexVector& multiplier) {
  ComplexVector spec = fft_forward(f.values());
  spec.array() *= multiplier.array();
  return Field(f.grid_ptr(), fft_inverse(spec));
}

Field spectral_derivative(const Field& f, int order) {
  if (order < 1 || order > 3) throw InvalidArgument("derivative order must be 1, 2 or 3");
  require_finite(f, "spectral_derivative");
  const RealVector& k = f.grid().wavenumbers();
  ComplexVector m(k.size());
  const Complex ik(0.0, 1.0);
  for (Eigen::Index j = 0; j < k.size(); ++j) m[j] = std::pow(ik * k[j], order);
  if (order % 2 == 1) m[f.grid().nyquist()] = 0.0;
  return apply_multiplier(f, m);
}

Field spectral_shift(const Field& f, double shift) {
  const Grid& g = f.grid();
  const RealVector& k = g.wavenumbers();
  ComplexVector m(k.size());
  for (Eigen::Index j = 0; j < k.size(); ++j) m[j] = std::polar(1.0, -k[j] * shift);
  m[g.nyquist()] = std::cos(k[g.nyquist()] * shift);
  return apply_multiplier(f, m);
}

RealVector cumulative_integral(const Grid& grid, const RealVector& g) {
  const Eigen::Index n = grid.size();
  ComplexVector spec = fft_forward(g.cast<Complex>());
  const double mean = spec[0].real() / static_cast<double>(n);
  const RealVector& k = grid.wavenumbers();
  spec[0] = 0.0;
  spec[grid.nyquist()] = 0.0;
  for (Eigen::Index j = 1; j < n; ++j)
    if (j != grid.nyquist()) spec[j] /= Complex(0.0, k[j]);
  RealVector F = fft_inverse(spec).real();
  F.array() += mean * (grid.nodes().array() + grid.half_length());
  F.array() -= F[0];
  return F;
}

double inner(const Field& f, const Field& g) {
  require_same_grid(f, g);
  return (f.values().array() * g.values().array().conjugate()).real().sum() * f.grid().dx();
}

double l2_norm(const Field& f) { return std::sqrt(inner(f, f)); }

double h1_norm(const Field& f) {
  require_finite(f, "h1_norm");
  const Field df = spectral_derivative(f, 1);
  return std::sqrt(inner(f, f) + inner(df, df));
}

RealVector abs_pow(const ComplexVector& u, double p) {
  return u.array().abs().pow(p).matrix();
}

double truncation_half_length(double kappa) { return 72.0 / kappa; }

}  // namespace gdnls
