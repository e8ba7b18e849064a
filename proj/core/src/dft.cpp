#include "dft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace kdvh::detail {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
} // namespace

Dft::Dft(int n) : n_(n) {
  if (n < 2) throw std::invalid_argument("Dft: transform size must be >= 2");
  std::lock_guard<std::mutex> lock(planner_mutex());
  // Plan on scratch buffers; FFTW_UNALIGNED lets us execute on arbitrary
  // caller-provided storage later.
  std::vector<double> re(static_cast<std::size_t>(n));
  std::vector<std::complex<double>> sp(static_cast<std::size_t>(n / 2 + 1));
  plan_r2c_ = fftw_plan_dft_r2c_1d(n, re.data(), reinterpret_cast<fftw_complex*>(sp.data()),
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
  plan_c2r_ = fftw_plan_dft_c2r_1d(n, reinterpret_cast<fftw_complex*>(sp.data()), re.data(),
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!plan_r2c_ || !plan_c2r_) throw std::runtime_error("Dft: FFTW plan creation failed");
}

Dft::~Dft() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (plan_r2c_) fftw_destroy_plan(static_cast<fftw_plan>(plan_r2c_));
  if (plan_c2r_) fftw_destroy_plan(static_cast<fftw_plan>(plan_c2r_));
}

void Dft::forward(std::span<const double> in, std::span<std::complex<double>> out) const {
  fftw_execute_dft_r2c(static_cast<fftw_plan>(plan_r2c_),
                       const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void Dft::backward(std::span<std::complex<double>> in, std::span<double> out) const {
  fftw_execute_dft_c2r(static_cast<fftw_plan>(plan_c2r_),
                       reinterpret_cast<fftw_complex*>(in.data()), out.data());
  const double scale = 1.0 / n_;
  for (auto& x : out) x *= scale;
}

} // namespace kdvh::detail
