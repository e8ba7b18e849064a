#pragma once

#include <complex>
#include <span>
#include <vector>

// Minimal real<->complex DFT wrapper around FFTW. Plans are created once per
// size under a global planner lock (FFTW's planner is not thread safe) and
// executed through the new-array interface, so a single Dft instance can be
// shared by concurrent readers.

namespace kdvh::detail {

class Dft {
public:
  explicit Dft(int n);
  ~Dft();
  Dft(const Dft&) = delete;
  Dft& operator=(const Dft&) = delete;

  int size() const { return n_; }
  int spectrum_size() const { return n_ / 2 + 1; }

  // out has n/2+1 entries, unnormalized forward transform
  void forward(std::span<const double> in, std::span<std::complex<double>> out) const;
  // inverse of forward including the 1/n normalization; destroys `in`
  void backward(std::span<std::complex<double>> in, std::span<double> out) const;

private:
  int n_;
  void* plan_r2c_ = nullptr;
  void* plan_c2r_ = nullptr;
};

} // namespace kdvh::detail
