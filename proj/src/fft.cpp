#include "ealab/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace ealab::fft {
namespace {

struct PlanKey {
  int dim;
  int n;
  int sign;
  auto operator<=>(const PlanKey&) const = default;
};

/// Plans are created once per (dim, n, direction) with FFTW_ESTIMATE for
/// run-to-run determinism and FFTW_UNALIGNED so they can execute on any
/// caller-owned buffer.
fftw_plan plan_for(const Grid& grid, int sign) {
  static std::map<PlanKey, fftw_plan> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  PlanKey key{grid.dim(), grid.n(), sign};
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  std::vector<cdouble> scratch(grid.points());
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  fftw_plan plan = grid.dim() == 2
                       ? fftw_plan_dft_2d(grid.n(), grid.n(), buf, buf, sign, flags)
                       : fftw_plan_dft_3d(grid.n(), grid.n(), grid.n(), buf, buf,
                                          sign, flags);
  if (!plan) throw std::runtime_error("fft: plan creation failed");
  cache.emplace(key, plan);
  return plan;
}

}  // namespace

void forward(const Grid& grid, cdouble* data) {
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plan_for(grid, FFTW_FORWARD), buf, buf);
  const double scale = 1.0 / static_cast<double>(grid.points());
  for (std::size_t i = 0; i < grid.points(); ++i) data[i] *= scale;
}

void inverse(const Grid& grid, cdouble* data) {
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plan_for(grid, FFTW_BACKWARD), buf, buf);
}

std::vector<cdouble> forward_real(const Grid& grid, const double* phys) {
  std::vector<cdouble> out(grid.points());
  for (std::size_t i = 0; i < grid.points(); ++i) out[i] = phys[i];
  forward(grid, out.data());
  return out;
}

std::vector<double> inverse_real(const Grid& grid, const cdouble* spec) {
  std::vector<cdouble> tmp(spec, spec + grid.points());
  inverse(grid, tmp.data());
  std::vector<double> out(grid.points());
  for (std::size_t i = 0; i < grid.points(); ++i) out[i] = tmp[i].real();
  return out;
}

}  // namespace ealab::fft
