#include "lct/fft.hpp"

#include <fftw3.h>

#include <mutex>

#include "lct/error.hpp"

namespace lct::fft {

namespace {
// FFTW planning is not thread safe; execution of distinct plans is.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

void dft(std::vector<cplx>& data, std::span<const int> dims, bool inverse) {
  std::size_t total = 1;
  for (int d : dims) total *= static_cast<std::size_t>(d);
  if (total != data.size()) throw Rejected("fft", "dims do not match data size");
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard lock(plan_mutex());
    plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), p, p, inverse ? FFTW_BACKWARD : FFTW_FORWARD,
                         FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard lock(plan_mutex());
  fftw_destroy_plan(plan);
}

std::vector<cplx> rdft(const std::vector<double>& in, std::span<const int> dims) {
  std::size_t total = 1, out_total = 1;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    total *= static_cast<std::size_t>(dims[i]);
    out_total *= static_cast<std::size_t>(i + 1 == dims.size() ? dims[i] / 2 + 1 : dims[i]);
  }
  if (total != in.size()) throw Rejected("fft", "dims do not match data size");
  std::vector<double> work(in);
  std::vector<cplx> out(out_total);
  fftw_plan plan;
  {
    std::lock_guard lock(plan_mutex());
    plan = fftw_plan_dft_r2c(static_cast<int>(dims.size()), dims.data(), work.data(),
                             reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard lock(plan_mutex());
  fftw_destroy_plan(plan);
  return out;
}

}  // namespace lct::fft
