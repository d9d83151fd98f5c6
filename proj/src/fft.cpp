#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <memory>
#include <mutex>

namespace backaction::detail {
namespace {

// FFTW's planner is not reentrant; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

template <typename T>
struct FftwFree {
  void operator()(T* p) const noexcept { fftw_free(p); }
};

template <typename T>
using fftw_buffer = std::unique_ptr<T[], FftwFree<T>>;

template <typename T>
fftw_buffer<T> allocate(std::size_t n) {
  return fftw_buffer<T>(static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(n, 1))));
}

class Plan {
public:
  explicit Plan(fftw_plan p) : plan_(p) {}
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  void execute() const { fftw_execute(plan_); }

private:
  fftw_plan plan_;
};

} // namespace

std::vector<std::complex<double>> real_dft(std::span<const double> x) {
  const std::size_t n = x.size();
  const std::size_t half = n / 2 + 1;
  auto in = allocate<double>(n);
  auto out = allocate<fftw_complex>(half);

  std::unique_ptr<Plan> plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = std::make_unique<Plan>(
        fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE));
  }
  std::copy(x.begin(), x.end(), in.get());
  plan->execute();

  std::vector<std::complex<double>> result(n);
  for (std::size_t m = 0; m < half; ++m) {
    result[m] = {out[m][0], out[m][1]};
  }
  for (std::size_t m = half; m < n; ++m) {
    result[m] = std::conj(result[n - m]);
  }
  // DC and Nyquist bins of a real signal are real.
  result[0].imag(0.0);
  if (n % 2 == 0) {
    result[n / 2].imag(0.0);
  }
  return result;
}

std::vector<std::complex<double>> complex_idft(std::span<const std::complex<double>> x) {
  const std::size_t n = x.size();
  auto in = allocate<fftw_complex>(n);
  auto out = allocate<fftw_complex>(n);

  std::unique_ptr<Plan> plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = std::make_unique<Plan>(fftw_plan_dft_1d(static_cast<int>(n), in.get(), out.get(),
                                                   FFTW_BACKWARD, FFTW_ESTIMATE));
  }
  for (std::size_t m = 0; m < n; ++m) {
    in[m][0] = x[m].real();
    in[m][1] = x[m].imag();
  }
  plan->execute();

  std::vector<std::complex<double>> result(n);
  for (std::size_t k = 0; k < n; ++k) {
    result[k] = {out[k][0], out[k][1]};
  }
  return result;
}

} // namespace backaction::detail
