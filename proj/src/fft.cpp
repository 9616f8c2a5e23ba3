#include "kdvlab/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>

namespace kdvlab::fft {

namespace {

// FFTW plan creation is not thread safe and plans must outlive execution.
// Keep one forward/backward plan pair per transform size, created against
// fftw_malloc'd buffers so new-array execution sees the expected alignment.
struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

std::mutex plan_mutex;

PlanPair& plans_for(int n) {
  static std::map<int, PlanPair> cache;
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  fftw_complex* in = fftw_alloc_complex(n);
  fftw_complex* out = fftw_alloc_complex(n);
  if (!in || !out) throw std::bad_alloc();
  PlanPair pair;
  pair.fwd = fftw_plan_dft_1d(n, in, out, FFTW_FORWARD, FFTW_ESTIMATE);
  pair.bwd = fftw_plan_dft_1d(n, in, out, FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_free(in);
  fftw_free(out);
  if (!pair.fwd || !pair.bwd) throw std::runtime_error("fftw plan failed");
  return cache.emplace(n, pair).first->second;
}

std::vector<std::complex<double>> execute(
    const std::vector<std::complex<double>>& in, bool forward_dir) {
  const int n = static_cast<int>(in.size());
  PlanPair& pair = plans_for(n);

  fftw_complex* buf_in = fftw_alloc_complex(n);
  fftw_complex* buf_out = fftw_alloc_complex(n);
  if (!buf_in || !buf_out) throw std::bad_alloc();
  std::memcpy(buf_in, in.data(), sizeof(fftw_complex) * n);
  fftw_execute_dft(forward_dir ? pair.fwd : pair.bwd, buf_in, buf_out);

  std::vector<std::complex<double>> out(n);
  std::memcpy(reinterpret_cast<double*>(out.data()), buf_out,
              sizeof(fftw_complex) * n);
  fftw_free(buf_in);
  fftw_free(buf_out);
  return out;
}

}  // namespace

std::vector<std::complex<double>> forward(
    const std::vector<std::complex<double>>& in) {
  return execute(in, true);
}

std::vector<std::complex<double>> backward(
    const std::vector<std::complex<double>>& in) {
  return execute(in, false);
}

}  // namespace kdvlab::fft
