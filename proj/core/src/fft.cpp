#include "bml/fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "bml/error.hpp"

namespace bml {

namespace {

struct PlanPair {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [n, p] : plans_) {
      fftw_destroy_plan(p.r2c);
      fftw_destroy_plan(p.c2r);
    }
  }

  const PlanPair& get(std::size_t n) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    const int ni = static_cast<int>(n);
    const std::size_t nc = n * (n / 2 + 1);
    double* real = fftw_alloc_real(n * n);
    fftw_complex* spec = fftw_alloc_complex(nc);
    PlanPair p;
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    p.r2c = fftw_plan_dft_r2c_2d(ni, ni, real, spec, flags);
    p.c2r = fftw_plan_dft_c2r_2d(ni, ni, spec, real, flags);
    fftw_free(real);
    fftw_free(spec);
    if (!p.r2c || !p.c2r) throw InternalError("FFTW failed to create a plan");
    return plans_.emplace(n, p).first->second;
  }

 private:
  std::mutex mutex_;
  std::map<std::size_t, PlanPair> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

}  // namespace

void fft_r2c(std::size_t n, std::span<const double> in, std::span<std::complex<double>> out) {
  if (in.size() != n * n || out.size() != n * (n / 2 + 1)) {
    throw DomainError("fft_r2c: buffer sizes do not match transform size");
  }
  const auto& plan = plan_cache().get(n);
  // r2c preserves its input for the plans built above.
  fftw_execute_dft_r2c(plan.r2c, const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void fft_c2r(std::size_t n, std::span<const std::complex<double>> in, std::span<double> out) {
  if (in.size() != n * (n / 2 + 1) || out.size() != n * n) {
    throw DomainError("fft_c2r: buffer sizes do not match transform size");
  }
  const auto& plan = plan_cache().get(n);
  // c2r destroys its input.
  std::vector<std::complex<double>> scratch(in.begin(), in.end());
  fftw_execute_dft_c2r(plan.c2r, reinterpret_cast<fftw_complex*>(scratch.data()), out.data());
}

SpectralField forward_transform(const RealField& f) {
  if (!f.all_finite()) throw DomainError("forward_transform: non-finite sample in '" + f.label() + "'");
  const Grid& g = f.grid();
  SpectralField out(g);
  fft_r2c(g.n(), f.values(), out.coeffs());
  out *= 1.0 / static_cast<double>(g.size());
  return out;
}

RealField inverse_transform(const SpectralField& f, std::string label) {
  const Grid& g = f.grid();
  RealField out(g, std::move(label));
  fft_c2r(g.n(), f.coeffs(), out.values());
  return out;
}

}  // namespace bml
