#include "fft.hpp"

#include <algorithm>
#include <mutex>
#include <new>

namespace firm::detail {

namespace {

// FFTW's planner is not reentrant; execution of distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

template <typename T>
T* alloc(std::size_t count) {
    void* p = fftw_malloc(sizeof(T) * count);
    if (p == nullptr) {
        throw std::bad_alloc();
    }
    return static_cast<T*>(p);
}

}  // namespace

Fft3::Fft3(int side)
    : side_(side), size_(static_cast<std::size_t>(side) * side * side), buf_(alloc<fftw_complex>(size_)) {
    std::lock_guard lock(planner_mutex());
    fwd_ = fftw_plan_dft_3d(side, side, side, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_3d(side, side, side, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
}

Fft3::~Fft3() {
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
    }
    fftw_free(buf_);
}

void Fft3::zero() noexcept { std::fill_n(data(), size_, std::complex<double>{}); }
void Fft3::forward() noexcept { fftw_execute(fwd_); }
void Fft3::backward() noexcept { fftw_execute(bwd_); }

Fft2Real::Fft2Real(int n)
    : n_(n),
      in_(alloc<double>(static_cast<std::size_t>(n) * n)),
      out_(alloc<fftw_complex>(static_cast<std::size_t>(n) * (n / 2 + 1))) {
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_r2c_2d(n, n, in_, out_, FFTW_ESTIMATE);
}

Fft2Real::~Fft2Real() {
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan_);
    }
    fftw_free(in_);
    fftw_free(out_);
}

void Fft2Real::execute() noexcept { fftw_execute(plan_); }

Fft2RealInverse::Fft2RealInverse(int n)
    : n_(n),
      in_(alloc<fftw_complex>(static_cast<std::size_t>(n) * (n / 2 + 1))),
      out_(alloc<double>(static_cast<std::size_t>(n) * n)) {
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_c2r_2d(n, n, in_, out_, FFTW_ESTIMATE);
}

Fft2RealInverse::~Fft2RealInverse() {
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan_);
    }
    fftw_free(in_);
    fftw_free(out_);
}

void Fft2RealInverse::execute() noexcept { fftw_execute(plan_); }

}  // namespace firm::detail
