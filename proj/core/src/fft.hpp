#pragma once

#include <complex>
#include <cstddef>

#include <fftw3.h>

namespace firm::detail {

/// In-place 3D complex FFT over an owned, FFTW-aligned cube buffer.
/// forward uses exp(-2πi·), backward exp(+2πi·); neither is normalized.
class Fft3 {
public:
    explicit Fft3(int side);
    ~Fft3();
    Fft3(const Fft3&) = delete;
    Fft3& operator=(const Fft3&) = delete;

    [[nodiscard]] int side() const noexcept { return side_; }
    [[nodiscard]] std::size_t size() const noexcept { return size_; }
    [[nodiscard]] std::complex<double>* data() noexcept { return reinterpret_cast<std::complex<double>*>(buf_); }

    /// Index of wrapped coordinates (x fastest).
    [[nodiscard]] std::size_t at(int x, int y, int z) const noexcept {
        const auto s = static_cast<std::size_t>(side_);
        return (static_cast<std::size_t>(wrap(z)) * s + static_cast<std::size_t>(wrap(y))) * s +
               static_cast<std::size_t>(wrap(x));
    }
    [[nodiscard]] int wrap(int i) const noexcept {
        const int r = i % side_;
        return r < 0 ? r + side_ : r;
    }

    void zero() noexcept;
    void forward() noexcept;
    void backward() noexcept;

private:
    int side_;
    std::size_t size_;
    fftw_complex* buf_;
    fftw_plan fwd_;
    fftw_plan bwd_;
};

/// 2D real-to-complex FFT of one n×n image (x fastest). Output holds n rows of
/// n/2+1 columns for kx ≥ 0.
class Fft2Real {
public:
    explicit Fft2Real(int n);
    ~Fft2Real();
    Fft2Real(const Fft2Real&) = delete;
    Fft2Real& operator=(const Fft2Real&) = delete;

    [[nodiscard]] double* input() noexcept { return in_; }
    [[nodiscard]] const std::complex<double>* output() const noexcept {
        return reinterpret_cast<const std::complex<double>*>(out_);
    }
    void execute() noexcept;

private:
    int n_;
    double* in_;
    fftw_complex* out_;
    fftw_plan plan_;
};

/// 2D complex-to-real inverse FFT (unnormalized), counterpart of Fft2Real.
class Fft2RealInverse {
public:
    explicit Fft2RealInverse(int n);
    ~Fft2RealInverse();
    Fft2RealInverse(const Fft2RealInverse&) = delete;
    Fft2RealInverse& operator=(const Fft2RealInverse&) = delete;

    [[nodiscard]] std::complex<double>* input() noexcept { return reinterpret_cast<std::complex<double>*>(in_); }
    [[nodiscard]] const double* output() const noexcept { return out_; }
    void execute() noexcept;

private:
    int n_;
    fftw_complex* in_;
    double* out_;
    fftw_plan plan_;
};

}  // namespace firm::detail
