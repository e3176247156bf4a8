#include "firm/toeplitz.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>

#include <nlohmann/json.hpp>

#include "fft.hpp"
#include "firm/io.hpp"

namespace firm {

namespace {

class Fnv1a {
public:
    void add_bytes(const void* p, std::size_t len) noexcept {
        const auto* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < len; ++i) {
            h_ ^= b[i];
            h_ *= 0x100000001b3ULL;
        }
    }
    template <typename T>
    void add(const T& v) noexcept {
        add_bytes(&v, sizeof(T));
    }
    [[nodiscard]] std::uint64_t value() const noexcept { return h_; }

private:
    std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

bool canonical_negative(int x, int y, int z) noexcept {
    return x < 0 || (x == 0 && (y < 0 || (y == 0 && z < 0)));
}

// Ker(-n) = conj(Ker(n)) written into the half space with negative lead index;
// Ker(0) is made real.
void fill_hermitian(ComplexGrid& k) {
    const int lo = k.lo(), hi = k.hi();
    for (int z = lo; z <= hi; ++z) {
        for (int y = lo; y <= hi; ++y) {
            for (int x = lo; x <= hi; ++x) {
                if (canonical_negative(x, y, z)) {
                    k(x, y, z) = std::conj(k(-x, -y, -z));
                }
            }
        }
    }
    k(0, 0, 0) = cplx(k(0, 0, 0).real(), 0.0);
}

std::vector<cplx> squared_weights(const ProjectionOperator& op) {
    const auto h = op.ctf_weights();
    std::vector<cplx> w(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        w[i] = cplx(h[i] * h[i], 0.0);
    }
    return w;
}

ComplexGrid kernel_doubled_grid(const ProjectionOperator& op) {
    const int n = op.n();
    const auto full = op.plan().type1(squared_weights(op), 2 * n);
    ComplexGrid k(2 * n - 1);
    for (int z = k.lo(); z <= k.hi(); ++z) {
        for (int y = k.lo(); y <= k.hi(); ++y) {
            for (int x = k.lo(); x <= k.hi(); ++x) {
                k(x, y, z) = full(x, y, z);
            }
        }
    }
    fill_hermitian(k);
    return k;
}

ComplexGrid kernel_octant_blocks(const ProjectionOperator& op) {
    const int n = op.n();
    const auto w2 = squared_weights(op);
    const auto points = op.plan().points();
    // Per axis the block shifted by +N/2 covers [0, N-1] and the block shifted
    // by 1 - N/2 covers [1-N, 0]; negation swaps them. Blocks with the x shift
    // positive are computed, the rest come from Hermitian symmetry.
    const int plus = n / 2;
    const int minus = 1 - n / 2;
    ComplexGrid k(2 * n - 1);
    std::vector<cplx> modulated(w2.size());
    for (int sy : {plus, minus}) {
        for (int sz : {plus, minus}) {
            const Vec3 shift{static_cast<double>(plus), static_cast<double>(sy), static_cast<double>(sz)};
            for (std::size_t j = 0; j < w2.size(); ++j) {
                modulated[j] = w2[j] * std::polar(1.0, dot(shift, points[j]));
            }
            const auto block = op.plan().type1(modulated, n);
            for (int z = block.lo(); z <= block.hi(); ++z) {
                for (int y = block.lo(); y <= block.hi(); ++y) {
                    for (int x = block.lo(); x <= block.hi(); ++x) {
                        k(x + plus, y + sy, z + sz) = block(x, y, z);
                    }
                }
            }
        }
    }
    fill_hermitian(k);
    return k;
}

}  // namespace

KernelMetadata describe(const ProjectionOperator& op) {
    Fnv1a h;
    h.add(op.n());
    for (const auto& r : op.rotations()) {
        for (double v : r.matrix()) {
            h.add(v);
        }
    }
    if (const auto& ctf = op.ctf()) {
        for (int g : ctf->image_group) {
            h.add(g);
        }
        for (const auto& p : ctf->groups) {
            for (double v : {p.defocus_um, p.cs_mm, p.lambda_pm, p.amplitude_contrast, p.b_factor, p.pixel_size}) {
                h.add(v);
            }
        }
    }
    KernelMetadata meta;
    meta.n = op.n();
    meta.m = op.m();
    meta.nufft_accuracy = op.plan().accuracy();
    meta.geometry_hash = h.value();
    meta.with_ctf = op.has_ctf();
    return meta;
}

ComplexGrid compute_kernel(const ProjectionOperator& op, KernelMethod method) {
    switch (method) {
        case KernelMethod::doubled_grid:
            return kernel_doubled_grid(op);
        case KernelMethod::octant_blocks:
        default:
            return kernel_octant_blocks(op);
    }
}

std::vector<int> embedding_index(int n) {
    std::vector<int> c(static_cast<std::size_t>(2 * n));
    for (int i = 1; i <= 2 * n; ++i) {
        if (i <= n) {
            c[i - 1] = i;
        } else if (i == n + 1) {
            c[i - 1] = 1;
        } else {
            c[i - 1] = i - 2 * n;
        }
    }
    return c;
}

ToeplitzKernel ToeplitzKernel::embed(const ComplexGrid& kernel, KernelMetadata metadata,
                                     std::optional<double> padding_value) {
    if (kernel.side() % 2 == 0 || kernel.side() < 7) {
        throw std::invalid_argument("kernel grid must have odd side 2N-1 with N >= 4");
    }
    const int n = (kernel.side() + 1) / 2;
    require_volume_side(n);

    double max_abs = 0.0;
    double max_herm = 0.0;
    for (int z = kernel.lo(); z <= kernel.hi(); ++z) {
        for (int y = kernel.lo(); y <= kernel.hi(); ++y) {
            for (int x = kernel.lo(); x <= kernel.hi(); ++x) {
                max_abs = std::max(max_abs, std::abs(kernel(x, y, z)));
                max_herm = std::max(max_herm, std::abs(kernel(-x, -y, -z) - std::conj(kernel(x, y, z))));
            }
        }
    }
    if (max_herm > 1e-6 * max_abs) {
        throw InconsistentKernel("kernel violates Ker(-n) = conj(Ker(n)): relative error " +
                                 std::to_string(max_herm / max_abs));
    }

    // 1-based slot c holds Ker(c - 1); slot N+1 is the padding.
    const auto c = embedding_index(n);
    const int side = 2 * n;
    detail::Fft3 fft(side);
    cplx* buf = fft.data();
    for (int k = 0; k < side; ++k) {
        for (int j = 0; j < side; ++j) {
            for (int i = 0; i < side; ++i) {
                const std::size_t at = fft.at(i, j, k);
                if (padding_value && (i == n || j == n || k == n)) {
                    buf[at] = cplx(*padding_value, 0.0);
                } else {
                    buf[at] = kernel(c[i] - 1, c[j] - 1, c[k] - 1);
                }
            }
        }
    }
    fft.forward();

    ToeplitzKernel out;
    out.n_ = n;
    out.metadata_ = metadata;
    out.spectrum_.resize(fft.size());
    double max_spec = 0.0, max_imag = 0.0, min_spec = 0.0;
    for (std::size_t i = 0; i < fft.size(); ++i) {
        max_spec = std::max(max_spec, std::abs(buf[i]));
        max_imag = std::max(max_imag, std::abs(buf[i].imag()));
        out.spectrum_[i] = buf[i].real();
    }
    double max_real = 0.0;
    for (double v : out.spectrum_) {
        max_real = std::max(max_real, v);
        min_spec = std::min(min_spec, v);
    }
    if (max_spec > 0.0 && max_imag > 1e-6 * max_spec) {
        throw InconsistentKernel("circulant spectrum is not real: relative imaginary part " +
                                 std::to_string(max_imag / max_spec));
    }
    out.diagnostics_.max_hermitian_error = max_abs > 0.0 ? max_herm / max_abs : 0.0;
    out.diagnostics_.max_spectrum_imag = max_spec > 0.0 ? max_imag / max_spec : 0.0;
    out.diagnostics_.min_spectrum = max_real > 0.0 ? min_spec / max_real : 0.0;
    return out;
}

ToeplitzKernel ToeplitzKernel::from_spectrum(int n, std::vector<double> spectrum, KernelMetadata metadata) {
    require_volume_side(n);
    if (spectrum.size() != static_cast<std::size_t>(8) * n * n * n) {
        throw std::invalid_argument("spectrum size does not match (2N)^3");
    }
    ToeplitzKernel out;
    out.n_ = n;
    out.spectrum_ = std::move(spectrum);
    out.metadata_ = metadata;
    double max_real = 0.0, min_spec = 0.0;
    for (double v : out.spectrum_) {
        max_real = std::max(max_real, v);
        min_spec = std::min(min_spec, v);
    }
    out.diagnostics_.min_spectrum = max_real > 0.0 ? min_spec / max_real : 0.0;
    return out;
}

ComplexGrid ToeplitzKernel::apply(const ComplexGrid& v) const {
    if (v.side() != n_) {
        throw std::invalid_argument("apply_normal: volume side " + std::to_string(v.side()) +
                                    " does not match kernel side " + std::to_string(n_));
    }
    const int side = 2 * n_;
    const int o = n_ / 2;
    detail::Fft3 fft(side);
    fft.zero();
    cplx* buf = fft.data();
    for (int z = v.lo(); z <= v.hi(); ++z) {
        for (int y = v.lo(); y <= v.hi(); ++y) {
            for (int x = v.lo(); x <= v.hi(); ++x) {
                buf[fft.at(x + o, y + o, z + o)] = v(x, y, z);
            }
        }
    }
    fft.forward();
    for (std::size_t i = 0; i < fft.size(); ++i) {
        buf[i] *= spectrum_[i];
    }
    fft.backward();
    const double scale = 1.0 / static_cast<double>(fft.size());
    ComplexGrid out(n_);
    for (int z = v.lo(); z <= v.hi(); ++z) {
        for (int y = v.lo(); y <= v.hi(); ++y) {
            for (int x = v.lo(); x <= v.hi(); ++x) {
                out(x, y, z) = buf[fft.at(x + o, y + o, z + o)] * scale;
            }
        }
    }
    return out;
}

RealGrid ToeplitzKernel::apply(const RealGrid& v) const { return real_part(apply(to_complex(v))); }

ToeplitzKernel ToeplitzKernel::scaled(double factor) const {
    ToeplitzKernel out = *this;
    for (double& s : out.spectrum_) {
        s *= factor;
    }
    return out;
}

ToeplitzKernel build_toeplitz_kernel(const ProjectionOperator& op, KernelMethod method) {
    return ToeplitzKernel::embed(compute_kernel(op, method), describe(op));
}

namespace {

nlohmann::json to_json(const KernelMetadata& m) {
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(m.geometry_hash));
    return {{"n", m.n},
            {"m", m.m},
            {"nufft_accuracy", m.nufft_accuracy},
            {"geometry_hash", hash},
            {"with_ctf", m.with_ctf},
            {"spectrum_format", "float64 little-endian, (2N)^3, x fastest"}};
}

KernelMetadata metadata_from_json(const nlohmann::json& j) {
    KernelMetadata m;
    m.n = j.at("n").get<int>();
    m.m = j.at("m").get<int>();
    m.nufft_accuracy = j.at("nufft_accuracy").get<double>();
    m.geometry_hash = std::stoull(j.at("geometry_hash").get<std::string>(), nullptr, 16);
    m.with_ctf = j.at("with_ctf").get<bool>();
    return m;
}

std::filesystem::path sidecar(const std::filesystem::path& path) {
    auto p = path;
    p += ".json";
    return p;
}

}  // namespace

void save_kernel(const std::filesystem::path& path, const ToeplitzKernel& kernel) {
    io::write_f64(path, kernel.spectrum());
    io::write_text_atomic(sidecar(path), to_json(kernel.metadata()).dump(2) + "\n");
}

std::optional<ToeplitzKernel> load_kernel(const std::filesystem::path& path, const KernelMetadata& expected) {
    if (!std::filesystem::exists(path) || !std::filesystem::exists(sidecar(path))) {
        return std::nullopt;
    }
    const auto stored = metadata_from_json(nlohmann::json::parse(io::read_text(sidecar(path))));
    if (!(stored == expected)) {
        throw KernelCacheMismatch("kernel cache " + path.string() + " was built for a different geometry");
    }
    auto spectrum = io::read_f64(path);
    if (spectrum.size() != static_cast<std::size_t>(8) * stored.n * stored.n * stored.n) {
        throw KernelCacheMismatch("kernel cache " + path.string() + " has the wrong size");
    }
    return ToeplitzKernel::from_spectrum(stored.n, std::move(spectrum), stored);
}

}  // namespace firm
