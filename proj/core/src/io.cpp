#include "firm/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include <unistd.h>

namespace firm::io {

namespace {

template <typename U>
U to_little(U v) noexcept {
    if constexpr (std::endian::native == std::endian::big) {
        U r = 0;
        for (std::size_t i = 0; i < sizeof(U); ++i) {
            r = static_cast<U>((r << 8) | ((v >> (8 * i)) & 0xff));
        }
        return r;
    }
    return v;
}

template <typename F, typename U>
std::vector<char> encode(std::span<const double> values) {
    std::vector<char> bytes(values.size() * sizeof(U));
    for (std::size_t i = 0; i < values.size(); ++i) {
        const U u = to_little(std::bit_cast<U>(static_cast<F>(values[i])));
        std::memcpy(bytes.data() + i * sizeof(U), &u, sizeof(U));
    }
    return bytes;
}

template <typename F, typename U>
std::vector<double> decode(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    if (bytes.size() % sizeof(U) != 0) {
        throw std::runtime_error(path.string() + ": size is not a multiple of " + std::to_string(sizeof(U)));
    }
    std::vector<double> out(bytes.size() / sizeof(U));
    for (std::size_t i = 0; i < out.size(); ++i) {
        U u;
        std::memcpy(&u, bytes.data() + i * sizeof(U), sizeof(U));
        out[i] = static_cast<double>(std::bit_cast<F>(to_little(u)));
    }
    return out;
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path, std::span<const char> bytes) {
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        }
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) {
            throw std::runtime_error("failed writing " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw std::runtime_error("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
    write_file_atomic(path, std::span<const char>(text.data(), text.size()));
}

std::vector<char> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    return std::vector<char>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::string read_text(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    return std::string(bytes.begin(), bytes.end());
}

void write_f32(const std::filesystem::path& path, std::span<const double> values) {
    write_file_atomic(path, encode<float, std::uint32_t>(values));
}

void write_f64(const std::filesystem::path& path, std::span<const double> values) {
    write_file_atomic(path, encode<double, std::uint64_t>(values));
}

std::vector<double> read_f32(const std::filesystem::path& path) { return decode<float, std::uint32_t>(path); }
std::vector<double> read_f64(const std::filesystem::path& path) { return decode<double, std::uint64_t>(path); }

}  // namespace firm::io
