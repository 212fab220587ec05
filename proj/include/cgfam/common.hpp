#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cgfam {

/// Failure categories; the CLI maps each to its exit code.
enum class ErrorKind : int {
    usage = 1,
    input_format = 2,
    hash_mismatch = 3,
    numeric = 4,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct FormatError : Error {
    explicit FormatError(const std::string& what) : Error(ErrorKind::input_format, what) {}
};
struct HashMismatchError : Error {
    explicit HashMismatchError(const std::string& what) : Error(ErrorKind::hash_mismatch, what) {}
};
struct NumericError : Error {
    explicit NumericError(const std::string& what) : Error(ErrorKind::numeric, what) {}
};
struct UsageError : Error {
    explicit UsageError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

// 64-bit FNV-1a, used for every content digest in the file formats.
class Digest {
public:
    Digest& bytes(const void* data, std::size_t n);
    Digest& str(std::string_view s);  // length-prefixed
    Digest& u64(std::uint64_t v);
    Digest& f64(double v);
    std::uint64_t value() const noexcept { return h_; }

private:
    std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

std::string hex64(std::uint64_t v);

/// SplitMix64 finalizer; derives independent per-stage and per-item seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard. Distribution helpers below are ours because the std ones are not
// portable across library implementations.
using Rng = std::mt19937_64;

double uniform01(Rng& rng);                                // [0,1), 53 bits
double uniform(Rng& rng, double lo, double hi);            // [lo,hi)
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);    // [0,n), unbiased
std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi);  // [lo,hi]
double normal(Rng& rng);                                   // Box-Muller

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(uniform_index(rng, i));
        std::swap(v[i - 1], v[j]);
    }
}

// Little-endian binary IO used by the cache and checkpoint formats.
class BinaryWriter {
public:
    explicit BinaryWriter(std::ostream& os) : os_(os) {}
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void f32(float v);
    void f64(double v);
    void str(std::string_view s);
    void raw(const void* data, std::size_t n);

private:
    std::ostream& os_;
};

class BinaryReader {
public:
    explicit BinaryReader(std::istream& is) : is_(is) {}
    std::uint32_t u32();
    std::uint64_t u64();
    float f32();
    double f64();
    std::string str();
    void raw(void* data, std::size_t n);

private:
    std::istream& is_;
};

/// Runs fn(i) for i in [0,n) on up to `jobs` threads (0 = hardware
/// concurrency). Work is split in contiguous chunks; the first exception
/// thrown is rethrown on the caller.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace cgfam
