#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>

namespace ulab::detail {
namespace {

struct FftwBuffer {
    fftw_complex* data = nullptr;
    std::size_t size = 0;

    FftwBuffer() = default;
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
    ~FftwBuffer()
    {
        if (data) fftw_free(data);
    }

    void reserve(std::size_t n)
    {
        if (n <= size) return;
        if (data) fftw_free(data);
        data = fftw_alloc_complex(n);
        if (!data) throw std::bad_alloc();
        size = n;
    }
};

class PlanCache {
public:
    ~PlanCache()
    {
        std::lock_guard lock(mutex_);
        save_wisdom();
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(int n, FftDirection dir)
    {
        std::lock_guard lock(mutex_);
        auto key = std::make_pair(n, dir);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        load_wisdom();

        const std::size_t total = static_cast<std::size_t>(n) * n * n;
        FftwBuffer scratch;
        scratch.reserve(total);
        std::fill_n(reinterpret_cast<double*>(scratch.data), 2 * total, 0.0);

        const int sign = dir == FftDirection::forward ? FFTW_FORWARD : FFTW_BACKWARD;
        const unsigned flags = wisdom_path_.empty() ? FFTW_ESTIMATE : FFTW_MEASURE;
        fftw_plan plan = fftw_plan_dft_3d(n, n, n, scratch.data, scratch.data, sign, flags);
        if (!plan) throw std::runtime_error("FFTW planning failed for n=" + std::to_string(n));
        dirty_ = dirty_ || !wisdom_path_.empty();
        return plans_.emplace(key, plan).first->second;
    }

private:
    void load_wisdom()
    {
        if (wisdom_loaded_) return;
        wisdom_loaded_ = true;
        if (const char* path = std::getenv("ULAB_FFTW_WISDOM"); path && *path) {
            wisdom_path_ = path;
            fftw_import_wisdom_from_filename(path);
        }
    }

    void save_wisdom()
    {
        if (dirty_ && !wisdom_path_.empty()) fftw_export_wisdom_to_filename(wisdom_path_.c_str());
    }

    std::mutex mutex_;
    std::map<std::pair<int, FftDirection>, fftw_plan> plans_;
    std::string wisdom_path_;
    bool wisdom_loaded_ = false;
    bool dirty_ = false;
};

PlanCache& plan_cache()
{
    static PlanCache cache;
    return cache;
}

// dst[k] = src[k] * scale * (-1)^(k1+k2+k3) (sign only if checkerboard).
void scaled_copy(const std::complex<double>* src, std::complex<double>* dst, int n, bool checkerboard, double scale)
{
    std::size_t idx = 0;
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            const double s = (!checkerboard || (a + b) % 2 == 0) ? scale : -scale;
            if (!checkerboard) {
                for (int c = 0; c < n; ++c, ++idx) dst[idx] = src[idx] * s;
                continue;
            }
            for (int c = 0; c < n; c += 2, idx += 2) {
                dst[idx] = src[idx] * s;
                dst[idx + 1] = src[idx + 1] * -s;
            }
        }
    }
}

}  // namespace

void fft3d(std::span<const std::complex<double>> in, std::span<std::complex<double>> out, int n,
           FftDirection dir, bool checkerboard, double pre, double post)
{
    const std::size_t total = static_cast<std::size_t>(n) * n * n;
    if (in.size() != total || out.size() != total) throw std::invalid_argument("fft3d: size mismatch");
    if (checkerboard && n % 2 != 0) throw std::invalid_argument("fft3d: checkerboard needs even n");
    fftw_plan plan = plan_cache().get(n, dir);

    // Plans were made on fftw_malloc'd memory; run them on an aligned
    // per-thread scratch buffer so the caller's storage can be anything.
    thread_local FftwBuffer scratch;
    scratch.reserve(total);
    auto* buf = reinterpret_cast<std::complex<double>*>(scratch.data);
    scaled_copy(in.data(), buf, n, checkerboard, pre);
    fftw_execute_dft(plan, scratch.data, scratch.data);
    scaled_copy(buf, out.data(), n, checkerboard, post);
}

}  // namespace ulab::detail
