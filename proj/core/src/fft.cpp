#include "fft.hpp"

#include <map>
#include <mutex>
#include <vector>

#include <fftw3.h>
#include <fmt/format.h>

#include "mpwm/error.hpp"

namespace mpwm::detail {

namespace {

enum class Direction { forward, inverse };

class PlanCache {
public:
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(std::size_t size, Direction dir) {
        std::lock_guard lock(mutex_);
        const auto key = std::make_pair(size, dir);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        // Planning with scratch buffers; FFTW_UNALIGNED lets callers pass any array.
        std::vector<double> real(size);
        std::vector<std::complex<double>> cplx(size / 2 + 1);
        auto* c = reinterpret_cast<fftw_complex*>(cplx.data());
        const int n = static_cast<int>(size);
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fftw_plan plan = dir == Direction::forward ? fftw_plan_dft_r2c_1d(n, real.data(), c, flags)
                                                   : fftw_plan_dft_c2r_1d(n, c, real.data(), flags);
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<std::size_t, Direction>, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache instance;
    return instance;
}

void check_power_of_two(std::size_t size) {
    if (size < 2 || (size & (size - 1)) != 0) {
        throw ParameterError(fmt::format("transform length {} is not a power of two", size));
    }
}

}  // namespace

void real_forward(std::span<const double> in, std::span<std::complex<double>> out) {
    check_power_of_two(in.size());
    if (out.size() != in.size() / 2 + 1) throw ParameterError("forward transform output must hold N/2+1 bins");
    auto plan = cache().get(in.size(), Direction::forward);
    // r2c does not modify its input.
    fftw_execute_dft_r2c(plan, const_cast<double*>(in.data()), reinterpret_cast<fftw_complex*>(out.data()));
}

void real_inverse(std::span<const std::complex<double>> in, std::span<double> out) {
    check_power_of_two(out.size());
    if (in.size() != out.size() / 2 + 1) throw ParameterError("inverse transform input must hold N/2+1 bins");
    auto plan = cache().get(out.size(), Direction::inverse);
    // c2r overwrites its input.
    thread_local std::vector<std::complex<double>> scratch;
    scratch.assign(in.begin(), in.end());
    fftw_execute_dft_c2r(plan, reinterpret_cast<fftw_complex*>(scratch.data()), out.data());
}

}  // namespace mpwm::detail
